//! Motion of the two primaries.
//!
//! In units where the reference separation, total reference mass, and
//! reference angular velocity are all 1, the separation factor `R(t)` obeys
//!
//! ```text
//! d/dt(u R') = 1/(u R^3) - G u^2 / R^2      (rotating case)
//! d/dt(u R') =           - G u^2 / R^2      (collinear case, zero angular momentum)
//! ```
//!
//! with the frame angle advancing as `theta' = 1/(u R^2)` in the rotating
//! case and frozen in the collinear case. `G` stays a free configuration
//! scalar; the classical circular limit is `u = 1`, `G = 1`, `R = 1`.
//!
//! A full Cartesian two-body integration of both primaries under
//! `d/dt(m_i r_i') = -/+ G m_1 m_2 r / r^3` serves as an independent oracle
//! for the reduced form.

use crate::mass_law::{MassLaw, MassLawError};
use crate::ode::{self, DenseSolution, Event, IntegratorSettings, OdeError, OdeStatus};
use thiserror::Error;

/// Separation below which a primary collision event fires.
pub const COLLISION_RADIUS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PrimaryError {
    #[error("mass parameter nu must lie in (0, 1/2], got {0}")]
    BadMassParameter(f64),
    #[error("gravitational constant G must be strictly positive, got {0}")]
    BadGravity(f64),
    #[error("initial separation must be strictly positive, got {0}")]
    BadInitialSeparation(f64),
    #[error("configuration mode is {found:?} but the operation requires {expected:?}")]
    WrongMode {
        expected: FrameMode,
        found: FrameMode,
    },
    #[error("initial mass must be strictly positive, got {0}")]
    BadMass(f64),
    #[error(transparent)]
    MassLaw(#[from] MassLawError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Which working frame the primaries (and the third body) live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    /// Barycentric frame rotating with the primaries; `theta' = 1/(u R^2)`.
    Rotating,
    /// Primaries move on a fixed line; the third body is integrated in the
    /// inertial frame.
    Collinear,
}

/// Static description of a primary pair: mass parameter, gravity, frame and
/// mass law.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub nu: f64,
    pub g: f64,
    pub mode: FrameMode,
    pub law: MassLaw,
}

impl SystemConfig {
    pub fn new(nu: f64, g: f64, mode: FrameMode, law: MassLaw) -> Result<Self, PrimaryError> {
        if !(nu > 0.0 && nu <= 0.5) {
            return Err(PrimaryError::BadMassParameter(nu));
        }
        if !(g > 0.0) || !g.is_finite() {
            return Err(PrimaryError::BadGravity(g));
        }
        Ok(Self { nu, g, mode, law })
    }
}

/// Initial data for the reduced propagation. The defaults match the unit
/// normalization at the reference epoch.
#[derive(Debug, Clone, Copy)]
pub struct PrimaryInit {
    pub r0: f64,
    pub r_dot0: f64,
    pub theta0: f64,
}

impl Default for PrimaryInit {
    fn default() -> Self {
        Self {
            r0: 1.0,
            r_dot0: 0.0,
            theta0: 0.0,
        }
    }
}

impl PrimaryInit {
    /// Initial data consistent with a kappa-constrained law:
    /// `R = kappa/(G u^3)` and its time derivative at the span start.
    pub fn kappa_consistent(law: &MassLaw, g: f64, t0: f64) -> Result<Self, PrimaryError> {
        let kappa = law
            .kappa()
            .ok_or(PrimaryError::MassLaw(MassLawError::InvalidParameter {
                name: "law",
                requirement: "kappa-constrained",
                value: f64::NAN,
            }))?;
        let (u, du) = law.eval(t0)?;
        Ok(Self {
            r0: kappa / (g * u * u * u),
            r_dot0: -3.0 * kappa * du / (g * u * u * u * u),
            theta0: 0.0,
        })
    }
}

/// One dense sample of the primary motion.
#[derive(Debug, Clone, Copy)]
pub struct PrimarySample {
    pub t: f64,
    pub u: f64,
    pub u_dot: f64,
    pub r: f64,
    pub r_dot: f64,
    pub theta: f64,
    /// Frame angular velocity: `1/(u R^2)` in rotating mode, 0 in collinear.
    pub omega: f64,
}

/// Dense record of the primaries' reduced motion over a validity interval.
#[derive(Debug, Clone)]
pub struct PrimaryEphemeris {
    pub mode: FrameMode,
    pub nu: f64,
    pub g: f64,
    pub law: MassLaw,
    dense: DenseSolution,
}

impl PrimaryEphemeris {
    /// Start of the solved span.
    pub fn start_time(&self) -> f64 {
        self.dense.start_time()
    }

    /// End of the solved span (span end or collision event).
    pub fn end_time(&self) -> f64 {
        self.dense.end_time()
    }

    /// Whether propagation ended at the collision event.
    pub fn ended_by_collision(&self) -> bool {
        matches!(self.dense.status(), OdeStatus::EventStopped { .. })
    }

    /// Termination status of the underlying integration.
    pub fn status(&self) -> OdeStatus {
        self.dense.status()
    }

    /// Times of the accepted integration nodes.
    pub fn node_times(&self) -> Vec<f64> {
        self.dense.node_times()
    }

    /// Sample separation, angle, and mass factor at `t`.
    pub fn sample(&self, t: f64) -> Result<PrimarySample, PrimaryError> {
        let mut buf = [0.0; 3];
        self.dense.sample_into(t, &mut buf)?;
        let (u, u_dot) = self.law.eval(t)?;
        let omega = match self.mode {
            FrameMode::Rotating => 1.0 / (u * buf[0] * buf[0]),
            FrameMode::Collinear => 0.0,
        };
        Ok(PrimarySample {
            t,
            u,
            u_dot,
            r: buf[0],
            r_dot: buf[1],
            theta: buf[2],
            omega,
        })
    }

    /// Time derivative of the interpolated `(R, R', theta)` at `t`, for
    /// defect diagnostics.
    pub fn sample_state_derivative(&self, t: f64) -> Result<[f64; 3], PrimaryError> {
        let mut buf = [0.0; 3];
        self.dense.sample_derivative_into(t, &mut buf)?;
        Ok(buf)
    }
}

/// Barycentric abscissae of the primaries at `t`: `x1 = -nu R`,
/// `x2 = (1 - nu) R`.
pub fn primary_positions(
    eph: &PrimaryEphemeris,
    nu: f64,
    t: f64,
) -> Result<(f64, f64), PrimaryError> {
    let s = eph.sample(t)?;
    Ok((-nu * s.r, (1.0 - nu) * s.r))
}

fn propagate_reduced(
    config: &SystemConfig,
    init: PrimaryInit,
    t_span: (f64, f64),
    settings: &IntegratorSettings,
    rotating: bool,
) -> Result<PrimaryEphemeris, PrimaryError> {
    if !(init.r0 > 0.0) {
        return Err(PrimaryError::BadInitialSeparation(init.r0));
    }
    let g = config.g;
    let law = config.law.clone();
    let rhs = |t: f64, y: &[f64], dydt: &mut [f64]| {
        let (u, u_dot) = law.eval(t).unwrap_or((f64::NAN, f64::NAN));
        let (r, r_dot) = (y[0], y[1]);
        let centrifugal = if rotating { 1.0 / (u * r * r * r) } else { 0.0 };
        dydt[0] = r_dot;
        dydt[1] = (centrifugal - g * u * u / (r * r) - u_dot * r_dot) / u;
        dydt[2] = if rotating { 1.0 / (u * r * r) } else { 0.0 };
    };
    let collision = |_t: f64, y: &[f64]| y[0] - COLLISION_RADIUS;
    let events = [Event::new(&collision)];
    let dense = ode::integrate(
        rhs,
        &[init.r0, init.r_dot0, init.theta0],
        t_span,
        settings,
        &events,
    )?;
    Ok(PrimaryEphemeris {
        mode: config.mode,
        nu: config.nu,
        g: config.g,
        law: config.law.clone(),
        dense,
    })
}

/// Propagate the primaries in the rotating case.
pub fn propagate_rotating(
    config: &SystemConfig,
    init: PrimaryInit,
    t_span: (f64, f64),
    settings: &IntegratorSettings,
) -> Result<PrimaryEphemeris, PrimaryError> {
    if config.mode != FrameMode::Rotating {
        return Err(PrimaryError::WrongMode {
            expected: FrameMode::Rotating,
            found: config.mode,
        });
    }
    propagate_reduced(config, init, t_span, settings, true)
}

/// Propagate the primaries in the collinear (zero angular momentum) case.
pub fn propagate_collinear(
    config: &SystemConfig,
    init: PrimaryInit,
    t_span: (f64, f64),
    settings: &IntegratorSettings,
) -> Result<PrimaryEphemeris, PrimaryError> {
    if config.mode != FrameMode::Collinear {
        return Err(PrimaryError::WrongMode {
            expected: FrameMode::Collinear,
            found: config.mode,
        });
    }
    propagate_reduced(config, init, t_span, settings, false)
}

/// Full two-body integration of both primaries in inertial Cartesian
/// coordinates.
#[derive(Debug, Clone)]
pub struct CartesianTwoBody {
    pub m10: f64,
    pub m20: f64,
    pub law: MassLaw,
    /// State layout: `[r1(3), r2(3), v1(3), v2(3)]`.
    dense: DenseSolution,
}

/// One sample of the full two-body motion.
#[derive(Debug, Clone, Copy)]
pub struct TwoBodySample {
    pub t: f64,
    pub r1: [f64; 3],
    pub r2: [f64; 3],
    pub v1: [f64; 3],
    pub v2: [f64; 3],
    pub u: f64,
}

impl CartesianTwoBody {
    pub fn start_time(&self) -> f64 {
        self.dense.start_time()
    }

    pub fn end_time(&self) -> f64 {
        self.dense.end_time()
    }

    pub fn sample(&self, t: f64) -> Result<TwoBodySample, PrimaryError> {
        let mut y = [0.0; 12];
        self.dense.sample_into(t, &mut y)?;
        let (u, _) = self.law.eval(t)?;
        Ok(TwoBodySample {
            t,
            r1: [y[0], y[1], y[2]],
            r2: [y[3], y[4], y[5]],
            v1: [y[6], y[7], y[8]],
            v2: [y[9], y[10], y[11]],
            u,
        })
    }

    /// Total linear momentum `m1 v1 + m2 v2` at `t`. Constant along any
    /// solution.
    pub fn momentum(&self, t: f64) -> Result<[f64; 3], PrimaryError> {
        let s = self.sample(t)?;
        let m1 = self.m10 * s.u;
        let m2 = self.m20 * s.u;
        Ok([
            m1 * s.v1[0] + m2 * s.v2[0],
            m1 * s.v1[1] + m2 * s.v2[1],
            m1 * s.v1[2] + m2 * s.v2[2],
        ])
    }

    /// Center-of-mass position at `t`.
    pub fn center_of_mass(&self, t: f64) -> Result<[f64; 3], PrimaryError> {
        let s = self.sample(t)?;
        let m1 = self.m10 * s.u;
        let m2 = self.m20 * s.u;
        let total = m1 + m2;
        Ok([
            (m1 * s.r1[0] + m2 * s.r2[0]) / total,
            (m1 * s.r1[1] + m2 * s.r2[1]) / total,
            (m1 * s.r1[2] + m2 * s.r2[2]) / total,
        ])
    }

    /// Separation distance at `t`.
    pub fn separation(&self, t: f64) -> Result<f64, PrimaryError> {
        let s = self.sample(t)?;
        let dx = s.r1[0] - s.r2[0];
        let dy = s.r1[1] - s.r2[1];
        let dz = s.r1[2] - s.r2[2];
        Ok((dx * dx + dy * dy + dz * dz).sqrt())
    }
}

/// Integrate both primaries in inertial Cartesian coordinates under the
/// momentum-form equations with shared mass factor.
#[allow(clippy::too_many_arguments)]
pub fn propagate_full_cartesian(
    m10: f64,
    m20: f64,
    law: &MassLaw,
    g: f64,
    r1_0: [f64; 3],
    r2_0: [f64; 3],
    v1_0: [f64; 3],
    v2_0: [f64; 3],
    t_span: (f64, f64),
    settings: &IntegratorSettings,
) -> Result<CartesianTwoBody, PrimaryError> {
    if !(m10 > 0.0) {
        return Err(PrimaryError::BadMass(m10));
    }
    if !(m20 > 0.0) {
        return Err(PrimaryError::BadMass(m20));
    }
    if !(g > 0.0) {
        return Err(PrimaryError::BadGravity(g));
    }
    let sep0 = {
        let dx = r1_0[0] - r2_0[0];
        let dy = r1_0[1] - r2_0[1];
        let dz = r1_0[2] - r2_0[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    };
    if !(sep0 > 0.0) {
        return Err(PrimaryError::BadInitialSeparation(sep0));
    }

    // Expanding d/dt(m_i v_i) = F_i with m_i = m_{i0} u:
    //   v_i' = F_i / (m_{i0} u) - (u'/u) v_i,
    // and F_1 = -G m1 m2 r / r^3 with r = r1 - r2, F_2 = -F_1.
    let law_c = law.clone();
    let rhs = move |t: f64, y: &[f64], dydt: &mut [f64]| {
        let (u, u_dot) = law_c.eval(t).unwrap_or((f64::NAN, f64::NAN));
        let rx = y[0] - y[3];
        let ry = y[1] - y[4];
        let rz = y[2] - y[5];
        let r2 = rx * rx + ry * ry + rz * rz;
        let r3 = r2 * r2.sqrt();
        let drag = u_dot / u;
        // a1 = -G m2 u r/r^3 - (u'/u) v1 ; a2 = +G m1 u r/r^3 - (u'/u) v2.
        let c1 = -g * m20 * u / r3;
        let c2 = g * m10 * u / r3;
        dydt[0] = y[6];
        dydt[1] = y[7];
        dydt[2] = y[8];
        dydt[3] = y[9];
        dydt[4] = y[10];
        dydt[5] = y[11];
        dydt[6] = c1 * rx - drag * y[6];
        dydt[7] = c1 * ry - drag * y[7];
        dydt[8] = c1 * rz - drag * y[8];
        dydt[9] = c2 * rx - drag * y[9];
        dydt[10] = c2 * ry - drag * y[10];
        dydt[11] = c2 * rz - drag * y[11];
    };

    let collision = |_t: f64, y: &[f64]| {
        let dx = y[0] - y[3];
        let dy = y[1] - y[4];
        let dz = y[2] - y[5];
        (dx * dx + dy * dy + dz * dz).sqrt() - COLLISION_RADIUS
    };
    let events = [Event::new(&collision)];

    let y0 = [
        r1_0[0], r1_0[1], r1_0[2], r2_0[0], r2_0[1], r2_0[2], v1_0[0], v1_0[1], v1_0[2], v2_0[0],
        v2_0[1], v2_0[2],
    ];
    let dense = ode::integrate(rhs, &y0, t_span, settings, &events)?;
    Ok(CartesianTwoBody {
        m10,
        m20,
        law: law.clone(),
        dense,
    })
}

/// CSV rows of an ephemeris sampled on a uniform grid, with the header
/// `t,u,R,Rdot,theta,omega` and full-precision scientific notation.
pub fn ephemeris_csv(eph: &PrimaryEphemeris, samples: usize) -> Result<String, PrimaryError> {
    let mut out = String::from("t,u,R,Rdot,theta,omega\n");
    let n = samples.max(2);
    let (t0, t1) = (eph.start_time(), eph.end_time());
    for i in 0..n {
        let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
        let s = eph.sample(t)?;
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.t, s.u, s.r, s.r_dot, s.theta, s.omega
        ));
    }
    Ok(out)
}
