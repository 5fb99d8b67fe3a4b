//! Motion of the third body.
//!
//! In the rotating barycentric frame the momentum-form equations expand, per
//! unit reference mass and after dividing by `u`, to
//!
//! ```text
//! x'' = [ -G u^2 (1-nu)(x + nu R)/r1^3 - G u^2 nu (x - (1-nu) R)/r2^3
//!         + 2 y'/R^2 - 2 y R'/R^3 + x/(u R^4) - u' x' ] / u
//! y'' = [ -G u^2 (1-nu) y/r1^3 - G u^2 nu y/r2^3
//!         - 2 x'/R^2 + 2 x R'/R^3 + y/(u R^4) - u' y' ] / u
//! z'' = [ -G u^2 (1-nu) z/r1^3 - G u^2 nu z/r2^3 - u' z' ] / u
//! ```
//!
//! The `+2 x R'/R^3` term in the y-equation comes from expanding the frame
//! terms with `omega = 1/(u R^2)`: the Euler contribution `-u omega' x`
//! splits into `+u' x/(u R^2) + 2 x R'/R^3`, and the first part cancels the
//! momentum-form `-u' omega x` exactly. Writing the pair the other way round
//! (with `2 y R'/R^3` in the y-equation) leaves a cross term that destroys
//! the self-similar solutions; the similarity test suite guards this form.
//!
//! In the collinear case the frame is inertial and only the two
//! gravitational terms survive. The third body's own mass factor cancels
//! throughout, so no operation here takes a third-body mass.

use crate::mass_law::MassLawError;
use crate::ode::{self, DenseSolution, Event, IntegratorSettings, OdeError, OdeStatus};
use crate::primaries::{FrameMode, PrimaryEphemeris, SystemConfig, COLLISION_RADIUS};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThirdBodyError {
    #[error("trajectory span [{0}, {1}] must lie inside the ephemeris span [{2}, {3}]")]
    SpanOutsideEphemeris(f64, f64, f64, f64),
    #[error("state time {0} does not match the span start {1}")]
    SeedTimeMismatch(f64, f64),
    #[error(transparent)]
    MassLaw(#[from] MassLawError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Primary(#[from] crate::primaries::PrimaryError),
}

/// Position and frame-relative velocity of the third body at a time.
#[derive(Debug, Clone, Copy)]
pub struct ThirdBodyState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
}

impl ThirdBodyState {
    pub fn new(t: f64, position: [f64; 3], velocity: [f64; 3]) -> Self {
        Self {
            t,
            x: position[0],
            y: position[1],
            z: position[2],
            vx: velocity[0],
            vy: velocity[1],
            vz: velocity[2],
        }
    }

    /// Seed for a self-similar solution: position `(xi, eta, zeta) * R(t0)`
    /// and velocity `(xi, eta, zeta) * R'(t0)`.
    pub fn self_similar_seed(
        point: (f64, f64, f64),
        eph: &PrimaryEphemeris,
        t0: f64,
    ) -> Result<Self, ThirdBodyError> {
        let s = eph.sample(t0)?;
        Ok(Self {
            t: t0,
            x: point.0 * s.r,
            y: point.1 * s.r,
            z: point.2 * s.r,
            vx: point.0 * s.r_dot,
            vy: point.1 * s.r_dot,
            vz: point.2 * s.r_dot,
        })
    }

    fn as_vector(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.vx, self.vy, self.vz]
    }
}

/// Dense third-body trajectory tied to the ephemeris it was integrated
/// against.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub frame: FrameMode,
    /// The system this trajectory was integrated in.
    pub system: SystemConfig,
    dense: DenseSolution,
}

impl Trajectory {
    pub fn start_time(&self) -> f64 {
        self.dense.start_time()
    }

    pub fn end_time(&self) -> f64 {
        self.dense.end_time()
    }

    pub fn status(&self) -> OdeStatus {
        self.dense.status()
    }

    /// States at `n` uniformly spaced times across the solved span.
    pub fn states(&self, n: usize) -> Result<Vec<ThirdBodyState>, ThirdBodyError> {
        let n = n.max(2);
        let (t0, t1) = (self.start_time(), self.end_time());
        (0..n)
            .map(|i| self.sample(t0 + (t1 - t0) * i as f64 / (n - 1) as f64))
            .collect()
    }

    pub fn sample(&self, t: f64) -> Result<ThirdBodyState, ThirdBodyError> {
        let mut buf = [0.0; 6];
        self.dense.sample_into(t, &mut buf)?;
        Ok(ThirdBodyState {
            t,
            x: buf[0],
            y: buf[1],
            z: buf[2],
            vx: buf[3],
            vy: buf[4],
            vz: buf[5],
        })
    }

    /// CSV rows on a uniform grid with header `t,x,y,z,vx,vy,vz`.
    pub fn to_csv(&self, samples: usize) -> Result<String, ThirdBodyError> {
        let mut out = String::from("t,x,y,z,vx,vy,vz\n");
        let n = samples.max(2);
        let (t0, t1) = (self.start_time(), self.end_time());
        for i in 0..n {
            let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
            let s = self.sample(t)?;
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.t, s.x, s.y, s.z, s.vx, s.vy, s.vz
            ));
        }
        Ok(out)
    }
}

#[allow(clippy::too_many_arguments)]
fn acceleration(
    state: &[f64; 6],
    u: f64,
    u_dot: f64,
    r: f64,
    r_dot: f64,
    nu: f64,
    g: f64,
    rotating: bool,
) -> [f64; 3] {
    let (x, y, z) = (state[0], state[1], state[2]);
    let (vx, vy, vz) = (state[3], state[4], state[5]);

    let dx1 = x + nu * r;
    let dx2 = x - (1.0 - nu) * r;
    let r1sq = dx1 * dx1 + y * y + z * z;
    let r2sq = dx2 * dx2 + y * y + z * z;
    let r1_3 = r1sq * r1sq.sqrt();
    let r2_3 = r2sq * r2sq.sqrt();

    let gu2 = g * u * u;
    let c1 = -gu2 * (1.0 - nu) / r1_3;
    let c2 = -gu2 * nu / r2_3;

    let mut ax = c1 * dx1 + c2 * dx2;
    let mut ay = (c1 + c2) * y;
    let az = (c1 + c2) * z;

    if rotating {
        let r2 = r * r;
        let r3 = r2 * r;
        let r4 = r2 * r2;
        ax += 2.0 * vy / r2 - 2.0 * y * r_dot / r3 + x / (u * r4);
        ay += -2.0 * vx / r2 + 2.0 * x * r_dot / r3 + y / (u * r4);
    }

    [
        (ax - u_dot * vx) / u,
        (ay - u_dot * vy) / u,
        (az - u_dot * vz) / u,
    ]
}

/// Right-hand side of the rotating-frame equations at a single state.
pub fn rotating_rhs(
    state: &ThirdBodyState,
    eph: &PrimaryEphemeris,
    config: &SystemConfig,
) -> Result<[f64; 6], ThirdBodyError> {
    let s = eph.sample(state.t)?;
    let y = state.as_vector();
    let acc = acceleration(&y, s.u, s.u_dot, s.r, s.r_dot, config.nu, config.g, true);
    Ok([y[3], y[4], y[5], acc[0], acc[1], acc[2]])
}

/// Right-hand side in the inertial frame of the collinear case: only the
/// gravitational terms survive.
pub fn inertial_rhs(
    state: &ThirdBodyState,
    eph: &PrimaryEphemeris,
    config: &SystemConfig,
) -> Result<[f64; 6], ThirdBodyError> {
    let s = eph.sample(state.t)?;
    let y = state.as_vector();
    let acc = acceleration(&y, s.u, s.u_dot, s.r, s.r_dot, config.nu, config.g, false);
    Ok([y[3], y[4], y[5], acc[0], acc[1], acc[2]])
}

/// Integrate the third body against `eph` over `t_span`.
///
/// The frame follows the ephemeris mode. Integration stops early when the
/// body comes within [`COLLISION_RADIUS`] of either primary.
pub fn simulate(
    config: &SystemConfig,
    eph: &PrimaryEphemeris,
    state0: &ThirdBodyState,
    t_span: (f64, f64),
    settings: &IntegratorSettings,
) -> Result<Trajectory, ThirdBodyError> {
    if state0.t != t_span.0 {
        return Err(ThirdBodyError::SeedTimeMismatch(state0.t, t_span.0));
    }
    if t_span.0 < eph.start_time() || t_span.1 > eph.end_time() {
        return Err(ThirdBodyError::SpanOutsideEphemeris(
            t_span.0,
            t_span.1,
            eph.start_time(),
            eph.end_time(),
        ));
    }
    let rotating = eph.mode == FrameMode::Rotating;
    let (nu, g) = (config.nu, config.g);

    let rhs = |t: f64, y: &[f64], dydt: &mut [f64]| {
        let s = match eph.sample(t) {
            Ok(s) => s,
            Err(_) => {
                dydt.fill(f64::NAN);
                return;
            }
        };
        let state: [f64; 6] = [y[0], y[1], y[2], y[3], y[4], y[5]];
        let acc = acceleration(&state, s.u, s.u_dot, s.r, s.r_dot, nu, g, rotating);
        dydt[0] = y[3];
        dydt[1] = y[4];
        dydt[2] = y[5];
        dydt[3] = acc[0];
        dydt[4] = acc[1];
        dydt[5] = acc[2];
    };

    let near_primary_1 = |t: f64, y: &[f64]| match eph.sample(t) {
        Ok(s) => {
            let dx = y[0] + nu * s.r;
            (dx * dx + y[1] * y[1] + y[2] * y[2]).sqrt() - COLLISION_RADIUS
        }
        Err(_) => f64::NAN,
    };
    let near_primary_2 = |t: f64, y: &[f64]| match eph.sample(t) {
        Ok(s) => {
            let dx = y[0] - (1.0 - nu) * s.r;
            (dx * dx + y[1] * y[1] + y[2] * y[2]).sqrt() - COLLISION_RADIUS
        }
        Err(_) => f64::NAN,
    };
    let events = [Event::new(&near_primary_1), Event::new(&near_primary_2)];

    let dense = ode::integrate(rhs, &state0.as_vector(), t_span, settings, &events)?;
    Ok(Trajectory {
        frame: eph.mode,
        system: config.clone(),
        dense,
    })
}

/// Maximum relative deviation of a trajectory from the self-similar motion
/// `(x, y, z) = (xi, eta, zeta) R(t)`:
///
/// `max over samples of |(x,y,z)(t) - (xi,eta,zeta) R(t)| / max(R(t), 1)`.
pub fn self_similarity_residual(
    traj: &Trajectory,
    eph: &PrimaryEphemeris,
    point: (f64, f64, f64),
) -> Result<f64, ThirdBodyError> {
    let (t0, t1) = (traj.start_time(), traj.end_time());
    let n = 1000usize;
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let t = t0 + (t1 - t0) * i as f64 / n as f64;
        let s = traj.sample(t)?;
        let p = eph.sample(t)?;
        let dx = s.x - point.0 * p.r;
        let dy = s.y - point.1 * p.r;
        let dz = s.z - point.2 * p.r;
        let dev = (dx * dx + dy * dy + dz * dz).sqrt() / p.r.max(1.0);
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Jacobi-style integral of the classical constant-mass limit
/// (`u = 1`, `R = 1`, `G = 1`):
///
/// `x^2 + y^2 + 2(1-nu)/r1 + 2 nu/r2 - v^2`.
///
/// Used purely as a classical-limit diagnostic.
pub fn jacobi_constant(state: &ThirdBodyState, nu: f64) -> f64 {
    let dx1 = state.x + nu;
    let dx2 = state.x - (1.0 - nu);
    let r1 = (dx1 * dx1 + state.y * state.y + state.z * state.z).sqrt();
    let r2 = (dx2 * dx2 + state.y * state.y + state.z * state.z).sqrt();
    let v2 = state.vx * state.vx + state.vy * state.vy + state.vz * state.vz;
    state.x * state.x + state.y * state.y + 2.0 * (1.0 - nu) / r1 + 2.0 * nu / r2 - v2
}
