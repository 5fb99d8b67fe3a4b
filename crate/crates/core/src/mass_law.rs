//! The shared mass factor `u(t)`.
//!
//! All three bodies carry masses `m_i = m_{i0} u(t)` with a single positive
//! `u`, so mass ratios are constant in time. Closed-form laws cover the
//! common modeling choices; the kappa-constrained law is special: it is the
//! unique motion (given initial data) for which `G R u^3` stays equal to a
//! constant `kappa > 1`, the condition under which the coplanar equilibria
//! exist.
//!
//! Substituting `R = kappa / (G u^3)` into the reduced primary equation
//! `d/dt(u R') = 1/(u R^3) - G u^2 / R^2` leaves a second-order scalar ODE
//! in `u` alone:
//!
//! ```text
//! u'' = 3 u'^2 / u + (kappa - 1) G^4 u^11 / (3 kappa^4)
//! ```
//!
//! which is what [`solve_kappa_constrained`] integrates. The algebraic
//! constraint and the residual of the reduced equation are re-checked a
//! posteriori by the test suite rather than enforced by a DAE solver.

use crate::ode::{self, DenseSolution, Event, IntegratorSettings, OdeError};
use thiserror::Error;

/// Smallest accepted excess of kappa over 1 when solving the constrained law.
///
/// Values closer to 1 make the reduced ODE stiff near the remote limit and
/// produce solutions of no practical span; the equilibria module still
/// accepts any kappa > 1 for the algebraic root solves.
pub const MIN_KAPPA_EXCESS: f64 = 1e-6;

/// Floor below which `u` is treated as having reached zero.
const U_FLOOR: f64 = 1e-9;
/// Cap above which the constrained law is truncated as blown up.
const U_CAP: f64 = 1e6;

#[derive(Debug, Error)]
pub enum MassLawError {
    #[error("kappa must exceed 1 by at least {MIN_KAPPA_EXCESS:e} (got {0})")]
    KappaTooSmall(f64),
    #[error("{name} must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("t = {t} is outside the law's validity interval [{start}, {end}]")]
    OutsideValidity { t: f64, start: f64, end: f64 },
    #[error("mass factor is not positive at t = {t}")]
    NonPositiveMass { t: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// A positive mass factor `u(t)` with its analytic derivative.
#[derive(Debug, Clone)]
pub enum MassLaw {
    /// `u = u0`.
    Constant { u0: f64 },
    /// `u = 1 + rate * t`.
    Linear { rate: f64 },
    /// `u = exp(rate * t)`.
    Exponential { rate: f64 },
    /// `u = (alpha t^2 + 2 beta t + gamma)^(-1/2)`.
    MestscherskyUnified { alpha: f64, beta: f64, gamma: f64 },
    /// Tabulated solution of the reduced equation under `G R u^3 = kappa`.
    KappaConstrained {
        kappa: f64,
        g: f64,
        table: DenseSolution,
    },
}

impl MassLaw {
    pub fn constant(u0: f64) -> Result<Self, MassLawError> {
        if !(u0 > 0.0) || !u0.is_finite() {
            return Err(MassLawError::InvalidParameter {
                name: "u0",
                requirement: "strictly positive and finite",
                value: u0,
            });
        }
        Ok(MassLaw::Constant { u0 })
    }

    pub fn linear(rate: f64) -> Result<Self, MassLawError> {
        if !rate.is_finite() {
            return Err(MassLawError::InvalidParameter {
                name: "rate",
                requirement: "finite",
                value: rate,
            });
        }
        Ok(MassLaw::Linear { rate })
    }

    pub fn exponential(rate: f64) -> Result<Self, MassLawError> {
        if !rate.is_finite() {
            return Err(MassLawError::InvalidParameter {
                name: "rate",
                requirement: "finite",
                value: rate,
            });
        }
        Ok(MassLaw::Exponential { rate })
    }

    pub fn mestschersky(alpha: f64, beta: f64, gamma: f64) -> Result<Self, MassLawError> {
        if !(gamma > 0.0) {
            return Err(MassLawError::InvalidParameter {
                name: "gamma",
                requirement: "strictly positive (u(0) must exist)",
                value: gamma,
            });
        }
        Ok(MassLaw::MestscherskyUnified { alpha, beta, gamma })
    }

    /// Mass factor and its time derivative at `t`.
    ///
    /// Fails when `t` leaves the validity interval or `u` is not positive
    /// there.
    pub fn eval(&self, t: f64) -> Result<(f64, f64), MassLawError> {
        match self {
            MassLaw::Constant { u0 } => Ok((*u0, 0.0)),
            MassLaw::Linear { rate } => {
                let u = 1.0 + rate * t;
                if u <= 0.0 {
                    return Err(MassLawError::NonPositiveMass { t });
                }
                Ok((u, *rate))
            }
            MassLaw::Exponential { rate } => {
                let u = (rate * t).exp();
                Ok((u, rate * u))
            }
            MassLaw::MestscherskyUnified { alpha, beta, gamma } => {
                let q = alpha * t * t + 2.0 * beta * t + gamma;
                if q <= 0.0 {
                    return Err(MassLawError::NonPositiveMass { t });
                }
                let u = q.powf(-0.5);
                let u_dot = -(alpha * t + beta) * u / q;
                Ok((u, u_dot))
            }
            MassLaw::KappaConstrained { table, .. } => {
                let start = table.start_time();
                let end = table.end_time();
                if t < start || t > end {
                    return Err(MassLawError::OutsideValidity { t, start, end });
                }
                let mut buf = [0.0; 2];
                table.sample_into(t, &mut buf)?;
                if buf[0] <= 0.0 {
                    return Err(MassLawError::NonPositiveMass { t });
                }
                Ok((buf[0], buf[1]))
            }
        }
    }

    /// Validity interval of the law.
    pub fn validity(&self) -> (f64, f64) {
        match self {
            MassLaw::Constant { .. } | MassLaw::Exponential { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            MassLaw::Linear { rate } => {
                if *rate > 0.0 {
                    (-1.0 / rate, f64::INFINITY)
                } else if *rate < 0.0 {
                    (f64::NEG_INFINITY, -1.0 / rate)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            MassLaw::MestscherskyUnified { alpha, beta, gamma } => {
                // Positive-q interval of the quadratic around t = 0.
                let (a, b, c) = (*alpha, 2.0 * beta, *gamma);
                if a == 0.0 {
                    if b == 0.0 {
                        (f64::NEG_INFINITY, f64::INFINITY)
                    } else if b > 0.0 {
                        (-c / b, f64::INFINITY)
                    } else {
                        (f64::NEG_INFINITY, -c / b)
                    }
                } else {
                    let disc = b * b - 4.0 * a * c;
                    if disc < 0.0 {
                        if a > 0.0 {
                            (f64::NEG_INFINITY, f64::INFINITY)
                        } else {
                            (0.0, 0.0)
                        }
                    } else {
                        let sq = disc.sqrt();
                        let r1 = (-b - sq) / (2.0 * a);
                        let r2 = (-b + sq) / (2.0 * a);
                        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                        if a > 0.0 {
                            // Positive outside the roots; keep the branch containing 0.
                            if hi <= 0.0 {
                                (hi, f64::INFINITY)
                            } else {
                                (f64::NEG_INFINITY, lo)
                            }
                        } else {
                            (lo, hi)
                        }
                    }
                }
            }
            MassLaw::KappaConstrained { table, .. } => (table.start_time(), table.end_time()),
        }
    }

    /// The kappa constant, for constrained laws.
    pub fn kappa(&self) -> Option<f64> {
        match self {
            MassLaw::KappaConstrained { kappa, .. } => Some(*kappa),
            _ => None,
        }
    }

    /// Whether this law is the kappa-constrained kind.
    pub fn is_kappa_constrained(&self) -> bool {
        matches!(self, MassLaw::KappaConstrained { .. })
    }
}

/// Solve for the mass factor that keeps `G R u^3 = kappa` along the reduced
/// primary motion, starting from `u(t0) = u0`, `u'(t0) = u_dot0`.
///
/// The returned law's validity interval is the integrated span, truncated
/// where `u` would cross zero or blow up (the constrained motion reaches a
/// collision of the primaries in finite time when `u` grows).
pub fn solve_kappa_constrained(
    kappa: f64,
    g: f64,
    u0: f64,
    u_dot0: f64,
    t_span: (f64, f64),
    settings: &IntegratorSettings,
) -> Result<MassLaw, MassLawError> {
    if !(kappa > 1.0 + MIN_KAPPA_EXCESS) {
        return Err(MassLawError::KappaTooSmall(kappa));
    }
    if !(g > 0.0) {
        return Err(MassLawError::InvalidParameter {
            name: "G",
            requirement: "strictly positive",
            value: g,
        });
    }
    if !(u0 > 0.0) {
        return Err(MassLawError::InvalidParameter {
            name: "u0",
            requirement: "strictly positive",
            value: u0,
        });
    }

    let forcing = (kappa - 1.0) * g.powi(4) / (3.0 * kappa.powi(4));
    let rhs = move |_t: f64, y: &[f64], dydt: &mut [f64]| {
        let (u, v) = (y[0], y[1]);
        dydt[0] = v;
        dydt[1] = 3.0 * v * v / u + forcing * u.powi(11);
    };

    let floor = |_t: f64, y: &[f64]| y[0] - U_FLOOR;
    let cap = |_t: f64, y: &[f64]| y[0] - U_CAP;
    let events = [Event::new(&floor), Event::new(&cap)];

    let table = ode::integrate(rhs, &[u0, u_dot0], t_span, settings, &events)?;
    Ok(MassLaw::KappaConstrained { kappa, g, table })
}
