//! Adaptive initial-value-problem integration with dense output and event
//! detection.
//!
//! The stepper is the Dormand-Prince 5(4) embedded pair with the free
//! fourth-order interpolant, which is enough for every right-hand side in
//! this crate: all of them are smooth away from collisions, and collisions
//! are caught by scalar event functions before the step size underflows.
//!
//! Integration is deterministic: the same inputs and settings produce a
//! bit-identical [`DenseSolution`].

// The stage loops index several stage arrays at once.
#![allow(clippy::needless_range_loop)]

use thiserror::Error;

/// Tolerances and step-size limits for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegratorSettings {
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Initial step size; `None` selects one automatically.
    pub initial_step: Option<f64>,
    /// Upper bound on the step size.
    pub max_step: f64,
    /// Upper bound on the number of accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorSettings {
    /// Settings with the given tolerances and defaults elsewhere.
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), OdeError> {
        if !(self.rtol > 0.0) || !self.rtol.is_finite() {
            return Err(OdeError::InvalidSettings(format!(
                "rtol must be strictly positive and finite, got {}",
                self.rtol
            )));
        }
        if !(self.atol > 0.0) || !self.atol.is_finite() {
            return Err(OdeError::InvalidSettings(format!(
                "atol must be strictly positive and finite, got {}",
                self.atol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(OdeError::InvalidSettings(format!(
                "max step must be strictly positive, got {}",
                self.max_step
            )));
        }
        if let Some(h0) = self.initial_step {
            if !(h0 > 0.0) || !h0.is_finite() {
                return Err(OdeError::InvalidSettings(format!(
                    "initial step must be strictly positive and finite, got {h0}"
                )));
            }
            if h0 > self.max_step {
                return Err(OdeError::InvalidSettings(format!(
                    "initial step {} exceeds max step {}",
                    h0, self.max_step
                )));
            }
        }
        if self.max_steps == 0 {
            return Err(OdeError::InvalidSettings(
                "max steps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A terminal scalar event: integration stops where `function` crosses zero.
pub struct Event<'a> {
    /// Scalar function of `(t, y)` monitored for sign changes.
    pub function: &'a dyn Fn(f64, &[f64]) -> f64,
    /// Width, in time units, to which the crossing is localized.
    pub tolerance: f64,
}

impl<'a> Event<'a> {
    /// Event with the default localization tolerance of 1e-12 time units.
    pub fn new(function: &'a dyn Fn(f64, &[f64]) -> f64) -> Self {
        Self {
            function,
            tolerance: 1e-12,
        }
    }
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeStatus {
    /// Reached the end of the requested span.
    Completed,
    /// Stopped where event `index` crossed zero.
    EventStopped {
        /// Index into the `events` slice passed to [`integrate`].
        index: usize,
    },
    /// The step size underflowed, which signals a singularity such as a
    /// collision. The solution is valid up to its recorded end time.
    StepFailure,
}

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("invalid integrator settings: {0}")]
    InvalidSettings(String),
    #[error("integration span [{0}, {1}] is empty or reversed")]
    BadSpan(f64, f64),
    #[error("right-hand side is not finite at t = {0}")]
    NonFiniteRhs(f64),
    #[error("exceeded {max} steps at t = {t} (span end {t_end})")]
    MaxStepsExceeded { max: usize, t: f64, t_end: f64 },
    #[error("sample time {t} outside solved span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },
}

/// One accepted step: start state plus interpolation coefficients.
///
/// The interpolant over the step is, with `s = (t - t0) / h` in `[0, 1]`,
/// `P(s) = c0 + c1 s + c2 s(1-s) + c3 s^2(1-s) + c4 s^2(1-s)^2`
/// per component, which matches value and derivative at both step ends.
#[derive(Debug, Clone)]
struct StepRecord {
    t0: f64,
    h: f64,
    /// `5 * dim` coefficients, component-major: `cont[k * dim + i]`.
    cont: Vec<f64>,
}

/// Dense-output solution of an initial value problem.
///
/// Stores every accepted step with interpolation coefficients so the state
/// can be sampled anywhere inside the solved span.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    dim: usize,
    t_start: f64,
    t_end: f64,
    y_end: Vec<f64>,
    steps: Vec<StepRecord>,
    status: OdeStatus,
    n_accepted: usize,
    n_rejected: usize,
}

impl DenseSolution {
    /// State dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// First time of the solved span.
    pub fn start_time(&self) -> f64 {
        self.t_start
    }

    /// Last time of the solved span (span end, event time, or failure time).
    pub fn end_time(&self) -> f64 {
        self.t_end
    }

    /// State at [`end_time`](Self::end_time).
    pub fn end_state(&self) -> &[f64] {
        &self.y_end
    }

    /// Terminal status.
    pub fn status(&self) -> OdeStatus {
        self.status
    }

    /// Number of accepted steps.
    pub fn accepted_steps(&self) -> usize {
        self.n_accepted
    }

    /// Number of rejected trial steps.
    pub fn rejected_steps(&self) -> usize {
        self.n_rejected
    }

    /// Times of the accepted step starts, followed by the end time.
    pub fn node_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.steps.iter().map(|s| s.t0).collect();
        ts.push(self.t_end);
        ts
    }

    fn step_for(&self, t: f64) -> Result<&StepRecord, OdeError> {
        let lo = self.t_start.min(self.t_end);
        let hi = self.t_start.max(self.t_end);
        if self.steps.is_empty() || !(lo..=hi).contains(&t) {
            return Err(OdeError::OutOfSpan {
                t,
                start: self.t_start,
                end: self.t_end,
            });
        }
        // Last step whose start does not exceed t.
        let idx = self.steps.partition_point(|s| s.t0 <= t);
        Ok(&self.steps[idx.saturating_sub(1)])
    }

    /// Interpolated state at `t`, written into `out` (length [`dim`](Self::dim)).
    pub fn sample_into(&self, t: f64, out: &mut [f64]) -> Result<(), OdeError> {
        debug_assert_eq!(out.len(), self.dim);
        let step = self.step_for(t)?;
        let s = (t - step.t0) / step.h;
        let s1 = 1.0 - s;
        let d = self.dim;
        for i in 0..d {
            let c0 = step.cont[i];
            let c1 = step.cont[d + i];
            let c2 = step.cont[2 * d + i];
            let c3 = step.cont[3 * d + i];
            let c4 = step.cont[4 * d + i];
            out[i] = c0 + s * (c1 + s1 * (c2 + s * (c3 + s1 * c4)));
        }
        Ok(())
    }

    /// Interpolated state at `t`.
    pub fn sample(&self, t: f64) -> Result<Vec<f64>, OdeError> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(t, &mut out)?;
        Ok(out)
    }

    /// Time derivative of the interpolant at `t`, written into `out`.
    pub fn sample_derivative_into(&self, t: f64, out: &mut [f64]) -> Result<(), OdeError> {
        debug_assert_eq!(out.len(), self.dim);
        let step = self.step_for(t)?;
        let s = (t - step.t0) / step.h;
        let d = self.dim;
        // Expand P(s) = c0 + (c1+c2)s + (-c2+c3+c4)s^2 + (-c3-2c4)s^3 + c4 s^4.
        for i in 0..d {
            let c1 = step.cont[d + i];
            let c2 = step.cont[2 * d + i];
            let c3 = step.cont[3 * d + i];
            let c4 = step.cont[4 * d + i];
            let p1 = c1 + c2;
            let p2 = -c2 + c3 + c4;
            let p3 = -c3 - 2.0 * c4;
            let p4 = c4;
            out[i] = (p1 + s * (2.0 * p2 + s * (3.0 * p3 + s * 4.0 * p4))) / step.h;
        }
        Ok(())
    }

    /// Time derivative of the interpolant at `t`.
    pub fn sample_derivative(&self, t: f64) -> Result<Vec<f64>, OdeError> {
        let mut out = vec![0.0; self.dim];
        self.sample_derivative_into(t, &mut out)?;
        Ok(out)
    }
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Error coefficients b5 - b4 (b5 equals the A7 row, FSAL).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output weights for the fifth interpolation coefficient.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const ORDER_EXP: f64 = 0.2; // 1/5

/// Integrate `rhs` from `t_span.0` to `t_span.1` starting at `y0`.
///
/// `rhs(t, y, dydt)` fills `dydt` with the state derivative. Every function
/// in `events` is watched for a sign change across each accepted step; the
/// first crossing ends the run with [`OdeStatus::EventStopped`]. Step-size
/// underflow ends the run with [`OdeStatus::StepFailure`] and the partial
/// solution is returned.
pub fn integrate<F>(
    mut rhs: F,
    y0: &[f64],
    t_span: (f64, f64),
    settings: &IntegratorSettings,
    events: &[Event<'_>],
) -> Result<DenseSolution, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    settings.validate()?;
    let (t0, tf) = t_span;
    if !(tf > t0) {
        return Err(OdeError::BadSpan(t0, tf));
    }
    let dim = y0.len();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    rhs(t, &y, &mut k1);
    if !k1.iter().all(|v| v.is_finite()) {
        return Err(OdeError::NonFiniteRhs(t));
    }

    let mut g_old: Vec<f64> = events.iter().map(|e| (e.function)(t, &y)).collect();

    let mut h = match settings.initial_step {
        Some(h0) => h0.min(tf - t0),
        None => initial_step(&mut rhs, t, &y, &k1, tf, settings),
    };

    let mut solution = DenseSolution {
        dim,
        t_start: t0,
        t_end: t0,
        y_end: y.clone(),
        steps: Vec::new(),
        status: OdeStatus::Completed,
        n_accepted: 0,
        n_rejected: 0,
    };

    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    let mut total_steps = 0usize;
    let mut last_rejected = false;

    while t < tf {
        if total_steps >= settings.max_steps {
            return Err(OdeError::MaxStepsExceeded {
                max: settings.max_steps,
                t,
                t_end: tf,
            });
        }
        total_steps += 1;

        let min_step = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < min_step {
            solution.status = OdeStatus::StepFailure;
            solution.t_end = t;
            solution.y_end = y;
            return Ok(solution);
        }
        // Stretch slightly rather than leave a sliver of a step, and land on
        // tf exactly so rounding cannot manufacture a micro-step.
        let is_last = t + 1.01 * h >= tf;
        if is_last {
            h = tf - t;
        }

        // Stages 2..7; k7 = f(t + h, y_new) by the FSAL property.
        for i in 0..dim {
            y_stage[i] = y[i] + h * (A21 * k1[i]);
        }
        rhs(t + C2 * h, &y_stage, &mut k2);
        for i in 0..dim {
            y_stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &y_stage, &mut k3);
        for i in 0..dim {
            y_stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &y_stage, &mut k4);
        for i in 0..dim {
            y_stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &y_stage, &mut k5);
        for i in 0..dim {
            y_stage[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &y_stage, &mut k6);
        for i in 0..dim {
            y_new[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t + h, &y_new, &mut k7);

        // Scaled RMS error norm of the embedded difference.
        let mut err_sq = 0.0;
        for i in 0..dim {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = settings.atol + settings.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / dim as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            // Accept: build dense coefficients for this step.
            let mut cont = vec![0.0; 5 * dim];
            for i in 0..dim {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                cont[i] = y[i];
                cont[dim + i] = ydiff;
                cont[2 * dim + i] = bspl;
                cont[3 * dim + i] = ydiff - h * k7[i] - bspl;
                cont[4 * dim + i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let record = StepRecord { t0: t, h, cont };

            // Event check on this step before committing to the next one.
            let t_new = if is_last { tf } else { t + h };
            let mut triggered: Option<(usize, f64)> = None;
            for (ei, ev) in events.iter().enumerate() {
                let g_new = (ev.function)(t_new, &y_new);
                let crossed =
                    (g_old[ei] < 0.0 && g_new >= 0.0) || (g_old[ei] > 0.0 && g_new <= 0.0);
                if crossed {
                    let t_ev = locate_crossing(ev, &record, dim, t, t_new, g_old[ei]);
                    match triggered {
                        Some((_, t_prev)) if t_prev <= t_ev => {}
                        _ => triggered = Some((ei, t_ev)),
                    }
                } else {
                    g_old[ei] = g_new;
                }
            }

            if let Some((ei, t_ev)) = triggered {
                let mut y_ev = vec![0.0; dim];
                sample_record(&record, dim, t_ev, &mut y_ev);
                solution.steps.push(record);
                solution.n_accepted += 1;
                solution.t_end = t_ev;
                solution.y_end = y_ev;
                solution.status = OdeStatus::EventStopped { index: ei };
                return Ok(solution);
            }

            solution.steps.push(record);
            solution.n_accepted += 1;
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            solution.t_end = t;
            solution.y_end.copy_from_slice(&y);

            let mut fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-ORDER_EXP)).clamp(FAC_MIN, FAC_MAX)
            };
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            h = (h * fac).min(settings.max_step);
        } else {
            solution.n_rejected += 1;
            last_rejected = true;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-ORDER_EXP)).clamp(FAC_MIN, 1.0)
            } else {
                FAC_MIN
            };
            h *= fac;
        }
    }

    solution.status = OdeStatus::Completed;
    Ok(solution)
}

/// Hairer-style automatic initial step selection.
fn initial_step<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    tf: f64,
    settings: &IntegratorSettings,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..dim {
        let scale = settings.atol + settings.rtol * y0[i].abs();
        d0 += (y0[i] / scale) * (y0[i] / scale);
        d1 += (f0[i] / scale) * (f0[i] / scale);
    }
    d0 = (d0 / dim as f64).sqrt();
    d1 = (d1 / dim as f64).sqrt();

    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(tf - t0);

    let mut y1 = vec![0.0; dim];
    let mut f1 = vec![0.0; dim];
    for i in 0..dim {
        y1[i] = y0[i] + h0 * f0[i];
    }
    rhs(t0 + h0, &y1, &mut f1);

    let mut d2: f64 = 0.0;
    for i in 0..dim {
        let scale = settings.atol + settings.rtol * y0[i].abs();
        let df = (f1[i] - f0[i]) / scale;
        d2 += df * df;
    }
    d2 = (d2 / dim as f64).sqrt() / h0;

    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(ORDER_EXP)
    };
    (100.0 * h0).min(h1).min(tf - t0).min(settings.max_step)
}

fn sample_record(step: &StepRecord, dim: usize, t: f64, out: &mut [f64]) {
    let s = (t - step.t0) / step.h;
    let s1 = 1.0 - s;
    for i in 0..dim {
        let c0 = step.cont[i];
        let c1 = step.cont[dim + i];
        let c2 = step.cont[2 * dim + i];
        let c3 = step.cont[3 * dim + i];
        let c4 = step.cont[4 * dim + i];
        out[i] = c0 + s * (c1 + s1 * (c2 + s * (c3 + s1 * c4)));
    }
}

/// Bisection on the step interpolant down to the event tolerance.
fn locate_crossing(
    event: &Event<'_>,
    step: &StepRecord,
    dim: usize,
    t_lo: f64,
    t_hi: f64,
    g_lo: f64,
) -> f64 {
    let mut a = t_lo;
    let mut b = t_hi;
    let mut ga = g_lo;
    let mut buf = vec![0.0; dim];
    for _ in 0..128 {
        if b - a <= event.tolerance {
            break;
        }
        let m = 0.5 * (a + b);
        sample_record(step, dim, m, &mut buf);
        let gm = (event.function)(m, &buf);
        if (ga < 0.0 && gm >= 0.0) || (ga > 0.0 && gm <= 0.0) {
            b = m;
        } else {
            a = m;
            ga = gm;
        }
    }
    b
}
