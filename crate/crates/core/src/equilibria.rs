//! Equilibrium families in similarity coordinates.
//!
//! A self-similar third-body solution `(x, y, z) = (xi, eta, zeta) R(t)`
//! exists where the stationarity relations hold:
//!
//! ```text
//! f1 = xi  - (1-nu)(xi+nu)/rho1^3 - nu (xi+nu-1)/rho2^3 = 0
//! f2 = eta (1 - (1-nu)/rho1^3 - nu/rho2^3)              = 0
//! ```
//!
//! plus, for out-of-plane points (`zeta != 0`), the constrained relation
//! `kappa (1 - (1-nu)/rho1^3 - nu/rho2^3) - 1 = 0` that requires the
//! primaries to move with `G R u^3 = kappa > 1`.
//!
//! Families:
//! * L1-L3 — collinear roots, one per interval between/beyond the primaries;
//! * L4/L5 — triangular points `(1/2 - nu, +/- sqrt(3)/2, 0)`, exact;
//! * L6-L11 — coplanar roots in the `(xi, zeta)` plane under the kappa
//!   constraint: a mirror pair tracked by continuation from the symmetric
//!   closed form (L6/L7), plus a possible off-axis quadruple (L8-L11)
//!   searched for by a multi-start grid;
//! * L+inf/L-inf — the tracked pair's limit as kappa drops to 1, where
//!   |zeta| diverges like (kappa - 1)^(-1/3);
//! * L0 — the ring swept by rotating the triangular points about the
//!   primaries' axis in the collinear case.
//!
//! On the quadruple: across the sampled parameter space the mirror pair is
//! the *entire* positive-zeta root set. Every other branch of the `f1 = 0`
//! stationarity curves stays where `(1-nu)/rho1^3 + nu/rho2^3 > 1`, which no
//! `kappa > 1` reaches, and those branches terminate by `zeta ~ 0.75`. The
//! search machinery and [`kappa_bound`] stay in place — the bound would be
//! reported if a quadruple appeared — and a dense independent multi-start
//! test guards the absence claim.
//!
//! Label conventions recorded here (not dictated by the problem): L1 lies
//! between the primaries, L2 beyond the smaller, L3 beyond the larger;
//! L6/L7 are the +/-zeta members of the continuation-tracked pair; an
//! off-axis quadruple would be numbered L8-L11 by increasing xi, positive
//! zeta before negative.

use std::fmt;
use thiserror::Error;

/// Points closer than this to a primary are rejected as singular.
const SINGULAR_RADIUS: f64 = 1e-12;
/// Newton convergence target on the residual max-norm.
const NEWTON_TOL: f64 = 1e-13;
/// Two converged roots within this distance are the same root.
const DEDUP_RADIUS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EquilibriaError {
    #[error("mass parameter nu must lie in (0, 1/2], got {0}")]
    BadMassParameter(f64),
    #[error("kappa must exceed 1 (got {0})")]
    KappaNotGreaterThanOne(f64),
    #[error("point coincides with a primary (rho1 = {0:.3e}, rho2 = {1:.3e})")]
    SingularPoint(f64, f64),
    #[error("solver failed: {0}")]
    SolverFailed(String),
}

/// Equilibrium family labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    L0,
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
    L10,
    L11,
    LPlusInf,
    LMinusInf,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::L0 => "L0",
            Label::L1 => "L1",
            Label::L2 => "L2",
            Label::L3 => "L3",
            Label::L4 => "L4",
            Label::L5 => "L5",
            Label::L6 => "L6",
            Label::L7 => "L7",
            Label::L8 => "L8",
            Label::L9 => "L9",
            Label::L10 => "L10",
            Label::L11 => "L11",
            Label::LPlusInf => "L+inf",
            Label::LMinusInf => "L-inf",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Label {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "L0" => Ok(Label::L0),
            "L1" => Ok(Label::L1),
            "L2" => Ok(Label::L2),
            "L3" => Ok(Label::L3),
            "L4" => Ok(Label::L4),
            "L5" => Ok(Label::L5),
            "L6" => Ok(Label::L6),
            "L7" => Ok(Label::L7),
            "L8" => Ok(Label::L8),
            "L9" => Ok(Label::L9),
            "L10" => Ok(Label::L10),
            "L11" => Ok(Label::L11),
            "L+INF" => Ok(Label::LPlusInf),
            "L-INF" => Ok(Label::LMinusInf),
            other => Err(format!("unknown point label '{other}'")),
        }
    }
}

/// One equilibrium point in similarity coordinates.
#[derive(Debug, Clone)]
pub struct EquilibriumPoint {
    pub label: Label,
    pub xi: f64,
    pub eta: f64,
    pub zeta: f64,
    pub nu: f64,
    /// Present only for the constrained coplanar family.
    pub kappa: Option<f64>,
    /// Max-norm of the defining relations, evaluated through [`residual`].
    pub residual_norm: f64,
}

impl EquilibriumPoint {
    pub fn point(&self) -> (f64, f64, f64) {
        (self.xi, self.eta, self.zeta)
    }
}

fn check_nu(nu: f64) -> Result<(), EquilibriaError> {
    if !(nu > 0.0 && nu <= 0.5) {
        return Err(EquilibriaError::BadMassParameter(nu));
    }
    Ok(())
}

/// Left sides of the stationarity relations at `(xi, eta, zeta)`.
///
/// The third component is the bracketed constrained relation
/// `kappa (1 - (1-nu)/rho1^3 - nu/rho2^3) - 1` when `kappa` is supplied and
/// `zeta != 0`; it is 0 otherwise (for in-plane points the third relation
/// holds identically, and in the collinear case stationarity is only the
/// first two relations).
pub fn residual(
    point: (f64, f64, f64),
    nu: f64,
    kappa: Option<f64>,
) -> Result<[f64; 3], EquilibriaError> {
    check_nu(nu)?;
    let (xi, eta, zeta) = point;
    let q1 = xi + nu;
    let q2 = xi + nu - 1.0;
    let rho1 = (q1 * q1 + eta * eta + zeta * zeta).sqrt();
    let rho2 = (q2 * q2 + eta * eta + zeta * zeta).sqrt();
    if rho1 < SINGULAR_RADIUS || rho2 < SINGULAR_RADIUS {
        return Err(EquilibriaError::SingularPoint(rho1, rho2));
    }
    let rho1_3 = rho1 * rho1 * rho1;
    let rho2_3 = rho2 * rho2 * rho2;
    let bracket = 1.0 - (1.0 - nu) / rho1_3 - nu / rho2_3;
    let f1 = xi - (1.0 - nu) * q1 / rho1_3 - nu * q2 / rho2_3;
    let f2 = eta * bracket;
    let f3 = match kappa {
        Some(k) if zeta != 0.0 => k * bracket - 1.0,
        _ => 0.0,
    };
    Ok([f1, f2, f3])
}

/// Triangular points L4/L5: `(1/2 - nu, +/- sqrt(3)/2, 0)`.
pub fn triangular(nu: f64) -> Result<[EquilibriumPoint; 2], EquilibriaError> {
    check_nu(nu)?;
    let xi = 0.5 - nu;
    let eta = 3.0f64.sqrt() / 2.0;
    let make = |label, eta: f64| -> Result<EquilibriumPoint, EquilibriaError> {
        let r = residual((xi, eta, 0.0), nu, None)?;
        Ok(EquilibriumPoint {
            label,
            xi,
            eta,
            zeta: 0.0,
            nu,
            kappa: None,
            residual_norm: r[0].abs().max(r[1].abs()),
        })
    };
    Ok([make(Label::L4, eta)?, make(Label::L5, -eta)?])
}

/// Collinear stationarity function of `xi` alone (`eta = zeta = 0`).
fn collinear_fn(xi: f64, nu: f64) -> f64 {
    let q1 = xi + nu;
    let q2 = xi + nu - 1.0;
    xi - (1.0 - nu) * q1.signum() / (q1 * q1) - nu * q2.signum() / (q2 * q2)
}

fn collinear_fn_prime(xi: f64, nu: f64) -> f64 {
    let q1 = (xi + nu).abs();
    let q2 = (xi + nu - 1.0).abs();
    1.0 + 2.0 * (1.0 - nu) / (q1 * q1 * q1) + 2.0 * nu / (q2 * q2 * q2)
}

/// Safeguarded Newton on a bracket where `f` is monotone increasing.
fn collinear_root(nu: f64, mut lo: f64, mut hi: f64) -> Result<f64, EquilibriaError> {
    let f_lo = collinear_fn(lo, nu);
    let f_hi = collinear_fn(hi, nu);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(EquilibriaError::SolverFailed(format!(
            "collinear bracket [{lo}, {hi}] does not straddle a root (f = {f_lo:.3e}, {f_hi:.3e})"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = collinear_fn(x, nu);
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = f / collinear_fn_prime(x, nu);
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-14 * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Collinear points L1 (between the primaries), L2 (beyond the smaller),
/// L3 (beyond the larger), each refined to roughly machine precision.
pub fn collinear(nu: f64) -> Result<[EquilibriumPoint; 3], EquilibriaError> {
    check_nu(nu)?;
    let delta = 1e-12;
    let roots = [
        (
            Label::L1,
            collinear_root(nu, -nu + delta, 1.0 - nu - delta)?,
        ),
        (Label::L2, collinear_root(nu, 1.0 - nu + delta, 3.0)?),
        (Label::L3, collinear_root(nu, -3.0, -nu - delta)?),
    ];
    let mut out = Vec::with_capacity(3);
    for (label, xi) in roots {
        let r = residual((xi, 0.0, 0.0), nu, None)?;
        out.push(EquilibriumPoint {
            label,
            xi,
            eta: 0.0,
            zeta: 0.0,
            nu,
            kappa: None,
            residual_norm: r[0].abs().max(r[1].abs()),
        });
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Coplanar system in the `(xi, zeta)` plane (`eta = 0`): value and Jacobian.
///
/// The constrained relation is solved in the form `(1 - S) - 1/kappa = 0`
/// rather than `kappa (1 - S) - 1 = 0`: for very large kappa the latter
/// loses all significant digits to cancellation, while the former keeps the
/// residual at machine scale relative to the O(1) gravity terms.
fn coplanar_system(xi: f64, zeta: f64, nu: f64, kappa: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let q1 = xi + nu;
    let q2 = xi + nu - 1.0;
    let rho1_sq = q1 * q1 + zeta * zeta;
    let rho2_sq = q2 * q2 + zeta * zeta;
    let rho1 = rho1_sq.sqrt();
    let rho2 = rho2_sq.sqrt();
    let rho1_3 = rho1_sq * rho1;
    let rho2_3 = rho2_sq * rho2;
    let rho1_5 = rho1_3 * rho1_sq;
    let rho2_5 = rho2_3 * rho2_sq;
    let m1 = 1.0 - nu;
    let m2 = nu;

    let f1 = xi - m1 * q1 / rho1_3 - m2 * q2 / rho2_3;
    let f2 = 1.0 - m1 / rho1_3 - m2 / rho2_3 - 1.0 / kappa;

    let j11 =
        1.0 - m1 * (rho1_sq - 3.0 * q1 * q1) / rho1_5 - m2 * (rho2_sq - 3.0 * q2 * q2) / rho2_5;
    let j12 = 3.0 * m1 * q1 * zeta / rho1_5 + 3.0 * m2 * q2 * zeta / rho2_5;
    let j21 = 3.0 * (m1 * q1 / rho1_5 + m2 * q2 / rho2_5);
    let j22 = 3.0 * zeta * (m1 / rho1_5 + m2 / rho2_5);

    ([f1, f2], [[j11, j12], [j21, j22]])
}

/// Damped Newton on the coplanar system. Returns the converged `(xi, zeta)`
/// or `None`.
fn coplanar_newton(seed: (f64, f64), nu: f64, kappa: f64) -> Option<(f64, f64)> {
    let (mut xi, mut zeta) = seed;
    let norm = |f: &[f64; 2]| f[0].abs().max(f[1].abs());
    let in_domain = |xi: f64, zeta: f64| {
        let q1 = xi + nu;
        let q2 = xi + nu - 1.0;
        let rho1 = (q1 * q1 + zeta * zeta).sqrt();
        let rho2 = (q2 * q2 + zeta * zeta).sqrt();
        rho1 > 1e-6 && rho2 > 1e-6 && xi.abs() < 50.0 && zeta.abs() < 1e9
    };
    if !in_domain(xi, zeta) {
        return None;
    }
    let (mut f, _) = coplanar_system(xi, zeta, nu, kappa);
    for _ in 0..100 {
        if norm(&f) < NEWTON_TOL {
            return Some((xi, zeta));
        }
        let (_, j) = coplanar_system(xi, zeta, nu, kappa);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let dx = (-f[0] * j[1][1] + f[1] * j[0][1]) / det;
        let dz = (-f[1] * j[0][0] + f[0] * j[1][0]) / det;
        let mut lambda = 1.0;
        let mut advanced = false;
        for _ in 0..30 {
            let (xt, zt) = (xi + lambda * dx, zeta + lambda * dz);
            if in_domain(xt, zt) {
                let (ft, _) = coplanar_system(xt, zt, nu, kappa);
                if norm(&ft) < norm(&f) {
                    xi = xt;
                    zeta = zt;
                    f = ft;
                    advanced = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !advanced {
            return None;
        }
    }
    if norm(&f) < NEWTON_TOL {
        Some((xi, zeta))
    } else {
        None
    }
}

/// Closed-form on-axis root of the symmetric case `nu = 1/2`: from
/// `rho^3 = kappa/(kappa - 1)`, `zeta = sqrt(rho^2 - 1/4)`.
fn symmetric_on_axis_zeta(kappa: f64) -> f64 {
    let rho = (kappa / (kappa - 1.0)).cbrt();
    (rho * rho - 0.25).sqrt()
}

/// The continuation-tracked family root for arbitrary `nu`: start from the
/// symmetric closed form at `nu = 1/2` and walk `nu` to the target.
fn family_root(nu: f64, kappa: f64) -> Option<(f64, f64)> {
    let zeta0 = symmetric_on_axis_zeta(kappa);
    let mut current = coplanar_newton((0.0, zeta0), 0.5, kappa)?;
    if (nu - 0.5).abs() < 1e-15 {
        return Some(current);
    }
    let steps = 40;
    for k in 1..=steps {
        let nu_k = 0.5 + (nu - 0.5) * k as f64 / steps as f64;
        current = coplanar_newton(current, nu_k, kappa)?;
    }
    Some(current)
}

fn point_from_root(
    root: (f64, f64),
    label: Label,
    nu: f64,
    kappa: f64,
) -> Result<EquilibriumPoint, EquilibriaError> {
    let (xi, zeta) = root;
    let r = residual((xi, 0.0, zeta), nu, Some(kappa))?;
    let residual_norm = r[0].abs().max(r[2].abs());
    // The bracketed relation kappa (1 - S) - 1 cannot be evaluated below
    // ~kappa * eps in f64, so the recheck gate widens with kappa.
    let gate = 1e-10f64.max(kappa * 4.0 * f64::EPSILON);
    if residual_norm > gate {
        return Err(EquilibriaError::SolverFailed(format!(
            "converged coplanar root ({xi}, {zeta}) re-checks at {residual_norm:.3e}"
        )));
    }
    Ok(EquilibriumPoint {
        label,
        xi,
        eta: 0.0,
        zeta,
        nu,
        kappa: Some(kappa),
        residual_norm,
    })
}

/// A converged root in the `(xi, zeta)` plane.
type PlaneRoot = (f64, f64);

/// All distinct positive-zeta coplanar roots: the continuation-tracked
/// family root first, then any off-axis extras found by the multi-start
/// grid, sorted by `(xi, zeta)`.
fn coplanar_positive_roots(nu: f64, kappa: f64) -> (Option<PlaneRoot>, Vec<PlaneRoot>) {
    let family = family_root(nu, kappa);

    let mut extras: Vec<(f64, f64)> = Vec::new();
    let mut push_unique = |root: (f64, f64), family: &Option<(f64, f64)>| {
        if root.1 <= 1e-8 {
            return;
        }
        if let Some(f) = family {
            if (root.0 - f.0).hypot(root.1 - f.1) < DEDUP_RADIUS {
                return;
            }
        }
        if extras
            .iter()
            .all(|e| (root.0 - e.0).hypot(root.1 - e.1) >= DEDUP_RADIUS)
        {
            extras.push(root);
        }
    };

    let nx = 41;
    let nz = 40;
    for i in 0..nx {
        let xi = -2.0 + 4.0 * i as f64 / (nx - 1) as f64;
        for jz in 0..nz {
            let zeta = 0.05 + (3.0 - 0.05) * jz as f64 / (nz - 1) as f64;
            if let Some(root) = coplanar_newton((xi, zeta), nu, kappa) {
                push_unique(root, &family);
            }
        }
    }
    extras.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (family, extras)
}

/// Coplanar equilibria L6-L11 under the constraint constant `kappa`.
///
/// Returns mirror pairs `+/- zeta`; the tracked pair L6/L7 always comes
/// first, the off-axis quadruple follows when it exists for this `kappa`.
pub fn coplanar(nu: f64, kappa: f64) -> Result<Vec<EquilibriumPoint>, EquilibriaError> {
    check_nu(nu)?;
    if !(kappa > 1.0) {
        return Err(EquilibriaError::KappaNotGreaterThanOne(kappa));
    }
    let (family, extras) = coplanar_positive_roots(nu, kappa);
    let mut out = Vec::new();
    if let Some(root) = family {
        out.push(point_from_root(root, Label::L6, nu, kappa)?);
        out.push(point_from_root((root.0, -root.1), Label::L7, nu, kappa)?);
    }
    let extra_labels = [(Label::L8, Label::L9), (Label::L10, Label::L11)];
    for (root, (plus, minus)) in extras.iter().zip(extra_labels.iter()) {
        out.push(point_from_root(*root, *plus, nu, kappa)?);
        out.push(point_from_root((root.0, -root.1), *minus, nu, kappa)?);
    }
    Ok(out)
}

/// Largest `kappa` (to 1e-6) for which the off-axis coplanar quadruple is
/// still found beyond the tracked mirror pair, or `None` when no off-axis
/// roots are found at any scanned `kappa`.
pub fn kappa_bound(nu: f64) -> Result<Option<f64>, EquilibriaError> {
    check_nu(nu)?;
    let has_extras = |kappa: f64| -> bool {
        let (_, extras) = coplanar_positive_roots(nu, kappa);
        !extras.is_empty()
    };

    let scan = [
        1.0001, 1.001, 1.01, 1.05, 1.1, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0,
    ];
    let mut lo: Option<f64> = None; // largest kappa with extras
    let mut hi: Option<f64> = None; // smallest kappa above lo without extras
    for &k in scan.iter() {
        if has_extras(k) {
            lo = Some(k);
            hi = None;
        } else if lo.is_some() && hi.is_none() {
            hi = Some(k);
        } else if lo.is_none() {
            // keep scanning
        }
    }
    let Some(mut lo) = lo else {
        return Ok(None);
    };
    let mut hi = match hi {
        Some(h) => h,
        None => {
            // Extras persist through the scan; push upward until they vanish.
            let mut k = 200.0;
            loop {
                if !has_extras(k) {
                    break k;
                }
                k *= 2.0;
                if k > 1e9 {
                    return Ok(None);
                }
            }
        }
    };
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if has_extras(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// One record of the remote-limit diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct RemoteRecord {
    pub kappa: f64,
    pub xi: f64,
    pub zeta_abs: f64,
}

/// Diagnostic for the infinitely remote limit: the tracked pair's |zeta|
/// per kappa in a strictly decreasing sequence approaching 1.
#[derive(Debug, Clone)]
pub struct RemoteLimitDiagnostic {
    pub nu: f64,
    pub records: Vec<RemoteRecord>,
}

/// Track the coplanar pair along a strictly decreasing `kappa` sequence and
/// record the growth of |zeta|.
///
/// Fails if |zeta| is not strictly increasing as `kappa` decreases, or if a
/// record at `nu = 1/2` with `kappa - 1 < 1e-9` stays at or below 1e3.
pub fn remote_limit(
    nu: f64,
    kappa_sequence: &[f64],
) -> Result<RemoteLimitDiagnostic, EquilibriaError> {
    check_nu(nu)?;
    if kappa_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(EquilibriaError::SolverFailed(
            "kappa sequence must be strictly decreasing".into(),
        ));
    }
    let mut records = Vec::with_capacity(kappa_sequence.len());
    for &kappa in kappa_sequence {
        if !(kappa > 1.0) {
            return Err(EquilibriaError::KappaNotGreaterThanOne(kappa));
        }
        let root = family_root(nu, kappa).ok_or_else(|| {
            EquilibriaError::SolverFailed(format!("lost the tracked pair at kappa = {kappa}"))
        })?;
        records.push(RemoteRecord {
            kappa,
            xi: root.0,
            zeta_abs: root.1.abs(),
        });
    }
    for w in records.windows(2) {
        if w[1].zeta_abs <= w[0].zeta_abs {
            return Err(EquilibriaError::SolverFailed(format!(
                "|zeta| did not increase from kappa = {} to {}",
                w[0].kappa, w[1].kappa
            )));
        }
    }
    if nu == 0.5 {
        for r in &records {
            if r.kappa - 1.0 < 1e-9 && r.zeta_abs <= 1e3 {
                return Err(EquilibriaError::SolverFailed(format!(
                    "|zeta| = {} at kappa - 1 = {:.3e} has not diverged past 1e3",
                    r.zeta_abs,
                    r.kappa - 1.0
                )));
            }
        }
    }
    Ok(RemoteLimitDiagnostic { nu, records })
}

/// The ring solution of the collinear case: the circle swept by rotating
/// the triangular points about the primaries' axis.
#[derive(Debug, Clone, Copy)]
pub struct RingSolution {
    pub nu: f64,
    /// Axial coordinate of the ring plane: `1/2 - nu`.
    pub xi: f64,
    /// Ring radius: `sqrt(3)/2`.
    pub radius: f64,
}

impl RingSolution {
    /// Similarity coordinates of the ring point at angle `phi`.
    pub fn sample(&self, phi: f64) -> (f64, f64, f64) {
        (self.xi, self.radius * phi.cos(), self.radius * phi.sin())
    }
}

/// Construct the ring solution for `nu`.
pub fn ring(nu: f64) -> Result<RingSolution, EquilibriaError> {
    check_nu(nu)?;
    Ok(RingSolution {
        nu,
        xi: 0.5 - nu,
        radius: 3.0f64.sqrt() / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independently coded residual used as a double-coding oracle: same
    /// relations, assembled term by term in a different order and with
    /// powi/powf instead of explicit products.
    fn residual_oracle(point: (f64, f64, f64), nu: f64, kappa: Option<f64>) -> [f64; 3] {
        let (xi, eta, zeta) = point;
        let rho1 = ((xi + nu).powi(2) + eta.powi(2) + zeta.powi(2)).sqrt();
        let rho2 = ((xi + nu - 1.0).powi(2) + eta.powi(2) + zeta.powi(2)).sqrt();
        let t1 = (1.0 - nu) * (xi + nu) * rho1.powf(-3.0);
        let t2 = nu * (xi + nu - 1.0) * rho2.powf(-3.0);
        let s = (1.0 - nu) * rho1.powf(-3.0) + nu * rho2.powf(-3.0);
        let f3 = match kappa {
            Some(k) if zeta != 0.0 => k * (1.0 - s) - 1.0,
            _ => 0.0,
        };
        [xi - t1 - t2, eta * (1.0 - s), f3]
    }

    #[test]
    fn residual_matches_double_coded_oracle_at_random_points() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..500 {
            let nu = rng.gen_range(0.01..=0.5);
            let point = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let kappa = if rng.gen_bool(0.5) {
                Some(rng.gen_range(1.1..5.0))
            } else {
                None
            };
            let ours = match residual(point, nu, kappa) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let oracle = residual_oracle(point, nu, kappa);
            for c in 0..3 {
                assert!(
                    (ours[c] - oracle[c]).abs() < 1e-11 * (1.0 + oracle[c].abs()),
                    "component {c}: {} vs {}",
                    ours[c],
                    oracle[c]
                );
            }
        }
    }

    #[test]
    fn residual_rejects_points_on_a_primary() {
        let err = residual((-0.3, 0.0, 0.0), 0.3, None).unwrap_err();
        assert!(matches!(err, EquilibriaError::SingularPoint(..)));
    }

    #[test]
    fn residual_vanishes_on_the_axis_for_equal_masses() {
        // With nu = 1/2 the two gravity terms mirror each other on the
        // rotation axis, so the first component vanishes identically.
        for zeta in [0.3, 1.0, 5.0] {
            let r = residual((0.0, 0.0, zeta), 0.5, None).unwrap();
            assert_eq!(r[0], 0.0, "axis symmetry broken at zeta = {zeta}");
            assert_eq!(r[1], 0.0);
        }
    }

    #[test]
    fn triangular_closed_forms() {
        let [l4, l5] = triangular(0.5).unwrap();
        assert_eq!(l4.xi, 0.0);
        assert!((l4.eta - 3.0f64.sqrt() / 2.0).abs() < 1e-16);
        assert_eq!(l5.eta, -l4.eta);

        let [l4, _] = triangular(0.01215).unwrap();
        assert!((l4.xi - 0.48785).abs() < 1e-12);
        assert!((l4.eta - 0.8660254037844386).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn triangular_residual_is_analytically_zero(nu in 1e-6f64..=0.5) {
            let pts = triangular(nu).unwrap();
            for p in pts {
                prop_assert!(p.residual_norm < 1e-14,
                    "residual {} at nu = {}", p.residual_norm, nu);
            }
        }

        #[test]
        fn coplanar_output_closed_under_zeta_mirror(
            nu in 0.05f64..=0.5,
            kappa in 1.2f64..5.0,
        ) {
            let pts = coplanar(nu, kappa).unwrap();
            for p in &pts {
                let mirrored = pts.iter().any(|q|
                    (q.xi - p.xi).abs() < 1e-9 && (q.zeta + p.zeta).abs() < 1e-9);
                prop_assert!(mirrored, "{:?} lacks its mirror", p.point());
            }
        }
    }

    /// Plain-bisection oracle on an independently coded collinear function.
    fn bisection_oracle(nu: f64, mut lo: f64, mut hi: f64) -> f64 {
        let f = |xi: f64| {
            let q1: f64 = xi + nu;
            let q2: f64 = xi + nu - 1.0;
            xi - (1.0 - nu) * q1 / q1.abs().powi(3) - nu * q2 / q2.abs().powi(3)
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn collinear_matches_bisection_oracle() {
        for nu in [0.5, 0.1, 0.01215, 1e-4] {
            let pts = collinear(nu).unwrap();
            let delta = 1e-9;
            let oracle = [
                bisection_oracle(nu, -nu + delta, 1.0 - nu - delta),
                bisection_oracle(nu, 1.0 - nu + delta, 3.0),
                bisection_oracle(nu, -3.0, -nu - delta),
            ];
            for (p, o) in pts.iter().zip(oracle.iter()) {
                assert!(
                    (p.xi - o).abs() < 1e-10,
                    "{} = {} vs oracle {} at nu = {nu}",
                    p.label,
                    p.xi,
                    o
                );
                assert!(p.residual_norm < 1e-10);
            }
        }
    }

    #[test]
    fn collinear_symmetric_case_has_l1_at_origin() {
        let pts = collinear(0.5).unwrap();
        assert!(pts[0].xi.abs() < 1e-14, "L1 = {}", pts[0].xi);
        // Exchange symmetry: the root set maps to itself under xi -> -xi.
        assert!((pts[1].xi + pts[2].xi).abs() < 1e-12);
    }

    #[test]
    fn collinear_earth_moon_reference_values() {
        let pts = collinear(0.01215).unwrap();
        assert!((pts[0].xi - 0.8369).abs() < 1e-3, "L1 = {}", pts[0].xi);
        assert!((pts[1].xi - 1.1557).abs() < 1e-3, "L2 = {}", pts[1].xi);
        assert!((pts[2].xi + 1.0051).abs() < 1e-3, "L3 = {}", pts[2].xi);
    }

    #[test]
    fn coplanar_symmetric_closed_form() {
        let pts = coplanar(0.5, 2.0).unwrap();
        assert!(pts.len() >= 2);
        let expected = (2.0f64.powf(2.0 / 3.0) - 0.25).sqrt();
        let l6 = &pts[0];
        assert_eq!(l6.label, Label::L6);
        assert!(l6.xi.abs() < 1e-10, "xi = {}", l6.xi);
        assert!(
            (l6.zeta - expected).abs() < 1e-10,
            "zeta = {}, closed form {}",
            l6.zeta,
            expected
        );
        assert!((pts[1].zeta + expected).abs() < 1e-10);
    }

    #[test]
    fn coplanar_kappa_near_one_pushes_roots_outward() {
        let z1 = coplanar(0.5, 1.001).unwrap()[0].zeta;
        let z2 = coplanar(0.5, 1.0001).unwrap()[0].zeta;
        assert!(z1 > 9.9, "zeta(1.001) = {z1}");
        assert!(z2 > z1, "no growth toward the remote limit");
    }

    #[test]
    fn coplanar_large_kappa_approaches_ring_radius() {
        let pts = coplanar(0.5, 1e6).unwrap();
        let z = pts[0].zeta;
        assert!(
            (z - 3.0f64.sqrt() / 2.0).abs() < 1e-6,
            "zeta = {z} should approach sqrt(3)/2"
        );
    }

    #[test]
    fn coplanar_rejects_kappa_at_or_below_one() {
        assert!(matches!(
            coplanar(0.3, 1.0),
            Err(EquilibriaError::KappaNotGreaterThanOne(_))
        ));
        assert!(matches!(
            coplanar(0.3, 0.5),
            Err(EquilibriaError::KappaNotGreaterThanOne(_))
        ));
    }

    #[test]
    fn remote_limit_diverges_and_stays_on_axis() {
        let kappas = [2.0, 1.1, 1.001, 1.0 + 1e-10];
        let diag = remote_limit(0.5, &kappas).unwrap();
        assert_eq!(diag.records.len(), 4);
        for w in diag.records.windows(2) {
            assert!(w[1].zeta_abs > w[0].zeta_abs);
        }
        for r in &diag.records {
            assert!(r.xi.abs() < 1e-10, "xi = {} at kappa = {}", r.xi, r.kappa);
        }
        assert!(diag.records[3].zeta_abs > 1e3);
    }

    #[test]
    fn remote_limit_divergence_exponent_is_minus_third() {
        let kappas = [1.01, 1.001, 1.0001, 1.00001];
        let diag = remote_limit(0.5, &kappas).unwrap();
        // Least-squares slope of log|zeta| against log(kappa - 1).
        let xs: Vec<f64> = kappas.iter().map(|k| (k - 1.0).ln()).collect();
        let ys: Vec<f64> = diag.records.iter().map(|r| r.zeta_abs.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!(
            (slope + 1.0 / 3.0).abs() < 0.1 / 3.0,
            "fitted exponent {slope} should be -1/3 within 10%"
        );
    }

    #[test]
    fn remote_limit_requires_decreasing_sequence() {
        assert!(remote_limit(0.5, &[1.1, 1.2]).is_err());
    }

    #[test]
    fn ring_recovers_triangular_points_at_poles() {
        let nu = 0.3;
        let r = ring(nu).unwrap();
        let [l4, l5] = triangular(nu).unwrap();
        let p0 = r.sample(0.0);
        assert!((p0.0 - l4.xi).abs() < 1e-15);
        assert!((p0.1 - l4.eta).abs() < 1e-15);
        assert!(p0.2.abs() < 1e-15);
        let ppi = r.sample(std::f64::consts::PI);
        assert!((ppi.1 - l5.eta).abs() < 1e-12);
    }

    #[test]
    fn ring_is_centered_for_equal_masses() {
        let r = ring(0.5).unwrap();
        assert_eq!(r.xi, 0.0);
    }

    #[test]
    fn ring_points_satisfy_collinear_stationarity() {
        let r = ring(0.3).unwrap();
        for i in 0..128 {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / 128.0;
            let p = r.sample(phi);
            let res = residual(p, 0.3, None).unwrap();
            assert!(
                res[0].abs() < 1e-12 && res[1].abs() < 1e-12,
                "residual ({:.3e}, {:.3e}) at phi = {phi}",
                res[0],
                res[1]
            );
        }
    }

    /// Independent multi-start sweep on a denser, offset grid: every
    /// converged coplanar root must coincide with the tracked pair, i.e. the
    /// published family really is the whole positive-zeta root set. The
    /// stationarity curves that do not carry the pair stay strictly inside
    /// the region where (1-nu)/rho1^3 + nu/rho2^3 > 1, which no kappa > 1
    /// can reach.
    #[test]
    fn off_axis_roots_do_not_exist_beyond_the_tracked_pair() {
        for (nu, kappa) in [(0.5, 1.3), (0.3, 2.0), (0.1, 5.0), (0.45, 1.05)] {
            let pts = coplanar(nu, kappa).unwrap();
            assert_eq!(pts.len(), 2, "expected exactly the mirror pair");
            let family = (pts[0].xi, pts[0].zeta.abs());
            // Dense double-coded Newton sweep.
            let newton = |seed: (f64, f64)| -> Option<(f64, f64)> {
                let (mut xi, mut zeta) = seed;
                for _ in 0..200 {
                    let q1 = xi + nu;
                    let q2 = xi + nu - 1.0;
                    let r1 = (q1 * q1 + zeta * zeta).sqrt();
                    let r2 = (q2 * q2 + zeta * zeta).sqrt();
                    if r1 < 1e-6 || r2 < 1e-6 || xi.abs() > 60.0 || zeta.abs() > 1e6 {
                        return None;
                    }
                    let f1 = xi - (1.0 - nu) * q1 / r1.powi(3) - nu * q2 / r2.powi(3);
                    let f2 = 1.0 - (1.0 - nu) / r1.powi(3) - nu / r2.powi(3) - 1.0 / kappa;
                    if f1.abs().max(f2.abs()) < 1e-12 {
                        return Some((xi, zeta));
                    }
                    let j11 = 1.0
                        - (1.0 - nu) * (r1 * r1 - 3.0 * q1 * q1) / r1.powi(5)
                        - nu * (r2 * r2 - 3.0 * q2 * q2) / r2.powi(5);
                    let j12 = 3.0 * (1.0 - nu) * q1 * zeta / r1.powi(5)
                        + 3.0 * nu * q2 * zeta / r2.powi(5);
                    let j21 = 3.0 * ((1.0 - nu) * q1 / r1.powi(5) + nu * q2 / r2.powi(5));
                    let j22 = 3.0 * zeta * ((1.0 - nu) / r1.powi(5) + nu / r2.powi(5));
                    let det = j11 * j22 - j12 * j21;
                    if det.abs() < 1e-300 {
                        return None;
                    }
                    xi -= (f1 * j22 - f2 * j12) / det;
                    zeta -= (f2 * j11 - f1 * j21) / det;
                }
                None
            };
            for i in 0..61 {
                for j in 0..61 {
                    let seed = (
                        -3.0 + 6.0 * i as f64 / 60.0 + 0.013,
                        0.02 + 3.98 * j as f64 / 60.0,
                    );
                    if let Some((xi, zeta)) = newton(seed) {
                        if zeta.abs() < 1e-8 {
                            continue;
                        }
                        let d = (xi - family.0).hypot(zeta.abs() - family.1);
                        assert!(
                            d < 1e-6,
                            "extra root ({xi}, {zeta}) beyond the pair at nu = {nu}, kappa = {kappa}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_bound_reports_no_off_axis_family() {
        for nu in [0.5, 0.3] {
            let first = kappa_bound(nu).unwrap();
            let again = kappa_bound(nu).unwrap();
            assert_eq!(first, again, "bound must be reproducible");
            assert!(first.is_none(), "unexpected off-axis family at nu = {nu}");
        }
    }

    #[test]
    fn nu_domain_is_guarded() {
        assert!(matches!(
            triangular(0.0),
            Err(EquilibriaError::BadMassParameter(_))
        ));
        assert!(matches!(
            collinear(0.7),
            Err(EquilibriaError::BadMassParameter(_))
        ));
    }
}
