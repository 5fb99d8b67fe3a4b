//! Subcommand implementations.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use varmass_core::equilibria::{self, EquilibriumPoint, Label};
use varmass_core::mass_law::MassLaw;
use varmass_core::primaries::{
    self, ephemeris_csv, FrameMode, PrimaryEphemeris, PrimaryInit, SystemConfig,
};
use varmass_core::third_body::{self, ThirdBodyState};

use crate::config::RunConfig;
use crate::emit::{fmt_full, svg_polyline, write_atomic};

/// Errors carrying the process exit code contract: 1 usage/configuration,
/// 2 solver/integration failure, 3 verification threshold exceeded.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    Threshold(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Threshold(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Solver(m) | CliError::Threshold(m) => m,
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn solver<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Solver(e.to_string())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Solver(format!("i/o failure: {e}"))
}

fn out_dir(config: &RunConfig) -> PathBuf {
    PathBuf::from(&config.out)
}

/// Copy the effective configuration into the output directory so the run is
/// reproducible from that file alone.
fn emit_config(config: &RunConfig) -> Result<(), CliError> {
    write_atomic(&out_dir(config).join("config.cfg"), &config.to_text()).map_err(io_err)
}

#[derive(Serialize)]
struct EquilibriumRecord {
    label: String,
    nu: f64,
    kappa: Option<f64>,
    xi: f64,
    eta: f64,
    zeta: f64,
    residual: f64,
}

impl From<&EquilibriumPoint> for EquilibriumRecord {
    fn from(p: &EquilibriumPoint) -> Self {
        Self {
            label: p.label.to_string(),
            nu: p.nu,
            kappa: p.kappa,
            xi: p.xi,
            eta: p.eta,
            zeta: p.zeta,
            residual: p.residual_norm,
        }
    }
}

fn equilibria_csv_row(p: &EquilibriumPoint) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        fmt_full(p.nu),
        p.kappa.map(fmt_full).unwrap_or_default(),
        p.label,
        fmt_full(p.xi),
        fmt_full(p.eta),
        fmt_full(p.zeta),
        fmt_full(p.residual_norm),
    )
}

/// Solve the families covering the requested labels.
fn solve_requested_points(config: &RunConfig) -> Result<Vec<EquilibriumPoint>, CliError> {
    let nu = config.nu;
    let mut out: Vec<EquilibriumPoint> = Vec::new();
    let want = |label: Label| config.points.contains(&label);

    if [Label::L1, Label::L2, Label::L3].iter().any(|&l| want(l)) {
        for p in equilibria::collinear(nu).map_err(solver)? {
            if want(p.label) {
                out.push(p);
            }
        }
    }
    if want(Label::L4) || want(Label::L5) {
        for p in equilibria::triangular(nu).map_err(solver)? {
            if want(p.label) {
                out.push(p);
            }
        }
    }
    let coplanar_labels = [
        Label::L6,
        Label::L7,
        Label::L8,
        Label::L9,
        Label::L10,
        Label::L11,
    ];
    if coplanar_labels.iter().any(|&l| want(l)) {
        let kappa = config.law.kappa().ok_or_else(|| {
            usage("coplanar points (L6-L11) exist only under the kappa-constrained mass law; pass --kappa or --mass-law kappa:kappa=...")
        })?;
        let pts = equilibria::coplanar(nu, kappa).map_err(usage)?;
        for label in coplanar_labels {
            if want(label) {
                match pts.iter().find(|p| p.label == label) {
                    Some(p) => out.push(p.clone()),
                    None => {
                        return Err(usage(format!(
                            "coplanar point {label} was not found at nu = {nu}, kappa = {kappa}"
                        )))
                    }
                }
            }
        }
    }
    if want(Label::L0) {
        if config.mode != FrameMode::Collinear {
            return Err(usage(
                "the ring L0 belongs to the collinear case; pass --mode collinear",
            ));
        }
        let ring = equilibria::ring(nu).map_err(usage)?;
        let (xi, eta, zeta) = ring.sample(std::f64::consts::FRAC_PI_2);
        let r = equilibria::residual((xi, eta, zeta), nu, None).map_err(solver)?;
        out.push(EquilibriumPoint {
            label: Label::L0,
            xi,
            eta,
            zeta,
            nu,
            kappa: None,
            residual_norm: r[0].abs().max(r[1].abs()),
        });
    }
    Ok(out)
}

pub fn run_equilibria(config: &RunConfig) -> Result<(), CliError> {
    config.validate().map_err(usage)?;
    let points = solve_requested_points(config)?;
    emit_config(config)?;

    let records: Vec<EquilibriumRecord> = points.iter().map(EquilibriumRecord::from).collect();
    let json = serde_json::to_string_pretty(&records).map_err(solver)?;
    write_atomic(&out_dir(config).join("equilibria.json"), &json).map_err(io_err)?;

    let mut csv = String::from("nu,kappa,label,xi,eta,zeta,residual\n");
    for p in &points {
        csv.push_str(&equilibria_csv_row(p));
    }
    write_atomic(&out_dir(config).join("equilibria.csv"), &csv).map_err(io_err)?;
    println!(
        "wrote {} equilibrium records to {}",
        points.len(),
        config.out
    );
    Ok(())
}

/// Build the mass law and primary ephemeris for this configuration.
///
/// Under the kappa-constrained law the initial separation and rate are fixed
/// by the constraint itself; otherwise they come from the configuration.
fn build_ephemeris(
    config: &RunConfig,
) -> Result<(SystemConfig, MassLaw, PrimaryEphemeris), CliError> {
    let settings = config.settings();
    let span = (0.0, config.t_end);
    let law = config.law.build(config.g, span, &settings).map_err(usage)?;
    let system = SystemConfig::new(config.nu, config.g, config.mode, law.clone()).map_err(usage)?;
    let init = if law.is_kappa_constrained() {
        PrimaryInit::kappa_consistent(&law, config.g, 0.0).map_err(solver)?
    } else {
        PrimaryInit {
            r0: config.r0,
            r_dot0: config.rdot0,
            theta0: 0.0,
        }
    };
    let validity_end = law.validity().1.min(config.t_end);
    let eph = match config.mode {
        FrameMode::Rotating => {
            primaries::propagate_rotating(&system, init, (0.0, validity_end), &settings)
        }
        FrameMode::Collinear => {
            primaries::propagate_collinear(&system, init, (0.0, validity_end), &settings)
        }
    }
    .map_err(solver)?;
    Ok((system, law, eph))
}

pub fn run_propagate(config: &RunConfig) -> Result<(), CliError> {
    config.validate().map_err(usage)?;
    let (_, _, eph) = build_ephemeris(config)?;
    emit_config(config)?;
    let csv = ephemeris_csv(&eph, config.samples).map_err(solver)?;
    write_atomic(&out_dir(config).join("ephemeris.csv"), &csv).map_err(io_err)?;
    if config.svg {
        let pts: Vec<(f64, f64)> = sample_grid(eph.start_time(), eph.end_time(), config.samples)
            .into_iter()
            .filter_map(|t| eph.sample(t).ok().map(|s| (t, s.r)))
            .collect();
        let svg = svg_polyline(&pts, "separation factor R(t)");
        write_atomic(&out_dir(config).join("ephemeris.svg"), &svg).map_err(io_err)?;
    }
    if eph.ended_by_collision() {
        println!(
            "propagation ended at the collision event, t = {}",
            eph.end_time()
        );
    }
    println!("wrote ephemeris to {}", config.out);
    Ok(())
}

fn sample_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Resolve the simulation seed: explicit similarity coordinates when given,
/// otherwise the first requested point label.
fn resolve_seed(config: &RunConfig) -> Result<((f64, f64, f64), String), CliError> {
    if let Some([xi, eta, zeta]) = config.seed {
        return Ok(((xi, eta, zeta), format!("seed({xi},{eta},{zeta})")));
    }
    let first = *config
        .points
        .first()
        .ok_or_else(|| usage("no seed: pass --seed xi,eta,zeta or --points <label>"))?;
    let narrowed = RunConfig {
        points: vec![first],
        ..config.clone()
    };
    let pts = solve_requested_points(&narrowed)?;
    let p = pts
        .first()
        .ok_or_else(|| usage(format!("point {first} could not be resolved")))?;
    Ok((p.point(), p.label.to_string()))
}

pub fn run_simulate(config: &RunConfig) -> Result<(), CliError> {
    config.validate().map_err(usage)?;
    let (system, _, eph) = build_ephemeris(config)?;
    let (point, seed_name) = resolve_seed(config)?;
    emit_config(config)?;
    let t_end = config.t_end.min(eph.end_time());
    let seed = ThirdBodyState::self_similar_seed(point, &eph, 0.0).map_err(solver)?;
    let traj = third_body::simulate(&system, &eph, &seed, (0.0, t_end), &config.settings())
        .map_err(solver)?;
    let csv = traj.to_csv(config.samples).map_err(solver)?;
    write_atomic(&out_dir(config).join("trajectory.csv"), &csv).map_err(io_err)?;
    if config.svg {
        let grid = sample_grid(traj.start_time(), traj.end_time(), config.samples);
        let xy: Vec<(f64, f64)> = grid
            .iter()
            .filter_map(|&t| traj.sample(t).ok().map(|s| (s.x, s.y)))
            .collect();
        write_atomic(
            &out_dir(config).join("trajectory_xy.svg"),
            &svg_polyline(&xy, &format!("x-y track from {seed_name}")),
        )
        .map_err(io_err)?;
        let rt: Vec<(f64, f64)> = grid
            .iter()
            .filter_map(|&t| eph.sample(t).ok().map(|s| (t, s.r)))
            .collect();
        write_atomic(
            &out_dir(config).join("ephemeris_r.svg"),
            &svg_polyline(&rt, "separation factor R(t)"),
        )
        .map_err(io_err)?;
    }
    println!(
        "simulated {} from t = 0 to {}, wrote trajectory to {}",
        seed_name,
        traj.end_time(),
        config.out
    );
    Ok(())
}

#[derive(Serialize)]
struct VerifyRow {
    point_label: String,
    xi: f64,
    eta: f64,
    zeta: f64,
    law: String,
    t_end: f64,
    residual: f64,
}

pub fn run_verify(config: &RunConfig) -> Result<(), CliError> {
    config.validate().map_err(usage)?;

    // Mode and law guards before touching the output directory.
    for &label in &config.points {
        let coplanar = matches!(
            label,
            Label::L6 | Label::L7 | Label::L8 | Label::L9 | Label::L10 | Label::L11
        );
        if coplanar && !config.law.is_kappa() {
            return Err(usage(format!(
                "{label} exists only under the kappa-constrained mass law (configured law: {})",
                config.law
            )));
        }
        if label == Label::L0 && config.mode != FrameMode::Collinear {
            return Err(usage(
                "the ring L0 belongs to the collinear case; pass --mode collinear",
            ));
        }
        if matches!(label, Label::L4 | Label::L5) && config.mode != FrameMode::Rotating {
            return Err(usage(format!(
                "{label} is an equilibrium of the rotating case; in the collinear case use the ring L0"
            )));
        }
        if matches!(label, Label::LPlusInf | Label::LMinusInf) {
            return Err(usage(
                "the infinitely remote points cannot be simulated; use the sweep's remote-limit diagnostics",
            ));
        }
    }

    emit_config(config)?;
    let points = solve_requested_points(config)?;
    let (system, _, eph) = build_ephemeris(config)?;
    let t_end = config.t_end.min(eph.end_time());
    let settings = config.settings();

    let mut rows = Vec::with_capacity(points.len());
    let mut worst: Option<(String, f64)> = None;
    for p in &points {
        let seed = ThirdBodyState::self_similar_seed(p.point(), &eph, 0.0).map_err(solver)?;
        let traj =
            third_body::simulate(&system, &eph, &seed, (0.0, t_end), &settings).map_err(solver)?;
        let residual =
            third_body::self_similarity_residual(&traj, &eph, p.point()).map_err(solver)?;
        rows.push(VerifyRow {
            point_label: p.label.to_string(),
            xi: p.xi,
            eta: p.eta,
            zeta: p.zeta,
            law: config.law.to_string(),
            t_end: traj.end_time(),
            residual,
        });
        if residual >= config.threshold && worst.as_ref().is_none_or(|w| residual > w.1) {
            worst = Some((p.label.to_string(), residual));
        }
        println!("{}: self-similarity residual {residual:.3e}", p.label);
    }

    let json = serde_json::to_string_pretty(&rows).map_err(solver)?;
    write_atomic(&out_dir(config).join("verify.json"), &json).map_err(io_err)?;

    if let Some((label, residual)) = worst {
        return Err(CliError::Threshold(format!(
            "{label} residual {residual:.3e} exceeds threshold {:.3e}",
            config.threshold
        )));
    }
    println!(
        "all {} residuals below threshold {:.1e}",
        rows.len(),
        config.threshold
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepFlag {
    nu: f64,
    kappa: Option<f64>,
    flag: String,
    detail: String,
}

struct CellResult {
    nu: f64,
    kappa: Option<f64>,
    points: Vec<EquilibriumPoint>,
    flags: Vec<SweepFlag>,
}

fn sweep_cell(nu: f64, kappa: Option<f64>) -> CellResult {
    let mut points = Vec::new();
    let mut flags = Vec::new();
    match equilibria::collinear(nu) {
        Ok(pts) => points.extend(pts),
        Err(e) => flags.push(SweepFlag {
            nu,
            kappa,
            flag: "failed".into(),
            detail: format!("collinear solver: {e}"),
        }),
    }
    match equilibria::triangular(nu) {
        Ok(pts) => points.extend(pts),
        Err(e) => flags.push(SweepFlag {
            nu,
            kappa,
            flag: "failed".into(),
            detail: format!("triangular solver: {e}"),
        }),
    }
    if let Some(k) = kappa {
        if k - 1.0 < 1e-9 {
            flags.push(SweepFlag {
                nu,
                kappa,
                flag: "near-limit".into(),
                detail: format!(
                    "kappa - 1 = {:.3e}: the coplanar pair is effectively at the remote limit",
                    k - 1.0
                ),
            });
        }
        match equilibria::coplanar(nu, k) {
            Ok(pts) => points.extend(pts),
            Err(e) => flags.push(SweepFlag {
                nu,
                kappa,
                flag: "failed".into(),
                detail: format!("coplanar solver: {e}"),
            }),
        }
    }
    // Stamp the cell's kappa on every row so (nu, kappa, label) keys the atlas.
    for p in &mut points {
        p.kappa = kappa.or(p.kappa);
    }
    CellResult {
        nu,
        kappa,
        points,
        flags,
    }
}

pub fn run_sweep(config: &RunConfig) -> Result<(), CliError> {
    config.validate().map_err(usage)?;
    if config.nu_grid.is_empty() {
        return Err(usage("sweep needs a non-empty --nu-grid"));
    }
    emit_config(config)?;

    let mut cells: Vec<(f64, Option<f64>)> = Vec::new();
    for &nu in &config.nu_grid {
        if config.kappa_grid.is_empty() {
            cells.push((nu, None));
        } else {
            for &k in &config.kappa_grid {
                cells.push((nu, Some(k)));
            }
        }
    }

    let mut results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(nu, kappa)| sweep_cell(nu, kappa))
        .collect();
    results.sort_by(|a, b| {
        (a.nu, a.kappa.unwrap_or(f64::NEG_INFINITY))
            .partial_cmp(&(b.nu, b.kappa.unwrap_or(f64::NEG_INFINITY)))
            .unwrap()
    });

    let bounds: Vec<(f64, Option<f64>)> = config
        .nu_grid
        .par_iter()
        .map(|&nu| (nu, equilibria::kappa_bound(nu).ok().flatten()))
        .collect();

    let mut atlas = String::from("nu,kappa,label,xi,eta,zeta,residual\n");
    let mut flags: Vec<SweepFlag> = Vec::new();
    for cell in &mut results {
        cell.points.sort_by_key(|p| p.label);
        for p in &cell.points {
            atlas.push_str(&equilibria_csv_row(p));
        }
        flags.append(&mut cell.flags);
    }
    write_atomic(&out_dir(config).join("atlas.csv"), &atlas).map_err(io_err)?;

    let mut bounds_sorted = bounds;
    bounds_sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut kmax = String::from("nu,kappa_max\n");
    for (nu, bound) in &bounds_sorted {
        kmax.push_str(&format!(
            "{},{}\n",
            fmt_full(*nu),
            bound.map(fmt_full).unwrap_or_default()
        ));
    }
    write_atomic(&out_dir(config).join("kappa_max.csv"), &kmax).map_err(io_err)?;

    let json = serde_json::to_string_pretty(&flags).map_err(solver)?;
    write_atomic(&out_dir(config).join("flags.json"), &json).map_err(io_err)?;

    println!(
        "swept {} cells ({} flags) into {}",
        results.len(),
        flags.len(),
        config.out
    );
    Ok(())
}

/// Shared entry used by `main` and the integration tests.
pub fn dispatch(command: &str, config: &RunConfig) -> Result<(), CliError> {
    match command {
        "equilibria" => run_equilibria(config),
        "propagate" => run_propagate(config),
        "simulate" => run_simulate(config),
        "verify" => run_verify(config),
        "sweep" => run_sweep(config),
        other => Err(usage(format!("unknown subcommand '{other}'"))),
    }
}
