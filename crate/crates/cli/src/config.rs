//! Run configuration: a flat key-value text format with sections.
//!
//! Grammar (one statement per line):
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Sections and keys are fixed (see [`RunConfig`]); unknown sections or keys
//! are rejected with a field-specific message, as are out-of-domain values.
//! Serialization is canonical (fixed section and key order, shortest
//! round-trip float formatting), so parse -> serialize is lossless and a
//! written config re-parses to the identical configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use varmass_core::equilibria::Label;
use varmass_core::mass_law::{self, MassLaw};
use varmass_core::ode::IntegratorSettings;
use varmass_core::primaries::FrameMode;

/// Mass-law specification, serializable to/from the compact
/// `kind:key=value,...` string used on the command line and in reports.
#[derive(Debug, Clone, PartialEq)]
pub enum MassLawSpec {
    Constant { u0: f64 },
    Linear { rate: f64 },
    Exponential { rate: f64 },
    Mestschersky { alpha: f64, beta: f64, gamma: f64 },
    Kappa { kappa: f64 },
}

impl MassLawSpec {
    pub fn is_kappa(&self) -> bool {
        matches!(self, MassLawSpec::Kappa { .. })
    }

    pub fn kappa(&self) -> Option<f64> {
        match self {
            MassLawSpec::Kappa { kappa } => Some(*kappa),
            _ => None,
        }
    }

    /// Build the concrete law. Kappa-constrained laws are solved over
    /// `t_span` with the given gravity and integrator settings.
    pub fn build(
        &self,
        g: f64,
        t_span: (f64, f64),
        settings: &IntegratorSettings,
    ) -> Result<MassLaw, String> {
        match *self {
            MassLawSpec::Constant { u0 } => MassLaw::constant(u0).map_err(|e| e.to_string()),
            MassLawSpec::Linear { rate } => MassLaw::linear(rate).map_err(|e| e.to_string()),
            MassLawSpec::Exponential { rate } => {
                MassLaw::exponential(rate).map_err(|e| e.to_string())
            }
            MassLawSpec::Mestschersky { alpha, beta, gamma } => {
                MassLaw::mestschersky(alpha, beta, gamma).map_err(|e| e.to_string())
            }
            MassLawSpec::Kappa { kappa } => {
                mass_law::solve_kappa_constrained(kappa, g, 1.0, 0.0, t_span, settings)
                    .map_err(|e| e.to_string())
            }
        }
    }
}

impl std::fmt::Display for MassLawSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MassLawSpec::Constant { u0 } => write!(f, "constant:u0={u0}"),
            MassLawSpec::Linear { rate } => write!(f, "linear:rate={rate}"),
            MassLawSpec::Exponential { rate } => write!(f, "exponential:rate={rate}"),
            MassLawSpec::Mestschersky { alpha, beta, gamma } => {
                write!(f, "mestschersky:alpha={alpha},beta={beta},gamma={gamma}")
            }
            MassLawSpec::Kappa { kappa } => write!(f, "kappa:kappa={kappa}"),
        }
    }
}

impl FromStr for MassLawSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let mut params: BTreeMap<&str, f64> = BTreeMap::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| format!("mass-law parameter '{item}' is not key=value"))?;
                let value: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| format!("mass-law parameter '{}' is not a number", v.trim()))?;
                params.insert(k.trim(), value);
            }
        }
        let take = |params: &BTreeMap<&str, f64>, key: &str, default: Option<f64>| {
            params
                .get(key)
                .copied()
                .or(default)
                .ok_or_else(|| format!("mass-law kind '{kind}' requires parameter '{key}'"))
        };
        match kind {
            "constant" => Ok(MassLawSpec::Constant {
                u0: take(&params, "u0", Some(1.0))?,
            }),
            "linear" => Ok(MassLawSpec::Linear {
                rate: take(&params, "rate", None)?,
            }),
            "exponential" => Ok(MassLawSpec::Exponential {
                rate: take(&params, "rate", None)?,
            }),
            "mestschersky" => Ok(MassLawSpec::Mestschersky {
                alpha: take(&params, "alpha", None)?,
                beta: take(&params, "beta", None)?,
                gamma: take(&params, "gamma", Some(1.0))?,
            }),
            "kappa" => Ok(MassLawSpec::Kappa {
                kappa: take(&params, "kappa", None)?,
            }),
            other => Err(format!(
                "unknown mass-law kind '{other}' (expected constant|linear|exponential|mestschersky|kappa)"
            )),
        }
    }
}

/// Everything a run needs; every file emission can be reproduced from this
/// alone.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub nu: f64,
    pub g: f64,
    pub mode: FrameMode,
    pub r0: f64,
    pub rdot0: f64,
    pub law: MassLawSpec,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub t_end: f64,
    pub points: Vec<Label>,
    /// Explicit similarity-coordinate seed for `simulate`, overriding the
    /// point labels.
    pub seed: Option<[f64; 3]>,
    pub out: String,
    pub svg: bool,
    pub threshold: f64,
    pub samples: usize,
    pub nu_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nu: 0.01215,
            g: 1.0,
            mode: FrameMode::Rotating,
            r0: 1.0,
            rdot0: 0.0,
            law: MassLawSpec::Constant { u0: 1.0 },
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 10_000_000,
            t_end: 10.0,
            points: vec![Label::L1, Label::L2, Label::L3, Label::L4, Label::L5],
            seed: None,
            out: "out".into(),
            svg: false,
            threshold: 1e-6,
            samples: 1000,
            nu_grid: Vec::new(),
            kappa_grid: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn settings(&self) -> IntegratorSettings {
        IntegratorSettings {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
            ..IntegratorSettings::default()
        }
    }

    /// Domain validation with field-specific messages.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.nu > 0.0 && self.nu <= 0.5) {
            return Err(format!("nu must lie in (0, 1/2], got {}", self.nu));
        }
        if !(self.g > 0.0) {
            return Err(format!("g must be strictly positive, got {}", self.g));
        }
        if !(self.r0 > 0.0) {
            return Err(format!("r0 must be strictly positive, got {}", self.r0));
        }
        if !(self.rtol > 0.0) {
            return Err(format!("rtol must be strictly positive, got {}", self.rtol));
        }
        if !(self.atol > 0.0) {
            return Err(format!("atol must be strictly positive, got {}", self.atol));
        }
        if !(self.t_end > 0.0) {
            return Err(format!(
                "t-end must be strictly positive, got {}",
                self.t_end
            ));
        }
        if !(self.threshold > 0.0) {
            return Err(format!(
                "threshold must be strictly positive, got {}",
                self.threshold
            ));
        }
        if self.samples < 2 {
            return Err(format!("samples must be at least 2, got {}", self.samples));
        }
        if let Some(kappa) = self.law.kappa() {
            if !(kappa > 1.0) {
                return Err(format!("kappa must exceed 1, got {kappa}"));
            }
        }
        for &k in &self.kappa_grid {
            if !(k > 1.0) {
                return Err(format!("kappa must exceed 1, got {k} (in kappa grid)"));
            }
        }
        for &n in &self.nu_grid {
            if !(n > 0.0 && n <= 0.5) {
                return Err(format!("nu must lie in (0, 1/2], got {n} (in nu grid)"));
            }
        }
        Ok(())
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[system]");
        let _ = writeln!(s, "nu = {}", self.nu);
        let _ = writeln!(s, "g = {}", self.g);
        let _ = writeln!(
            s,
            "mode = {}",
            match self.mode {
                FrameMode::Rotating => "rotating",
                FrameMode::Collinear => "collinear",
            }
        );
        let _ = writeln!(s, "r0 = {}", self.r0);
        let _ = writeln!(s, "rdot0 = {}", self.rdot0);
        let _ = writeln!(s);
        let _ = writeln!(s, "[mass_law]");
        let _ = writeln!(s, "law = {}", self.law);
        let _ = writeln!(s);
        let _ = writeln!(s, "[integrator]");
        let _ = writeln!(s, "rtol = {}", self.rtol);
        let _ = writeln!(s, "atol = {}", self.atol);
        let _ = writeln!(s, "max_steps = {}", self.max_steps);
        let _ = writeln!(s);
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let _ = writeln!(
            s,
            "points = {}",
            self.points
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(
            s,
            "seed = {}",
            match self.seed {
                Some([x, y, z]) => format!("{x},{y},{z}"),
                None => String::new(),
            }
        );
        let _ = writeln!(s, "out = {}", self.out);
        let _ = writeln!(s, "svg = {}", self.svg);
        let _ = writeln!(s, "threshold = {}", self.threshold);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s);
        let _ = writeln!(s, "[sweep]");
        let _ = writeln!(s, "nu_grid = {}", join_floats(&self.nu_grid));
        let _ = writeln!(s, "kappa_grid = {}", join_floats(&self.kappa_grid));
        s
    }

    /// Parse the canonical text form, starting from defaults.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut config = RunConfig::default();
        let mut section = String::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                match section.as_str() {
                    "system" | "mass_law" | "integrator" | "run" | "sweep" => {}
                    other => {
                        return Err(format!("line {}: unknown section [{other}]", line_no + 1))
                    }
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", line_no + 1))?;
            let key = key.trim();
            let value = value.trim();
            config
                .apply(&section, key, value)
                .map_err(|e| format!("line {}: {e}", line_no + 1))?;
        }
        Ok(config)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        let parse_f64 = |value: &str, key: &str| -> Result<f64, String> {
            value
                .parse()
                .map_err(|_| format!("{key} must be a number, got '{value}'"))
        };
        match (section, key) {
            ("system", "nu") => self.nu = parse_f64(value, "nu")?,
            ("system", "g") => self.g = parse_f64(value, "g")?,
            ("system", "mode") => {
                self.mode = match value {
                    "rotating" => FrameMode::Rotating,
                    "collinear" => FrameMode::Collinear,
                    other => {
                        return Err(format!(
                            "mode must be 'rotating' or 'collinear', got '{other}'"
                        ))
                    }
                }
            }
            ("system", "r0") => self.r0 = parse_f64(value, "r0")?,
            ("system", "rdot0") => self.rdot0 = parse_f64(value, "rdot0")?,
            ("mass_law", "law") => self.law = value.parse()?,
            ("integrator", "rtol") => self.rtol = parse_f64(value, "rtol")?,
            ("integrator", "atol") => self.atol = parse_f64(value, "atol")?,
            ("integrator", "max_steps") => {
                self.max_steps = value
                    .parse()
                    .map_err(|_| format!("max_steps must be an integer, got '{value}'"))?
            }
            ("run", "t_end") => self.t_end = parse_f64(value, "t_end")?,
            ("run", "points") => {
                self.points = parse_points(value)?;
            }
            ("run", "seed") => {
                self.seed = if value.is_empty() {
                    None
                } else {
                    Some(parse_seed(value)?)
                }
            }
            ("run", "out") => self.out = value.to_string(),
            ("run", "svg") => {
                self.svg = value
                    .parse()
                    .map_err(|_| format!("svg must be true or false, got '{value}'"))?
            }
            ("run", "threshold") => self.threshold = parse_f64(value, "threshold")?,
            ("run", "samples") => {
                self.samples = value
                    .parse()
                    .map_err(|_| format!("samples must be an integer, got '{value}'"))?
            }
            ("sweep", "nu_grid") => self.nu_grid = parse_floats(value)?,
            ("sweep", "kappa_grid") => self.kappa_grid = parse_floats(value)?,
            (section, key) => return Err(format!("unknown key '{key}' in section [{section}]")),
        }
        Ok(())
    }
}

pub fn parse_seed(value: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = value.split(',').map(|p| p.trim()).collect();
    if parts.len() != 3 {
        return Err(format!("seed must be 'xi,eta,zeta', got '{value}'"));
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse()
            .map_err(|_| format!("seed component '{p}' is not a number"))?;
    }
    Ok(out)
}

pub fn parse_points(value: &str) -> Result<Vec<Label>, String> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|p| p.trim().parse::<Label>())
        .collect()
}

fn parse_floats(value: &str) -> Result<Vec<f64>, String> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{}' is not a number", v.trim()))
        })
        .collect()
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
