//! Flat key=value configuration files.
//!
//! One assignment per line, `#` starts a comment, and a line holding several
//! assignments may separate them with commas. Unknown and duplicate keys are
//! errors, and every diagnostic carries the line it refers to so fixtures
//! stay easy to fix.

use std::collections::BTreeMap;

use spinflux::prelude::*;

/// Every key the parser accepts, in the order the canonical echo uses.
const KNOWN_KEYS: [&str; 16] = [
    "N",
    "profile",
    "alpha",
    "Delta",
    "delta",
    "field_profile",
    "B",
    "B_slope",
    "boundary",
    "gamma",
    "f",
    "kappa",
    "solver",
    "tol",
    "axis",
    "grid",
];

/// A parsed and validated configuration document.
#[derive(Debug, Clone)]
pub struct FileConfig {
    pub chain: ChainConfig,
    pub bath: BoundarySpec,
    pub method: SolverMethod,
    /// Solve tolerance override for iterative methods.
    pub tol: Option<f64>,
    /// Sweep axis, when the document drives a sweep.
    pub axis: Option<SweepAxis>,
    /// Grid values for sweeps and drive scans.
    pub grid: Option<Vec<f64>>,
}

impl FileConfig {
    /// Solver settings implied by this document.
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { method: self.method, tol: self.tol, ..SolveOptions::default() }
    }

    /// The effective configuration as key=value lines in a fixed order.
    ///
    /// Defaults are spelled out, so the echo fully describes the run even
    /// when the source document left most keys implicit.
    pub fn canonical_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("N={}", self.chain.sites)];
        match &self.chain.coupling {
            CouplingProfile::Uniform { alpha, anisotropy } => {
                lines.push("profile=uniform".into());
                lines.push(format!("alpha={alpha}"));
                lines.push(format!("Delta={anisotropy}"));
            }
            CouplingProfile::ZGraded { alpha, anisotropy, grade } => {
                lines.push("profile=z_graded".into());
                lines.push(format!("alpha={alpha}"));
                lines.push(format!("Delta={anisotropy}"));
                lines.push(format!("delta={grade}"));
            }
            CouplingProfile::XyGraded { alpha, anisotropy, grade } => {
                lines.push("profile=xy_graded".into());
                lines.push(format!("alpha={alpha}"));
                lines.push(format!("Delta={anisotropy}"));
                lines.push(format!("delta={grade}"));
            }
            CouplingProfile::XxxGraded { anisotropy, grade } => {
                lines.push("profile=xxx_graded".into());
                lines.push(format!("Delta={anisotropy}"));
                lines.push(format!("delta={grade}"));
            }
            CouplingProfile::FullyGraded { alpha, anisotropy, grade } => {
                lines.push("profile=fully_graded".into());
                lines.push(format!("alpha={alpha}"));
                lines.push(format!("Delta={anisotropy}"));
                lines.push(format!("delta={grade}"));
            }
            CouplingProfile::Explicit { alpha, anisotropy } => {
                lines.push("profile=explicit".into());
                lines.push(format!("alpha={}", join_floats(alpha)));
                lines.push(format!("Delta={}", join_floats(anisotropy)));
            }
        }
        match &self.chain.field {
            FieldProfile::Uniform { b } => {
                lines.push("field_profile=uniform".into());
                lines.push(format!("B={b}"));
            }
            FieldProfile::LinearGraded { center, slope } => {
                lines.push("field_profile=linear_graded".into());
                lines.push(format!("B={center}"));
                lines.push(format!("B_slope={slope}"));
            }
            FieldProfile::Explicit { b } => {
                lines.push("field_profile=explicit".into());
                lines.push(format!("B={}", join_floats(b)));
            }
        }
        match self.bath.drive {
            BoundaryDrive::ZTarget { f_left, .. } => {
                lines.push("boundary=z_target".into());
                lines.push(format!("gamma={}", self.bath.gamma));
                lines.push(format!("f={f_left}"));
            }
            BoundaryDrive::TwistedXy { kappa, .. } => {
                lines.push("boundary=twisted_xy".into());
                lines.push(format!("gamma={}", self.bath.gamma));
                lines.push(format!("kappa={kappa}"));
            }
        }
        lines.push(format!("solver={}", self.method));
        if let Some(tol) = self.tol {
            lines.push(format!("tol={tol}"));
        }
        if let Some(axis) = self.axis {
            lines.push(format!("axis={axis}"));
        }
        if let Some(grid) = &self.grid {
            lines.push(format!("grid={}", join_floats(grid)));
        }
        lines
    }
}

fn join_floats(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

struct Entry {
    line: usize,
    value: String,
}

struct Document {
    entries: BTreeMap<String, Entry>,
}

impl Document {
    fn scan(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let pieces: Vec<&str> = if content.matches('=').count() >= 2 {
                content.split(',').collect()
            } else {
                vec![content]
            };
            for piece in pieces {
                let (key, value) = piece
                    .split_once('=')
                    .ok_or_else(|| format!("line {line}: expected key=value, got `{}`", piece.trim()))?;
                let key = key.trim();
                let value = value.trim();
                if !KNOWN_KEYS.contains(&key) {
                    return Err(format!("line {line}: unknown key `{key}`"));
                }
                if value.is_empty() {
                    return Err(format!("line {line}: {key}: empty value"));
                }
                if let Some(previous) = entries.insert(
                    key.to_string(),
                    Entry { line, value: value.to_string() },
                ) {
                    let Entry { line: first, .. } = previous;
                    return Err(format!(
                        "line {line}: duplicate key `{key}` (first set on line {first})"
                    ));
                }
            }
        }
        Ok(Self { entries })
    }

    fn take(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn float(&self, key: &str) -> Result<Option<f64>, String> {
        match self.take(key) {
            None => Ok(None),
            Some(entry) => {
                let value: f64 = entry
                    .value
                    .parse()
                    .map_err(|_| format!("line {}: {key}: not a number: `{}`", entry.line, entry.value))?;
                if !value.is_finite() {
                    return Err(format!("line {}: {key}: must be finite", entry.line));
                }
                Ok(Some(value))
            }
        }
    }

    fn required_float(&self, key: &str) -> Result<f64, String> {
        self.float(key)?.ok_or_else(|| format!("missing required key `{key}`"))
    }

    fn sites(&self) -> Result<usize, String> {
        let entry = self.take("N").ok_or("missing required key `N`")?;
        let n: usize = entry
            .value
            .parse()
            .map_err(|_| format!("line {}: N: not an integer: `{}`", entry.line, entry.value))?;
        if n < 2 {
            return Err(format!("line {}: N: a chain needs at least 2 sites, got {n}", entry.line));
        }
        Ok(n)
    }

    fn fail(&self, key: &str, message: &str) -> String {
        match self.take(key) {
            Some(entry) => format!("line {}: {key}: {message}", entry.line),
            None => format!("{key}: {message}"),
        }
    }
}

/// Parses a configuration document into validated model types.
///
/// Omitted keys take their defaults: `profile=uniform`, `field_profile=uniform`,
/// `boundary=z_target`, `gamma=1`, `B=0`, `f=0`, `solver=auto`.
pub fn parse_config(text: &str) -> Result<FileConfig, String> {
    let doc = Document::scan(text)?;

    let sites = doc.sites()?;
    let anisotropy = doc.required_float("Delta")?;
    let grade = doc.float("delta")?.unwrap_or(0.0);
    let profile = doc.take("profile").map(|e| e.value.as_str()).unwrap_or("uniform");

    let coupling = match profile {
        "uniform" => {
            if grade != 0.0 {
                return Err(doc.fail(
                    "delta",
                    "a uniform profile has no grade; set profile=z_graded, xy_graded, xxx_graded, or fully_graded",
                ));
            }
            CouplingProfile::Uniform { alpha: doc.required_float("alpha")?, anisotropy }
        }
        "z_graded" => {
            CouplingProfile::ZGraded { alpha: doc.required_float("alpha")?, anisotropy, grade }
        }
        "xy_graded" => {
            CouplingProfile::XyGraded { alpha: doc.required_float("alpha")?, anisotropy, grade }
        }
        "xxx_graded" => {
            if doc.take("alpha").is_some() {
                return Err(doc.fail(
                    "alpha",
                    "xxx_graded couples all axes at the strength set by Delta; remove alpha",
                ));
            }
            CouplingProfile::XxxGraded { anisotropy, grade }
        }
        "fully_graded" => {
            CouplingProfile::FullyGraded { alpha: doc.required_float("alpha")?, anisotropy, grade }
        }
        other => {
            return Err(doc.fail(
                "profile",
                &format!("unknown profile `{other}` (expected uniform, z_graded, xy_graded, xxx_graded, or fully_graded)"),
            ));
        }
    };

    let field_center = doc.float("B")?.unwrap_or(0.0);
    let field_slope = doc.float("B_slope")?;
    let field_kind = doc.take("field_profile").map(|e| e.value.as_str()).unwrap_or("uniform");
    let field = match field_kind {
        "uniform" => {
            if field_slope.is_some() {
                return Err(doc.fail(
                    "B_slope",
                    "a uniform field has no slope; set field_profile=linear_graded",
                ));
            }
            FieldProfile::Uniform { b: field_center }
        }
        "linear_graded" => FieldProfile::LinearGraded {
            center: field_center,
            slope: field_slope.unwrap_or(0.0),
        },
        other => {
            return Err(doc.fail(
                "field_profile",
                &format!("unknown field profile `{other}` (expected uniform or linear_graded)"),
            ));
        }
    };

    let gamma = doc.float("gamma")?.unwrap_or(1.0);
    if gamma <= 0.0 {
        return Err(doc.fail("gamma", &format!("bath rate must be positive, got {gamma}")));
    }
    let boundary = doc.take("boundary").map(|e| e.value.as_str()).unwrap_or("z_target");
    let bath = match boundary {
        "z_target" => {
            if doc.take("kappa").is_some() {
                return Err(doc.fail(
                    "kappa",
                    "the z-target drive has no transverse target; remove kappa or set boundary=twisted_xy",
                ));
            }
            let f = doc.float("f")?.unwrap_or(0.0);
            if !(-1.0..=1.0).contains(&f) {
                return Err(doc.fail(
                    "f",
                    &format!("target polarization must lie in [-1, 1], got {f} (a pump rate would turn negative)"),
                ));
            }
            BoundarySpec::z_target(f, gamma)
        }
        "twisted_xy" => {
            if doc.take("f").is_some() {
                return Err(doc.fail(
                    "f",
                    "the twisted drive has no z target; remove f or set boundary=z_target",
                ));
            }
            let kappa = doc
                .float("kappa")?
                .ok_or_else(|| "missing required key `kappa` (boundary=twisted_xy)".to_string())?;
            if !(-1.0..=1.0).contains(&kappa) {
                return Err(doc.fail(
                    "kappa",
                    &format!("target polarization must lie in [-1, 1], got {kappa}"),
                ));
            }
            BoundarySpec::twisted_xy(kappa, gamma)
        }
        other => {
            return Err(doc.fail(
                "boundary",
                &format!("unknown boundary `{other}` (expected z_target or twisted_xy)"),
            ));
        }
    };

    let method = match doc.take("solver") {
        None => SolverMethod::Auto,
        Some(entry) => entry
            .value
            .parse()
            .map_err(|e: Error| format!("line {}: solver: {e}", entry.line))?,
    };

    let tol = doc.float("tol")?;
    if let Some(t) = tol {
        if t <= 0.0 {
            return Err(doc.fail("tol", &format!("tolerance must be positive, got {t}")));
        }
    }

    let axis = match doc.take("axis") {
        None => None,
        Some(entry) => Some(
            entry.value.parse().map_err(|e: Error| format!("line {}: axis: {e}", entry.line))?,
        ),
    };

    let grid = match doc.take("grid") {
        None => None,
        Some(entry) => Some(
            parse_grid(&entry.value).map_err(|e| format!("line {}: grid: {e}", entry.line))?,
        ),
    };

    let chain = ChainConfig::new(sites, coupling, field);
    resolve_profiles(&chain).map_err(|e| doc.fail("profile", &e.to_string()))?;
    bath.validate().map_err(|e| doc.fail("boundary", &e.to_string()))?;

    Ok(FileConfig { chain, bath, method, tol, axis, grid })
}

/// Parses a grid expression: either a comma-separated list of numbers or a
/// range `START..END step S` (also written `START..END:S`). The range form
/// includes both endpoints, and the final value is snapped to END exactly so
/// accumulated float error never pushes it past the stated bound.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let values = if text.contains("..") {
        let (range, step_text) = if let Some((r, s)) = text.split_once(" step ") {
            (r, s)
        } else if let Some((r, s)) = text.split_once(':') {
            (r, s)
        } else {
            return Err("a range needs a step: `START..END step S`".into());
        };
        let (start_text, end_text) = range
            .split_once("..")
            .ok_or_else(|| format!("malformed range `{range}`"))?;
        let start: f64 = start_text
            .trim()
            .parse()
            .map_err(|_| format!("not a number: `{}`", start_text.trim()))?;
        let end: f64 = end_text
            .trim()
            .parse()
            .map_err(|_| format!("not a number: `{}`", end_text.trim()))?;
        let step: f64 = step_text
            .trim()
            .parse()
            .map_err(|_| format!("not a number: `{}`", step_text.trim()))?;
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err("range bounds and step must be finite".into());
        }
        if step == 0.0 {
            return Err("step must be nonzero".into());
        }
        let span = (end - start) / step;
        if span < 0.0 {
            return Err(format!("step {step} points away from the end {end}"));
        }
        let count = (span + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| {
                let v = start + k as f64 * step;
                if (v - end).abs() < step.abs() * 1e-9 {
                    end
                } else {
                    v
                }
            })
            .collect()
    } else {
        text.split(',')
            .map(|piece| {
                piece
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format!("not a number: `{}`", piece.trim()))
            })
            .collect::<Result<Vec<f64>, String>>()?
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("grid values must be finite".into());
    }
    Ok(values)
}
