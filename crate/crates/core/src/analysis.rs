//! Drive-reversal pairs, rectification factors, parameter sweeps, and
//! negative-differential-resistance scans.
//!
//! Everything here composes the lower layers: build a Liouvillian, solve for
//! its steady state, read the currents, then compare the forward run against
//! the run with reversed baths. Grid evaluations run in parallel but collect
//! in grid order, so output never depends on the worker count.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lindblad::{build_liouvillian, BoundaryDrive, BoundarySpec};
use crate::model::{ChainConfig, CouplingProfile, FieldProfile};
use crate::observables::{CurrentReport, ObservableSet};
use crate::steady::{solve_steady, SolveOptions, SolverMethod};

/// Currents below this are treated as zero when forming rectification factors.
pub const CURRENT_FLOOR: f64 = 1e-12;

/// A rectification factor: a number, or one of two degenerate markers.
///
/// `Infinite` marks a flow unchanged by bath reversal (zero denominator);
/// `Undefined` marks the no-flow case where the ratio compares nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RectValue {
    Finite(f64),
    Infinite,
    Undefined,
}

impl RectValue {
    /// The numeric value, if there is one.
    pub fn as_finite(&self) -> Option<f64> {
        match self {
            RectValue::Finite(x) => Some(*x),
            _ => None,
        }
    }
}

impl std::fmt::Display for RectValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RectValue::Finite(x) => write!(f, "{x}"),
            RectValue::Infinite => f.write_str("inf"),
            RectValue::Undefined => f.write_str("undef"),
        }
    }
}

impl Serialize for RectValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            RectValue::Finite(x) => serializer.serialize_f64(*x),
            RectValue::Infinite => serializer.serialize_str("inf"),
            RectValue::Undefined => serializer.serialize_str("undef"),
        }
    }
}

impl<'de> Deserialize<'de> for RectValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = RectValue;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a number, \"inf\", or \"undef\"")
            }

            fn visit_f64<E>(self, x: f64) -> Result<RectValue, E> {
                Ok(RectValue::Finite(x))
            }

            fn visit_i64<E>(self, x: i64) -> Result<RectValue, E> {
                Ok(RectValue::Finite(x as f64))
            }

            fn visit_u64<E>(self, x: u64) -> Result<RectValue, E> {
                Ok(RectValue::Finite(x as f64))
            }

            fn visit_str<E: serde::de::Error>(self, s: &str) -> Result<RectValue, E> {
                match s {
                    "inf" => Ok(RectValue::Infinite),
                    "undef" => Ok(RectValue::Undefined),
                    other => Err(E::invalid_value(serde::de::Unexpected::Str(other), &self)),
                }
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}

/// Rectification factor 100·|(forward + reverse)/(forward − reverse)|.
///
/// 100 means a perfect diode (one direction carries nothing); `Infinite`
/// means reversal left the flow unchanged; `Undefined` means neither
/// direction carries anything measurable.
pub fn rectification_factor(forward: f64, reverse: f64) -> RectValue {
    if forward.abs() < CURRENT_FLOOR && reverse.abs() < CURRENT_FLOOR {
        return RectValue::Undefined;
    }
    let difference = forward - reverse;
    if difference.abs() < CURRENT_FLOOR * (forward.abs() + reverse.abs()).max(1.0) {
        return RectValue::Infinite;
    }
    RectValue::Finite(100.0 * ((forward + reverse) / difference).abs())
}

/// One steady-state solve with its inputs, diagnostics, and currents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub chain: ChainConfig,
    pub bath: BoundarySpec,
    /// Method actually used (never `auto`).
    pub method: SolverMethod,
    pub residual: f64,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
    /// Solve time in seconds.
    pub wall_time: f64,
    pub currents: CurrentReport,
    /// Crate version that produced the record.
    pub version: String,
    /// Seconds since the Unix epoch at completion.
    pub unix_time: u64,
}

/// Solves one configuration and bundles the outcome into a [`RunRecord`].
pub fn run_record(
    chain: &ChainConfig,
    bath: &BoundarySpec,
    opts: &SolveOptions,
) -> Result<RunRecord, Error> {
    let liouv = build_liouvillian(chain, bath)?;
    let steady = solve_steady(&liouv, opts)?;
    let currents = ObservableSet::new(chain, bath)?.report(&steady.rho)?;
    let unix_time =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(RunRecord {
        chain: chain.clone(),
        bath: *bath,
        method: steady.method,
        residual: steady.residual,
        trace_defect: steady.trace_defect,
        hermiticity_defect: steady.hermiticity_defect,
        min_eigenvalue: steady.min_eigenvalue,
        iterations: steady.iterations,
        wall_time: steady.wall_time.as_secs_f64(),
        currents,
        version: env!("CARGO_PKG_VERSION").to_string(),
        unix_time,
    })
}

/// Forward and bath-reversed currents with their rectification factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectificationRecord {
    pub chain: ChainConfig,
    pub bath_forward: BoundarySpec,
    pub bath_reverse: BoundarySpec,
    pub spin_forward: f64,
    pub spin_reverse: f64,
    pub energy_forward: f64,
    pub energy_reverse: f64,
    pub spin_rectification: RectValue,
    pub energy_rectification: RectValue,
    /// Largest steady-state residual of the two solves.
    pub residual: f64,
}

/// Solves a configuration forward and with reversed baths, then compares.
pub fn run_pair(
    chain: &ChainConfig,
    bath: &BoundarySpec,
    opts: &SolveOptions,
) -> Result<RectificationRecord, Error> {
    let reversed = bath.inverted();
    let forward = run_record(chain, bath, opts)?;
    let reverse = run_record(chain, &reversed, opts)?;
    Ok(RectificationRecord {
        chain: chain.clone(),
        bath_forward: *bath,
        bath_reverse: reversed,
        spin_forward: forward.currents.spin_mean,
        spin_reverse: reverse.currents.spin_mean,
        energy_forward: forward.currents.energy_mean,
        energy_reverse: reverse.currents.energy_mean,
        spin_rectification: rectification_factor(
            forward.currents.spin_mean,
            reverse.currents.spin_mean,
        ),
        energy_rectification: rectification_factor(
            forward.currents.energy_mean,
            reverse.currents.energy_mean,
        ),
        residual: forward.residual.max(reverse.residual),
    })
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Antisymmetric drive strength f (z-target baths only).
    #[serde(rename = "f")]
    Drive,
    /// In-plane coupling center α.
    #[serde(rename = "alpha")]
    Alpha,
    /// z-coupling center Δ.
    #[serde(rename = "Delta")]
    Anisotropy,
    /// Coupling ramp half-width δ.
    #[serde(rename = "delta")]
    Grade,
    /// Uniform field B (or the field center when the field is graded).
    #[serde(rename = "B")]
    Field,
    /// Transverse target κ (twisted baths only).
    #[serde(rename = "kappa")]
    Kappa,
    /// Chain length N; grid values must be integers ≥ 2.
    #[serde(rename = "N")]
    Sites,
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SweepAxis::Drive => "f",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Anisotropy => "Delta",
            SweepAxis::Grade => "delta",
            SweepAxis::Field => "B",
            SweepAxis::Kappa => "kappa",
            SweepAxis::Sites => "N",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "f" => Ok(SweepAxis::Drive),
            "alpha" => Ok(SweepAxis::Alpha),
            "Delta" => Ok(SweepAxis::Anisotropy),
            "delta" => Ok(SweepAxis::Grade),
            "B" => Ok(SweepAxis::Field),
            "kappa" => Ok(SweepAxis::Kappa),
            "N" => Ok(SweepAxis::Sites),
            other => Err(Error::InvalidConfig(format!(
                "unknown sweep axis '{other}' (expected f, alpha, Delta, delta, B, kappa, or N)"
            ))),
        }
    }
}

/// A family of drive-reversal pairs along one parameter axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub chain: ChainConfig,
    pub bath: BoundarySpec,
    pub axis: SweepAxis,
    /// Axis values, strictly monotone.
    pub grid: Vec<f64>,
    #[serde(skip, default)]
    pub solve: SolveOptions,
}

impl SweepSpec {
    pub fn new(chain: ChainConfig, bath: BoundarySpec, axis: SweepAxis, grid: Vec<f64>) -> Self {
        Self { chain, bath, axis, grid, solve: SolveOptions::default() }
    }

    /// Checks the grid shape and the axis/configuration compatibility.
    pub fn validate(&self) -> Result<(), Error> {
        if self.grid.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("sweep grid contains a non-finite value".into()));
        }
        let increasing = self.grid.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.grid.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidConfig("sweep grid must be strictly monotone".into()));
        }
        for value in &self.grid {
            apply_axis(&self.chain, &self.bath, self.axis, *value)?;
        }
        Ok(())
    }
}

/// One grid point of a sweep: either a record or an error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Axis value this point was run at.
    pub value: f64,
    pub record: Option<RectificationRecord>,
    pub error: Option<String>,
}

/// Rebuilds the configuration with one axis set to `value`.
fn apply_axis(
    chain: &ChainConfig,
    bath: &BoundarySpec,
    axis: SweepAxis,
    value: f64,
) -> Result<(ChainConfig, BoundarySpec), Error> {
    let mut chain = chain.clone();
    let mut bath = *bath;
    match axis {
        SweepAxis::Drive => match bath.drive {
            BoundaryDrive::ZTarget { .. } => {
                bath.drive = BoundaryDrive::ZTarget { f_left: value, f_right: -value };
            }
            BoundaryDrive::TwistedXy { .. } => {
                return Err(Error::InvalidConfig(
                    "the f axis needs z-target baths; sweep kappa instead".into(),
                ));
            }
        },
        SweepAxis::Kappa => match bath.drive {
            BoundaryDrive::TwistedXy { swapped, .. } => {
                bath.drive = BoundaryDrive::TwistedXy { kappa: value, swapped };
            }
            BoundaryDrive::ZTarget { .. } => {
                return Err(Error::InvalidConfig(
                    "the kappa axis needs twisted baths; sweep f instead".into(),
                ));
            }
        },
        SweepAxis::Alpha => {
            chain.coupling = match chain.coupling {
                CouplingProfile::Uniform { anisotropy, .. } => {
                    CouplingProfile::Uniform { alpha: value, anisotropy }
                }
                CouplingProfile::ZGraded { anisotropy, grade, .. } => {
                    CouplingProfile::ZGraded { alpha: value, anisotropy, grade }
                }
                CouplingProfile::XyGraded { anisotropy, grade, .. } => {
                    CouplingProfile::XyGraded { alpha: value, anisotropy, grade }
                }
                CouplingProfile::FullyGraded { anisotropy, grade, .. } => {
                    CouplingProfile::FullyGraded { alpha: value, anisotropy, grade }
                }
                CouplingProfile::XxxGraded { .. } => {
                    return Err(Error::InvalidConfig(
                        "the xxx_graded profile ties alpha to Delta; sweep Delta instead".into(),
                    ));
                }
                CouplingProfile::Explicit { .. } => {
                    return Err(Error::InvalidConfig(
                        "explicit couplings have no alpha center to sweep".into(),
                    ));
                }
            };
        }
        SweepAxis::Anisotropy => {
            chain.coupling = match chain.coupling {
                CouplingProfile::Uniform { alpha, .. } => {
                    CouplingProfile::Uniform { alpha, anisotropy: value }
                }
                CouplingProfile::ZGraded { alpha, grade, .. } => {
                    CouplingProfile::ZGraded { alpha, anisotropy: value, grade }
                }
                CouplingProfile::XyGraded { alpha, grade, .. } => {
                    CouplingProfile::XyGraded { alpha, anisotropy: value, grade }
                }
                CouplingProfile::XxxGraded { grade, .. } => {
                    CouplingProfile::XxxGraded { anisotropy: value, grade }
                }
                CouplingProfile::FullyGraded { alpha, grade, .. } => {
                    CouplingProfile::FullyGraded { alpha, anisotropy: value, grade }
                }
                CouplingProfile::Explicit { .. } => {
                    return Err(Error::InvalidConfig(
                        "explicit couplings have no Delta center to sweep".into(),
                    ));
                }
            };
        }
        SweepAxis::Grade => {
            chain.coupling = match chain.coupling {
                CouplingProfile::Uniform { alpha, anisotropy } => {
                    CouplingProfile::ZGraded { alpha, anisotropy, grade: value }
                }
                CouplingProfile::ZGraded { alpha, anisotropy, .. } => {
                    CouplingProfile::ZGraded { alpha, anisotropy, grade: value }
                }
                CouplingProfile::XyGraded { alpha, anisotropy, .. } => {
                    CouplingProfile::XyGraded { alpha, anisotropy, grade: value }
                }
                CouplingProfile::XxxGraded { anisotropy, .. } => {
                    CouplingProfile::XxxGraded { anisotropy, grade: value }
                }
                CouplingProfile::FullyGraded { alpha, anisotropy, .. } => {
                    CouplingProfile::FullyGraded { alpha, anisotropy, grade: value }
                }
                CouplingProfile::Explicit { .. } => {
                    return Err(Error::InvalidConfig(
                        "explicit couplings have no grade to sweep".into(),
                    ));
                }
            };
        }
        SweepAxis::Field => {
            chain.field = match chain.field {
                FieldProfile::Uniform { .. } => FieldProfile::Uniform { b: value },
                FieldProfile::LinearGraded { slope, .. } => {
                    FieldProfile::LinearGraded { center: value, slope }
                }
                FieldProfile::Explicit { .. } => {
                    return Err(Error::InvalidConfig(
                        "explicit fields have no center to sweep".into(),
                    ));
                }
            };
        }
        SweepAxis::Sites => {
            if value.fract() != 0.0 || value < 2.0 {
                return Err(Error::InvalidConfig(format!(
                    "the N axis needs integer values of at least 2, got {value}"
                )));
            }
            chain.sites = value as usize;
        }
    }
    Ok((chain, bath))
}

/// Runs a drive-reversal pair at every grid point, in grid order.
///
/// Per-point failures are embedded in the returned points; only an invalid
/// spec fails the sweep as a whole.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>, Error> {
    spec.validate()?;
    let points = spec
        .grid
        .par_iter()
        .map(|&value| {
            let (chain, bath) = match apply_axis(&spec.chain, &spec.bath, spec.axis, value) {
                Ok(pair) => pair,
                Err(e) => {
                    return SweepPoint { value, record: None, error: Some(e.to_string()) };
                }
            };
            match run_pair(&chain, &bath, &spec.solve) {
                Ok(record) => SweepPoint { value, record: Some(record), error: None },
                Err(e) => SweepPoint { value, record: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(points)
}

/// Energy current versus drive strength, with its decreasing stretches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdrReport {
    pub chain: ChainConfig,
    pub bath: BoundarySpec,
    pub f_grid: Vec<f64>,
    pub energy_current: Vec<f64>,
    /// Inclusive index pairs (start, end) into `f_grid` over which the
    /// energy current strictly decreases; empty when pushing harder always
    /// yields more current.
    pub intervals: Vec<(usize, usize)>,
}

/// Maximal index intervals over which `values` strictly decreases.
fn decreasing_intervals(values: &[f64]) -> Vec<(usize, usize)> {
    let mut intervals = Vec::new();
    let mut start = None;
    for i in 0..values.len().saturating_sub(1) {
        if values[i + 1] < values[i] {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            intervals.push((s, i));
        }
    }
    if let Some(s) = start {
        intervals.push((s, values.len() - 1));
    }
    intervals
}

/// Scans the energy current over a drive grid and reports where it falls.
///
/// Each grid value f drives the chain antisymmetrically (targets f and −f).
/// Detection is purely grid-based; a finer grid resolves narrower stretches.
pub fn ndr_scan(
    chain: &ChainConfig,
    bath: &BoundarySpec,
    f_grid: &[f64],
    opts: &SolveOptions,
) -> Result<NdrReport, Error> {
    if !matches!(bath.drive, BoundaryDrive::ZTarget { .. }) {
        return Err(Error::InvalidConfig("an NDR scan needs z-target baths".into()));
    }
    if f_grid.len() < 2 {
        return Err(Error::InvalidConfig("an NDR scan needs at least two drive values".into()));
    }
    if !f_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidConfig("the drive grid must be strictly increasing".into()));
    }
    if f_grid.iter().any(|f| *f <= 0.0 || *f > 1.0) {
        return Err(Error::InvalidConfig("drive values must lie in (0, 1]".into()));
    }

    let outcomes: Vec<Result<f64, Error>> = f_grid
        .par_iter()
        .map(|&f| {
            let scaled = BoundarySpec::z_target(f, bath.gamma);
            run_record(chain, &scaled, opts).map(|r| r.currents.energy_mean)
        })
        .collect();
    let mut energy_current = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        energy_current.push(outcome?);
    }

    let intervals = decreasing_intervals(&energy_current);
    Ok(NdrReport {
        chain: chain.clone(),
        bath: *bath,
        f_grid: f_grid.to_vec(),
        energy_current,
        intervals,
    })
}

#[cfg(test)]
mod tests {
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    use super::*;
    use crate::closed_form::{energy_current_exact, spin_current_exact, ThreeSiteParams};

    fn graded_chain(grade: f64, field: f64) -> ChainConfig {
        ChainConfig::new(
            3,
            CouplingProfile::ZGraded { alpha: 1.0, anisotropy: 1.0, grade },
            FieldProfile::Uniform { b: field },
        )
    }

    #[test]
    fn rectification_factor_handles_the_three_regimes() {
        assert_eq!(rectification_factor(1.0, 0.0), RectValue::Finite(100.0));
        assert_eq!(rectification_factor(1.0, 1.0), RectValue::Infinite);
        assert_eq!(rectification_factor(1e-13, 1e-13), RectValue::Undefined);
        let r = rectification_factor(2.0, -1.0).as_finite().unwrap();
        assert_relative_eq!(r, 100.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn tiny_identical_currents_are_undefined_not_infinite() {
        assert_eq!(rectification_factor(5e-13, 5e-13), RectValue::Undefined);
    }

    proptest! {
        #[test]
        fn rectification_factor_is_scale_invariant(
            forward in -10.0f64..10.0,
            reverse in -10.0f64..10.0,
            scale in 0.5f64..2.0,
        ) {
            let plain = rectification_factor(forward, reverse);
            let scaled = rectification_factor(scale * forward, scale * reverse);
            match (plain, scaled) {
                (RectValue::Finite(a), RectValue::Finite(b)) => {
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
                }
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn reversal_without_field_leaves_the_energy_current_unchanged() {
        let record =
            run_pair(&graded_chain(0.25, 0.0), &BoundarySpec::z_target(0.5, 1.0), &SolveOptions::default())
                .unwrap();
        assert_abs_diff_eq!(record.energy_forward, record.energy_reverse, epsilon = 1e-9);
        assert_eq!(record.energy_rectification, RectValue::Infinite);
    }

    #[test]
    fn xx_chain_in_a_field_shows_no_energy_rectification() {
        let chain = ChainConfig::new(
            3,
            CouplingProfile::Uniform { alpha: 1.0, anisotropy: 0.0 },
            FieldProfile::Uniform { b: 0.1 },
        );
        let record =
            run_pair(&chain, &BoundarySpec::z_target(0.5, 1.0), &SolveOptions::default()).unwrap();
        let r = record.energy_rectification.as_finite().unwrap();
        assert!(r < 1e-6, "expected no rectification in the XX limit, got {r}");
    }

    #[test]
    fn uniform_chain_in_a_field_reverses_its_energy_current() {
        let chain = ChainConfig::new(
            4,
            CouplingProfile::Uniform { alpha: 1.0, anisotropy: 0.8 },
            FieldProfile::Uniform { b: 0.3 },
        );
        let record =
            run_pair(&chain, &BoundarySpec::z_target(0.7, 1.0), &SolveOptions::default()).unwrap();
        assert_abs_diff_eq!(record.energy_forward, -record.energy_reverse, epsilon = 1e-9);
        let r = record.energy_rectification.as_finite().unwrap();
        assert!(r < 1e-6, "mirror-symmetric chain must not rectify, got {r}");
    }

    #[test]
    fn graded_chain_in_a_field_rectifies_energy_but_not_spin() {
        let record =
            run_pair(&graded_chain(0.25, 0.1), &BoundarySpec::z_target(0.1, 1.0), &SolveOptions::default())
                .unwrap();

        let spin = record.spin_rectification.as_finite().unwrap();
        assert!(spin < 1e-6, "z drive must not rectify the spin current, got {spin}");
        let energy = record.energy_rectification.as_finite().unwrap();
        assert!(energy > 0.0, "graded chain in a field should rectify, got {energy}");

        let forward = ThreeSiteParams::new(0.1, 1.0, 1.0, 0.25, 0.1);
        let reverse = ThreeSiteParams::new(-0.1, 1.0, 1.0, 0.25, 0.1);
        assert_abs_diff_eq!(
            record.energy_forward,
            energy_current_exact(&forward).unwrap(),
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            record.energy_reverse,
            energy_current_exact(&reverse).unwrap(),
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            record.spin_forward,
            spin_current_exact(&forward).unwrap(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn sweep_points_come_back_in_grid_order_with_records() {
        let spec = SweepSpec::new(
            graded_chain(0.25, 0.1),
            BoundarySpec::z_target(0.0, 1.0),
            SweepAxis::Drive,
            vec![0.1, 0.5, 1.0],
        );
        let points = sweep(&spec).unwrap();
        assert_eq!(points.iter().map(|p| p.value).collect::<Vec<_>>(), vec![0.1, 0.5, 1.0]);
        for point in &points {
            let record = point.record.as_ref().expect("every point should solve");
            assert!(record.residual < 1e-9);
            match record.bath_forward.drive {
                BoundaryDrive::ZTarget { f_left, f_right } => {
                    assert_eq!(f_left, point.value);
                    assert_eq!(f_right, -point.value);
                }
                _ => panic!("sweep must keep the drive kind"),
            }
        }
    }

    #[test]
    fn sweep_output_does_not_depend_on_the_worker_count() {
        let spec = SweepSpec::new(
            graded_chain(0.25, 0.1),
            BoundarySpec::z_target(0.0, 1.0),
            SweepAxis::Drive,
            vec![0.2, 0.4, 0.6, 0.8],
        );
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sweep(&spec).unwrap());
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| sweep(&spec).unwrap());
        assert_eq!(
            serde_json::to_string(&single).unwrap(),
            serde_json::to_string(&several).unwrap()
        );
    }

    #[test]
    fn sweep_over_sites_grows_the_chain() {
        let spec = SweepSpec::new(
            graded_chain(0.25, 0.1),
            BoundarySpec::z_target(1.0, 1.0),
            SweepAxis::Sites,
            vec![3.0, 4.0],
        );
        let points = sweep(&spec).unwrap();
        for (point, sites) in points.iter().zip([3usize, 4]) {
            assert_eq!(point.record.as_ref().unwrap().chain.sites, sites);
        }
    }

    #[test]
    fn sweep_rejects_bad_specs_up_front() {
        let chain = graded_chain(0.25, 0.1);
        let z = BoundarySpec::z_target(0.5, 1.0);

        let empty = SweepSpec::new(chain.clone(), z, SweepAxis::Drive, vec![]);
        assert!(sweep(&empty).is_err());

        let wobbling = SweepSpec::new(chain.clone(), z, SweepAxis::Drive, vec![0.1, 0.3, 0.2]);
        assert!(sweep(&wobbling).is_err());

        let kappa_on_z = SweepSpec::new(chain.clone(), z, SweepAxis::Kappa, vec![0.1, 0.2]);
        assert!(sweep(&kappa_on_z).is_err());

        let fractional_sites = SweepSpec::new(chain, z, SweepAxis::Sites, vec![3.0, 3.5]);
        assert!(sweep(&fractional_sites).is_err());
    }

    #[test]
    fn sweep_embeds_per_point_failures_without_aborting() {
        let spec = SweepSpec::new(
            graded_chain(0.25, 0.1),
            BoundarySpec::z_target(0.0, 1.0),
            SweepAxis::Drive,
            vec![0.5, 1.5],
        );
        let points = sweep(&spec).unwrap();
        assert!(points[0].record.is_some() && points[0].error.is_none());
        assert!(points[1].record.is_none());
        let message = points[1].error.as_ref().unwrap();
        assert!(message.contains("target"), "unexpected message: {message}");
    }

    #[test]
    fn decreasing_intervals_finds_maximal_runs() {
        assert_eq!(decreasing_intervals(&[1.0, 2.0, 3.0]), vec![]);
        assert_eq!(decreasing_intervals(&[3.0, 2.0, 1.0]), vec![(0, 2)]);
        assert_eq!(
            decreasing_intervals(&[1.0, 2.0, 1.5, 1.0, 2.0, 1.9]),
            vec![(1, 3), (4, 5)]
        );
        assert_eq!(decreasing_intervals(&[1.0, 1.0, 2.0]), vec![]);
    }

    #[test]
    fn strongly_graded_stiff_chain_shows_negative_differential_resistance() {
        let chain = ChainConfig::new(
            3,
            CouplingProfile::ZGraded { alpha: 1.0, anisotropy: 2.0, grade: 0.8 },
            FieldProfile::Uniform { b: 0.1 },
        );
        let f_grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();
        let report =
            ndr_scan(&chain, &BoundarySpec::z_target(1.0, 1.0), &f_grid, &SolveOptions::default())
                .unwrap();
        assert!(
            !report.intervals.is_empty(),
            "expected the energy current to fall somewhere on the grid: {:?}",
            report.energy_current
        );
    }

    #[test]
    fn moderately_graded_chain_needs_a_stronger_bath_for_ndr() {
        let chain = graded_chain(0.7, 0.1);
        let f_grid: Vec<f64> = (1..=20).map(|k| 0.05 * k as f64).collect();

        let weak =
            ndr_scan(&chain, &BoundarySpec::z_target(1.0, 1.0), &f_grid, &SolveOptions::default())
                .unwrap();
        assert!(
            weak.intervals.is_empty(),
            "at unit bath coupling this chain's energy current rises monotonically: {:?}",
            weak.energy_current
        );

        let strong =
            ndr_scan(&chain, &BoundarySpec::z_target(1.0, 1.5), &f_grid, &SolveOptions::default())
                .unwrap();
        assert!(
            !strong.intervals.is_empty(),
            "expected the current to peak and fall at bath coupling 1.5: {:?}",
            strong.energy_current
        );
    }

    #[test]
    fn xx_chain_shows_no_negative_differential_resistance() {
        let chain = ChainConfig::new(
            3,
            CouplingProfile::Uniform { alpha: 1.0, anisotropy: 0.0 },
            FieldProfile::Uniform { b: 0.1 },
        );
        let f_grid: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
        let report =
            ndr_scan(&chain, &BoundarySpec::z_target(1.0, 1.0), &f_grid, &SolveOptions::default())
                .unwrap();
        assert!(report.intervals.is_empty(), "unexpected NDR: {:?}", report.energy_current);
    }

    #[test]
    fn ndr_scan_rejects_bad_grids_and_baths() {
        let chain = graded_chain(0.7, 0.1);
        let z = BoundarySpec::z_target(1.0, 1.0);
        let opts = SolveOptions::default();

        assert!(ndr_scan(&chain, &BoundarySpec::twisted_xy(0.25, 1.0), &[0.1, 0.2], &opts).is_err());
        assert!(ndr_scan(&chain, &z, &[0.5], &opts).is_err());
        assert!(ndr_scan(&chain, &z, &[0.2, 0.1], &opts).is_err());
        assert!(ndr_scan(&chain, &z, &[0.0, 0.5], &opts).is_err());
        assert!(ndr_scan(&chain, &z, &[0.5, 1.1], &opts).is_err());
    }

    #[test]
    fn run_records_round_trip_through_json() {
        let record = run_record(
            &graded_chain(0.25, 0.1),
            &BoundarySpec::z_target(0.5, 1.0),
            &SolveOptions::default(),
        )
        .unwrap();
        let text = serde_json::to_string(&record).unwrap();
        let parsed: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(record, parsed);

        let pair = run_pair(
            &graded_chain(0.25, 0.1),
            &BoundarySpec::z_target(0.5, 1.0),
            &SolveOptions::default(),
        )
        .unwrap();
        let text = serde_json::to_string(&pair).unwrap();
        let parsed: RectificationRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(pair, parsed);
    }
}
