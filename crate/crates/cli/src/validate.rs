//! Solver-versus-exact comparison on three-site chains.
//!
//! The exact expressions cover N=3, unit bath rate, antisymmetric z drives,
//! and a z-graded (or uniform) coupling in a uniform field. The default
//! lattice spans drives, couplings, grades, and fields in a fixed nesting
//! order, so artifacts stay byte-stable; a config document narrows the
//! comparison to one chain, checked along its drive grid.

use rayon::prelude::*;
use serde::Serialize;
use spinflux::closed_form;
use spinflux::prelude::*;
use spinflux::ThreeSiteParams;

use crate::config::FileConfig;

/// Relative tolerance on each current unless overridden.
pub const DEFAULT_REL_TOL: f64 = 1e-8;
/// Absolute tolerance used when the exact current is tiny.
pub const ABS_TOL: f64 = 1e-10;
/// Exact currents below this magnitude are compared absolutely.
pub const SMALL_EXACT: f64 = 1e-6;

const DEFAULT_DRIVES: [f64; 8] = [-1.0, -0.5, -0.1, -0.01, 0.01, 0.1, 0.5, 1.0];
const DEFAULT_ALPHAS: [f64; 2] = [0.5, 1.0];
const DEFAULT_ANISOTROPIES: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
const DEFAULT_GRADES: [f64; 4] = [0.0, 0.1, 0.25, 0.7];
const DEFAULT_FIELDS: [f64; 3] = [0.0, 0.1, 0.5];

/// One grid point: both currents from the solver and the exact expressions,
/// with absolute deltas and the tolerance verdict.
#[derive(Debug, Clone, Serialize)]
pub struct OraclePoint {
    pub f: f64,
    pub alpha: f64,
    #[serde(rename = "Delta")]
    pub anisotropy: f64,
    #[serde(rename = "delta")]
    pub grade: f64,
    #[serde(rename = "B")]
    pub field: f64,
    pub spin_numeric: f64,
    pub spin_exact: f64,
    pub spin_delta: f64,
    pub energy_numeric: f64,
    pub energy_exact: f64,
    pub energy_delta: f64,
    pub breach: bool,
}

/// Full comparison with its max-abs summary.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub solver: SolverMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub points: Vec<OraclePoint>,
    pub max_spin_delta: f64,
    pub max_energy_delta: f64,
    pub breaches: usize,
}

/// The built-in lattice: fields outermost, drives innermost.
pub fn default_lattice() -> Vec<ThreeSiteParams> {
    let mut points = Vec::new();
    for field in DEFAULT_FIELDS {
        for grade in DEFAULT_GRADES {
            for anisotropy in DEFAULT_ANISOTROPIES {
                for alpha in DEFAULT_ALPHAS {
                    for f in DEFAULT_DRIVES {
                        points.push(ThreeSiteParams::new(f, alpha, anisotropy, grade, field));
                    }
                }
            }
        }
    }
    points
}

/// Comparison points for one configured chain along its drive grid.
///
/// The document's own `f` is ignored; `grid` supplies the drives (the default
/// drive set when absent). Errors name whatever the exact expressions cannot
/// cover: a size other than 3, a bath rate other than 1, or a profile shape
/// outside uniform/z-graded couplings in a uniform field.
pub fn lattice_from_config(cfg: &FileConfig) -> Result<Vec<ThreeSiteParams>, String> {
    let drives = cfg.grid.clone().unwrap_or_else(|| DEFAULT_DRIVES.to_vec());
    drives
        .iter()
        .map(|&f| {
            let bath = BoundarySpec::z_target(f, cfg.bath.gamma);
            bath.validate().map_err(|e| format!("grid: {e}"))?;
            ThreeSiteParams::from_chain(&cfg.chain, &bath).map_err(|e| e.to_string())
        })
        .collect()
}

fn chain_for(params: &ThreeSiteParams) -> ChainConfig {
    let coupling = if params.grade == 0.0 {
        CouplingProfile::Uniform { alpha: params.alpha, anisotropy: params.anisotropy }
    } else {
        CouplingProfile::ZGraded {
            alpha: params.alpha,
            anisotropy: params.anisotropy,
            grade: params.grade,
        }
    };
    ChainConfig::new(3, coupling, FieldProfile::Uniform { b: params.field })
}

fn within(delta: f64, exact: f64, rel_tol: f64) -> bool {
    if exact.abs() < SMALL_EXACT {
        delta <= ABS_TOL
    } else {
        delta <= rel_tol * exact.abs()
    }
}

/// Solves every lattice point and compares against the exact currents.
pub fn compare(
    lattice: &[ThreeSiteParams],
    opts: &SolveOptions,
    rel_tol: f64,
) -> Result<OracleReport, String> {
    let points: Vec<OraclePoint> = lattice
        .par_iter()
        .map(|params| {
            let spin_exact =
                closed_form::spin_current_exact(params).map_err(|e| e.to_string())?;
            let energy_exact =
                closed_form::energy_current_exact(params).map_err(|e| e.to_string())?;
            let bath = BoundarySpec::z_target(params.f, 1.0);
            let record =
                run_record(&chain_for(params), &bath, opts).map_err(|e| e.to_string())?;
            let spin_numeric = record.currents.spin_mean;
            let energy_numeric = record.currents.energy_mean;
            let spin_delta = (spin_numeric - spin_exact).abs();
            let energy_delta = (energy_numeric - energy_exact).abs();
            Ok(OraclePoint {
                f: params.f,
                alpha: params.alpha,
                anisotropy: params.anisotropy,
                grade: params.grade,
                field: params.field,
                spin_numeric,
                spin_exact,
                spin_delta,
                energy_numeric,
                energy_exact,
                energy_delta,
                breach: !(within(spin_delta, spin_exact, rel_tol)
                    && within(energy_delta, energy_exact, rel_tol)),
            })
        })
        .collect::<Result<_, String>>()?;

    let max_spin_delta = points.iter().map(|p| p.spin_delta).fold(0.0, f64::max);
    let max_energy_delta = points.iter().map(|p| p.energy_delta).fold(0.0, f64::max);
    let breaches = points.iter().filter(|p| p.breach).count();
    let solver = opts.method;
    Ok(OracleReport {
        solver,
        rel_tol,
        abs_tol: ABS_TOL,
        points,
        max_spin_delta,
        max_energy_delta,
        breaches,
    })
}

/// Per-point deltas as CSV, closed by the max-abs summary as comment lines.
pub fn report_csv(report: &OracleReport) -> String {
    let mut text = format!(
        "# solver={}\n# rel_tol={}\n# abs_tol={}\n",
        report.solver, report.rel_tol, report.abs_tol
    );
    text.push_str(
        "f,alpha,Delta,delta,B,spin_numeric,spin_exact,spin_delta,energy_numeric,energy_exact,energy_delta,breach\n",
    );
    for p in &report.points {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.f,
            p.alpha,
            p.anisotropy,
            p.grade,
            p.field,
            p.spin_numeric,
            p.spin_exact,
            p.spin_delta,
            p.energy_numeric,
            p.energy_exact,
            p.energy_delta,
            u8::from(p.breach),
        ));
    }
    text.push_str(&format!(
        "# points={}\n# max_spin_delta={}\n# max_energy_delta={}\n# breaches={}\n",
        report.points.len(),
        report.max_spin_delta,
        report.max_energy_delta,
        report.breaches
    ));
    text
}

/// One-line human summary for the terminal.
pub fn summary_line(report: &OracleReport) -> String {
    format!(
        "validated {} points with {}: max spin delta {:.3e}, max energy delta {:.3e}, breaches {}",
        report.points.len(),
        report.solver,
        report.max_spin_delta,
        report.max_energy_delta,
        report.breaches
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn the_default_lattice_has_the_documented_size_and_order() {
        let lattice = default_lattice();
        assert_eq!(lattice.len(), 960);
        assert_eq!(lattice[0], ThreeSiteParams::new(-1.0, 0.5, 0.0, 0.0, 0.0));
        assert_eq!(lattice[1], ThreeSiteParams::new(-0.5, 0.5, 0.0, 0.0, 0.0));
        assert_eq!(lattice[8], ThreeSiteParams::new(-1.0, 1.0, 0.0, 0.0, 0.0));
        assert_eq!(lattice[959], ThreeSiteParams::new(1.0, 1.0, 2.0, 0.7, 0.5));
    }

    #[test]
    fn a_config_narrows_the_lattice_to_its_drive_grid() {
        let cfg = parse_config(
            "N=3\nalpha=1\nDelta=1\ndelta=0.25\nB=0.1\nprofile=z_graded\ngrid=0.1,0.5",
        )
        .unwrap();
        let lattice = lattice_from_config(&cfg).unwrap();
        assert_eq!(
            lattice,
            vec![
                ThreeSiteParams::new(0.1, 1.0, 1.0, 0.25, 0.1),
                ThreeSiteParams::new(0.5, 1.0, 1.0, 0.25, 0.1),
            ]
        );
    }

    #[test]
    fn uncovered_configs_are_refused() {
        let four_sites = parse_config("N=4\nalpha=1\nDelta=1").unwrap();
        assert!(lattice_from_config(&four_sites).is_err());
        let off_rate = parse_config("N=3\nalpha=1\nDelta=1\ngamma=2").unwrap();
        assert!(lattice_from_config(&off_rate).is_err());
        let wide_grid =
            parse_config("N=3\nalpha=1\nDelta=1\ngrid=0.5,1.5").unwrap();
        assert!(lattice_from_config(&wide_grid).unwrap_err().starts_with("grid:"));
    }

    #[test]
    fn a_small_comparison_passes_and_summarizes() {
        let lattice = vec![
            ThreeSiteParams::new(0.5, 1.0, 1.0, 0.25, 0.1),
            ThreeSiteParams::new(-0.5, 0.5, 2.0, 0.7, 0.0),
        ];
        let report = compare(&lattice, &SolveOptions::default(), DEFAULT_REL_TOL).unwrap();
        assert_eq!(report.breaches, 0);
        assert!(report.max_spin_delta < 1e-10);
        assert!(report.max_energy_delta < 1e-10);

        let text = report_csv(&report);
        assert!(text.contains("# breaches=0"), "{text}");
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    }

    #[test]
    fn an_impossible_tolerance_counts_breaches() {
        let lattice = vec![ThreeSiteParams::new(0.5, 1.0, 1.0, 0.25, 0.1)];
        let report = compare(&lattice, &SolveOptions::default(), 0.0).unwrap();
        assert_eq!(report.breaches, 1);
    }
}
