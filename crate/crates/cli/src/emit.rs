//! CSV and JSON artifact rendering.
//!
//! CSV artifacts open with the canonical config echo as `#` comment lines, so
//! every file names the run that produced it. Floats print in Rust's shortest
//! round-trip form, which keeps equal inputs byte-identical; rectification
//! cells use the `inf`/`undef` markers from their Display form.

use serde::Serialize;
use spinflux::prelude::*;

use crate::config::FileConfig;

/// Serializes any artifact as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| format!("serializing artifact: {e}"))
}

/// A sweep artifact pairs the sweep definition with its points so the JSON
/// form is self-describing like the CSV form.
#[derive(Serialize)]
pub struct SweepArtifact<'a> {
    pub spec: &'a SweepSpec,
    pub points: &'a [SweepPoint],
}

fn config_comments(cfg: &FileConfig) -> String {
    let mut text = String::new();
    for line in cfg.canonical_lines() {
        text.push_str("# ");
        text.push_str(&line);
        text.push('\n');
    }
    text
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn push_row(text: &mut String, cells: &[String]) {
    text.push_str(&cells.join(","));
    text.push('\n');
}

fn num(value: f64) -> String {
    value.to_string()
}

/// Field center of a chain, used as a context column in sweep tables.
fn field_center(chain: &ChainConfig) -> Option<f64> {
    match &chain.field {
        FieldProfile::Uniform { b } => Some(*b),
        FieldProfile::LinearGraded { center, .. } => Some(*center),
        FieldProfile::Explicit { .. } => None,
    }
}

/// One-row table with the scalar currents and solver diagnostics.
pub fn steady_csv(cfg: &FileConfig, record: &RunRecord) -> String {
    let mut text = config_comments(cfg);
    push_row(
        &mut text,
        &[
            "method".into(),
            "spin_current".into(),
            "spin_spread".into(),
            "energy_current".into(),
            "energy_spread".into(),
            "residual".into(),
            "trace_defect".into(),
            "hermiticity_defect".into(),
            "min_eigenvalue".into(),
            "iterations".into(),
        ],
    );
    push_row(
        &mut text,
        &[
            record.method.to_string(),
            num(record.currents.spin_mean),
            num(record.currents.spin_spread),
            num(record.currents.energy_mean),
            num(record.currents.energy_spread),
            num(record.residual),
            num(record.trace_defect),
            num(record.hermiticity_defect),
            num(record.min_eigenvalue),
            record.iterations.to_string(),
        ],
    );
    text
}

/// One-row table with both drive directions and their rectification factors.
pub fn pair_csv(cfg: &FileConfig, record: &RectificationRecord) -> String {
    let mut text = config_comments(cfg);
    push_row(&mut text, &pair_header());
    push_row(&mut text, &pair_cells(record));
    text
}

fn pair_header() -> Vec<String> {
    vec![
        "spin_forward".into(),
        "spin_reverse".into(),
        "spin_rectification".into(),
        "energy_forward".into(),
        "energy_reverse".into(),
        "energy_rectification".into(),
        "residual".into(),
    ]
}

fn pair_cells(record: &RectificationRecord) -> Vec<String> {
    vec![
        num(record.spin_forward),
        num(record.spin_reverse),
        record.spin_rectification.to_string(),
        num(record.energy_forward),
        num(record.energy_reverse),
        record.energy_rectification.to_string(),
        num(record.residual),
    ]
}

/// One row per grid value; failed points keep their row with an error cell.
pub fn sweep_csv(cfg: &FileConfig, spec: &SweepSpec, points: &[SweepPoint]) -> String {
    let context_field = match spec.axis {
        SweepAxis::Field => None,
        _ => field_center(&spec.chain),
    };
    let mut text = config_comments(cfg);

    let mut header = vec![spec.axis.to_string()];
    if context_field.is_some() {
        header.push("B".into());
    }
    header.extend(pair_header());
    header.push("error".into());
    push_row(&mut text, &header);

    for point in points {
        let mut cells = vec![num(point.value)];
        if let Some(b) = context_field {
            cells.push(num(b));
        }
        match (&point.record, &point.error) {
            (Some(record), None) => {
                cells.extend(pair_cells(record));
                cells.push(String::new());
            }
            (_, Some(message)) => {
                cells.extend(std::iter::repeat_n(String::new(), pair_header().len()));
                cells.push(csv_field(message));
            }
            (None, None) => {
                cells.extend(std::iter::repeat_n(String::new(), pair_header().len()));
                cells.push("missing record".into());
            }
        }
        push_row(&mut text, &cells);
    }
    text
}

/// Energy current per drive value; `falling=1` marks rows inside a stretch
/// where the current drops as the drive grows.
pub fn ndr_csv(cfg: &FileConfig, report: &NdrReport) -> String {
    let mut text = config_comments(cfg);
    push_row(&mut text, &["f".into(), "energy_current".into(), "falling".into()]);
    for (index, (&f, &current)) in report.f_grid.iter().zip(&report.energy_current).enumerate() {
        let falling = report.intervals.iter().any(|&(a, b)| a <= index && index <= b);
        push_row(&mut text, &[num(f), num(current), if falling { "1" } else { "0" }.into()]);
    }
    for &(a, b) in &report.intervals {
        text.push_str(&format!("# falling_stretch={a}..{b}\n"));
    }
    text
}
