//! JSON and CSV serialization of curvature reports.
//!
//! JSON field order is fixed:
//! `alpha, m, [samples, seed, K_override], vertices, summary, [violations]`
//! with each vertex as `label, phi, C, K_theorem, K_optimal, cd_holds,
//! C_ge_one`. The bracketed fields appear only in `verify` reports. Reals
//! carry 12 significant digits; infinities are written as `"inf"` / `"-inf"`.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::curvature::{CurvatureReport, ViolationSource};
use crate::error::{Error, Result};

/// Rounds to 12 significant digits; −0 becomes 0.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// Textual form shared by JSON and CSV output.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        serde_json::to_string(&round_significant(x)).unwrap_or_else(|_| x.to_string())
    }
}

#[derive(Clone, Copy, Debug)]
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(round_significant(self.0))
        } else {
            s.serialize_str(&format_real(self.0))
        }
    }
}

#[derive(Serialize)]
struct JsonVertex<'a> {
    label: &'a str,
    phi: Real,
    #[serde(rename = "C")]
    c: Real,
    #[serde(rename = "K_theorem")]
    k_theorem: Real,
    #[serde(rename = "K_optimal")]
    k_optimal: Real,
    cd_holds: bool,
    #[serde(rename = "C_ge_one")]
    c_ge_one: bool,
}

#[derive(Serialize)]
struct JsonSummary {
    #[serde(rename = "min_K_theorem")]
    min_k_theorem: Real,
    #[serde(rename = "min_K_optimal")]
    min_k_optimal: Real,
    all_cd_hold: bool,
}

#[derive(Serialize)]
struct JsonViolation<'a> {
    vertex: &'a str,
    source: &'static str,
    residual: Real,
    f: Vec<Real>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    alpha: Real,
    m: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(rename = "K_override", skip_serializing_if = "Option::is_none")]
    k_override: Option<Option<Real>>,
    vertices: Vec<JsonVertex<'a>>,
    summary: JsonSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    violations: Option<Vec<JsonViolation<'a>>>,
}

/// Which command the report is for; `Verify` adds the run parameters and
/// the violation list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportKind {
    Analyze,
    Verify,
}

fn source_name(s: ViolationSource) -> &'static str {
    match s {
        ViolationSource::Pencil => "pencil",
        ViolationSource::Sampled => "sampled",
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json(report: &CurvatureReport, kind: ReportKind) -> String {
    let verify = kind == ReportKind::Verify;
    let json = JsonReport {
        alpha: Real(report.alpha),
        m: Real(report.m.value()),
        samples: verify.then_some(report.options.samples),
        seed: verify.then_some(report.options.seed),
        k_override: verify.then_some(report.options.k_override.map(Real)),
        vertices: report
            .vertices
            .iter()
            .map(|v| JsonVertex {
                label: &v.label,
                phi: Real(v.phi),
                c: Real(v.c),
                k_theorem: Real(v.k_theorem),
                k_optimal: Real(v.k_optimal),
                cd_holds: v.cd_holds,
                c_ge_one: v.c_at_least_one(),
            })
            .collect(),
        summary: JsonSummary {
            min_k_theorem: Real(report.min_k_theorem()),
            min_k_optimal: Real(report.min_k_optimal()),
            all_cd_hold: report.all_cd_hold(),
        },
        violations: verify.then(|| {
            report
                .violations()
                .map(|v| JsonViolation {
                    vertex: &report.vertices[v.vertex].label,
                    source: source_name(v.source),
                    residual: Real(v.residual),
                    f: v.f.iter().copied().map(Real).collect(),
                })
                .collect()
        }),
    };
    let mut out = serde_json::to_string_pretty(&json).expect("report serialization cannot fail");
    out.push('\n');
    out
}

/// One row per vertex: `label,phi,C,K_theorem,K_optimal,cd_holds,C_ge_one`.
pub fn write_csv<W: Write>(report: &CurvatureReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(["label", "phi", "C", "K_theorem", "K_optimal", "cd_holds", "C_ge_one"])
        .map_err(io)?;
    for v in &report.vertices {
        w.write_record([
            v.label.clone(),
            format_real(v.phi),
            format_real(v.c),
            format_real(v.k_theorem),
            format_real(v.k_optimal),
            v.cd_holds.to_string(),
            v.c_at_least_one().to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(report: &CurvatureReport) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}
