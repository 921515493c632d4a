//! Line-oriented reports.
//!
//! ```text
//! # command: nodal
//! # version: 0.1.0
//! n lambda nu ell generic lower_ok upper_ok flags
//! 1 -2.000000000000e0 1 0 true true true -
//! # violations: 0
//! ```
//!
//! Header and summary lines are `# key: value`; rows are space separated
//! with `-` for an empty cell. Reals use `{:.12e}`.

use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::discrete::NodalReport;
use crate::verify::{EnsembleReport, VerificationRecord};
use crate::Tolerances;

pub const NODAL_COLUMNS: [&str; 8] = ["n", "lambda", "nu", "ell", "generic", "lower_ok", "upper_ok", "flags"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
}

pub fn fmt_real(x: f64) -> String {
    format!("{x:.12e}")
}

fn cell<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            header: vec![
                ("command".into(), command.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn with_header(mut self, key: &str, value: impl ToString) -> Self {
        self.header.push((key.into(), value.to_string()));
        self
    }

    pub fn with_tolerances(self, tol: &Tolerances) -> Self {
        self.with_header("gap_rel", format!("{:e}", tol.gap_rel))
            .with_header("vanish_rel", format!("{:e}", tol.vanish_rel))
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_summary(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.header {
            writeln!(s, "# {k}: {v}").unwrap();
        }
        writeln!(s, "{}", self.columns.join(" ")).unwrap();
        for row in &self.rows {
            let cells: Vec<&str> = row.iter().map(|c| if c.is_empty() { "-" } else { c.as_str() }).collect();
            writeln!(s, "{}", cells.join(" ")).unwrap();
        }
        for (k, v) in &self.summary {
            writeln!(s, "# {k}: {v}").unwrap();
        }
        s
    }

    /// `{"header": {...}, "rows": [{column: cell}], "summary": {...}}`;
    /// cells that parse as numbers or booleans are emitted as such.
    pub fn to_json(&self) -> String {
        let kv = |pairs: &[(String, String)]| {
            Value::Object(pairs.iter().map(|(k, v)| (k.clone(), typed(v))).collect::<Map<_, _>>())
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), typed(v)))
                        .collect::<Map<_, _>>(),
                )
            })
            .collect();
        let doc = json!({
            "header": kv(&self.header),
            "columns": self.columns,
            "rows": rows,
            "summary": kv(&self.summary),
        });
        serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
    }
}

fn typed(v: &str) -> Value {
    match v {
        "-" | "" => Value::Null,
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => {
            if let Ok(i) = v.parse::<i64>() {
                Value::from(i)
            } else if let Some(x) = v.parse::<f64>().ok().filter(|x| x.is_finite()) {
                Value::from(x)
            } else {
                Value::String(v.to_string())
            }
        }
    }
}

/// Flags of a non-generic pair.
pub fn genericity_flags(simple: bool, nonvanishing: bool) -> String {
    let mut f = Vec::new();
    if !simple {
        f.push("degenerate");
    }
    if !nonvanishing {
        f.push("vanishing");
    }
    if f.is_empty() {
        "-".into()
    } else {
        f.join(",")
    }
}

/// One row in [`NODAL_COLUMNS`]; verdicts are empty for non-generic pairs.
pub fn nodal_row(r: &NodalReport) -> Vec<String> {
    let verdict = |ok: bool| cell(r.generic.then_some(ok));
    vec![
        r.n.to_string(),
        fmt_real(r.lambda),
        r.nu.to_string(),
        r.ell.to_string(),
        r.generic.to_string(),
        verdict(r.lower_ok),
        verdict(r.upper_ok),
        genericity_flags(r.simple, r.nonvanishing),
    ]
}

pub const ENSEMBLE_COLUMNS: [&str; 10] = [
    "instance", "n", "lambda", "nu", "ell", "multiplicity", "generic", "lower_ok", "upper_ok", "m",
];

pub fn ensemble_row(r: &VerificationRecord) -> Vec<String> {
    let verdict = |ok: bool| cell(r.generic.then_some(ok));
    vec![
        r.instance.to_string(),
        r.n.to_string(),
        fmt_real(r.lambda),
        r.nu.to_string(),
        r.ell.to_string(),
        r.multiplicity.to_string(),
        r.generic.to_string(),
        verdict(r.lower_ok),
        verdict(r.upper_ok),
        cell(r.m),
    ]
}

/// Records plus a summary block; identical reports for identical configs.
pub fn ensemble_report(rep: &EnsembleReport) -> Report {
    let cfg = &rep.config;
    let model = match cfg.model {
        crate::verify::Model::Discrete => "discrete",
        crate::verify::Model::Metric => "metric",
    };
    let mut out = Report::new("ensemble", &ENSEMBLE_COLUMNS)
        .with_header("model", model)
        .with_header("seed", cfg.seed)
        .with_header("instances", cfg.instance_count)
        .with_tolerances(&cfg.tolerances);
    for r in &rep.records {
        out.push_row(ensemble_row(r));
    }
    for s in &rep.instances {
        if let Some(e) = &s.error {
            out.push_summary(&format!("instance {} failed", s.instance), e);
        }
    }
    let s = &rep.summary;
    out.push_summary("instances", s.instances);
    out.push_summary("failed_instances", s.failed_instances);
    out.push_summary("pairs", s.pairs);
    out.push_summary("generic_pairs", s.generic_pairs);
    out.push_summary("non_generic_rate", fmt_real(s.non_generic_rate));
    out.push_summary("tree_mismatches", s.tree_mismatches);
    out.push_summary("weyl_failures", s.weyl_failures);
    out.push_summary("cut_failures", s.cut_failures);
    out.push_summary("courant_degenerate_exceed", s.courant_degenerate_exceed);
    out.push_summary("violations", s.violations);
    out
}
