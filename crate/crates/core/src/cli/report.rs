//! JSON report shapes and their schemas.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::flow::TangentSpace;

/// `(verb, JSON Schema)` for every verb's successful or negative report.
pub const SCHEMAS: &[(&str, &str)] = &[
    ("check", include_str!("../../schemas/check.json")),
    ("certify", include_str!("../../schemas/certify.json")),
    ("classify", include_str!("../../schemas/classify.json")),
    ("term-rank", include_str!("../../schemas/term-rank.json")),
    ("realize", include_str!("../../schemas/realize.json")),
    ("superpattern", include_str!("../../schemas/realize.json")),
    ("bifurcate", include_str!("../../schemas/realize.json")),
    ("liberate", include_str!("../../schemas/realize.json")),
    ("tangent", include_str!("../../schemas/tangent.json")),
];

pub fn schema(verb: &str) -> Option<Value> {
    SCHEMAS.iter().find(|(v, _)| *v == verb).map(|(_, s)| serde_json::from_str(s).expect("schema is valid JSON"))
}

#[derive(Debug, Serialize)]
pub struct TermRankReport {
    pub term_rank: usize,
    pub full: bool,
    /// 1-based (row, column) pairs.
    pub matching: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct TangentReport<'a> {
    pub dimension: usize,
    pub ssvp: bool,
    pub basis: &'a TangentSpace,
}

#[derive(Debug, Serialize)]
pub struct ZeroDistinctReport {
    pub verdict: &'static str,
    pub allows: bool,
}

/// The report for a mathematical verdict carried by an error.
pub fn negative(e: &Error) -> Value {
    let (verdict, reason) = match e {
        Error::Infeasible(r) => ("infeasible", r.clone()),
        Error::SsvpRequired => ("ssvp-required", e.to_string()),
        Error::SsvpWrtRequired => ("ssvp-wrt-required", e.to_string()),
        Error::DegenerateSpectrum => ("degenerate-spectrum", e.to_string()),
        _ => ("error", e.to_string()),
    };
    json!({ "verdict": verdict, "reason": reason })
}

pub fn render(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_schema_parses() {
        for (verb, _) in SCHEMAS {
            assert!(schema(verb).unwrap().is_object());
        }
        assert!(schema("nope").is_none());
    }

    #[test]
    fn negative_reports() {
        let v = negative(&Error::Infeasible("sigma1 == sigma3".into()));
        assert_eq!(v, json!({ "verdict": "infeasible", "reason": "sigma1 == sigma3" }));
        assert_eq!(negative(&Error::SsvpRequired)["verdict"], "ssvp-required");
    }
}
