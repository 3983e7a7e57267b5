//! Machine-readable records. Every record has the top-level keys `command`,
//! `inputs`, `result` and `version`; every number is written as a string.

use serde::Serialize;
use serde_json::{json, Value};

use ellmod_core::{CensusReport, CurvePoint, MarkedCurve};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    pub version: &'static str,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Value, result: Value) -> OutputRecord {
        OutputRecord {
            command: command.to_string(),
            inputs,
            result,
            version: VERSION,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }
}

/// Affine points of a marked curve (p_1 = inf omitted) as `x,y` strings.
pub fn affine_points(m: &MarkedCurve) -> Vec<String> {
    m.points()
        .iter()
        .filter(|p| !p.is_infinity())
        .map(CurvePoint::to_string)
        .collect()
}

pub fn witness_json(m: &MarkedCurve) -> Value {
    json!({
        "a": m.curve().a().to_string(),
        "b": m.curve().b().to_string(),
        "points": affine_points(m),
    })
}

pub fn census_json(r: &CensusReport) -> Value {
    let strata: Vec<Value> = r
        .strata
        .iter()
        .map(|(order, count)| {
            json!({
                "aut_order": order.to_string(),
                "count": count.to_string(),
                "witness": witness_json(&r.witnesses[order]),
            })
        })
        .collect();
    json!({
        "p": r.p.to_string(),
        "n": r.n.to_string(),
        "strategy": r.strategy.as_str(),
        "total": r.total.to_string(),
        "iso_classes": r.iso_classes.to_string(),
        "strata": strata,
    })
}

pub fn census_csv(r: &CensusReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["aut_order", "count", "witness_a", "witness_b", "witness_points"])
        .expect("in-memory write");
    for (order, count) in &r.strata {
        let wit = &r.witnesses[order];
        w.write_record([
            order.to_string(),
            count.to_string(),
            wit.curve().a().to_string(),
            wit.curve().b().to_string(),
            affine_points(wit).join(" "),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
