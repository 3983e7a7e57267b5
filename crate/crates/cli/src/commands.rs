use serde_json::{json, Value};

use ellmod_core::census::MAX_N;
use ellmod_core::curve::discriminant;
use ellmod_core::{
    chow_component, classify as classify_curve, presentation_for, CurvePoint, Field, FieldError, MarkedCurve, Strategy,
};

use crate::output::{census_csv, census_json, OutputRecord};
use crate::{Format, StrategyArg};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CHARACTERISTIC: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;
pub const EXIT_UNSUPPORTED_N: u8 = 5;
pub const EXIT_UNKNOWN_STACK: u8 = 6;

const DEFAULT_PRIMES: [u64; 4] = [5, 7, 11, 13];

pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: Option<String>,
}

impl Outcome {
    fn ok(record: OutputRecord) -> Outcome {
        Outcome {
            code: EXIT_OK,
            stdout: record.to_json(),
            stderr: None,
        }
    }

    fn error(code: u8, command: &str, inputs: Value, name: &str, detail: String) -> Outcome {
        let record = OutputRecord::new(command, inputs, json!({ "error": name, "detail": detail }));
        Outcome {
            code,
            stdout: record.to_json(),
            stderr: Some(format!("{name}: {detail}")),
        }
    }
}

/// Field errors mapped to exit codes and diagnostic names.
fn field_failure(command: &str, inputs: Value, e: FieldError) -> Outcome {
    let (code, name) = match e {
        FieldError::BadCharacteristic(_) => (EXIT_CHARACTERISTIC, "BadCharacteristic"),
        FieldError::NotPrime(_) => (EXIT_PARSE, "NotPrime"),
        FieldError::InfiniteField => (EXIT_PARSE, "InfiniteField"),
        FieldError::Parse(_) | FieldError::NotInvertible(_) => (EXIT_PARSE, "ParseError"),
    };
    Outcome::error(code, command, inputs, name, e.to_string())
}

/// `Q` or a decimal prime.
fn parse_field(text: &str) -> Result<Field, FieldError> {
    let text = text.trim();
    if text == "Q" {
        return Ok(Field::Rationals);
    }
    let p: u64 = text.parse().map_err(|_| FieldError::Parse(text.to_string()))?;
    Field::prime(p)
}

fn parse_prime(text: &str) -> Result<Field, FieldError> {
    match parse_field(text)? {
        Field::Rationals => Err(FieldError::InfiniteField),
        f => Ok(f),
    }
}

fn parse_point(field: Field, s: &str) -> Result<CurvePoint, FieldError> {
    let (x, y) = s.split_once(',').ok_or_else(|| FieldError::Parse(s.to_string()))?;
    Ok(CurvePoint::affine(field.parse_element(x)?, field.parse_element(y)?))
}

pub fn classify(field: &str, a: &str, b: &str) -> Outcome {
    let inputs = json!({ "field": field, "a": a, "b": b });
    let parsed = parse_field(field).and_then(|f| Ok((f.parse_element(a)?, f.parse_element(b)?)));
    let (a, b) = match parsed {
        Ok(v) => v,
        Err(e) => return field_failure("classify", inputs, e),
    };
    let result = json!({
        "class": classify_curve(&a, &b).as_str(),
        "disc": discriminant(&a, &b).to_string(),
    });
    Outcome::ok(OutputRecord::new("classify", inputs, result))
}

pub fn aut(field: &str, a: &str, b: &str, points: &[String]) -> Outcome {
    let inputs = json!({ "field": field, "a": a, "b": b, "points": points });
    // one argument may carry several whitespace-separated pairs
    let points: Vec<&str> = points.iter().flat_map(|p| p.split_whitespace()).collect();
    if let Some(bad) = points.iter().find(|p| **p == "inf") {
        let detail = format!("{bad:?}: p_1 = inf is implicit and cannot be listed");
        return Outcome::error(EXIT_PARSE, "aut", inputs, "ParseError", detail);
    }
    let parsed = parse_field(field).and_then(|f| {
        let a = f.parse_element(a)?;
        let b = f.parse_element(b)?;
        let pts = points
            .iter()
            .map(|s| parse_point(f, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((a, b, pts))
    });
    let (a, b, pts) = match parsed {
        Ok(v) => v,
        Err(e) => return field_failure("aut", inputs, e),
    };
    let marked = match MarkedCurve::new(a, b, pts) {
        Ok(m) => m,
        Err(e) => return Outcome::error(EXIT_VALIDATION, "aut", inputs, e.name(), e.to_string()),
    };
    let aut = marked.automorphisms();
    let result = json!({
        "n": marked.n().to_string(),
        "order": aut.order.to_string(),
        "generator": aut.generator.to_string(),
    });
    Outcome::ok(OutputRecord::new("aut", inputs, result))
}

pub fn census(p: &str, n: &str, format: Format, strategy: StrategyArg, force: bool) -> Outcome {
    let inputs = json!({
        "p": p,
        "n": n,
        "format": match format { Format::Json => "json", Format::Csv => "csv" },
        "strategy": match strategy {
            StrategyArg::Auto => "auto",
            StrategyArg::Full => "full",
            StrategyArg::Stabilizer => "stabilizer",
        },
        "force": force,
    });
    let field = match parse_prime(p) {
        Ok(f) => f,
        Err(e) => return field_failure("census", inputs, e),
    };
    if !force && !DEFAULT_PRIMES.contains(&field.characteristic()) {
        let detail = format!("p = {p} is outside {DEFAULT_PRIMES:?}; pass --force to run anyway");
        return Outcome::error(EXIT_PARSE, "census", inputs, "PrimeNotAllowed", detail);
    }
    let n: usize = match n.trim().parse() {
        Ok(n) => n,
        Err(_) => return Outcome::error(EXIT_PARSE, "census", inputs, "ParseError", format!("bad n {n:?}")),
    };
    if n == 0 || n > MAX_N {
        let detail = format!("n = {n} is outside 1..={MAX_N}");
        return Outcome::error(EXIT_UNSUPPORTED_N, "census", inputs, "UnsupportedN", detail);
    }
    let strategy = match strategy {
        StrategyArg::Auto => Strategy::default_for(field),
        StrategyArg::Full => Strategy::Full,
        StrategyArg::Stabilizer => Strategy::Stabilizer,
    };
    let report = ellmod_core::aut_strata_with(field, n, strategy).expect("arguments validated above");
    match format {
        Format::Json => Outcome::ok(OutputRecord::new("census", inputs, census_json(&report))),
        Format::Csv => Outcome {
            code: EXIT_OK,
            stdout: census_csv(&report),
            stderr: None,
        },
    }
}

pub fn chow(stack: &str, degree: u32) -> Outcome {
    let inputs = json!({ "stack": stack, "degree": degree.to_string() });
    let pres = match presentation_for(stack) {
        Ok(p) => p,
        Err(e) => return Outcome::error(EXIT_UNKNOWN_STACK, "chow", inputs, "UnknownStack", e.to_string()),
    };
    let group = chow_component(&pres, degree);
    let result = json!({
        "stack": pres.name(),
        "presentation": pres.to_string(),
        "component": group.to_string(),
        "free_rank": group.free_rank().to_string(),
        "torsion": group.torsion().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    });
    Outcome::ok(OutputRecord::new("chow", inputs, result))
}

fn orders(set: &std::collections::BTreeSet<u32>) -> Vec<String> {
    set.iter().map(u32::to_string).collect()
}

pub fn verify_appendix(p: &str) -> Outcome {
    let inputs = json!({ "p": p });
    let field = match parse_prime(p) {
        Ok(f) => f,
        Err(e) => return field_failure("verify-appendix", inputs, e),
    };
    let v = ellmod_core::verify_appendix(field).expect("finite field");
    let per_n: Vec<Value> = v
        .per_n
        .values()
        .map(|c| {
            json!({
                "n": c.n.to_string(),
                "expected": orders(&c.expected),
                "realized": orders(&c.realized),
                "pass": c.pass,
            })
        })
        .collect();
    let failures = v.failures();
    let unavailable: Vec<String> = [2u64, 3, 4, 6]
        .into_iter()
        .filter(|&m| !field.has_root_of_unity(m))
        .map(|m| m.to_string())
        .collect();
    let result = json!({
        "p": v.p.to_string(),
        "all_pass": failures.is_empty(),
        "failures": failures,
        "unavailable_roots_of_unity": unavailable,
        "per_n": per_n,
        "collinearity": {
            "members": v.collinearity_members.to_string(),
            "pass": v.collinearity_check,
        },
        "max_n_with_auts": {
            "value": v.max_n_with_auts.to_string(),
            "pass": v.max_n_check,
        },
        "mu4_uniqueness": {
            "members": v.mu4.members.to_string(),
            "rational_classes": v.mu4.rational_classes.to_string(),
            "geometric_classes": v.mu4.geometric_classes.to_string(),
            "expected_geometric_classes": v.mu4.expected_geometric_classes.to_string(),
            "pass": v.mu4.pass,
        },
        "no_mu6": v.no_mu6_check,
        "fixed_point_bounds": v.fixed_point_check,
    });
    let record = OutputRecord::new("verify-appendix", inputs, result);
    if failures.is_empty() {
        Outcome::ok(record)
    } else {
        let msg = format!("failed claims: {}", failures.join(", "));
        Outcome {
            code: EXIT_FAILED,
            stdout: record.to_json(),
            stderr: Some(msg),
        }
    }
}
