//! JSON export. Exact numbers are strings: exponents as `num/den`,
//! coefficients in the text form accepted by the parser. Floats are strings
//! too, in Rust's shortest round-trip notation. Object keys are sorted.

use serde_json::{json, Map, Value};

use crate::field::rational::{parse_rational, Rational};
use crate::field::{Coefficient, KScalar};
use crate::gevrey::GevreyReport;
use crate::parser::{parse_scalar, ParseError, Pos};
use crate::qdiff::{PuiseuxSeries, QDiffPolynomial};
use crate::solver::{ExponentGrid, PivotData, SolutionBranch, SolveOutcome};

fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn float(x: f64) -> Value {
    Value::String(x.to_string())
}

pub fn series_json<C: Coefficient>(s: &PuiseuxSeries<C>) -> Value {
    json!({
        "terms": s.terms().iter().map(|(e, c)| json!([e.to_string(), c.to_string()])).collect::<Vec<_>>(),
        "trunc": s.trunc().map_or(Value::Null, rat),
        "text": s.to_string(),
    })
}

pub fn polynomial_json<C: Coefficient>(p: &QDiffPolynomial<C>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(k, c)| {
            json!({
                "alpha": rat(&k.xexp),
                "multi_index": k.mi.entries().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "coeff": c.to_string(),
            })
        })
        .collect();
    json!({ "terms": terms, "text": p.to_string() })
}

fn pivot_json<C: Coefficient>(p: &PivotData<C>) -> Value {
    json!({
        "alpha": rat(&p.alpha),
        "divisor": p.divisor.to_string(),
        "ramification": p.ramification.to_string(),
    })
}

fn grid_json(g: &ExponentGrid) -> Value {
    json!({
        "head": g.head.iter().map(rat).collect::<Vec<_>>(),
        "start": rat(&g.start),
        "step": rat(&g.step),
        "verified": g.verified,
    })
}

pub fn branch_json<C: Coefficient>(b: &SolutionBranch<C>) -> Value {
    let choices: Vec<Value> = b
        .choice_log
        .iter()
        .map(|c| {
            json!({
                "mu": rat(&c.mu),
                "root": c.root.to_string(),
                "multiplicity": c.multiplicity.to_string(),
            })
        })
        .collect();
    json!({
        "series": series_json(&b.series),
        "status": b.status.to_string(),
        "choice_log": choices,
        "pivot": b.pivot.as_ref().map_or(Value::Null, pivot_json),
        "exponent_grid": b.exponent_grid().as_ref().map_or(Value::Null, grid_json),
        "ramification": b.ramification.to_string(),
        "residual_valuation": b.residual_valuation.to_string(),
        "notes": b.notes,
    })
}

/// Full `solve` result. `q` is the numeric value used, if any.
pub fn outcome_json<C: Coefficient>(
    equation: &QDiffPolynomial<KScalar>,
    outcome: &SolveOutcome<C>,
    trunc: &Rational,
    q: Option<&str>,
) -> Value {
    json!({
        "equation": equation.to_string(),
        "mode": if q.is_some() { "numeric" } else { "exact" },
        "q": q.map_or(Value::Null, |s| Value::String(s.into())),
        "trunc": rat(trunc),
        "branches": outcome.branches.iter().map(branch_json).collect::<Vec<_>>(),
        "diagnostics": outcome.diagnostics,
        "budget_exceeded": outcome.budget_exceeded,
    })
}

pub fn gevrey_json(r: &GevreyReport) -> Value {
    json!({
        "s_emp": float(r.s_emp),
        "s_pointwise": float(r.s_pointwise),
        "fit_window": [r.fit_window.0.to_string(), r.fit_window.1.to_string()],
        "per_m": r.per_m.iter().map(|(m, l)| json!([m.to_string(), float(*l)])).collect::<Vec<_>>(),
        "s_bound": rat(&r.s_bound),
        "dominated": r.dominated,
    })
}

fn bad(msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos: Pos { line: 1, col: 1 },
        msg: msg.into(),
    }
}

/// Reads a series written by [`series_json`] (the `text` field is ignored).
pub fn series_from_json(v: &Value) -> Result<PuiseuxSeries<KScalar>, ParseError> {
    let obj: &Map<String, Value> = v
        .as_object()
        .ok_or_else(|| bad("series must be an object"))?;
    let terms = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("series needs a \"terms\" array"))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let pair = t
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| bad("each term must be [exponent, coefficient]"))?;
        let (Some(e), Some(c)) = (pair[0].as_str(), pair[1].as_str()) else {
            return Err(bad("exponent and coefficient must be strings"));
        };
        let e = parse_rational(e).ok_or_else(|| bad(format!("bad exponent {e:?}")))?;
        out.push((e, parse_scalar(c)?));
    }
    let trunc = match obj.get("trunc") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => {
            Some(parse_rational(s).ok_or_else(|| bad(format!("bad trunc {s:?}")))?)
        }
        Some(_) => return Err(bad("trunc must be a string or null")),
    };
    Ok(PuiseuxSeries::new(out, trunc))
}

/// Series found in a JSON document: a bare series, a branch, or a whole
/// `solve` result (all branches).
pub fn series_list_from_json(v: &Value) -> Result<Vec<PuiseuxSeries<KScalar>>, ParseError> {
    if let Some(branches) = v.get("branches").and_then(Value::as_array) {
        return branches
            .iter()
            .map(|b| series_from_json(b.get("series").unwrap_or(b)))
            .collect();
    }
    if let Some(s) = v.get("series") {
        return Ok(vec![series_from_json(s)?]);
    }
    Ok(vec![series_from_json(v)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rational::int;
    use crate::parser::parse_polynomial;
    use crate::solver::{solve_exact, SolverConfig};

    #[test]
    fn series_round_trip() {
        let p = parse_polynomial("y*y(q*x) - x").unwrap();
        let out = solve_exact(&p, &SolverConfig::new(int(4))).unwrap();
        let v = outcome_json(&p, &out, &int(4), None);
        let back = series_list_from_json(&v).unwrap();
        let orig: Vec<_> = out.branches.iter().map(|b| b.series.clone()).collect();
        assert_eq!(back, orig);
        let text = serde_json::to_string_pretty(&v).unwrap();
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&again).unwrap(), text);
    }

    #[test]
    fn numbers_are_strings() {
        let p = parse_polynomial("y(q*x) - y - x").unwrap();
        let out = solve_exact(&p, &SolverConfig::new(int(3))).unwrap();
        let v = outcome_json(&p, &out, &int(3), None);
        let b = &v["branches"][0];
        assert_eq!(b["series"]["terms"][0], json!(["1", "1/(q - 1)"]));
        assert_eq!(b["residual_valuation"], json!("inf"));
        assert_eq!(b["exponent_grid"]["step"], json!("1"));
    }
}
