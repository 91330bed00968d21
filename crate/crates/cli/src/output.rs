//! JSON and text forms of results.

use pva_core::lambda::{BracketMatrix, Condition, JacobiResidual};
use pva_core::liealg::MatElem;
use pva_core::text::{formal_text, lambda_to_text, monomial_text, parse_lambda, poly_to_text};
use pva_core::{Algebra, Formal, LambdaExpr};
use serde_json::{json, Value};

use crate::error::{At, CliError, Result};

/// `{"generators": [...], "matrix": [[text]]}`.
pub fn matrix_json(alg: &Algebra, formal: &Formal, h: &BracketMatrix) -> Value {
    let n = h.size();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| lambda_to_text(alg, formal, h.entry(i, j)))
                .collect()
        })
        .collect();
    let gens: Vec<&str> = alg.gen_names().iter().map(|s| &**s).collect();
    json!({ "generators": gens, "matrix": rows })
}

/// Inverse of [`matrix_json`]; the generator names must match `alg`.
pub fn matrix_from_json(alg: &Algebra, formal: &Formal, v: &Value) -> Result<BracketMatrix> {
    let bad = |m: &str| CliError::config(format!("bracket matrix JSON: {m}"));
    let gens = v["generators"]
        .as_array()
        .ok_or_else(|| bad("no `generators`"))?;
    let names: Vec<&str> = gens.iter().filter_map(Value::as_str).collect();
    let mine: Vec<&str> = alg.gen_names().iter().map(|s| &**s).collect();
    if names != mine {
        return Err(bad("generator names differ from the algebra"));
    }
    let rows = v["matrix"].as_array().ok_or_else(|| bad("no `matrix`"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad("row is not an array"))?;
        let mut parsed = Vec::with_capacity(row.len());
        for (j, e) in row.iter().enumerate() {
            let s = e.as_str().ok_or_else(|| bad("entry is not a string"))?;
            parsed.push(parse_lambda(alg, formal, s).at(format!(
                "matrix row {}, column {}",
                i + 1,
                j + 1
            ))?);
        }
        out.push(parsed);
    }
    Ok(BracketMatrix::from_rows(out)?)
}

pub fn mat_json(m: &MatElem) -> Value {
    let n = m.dim();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).to_text()).collect())
        .collect();
    json!(rows)
}

fn condition_json(alg: &Algebra, formal: &Formal, indices: &[usize], c: &Condition) -> Value {
    json!({
        "indices": indices.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "lambda": or_one(formal_text(formal, &c.lambda)),
        "monomial": or_one(monomial_text(alg, &c.monomial)),
        "coefficient": poly_to_text(alg, &c.coefficient),
    })
}

fn or_one(s: String) -> String {
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn condition_line(alg: &Algebra, formal: &Formal, indices: &[usize], c: &Condition) -> String {
    let idx: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    let parts: Vec<String> = [
        formal_text(formal, &c.lambda),
        monomial_text(alg, &c.monomial),
    ]
    .into_iter()
    .filter(|s| !s.is_empty())
    .collect();
    format!(
        "  [{}] coefficient of {}: {} = 0",
        idx.join(", "),
        or_one(parts.join("*")),
        poly_to_text(alg, &c.coefficient)
    )
}

/// Conditions of every nonzero entry, as JSON and as text lines.
pub struct ConditionList {
    pub json: Vec<Value>,
    pub lines: Vec<String>,
}

impl ConditionList {
    fn push(&mut self, alg: &Algebra, formal: &Formal, indices: &[usize], e: &LambdaExpr) {
        for c in e.conditions() {
            self.json.push(condition_json(alg, formal, indices, &c));
            self.lines.push(condition_line(alg, formal, indices, &c));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.json.is_empty()
    }
}

pub fn skew_conditions(alg: &Algebra, formal: &Formal, r: &BracketMatrix) -> ConditionList {
    let mut out = ConditionList {
        json: Vec::new(),
        lines: Vec::new(),
    };
    for (i, j, e) in r.entries() {
        out.push(alg, formal, &[i, j], e);
    }
    out
}

pub fn jacobi_conditions(alg: &Algebra, formal: &Formal, r: &JacobiResidual) -> ConditionList {
    let mut out = ConditionList {
        json: Vec::new(),
        lines: Vec::new(),
    };
    for ((i, j, k), e) in r.entries() {
        out.push(alg, formal, &[i, j, k], e);
    }
    out
}

/// Text rendering of a matrix, one entry per line.
pub fn matrix_lines(alg: &Algebra, formal: &Formal, h: &BracketMatrix) -> Vec<String> {
    let lam = formal
        .families()
        .first()
        .map(|s| s.to_string())
        .unwrap_or_default();
    h.entries()
        .map(|(i, j, e)| {
            format!(
                "{{{} {lam} {}}} = {}",
                alg.gen_name(i),
                alg.gen_name(j),
                lambda_to_text(alg, formal, e)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_json_round_trips() {
        let alg = Algebra::new(&["u1", "u2"], 1, &["c"]).unwrap();
        let formal = Formal::standard(1);
        let rows = [
            ["2*u1*lambda + u1' + c*lambda^3", "lambda"],
            ["lambda", "0"],
        ];
        let h = BracketMatrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|s| parse_lambda(&alg, &formal, s).unwrap())
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        let v = matrix_json(&alg, &formal, &h);
        let back = matrix_from_json(&alg, &formal, &v).unwrap();
        assert_eq!(back, h);
        assert_eq!(matrix_json(&alg, &formal, &back), v);
    }
}
