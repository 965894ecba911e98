//! One-shot calculators: Möbius transforms, distances and series operations.

use serde::Deserialize;
use serde_json::{json, Value};
use sliceball::hardy::delta;
use sliceball::mobius::{
    classical_apply, matrix_to_canonical, regular_apply, regular_apply_matrix, RegularMobius, SpOneOneMatrix,
    SP11_TOLERANCE,
};
use sliceball::{Quaternion, RegularPowerSeries};

use crate::CliError;

/// A transformation given either as a canonical pair or as a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TransformSpec {
    Canonical { a: Quaternion, u: Quaternion },
    Matrix { a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion },
}

impl TransformSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| {
            CliError::Usage(format!(
                "expected {{\"a\": [..], \"u\": [..]}} or {{\"a\", \"b\", \"c\", \"d\"}} with 4-arrays, got {s:?}: {e}"
            ))
        })
    }
}

/// Applies a transformation to `q`. Matrices act by the regular action
/// unless `classical` is set; canonical pairs always act regularly.
pub fn transform(spec: &TransformSpec, q: Quaternion, classical: bool) -> Result<Value, CliError> {
    match *spec {
        TransformSpec::Canonical { a, u } => {
            if classical {
                return Err(CliError::Usage("--classical needs a matrix, not a canonical pair".into()));
            }
            let m = RegularMobius::new(a, u)?;
            let w = regular_apply(&m, q)?;
            Ok(json!({ "action": "regular", "canonical": { "a": a, "u": u }, "q": q, "result": w }))
        }
        TransformSpec::Matrix { a, b, c, d } => {
            let m = SpOneOneMatrix::new_unchecked(a, b, c, d).validated(SP11_TOLERANCE)?;
            let matrix = json!({ "a": a, "b": b, "c": c, "d": d });
            if classical {
                let w = classical_apply(&m, q)?;
                Ok(json!({ "action": "classical", "matrix": matrix, "q": q, "result": w }))
            } else {
                let w = regular_apply_matrix(&m, q)?;
                let canon = matrix_to_canonical(&m)?;
                Ok(json!({
                    "action": "regular",
                    "matrix": matrix,
                    "canonical": { "a": canon.a, "u": canon.u },
                    "q": q,
                    "result": w,
                }))
            }
        }
    }
}

/// `{"p", "q", "delta", "N_used", "tail_bound"}`.
pub fn distance(p: Quaternion, q: Quaternion, tol: f64) -> Result<Value, CliError> {
    let d = delta(p, q, tol)?;
    let mut v = serde_json::to_value(d).expect("Delta serializes");
    v["p"] = json!(p);
    v["q"] = json!(q);
    Ok(v)
}

pub fn parse_series(s: &str) -> Result<RegularPowerSeries, CliError> {
    let coeffs: Vec<Quaternion> = serde_json::from_str(s)
        .map_err(|e| CliError::Usage(format!("expected a list of 4-arrays [[w,x,y,z], ...], got {s:?}: {e}")))?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Usage(format!("series {s:?} has non-finite coefficients")));
    }
    Ok(RegularPowerSeries::new(coeffs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    StarMul,
    Conjugate,
    Symmetrize,
    Reciprocal,
    Eval,
}

impl std::str::FromStr for SeriesOp {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "star_mul" | "star-mul" => Ok(SeriesOp::StarMul),
            "conjugate" => Ok(SeriesOp::Conjugate),
            "symmetrize" => Ok(SeriesOp::Symmetrize),
            "reciprocal" => Ok(SeriesOp::Reciprocal),
            "eval" => Ok(SeriesOp::Eval),
            _ => Err(CliError::Usage(format!(
                "unknown series operation {s:?}; expected star_mul, conjugate, symmetrize, reciprocal or eval"
            ))),
        }
    }
}

pub fn series(
    op: SeriesOp,
    f: &RegularPowerSeries,
    g: Option<&RegularPowerSeries>,
    q: Option<Quaternion>,
    truncation: usize,
) -> Result<Value, CliError> {
    let result = match op {
        SeriesOp::StarMul => {
            let g = g.ok_or_else(|| CliError::Usage("star_mul needs --g".into()))?;
            json!(f.star_mul(g).coeffs())
        }
        SeriesOp::Conjugate => json!(f.regular_conjugate().coeffs()),
        SeriesOp::Symmetrize => json!(f.symmetrize().coeffs()),
        SeriesOp::Reciprocal => json!(f.reciprocal_series(truncation)?.coeffs()),
        SeriesOp::Eval => {
            let q = q.ok_or_else(|| CliError::Usage("eval needs --q".into()))?;
            json!(f.eval(q)?)
        }
    };
    let mut v = json!({ "op": format!("{op:?}"), "f": f.coeffs(), "result": result });
    if let Some(g) = g {
        v["g"] = json!(g.coeffs());
    }
    if let Some(q) = q {
        v["q"] = json!(q);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sliceball::Quaternion as Q;

    #[test]
    fn canonical_transform_sends_a_to_zero() {
        let spec = TransformSpec::parse(r#"{"a": [0, 0.5, 0, 0], "u": [1, 0, 0, 0]}"#).unwrap();
        let v = transform(&spec, Q::new(0.0, 0.5, 0.0, 0.0), false).unwrap();
        let w: Q = serde_json::from_value(v["result"].clone()).unwrap();
        assert!(w.norm() < 1e-15);
    }

    #[test]
    fn invalid_matrix_names_relation() {
        let spec = TransformSpec::parse(r#"{"a": [2,0,0,0], "b": [0,0,0,0], "c": [0,0,0,0], "d": [1,0,0,0]}"#).unwrap();
        let err = transform(&spec, Q::ZERO, false).unwrap_err().to_string();
        assert!(err.contains("|a|^2 - |b|^2 = 1"), "{err}");
    }

    #[test]
    fn identity_matrix_classical_and_regular() {
        let spec = TransformSpec::parse(r#"{"a": [1,0,0,0], "b": [0,0,0,0], "c": [0,0,0,0], "d": [1,0,0,0]}"#).unwrap();
        let q = Q::new(0.1, 0.2, -0.3, 0.4);
        for classical in [false, true] {
            let w: Q = serde_json::from_value(transform(&spec, q, classical).unwrap()["result"].clone()).unwrap();
            assert!(w.max_abs_diff(q) < 1e-15);
        }
    }

    #[test]
    fn distance_from_origin() {
        let v = distance(Q::ZERO, Q::new(0.0, 0.3, 0.4, 0.0), 1e-10).unwrap();
        assert!((v["delta"].as_f64().unwrap() - 0.5).abs() < 1e-15);
        assert!(v.get("N_used").is_some() && v.get("tail_bound").is_some());
    }

    #[test]
    fn star_square_of_qi() {
        let f = parse_series("[[0,0,0,0],[0,1,0,0]]").unwrap();
        let v = series(SeriesOp::StarMul, &f, Some(&f), None, 64).unwrap();
        let coeffs: Vec<Q> = serde_json::from_value(v["result"].clone()).unwrap();
        assert_eq!(coeffs, vec![Q::ZERO, Q::ZERO, Q::real(-1.0)]);
    }

    #[test]
    fn series_ops_need_their_arguments() {
        let f = parse_series("[[1,0,0,0]]").unwrap();
        assert!(series(SeriesOp::StarMul, &f, None, None, 64).is_err());
        assert!(series(SeriesOp::Eval, &f, None, None, 64).is_err());
        assert!(parse_series("[1,2]").is_err());
    }
}
