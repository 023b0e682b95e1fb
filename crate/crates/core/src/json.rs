//! JSON encodings of the public types.
//!
//! All numbers are exact: integers widen to decimal strings past the i64
//! range, rationals ride as [numerator, denominator] pairs, p-adic digits as
//! little-endian arrays. Object keys serialize in a stable (alphabetical)
//! order, lists in a deterministic sorted order, so byte-identical reruns
//! are byte-identical outputs.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::algebraic::{AlgebraicNumber, WeilCheckResult};
use crate::finiteness::{
    ExceptionalSet, StructureReport, SymbolicEquation, UnityCondition, VerdictConditions,
    VerdictReport, WeilCondition,
};
use crate::lubin_tate::{FormalGroupLaw, TorsionLayerReport};
use crate::padic::{LocalFieldModel, PadicError, PadicNumber};
use crate::poly::QPoly;
use crate::series::{Series1, Series2, SeriesError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum JsonError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn err(msg: impl Into<String>) -> JsonError {
    JsonError::Malformed(msg.into())
}

// ---------------------------------------------------------------------------
// numbers
// ---------------------------------------------------------------------------

pub fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt, JsonError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| err("non-integer number")),
        Value::String(s) => s.parse().map_err(|_| err(format!("bad integer '{s}'"))),
        _ => Err(err("expected an integer")),
    }
}

pub fn rational_to_json(r: &BigRational) -> Value {
    if r.denom().is_one() {
        bigint_to_json(r.numer())
    } else {
        json!([bigint_to_json(r.numer()), bigint_to_json(r.denom())])
    }
}

pub fn rational_from_json(v: &Value) -> Result<BigRational, JsonError> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let n = bigint_from_json(&a[0])?;
            let d = bigint_from_json(&a[1])?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        _ => Ok(BigRational::from_integer(bigint_from_json(v)?)),
    }
}

pub fn rat64_to_json(r: &Rational64) -> Value {
    json!([*r.numer(), *r.denom()])
}

// ---------------------------------------------------------------------------
// polynomials
// ---------------------------------------------------------------------------

/// Ascending coefficient array; integers stay bare, true rationals are pairs.
pub fn qpoly_to_json(p: &QPoly) -> Value {
    Value::Array(p.coeffs.iter().map(rational_to_json).collect())
}

pub fn qpoly_from_json(v: &Value) -> Result<QPoly, JsonError> {
    let arr = v.as_array().ok_or_else(|| err("expected coefficient array"))?;
    let coeffs = arr
        .iter()
        .map(rational_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QPoly::from_coeffs(coeffs))
}

// ---------------------------------------------------------------------------
// fields and elements
// ---------------------------------------------------------------------------

pub fn field_to_json(k: &LocalFieldModel) -> Value {
    json!({
        "p": k.p(),
        "u_poly": k.u_poly().iter().map(bigint_to_json).collect::<Vec<_>>(),
        "e_poly": k
            .e_poly()
            .iter()
            .map(|c| c.iter().map(bigint_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "name": k.name(),
    })
}

pub fn field_from_json(v: &Value) -> Result<LocalFieldModel, JsonError> {
    let obj = v.as_object().ok_or_else(|| err("expected a field object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "p" | "u_poly" | "e_poly" | "name") {
            return Err(err(format!("unknown field key '{key}'")));
        }
    }
    let p = obj
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing prime p"))?;
    let u_poly = match obj.get("u_poly") {
        None => vec![BigInt::from(-1), BigInt::from(1)],
        Some(Value::Array(a)) => a
            .iter()
            .map(bigint_from_json)
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(err("u_poly must be an integer array")),
    };
    let e_val = obj.get("e_poly").ok_or_else(|| err("missing e_poly"))?;
    let e_arr = e_val.as_array().ok_or_else(|| err("e_poly must be an array"))?;
    // accept a flat integer array as sugar for constant y-polys
    let e_poly: Vec<Vec<BigInt>> = if e_arr.iter().all(|x| !x.is_array()) {
        e_arr
            .iter()
            .map(|x| bigint_from_json(x).map(|n| vec![n]))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        e_arr
            .iter()
            .map(|x| {
                x.as_array()
                    .ok_or_else(|| err("e_poly entries must be arrays"))?
                    .iter()
                    .map(bigint_from_json)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .map(String::from)
        .unwrap_or_else(|| format!("Q_{p}-extension"));
    Ok(crate::padic::make_field(p, &u_poly, &e_poly, &name)?)
}

fn prec_to_json(p: Rational64) -> Value {
    if p.is_integer() {
        json!(p.to_integer())
    } else {
        rat64_to_json(&p)
    }
}

pub fn element_to_json(a: &PadicNumber) -> Value {
    match a.exact_coords() {
        Some(coords) => {
            let grid: Vec<Value> = coords
                .iter()
                .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
                .collect();
            // base-field sugar: single rational
            let coeffs = if coords.len() == 1 && coords[0].len() == 1 {
                rational_to_json(&coords[0][0])
            } else {
                Value::Array(grid)
            };
            json!({"mode": "exact", "coeffs": coeffs, "abs_prec": "inf"})
        }
        None => {
            let field = a.field();
            let p = BigInt::from(field.p());
            let lift = a.to_exact_lift();
            let coords = lift.exact_coords().unwrap();
            let prec = a.abs_prec().unwrap();
            let shift_opt = coords
                .iter()
                .flatten()
                .filter(|c| !c.is_zero())
                .map(|c| crate::arith::rat_valuation(c, &p).unwrap())
                .min()
                .unwrap_or(0)
                .min(0);
            let scale = num_traits::Pow::pow(
                BigRational::from_integer(p.clone()),
                (-shift_opt) as u64,
            );
            let digit_count =
                (prec.ceil().to_integer() - shift_opt).max(1) as u32;
            let digits_of = |c: &BigRational| -> Value {
                let scaled = c * &scale;
                debug_assert!(scaled.denom().is_one());
                let mut n = scaled.numer().clone();
                let modulus = p.pow(digit_count);
                n = num_integer::Integer::mod_floor(&n, &modulus);
                let mut digits = Vec::new();
                for _ in 0..digit_count {
                    let (q, r) = num_integer::Integer::div_rem(&n, &p);
                    digits.push(bigint_to_json(&r));
                    n = q;
                }
                Value::Array(digits)
            };
            let grid: Vec<Value> = coords
                .iter()
                .map(|row| Value::Array(row.iter().map(digits_of).collect()))
                .collect();
            let coeffs = if coords.len() == 1 && coords[0].len() == 1 {
                grid[0].as_array().unwrap()[0].clone()
            } else {
                Value::Array(grid)
            };
            let mut obj = Map::new();
            obj.insert("mode".into(), json!("capped"));
            obj.insert("coeffs".into(), coeffs);
            obj.insert("abs_prec".into(), prec_to_json(prec));
            if shift_opt != 0 {
                obj.insert("shift".into(), json!(shift_opt));
            }
            Value::Object(obj)
        }
    }
}

pub fn element_from_json(v: &Value, field: &LocalFieldModel) -> Result<PadicNumber, JsonError> {
    let obj = v.as_object().ok_or_else(|| err("expected an element object"))?;
    let mode = obj
        .get("mode")
        .and_then(Value::as_str)
        .ok_or_else(|| err("missing mode"))?;
    let coeffs = obj.get("coeffs").ok_or_else(|| err("missing coeffs"))?;
    match mode {
        "exact" => {
            let grid: Vec<Vec<BigRational>> = parse_exact_grid(coeffs, field)?;
            Ok(field.from_coords(grid)?)
        }
        "capped" => {
            let shift = obj.get("shift").and_then(Value::as_i64).unwrap_or(0);
            let prec_v = obj.get("abs_prec").ok_or_else(|| err("missing abs_prec"))?;
            let prec = parse_prec(prec_v)?;
            let p = BigRational::from_integer(BigInt::from(field.p()));
            let digit_grid = parse_digit_grid(coeffs, field)?;
            let scale = crate::arith::rat_pow(&p, shift);
            let grid: Vec<Vec<BigRational>> = digit_grid
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|n| BigRational::from_integer(n.clone()) * &scale)
                        .collect()
                })
                .collect();
            let exact = field.from_coords(grid)?;
            Ok(exact.to_capped_at(prec)?)
        }
        other => Err(err(format!("unknown mode '{other}'"))),
    }
}

fn parse_prec(v: &Value) -> Result<Rational64, JsonError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Rational64::from_integer)
            .ok_or_else(|| err("bad precision")),
        Value::Array(a) if a.len() == 2 => {
            let n = a[0].as_i64().ok_or_else(|| err("bad precision"))?;
            let d = a[1].as_i64().ok_or_else(|| err("bad precision"))?;
            Ok(Rational64::new(n, d))
        }
        _ => Err(err("expected precision as integer or [num, den]")),
    }
}

fn parse_exact_grid(
    v: &Value,
    field: &LocalFieldModel,
) -> Result<Vec<Vec<BigRational>>, JsonError> {
    let (e, f) = (field.e(), field.f());
    let mut grid = vec![vec![BigRational::zero(); f]; e];
    if e == 1 && f == 1 && !matches!(v, Value::Array(a) if a.len() == 1 && a[0].is_array()) {
        grid[0][0] = rational_from_json(v)?;
        return Ok(grid);
    }
    let rows = v.as_array().ok_or_else(|| err("expected coordinate grid"))?;
    if rows.len() > e {
        return Err(err("too many x-coordinates"));
    }
    for (i, row) in rows.iter().enumerate() {
        let cols = row.as_array().ok_or_else(|| err("expected row array"))?;
        if cols.len() > f {
            return Err(err("too many y-coordinates"));
        }
        for (j, c) in cols.iter().enumerate() {
            grid[i][j] = rational_from_json(c)?;
        }
    }
    Ok(grid)
}

fn parse_digit_grid(v: &Value, field: &LocalFieldModel) -> Result<Vec<Vec<BigInt>>, JsonError> {
    let (e, f) = (field.e(), field.f());
    let p = BigInt::from(field.p());
    let digits_to_int = |digits: &Value| -> Result<BigInt, JsonError> {
        let arr = digits.as_array().ok_or_else(|| err("expected digit array"))?;
        let mut acc = BigInt::zero();
        for d in arr.iter().rev() {
            acc = acc * &p + bigint_from_json(d)?;
        }
        Ok(acc)
    };
    let mut grid = vec![vec![BigInt::zero(); f]; e];
    let arr = v.as_array().ok_or_else(|| err("expected digits"))?;
    let flat = arr.iter().all(|x| !x.is_array());
    if e == 1 && f == 1 && flat {
        grid[0][0] = digits_to_int(v)?;
        return Ok(grid);
    }
    for (i, row) in arr.iter().enumerate().take(e) {
        let cols = row.as_array().ok_or_else(|| err("expected row of digit arrays"))?;
        for (j, c) in cols.iter().enumerate().take(f) {
            grid[i][j] = digits_to_int(c)?;
        }
    }
    Ok(grid)
}

// ---------------------------------------------------------------------------
// series and laws
// ---------------------------------------------------------------------------

pub fn series1_to_json(s: &Series1) -> Value {
    let coeffs: Vec<Value> = s
        .terms()
        .map(|(&k, c)| json!([k, element_to_json(c)]))
        .collect();
    json!({"field": s.field().name(), "trunc": s.trunc(), "coeffs": coeffs})
}

pub fn series1_from_json(v: &Value, field: &LocalFieldModel) -> Result<Series1, JsonError> {
    let obj = v.as_object().ok_or_else(|| err("expected a series object"))?;
    let trunc = obj
        .get("trunc")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing trunc"))? as u32;
    let mut terms = Vec::new();
    for entry in obj
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing coeffs"))?
    {
        let pair = entry.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
            err("series coefficients must be [exponent, element] pairs")
        })?;
        let k = pair[0].as_u64().ok_or_else(|| err("bad exponent"))? as u32;
        terms.push((k, element_from_json(&pair[1], field)?));
    }
    Ok(Series1::from_terms(field, trunc, terms)?)
}

pub fn series2_to_json(s: &Series2) -> Value {
    let coeffs: Vec<Value> = s
        .terms()
        .map(|(&(i, j), c)| json!([i, j, element_to_json(c)]))
        .collect();
    json!({"field": s.field().name(), "trunc": s.trunc(), "coeffs": coeffs})
}

pub fn series2_from_json(v: &Value, field: &LocalFieldModel) -> Result<Series2, JsonError> {
    let obj = v.as_object().ok_or_else(|| err("expected a series object"))?;
    let trunc = obj
        .get("trunc")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing trunc"))? as u32;
    let mut terms = Vec::new();
    for entry in obj
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing coeffs"))?
    {
        let triple = entry.as_array().filter(|a| a.len() == 3).ok_or_else(|| {
            err("series coefficients must be [i, j, element] triples")
        })?;
        let i = triple[0].as_u64().ok_or_else(|| err("bad exponent"))? as u32;
        let j = triple[1].as_u64().ok_or_else(|| err("bad exponent"))? as u32;
        terms.push((i, j, element_from_json(&triple[2], field)?));
    }
    Ok(Series2::from_terms(field, trunc, terms)?)
}

pub fn law_to_json(law: &FormalGroupLaw) -> Value {
    json!({
        "phi": series1_to_json(law.frobenius().phi()),
        "F": series2_to_json(law.law()),
        "D": law.trunc(),
    })
}

pub fn torsion_report_to_json(r: &TorsionLayerReport) -> Value {
    let slopes: Vec<Value> = r
        .slopes
        .iter()
        .map(|(s, c)| json!([*s.numer(), *s.denom(), c]))
        .collect();
    let new_slopes: Vec<Value> = r
        .new_slopes
        .iter()
        .map(|(s, c)| json!([*s.numer(), *s.denom(), c]))
        .collect();
    json!({
        "level": r.level,
        "total": bigint_to_json(&r.total),
        "zero_root_multiplicity": r.zero_root_multiplicity,
        "slopes": slopes,
        "new_slopes": new_slopes,
    })
}

// ---------------------------------------------------------------------------
// decisions
// ---------------------------------------------------------------------------

pub fn weil_result_to_json(r: &WeilCheckResult) -> Value {
    json!({
        "holds": r.holds,
        "q": bigint_to_json(&r.q),
        "weight": rat64_to_json(&r.weight),
        "margin": r.margin.as_ref().map(|m| json!([bigint_to_json(m.numer()), bigint_to_json(m.denom())])).unwrap_or(Value::Null),
    })
}

fn weil_condition_to_json(c: &WeilCondition) -> Value {
    let mut obj = Map::new();
    obj.insert("holds".into(), json!(c.holds));
    obj.insert("witnesses".into(), json!(c.witnesses));
    if let Some(n) = &c.note {
        obj.insert("note".into(), json!(n));
    }
    Value::Object(obj)
}

fn unity_condition_to_json(c: &UnityCondition) -> Value {
    json!({"holds": c.holds, "order": c.order})
}

pub fn verdict_to_json(r: &VerdictReport) -> Value {
    let conditions = match &r.conditions {
        VerdictConditions::Pair { w, mu } => json!({
            "w": weil_condition_to_json(w),
            "mu": unity_condition_to_json(mu),
        }),
        VerdictConditions::Character {
            w_prime,
            mu_prime,
            weight_sum,
        } => {
            let mut obj = Map::new();
            obj.insert(
                "w_prime".into(),
                w_prime
                    .as_ref()
                    .map(weil_condition_to_json)
                    .unwrap_or(Value::Null),
            );
            obj.insert("mu_prime".into(), unity_condition_to_json(mu_prime));
            obj.insert("weight_sum".into(), json!(weight_sum));
            Value::Object(obj)
        }
    };
    json!({
        "context": r.context.as_str(),
        "class": r.group_class.as_str(),
        "conditions": conditions,
        "verdict": r.verdict.as_str(),
        "citation": r.citation,
        "notes": r.notes,
    })
}

pub fn structure_to_json(r: &StructureReport) -> Value {
    json!({
        "c": r.c,
        "unipotence_exponent": bigint_to_json(&r.unipotence_exponent),
        "residue_bound": bigint_to_json(&r.residue_bound),
        "abelian_bound": bigint_to_json(&r.abelian_bound),
        "galois_rank": r.galois_rank,
        "dimension": r.dimension,
        "citations": r.citations,
    })
}

pub fn algebraic_to_json(a: &AlgebraicNumber) -> Value {
    let mut obj = Map::new();
    obj.insert("min_poly".into(), qpoly_to_json(a.min_poly()));
    obj.insert("integer".into(), json!(a.is_integer_flagged()));
    if let Some(r) = a.selector() {
        obj.insert(
            "selector".into(),
            json!({
                "re": [rational_to_json(&r.re_lo), rational_to_json(&r.re_hi)],
                "im": [rational_to_json(&r.im_lo), rational_to_json(&r.im_hi)],
            }),
        );
    }
    Value::Object(obj)
}

fn symbolic_equation_to_json(e: &SymbolicEquation) -> Value {
    json!({
        "exponent": e.exponent,
        "beta_poly": qpoly_to_json(&e.beta_poly),
        "multiplier": e.multiplier,
        "f_k": e.f_k,
        "zeta_order_divides": e.zeta_order_divides,
    })
}

pub fn exceptional_set_to_json(s: &ExceptionalSet) -> Value {
    json!({
        "explicit": s.explicit.iter().map(algebraic_to_json).collect::<Vec<_>>(),
        "symbolic": s.symbolic.iter().map(symbolic_equation_to_json).collect::<Vec<_>>(),
        "compositum_degree_bound": s.compositum_degree_bound,
        "weil_integers": s.weil_integer_polys.iter().map(qpoly_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, rat};
    use crate::padic::{make_field, q_p};
    use crate::series::Series1;

    #[test]
    fn field_roundtrip() {
        let k = make_field(
            2,
            &[big(-1), big(1)],
            &[vec![big(-2)], vec![big(0)], vec![big(1)]],
            "Q_2(sqrt2)",
        )
        .unwrap();
        let v = field_to_json(&k);
        let k2 = field_from_json(&v).unwrap();
        assert_eq!(k, k2);
        assert_eq!(field_to_json(&k2), v);
    }

    #[test]
    fn field_flat_sugar_and_defaults() {
        let v = json!({"p": 5, "e_poly": [-5, 1]});
        let k = field_from_json(&v).unwrap();
        assert_eq!(k.degree(), 1);
        assert_eq!(k.p(), 5);
        // unknown keys rejected
        let bad = json!({"p": 5, "e_poly": [-5, 1], "zzz": 0});
        assert!(field_from_json(&bad).is_err());
    }

    #[test]
    fn element_roundtrips() {
        let k = q_p(5);
        let a = k.from_rational(&rat(7, 3));
        let v = element_to_json(&a);
        let a2 = element_from_json(&v, &k).unwrap();
        assert_eq!(a, a2);
        // capped digits little-endian: 1/2 at precision 3 over Q_5 is (3,2,2)
        let half = k
            .one()
            .div(&k.from_integer(2).to_capped_at(Rational64::from_integer(3)).unwrap())
            .unwrap();
        let vc = element_to_json(&half);
        assert_eq!(vc["coeffs"], json!([3, 2, 2]));
        let back = element_from_json(&vc, &k).unwrap();
        assert_eq!(element_to_json(&back), vc);
        // ramified field grid shape
        let kr = make_field(
            2,
            &[big(-1), big(1)],
            &[vec![big(-2)], vec![big(0)], vec![big(1)]],
            "Q_2(sqrt2)",
        )
        .unwrap();
        let b = kr.from_poly_expr(&[vec![rat(1, 3)], vec![rat(5, 1)]]);
        let vb = element_to_json(&b);
        let b2 = element_from_json(&vb, &kr).unwrap();
        assert_eq!(b, b2);
    }

    #[test]
    fn series_roundtrip_bit_exact() {
        let k = q_p(3);
        let s = Series1::from_terms(
            &k,
            7,
            vec![(1, k.from_integer(3)), (3, k.from_rational(&rat(1, 2))), (7, k.one())],
        )
        .unwrap();
        let v = series1_to_json(&s);
        let s2 = series1_from_json(&v, &k).unwrap();
        assert_eq!(s, s2);
        assert_eq!(serde_json::to_string(&v).unwrap(), {
            let v2 = series1_to_json(&s2);
            serde_json::to_string(&v2).unwrap()
        });
    }

    #[test]
    fn polynomial_arrays() {
        let p = QPoly::from_coeffs(vec![rat(1, 2), rat(-3, 1), rat(1, 1)]);
        let v = qpoly_to_json(&p);
        assert_eq!(v, json!([[1, 2], -3, 1]));
        assert_eq!(qpoly_from_json(&v).unwrap(), p);
    }
}
