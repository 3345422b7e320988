//! JSON encodings of matrices, permutation combinations and classifications.
//!
//! Exact entries are written as `"p/q"` strings and approximate entries as
//! numbers; permutations inside witnesses are cycle strings.

use serde_json::{json, Value};

use crate::blocks::{CatalogEntry, HadamardBlock, Summands};
use crate::classify::Classification;
use crate::decompose::{FourPerms, PermLinComb};
use crate::error::{Error, Result};
use crate::families::{Opm3Set, OpmWitness, SporadicKind};
use crate::mat::{Mat, Mat4};
use crate::scalar::{FromScalar, Scalar, Q};

/// A parsed matrix on whichever backend its entries call for.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMat {
    Exact(Mat4<Q>),
    Approx(Mat4<f64>),
}

impl AnyMat {
    pub fn to_json(&self) -> Value {
        match self {
            AnyMat::Exact(m) => matrix_json(m),
            AnyMat::Approx(m) => matrix_json(m),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyMat::Exact(_))
    }
}

pub fn scalar_json<F: FromScalar>(v: &F) -> Value {
    serde_json::to_value(v.to_scalar()).expect("scalars serialize")
}

pub fn matrix_json<F: FromScalar, const N: usize>(a: &Mat<F, N>) -> Value {
    Value::Array(a.rows().iter().map(|r| Value::Array(r.iter().map(scalar_json).collect())).collect())
}

fn entry_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("matrix entry {other} is neither a string nor a number"))),
    }
}

/// Parse a 4×4 JSON array. Fractions and integers are exact; decimals are
/// snapped to nearby rationals unless `snap_decimals` is false, in which
/// case the whole matrix is read in binary64.
pub fn parse_matrix_json(text: &str, snap_decimals: bool) -> Result<AnyMat> {
    let rows: Vec<Vec<Value>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(Error::Parse("matrix JSON must be 4 arrays of 4 entries".into()));
    }
    let mut cells = Vec::with_capacity(16);
    for v in rows.iter().flatten() {
        cells.push(Scalar::parse_input(&entry_text(v)?, snap_decimals)?);
    }
    if cells.iter().all(Scalar::is_exact) {
        let q: Vec<Q> = cells.iter().map(|s| Q::from_scalar(s).expect("exact")).collect();
        Ok(AnyMat::Exact(Mat::from_fn(|i, j| q[4 * i + j].clone())))
    } else {
        Ok(AnyMat::Approx(Mat::from_fn(|i, j| cells[4 * i + j].to_f64())))
    }
}

/// `[{perm, coeff}, …]` in permutation order.
pub fn comb_json<F: FromScalar>(c: &PermLinComb<F>) -> Value {
    Value::Array(c.terms().map(|(p, v)| json!({ "perm": p.to_string(), "coeff": scalar_json(v) })).collect())
}

pub fn four_perms_json<F: FromScalar>(fp: &FourPerms<F>) -> Value {
    json!({
        "pbar": fp.pbar.to_string(),
        "quadruple": fp.quadruple.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "coeffs": fp.coeffs.iter().map(scalar_json).collect::<Vec<_>>(),
        "combination": comb_json(&fp.combination),
    })
}

pub fn witness_json<F: FromScalar>(w: &OpmWitness<F>) -> Value {
    match w {
        OpmWitness::Family(f) => json!({
            "kind": "family",
            "family": f.fid.to_string(),
            "pbar": f.pbar.to_string(),
            "point": { "x": scalar_json(&f.point.x), "z": scalar_json(&f.point.z) },
        }),
        OpmWitness::Sporadic { tau, sign, kind } => json!({
            "kind": "sporadic",
            "tau": tau.to_string(),
            "sign": sign.to_string(),
            "form": match kind {
                SporadicKind::Plain => "plain",
                SporadicKind::HalfJ => "half-j-minus-p",
            },
        }),
    }
}

fn sets_json<F: FromScalar>(sets: &[(Opm3Set, F, F)]) -> Value {
    Value::Array(
        sets.iter()
            .map(|(s, x, y)| json!({ "set": s.to_string(), "x": scalar_json(x), "y": scalar_json(y) }))
            .collect(),
    )
}

pub fn catalog_json<F: FromScalar>(c: &CatalogEntry<F>) -> Value {
    let summands = match &c.summands {
        Summands::ScalarOpm3 { corner, block, sets } => json!({
            "sizes": [1, 3],
            "corner": scalar_json(corner),
            "block": matrix_json(block),
            "sets": sets_json(sets),
        }),
        Summands::Permutation { upper, lower, sign, perm } => json!({
            "sizes": [2, 2],
            "upper": matrix_json(upper),
            "lower": matrix_json(lower),
            "sign": scalar_json(sign),
            "perm": perm.to_string(),
        }),
    };
    json!({ "x": c.x.to_string(), "y": c.y.to_string(), "reduced": matrix_json(&c.reduced()), "summands": summands })
}

pub fn hadamard_json<F: FromScalar>(h: &HadamardBlock<F>) -> Value {
    let c_bar = h.c_bar.as_ref().map(|(set, a4, c2)| {
        json!({ "set": format!("{set:?}"), "a4": scalar_json(a4), "c2": scalar_json(c2) })
    });
    json!({
        "x": h.x.to_string(),
        "y": h.y.to_string(),
        "corner": scalar_json(&h.corner),
        "block": matrix_json(&h.block),
        "sets": sets_json(&h.sets),
        "c_bar": c_bar,
    })
}

/// `{"tag": …, "witness": …}`; the witness is null for tags without one.
pub fn classification_json<F: FromScalar>(c: &Classification<F>) -> Value {
    let witness = match c {
        Classification::Permutative(w) => witness_json(w),
        Classification::PermEquivalentDirectSum(e) => catalog_json(e),
        Classification::HadamardBlock(h) => hadamard_json(h),
        _ => Value::Null,
    };
    json!({ "tag": c.tag().name(), "witness": witness })
}
