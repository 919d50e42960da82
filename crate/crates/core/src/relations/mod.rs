//! Multiplicative dependence among core holonomies.

mod lll;

pub use lll::{integer_kernel, lll_reduce};

use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::series::{pow2, BigComplex};

/// Largest root-of-unity order searched.
pub const MAX_UNITY_ORDER: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("precision {0} bits is too low for exponent bound above 10 (need at least 128)")]
    PrecisionTooLow(u32),
    #[error("value {0} has modulus not above 1")]
    ModulusNotAboveOne(usize),
    #[error("exponent bound must be at least 1")]
    BadBound,
}

/// `prod t_i^{e_i}` is a root of unity of order `unity_order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceRelation {
    pub exponents: Vec<i64>,
    pub unity_order: Option<u32>,
    #[serde(with = "crate::io::float_str")]
    pub residual: Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DependenceVerdict {
    Dependent(DependenceRelation),
    IndependentUpTo(u32),
}

impl DependenceVerdict {
    pub fn relation(&self) -> Option<&DependenceRelation> {
        match self {
            DependenceVerdict::Dependent(r) => Some(r),
            DependenceVerdict::IndependentUpTo(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub passed: bool,
    pub residual: Float,
}

/// Acceptance threshold for a relation residual at `prec` bits.
pub fn relation_tolerance(prec: u32) -> Float {
    pow2(64 - prec as i32, prec)
}

fn product(t: &[BigComplex], e: &[i64], prec: u32) -> BigComplex {
    let mut z = BigComplex::one(prec);
    for (ti, &ei) in t.iter().zip(e) {
        if ei != 0 {
            z *= &ti.powi(ei);
        }
    }
    z
}

/// Residual of `z` as an `m`-th root of unity (`m = None` checks the modulus only).
fn unity_residual(z: &BigComplex, m: Option<u32>) -> Float {
    let prec = z.prec();
    let one = BigComplex::one(prec);
    let mut r = Float::with_val(prec, z.abs() - 1u32).abs();
    if let Some(m) = m {
        let dm = (&z.powi(m as i64) - &one).abs() / m;
        if dm > r {
            r = dm;
        }
    }
    r
}

/// Smallest `m <= 24` for which `z` passes as an `m`-th root of unity.
pub fn unity_order(z: &BigComplex, tol: &Float) -> Option<(u32, Float)> {
    let prec = z.prec();
    let modulus = Float::with_val(prec, z.abs() - 1u32).abs();
    if modulus > *tol {
        return None;
    }
    let one = BigComplex::one(prec);
    let mut w = z.clone();
    for m in 1..=MAX_UNITY_ORDER {
        let d = (&w - &one).abs() / m;
        if d <= *tol {
            let r = if d > modulus { d } else { modulus };
            return Some((m, r));
        }
        w *= z;
    }
    None
}

/// Checks a claimed relation by direct evaluation.
pub fn verify_relation(t: &[BigComplex], rel: &DependenceRelation) -> RelationCheck {
    let prec = t.iter().map(|x| x.prec()).min().unwrap_or(64);
    if t.len() != rel.exponents.len() || rel.exponents.iter().all(|&e| e == 0) {
        return RelationCheck { passed: false, residual: Float::with_val(prec, f64::INFINITY) };
    }
    let z = product(t, &rel.exponents, prec);
    let residual = unity_residual(&z, rel.unity_order);
    RelationCheck { passed: residual <= relation_tolerance(prec), residual }
}

fn gcd_all(e: &[i64]) -> i64 {
    e.iter().fold(0i64, |g, &x| Integer::from(g).gcd(&Integer::from(x)).to_i64().unwrap_or(1))
}

fn canonical_sign(mut e: Vec<i64>) -> Vec<i64> {
    if let Some(&first) = e.iter().find(|&&x| x != 0) {
        if first < 0 {
            e.iter_mut().for_each(|x| *x = -*x);
        }
    }
    e
}

/// Tries `k * primitive` for growing `k` and returns the first multiple within
/// the bound that evaluates to a root of unity of order at most 24.
fn test_candidate(t: &[BigComplex], raw: &[i64], bound: u32, prec: u32) -> Option<DependenceRelation> {
    let g = gcd_all(raw);
    if g == 0 {
        return None;
    }
    let prim: Vec<i64> = raw.iter().map(|x| x / g).collect();
    let tol = relation_tolerance(prec);
    for k in 1..=MAX_UNITY_ORDER as i64 {
        let e: Vec<i64> = prim.iter().map(|x| x * k).collect();
        if e.iter().any(|x| x.unsigned_abs() > bound as u64) {
            break;
        }
        let z = product(t, &e, prec);
        if let Some((m, residual)) = unity_order(&z, &tol) {
            return Some(DependenceRelation { exponents: canonical_sign(e), unity_order: Some(m), residual });
        }
    }
    None
}

/// Searches for `e` with `|e_i| <= bound` and `prod t_i^{e_i}` a root of
/// unity of order at most 24, by lattice reduction on scaled logarithms.
pub fn detect_dependence(t: &[BigComplex], bound: u32, prec: u32) -> Result<DependenceVerdict, RelationError> {
    if bound == 0 {
        return Err(RelationError::BadBound);
    }
    if prec < 128 && bound > 10 {
        return Err(RelationError::PrecisionTooLow(prec));
    }
    for (i, x) in t.iter().enumerate() {
        if x.abs() <= 1u32 {
            return Err(RelationError::ModulusNotAboveOne(i));
        }
    }
    let n = t.len();
    if n < 2 {
        return Ok(DependenceVerdict::IndependentUpTo(bound));
    }
    let wp = prec + 64;
    let t: Vec<BigComplex> = t.iter().map(|x| x.with_prec(wp)).collect();
    // Every order up to 24 divides this, so one lattice covers all of them.
    let lcm = (1..=MAX_UNITY_ORDER).fold(Integer::from(1), |acc, m| acc.lcm(&Integer::from(m)));
    let scale = pow2((prec / 2) as i32, wp);
    let two_pi = BigComplex::pi(wp) * 2u32;
    let to_int = |x: Float| -> Integer { x.round().to_integer().expect("finite") };

    let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(n + 1);
    for (i, x) in t.iter().enumerate() {
        let mut r = vec![Integer::new(); n + 2];
        r[i] = Integer::from(1);
        let lg = Float::with_val(wp, x.abs().ln());
        r[n] = to_int(Float::with_val(wp, &lg * &scale));
        let frac = Float::with_val(wp, x.arg() / &two_pi);
        r[n + 1] = to_int(Float::with_val(wp, &frac * &lcm) * &scale);
        rows.push(r);
    }
    let mut last = vec![Integer::new(); n + 2];
    last[n + 1] = to_int(scale.clone());
    rows.push(last);

    let reduced = match lll_reduce(&rows) {
        Some(r) => r,
        None => return Ok(DependenceVerdict::IndependentUpTo(bound)),
    };
    let as_i64 = |v: &[Integer]| -> Option<Vec<i64>> { v[..n].iter().map(|x| x.to_i64()).collect() };
    let mut candidates: Vec<Vec<i64>> = reduced.iter().filter_map(|r| as_i64(r)).collect();
    // small combinations of the two shortest vectors catch ties
    if candidates.len() >= 2 {
        let (a, b) = (candidates[0].clone(), candidates[1].clone());
        for s in [1i64, -1] {
            candidates.push(a.iter().zip(&b).map(|(x, y)| x + s * y).collect());
        }
    }
    let tp: Vec<BigComplex> = t.iter().map(|x| x.with_prec(prec)).collect();
    for c in candidates {
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        if let Some(rel) = test_candidate(&tp, &c, bound, prec) {
            return Ok(DependenceVerdict::Dependent(rel));
        }
    }
    Ok(DependenceVerdict::IndependentUpTo(bound))
}
