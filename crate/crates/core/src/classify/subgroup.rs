//! Exact identities satisfied by the exponent blocks of an algebraic subgroup
//! containing the Dehn filling point of a pair of fillings.
//!
//! Each cusp's log-coordinates `xi_k = (u_k, v_k)` are related by 2x2 rational
//! blocks. Three equation families are supported:
//!
//! * coupled: `A'1 xi'_1 = A1 xi_1 + A2 xi_2` and `A'4 xi'_2 = A3 xi_1 + A4 xi_2`
//!   (`A'1`, `A'4` default to the identity);
//! * cross: the first coupled equation plus `A3 xi'_1 + A4 xi'_2 = 0`;
//! * holonomy-dependent: `A1 xi_1 + A2 xi_2 = 0`, `A'1 xi'_1 + A'2 xi'_2 = 0`
//!   and `A3 xi_1 + A'3 xi'_1 = 0`.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::exact::{parallel_mixed, QuadraticNumber, RationalMatrix2};
use super::ClassifyError;
use crate::relations::{relation_tolerance, unity_order};
use crate::series::BigComplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupShape {
    Coupled,
    Cross,
    HolonomyDependent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupSpec {
    pub shape: SubgroupShape,
    pub blocks: [RationalMatrix2; 4],
    pub primed: [Option<RationalMatrix2>; 4],
    /// Exact cusp shapes, enabling the parallelism checks.
    pub shapes: Option<[QuadraticNumber; 2]>,
}

impl SubgroupSpec {
    pub fn coupled(blocks: [RationalMatrix2; 4]) -> Self {
        SubgroupSpec { shape: SubgroupShape::Coupled, blocks, primed: [None, None, None, None], shapes: None }
    }
}

/// Slope as an oriented row `(p, q)`, optionally with its completion `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedSlope {
    pub p: i64,
    pub q: i64,
    pub completion: Option<(i64, i64)>,
}

impl OrientedSlope {
    pub fn new(p: i64, q: i64) -> Self {
        OrientedSlope { p, q, completion: None }
    }

    pub fn with_completion(p: i64, q: i64, r: i64, s: i64) -> Self {
        OrientedSlope { p, q, completion: Some((r, s)) }
    }

    fn row(&self) -> [Rational; 2] {
        [Rational::from(self.p), Rational::from(self.q)]
    }

    fn matrix(&self) -> Option<RationalMatrix2> {
        self.completion.map(|(r, s)| RationalMatrix2::from_ints(self.p, self.q, r, s))
    }
}

/// Core holonomies of both fillings.
#[derive(Debug, Clone)]
pub struct HolonomyData {
    pub t: [BigComplex; 2],
    pub t_prime: [BigComplex; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckOutcome {
    Pass,
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl CheckOutcome {
    fn from_bool(b: bool) -> Self {
        if b {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }

    /// Conjunction where `NotApplicable` is neutral.
    fn and(self, o: CheckOutcome) -> CheckOutcome {
        use CheckOutcome::*;
        match (self, o) {
            (Fail, _) | (_, Fail) => Fail,
            (Pass, _) | (_, Pass) => Pass,
            _ => NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationWitness {
    pub k: [Option<Rational>; 4],
    pub l: [Option<Rational>; 4],
    pub n: [Option<Rational>; 4],
    /// Which of the three determinant patterns holds, when one does.
    pub trichotomy_case: Option<u8>,
    pub checks: BTreeMap<String, CheckOutcome>,
}

impl RelationWitness {
    /// No check failed.
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| *c != CheckOutcome::Fail)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| **c == CheckOutcome::Fail).map(|(k, _)| k.as_str()).collect()
    }
}

/// `k` with `y A = k x`, if the rows are proportional.
fn row_scalar(y: &OrientedSlope, a: &RationalMatrix2, x: &OrientedSlope) -> Option<Rational> {
    let lhs = a.row_mul(&y.row());
    let xr = x.row();
    // x is a nonzero integer row
    let (num, den) = if xr[0] != 0 { (&lhs[0], &xr[0]) } else { (&lhs[1], &xr[1]) };
    let k = Rational::from(num / den);
    let ok = lhs.iter().zip(&xr).all(|(l, xv)| *l == Rational::from(&k * xv));
    ok.then_some(k)
}

fn rows_parallel(x: &[Rational; 2], y: &[Rational; 2]) -> bool {
    Rational::from(&x[0] * &y[1]) == Rational::from(&x[1] * &y[0])
}

fn matrices_parallel(a: &RationalMatrix2, b: &RationalMatrix2) -> bool {
    let ea: Vec<&Rational> = a.0.iter().flatten().collect();
    let eb: Vec<&Rational> = b.0.iter().flatten().collect();
    (0..4).all(|i| (0..4).all(|j| Rational::from(ea[i] * eb[j]) == Rational::from(ea[j] * eb[i])))
}

fn lcm_denoms(xs: &[&Rational]) -> Integer {
    xs.iter().fold(Integer::from(1), |acc, x| acc.lcm(x.denom()))
}

/// Checks `t_a^{|det_a|} = eps * t_b^{|det_b|}` for a root of unity `eps`
/// of order at most 24 after clearing denominators. Holonomies are
/// normalized to modulus above one, which fixes the exponent signs.
pub fn holonomy_power_check(t_a: &BigComplex, det_a: &Rational, t_b: &BigComplex, det_b: &Rational) -> (bool, Float) {
    let prec = t_a.prec().min(t_b.prec());
    let l = lcm_denoms(&[det_a, det_b]);
    let ea = Rational::from(det_a.abs_ref()) * &l;
    let eb = Rational::from(det_b.abs_ref()) * &l;
    let (ea, eb) = match (ea.numer().to_i64(), eb.numer().to_i64()) {
        (Some(a), Some(b)) if a != 0 || b != 0 => (a, b),
        _ => return (false, Float::with_val(prec, f64::INFINITY)),
    };
    let z = t_a.powi(ea).div(&t_b.powi(eb));
    // relative tolerance scaled by the size of the powers involved
    let scale = Float::with_val(prec, t_a.abs().pow(ea as u32)).max(&Float::with_val(prec, 1));
    let tol = relation_tolerance(prec) * scale;
    match unity_order(&z, &tol) {
        Some((_, r)) => (true, r),
        None => (false, Float::with_val(prec, z.abs() - 1u32).abs()),
    }
}

struct Builder {
    checks: BTreeMap<String, CheckOutcome>,
}

impl Builder {
    fn set(&mut self, name: &str, c: CheckOutcome) {
        let prev = self.checks.get(name).copied().unwrap_or(CheckOutcome::NotApplicable);
        self.checks.insert(name.to_string(), prev.and(c));
    }
}

fn parallel_col(a: &RationalMatrix2, tau_a: &QuadraticNumber, b: &RationalMatrix2, tau_b: &QuadraticNumber) -> bool {
    parallel_mixed(&a.apply_column(tau_a), &b.apply_column(tau_b))
}

/// Computes `k_j`, `l_j`, `n_j` and the identity checklist for a spec.
///
/// `slopes` belong to the first filling, `slopes2` to the second.
pub fn verify_subgroup_relations(
    spec: &SubgroupSpec,
    slopes: &[OrientedSlope; 2],
    slopes2: &[OrientedSlope; 2],
    holonomy: Option<&HolonomyData>,
) -> Result<RelationWitness, ClassifyError> {
    for s in slopes.iter().chain(slopes2.iter()) {
        if Integer::from(s.p).gcd(&Integer::from(s.q)) != 1 {
            return Err(ClassifyError::Parse(format!("{}/{} is not a coprime slope", s.p, s.q)));
        }
        if let Some((r, q)) = s.completion {
            if s.p as i128 * q as i128 - s.q as i128 * r as i128 != 1 {
                return Err(ClassifyError::Parse(format!("completion of {}/{} has determinant != 1", s.p, s.q)));
            }
        }
    }
    let mut b = Builder { checks: BTreeMap::new() };
    let mut w = RelationWitness {
        k: [None, None, None, None],
        l: [None, None, None, None],
        n: [None, None, None, None],
        trichotomy_case: None,
        checks: BTreeMap::new(),
    };
    match spec.shape {
        SubgroupShape::Coupled => coupled(spec, slopes, slopes2, holonomy, &mut w, &mut b)?,
        SubgroupShape::Cross => cross(spec, slopes, slopes2, holonomy, &mut w, &mut b)?,
        SubgroupShape::HolonomyDependent => dependent(spec, slopes, slopes2, holonomy, &mut b)?,
    }
    w.checks = b.checks;
    Ok(w)
}

/// Blocks normalized by the primed blocks: `A'^-1 A`.
fn normalized(spec: &SubgroupSpec, b: &mut Builder) -> Result<[RationalMatrix2; 4], ClassifyError> {
    let id = RationalMatrix2::identity();
    let p1 = spec.primed[0].clone().unwrap_or_else(|| id.clone());
    let p4 = spec.primed[3].clone().unwrap_or(id);
    let ok = p1.det() != 0 && p4.det() != 0;
    b.set("primed_invertible", CheckOutcome::from_bool(ok));
    if !ok {
        return Err(ClassifyError::Singular);
    }
    let i1 = p1.inv()?;
    let i4 = p4.inv()?;
    let a = &spec.blocks;
    Ok([i1.mul(&a[0]), i1.mul(&a[1]), i4.mul(&a[2]), i4.mul(&a[3])])
}

/// Fills `k_j`, `n_j`, `l_j` for the listed (block, primed slope, slope) triples.
fn row_identities(
    blocks: &[RationalMatrix2],
    pairs: &[(usize, &OrientedSlope, &OrientedSlope)],
    w: &mut RelationWitness,
    b: &mut Builder,
) -> Result<(), ClassifyError> {
    for &(j, y, x) in pairs {
        let a = &blocks[j];
        match row_scalar(y, a, x) {
            Some(k) => {
                b.set("rows_consistent", CheckOutcome::Pass);
                if let (Some(ym), Some(xm)) = (y.matrix(), x.matrix()) {
                    // Y A X^-1 = [[k, 0], [n, l]]
                    let t = ym.mul(a).mul(&xm.inv()?);
                    w.n[j] = Some(t.0[1][0].clone());
                    w.l[j] = Some(t.0[1][1].clone());
                } else if a.is_zero() {
                    w.l[j] = Some(Rational::new());
                } else if k != 0 {
                    w.l[j] = Some(a.det() / k.clone());
                }
                w.k[j] = Some(k);
            }
            None => b.set("rows_consistent", CheckOutcome::Fail),
        }
    }
    // k_j l_j = det A_j wherever both are defined
    for &(j, _, _) in pairs {
        if let (Some(k), Some(l)) = (&w.k[j], &w.l[j]) {
            b.set("kl_products", CheckOutcome::from_bool(Rational::from(k * l) == blocks[j].det()));
        }
    }
    Ok(())
}

fn sum_is_one(x: &Option<Rational>, y: &Option<Rational>) -> CheckOutcome {
    match (x, y) {
        (Some(x), Some(y)) => CheckOutcome::from_bool(Rational::from(x + y) == 1),
        _ => CheckOutcome::Fail,
    }
}

fn coupled(
    spec: &SubgroupSpec,
    s: &[OrientedSlope; 2],
    s2: &[OrientedSlope; 2],
    hol: Option<&HolonomyData>,
    w: &mut RelationWitness,
    b: &mut Builder,
) -> Result<(), ClassifyError> {
    let a = normalized(spec, b)?;
    let pairs = [(0, &s2[0], &s[0]), (1, &s2[0], &s[1]), (2, &s2[1], &s[0]), (3, &s2[1], &s[1])];
    row_identities(&a, &pairs, w, b)?;
    b.set("k_sums", sum_is_one(&w.k[0], &w.k[1]).and(sum_is_one(&w.k[2], &w.k[3])));
    b.set("l_sums", sum_is_one(&w.l[0], &w.l[2]).and(sum_is_one(&w.l[1], &w.l[3])));

    let d: Vec<Rational> = a.iter().map(|m| m.det()).collect();
    let case = if a[0].is_zero() && a[3].is_zero() && d[1] == 1 && d[2] == 1 {
        Some(1)
    } else if a[1].is_zero() && a[2].is_zero() && d[0] == 1 && d[3] == 1 {
        Some(2)
    } else if d.iter().all(|x| *x != 0) && d[0] == d[3] && d[1] == d[2] && Rational::from(&d[0] + &d[2]) == 1 {
        Some(3)
    } else {
        None
    };
    w.trichotomy_case = case;
    b.set("det_trichotomy", CheckOutcome::from_bool(case.is_some()));

    if d[0] != 0 && d[2] != 0 {
        let e12 = a[0].inv()?.mul(&a[1]);
        let e34 = a[2].inv()?.mul(&a[3]);
        let prop = match (&w.k[0], &w.k[1], &w.k[2], &w.k[3]) {
            (Some(k1), Some(k2), Some(k3), Some(k4)) if *k1 != 0 && *k4 != 0 => {
                let f = Rational::from(k2 * k3) / Rational::from(k1 * k4);
                e12 == e34.scale(&f)
            }
            _ => matrices_parallel(&e12, &e34),
        };
        b.set("block_proportionality", CheckOutcome::from_bool(prop));
        let lhs = e12.scale(&d[0]);
        let rhs = e34.scale(&d[2]).neg();
        b.set("det_weighted_blocks", CheckOutcome::from_bool(lhs == rhs));
    } else {
        b.set("block_proportionality", CheckOutcome::NotApplicable);
        b.set("det_weighted_blocks", CheckOutcome::NotApplicable);
    }

    if let Some([t1, t2]) = &spec.shapes {
        let raw = &spec.blocks;
        let mut ok = parallel_col(&raw[0], t1, &raw[1], t2) && parallel_col(&raw[2], t1, &raw[3], t2);
        if let Some(p1) = &spec.primed[0] {
            ok &= parallel_col(p1, t1, &raw[0], t1);
        }
        if let Some(p4) = &spec.primed[3] {
            ok &= parallel_col(p4, t2, &raw[3], t2);
        }
        b.set("shape_parallelism", CheckOutcome::from_bool(ok));
    } else {
        b.set("shape_parallelism", CheckOutcome::NotApplicable);
    }

    // w'_1 = l1 w1 + l2 w2 and w'_2 = l3 w1 + l4 w2 up to 2 pi i multiples
    match hol {
        Some(h) => {
            let mut out = CheckOutcome::NotApplicable;
            for (row, (ja, jb)) in [(0usize, (0usize, 1usize)), (1, (2, 3))] {
                if let (Some(la), Some(lb)) = (&w.l[ja], &w.l[jb]) {
                    out = out.and(CheckOutcome::from_bool(linear_holonomy(&h.t_prime[row], [&h.t[0], &h.t[1]], [la, lb])));
                }
            }
            b.set("holonomy_relation", out);
        }
        None => b.set("holonomy_relation", CheckOutcome::NotApplicable),
    }
    Ok(())
}

/// `t' = eps * t1^{+-la} t2^{+-lb}` for some sign choice and root of unity.
fn linear_holonomy(tp: &BigComplex, t: [&BigComplex; 2], l: [&Rational; 2]) -> bool {
    let prec = tp.prec();
    let den = lcm_denoms(&[l[0], l[1]]);
    let Some(den_i) = den.to_i64() else { return false };
    let ea = (Rational::from(l[0] * &den)).numer().to_i64();
    let eb = (Rational::from(l[1] * &den)).numer().to_i64();
    let (Some(ea), Some(eb)) = (ea, eb) else { return false };
    let lhs = tp.powi(den_i);
    let scale = Float::with_val(prec, lhs.abs()).max(&Float::with_val(prec, 1));
    let tol = relation_tolerance(prec) * scale;
    for sa in [1i64, -1] {
        for sb in [1i64, -1] {
            let rhs = &t[0].powi(sa * ea) * &t[1].powi(sb * eb);
            if rhs.is_zero() {
                continue;
            }
            let z = lhs.div(&rhs);
            if unity_order(&z, &tol).is_some() {
                return true;
            }
        }
    }
    false
}

fn cross(
    spec: &SubgroupSpec,
    s: &[OrientedSlope; 2],
    s2: &[OrientedSlope; 2],
    hol: Option<&HolonomyData>,
    w: &mut RelationWitness,
    b: &mut Builder,
) -> Result<(), ClassifyError> {
    let a = normalized(spec, b)?;
    row_identities(&a, &[(0, &s2[0], &s[0]), (1, &s2[0], &s[1])], w, b)?;
    b.set("k_sums", sum_is_one(&w.k[0], &w.k[1]));
    let raw = &spec.blocks;
    // A3 xi'_1 + A4 xi'_2 = 0
    if raw[2].det() != 0 && raw[3].det() != 0 {
        let x = raw[2].inv()?.row_mul(&s2[0].row());
        let y = raw[3].inv()?.row_mul(&s2[1].row());
        b.set("slope_relations", CheckOutcome::from_bool(rows_parallel(&x, &y)));
    } else {
        b.set("slope_relations", CheckOutcome::NotApplicable);
    }
    if let Some([t1, t2]) = &spec.shapes {
        let mut ok = parallel_col(&raw[0], t1, &raw[1], t2) && parallel_col(&raw[2], t1, &raw[3], t2);
        if let Some(p1) = &spec.primed[0] {
            ok &= parallel_col(p1, t1, &raw[0], t1);
        }
        b.set("shape_parallelism", CheckOutcome::from_bool(ok));
    } else {
        b.set("shape_parallelism", CheckOutcome::NotApplicable);
    }
    match hol {
        Some(h) => {
            let (ok, _) = holonomy_power_check(&h.t_prime[0], &raw[2].det(), &h.t_prime[1], &raw[3].det());
            b.set("holonomy_relation", CheckOutcome::from_bool(ok));
        }
        None => b.set("holonomy_relation", CheckOutcome::NotApplicable),
    }
    Ok(())
}

fn dependent(
    spec: &SubgroupSpec,
    s: &[OrientedSlope; 2],
    s2: &[OrientedSlope; 2],
    hol: Option<&HolonomyData>,
    b: &mut Builder,
) -> Result<(), ClassifyError> {
    let a = &spec.blocks;
    let p = &spec.primed;
    // (x) X^-1 parallel to (y) Y^-1 for each of the three relations
    let rel = |x: &OrientedSlope, xm: &RationalMatrix2, y: &OrientedSlope, ym: &RationalMatrix2| -> CheckOutcome {
        match (xm.inv(), ym.inv()) {
            (Ok(xi), Ok(yi)) => CheckOutcome::from_bool(rows_parallel(&xi.row_mul(&x.row()), &yi.row_mul(&y.row()))),
            _ => CheckOutcome::NotApplicable,
        }
    };
    b.set("slope_relations", rel(&s[0], &a[0], &s[1], &a[1]));
    if let (Some(p1), Some(p2)) = (&p[0], &p[1]) {
        b.set("slope_relations", rel(&s2[0], p1, &s2[1], p2));
    }
    if let Some(p3) = &p[2] {
        b.set("slope_relations", rel(&s[0], &a[2], &s2[0], p3));
    }

    let dets: Vec<Rational> = a.iter().map(|m| m.det()).collect();
    let pd: Vec<Option<Rational>> = p.iter().map(|m| m.as_ref().map(|x| x.det())).collect();
    match (&pd[0], &pd[1], &pd[2]) {
        (Some(p1), Some(p2), Some(p3)) if dets[1] != 0 && *p2 != 0 && *p3 != 0 => {
            let lhs = Rational::from(1) + Rational::from(&dets[0] / &dets[1]);
            let rhs = Rational::from(&dets[2] / p3) * (Rational::from(1) + Rational::from(p1 / p2));
            b.set("det_ratio_identity", CheckOutcome::from_bool(lhs == rhs));
        }
        _ => b.set("det_ratio_identity", CheckOutcome::NotApplicable),
    }

    if let Some([t1, t2]) = &spec.shapes {
        let mut ok = parallel_col(&a[0], t1, &a[1], t2);
        if let (Some(p1), Some(p2)) = (&p[0], &p[1]) {
            ok &= parallel_col(p1, t1, p2, t2);
        }
        if let Some(p3) = &p[2] {
            ok &= parallel_col(&a[2], t1, p3, t1);
        }
        b.set("shape_parallelism", CheckOutcome::from_bool(ok));
    } else {
        b.set("shape_parallelism", CheckOutcome::NotApplicable);
    }

    match hol {
        Some(h) => {
            let mut out = CheckOutcome::from_bool(holonomy_power_check(&h.t[0], &dets[0], &h.t[1], &dets[1]).0);
            if let (Some(p1), Some(p2)) = (&pd[0], &pd[1]) {
                out = out.and(CheckOutcome::from_bool(holonomy_power_check(&h.t_prime[0], p1, &h.t_prime[1], p2).0));
            }
            if let Some(p3) = &pd[2] {
                out = out.and(CheckOutcome::from_bool(holonomy_power_check(&h.t[0], &dets[2], &h.t_prime[0], p3).0));
            }
            b.set("holonomy_relation", out);
        }
        None => b.set("holonomy_relation", CheckOutcome::NotApplicable),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(p: i64, q: i64) -> OrientedSlope {
        OrientedSlope::new(p, q)
    }

    #[test]
    fn swap_blocks() {
        let z = RationalMatrix2::zero();
        let i = RationalMatrix2::identity();
        let spec = SubgroupSpec::coupled([z.clone(), i.clone(), i, z]);
        let s = [os(7, 2), os(5, 3)];
        let s2 = [os(5, 3), os(7, 2)];
        let w = verify_subgroup_relations(&spec, &s, &s2, None).unwrap();
        let k: Vec<Rational> = w.k.iter().map(|x| x.clone().unwrap()).collect();
        assert_eq!(k, vec![Rational::from(0), Rational::from(1), Rational::from(1), Rational::from(0)]);
        assert!(w.all_pass(), "{:?}", w.checks);
        assert_eq!(w.trichotomy_case, Some(1));
    }

    #[test]
    fn identity_blocks_fail() {
        let i = RationalMatrix2::identity();
        let spec = SubgroupSpec::coupled([i.clone(), i.clone(), i.clone(), i]);
        let w = verify_subgroup_relations(&spec, &[os(1, 0), os(1, 0)], &[os(1, 0), os(1, 0)], None).unwrap();
        assert_eq!(w.checks["det_trichotomy"], CheckOutcome::Fail);
        assert!(!w.all_pass());
    }

    #[test]
    fn completions_give_n() {
        let z = RationalMatrix2::zero();
        let i = RationalMatrix2::identity();
        let spec = SubgroupSpec::coupled([i.clone(), z.clone(), z, i]);
        let s = [OrientedSlope::with_completion(7, 2, 3, 1), OrientedSlope::with_completion(5, 3, 3, 2)];
        let w = verify_subgroup_relations(&spec, &s, &s, None).unwrap();
        assert_eq!(w.n[0], Some(Rational::new()));
        assert_eq!(w.l[3], Some(Rational::from(1)));
        assert!(w.all_pass());
        assert_eq!(w.trichotomy_case, Some(2));
    }

    #[test]
    fn holonomy_power() {
        let p = 256;
        let t = BigComplex::from_f64(1.5, 0.7, p);
        let t2 = t.powi(2).mul_i();
        let (ok, _) = holonomy_power_check(&t2, &Rational::from(1), &t, &Rational::from(2));
        assert!(ok);
        let (ok, _) = holonomy_power_check(&t2, &Rational::from(1), &t, &Rational::from(3));
        assert!(!ok);
    }
}
