//! Slope enumeration and the search for fillings with equal pseudo complex volume.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Float;

use crate::classify::{classify_pair, classify_single, ClassificationVerdict};
use crate::filling::{complex_length, cylinder_distance, filling_invariants, mod_reduce, solve_filling, FillingError, FillingSlope};
use crate::manifold::NZPotential;
use crate::relations::{detect_dependence, DependenceVerdict};
use crate::series::BigComplex;

/// Slopes with `min_norm <= |p| + |q| <= max_norm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlopeRange {
    pub min_norm: i64,
    pub max_norm: i64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid slope range [{0}, {1}]: need 2 <= min <= max")]
    BadRange(i64, i64),
    #[error(transparent)]
    Filling(#[from] FillingError),
}

impl SlopeRange {
    pub fn new(min_norm: i64, max_norm: i64) -> Result<Self, SearchError> {
        if min_norm < 2 || min_norm > max_norm {
            return Err(SearchError::BadRange(min_norm, max_norm));
        }
        Ok(SlopeRange { min_norm, max_norm })
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Canonical coprime slopes (`q >= 0`, `p > 0` when `q = 0`) ordered by norm,
/// then `p`, then `q`, each with its canonical completion.
pub fn enumerate_slopes(range: SlopeRange) -> Vec<FillingSlope> {
    let mut out = Vec::new();
    for norm in range.min_norm..=range.max_norm {
        let mut level = Vec::new();
        for q in 0..=norm {
            let a = norm - q;
            for p in if a == 0 { vec![0] } else { vec![-a, a] } {
                if (q == 0 && p <= 0) || gcd(p, q) != 1 {
                    continue;
                }
                level.push((p, q));
            }
        }
        level.sort();
        out.extend(level.into_iter().map(|(p, q)| FillingSlope::with_canonical_completion(p, q).expect("coprime")));
    }
    out
}

/// Invariants of one slope tuple, as used by the search.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub slopes: Vec<FillingSlope>,
    pub t: Vec<BigComplex>,
    pub pvol: BigComplex,
    pub cvol: BigComplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependenceEntry {
    /// Names drawn from `t1`, `t2`, `t1'`, `t2'`.
    pub subset: Vec<String>,
    pub verdict: DependenceVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub slopes: Vec<FillingSlope>,
    pub slopes_prime: Vec<FillingSlope>,
    pub pvol_diff: Float,
    pub cvol_diff: Float,
    pub dependence: Vec<DependenceEntry>,
    /// `None` when some cusp shape is not exact.
    pub verdict: Option<ClassificationVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub slopes: Vec<FillingSlope>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutput {
    pub reports: Vec<PairReport>,
    pub skipped: Vec<Skipped>,
    pub evaluated: usize,
}

/// Exponent bound for the dependence scan at `prec` bits.
pub fn dependence_bound(prec: u32) -> u32 {
    if prec >= 128 {
        20
    } else {
        10
    }
}

pub fn evaluate(m: &NZPotential, slopes: &[FillingSlope]) -> Result<Evaluated, FillingError> {
    let prec = m.prec();
    let sol = solve_filling(m, slopes, prec)?;
    let inv = filling_invariants(m, &sol)?;
    Ok(Evaluated { slopes: slopes.to_vec(), t: inv.t, pvol: inv.pvol, cvol: inv.cvol })
}

/// Per-cusp data for split potentials: the sum of complex lengths and the
/// volume correction are both additive over cusps.
#[derive(Clone)]
struct CuspEntry {
    t: BigComplex,
    lambda: BigComplex,
    correction: BigComplex,
}

fn cusp_curves(m: &NZPotential) -> Result<Vec<NZPotential>, FillingError> {
    (0..m.n_cusps)
        .map(|k| {
            let phi = m.phi.univariate_part(k);
            let mut c = NZPotential::from_phi(&m.label, phi, false);
            c.cusp_shapes = vec![m.cusp_shapes[k].clone()];
            Ok(c)
        })
        .collect()
}

fn cusp_entry(curve: &NZPotential, s: FillingSlope) -> Result<CuspEntry, FillingError> {
    let prec = curve.prec();
    let sol = solve_filling(curve, &[s], prec)?;
    let w = &sol.u[0].scale_i64(s.r) + &sol.v[0].scale_i64(s.s);
    let lambda = complex_length(&w, prec).ok_or(FillingError::BoundaryCase { cusp: 0 })?;
    let correction = crate::filling::volume_correction(curve, &sol.u)?;
    Ok(CuspEntry { t: lambda.exp(), lambda, correction })
}

fn cartesian(slopes: &[FillingSlope], n: usize) -> Vec<Vec<FillingSlope>> {
    let mut out: Vec<Vec<FillingSlope>> = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|prefix| slopes.iter().map(move |s| [prefix.clone(), vec![*s]].concat())).collect();
    }
    out
}

/// Invariants of every slope tuple in range; failures are collected, not fatal.
pub fn evaluate_range(m: &NZPotential, range: SlopeRange) -> Result<(Vec<Evaluated>, Vec<Skipped>), SearchError> {
    m.longitudes().map_err(FillingError::from)?;
    let slopes = enumerate_slopes(range);
    let tuples = cartesian(&slopes, m.n_cusps);
    let results: Vec<Result<Evaluated, Skipped>> = if m.sgi && m.n_cusps > 1 {
        let prec = m.prec();
        let curves = cusp_curves(m)?;
        let cache: Vec<Vec<Result<CuspEntry, String>>> =
            curves.iter().map(|c| slopes.par_iter().map(|s| cusp_entry(c, *s).map_err(|e| e.to_string())).collect()).collect();
        let index: std::collections::HashMap<FillingSlope, usize> = slopes.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let half_pi = Float::with_val(prec, BigComplex::pi(prec) / 2u32);
        tuples
            .par_iter()
            .map(|tuple| {
                let mut t = Vec::new();
                let mut sum = BigComplex::zero(prec);
                let mut corr = BigComplex::zero(prec);
                for (k, s) in tuple.iter().enumerate() {
                    match &cache[k][index[s]] {
                        Ok(e) => {
                            t.push(e.t.clone());
                            sum += &e.lambda;
                            corr += &e.correction;
                        }
                        Err(reason) => return Err(Skipped { slopes: tuple.clone(), reason: format!("cusp {k}: {reason}") }),
                    }
                }
                let pvol = mod_reduce(&(&m.base_cvol.with_prec(prec) - &sum.scale(&half_pi)));
                let cvol = mod_reduce(&(&pvol + &corr));
                Ok(Evaluated { slopes: tuple.clone(), t, pvol, cvol })
            })
            .collect()
    } else {
        tuples.par_iter().map(|tuple| evaluate(m, tuple).map_err(|e| Skipped { slopes: tuple.clone(), reason: e.to_string() })).collect()
    };
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(e) => ok.push(e),
            Err(s) => skipped.push(s),
        }
    }
    Ok((ok, skipped))
}

fn hol_names(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|k| format!("t{k}")).collect();
    v.extend((1..=n).map(|k| format!("t{k}'")));
    v
}

/// Report for two evaluated tuples.
pub fn pair_report(m: &NZPotential, a: &Evaluated, b: &Evaluated) -> PairReport {
    let prec = m.prec();
    let names = hol_names(m.n_cusps);
    let all: Vec<&BigComplex> = a.t.iter().chain(b.t.iter()).collect();
    let bound = dependence_bound(prec);
    let mut dependence = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let verdict =
                detect_dependence(&[all[i].clone(), all[j].clone()], bound, prec).unwrap_or(DependenceVerdict::IndependentUpTo(bound));
            dependence.push(DependenceEntry { subset: vec![names[i].clone(), names[j].clone()], verdict });
        }
    }
    let slopes: Vec<_> = a.slopes.iter().map(|s| s.slope()).collect();
    let slopes2: Vec<_> = b.slopes.iter().map(|s| s.slope()).collect();
    let exact = m.cusp_shapes.iter().all(|s| s.exact.is_some());
    let verdict = if !exact {
        None
    } else {
        let r = match m.n_cusps {
            1 => classify_single(&m.cusp_shapes[0], slopes[0], slopes2[0]),
            2 => classify_pair(&m.cusp_shapes[0], &m.cusp_shapes[1], [slopes[0], slopes[1]], [slopes2[0], slopes2[1]]),
            n => Ok(ClassificationVerdict::Undetermined { reason: format!("{n} cusps are not classified") }),
        };
        Some(r.unwrap_or_else(|e| ClassificationVerdict::Undetermined { reason: e.to_string() }))
    };
    PairReport {
        slopes: a.slopes.clone(),
        slopes_prime: b.slopes.clone(),
        pvol_diff: cylinder_distance(&a.pvol, &b.pvol),
        cvol_diff: cylinder_distance(&a.cvol, &b.cvol),
        dependence,
        verdict,
    }
}

fn cmp_re_im(a: &Evaluated, b: &Evaluated) -> Ordering {
    a.pvol
        .re()
        .partial_cmp(b.pvol.re())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.pvol.im().partial_cmp(b.pvol.im()).unwrap_or(Ordering::Equal))
        .then_with(|| a.slopes.cmp(&b.slopes))
}

/// Index pairs `(i, j)` within cylinder distance `tol`, found by sorting on
/// `Re pvol` and scanning a window of width `tol`.
pub fn bucket_pairs(ev: &[Evaluated], tol: &Float) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..ev.len()).collect();
    order.sort_by(|&i, &j| cmp_re_im(&ev[i], &ev[j]));
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            let gap = Float::with_val(ev[i].pvol.prec(), ev[j].pvol.re() - ev[i].pvol.re());
            if gap > *tol {
                break;
            }
            if cylinder_distance(&ev[i].pvol, &ev[j].pvol) <= *tol {
                out.push(normalize_pair(ev, i, j));
            }
        }
    }
    out.sort_by(|a, b| pair_key(ev, *a).cmp(&pair_key(ev, *b)));
    out
}

/// All-pairs comparison, for cross-checking [`bucket_pairs`].
pub fn brute_force_pairs(ev: &[Evaluated], tol: &Float) -> Vec<(usize, usize)> {
    let n = ev.len();
    let mut out: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).filter(move |&j| cylinder_distance(&ev[i].pvol, &ev[j].pvol) <= *tol).map(move |j| normalize_pair(ev, i, j))
        })
        .collect();
    out.sort_by(|a, b| pair_key(ev, *a).cmp(&pair_key(ev, *b)));
    out
}

fn normalize_pair(ev: &[Evaluated], i: usize, j: usize) -> (usize, usize) {
    if ev[i].slopes <= ev[j].slopes {
        (i, j)
    } else {
        (j, i)
    }
}

fn pair_key(ev: &[Evaluated], (i, j): (usize, usize)) -> (&[FillingSlope], &[FillingSlope]) {
    (&ev[i].slopes, &ev[j].slopes)
}

fn reports_for(m: &NZPotential, ev: &[Evaluated], pairs: &[(usize, usize)]) -> Vec<PairReport> {
    pairs.par_iter().map(|&(i, j)| pair_report(m, &ev[i], &ev[j])).collect()
}

/// All pairs of distinct slope tuples in range whose pseudo complex volumes
/// agree within `tol` on the cylinder.
pub fn search_equal_pvol(m: &NZPotential, range: SlopeRange, tol: &Float) -> Result<SearchOutput, SearchError> {
    let (ev, skipped) = evaluate_range(m, range)?;
    let pairs = bucket_pairs(&ev, tol);
    Ok(SearchOutput { reports: reports_for(m, &ev, &pairs), skipped, evaluated: ev.len() })
}

/// Same contract as [`search_equal_pvol`], by exhaustive comparison.
pub fn search_equal_pvol_brute_force(m: &NZPotential, range: SlopeRange, tol: &Float) -> Result<SearchOutput, SearchError> {
    let (ev, skipped) = evaluate_range(m, range)?;
    let pairs = brute_force_pairs(&ev, tol);
    Ok(SearchOutput { reports: reports_for(m, &ev, &pairs), skipped, evaluated: ev.len() })
}

/// Full report for one given pair of slope tuples.
pub fn verify_pair(m: &NZPotential, slopes: &[FillingSlope], slopes_prime: &[FillingSlope]) -> Result<PairReport, FillingError> {
    let a = evaluate(m, slopes)?;
    let b = evaluate(m, slopes_prime)?;
    Ok(pair_report(m, &a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::make_sgi;
    use crate::series::MultiSeries;

    const P: u32 = 256;

    fn curve(tau: (f64, f64), c4: (f64, f64)) -> MultiSeries {
        MultiSeries::from_terms(1, 9, P, [(vec![2], BigComplex::from_f64(tau.0, tau.1, P)), (vec![4], BigComplex::from_f64(c4.0, c4.1, P))])
            .unwrap()
    }

    #[test]
    fn norm_three() {
        let s: Vec<(i64, i64)> = enumerate_slopes(SlopeRange::new(3, 3).unwrap()).iter().map(|s| (s.p, s.q)).collect();
        let mut want = vec![(1, 2), (2, 1), (-1, 2), (-2, 1)];
        want.sort();
        assert_eq!(s, want);
        assert!(SlopeRange::new(5, 4).is_err());
        assert!(SlopeRange::new(1, 4).is_err());
        let all = enumerate_slopes(SlopeRange::new(2, 12).unwrap());
        for s in &all {
            assert_eq!(s.p * s.s - s.q * s.r, 1);
            assert!(s.q > 0 || (s.q == 0 && s.p > 0));
        }
    }

    #[test]
    fn swap_pairs_on_symmetric_sgi() {
        let phi = curve((0.1, 1.3), (0.5, 0.0));
        let m = make_sgi(&phi, &phi, BigComplex::zero(P)).unwrap();
        let range = SlopeRange::new(19, 20).unwrap();
        let tol = Float::with_val(P, 1e-20);
        let out = search_equal_pvol(&m, range, &tol).unwrap();
        assert!(!out.reports.is_empty());
        for r in &out.reports {
            assert_eq!(r.slopes[0], r.slopes_prime[1]);
            assert_eq!(r.slopes[1], r.slopes_prime[0]);
            assert!(r.cvol_diff < 1e-20);
        }
        // every swapped pair of distinct slopes is present
        let ok = out.evaluated;
        let n_slopes = enumerate_slopes(range).len();
        assert_eq!(ok, n_slopes * n_slopes);
        assert_eq!(out.reports.len(), n_slopes * (n_slopes - 1) / 2);
        let brute = search_equal_pvol_brute_force(&m, range, &tol).unwrap();
        assert_eq!(brute.reports, out.reports);
    }

    #[test]
    fn identical_tuples_verify_as_identity() {
        let phi = MultiSeries::from_terms(1, 9, P, [(vec![2], BigComplex::i(P)), (vec![4], BigComplex::from_f64(0.5, 0.0, P))]).unwrap();
        let mut m = NZPotential::from_phi("c", phi, false);
        m.cusp_shapes[0] = crate::manifold::CuspShape::quadratic(crate::classify::QuadraticNumber::i(), P);
        let s = FillingSlope::with_canonical_completion(41, 3).unwrap();
        let r = verify_pair(&m, &[s], &[s]).unwrap();
        assert!(r.pvol_diff.is_zero() && r.cvol_diff.is_zero());
        assert_eq!(r.verdict, Some(ClassificationVerdict::Identity));
    }

    // At order 9 the sigma-image pairs only agree to the truncation error; a
    // long enough curve pushes the difference far below working tolerances.
    #[test]
    fn sigma_pairs_at_high_order() {
        use crate::classify::{slope_action, symmetry_matrices, QuadraticNumber, Slope};
        use crate::manifold::make_symmetric_curve;
        let tau = QuadraticNumber::i();
        let sigma = symmetry_matrices(&tau).unwrap().remove(0);
        let seeds = std::collections::BTreeMap::from([(3u32, BigComplex::one(P))]);
        let m = make_symmetric_curve(&tau, &sigma, &seeds, 81, P).unwrap();
        let act = slope_action(&sigma).unwrap();
        for n in [50i64, 100, 200] {
            let img = act.apply_slope(Slope::new(n, 1).unwrap()).unwrap();
            let a = FillingSlope::with_canonical_completion(n, 1).unwrap();
            let b = FillingSlope::with_canonical_completion(img.p, img.q).unwrap();
            let r = verify_pair(&m, &[a], &[b]).unwrap();
            assert!(r.pvol_diff < 1e-25, "n = {n}: {}", r.pvol_diff);
            assert!(matches!(r.verdict, Some(ClassificationVerdict::SigmaOrbit { .. })), "{:?}", r.verdict);
        }
    }
}
