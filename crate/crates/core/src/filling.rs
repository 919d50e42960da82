//! Dehn filling equations and the invariants of a filling.

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::classify::Slope;
use crate::manifold::{ManifoldError, NZPotential};
use crate::series::{pow2, BigComplex, SeriesError};

/// Newton iteration cap.
pub const MAX_NEWTON_ITERATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FillingError {
    #[error("expected {expected} slopes, got {found}")]
    SlopeCountMismatch { expected: usize, found: usize },
    #[error("invalid slope ({p},{q},{r},{s}): need gcd(p,q)=1 and ps-qr=1")]
    InvalidSlope { p: i64, q: i64, r: i64, s: i64 },
    #[error("cusp {cusp}: {reason}")]
    OutsideNeighborhood { cusp: usize, reason: String },
    #[error("cusp {cusp}: core holonomy has modulus 1 to working precision")]
    BoundaryCase { cusp: usize },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Slope `(p, q)` with completion `(r, s)`, `ps - qr = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FillingSlope {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

impl FillingSlope {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Self, FillingError> {
        let det = p as i128 * s as i128 - q as i128 * r as i128;
        if gcd(p, q) != 1 || det != 1 {
            return Err(FillingError::InvalidSlope { p, q, r, s });
        }
        Ok(FillingSlope { p, q, r, s })
    }

    /// Completion with `0 <= r < |p|` (for `p = 0`, `(r, s) = (-q, 0)`).
    pub fn with_canonical_completion(p: i64, q: i64) -> Result<Self, FillingError> {
        if gcd(p, q) != 1 {
            return Err(FillingError::InvalidSlope { p, q, r: 0, s: 0 });
        }
        if p == 0 {
            // q = +-1 and -q r = 1
            return Self::new(p, q, -q, 0);
        }
        // p s - q r = 1  <=>  q r = -1 (mod p)
        let m = p.unsigned_abs() as i128;
        for r in 0..m {
            let num = 1 + q as i128 * r;
            if num % p as i128 == 0 {
                return Self::new(p, q, r as i64, (num / p as i128) as i64);
            }
        }
        unreachable!("coprime slopes always have a completion")
    }

    pub fn slope(&self) -> Slope {
        Slope::new(self.p, self.q).expect("coprime")
    }

    pub fn norm(&self) -> i64 {
        self.p.abs() + self.q.abs()
    }
}

impl std::fmt::Display for FillingSlope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FillingSolution {
    pub slopes: Vec<FillingSlope>,
    pub u: Vec<BigComplex>,
    pub v: Vec<BigComplex>,
    pub residual: Float,
    pub precision_bits: u32,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FillingInvariants {
    pub t: Vec<BigComplex>,
    pub lambda: Vec<BigComplex>,
    pub pvol: BigComplex,
    pub cvol: BigComplex,
}

/// Radius inside which the truncated curve is trusted for cusp `k`.
pub fn convergence_radius(m: &NZPotential, k: usize) -> Result<Float, FillingError> {
    let prec = m.prec();
    let l = m.longitudes()?;
    let tau = m.cusp_shapes[k].approx.abs();
    let mut best: Option<Float> = None;
    for (e, c) in l.v[k].terms() {
        let deg: u32 = e.iter().sum();
        if deg < 2 {
            continue;
        }
        let ratio = Float::with_val(prec, &tau / c.abs());
        let r = ratio.pow(Float::with_val(prec, 1) / (deg - 1));
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    let half = Float::with_val(prec, 0.5);
    let rho = match best {
        Some(r) => Float::with_val(prec, &r * &half),
        None => half.clone(),
    };
    Ok(rho.clamp(&Float::with_val(prec, 0.05), &half))
}

fn max_abs(xs: &[BigComplex]) -> Float {
    let mut m = Float::new(xs.first().map(|x| x.prec()).unwrap_or(64));
    for x in xs {
        let a = x.abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<BigComplex>>, mut b: Vec<BigComplex>) -> Option<Vec<BigComplex>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col].div(&a[col][col]);
            let (top, rest) = a.split_at_mut(row);
            for (x, p) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &(&f * p);
            }
            let t = &f * &b[col];
            b[row] -= &t;
        }
    }
    let mut x = vec![BigComplex::zero(b[0].prec()); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= &(&a[row][k] * &x[k]);
        }
        x[row] = acc.div(&a[row][row]);
    }
    Some(x)
}

fn residuals(
    m: &NZPotential,
    slopes: &[FillingSlope],
    u: &[BigComplex],
    prec: u32,
) -> Result<(Vec<BigComplex>, Vec<BigComplex>), FillingError> {
    let v = m.longitudes()?.eval(u)?;
    let tpi = BigComplex::two_pi_i(prec);
    let f = slopes.iter().zip(u.iter().zip(&v)).map(|(sl, (uk, vk))| &(&uk.scale_i64(sl.p) + &vk.scale_i64(sl.q)) + &tpi).collect();
    Ok((f, v))
}

/// Solves `p_k u_k + q_k v_k(u) + 2 pi i = 0` near the complete structure.
pub fn solve_filling(m: &NZPotential, slopes: &[FillingSlope], prec: u32) -> Result<FillingSolution, FillingError> {
    let n = m.n_cusps;
    if slopes.len() != n {
        return Err(FillingError::SlopeCountMismatch { expected: n, found: slopes.len() });
    }
    for s in slopes {
        FillingSlope::new(s.p, s.q, s.r, s.s)?;
    }
    let l = m.longitudes()?;
    let tpi = BigComplex::two_pi_i(prec);

    let mut u = Vec::with_capacity(n);
    for (k, s) in slopes.iter().enumerate() {
        let denom = &BigComplex::from_i64(s.p, 0, prec) + &m.cusp_shapes[k].approx.scale_i64(s.q);
        if denom.is_zero() {
            return Err(FillingError::OutsideNeighborhood { cusp: k, reason: "degenerate seed".into() });
        }
        let u0 = (-&tpi).div(&denom).with_prec(prec);
        let rho = convergence_radius(m, k)?;
        if u0.abs() > rho {
            return Err(FillingError::OutsideNeighborhood {
                cusp: k,
                reason: format!("seed |u0| = {:.4} exceeds trusted radius {:.4}", u0.abs().to_f64(), rho.to_f64()),
            });
        }
        u.push(u0);
    }

    let tol = pow2(32 - prec as i32, prec);
    let (mut f, mut v) = residuals(m, slopes, &u, prec)?;
    let mut norm = max_abs(&f);
    let mut iterations = 0;
    while norm > tol {
        if iterations >= MAX_NEWTON_ITERATIONS {
            return Err(FillingError::OutsideNeighborhood { cusp: 0, reason: "Newton did not converge in 64 iterations".into() });
        }
        iterations += 1;
        let jv = l.eval_jacobian(&u)?;
        let jac: Vec<Vec<BigComplex>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let mut e = jv[k][j].scale_i64(slopes[k].q);
                        if j == k {
                            e += &BigComplex::from_i64(slopes[k].p, 0, prec);
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let rhs: Vec<BigComplex> = f.iter().map(|x| -x).collect();
        let delta =
            solve_linear(jac, rhs).ok_or_else(|| FillingError::OutsideNeighborhood { cusp: 0, reason: "singular Jacobian".into() })?;
        let mut step = Float::with_val(prec, 1);
        loop {
            let trial: Vec<BigComplex> = u.iter().zip(&delta).map(|(x, d)| x + &d.scale(&step)).collect();
            let (ft, vt) = residuals(m, slopes, &trial, prec)?;
            let nt = max_abs(&ft);
            if nt < norm {
                u = trial;
                f = ft;
                v = vt;
                norm = nt;
                break;
            }
            step /= 2u32;
            if step < pow2(-40, prec) {
                return Err(FillingError::OutsideNeighborhood { cusp: 0, reason: "Newton failed to contract".into() });
            }
        }
    }
    if norm > tol {
        return Err(FillingError::OutsideNeighborhood { cusp: 0, reason: "residual above tolerance".into() });
    }
    Ok(FillingSolution { slopes: slopes.to_vec(), u, v, residual: norm, precision_bits: prec, iterations })
}

/// Canonical representative with imaginary part in `[0, pi^2)`.
pub fn mod_reduce(z: &BigComplex) -> BigComplex {
    let prec = z.prec();
    let pi2 = Float::with_val(prec, BigComplex::pi(prec).square());
    let k = Float::with_val(prec, z.im() / &pi2).floor();
    let im = Float::with_val(prec, z.im() - Float::with_val(prec, &k * &pi2));
    BigComplex::from_floats(z.re().clone(), im)
}

/// Distance on the cylinder `C / i pi^2 Z`.
pub fn cylinder_distance(a: &BigComplex, b: &BigComplex) -> Float {
    let prec = a.prec().max(b.prec());
    let pi2 = Float::with_val(prec, BigComplex::pi(prec).square());
    let dre = Float::with_val(prec, a.re() - b.re());
    let mut dim = Float::with_val(prec, a.im() - b.im());
    dim = Float::with_val(prec, &dim - Float::with_val(prec, Float::with_val(prec, &dim / &pi2).floor() * &pi2));
    let other = Float::with_val(prec, &pi2 - &dim);
    if other < dim {
        dim = other;
    }
    Float::with_val(prec, dre.hypot(&dim))
}

/// Complex length from `w = r u + s v`: `Re > 0`, `Im` in `(-pi, pi]`.
pub fn complex_length(w: &BigComplex, prec: u32) -> Option<BigComplex> {
    let tol = pow2(32 - prec as i32, prec);
    if Float::with_val(prec, w.re().abs_ref()) <= tol {
        return None;
    }
    let lam = if w.re().is_sign_positive() { w.clone() } else { -w };
    let pi = BigComplex::pi(prec);
    let two_pi = Float::with_val(prec, &pi * 2u32);
    // shift Im into (-pi, pi]
    let k = Float::with_val(prec, Float::with_val(prec, &pi - lam.im()) / &two_pi).floor();
    let im = Float::with_val(prec, lam.im() + Float::with_val(prec, &k * &two_pi));
    Some(BigComplex::from_floats(lam.re().clone(), im))
}

/// `sum_k u_k v_k - Phi(u)`, an antiderivative of `sum_k (u_k dv_k - v_k du_k)`.
pub fn volume_correction(m: &NZPotential, u: &[BigComplex]) -> Result<BigComplex, FillingError> {
    let v = m.longitudes()?.eval(u)?;
    let mut acc = m.phi.eval(u)?;
    acc = -acc;
    for (uk, vk) in u.iter().zip(&v) {
        acc += &(uk * vk);
    }
    Ok(acc)
}

/// Core holonomies, complex lengths, pseudo complex volume and complex volume.
pub fn filling_invariants(m: &NZPotential, sol: &FillingSolution) -> Result<FillingInvariants, FillingError> {
    let prec = sol.precision_bits;
    let mut t = Vec::new();
    let mut lambda = Vec::new();
    let mut sum = BigComplex::zero(prec);
    for (k, s) in sol.slopes.iter().enumerate() {
        let w = &sol.u[k].scale_i64(s.r) + &sol.v[k].scale_i64(s.s);
        let lam = complex_length(&w, prec).ok_or(FillingError::BoundaryCase { cusp: k })?;
        sum += &lam;
        t.push(lam.exp());
        lambda.push(lam);
    }
    let half_pi = Float::with_val(prec, BigComplex::pi(prec) / 2u32);
    let pvol = mod_reduce(&(&m.base_cvol.with_prec(prec) - &sum.scale(&half_pi)));
    let cvol = mod_reduce(&(&pvol + &volume_correction(m, &sol.u)?));
    Ok(FillingInvariants { t, lambda, pvol, cvol })
}

/// Complex volume of the filling.
pub fn complex_volume(m: &NZPotential, sol: &FillingSolution) -> Result<BigComplex, FillingError> {
    Ok(filling_invariants(m, sol)?.cvol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MultiSeries;

    const P: u32 = 256;

    fn curve() -> NZPotential {
        let phi = MultiSeries::from_terms(1, 9, P, [(vec![2], BigComplex::i(P)), (vec![4], BigComplex::from_f64(0.5, 0.0, P))]).unwrap();
        NZPotential::from_phi("curve", phi, false)
    }

    #[test]
    fn slope_validation_and_completion() {
        assert!(FillingSlope::new(2, 4, 0, 1).is_err());
        assert!(FillingSlope::new(2, 1, 1, 2).is_err());
        assert_eq!(FillingSlope::with_canonical_completion(2, 1).unwrap(), FillingSlope { p: 2, q: 1, r: 1, s: 1 });
        assert_eq!(FillingSlope::with_canonical_completion(0, 1).unwrap(), FillingSlope { p: 0, q: 1, r: -1, s: 0 });
        for (p, q) in [(7, 3), (-5, 2), (1, 0), (13, -4), (-1, 9)] {
            let s = FillingSlope::with_canonical_completion(p, q).unwrap();
            assert!(s.r >= 0 && s.r < p.abs().max(1));
        }
    }

    #[test]
    fn mod_reduce_examples() {
        let pi2 = Float::with_val(P, BigComplex::pi(P).square());
        let z = BigComplex::from_floats(Float::with_val(P, 1), Float::with_val(P, &pi2 * 3u32));
        let r = mod_reduce(&z);
        assert_eq!(r.re(), &1);
        assert!(Float::with_val(P, r.im().abs_ref()) < pow2(-240, P));

        let z = BigComplex::from_floats(Float::with_val(P, 1), Float::with_val(P, &pi2 / 2u32));
        assert_eq!(mod_reduce(&z), z);

        let z = BigComplex::from_floats(Float::new(P), -Float::with_val(P, &pi2 / 2u32));
        let want = BigComplex::from_floats(Float::new(P), Float::with_val(P, &pi2 / 2u32));
        assert!(mod_reduce(&z).dist(&want) < pow2(-240, P));
    }

    #[test]
    fn solves_large_slope() {
        let m = curve();
        let s = FillingSlope::new(100, 1, -1, 0).unwrap();
        let sol = solve_filling(&m, &[s], P).unwrap();
        assert!(sol.residual < pow2(-224, P));
        let inv = filling_invariants(&m, &sol).unwrap();
        assert!(inv.lambda[0].re().is_sign_positive());
        assert!(inv.t[0].abs() > 1);
        // Re lambda close to 2 pi / (n^2 + 1)
        let approx = 2.0 * std::f64::consts::PI / 10001.0;
        assert!((inv.lambda[0].re().to_f64() / approx - 1.0).abs() < 1e-3);

        let far = FillingSlope::new(1_000_000, 1, -1, 0).unwrap();
        let sol = solve_filling(&m, &[far], P).unwrap();
        assert!(sol.u[0].abs() < 1e-5);
    }

    #[test]
    fn small_slope_is_rejected() {
        let m = curve();
        let s = FillingSlope::new(1, 0, 0, 1).unwrap();
        assert!(matches!(solve_filling(&m, &[s], P), Err(FillingError::OutsideNeighborhood { .. })));
        assert!(matches!(solve_filling(&m, &[], P), Err(FillingError::SlopeCountMismatch { .. })));
    }

    #[test]
    fn completion_does_not_matter() {
        let m = curve();
        let a = FillingSlope::new(37, 5, 22, 3).unwrap();
        let b = FillingSlope::new(37, 5, 22 + 37, 3 + 5).unwrap();
        let ia = filling_invariants(&m, &solve_filling(&m, &[a], P).unwrap()).unwrap();
        let ib = filling_invariants(&m, &solve_filling(&m, &[b], P).unwrap()).unwrap();
        assert!(ia.lambda[0].dist(&ib.lambda[0]) < pow2(-200, P));
        assert!(cylinder_distance(&ia.pvol, &ib.pvol) < pow2(-200, P));
    }

    #[test]
    fn zero_point_volume() {
        let m = curve();
        let c = volume_correction(&m, &[BigComplex::zero(P)]).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn cylinder_wraps() {
        let pi2 = Float::with_val(P, BigComplex::pi(P).square());
        let a = BigComplex::from_floats(Float::new(P), Float::with_val(P, 0.01));
        let b = BigComplex::from_floats(Float::new(P), Float::with_val(P, &pi2 - 0.01));
        assert!(cylinder_distance(&a, &b) < 0.021);
    }
}
