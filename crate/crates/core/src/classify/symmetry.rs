//! Symmetry matrices of special cusp shapes and relative dependence of shapes.

use rug::{Float, Integer, Rational};

use super::exact::{QuadraticNumber, RationalMatrix2, Slope};
use super::ClassifyError;
use crate::relations::{integer_kernel, lll_reduce};
use crate::series::{pow2, BigComplex};

/// The unique-up-to-sign `sigma = [[a, b], [c, d]]` with `a + b tau` a
/// primitive 4th (field Q(sqrt(-1))) or 6th (field Q(sqrt(-3))) root of unity
/// and `tau (a + b tau) = c + d tau`. Empty for every other field.
pub fn symmetry_matrices(tau: &QuadraticNumber) -> Result<Vec<RationalMatrix2>, ClassifyError> {
    if !tau.in_upper_half_plane() {
        return Err(ClassifyError::NotUpperHalfPlane);
    }
    let m = &tau.a;
    let n = &tau.b;
    // zeta = re + im_over_sqrt_d * sqrt(-d)
    let (re, im_coeff) = match tau.d {
        1 => (Rational::new(), Rational::from(1)),
        3 => (Rational::from((1, 2)), Rational::from((1, 2))),
        _ => return Ok(Vec::new()),
    };
    let b = Rational::from(&im_coeff / n);
    let a = re.clone() - Rational::from(&b * m);
    let d = Rational::from(&re * 2u32) - &a;
    let c = (Rational::from(&a * &d) - 1u32) / &b;
    Ok(vec![RationalMatrix2::new(a, b, c, d)])
}

/// Matrix acting on filling slopes induced by a curve symmetry `sigma`.
///
/// If `(u', v') = sigma (u, v)` preserves the curve, slope `(p, q)` at `(u, v)`
/// becomes `(p, q) sigma^-1` at `(u', v')`, i.e. the column action of
/// `sigma^-T`. Complex lengths agree because the completion moves the same way.
pub fn slope_action(sigma: &RationalMatrix2) -> Result<RationalMatrix2, ClassifyError> {
    Ok(sigma.inv()?.transpose())
}

/// Order of the slope action modulo sign (`-I` acts trivially on slopes).
pub fn projective_order(m: &RationalMatrix2) -> Option<u32> {
    let id = RationalMatrix2::identity();
    let neg = id.neg();
    let mut acc = m.clone();
    for k in 1..=12u32 {
        if acc == id || acc == neg {
            return Some(k);
        }
        acc = acc.mul(m);
    }
    None
}

/// Smallest `i` in `1..order` with `action^i (s) = s2`.
pub fn orbit_power(action: &RationalMatrix2, s: Slope, s2: Slope) -> Result<Option<u32>, ClassifyError> {
    let order = projective_order(action).unwrap_or(12);
    let mut cur = s;
    for i in 1..order {
        cur = action.apply_slope(cur)?;
        if cur == s2 {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn l1(v: &[Integer]) -> Integer {
    v.iter().fold(Integer::new(), |acc, x| acc + Integer::from(x.abs_ref()))
}

fn canonical_sign(v: Vec<Integer>) -> Vec<Integer> {
    match v.iter().find(|x| **x != 0) {
        Some(x) if *x < 0 => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

/// Preference order: smaller L1 norm, then closer to diagonal, then lexicographic.
fn better(a: &[Integer], b: &[Integer]) -> bool {
    let key = |v: &[Integer]| (l1(v), Integer::from(v[1].abs_ref()) + Integer::from(v[2].abs_ref()));
    let (ka, kb) = (key(a), key(b));
    ka < kb || (ka == kb && a < b)
}

/// Smallest integer `[[a, b], [c, d]]` with `tau1 = (a tau2 + b) / (c tau2 + d)`
/// among small combinations of a reduced kernel basis.
fn smallest_solution(basis: &[Vec<Integer>]) -> Option<RationalMatrix2> {
    let mut best: Option<Vec<Integer>> = None;
    let span: i64 = if basis.len() > 1 { 6 } else { 0 };
    for x in -6i64..=6 {
        for y in -span..=span {
            let mut v = vec![Integer::new(); 4];
            for i in 0..4 {
                v[i] = Integer::from(&basis[0][i] * x);
                if basis.len() > 1 {
                    v[i] += Integer::from(&basis[1][i] * y);
                }
            }
            // ad - bc must not vanish
            let det = Integer::from(&v[0] * &v[3]) - Integer::from(&v[1] * &v[2]);
            if det == 0 {
                continue;
            }
            let v = canonical_sign(v);
            if best.as_ref().is_none_or(|b| better(&v, b)) {
                best = Some(v);
            }
        }
    }
    best.map(|v| {
        let r: Vec<Rational> = v.into_iter().map(Rational::from).collect();
        RationalMatrix2::new(r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone())
    })
}

/// Exact relative dependence of two quadratic shapes.
pub fn relatively_dependent(tau1: &QuadraticNumber, tau2: &QuadraticNumber) -> Option<RationalMatrix2> {
    if !tau1.in_upper_half_plane() || !tau2.in_upper_half_plane() || tau1.d != tau2.d {
        return None;
    }
    // c tau1 tau2 + d tau1 - a tau2 - b = 0 in unknowns (a, b, c, d)
    let one = QuadraticNumber::rational(Rational::from(1), tau1.d);
    let cols = [tau2.neg(), one.neg(), tau1.mul(tau2).ok()?, tau1.clone()];
    let mut den = Integer::from(1);
    for q in &cols {
        den.lcm_mut(q.a.denom());
        den.lcm_mut(q.b.denom());
    }
    let row = |f: &dyn Fn(&QuadraticNumber) -> &Rational| -> Vec<Integer> {
        cols.iter().map(|q| (Rational::from(f(q) * &den)).numer().clone()).collect()
    };
    let m = vec![row(&|q| &q.a), row(&|q| &q.b)];
    let kernel = integer_kernel(&m, 4);
    if kernel.is_empty() {
        return None;
    }
    smallest_solution(&kernel)
}

/// Numeric relative dependence for shapes known only approximately, with
/// entries bounded by `bound`.
pub fn relatively_dependent_numeric(tau1: &BigComplex, tau2: &BigComplex, bound: u32, prec: u32) -> Option<RationalMatrix2> {
    let wp = prec + 32;
    let t1 = tau1.with_prec(wp);
    let t2 = tau2.with_prec(wp);
    let one = BigComplex::one(wp);
    let vals = [-&t2, -&one, &t1 * &t2, t1.clone()];
    let scale = pow2((prec / 2) as i32, wp);
    let to_int = |x: &Float| -> Integer { Float::with_val(wp, x * &scale).round().to_integer().expect("finite") };
    let rows: Vec<Vec<Integer>> = vals
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let mut r = vec![Integer::new(); 6];
            r[i] = Integer::from(1);
            r[4] = to_int(z.re());
            r[5] = to_int(z.im());
            r
        })
        .collect();
    let reduced = lll_reduce(&rows)?;
    let tol = pow2(64 - prec as i32, prec);
    let mut good: Vec<Vec<Integer>> = Vec::new();
    for r in reduced {
        let v: Vec<Integer> = r[..4].to_vec();
        if v.iter().any(|x| Integer::from(x.abs_ref()) > bound) || v.iter().all(|x| *x == 0) {
            continue;
        }
        let mut acc = BigComplex::zero(wp);
        for (x, z) in v.iter().zip(&vals) {
            acc += &z.scale(&Float::with_val(wp, x));
        }
        if acc.abs() <= tol {
            good.push(v);
        }
    }
    if good.is_empty() {
        return None;
    }
    smallest_solution(&good)
}

/// Slope action relating the two cusps when `tau1 = M tau2`: the linear map
/// `[[d, c], [b, a]]` sends `(1, tau2)` to a multiple of `(1, tau1)`, so slopes
/// move by its inverse transpose.
pub fn rho_from_dependence(m: &RationalMatrix2) -> Result<RationalMatrix2, ClassifyError> {
    let [[a, b], [c, d]] = &m.0;
    let bmat = RationalMatrix2::new(d.clone(), c.clone(), b.clone(), a.clone());
    slope_action(&bmat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadraticNumber {
        QuadraticNumber::parse(s).unwrap()
    }

    #[test]
    fn known_symmetries() {
        assert_eq!(symmetry_matrices(&q("i")).unwrap(), vec![RationalMatrix2::from_ints(0, 1, -1, 0)]);
        let s = symmetry_matrices(&q("1+i")).unwrap();
        assert_eq!(s, vec![RationalMatrix2::from_ints(-1, 1, -2, 1)]);
        assert_eq!(s[0].mul(&s[0]), RationalMatrix2::identity().neg());
        let s = symmetry_matrices(&QuadraticNumber::omega()).unwrap();
        assert_eq!(s, vec![RationalMatrix2::from_ints(0, 1, -1, 1)]);
        assert_eq!(s[0].pow(3).unwrap(), RationalMatrix2::identity().neg());
        assert!(symmetry_matrices(&q("√-2")).unwrap().is_empty());
        assert!(symmetry_matrices(&q("-i")).is_err());
    }

    #[test]
    fn dependence_of_quadratic_shapes() {
        assert_eq!(relatively_dependent(&q("i"), &q("2i")), Some(RationalMatrix2::from_ints(1, 0, 0, 2)));
        assert_eq!(relatively_dependent(&q("√-2"), &q("√-5")), None);
        assert_eq!(relatively_dependent(&q("i"), &q("i")), Some(RationalMatrix2::identity()));
        assert_eq!(relatively_dependent(&q("√-7"), &q("√-7")), Some(RationalMatrix2::identity()));
        let m = relatively_dependent(&q("1/3+2√-3"), &q("5+√-3")).unwrap();
        let t2 = q("5+√-3");
        let [[a, b], [c, d]] = &m.0;
        let num = t2.scale(a).add(&QuadraticNumber::rational(b.clone(), 3)).unwrap();
        let den = t2.scale(c).add(&QuadraticNumber::rational(d.clone(), 3)).unwrap();
        assert_eq!(num.div(&den).unwrap(), q("1/3+2√-3"));
    }

    #[test]
    fn numeric_dependence() {
        let p = 256;
        let t = BigComplex::from_f64(0.3, 1.7, p);
        let two_t = t.scale_i64(2);
        let m = relatively_dependent_numeric(&two_t, &t, 20, p).unwrap();
        assert_eq!(m, RationalMatrix2::from_ints(2, 0, 0, 1));
        let e = BigComplex::from_f64(0.1234567, 1.3, p);
        let pi_ish = BigComplex::from_f64(-0.731, 0.917, p);
        assert!(relatively_dependent_numeric(&e, &pi_ish, 20, p).is_none());
    }

    #[test]
    fn rho_for_scaled_shapes() {
        // tau1 = 2 tau2: cusp-2 slope p/q corresponds to 2p/q on cusp 1
        let rho = rho_from_dependence(&RationalMatrix2::from_ints(2, 0, 0, 1)).unwrap();
        assert_eq!(rho.apply_slope(Slope::new(3, 5).unwrap()).unwrap(), Slope::new(6, 5).unwrap());
        assert_eq!(rho_from_dependence(&RationalMatrix2::identity()).unwrap(), RationalMatrix2::identity());
    }

    #[test]
    fn slope_action_of_i_is_sigma() {
        let s = RationalMatrix2::from_ints(0, 1, -1, 0);
        assert_eq!(slope_action(&s).unwrap(), s);
        assert_eq!(projective_order(&s), Some(2));
        assert_eq!(projective_order(&RationalMatrix2::from_ints(0, 1, -1, 1)), Some(3));
    }
}
