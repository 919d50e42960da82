//! Truncated multivariate power series with sparse storage.

use std::collections::BTreeMap;

use super::{BigComplex, SeriesError};

/// Exponent tuple, one entry per variable.
pub type Exponent = Vec<u32>;

/// Sparse power series in `n_vars` variables truncated at total degree `order`.
///
/// Canonical form: no stored coefficient is exactly zero and every stored
/// exponent has total degree at most `order`. All constructors and
/// operations maintain it, so `==` compares series structurally.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSeries {
    n_vars: usize,
    order: u32,
    prec: u32,
    terms: BTreeMap<Exponent, BigComplex>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl MultiSeries {
    pub fn zero(n_vars: usize, order: u32, prec: u32) -> Self {
        assert!(n_vars > 0, "series needs at least one variable");
        MultiSeries { n_vars, order, prec, terms: BTreeMap::new() }
    }

    pub fn constant(c: BigComplex, n_vars: usize, order: u32) -> Self {
        let prec = c.prec();
        let mut s = Self::zero(n_vars, order, prec);
        s.insert(vec![0; n_vars], c);
        s
    }

    /// The coordinate function `u_k` (0-based `k`).
    pub fn variable(k: usize, n_vars: usize, order: u32, prec: u32) -> Self {
        assert!(k < n_vars);
        let mut e = vec![0; n_vars];
        e[k] = 1;
        Self::monomial(e, BigComplex::one(prec), order)
    }

    pub fn monomial(exp: Exponent, c: BigComplex, order: u32) -> Self {
        let mut s = Self::zero(exp.len(), order, c.prec());
        s.insert(exp, c);
        s
    }

    /// Builds a series from terms, summing duplicates and dropping anything
    /// above the truncation order.
    pub fn from_terms<I>(n_vars: usize, order: u32, prec: u32, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (Exponent, BigComplex)>,
    {
        let mut s = Self::zero(n_vars, order, prec);
        for (e, c) in terms {
            if e.len() != n_vars {
                return Err(SeriesError::VarCountMismatch { expected: n_vars, found: e.len() });
            }
            s.add_term(e, &c);
        }
        Ok(s)
    }

    fn insert(&mut self, e: Exponent, c: BigComplex) {
        if degree(&e) <= self.order && !c.is_zero() {
            self.terms.insert(e, c);
        }
    }

    fn add_term(&mut self, e: Exponent, c: &BigComplex) {
        if degree(&e) > self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigComplex)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Option<&BigComplex> {
        self.terms.get(e)
    }

    /// Coefficient, or zero when absent.
    pub fn coeff_or_zero(&self, e: &[u32]) -> BigComplex {
        self.coeff(e).cloned().unwrap_or_else(|| BigComplex::zero(self.prec))
    }

    pub fn constant_term(&self) -> BigComplex {
        self.coeff_or_zero(&vec![0; self.n_vars])
    }

    /// Highest total degree present, `None` for the zero series.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).max()
    }

    /// Same terms, new truncation order (terms above it are dropped).
    pub fn with_order(&self, order: u32) -> Self {
        let mut s = Self::zero(self.n_vars, order, self.prec);
        for (e, c) in &self.terms {
            s.insert(e.clone(), c.clone());
        }
        s
    }

    /// Re-rounds every coefficient to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        let mut s = Self::zero(self.n_vars, self.order, prec);
        for (e, c) in &self.terms {
            s.insert(e.clone(), c.with_prec(prec));
        }
        s
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.n_vars != other.n_vars {
            return Err(SeriesError::VarCountMismatch { expected: self.n_vars, found: other.n_vars });
        }
        if self.order != other.order {
            return Err(SeriesError::OrderMismatch { left: self.order, right: other.order });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let mut s = self.clone();
        s.prec = s.prec.max(other.prec);
        for (e, c) in &other.terms {
            s.add_term(e.clone(), c);
        }
        Ok(s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -&*c;
        }
        s
    }

    pub fn scale(&self, k: &BigComplex) -> Self {
        let mut s = Self::zero(self.n_vars, self.order, self.prec.max(k.prec()));
        for (e, c) in &self.terms {
            s.insert(e.clone(), c * k);
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        let mut s = Self::zero(self.n_vars, self.order, self.prec.max(other.prec));
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            for (eb, cb) in &other.terms {
                if da + degree(eb) > self.order {
                    continue;
                }
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                s.add_term(e, &(ca * cb));
            }
        }
        Ok(s)
    }

    /// Formal partial derivative in variable `k` (0-based), kept at the same
    /// truncation order.
    pub fn partial(&self, k: usize) -> Result<Self, SeriesError> {
        if k >= self.n_vars {
            return Err(SeriesError::BadIndex { index: k, n_vars: self.n_vars });
        }
        let mut s = Self::zero(self.n_vars, self.order, self.prec);
        for (e, c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            s.add_term(e2, &c.scale_i64(e[k] as i64));
        }
        Ok(s)
    }

    /// Substitutes `subs[k]` for `u_k`. Each substitute must have zero
    /// constant term so the truncated result is exact through the order.
    pub fn compose(&self, subs: &[MultiSeries]) -> Result<Self, SeriesError> {
        if subs.len() != self.n_vars {
            return Err(SeriesError::VarCountMismatch { expected: self.n_vars, found: subs.len() });
        }
        let target_vars = subs.first().map(|s| s.n_vars).unwrap_or(self.n_vars);
        let order = subs.first().map(|s| s.order).unwrap_or(self.order);
        for (i, sub) in subs.iter().enumerate() {
            if sub.n_vars != target_vars {
                return Err(SeriesError::VarCountMismatch { expected: target_vars, found: sub.n_vars });
            }
            if sub.order != order {
                return Err(SeriesError::OrderMismatch { left: order, right: sub.order });
            }
            if !sub.constant_term().is_zero() {
                return Err(SeriesError::NonzeroConstantTerm { index: i });
            }
        }
        let prec = subs.iter().map(|s| s.prec).fold(self.prec, u32::max);
        let one = Self::constant(BigComplex::one(prec), target_vars, order);

        // powers[k][j] = subs[k]^j, built lazily up to the largest exponent used.
        let mut powers: Vec<Vec<MultiSeries>> = vec![vec![one.clone()]; self.n_vars];
        let mut out = Self::zero(target_vars, order, prec);
        for (e, c) in &self.terms {
            // Substitutes have no constant term, so u^e has minimum degree |e|.
            if degree(e) > order {
                continue;
            }
            let mut term = Self::constant(c.clone(), target_vars, order);
            for (k, &ek) in e.iter().enumerate() {
                while powers[k].len() <= ek as usize {
                    let next = powers[k].last().unwrap().mul(&subs[k])?;
                    powers[k].push(next);
                }
                if ek > 0 {
                    term = term.mul(&powers[k][ek as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Evaluates at a point.
    pub fn eval(&self, point: &[BigComplex]) -> Result<BigComplex, SeriesError> {
        if point.len() != self.n_vars {
            return Err(SeriesError::VarCountMismatch { expected: self.n_vars, found: point.len() });
        }
        let prec = point.iter().map(|p| p.prec()).fold(self.prec, u32::max);
        if self.n_vars == 1 {
            return Ok(self.horner(&point[0], prec));
        }
        let mut pows: Vec<Vec<BigComplex>> = Vec::with_capacity(self.n_vars);
        for (k, x) in point.iter().enumerate() {
            let top = self.terms.keys().map(|e| e[k]).max().unwrap_or(0) as usize;
            let mut row = vec![BigComplex::one(prec)];
            for j in 1..=top {
                let next = &row[j - 1] * x;
                row.push(next);
            }
            pows.push(row);
        }
        let mut acc = BigComplex::zero(prec);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    t *= &pows[k][ek as usize];
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    fn horner(&self, x: &BigComplex, prec: u32) -> BigComplex {
        let top = match self.max_degree() {
            Some(d) => d,
            None => return BigComplex::zero(prec),
        };
        let mut acc = BigComplex::zero(prec);
        for j in (0..=top).rev() {
            acc *= x;
            if let Some(c) = self.terms.get(&vec![j]) {
                acc += c;
            }
        }
        acc
    }

    /// True when every term involves at most one variable.
    pub fn is_separable(&self) -> bool {
        self.terms.keys().all(|e| e.iter().filter(|&&x| x > 0).count() <= 1)
    }

    /// Restriction to variable `k`, as a univariate series.
    pub fn univariate_part(&self, k: usize) -> Self {
        let mut s = Self::zero(1, self.order, self.prec);
        for (e, c) in &self.terms {
            if e.iter().enumerate().all(|(i, &x)| i == k || x == 0) {
                s.insert(vec![e[k]], c.clone());
            }
        }
        s
    }

    /// Embeds a univariate series as variable `k` of an `n_vars` series.
    pub fn embed(&self, k: usize, n_vars: usize) -> Result<Self, SeriesError> {
        if self.n_vars != 1 {
            return Err(SeriesError::VarCountMismatch { expected: 1, found: self.n_vars });
        }
        if k >= n_vars {
            return Err(SeriesError::BadIndex { index: k, n_vars });
        }
        let mut s = Self::zero(n_vars, self.order, self.prec);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; n_vars];
            e2[k] = e[0];
            s.insert(e2, c.clone());
        }
        Ok(s)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> rug::Float {
        let mut m = rug::Float::new(self.prec);
        for c in self.terms.values() {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    fn uni(order: u32, coeffs: &[(u32, BigComplex)]) -> MultiSeries {
        MultiSeries::from_terms(1, order, P, coeffs.iter().map(|(e, c)| (vec![*e], c.clone()))).unwrap()
    }

    #[test]
    fn add_and_mul_small_cases() {
        let u1 = MultiSeries::variable(0, 2, 3, P);
        let u2 = MultiSeries::variable(1, 2, 3, P);
        let sum = u1.add(&u2).unwrap();
        assert_eq!(sum.len(), 2);

        let a = uni(3, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        let b = uni(3, &[(0, c(1.0, 0.0)), (1, c(-1.0, 0.0))]);
        assert_eq!(a.mul(&b).unwrap(), uni(3, &[(0, c(1.0, 0.0)), (2, c(-1.0, 0.0))]));

        let u1 = MultiSeries::variable(0, 2, 2, P);
        let u2 = MultiSeries::variable(1, 2, 2, P);
        let s = u1.add(&u2).unwrap();
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq.coeff(&[1, 1]), Some(&c(2.0, 0.0)));
        assert_eq!(sq.coeff(&[2, 0]), Some(&c(1.0, 0.0)));
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn mismatches_are_errors() {
        let a = MultiSeries::variable(0, 2, 3, P);
        let b = MultiSeries::variable(0, 1, 3, P);
        let c3 = MultiSeries::variable(0, 2, 4, P);
        assert!(matches!(a.add(&b), Err(SeriesError::VarCountMismatch { .. })));
        assert!(matches!(a.mul(&c3), Err(SeriesError::OrderMismatch { .. })));
        assert!(matches!(a.partial(2), Err(SeriesError::BadIndex { .. })));
    }

    #[test]
    fn partials() {
        let t1 = c(0.0, 1.0);
        let t2 = c(0.0, 2.0);
        let phi = MultiSeries::from_terms(2, 9, P, [(vec![2, 0], t1.clone()), (vec![0, 2], t2)]).unwrap();
        let d = phi.partial(0).unwrap();
        assert_eq!(d, MultiSeries::monomial(vec![1, 0], t1.scale_i64(2), 9));

        let s = MultiSeries::monomial(vec![2, 2], c(1.0, 0.0), 9);
        assert_eq!(s.partial(1).unwrap(), MultiSeries::monomial(vec![2, 1], c(2.0, 0.0), 9));

        let k = MultiSeries::constant(c(3.0, 0.0), 2, 9);
        assert!(k.partial(0).unwrap().is_empty());
    }

    #[test]
    fn compose_examples() {
        let i = BigComplex::i(P);
        let s = uni(5, &[(1, c(1.0, 0.0)), (3, c(1.0, 0.0))]);
        let sub = uni(5, &[(1, i.clone())]);
        let r = s.compose(&[sub]).unwrap();
        assert_eq!(r, uni(5, &[(1, i.clone()), (3, -&i)]));

        let s = MultiSeries::from_terms(2, 4, P, [(vec![1, 1], c(1.0, 0.0)), (vec![2, 0], c(1.0, 0.0))]).unwrap();
        let r = s.compose(&[MultiSeries::variable(0, 2, 4, P), MultiSeries::zero(2, 4, P)]).unwrap();
        assert_eq!(r, MultiSeries::monomial(vec![2, 0], c(1.0, 0.0), 4));

        let s = uni(4, &[(2, c(1.0, 0.0))]);
        let sub = uni(4, &[(1, c(1.0, 0.0)), (3, c(1.0, 0.0))]);
        assert_eq!(s.compose(&[sub]).unwrap(), uni(4, &[(2, c(1.0, 0.0)), (4, c(2.0, 0.0))]));

        let bad = uni(4, &[(0, c(1.0, 0.0))]);
        assert!(matches!(s.compose(&[bad]), Err(SeriesError::NonzeroConstantTerm { index: 0 })));
    }

    #[test]
    fn eval_examples() {
        let s = MultiSeries::from_terms(2, 4, P, [(vec![2, 0], c(1.0, 0.0)), (vec![0, 1], c(1.0, 0.0))]).unwrap();
        assert_eq!(s.eval(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(), c(7.0, 0.0));
        assert!(MultiSeries::zero(3, 4, P).eval(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap().is_zero());

        let s = uni(9, &[(1, BigComplex::i(P)), (3, c(1.0, 0.0))]);
        let x = BigComplex::parse("0.1", "0", P).unwrap();
        let want = BigComplex::parse("0.001", "0.1", P).unwrap();
        let err = s.eval(&[x]).unwrap().dist(&want);
        assert!(err < rug::Float::with_val(P, 1e-35));
        assert!(s.eval(&[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn univariate_round_trip() {
        let s = uni(6, &[(2, c(0.0, 1.0)), (4, c(0.5, 0.0))]);
        let e = s.embed(1, 2).unwrap();
        assert!(e.is_separable());
        assert_eq!(e.univariate_part(1), s);
        assert!(e.univariate_part(0).is_empty());
    }
}
