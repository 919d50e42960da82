//! Exact rational, quadratic-field and 2x2 matrix arithmetic.

use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float, Integer, Rational};

use super::ClassifyError;
use crate::series::BigComplex;

/// Parses "p/q" or an integer.
pub fn parse_rational(s: &str) -> Result<Rational, ClassifyError> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    Rational::from_str(t).map_err(|_| ClassifyError::Parse(s.to_string()))
}

/// Formats as "p/q", or "p" for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

fn squarefree_split(d: u64) -> (u64, u64) {
    // d = f^2 * core
    let mut core = d;
    let mut f = 1u64;
    let mut k = 2u64;
    while k * k <= core {
        while core.is_multiple_of(k * k) {
            core /= k * k;
            f *= k;
        }
        k += 1;
    }
    (f, core)
}

/// `a + b*sqrt(-d)` with rational `a`, `b` and squarefree `d > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    pub a: Rational,
    pub b: Rational,
    pub d: u64,
}

impl QuadraticNumber {
    /// Canonicalizes `d` to its squarefree part.
    pub fn new(a: Rational, b: Rational, d: u64) -> Result<Self, ClassifyError> {
        if d == 0 {
            return Err(ClassifyError::Parse("sqrt(-0) is not allowed".into()));
        }
        let (f, core) = squarefree_split(d);
        Ok(QuadraticNumber { a, b: b * Integer::from(f), d: core })
    }

    pub fn rational(a: Rational, d: u64) -> Self {
        QuadraticNumber { a, b: Rational::new(), d }
    }

    /// The imaginary unit of Q(sqrt(-1)).
    pub fn i() -> Self {
        QuadraticNumber { a: Rational::new(), b: Rational::from(1), d: 1 }
    }

    /// (1 + sqrt(-3)) / 2.
    pub fn omega() -> Self {
        QuadraticNumber { a: Rational::from((1, 2)), b: Rational::from((1, 2)), d: 3 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    /// Imaginary part is `b*sqrt(d)`, so its sign is the sign of `b`.
    pub fn in_upper_half_plane(&self) -> bool {
        self.b > 0
    }

    fn field(&self, other: &Self) -> Result<u64, ClassifyError> {
        if self.d == other.d || other.is_rational() {
            Ok(self.d)
        } else if self.is_rational() {
            Ok(other.d)
        } else {
            Err(ClassifyError::FieldMismatch { left: self.d, right: other.d })
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, ClassifyError> {
        let d = self.field(o)?;
        Ok(QuadraticNumber { a: Rational::from(&self.a + &o.a), b: Rational::from(&self.b + &o.b), d })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, ClassifyError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QuadraticNumber { a: Rational::from(-&self.a), b: Rational::from(-&self.b), d: self.d }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ClassifyError> {
        let d = self.field(o)?;
        let dd = Rational::from(d);
        let a = Rational::from(&self.a * &o.a) - Rational::from(&self.b * &o.b) * dd;
        let b = Rational::from(&self.a * &o.b) + Rational::from(&self.b * &o.a);
        Ok(QuadraticNumber { a, b, d })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadraticNumber { a: Rational::from(&self.a * k), b: Rational::from(&self.b * k), d: self.d }
    }

    pub fn conj(&self) -> Self {
        QuadraticNumber { a: self.a.clone(), b: Rational::from(-&self.b), d: self.d }
    }

    /// Field norm `a^2 + d b^2`.
    pub fn norm(&self) -> Rational {
        Rational::from(self.a.square_ref()) + Rational::from(self.b.square_ref()) * Integer::from(self.d)
    }

    pub fn recip(&self) -> Result<Self, ClassifyError> {
        let n = self.norm();
        if n == 0 {
            return Err(ClassifyError::Singular);
        }
        let inv = Rational::from(1) / n;
        Ok(self.conj().scale(&inv))
    }

    pub fn div(&self, o: &Self) -> Result<Self, ClassifyError> {
        self.mul(&o.recip()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = QuadraticNumber::rational(Rational::from(1), self.d);
        for _ in 0..k {
            out = out.mul(self).expect("same field");
        }
        out
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        let sd = Float::with_val(prec, self.d).sqrt();
        let re = Float::with_val(prec, &self.a);
        let im = Float::with_val(prec, &self.b) * sd;
        BigComplex::from_complex(Complex::with_val(prec, (re, im)))
    }

    /// Parses the shape grammar `a/b + c/d √-D`; `i` abbreviates `√-1`
    /// and `sqrt(-D)` is accepted for `√-D`.
    pub fn parse(expr: &str) -> Result<Self, ClassifyError> {
        let err = || ClassifyError::Parse(expr.to_string());
        let mut s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        s = s.replace("sqrt(-", "√-").replace('*', "");
        // close parens left by sqrt(-D)
        let s = s.replace(')', "");
        let s = s.replace('i', "√-1");

        // split into signed terms; '-' directly after '√' belongs to the radical
        let chars: Vec<char> = s.chars().collect();
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (idx, &ch) in chars.iter().enumerate() {
            let after_root = idx > 0 && chars[idx - 1] == '√';
            if (ch == '+' || ch == '-') && !after_root && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        if !cur.is_empty() {
            terms.push(cur);
        }

        let mut a = Rational::new();
        let mut b = Rational::new();
        let mut d: Option<u64> = None;
        for t in terms {
            if let Some(pos) = t.find('√') {
                let (coef, rad) = t.split_at(pos);
                let rad = rad.trim_start_matches('√');
                let dv: u64 = rad.strip_prefix('-').ok_or_else(err)?.parse().map_err(|_| err())?;
                if dv == 0 {
                    return Err(err());
                }
                if let Some(prev) = d {
                    if prev != dv {
                        return Err(err());
                    }
                }
                d = Some(dv);
                let c = match coef {
                    "" | "+" => Rational::from(1),
                    "-" => Rational::from(-1),
                    _ => parse_rational(coef)?,
                };
                b += c;
            } else {
                a += parse_rational(&t)?;
            }
        }
        QuadraticNumber::new(a, b, d.unwrap_or(1))
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b < 0 { "-" } else { "+" };
        write!(f, "{}{}{}√-{}", self.a, sign, Rational::from(self.b.abs_ref()), self.d)
    }
}

/// Canonical projective slope `p/q`: coprime, `q >= 0`, and `p > 0` when `q = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    /// Reduces and canonicalizes any nonzero integer pair.
    pub fn new(p: i64, q: i64) -> Result<Self, ClassifyError> {
        Self::from_integers(&Integer::from(p), &Integer::from(q))
    }

    pub fn from_integers(p: &Integer, q: &Integer) -> Result<Self, ClassifyError> {
        if *p == 0 && *q == 0 {
            return Err(ClassifyError::DegenerateImage);
        }
        let g = Integer::from(p.gcd_ref(q));
        let mut p = Integer::from(p / &g);
        let mut q = Integer::from(q / &g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        match (p.to_i64(), q.to_i64()) {
            (Some(p), Some(q)) => Ok(Slope { p, q }),
            _ => Err(ClassifyError::Overflow),
        }
    }

    /// Canonical slope proportional to a nonzero rational row vector.
    pub fn from_rationals(x: &Rational, y: &Rational) -> Result<Self, ClassifyError> {
        let l = Integer::from(x.denom().lcm_ref(y.denom()));
        let px = x.numer() * Integer::from(&l / x.denom());
        let py = y.numer() * Integer::from(&l / y.denom());
        Self::from_integers(&px, &py)
    }

    pub fn norm(&self) -> i64 {
        self.p.abs() + self.q.abs()
    }

    pub fn row(&self) -> [Rational; 2] {
        [Rational::from(self.p), Rational::from(self.q)]
    }

    pub fn parse(s: &str) -> Result<Self, ClassifyError> {
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: i64 = p.parse().map_err(|_| ClassifyError::Parse(s.to_string()))?;
        let q: i64 = q.parse().map_err(|_| ClassifyError::Parse(s.to_string()))?;
        if Integer::from(p).gcd(&Integer::from(q)) != 1 {
            return Err(ClassifyError::Parse(format!("{s} is not a coprime slope")));
        }
        Slope::new(p, q)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// 2x2 matrix over Q, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix2(pub [[Rational; 2]; 2]);

impl RationalMatrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        RationalMatrix2([[a, b], [c, d]])
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0, 0)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.0[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|x| *x == 0)
    }

    pub fn det(&self) -> Rational {
        let m = &self.0;
        Rational::from(&m[0][0] * &m[1][1]) - Rational::from(&m[0][1] * &m[1][0])
    }

    pub fn trace(&self) -> Rational {
        Rational::from(&self.0[0][0] + &self.0[1][1])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        let e = |i: usize, j: usize| Rational::from(&a[i][0] * &b[0][j]) + Rational::from(&a[i][1] * &b[1][j]);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn add(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| Rational::from(&self.0[i][j] + &o.0[i][j]);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let e = |i: usize, j: usize| Rational::from(&self.0[i][j] * k);
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from(-1))
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].clone(), m[1][0].clone(), m[0][1].clone(), m[1][1].clone())
    }

    pub fn inv(&self) -> Result<Self, ClassifyError> {
        let det = self.det();
        if det == 0 {
            return Err(ClassifyError::Singular);
        }
        let m = &self.0;
        let k = Rational::from(1) / det;
        Ok(Self::new(m[1][1].clone(), Rational::from(-&m[0][1]), Rational::from(-&m[1][0]), m[0][0].clone()).scale(&k))
    }

    pub fn pow(&self, k: i64) -> Result<Self, ClassifyError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn row_mul(&self, row: &[Rational; 2]) -> [Rational; 2] {
        let m = &self.0;
        [
            Rational::from(&row[0] * &m[0][0]) + Rational::from(&row[1] * &m[1][0]),
            Rational::from(&row[0] * &m[0][1]) + Rational::from(&row[1] * &m[1][1]),
        ]
    }

    /// Matrix times the column `(1, tau)`.
    pub fn apply_column(&self, tau: &QuadraticNumber) -> [QuadraticNumber; 2] {
        let m = &self.0;
        let d = tau.d;
        let r = |i: usize| QuadraticNumber::rational(m[i][0].clone(), d).add(&tau.scale(&m[i][1])).expect("same field");
        [r(0), r(1)]
    }

    /// Whether all entries are integers.
    pub fn is_integral(&self) -> bool {
        self.0.iter().flatten().all(|x| *x.denom() == 1)
    }

    /// Fractional linear action on a slope: p/q maps to (ap+bq)/(cp+dq).
    pub fn apply_slope(&self, s: Slope) -> Result<Slope, ClassifyError> {
        let m = &self.0;
        let p = Rational::from(s.p);
        let q = Rational::from(s.q);
        let num = Rational::from(&m[0][0] * &p) + Rational::from(&m[0][1] * &q);
        let den = Rational::from(&m[1][0] * &p) + Rational::from(&m[1][1] * &q);
        if num == 0 && den == 0 {
            return Err(ClassifyError::DegenerateImage);
        }
        Slope::from_rationals(&num, &den)
    }
}

impl fmt::Display for RationalMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Smallest `m <= 12` with `sigma^m = I`; `None` when no such power exists.
pub fn sigma_order(sigma: &RationalMatrix2) -> Result<Option<u32>, ClassifyError> {
    if sigma.det() == 0 {
        return Err(ClassifyError::Singular);
    }
    let id = RationalMatrix2::identity();
    let mut acc = sigma.clone();
    for m in 1..=12u32 {
        if acc == id {
            return Ok(Some(m));
        }
        acc = acc.mul(sigma);
    }
    Ok(None)
}

/// Transfers a slope through the relation `(p1 q1) A1^-1 = (p2 q2) A2^-1`.
pub fn slope_transfer(a1: &RationalMatrix2, a2: &RationalMatrix2, s: Slope) -> Result<Slope, ClassifyError> {
    if a2.det() == 0 {
        return Err(ClassifyError::Singular);
    }
    let m = a1.inv()?.mul(a2);
    let row = m.row_mul(&s.row());
    Slope::from_rationals(&row[0], &row[1])
}

/// Sign-free parallelism of two vectors in a quadratic field.
pub fn parallel(x: &[QuadraticNumber; 2], y: &[QuadraticNumber; 2]) -> Result<bool, ClassifyError> {
    Ok(cross(x, y)?.is_zero())
}

fn cross(x: &[QuadraticNumber; 2], y: &[QuadraticNumber; 2]) -> Result<QuadraticNumber, ClassifyError> {
    x[0].mul(&y[1])?.sub(&x[1].mul(&y[0])?)
}

/// Parallelism of `x` over Q(sqrt(-d1)) and `y` over Q(sqrt(-d2)), decided in
/// the compositum with basis 1, sqrt(-d1), sqrt(-d2), sqrt(-d1)sqrt(-d2).
pub fn parallel_mixed(x: &[QuadraticNumber; 2], y: &[QuadraticNumber; 2]) -> bool {
    let d1 = x.iter().find(|q| !q.is_rational()).map(|q| q.d);
    let d2 = y.iter().find(|q| !q.is_rational()).map(|q| q.d);
    if d1.is_none() || d2.is_none() || d1 == d2 {
        return parallel(x, y).unwrap_or(false);
    }
    // (a + b r1)(c + e r2) = ac + ae r2 + bc r1 + be r1 r2
    let prod = |u: &QuadraticNumber, v: &QuadraticNumber| -> [Rational; 4] {
        [Rational::from(&u.a * &v.a), Rational::from(&u.b * &v.a), Rational::from(&u.a * &v.b), Rational::from(&u.b * &v.b)]
    };
    let p = prod(&x[0], &y[1]);
    let q = prod(&x[1], &y[0]);
    p.iter().zip(q.iter()).all(|(a, b)| a == b)
}
