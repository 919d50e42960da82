//! Arbitrary precision complex scalar.

use std::cmp::max;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use super::SeriesError;

/// Smallest precision accepted anywhere in the crate.
pub const MIN_PRECISION_BITS: u32 = 64;
/// Working precision used when nothing else is configured.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Complex number with an explicit binary precision.
///
/// Binary operations produce a result at the larger of the two operand
/// precisions.
#[derive(Clone, PartialEq)]
pub struct BigComplex(Complex);

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        BigComplex(Complex::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, 1))
    }

    pub fn i(prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, (0, 1)))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, (re, im)))
    }

    pub fn from_i64(re: i64, im: i64, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, (re, im)))
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let prec = max(re.prec(), im.prec());
        BigComplex(Complex::with_val(prec, (re, im)))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        BigComplex(Complex::with_val(prec, (re, 0)))
    }

    pub fn from_complex(z: Complex) -> Self {
        BigComplex(z)
    }

    /// Parses decimal strings for the real and imaginary parts.
    pub fn parse(re: &str, im: &str, prec: u32) -> Result<Self, SeriesError> {
        let pr = Float::parse(re.trim()).map_err(|_| SeriesError::Parse(re.to_string()))?;
        let pi = Float::parse(im.trim()).map_err(|_| SeriesError::Parse(im.to_string()))?;
        let z = BigComplex(Complex::with_val(prec, (pr, pi)));
        if !z.is_finite() {
            return Err(SeriesError::Parse(format!("{re} + {im}i")));
        }
        Ok(z)
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    pub fn two_pi_i(prec: u32) -> Self {
        let two_pi = Self::pi(prec) * 2u32;
        BigComplex(Complex::with_val(prec, (0, two_pi)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec().0
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex(Complex::with_val(prec, &self.0))
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }

    pub fn into_complex(self) -> Complex {
        self.0
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.0.abs_ref())
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.0.arg_ref())
    }

    pub fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn exp(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.exp_ref()))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.ln_ref()))
    }

    pub fn conj(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.conj_ref()))
    }

    pub fn recip(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.recip_ref()))
    }

    pub fn div(&self, other: &Self) -> Self {
        let prec = max(self.prec(), other.prec());
        BigComplex(Complex::with_val(prec, &self.0 / &other.0))
    }

    pub fn powi(&self, n: i64) -> Self {
        if n >= 0 {
            BigComplex(Complex::with_val(self.prec(), (&self.0).pow(n as u64)))
        } else {
            self.recip().powi(-n)
        }
    }

    /// Principal branch power with a real exponent.
    pub fn powf(&self, e: &Float) -> Self {
        let prec = max(self.prec(), e.prec());
        BigComplex(Complex::with_val(prec, (&self.0).pow(e)))
    }

    pub fn scale(&self, x: &Float) -> Self {
        let prec = max(self.prec(), x.prec());
        BigComplex(Complex::with_val(prec, &self.0 * x))
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        BigComplex(Complex::with_val(self.prec(), &self.0 * k))
    }

    pub fn mul_i(&self) -> Self {
        BigComplex(Complex::with_val(self.prec(), self.0.mul_i_ref(false)))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.0.real().to_f64(), self.0.imag().to_f64())
    }

    /// Distance to another value.
    pub fn dist(&self, other: &Self) -> Float {
        (self - other).abs()
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e} + {im:e}i)@{}", self.prec())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                let prec = max(self.prec(), rhs.prec());
                BigComplex(Complex::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                &self $op &rhs
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                &self $op rhs
            }
        }
        impl $atr<&BigComplex> for BigComplex {
            fn $am(&mut self, rhs: &BigComplex) {
                if rhs.prec() > self.prec() {
                    self.0.set_prec(rhs.prec());
                }
                let v = rug::Complex::with_val(self.prec(), &self.0 $op &rhs.0);
                self.0 = v;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex(Complex::with_val(self.prec(), -&self.0))
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex(-self.0)
    }
}

/// `2^e` as a float of the given precision.
pub fn pow2(e: i32, prec: u32) -> Float {
    Float::with_val(prec, 1) << e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_max_of_operands() {
        let a = BigComplex::from_f64(1.0, 2.0, 64);
        let b = BigComplex::from_f64(3.0, -1.0, 300);
        assert_eq!((&a + &b).prec(), 300);
        assert_eq!((&a * &b).prec(), 300);
        assert_eq!((&b - &a).prec(), 300);
    }

    #[test]
    fn parse_round_trip() {
        let z = BigComplex::parse("0.1", "-2.5e-3", 256).unwrap();
        assert!(z.re() > &0.0999 && z.re() < &0.1001);
        assert!(BigComplex::parse("nan", "0", 256).is_err());
        assert!(BigComplex::parse("abc", "0", 256).is_err());
    }

    #[test]
    fn powers() {
        let i = BigComplex::i(128);
        assert_eq!(i.powi(2), BigComplex::from_i64(-1, 0, 128));
        assert_eq!(i.powi(-1), BigComplex::from_i64(0, -1, 128));
    }
}
