//! Neumann-Zagier potentials of cusped manifolds and synthetic constructors.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rug::ops::Pow;
use rug::Float;

use crate::classify::{QuadraticNumber, RationalMatrix2};
use crate::series::{pow2, BigComplex, MultiSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ManifoldError {
    #[error("potential fails validation: {0}")]
    InvalidPotential(ValidationReport),
    #[error("bad curve: {0}")]
    BadCurve(String),
    #[error("no invariant extension at order {order}")]
    NoInvariantExtension { order: u32 },
    #[error("seed at order {order} is not resonant for this symmetry")]
    InadmissibleSeedOrder { order: u32 },
    #[error("symmetry does not fix the cusp shape")]
    SigmaDoesNotFixShape,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Exact description of a cusp shape.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactShape {
    Quadratic(QuadraticNumber),
    /// Known not to be quadratic imaginary.
    NonQuadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspShape {
    pub exact: Option<ExactShape>,
    pub approx: BigComplex,
}

impl CuspShape {
    pub fn numeric(approx: BigComplex) -> Self {
        CuspShape { exact: None, approx }
    }

    pub fn quadratic(q: QuadraticNumber, prec: u32) -> Self {
        CuspShape { approx: q.to_complex(prec), exact: Some(ExactShape::Quadratic(q)) }
    }

    pub fn quadratic_value(&self) -> Option<&QuadraticNumber> {
        match &self.exact {
            Some(ExactShape::Quadratic(q)) => Some(q),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    NotEven { exp: Vec<u32> },
    NonzeroConstantTerm,
    CuspCountMismatch { n_cusps: usize, n_vars: usize, n_shapes: usize },
    CuspShapeLowerHalfPlane { cusp: usize },
    QuadraticCoefficientMismatch { cusp: usize },
    ExactShapeMismatch { cusp: usize },
    NotSgiSplit { exp: Vec<u32> },
    PrecisionTooLow { bits: u32 },
}

/// Every violated invariant; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = self.violations.iter().map(|v| format!("{v:?}")).collect();
        write!(f, "{}", names.join(", "))
    }
}

/// `v_k = (1/2) dPhi/du_k` together with the Jacobian `dv_k/du_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct LongitudeSeries {
    pub v: Vec<MultiSeries>,
    pub jacobian: Vec<Vec<MultiSeries>>,
}

impl LongitudeSeries {
    pub fn eval(&self, u: &[BigComplex]) -> Result<Vec<BigComplex>, SeriesError> {
        self.v.iter().map(|s| s.eval(u)).collect()
    }

    pub fn eval_jacobian(&self, u: &[BigComplex]) -> Result<Vec<Vec<BigComplex>>, SeriesError> {
        self.jacobian.iter().map(|row| row.iter().map(|s| s.eval(u)).collect()).collect()
    }
}

#[derive(Debug)]
pub struct NZPotential {
    pub label: String,
    pub n_cusps: usize,
    pub phi: MultiSeries,
    pub cusp_shapes: Vec<CuspShape>,
    pub base_cvol: BigComplex,
    pub sgi: bool,
    longitudes: OnceLock<LongitudeSeries>,
}

impl Clone for NZPotential {
    fn clone(&self) -> Self {
        NZPotential::new(self.label.clone(), self.phi.clone(), self.cusp_shapes.clone(), self.base_cvol.clone(), self.sgi)
    }
}

impl PartialEq for NZPotential {
    fn eq(&self, o: &Self) -> bool {
        self.label == o.label
            && self.n_cusps == o.n_cusps
            && self.phi == o.phi
            && self.cusp_shapes == o.cusp_shapes
            && self.base_cvol == o.base_cvol
            && self.sgi == o.sgi
    }
}

impl NZPotential {
    pub fn new(label: String, phi: MultiSeries, cusp_shapes: Vec<CuspShape>, base_cvol: BigComplex, sgi: bool) -> Self {
        NZPotential { label, n_cusps: phi.n_vars(), phi, cusp_shapes, base_cvol, sgi, longitudes: OnceLock::new() }
    }

    /// Reads the cusp shapes off the quadratic coefficients.
    pub fn from_phi(label: &str, phi: MultiSeries, sgi: bool) -> Self {
        let n = phi.n_vars();
        let shapes = (0..n)
            .map(|k| {
                let mut e = vec![0; n];
                e[k] = 2;
                CuspShape::numeric(phi.coeff_or_zero(&e))
            })
            .collect();
        let prec = phi.prec();
        NZPotential::new(label.to_string(), phi, shapes, BigComplex::zero(prec), sgi)
    }

    pub fn prec(&self) -> u32 {
        self.phi.prec()
    }

    pub fn truncation_order(&self) -> u32 {
        self.phi.order()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let prec = self.prec();
        if prec < crate::series::MIN_PRECISION_BITS {
            out.push(Violation::PrecisionTooLow { bits: prec });
        }
        let n = self.phi.n_vars();
        if self.n_cusps != n || self.cusp_shapes.len() != n {
            out.push(Violation::CuspCountMismatch { n_cusps: self.n_cusps, n_vars: n, n_shapes: self.cusp_shapes.len() });
        }
        for (e, _) in self.phi.terms() {
            if e.iter().all(|&x| x == 0) {
                out.push(Violation::NonzeroConstantTerm);
            } else if e.iter().any(|x| x % 2 == 1) {
                out.push(Violation::NotEven { exp: e.clone() });
            }
        }
        let tol = pow2(8 - prec as i32, prec);
        for (k, shape) in self.cusp_shapes.iter().enumerate().take(n) {
            let mut e = vec![0; n];
            e[k] = 2;
            let coeff = self.phi.coeff_or_zero(&e);
            if !coeff.im().is_sign_positive()
                || coeff.im().is_zero()
                || !shape.approx.im().is_sign_positive()
                || shape.approx.im().is_zero()
            {
                out.push(Violation::CuspShapeLowerHalfPlane { cusp: k });
            }
            let scale = Float::with_val(prec, shape.approx.abs().max(&Float::with_val(prec, 1)));
            if coeff.dist(&shape.approx) > Float::with_val(prec, &tol * &scale) {
                out.push(Violation::QuadraticCoefficientMismatch { cusp: k });
            }
            if let Some(q) = shape.quadratic_value() {
                if !q.in_upper_half_plane() || q.to_complex(prec).dist(&shape.approx) >= tol {
                    out.push(Violation::ExactShapeMismatch { cusp: k });
                }
            }
        }
        if self.sgi {
            for (e, _) in self.phi.terms() {
                if e.iter().filter(|&&x| x > 0).count() > 1 {
                    out.push(Violation::NotSgiSplit { exp: e.clone() });
                }
            }
        }
        ValidationReport { violations: out }
    }

    /// Longitude series, derived once and cached.
    pub fn longitudes(&self) -> Result<&LongitudeSeries, ManifoldError> {
        if let Some(l) = self.longitudes.get() {
            return Ok(l);
        }
        let report = self.validate();
        if !report.is_valid() {
            return Err(ManifoldError::InvalidPotential(report));
        }
        let l = derive_longitudes(&self.phi)?;
        Ok(self.longitudes.get_or_init(|| l))
    }
}

/// `v_k = (1/2) dPhi/du_k` and their partials.
pub fn derive_longitudes(phi: &MultiSeries) -> Result<LongitudeSeries, SeriesError> {
    let half = BigComplex::from_f64(0.5, 0.0, phi.prec());
    let n = phi.n_vars();
    let v: Vec<MultiSeries> = (0..n).map(|k| phi.partial(k).map(|d| d.scale(&half))).collect::<Result<_, _>>()?;
    let jacobian = v.iter().map(|vk| (0..n).map(|l| vk.partial(l)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Ok(LongitudeSeries { v, jacobian })
}

fn check_curve(phi: &MultiSeries, which: &str) -> Result<(), ManifoldError> {
    let bad = |m: &str| Err(ManifoldError::BadCurve(format!("{which}: {m}")));
    if phi.n_vars() != 1 {
        return bad("not univariate");
    }
    for (e, _) in phi.terms() {
        if e[0] == 0 {
            return bad("nonzero constant term");
        }
        if e[0] % 2 == 1 {
            return bad("not even");
        }
    }
    let t = phi.coeff_or_zero(&[2]);
    if !t.im().is_sign_positive() || t.im().is_zero() {
        return bad("quadratic coefficient not in the upper half plane");
    }
    Ok(())
}

/// Two-cusp potential `phi1(u1) + phi2(u2)`.
pub fn make_sgi(phi1: &MultiSeries, phi2: &MultiSeries, base_cvol: BigComplex) -> Result<NZPotential, ManifoldError> {
    check_curve(phi1, "first curve")?;
    check_curve(phi2, "second curve")?;
    if phi1.order() != phi2.order() {
        return Err(ManifoldError::BadCurve("curves have different truncation orders".into()));
    }
    let phi = phi1.embed(0, 2)?.add(&phi2.embed(1, 2)?)?;
    let mut m = NZPotential::from_phi("sgi", phi, true);
    m.base_cvol = base_cvol;
    Ok(m)
}

/// Like [`make_sgi`] but keeps the exact shapes of two one-cusp manifolds.
pub fn make_sgi_from_curves(c1: &NZPotential, c2: &NZPotential, base_cvol: BigComplex) -> Result<NZPotential, ManifoldError> {
    if c1.n_cusps != 1 || c2.n_cusps != 1 {
        return Err(ManifoldError::BadCurve("curve manifolds must have one cusp".into()));
    }
    let mut m = make_sgi(&c1.phi, &c2.phi, base_cvol)?;
    m.label = format!("sgi({},{})", c1.label, c2.label);
    m.cusp_shapes = vec![c1.cusp_shapes[0].clone(), c2.cusp_shapes[0].clone()];
    Ok(m)
}

/// One-cusp potential whose curve `v(u)` satisfies
/// `v(a u + b v(u)) = c u + d v(u)` through order `order`, for
/// `sigma = [[a, b], [c, d]]` fixing `tau`.
///
/// At order k the new coefficient enters with factor `(a + b tau)^k - (d - b tau)`.
/// Where that factor vanishes exactly the coefficient is free and comes from
/// `seeds` (default 0); elsewhere it is solved, and seeding it is an error.
pub fn make_symmetric_curve(
    tau: &QuadraticNumber,
    sigma: &RationalMatrix2,
    seeds: &BTreeMap<u32, BigComplex>,
    order: u32,
    prec: u32,
) -> Result<NZPotential, ManifoldError> {
    let [[a, b], [c, d]] = &sigma.0;
    let q = |x: &rug::Rational| QuadraticNumber::rational(x.clone(), tau.d);
    // tau (a + b tau) = c + d tau
    let mu = q(a).add(&tau.scale(b)).expect("same field");
    let lhs = tau.mul(&mu).expect("same field");
    let rhs = q(c).add(&tau.scale(d)).expect("same field");
    if lhs != rhs || *b == 0 {
        return Err(ManifoldError::SigmaDoesNotFixShape);
    }
    if !tau.in_upper_half_plane() {
        return Err(ManifoldError::BadCurve("cusp shape not in the upper half plane".into()));
    }
    let target = q(d).sub(&tau.scale(b)).expect("same field");
    let resonant = |k: u32| mu.pow(k) == target;
    for &k in seeds.keys() {
        if k < 2 || k > order || !resonant(k) {
            return Err(ManifoldError::InadmissibleSeedOrder { order: k });
        }
    }

    let tau_c = tau.to_complex(prec);
    let mu_c = mu.to_complex(prec);
    let target_c = target.to_complex(prec);
    let a_c = BigComplex::from_real(Float::with_val(prec, a));
    let b_c = BigComplex::from_real(Float::with_val(prec, b));
    let c_c = BigComplex::from_real(Float::with_val(prec, c));
    let d_c = BigComplex::from_real(Float::with_val(prec, d));

    let u = MultiSeries::variable(0, 1, order, prec);
    let mut v = u.scale(&tau_c);
    for k in 2..=order {
        // residual of the relation with the order-k coefficient still zero
        let arg = u.scale(&a_c).add(&v.scale(&b_c))?;
        let lhs = v.compose(&[arg])?;
        let rhs = u.scale(&c_c).add(&v.scale(&d_c))?;
        let r = lhs.sub(&rhs)?.coeff_or_zero(&[k]);
        let coeff = if resonant(k) {
            let scale = Float::with_val(prec, v.max_abs() + 1u32).pow(k);
            if r.abs() > pow2(32 - prec as i32, prec) * scale {
                return Err(ManifoldError::NoInvariantExtension { order: k });
            }
            seeds.get(&k).cloned().unwrap_or_else(|| BigComplex::zero(prec))
        } else {
            let factor = &mu_c.powi(k as i64) - &target_c;
            (-&r).div(&factor)
        };
        if !coeff.is_zero() {
            v = v.add(&MultiSeries::monomial(vec![k], coeff, order))?;
        }
    }

    // Phi = sum 2 c_k u^(k+1)/(k+1), one order higher so v keeps order `order`
    let mut terms = Vec::new();
    for (e, ck) in v.terms() {
        let k = e[0] as i64;
        let coeff = ck.scale_i64(2).scale(&Float::with_val(prec, Float::with_val(prec, 1) / (k + 1)));
        terms.push((vec![e[0] + 1], coeff));
    }
    let phi = MultiSeries::from_terms(1, order + 1, prec, terms)?;
    let shape = CuspShape::quadratic(tau.clone(), prec);
    Ok(NZPotential::new("symmetric-curve".into(), phi, vec![shape], BigComplex::zero(prec), false))
}
