//! Exact classification of fillings with equal pseudo complex volume.

mod exact;
mod subgroup;
mod symmetry;

pub use exact::{
    format_rational, parallel, parallel_mixed, parse_rational, sigma_order, slope_transfer, QuadraticNumber, RationalMatrix2, Slope,
};
pub use rug::Rational;
pub use subgroup::{
    holonomy_power_check, verify_subgroup_relations, CheckOutcome, HolonomyData, OrientedSlope, RelationWitness, SubgroupShape,
    SubgroupSpec,
};
pub use symmetry::{
    orbit_power, projective_order, relatively_dependent, relatively_dependent_numeric, rho_from_dependence, slope_action, symmetry_matrices,
};

use crate::manifold::{CuspShape, ExactShape};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("matrix is singular")]
    Singular,
    #[error("slope image is 0/0")]
    DegenerateImage,
    #[error("numbers live in different quadratic fields (d = {left} vs {right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("cusp shape is not in the upper half plane")]
    NotUpperHalfPlane,
    #[error("classification needs exact cusp shapes")]
    NeedExactShapes,
    #[error("integer overflow in slope")]
    Overflow,
    #[error("expected {expected} slopes, got {found}")]
    SlopeCount { expected: usize, found: usize },
}

/// Which predicted orbit, if any, relates two slope tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassificationVerdict {
    Identity,
    /// `slopes' = (rho(s2), rho^-1(s1))`.
    SwapRho {
        rho: RationalMatrix2,
    },
    /// Slope on `cusp` moved by the `power`-th iterate of the action of `sigma`.
    SigmaOrbit {
        sigma: RationalMatrix2,
        power: u32,
        cusp: usize,
    },
    /// `sigma` acts on the cusp with shape in Q(sqrt(-1)), `phi` on the one in Q(sqrt(-3)).
    SigmaPhiOrbit {
        sigma: RationalMatrix2,
        power_sigma: u32,
        phi: RationalMatrix2,
        power_phi: u32,
    },
    Unrelated,
    Undetermined {
        reason: String,
    },
}

impl ClassificationVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassificationVerdict::Identity => "Identity",
            ClassificationVerdict::SwapRho { .. } => "SwapRho",
            ClassificationVerdict::SigmaOrbit { .. } => "SigmaOrbit",
            ClassificationVerdict::SigmaPhiOrbit { .. } => "SigmaPhiOrbit",
            ClassificationVerdict::Unrelated => "Unrelated",
            ClassificationVerdict::Undetermined { .. } => "Undetermined",
        }
    }
}

/// Field class of a shape: `Some(1)` or `Some(3)` for the two special fields.
fn special_field(s: &CuspShape) -> Option<u64> {
    s.quadratic_value().map(|q| q.d).filter(|d| *d == 1 || *d == 3)
}

fn exact_of(s: &CuspShape) -> Result<&ExactShape, ClassifyError> {
    s.exact.as_ref().ok_or(ClassifyError::NeedExactShapes)
}

fn sigma_for(s: &CuspShape) -> Result<RationalMatrix2, ClassifyError> {
    let q = s.quadratic_value().ok_or(ClassifyError::NeedExactShapes)?;
    symmetry_matrices(q)?.into_iter().next().ok_or(ClassifyError::NeedExactShapes)
}

/// One-cusp classification: identity, or an orbit of the shape's symmetry.
pub fn classify_single(tau: &CuspShape, s: Slope, s2: Slope) -> Result<ClassificationVerdict, ClassifyError> {
    exact_of(tau)?;
    if s == s2 {
        return Ok(ClassificationVerdict::Identity);
    }
    if special_field(tau).is_some() {
        let sigma = sigma_for(tau)?;
        if let Some(power) = orbit_power(&slope_action(&sigma)?, s, s2)? {
            return Ok(ClassificationVerdict::SigmaOrbit { sigma, power, cusp: 0 });
        }
    }
    Ok(ClassificationVerdict::Unrelated)
}

/// Two-cusp classification by field membership and relative dependence of
/// the cusp shapes.
pub fn classify_pair(tau1: &CuspShape, tau2: &CuspShape, s: [Slope; 2], s2: [Slope; 2]) -> Result<ClassificationVerdict, ClassifyError> {
    let e1 = exact_of(tau1)?;
    let e2 = exact_of(tau2)?;
    if s == s2 {
        return Ok(ClassificationVerdict::Identity);
    }
    let f1 = special_field(tau1);
    let f2 = special_field(tau2);
    let q1 = tau1.quadratic_value();
    let q2 = tau2.quadratic_value();

    if let (Some(a), Some(b)) = (q1, q2) {
        if a.d == b.d {
            return Ok(ClassificationVerdict::Undetermined {
                reason: format!("both shapes lie in Q(sqrt(-{})); the exceptional set is not computed", a.d),
            });
        }
    }

    match (f1, f2) {
        (Some(x), Some(y)) if x != y => {
            // sigma on the Q(sqrt(-1)) cusp, phi on the Q(sqrt(-3)) cusp
            let (ci, cj) = if x == 1 { (0, 1) } else { (1, 0) };
            let shapes = [tau1, tau2];
            let sigma = sigma_for(shapes[ci])?;
            let phi = sigma_for(shapes[cj])?;
            let asig = slope_action(&sigma)?;
            let aphi = slope_action(&phi)?;
            let pi = orbit_power(&asig, s[ci], s2[ci])?.or(if s[ci] == s2[ci] { Some(0) } else { None });
            let pj = orbit_power(&aphi, s[cj], s2[cj])?.or(if s[cj] == s2[cj] { Some(0) } else { None });
            if let (Some(i), Some(j)) = (pi, pj) {
                return Ok(ClassificationVerdict::SigmaPhiOrbit { sigma, power_sigma: i, phi, power_phi: j });
            }
            Ok(ClassificationVerdict::Unrelated)
        }
        (Some(_), None) | (None, Some(_)) => {
            let c = if f1.is_some() { 0 } else { 1 };
            let other = 1 - c;
            let sigma = sigma_for([tau1, tau2][c])?;
            if s[other] == s2[other] {
                if let Some(power) = orbit_power(&slope_action(&sigma)?, s[c], s2[c])? {
                    return Ok(ClassificationVerdict::SigmaOrbit { sigma, power, cusp: c });
                }
            }
            Ok(ClassificationVerdict::Unrelated)
        }
        _ => {
            // neither special: relatively independent means identity only
            let dep = match (e1, e2) {
                (ExactShape::Quadratic(a), ExactShape::Quadratic(b)) => relatively_dependent(a, b),
                _ => relatively_dependent_numeric(&tau1.approx, &tau2.approx, 64, tau1.approx.prec().min(tau2.approx.prec())),
            };
            if let Some(m) = dep {
                let rho = rho_from_dependence(&m)?;
                let rho_inv = rho.inv()?;
                if rho.apply_slope(s[1])? == s2[0] && rho_inv.apply_slope(s[0])? == s2[1] {
                    return Ok(ClassificationVerdict::SwapRho { rho });
                }
            }
            Ok(ClassificationVerdict::Unrelated)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(s: &str) -> CuspShape {
        CuspShape::quadratic(QuadraticNumber::parse(s).unwrap(), 256)
    }

    fn sl(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn case_one_identity() {
        let v = classify_pair(&shape("√-2"), &shape("√-5"), [sl(3, 1), sl(5, 2)], [sl(3, 1), sl(5, 2)]).unwrap();
        assert_eq!(v, ClassificationVerdict::Identity);
        let v = classify_pair(&shape("√-2"), &shape("√-5"), [sl(3, 1), sl(5, 2)], [sl(5, 2), sl(3, 1)]).unwrap();
        assert_eq!(v, ClassificationVerdict::Unrelated);
    }

    #[test]
    fn case_three_orbit() {
        let sigma = RationalMatrix2::from_ints(0, 1, -1, 0);
        let s = [sl(7, 2), sl(5, 3)];
        let s2 = [sigma.apply_slope(s[0]).unwrap(), s[1]];
        let v = classify_pair(&shape("i"), &shape("√-2"), s, s2).unwrap();
        assert_eq!(v, ClassificationVerdict::SigmaOrbit { sigma: sigma.clone(), power: 1, cusp: 0 });
        // symmetric in the two cusps
        let v = classify_pair(&shape("√-2"), &shape("i"), [s[1], s[0]], [s2[1], s2[0]]).unwrap();
        assert_eq!(v, ClassificationVerdict::SigmaOrbit { sigma, power: 1, cusp: 1 });
    }

    #[test]
    fn case_four_product_orbit() {
        let tau1 = shape("i");
        let tau2 = shape("1/2+1/2√-3");
        let phi = symmetry_matrices(tau2.quadratic_value().unwrap()).unwrap().remove(0);
        let aphi = slope_action(&phi).unwrap();
        let s = [sl(9, 4), sl(11, 3)];
        let s2 = [s[0], aphi.apply_slope(aphi.apply_slope(s[1]).unwrap()).unwrap()];
        match classify_pair(&tau1, &tau2, s, s2).unwrap() {
            ClassificationVerdict::SigmaPhiOrbit { power_sigma, power_phi, .. } => {
                assert_eq!((power_sigma, power_phi), (0, 2));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn same_field_is_undetermined() {
        let v = classify_pair(&shape("i"), &shape("2i"), [sl(3, 1), sl(5, 2)], [sl(5, 2), sl(3, 1)]).unwrap();
        assert!(matches!(v, ClassificationVerdict::Undetermined { .. }));
    }

    #[test]
    fn inexact_shapes_rejected() {
        let t = CuspShape::numeric(crate::series::BigComplex::i(256));
        assert_eq!(classify_pair(&t, &t, [sl(1, 0); 2], [sl(1, 0); 2]), Err(ClassifyError::NeedExactShapes));
    }

    #[test]
    fn nonquadratic_equal_shapes_swap() {
        let a = crate::series::BigComplex::from_f64(0.3, 1.7, 256);
        let t = CuspShape { exact: Some(ExactShape::NonQuadratic), approx: a };
        let v = classify_pair(&t, &t, [sl(30, 1), sl(29, 3)], [sl(29, 3), sl(30, 1)]).unwrap();
        assert_eq!(v, ClassificationVerdict::SwapRho { rho: RationalMatrix2::identity() });
    }
}
