//! Fixture manifolds shared by the benchmarks.

use std::collections::BTreeMap;

use dehnfill::{make_sgi, make_symmetric_curve, symmetry_matrices, BigComplex, MultiSeries, NZPotential, QuadraticNumber};

/// `Phi = i u^2 + u^4 / 2`.
pub fn cubic_curve(prec: u32) -> NZPotential {
    let phi = MultiSeries::from_terms(1, 9, prec, [(vec![2], BigComplex::i(prec)), (vec![4], BigComplex::from_f64(0.5, 0.0, prec))])
        .expect("valid terms");
    NZPotential::from_phi("cubic", phi, false)
}

/// The tau = i curve with `m_3 = 1`, longitude order `order`.
pub fn symmetric_curve(order: u32, prec: u32) -> NZPotential {
    let tau = QuadraticNumber::i();
    let sigma = symmetry_matrices(&tau).expect("upper half plane").remove(0);
    let seeds = BTreeMap::from([(3u32, BigComplex::one(prec))]);
    make_symmetric_curve(&tau, &sigma, &seeds, order, prec).expect("admissible seed")
}

/// Two copies of a sextic curve glued as an SGI manifold.
pub fn sgi_twin(prec: u32) -> NZPotential {
    let c = |re, im| BigComplex::from_f64(re, im, prec);
    let phi = MultiSeries::from_terms(1, 9, prec, [(vec![2], c(0.1, 1.3)), (vec![4], c(0.5, 0.0)), (vec![6], c(0.0, -0.25))])
        .expect("valid terms");
    make_sgi(&phi, &phi, BigComplex::zero(prec)).expect("valid curves")
}

/// Dense two-variable series with every even monomial through `order`.
pub fn dense_series(order: u32, prec: u32) -> MultiSeries {
    let mut terms = Vec::new();
    for a in (0..=order).step_by(2) {
        for b in (0..=order - a).step_by(2) {
            if a + b > 0 {
                terms.push((vec![a, b], BigComplex::from_f64(1.0 / (1 + a) as f64, 1.0 / (1 + b) as f64, prec)));
            }
        }
    }
    MultiSeries::from_terms(2, order, prec, terms).expect("valid terms")
}
