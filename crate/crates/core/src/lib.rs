//! Dehn fillings of cusped hyperbolic 3-manifolds modeled by a Neumann-Zagier
//! potential: filling equations, pseudo complex volume and complex volume,
//! multiplicative dependence of core holonomies, and the exact classification
//! of slope pairs with equal pseudo complex volume.

pub mod classify;
pub mod filling;
pub mod io;
pub mod manifold;
pub mod relations;
pub mod search;
pub mod series;

pub use classify::{
    classify_pair, classify_single, symmetry_matrices, ClassificationVerdict, ClassifyError, QuadraticNumber, RationalMatrix2, Slope,
    SubgroupShape, SubgroupSpec,
};
pub use filling::{
    complex_volume, filling_invariants, mod_reduce, solve_filling, FillingError, FillingInvariants, FillingSlope, FillingSolution,
};
pub use io::IoError;
pub use manifold::{make_sgi, make_symmetric_curve, CuspShape, ExactShape, ManifoldError, NZPotential, ValidationReport};
pub use relations::{detect_dependence, verify_relation, DependenceRelation, DependenceVerdict, RelationError};
pub use rug::{Float, Rational};
pub use search::{enumerate_slopes, search_equal_pvol, verify_pair, PairReport, SearchError, SlopeRange};
pub use series::{BigComplex, MultiSeries, SeriesError, DEFAULT_PRECISION_BITS, DEFAULT_TRUNCATION_ORDER};

/// Environment variable overriding the default working precision.
pub const PRECISION_ENV_VAR: &str = "DEHN_PRECISION_BITS";
