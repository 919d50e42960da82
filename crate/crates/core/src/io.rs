//! Text formats: manifold files and pair reports.
//!
//! Every real is written as a decimal string carrying at least
//! `precision_bits / 3` significant digits, so files reload bit-exactly.

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::classify::{parse_rational, ClassificationVerdict, QuadraticNumber, RationalMatrix2};
use crate::filling::FillingSlope;
use crate::manifold::{CuspShape, ExactShape, NZPotential};
use crate::relations::{DependenceRelation, DependenceVerdict};
use crate::search::{DependenceEntry, PairReport};
use crate::series::{BigComplex, MultiSeries, MIN_PRECISION_BITS};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
}

fn fmt_err<T>(m: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Format(m.into()))
}

/// Significant decimal digits written for a value of `prec` bits.
pub fn decimal_digits(prec: u32) -> usize {
    (prec / 3 + 1) as usize
}

pub fn format_float(x: &Float) -> String {
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

/// Bits needed to hold every digit of a decimal string.
fn bits_for(s: &str) -> u32 {
    let digits = s.chars().take_while(|c| *c != 'e' && *c != 'E').filter(|c| c.is_ascii_digit()).count() as u32;
    (digits * 10 / 3 + 8).max(MIN_PRECISION_BITS)
}

pub fn parse_float(s: &str, prec: u32) -> Result<Float, IoError> {
    match Float::parse(s.trim()) {
        Ok(v) => {
            let f = Float::with_val(prec, v);
            if f.is_finite() {
                Ok(f)
            } else {
                fmt_err(format!("non-finite number {s:?}"))
            }
        }
        Err(_) => fmt_err(format!("bad decimal {s:?}")),
    }
}

/// Serde adapter writing a [`Float`] as a decimal string.
pub mod float_str {
    use rug::Float;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_float(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Float, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_float(&s, super::bits_for(&s)).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexDto {
    pub re: String,
    pub im: String,
}

impl ComplexDto {
    pub fn from_complex(z: &BigComplex) -> Self {
        ComplexDto { re: format_float(z.re()), im: format_float(z.im()) }
    }

    pub fn to_complex(&self, prec: u32) -> Result<BigComplex, IoError> {
        Ok(BigComplex::from_floats(parse_float(&self.re, prec)?, parse_float(&self.im, prec)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDto {
    pub a: String,
    pub b: String,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactDto {
    Quadratic(QuadraticDto),
    /// The literal `"nonquadratic"`.
    Tag(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspShapeDto {
    pub exact: Option<ExactDto>,
    pub approx: ComplexDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDto {
    pub exp: Vec<u32>,
    pub coeff: ComplexDto,
}

/// On-disk manifold. `truncation_order` is the order at which `phi` is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldFile {
    pub label: String,
    pub n_cusps: usize,
    pub precision_bits: u32,
    pub truncation_order: u32,
    pub base_cvol: ComplexDto,
    pub cusp_shapes: Vec<CuspShapeDto>,
    pub phi: Vec<TermDto>,
    pub sgi: bool,
}

impl ManifoldFile {
    pub fn from_potential(m: &NZPotential) -> Self {
        let cusp_shapes = m
            .cusp_shapes
            .iter()
            .map(|s| CuspShapeDto {
                exact: s.exact.as_ref().map(|e| match e {
                    ExactShape::Quadratic(q) => ExactDto::Quadratic(QuadraticDto {
                        a: crate::classify::format_rational(&q.a),
                        b: crate::classify::format_rational(&q.b),
                        d: q.d,
                    }),
                    ExactShape::NonQuadratic => ExactDto::Tag("nonquadratic".into()),
                }),
                approx: ComplexDto::from_complex(&s.approx),
            })
            .collect();
        ManifoldFile {
            label: m.label.clone(),
            n_cusps: m.n_cusps,
            precision_bits: m.prec(),
            truncation_order: m.truncation_order(),
            base_cvol: ComplexDto::from_complex(&m.base_cvol),
            cusp_shapes,
            phi: m.phi.terms().map(|(e, c)| TermDto { exp: e.clone(), coeff: ComplexDto::from_complex(c) }).collect(),
            sgi: m.sgi,
        }
    }

    /// Builds the potential at `prec` bits (the file's own precision if `None`).
    pub fn to_potential(&self, prec: Option<u32>) -> Result<NZPotential, IoError> {
        let prec = prec.unwrap_or(self.precision_bits);
        if prec < MIN_PRECISION_BITS {
            return fmt_err(format!("precision {prec} is below {MIN_PRECISION_BITS} bits"));
        }
        if self.n_cusps == 0 {
            return fmt_err("n_cusps must be positive");
        }
        if self.cusp_shapes.len() != self.n_cusps {
            return fmt_err(format!("{} cusp shapes for {} cusps", self.cusp_shapes.len(), self.n_cusps));
        }
        let mut terms = Vec::with_capacity(self.phi.len());
        for t in &self.phi {
            if t.exp.len() != self.n_cusps {
                return fmt_err(format!("exponent {:?} has the wrong length", t.exp));
            }
            if t.exp.iter().any(|e| e % 2 == 1) {
                return fmt_err(format!("exponent {:?} is not all-even", t.exp));
            }
            terms.push((t.exp.clone(), t.coeff.to_complex(prec)?));
        }
        let phi = MultiSeries::from_terms(self.n_cusps, self.truncation_order, prec, terms).map_err(|e| IoError::Format(e.to_string()))?;
        let mut shapes = Vec::with_capacity(self.n_cusps);
        for s in &self.cusp_shapes {
            let exact = match &s.exact {
                None => None,
                Some(ExactDto::Tag(t)) if t == "nonquadratic" => Some(ExactShape::NonQuadratic),
                Some(ExactDto::Tag(t)) => return fmt_err(format!("unknown exact tag {t:?}")),
                Some(ExactDto::Quadratic(q)) => {
                    let a = parse_rational(&q.a).map_err(|e| IoError::Format(e.to_string()))?;
                    let b = parse_rational(&q.b).map_err(|e| IoError::Format(e.to_string()))?;
                    if q.d == 0 {
                        return fmt_err("d must be positive");
                    }
                    let q = QuadraticNumber::new(a, b, q.d).map_err(|e| IoError::Format(e.to_string()))?;
                    Some(ExactShape::Quadratic(q))
                }
            };
            shapes.push(CuspShape { exact, approx: s.approx.to_complex(prec)? });
        }
        Ok(NZPotential::new(self.label.clone(), phi, shapes, self.base_cvol.to_complex(prec)?, self.sgi))
    }
}

pub fn read_manifold(text: &str, prec: Option<u32>) -> Result<NZPotential, IoError> {
    let f: ManifoldFile = serde_json::from_str(text)?;
    f.to_potential(prec)
}

pub fn write_manifold(m: &NZPotential) -> String {
    serde_json::to_string_pretty(&ManifoldFile::from_potential(m)).expect("plain data serializes")
}

// ---- reports ----

/// Matrix entry: a JSON integer when integral, otherwise `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDto {
    Int(i64),
    Frac(String),
}

pub type MatrixDto = [[EntryDto; 2]; 2];

pub fn matrix_dto(m: &RationalMatrix2) -> MatrixDto {
    let e = |x: &Rational| match (x.denom() == &1, x.numer().to_i64()) {
        (true, Some(v)) => EntryDto::Int(v),
        _ => EntryDto::Frac(crate::classify::format_rational(x)),
    };
    [[e(&m.0[0][0]), e(&m.0[0][1])], [e(&m.0[1][0]), e(&m.0[1][1])]]
}

pub fn matrix_from_dto(m: &MatrixDto) -> Result<RationalMatrix2, IoError> {
    let e = |x: &EntryDto| match x {
        EntryDto::Int(v) => Ok(Rational::from(*v)),
        EntryDto::Frac(s) => parse_rational(s).map_err(|e| IoError::Format(e.to_string())),
    };
    Ok(RationalMatrix2::new(e(&m[0][0])?, e(&m[0][1])?, e(&m[1][0])?, e(&m[1][1])?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VerdictDto {
    Identity,
    SwapRho { rho: MatrixDto },
    SigmaOrbit { sigma: MatrixDto, power: u32, cusp: usize },
    SigmaPhiOrbit { sigma: MatrixDto, power_sigma: u32, phi: MatrixDto, power_phi: u32 },
    Unrelated,
    Undetermined { reason: String },
}

pub const SHAPES_INEXACT: &str = "shapes inexact";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VerdictField {
    Verdict(VerdictDto),
    /// Always [`SHAPES_INEXACT`].
    Note(String),
}

pub fn verdict_dto(v: &ClassificationVerdict) -> VerdictDto {
    match v {
        ClassificationVerdict::Identity => VerdictDto::Identity,
        ClassificationVerdict::SwapRho { rho } => VerdictDto::SwapRho { rho: matrix_dto(rho) },
        ClassificationVerdict::SigmaOrbit { sigma, power, cusp } => {
            VerdictDto::SigmaOrbit { sigma: matrix_dto(sigma), power: *power, cusp: *cusp }
        }
        ClassificationVerdict::SigmaPhiOrbit { sigma, power_sigma, phi, power_phi } => {
            VerdictDto::SigmaPhiOrbit { sigma: matrix_dto(sigma), power_sigma: *power_sigma, phi: matrix_dto(phi), power_phi: *power_phi }
        }
        ClassificationVerdict::Unrelated => VerdictDto::Unrelated,
        ClassificationVerdict::Undetermined { reason } => VerdictDto::Undetermined { reason: reason.clone() },
    }
}

pub fn verdict_from_dto(v: &VerdictDto) -> Result<ClassificationVerdict, IoError> {
    Ok(match v {
        VerdictDto::Identity => ClassificationVerdict::Identity,
        VerdictDto::SwapRho { rho } => ClassificationVerdict::SwapRho { rho: matrix_from_dto(rho)? },
        VerdictDto::SigmaOrbit { sigma, power, cusp } => {
            ClassificationVerdict::SigmaOrbit { sigma: matrix_from_dto(sigma)?, power: *power, cusp: *cusp }
        }
        VerdictDto::SigmaPhiOrbit { sigma, power_sigma, phi, power_phi } => ClassificationVerdict::SigmaPhiOrbit {
            sigma: matrix_from_dto(sigma)?,
            power_sigma: *power_sigma,
            phi: matrix_from_dto(phi)?,
            power_phi: *power_phi,
        },
        VerdictDto::Unrelated => ClassificationVerdict::Unrelated,
        VerdictDto::Undetermined { reason } => ClassificationVerdict::Undetermined { reason: reason.clone() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DependenceDto {
    Dependent {
        #[serde(flatten)]
        relation: DependenceRelation,
    },
    IndependentUpTo {
        bound: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceEntryDto {
    /// Names drawn from `t1`, `t2`, `t1'`, `t2'`.
    pub subset: Vec<String>,
    pub result: DependenceDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReportDto {
    pub slopes: Vec<FillingSlope>,
    pub slopes_prime: Vec<FillingSlope>,
    pub pvol_diff: String,
    pub cvol_diff: String,
    pub dependence: Vec<DependenceEntryDto>,
    pub verdict: VerdictField,
}

impl PairReportDto {
    pub fn from_report(r: &PairReport) -> Self {
        PairReportDto {
            slopes: r.slopes.clone(),
            slopes_prime: r.slopes_prime.clone(),
            pvol_diff: format_float(&r.pvol_diff),
            cvol_diff: format_float(&r.cvol_diff),
            dependence: r
                .dependence
                .iter()
                .map(|d| DependenceEntryDto {
                    subset: d.subset.clone(),
                    result: match &d.verdict {
                        DependenceVerdict::Dependent(rel) => DependenceDto::Dependent { relation: rel.clone() },
                        DependenceVerdict::IndependentUpTo(b) => DependenceDto::IndependentUpTo { bound: *b },
                    },
                })
                .collect(),
            verdict: match &r.verdict {
                Some(v) => VerdictField::Verdict(verdict_dto(v)),
                None => VerdictField::Note(SHAPES_INEXACT.into()),
            },
        }
    }

    pub fn to_report(&self) -> Result<PairReport, IoError> {
        let f = |s: &str| parse_float(s, bits_for(s));
        Ok(PairReport {
            slopes: self.slopes.clone(),
            slopes_prime: self.slopes_prime.clone(),
            pvol_diff: f(&self.pvol_diff)?,
            cvol_diff: f(&self.cvol_diff)?,
            dependence: self
                .dependence
                .iter()
                .map(|d| DependenceEntry {
                    subset: d.subset.clone(),
                    verdict: match &d.result {
                        DependenceDto::Dependent { relation } => DependenceVerdict::Dependent(relation.clone()),
                        DependenceDto::IndependentUpTo { bound } => DependenceVerdict::IndependentUpTo(*bound),
                    },
                })
                .collect(),
            verdict: match &self.verdict {
                VerdictField::Verdict(v) => Some(verdict_from_dto(v)?),
                VerdictField::Note(s) if s == SHAPES_INEXACT => None,
                VerdictField::Note(s) => return fmt_err(format!("unknown verdict note {s:?}")),
            },
        })
    }
}

pub fn write_reports(reports: &[PairReport]) -> String {
    let dtos: Vec<PairReportDto> = reports.iter().map(PairReportDto::from_report).collect();
    serde_json::to_string_pretty(&dtos).expect("plain data serializes")
}

pub fn read_reports(text: &str) -> Result<Vec<PairReport>, IoError> {
    let dtos: Vec<PairReportDto> = serde_json::from_str(text)?;
    dtos.iter().map(PairReportDto::to_report).collect()
}

// ---- other command outputs ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationDto {
    pub label: String,
    pub valid: bool,
    pub violations: Vec<crate::manifold::Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDto {
    pub slopes: Vec<FillingSlope>,
    pub u: Vec<ComplexDto>,
    pub v: Vec<ComplexDto>,
    pub residual: String,
    pub precision_bits: u32,
    pub iterations: usize,
}

impl SolutionDto {
    pub fn from_solution(s: &crate::filling::FillingSolution) -> Self {
        SolutionDto {
            slopes: s.slopes.clone(),
            u: s.u.iter().map(ComplexDto::from_complex).collect(),
            v: s.v.iter().map(ComplexDto::from_complex).collect(),
            residual: format_float(&s.residual),
            precision_bits: s.precision_bits,
            iterations: s.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsDto {
    pub slopes: Vec<FillingSlope>,
    pub t: Vec<ComplexDto>,
    pub lambda: Vec<ComplexDto>,
    pub pvol: ComplexDto,
    pub cvol: ComplexDto,
}

impl InvariantsDto {
    pub fn new(slopes: &[FillingSlope], inv: &crate::filling::FillingInvariants) -> Self {
        InvariantsDto {
            slopes: slopes.to_vec(),
            t: inv.t.iter().map(ComplexDto::from_complex).collect(),
            lambda: inv.lambda.iter().map(ComplexDto::from_complex).collect(),
            pvol: ComplexDto::from_complex(&inv.pvol),
            cvol: ComplexDto::from_complex(&inv.cvol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyDto {
    pub tau1: String,
    pub tau2: String,
    pub slopes: Vec<String>,
    pub slopes_prime: Vec<String>,
    pub verdict: VerdictDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryDto {
    pub sigma: MatrixDto,
    /// Smallest `m <= 12` with `sigma^m = I`.
    pub order: Option<u32>,
    pub slope_action: MatrixDto,
    /// Order of the action on slopes, where `-I` is trivial.
    pub slope_order: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetriesDto {
    pub tau: String,
    pub symmetries: Vec<SymmetryDto>,
}

pub const UNDEFINED: &str = "undefined";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDto {
    pub shape: crate::classify::SubgroupShape,
    pub k: Vec<String>,
    pub l: Vec<String>,
    pub n: Vec<String>,
    pub trichotomy_case: Option<u8>,
    pub checks: std::collections::BTreeMap<String, crate::classify::CheckOutcome>,
    pub all_pass: bool,
}

impl WitnessDto {
    pub fn new(shape: crate::classify::SubgroupShape, w: &crate::classify::RelationWitness) -> Self {
        let f = |xs: &[Option<Rational>; 4]| -> Vec<String> {
            xs.iter().map(|x| x.as_ref().map_or_else(|| UNDEFINED.to_string(), crate::classify::format_rational)).collect()
        };
        WitnessDto {
            shape,
            k: f(&w.k),
            l: f(&w.l),
            n: f(&w.n),
            trichotomy_case: w.trichotomy_case,
            checks: w.checks.clone(),
            all_pass: w.all_pass(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientedSlopeDto {
    pub p: i64,
    pub q: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<[i64; 2]>,
}

impl OrientedSlopeDto {
    pub fn to_slope(self) -> crate::classify::OrientedSlope {
        crate::classify::OrientedSlope { p: self.p, q: self.q, completion: self.completion.map(|[r, s]| (r, s)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyDto {
    pub t: [ComplexDto; 2],
    pub t_prime: [ComplexDto; 2],
}

/// Input file of `verify-relations`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgroupSpecFile {
    pub shape: crate::classify::SubgroupShape,
    pub blocks: [MatrixDto; 4],
    #[serde(default)]
    pub primed: [Option<MatrixDto>; 4],
    /// Exact shape expressions, e.g. `["i", "√-2"]`.
    #[serde(default)]
    pub shapes: Option<[String; 2]>,
    #[serde(default)]
    pub slopes: Option<[OrientedSlopeDto; 2]>,
    #[serde(default)]
    pub slopes_prime: Option<[OrientedSlopeDto; 2]>,
    #[serde(default)]
    pub holonomy: Option<HolonomyDto>,
}

impl SubgroupSpecFile {
    pub fn to_spec(&self) -> Result<crate::classify::SubgroupSpec, IoError> {
        let m = |x: &MatrixDto| matrix_from_dto(x);
        let blocks = [m(&self.blocks[0])?, m(&self.blocks[1])?, m(&self.blocks[2])?, m(&self.blocks[3])?];
        let mut primed: [Option<RationalMatrix2>; 4] = [None, None, None, None];
        for (dst, src) in primed.iter_mut().zip(&self.primed) {
            if let Some(x) = src {
                *dst = Some(m(x)?);
            }
        }
        let shapes = match &self.shapes {
            None => None,
            Some([a, b]) => {
                let p = |s: &str| QuadraticNumber::parse(s).map_err(|e| IoError::Format(e.to_string()));
                Some([p(a)?, p(b)?])
            }
        };
        Ok(crate::classify::SubgroupSpec { shape: self.shape, blocks, primed, shapes })
    }

    pub fn holonomy_data(&self, prec: u32) -> Result<Option<crate::classify::HolonomyData>, IoError> {
        match &self.holonomy {
            None => Ok(None),
            Some(h) => Ok(Some(crate::classify::HolonomyData {
                t: [h.t[0].to_complex(prec)?, h.t[1].to_complex(prec)?],
                t_prime: [h.t_prime[0].to_complex(prec)?, h.t_prime[1].to_complex(prec)?],
            })),
        }
    }
}

/// Any document the command-line tool writes.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Reports(Vec<PairReport>),
    Manifold(Box<ManifoldFile>),
    Validation(ValidationDto),
    Solution(SolutionDto),
    Invariants(InvariantsDto),
    Classification(ClassifyDto),
    Symmetries(SymmetriesDto),
    Witness(WitnessDto),
}

impl Document {
    pub fn name(&self) -> &'static str {
        match self {
            Document::Reports(_) => "reports",
            Document::Manifold(_) => "manifold",
            Document::Validation(_) => "validation",
            Document::Solution(_) => "solution",
            Document::Invariants(_) => "invariants",
            Document::Classification(_) => "classification",
            Document::Symmetries(_) => "symmetries",
            Document::Witness(_) => "witness",
        }
    }
}

/// Recognizes and parses any output of the command-line tool.
pub fn read_document(text: &str) -> Result<Document, IoError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        return Ok(Document::Reports(read_reports(text)?));
    }
    let obj = value.as_object().ok_or_else(|| IoError::Format("expected an object or an array".into()))?;
    let has = |k: &str| obj.contains_key(k);
    let v = value.clone();
    Ok(if has("phi") {
        let f: ManifoldFile = serde_json::from_value(v)?;
        f.to_potential(None)?;
        Document::Manifold(Box::new(f))
    } else if has("violations") {
        Document::Validation(serde_json::from_value(v)?)
    } else if has("residual") {
        Document::Solution(serde_json::from_value(v)?)
    } else if has("pvol") {
        Document::Invariants(serde_json::from_value(v)?)
    } else if has("verdict") {
        Document::Classification(serde_json::from_value(v)?)
    } else if has("symmetries") {
        Document::Symmetries(serde_json::from_value(v)?)
    } else if has("checks") {
        Document::Witness(serde_json::from_value(v)?)
    } else {
        return fmt_err("unrecognized document");
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::make_symmetric_curve;
    use std::collections::BTreeMap;

    #[test]
    fn float_round_trip_is_exact() {
        let x = Float::with_val(256, Float::parse("0.1").unwrap()) / 3u32;
        let s = format_float(&x);
        assert!(s.chars().filter(|c| c.is_ascii_digit()).count() >= 85);
        assert_eq!(parse_float(&s, 256).unwrap(), x);
    }

    #[test]
    fn manifold_round_trip() {
        let tau = QuadraticNumber::i();
        let sigma = RationalMatrix2::from_ints(0, 1, -1, 0);
        let mut seeds = BTreeMap::new();
        seeds.insert(3, BigComplex::one(256));
        let m = make_symmetric_curve(&tau, &sigma, &seeds, 9, 256).unwrap();
        let text = write_manifold(&m);
        let back = read_manifold(&text, None).unwrap();
        assert_eq!(back, m);
        assert!(back.validate().is_valid());
    }

    #[test]
    fn odd_exponent_rejected() {
        let m = NZPotential::from_phi("x", MultiSeries::from_terms(1, 9, 128, [(vec![2], BigComplex::i(128))]).unwrap(), false);
        let mut f = ManifoldFile::from_potential(&m);
        f.phi[0].exp = vec![3];
        assert!(f.to_potential(None).is_err());
    }

    #[test]
    fn verdict_tags() {
        let v = verdict_dto(&ClassificationVerdict::SigmaOrbit { sigma: RationalMatrix2::from_ints(0, 1, -1, 0), power: 1, cusp: 0 });
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"kind":"SigmaOrbit","sigma":[[0,1],[-1,0]],"power":1,"cusp":0}"#);
        let f: VerdictField = serde_json::from_str("\"shapes inexact\"").unwrap();
        assert_eq!(f, VerdictField::Note(SHAPES_INEXACT.into()));
    }
}
