//! JSON problem and solution documents. All scalars are strings.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, ExpSum, Field, GaussRat, Mode, Poly, Scalar, Term, Var};
use crate::normalize::{NormalizeError, RawProblem};
use crate::roots::RootClass;
use crate::solver::{Basis, ClassReport, IndicialAnalysis, SolutionBasis, SolveReport, Source};
use crate::transform::{shift_by_lambda, stirling_matrix, to_t_domain, TransformError};
use crate::verify::{verify_solution, ZeroCertificate};

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Scalar(#[from] AlgebraError),
    #[error("{0}")]
    Problem(#[from] NormalizeError),
    #[error("frequency {0} is not a real rational number")]
    Frequency(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub freq: String,
    pub coef: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leading: Option<Vec<TermDoc>>,
    pub coefficients: Vec<Vec<TermDoc>>,
}

/// A parsed problem. Decimal coefficients are converted to the exact value
/// of the double they denote and flag the problem as approximate.
#[derive(Clone, Debug)]
pub struct ParsedProblem {
    pub raw: RawProblem<GaussRat>,
    pub approximate_input: bool,
}

fn float_to_rational(x: f64) -> Result<BigRational, AlgebraError> {
    BigRational::from_float(x).ok_or_else(|| AlgebraError::Parse(format!("non-finite value {x}")))
}

/// Nearest rational with denominator at most `bound` within `1e-12` relative.
fn snap_real(x: f64, bound: u64) -> Option<BigRational> {
    (1..=bound.max(1)).find_map(|q| {
        let n = (x * q as f64).round();
        ((n / q as f64 - x).abs() <= 1e-12 * x.abs().max(1.0))
            .then(|| BigRational::new(BigInt::from(n as i64), BigInt::from(q)))
    })
}

impl ProblemDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// `snap_bound` limits denominators when decimal frequencies are read
    /// back as rationals.
    pub fn parse(&self, snap_bound: u64) -> Result<ParsedProblem, DocumentError> {
        let mut approximate_input = false;
        let mut conv = |terms: &[TermDoc]| -> Result<ExpSum<GaussRat>, DocumentError> {
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                let freq = match t.freq.parse::<Scalar>()? {
                    Scalar::Exact(g) => g,
                    Scalar::Approx(c) => {
                        let re = (c.im == 0.0).then(|| snap_real(c.re, snap_bound)).flatten();
                        GaussRat::real(re.ok_or_else(|| DocumentError::Frequency(t.freq.clone()))?)
                    }
                };
                let coef = match t.coef.parse::<Scalar>()? {
                    Scalar::Exact(g) => g,
                    Scalar::Approx(c) => {
                        approximate_input = true;
                        GaussRat::new(float_to_rational(c.re)?, float_to_rational(c.im)?)
                    }
                };
                out.push(Term { freq, coef: Poly::constant(coef, Var::Z) });
            }
            Ok(ExpSum::from_terms(out)?)
        };
        let leading = match &self.leading {
            Some(l) => conv(l)?,
            None => ExpSum::exp(GaussRat::zero(), GaussRat::one()),
        };
        let coefficients = self.coefficients.iter().map(|c| conv(c)).collect::<Result<Vec<_>, _>>()?;
        let raw = RawProblem::new(self.order, leading, coefficients)?;
        Ok(ParsedProblem { raw, approximate_input })
    }

    pub fn from_problem(p: &RawProblem<GaussRat>) -> Self {
        let conv = |e: &ExpSum<GaussRat>| -> Vec<TermDoc> {
            e.terms().iter().map(|t| TermDoc { freq: t.freq.to_string(), coef: t.coef.coeff(0).to_string() }).collect()
        };
        let one = ExpSum::exp(GaussRat::zero(), GaussRat::one());
        ProblemDocument {
            order: p.order(),
            leading: (p.leading() != &one).then(|| conv(p.leading())),
            coefficients: p.coefficients().iter().map(conv).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionTermDoc {
    pub freq: String,
    /// Coefficients of the z-polynomial, lowest power first.
    pub zpoly: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub verified: bool,
    pub max_residual: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_frequency: Option<String>,
}

impl From<&ZeroCertificate> for VerificationDoc {
    fn from(c: &ZeroCertificate) -> Self {
        VerificationDoc {
            verified: c.is_zero,
            max_residual: c.max_magnitude,
            threshold: c.threshold,
            worst_frequency: c.worst_frequency.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub terms: Vec<SolutionTermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootDoc {
    pub value: String,
    pub multiplicity: usize,
    pub exact: bool,
    pub class: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassDoc {
    pub base: String,
    pub offsets: Vec<u64>,
    pub multiplicities: Vec<usize>,
    pub total: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_candidates: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions_found: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions_kept: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizationDoc {
    /// Common frequency `λ'`; the normalized variable is `w = ±λ' z`.
    pub lambda_prime: String,
    pub flipped: bool,
    /// Power of `e^w` multiplied through to clear negative exponents.
    pub shift: usize,
    pub gamma: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leading_divided_by: Option<String>,
    /// `P_0 .. P_n` as polynomials in `t = e^w`.
    pub p: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetadataDoc {
    pub mode: Mode,
    pub order: usize,
    pub indicial: String,
    pub roots: Vec<RootDoc>,
    pub classes: Vec<ClassDoc>,
    pub normalization: NormalizationDoc,
    pub pure_exponentials: Vec<String>,
    pub rank: usize,
    pub pivots: Vec<(String, usize)>,
    pub count_bound: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub basis: Vec<SolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<MetadataDoc>,
}

/// Candidate solutions read from a document, in the mode their scalars imply.
#[derive(Clone, Debug)]
pub enum Candidates {
    Exact(Vec<ExpSum<GaussRat>>),
    Approx(Vec<ExpSum<Complex64>>),
}

impl Candidates {
    pub fn len(&self) -> usize {
        match self {
            Candidates::Exact(v) => v.len(),
            Candidates::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn expsum_terms<F: Field>(e: &ExpSum<F>) -> Vec<SolutionTermDoc> {
    e.terms()
        .iter()
        .map(|t| SolutionTermDoc {
            freq: t.freq.to_scalar().to_string(),
            zpoly: t.coef.coeffs().iter().map(|c| c.to_scalar().to_string()).collect(),
        })
        .collect()
}

impl SolutionDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// A bare document listing candidates without metadata.
    pub fn from_candidates<F: Field>(basis: &[ExpSum<F>]) -> Self {
        SolutionDocument {
            basis: basis
                .iter()
                .map(|e| SolutionDoc { terms: expsum_terms(e), display: None, source: None, verification: None })
                .collect(),
            metadata: None,
        }
    }

    pub fn candidates(&self) -> Result<Candidates, DocumentError> {
        let mut parsed: Vec<Vec<(Scalar, Vec<Scalar>)>> = Vec::with_capacity(self.basis.len());
        let mut exact = true;
        for s in &self.basis {
            let mut terms = Vec::with_capacity(s.terms.len());
            for t in &s.terms {
                let freq: Scalar = t.freq.parse()?;
                let zpoly: Vec<Scalar> = t.zpoly.iter().map(|c| c.parse()).collect::<Result<_, _>>()?;
                exact &= freq.as_exact().is_some() && zpoly.iter().all(|c| c.as_exact().is_some());
                terms.push((freq, zpoly));
            }
            parsed.push(terms);
        }
        fn build<F: Field>(parsed: &[Vec<(Scalar, Vec<Scalar>)>]) -> Result<Vec<ExpSum<F>>, AlgebraError> {
            parsed
                .iter()
                .map(|terms| {
                    ExpSum::from_terms(terms.iter().map(|(f, z)| Term {
                        freq: F::from_scalar(f).expect("mode checked"),
                        coef: Poly::new(z.iter().map(|c| F::from_scalar(c).expect("mode checked")).collect(), Var::Z),
                    }))
                })
                .collect()
        }
        Ok(if exact { Candidates::Exact(build(&parsed)?) } else { Candidates::Approx(build(&parsed)?) })
    }

    pub fn from_report(rep: &SolveReport) -> Self {
        fn docs<F: Field>(b: &SolutionBasis<F>) -> Vec<SolutionDoc> {
            b.entries
                .iter()
                .map(|e| SolutionDoc {
                    terms: expsum_terms(&e.solution),
                    display: Some(e.solution.to_string()),
                    source: Some(serde_json::to_value(&e.source).expect("serializable")),
                    verification: Some((&e.verification).into()),
                })
                .collect()
        }
        let basis = match &rep.basis {
            Basis::Exact(b) => docs(b),
            Basis::Approx(b) => docs(b),
        };
        let a = &rep.analysis;
        let ind = rep.basis.independence();
        let metadata = MetadataDoc {
            mode: rep.basis.mode(),
            order: a.normalized.n,
            indicial: a.indicial.to_string(),
            roots: root_docs(a),
            classes: class_docs(&a.classes, Some(rep.basis.classes())),
            normalization: normalization_doc(a),
            pure_exponentials: rep.basis.pure_exponentials().iter().map(|s| s.to_string()).collect(),
            rank: ind.rank,
            pivots: ind.pivots.clone(),
            count_bound: rep.basis.count_bound(),
            notes: rep.notes.clone(),
        };
        SolutionDocument { basis, metadata: Some(metadata) }
    }
}

fn class_of(a: &IndicialAnalysis, root: &Scalar) -> usize {
    a.classes
        .iter()
        .position(|c| {
            c.offsets.iter().any(|o| {
                let member = match &c.base {
                    Scalar::Exact(b) => Scalar::Exact(b.clone() + GaussRat::from_i64(*o as i64)),
                    Scalar::Approx(b) => Scalar::Approx(b + *o as f64),
                };
                member.approx_eq(root, 1e-6)
            })
        })
        .unwrap_or(0)
}

pub fn root_docs(a: &IndicialAnalysis) -> Vec<RootDoc> {
    a.roots
        .roots
        .iter()
        .map(|r| RootDoc {
            value: r.value.to_string(),
            multiplicity: r.multiplicity,
            exact: r.is_exact(),
            class: class_of(a, &r.value),
        })
        .collect()
}

pub fn class_docs(classes: &[RootClass], reports: Option<&[ClassReport]>) -> Vec<ClassDoc> {
    classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let rep = reports.and_then(|r| r.get(i));
            ClassDoc {
                base: c.base.to_string(),
                offsets: c.offsets.clone(),
                multiplicities: c.multiplicities.clone(),
                total: c.total,
                warning: c.warning.clone(),
                degree_candidates: rep.map(|r| r.degree_candidates.clone()),
                solutions_found: rep.map(|r| r.found),
                solutions_kept: rep.map(|r| r.kept),
            }
        })
        .collect()
}

pub fn normalization_doc(a: &IndicialAnalysis) -> NormalizationDoc {
    let np = &a.normalized;
    NormalizationDoc {
        lambda_prime: GaussRat::real(np.lambda_prime.clone()).to_string(),
        flipped: np.flipped,
        shift: np.shift,
        gamma: np.gamma,
        leading_divided_by: np.leading_divided_by.clone(),
        p: np.p.iter().map(|p| p.to_string()).collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndicialReport {
    pub indicial: String,
    pub coefficients: Vec<String>,
    pub roots: Vec<RootDoc>,
    pub classes: Vec<ClassDoc>,
    pub normalization: NormalizationDoc,
}

impl IndicialReport {
    pub fn new(a: &IndicialAnalysis) -> Self {
        IndicialReport {
            indicial: a.indicial.to_string(),
            coefficients: a.indicial.coeffs().iter().map(|c| c.to_string()).collect(),
            roots: root_docs(a),
            classes: class_docs(&a.classes, None),
            normalization: normalization_doc(a),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UEquationDoc {
    pub lambda: String,
    /// `β_i` with the equation `Σ β_i(t) t^i u^(i) = 0`.
    pub beta: Vec<String>,
    /// Coefficients `c_i` of `Σ c_i(t) u^(i)`, common power of `t` removed.
    pub operator: Vec<String>,
    pub common_t_power: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformReport {
    pub stirling: Vec<Vec<String>>,
    /// `α_i` with the equation `Σ α_i(t) t^i v^(i) = 0`.
    pub alpha: Vec<String>,
    pub operator: Vec<String>,
    pub common_t_power: usize,
    /// Per exact indicial root.
    pub u_equations: Vec<UEquationDoc>,
    pub normalization: NormalizationDoc,
}

impl TransformReport {
    pub fn new(a: &IndicialAnalysis) -> Result<Self, TransformError> {
        let t = to_t_domain(&a.normalized)?;
        let st = stirling_matrix(a.normalized.n);
        let (op, common) = t.operator_coefficients();
        let u_equations = a
            .roots
            .roots
            .iter()
            .filter_map(|r| r.value.as_exact().cloned())
            .map(|l| {
                let u = shift_by_lambda(&t, &l);
                let (op, common) = u.operator_coefficients();
                UEquationDoc {
                    lambda: l.to_string(),
                    beta: u.beta.iter().map(|b| b.to_string()).collect(),
                    operator: op.iter().map(|c| c.to_string()).collect(),
                    common_t_power: common,
                }
            })
            .collect();
        Ok(TransformReport {
            stirling: st.entries.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect(),
            alpha: t.alpha.iter().map(|p| p.to_string()).collect(),
            operator: op.iter().map(|c| c.to_string()).collect(),
            common_t_power: common,
            u_equations,
            normalization: normalization_doc(a),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateVerdict {
    pub index: usize,
    pub solution: String,
    pub verification: VerificationDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: Mode,
    pub all_verified: bool,
    pub candidates: Vec<CandidateVerdict>,
}

/// Checks every candidate against the raw problem. Exact only when both
/// the problem and the candidates are exact.
pub fn verify_candidates(p: &ParsedProblem, c: &Candidates, tol: f64) -> Result<VerifyReport, DocumentError> {
    fn run<F: Field>(
        raw: &RawProblem<F>,
        cands: &[ExpSum<F>],
        tol: f64,
    ) -> Result<Vec<CandidateVerdict>, AlgebraError> {
        cands
            .iter()
            .enumerate()
            .map(|(index, f)| {
                let v = verify_solution(f, raw, tol)?;
                Ok(CandidateVerdict { index, solution: f.to_string(), verification: (&v.certificate).into() })
            })
            .collect()
    }
    let (mode, candidates) = match c {
        Candidates::Exact(v) if !p.approximate_input => (Mode::Exact, run(&p.raw, v, tol)?),
        Candidates::Exact(v) => {
            let v: Vec<ExpSum<Complex64>> = v.iter().map(ExpSum::to_approx).collect();
            (Mode::Approx, run(&p.raw.to_approx(), &v, tol)?)
        }
        Candidates::Approx(v) => (Mode::Approx, run(&p.raw.to_approx(), v, tol)?),
    };
    Ok(VerifyReport { mode, all_verified: candidates.iter().all(|c| c.verification.verified), candidates })
}

/// `Source` as it appears in documents.
pub fn source_label(s: &Source) -> String {
    match s {
        Source::PureExponential { lambda } => format!("pure exponential, λ = {lambda}"),
        Source::Class { base } => format!("class with base {base}"),
    }
}
