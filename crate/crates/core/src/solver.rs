//! Finite-order solution bases.
//!
//! Three sources of candidates are combined: common roots of the
//! pure-exponential identity, polynomial solutions `u` of the shifted
//! equations, and for each integer-difference class a z-polynomial ansatz
//! `e^{λw} Σ_p w^p u_p(e^w)` solved as one homogeneous linear system.
//! Every emitted element is re-verified against the original equation.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::algebra::{
    bigint_to_field, binomial_table, AlgebraError, ExpSum, Field, GaussRat, Mode, Poly, Scalar, Term, Var,
};
use crate::linalg::{rref, DenseMatrix, LinearField};
use crate::normalize::{denormalize_solution, normalize, NormalizeError, NormalizedProblem, RawProblem};
use crate::roots::{
    find_roots, group_into_classes, numeric_roots, IntegerRoots, RootClass, RootConfig, RootError, RootSet,
};
use crate::transform::{indicial_polynomial, shift_by_lambda, to_t_domain, TransformError, UDomainODE};
use crate::verify::{independence, verify_solution, Independence, ZeroCertificate, DEFAULT_VERIFY_TOL};

pub const DEFAULT_MAX_DEGREE: usize = 500;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("irregular singularity at t = 0 (leading factor e^({gamma}w)): only verification is supported")]
    Unsupported { gamma: usize },
    #[error("degree candidate {candidate} exceeds the cap {cap}")]
    CapExceeded { candidate: u64, cap: usize },
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<RootError> for SolveError {
    fn from(e: RootError) -> Self {
        SolveError::NumericFailure(e.to_string())
    }
}

impl From<TransformError> for SolveError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::IrregularSingularity { gamma } => SolveError::Unsupported { gamma },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_degree: usize,
    /// Relative residual tolerance in approximate mode.
    pub tol: f64,
    pub roots: RootConfig,
    /// Run the whole pipeline in floating point even when the roots are exact.
    pub force_numeric: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_degree: DEFAULT_MAX_DEGREE,
            tol: DEFAULT_VERIFY_TOL,
            roots: RootConfig::default(),
            force_numeric: false,
        }
    }
}

fn exact_or_small<F: Field>(x: &F, scale: f64) -> bool {
    if F::EXACT {
        x.is_zero()
    } else {
        x.magnitude() <= 1e-9 * scale.max(1.0)
    }
}

// ---------------------------------------------------------------------------
// recurrence

/// `R_s(x) = Σ_i β_{i,s} x^(falling i)`; the `t^N` coefficient of the
/// u-equation applied to `Σ γ_k t^k` is `Σ_s R_s(N - s) γ_{N-s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceData<F> {
    pub lambda: F,
    pub r: Vec<Poly<F>>,
}

impl<F: Field> RecurrenceData<F> {
    pub fn band(&self) -> usize {
        self.r.len() - 1
    }
}

pub fn recurrence_polys<F: Field>(ode: &UDomainODE<F>) -> RecurrenceData<F> {
    let d = ode.band();
    let r = (0..=d)
        .map(|s| {
            let c: Vec<F> = ode.beta.iter().map(|b| b.coeff(s)).collect();
            Poly::from_falling_basis(&c, Var::Lambda)
        })
        .collect();
    RecurrenceData { lambda: ode.lambda.clone(), r }
}

#[derive(Clone, Debug)]
pub struct Series<F> {
    pub coeffs: Vec<F>,
    /// First index where the recurrence is inconsistent (a log term would
    /// be needed); the series stops there.
    pub obstruction: Option<usize>,
}

/// Formal series `γ_0 = 1, γ_1, ..` from the recurrence. At a consistent
/// resonance the free coefficient is set to zero.
pub fn forward_series<F: Field>(rec: &RecurrenceData<F>, terms: usize) -> Series<F> {
    let d = rec.band();
    let mut coeffs: Vec<F> = Vec::with_capacity(terms);
    let scale = rec.r.iter().map(Poly::max_magnitude).fold(0.0, f64::max);
    for k in 0..terms {
        let kf = F::from_i64(k as i64);
        let rhs = if k == 0 {
            F::zero()
        } else {
            (1..=d.min(k))
                .fold(F::zero(), |acc, s| acc - rec.r[s].eval(&F::from_i64((k - s) as i64)) * coeffs[k - s].clone())
        };
        let lead = rec.r[0].eval(&kf);
        if k == 0 {
            if !exact_or_small(&lead, scale) {
                return Series { coeffs, obstruction: Some(0) };
            }
            coeffs.push(F::one());
        } else if !exact_or_small(&lead, scale) {
            coeffs.push(rhs.div(&lead).expect("nonzero"));
        } else if exact_or_small(&rhs, scale) {
            coeffs.push(F::zero());
        } else {
            return Series { coeffs, obstruction: Some(k) };
        }
    }
    Series { coeffs, obstruction: None }
}

/// Possible degrees of polynomial solutions `u`: nonnegative integer roots
/// of `R_d`, the coefficient that must cancel in the top power of `t`.
pub fn degree_candidates<F: IntegerRoots>(ode: &UDomainODE<F>) -> Vec<u64> {
    let rec = recurrence_polys(ode);
    F::nonneg_integer_roots(&rec.r[rec.band()])
}

fn check_cap(candidates: &[u64], cap: usize) -> Result<Option<usize>, SolveError> {
    match candidates.iter().max() {
        None => Ok(None),
        Some(&d) if d > cap as u64 => Err(SolveError::CapExceeded { candidate: d, cap }),
        Some(&d) => Ok(Some(d as usize)),
    }
}

fn canonical_rows<F: Field>(rows: Vec<Vec<F>>) -> Vec<Vec<F>> {
    if rows.is_empty() {
        return rows;
    }
    rref(rows).0
}

/// Basis of polynomial solutions of the u-equation, in reduced echelon form
/// on the coefficients `γ_0, γ_1, ..`.
pub fn poly_solutions<F: LinearField + IntegerRoots>(
    ode: &UDomainODE<F>,
    cap: usize,
) -> Result<Vec<Poly<F>>, SolveError> {
    let rec = recurrence_polys(ode);
    let Some(top) = check_cap(&F::nonneg_integer_roots(&rec.r[rec.band()]), cap)? else {
        return Ok(Vec::new());
    };
    let d = rec.band();
    let mut m = DenseMatrix::zeros(top + d + 1, top + 1);
    let mut floor: f64 = 0.0;
    for k in 0..=top {
        for s in 0..=d {
            // summand sizes of R_s(k) = Σ_i β_{i,s} k^(falling i)
            let mut falling = 1.0;
            for (i, b) in ode.beta_bound.iter().enumerate() {
                floor = floor.max(b.get(s).copied().unwrap_or(0.0) * falling);
                falling *= (k as f64 - i as f64).abs();
            }
            m.set(k + s, k, rec.r[s].eval(&F::from_i64(k as i64)));
        }
    }
    Ok(canonical_rows(F::nullspace_with_floor(&m, floor)).into_iter().map(|c| Poly::new(c, Var::T)).collect())
}

// ---------------------------------------------------------------------------
// pure exponentials

/// The λ with `λ^n + Σ_j P_j(t) λ^j ≡ 0` in `t`: roots of the gcd of the
/// per-power polynomials. Values are in the normalized variable.
pub fn pure_exponential(np: &NormalizedProblem, cfg: &RootConfig) -> Result<Vec<Scalar>, SolveError> {
    if np.gamma > 0 {
        return Err(SolveError::Unsupported { gamma: np.gamma });
    }
    let g = (0..=np.max_degree())
        .map(|s| Poly::new(np.p.iter().map(|p| p.coeff(s)).collect(), Var::Lambda))
        .fold(Poly::zero(Var::Lambda), |acc, q| acc.gcd(&q));
    if g.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(find_roots(&g, cfg)?.roots.into_iter().map(|r| r.value).collect())
}

// ---------------------------------------------------------------------------
// class ansatz

/// `e^{λw} Σ_p w^p u_p(e^w)`; a polynomial solution has one component.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSolution<F> {
    pub base: F,
    pub components: Vec<Poly<F>>,
}

/// `e^{λw} u(e^w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySolution<F> {
    pub lambda: F,
    pub u: Poly<F>,
}

impl<F: Field> From<PolySolution<F>> for LogSolution<F> {
    fn from(s: PolySolution<F>) -> Self {
        LogSolution { base: s.lambda, components: vec![s.u] }
    }
}

/// Expands into terms `e^{(λ+k)w} Σ_p c_{p,k} w^p`.
pub fn assemble<F: Field>(s: &LogSolution<F>) -> ExpSum<F> {
    let top = s.components.iter().filter_map(Poly::degree).max();
    let Some(top) = top else {
        return ExpSum::zero();
    };
    let terms = (0..=top).map(|k| Term {
        freq: s.base.clone() + F::from_i64(k as i64),
        coef: Poly::new(s.components.iter().map(|u| u.coeff(k)).collect(), Var::Z),
    });
    ExpSum::from_terms(terms.filter(|t| !t.coef.is_zero())).expect("distinct integer offsets")
}

/// `L_r(t) = Σ_{j≥r} C(j,r) λ^{j-r} P_j(t)`, so that
/// `Σ_j P_j (e^{λw} g)^{(j)} = e^{λw} Σ_r L_r g^{(r)}`.
pub fn shifted_operator<F: Field>(p: &[Poly<F>], lambda: &F) -> Vec<Poly<F>> {
    let n = p.len() - 1;
    let binom = binomial_table(n);
    (0..=n)
        .map(|r| {
            let mut pow = F::one();
            let mut acc = Poly::zero(Var::T);
            for (j, pj) in p.iter().enumerate().skip(r) {
                let c: F = bigint_to_field(&binom[j][r]);
                acc = acc.add(&pj.scale(&(c * pow.clone())));
                pow = pow * lambda.clone();
            }
            acc
        })
        .collect()
}

/// Nonnegative integer roots of `Σ_j P_{j,d}(λ + x)^j`, `d = max deg P_j`.
/// They bound the top `e^w` power of any solution in the class of `λ`.
pub fn class_degree_candidates<F: IntegerRoots>(p: &[Poly<F>], lambda: &F) -> Vec<u64> {
    let d = p.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let top = Poly::new(p.iter().map(|pj| pj.coeff(d)).collect(), Var::Lambda);
    F::nonneg_integer_roots(&top.compose_shift(lambda))
}

/// Summand sizes of the coefficients of [`shifted_operator`].
fn shifted_operator_bound<F: Field>(p: &[Poly<F>], lambda_abs: f64) -> Vec<Vec<f64>> {
    let n = p.len() - 1;
    let deg = p.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let binom = binomial_table(n);
    (0..=n)
        .map(|r| {
            (0..=deg)
                .map(|a| {
                    (r..=n)
                        .map(|j| {
                            binom[j][r].to_f64().unwrap_or(f64::INFINITY)
                                * lambda_abs.powi((j - r) as i32)
                                * p[j].coeff(a).magnitude()
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ClassOutcome<F> {
    pub base: F,
    pub degree_candidates: Vec<u64>,
    pub solutions: Vec<LogSolution<F>>,
}

/// Solves for all `c_{p,k}` (`p ≤ total - 1`, `k ≤ max candidate`) with
/// `e^{λw} Σ c_{p,k} w^p e^{kw}` annihilated by the normalized operator.
pub fn class_ansatz_solve<F: LinearField + IntegerRoots>(
    np: &NormalizedProblem,
    cls: &RootClass,
    cap: usize,
) -> Result<ClassOutcome<F>, SolveError> {
    if np.gamma > 0 {
        return Err(SolveError::Unsupported { gamma: np.gamma });
    }
    let base = F::from_scalar(&cls.base).ok_or_else(|| {
        SolveError::InternalInconsistency(format!("approximate class base {} in exact mode", cls.base))
    })?;
    let p = np.polys::<F>();
    let candidates = class_degree_candidates(&p, &base);
    let Some(top) = check_cap(&candidates, cap)? else {
        return Ok(ClassOutcome { base, degree_candidates: candidates, solutions: Vec::new() });
    };
    let zmax = cls.total.saturating_sub(1);
    let ops = shifted_operator(&p, &base);
    let ops_bound = shifted_operator_bound(&p, base.magnitude());
    let dmax = ops.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let binom = binomial_table(np.n);
    let width = top + 1;
    let col = |q: usize, k: usize| (zmax - q) * width + k;
    let row = |s: usize, q: usize| s * (zmax + 1) + q;
    let mut m = DenseMatrix::<F>::zeros((top + dmax + 1) * (zmax + 1), (zmax + 1) * width);
    let mut floor: f64 = 0.0;
    for q in 0..=zmax {
        for k in 0..=top {
            let kf = F::from_i64(k as i64);
            for (r, lr) in ops.iter().enumerate() {
                // (w^q e^{kw})^{(r)} = Σ_m C(r,m) k^{r-m} q^(falling m) w^{q-m} e^{kw}
                let mut kpow = vec![F::one(); r + 1];
                for i in 1..=r {
                    kpow[i] = kpow[i - 1].clone() * kf.clone();
                }
                let mut falling = F::one();
                for mm in 0..=r.min(q) {
                    let c: F = bigint_to_field(&binom[r][mm]);
                    let factor = c * kpow[r - mm].clone() * falling.clone();
                    if !factor.is_zero() {
                        for (a, la) in lr.coeffs().iter().enumerate() {
                            if !la.is_zero() {
                                let term = la.clone() * factor.clone();
                                floor = floor.max(ops_bound[r][a] * factor.magnitude());
                                m.add_to(row(a + k, q - mm), col(q, k), term);
                            }
                        }
                    }
                    falling = falling * F::from_i64((q - mm) as i64);
                }
            }
        }
    }
    let solutions = canonical_rows(F::nullspace_with_floor(&m, floor))
        .into_iter()
        .map(|v| LogSolution {
            base: base.clone(),
            components: (0..=zmax).map(|q| Poly::new(v[col(q, 0)..col(q, 0) + width].to_vec(), Var::T)).collect(),
        })
        .collect();
    Ok(ClassOutcome { base, degree_candidates: candidates, solutions })
}

// ---------------------------------------------------------------------------
// full basis

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    PureExponential { lambda: String },
    Class { base: String },
}

#[derive(Clone, Debug)]
pub struct SolutionEntry<F> {
    /// In the original variable `z`.
    pub solution: ExpSum<F>,
    /// In the normalized variable `w`.
    pub normalized: ExpSum<F>,
    pub source: Source,
    pub verification: ZeroCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub base: String,
    pub offsets: Vec<u64>,
    pub multiplicities: Vec<usize>,
    pub degree_candidates: Vec<u64>,
    /// Solutions found for the class before removing dependencies.
    pub found: usize,
    /// Solutions kept in the final basis.
    pub kept: usize,
    /// Per-root u-equation outcomes, filled in when the class contributes nothing.
    pub roots: Vec<RootOutcome>,
}

/// Polynomial solutions of the u-equation at one member root.
#[derive(Clone, Debug, Serialize)]
pub struct RootOutcome {
    pub root: String,
    pub degree_candidates: Vec<u64>,
    /// `None` when a candidate exceeded the degree cap.
    pub polynomial_solutions: Option<usize>,
}

impl RootOutcome {
    pub fn reason(&self) -> &'static str {
        match (self.degree_candidates.is_empty(), self.polynomial_solutions) {
            (true, _) => "no nonnegative integer degree candidates",
            (false, Some(0)) => "trivial nullspace",
            (false, None) => "degree cap reached",
            _ => "solutions absorbed by the class ansatz",
        }
    }
}

fn root_outcomes<F: LinearField + IntegerRoots>(
    np: &NormalizedProblem,
    cls: &RootClass,
    cap: usize,
) -> Result<Vec<RootOutcome>, SolveError> {
    let Some(base) = F::from_scalar(&cls.base) else { return Ok(Vec::new()) };
    let t = to_t_domain(np)?.map(F::from_gauss);
    Ok(cls
        .offsets
        .iter()
        .map(|&o| {
            let lambda = base.clone() + F::from_i64(o as i64);
            let u = shift_by_lambda(&t, &lambda);
            RootOutcome {
                root: lambda.to_scalar().to_string(),
                degree_candidates: degree_candidates(&u),
                polynomial_solutions: poly_solutions(&u, cap).ok().map(|v| v.len()),
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct SolutionBasis<F> {
    pub entries: Vec<SolutionEntry<F>>,
    pub independence: Independence,
    pub pure_exponentials: Vec<Scalar>,
    pub classes: Vec<ClassReport>,
    /// Upper bound on the number of independent finite-order solutions.
    pub count_bound: usize,
}

impl<F: Field> SolutionBasis<F> {
    pub fn solutions(&self) -> Vec<ExpSum<F>> {
        self.entries.iter().map(|e| e.solution.clone()).collect()
    }
}

/// Count bound: `n`, or `j` when `a_j` is the last transcendental coefficient.
pub fn count_bound(np: &NormalizedProblem) -> usize {
    np.as_raw::<GaussRat>().last_transcendental().unwrap_or(np.n)
}

/// Solves a normalized problem; candidates are verified against `raw`.
pub fn solve_all<F: LinearField + IntegerRoots>(
    np: &NormalizedProblem,
    raw: &RawProblem<GaussRat>,
    classes: &[RootClass],
    cfg: &SolverConfig,
) -> Result<SolutionBasis<F>, SolveError> {
    if np.gamma > 0 {
        return Err(SolveError::Unsupported { gamma: np.gamma });
    }
    let pure = pure_exponential(np, &cfg.roots)?;
    let mut candidates: Vec<(ExpSum<F>, Source, Option<usize>)> = Vec::new();
    for lambda in &pure {
        if let Some(l) = F::from_scalar(lambda) {
            candidates.push((ExpSum::exp(l, F::one()), Source::PureExponential { lambda: lambda.to_string() }, None));
        }
    }
    let mut reports = Vec::with_capacity(classes.len());
    for (ci, cls) in classes.iter().enumerate() {
        let outcome = class_ansatz_solve::<F>(np, cls, cfg.max_degree)?;
        let roots =
            if outcome.solutions.is_empty() { root_outcomes::<F>(np, cls, cfg.max_degree)? } else { Vec::new() };
        reports.push(ClassReport {
            roots,
            base: cls.base.to_string(),
            offsets: cls.offsets.clone(),
            multiplicities: cls.multiplicities.clone(),
            degree_candidates: outcome.degree_candidates.clone(),
            found: outcome.solutions.len(),
            kept: 0,
        });
        for s in &outcome.solutions {
            candidates.push((assemble(s), Source::Class { base: cls.base.to_string() }, Some(ci)));
        }
    }

    let mut kept: Vec<(ExpSum<F>, Source)> = Vec::new();
    for (g, source, class) in candidates {
        let mut trial: Vec<ExpSum<F>> = kept.iter().map(|k| k.0.clone()).collect();
        trial.push(g.clone());
        if independence(&trial).rank > kept.len() {
            if let Some(ci) = class {
                reports[ci].kept += 1;
            }
            kept.push((g, source));
        }
    }

    let raw_f = raw.to_field::<F>()?;
    let mut entries = Vec::with_capacity(kept.len());
    for (g, source) in kept {
        let f = denormalize_solution(&g, np)?;
        let ver = verify_solution(&f, &raw_f, cfg.tol)?;
        if !ver.passed() {
            return Err(SolveError::InternalInconsistency(format!(
                "candidate {f} leaves residual {} (largest coefficient {:e})",
                ver.residual, ver.certificate.max_magnitude
            )));
        }
        entries.push(SolutionEntry { solution: f, normalized: g, source, verification: ver.certificate });
    }
    let solutions: Vec<ExpSum<F>> = entries.iter().map(|e| e.solution.clone()).collect();
    let ind = independence(&solutions);
    let bound = count_bound(np);
    if ind.rank != entries.len() || entries.len() > bound {
        return Err(SolveError::InternalInconsistency(format!(
            "{} solutions with rank {} against the bound {bound}",
            entries.len(),
            ind.rank
        )));
    }
    Ok(SolutionBasis { entries, independence: ind, pure_exponentials: pure, classes: reports, count_bound: bound })
}

#[derive(Clone, Debug)]
pub enum Basis {
    Exact(SolutionBasis<GaussRat>),
    Approx(SolutionBasis<Complex64>),
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::Exact(b) => b.entries.len(),
            Basis::Approx(b) => b.entries.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            Basis::Exact(_) => Mode::Exact,
            Basis::Approx(_) => Mode::Approx,
        }
    }

    pub fn approx_solutions(&self) -> Vec<ExpSum<Complex64>> {
        match self {
            Basis::Exact(b) => b.entries.iter().map(|e| e.solution.to_approx()).collect(),
            Basis::Approx(b) => b.solutions(),
        }
    }

    pub fn independence(&self) -> &Independence {
        match self {
            Basis::Exact(b) => &b.independence,
            Basis::Approx(b) => &b.independence,
        }
    }

    pub fn classes(&self) -> &[ClassReport] {
        match self {
            Basis::Exact(b) => &b.classes,
            Basis::Approx(b) => &b.classes,
        }
    }

    pub fn pure_exponentials(&self) -> &[Scalar] {
        match self {
            Basis::Exact(b) => &b.pure_exponentials,
            Basis::Approx(b) => &b.pure_exponentials,
        }
    }

    pub fn count_bound(&self) -> usize {
        match self {
            Basis::Exact(b) => b.count_bound,
            Basis::Approx(b) => b.count_bound,
        }
    }

    /// Per-solution `(rendered solution, source, certificate)`.
    pub fn rendered(&self) -> Vec<(String, Source, ZeroCertificate)> {
        fn go<F: Field>(b: &SolutionBasis<F>) -> Vec<(String, Source, ZeroCertificate)> {
            b.entries.iter().map(|e| (e.solution.to_string(), e.source.clone(), e.verification.clone())).collect()
        }
        match self {
            Basis::Exact(b) => go(b),
            Basis::Approx(b) => go(b),
        }
    }
}

/// Indicial polynomial, roots and classes of a problem.
#[derive(Clone, Debug)]
pub struct IndicialAnalysis {
    pub normalized: NormalizedProblem,
    pub indicial: Poly<GaussRat>,
    pub roots: RootSet,
    pub classes: Vec<RootClass>,
}

pub fn analyze(raw: &RawProblem<GaussRat>, cfg: &SolverConfig) -> Result<IndicialAnalysis, SolveError> {
    let np = normalize(raw)?;
    let indicial = indicial_polynomial(&np)?;
    let roots = if cfg.force_numeric {
        numeric_roots(&indicial.to_approx(), cfg.roots.cluster_tol)?
    } else {
        find_roots(&indicial, &cfg.roots)?
    };
    let classes = group_into_classes(&roots, cfg.roots.class_tol);
    Ok(IndicialAnalysis { normalized: np, indicial, roots, classes })
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub analysis: IndicialAnalysis,
    pub basis: Basis,
    pub notes: Vec<String>,
}

/// Full pipeline. Runs exactly over Q(i) when every indicial root lies in
/// Q(i) and numerics are not forced; otherwise entirely in floating point.
pub fn solve(raw: &RawProblem<GaussRat>, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    let analysis = analyze(raw, cfg)?;
    let np = &analysis.normalized;
    let mut notes = Vec::new();
    if let Some(c) = &np.leading_divided_by {
        notes.push(format!("leading coefficient {c} divided out"));
    }
    if np.flipped {
        notes.push("all frequencies were negative: solved in w = -λ'z".into());
    }
    for cls in &analysis.classes {
        if let Some(w) = &cls.warning {
            notes.push(w.clone());
        }
    }
    let basis = if !cfg.force_numeric && analysis.roots.all_exact() {
        Basis::Exact(solve_all::<GaussRat>(np, raw, &analysis.classes, cfg)?)
    } else {
        if !cfg.force_numeric {
            notes.push("indicial roots outside Q(i): solved in floating point".into());
        }
        Basis::Approx(solve_all::<Complex64>(np, raw, &analysis.classes, cfg)?)
    };
    for c in basis.classes() {
        if c.found == 0 {
            let why = if c.degree_candidates.is_empty() {
                "no nonnegative integer degree candidates"
            } else {
                "trivial nullspace"
            };
            notes.push(format!("class with base {}: no finite-order solution ({why})", c.base));
            for r in &c.roots {
                notes.push(format!("root {}: the u-equation has no polynomial solution ({})", r.root, r.reason()));
            }
        }
    }
    Ok(SolveReport { analysis, basis, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn es(terms: &[(&str, &str)]) -> ExpSum<GaussRat> {
        ExpSum::from_terms(terms.iter().map(|(f, c)| Term { freq: q(f), coef: Poly::constant(q(c), Var::Z) })).unwrap()
    }

    fn tpoly(c: &[&str]) -> Poly<GaussRat> {
        Poly::new(c.iter().map(|s| q(s)).collect(), Var::T)
    }

    fn resonant() -> RawProblem<GaussRat> {
        RawProblem::monic(vec![
            es(&[("1", "-1"), ("0", "16/27")]),
            es(&[("0", "-4/3"), ("1", "-2")]),
            es(&[("1", "3")]),
        ])
        .unwrap()
    }

    fn gaussian_roots() -> RawProblem<GaussRat> {
        RawProblem::monic(vec![
            es(&[("1", "1i"), ("0", "1")]),
            es(&[("1", "1+1i"), ("0", "1")]),
            es(&[("1", "1"), ("0", "1")]),
        ])
        .unwrap()
    }

    fn triple_root() -> RawProblem<GaussRat> {
        RawProblem::monic(vec![
            es(&[("0", "-1"), ("1", "-1")]),
            es(&[("0", "3"), ("1", "2")]),
            es(&[("0", "-3"), ("1", "-1")]),
        ])
        .unwrap()
    }

    fn no_solutions() -> RawProblem<GaussRat> {
        RawProblem::monic(vec![es(&[("1", "1")]), es(&[("0", "1")])]).unwrap()
    }

    fn negative_frequency() -> RawProblem<GaussRat> {
        RawProblem::monic(vec![es(&[("0", "-1")]), es(&[("-1", "1")])]).unwrap()
    }

    fn uode(raw: &RawProblem<GaussRat>, lambda: &str) -> UDomainODE<GaussRat> {
        let np = normalize(raw).unwrap();
        shift_by_lambda(&to_t_domain(&np).unwrap(), &q(lambda))
    }

    fn exact_basis(raw: &RawProblem<GaussRat>) -> SolutionBasis<GaussRat> {
        match solve(raw, &SolverConfig::default()).unwrap().basis {
            Basis::Exact(b) => b,
            Basis::Approx(_) => panic!("expected exact basis"),
        }
    }

    #[test]
    fn recurrence_examples() {
        let ode = uode(&resonant(), "-4/3");
        let rec = recurrence_polys(&ode);
        let np = normalize(&resonant()).unwrap();
        let shifted = indicial_polynomial(&np).unwrap().compose_shift(&q("-4/3"));
        assert_eq!(rec.r[0], shifted);
        let s = forward_series(&rec, 6);
        assert_eq!(s.obstruction, None);
        assert_eq!(s.coeffs, ["1", "-7", "0", "0", "0", "0"].map(q).to_vec());

        let ode = uode(&no_solutions(), "-1");
        let s = forward_series(&recurrence_polys(&ode), 8);
        assert!(s.obstruction.is_some() || s.coeffs.iter().skip(1).any(|c| !c.is_zero()));

        // constant coefficients: band zero, single falling-factorial polynomial
        let cc = RawProblem::monic(vec![es(&[("0", "2")]), es(&[("0", "-3")])]).unwrap();
        let rec = recurrence_polys(&uode(&cc, "1"));
        assert_eq!(rec.band(), 0);
    }

    #[test]
    fn degree_candidate_examples() {
        assert!(degree_candidates(&uode(&resonant(), "-4/3")).contains(&1));
        for l in ["0", "-1"] {
            let ode = uode(&no_solutions(), l);
            assert!(degree_candidates(&ode).is_empty() || poly_solutions(&ode, 500).unwrap().is_empty());
        }
        assert!(degree_candidates(&uode(&gaussian_roots(), "-1")).contains(&0));
    }

    #[test]
    fn poly_solution_examples() {
        assert_eq!(poly_solutions(&uode(&resonant(), "-4/3"), 500).unwrap(), vec![tpoly(&["1", "-7"])]);
        assert_eq!(poly_solutions(&uode(&gaussian_roots(), "-1i"), 500).unwrap(), vec![tpoly(&["1"])]);
        assert!(poly_solutions(&uode(&gaussian_roots(), "1i"), 500).unwrap().is_empty());
        let approx = uode(&resonant(), "-4/3");
        let approx = UDomainODE {
            lambda: approx.lambda.to_complex(),
            beta: approx.beta.iter().map(Poly::to_approx).collect(),
            beta_bound: approx.beta_bound.clone(),
        };
        let sols = poly_solutions(&approx, 500).unwrap();
        assert_eq!(sols.len(), 1);
        assert!((sols[0].coeff(1) - Complex64::new(-7.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn pure_exponential_examples() {
        let cfg = RootConfig::default();
        let show = |raw: RawProblem<GaussRat>| -> Vec<String> {
            pure_exponential(&normalize(&raw).unwrap(), &cfg).unwrap().iter().map(|s| s.to_string()).collect()
        };
        assert_eq!(show(triple_root()), ["1"]);
        assert_eq!(show(gaussian_roots()), ["-1", "-1i"]);
        assert!(show(no_solutions()).is_empty());
    }

    #[test]
    fn assemble_examples() {
        let s = LogSolution { base: q("-4/3"), components: vec![tpoly(&["1", "-7"])] };
        assert_eq!(assemble(&s), es(&[("-4/3", "1"), ("-1/3", "-7")]));
        let s = LogSolution { base: q("1"), components: vec![Poly::zero(Var::T), tpoly(&["1"])] };
        assert_eq!(assemble(&s), ExpSum::monomial(q("1"), q("1"), 1));
        let s: LogSolution<GaussRat> = PolySolution { lambda: q("-1"), u: tpoly(&["1"]) }.into();
        assert_eq!(assemble(&s), es(&[("-1", "1")]));
    }

    #[test]
    fn class_ansatz_examples() {
        let cfg = SolverConfig::default();
        let a = analyze(&triple_root(), &cfg).unwrap();
        assert_eq!(a.classes.len(), 1);
        let out = class_ansatz_solve::<GaussRat>(&a.normalized, &a.classes[0], 500).unwrap();
        let got: Vec<ExpSum<GaussRat>> = out.solutions.iter().map(assemble).collect();
        assert_eq!(got, vec![ExpSum::monomial(q("1"), q("1"), 1), es(&[("1", "1")])]);

        let a = analyze(&no_solutions(), &cfg).unwrap();
        assert_eq!(a.classes.len(), 1);
        let out = class_ansatz_solve::<GaussRat>(&a.normalized, &a.classes[0], 500).unwrap();
        assert!(out.solutions.is_empty());
    }

    #[test]
    fn singleton_classes_match_poly_solutions() {
        let cfg = SolverConfig::default();
        for raw in [resonant(), gaussian_roots()] {
            let a = analyze(&raw, &cfg).unwrap();
            let t = to_t_domain(&a.normalized).unwrap();
            for cls in a.classes.iter().filter(|c| c.total == 1) {
                let lambda = cls.base.as_exact().unwrap().clone();
                let polys = poly_solutions(&shift_by_lambda(&t, &lambda), 500).unwrap();
                let ans = class_ansatz_solve::<GaussRat>(&a.normalized, cls, 500).unwrap();
                let from_poly: Vec<ExpSum<GaussRat>> =
                    polys.into_iter().map(|u| assemble(&PolySolution { lambda: lambda.clone(), u }.into())).collect();
                let from_ans: Vec<ExpSum<GaussRat>> = ans.solutions.iter().map(assemble).collect();
                let joint: Vec<_> = from_poly.iter().chain(&from_ans).cloned().collect();
                assert_eq!(independence(&joint).rank, from_poly.len());
                assert_eq!(from_poly.len(), from_ans.len());
            }
        }
    }

    #[test]
    fn solve_examples() {
        let b = exact_basis(&resonant());
        assert!(b.solutions().contains(&es(&[("-4/3", "1"), ("-1/3", "-7")])));

        let b = exact_basis(&gaussian_roots());
        assert_eq!(b.solutions(), vec![es(&[("-1", "1")]), es(&[("-1i", "1")])]);
        assert_eq!(b.independence.rank, 2);
        assert_eq!(b.count_bound, 2);

        let b = exact_basis(&triple_root());
        assert_eq!(b.solutions(), vec![es(&[("1", "1")]), ExpSum::monomial(q("1"), q("1"), 1)]);

        assert!(exact_basis(&no_solutions()).entries.is_empty());

        let b = exact_basis(&negative_frequency());
        assert_eq!(b.solutions(), vec![es(&[("0", "1"), ("1", "1")])]);
    }

    #[test]
    fn numeric_mode_matches_exact() {
        let cfg = SolverConfig { force_numeric: true, ..SolverConfig::default() };
        for raw in [resonant(), gaussian_roots(), triple_root(), no_solutions(), negative_frequency()] {
            let exact = exact_basis(&raw);
            let approx = solve(&raw, &cfg).unwrap().basis;
            assert_eq!(approx.mode(), Mode::Approx);
            assert_eq!(approx.len(), exact.entries.len());
            let mut joint = approx.approx_solutions();
            joint.extend(exact.solutions().iter().map(ExpSum::to_approx));
            assert_eq!(independence(&joint).rank, exact.entries.len());
            // every class finds what it finds in exact mode
            let found = |c: &[ClassReport]| c.iter().map(|r| r.found).collect::<Vec<_>>();
            assert_eq!(found(approx.classes()), found(&exact.classes));
        }
    }

    #[test]
    fn irrational_roots_run_in_floating_point() {
        // f'' - 2f = 0: roots ±√2
        let raw = RawProblem::monic(vec![es(&[("0", "-2")]), ExpSum::zero()]).unwrap();
        let rep = solve(&raw, &SolverConfig::default()).unwrap();
        assert_eq!(rep.basis.mode(), Mode::Approx);
        assert_eq!(rep.basis.len(), 2);
    }

    #[test]
    fn irregular_singularity_is_refused() {
        let raw = RawProblem::monic(vec![es(&[("1", "1"), ("-1", "1")]), es(&[("0", "1")])]).unwrap();
        assert!(matches!(solve(&raw, &SolverConfig::default()), Err(SolveError::Unsupported { gamma: 1 })));
    }

    #[test]
    fn degree_cap_is_enforced() {
        // f'' + e^z f' - 10 e^z f = 0 has a degree-10 polynomial solution in e^z
        let raw = RawProblem::monic(vec![es(&[("1", "-10")]), es(&[("1", "1")])]).unwrap();
        let cfg = SolverConfig { max_degree: 2, ..SolverConfig::default() };
        assert!(matches!(solve(&raw, &cfg), Err(SolveError::CapExceeded { candidate: 10, cap: 2 })));
        let b = exact_basis(&raw);
        assert_eq!(b.entries.len(), 1);
        assert_eq!(b.entries[0].solution.terms().len(), 11);
    }
}
