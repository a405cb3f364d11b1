//! Reduction of a raw equation to the canonical form
//! `e^{γw} g^(n) + P_{n-1}(e^w) g^(n-1) + ... + P_0(e^w) g = 0`.
//!
//! The pipeline is: divide by the leading monomial, flip `z -> -z` when every
//! frequency is negative, rescale `w = λ' z` so all frequencies become
//! integers, then multiply by `e^{Mw}` to clear negative exponents.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraError, ExpSum, Field, GaussRat, Poly, Term, Var};

#[derive(Debug, thiserror::Error)]
pub enum NormalizeError {
    #[error("order must be positive")]
    ZeroOrder,
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("coefficient a_0 is identically zero")]
    ZeroA0,
    #[error("leading coefficient is identically zero")]
    ZeroLeading,
    #[error("coefficient {index} has non-rational frequency {freq}")]
    NonRationalFrequency { index: usize, freq: String },
    #[error("coefficient {index} has a non-constant polynomial factor")]
    NonConstantCoefficient { index: usize },
    #[error("leading coefficient {0} is not a single exponential term")]
    LeadingNotMonomial(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `leading * f^(n) + sum_i coefficients[i] * f^(i) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawProblem<F> {
    order: usize,
    leading: ExpSum<F>,
    coefficients: Vec<ExpSum<F>>,
}

impl<F: Field> RawProblem<F> {
    pub fn new(order: usize, leading: ExpSum<F>, coefficients: Vec<ExpSum<F>>) -> Result<Self, NormalizeError> {
        if order == 0 {
            return Err(NormalizeError::ZeroOrder);
        }
        if coefficients.len() != order {
            return Err(NormalizeError::CoefficientCount { expected: order, found: coefficients.len() });
        }
        if coefficients[0].is_zero() {
            return Err(NormalizeError::ZeroA0);
        }
        if leading.is_zero() {
            return Err(NormalizeError::ZeroLeading);
        }
        Ok(RawProblem { order, leading, coefficients })
    }

    /// Monic problem `f^(n) + ... = 0`.
    pub fn monic(coefficients: Vec<ExpSum<F>>) -> Result<Self, NormalizeError> {
        let order = coefficients.len();
        Self::new(order, ExpSum::exp(F::zero(), F::one()), coefficients)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn leading(&self) -> &ExpSum<F> {
        &self.leading
    }

    pub fn coefficients(&self) -> &[ExpSum<F>] {
        &self.coefficients
    }

    /// Coefficient of `f^(i)`, with `i == order` giving the leading one.
    pub fn coefficient(&self, i: usize) -> &ExpSum<F> {
        if i == self.order {
            &self.leading
        } else {
            &self.coefficients[i]
        }
    }

    pub fn to_approx(&self) -> RawProblem<Complex64> {
        RawProblem {
            order: self.order,
            leading: self.leading.to_approx(),
            coefficients: self.coefficients.iter().map(ExpSum::to_approx).collect(),
        }
    }

    /// Largest `j < n` whose coefficient has a nonzero frequency, for the
    /// bound on the number of independent finite-order solutions.
    pub fn last_transcendental(&self) -> Option<usize> {
        let lead_freq = self.leading.terms().first().map(|t| t.freq.clone());
        let single = self.leading.terms().len() == 1;
        (0..self.order).rev().find(|&i| {
            self.coefficients[i].terms().iter().any(|t| match (&lead_freq, single) {
                (Some(f), true) => !(t.freq.clone() - f.clone()).is_zero(),
                _ => !t.freq.is_zero(),
            })
        })
    }

    fn all_frequencies(&self) -> impl Iterator<Item = (usize, &F)> {
        std::iter::once((self.order, &self.leading))
            .chain(self.coefficients.iter().enumerate())
            .flat_map(|(i, e)| e.frequencies().map(move |f| (i, f)))
    }
}

impl RawProblem<GaussRat> {
    /// The same problem over another scalar field.
    pub fn to_field<G: Field>(&self) -> Result<RawProblem<G>, AlgebraError> {
        let conv = |e: &ExpSum<GaussRat>| e.map(G::from_gauss);
        Ok(RawProblem {
            order: self.order,
            leading: conv(&self.leading)?,
            coefficients: self.coefficients.iter().map(conv).collect::<Result<_, _>>()?,
        })
    }
}

/// The canonical equation together with the record of how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedProblem {
    pub n: usize,
    pub gamma: usize,
    /// `P_0 .. P_n` in `t = e^w`; `P_n = t^gamma`.
    pub p: Vec<Poly<GaussRat>>,
    pub lambda_prime: BigRational,
    pub flipped: bool,
    /// `(-1)^(n-i)` applied to coefficient `i` by the flip (all ones otherwise).
    pub flip_signs: Vec<i8>,
    pub shift: usize,
    /// Set when the raw leading coefficient was a monomial other than `1`.
    pub leading_divided_by: Option<String>,
}

impl NormalizedProblem {
    pub fn polys<F: Field>(&self) -> Vec<Poly<F>> {
        self.p.iter().map(|p| p.map(F::from_gauss)).collect()
    }

    /// `P_j(0)` for `j < n`.
    pub fn constant_terms(&self) -> Vec<GaussRat> {
        self.p.iter().map(|p| p.coeff(0)).collect()
    }

    /// Largest degree among `P_0 .. P_n`.
    pub fn max_degree(&self) -> usize {
        self.p.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// The equation itself as a raw problem in the variable `w`.
    pub fn as_raw<F: Field>(&self) -> RawProblem<F> {
        let coefficients = self.p[..self.n].iter().map(|p| ExpSum::from_t_poly(&p.map(F::from_gauss))).collect();
        let leading = ExpSum::from_t_poly(&self.p[self.n].map(F::from_gauss));
        RawProblem { order: self.n, leading, coefficients }
    }

    /// `w = scale * z` where `scale = ±λ'`.
    pub fn variable_scale(&self) -> BigRational {
        if self.flipped {
            -self.lambda_prime.clone()
        } else {
            self.lambda_prime.clone()
        }
    }
}

/// Largest positive rational `λ'` dividing every input; `None` when all are zero.
pub fn common_frequency(freqs: &[BigRational]) -> Option<BigRational> {
    let nonzero: Vec<BigRational> = freqs.iter().filter(|f| !f.is_zero()).map(|f| f.abs()).collect();
    if nonzero.is_empty() {
        return None;
    }
    let num = nonzero.iter().fold(BigInt::zero(), |acc, f| acc.gcd(f.numer()));
    let den = nonzero.iter().fold(BigInt::one(), |acc, f| acc.lcm(f.denom()));
    Some(BigRational::new(num, den))
}

fn real_frequency(index: usize, f: &GaussRat) -> Result<BigRational, NormalizeError> {
    if f.is_real() {
        Ok(f.re.clone())
    } else {
        Err(NormalizeError::NonRationalFrequency { index, freq: f.to_string() })
    }
}

fn check_hypothesis(p: &RawProblem<GaussRat>) -> Result<(), NormalizeError> {
    for (i, e) in std::iter::once((p.order, &p.leading)).chain(p.coefficients.iter().enumerate()) {
        for t in e.terms() {
            real_frequency(i, &t.freq)?;
            if t.coef.degree() != Some(0) {
                return Err(NormalizeError::NonConstantCoefficient { index: i });
            }
        }
    }
    Ok(())
}

/// Divide the equation by a single-term leading coefficient `c e^{μz}`.
fn make_monic(p: &RawProblem<GaussRat>) -> Result<(RawProblem<GaussRat>, Option<String>), NormalizeError> {
    let [lead] = p.leading.terms() else {
        return Err(NormalizeError::LeadingNotMonomial(p.leading.to_string()));
    };
    let c = lead.coef.coeff(0);
    if lead.freq.is_zero() && c == GaussRat::one() {
        return Ok((p.clone(), None));
    }
    let inv = c.inv().ok_or(NormalizeError::ZeroLeading)?;
    let divisor = ExpSum::exp(-lead.freq.clone(), inv);
    let coefficients = p.coefficients.iter().map(|a| a.mul(&divisor)).collect::<Result<Vec<_>, _>>()?;
    let note = p.leading.to_string();
    Ok((RawProblem::monic(coefficients)?, Some(note)))
}

/// Substitute `z -> -w` when every nonzero frequency is negative.
/// Coefficient `i` picks up the sign `(-1)^(n-i)`.
pub fn orientation_normalize(p: &RawProblem<GaussRat>) -> (RawProblem<GaussRat>, bool) {
    let mut any_negative = false;
    let mut any_positive = false;
    for (_, f) in p.all_frequencies() {
        if f.re.is_negative() {
            any_negative = true;
        } else if f.re.is_positive() {
            any_positive = true;
        }
    }
    if !any_negative || any_positive {
        return (p.clone(), false);
    }
    let n = p.order;
    let flip = |e: &ExpSum<GaussRat>, sign: bool| -> ExpSum<GaussRat> {
        let terms = e
            .terms()
            .iter()
            .map(|t| Term { freq: -t.freq.clone(), coef: t.coef.compose_scale(&GaussRat::from_i64(-1)) });
        let flipped = ExpSum::from_terms(terms).expect("exact merge never fails");
        if sign {
            flipped.neg()
        } else {
            flipped
        }
    };
    let coefficients = p.coefficients.iter().enumerate().map(|(i, a)| flip(a, (n - i) % 2 == 1)).collect();
    let flipped = RawProblem { order: n, leading: flip(&p.leading, false), coefficients };
    (flipped, true)
}

/// Rescale to integer frequencies and clear negative exponents. Expects a
/// monic problem whose orientation has already been fixed.
pub fn to_npde(p: &RawProblem<GaussRat>, flipped: bool) -> Result<NormalizedProblem, NormalizeError> {
    check_hypothesis(p)?;
    let n = p.order;
    let freqs: Vec<BigRational> = p.all_frequencies().map(|(i, f)| real_frequency(i, f)).collect::<Result<_, _>>()?;
    let lambda_prime = common_frequency(&freqs).unwrap_or_else(BigRational::one);

    // exponents[i] = list of (integer exponent, coefficient) for coefficient i
    let mut rows: Vec<Vec<(BigInt, GaussRat)>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let factor = GaussRat::real(pow_rational(&lambda_prime, i as i64 - n as i64));
        let row = p
            .coefficient(i)
            .terms()
            .iter()
            .map(|t| {
                let k = &t.freq.re / &lambda_prime;
                debug_assert!(k.is_integer());
                (k.to_integer(), t.coef.coeff(0) * factor.clone())
            })
            .collect();
        rows.push(row);
    }
    let min_exp = rows.iter().flatten().map(|(k, _)| k.clone()).min().unwrap_or_else(BigInt::zero);
    let shift = if min_exp.is_negative() { -min_exp } else { BigInt::zero() };
    let to_usize = |k: BigInt| -> usize { k.try_into().expect("exponent fits in usize") };
    let polys: Vec<Poly<GaussRat>> = rows
        .into_iter()
        .map(|row| {
            let degree = row.iter().map(|(k, _)| to_usize(k + &shift)).max().unwrap_or(0);
            let mut coeffs = vec![GaussRat::zero(); degree + 1];
            for (k, c) in row {
                let e = to_usize(k + &shift);
                coeffs[e] = coeffs[e].clone() + c;
            }
            Poly::new(coeffs, Var::T)
        })
        .collect();
    let shift = to_usize(shift);
    let flip_signs = (0..=n).map(|i| if flipped && (n - i) % 2 == 1 { -1 } else { 1 }).collect();
    Ok(NormalizedProblem {
        n,
        gamma: shift,
        p: polys,
        lambda_prime,
        flipped,
        flip_signs,
        shift,
        leading_divided_by: None,
    })
}

fn pow_rational(r: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

/// Full normalization of a raw problem.
pub fn normalize(p: &RawProblem<GaussRat>) -> Result<NormalizedProblem, NormalizeError> {
    check_hypothesis(p)?;
    let (monic, divided_by) = make_monic(p)?;
    let (oriented, flipped) = orientation_normalize(&monic);
    let mut np = to_npde(&oriented, flipped)?;
    np.leading_divided_by = divided_by;
    Ok(np)
}

/// Map a solution `g(w)` of the normalized problem to `f(z) = g(±λ' z)`.
pub fn denormalize_solution<F: Field>(s: &ExpSum<F>, np: &NormalizedProblem) -> Result<ExpSum<F>, AlgebraError> {
    let scale = F::from_gauss(&GaussRat::real(np.variable_scale()));
    rescale(s, &scale)
}

/// Inverse of [`denormalize_solution`].
pub fn normalize_solution<F: Field>(s: &ExpSum<F>, np: &NormalizedProblem) -> Result<ExpSum<F>, AlgebraError> {
    let scale = F::from_gauss(&GaussRat::real(np.variable_scale().recip()));
    rescale(s, &scale)
}

fn rescale<F: Field>(s: &ExpSum<F>, scale: &F) -> Result<ExpSum<F>, AlgebraError> {
    ExpSum::from_terms(
        s.terms().iter().map(|t| Term { freq: t.freq.clone() * scale.clone(), coef: t.coef.compose_scale(scale) }),
    )
}
