//! Exponential sums `sum_k c_k(z) e^{mu_k z}` with polynomial coefficients.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use super::poly::{Poly, Var};
use super::scalar::Field;
use super::AlgebraError;

/// Default absolute tolerance for merging approximate frequencies.
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Term<F> {
    pub freq: F,
    pub coef: Poly<F>,
}

/// Canonical exponential sum: distinct frequencies sorted by (re, im), no
/// zero coefficients. The empty sum is the zero function.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSum<F> {
    terms: Vec<Term<F>>,
}

impl<F: Field> Default for ExpSum<F> {
    fn default() -> Self {
        ExpSum::zero()
    }
}

impl<F: Field> ExpSum<F> {
    pub fn zero() -> Self {
        ExpSum { terms: Vec::new() }
    }

    /// `c(z) e^{freq z}`
    pub fn term(freq: F, coef: Poly<F>) -> Self {
        let coef = coef.with_var(Var::Z);
        if coef.is_zero() {
            ExpSum::zero()
        } else {
            ExpSum { terms: vec![Term { freq, coef }] }
        }
    }

    /// `c e^{freq z}`
    pub fn exp(freq: F, c: F) -> Self {
        ExpSum::term(freq, Poly::constant(c, Var::Z))
    }

    /// `c z^p e^{freq z}`
    pub fn monomial(freq: F, c: F, p: usize) -> Self {
        ExpSum::term(freq, Poly::monomial(c, p, Var::Z))
    }

    /// Polynomial `p(e^z)` as an exponential sum with integer frequencies.
    pub fn from_t_poly(p: &Poly<F>) -> Self {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Term { freq: F::from_i64(k as i64), coef: Poly::constant(c.clone(), Var::Z) })
            .collect();
        ExpSum { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term<F>>) -> Result<Self, AlgebraError> {
        Self::from_terms_with(terms, DEFAULT_MERGE_TOL)
    }

    /// Sort, merge equal (or, approximately, close) frequencies and drop zeros.
    /// Approximate merging fails when closeness is not transitive within a group.
    pub fn from_terms_with(terms: impl IntoIterator<Item = Term<F>>, tol: f64) -> Result<Self, AlgebraError> {
        let mut terms: Vec<Term<F>> = terms.into_iter().filter(|t| !t.coef.is_zero()).collect();
        terms.sort_by(|a, b| a.freq.lex_cmp(&b.freq));
        let merged = if F::EXACT { merge_exact(terms) } else { merge_approx(terms, tol)? };
        Ok(ExpSum { terms: merged.into_iter().filter(|t| !t.coef.is_zero()).collect() })
    }

    pub fn terms(&self) -> &[Term<F>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &F> {
        self.terms.iter().map(|t| &t.freq)
    }

    pub fn normalize(&self) -> Result<Self, AlgebraError> {
        Self::from_terms(self.terms.clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Result<ExpSum<G>, AlgebraError> {
        ExpSum::from_terms(self.terms.iter().map(|t| Term { freq: f(&t.freq), coef: t.coef.map(&f) }))
    }

    pub fn to_approx(&self) -> ExpSum<Complex64> {
        ExpSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term { freq: t.freq.to_complex(), coef: t.coef.to_approx() })
                .filter(|t| !t.coef.is_zero())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ExpSum { terms: self.terms.iter().map(|t| Term { freq: t.freq.clone(), coef: t.coef.neg() }).collect() }
    }

    pub fn scale(&self, s: &F) -> Self {
        if s.is_zero() {
            return ExpSum::zero();
        }
        ExpSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term { freq: t.freq.clone(), coef: t.coef.scale(s) })
                .filter(|t| !t.coef.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Term { freq: a.freq.clone() + b.freq.clone(), coef: a.coef.mul(&b.coef) });
            }
        }
        Self::from_terms(out)
    }

    /// `(mu, c(z)) -> (mu, c'(z) + mu c(z))` termwise.
    pub fn differentiate(&self) -> Self {
        ExpSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term { freq: t.freq.clone(), coef: t.coef.diff().add(&t.coef.scale(&t.freq)) })
                .filter(|t| !t.coef.is_zero())
                .collect(),
        }
    }

    pub fn derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |f, _| f.differentiate())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.coef.to_approx().eval(&z) * (t.freq.to_complex() * z).exp()).sum()
    }

    /// Largest coefficient magnitude over all terms.
    pub fn max_magnitude(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.max_magnitude()).fold(0.0, f64::max)
    }

    /// Term with the largest coefficient magnitude.
    pub fn largest_term(&self) -> Option<&Term<F>> {
        self.terms
            .iter()
            .max_by(|a, b| a.coef.max_magnitude().partial_cmp(&b.coef.max_magnitude()).unwrap_or(Ordering::Equal))
    }

    /// Largest power of `z` appearing.
    pub fn z_degree(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.coef.degree()).max()
    }
}

fn merge_exact<F: Field>(terms: Vec<Term<F>>) -> Vec<Term<F>> {
    let mut out: Vec<Term<F>> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.freq == t.freq => last.coef = last.coef.add(&t.coef),
            _ => out.push(t),
        }
    }
    out
}

fn merge_approx<F: Field>(terms: Vec<Term<F>>, tol: f64) -> Result<Vec<Term<F>>, AlgebraError> {
    let n = terms.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while g[r] != r {
            r = g[r];
        }
        g[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if terms[i].freq.close_to(&terms[j].freq, tol) {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                group[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut group, i)).collect();
    let mut out: Vec<Term<F>> = Vec::new();
    for i in 0..n {
        if roots[i] != i {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| roots[j] == i).collect();
        for &a in &members {
            for &b in &members {
                if !terms[a].freq.close_to(&terms[b].freq, tol) {
                    return Err(AlgebraError::AmbiguousMerge {
                        a: terms[a].freq.to_complex(),
                        b: terms[b].freq.to_complex(),
                        tol,
                    });
                }
            }
        }
        let coef = members.iter().skip(1).fold(terms[i].coef.clone(), |acc, &j| acc.add(&terms[j].coef));
        out.push(Term { freq: terms[i].freq.clone(), coef });
    }
    Ok(out)
}

fn is_compound(text: &str) -> bool {
    let b = text.as_bytes();
    (1..b.len()).any(|k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'))
}

impl<F: Field> Term<F> {
    /// `(negative, text)` with the sign pulled out when it is unambiguous.
    fn render(&self) -> (bool, String) {
        let exp = if self.freq.is_zero() {
            String::new()
        } else if self.freq == F::one() {
            "e^z".to_string()
        } else if self.freq == F::zero() - F::one() {
            "e^(-z)".to_string()
        } else {
            format!("e^({}·z)", self.freq.to_scalar())
        };
        if self.coef.degree() != Some(0) {
            let body = format!("({})", self.coef);
            return (false, if exp.is_empty() { body } else { format!("{body}·{exp}") });
        }
        let text = self.coef.coeff(0).to_scalar().to_string();
        let (negative, text) = match text.strip_prefix('-') {
            Some(rest) if !is_compound(&text) => (true, rest.to_string()),
            _ if is_compound(&text) => (false, format!("({text})")),
            _ => (false, text),
        };
        let body = match (exp.is_empty(), text.as_str()) {
            (true, _) => text,
            (false, "1") => exp,
            _ => format!("{text}·{exp}"),
        };
        (negative, body)
    }
}

impl<F: Field> fmt::Display for ExpSum<F> {
    /// E.g. `e^(-4/3·z) − 7·e^(-1/3·z)` or `(z)·e^z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let (negative, body) = t.render();
            match (i, negative) {
                (0, true) => write!(f, "−{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " − {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussRat;

    #[test]
    fn display_examples() {
        let g = |x: &str| -> GaussRat { x.parse().unwrap() };
        let f = ExpSum::exp(g("-4/3"), g("1")).add(&ExpSum::exp(g("-1/3"), g("-7"))).unwrap();
        assert_eq!(f.to_string(), "e^(-4/3·z) − 7·e^(-1/3·z)");
        let f = ExpSum::exp(g("0"), g("1")).add(&ExpSum::exp(g("1"), g("1"))).unwrap();
        assert_eq!(f.to_string(), "1 + e^z");
        assert_eq!(ExpSum::monomial(g("1"), g("1"), 1).to_string(), "(z)·e^z");
        assert_eq!(ExpSum::exp(g("1i"), g("1+1i")).to_string(), "(1+1i)·e^(1i·z)");
        assert_eq!(ExpSum::exp(g("-1"), g("2")).to_string(), "2·e^(-z)");
        assert_eq!(ExpSum::<GaussRat>::zero().to_string(), "0");
    }

    fn q(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn zpoly(coeffs: &[&str]) -> Poly<GaussRat> {
        Poly::new(coeffs.iter().map(|s| q(s)).collect(), Var::Z)
    }

    #[test]
    fn derivative_examples() {
        let f = ExpSum::exp(q("3/5"), q("1"));
        assert_eq!(f.differentiate(), ExpSum::exp(q("3/5"), q("3/5")));
        let f = ExpSum::monomial(q("1"), q("1"), 1);
        assert_eq!(f.differentiate(), ExpSum::term(q("1"), zpoly(&["1", "1"])));
        let f = ExpSum::exp(q("-4/3"), q("1")).add(&ExpSum::exp(q("-1/3"), q("-7"))).unwrap();
        let expected = ExpSum::exp(q("-4/3"), q("-4/3")).add(&ExpSum::exp(q("-1/3"), q("7/3"))).unwrap();
        assert_eq!(f.differentiate(), expected);
    }

    #[test]
    fn add_mul_examples() {
        let f = ExpSum::term(q("2"), zpoly(&["1", "3"])).add(&ExpSum::exp(q("-1"), q("1/2"))).unwrap();
        assert!(f.add(&f.neg()).unwrap().is_zero());
        let e = ExpSum::exp(q("1"), q("1"));
        assert_eq!(e.mul(&e).unwrap(), ExpSum::exp(q("2"), q("1")));
        let lhs = e.add(&ExpSum::exp(q("0"), q("1"))).unwrap().mul(&ExpSum::monomial(q("1"), q("1"), 1)).unwrap();
        let rhs = ExpSum::monomial(q("2"), q("1"), 1).add(&ExpSum::monomial(q("1"), q("1"), 1)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn terms_are_sorted_lexicographically() {
        let f = ExpSum::exp(q("1"), q("1"))
            .add(&ExpSum::exp(q("-1i"), q("1")))
            .unwrap()
            .add(&ExpSum::exp(q("1i"), q("2")))
            .unwrap();
        let freqs: Vec<String> = f.frequencies().map(|x| x.to_string()).collect();
        assert_eq!(freqs, ["-1i", "1i", "1"]);
    }

    #[test]
    fn approximate_merge_and_ambiguity() {
        let c = |re: f64| Term { freq: Complex64::new(re, 0.0), coef: Poly::one(Var::Z) };
        let merged = ExpSum::from_terms_with([c(1.0), c(1.0 + 1e-12)], 1e-9).unwrap();
        assert_eq!(merged.terms().len(), 1);
        assert_eq!(merged.terms()[0].coef.coeff(0), Complex64::new(2.0, 0.0));
        let chain = ExpSum::from_terms_with([c(1.0), c(1.0 + 0.8e-9), c(1.0 + 1.6e-9)], 1e-9);
        assert!(matches!(chain, Err(AlgebraError::AmbiguousMerge { .. })));
    }

    #[test]
    fn evaluation_matches_termwise_sum() {
        let f = ExpSum::term(q("1/2+1i"), zpoly(&["1", "-2"])).add(&ExpSum::exp(q("-3"), q("4"))).unwrap();
        let z = Complex64::new(0.3, -0.7);
        let direct =
            (Complex64::new(1.0, 0.0) - 2.0 * z) * (Complex64::new(0.5, 1.0) * z).exp() + 4.0 * (-3.0 * z).exp();
        assert!((f.eval(z) - direct).norm() <= 1e-12 * direct.norm());
    }

    mod props {
        use super::*;
        use num_rational::BigRational;
        use proptest::prelude::*;

        fn small() -> impl Strategy<Value = GaussRat> {
            (-4i64..5, 1i64..4).prop_map(|(a, b)| GaussRat::real(BigRational::new(a.into(), b.into())))
        }

        fn expsum() -> impl Strategy<Value = ExpSum<GaussRat>> {
            proptest::collection::vec((small(), proptest::collection::vec(small(), 0..3)), 0..4).prop_map(|terms| {
                ExpSum::from_terms(terms.into_iter().map(|(freq, c)| Term { freq, coef: Poly::new(c, Var::Z) }))
                    .unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(50))]

            #[test]
            fn derivative_is_linear(f in expsum(), g in expsum()) {
                let lhs = f.add(&g).unwrap().differentiate();
                let rhs = f.differentiate().add(&g.differentiate()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn product_rule(f in expsum(), g in expsum()) {
                let lhs = f.mul(&g).unwrap().differentiate();
                let rhs = f.differentiate().mul(&g).unwrap().add(&f.mul(&g.differentiate()).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn normalize_is_idempotent_and_equality_symmetric(f in expsum(), g in expsum()) {
                let n = f.normalize().unwrap();
                prop_assert_eq!(&n.normalize().unwrap(), &n);
                prop_assert_eq!(f == g, g == f);
                prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
            }

            #[test]
            fn approx_eval_matches_termwise(f in expsum(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
                let z = Complex64::new(re, im);
                let approx = f.to_approx();
                let termwise: Complex64 = approx.terms().iter()
                    .map(|t| t.coef.eval(&z) * (t.freq * z).exp())
                    .sum();
                let scale: f64 = approx.terms().iter()
                    .map(|t| t.coef.coeffs().iter().map(|c| c.norm()).sum::<f64>() * (t.freq * z).exp().norm() * 2.0)
                    .sum::<f64>()
                    .max(1e-300);
                prop_assert!((f.eval(z) - termwise).norm() <= 1e-12 * scale);
            }
        }
    }
}
