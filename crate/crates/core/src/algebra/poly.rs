//! Dense univariate polynomials, lowest degree first.

use std::fmt;

use super::scalar::{falling_factorial, Field};
use super::AlgebraError;

/// Which variable a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    /// `t = e^z`
    T,
    /// exponent variable of the indicial equation
    Lambda,
    Z,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::Lambda => "λ",
            Var::Z => "z",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
    var: Var,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>, var: Var) -> Self {
        while coeffs.last().is_some_and(Field::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs, var }
    }

    pub fn zero(var: Var) -> Self {
        Poly { coeffs: Vec::new(), var }
    }

    pub fn constant(c: F, var: Var) -> Self {
        Poly::new(vec![c], var)
    }

    pub fn one(var: Var) -> Self {
        Poly::constant(F::one(), var)
    }

    /// `c * var^k`
    pub fn monomial(c: F, k: usize, var: Var) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs, var)
    }

    /// `var - root`
    pub fn linear_factor(root: &F, var: Var) -> Self {
        Poly::new(vec![-root.clone(), F::one()], var)
    }

    /// Product of `(var - r)` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a F>, var: Var) -> Self {
        roots.into_iter().fold(Poly::one(var), |acc, r| acc.mul(&Poly::linear_factor(r, var)))
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficient of `var^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Multiplicity of the root at zero.
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect(), self.var)
    }

    pub fn to_approx(&self) -> Poly<num_complex::Complex64> {
        self.map(Field::to_complex)
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.var == other.var || self.is_zero() || other.is_zero() {
            Ok(())
        } else {
            Err(AlgebraError::VarMismatch(self.var, other.var))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Sum; the variable tag of `self` wins. Use [`Poly::try_add`] to check tags.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect(), self.var)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect(), self.var)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone()).with_var(self.var)
    }

    pub fn scale(&self, s: &F) -> Self {
        if s.is_zero() {
            return Poly::zero(self.var);
        }
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(), self.var)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.var);
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out, self.var)
    }

    /// Multiply by `var^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(coeffs, self.var)
    }

    /// Divide by `var^k`; the low `k` coefficients are discarded.
    pub fn shift_down(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect(), self.var)
    }

    /// Formal derivative.
    pub fn diff(&self) -> Self {
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * F::from_i64(k as i64)).collect(),
            self.var,
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// `p(var + c)`, by repeated synthetic division (Taylor shift).
    pub fn compose_shift(&self, c: &F) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let next = a[k + 1].clone();
                a[k] = a[k].clone() + c.clone() * next;
            }
        }
        Poly::new(a, self.var)
    }

    /// `p(s * var)`
    pub fn compose_scale(&self, s: &F) -> Self {
        let mut pow = F::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.clone() * pow.clone());
            pow = pow * s.clone();
        }
        Poly::new(out, self.var)
    }

    /// Quotient and remainder. `None` for a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let lead_inv = divisor.leading()?.inv()?;
        let dd = divisor.degree()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Poly::zero(self.var), self.clone()));
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd].clone() * lead_inv.clone();
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - q.clone() * d.clone();
                }
            }
            rem[k + dd] = F::zero();
            quot[k] = q;
        }
        rem.truncate(dd);
        Some((Poly::new(quot, self.var), Poly::new(rem, self.var)))
    }

    pub fn monic(&self) -> Self {
        match self.leading().and_then(Field::inv) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor (Euclid). Exact fields only give
    /// meaningful results; the zero polynomial is returned for `gcd(0, 0)`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Polynomial in `var` whose value at `x` is `sum_i c_i * x^(falling i)`.
    pub fn from_falling_basis(c: &[F], var: Var) -> Self {
        let mut out = Poly::zero(var);
        let mut basis = Poly::one(var);
        for (i, ci) in c.iter().enumerate() {
            out = out.add(&basis.scale(ci));
            basis = basis.mul(&Poly::new(vec![F::from_i64(-(i as i64)), F::one()], var));
        }
        out
    }

    /// Evaluates `sum_i c_i * x^(falling i)` directly.
    pub fn eval_falling(c: &[F], x: &F) -> F {
        c.iter().enumerate().fold(F::zero(), |acc, (i, ci)| acc + ci.clone() * falling_factorial(x, i))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Field::magnitude).fold(0.0, f64::max)
    }
}

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript(k: usize) -> String {
    k.to_string().bytes().map(|b| SUPERSCRIPTS[(b - b'0') as usize]).collect()
}

impl<F: Field> fmt::Display for Poly<F> {
    /// Highest degree first, e.g. `λ³ − 4/3·λ + 16/27`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let x = self.var.symbol();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_scalar().to_string();
            let compound = text[1..].contains(['+', '-']);
            let (negative, body) = match text.strip_prefix('-') {
                Some(rest) if !compound => (true, rest.to_string()),
                _ => (false, if compound && k > 0 { format!("({text})") } else { text.clone() }),
            };
            if first {
                if negative {
                    write!(f, "−")?;
                }
            } else {
                write!(f, " {} ", if negative { '−' } else { '+' })?;
            }
            first = false;
            let power = match k {
                0 => String::new(),
                1 => x.to_string(),
                _ => format!("{x}{}", superscript(k)),
            };
            match (k, body.as_str()) {
                (0, _) => write!(f, "{body}")?,
                (_, "1") => write!(f, "{power}")?,
                _ => write!(f, "{body}·{power}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussRat;

    fn p(coeffs: &[&str], var: Var) -> Poly<GaussRat> {
        Poly::new(coeffs.iter().map(|s| s.parse().unwrap()).collect(), var)
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let z = p(&["0", "0"], Var::T);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(p(&["1", "2", "0"], Var::T).degree(), Some(1));
    }

    #[test]
    fn derivative_of_linear() {
        assert_eq!(p(&["1", "-7"], Var::T).diff(), p(&["-7"], Var::T));
    }

    #[test]
    fn example_indicial_vanishes_at_minus_four_thirds() {
        let q = p(&["16/27", "-4/3", "0", "1"], Var::Lambda);
        assert!(q.eval(&"-4/3".parse().unwrap()).is_zero());
        assert_eq!(q.to_string(), "λ³ − 4/3·λ + 16/27");
    }

    #[test]
    fn product_of_conjugate_linears() {
        let a = p(&["1", "1"], Var::T);
        let b = p(&["-1", "1"], Var::T);
        assert_eq!(a.mul(&b), p(&["-1", "0", "1"], Var::T));
    }

    #[test]
    fn role_tags_must_agree() {
        let a = p(&["1", "1"], Var::T);
        let b = p(&["1", "1"], Var::Lambda);
        assert!(matches!(a.try_add(&b), Err(AlgebraError::VarMismatch(Var::T, Var::Lambda))));
        assert!(a.try_mul(&a).is_ok());
    }

    #[test]
    fn taylor_shift_and_division() {
        let q = p(&["16/27", "-4/3", "0", "1"], Var::Lambda);
        let shifted = q.compose_shift(&"-4/3".parse().unwrap());
        for x in ["0", "1", "5/2", "-3"] {
            let x: GaussRat = x.parse().unwrap();
            assert_eq!(shifted.eval(&x), q.eval(&(x.clone() + "-4/3".parse().unwrap())));
        }
        let f = p(&["-2/3", "1"], Var::Lambda);
        let (quot, rem) = q.div_rem(&f).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quot.mul(&f), q);
        let g = q.gcd(&q.diff());
        assert_eq!(g, f);
    }

    #[test]
    fn falling_basis_matches_direct_evaluation() {
        let c: Vec<GaussRat> = ["3", "-1/2", "2", "1"].iter().map(|s| s.parse().unwrap()).collect();
        let poly = Poly::from_falling_basis(&c, Var::Lambda);
        for x in -3..5 {
            let x = GaussRat::from_i64(x);
            assert_eq!(poly.eval(&x), Poly::eval_falling(&c, &x));
        }
    }

    #[test]
    fn display_gaussian_coefficients() {
        let q = p(&["1i", "1+1i", "-1"], Var::Lambda);
        assert_eq!(q.to_string(), "−λ² + (1+1i)·λ + 1i");
    }
}
