//! Change of variable `t = e^w` and the exponent shift `v = t^λ u`.
//!
//! With `θ = t d/dt`, `d^j/dw^j = sum_i S(j, i) t^i d^i/dt^i` where `S` are
//! Stirling numbers of the second kind, and
//! `t^i (t^λ u)^(i) = t^λ sum_k C(i, k) λ^(falling i-k) t^k u^(k)`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{binomial_table, falling_factorial, Field, GaussRat, Poly, Var};
use crate::normalize::NormalizedProblem;

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("leading factor e^({gamma}z) makes t = 0 an irregular singular point; only verification is supported")]
    IrregularSingularity { gamma: usize },
}

/// `(n+1) x (n+1)` table of Stirling numbers of the second kind, `m[i][j] = S(j, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StirlingMatrix {
    pub n: usize,
    pub entries: Vec<Vec<BigInt>>,
}

impl StirlingMatrix {
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }
}

/// Built from `m[i][j] = i m[i][j-1] + m[i-1][j-1]`.
pub fn stirling_matrix(n: usize) -> StirlingMatrix {
    let mut m = vec![vec![BigInt::zero(); n + 1]; n + 1];
    m[0][0] = BigInt::one();
    for j in 1..=n {
        for i in 1..=j {
            m[i][j] = BigInt::from(i) * &m[i][j - 1] + &m[i - 1][j - 1];
        }
    }
    StirlingMatrix { n, entries: m }
}

/// `(1/i!) sum_k (-1)^k C(i,k) (i-k)^j`, with `0^0 = 1`.
pub fn stirling_closed_form(i: usize, j: usize) -> BigInt {
    let binom = binomial_table(i);
    let mut sum = BigInt::zero();
    for k in 0..=i {
        let term = &binom[i][k] * num_traits::pow(BigInt::from(i - k), j);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let fact: BigInt = (1..=i).map(BigInt::from).product();
    sum / fact
}

/// Upper-triangular `q[i][j] = C(j, i) λ^(falling j-i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix<F> {
    pub n: usize,
    pub lambda: F,
    pub entries: Vec<Vec<F>>,
}

pub fn q_matrix<F: Field>(lambda: &F, n: usize) -> QMatrix<F> {
    let binom = binomial_table(n);
    let entries = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i > j {
                        F::zero()
                    } else {
                        crate::algebra::bigint_to_field::<F>(&binom[j][i]) * falling_factorial(lambda, j - i)
                    }
                })
                .collect()
        })
        .collect();
    QMatrix { n, lambda: lambda.clone(), entries }
}

/// `sum_i alpha_i(t) t^i v^(i)(t) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TDomainODE<F> {
    pub alpha: Vec<Poly<F>>,
}

/// `sum_i beta_i(t) t^i u^(i)(t) = 0`, obtained from a t-domain equation by `v = t^λ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct UDomainODE<F> {
    pub lambda: F,
    pub beta: Vec<Poly<F>>,
    /// `beta_bound[i][s]` bounds the summands of the `t^s` coefficient of
    /// `beta_i`; used to judge cancellation in floating point.
    pub beta_bound: Vec<Vec<f64>>,
}

/// Coefficients `c_i` of `sum_i c_i(t) d^i/dt^i` with the common power of `t` removed.
fn operator_form<F: Field>(coeffs: &[Poly<F>]) -> (Vec<Poly<F>>, usize) {
    let shifted: Vec<Poly<F>> = coeffs.iter().enumerate().map(|(i, c)| c.shift_up(i)).collect();
    let common = shifted.iter().filter_map(Poly::low_order).min().unwrap_or(0);
    (shifted.iter().map(|c| c.shift_down(common)).collect(), common)
}

impl<F: Field> TDomainODE<F> {
    pub fn order(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `(c_0, .., c_n, s)`: the equation is `t^s sum_i c_i(t) v^(i) = 0`.
    pub fn operator_coefficients(&self) -> (Vec<Poly<F>>, usize) {
        operator_form(&self.alpha)
    }

    /// `sum_i alpha_i(0) λ^(falling i)`.
    pub fn indicial_falling(&self) -> Poly<F> {
        let c: Vec<F> = self.alpha.iter().map(|a| a.coeff(0)).collect();
        Poly::from_falling_basis(&c, Var::Lambda)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> TDomainODE<G> {
        TDomainODE { alpha: self.alpha.iter().map(|a| a.map(&f)).collect() }
    }
}

impl<F: Field> UDomainODE<F> {
    pub fn order(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn operator_coefficients(&self) -> (Vec<Poly<F>>, usize) {
        operator_form(&self.beta)
    }

    /// Band width: the largest degree among the `beta_i`.
    pub fn band(&self) -> usize {
        self.beta.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// Applies the operator to a polynomial `u`.
    pub fn apply(&self, u: &Poly<F>) -> Poly<F> {
        let mut out = Poly::zero(Var::T);
        let mut deriv = u.clone().with_var(Var::T);
        for (i, b) in self.beta.iter().enumerate() {
            out = out.add(&b.mul(&deriv).shift_up(i));
            deriv = deriv.diff();
        }
        out
    }
}

/// `alpha_i = sum_j m[i][j] P_j`.
pub fn to_t_domain(np: &NormalizedProblem) -> Result<TDomainODE<GaussRat>, TransformError> {
    if np.gamma > 0 {
        return Err(TransformError::IrregularSingularity { gamma: np.gamma });
    }
    let n = np.n;
    let m = stirling_matrix(n);
    let alpha = (0..=n)
        .map(|i| {
            (0..=n).fold(Poly::zero(Var::T), |acc, j| {
                let s: GaussRat = crate::algebra::bigint_to_field(m.get(i, j));
                acc.add(&np.p[j].scale(&s))
            })
        })
        .collect();
    Ok(TDomainODE { alpha })
}

/// `beta_i = sum_j q[i][j](λ) alpha_j`.
pub fn shift_by_lambda<F: Field>(ode: &TDomainODE<F>, lambda: &F) -> UDomainODE<F> {
    let n = ode.order();
    let q = q_matrix(lambda, n);
    let beta = (0..=n)
        .map(|i| (i..=n).fold(Poly::zero(Var::T), |acc, j| acc.add(&ode.alpha[j].scale(&q.entries[i][j]))))
        .collect();
    let beta_bound = beta_bounds(&ode.alpha, lambda.magnitude());
    UDomainODE { lambda: lambda.clone(), beta, beta_bound }
}

/// `Σ_j C(j,i) rising(|λ|, j-i) |α_{j,s}|`, using `|λ^(falling m)| ≤ |λ|^(rising m)`.
pub fn beta_bounds<F: Field>(alpha: &[Poly<F>], lambda_abs: f64) -> Vec<Vec<f64>> {
    let n = alpha.len() - 1;
    let deg = alpha.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let binom = binomial_table(n);
    (0..=n)
        .map(|i| {
            (0..=deg)
                .map(|s| {
                    (i..=n)
                        .map(|j| {
                            let rising: f64 = (0..j - i).map(|k| lambda_abs + k as f64).product();
                            binom[j][i].to_f64().unwrap_or(f64::INFINITY) * rising * alpha[j].coeff(s).magnitude()
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// `λ^n + sum_{j<n} P_j(0) λ^j`.
pub fn indicial_polynomial(np: &NormalizedProblem) -> Result<Poly<GaussRat>, TransformError> {
    if np.gamma > 0 {
        return Err(TransformError::IrregularSingularity { gamma: np.gamma });
    }
    Ok(Poly::new(np.constant_terms(), Var::Lambda))
}
