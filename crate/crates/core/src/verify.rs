//! Substitution checks for candidate solutions and linear independence of bases.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{AlgebraError, ExpSum, Field, DEFAULT_MERGE_TOL};
use crate::linalg::{rref, DenseMatrix, LinearField};
use crate::normalize::{NormalizedProblem, RawProblem};

/// Default relative tolerance for approximate residuals.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

/// `leading * f^(n) + sum_{i<n} A_i f^(i)` as a canonical exponential sum.
pub fn residual<F: Field>(f: &ExpSum<F>, p: &RawProblem<F>) -> Result<ExpSum<F>, AlgebraError> {
    let mut out = ExpSum::zero();
    let mut deriv = f.clone();
    for i in 0..=p.order() {
        out = out.add(&p.coefficient(i).mul(&deriv)?)?;
        deriv = deriv.differentiate();
    }
    Ok(out)
}

/// Residual against the normalized equation in the variable `w`; the
/// leading factor `e^{γw}` is included.
pub fn residual_normalized<F: Field>(g: &ExpSum<F>, np: &NormalizedProblem) -> Result<ExpSum<F>, AlgebraError> {
    residual(g, &np.as_raw())
}

/// Size of the largest summand `A_i f^(i)`, used to make tolerances relative.
pub fn residual_scale<F: Field>(f: &ExpSum<F>, p: &RawProblem<F>) -> f64 {
    let mut scale: f64 = 0.0;
    let mut deriv = f.clone();
    for i in 0..=p.order() {
        scale = scale.max(p.coefficient(i).max_magnitude() * deriv.max_magnitude());
        deriv = deriv.differentiate();
    }
    scale
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroCertificate {
    pub is_zero: bool,
    /// Largest residual coefficient magnitude (zero for an empty residual).
    pub max_magnitude: f64,
    pub threshold: f64,
    /// Frequency and z-power of the largest residual term.
    pub worst_frequency: Option<String>,
    pub worst_zpow: Option<usize>,
}

/// Exact mode: structural emptiness. Approximate mode: every coefficient
/// below the absolute threshold `tol`.
pub fn is_zero<F: Field>(r: &ExpSum<F>, tol: f64) -> ZeroCertificate {
    let mut worst: Option<(String, usize, f64)> = None;
    for t in r.terms() {
        for (p, c) in t.coef.coeffs().iter().enumerate() {
            let m = c.magnitude();
            if !c.is_zero() && worst.as_ref().is_none_or(|w| m > w.2) {
                worst = Some((t.freq.to_string(), p, m));
            }
        }
    }
    let max_magnitude = worst.as_ref().map_or(0.0, |w| w.2);
    let is_zero = if F::EXACT { r.is_zero() } else { max_magnitude < tol };
    ZeroCertificate {
        is_zero,
        max_magnitude,
        threshold: if F::EXACT { 0.0 } else { tol },
        worst_frequency: worst.as_ref().map(|w| w.0.clone()),
        worst_zpow: worst.map(|w| w.1),
    }
}

#[derive(Clone, Debug)]
pub struct Verification<F> {
    pub residual: ExpSum<F>,
    pub certificate: ZeroCertificate,
}

impl<F> Verification<F> {
    pub fn passed(&self) -> bool {
        self.certificate.is_zero
    }
}

/// Residual plus zero test with `tol` relative to [`residual_scale`].
pub fn verify_solution<F: Field>(f: &ExpSum<F>, p: &RawProblem<F>, tol: f64) -> Result<Verification<F>, AlgebraError> {
    let residual = residual(f, p)?;
    let scale = residual_scale(f, p).max(f64::MIN_POSITIVE);
    let certificate = is_zero(&residual, tol * scale);
    Ok(Verification { residual, certificate })
}

#[derive(Clone, Debug, Serialize)]
pub struct Independence {
    pub rank: usize,
    /// `(frequency, z-power)` slots carrying the pivots.
    pub pivots: Vec<(String, usize)>,
}

/// Rank of the coefficient matrix over the union of `(frequency, z-power)` slots.
pub fn independence<F: LinearField>(basis: &[ExpSum<F>]) -> Independence {
    let mut slots: Vec<(F, usize)> = Vec::new();
    for f in basis {
        for t in f.terms() {
            for p in 0..t.coef.coeffs().len() {
                if !slots.iter().any(|(s, q)| *q == p && s.close_to(&t.freq, DEFAULT_MERGE_TOL)) {
                    slots.push((t.freq.clone(), p));
                }
            }
        }
    }
    let rows: Vec<Vec<F>> = basis
        .iter()
        .map(|f| {
            let mut row = vec![F::zero(); slots.len()];
            for t in f.terms() {
                for (p, c) in t.coef.coeffs().iter().enumerate() {
                    let k = slots
                        .iter()
                        .position(|(s, q)| *q == p && s.close_to(&t.freq, DEFAULT_MERGE_TOL))
                        .expect("slot registered above");
                    row[k] = row[k].clone() + c.clone();
                }
            }
            row
        })
        .collect();
    if slots.is_empty() {
        return Independence { rank: 0, pivots: Vec::new() };
    }
    let rank = F::rank(&DenseMatrix::from_rows(rows.clone(), slots.len()));
    let (_, pivots) = rref(rows);
    Independence { rank, pivots: pivots.into_iter().take(rank).map(|k| (slots[k].0.to_string(), slots[k].1)).collect() }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpotValue {
    pub point: (f64, f64),
    /// `None` when the evaluation overflowed.
    pub residual: Option<f64>,
}

/// Evaluates the residual at sample points.
pub fn numeric_spotcheck<F: Field>(
    f: &ExpSum<F>,
    p: &RawProblem<F>,
    points: &[Complex64],
) -> Result<Vec<SpotValue>, AlgebraError> {
    let r = residual(f, p)?;
    Ok(points
        .iter()
        .map(|z| {
            let v = r.eval(*z).norm();
            SpotValue { point: (z.re, z.im), residual: v.is_finite().then_some(v) }
        })
        .collect())
}

/// Largest finite value of a spot check; `None` if any point overflowed.
pub fn spotcheck_max(values: &[SpotValue]) -> Option<f64> {
    values.iter().try_fold(0.0f64, |acc, v| v.residual.map(|r| acc.max(r)))
}

/// `n` points evenly spaced on the circle `|z| = radius`.
pub fn circle_points(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect()
}
