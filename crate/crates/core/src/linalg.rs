//! Kernels and ranks over Q(i) (fraction-free) and over complex doubles (SVD).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{Field, GaussRat};

/// Relative singular-value threshold for approximate rank decisions.
pub const SVD_REL_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> DenseMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        DenseMatrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: F) {
        let i = r * self.cols + c;
        self.data[i] = self.data[i].clone() + v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }
}

/// Fields with a kernel routine.
pub trait LinearField: Field {
    /// Basis of `{x : M x = 0}`.
    fn nullspace(m: &DenseMatrix<Self>) -> Vec<Vec<Self>>;
    /// Like [`LinearField::nullspace`], but singular values below
    /// `SVD_REL_THRESHOLD * floor` also count as zero. `floor` should be the
    /// size of the terms summed into the entries, so that a matrix which is
    /// zero up to cancellation error is recognized as such.
    fn nullspace_with_floor(m: &DenseMatrix<Self>, floor: f64) -> Vec<Vec<Self>> {
        let _ = floor;
        Self::nullspace(m)
    }
    fn rank(m: &DenseMatrix<Self>) -> usize;
}

impl LinearField for GaussRat {
    fn nullspace(m: &DenseMatrix<Self>) -> Vec<Vec<Self>> {
        let ech = bareiss_echelon(m);
        ech.nullspace()
    }

    fn rank(m: &DenseMatrix<Self>) -> usize {
        bareiss_echelon(m).pivots.len()
    }
}

impl LinearField for Complex64 {
    fn nullspace(m: &DenseMatrix<Self>) -> Vec<Vec<Self>> {
        svd_nullspace(m, SVD_REL_THRESHOLD, 0.0)
    }

    fn nullspace_with_floor(m: &DenseMatrix<Self>, floor: f64) -> Vec<Vec<Self>> {
        svd_nullspace(m, SVD_REL_THRESHOLD, floor)
    }

    fn rank(m: &DenseMatrix<Self>) -> usize {
        let n = m.cols;
        n - svd_nullspace(m, SVD_REL_THRESHOLD, 0.0).len()
    }
}

/// Gaussian integer, used as the integral domain for Bareiss elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn zero() -> Self {
        GaussInt { re: BigInt::zero(), im: BigInt::zero() }
    }

    pub fn one() -> Self {
        GaussInt { re: BigInt::one(), im: BigInt::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    pub fn sub(&self, o: &Self) -> Self {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `self / d` when the division is exact in Z[i].
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let conj = GaussInt { re: d.re.clone(), im: -d.im.clone() };
        let p = self.mul(&conj);
        let (qr, rr) = p.re.div_rem(&n);
        let (qi, ri) = p.im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then_some(GaussInt { re: qr, im: qi })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn to_gauss_rat(&self) -> GaussRat {
        GaussRat::new(BigRational::from_integer(self.re.clone()), BigRational::from_integer(self.im.clone()))
    }

    /// Integer part of `g * scale`, for `scale` a multiple of `g`'s denominators.
    pub fn from_scaled(g: &GaussRat, scale: &BigInt) -> Self {
        let re = &g.re * BigRational::from_integer(scale.clone());
        let im = &g.im * BigRational::from_integer(scale.clone());
        debug_assert!(re.is_integer() && im.is_integer());
        GaussInt { re: re.to_integer(), im: im.to_integer() }
    }
}

/// Row echelon form over Z[i] with the pivot columns it found.
pub(crate) struct Echelon {
    pub rows: Vec<Vec<GaussInt>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    fn nullspace(&self) -> Vec<Vec<GaussRat>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        let rat_rows: Vec<Vec<GaussRat>> =
            self.rows[..self.pivots.len()].iter().map(|r| r.iter().map(GaussInt::to_gauss_rat).collect()).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![GaussRat::zero(); self.cols];
                x[f] = GaussRat::one();
                for (r, &pc) in self.pivots.iter().enumerate().rev() {
                    let s = (pc + 1..self.cols)
                        .filter(|&j| !x[j].is_zero() && !rat_rows[r][j].is_zero())
                        .fold(GaussRat::zero(), |acc, j| acc + rat_rows[r][j].clone() * x[j].clone());
                    x[pc] = Field::div(&(-s), &rat_rows[r][pc]).expect("nonzero pivot");
                }
                x
            })
            .collect()
    }
}

/// Fraction-free (Bareiss) elimination. Each row is first scaled to Gaussian
/// integers; every intermediate division is exact.
pub(crate) fn bareiss_echelon(m: &DenseMatrix<GaussRat>) -> Echelon {
    let mut a: Vec<Vec<GaussInt>> = (0..m.rows)
        .map(|r| {
            let row = m.row(r);
            let scale = row.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.denom_lcm()));
            row.iter().map(|g| GaussInt::from_scaled(g, &scale)).collect()
        })
        .collect();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = GaussInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let num = pivot_row[c].mul(&row[j]).sub(&factor.mul(&pivot_row[j]));
                row[j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            row[c] = GaussInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: a, pivots, cols }
}

fn svd_nullspace(m: &DenseMatrix<Complex64>, rel: f64, floor: f64) -> Vec<Vec<Complex64>> {
    let n = m.cols;
    if n == 0 {
        return Vec::new();
    }
    let rows = m.rows.max(n);
    let mat = DMatrix::from_fn(rows, n, |r, c| if r < m.rows { *m.get(r, c) } else { Complex64::new(0.0, 0.0) });
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.iter().cloned().fold(floor, f64::max);
    (0..n)
        .filter(|&k| smax == 0.0 || svd.singular_values[k] <= rel * smax)
        .map(|k| (0..n).map(|j| v_t[(k, j)].conj()).collect())
        .collect()
}

fn negligible<F: Field>(x: &F, scale: f64) -> bool {
    if F::EXACT {
        x.is_zero()
    } else {
        x.magnitude() <= SVD_REL_THRESHOLD * scale
    }
}

/// Reduced row echelon form of `rows`, dropping zero rows; pivots are
/// normalized to one. Approximate mode uses partial pivoting.
pub fn rref<F: Field>(mut rows: Vec<Vec<F>>) -> (Vec<Vec<F>>, Vec<usize>) {
    let Some(cols) = rows.first().map(Vec::len) else {
        return (rows, Vec::new());
    };
    let scale = rows.iter().flatten().map(Field::magnitude).fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let candidate = if F::EXACT {
            (r..rows.len()).find(|&i| !rows[i][c].is_zero())
        } else {
            (r..rows.len())
                .max_by(|&a, &b| rows[a][c].magnitude().total_cmp(&rows[b][c].magnitude()))
                .filter(|&i| !negligible(&rows[i][c], scale))
        };
        let Some(p) = candidate else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        rows[r][c] = F::one();
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in 0..cols {
                let v = rows[r][j].clone();
                rows[i][j] = rows[i][j].clone() - f.clone() * v;
            }
            rows[i][c] = F::zero();
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    if !F::EXACT {
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                if negligible(x, scale) {
                    *x = F::zero();
                }
            }
        }
    }
    (rows, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn mat(rows: &[&[&str]]) -> DenseMatrix<GaussRat> {
        let cols = rows[0].len();
        DenseMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| q(s)).collect()).collect(), cols)
    }

    #[test]
    fn exact_kernel_of_rank_deficient_matrix() {
        let m = mat(&[&["1", "2", "3"], &["2", "4", "6"], &["1/2", "1i", "0"]]);
        let ker = GaussRat::nullspace(&m);
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).iter().all(Field::is_zero));
        assert_eq!(GaussRat::rank(&m), 2);
    }

    #[test]
    fn bareiss_intermediate_division_is_exact() {
        let m = mat(&[&["2", "3", "5", "7"], &["11", "13", "17", "19"], &["23", "29", "31", "37"]]);
        let ech = bareiss_echelon(&m);
        assert_eq!(ech.pivots, vec![0, 1, 2]);
        // the last pivot of a fraction-free elimination is the leading 3x3 minor
        assert_eq!(ech.rows[2][2].to_gauss_rat(), q("70"));
    }

    #[test]
    fn zero_and_empty_matrices() {
        let z = DenseMatrix::<GaussRat>::zeros(2, 3);
        assert_eq!(GaussRat::nullspace(&z).len(), 3);
        let e = DenseMatrix::<GaussRat>::zeros(0, 2);
        assert_eq!(GaussRat::nullspace(&e).len(), 2);
        let ze = DenseMatrix::<Complex64>::zeros(0, 2);
        assert_eq!(Complex64::nullspace(&ze).len(), 2);
    }

    #[test]
    fn svd_kernel_matches_exact_kernel() {
        let m = mat(&[&["1", "2", "3"], &["2", "4", "6"], &["1/2", "1i", "0"]]);
        let approx =
            DenseMatrix::from_rows((0..3).map(|r| m.row(r).iter().map(Field::to_complex).collect()).collect(), 3);
        let ker = Complex64::nullspace(&approx);
        assert_eq!(ker.len(), 1);
        let res = approx.mul_vec(&ker[0]);
        assert!(res.iter().all(|x| x.norm() < 1e-12));
        assert_eq!(Complex64::rank(&approx), 2);
    }

    #[test]
    fn rref_normalizes_pivots() {
        let rows = vec![vec![q("2"), q("4"), q("0")], vec![q("1"), q("3"), q("1")], vec![q("3"), q("7"), q("1")]];
        let (r, piv) = rref(rows);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, vec![vec![q("1"), q("0"), q("-2")], vec![q("0"), q("1"), q("1")]]);
    }

    #[test]
    fn gaussian_integer_exact_division() {
        let a = GaussInt { re: 3.into(), im: 1.into() };
        let b = GaussInt { re: 1.into(), im: 1.into() };
        assert_eq!(a.exact_div(&b), Some(GaussInt { re: 2.into(), im: (-1).into() }));
        let c = GaussInt { re: 1.into(), im: 0.into() };
        assert_eq!(c.exact_div(&b), None);
    }
}
