//! Roots of the indicial polynomial and their integer-difference classes.
//!
//! Exact roots in Q(i) come from a Gaussian rational-root test; anything
//! left over is square-free-split exactly and then located numerically.

use std::cmp::Ordering;
use std::collections::HashSet;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, GaussRat, Poly, Scalar};
use crate::linalg::GaussInt;

#[derive(Debug, thiserror::Error)]
pub enum RootError {
    #[error("eigenvalue iteration did not converge for a degree-{0} polynomial")]
    NoConvergence(usize),
    #[error("root {root} fails its backward-error certificate ({error:e} > {bound:e})")]
    Uncertified { root: Complex64, error: f64, bound: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    pub cluster_tol: f64,
    pub class_tol: f64,
    pub denominator_bound: u64,
    /// Upper bound on rational-root candidates before falling back to numerics.
    pub candidate_cap: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { cluster_tol: 1e-8, class_tol: 1e-8, denominator_bound: 64, candidate_cap: 100_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    pub value: Scalar,
    pub multiplicity: usize,
    /// `|p(r)| / sum_j |p_j| |r|^j`; zero for exact roots.
    pub backward_error: f64,
}

impl Root {
    pub fn is_exact(&self) -> bool {
        matches!(self.value, Scalar::Exact(_))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn all_exact(&self) -> bool {
        self.roots.iter().all(Root::is_exact)
    }

    fn sort(&mut self) {
        self.roots.sort_by(|a, b| scalar_cmp(&a.value, &b.value));
    }
}

/// Relative size below which a floating-point component is rounding noise.
const NOISE: f64 = 1e-14;

/// Zeroes a component that is negligible next to the modulus.
fn chop(r: Complex64) -> Complex64 {
    let scale = NOISE * r.norm().max(1.0);
    let f = |x: f64| if x.abs() <= scale { 0.0 } else { x };
    Complex64::new(f(r.re), f(r.im))
}

/// Lexicographic (re, im) order; exact pairs compare exactly, approximate
/// real parts within rounding noise count as equal.
pub fn scalar_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x.lex_cmp(y),
        _ => {
            let (x, y) = (a.to_complex(), b.to_complex());
            let tie = 1e3 * NOISE * x.norm().max(y.norm()).max(1.0);
            if (x.re - y.re).abs() <= tie {
                x.im.total_cmp(&y.im)
            } else {
                x.re.total_cmp(&y.re)
            }
        }
    }
}

/// Relative backward error of `r` as a root of `p`, measured against
/// `sum_j |p_j| max(1, |r|)^j` so that roots near zero are not judged
/// against the constant term alone.
pub fn backward_error(p: &Poly<Complex64>, r: Complex64) -> f64 {
    let rho = r.norm().max(1.0);
    let scale: f64 = p.coeffs().iter().enumerate().map(|(j, c)| c.norm() * rho.powi(j as i32)).sum();
    if scale == 0.0 {
        0.0
    } else {
        p.eval(&r).norm() / scale
    }
}

// ---------------------------------------------------------------------------
// exact roots in Q(i)

/// Coefficients scaled to Gaussian integers.
fn integer_coefficients(p: &Poly<GaussRat>) -> Vec<GaussInt> {
    let scale = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom_lcm()));
    p.coeffs().iter().map(|c| GaussInt::from_scaled(c, &scale)).collect()
}

/// Largest integer whose trial factorization is attempted.
const FACTOR_LIMIT: u64 = 100_000_000_000_000;

fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn two_squares(p: u64) -> Option<(u64, u64)> {
    let mut a = 1u64;
    while a * a < p {
        let b2 = p - a * a;
        let b = (b2 as f64).sqrt().round() as u64;
        for b in b.saturating_sub(1)..=b + 1 {
            if b * b == b2 {
                return Some((a, b));
            }
        }
        a += 1;
    }
    None
}

fn gi(re: i64, im: i64) -> GaussInt {
    GaussInt { re: re.into(), im: im.into() }
}

/// All divisors of `z` in Z[i] up to units, or `None` when `z` is too large
/// to factor or has more than `cap` divisors.
fn gaussian_divisors(z: &GaussInt, cap: usize) -> Option<Vec<GaussInt>> {
    let norm = z.norm().to_u64().filter(|&n| n > 0 && n <= FACTOR_LIMIT)?;
    let mut primes: Vec<(GaussInt, u32)> = Vec::new();
    for (p, e) in factor_u64(norm) {
        if p == 2 {
            primes.push((gi(1, 1), e));
        } else if p % 4 == 3 {
            primes.push((gi(p as i64, 0), e / 2));
        } else {
            let (a, b) = two_squares(p)?;
            let pi = gi(a as i64, b as i64);
            let mut rest = z.clone();
            let mut k = 0;
            while let Some(q) = rest.exact_div(&pi) {
                rest = q;
                k += 1;
            }
            let k = k.min(e);
            primes.push((pi, k));
            primes.push((gi(a as i64, -(b as i64)), e - k));
        }
    }
    let count: usize = primes.iter().map(|(_, e)| *e as usize + 1).product();
    if count > cap {
        return None;
    }
    let mut divisors = vec![GaussInt::one()];
    for (pi, e) in primes {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = acc.mul(&pi);
                next.push(acc.clone());
            }
        }
        divisors = next;
    }
    Some(divisors)
}

/// Divide out `(var - r)` as often as it divides; returns the multiplicity.
fn deflate(p: &mut Poly<GaussRat>, r: &GaussRat) -> usize {
    let factor = Poly::linear_factor(r, p.var());
    let mut mult = 0;
    while !p.is_zero() && p.eval(r).is_zero() {
        let (q, _) = p.div_rem(&factor).expect("monic divisor");
        *p = q;
        mult += 1;
    }
    mult
}

/// `(root, multiplicity)` pairs and the remaining cofactor.
pub type ExactRoots = (Vec<(GaussRat, usize)>, Poly<GaussRat>);

/// Roots lying in Q(i), with multiplicities, and the cofactor free of such
/// roots. `None` when the candidate set would exceed `cap`.
pub fn exact_roots(p: &Poly<GaussRat>, cap: usize) -> Option<ExactRoots> {
    let mut rest = p.clone();
    let mut found = Vec::new();
    if rest.is_zero() {
        return Some((found, rest));
    }
    let zeros = rest.low_order().unwrap_or(0);
    if zeros > 0 {
        rest = rest.shift_down(zeros);
        found.push((GaussRat::zero(), zeros));
    }
    if rest.degree() == Some(0) {
        return Some((found, rest));
    }
    let ints = integer_coefficients(&rest);
    let low = gaussian_divisors(&ints[0], cap)?;
    let high = gaussian_divisors(ints.last().expect("nonzero"), cap)?;
    if low.len().saturating_mul(high.len()).saturating_mul(4) > cap {
        return None;
    }
    let units = [gi(1, 0), gi(0, 1), gi(-1, 0), gi(0, -1)];
    let mut tried: HashSet<GaussRat> = HashSet::new();
    let mut approx = rest.to_approx();
    let low: Vec<(GaussInt, Complex64)> = low
        .iter()
        .flat_map(|a| units.iter().map(move |u| u.mul(a)))
        .map(|a| {
            let z = a.to_complex();
            (a, z)
        })
        .collect();
    for b in &high {
        let bz = b.to_complex();
        let b = b.to_gauss_rat();
        for (a, az) in &low {
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
            if !plausible_root(&approx, az / bz) {
                continue;
            }
            let c = a.to_gauss_rat() / b.clone();
            if !tried.insert(c.clone()) {
                continue;
            }
            let mult = deflate(&mut rest, &c);
            if mult > 0 {
                found.push((c, mult));
                approx = rest.to_approx();
            }
        }
    }
    Some((found, rest))
}

/// Cheap screen before exact evaluation: an exact root leaves a floating
/// residual of order machine epsilon relative to `Σ |p_j| |r|^j`.
fn plausible_root(p: &Poly<Complex64>, r: Complex64) -> bool {
    let (mut val, mut scale) = (Complex64::new(0.0, 0.0), 0.0);
    for c in p.coeffs().iter().rev() {
        val = val * r + c;
        scale = scale * r.norm() + c.norm();
    }
    !scale.is_finite() || val.norm() <= scale * 1e-8
}

/// Yun's square-free decomposition: `p = c * prod_k f_k^k` with each `f_k`
/// monic and square-free. Returns `(k, f_k)` for nonconstant factors.
pub fn square_free_decomposition(p: &Poly<GaussRat>) -> Vec<(usize, Poly<GaussRat>)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.diff();
    let a0 = p.gcd(&dp);
    let (mut b, _) = p.div_rem(&a0).expect("nonzero gcd");
    let (c, _) = dp.div_rem(&a0).expect("nonzero gcd");
    let mut d = c.sub(&b.diff());
    let mut k = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let (nb, _) = b.div_rem(&a).expect("nonzero gcd");
        let (nc, _) = d.div_rem(&a).expect("nonzero gcd");
        if a.degree().unwrap_or(0) > 0 {
            out.push((k, a));
        }
        d = nc.sub(&nb.diff());
        b = nb;
        k += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// numeric roots

fn companion_eigenvalues(p: &Poly<Complex64>) -> Result<Vec<Complex64>, RootError> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = *p.leading().expect("nonzero");
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -p.coeff(i) / lead;
    }
    let schur = m.try_schur(f64::EPSILON, 10_000).ok_or(RootError::NoConvergence(d))?;
    let (_, t) = schur.unpack();
    Ok((0..d).map(|i| t[(i, i)]).collect())
}

fn newton_polish(p: &Poly<Complex64>, mut r: Complex64) -> Complex64 {
    let dp = p.diff();
    let mut err = backward_error(p, r);
    for _ in 0..8 {
        let d = dp.eval(&r);
        if d.norm() == 0.0 {
            break;
        }
        let next = r - p.eval(&r) / d;
        let next_err = backward_error(p, next);
        if next_err.partial_cmp(&err) != Some(Ordering::Less) {
            break;
        }
        r = next;
        err = next_err;
    }
    r
}

/// Taylor coefficient `p^(k)(c) / k!` and its magnitude scale.
fn taylor_check(p: &Poly<Complex64>, c: Complex64, k: usize) -> (f64, f64) {
    let mut q = p.clone();
    let mut fact = 1.0;
    for j in 0..k {
        q = q.diff();
        fact *= (j + 1) as f64;
    }
    let rho = c.norm().max(1.0);
    let scale: f64 = q.coeffs().iter().enumerate().map(|(j, a)| a.norm() * rho.powi(j as i32)).sum();
    (q.eval(&c).norm() / fact, scale / fact)
}

/// Companion-matrix roots, Newton-polished. Roots within
/// `sqrt(cluster_tol)` of each other are merged when the centroid passes a
/// backward-error test on the first `m - 1` derivatives.
pub fn numeric_roots(p: &Poly<Complex64>, cluster_tol: f64) -> Result<RootSet, RootError> {
    let mut set = RootSet::default();
    let Some(zeros) = p.low_order() else {
        return Ok(set);
    };
    if zeros > 0 {
        set.roots.push(Root {
            value: Scalar::Approx(Complex64::new(0.0, 0.0)),
            multiplicity: zeros,
            backward_error: 0.0,
        });
    }
    let q = p.shift_down(zeros);
    // centroids use the unpolished eigenvalues: polishing a cluster member
    // toward one sheet of the root breaks the symmetry the mean relies on
    let mut raw: Vec<Complex64> = companion_eigenvalues(&q)?;
    raw.sort_by(|a, b| a.lex_cmp(b));
    let mut used = vec![false; raw.len()];
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let radius = cluster_tol.sqrt() * raw[i].norm().max(1.0);
        let members: Vec<usize> = (i..raw.len()).filter(|&j| !used[j] && (raw[j] - raw[i]).norm() <= radius).collect();
        let m = members.len();
        let centroid = members.iter().map(|&j| raw[j]).sum::<Complex64>() / m as f64;
        let certified = m > 1
            && (0..m).all(|k| {
                let (val, scale) = taylor_check(&q, centroid, k);
                val <= cluster_tol * scale.max(f64::MIN_POSITIVE)
            });
        let groups: Vec<(Complex64, usize)> =
            if certified { vec![(centroid, m)] } else { vec![(newton_polish(&q, raw[i]), 1)] };
        if certified {
            members.iter().for_each(|&j| used[j] = true);
        } else {
            used[i] = true;
        }
        for (r, mult) in groups {
            let err = backward_error(&q, r);
            if err > cluster_tol {
                return Err(RootError::Uncertified { root: r, error: err, bound: cluster_tol });
            }
            set.roots.push(Root { value: Scalar::Approx(chop(r)), multiplicity: mult, backward_error: err });
        }
    }
    set.sort();
    Ok(set)
}

/// A Gaussian rational within reach of `r` with denominator at most `bound`
/// that is an exact root of `p`.
pub fn snap_to_exact(r: Complex64, p: &Poly<GaussRat>, bound: u64) -> Option<GaussRat> {
    let nearest = |x: f64, q: u64| -> Option<BigRational> {
        let n = (x * q as f64).round();
        n.is_finite().then(|| BigRational::new(BigInt::from(n as i64), BigInt::from(q)))
    };
    (1..=bound.max(1)).find_map(|q| {
        let c = GaussRat::new(nearest(r.re, q)?, nearest(r.im, q)?);
        p.eval(&c).is_zero().then_some(c)
    })
}

/// All roots of an exact polynomial: exact where they lie in Q(i),
/// approximate (and certified) otherwise.
pub fn find_roots(p: &Poly<GaussRat>, cfg: &RootConfig) -> Result<RootSet, RootError> {
    let mut set = RootSet::default();
    let rest = match exact_roots(p, cfg.candidate_cap) {
        Some((found, rest)) => {
            for (r, m) in found {
                set.roots.push(Root { value: Scalar::Exact(r), multiplicity: m, backward_error: 0.0 });
            }
            rest
        }
        None => p.clone(),
    };
    for (mult, factor) in square_free_decomposition(&rest) {
        let approx = factor.to_approx();
        // square-free factor: every root is simple, so skip clustering
        let roots = numeric_roots(&approx, 0.0).or_else(|_| numeric_roots(&approx, cfg.cluster_tol))?;
        let mut reduced = factor.clone();
        for r in roots.roots {
            let z = r.value.to_complex();
            let lead = reduced.leading().cloned().unwrap_or_else(GaussRat::one);
            let snapped = snap_to_exact(z, &reduced, cfg.denominator_bound).or_else(|| {
                let s = lead.to_complex();
                let scaled = z * s;
                let guess = GaussRat::new(
                    BigRational::from_integer(BigInt::from(scaled.re.round() as i64)),
                    BigRational::from_integer(BigInt::from(scaled.im.round() as i64)),
                );
                let c = guess / lead.clone();
                reduced.eval(&c).is_zero().then_some(c)
            });
            match snapped {
                Some(c) => {
                    deflate(&mut reduced, &c);
                    set.roots.push(Root { value: Scalar::Exact(c), multiplicity: mult, backward_error: 0.0 });
                }
                None => {
                    let err = backward_error(&approx, z);
                    if err > cfg.cluster_tol {
                        return Err(RootError::Uncertified { root: z, error: err, bound: cfg.cluster_tol });
                    }
                    set.roots.push(Root { value: Scalar::Approx(z), multiplicity: mult, backward_error: err });
                }
            }
        }
    }
    set.sort();
    Ok(set)
}

// ---------------------------------------------------------------------------
// integer-difference classes

#[derive(Clone, Debug)]
pub struct RootClass {
    /// Member with the smallest real part (then imaginary part).
    pub base: Scalar,
    /// Sorted; `base + offsets[k]` enumerates the members.
    pub offsets: Vec<u64>,
    pub multiplicities: Vec<usize>,
    pub total: usize,
    pub warning: Option<String>,
}

impl RootClass {
    pub fn is_exact(&self) -> bool {
        matches!(self.base, Scalar::Exact(_))
    }
}

/// `Some(k)` when `a - b` is the integer `k`.
fn integer_difference(a: &Scalar, b: &Scalar, tol: f64) -> Option<i64> {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => (x.clone() - y.clone()).as_integer().and_then(|k| k.to_i64()),
        _ => {
            let d = a.to_complex() - b.to_complex();
            let k = d.re.round();
            (d.im.abs() < tol && (d.re - k).abs() < tol).then_some(k as i64)
        }
    }
}

fn near_half_integer(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    if let (Scalar::Exact(_), Scalar::Exact(_)) = (a, b) {
        return false;
    }
    let d = a.to_complex() - b.to_complex();
    d.im.abs() < tol && (d.re - d.re.floor() - 0.5).abs() < 10.0 * tol
}

/// Partition roots by the relation "difference is an integer".
pub fn group_into_classes(rs: &RootSet, class_tol: f64) -> Vec<RootClass> {
    let n = rs.roots.len();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if integer_difference(&rs.roots[i].value, &rs.roots[j].value, class_tol).is_some() {
                uf.union(i, j);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        match seen.iter().position(|&l| l == labels[i]) {
            Some(g) => groups[g].push(i),
            None => {
                seen.push(labels[i]);
                groups.push(vec![i]);
            }
        }
    }
    let mut classes: Vec<RootClass> = groups
        .into_iter()
        .map(|members| {
            let base_idx = *members
                .iter()
                .min_by(|&&a, &&b| scalar_cmp(&rs.roots[a].value, &rs.roots[b].value))
                .expect("nonempty class");
            let base = rs.roots[base_idx].value.clone();
            let mut pairs: Vec<(u64, usize)> = Vec::new();
            for &m in &members {
                let k = integer_difference(&rs.roots[m].value, &base, class_tol).unwrap_or(0).max(0) as u64;
                match pairs.iter_mut().find(|(o, _)| *o == k) {
                    Some(p) => p.1 += rs.roots[m].multiplicity,
                    None => pairs.push((k, rs.roots[m].multiplicity)),
                }
            }
            pairs.sort();
            let mut warning = None;
            for &a in &members {
                for &b in &members {
                    if a != b && near_half_integer(&rs.roots[a].value, &rs.roots[b].value, class_tol) {
                        warning = Some(format!(
                            "roots {} and {} differ by nearly a half-integer; class membership is numerically fragile",
                            rs.roots[a].value, rs.roots[b].value
                        ));
                    }
                }
            }
            if warning.is_none() && !base.to_complex().is_finite() {
                warning = Some("non-finite base root".into());
            }
            RootClass {
                base,
                offsets: pairs.iter().map(|p| p.0).collect(),
                multiplicities: pairs.iter().map(|p| p.1).collect(),
                total: pairs.iter().map(|p| p.1).sum(),
                warning,
            }
        })
        .collect();
    // singletons that sit near a half-integer offset of another class
    for i in 0..classes.len() {
        for j in 0..classes.len() {
            if i != j
                && classes[i].warning.is_none()
                && near_half_integer(&classes[i].base, &classes[j].base, class_tol)
            {
                classes[i].warning = Some(format!("base differs from {} by nearly a half-integer", classes[j].base));
            }
        }
    }
    classes.sort_by(|a, b| scalar_cmp(&a.base, &b.base));
    classes
}

// ---------------------------------------------------------------------------
// nonnegative integer roots, used for degree bounds

pub trait IntegerRoots: Field {
    /// All `k >= 0` with `p(k) = 0` (approximately, in approximate mode).
    fn nonneg_integer_roots(p: &Poly<Self>) -> Vec<u64>;
}

fn positive_divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let mut next = Vec::new();
        for d in &divs {
            let mut acc = *d;
            next.push(acc);
            for _ in 0..e {
                acc *= p;
                next.push(acc);
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

impl IntegerRoots for GaussRat {
    fn nonneg_integer_roots(p: &Poly<Self>) -> Vec<u64> {
        let Some(low) = p.low_order() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        if low > 0 {
            out.push(0);
        }
        let q = p.shift_down(low);
        if q.degree().unwrap_or(0) == 0 {
            return out;
        }
        let ints = integer_coefficients(&q);
        let g = ints[0].re.gcd(&ints[0].im);
        match g.to_u64().filter(|&g| g <= FACTOR_LIMIT) {
            Some(g) => {
                for d in positive_divisors(g) {
                    if q.eval(&GaussRat::from_i64(d as i64)).is_zero() {
                        out.push(d);
                    }
                }
            }
            None => {
                // too large to factor: locate numerically, confirm exactly
                let approx = q.to_approx();
                for k in <Complex64 as IntegerRoots>::nonneg_integer_roots(&approx) {
                    if q.eval(&GaussRat::from_i64(k as i64)).is_zero() && !out.contains(&k) {
                        out.push(k);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl IntegerRoots for Complex64 {
    fn nonneg_integer_roots(p: &Poly<Self>) -> Vec<u64> {
        let Ok(set) = numeric_roots(p, 1e-8).or_else(|_| numeric_roots(p, 1e-4)) else {
            return Vec::new();
        };
        let mut out: Vec<u64> = set
            .roots
            .iter()
            .filter_map(|r| {
                let z = r.value.to_complex();
                let k = z.re.round();
                let close = (z - Complex64::new(k, 0.0)).norm() <= 1e-6 * k.abs().max(1.0);
                (k >= 0.0 && close && backward_error(p, Complex64::new(k, 0.0)) <= 1e-9).then_some(k as u64)
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}
