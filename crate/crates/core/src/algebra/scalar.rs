//! Scalars: exact Gaussian rationals and approximate complex doubles.
//!
//! The solver is generic over [`Field`], so exact and approximate values
//! never meet inside one computation. [`Scalar`] is the dynamically tagged
//! form used for I/O and reports; its arithmetic refuses to mix modes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Coefficient field used throughout the solver.
pub trait Field:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_gauss(g: &GaussRat) -> Self;
    /// `None` when the scalar cannot be represented (approximate into exact).
    fn from_scalar(s: &Scalar) -> Option<Self>;

    fn inv(&self) -> Option<Self>;
    /// Structural zero test. Approximate values compare against `0.0` exactly.
    fn is_zero(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    fn to_scalar(&self) -> Scalar;
    /// Lexicographic order on (re, im).
    fn lex_cmp(&self, other: &Self) -> Ordering;
    /// Exact mode ignores `tol` and tests equality.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self.clone() * inv)
    }
}

/// An element of Q(i), always stored in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::real(BigRational::new(num.into(), den.into()))
    }

    pub fn i() -> Self {
        GaussRat::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `Some(k)` when the value is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    /// Least common multiple of the two denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(self.re * o.re);
        }
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        GaussRat::new(re, im)
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    /// Panics on division by zero, like integer division.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: GaussRat) -> GaussRat {
        self * o.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
            }
        }
    }
}

impl FromStr for GaussRat {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, AlgebraError> {
        match s.parse::<Scalar>()? {
            Scalar::Exact(g) => Ok(g),
            Scalar::Approx(_) => Err(AlgebraError::Parse(format!("expected an exact scalar, got {s:?}"))),
        }
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Field for GaussRat {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRat::from_ints(0, 0)
    }
    fn one() -> Self {
        GaussRat::from_ints(1, 0)
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::from_ints(n, 0)
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.clone()
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        match s {
            Scalar::Exact(g) => Some(g.clone()),
            Scalar::Approx(_) => None,
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(GaussRat::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_gauss(g: &GaussRat) -> Self {
        g.to_complex()
    }
    fn from_scalar(s: &Scalar) -> Option<Self> {
        Some(s.to_complex())
    }
    fn inv(&self) -> Option<Self> {
        if *self == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Approx(*self)
    }
    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.total_cmp(&other.re).then_with(|| self.im.total_cmp(&other.im))
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

/// Mode of a [`Scalar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// A scalar tagged with its mode.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRat),
    Approx(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Approx(_) => Mode::Approx,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Approx(c) => *c,
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Approx(_) => None,
        }
    }

    /// Equality with a tolerance; only meaningful between approximate values
    /// or between an approximate value and an exact one.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        exact: impl FnOnce(GaussRat, GaussRat) -> Option<GaussRat>,
        approx: impl FnOnce(Complex64, Complex64) -> Option<Complex64>,
    ) -> Result<Scalar, AlgebraError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                exact(a.clone(), b.clone()).map(Scalar::Exact).ok_or(AlgebraError::DivisionByZero)
            }
            (Scalar::Approx(a), Scalar::Approx(b)) => {
                approx(*a, *b).map(Scalar::Approx).ok_or(AlgebraError::DivisionByZero)
            }
            _ => Err(AlgebraError::ModeMismatch),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.binary(other, |a, b| Some(a + b), |a, b| Some(a + b))
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.binary(other, |a, b| Some(a - b), |a, b| Some(a - b))
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.binary(other, |a, b| Some(a * b), |a, b| Some(a * b))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, AlgebraError> {
        self.binary(other, |a, b| Field::div(&a, &b), |a, b| Field::div(&a, &b))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Approx(c) => {
                // Debug formatting keeps a decimal point so the text re-parses as approximate.
                if c.im == 0.0 {
                    write!(f, "{:?}", c.re)
                } else if c.re == 0.0 {
                    write!(f, "{:?}i", c.im)
                } else {
                    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                    write!(f, "{:?}{}{:?}i", c.re, sign, c.im.abs())
                }
            }
        }
    }
}

enum Part {
    Exact(BigRational),
    Approx(f64),
}

fn parse_part(s: &str, whole: &str) -> Result<Part, AlgebraError> {
    let err = || AlgebraError::Parse(format!("malformed scalar {whole:?}"));
    if s.is_empty() {
        return Err(err());
    }
    let body = s.strip_prefix('-').unwrap_or(s);
    if !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit() || b == b'/') {
        let mut it = body.split('/');
        let num = it.next().filter(|n| !n.is_empty()).ok_or_else(err)?;
        let den = it.next();
        if it.next().is_some() {
            return Err(err());
        }
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = match den {
            Some(d) if !d.is_empty() => d.parse().map_err(|_| err())?,
            Some(_) => return Err(err()),
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(AlgebraError::Parse(format!("zero denominator in {whole:?}")));
        }
        let r = BigRational::new(num, den);
        return Ok(Part::Exact(if s.starts_with('-') { -r } else { r }));
    }
    let has_float_marker = body.contains('.') || body.contains('e') || body.contains('E');
    if has_float_marker && body.bytes().next().is_some_and(|b| b.is_ascii_digit()) {
        let v: f64 = s.parse().map_err(|_| err())?;
        return Ok(Part::Approx(v));
    }
    Err(err())
}

impl FromStr for Scalar {
    type Err = AlgebraError;

    /// Exact grammar: `-4/3`, `1+1i`, `-1i`, `2/3-1/2i`. Decimal parts
    /// (`0.5`, `1e-3+2.0i`) produce approximate scalars.
    fn from_str(text: &str) -> Result<Self, AlgebraError> {
        let s = text.trim();
        let err = || AlgebraError::Parse(format!("malformed scalar {text:?}"));
        if s.is_empty() {
            return Err(err());
        }
        let (re, im) = match s.strip_suffix('i') {
            None => (s, None),
            Some(body) => {
                let bytes = body.as_bytes();
                let split = (1..bytes.len())
                    .rev()
                    .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
                match split {
                    Some(k) => {
                        let im = if bytes[k] == b'+' { &body[k + 1..] } else { &body[k..] };
                        if im.starts_with('-') && im[1..].starts_with('-') {
                            return Err(err());
                        }
                        (&body[..k], Some(im))
                    }
                    None => ("", Some(body)),
                }
            }
        };
        let re_part = if re.is_empty() { Part::Exact(BigRational::zero()) } else { parse_part(re, text)? };
        let im_part = match im {
            Some(im) => parse_part(im, text)?,
            None => Part::Exact(BigRational::zero()),
        };
        match (re_part, im_part) {
            (Part::Exact(a), Part::Exact(b)) => Ok(Scalar::Exact(GaussRat::new(a, b))),
            (Part::Approx(a), Part::Approx(b)) => Ok(Scalar::Approx(Complex64::new(a, b))),
            (Part::Approx(a), Part::Exact(b)) if b.is_zero() && im.is_none() => {
                Ok(Scalar::Approx(Complex64::new(a, 0.0)))
            }
            (Part::Exact(a), Part::Approx(b)) if a.is_zero() && re.is_empty() => {
                Ok(Scalar::Approx(Complex64::new(0.0, b)))
            }
            _ => Err(AlgebraError::Parse(format!("scalar {text:?} mixes exact and decimal parts"))),
        }
    }
}

/// `x (x-1) ... (x-k+1)`; the empty product is one.
pub fn falling_factorial<F: Field>(x: &F, k: usize) -> F {
    let mut acc = F::one();
    for j in 0..k {
        acc = acc * (x.clone() - F::from_i64(j as i64));
    }
    acc
}

/// Binomial coefficients `C(j, i)` for `0 <= i, j <= n`, from Pascal's rule.
pub fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for j in 0..=n {
        table[j][0] = BigInt::one();
        for i in 1..=j {
            table[j][i] = if i == j { BigInt::one() } else { &table[j - 1][i - 1] + &table[j - 1][i] };
        }
    }
    table
}

pub(crate) fn bigint_to_field<F: Field>(n: &BigInt) -> F {
    F::from_gauss(&GaussRat::real(BigRational::from_integer(n.clone())))
}
