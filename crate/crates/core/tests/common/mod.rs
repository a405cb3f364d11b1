#![allow(dead_code)]

use expsum_ode::algebra::{ExpSum, Field, GaussRat, Poly, Var};
use expsum_ode::RawProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_2024;

pub fn q(s: &str) -> GaussRat {
    s.parse().unwrap()
}

/// Rational with numerator in `-9..=9` and denominator in `1..=9`.
pub fn small_rational(rng: &mut impl Rng) -> GaussRat {
    GaussRat::ratio(rng.random_range(-9..=9), rng.random_range(1..=9))
}

pub fn random_t_poly(rng: &mut impl Rng, max_degree: usize) -> Poly<GaussRat> {
    let d = rng.random_range(0..=max_degree);
    Poly::new((0..=d).map(|_| small_rational(rng)).collect(), Var::T)
}

/// `f^(n) + Σ_j P_j(e^z) f^(j) = 0` with `n ≤ 4`, `deg P_j ≤ 3`.
pub fn random_instance(rng: &mut impl Rng) -> RawProblem<GaussRat> {
    let n = rng.random_range(1..=4);
    loop {
        let polys: Vec<Poly<GaussRat>> = (0..n).map(|_| random_t_poly(rng, 3)).collect();
        if polys[0].is_zero() {
            continue;
        }
        return RawProblem::monic(polys.iter().map(ExpSum::from_t_poly).collect()).unwrap();
    }
}

pub fn random_instances(count: usize) -> Vec<RawProblem<GaussRat>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count).map(|_| random_instance(&mut rng)).collect()
}

/// True when `a = c * b` for some nonzero constant `c`.
pub fn proportional<F: Field>(a: &ExpSum<F>, b: &ExpSum<F>) -> bool {
    let (Some(ta), Some(tb)) = (a.terms().first(), b.terms().first()) else {
        return a.is_zero() && b.is_zero();
    };
    let (Some(ca), Some(cb)) = (ta.coef.leading(), tb.coef.leading()) else {
        return false;
    };
    let c = ca.div(cb).unwrap();
    let diff = a.sub(&b.scale(&c)).unwrap();
    if F::EXACT {
        diff.is_zero()
    } else {
        diff.max_magnitude() <= 1e-9 * a.max_magnitude().max(1.0)
    }
}
