//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p expsum-ode --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::{proportional, q, random_instances};
use expsum_ode::algebra::{ExpSum, GaussRat, Poly, Var};
use expsum_ode::corpus;
use expsum_ode::document::TransformReport;
use expsum_ode::normalize::denormalize_solution;
use expsum_ode::roots::RootClass;
use expsum_ode::solver::{
    analyze, class_ansatz_solve, degree_candidates, poly_solutions, pure_exponential, solve, Basis, SolutionBasis,
};
use expsum_ode::transform::{indicial_polynomial, shift_by_lambda, stirling_closed_form, stirling_matrix, to_t_domain};
use expsum_ode::verify::{independence, residual};
use expsum_ode::{normalize, Mode, RawProblem, Scalar, SolverConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn raw(name: &str) -> RawProblem<GaussRat> {
    corpus::problem(name).unwrap().raw
}

fn exact_basis(p: &RawProblem<GaussRat>) -> Result<SolutionBasis<GaussRat>, String> {
    match solve(p, &SolverConfig::default()).map_err(|e| e.to_string())?.basis {
        Basis::Exact(b) => Ok(b),
        Basis::Approx(_) => Err("solve fell back to floating point".into()),
    }
}

fn es(terms: &[(&str, &str)]) -> ExpSum<GaussRat> {
    ExpSum::from_terms(
        terms.iter().map(|(f, c)| expsum_ode::algebra::Term { freq: q(f), coef: Poly::constant(q(c), Var::Z) }),
    )
    .unwrap()
}

fn all_exactly_zero(b: &SolutionBasis<GaussRat>, p: &RawProblem<GaussRat>) -> bool {
    b.entries.iter().all(|e| residual(&e.solution, p).map(|r| r.is_zero()).unwrap_or(false))
}

fn criterion_1() -> Check {
    let p = raw("resonant");
    let np = normalize(&p).map_err(|e| e.to_string())?;
    let ind = indicial_polynomial(&np).map_err(|e| e.to_string())?;
    let expected = Poly::new(vec![q("16/27"), q("-4/3"), q("0"), q("1")], Var::Lambda);
    ensure!(ind == expected, "indicial polynomial {ind}");
    ensure!(ind.to_string() == "λ³ − 4/3·λ + 16/27", "indicial renders as {ind}");
    let a = analyze(&p, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let roots: Vec<(String, usize, bool)> =
        a.roots.roots.iter().map(|r| (r.value.to_string(), r.multiplicity, r.is_exact())).collect();
    ensure!(roots == [("-4/3".to_string(), 1, true), ("2/3".to_string(), 2, true)], "roots {roots:?}");
    let b = exact_basis(&p)?;
    let target = es(&[("-4/3", "1"), ("-1/3", "-7")]);
    ensure!(b.entries.iter().any(|e| proportional(&e.solution, &target)), "basis lacks e^(-4z/3)(1 - 7e^z)");
    ensure!(all_exactly_zero(&b, &p), "nonzero residual");
    let two_thirds = b.classes.iter().find(|c| c.base == "-4/3").map(|c| c.found).unwrap_or(0);
    Ok(format!(
        "basis size {}, class of -4/3 (offsets 0 and 2) contributes {two_thirds}, residuals exactly zero",
        b.entries.len()
    ))
}

fn criterion_2() -> Check {
    let p = raw("gaussian_roots");
    let b = exact_basis(&p)?;
    ensure!(b.entries.len() == 2, "basis size {}", b.entries.len());
    let mut joint = b.solutions();
    joint.push(es(&[("-1i", "1")]));
    joint.push(es(&[("-1", "1")]));
    ensure!(independence(&joint).rank == 2, "basis does not span e^(-iz), e^(-z)");
    let at_i = b.classes.iter().find(|c| c.base == "1i").ok_or("no class for root i")?;
    ensure!(at_i.found == 0, "root i produced {} solutions", at_i.found);
    ensure!(b.independence.rank == 2, "rank {}", b.independence.rank);
    ensure!(all_exactly_zero(&b, &p), "nonzero residual");
    Ok("basis {e^(-iz), e^(-z)}, root i gives nothing, rank 2".into())
}

fn criterion_3() -> Check {
    let p = raw("triple_root");
    let a = analyze(&p, &SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure!(a.classes.len() == 1, "{} classes", a.classes.len());
    let cls: &RootClass = &a.classes[0];
    ensure!(cls.base.to_string() == "1" && cls.offsets == [0] && cls.multiplicities == [3], "class {cls:?}");
    let out = class_ansatz_solve::<GaussRat>(&a.normalized, cls, 500).map_err(|e| e.to_string())?;
    let got: Vec<ExpSum<GaussRat>> = out.solutions.iter().map(expsum_ode::solver::assemble).collect();
    let e_z = es(&[("1", "1")]);
    let z_e_z = ExpSum::monomial(q("1"), q("1"), 1);
    ensure!(got.len() == 2, "class basis size {}", got.len());
    let mut joint = got.clone();
    joint.push(e_z);
    joint.push(z_e_z);
    ensure!(independence(&joint).rank == 2, "class basis {got:?} is not span{{e^z, z e^z}}");
    let b = exact_basis(&p)?;
    ensure!(b.entries.len() == 2, "solve basis size {}", b.entries.len());
    let r = residual(&ExpSum::monomial(q("1"), q("1"), 2), &p).map_err(|e| e.to_string())?;
    ensure!(r == es(&[("2", "-2")]), "z^2 e^z residual {r}");
    Ok("class {1 (x3)} gives {e^z, z e^z}; z^2 e^z leaves -2e^(2z)".into())
}

fn criterion_4() -> Check {
    let p = raw("no_solutions");
    let b = exact_basis(&p)?;
    ensure!(b.entries.is_empty(), "basis size {}", b.entries.len());
    let a = analyze(&p, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let tr = TransformReport::new(&a).map_err(|e| e.to_string())?;
    ensure!(tr.alpha == ["t", "2", "1"], "alpha {:?}", tr.alpha);
    ensure!(tr.operator == ["1", "2", "t"] && tr.common_t_power == 1, "operator {:?}", tr.operator);
    let t = to_t_domain(&a.normalized).map_err(|e| e.to_string())?;
    let mut how = Vec::new();
    for (lambda, expected_op) in [("-1", ["1", "0", "t"]), ("0", ["1", "2", "t"])] {
        let u = shift_by_lambda(&t, &q(lambda));
        let op: Vec<String> = u.operator_coefficients().0.iter().map(|c| c.to_string()).collect();
        ensure!(op == expected_op, "u-equation at {lambda}: {op:?}");
        let cands = degree_candidates(&u);
        let sols = poly_solutions(&u, 500).map_err(|e| e.to_string())?;
        ensure!(sols.is_empty(), "polynomial solution at {lambda}");
        how.push(format!(
            "λ = {lambda}: {}",
            if cands.is_empty() { "no degree candidates" } else { "trivial nullspace" }
        ));
    }
    Ok(format!("empty basis; t v'' + 2v' + v = 0; {}", how.join(", ")))
}

fn criterion_5() -> Check {
    let p = raw("negative_frequency");
    let b = exact_basis(&p)?;
    ensure!(b.entries.len() == 1, "basis size {}", b.entries.len());
    ensure!(proportional(&b.entries[0].solution, &es(&[("0", "1"), ("1", "1")])), "solution {}", b.entries[0].solution);
    ensure!(all_exactly_zero(&b, &p), "nonzero residual");
    Ok(format!("basis {{{}}}", b.entries[0].solution))
}

fn criterion_6() -> Check {
    let cfg = SolverConfig::default();
    let mut details = Vec::new();
    for (name, expected) in [("triple_root", vec!["1"]), ("gaussian_roots", vec!["-1", "-1i"])] {
        let p = raw(name);
        let np = normalize(&p).map_err(|e| e.to_string())?;
        let got: Vec<String> =
            pure_exponential(&np, &cfg.roots).map_err(|e| e.to_string())?.iter().map(Scalar::to_string).collect();
        ensure!(got == expected, "{name}: {got:?}");
        let b = exact_basis(&p)?;
        for l in &got {
            let f = es(&[(l.as_str(), "1")]);
            let mut joint = b.solutions();
            joint.push(f);
            ensure!(independence(&joint).rank == b.entries.len(), "{name}: e^({l}z) not in the basis span");
        }
        details.push(format!("{name} -> {{{}}}", got.join(", ")));
    }
    Ok(details.join("; "))
}

fn criterion_7() -> Check {
    for n in 0..=12 {
        let m = stirling_matrix(n);
        for i in 0..=n {
            for j in 0..=n {
                ensure!(*m.get(i, j) == stirling_closed_form(i, j), "n = {n}, entry ({i}, {j})");
            }
        }
    }
    Ok("closed form equals recurrence for n ≤ 12".into())
}

fn criterion_8() -> Check {
    for (k, p) in random_instances(20).iter().enumerate() {
        let np = normalize(p).map_err(|e| e.to_string())?;
        let lhs = to_t_domain(&np).map_err(|e| e.to_string())?.indicial_falling();
        let rhs = indicial_polynomial(&np).map_err(|e| e.to_string())?;
        ensure!(lhs == rhs, "instance {k}: {lhs} vs {rhs}");
    }
    Ok("Σ α_i(0) λ^(i) ≡ λ^n + Σ P_j(0) λ^j on 20 instances".into())
}

fn soundness(p: &RawProblem<GaussRat>) -> Result<(usize, Mode), String> {
    let rep = solve(p, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let approx_raw = p.to_approx();
    match &rep.basis {
        Basis::Exact(b) => {
            ensure!(all_exactly_zero(b, p), "nonzero exact residual");
            for e in &b.entries {
                let r = residual(&e.solution.to_approx(), &approx_raw).map_err(|e| e.to_string())?;
                ensure!(r.max_magnitude() < 1e-9, "converted residual {:e}", r.max_magnitude());
            }
            Ok((b.entries.len(), Mode::Exact))
        }
        Basis::Approx(b) => {
            for e in &b.entries {
                ensure!(e.verification.is_zero, "approximate residual {:e}", e.verification.max_magnitude);
            }
            Ok((b.entries.len(), Mode::Approx))
        }
    }
}

fn criterion_9() -> Check {
    let mut solutions = 0;
    let mut approx_instances = 0;
    for name in ["resonant", "gaussian_roots", "triple_root", "no_solutions", "negative_frequency"] {
        let (k, _) = soundness(&raw(name)).map_err(|e| format!("{name}: {e}"))?;
        solutions += k;
    }
    for (i, p) in random_instances(20).iter().enumerate() {
        let (k, mode) = soundness(p).map_err(|e| format!("random instance {i}: {e}"))?;
        solutions += k;
        approx_instances += usize::from(mode == Mode::Approx);
    }
    Ok(format!("{solutions} solutions verified; {approx_instances} random instances ran in floating point"))
}

fn criterion_10() -> Check {
    let mut checked = 0;
    let named = ["resonant", "gaussian_roots", "triple_root", "no_solutions", "negative_frequency"].map(raw);
    for p in named.iter().chain(random_instances(20).iter()) {
        let rep = solve(p, &SolverConfig::default()).map_err(|e| e.to_string())?;
        ensure!(rep.basis.len() <= p.order(), "dimension {} exceeds order {}", rep.basis.len(), p.order());
        checked += 1;
    }
    for name in ["gaussian_roots", "triple_root"] {
        let b = exact_basis(&raw(name))?;
        ensure!(
            b.entries.len() <= 2 && b.count_bound == 2,
            "{name}: {} solutions, bound {}",
            b.entries.len(),
            b.count_bound
        );
    }
    Ok(format!("dimension ≤ n on {checked} instances; ≤ 2 on gaussian_roots and triple_root"))
}

fn criterion_11() -> Check {
    let orig = raw("resonant");
    let half = raw("resonant_half");
    let np_orig = normalize(&orig).map_err(|e| e.to_string())?;
    let np_half = normalize(&half).map_err(|e| e.to_string())?;
    ensure!(
        np_half.lambda_prime == num_rational::BigRational::new(1.into(), 2.into()),
        "λ' = {}",
        np_half.lambda_prime
    );
    ensure!(np_half.p == np_orig.p, "normalized equations differ");
    let b_orig = exact_basis(&orig)?;
    let b_half = exact_basis(&half)?;
    ensure!(b_half.entries.len() == b_orig.entries.len(), "basis sizes differ");
    for (eh, eo) in b_half.entries.iter().zip(&b_orig.entries) {
        let rescaled = denormalize_solution(&eo.solution, &np_half).map_err(|e| e.to_string())?;
        ensure!(proportional(&eh.solution, &rescaled), "{} is not {}", eh.solution, rescaled);
        let back = denormalize_solution(&eh.normalized, &np_orig).map_err(|e| e.to_string())?;
        ensure!(residual(&back, &orig).map_err(|e| e.to_string())?.is_zero(), "mapped-back residual nonzero");
        ensure!(residual(&eh.solution, &half).map_err(|e| e.to_string())?.is_zero(), "half-variant residual nonzero");
    }
    Ok(format!(
        "λ' = 1/2 basis {{{}}} maps back to zero-residual solutions",
        b_half.entries.iter().map(|e| e.solution.to_string()).collect::<Vec<_>>().join(", ")
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("resonant rational roots", criterion_1),
        ("Gaussian rational roots", criterion_2),
        ("triple root", criterion_3),
        ("non-existence", criterion_4),
        ("negative frequencies", criterion_5),
        ("pure-exponential shortcut", criterion_6),
        ("Stirling closed form", criterion_7),
        ("indicial identity", criterion_8),
        ("solver soundness", criterion_9),
        ("count bounds", criterion_10),
        ("rescaling round trip", criterion_11),
    ];
    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    println!("acceptance suite finished in {:.2?}", start.elapsed());
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
