//! Browser bindings: solve a problem document, report indicial roots for
//! plotting, and sample solutions along the real axis.
//!
//! Each export is a thin wrapper over a plain function returning
//! `Result<String, String>`, so the logic is testable natively.

use expsum_ode::algebra::{ExpSum, Field};
use expsum_ode::document::{Candidates, IndicialReport, ProblemDocument, SolutionDocument};
use expsum_ode::solver::analyze;
use expsum_ode::{solve as solve_problem, SolverConfig};
use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const SNAP_BOUND: u64 = 64;

fn config(numeric: bool, approximate_input: bool) -> SolverConfig {
    SolverConfig { force_numeric: numeric || approximate_input, ..SolverConfig::default() }
}

/// Problem document in, solution document (with metadata) out.
pub fn solve_json(problem: &str, numeric: bool) -> Result<String, String> {
    let parsed = ProblemDocument::from_json(problem).and_then(|d| d.parse(SNAP_BOUND)).map_err(|e| e.to_string())?;
    let report = solve_problem(&parsed.raw, &config(numeric, parsed.approximate_input)).map_err(|e| e.to_string())?;
    Ok(SolutionDocument::from_report(&report).to_json())
}

#[derive(Serialize)]
struct PlotRoot {
    label: String,
    re: f64,
    im: f64,
    multiplicity: usize,
    exact: bool,
    class: usize,
}

#[derive(Serialize)]
struct IndicialPlot {
    #[serde(flatten)]
    report: IndicialReport,
    points: Vec<PlotRoot>,
}

/// Indicial report plus root coordinates in the complex plane.
pub fn indicial_json(problem: &str) -> Result<String, String> {
    let parsed = ProblemDocument::from_json(problem).and_then(|d| d.parse(SNAP_BOUND)).map_err(|e| e.to_string())?;
    let a = analyze(&parsed.raw, &config(false, parsed.approximate_input)).map_err(|e| e.to_string())?;
    let report = IndicialReport::new(&a);
    let points = a
        .roots
        .roots
        .iter()
        .zip(&report.roots)
        .map(|(r, doc)| {
            let z = r.value.to_complex();
            PlotRoot {
                label: doc.value.clone(),
                re: z.re,
                im: z.im,
                multiplicity: r.multiplicity,
                exact: doc.exact,
                class: doc.class,
            }
        })
        .collect();
    Ok(serde_json::to_string(&IndicialPlot { report, points }).expect("serializable"))
}

#[derive(Debug, Serialize, PartialEq)]
struct Curve {
    label: String,
    /// `None` where the value overflowed.
    re: Vec<Option<f64>>,
    im: Vec<Option<f64>>,
}

#[derive(Debug, Serialize, PartialEq)]
struct Samples {
    x: Vec<f64>,
    curves: Vec<Curve>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn curves<F: Field>(basis: &[ExpSum<F>], xs: &[f64]) -> Vec<Curve> {
    basis
        .iter()
        .map(|f| {
            let vals: Vec<Complex64> = xs.iter().map(|&x| f.eval(Complex64::new(x, 0.0))).collect();
            Curve {
                label: f.to_string(),
                re: vals.iter().map(|v| finite(v.re)).collect(),
                im: vals.iter().map(|v| finite(v.im)).collect(),
            }
        })
        .collect()
}

/// Values of every basis element at `n` evenly spaced real points of `[x0, x1]`.
pub fn sample_curve_json(solution: &str, x0: f64, x1: f64, n: usize) -> Result<String, String> {
    if n < 2 || x0.partial_cmp(&x1) != Some(std::cmp::Ordering::Less) {
        return Err(format!("need n >= 2 and x0 < x1, got n = {n}, [{x0}, {x1}]"));
    }
    let cands = SolutionDocument::from_json(solution).and_then(|d| d.candidates()).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = (0..n).map(|k| x0 + (x1 - x0) * k as f64 / (n - 1) as f64).collect();
    let curves = match &cands {
        Candidates::Exact(b) => curves(b, &xs),
        Candidates::Approx(b) => curves(b, &xs),
    };
    Ok(serde_json::to_string(&Samples { x: xs, curves }).expect("serializable"))
}

#[wasm_bindgen]
pub fn solve(problem: &str, numeric: bool) -> Result<String, JsError> {
    solve_json(problem, numeric).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn indicial(problem: &str) -> Result<String, JsError> {
    indicial_json(problem).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sample_curve(solution: &str, x0: f64, x1: f64, n: usize) -> Result<String, JsError> {
    sample_curve_json(solution, x0, x1, n).map_err(|e| JsError::new(&e))
}
