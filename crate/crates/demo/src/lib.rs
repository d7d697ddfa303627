//! Browser demo. Each exported function takes plain numbers and returns a
//! JSON string, `{"error": ...}` on failure, so the same code runs and is
//! tested natively.

use convexalg::borsuk::{find_common_direction_2d, gap_map, LINE_TOL};
use convexalg::counterexample::{chord_profile, theorem1b_demo, DemoOptions};
use convexalg::univariate::{prop3_pipeline, MonotoneGenerator};
use convexalg::{ConvexBody, FunctionExpr, Polynomial, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn respond<T: Serialize>(r: Result<T>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e.to_string()),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

#[derive(Serialize)]
struct Curve {
    degree: usize,
    scan_degree: usize,
    error: f64,
    second_derivative_min: f64,
    x: Vec<f64>,
    p: Vec<f64>,
    output: Vec<f64>,
    output_dd: Vec<f64>,
}

/// Convex approximation of `p(x) = sum coeffs[k] x^k` by a polynomial in
/// `e^x` on `[a, b]`, sampled at `samples` points.
#[wasm_bindgen]
pub fn prop3_curve(coeffs: Vec<f64>, a: f64, b: f64, eps: f64, samples: usize) -> String {
    respond((|| {
        let p = Polynomial::univariate(&coeffs);
        let gen = MonotoneGenerator::exp(a, b)?;
        let r = prop3_pipeline(&p, &gen, eps)?;
        let dd = r.output.partial_derivative(0)?.partial_derivative(0)?;
        let x: Vec<f64> = linspace(a, b, samples).collect();
        Ok(Curve {
            degree: r.degree,
            scan_degree: r.scan_degree,
            error: r.error_estimate,
            second_derivative_min: r.second_derivative_min,
            p: x.iter().map(|&t| p.eval(&[t])).collect(),
            output: x.iter().map(|&t| r.output.eval_at(&[t])).collect(),
            output_dd: x.iter().map(|&t| dd.eval_at(&[t])).collect(),
            x,
        })
    })())
}

fn centers(c1: &[f64], c2: &[f64]) -> Result<[FunctionExpr; 2]> {
    for c in [c1, c2] {
        if c.len() != 2 {
            return Err(convexalg::Error::DimensionMismatch {
                expected: 2,
                got: c.len(),
            });
        }
    }
    Ok([FunctionExpr::squared_distance(c1), FunctionExpr::squared_distance(c2)])
}

#[derive(Serialize)]
struct Scan {
    theta: Vec<f64>,
    gap: Vec<f64>,
    y: Vec<f64>,
    m: f64,
    residual: f64,
}

/// Gap between the chord minimizers of the squared distances to `c1` and
/// `c2` on the unit disk, as a function of the chord angle, and the
/// common direction where it vanishes.
#[wasm_bindgen]
pub fn borsuk_scan(c1: Vec<f64>, c2: Vec<f64>, samples: usize) -> String {
    respond((|| {
        let fs = centers(&c1, &c2)?;
        let body = ConvexBody::unit_ball(2);
        let theta: Vec<f64> = linspace(0.0, std::f64::consts::PI, samples).collect();
        let gap = theta
            .iter()
            .map(|t| Ok(gap_map(&fs, &body, &[t.cos(), t.sin()], LINE_TOL)?[0]))
            .collect::<Result<Vec<f64>>>()?;
        let r = find_common_direction_2d(&fs[0], &fs[1], &body, 1e-6, &[0.0, 0.0])?;
        Ok(Scan {
            theta,
            gap,
            y: r.y,
            m: r.m,
            residual: r.residual,
        })
    })())
}

#[derive(Serialize)]
struct Profile {
    y: Vec<f64>,
    m: f64,
    bound: f64,
    witness_t: f64,
    t: Vec<f64>,
    f: Vec<Vec<f64>>,
    g_eps: Vec<Vec<f64>>,
    witness: Vec<f64>,
    passed: bool,
}

/// Chord profiles of both functions, their `g_eps` approximants and the
/// witness that stays away from the pinned algebra.
#[wasm_bindgen]
pub fn counterexample_profile(c1: Vec<f64>, c2: Vec<f64>, eps: f64, samples: usize) -> String {
    respond((|| {
        let fs = centers(&c1, &c2)?;
        let body = ConvexBody::unit_ball(2);
        let opts = DemoOptions {
            grid_per_axis: 15,
            sphere_grid: 50,
            soundness_samples: 20,
        };
        let r = theorem1b_demo(&fs, &body, eps, 1e-6, 0, &opts)?;
        let chord = &r.pinned.chord;
        let mut t = Vec::new();
        let (mut f, mut g) = (Vec::new(), Vec::new());
        for (j, m) in r.members.iter().enumerate() {
            let rows = chord_profile(&fs[j], &m.g_eps.g_eps, chord, samples);
            t = rows.iter().map(|r| r[0]).collect();
            f.push(rows.iter().map(|r| r[1]).collect());
            g.push(rows.iter().map(|r| r[2]).collect());
        }
        let witness = t.iter().map(|&s| r.witness.eval_at(&chord.point(s))).collect();
        Ok(Profile {
            passed: r.all_passed(),
            y: r.pinned.y.clone(),
            m: r.pinned.m,
            bound: r.bound,
            witness_t: r.witness_t,
            t,
            f,
            g_eps: g,
            witness,
        })
    })())
}
