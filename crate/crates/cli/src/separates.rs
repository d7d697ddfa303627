//! Point-separation diagnostic for a family of generators.

use convexalg::convexity::{ConvexityCertificate, Verdict, Witness};
use convexalg::geometry::seeded_rng;
use convexalg::{ConvexBody, Error, FunctionExpr, Result};

/// Largest `|g(x) - g(y)|` over the generators.
fn separation(generators: &[FunctionExpr], x: &[f64], y: &[f64]) -> f64 {
    generators
        .iter()
        .map(|g| (g.eval_at(x) - g.eval_at(y)).abs())
        .fold(0.0, f64::max)
}

/// Checks that some generator differs by more than `tol` on every pair of
/// a coarse lattice of the body and on `n_pairs` seeded random pairs of
/// distinct points. The witness is the least separated pair, first in
/// sampling order on ties; its `violation` is `tol - separation`, and the
/// check fails when that is nonnegative.
pub fn separates_points(
    generators: &[FunctionExpr],
    body: &ConvexBody,
    n_pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<ConvexityCertificate> {
    let d = body.dim();
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    for g in generators {
        let got = g.validate()?;
        if got != d {
            return Err(Error::DimensionMismatch { expected: d, got });
        }
    }
    let per_axis = ((32f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let lattice = body.lattice(per_axis);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for i in 0..lattice.len() {
        for j in i + 1..lattice.len() {
            pairs.push((lattice[i].clone(), lattice[j].clone()));
        }
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..n_pairs {
        let x = body.sample_point(&mut rng);
        let y = body.sample_point(&mut rng);
        if x != y {
            pairs.push((x, y));
        }
    }
    let mut worst: Option<Witness> = None;
    for (x, y) in &pairs {
        let violation = tol - separation(generators, x, y);
        if worst.as_ref().is_none_or(|w| violation > w.violation) {
            worst = Some(Witness {
                x1: x.clone(),
                x2: Some(y.clone()),
                violation,
            });
        }
    }
    let failed = worst.as_ref().is_some_and(|w| w.violation >= 0.0);
    Ok(ConvexityCertificate {
        check: "separates_points".into(),
        verdict: if failed { Verdict::Fail } else { Verdict::Pass },
        samples: pairs.len(),
        tol,
        resolution: format!("{n_pairs} seeded pairs (seed {seed}) + lattice {per_axis}^{d} pairs"),
        witness: worst.filter(|_| failed),
    })
}
