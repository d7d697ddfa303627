//! Sampled certificates for convexity, coordinatewise monotonicity and the
//! preconditions of convex monotone composition, plus golden-section line
//! minimization along chords.
//!
//! A passing certificate means no violation was found at the recorded
//! resolution and tolerance. It is evidence, not a proof.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::funcexpr::{FunctionExpr, Polynomial};
use crate::geometry::{seeded_rng, Aabb, Chord, ConvexBody, CHORD_TOL};
use crate::linalg::min_eigenvalue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Worst sampled violation. `x2` is absent for pointwise checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x1: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x2: Option<Vec<f64>>,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub check: String,
    pub verdict: Verdict,
    pub samples: usize,
    pub tol: f64,
    /// Human-readable sampling resolution.
    pub resolution: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl ConvexityCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Builds a certificate from the largest observed violation.
    pub(crate) fn from_worst(
        check: &str,
        samples: usize,
        tol: f64,
        resolution: String,
        worst: Option<Witness>,
    ) -> Self {
        let witness = worst.filter(|w| w.violation > tol);
        ConvexityCertificate {
            check: check.to_string(),
            verdict: if witness.is_some() {
                Verdict::Fail
            } else {
                Verdict::Pass
            },
            samples,
            tol,
            resolution,
            witness,
        }
    }
}

fn keep_worst(worst: &mut Option<Witness>, mut candidate: Witness) {
    if candidate.violation.is_nan() {
        // an undefined value is never certified
        candidate.violation = f64::INFINITY;
    }
    if worst.as_ref().is_none_or(|w| candidate.violation > w.violation) {
        *worst = Some(candidate);
    }
}

/// Per-axis count of the coarse lattice used for exhaustive pairs; keeps
/// the lattice at roughly 32 points.
fn coarse_per_axis(d: usize) -> usize {
    ((32f64).powf(1.0 / d as f64).floor() as usize).max(2)
}

/// Tests `(f(x1) + f(x2)) / 2 >= f((x1 + x2) / 2) - tol` on `n_pairs`
/// seeded pairs and on all pairs of a coarse lattice of the body.
pub fn midpoint_convexity_test(
    f: &FunctionExpr,
    body: &ConvexBody,
    n_pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<ConvexityCertificate> {
    let d = body.dim();
    check_dim(d, f.validate()?)?;
    let mut worst: Option<Witness> = None;
    let mut samples = 0;
    let mut check_pair = |a: &[f64], b: &[f64], fa: f64, fb: f64| {
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let violation = f.eval_at(&mid) - 0.5 * (fa + fb);
        keep_worst(
            &mut worst,
            Witness {
                x1: a.to_vec(),
                x2: Some(b.to_vec()),
                violation,
            },
        );
    };

    let per_axis = coarse_per_axis(d);
    let lattice = body.lattice(per_axis);
    let values: Vec<f64> = lattice.iter().map(|p| f.eval_at(p)).collect();
    for i in 0..lattice.len() {
        for j in i + 1..lattice.len() {
            check_pair(&lattice[i], &lattice[j], values[i], values[j]);
            samples += 1;
        }
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..n_pairs {
        let a = body.sample_point(&mut rng);
        let b = body.sample_point(&mut rng);
        let (fa, fb) = (f.eval_at(&a), f.eval_at(&b));
        check_pair(&a, &b, fa, fb);
        samples += 1;
    }
    Ok(ConvexityCertificate::from_worst(
        "midpoint_convexity",
        samples,
        tol,
        format!("{n_pairs} seeded pairs (seed {seed}) + lattice {per_axis}^{d} pairs"),
        worst,
    ))
}

fn evaluate_matrix(m: &[Vec<FunctionExpr>], x: &[f64]) -> Vec<Vec<f64>> {
    m.iter().map(|row| row.iter().map(|e| e.eval_at(x)).collect()).collect()
}

/// Minimum eigenvalue of the symbolic Hessian at every lattice point of
/// `region`, required to be at least `-tol`.
pub fn hessian_psd_test(f: &FunctionExpr, region: &Aabb, per_axis: usize, tol: f64) -> Result<ConvexityCertificate> {
    check_dim(region.dim(), f.validate()?)?;
    if f.contains_max() {
        return Err(Error::NotSmooth);
    }
    let hess = f.hessian()?;
    let points = region.lattice(per_axis);
    let mut worst = None;
    for p in &points {
        let lam = min_eigenvalue(&evaluate_matrix(&hess, p));
        keep_worst(
            &mut worst,
            Witness {
                x1: p.clone(),
                x2: None,
                violation: -lam,
            },
        );
    }
    Ok(ConvexityCertificate::from_worst(
        "hessian_psd",
        points.len(),
        tol,
        format!("lattice {per_axis}^{}", region.dim()),
        worst,
    ))
}

/// Every partial derivative at least `-tol` at every lattice point.
pub fn monotone_nondecreasing_test(
    f: &FunctionExpr,
    region: &Aabb,
    per_axis: usize,
    tol: f64,
) -> Result<ConvexityCertificate> {
    check_dim(region.dim(), f.validate()?)?;
    if f.contains_max() {
        return Err(Error::NotSmooth);
    }
    let grad = f.gradient()?;
    let points = region.lattice(per_axis);
    let mut worst = None;
    for p in &points {
        for g in &grad {
            keep_worst(
                &mut worst,
                Witness {
                    x1: p.clone(),
                    x2: None,
                    violation: -g.eval_at(p),
                },
            );
        }
    }
    Ok(ConvexityCertificate::from_worst(
        "monotone_nondecreasing",
        points.len() * grad.len(),
        tol,
        format!("lattice {per_axis}^{}", region.dim()),
        worst,
    ))
}

/// Checks the hypotheses under which `outer(inner_1, ..., inner_m)` is
/// convex on `body`: each inner function convex on the body, and the
/// outer polynomial convex and nondecreasing in each variable on a box
/// containing the sampled range of the inner functions.
pub fn composition_preconditions(
    outer: &Polynomial,
    inner: &[FunctionExpr],
    body: &ConvexBody,
    per_axis: usize,
    n_pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<ConvexityCertificate>> {
    check_dim(outer.dim(), inner.len())?;
    let mut certs = Vec::with_capacity(inner.len() + 2);
    for h in inner {
        certs.push(midpoint_convexity_test(h, body, n_pairs, tol, seed)?);
    }
    let grid = crate::geometry::make_grid(body, per_axis, seed)?;
    let mut lo = vec![f64::INFINITY; inner.len()];
    let mut hi = vec![f64::NEG_INFINITY; inner.len()];
    for p in &grid.points {
        for (k, h) in inner.iter().enumerate() {
            let v = h.eval_at(p);
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let range = Aabb::new(lo, hi)?;
    let g = FunctionExpr::Poly(outer.clone());
    certs.push(hessian_psd_test(&g, &range, per_axis, tol)?);
    certs.push(monotone_nondecreasing_test(&g, &range, per_axis, tol)?);
    Ok(certs)
}

/// Minimizer of `t -> f(t y)` over the chord of the body along `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineMinimum {
    pub direction: Vec<f64>,
    pub m: f64,
    pub value: f64,
    pub tol: f64,
    pub t_min: f64,
    pub t_max: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search with a fixed iteration count. Among exactly tied
/// candidate values the smallest parameter wins.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, t_min: f64, t_max: f64, tol: f64) -> (f64, f64) {
    let width = t_max - t_min;
    let iters = if width > tol {
        ((width / tol).ln() / (1.0 / INV_PHI).ln()).ceil() as usize
    } else {
        0
    };
    let (mut a, mut b) = (t_min, t_max);
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let mut candidates = [
        (t_min, f(t_min)),
        (a, f(a)),
        (c, fc),
        (d, fd),
        (b, f(b)),
        (t_max, f(t_max)),
    ];
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    candidates.into_iter().fold(
        (f64::NAN, f64::INFINITY),
        |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        },
    )
}

/// Midpoint check of a 1-D restriction on 33 equispaced chord parameters:
/// 16 nested symmetric pairs and 16 adjacent pairs. Returns the largest
/// violation.
fn restriction_violation<F: Fn(f64) -> f64>(f: F, chord: &Chord) -> (f64, f64) {
    let s = chord.samples(33);
    let v: Vec<f64> = s.iter().map(|&t| f(t)).collect();
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut worst = f64::NEG_INFINITY;
    for k in 0..16 {
        worst = worst.max(v[16] - 0.5 * (v[k] + v[32 - k]));
        worst = worst.max(v[2 * k + 1] - 0.5 * (v[2 * k] + v[2 * k + 2]));
    }
    (worst, 1e-9 * (1.0 + scale))
}

/// Golden-section minimization of `t -> f(t y)` on the chord to interval
/// width `tol`, with a post-hoc 1-D convexity check.
pub fn line_minimize(f: &FunctionExpr, body: &ConvexBody, y: &[f64], tol: f64) -> Result<LineMinimum> {
    check_dim(body.dim(), f.validate()?)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let chord = body.chord(y, CHORD_TOL)?;
    let phi = |t: f64| f.eval_at(&chord.point(t));
    let (violation, allowed) = restriction_violation(phi, &chord);
    if violation > allowed {
        return Err(Error::RestrictionNotConvex { violation });
    }
    let (m, value) = golden_section(phi, chord.t_min, chord.t_max, tol);
    Ok(LineMinimum {
        direction: chord.direction,
        m,
        value,
        tol,
        t_min: chord.t_min,
        t_max: chord.t_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcexpr::{AffineFunc, ExpPoly};

    fn interval() -> ConvexBody {
        ConvexBody::boxed(vec![-1.0], vec![1.0]).unwrap()
    }

    fn abs_x() -> FunctionExpr {
        let x = AffineFunc::coordinate(1, 0);
        FunctionExpr::max(vec![x.clone().into(), x.scale(-1.0).into()])
    }

    #[test]
    fn midpoint_examples() {
        let c = midpoint_convexity_test(&abs_x(), &interval(), 200, 1e-12, 1).unwrap();
        assert!(c.passed() && c.witness.is_none());

        let cube: FunctionExpr = Polynomial::univariate(&[0.0, 0.0, 0.0, 1.0]).into();
        let c = midpoint_convexity_test(&cube, &interval(), 200, 1e-9, 1).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        let w = c.witness.unwrap();
        assert!(w.violation > 1e-9);
        // the hand-checked pair (-1, 0): midpoint value -0.125 against average -0.5
        let hand = cube.eval_at(&[-0.5]) - 0.5 * (cube.eval_at(&[-1.0]) + cube.eval_at(&[0.0]));
        assert!((hand - 0.375).abs() < 1e-15);
        assert!(w.violation >= hand);

        let plane: FunctionExpr = AffineFunc::new(vec![1.5, -2.0], 0.3).into();
        let c = midpoint_convexity_test(&plane, &ConvexBody::unit_ball(2), 500, 1e-12, 3).unwrap();
        assert!(c.passed());
    }

    #[test]
    fn hessian_examples() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let sq = Aabb::cube(2, -1.0, 1.0).unwrap();
        let bowl: FunctionExpr = x.powi(2).add(&y.powi(2)).unwrap().into();
        assert!(hessian_psd_test(&bowl, &sq, 5, 1e-12).unwrap().passed());
        let saddle: FunctionExpr = x.powi(2).sub(&y.powi(2)).unwrap().into();
        let c = hessian_psd_test(&saddle, &sq, 5, 1e-12).unwrap();
        assert!((c.witness.unwrap().violation - 2.0).abs() < 1e-12);

        let exy: FunctionExpr = ExpPoly::exponential(vec![1, 1]).into();
        let unit = Aabb::cube(2, 0.0, 1.0).unwrap();
        let c = hessian_psd_test(&exy, &unit, 6, 1e-9).unwrap();
        assert!(c.passed());
        // oracle: eigenvalues of e^{x+y} [[1,1],[1,1]] are 0 and 2 e^{x+y}
        let h = exy.hessian().unwrap();
        let m = evaluate_matrix(&h, &[0.4, 0.2]);
        assert!(min_eigenvalue(&m).abs() < 1e-12);
        assert!(hessian_psd_test(&abs_x(), &Aabb::cube(1, -1.0, 1.0).unwrap(), 3, 0.0).is_err());
    }

    #[test]
    fn monotone_examples() {
        let sum: FunctionExpr = AffineFunc::new(vec![1.0, 1.0], 0.0).into();
        let b = Aabb::cube(2, -3.0, 2.0).unwrap();
        assert!(monotone_nondecreasing_test(&sum, &b, 4, 0.0).unwrap().passed());
        let neg: FunctionExpr = AffineFunc::new(vec![-1.0], 0.0).into();
        let unit = Aabb::cube(1, 0.0, 1.0).unwrap();
        assert!(!monotone_nondecreasing_test(&neg, &unit, 4, 0.0).unwrap().passed());
        let p: FunctionExpr = Polynomial::univariate(&[0.0, 4.0, 1.0]).into();
        let r = Aabb::cube(1, -1.0, 2.0).unwrap();
        assert!(monotone_nondecreasing_test(&p, &r, 31, 0.0).unwrap().passed());
    }

    #[test]
    fn line_minimize_examples() {
        let disk = ConvexBody::unit_ball(2);
        let f = FunctionExpr::squared_distance(&[0.3, 0.0]);
        // a quadratic's minimizer is only resolvable to about sqrt(eps) in floats
        let lm = line_minimize(&f, &disk, &[0.0, 1.0], 1e-10).unwrap();
        assert!(lm.m.abs() < 1e-7);

        let lm = line_minimize(&f, &disk, &[1.0, 0.0], 1e-10).unwrap();
        // dense-grid oracle
        let oracle = (0..=20_000)
            .map(|i| -1.0 + 2.0 * i as f64 / 20_000.0)
            .min_by(|a, b| f.eval_at(&[*a, 0.0]).total_cmp(&f.eval_at(&[*b, 0.0])))
            .unwrap();
        assert!((lm.m - oracle).abs() < 1e-4);
        assert!((lm.m - 0.3).abs() < 1e-7);

        let x: FunctionExpr = AffineFunc::coordinate(1, 0).into();
        let lm = line_minimize(&x, &interval(), &[1.0], 1e-10).unwrap();
        assert!((lm.m + 1.0).abs() <= CHORD_TOL);
        assert_eq!(lm.m, lm.t_min);
    }

    #[test]
    fn line_minimize_rejects_nonconvex_restriction() {
        let cube: FunctionExpr = Polynomial::univariate(&[0.0, 0.0, 0.0, 1.0]).into();
        assert!(matches!(
            line_minimize(&cube, &interval(), &[1.0], 1e-8),
            Err(Error::RestrictionNotConvex { .. })
        ));
    }

    #[test]
    fn flat_bottom_prefers_left() {
        // f = max(|t| - 0.5, 0) is flat on [-0.5, 0.5]
        let plateau = FunctionExpr::max(vec![
            abs_x().add(&FunctionExpr::constant(1, -0.5)).unwrap(),
            FunctionExpr::constant(1, 0.0),
        ]);
        let lm = line_minimize(&plateau, &interval(), &[1.0], 1e-9).unwrap();
        assert_eq!(lm.value, 0.0);
        assert!(lm.m <= -0.5 + 1e-6 && lm.m >= -0.5 - 1e-9, "{}", lm.m);
    }

    #[test]
    fn certificate_json_shape() {
        let c = midpoint_convexity_test(&abs_x(), &interval(), 4, 0.0, 0).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["verdict"], "pass");
        assert!(v.get("witness").is_none());
        assert!(v["samples"].as_u64().unwrap() > 4);
    }
}
