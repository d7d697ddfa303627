//! Common chord minimizers of several convex functions.
//!
//! For `d` convex functions on `K` there is a direction `y` and a
//! parameter `m` such that every function restricted to the chord along
//! `y` attains its minimum at `m y`. The gap map
//! `y -> (m(f_i, y) - m(f_d, y))_i` is odd on the sphere, so it vanishes
//! somewhere. The functions are made strictly convex by adding
//! `|x - z|^2 / n` and the zero is tracked as `n` doubles.
//!
//! In two dimensions the gap map is a scalar odd function of the angle and
//! a sign change is bisected exactly. In higher dimensions a sphere grid
//! and local Nelder-Mead search are used; nothing guarantees success.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::convexity::line_minimize;
use crate::error::{check_dim, Error, Result};
use crate::funcexpr::FunctionExpr;
use crate::geometry::{seeded_rng, ConvexBody};
use crate::linalg::{dist, dot, norm, solve, tangent_basis};

/// Regularization levels `1, 2, 4, ..., 1024`.
pub const LEVELS: [u32; 11] = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024];
/// Interval width for every line minimization.
pub const LINE_TOL: f64 = 1e-10;

const SCAN_INTERVALS: usize = 64;
const BISECT_WIDTH: f64 = 1e-12;
/// Best sphere-grid points refined at the first level of the heuristic.
const MULTI_START: usize = 8;

/// Levels of the search: `Some(n)` for the regularized functions, then
/// `None` for the functions themselves.
fn schedule() -> impl Iterator<Item = Option<u32>> {
    LEVELS.iter().copied().map(Some).chain(std::iter::once(None))
}

fn level_functions(fs: &[FunctionExpr], z: &[f64], level: Option<u32>) -> Result<Vec<FunctionExpr>> {
    match level {
        Some(n) => fs.iter().map(|f| regularized(f, z, n)).collect(),
        None => Ok(fs.to_vec()),
    }
}

/// `f + |x - z|^2 / n`.
pub fn regularized(f: &FunctionExpr, z: &[f64], n: u32) -> Result<FunctionExpr> {
    check_dim(f.validate()?, z.len())?;
    if n == 0 {
        return Err(Error::InvalidArgument("regularization level must be positive".into()));
    }
    Ok(FunctionExpr::Sum {
        args: vec![f.clone(), FunctionExpr::squared_distance(z).scale(1.0 / n as f64)],
    })
}

fn minimizers(fs: &[FunctionExpr], body: &ConvexBody, y: &[f64], tol: f64) -> Result<Vec<f64>> {
    fs.iter()
        .map(|f| line_minimize(f, body, y, tol).map(|lm| lm.m))
        .collect()
}

/// `(m(f_i, y) - m(f_d, y))` for `i < d`.
pub fn gap_map(fs: &[FunctionExpr], body: &ConvexBody, y: &[f64], tol: f64) -> Result<Vec<f64>> {
    if fs.len() < 2 {
        return Err(Error::InvalidArgument("need at least two functions".into()));
    }
    let m = minimizers(fs, body, y, tol)?;
    let last = m[m.len() - 1];
    Ok(m[..m.len() - 1].iter().map(|v| v - last).collect())
}

/// One regularization level of the search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    /// Regularization level; 0 marks the unregularized functions.
    pub n: u32,
    pub y: Vec<f64>,
    /// Mean of the regularized minimizers at `y`.
    pub m: f64,
    /// Largest regularized gap component at `y`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonDirection {
    pub y: Vec<f64>,
    /// Mean of the unregularized chord minimizers at `y`.
    pub m: f64,
    /// `max_j |m(f_j, y) - m|` on the unregularized functions.
    pub residual: f64,
    /// `max_j (f_j(m y) - min_t f_j(t y))`.
    pub value_gap: f64,
    /// Regularization level at which `y` stopped moving; 0 when it was
    /// only settled on the unregularized functions.
    pub level: u32,
    pub tol: f64,
    pub method: String,
    pub trace: Vec<LevelTrace>,
}

fn direction_distance(a: &[f64], b: &[f64]) -> f64 {
    // y and -y describe the same chord
    let minus: Vec<f64> = b.iter().map(|v| -v).collect();
    dist(a, b).min(dist(a, &minus))
}

fn finish(
    fs: &[FunctionExpr],
    body: &ConvexBody,
    y: Vec<f64>,
    level: u32,
    tol: f64,
    method: &str,
    trace: Vec<LevelTrace>,
) -> Result<CommonDirection> {
    let mut ms = Vec::with_capacity(fs.len());
    let mut mins = Vec::with_capacity(fs.len());
    for f in fs {
        let lm = line_minimize(f, body, &y, LINE_TOL)?;
        ms.push(lm.m);
        mins.push(lm.value);
    }
    let m = ms.iter().sum::<f64>() / ms.len() as f64;
    let residual = ms.iter().map(|v| (v - m).abs()).fold(0.0, f64::max);
    let point: Vec<f64> = y.iter().map(|v| m * v).collect();
    let value_gap = fs
        .iter()
        .zip(&mins)
        .map(|(f, lo)| (f.eval_at(&point) - lo).max(0.0))
        .fold(0.0, f64::max);
    Ok(CommonDirection {
        y,
        m,
        residual,
        value_gap,
        level,
        tol,
        method: method.to_string(),
        trace,
    })
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Exact search for two functions in the plane: bisection of a sign change
/// of the scalar gap in the angle, tracked over the regularization levels
/// and finally on the functions themselves. Succeeds once the direction
/// settles with the unregularized residual or value gap within `tol`.
pub fn find_common_direction_2d(
    f1: &FunctionExpr,
    f2: &FunctionExpr,
    body: &ConvexBody,
    tol: f64,
    z: &[f64],
) -> Result<CommonDirection> {
    check_dim(2, body.dim())?;
    check_dim(2, f1.validate()?)?;
    check_dim(2, f2.validate()?)?;
    check_dim(2, z.len())?;
    let dir = |theta: f64| vec![theta.cos(), theta.sin()];
    let mut trace: Vec<LevelTrace> = Vec::new();
    let mut prev_theta: Option<f64> = None;
    let originals = [f1.clone(), f2.clone()];

    for level in schedule() {
        let fs = level_functions(&originals, z, level)?;
        let s = |theta: f64| -> Result<f64> { Ok(gap_map(&fs, body, &dir(theta), LINE_TOL)?[0]) };

        let thetas: Vec<f64> = (0..=SCAN_INTERVALS)
            .map(|i| PI * i as f64 / SCAN_INTERVALS as f64)
            .collect();
        let values = thetas.iter().map(|&t| s(t)).collect::<Result<Vec<f64>>>()?;

        // candidate roots: samples already within tol, then sign changes
        let mut roots: Vec<f64> = thetas
            .iter()
            .zip(&values)
            .filter(|(_, v)| v.abs() <= tol)
            .map(|(t, _)| *t)
            .collect();
        let brackets: Vec<(f64, f64, f64)> = (0..SCAN_INTERVALS)
            .filter(|&i| values[i].abs() > tol && values[i + 1].abs() > tol)
            .filter(|&i| values[i].signum() != values[i + 1].signum())
            .map(|i| (thetas[i], thetas[i + 1], values[i]))
            .collect();
        let anchor = prev_theta.unwrap_or(0.0);
        if let Some(&(lo, hi, v_lo)) = brackets.iter().min_by(|a, b| {
            angle_distance(0.5 * (a.0 + a.1), anchor).total_cmp(&angle_distance(0.5 * (b.0 + b.1), anchor))
        }) {
            if roots.is_empty() || prev_theta.is_some() {
                roots.push(bisect(&s, lo, hi, v_lo)?);
            }
        }
        let theta = match prev_theta {
            None => roots.first().copied(),
            Some(p) => roots
                .iter()
                .copied()
                .min_by(|a, b| angle_distance(*a, p).total_cmp(&angle_distance(*b, p))),
        }
        .ok_or(Error::NoSignChangeFound)?;

        let y = dir(theta);
        let ms = minimizers(&fs, body, &y, LINE_TOL)?;
        trace.push(LevelTrace {
            n: level.unwrap_or(0),
            y: y.clone(),
            m: 0.5 * (ms[0] + ms[1]),
            gap: (ms[0] - ms[1]).abs(),
        });
        let settled = prev_theta.is_some_and(|p| direction_distance(&dir(p), &y) <= tol);
        if settled || level.is_none() {
            let cd = finish(
                &originals,
                body,
                y,
                level.unwrap_or(0),
                tol,
                "angle_bisection",
                trace.clone(),
            )?;
            // flat chord minima make the argmin spread meaningless; the
            // value gap still certifies a common minimizer
            if cd.residual <= tol || cd.value_gap <= tol {
                return Ok(cd);
            }
            if level.is_none() {
                return Err(Error::NotConverged { residual: cd.residual });
            }
        }
        prev_theta = Some(theta);
    }
    unreachable!("the schedule ends with the unregularized level")
}

fn bisect<F: Fn(f64) -> Result<f64>>(s: &F, mut lo: f64, mut hi: f64, mut v_lo: f64) -> Result<f64> {
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let v = s(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == v_lo.signum() {
            lo = mid;
            v_lo = v;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Deterministic near-uniform directions: Fibonacci lattice on the
/// 2-sphere, an angle grid on the circle, seeded Gaussian directions
/// otherwise.
pub fn sphere_grid(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match d {
        2 => (0..count)
            .map(|i| {
                let t = PI * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let zc = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - zc * zc).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), zc]
                })
                .collect()
        }
        _ => {
            let mut rng = seeded_rng(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let n = norm(&v);
                    v.iter().map(|x| x / n).collect()
                })
                .collect()
        }
    }
}

fn chart(y0: &[f64], basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut y = y0.to_vec();
    for (b, &c) in basis.iter().zip(v) {
        y.iter_mut().zip(b).for_each(|(a, bb)| *a += c * bb);
    }
    let n = norm(&y);
    y.iter().map(|x| x / n).collect()
}

/// Plain Nelder-Mead on `R^k`.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], step: f64, iters: usize) -> Vec<f64> {
    let k = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = (0..=k)
        .map(|i| {
            let mut p = start.to_vec();
            if i > 0 {
                p[i - 1] += step;
            }
            let v = f(&p);
            (p, v)
        })
        .collect();
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[k].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(p, _)| dist(p, &simplex[0].0))
            .fold(0.0, f64::max);
        if size < 1e-13 || (spread <= 1e-30 && size < 1e-8) {
            break;
        }
        let centroid: Vec<f64> = (0..k)
            .map(|j| simplex[..k].iter().map(|(p, _)| p[j]).sum::<f64>() / k as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[k].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let r = along(1.0);
        let fr = f(&r);
        if fr < simplex[0].1 {
            let e = along(2.0);
            let fe = f(&e);
            simplex[k] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < simplex[k - 1].1 {
            simplex[k] = (r, fr);
        } else {
            let c = if fr < simplex[k].1 { along(0.5) } else { along(-0.5) };
            let fc = f(&c);
            if fc < simplex[k].1.min(fr) {
                simplex[k] = (c, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    p.iter_mut().zip(&best).for_each(|(a, b)| *a = b + 0.5 * (*a - b));
                    *v = f(p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0).0
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Newton steps on the gap map in a tangent chart, with a forward-difference
/// Jacobian; stops when a step no longer reduces the gap.
fn newton(gap: &dyn Fn(&[f64]) -> Result<Vec<f64>>, mut v: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let mut g = gap(&v)?;
    for _ in 0..20 {
        if max_abs(&g) < 1e-13 {
            break;
        }
        let h = 1e-6;
        let mut jac = vec![vec![0.0; v.len()]; g.len()];
        for j in 0..v.len() {
            let mut w = v.clone();
            w[j] += h;
            let gj = gap(&w)?;
            for i in 0..g.len() {
                jac[i][j] = (gj[i] - g[i]) / h;
            }
        }
        let Some(dv) = solve(jac, g.iter().map(|x| -x).collect()) else {
            break;
        };
        // backtracking on the full Newton step
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let cand: Vec<f64> = v.iter().zip(&dv).map(|(a, b)| a + scale * b).collect();
            let gc = gap(&cand)?;
            if max_abs(&gc) < max_abs(&g) {
                v = cand;
                g = gc;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((v, max_abs(&g)))
}

/// Local refinement of a zero of the gap map near `y0`. A warm start
/// from the previous level tries Newton alone first; otherwise, or if
/// that stalls, Nelder-Mead on the squared gap precedes Newton.
fn refine(fs: &[FunctionExpr], body: &ConvexBody, y0: &[f64], warm: bool) -> Result<Vec<f64>> {
    let basis = tangent_basis(y0);
    let gap = |v: &[f64]| gap_map(fs, body, &chart(y0, &basis, v), LINE_TOL);
    let origin = vec![0.0; basis.len()];
    if warm {
        let (v, g) = newton(&gap, origin.clone())?;
        if g < 1e-10 {
            return Ok(chart(y0, &basis, &v));
        }
    }
    let objective = |v: &[f64]| gap(v).map(|g| dot(&g, &g)).unwrap_or(f64::INFINITY);
    let step = if warm { 0.02 } else { 0.2 };
    let v = nelder_mead(objective, &origin, step, 400);
    let (v, _) = newton(&gap, v)?;
    Ok(chart(y0, &basis, &v))
}

/// Heuristic search for `d >= 2` functions: best point of a sphere grid,
/// then local refinement at every regularization level. Fails with
/// `NotConverged` unless the final unregularized residual is within `tol`.
pub fn find_common_direction_heuristic(
    fs: &[FunctionExpr],
    body: &ConvexBody,
    tol: f64,
    z: &[f64],
    grid_size: usize,
    seed: u64,
) -> Result<CommonDirection> {
    let d = body.dim();
    check_dim(d, fs.len())?;
    check_dim(d, z.len())?;
    for f in fs {
        check_dim(d, f.validate()?)?;
    }
    if d < 2 {
        return Err(Error::InvalidArgument("need at least two dimensions".into()));
    }
    let mut trace: Vec<LevelTrace> = Vec::new();
    let mut y: Option<Vec<f64>> = None;
    for level in schedule() {
        let reg = level_functions(fs, z, level)?;
        let start = match &y {
            Some(prev) => prev.clone(),
            None => {
                let mut scored = Vec::new();
                for cand in sphere_grid(d, grid_size.max(1), seed) {
                    scored.push((max_abs(&gap_map(&reg, body, &cand, LINE_TOL)?), cand));
                }
                // stable sort: ties keep the earlier grid point
                scored.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut best: Option<(f64, Vec<f64>)> = None;
                for (score, cand) in scored.into_iter().take(MULTI_START) {
                    let refined = if score <= 1e-13 {
                        cand
                    } else {
                        refine(&reg, body, &cand, false)?
                    };
                    let g = max_abs(&gap_map(&reg, body, &refined, LINE_TOL)?);
                    if best.as_ref().is_none_or(|(s, _)| g < *s) {
                        best = Some((g, refined));
                    }
                }
                best.expect("nonempty grid").1
            }
        };
        let gap0 = max_abs(&gap_map(&reg, body, &start, LINE_TOL)?);
        let next = if gap0 <= 1e-13 || y.is_none() {
            start
        } else {
            refine(&reg, body, &start, true)?
        };
        let ms = minimizers(&reg, body, &next, LINE_TOL)?;
        let mean = ms.iter().sum::<f64>() / ms.len() as f64;
        trace.push(LevelTrace {
            n: level.unwrap_or(0),
            y: next.clone(),
            m: mean,
            gap: max_abs(&gap_map(&reg, body, &next, LINE_TOL)?),
        });
        let settled = y.as_ref().is_some_and(|prev| direction_distance(prev, &next) <= tol);
        y = Some(next.clone());
        if settled || level.is_none() {
            let cd = finish(
                fs,
                body,
                next,
                level.unwrap_or(0),
                tol,
                "sphere_grid_nelder_mead",
                trace.clone(),
            )?;
            if cd.residual <= tol {
                return Ok(cd);
            }
            if level.is_none() {
                return Err(Error::NotConverged { residual: cd.residual });
            }
        }
    }
    unreachable!("the schedule ends with the unregularized level")
}
