//! Why `d` generators are never enough.
//!
//! Pin a chord `I` through the origin and a point `x' = m y` on it. The
//! functions constant on some chord sub-interval around `x'` form an
//! algebra. Every convex function minimized over `I` at `x'` is a uniform
//! limit of convex members of that algebra, of the form
//! `max(f - 2 eps, s)` with `s` affine, constant along `y`, and pinned to
//! `f(x') - eps`. Convex functions minimized elsewhere on `I` stay a fixed
//! distance away, which gives a computable lower bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::borsuk::{find_common_direction_2d, find_common_direction_heuristic, CommonDirection, LINE_TOL};
use crate::convexity::{line_minimize, midpoint_convexity_test, ConvexityCertificate, Witness};
use crate::error::{check_dim, Error, Result};
use crate::funcexpr::{AffineFunc, FunctionExpr};
use crate::geometry::{make_grid, seeded_rng, Chord, ConvexBody, Grid, CHORD_TOL};
use crate::linalg::{dot, norm, tangent_basis};
use crate::lp::LinearProgram;

/// Relative tolerance for membership of the pinned minimum class.
pub const DELTA_PRIME_TOL: f64 = 1e-7;
/// Extra chord parameters added to the separation constraints.
const CHORD_CONSTRAINTS: usize = 64;
/// Dyadic radii `D 2^-k`, `k = 1..=STENCIL_LEVELS`, of the stencil around `x'`.
const STENCIL_LEVELS: i32 = 10;
const PLATEAU_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinnedChord {
    pub y: Vec<f64>,
    pub chord: Chord,
    pub m: f64,
    pub x_prime: Vec<f64>,
}

impl PinnedChord {
    pub fn new(body: &ConvexBody, y: &[f64], m: f64) -> Result<Self> {
        let chord = body.chord(y, CHORD_TOL)?;
        if !(m >= chord.t_min - CHORD_TOL && m <= chord.t_max + CHORD_TOL) {
            return Err(Error::OutOfRange {
                value: m,
                lo: chord.t_min,
                hi: chord.t_max,
            });
        }
        let m = m.clamp(chord.t_min, chord.t_max);
        Ok(PinnedChord {
            y: chord.direction.clone(),
            x_prime: chord.point(m),
            chord,
            m,
        })
    }

    /// The chord endpoint farther from `m`.
    pub fn far_endpoint(&self) -> f64 {
        if self.m - self.chord.t_min >= self.chord.t_max - self.m {
            self.chord.t_min
        } else {
            self.chord.t_max
        }
    }
}

/// True when the chord minimum of `f` is attained at `x'` up to `tol`.
pub fn delta_prime_check(f: &FunctionExpr, pc: &PinnedChord, body: &ConvexBody, tol: f64) -> Result<bool> {
    let lm = line_minimize(f, body, &pc.y, LINE_TOL)?;
    Ok(lm.value >= f.eval(&pc.x_prime)? - tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub s: AffineFunc,
    /// Grid minimum of `f - s`.
    pub margin: f64,
    /// `|s(x') - (f(x') - eps)|`.
    pub pin_error: f64,
    /// `|a · y|` for the linear part `a` of `s`.
    pub slope_along_chord: f64,
    /// Optimal slack of the linear program.
    pub sigma: f64,
    pub constraints: usize,
    pub pivots: usize,
}

/// Affine minorant `s(x) = a·x + b` of `f` with `a·y = 0` and
/// `s(x') = f(x') - eps`, maximizing the uniform slack below `f` over the
/// grid, the chord samples and `x'`.
pub fn separating_support(
    f: &FunctionExpr,
    body: &ConvexBody,
    pc: &PinnedChord,
    eps: f64,
    grid: &Grid,
) -> Result<SeparationResult> {
    let d = body.dim();
    check_dim(d, f.validate()?)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let fx = f.eval_at(&pc.x_prime);
    if !delta_prime_check(f, pc, body, DELTA_PRIME_TOL * (1.0 + fx.abs()))? {
        return Err(Error::Infeasible(
            "chord minimum is not attained at the pinned point".into(),
        ));
    }

    // variables: a_1..a_d, b, sigma
    let nv = d + 2;
    let mut objective = vec![0.0; nv];
    objective[d + 1] = 1.0;
    let mut lp = LinearProgram::new(nv).maximize(objective).all_free();
    let mut along = pc.y.clone();
    along.extend([0.0, 0.0]);
    lp.add_eq(along, 0.0);
    let mut pin = pc.x_prime.clone();
    pin.extend([1.0, 0.0]);
    lp.add_eq(pin, fx - eps);

    let chord_points = pc
        .chord
        .samples(CHORD_CONSTRAINTS)
        .into_iter()
        .map(|t| pc.chord.point(t));
    let stencil = pinned_stencil(body, pc)?;
    let mut constraints = 2;
    for x in grid
        .points
        .iter()
        .cloned()
        .chain(chord_points)
        .chain(stencil)
        .chain(std::iter::once(pc.x_prime.clone()))
    {
        let mut row = x.clone();
        row.extend([1.0, 1.0]);
        lp.add_le(row, f.eval_at(&x));
        constraints += 1;
    }
    let sol = lp.solve()?;
    let sigma = sol.x[d + 1];
    if !(sigma > 0.0) {
        return Err(Error::Infeasible(format!(
            "no strictly separating minorant (optimal slack {sigma:e})"
        )));
    }
    let s = AffineFunc::new(sol.x[..d].to_vec(), sol.x[d]);
    let margin = grid
        .points
        .iter()
        .map(|x| f.eval_at(x) - s.eval(x))
        .fold(f64::INFINITY, f64::min);
    Ok(SeparationResult {
        pin_error: (s.eval(&pc.x_prime) - (fx - eps)).abs(),
        slope_along_chord: dot(&s.coeffs, &pc.y).abs(),
        s,
        margin,
        sigma,
        constraints,
        pivots: sol.pivots,
    })
}

/// Points `x' +- r v` for `v` orthonormal to `y` and dyadic `r`, projected
/// into the body when they leave it. They tie the slope of the minorant across the chord to the local
/// behaviour of `f`, so it cannot tilt between coarse grid points.
fn pinned_stencil(body: &ConvexBody, pc: &PinnedChord) -> Result<Vec<Vec<f64>>> {
    let bb = body.bounding_box(0.0);
    let diam = bb.intervals().map(|(lo, hi)| (hi - lo).powi(2)).sum::<f64>().sqrt();
    let mut out = Vec::new();
    for v in tangent_basis(&pc.y) {
        for k in 1..=STENCIL_LEVELS {
            let r = diam * 2f64.powi(-k);
            for sign in [-1.0, 1.0] {
                let x: Vec<f64> = pc.x_prime.iter().zip(&v).map(|(p, w)| p + sign * r * w).collect();
                out.push(if body.contains(&x, 0.0)? { x } else { body.project(&x)? });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GEpsReport {
    pub g_eps: FunctionExpr,
    pub eps: f64,
    /// Chord parameters of `{t : f(t y) <= f(x') + eps}`.
    pub plateau: (f64, f64),
    pub plateau_level: f64,
    /// Largest `|g_eps(t y) - plateau_level|` over plateau samples.
    pub plateau_oscillation: f64,
    /// Grid maximum of `f - g_eps`.
    pub max_gap: f64,
    pub certificates: Vec<ConvexityCertificate>,
}

/// Endpoint of the sublevel interval `{t : phi(t) <= level}` between the
/// inside point `inside` and the chord end `edge`.
fn sublevel_edge<F: Fn(f64) -> f64>(phi: &F, level: f64, inside: f64, edge: f64) -> f64 {
    if phi(edge) <= level {
        return edge;
    }
    let (mut a, mut b) = (inside, edge);
    while (b - a).abs() > 1e-13 {
        let mid = 0.5 * (a + b);
        if phi(mid) <= level {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// `g_eps = max(f - 2 eps, s)` with its sandwich, plateau and convexity
/// certificates.
pub fn g_eps_construct(
    f: &FunctionExpr,
    sr: &SeparationResult,
    pc: &PinnedChord,
    eps: f64,
    body: &ConvexBody,
    grid: &Grid,
) -> Result<GEpsReport> {
    let d = body.dim();
    check_dim(d, f.validate()?)?;
    let g = FunctionExpr::max(vec![
        f.add(&FunctionExpr::constant(d, -2.0 * eps))?,
        sr.s.clone().into(),
    ]);

    // sandwich: f - 2 eps <= g <= f - min(2 eps, margin)
    let upper_gap = (2.0 * eps).min(sr.margin);
    let mut worst: Option<Witness> = None;
    let mut max_gap = 0.0f64;
    for x in &grid.points {
        let (fv, gv) = (f.eval_at(x), g.eval_at(x));
        max_gap = max_gap.max(fv - gv);
        let violation = ((fv - 2.0 * eps) - gv).max(gv - (fv - upper_gap));
        if worst.as_ref().is_none_or(|w| violation > w.violation) {
            worst = Some(Witness {
                x1: x.clone(),
                x2: None,
                violation,
            });
        }
    }
    let sandwich = ConvexityCertificate::from_worst(
        "sandwich",
        grid.len(),
        PLATEAU_TOL,
        format!("grid of {} points", grid.len()),
        worst,
    );

    let level = f.eval_at(&pc.x_prime) + eps;
    let phi = |t: f64| f.eval_at(&pc.chord.point(t));
    let lo = sublevel_edge(&phi, level, pc.m, pc.chord.t_min);
    let hi = sublevel_edge(&phi, level, pc.m, pc.chord.t_max);
    let plateau_level = f.eval_at(&pc.x_prime) - eps;
    let samples = 1001;
    let mut oscillation = 0.0f64;
    let mut worst_t = pc.m;
    for i in 0..samples {
        let t = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let dev = (g.eval_at(&pc.chord.point(t)) - plateau_level).abs();
        if dev > oscillation {
            oscillation = dev;
            worst_t = t;
        }
    }
    let interior = hi - lo > 0.0;
    let plateau = ConvexityCertificate::from_worst(
        "plateau",
        samples,
        PLATEAU_TOL,
        format!("{samples} chord samples on [{lo}, {hi}]"),
        Some(Witness {
            x1: vec![worst_t],
            x2: None,
            violation: if interior { oscillation } else { f64::INFINITY },
        }),
    );
    let convex = midpoint_convexity_test(&g, body, 500, PLATEAU_TOL, grid.seed)?;

    for c in [&sandwich, &plateau, &convex] {
        if !c.passed() {
            return Err(Error::CertificateFailed {
                clause: c.check.clone(),
                detail: format!("{:?}", c.witness),
            });
        }
    }
    Ok(GEpsReport {
        g_eps: g,
        eps,
        plateau: (lo, hi),
        plateau_level,
        plateau_oscillation: oscillation,
        max_gap,
        certificates: vec![sandwich, plateau, convex],
    })
}

/// `(w(x') - min_I w) / 2`, clipped at zero: a lower bound on the uniform
/// chord distance from `w` to any function minimized over `I` at `x'`.
pub fn nonapprox_bound(w: &FunctionExpr, pc: &PinnedChord, body: &ConvexBody, tol: f64) -> Result<f64> {
    let lm = line_minimize(w, body, &pc.y, tol)?;
    Ok(((w.eval(&pc.x_prime)? - lm.value) / 2.0).max(0.0))
}

/// `rho^2(x, t_w y)` with `t_w` the far chord endpoint.
pub fn far_witness(pc: &PinnedChord) -> FunctionExpr {
    FunctionExpr::squared_distance(&pc.chord.point(pc.far_endpoint()))
}

/// A random convex function whose chord minimum sits at `x'`:
/// `max(alpha |x - x' - v|^2 + c, beta·x + gamma)` with `v` and `beta`
/// orthogonal to `y`.
pub fn sample_delta_prime_member<R: Rng>(pc: &PinnedChord, rng: &mut R) -> FunctionExpr {
    let d = pc.y.len();
    let perp = |rng: &mut R, scale: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(-scale..=scale)).collect();
        let c = dot(&raw, &pc.y);
        raw.iter().zip(&pc.y).map(|(r, y)| r - c * y).collect()
    };
    let v = perp(rng, 0.5);
    let center: Vec<f64> = pc.x_prime.iter().zip(&v).map(|(a, b)| a + b).collect();
    let alpha = rng.gen_range(0.1..3.0);
    let c = rng.gen_range(-1.0..1.0);
    let bowl = FunctionExpr::squared_distance(&center)
        .scale(alpha)
        .add(&FunctionExpr::constant(d, c))
        .expect("same dimension");
    let beta = perp(rng, 2.0);
    let bowl_at_pin = bowl.eval_at(&pc.x_prime);
    let gamma = bowl_at_pin - dot(&beta, &pc.x_prime) + rng.gen_range(-1.0..0.5);
    FunctionExpr::max(vec![bowl, AffineFunc::new(beta, gamma).into()])
}

/// Uniform distance between two functions on the chord: `samples`
/// equispaced parameters plus the given extra parameters.
pub fn chord_distance(a: &FunctionExpr, b: &FunctionExpr, chord: &Chord, samples: usize, extra: &[f64]) -> f64 {
    chord
        .samples(samples)
        .into_iter()
        .chain(extra.iter().copied())
        .map(|t| {
            let x = chord.point(t);
            (a.eval_at(&x) - b.eval_at(&x)).abs()
        })
        .fold(0.0, f64::max)
}

/// `(t, f(t y), g(t y))` rows along the chord.
pub fn chord_profile(f: &FunctionExpr, g: &FunctionExpr, chord: &Chord, samples: usize) -> Vec<[f64; 3]> {
    chord
        .samples(samples)
        .into_iter()
        .map(|t| {
            let x = chord.point(t);
            [t, f.eval_at(&x), g.eval_at(&x)]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub index: usize,
    pub separation: SeparationResult,
    pub g_eps: GEpsReport,
    /// Grid maximum of `|f_j - g_eps|`, at most `2 eps`.
    pub approx_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub samples: usize,
    /// Smallest sampled chord distance from the witness to a member.
    pub min_distance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1bReport {
    pub direction: CommonDirection,
    pub pinned: PinnedChord,
    pub eps: f64,
    pub tol: f64,
    pub members: Vec<MemberReport>,
    pub witness: FunctionExpr,
    pub witness_t: f64,
    pub bound: f64,
    pub soundness: SoundnessReport,
}

impl Theorem1bReport {
    pub fn all_passed(&self) -> bool {
        self.bound > 0.0
            && self.soundness.passed
            && self
                .members
                .iter()
                .all(|m| m.g_eps.certificates.iter().all(|c| c.passed()))
    }
}

/// Sampling parameters for the demonstration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoOptions {
    pub grid_per_axis: usize,
    pub sphere_grid: usize,
    pub soundness_samples: usize,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            grid_per_axis: 21,
            sphere_grid: 200,
            soundness_samples: 100,
        }
    }
}

/// Common chord minimizer of the given functions, an approximating
/// `g_eps` for each of them in the pinned algebra, and a witness convex
/// function that stays a certified distance away from that algebra.
pub fn theorem1b_demo(
    fs: &[FunctionExpr],
    body: &ConvexBody,
    eps: f64,
    tol: f64,
    seed: u64,
    opts: &DemoOptions,
) -> Result<Theorem1bReport> {
    let d = body.dim();
    check_dim(d, fs.len())?;
    let origin = vec![0.0; d];
    let direction = match d {
        1 => {
            let lm = line_minimize(&fs[0], body, &[1.0], LINE_TOL)?;
            CommonDirection {
                y: vec![1.0],
                m: lm.m,
                residual: 0.0,
                value_gap: 0.0,
                level: 0,
                tol,
                method: "line_minimum".into(),
                trace: vec![],
            }
        }
        2 => find_common_direction_2d(&fs[0], &fs[1], body, tol, &origin)?,
        _ => find_common_direction_heuristic(fs, body, tol, &origin, opts.sphere_grid, seed)?,
    };
    let pinned = PinnedChord::new(body, &direction.y, direction.m)?;
    let grid = make_grid(body, opts.grid_per_axis, seed)?;

    let mut members = Vec::with_capacity(d);
    for (index, f) in fs.iter().enumerate() {
        let separation = separating_support(f, body, &pinned, eps, &grid)?;
        let g_eps = g_eps_construct(f, &separation, &pinned, eps, body, &grid)?;
        let approx_error = f.sub(&g_eps.g_eps)?.sup_norm_on_grid(&grid)?;
        members.push(MemberReport {
            index,
            separation,
            g_eps,
            approx_error,
        });
    }

    let witness_t = pinned.far_endpoint();
    let witness = far_witness(&pinned);
    let bound = nonapprox_bound(&witness, &pinned, body, LINE_TOL)?;

    let mut rng = seeded_rng(seed);
    let mut min_distance = f64::INFINITY;
    for _ in 0..opts.soundness_samples {
        let g = sample_delta_prime_member(&pinned, &mut rng);
        let dist = chord_distance(&witness, &g, &pinned.chord, 257, &[pinned.m, witness_t]);
        min_distance = min_distance.min(dist);
    }
    let soundness = SoundnessReport {
        samples: opts.soundness_samples,
        min_distance,
        passed: opts.soundness_samples == 0 || min_distance >= bound - 1e-9,
    };
    Ok(Theorem1bReport {
        direction,
        pinned,
        eps,
        tol,
        members,
        witness,
        witness_t,
        bound,
        soundness,
    })
}

/// Unit vector helper for callers building chords by hand.
pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}
