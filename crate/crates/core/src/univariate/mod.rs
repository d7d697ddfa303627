//! One-variable constructions: convex approximation in the algebra
//! generated by a strictly increasing `C^2` function, Bernstein
//! polynomials, and convex exponential-polynomial generators.

pub mod chebyshev;

use serde::{Deserialize, Serialize};

use crate::convexity::{midpoint_convexity_test, ConvexityCertificate, Witness};
use crate::error::{check_dim, Error, Result};
use crate::funcexpr::{ExpPoly, FunctionExpr, Polynomial};
use crate::geometry::{make_grid, Aabb, ConvexBody};
use crate::sgcore::{assemble_with, continuity_delta, shift_functional, AssemblyReport, SgOptions};
use chebyshev::ChebSeries;

/// Points of the certification lattice on `[a, b]`.
pub const CERT_LATTICE: usize = 512;
/// Largest interpolation degree tried.
pub const DEGREE_CAP: usize = 256;
/// Largest coordinate magnitude accepted by the exponential pipelines.
pub const MAX_BOX: f64 = 4.0;

fn lattice(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

/// A strictly increasing smooth generator `h` on `[a, b]` with its first
/// two symbolic derivatives and a lattice-certified lower bound on `h'`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneGenerator {
    pub h: FunctionExpr,
    pub a: f64,
    pub b: f64,
    pub h_a: f64,
    pub h_b: f64,
    pub h_prime_min: f64,
    pub h_prime_max: f64,
    #[serde(skip)]
    dh: FunctionExpr,
    #[serde(skip)]
    d2h: FunctionExpr,
}

impl MonotoneGenerator {
    pub fn new(h: FunctionExpr, a: f64, b: f64) -> Result<Self> {
        check_dim(1, h.validate()?)?;
        if h.contains_max() {
            return Err(Error::NotSmooth);
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
        }
        let dh = h.partial_derivative(0)?;
        let d2h = dh.partial_derivative(0)?;
        let (lo, hi) = lattice(a, b, CERT_LATTICE)
            .map(|x| dh.eval_at(&[x]))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), v| (l.min(v), u.max(v)));
        if !(lo > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "generator derivative not positive on [{a}, {b}] (min {lo:e})"
            )));
        }
        Ok(MonotoneGenerator {
            h_a: h.eval_at(&[a]),
            h_b: h.eval_at(&[b]),
            h,
            a,
            b,
            h_prime_min: lo,
            h_prime_max: hi,
            dh,
            d2h,
        })
    }

    /// `e^x` on `[a, b]`.
    pub fn exp(a: f64, b: f64) -> Result<Self> {
        Self::new(ExpPoly::exponential(vec![1]).into(), a, b)
    }

    pub fn identity(a: f64, b: f64) -> Result<Self> {
        Self::new(Polynomial::variable(1, 0).into(), a, b)
    }

    /// `(h, h', h'')` at `x`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        let p = [x];
        (self.h.eval_at(&p), self.dh.eval_at(&p), self.d2h.eval_at(&p))
    }

    /// Ratio of the largest to the smallest sampled slope.
    pub fn condition(&self) -> f64 {
        self.h_prime_max / self.h_prime_min
    }

    fn center_radius(&self) -> (f64, f64) {
        (0.5 * (self.h_a + self.h_b), 0.5 * (self.h_b - self.h_a))
    }

    /// `(h - c) / r`, mapping `[h(a), h(b)]` onto `[-1, 1]`. Lies in every
    /// algebra with unity containing `h`.
    pub fn normalized(&self) -> FunctionExpr {
        let (c, r) = self.center_radius();
        self.h
            .add(&FunctionExpr::constant(1, -c))
            .expect("one-variable expressions")
            .scale(1.0 / r)
    }
}

/// `p + delta x^2 / 2`.
pub fn regularize(p: &Polynomial, delta: f64) -> Result<Polynomial> {
    check_dim(1, p.dim())?;
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    p.add(&Polynomial::univariate(&[0.0, 0.0, 0.5 * delta]))
}

/// `h^{-1}(u)` by bisection to width `tol` followed by Newton polishing.
pub fn inverse_eval(gen: &MonotoneGenerator, u: f64, tol: f64) -> Result<f64> {
    let slack = 1e-12 * (1.0 + gen.h_a.abs().max(gen.h_b.abs()));
    if !(u >= gen.h_a - slack && u <= gen.h_b + slack) {
        return Err(Error::OutOfRange {
            value: u,
            lo: gen.h_a,
            hi: gen.h_b,
        });
    }
    let h = |x: f64| gen.h.eval_at(&[x]);
    let (mut lo, mut hi) = (gen.a, gen.b);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if h(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let (hx, dhx, _) = gen.jet(x);
        let next = x - (hx - u) / dhx;
        if !(next >= lo && next <= hi) || (h(next) - u).abs() >= (hx - u).abs() {
            break;
        }
        x = next;
    }
    Ok(x)
}

const INVERSE_TOL: f64 = 1e-14;

/// `(q, q', q'')` at `u` for `q = p_delta o h^{-1}`, from the inverse
/// function rule.
pub fn q_derivatives(p_delta: &Polynomial, gen: &MonotoneGenerator, u: f64) -> Result<(f64, f64, f64)> {
    check_dim(1, p_delta.dim())?;
    let x = inverse_eval(gen, u, INVERSE_TOL)?;
    let (_, h1, h2) = gen.jet(x);
    let p0 = p_delta.eval(&[x]);
    let p1 = p_delta.derivative(0).eval(&[x]);
    let p2 = p_delta.derivative(0).derivative(0).eval(&[x]);
    Ok((p0, p1 / h1, p2 / (h1 * h1) - p1 * h2 / (h1 * h1 * h1)))
}

/// One step of the degree scan, measured on the Chebyshev form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop3Attempt {
    pub degree: usize,
    /// Lattice sup of `|p_n(h) - p_delta|` on `[a, b]`.
    pub value_error: f64,
    /// Lattice sup of `|(p_n o h)'' - p_delta''|` on `[a, b]`.
    pub curvature_error: f64,
    /// Lattice sups of `|p_n^(j) - q^(j)|` on `[h(a), h(b)]`, `j = 0, 1, 2`.
    pub q_errors: [f64; 3],
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop3Report {
    pub eps: f64,
    pub delta: f64,
    /// Degree of the emitted polynomial: the lowest truncation of the
    /// accepted interpolant that still meets both thresholds.
    pub degree: usize,
    /// First interpolation degree of the doubling scan that was accepted.
    pub scan_degree: usize,
    pub generator: MonotoneGenerator,
    /// Center `c` and radius `r` of `[h(a), h(b)]`; the output is a
    /// polynomial in `(h - c) / r`.
    pub center: f64,
    pub radius: f64,
    pub chebyshev_coeffs: Vec<f64>,
    pub monomial_coeffs: Vec<f64>,
    pub output: FunctionExpr,
    /// Lattice sup of `|output - p|` on `[a, b]`.
    pub error_estimate: f64,
    pub second_derivative_min: f64,
    pub lattice_points: usize,
    pub attempts: Vec<Prop3Attempt>,
    pub certificates: Vec<ConvexityCertificate>,
}

/// Lattice data shared by every degree: `x`, the jet of `h`, `p_delta(x)`
/// and `p_delta''(x)`.
struct LatticePoint {
    x: f64,
    h: (f64, f64, f64),
    value: f64,
    curvature: f64,
}

/// Values and chain-rule second derivatives of `P((h - c) / r)`, with `P`
/// given through its jet in `z`.
fn composed_jets<F: Fn(f64) -> (f64, f64, f64)>(poly: F, pts: &[LatticePoint], c: f64, r: f64) -> Vec<(f64, f64)> {
    pts.iter()
        .map(|pt| {
            let (h0, h1, h2) = pt.h;
            let (v, d1, d2) = poly((h0 - c) / r);
            let (t1, t2) = (h1 / r, h2 / r);
            (v, d2 * t1 * t1 + d1 * t2)
        })
        .collect()
}

fn cheb_jet(s: &ChebSeries) -> impl Fn(f64) -> (f64, f64, f64) {
    let s1 = s.derivative();
    let s2 = s1.derivative();
    let s = s.clone();
    move |z| (s.eval(z), s1.eval(z), s2.eval(z))
}

fn mono_jet(p: &Polynomial) -> impl Fn(f64) -> (f64, f64, f64) {
    let p1 = p.derivative(0);
    let p2 = p1.derivative(0);
    let p = p.clone();
    move |z| (p.eval(&[z]), p1.eval(&[z]), p2.eval(&[z]))
}

/// `(value_error, curvature_error)` against `p_delta`.
fn jet_errors(jets: &[(f64, f64)], pts: &[LatticePoint]) -> (f64, f64) {
    jets.iter().zip(pts).fold((0.0f64, 0.0f64), |(ve, ce), (&(v, k), pt)| {
        (ve.max((v - pt.value).abs()), ce.max((k - pt.curvature).abs()))
    })
}

/// Convex approximation of a convex polynomial by `P o h`: regularize,
/// interpolate `p_delta o h^{-1}` at Chebyshev nodes of doubling degree and
/// accept the first degree whose composed second derivative stays within
/// `0.9 delta` of `p_delta''` and whose values stay within `eps / 2`. The
/// accepted interpolant is then truncated to the lowest degree that still
/// meets both thresholds, rechecked on the emitted monomial form.
pub fn prop3_pipeline(p: &Polynomial, gen: &MonotoneGenerator, eps: f64) -> Result<Prop3Report> {
    check_dim(1, p.dim())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let interval = ConvexBody::boxed(vec![gen.a], vec![gen.b])?;
    let input = midpoint_convexity_test(&p.clone().into(), &interval, 200, 1e-9, 0)?;
    if !input.passed() {
        return Err(Error::InputNotConvex(format!("{:?}", input.witness)));
    }

    let delta = eps / (1.0 + gen.a.powi(2).max(gen.b.powi(2)));
    let p_delta = regularize(p, delta)?;
    let pd2 = p_delta.derivative(0).derivative(0);
    let (c, r) = gen.center_radius();
    let pts: Vec<LatticePoint> = lattice(gen.a, gen.b, CERT_LATTICE)
        .map(|x| LatticePoint {
            x,
            h: gen.jet(x),
            value: p_delta.eval(&[x]),
            curvature: pd2.eval(&[x]),
        })
        .collect();
    let accept = |(value_error, curvature_error): (f64, f64)| curvature_error < 0.9 * delta && value_error < 0.5 * eps;

    // q on the lattice image, used for the convergence surrogate
    let q_lattice: Vec<(f64, (f64, f64, f64))> = pts
        .iter()
        .map(|pt| Ok((pt.h.0, q_derivatives(&p_delta, gen, pt.h.0)?)))
        .collect::<Result<_>>()?;
    let node_fn = |z: f64| -> Result<f64> { Ok(q_derivatives(&p_delta, gen, c + r * z)?.0) };

    let mut attempts = Vec::new();
    let mut n = 8;
    while n <= DEGREE_CAP {
        let values = chebyshev::nodes(n)
            .into_iter()
            .map(node_fn)
            .collect::<Result<Vec<f64>>>()?;
        let series = ChebSeries::from_node_values(&values);
        let s1 = series.derivative();
        let s2 = s1.derivative();
        let mut q_errors = [0.0f64; 3];
        for (u, (q0, q1, q2)) in &q_lattice {
            let z = (u - c) / r;
            q_errors[0] = q_errors[0].max((series.eval(z) - q0).abs());
            q_errors[1] = q_errors[1].max((s1.eval(z) / r - q1).abs());
            q_errors[2] = q_errors[2].max((s2.eval(z) / (r * r) - q2).abs());
        }
        let (value_error, curvature_error) = jet_errors(&composed_jets(cheb_jet(&series), &pts, c, r), &pts);
        let accepted = accept((value_error, curvature_error));
        attempts.push(Prop3Attempt {
            degree: n,
            value_error,
            curvature_error,
            q_errors,
            accepted,
        });
        if accepted {
            for m in 1..=n {
                let truncated = ChebSeries {
                    coeffs: series.coeffs[..=m].to_vec(),
                };
                if !accept(jet_errors(&composed_jets(cheb_jet(&truncated), &pts, c, r), &pts)) {
                    continue;
                }
                let monomial_coeffs = truncated.to_monomial();
                let mono = Polynomial::univariate(&monomial_coeffs);
                let jets = composed_jets(mono_jet(&mono), &pts, c, r);
                if !accept(jet_errors(&jets, &pts)) {
                    continue;
                }
                return Ok(finish_prop3(
                    p,
                    gen,
                    eps,
                    delta,
                    m,
                    n,
                    truncated,
                    monomial_coeffs,
                    mono,
                    &jets,
                    &pts,
                    attempts,
                    input,
                ));
            }
            // higher degrees only worsen the monomial conversion
            return Err(Error::NumericallyDegenerate(format!(
                "degree-{n} interpolant meets both thresholds, but no truncation of it does in the monomial basis"
            )));
        }
        n *= 2;
    }
    let best_value_error = attempts.iter().map(|a| a.value_error).fold(f64::INFINITY, f64::min);
    let best_curvature_error = attempts.iter().map(|a| a.curvature_error).fold(f64::INFINITY, f64::min);
    Err(Error::DegreeCapExceeded {
        cap: DEGREE_CAP,
        best_value_error,
        best_curvature_error,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish_prop3(
    p: &Polynomial,
    gen: &MonotoneGenerator,
    eps: f64,
    delta: f64,
    degree: usize,
    scan_degree: usize,
    series: ChebSeries,
    monomial_coeffs: Vec<f64>,
    mono: Polynomial,
    jets: &[(f64, f64)],
    pts: &[LatticePoint],
    attempts: Vec<Prop3Attempt>,
    input: ConvexityCertificate,
) -> Prop3Report {
    let (c, r) = gen.center_radius();
    let output = FunctionExpr::compose(mono, vec![gen.normalized()]);
    let error_estimate = jets
        .iter()
        .zip(pts)
        .map(|(&(v, _), pt)| (v - p.eval(&[pt.x])).abs())
        .fold(0.0, f64::max);
    let (x_min, second_derivative_min) = jets
        .iter()
        .zip(pts)
        .map(|(&(_, k), pt)| (pt.x, k))
        .fold((f64::NAN, f64::INFINITY), |m, v| if v.1 < m.1 { v } else { m });
    let curvature = ConvexityCertificate::from_worst(
        "second_derivative_lower_bound",
        jets.len(),
        0.0,
        format!("lattice of {CERT_LATTICE} points, required >= 0.1 delta"),
        Some(Witness {
            x1: vec![x_min],
            x2: None,
            violation: 0.1 * delta - second_derivative_min,
        }),
    );
    let accuracy = ConvexityCertificate::from_worst(
        "value_error",
        jets.len(),
        0.0,
        format!("lattice of {CERT_LATTICE} points, required <= eps"),
        Some(Witness {
            x1: vec![],
            x2: None,
            violation: error_estimate - eps,
        }),
    );
    Prop3Report {
        eps,
        delta,
        degree,
        scan_degree,
        generator: gen.clone(),
        center: c,
        radius: r,
        chebyshev_coeffs: series.coeffs,
        monomial_coeffs,
        output,
        error_estimate,
        second_derivative_min,
        lattice_points: CERT_LATTICE,
        attempts,
        certificates: vec![input, curvature, accuracy],
    }
}

/// Bernstein polynomial on `[a, b]` of the samples `f(a + k (b - a) / n)`,
/// `k = 0..=n`, in the monomial basis of `x`. That basis is badly
/// conditioned on short intervals far from the origin: the coefficients
/// grow like `(max(|a|, |b|) / (b - a))^n`.
pub fn bernstein_1d(samples: &[f64], a: f64, b: f64) -> Result<Polynomial> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let n = samples.len() - 1;
    // B_n(s) = sum_j C(n, j) (forward difference^j f)_0 s^j
    let mut diffs = samples.to_vec();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    for j in 0..=n {
        coeffs.push(binom * diffs[0]);
        for i in 0..diffs.len() - 1 {
            diffs[i] = diffs[i + 1] - diffs[i];
        }
        diffs.pop();
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    let in_s = Polynomial::univariate(&coeffs);
    let s_of_x = Polynomial::univariate(&[-a / (b - a), 1.0 / (b - a)]);
    in_s.compose(&[s_of_x])
}

/// Expanded exponential polynomial approximating `sign * t` on `[a, b]`,
/// rechecked after expansion: the expanded coefficients can be large
/// enough for rounding to matter.
fn exp_coordinate(a: f64, b: f64, sign: f64, eps: f64) -> Result<ExpPoly> {
    let gen = MonotoneGenerator::exp(a, b)?;
    let p = Polynomial::univariate(&[0.0, sign]);
    let report = prop3_pipeline(&p, &gen, eps)?;
    let e = report
        .output
        .to_exp_poly()
        .expect("polynomial of an exponential polynomial");
    let e2 = e.derivative(0).derivative(0);
    for x in lattice(a, b, CERT_LATTICE) {
        let err = (e.eval(&[x]) - sign * x).abs();
        let curvature = e2.eval(&[x]);
        if !(err <= eps && curvature >= 0.0) {
            return Err(Error::NumericallyDegenerate(format!(
                "expanded degree-{} output on [{a}, {b}] has error {err:e} and second derivative {curvature:e} at {x}",
                report.degree
            )));
        }
    }
    Ok(e)
}

/// Convex exponential polynomials approximating the generators
/// `x_1, ..., x_d, -(x_1 + ... + x_d)` to within `eps` on `[-n, n]^d`.
pub fn exp_sg_approx(d: usize, n: f64, eps: f64) -> Result<Vec<ExpPoly>> {
    if !(n > 0.0) {
        return Err(Error::InvalidArgument("box half-width must be positive".into()));
    }
    exp_sg_approx_on_box(&Aabb::cube(d, -n, n)?, eps)
}

/// As `exp_sg_approx`, with a separate interval per axis. Narrow
/// intervals keep the expanded coefficients small.
pub fn exp_sg_approx_on_box(region: &Aabb, eps: f64) -> Result<Vec<ExpPoly>> {
    let d = region.dim();
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    for (lo, hi) in region.intervals() {
        let m = lo.abs().max(hi.abs());
        if m > MAX_BOX {
            return Err(Error::OutOfRange {
                value: m,
                lo: 0.0,
                hi: MAX_BOX,
            });
        }
    }
    let intervals: Vec<(f64, f64)> = region.intervals().collect();
    let mut out = Vec::with_capacity(d + 1);
    for (j, &(lo, hi)) in intervals.iter().enumerate() {
        out.push(exp_coordinate(lo, hi, 1.0, eps)?.lift_to_axis(d, j)?);
    }
    let mut last = ExpPoly::zero(d);
    for (k, &(lo, hi)) in intervals.iter().enumerate() {
        last = last.add(&exp_coordinate(lo, hi, -1.0, eps / d as f64)?.lift_to_axis(d, k)?)?;
    }
    out.push(last);
    Ok(out)
}

/// Convex exponential-polynomial approximation of a convex polynomial on
/// `K`: exponential generators accurate to `min(delta / sqrt(d), eps)`
/// assembled around the shifted polynomial, then expanded to a single
/// exponential polynomial and re-certified.
pub fn convex_exp_approx(p: &Polynomial, body: &ConvexBody, eps: f64) -> Result<AssemblyReport> {
    convex_exp_approx_with(p, body, eps, &SgOptions::default())
}

pub fn convex_exp_approx_with(p: &Polynomial, body: &ConvexBody, eps: f64, opts: &SgOptions) -> Result<AssemblyReport> {
    let d = body.dim();
    check_dim(d, p.dim())?;
    let region = body.bounding_box(0.0);
    let shift = shift_functional(p, body, opts.per_axis)?;
    let g = p.add(&Polynomial::from_affine(&shift))?;
    let delta = continuity_delta(&g, body, eps, opts.per_axis)?;
    let accuracy = (delta / (d as f64).sqrt()).min(eps);
    let generators: Vec<FunctionExpr> = exp_sg_approx_on_box(&region, accuracy)?
        .into_iter()
        .map(Into::into)
        .collect();
    let grid = make_grid(body, opts.per_axis, opts.seed)?;
    let mut report = assemble_with(p, &generators, body, eps, &grid, opts)?;

    let expanded = report
        .approximant
        .to_exp_poly()
        .ok_or_else(|| Error::NumericallyDegenerate("approximant left the exponential algebra".into()))?;
    report.approximant = FunctionExpr::Exp(expanded);
    let recheck = midpoint_convexity_test(&report.approximant, body, opts.n_pairs, opts.tol, opts.seed)?;
    report.certificates.push(ConvexityCertificate {
        check: "midpoint_convexity_expanded".into(),
        ..recheck
    });
    report.error_estimate = report.approximant.sub(&p.clone().into())?.sup_norm_on_grid(&grid)?;
    Ok(report)
}
