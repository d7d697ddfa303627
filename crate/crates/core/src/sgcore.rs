//! Shape-generating sets for convex functions and assembly of convex
//! approximants from approximate generators.
//!
//! Given a convex polynomial `p` on `K`, the shift `l` makes `g = p + l`
//! nondecreasing in each variable on the 1-fattening `K*`. If convex
//! `h_j` are uniformly close to the coordinate functionals, then
//! `g(h_1, ..., h_d)` is convex and close to `g`, and adding a nonnegative
//! combination of the generators approximating `-l` recovers `p`.

use serde::{Deserialize, Serialize};

use crate::convexity::{midpoint_convexity_test, monotone_nondecreasing_test, ConvexityCertificate, Witness};
use crate::error::{check_dim, Error, Result};
use crate::funcexpr::{AffineFunc, FunctionExpr, Polynomial};
use crate::geometry::{ConvexBody, Grid};
use crate::linalg::norm;

/// Safety factor applied to grid sups standing in for sup-norms over `K*`.
pub const SUP_INFLATION: f64 = 1.05;

/// The `d + 1` affine generators `x_1, ..., x_d, -(x_1 + ... + x_d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SGSet {
    pub generators: Vec<AffineFunc>,
}

impl SGSet {
    pub fn dim(&self) -> usize {
        self.generators.len() - 1
    }
}

pub fn canonical_sg_set(d: usize) -> Result<SGSet> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut generators: Vec<AffineFunc> = (0..d).map(|j| AffineFunc::coordinate(d, j)).collect();
    generators.push(AffineFunc::new(vec![-1.0; d], 0.0));
    Ok(SGSet { generators })
}

/// `a = lambda0 + sum_k lambda_k l_k` with every `lambda_k >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonnegRepresentation {
    pub lambda0: f64,
    pub lambda: Vec<f64>,
}

impl NonnegRepresentation {
    pub fn reconstruct(&self) -> AffineFunc {
        let d = self.lambda.len() - 1;
        let last = self.lambda[d];
        AffineFunc::new(self.lambda[..d].iter().map(|l| l - last).collect(), self.lambda0)
    }

    pub fn total_weight(&self) -> f64 {
        self.lambda.iter().sum()
    }
}

pub fn nonneg_representation(a: &AffineFunc, d: usize) -> Result<NonnegRepresentation> {
    check_dim(d, a.dim())?;
    let last = a.coeffs.iter().fold(0.0f64, |m, &c| m.max(-c));
    let mut lambda: Vec<f64> = a.coeffs.iter().map(|c| c + last).collect();
    lambda.push(last);
    Ok(NonnegRepresentation {
        lambda0: a.offset,
        lambda,
    })
}

/// `l(x) = sum_j c_j x_j` with `c_j` the inflated lattice sup of
/// `|dp/dx_j|` over `bounding_box(K, 1)`.
pub fn shift_functional(p: &Polynomial, body: &ConvexBody, per_axis: usize) -> Result<AffineFunc> {
    let d = body.dim();
    check_dim(d, p.dim())?;
    let points = body.bounding_box(1.0).lattice(per_axis);
    let coeffs = (0..d)
        .map(|j| {
            let dp = p.derivative(j);
            let sup = points.iter().map(|x| dp.eval(x).abs()).fold(0.0, f64::max);
            SUP_INFLATION * sup
        })
        .collect();
    Ok(AffineFunc::new(coeffs, 0.0))
}

/// `delta = min(0.99, eps / (1.05 sup |grad g|))`, so that `|g(x1) - g(x2)|
/// < eps` whenever `|x1 - x2| < delta`. Returns 0.99 when `g` is constant.
pub fn continuity_delta(g: &Polynomial, body: &ConvexBody, eps: f64, per_axis: usize) -> Result<f64> {
    check_dim(body.dim(), g.dim())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let grad: Vec<Polynomial> = (0..g.dim()).map(|j| g.derivative(j)).collect();
    let sup = body
        .bounding_box(1.0)
        .lattice(per_axis)
        .iter()
        .map(|x| norm(&grad.iter().map(|dg| dg.eval(x)).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(0.99);
    }
    Ok((eps / (SUP_INFLATION * sup)).min(0.99))
}

/// Sampling parameters shared by the assembly certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgOptions {
    pub per_axis: usize,
    pub n_pairs: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SgOptions {
    fn default() -> Self {
        SgOptions {
            per_axis: 41,
            n_pairs: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblyReport {
    pub shift: AffineFunc,
    pub g: Polynomial,
    pub delta: f64,
    pub eps: f64,
    /// Required bound `delta / sqrt(d)` on the first `d` generator errors.
    pub generator_bound: f64,
    /// Grid sup of `|h_k - l_k|` for every generator.
    pub generator_errors: Vec<f64>,
    pub representation: NonnegRepresentation,
    pub composed: FunctionExpr,
    pub approximant: FunctionExpr,
    /// Grid sup of `|approximant - p|`.
    pub error_estimate: f64,
    /// `eps + sum_{k<=d} lambda_k delta/sqrt(d) + lambda_{d+1} err_{d+1}`.
    pub derived_bound: f64,
    pub grid_points: usize,
    pub options: SgOptions,
    pub certificates: Vec<ConvexityCertificate>,
}

impl AssemblyReport {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed())
    }
}

pub fn assemble(
    p: &Polynomial,
    h: &[FunctionExpr],
    body: &ConvexBody,
    eps: f64,
    grid: &Grid,
) -> Result<AssemblyReport> {
    assemble_with(p, h, body, eps, grid, &SgOptions::default())
}

/// Builds `g(h_1, ..., h_d) + lambda0 + sum_k lambda_k h_k` approximating
/// `p` and certifies it.
pub fn assemble_with(
    p: &Polynomial,
    h: &[FunctionExpr],
    body: &ConvexBody,
    eps: f64,
    grid: &Grid,
    opts: &SgOptions,
) -> Result<AssemblyReport> {
    let d = body.dim();
    check_dim(d, p.dim())?;
    check_dim(d + 1, h.len())?;
    for hk in h {
        check_dim(d, hk.validate()?)?;
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }

    let mut certificates = Vec::new();
    let p_expr = FunctionExpr::Poly(p.clone());
    let input = midpoint_convexity_test(&p_expr, body, opts.n_pairs, opts.tol, opts.seed)?;
    if !input.passed() {
        return Err(Error::InputNotConvex(format!(
            "polynomial fails midpoint convexity: {:?}",
            input.witness
        )));
    }
    certificates.push(input);
    for (k, hk) in h.iter().enumerate() {
        let c = midpoint_convexity_test(hk, body, opts.n_pairs, opts.tol, opts.seed)?;
        if !c.passed() {
            return Err(Error::InputNotConvex(format!(
                "generator {k} fails midpoint convexity: {:?}",
                c.witness
            )));
        }
        certificates.push(c);
    }

    let shift = shift_functional(p, body, opts.per_axis)?;
    let g = p.add(&Polynomial::from_affine(&shift))?;
    let g_expr = FunctionExpr::Poly(g.clone());
    let mono = monotone_nondecreasing_test(&g_expr, &body.bounding_box(1.0), opts.per_axis, opts.tol)?;
    if let Some(w) = &mono.witness {
        return Err(Error::MonotonicityFailed { violation: w.violation });
    }
    certificates.push(mono);

    let delta = continuity_delta(&g, body, eps, opts.per_axis)?;
    let generator_bound = delta / (d as f64).sqrt();
    let sg = canonical_sg_set(d)?;
    let mut generator_errors = Vec::with_capacity(d + 1);
    for (k, (hk, lk)) in h.iter().zip(&sg.generators).enumerate() {
        let err = hk.sub(&lk.clone().into())?.sup_norm_on_grid(grid)?;
        let bound = if k < d { generator_bound } else { eps };
        if !(err < bound) {
            return Err(Error::ApproximantsTooCoarse {
                index: k,
                error: err,
                bound,
            });
        }
        generator_errors.push(err);
    }

    let composed = FunctionExpr::compose(g, h[..d].to_vec());
    let representation = nonneg_representation(&shift.scale(-1.0), d)?;
    let mut approximant = composed.add(&FunctionExpr::constant(d, representation.lambda0))?;
    for (hk, &lam) in h.iter().zip(&representation.lambda) {
        if lam != 0.0 {
            approximant = approximant.add(&hk.scale(lam))?;
        }
    }

    certificates.push(range_guard(&h[..d], body, grid)?);
    certificates.push(midpoint_convexity_test(
        &approximant,
        body,
        opts.n_pairs,
        opts.tol,
        opts.seed,
    )?);

    let error_estimate = approximant.sub(&p_expr)?.sup_norm_on_grid(grid)?;
    let derived_bound = eps
        + representation.lambda[..d].iter().sum::<f64>() * generator_bound
        + representation.lambda[d] * generator_errors[d];

    Ok(AssemblyReport {
        shift,
        g: match &composed {
            FunctionExpr::Compose { outer, .. } => outer.clone(),
            _ => unreachable!(),
        },
        delta,
        eps,
        generator_bound,
        generator_errors,
        representation,
        composed,
        approximant,
        error_estimate,
        derived_bound,
        grid_points: grid.len(),
        options: opts.clone(),
        certificates,
    })
}

/// Checks that `(h_1(x), ..., h_d(x))` stays in the 1-fattening of the
/// body at every grid point, the domain on which `g` is monotone.
pub fn range_guard(h: &[FunctionExpr], body: &ConvexBody, grid: &Grid) -> Result<ConvexityCertificate> {
    check_dim(body.dim(), h.len())?;
    let mut worst: Option<Witness> = None;
    for x in &grid.points {
        let image: Vec<f64> = h.iter().map(|hk| hk.eval_at(x)).collect();
        let violation = body.distance(&image)? - 1.0;
        if worst.as_ref().is_none_or(|w| violation > w.violation) {
            worst = Some(Witness {
                x1: x.clone(),
                x2: Some(image),
                violation,
            });
        }
    }
    Ok(ConvexityCertificate::from_worst(
        "range_in_fattened_body",
        grid.len(),
        0.0,
        format!("grid of {} points", grid.len()),
        worst,
    ))
}
