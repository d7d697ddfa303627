//! Symbolic function trees over affine functions, polynomials and
//! exponential polynomials, closed under sums, scaling, pointwise maxima
//! and composition with polynomials.

mod terms;

pub use terms::{compose_poly, AffineFunc, ExpPoly, MultiIndex, Polynomial};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::Grid;

/// A function `R^d -> R` as an immutable expression tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionExpr {
    Affine(AffineFunc),
    Poly(Polynomial),
    Exp(ExpPoly),
    Max {
        args: Vec<FunctionExpr>,
    },
    /// `outer(inner_1(x), ..., inner_m(x))`.
    Compose {
        outer: Polynomial,
        inner: Vec<FunctionExpr>,
    },
    Sum {
        args: Vec<FunctionExpr>,
    },
    Scale {
        factor: f64,
        arg: Box<FunctionExpr>,
    },
}

impl From<AffineFunc> for FunctionExpr {
    fn from(a: AffineFunc) -> Self {
        FunctionExpr::Affine(a)
    }
}

impl From<Polynomial> for FunctionExpr {
    fn from(p: Polynomial) -> Self {
        FunctionExpr::Poly(p)
    }
}

impl From<ExpPoly> for FunctionExpr {
    fn from(e: ExpPoly) -> Self {
        FunctionExpr::Exp(e)
    }
}

impl FunctionExpr {
    pub fn constant(dim: usize, c: f64) -> Self {
        FunctionExpr::Affine(AffineFunc::constant(dim, c))
    }

    /// `rho^2(x, z)`, the squared Euclidean distance to `z`.
    pub fn squared_distance(z: &[f64]) -> Self {
        FunctionExpr::Poly(Polynomial::squared_distance(z))
    }

    pub fn max(args: Vec<FunctionExpr>) -> Self {
        FunctionExpr::Max { args }
    }

    pub fn compose(outer: Polynomial, inner: Vec<FunctionExpr>) -> Self {
        FunctionExpr::Compose { outer, inner }
    }

    /// Parses and validates a JSON expression.
    pub fn from_json(s: &str) -> Result<Self> {
        let e: FunctionExpr = serde_json::from_str(s).map_err(|err| Error::InvalidExpr(err.to_string()))?;
        e.validate()?;
        Ok(e)
    }

    /// Checks arity and dimension consistency; returns the ambient dimension.
    pub fn validate(&self) -> Result<usize> {
        match self {
            FunctionExpr::Affine(a) => nonzero_dim(a.dim()),
            FunctionExpr::Poly(p) => nonzero_dim(p.dim()),
            FunctionExpr::Exp(e) => nonzero_dim(e.dim()),
            FunctionExpr::Max { args } | FunctionExpr::Sum { args } => common_dim(args),
            FunctionExpr::Compose { outer, inner } => {
                check_dim(outer.dim(), inner.len())?;
                common_dim(inner)
            }
            FunctionExpr::Scale { factor, arg } => {
                if !factor.is_finite() {
                    return Err(Error::InvalidExpr(format!("non-finite factor {factor}")));
                }
                arg.validate()
            }
        }
    }

    /// Ambient dimension. Panics on an invalid tree; use `validate` first
    /// for untrusted input.
    pub fn dim(&self) -> usize {
        self.validate().expect("invalid expression tree")
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.validate()?, x.len())?;
        Ok(self.eval_at(x))
    }

    /// Evaluation without dimension checks.
    pub fn eval_at(&self, x: &[f64]) -> f64 {
        match self {
            FunctionExpr::Affine(a) => a.eval(x),
            FunctionExpr::Poly(p) => p.eval(x),
            FunctionExpr::Exp(e) => e.eval(x),
            FunctionExpr::Max { args } => args.iter().map(|a| a.eval_at(x)).fold(f64::NEG_INFINITY, f64::max),
            FunctionExpr::Compose { outer, inner } => {
                let u: Vec<f64> = inner.iter().map(|h| h.eval_at(x)).collect();
                outer.eval(&u)
            }
            FunctionExpr::Sum { args } => args.iter().map(|a| a.eval_at(x)).sum(),
            FunctionExpr::Scale { factor, arg } => factor * arg.eval_at(x),
        }
    }

    pub fn contains_max(&self) -> bool {
        match self {
            FunctionExpr::Max { .. } => true,
            FunctionExpr::Compose { inner: args, .. } | FunctionExpr::Sum { args } => {
                args.iter().any(|a| a.contains_max())
            }
            FunctionExpr::Scale { arg, .. } => arg.contains_max(),
            _ => false,
        }
    }

    /// True when the tree is structurally the zero function.
    pub fn is_zero(&self) -> bool {
        match self {
            FunctionExpr::Affine(a) => a.offset == 0.0 && a.coeffs.iter().all(|&c| c == 0.0),
            FunctionExpr::Poly(p) => p.is_zero(),
            FunctionExpr::Exp(e) => e.is_zero(),
            FunctionExpr::Sum { args } => args.iter().all(|a| a.is_zero()),
            FunctionExpr::Scale { factor, arg } => *factor == 0.0 || arg.is_zero(),
            FunctionExpr::Compose { outer, .. } => outer.is_zero(),
            FunctionExpr::Max { .. } => false,
        }
    }

    /// Exact symbolic derivative along axis `j`.
    pub fn partial_derivative(&self, j: usize) -> Result<FunctionExpr> {
        let d = self.validate()?;
        if j >= d {
            return Err(Error::InvalidArgument(format!(
                "axis {j} out of range for dimension {d}"
            )));
        }
        self.derive(j, d)
    }

    fn derive(&self, j: usize, d: usize) -> Result<FunctionExpr> {
        Ok(match self {
            FunctionExpr::Affine(a) => FunctionExpr::constant(d, a.coeffs[j]),
            FunctionExpr::Poly(p) => FunctionExpr::Poly(p.derivative(j)),
            FunctionExpr::Exp(e) => FunctionExpr::Exp(e.derivative(j)),
            FunctionExpr::Max { .. } => return Err(Error::NotSmooth),
            FunctionExpr::Sum { args } => {
                let mut acc = FunctionExpr::Poly(Polynomial::zero(d));
                for a in args {
                    acc = acc.add(&a.derive(j, d)?)?;
                }
                acc
            }
            FunctionExpr::Scale { factor, arg } => arg.derive(j, d)?.scale(*factor),
            FunctionExpr::Compose { outer, inner } => {
                // chain rule: sum_i (dP/du_i)(h) * dh_i/dx_j
                let product = Polynomial::variable(2, 0).mul(&Polynomial::variable(2, 1))?;
                let mut acc = FunctionExpr::Poly(Polynomial::zero(d));
                for (i, h) in inner.iter().enumerate() {
                    let dh = h.derive(j, d)?;
                    let dp = outer.derivative(i);
                    if dh.is_zero() || dp.is_zero() {
                        continue;
                    }
                    let dp_of_h = match dp.as_constant() {
                        Some(c) => FunctionExpr::constant(d, c),
                        None => FunctionExpr::compose(dp, inner.clone()),
                    };
                    let term = match dp_of_h.constant_value() {
                        Some(c) => dh.scale(c),
                        None => FunctionExpr::compose(product.clone(), vec![dp_of_h, dh]),
                    };
                    acc = acc.add(&term)?;
                }
                acc
            }
        })
    }

    /// Value of a constant leaf, if this is one.
    fn constant_value(&self) -> Option<f64> {
        match self {
            FunctionExpr::Affine(a) if a.coeffs.iter().all(|&c| c == 0.0) => Some(a.offset),
            FunctionExpr::Poly(p) => p.as_constant(),
            FunctionExpr::Exp(e) => e.as_constant(),
            _ => None,
        }
    }

    pub fn gradient(&self) -> Result<Vec<FunctionExpr>> {
        let d = self.validate()?;
        (0..d).map(|j| self.derive(j, d)).collect()
    }

    /// Symbolic Hessian, row-major; only the upper triangle is derived and
    /// mirrored.
    pub fn hessian(&self) -> Result<Vec<Vec<FunctionExpr>>> {
        let d = self.validate()?;
        let grad = self.gradient()?;
        let mut h: Vec<Vec<Option<FunctionExpr>>> = vec![vec![None; d]; d];
        for i in 0..d {
            for k in i..d {
                let e = grad[i].derive(k, d)?;
                h[k][i] = Some(e.clone());
                h[i][k] = Some(e);
            }
        }
        Ok(h.into_iter()
            .map(|row| row.into_iter().map(Option::unwrap).collect())
            .collect())
    }

    /// Sum, merging like-typed leaves.
    pub fn add(&self, other: &FunctionExpr) -> Result<FunctionExpr> {
        let d = self.validate()?;
        check_dim(d, other.validate()?)?;
        use FunctionExpr::*;
        Ok(match (self, other) {
            (Affine(a), Affine(b)) => Affine(a.add(b)?),
            (Poly(a), Poly(b)) => Poly(a.add(b)?),
            (Poly(a), Affine(b)) | (Affine(b), Poly(a)) => Poly(a.add(&Polynomial::from_affine(b))?),
            (Exp(a), Exp(b)) => Exp(a.add(b)?),
            (Exp(e), other) | (other, Exp(e)) if other.constant_value().is_some() => {
                Exp(e.add(&ExpPoly::constant(d, other.constant_value().unwrap()))?)
            }
            _ if other.is_zero() => self.clone(),
            _ if self.is_zero() => other.clone(),
            (Sum { args: a }, Sum { args: b }) => Sum {
                args: a.iter().chain(b).cloned().collect(),
            },
            (Sum { args }, e) => {
                let mut args = args.clone();
                args.push(e.clone());
                Sum { args }
            }
            (e, Sum { args }) => {
                let mut out = vec![e.clone()];
                out.extend(args.iter().cloned());
                Sum { args: out }
            }
            (a, b) => Sum {
                args: vec![a.clone(), b.clone()],
            },
        })
    }

    pub fn sub(&self, other: &FunctionExpr) -> Result<FunctionExpr> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> FunctionExpr {
        use FunctionExpr::*;
        match self {
            Affine(a) => Affine(a.scale(c)),
            Poly(p) => Poly(p.scale(c)),
            Exp(e) => Exp(e.scale(c)),
            Scale { factor, arg } => Scale {
                factor: factor * c,
                arg: arg.clone(),
            },
            Compose { outer, inner } => Compose {
                outer: outer.scale(c),
                inner: inner.clone(),
            },
            e => Scale {
                factor: c,
                arg: Box::new(e.clone()),
            },
        }
    }

    /// Expands the tree into a single exponential polynomial when every
    /// leaf lies in the exponential algebra (constants included).
    pub fn to_exp_poly(&self) -> Option<ExpPoly> {
        let d = self.validate().ok()?;
        match self {
            FunctionExpr::Exp(e) => Some(e.clone()),
            FunctionExpr::Affine(_) | FunctionExpr::Poly(_) => self.constant_value().map(|c| ExpPoly::constant(d, c)),
            FunctionExpr::Max { .. } => None,
            FunctionExpr::Sum { args } => args
                .iter()
                .try_fold(ExpPoly::zero(d), |acc, a| acc.add(&a.to_exp_poly()?).ok()),
            FunctionExpr::Scale { factor, arg } => Some(arg.to_exp_poly()?.scale(*factor)),
            FunctionExpr::Compose { outer, inner } => {
                let inner: Option<Vec<ExpPoly>> = inner.iter().map(|h| h.to_exp_poly()).collect();
                compose_poly(outer, &inner?).ok()
            }
        }
    }

    /// Largest `|f|` over the grid points: a lower estimate of the sup-norm.
    pub fn sup_norm_on_grid(&self, grid: &Grid) -> Result<f64> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        check_dim(self.validate()?, grid.points[0].len())?;
        Ok(grid.points.iter().map(|x| self.eval_at(x).abs()).fold(0.0, f64::max))
    }
}

fn nonzero_dim(d: usize) -> Result<usize> {
    if d == 0 {
        Err(Error::InvalidExpr("dimension must be positive".into()))
    } else {
        Ok(d)
    }
}

fn common_dim(args: &[FunctionExpr]) -> Result<usize> {
    let first = args
        .first()
        .ok_or_else(|| Error::InvalidExpr("empty argument list".into()))?
        .validate()?;
    for a in &args[1..] {
        check_dim(first, a.validate()?)?;
    }
    Ok(first)
}
