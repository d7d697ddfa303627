use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

/// Nonnegative integer exponent vector.
pub type MultiIndex = Vec<u32>;

/// Sparse coefficient map keyed by multi-index. Exact zeros are never
/// stored. Products add multi-indices, which is the product rule for both
/// monomials and exponentials.
#[derive(Clone, Debug, Default, PartialEq)]
struct TermMap(BTreeMap<MultiIndex, f64>);

impl TermMap {
    fn accumulate(&mut self, key: MultiIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.0.entry(key.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.0.remove(&key);
        }
    }

    fn add(&self, other: &TermMap) -> TermMap {
        let mut out = self.clone();
        for (k, c) in &other.0 {
            out.accumulate(k.clone(), *c);
        }
        out
    }

    fn scale(&self, s: f64) -> TermMap {
        if s == 0.0 {
            return TermMap::default();
        }
        TermMap(self.0.iter().map(|(k, c)| (k.clone(), c * s)).collect())
    }

    fn mul(&self, other: &TermMap) -> TermMap {
        let mut out = TermMap::default();
        for (ka, ca) in &self.0 {
            for (kb, cb) in &other.0 {
                let key = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.accumulate(key, ca * cb);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    exp: MultiIndex,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerms {
    dim: usize,
    terms: Vec<RawTerm>,
}

fn build_map(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<TermMap> {
    if dim == 0 {
        return Err(Error::InvalidExpr("dimension must be positive".into()));
    }
    let mut map = TermMap::default();
    for (k, c) in terms {
        check_dim(dim, k.len())?;
        if !c.is_finite() {
            return Err(Error::InvalidExpr(format!("non-finite coefficient {c}")));
        }
        map.accumulate(k, c);
    }
    Ok(map)
}

macro_rules! term_container {
    ($name:ident) => {
        impl $name {
            /// Builds from (multi-index, coefficient) pairs, merging repeats.
            pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
                Ok(Self {
                    dim,
                    map: build_map(dim, terms)?,
                })
            }

            pub fn zero(dim: usize) -> Self {
                Self {
                    dim,
                    map: TermMap::default(),
                }
            }

            pub fn constant(dim: usize, c: f64) -> Self {
                let mut map = TermMap::default();
                map.accumulate(vec![0; dim], c);
                Self { dim, map }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
                self.map.0.iter().map(|(k, c)| (k, *c))
            }

            pub fn num_terms(&self) -> usize {
                self.map.0.len()
            }

            pub fn coefficient(&self, idx: &[u32]) -> f64 {
                self.map.0.get(idx).copied().unwrap_or(0.0)
            }

            pub fn is_zero(&self) -> bool {
                self.map.0.is_empty()
            }

            /// The constant value if no non-constant term is present.
            pub fn as_constant(&self) -> Option<f64> {
                match self.map.0.len() {
                    0 => Some(0.0),
                    1 => {
                        let (k, c) = self.map.0.iter().next().unwrap();
                        k.iter().all(|&e| e == 0).then_some(*c)
                    }
                    _ => None,
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                check_dim(self.dim, other.dim)?;
                Ok(Self {
                    dim: self.dim,
                    map: self.map.add(&other.map),
                })
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.add(&other.scale(-1.0))
            }

            pub fn mul(&self, other: &Self) -> Result<Self> {
                check_dim(self.dim, other.dim)?;
                Ok(Self {
                    dim: self.dim,
                    map: self.map.mul(&other.map),
                })
            }

            pub fn scale(&self, s: f64) -> Self {
                Self {
                    dim: self.dim,
                    map: self.map.scale(s),
                }
            }

            pub fn powi(&self, k: u32) -> Self {
                let mut out = Self::constant(self.dim, 1.0);
                for _ in 0..k {
                    out = Self {
                        dim: self.dim,
                        map: out.map.mul(&self.map),
                    };
                }
                out
            }

            /// Re-embeds a one-variable object as a function of axis `axis`
            /// of R^`dim`.
            pub fn lift_to_axis(&self, dim: usize, axis: usize) -> Result<Self> {
                check_dim(1, self.dim)?;
                if axis >= dim {
                    return Err(Error::InvalidArgument(format!(
                        "axis {axis} out of range for dimension {dim}"
                    )));
                }
                Self::from_terms(
                    dim,
                    self.terms().map(|(k, c)| {
                        let mut idx = vec![0; dim];
                        idx[axis] = k[0];
                        (idx, c)
                    }),
                )
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                RawTerms {
                    dim: self.dim,
                    terms: self
                        .terms()
                        .map(|(k, c)| RawTerm {
                            exp: k.clone(),
                            coef: c,
                        })
                        .collect(),
                }
                .serialize(serializer)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
                let raw = RawTerms::deserialize(deserializer)?;
                Self::from_terms(raw.dim, raw.terms.into_iter().map(|t| (t.exp, t.coef)))
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

/// Multivariate algebraic polynomial `sum c x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    map: TermMap,
}

/// Exponential polynomial `sum c exp(alpha · x)` with `alpha` in Z_+^d.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly {
    dim: usize,
    map: TermMap,
}

term_container!(Polynomial);
term_container!(ExpPoly);

impl Polynomial {
    /// The coordinate function `x_j`.
    pub fn variable(dim: usize, j: usize) -> Self {
        let mut idx = vec![0; dim];
        idx[j] = 1;
        let mut map = TermMap::default();
        map.accumulate(idx, 1.0);
        Self { dim, map }
    }

    /// One-variable polynomial from dense coefficients `c_0 + c_1 t + ...`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut map = TermMap::default();
        for (k, &c) in coeffs.iter().enumerate() {
            map.accumulate(vec![k as u32], c);
        }
        Self { dim: 1, map }
    }

    /// Dense coefficients of a one-variable polynomial.
    pub fn dense_coeffs(&self) -> Vec<f64> {
        assert_eq!(self.dim, 1, "dense_coeffs needs a univariate polynomial");
        let mut out = vec![0.0; self.degree() as usize + 1];
        for (k, c) in self.terms() {
            out[k[0] as usize] = c;
        }
        out
    }

    pub fn from_affine(a: &AffineFunc) -> Self {
        let d = a.dim();
        let mut map = TermMap::default();
        map.accumulate(vec![0; d], a.offset);
        for (j, &c) in a.coeffs.iter().enumerate() {
            let mut idx = vec![0; d];
            idx[j] = 1;
            map.accumulate(idx, c);
        }
        Self { dim: d, map }
    }

    /// Squared Euclidean distance to `z`, `sum (x_k - z_k)^2`.
    pub fn squared_distance(z: &[f64]) -> Self {
        let d = z.len();
        let mut out = Self::zero(d);
        for (k, &zk) in z.iter().enumerate() {
            let lin = Self::variable(d, k).sub(&Self::constant(d, zk)).unwrap();
            out = out.add(&lin.powi(2)).unwrap();
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms().map(|(k, _)| k.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        if self.dim == 1 {
            // Horner on the dense form for the univariate case
            let mut acc = 0.0;
            let mut last = self.degree() as i64;
            for (k, c) in self.map.0.iter().rev() {
                let e = k[0] as i64;
                acc *= x[0].powi((last - e) as i32);
                acc += c;
                last = e;
            }
            return acc * x[0].powi(last as i32);
        }
        self.terms()
            .map(|(k, c)| {
                c * k
                    .iter()
                    .zip(x)
                    .map(|(&e, &v)| if e == 0 { 1.0 } else { v.powi(e as i32) })
                    .product::<f64>()
            })
            .sum()
    }

    pub fn derivative(&self, j: usize) -> Self {
        let mut map = TermMap::default();
        for (k, c) in self.terms() {
            if k[j] > 0 {
                let mut idx = k.clone();
                idx[j] -= 1;
                map.accumulate(idx, c * k[j] as f64);
            }
        }
        Self { dim: self.dim, map }
    }

    /// Substitutes polynomials for each variable.
    pub fn compose(&self, inner: &[Polynomial]) -> Result<Polynomial> {
        check_dim(self.dim, inner.len())?;
        let d = inner
            .first()
            .map(|p| p.dim)
            .ok_or_else(|| Error::InvalidExpr("empty composition".into()))?;
        for p in inner {
            check_dim(d, p.dim)?;
        }
        let mut out = Polynomial::zero(d);
        for (k, c) in self.terms() {
            let mut term = Polynomial::constant(d, c);
            for (p, &e) in inner.iter().zip(k) {
                if e > 0 {
                    term = term.mul(&p.powi(e))?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

/// Largest exponent `alpha · x` evaluated directly; beyond it the sum is
/// accumulated relative to its largest term.
const EXP_GUARD: f64 = 700.0;

impl ExpPoly {
    /// `exp(alpha · x)` with unit coefficient.
    pub fn exponential(alpha: MultiIndex) -> Self {
        let dim = alpha.len();
        let mut map = TermMap::default();
        map.accumulate(alpha, 1.0);
        Self { dim, map }
    }

    /// One-variable `sum_k c_k e^{k t}` from dense coefficients.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut map = TermMap::default();
        for (k, &c) in coeffs.iter().enumerate() {
            map.accumulate(vec![k as u32], c);
        }
        Self { dim: 1, map }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut max_arg = f64::NEG_INFINITY;
        let mut small = 0.0;
        let mut guarded = false;
        for (k, c) in self.terms() {
            let arg = exponent_dot(k, x);
            if arg > EXP_GUARD {
                guarded = true;
            }
            max_arg = max_arg.max(arg);
            small += c * arg.exp();
        }
        if !guarded {
            return small;
        }
        let scaled: f64 = self
            .terms()
            .map(|(k, c)| c * (exponent_dot(k, x) - max_arg).exp())
            .sum();
        scaled * max_arg.exp()
    }

    pub fn derivative(&self, j: usize) -> Self {
        let mut map = TermMap::default();
        for (k, c) in self.terms() {
            map.accumulate(k.clone(), c * k[j] as f64);
        }
        Self { dim: self.dim, map }
    }

    /// `sum |c| exp(alpha · x)`: the scale of roundoff when evaluating at x.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        self.terms().map(|(k, c)| c.abs() * exponent_dot(k, x).exp()).sum()
    }

    /// Largest exponent component across all terms.
    pub fn max_exponent(&self) -> u32 {
        self.terms().flat_map(|(k, _)| k.iter().copied()).max().unwrap_or(0)
    }
}

fn exponent_dot(k: &[u32], x: &[f64]) -> f64 {
    k.iter()
        .zip(x)
        .map(|(&e, &v)| if e == 0 { 0.0 } else { e as f64 * v })
        .sum()
}

/// Expands `outer(inner_1, ..., inner_m)` into a single exponential
/// polynomial. Exponents stay in Z_+^d because products only add them.
pub fn compose_poly(outer: &Polynomial, inner: &[ExpPoly]) -> Result<ExpPoly> {
    check_dim(outer.dim(), inner.len())?;
    let d = inner
        .first()
        .map(|e| e.dim())
        .ok_or_else(|| Error::InvalidExpr("empty composition".into()))?;
    for e in inner {
        check_dim(d, e.dim())?;
    }
    // powers of each inner function, built incrementally
    let mut powers: Vec<Vec<ExpPoly>> = inner.iter().map(|_| vec![ExpPoly::constant(d, 1.0)]).collect();
    let mut out = ExpPoly::zero(d);
    for (k, c) in outer.terms() {
        let mut term = ExpPoly::constant(d, c);
        for (i, &e) in k.iter().enumerate() {
            while powers[i].len() <= e as usize {
                let next = powers[i].last().unwrap().mul(&inner[i])?;
                powers[i].push(next);
            }
            if e > 0 {
                term = term.mul(&powers[i][e as usize])?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Affine function `offset + coeffs · x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineFunc {
    pub coeffs: Vec<f64>,
    pub offset: f64,
}

impl AffineFunc {
    pub fn new(coeffs: Vec<f64>, offset: f64) -> Self {
        Self { coeffs, offset }
    }

    /// The coordinate functional `x_j`.
    pub fn coordinate(dim: usize, j: usize) -> Self {
        let mut coeffs = vec![0.0; dim];
        coeffs[j] = 1.0;
        Self { coeffs, offset: 0.0 }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            coeffs: vec![0.0; dim],
            offset: c,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.offset + dot(&self.coeffs, x)
    }

    pub fn add(&self, other: &AffineFunc) -> Result<AffineFunc> {
        check_dim(self.dim(), other.dim())?;
        Ok(AffineFunc {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            offset: self.offset + other.offset,
        })
    }

    pub fn scale(&self, s: f64) -> AffineFunc {
        AffineFunc {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            offset: self.offset * s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_arithmetic() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = x.powi(2).add(&y.powi(2)).unwrap();
        assert_eq!(p.eval(&[3.0, 4.0]), 25.0);
        assert_eq!(p.derivative(0), x.scale(2.0));
        assert!(x.sub(&x).unwrap().is_zero());
        assert_eq!(p.degree(), 2);
        let q = Polynomial::univariate(&[1.0, -2.0, 0.0, 3.0]);
        assert_eq!(q.eval(&[2.0]), 1.0 - 4.0 + 24.0);
        assert_eq!(q.dense_coeffs(), vec![1.0, -2.0, 0.0, 3.0]);
    }

    #[test]
    fn polynomial_composition() {
        // (u + v)^2 with u = x^2, v = 1 is x^4 + 2x^2 + 1
        let u = Polynomial::variable(2, 0);
        let v = Polynomial::variable(2, 1);
        let outer = u.add(&v).unwrap().powi(2);
        let inner = [Polynomial::univariate(&[0.0, 0.0, 1.0]), Polynomial::constant(1, 1.0)];
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c, Polynomial::univariate(&[1.0, 0.0, 2.0, 0.0, 1.0]));
    }

    #[test]
    fn exp_poly_examples() {
        let e = ExpPoly::exponential(vec![1]);
        assert_eq!(e.eval(&[0.0]), 1.0);
        let three_e2x = ExpPoly::exponential(vec![2]).scale(3.0);
        assert_eq!(three_e2x.derivative(0), ExpPoly::exponential(vec![2]).scale(6.0));
    }

    #[test]
    fn compose_poly_examples() {
        let ex = ExpPoly::exponential(vec![1]);
        let u = Polynomial::variable(1, 0);
        assert_eq!(compose_poly(&u, std::slice::from_ref(&ex)).unwrap(), ex);
        assert_eq!(
            compose_poly(&u.powi(2), std::slice::from_ref(&ex)).unwrap(),
            ExpPoly::exponential(vec![2])
        );
        let uv = Polynomial::variable(2, 0).mul(&Polynomial::variable(2, 1)).unwrap();
        let inner = [ExpPoly::exponential(vec![1, 0]), ExpPoly::exponential(vec![0, 1])];
        assert_eq!(compose_poly(&uv, &inner).unwrap(), ExpPoly::exponential(vec![1, 1]));
        assert!(compose_poly(&uv, &inner[..1]).is_err());
    }

    #[test]
    fn overflow_guard_keeps_sign_and_scale() {
        let e = ExpPoly::from_terms(1, [(vec![2], 1.0), (vec![1], -1.0)]).unwrap();
        // e^{2x} overflows at x = 360; the guarded sum keeps sign and scale
        let x = 360.0;
        let direct = (2.0f64 * x).exp() - x.exp();
        assert!(direct.is_infinite());
        assert!(e.eval(&[x]).is_infinite() && e.eval(&[x]) > 0.0);
        let y: f64 = 351.0;
        let expected = (2.0 * y).exp() * (1.0 - (-y).exp());
        assert!((e.eval(&[y]) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_keeps_integer_exponents() {
        let e = ExpPoly::from_terms(2, [(vec![3, 1], 0.25), (vec![0, 0], -1.5)]).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"terms":[{"exp":[0,0],"coef":-1.5},{"exp":[3,1],"coef":0.25}]}"#
        );
        assert_eq!(serde_json::from_str::<ExpPoly>(&s).unwrap(), e);
        assert!(serde_json::from_str::<ExpPoly>(r#"{"dim":1,"terms":[{"exp":[-1],"coef":1}]}"#).is_err());
        assert!(serde_json::from_str::<ExpPoly>(r#"{"dim":1,"terms":[{"exp":[0.5],"coef":1}]}"#).is_err());
        assert!(serde_json::from_str::<ExpPoly>(r#"{"dim":2,"terms":[{"exp":[1],"coef":1}]}"#).is_err());
    }
}
