//! Chebyshev series on `[-1, 1]`: interpolation at first-kind nodes,
//! Clenshaw evaluation, term-wise differentiation and conversion to the
//! monomial basis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
}

/// The `n + 1` first-kind nodes `cos(pi (k + 1/2) / (n + 1))`.
pub fn nodes(n: usize) -> Vec<f64> {
    let m = (n + 1) as f64;
    (0..=n).map(|k| (PI * (k as f64 + 0.5) / m).cos()).collect()
}

impl ChebSeries {
    /// Degree-`n` interpolant of `f` at the first-kind nodes.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, n: usize) -> Self {
        let z = nodes(n);
        let values: Vec<f64> = z.iter().map(|&t| f(t)).collect();
        Self::from_node_values(&values)
    }

    /// Coefficients from values at `nodes(values.len() - 1)` by the
    /// discrete cosine transform.
    pub fn from_node_values(values: &[f64]) -> Self {
        let m = values.len() as f64;
        let coeffs = (0..values.len())
            .map(|j| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / m).cos())
                    .sum();
                if j == 0 {
                    s / m
                } else {
                    2.0 * s / m
                }
            })
            .collect();
        ChebSeries { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, z: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * z * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or(0.0) + z * b1 - b2
    }

    pub fn derivative(&self) -> ChebSeries {
        let n = self.degree();
        if n == 0 {
            return ChebSeries { coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..=n).rev() {
            d[k - 1] = d.get(k + 1).copied().unwrap_or(0.0) + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        ChebSeries { coeffs: d }
    }

    /// Dense monomial coefficients `a_0 + a_1 z + ...` of the same
    /// polynomial.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.degree();
        let mut out = vec![0.0; n + 1];
        let mut t_prev = vec![0.0; n + 1];
        let mut t_cur = vec![0.0; n + 1];
        t_prev[0] = 1.0;
        if n >= 1 {
            t_cur[1] = 1.0;
        }
        out[0] += self.coeffs[0];
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            if k >= 2 {
                let mut next = vec![0.0; n + 1];
                for i in 0..n {
                    next[i + 1] += 2.0 * t_cur[i];
                }
                for i in 0..=n {
                    next[i] -= t_prev[i];
                }
                t_prev = std::mem::replace(&mut t_cur, next);
            }
            for i in 0..=n {
                out[i] += c * t_cur[i];
            }
        }
        out
    }
}
