#![allow(dead_code)]

use convexalg::{AffineFunc, ExpPoly, Polynomial};
use rand::Rng;

/// `sum_r (a_r · (x - c))^2 + b · x + e` with random rows `a_r`.
pub fn convex_quadratic<R: Rng>(d: usize, rng: &mut R, spread: f64) -> Polynomial {
    let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-spread..=spread)).collect();
    let mut p = Polynomial::from_affine(&AffineFunc::new(
        (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        rng.gen_range(-1.0..=1.0),
    ));
    for _ in 0..d {
        let row: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..=1.5)).collect();
        let offset = -row.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
        p = p
            .add(&Polynomial::from_affine(&AffineFunc::new(row, offset)).powi(2))
            .unwrap();
    }
    p
}

pub fn exp_poly<R: Rng>(d: usize, rng: &mut R, terms: usize, max_exp: u32) -> ExpPoly {
    ExpPoly::from_terms(
        d,
        (0..terms).map(|_| {
            (
                (0..d).map(|_| rng.gen_range(0..=max_exp)).collect(),
                rng.gen_range(-1.0..=1.0),
            )
        }),
    )
    .unwrap()
}

pub fn polynomial<R: Rng>(d: usize, rng: &mut R, terms: usize, max_exp: u32) -> Polynomial {
    Polynomial::from_terms(
        d,
        (0..terms).map(|_| {
            (
                (0..d).map(|_| rng.gen_range(0..=max_exp)).collect(),
                rng.gen_range(-1.0..=1.0),
            )
        }),
    )
    .unwrap()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
