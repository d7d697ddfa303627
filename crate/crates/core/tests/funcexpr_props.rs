mod common;

use convexalg::funcexpr::compose_poly;
use convexalg::geometry::seeded_rng;
use convexalg::{AffineFunc, ExpPoly, FunctionExpr, Polynomial};
use proptest::prelude::*;
use rand::Rng;

fn point<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// A smooth expression mixing every smooth node type.
fn smooth_expr<R: Rng>(rng: &mut R) -> FunctionExpr {
    let d = 2;
    let inner = vec![
        FunctionExpr::Exp(common::exp_poly(d, rng, 3, 2)),
        FunctionExpr::Affine(AffineFunc::new(point(d, rng), rng.gen_range(-1.0..1.0))),
    ];
    let outer = common::polynomial(2, rng, 4, 3);
    FunctionExpr::Sum {
        args: vec![
            FunctionExpr::compose(outer, inner),
            FunctionExpr::Poly(common::polynomial(d, rng, 3, 3)).scale(rng.gen_range(-2.0..2.0)),
        ],
    }
}

proptest! {
    #[test]
    fn compose_poly_is_pointwise(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let d = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let outer = common::polynomial(k, &mut rng, 4, 3);
        let inner: Vec<ExpPoly> = (0..k).map(|_| common::exp_poly(d, &mut rng, 3, 2)).collect();
        let composed = compose_poly(&outer, &inner).unwrap();
        for _ in 0..100 {
            let x = point(d, &mut rng);
            let vals: Vec<f64> = inner.iter().map(|h| h.eval(&x)).collect();
            let direct = outer.eval(&vals);
            let magnitude = outer.terms().map(|(a, c)| {
                c.abs() * a.iter().zip(&vals).map(|(e, v)| v.abs().powi(*e as i32)).product::<f64>()
            }).sum::<f64>();
            let scale = 1.0 + magnitude + composed.magnitude(&x);
            prop_assert!((composed.eval(&x) - direct).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn exponents_stay_natural(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let a = common::exp_poly(2, &mut rng, 4, 3);
        let b = common::exp_poly(2, &mut rng, 4, 3);
        let outer = common::polynomial(2, &mut rng, 3, 3);
        for e in [a.add(&b).unwrap(), a.mul(&b).unwrap(), compose_poly(&outer, &[a.clone(), b.clone()]).unwrap()] {
            let json: serde_json::Value = serde_json::to_value(&e).unwrap();
            for term in json["terms"].as_array().unwrap() {
                for v in term["exp"].as_array().unwrap() {
                    prop_assert!(v.is_u64(), "exponent {v}");
                }
            }
        }
    }

    #[test]
    fn derivatives_match_central_differences(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let f = smooth_expr(&mut rng);
        let h = 1e-5;
        for _ in 0..10 {
            let x = point(2, &mut rng);
            for j in 0..2 {
                let exact = f.partial_derivative(j).unwrap().eval_at(&x);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fd = (f.eval_at(&xp) - f.eval_at(&xm)) / (2.0 * h);
                prop_assert!((exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()), "{exact} vs {fd}");
            }
        }
    }

    #[test]
    fn max_of_twins_is_exact(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let f = smooth_expr(&mut rng);
        let twin = FunctionExpr::max(vec![f.clone(), f.clone()]);
        for _ in 0..20 {
            let x = point(2, &mut rng);
            prop_assert_eq!(twin.eval_at(&x), f.eval_at(&x));
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let f = FunctionExpr::max(vec![smooth_expr(&mut rng), FunctionExpr::squared_distance(&[0.5, -0.5])]);
        let s = serde_json::to_string(&f).unwrap();
        let back = FunctionExpr::from_json(&s).unwrap();
        prop_assert_eq!(&back, &f);
    }
}

#[test]
fn polynomial_ring_identities() {
    let x = Polynomial::variable(2, 0);
    let y = Polynomial::variable(2, 1);
    let lhs = x.add(&y).unwrap().powi(2);
    let rhs = x
        .powi(2)
        .add(&x.mul(&y).unwrap().scale(2.0))
        .unwrap()
        .add(&y.powi(2))
        .unwrap();
    assert_eq!(lhs, rhs);
    assert!(lhs.sub(&rhs).unwrap().is_zero());
}
