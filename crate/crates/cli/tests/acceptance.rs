//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use convexalg::borsuk::find_common_direction_2d;
use convexalg::convexity::{composition_preconditions, midpoint_convexity_test, monotone_nondecreasing_test};
use convexalg::counterexample::{g_eps_construct, separating_support, theorem1b_demo, DemoOptions, PinnedChord};
use convexalg::funcexpr::compose_poly;
use convexalg::geometry::{make_grid, seeded_rng};
use convexalg::sgcore::shift_functional;
use convexalg::univariate::{bernstein_1d, convex_exp_approx, prop3_pipeline, MonotoneGenerator};
use convexalg::{AffineFunc, ConvexBody, ExpPoly, FunctionExpr, Polynomial};
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn bowl() -> Polynomial {
    Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let body = ConvexBody::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).map_err(err)?;
    let r = convex_exp_approx(&bowl(), &body, 0.5).map_err(err)?;
    let FunctionExpr::Exp(e) = &r.approximant else {
        return Err("approximant is not a pure exponential polynomial".into());
    };
    let cert = midpoint_convexity_test(&r.approximant, &body, 500, 1e-9, 1).map_err(err)?;
    let sup = linspace(0.0, 1.0, 200)
        .flat_map(|x| linspace(0.0, 1.0, 200).map(move |y| (x, y)))
        .map(|(x, y)| (e.eval(&[x, y]) - (x * x + y * y)).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    ensure(
        cert.passed() && sup <= 0.5 && secs <= 60.0,
        format!(
            "{} exp terms, midpoint {:?}, 200x200 sup error {sup:.4}, {secs:.1} s",
            e.num_terms(),
            cert.verdict
        ),
    )
}

/// `sum_r (row_r . x + c_r)^2 + b . x`.
fn random_convex_quadratic<R: Rng>(rng: &mut R) -> Polynomial {
    let mut p = Polynomial::from_affine(&AffineFunc::new(
        vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
        0.0,
    ));
    for _ in 0..2 {
        let row = AffineFunc::new(
            vec![rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)],
            rng.gen_range(-1.0..1.0),
        );
        p = p.add(&Polynomial::from_affine(&row).powi(2)).unwrap();
    }
    p
}

fn criterion_2() -> Check {
    let mut rng = seeded_rng(2);
    let mut passed = 0;
    for _ in 0..100 {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for _ in 0..2 {
            let a: f64 = rng.gen_range(-2.0..1.9);
            lo.push(a);
            hi.push(rng.gen_range(a + 0.1..=2.0));
        }
        let body = ConvexBody::boxed(lo, hi).map_err(err)?;
        let p = random_convex_quadratic(&mut rng);
        let shift = shift_functional(&p, &body, 41).map_err(err)?;
        let g: FunctionExpr = p.add(&Polynomial::from_affine(&shift)).map_err(err)?.into();
        let cert = monotone_nondecreasing_test(&g, &body.bounding_box(1.0), 41, 1e-9).map_err(err)?;
        passed += cert.passed() as usize;
    }
    ensure(passed == 100, format!("{passed}/100 shifted quadratics monotone"))
}

fn criterion_3() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, coeffs, exact) in [
        ("x", vec![0.0, 1.0], (|x: f64| x) as fn(f64) -> f64),
        ("x^2", vec![0.0, 0.0, 1.0], |x: f64| x * x),
    ] {
        let gen = MonotoneGenerator::exp(-1.0, 1.0).map_err(err)?;
        let r = prop3_pipeline(&Polynomial::univariate(&coeffs), &gen, 0.05).map_err(err)?;
        let dd = r
            .output
            .partial_derivative(0)
            .map_err(err)?
            .partial_derivative(0)
            .map_err(err)?;
        let (mut min_dd, mut sup) = (f64::INFINITY, 0.0f64);
        for x in linspace(-1.0, 1.0, 10_000) {
            min_dd = min_dd.min(dd.eval_at(&[x]));
            sup = sup.max((r.output.eval_at(&[x]) - exact(x)).abs());
        }
        ok &= r.scan_degree <= 256 && min_dd >= 0.0 && sup <= 0.05;
        notes.push(format!(
            "{name}: scan degree {} emitted {} min p'' {min_dd:.3e} error {sup:.3e}",
            r.scan_degree, r.degree
        ));
    }
    ensure(ok, notes.join("; "))
}

/// Every exponent entry is a JSON nonnegative integer.
fn exponents_are_natural(e: &ExpPoly) -> bool {
    let v: Value = serde_json::to_value(e).unwrap();
    v["terms"].as_array().unwrap().iter().all(|t| {
        let exp = t["exp"].as_array().unwrap();
        exp.len() == e.dim() && exp.iter().all(|k| k.is_u64())
    })
}

fn random_exp<R: Rng>(rng: &mut R) -> ExpPoly {
    ExpPoly::from_terms(
        2,
        (0..rng.gen_range(1..=3)).map(|_| {
            (
                vec![rng.gen_range(0..=2), rng.gen_range(0..=2)],
                rng.gen_range(-1.0..1.0),
            )
        }),
    )
    .unwrap()
}

fn criterion_4() -> Check {
    let mut rng = seeded_rng(4);
    let mut pool: Vec<ExpPoly> = (0..8).map(|_| random_exp(&mut rng)).collect();
    let mut bad = 0;
    let mut counts = [0usize; 3];
    for _ in 0..10_000 {
        let i = rng.gen_range(0..pool.len());
        let j = rng.gen_range(0..pool.len());
        let op = rng.gen_range(0..3);
        counts[op] += 1;
        let out = match op {
            0 => pool[i].add(&pool[j]).unwrap(),
            1 => pool[i].scale(rng.gen_range(-2.0..2.0)),
            _ => {
                let outer = Polynomial::from_terms(
                    2,
                    (0..3).map(|_| {
                        (
                            vec![rng.gen_range(0..=2), rng.gen_range(0..=1)],
                            rng.gen_range(-1.0..1.0),
                        )
                    }),
                )
                .unwrap();
                compose_poly(&outer, &[pool[i].clone(), pool[j].clone()]).unwrap()
            }
        };
        bad += !exponents_are_natural(&out) as usize;
        pool[i] = if out.max_exponent() > 12 || out.num_terms() > 60 {
            random_exp(&mut rng)
        } else {
            out
        };
    }
    ensure(
        bad == 0,
        format!(
            "{bad} bad exponents after 10^4 ops (add {}, scale {}, compose {})",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn pair() -> [FunctionExpr; 2] {
    [
        FunctionExpr::squared_distance(&[0.3, 0.0]),
        FunctionExpr::squared_distance(&[0.0, 0.3]),
    ]
}

fn criterion_5() -> Check {
    let [f1, f2] = pair();
    let body = ConvexBody::unit_ball(2);
    let r = find_common_direction_2d(&f1, &f2, &body, 1e-6, &[0.0, 0.0]).map_err(err)?;
    let s = r.y[0].signum();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let y_err = (s * r.y[0] - h).abs().max((s * r.y[1] - h).abs());
    let m_err = (s * r.m - 0.3 * h).abs();
    // chord minimizer of |t y - c|^2 is c . y
    let oracle = [[0.3, 0.0], [0.0, 0.3]]
        .iter()
        .map(|c| (c[0] * r.y[0] + c[1] * r.y[1] - r.m).abs())
        .fold(0.0, f64::max);
    ensure(
        y_err <= 1e-6 && m_err <= 1e-6 && r.residual <= 1e-6 && oracle <= 1e-6,
        format!(
            "y err {y_err:.2e}, m err {m_err:.2e}, residual {:.2e}, analytic residual {oracle:.2e}",
            r.residual
        ),
    )
}

fn criterion_6() -> Check {
    let f: FunctionExpr = bowl().into();
    let body = ConvexBody::unit_ball(2);
    let pc = PinnedChord::new(&body, &[1.0, 0.0], 0.0).map_err(err)?;
    let grid = make_grid(&body, 21, 6).map_err(err)?;
    let sr = separating_support(&f, &body, &pc, 0.1, &grid).map_err(err)?;
    let rep = g_eps_construct(&f, &sr, &pc, 0.1, &body, &grid).map_err(err)?;
    let g = &rep.g_eps;
    let mut rng = seeded_rng(60);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100_000 {
        let x = body.sample_point(&mut rng);
        let gap = (x[0] * x[0] + x[1] * x[1]) - g.eval_at(&x);
        lo = lo.min(gap);
        hi = hi.max(gap);
    }
    let osc = linspace(-0.31, 0.31, 1001)
        .map(|t| (g.eval_at(&[t, 0.0]) + 0.1).abs())
        .fold(0.0, f64::max);
    let cert = midpoint_convexity_test(g, &body, 500, 1e-9, 6).map_err(err)?;
    ensure(
        lo >= 0.0 && hi <= 0.2 + 1e-9 && osc <= 1e-9 && cert.passed(),
        format!(
            "f - g in [{lo:.3e}, {hi:.6}] on 10^5 points, plateau oscillation {osc:.1e}, midpoint {:?}",
            cert.verdict
        ),
    )
}

fn criterion_7() -> Check {
    let fs = pair();
    let body = ConvexBody::unit_ball(2);
    let r = theorem1b_demo(&fs, &body, 0.1, 1e-6, 7, &DemoOptions::default()).map_err(err)?;
    // witness |x - t_w y|^2 with t_w the far endpoint: bound (m - t_w)^2 / 2
    let m = r.pinned.m;
    let t_w = if m >= 0.0 { -1.0 } else { 1.0 };
    let oracle = (m - t_w).powi(2) / 2.0;
    let sound = r.soundness.samples == 100 && r.soundness.min_distance >= r.bound - 1e-9;
    ensure(
        r.bound >= 0.1 && (r.bound - oracle).abs() <= 1e-6 && (r.witness_t - t_w).abs() <= 1e-9 && sound,
        format!(
            "bound {:.6} (analytic {oracle:.6}), min sampled distance {:.6} over {} members",
            r.bound, r.soundness.min_distance, r.soundness.samples
        ),
    )
}

/// `sum_k c_k (w_k . u + b_k)^p_k` with nonnegative parameters: convex and
/// nondecreasing on the nonnegative orthant.
fn convex_nondecreasing<R: Rng>(m: usize, rng: &mut R) -> Polynomial {
    let mut g = Polynomial::zero(m);
    for _ in 0..rng.gen_range(1..=4) {
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
        let inner = Polynomial::from_affine(&AffineFunc::new(w, rng.gen_range(0.0..0.5)));
        g = g
            .add(&inner.powi(rng.gen_range(1..=4)).scale(rng.gen_range(0.0..1.0)))
            .unwrap();
    }
    g
}

/// Nonnegative convex quadratic.
fn convex_inner<R: Rng>(d: usize, rng: &mut R) -> FunctionExpr {
    let mut q = Polynomial::constant(d, rng.gen_range(0.0..0.3));
    for _ in 0..d {
        let row = AffineFunc::new(
            (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            rng.gen_range(-0.5..0.5),
        );
        q = q.add(&Polynomial::from_affine(&row).powi(2)).unwrap();
    }
    q.into()
}

fn criterion_8() -> Check {
    let mut rng = seeded_rng(8);
    let (mut failures, mut pre_failures) = (0, 0);
    for k in 0..500u64 {
        let d = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let body = ConvexBody::unit_ball(d);
        let g = convex_nondecreasing(m, &mut rng);
        let inner: Vec<FunctionExpr> = (0..m).map(|_| convex_inner(d, &mut rng)).collect();
        let pre = composition_preconditions(&g, &inner, &body, 7, 100, 1e-9, k).map_err(err)?;
        pre_failures += !pre.iter().all(|c| c.passed()) as usize;
        let composed = FunctionExpr::compose(g, inner);
        failures += !midpoint_convexity_test(&composed, &body, 500, 1e-9, k)
            .map_err(err)?
            .passed() as usize;
    }
    ensure(
        failures == 0 && pre_failures == 0,
        format!("{failures} midpoint failures, {pre_failures} precondition failures in 500 compositions"),
    )
}

fn criterion_9() -> Check {
    let mut rng = seeded_rng(9);
    let mut failures = 0;
    for k in 0..200u64 {
        let n = rng.gen_range(2..=20);
        let (a, b) = (0.0, 1.0);
        let mut slopes: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        slopes.sort_by(f64::total_cmp);
        let h = (b - a) / n as f64;
        let mut samples = vec![rng.gen_range(-1.0..1.0)];
        for s in &slopes {
            samples.push(samples.last().unwrap() + s * h);
        }
        let p: FunctionExpr = bernstein_1d(&samples, a, b).map_err(err)?.into();
        let body = ConvexBody::boxed(vec![a], vec![b]).map_err(err)?;
        failures += !midpoint_convexity_test(&p, &body, 500, 1e-9, k).map_err(err)?.passed() as usize;
    }
    let b2 = bernstein_1d(&[0.0, 0.25, 1.0], 0.0, 1.0).map_err(err)?.dense_coeffs();
    let exact = [0.0, 0.5, 0.5];
    let dev = (0..3)
        .map(|i| (b2.get(i).copied().unwrap_or(0.0) - exact[i]).abs())
        .fold(0.0, f64::max);
    ensure(
        failures == 0 && dev <= 1e-12 && b2.len() <= 3,
        format!("{failures}/200 nonconvex Bernstein outputs, B_2(x^2) coefficients {b2:?}"),
    )
}

fn cli_configs() -> Vec<(&'static str, String)> {
    let bowl_poly = r#"{"dim":2,"terms":[{"exp":[2,0],"coef":1},{"exp":[0,2],"coef":1}]}"#;
    let unit_box = r#"{"type":"box","lo":[0,0],"hi":[1,1]}"#;
    let disk = r#"{"type":"ball","center":[0,0],"radius":1}"#;
    let interval = r#"{"type":"box","lo":[-1],"hi":[1]}"#;
    let cube = r#"{"type":"poly","dim":1,"terms":[{"exp":[3],"coef":1}]}"#;
    let dist = |c: [f64; 2]| {
        format!(
            r#"{{"type":"poly","dim":2,"terms":[{{"exp":[2,0],"coef":1}},{{"exp":[0,2],"coef":1}},{{"exp":[1,0],"coef":{}}},{{"exp":[0,1],"coef":{}}},{{"exp":[0,0],"coef":{}}}]}}"#,
            -2.0 * c[0],
            -2.0 * c[1],
            c[0] * c[0] + c[1] * c[1]
        )
    };
    let pair = format!("[{},{}]", dist([0.3, 0.0]), dist([0.0, 0.3]));
    let affine = |c: [f64; 2]| format!(r#"{{"type":"affine","coeffs":[{},{}],"offset":0}}"#, c[0], c[1]);
    let sg = format!(
        "[{},{},{}]",
        affine([1.0, 0.0]),
        affine([0.0, 1.0]),
        affine([-1.0, -1.0])
    );
    vec![
        (
            "approx",
            format!(r#"{{"command":"approx","body":{unit_box},"polynomial":{bowl_poly},"eps":0.5}}"#),
        ),
        (
            "prop3",
            r#"{"command":"prop3","polynomial":{"dim":1,"terms":[{"exp":[2],"coef":1}]},"interval":[-1,1],"eps":0.05}"#
                .into(),
        ),
        (
            "sg-check",
            format!(
                r#"{{"command":"sg-check","body":{unit_box},"polynomial":{bowl_poly},"generators":{sg},"eps":0.5}}"#
            ),
        ),
        (
            "borsuk",
            format!(r#"{{"command":"borsuk","body":{disk},"functions":{pair}}}"#),
        ),
        (
            "counterexample",
            format!(r#"{{"command":"counterexample","body":{disk},"functions":{pair},"eps":0.1}}"#),
        ),
        (
            "convexity-test",
            format!(r#"{{"command":"convexity-test","body":{interval},"function":{cube}}}"#),
        ),
        (
            "separates-points",
            format!(r#"{{"command":"separates-points","body":{disk},"generators":{sg}}}"#),
        ),
    ]
}

/// Exit code, report bytes and `(file name, bytes)` of every CSV table.
type CliRun = (Option<i32>, Vec<u8>, Vec<(String, Vec<u8>)>);

fn run_cli(config: &Path, csv: &Path) -> Result<CliRun, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_convexalg"))
        .arg("--config")
        .arg(config)
        .arg("--emit-csv")
        .arg(csv)
        .args(["--seed", "10"])
        .output()
        .map_err(err)?;
    let mut tables: Vec<(String, Vec<u8>)> = std::fs::read_dir(csv)
        .map_err(err)?
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    tables.sort();
    Ok((out.status.code(), out.stdout, tables))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, cfg) in cli_configs() {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, cfg).map_err(err)?;
        let first = run_cli(&path, &dir.path().join(format!("{name}-a")))?;
        let second = run_cli(&path, &dir.path().join(format!("{name}-b")))?;
        let same = first == second && !first.1.is_empty() && matches!(first.0, Some(0) | Some(2));
        ok &= same;
        notes.push(format!(
            "{name}:{}{}",
            first.0.unwrap_or(-1),
            if same { "" } else { " DIFFERS" }
        ));
    }
    ensure(
        ok,
        format!(
            "identical reports and tables across two runs (exit codes {})",
            notes.join(", ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exponential approximation of x^2+y^2 on the unit square", criterion_1),
        ("shifted quadratics are coordinatewise monotone", criterion_2),
        ("univariate pipeline for x and x^2 with h = e^x", criterion_3),
        ("exponent closure under add/scale/compose", criterion_4),
        ("common direction for two shifted bowls", criterion_5),
        ("g_eps sandwich, plateau and convexity", criterion_6),
        ("nonapproximability bound and its soundness", criterion_7),
        ("convex monotone compositions stay convex", criterion_8),
        ("Bernstein operator preserves convexity", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += result.is_err() as usize;
        println!("criterion {:>2} {tag} [{secs:.1}s] {name}: {detail}", k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
