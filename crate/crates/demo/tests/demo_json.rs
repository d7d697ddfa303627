use convexalg_demo::{borsuk_scan, counterexample_profile, prop3_curve};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn curve_tracks_the_parabola() {
    let r = parse(prop3_curve(vec![0.0, 0.0, 1.0], -1.0, 1.0, 0.05, 101));
    let (x, p, out, dd) = (
        floats(&r["x"]),
        floats(&r["p"]),
        floats(&r["output"]),
        floats(&r["output_dd"]),
    );
    assert_eq!(x.len(), 101);
    for i in 0..x.len() {
        assert!((p[i] - x[i] * x[i]).abs() < 1e-15);
        assert!((out[i] - p[i]).abs() <= 0.05);
        assert!(dd[i] >= 0.0);
    }
}

#[test]
fn scan_finds_the_diagonal() {
    let r = parse(borsuk_scan(vec![0.3, 0.0], vec![0.0, 0.3], 91));
    let y = floats(&r["y"]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((y[0].abs() - s).abs() < 1e-6 && (y[1].abs() - s).abs() < 1e-6 && y[0] * y[1] > 0.0);
    let gap = floats(&r["gap"]);
    assert!(gap.iter().any(|g| *g > 0.0) && gap.iter().any(|g| *g < 0.0));
}

#[test]
fn profile_pins_both_functions() {
    let r = parse(counterexample_profile(vec![0.3, 0.0], vec![0.0, 0.3], 0.1, 51));
    assert_eq!(r["passed"], Value::Bool(true));
    assert!(r["bound"].as_f64().unwrap() >= 0.1);
    let f = r["f"].as_array().unwrap();
    let g = r["g_eps"].as_array().unwrap();
    for (fj, gj) in f.iter().zip(g) {
        for (a, b) in floats(fj).iter().zip(floats(gj)) {
            assert!((-1e-9..=0.2 + 1e-9).contains(&(a - b)));
        }
    }
}

#[test]
fn errors_come_back_as_json() {
    let r = parse(borsuk_scan(vec![0.3], vec![0.0, 0.3], 10));
    assert!(r["error"].as_str().unwrap().contains("dimension"));
    let r = parse(prop3_curve(vec![0.0, 0.0, 1.0], 1.0, -1.0, 0.05, 10));
    assert!(r.get("error").is_some());
}
