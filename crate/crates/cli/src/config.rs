//! Run configurations. Every command is a tagged JSON object; unknown
//! fields are rejected.

use std::path::PathBuf;

use convexalg::{ConvexBody, FunctionExpr, Polynomial};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Approx(ApproxConfig),
    Prop3(Prop3Config),
    SgCheck(SgCheckConfig),
    Borsuk(BorsukConfig),
    Counterexample(CounterexampleConfig),
    ConvexityTest(ConvexityTestConfig),
    SeparatesPoints(SeparatesPointsConfig),
}

fn per_axis_default() -> usize {
    41
}
fn n_pairs_default() -> usize {
    500
}
fn cert_tol_default() -> f64 {
    1e-9
}
fn search_tol_default() -> f64 {
    1e-6
}
fn profile_default() -> usize {
    201
}

/// Convex exponential-polynomial approximation of `polynomial` on `body`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxConfig {
    pub body: ConvexBody,
    pub polynomial: Polynomial,
    pub eps: f64,
    #[serde(default = "per_axis_default")]
    pub per_axis: usize,
    #[serde(default = "n_pairs_default")]
    pub n_pairs: usize,
    #[serde(default = "cert_tol_default")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Univariate approximation `P o h` on `[interval[0], interval[1]]`;
/// `generator` defaults to `e^x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prop3Config {
    pub polynomial: Polynomial,
    #[serde(default)]
    pub generator: Option<FunctionExpr>,
    pub interval: [f64; 2],
    pub eps: f64,
    #[serde(default = "profile_default")]
    pub profile_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Assembly of `polynomial` from caller-supplied generators `h_1..h_{d+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgCheckConfig {
    pub body: ConvexBody,
    pub polynomial: Polynomial,
    pub generators: Vec<FunctionExpr>,
    pub eps: f64,
    #[serde(default = "per_axis_default")]
    pub per_axis: usize,
    #[serde(default = "n_pairs_default")]
    pub n_pairs: usize,
    #[serde(default = "cert_tol_default")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Common chord minimizer of `d` functions. `z` is the regularization
/// center and defaults to the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BorsukConfig {
    pub body: ConvexBody,
    pub functions: Vec<FunctionExpr>,
    #[serde(default = "search_tol_default")]
    pub tol: f64,
    #[serde(default)]
    pub z: Option<Vec<f64>>,
    #[serde(default = "sphere_grid_default")]
    pub sphere_grid: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn sphere_grid_default() -> usize {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub body: ConvexBody,
    pub functions: Vec<FunctionExpr>,
    pub eps: f64,
    #[serde(default = "search_tol_default")]
    pub tol: f64,
    #[serde(default = "grid_per_axis_default")]
    pub grid_per_axis: usize,
    #[serde(default = "sphere_grid_default")]
    pub sphere_grid: usize,
    #[serde(default = "soundness_default")]
    pub soundness_samples: usize,
    #[serde(default = "profile_default")]
    pub profile_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn grid_per_axis_default() -> usize {
    21
}
fn soundness_default() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexityTestConfig {
    pub body: ConvexBody,
    pub function: FunctionExpr,
    #[serde(default = "n_pairs_default")]
    pub n_pairs: usize,
    #[serde(default = "cert_tol_default")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparatesPointsConfig {
    pub body: ConvexBody,
    pub generators: Vec<FunctionExpr>,
    #[serde(default = "n_pairs_default")]
    pub n_pairs: usize,
    #[serde(default = "cert_tol_default")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Applies `$body` to the inner config of every variant.
macro_rules! each_variant {
    ($cfg:expr, $c:ident => $body:expr) => {
        match $cfg {
            RunConfig::Approx($c) => $body,
            RunConfig::Prop3($c) => $body,
            RunConfig::SgCheck($c) => $body,
            RunConfig::Borsuk($c) => $body,
            RunConfig::Counterexample($c) => $body,
            RunConfig::ConvexityTest($c) => $body,
            RunConfig::SeparatesPoints($c) => $body,
        }
    };
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Approx(_) => "approx",
            RunConfig::Prop3(_) => "prop3",
            RunConfig::SgCheck(_) => "sg-check",
            RunConfig::Borsuk(_) => "borsuk",
            RunConfig::Counterexample(_) => "counterexample",
            RunConfig::ConvexityTest(_) => "convexity-test",
            RunConfig::SeparatesPoints(_) => "separates-points",
        }
    }

    pub fn seed(&self) -> u64 {
        each_variant!(self, c => c.seed)
    }

    pub fn set_seed(&mut self, seed: u64) {
        each_variant!(self, c => c.seed = seed)
    }

    pub fn output(&self) -> Option<&PathBuf> {
        each_variant!(self, c => c.output.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let ok = r#"{"command":"convexity-test","body":{"type":"box","lo":[-1],"hi":[1]},
            "function":{"type":"poly","dim":1,"terms":[{"exp":[2],"coef":1}]}}"#;
        let cfg: RunConfig = serde_json::from_str(ok).unwrap();
        assert_eq!(cfg.command(), "convexity-test");
        assert_eq!(cfg.seed(), 0);
        let bad = ok.replace("\"n_pairs\"", "").replacen('{', r#"{"colour":1,"#, 1);
        assert!(serde_json::from_str::<RunConfig>(&bad).is_err());
        let unknown = ok.replace("convexity-test", "integrate");
        assert!(serde_json::from_str::<RunConfig>(&unknown).is_err());
    }
}
