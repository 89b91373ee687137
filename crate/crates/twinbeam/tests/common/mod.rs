#![allow(dead_code)]

use twinbeam::config::SourceConfig;
use twinbeam::scenario::Scenario;
use twinbeam::width::Profile1D;

/// Coarse grids and a narrow waist: builds in well under a second.
pub const SMALL: &str = r#"
[pump]
waist_m = 2e-4

[coupling]
k = 0.2

[grid]
n_omega = 64
n_k = 64

[sweep]
p_min_w = 1e-6
p_max_w = 1.0
points = 7
"#;

pub fn small_config() -> SourceConfig {
    SourceConfig::from_toml_str(SMALL).unwrap()
}

pub fn small_scenario() -> Scenario {
    Scenario::new(small_config()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn profile(axis: Vec<f64>, f: impl Fn(f64) -> f64) -> Profile1D {
    let values = axis.iter().map(|&x| f(x)).collect();
    Profile1D::new(axis, values, "1")
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
