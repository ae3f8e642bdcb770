//! Fixtures shared by the benchmarks.

use std::f64::consts::FRAC_PI_2;

use ncx_core::{build_mesd, GptFragment, MesdParams};

pub fn mesd(theta: f64) -> GptFragment {
    build_mesd(&MesdParams::new(theta)).expect("valid angle")
}

pub fn rotated(theta: f64) -> GptFragment {
    build_mesd(&MesdParams::new(theta).with_alpha(FRAC_PI_2)).expect("valid angle")
}

/// `n` evenly spaced angles strictly inside `(0, pi/2)`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| FRAC_PI_2 * i as f64 / (n + 1) as f64).collect()
}
