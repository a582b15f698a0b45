#![allow(dead_code)]

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use xbar_core::{Complex64, FrequencyResponse, MbvdParams};

/// Adds complex Gaussian noise with `E|n|² = sigma²` to s11, s21 and s22
/// (s12 follows s21 so the data stays reciprocal).
pub fn add_complex_noise(resp: &FrequencyResponse, sigma: f64, seed: u64) -> FrequencyResponse {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma / 2f64.sqrt()).unwrap();
    let mut out = resp.clone();
    for i in 0..out.len() {
        for s in [&mut out.s11[i], &mut out.s21[i], &mut out.s22[i]] {
            *s += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
        out.s12[i] = out.s21[i];
    }
    out
}

pub fn mbvd_params() -> impl Strategy<Value = MbvdParams> {
    (
        5e9..40e9f64,
        0.01..0.5f64,
        10.0..1000.0f64,
        10e-15..500e-15f64,
        0.0..5.0f64,
        0.0..0.5e-9f64,
    )
        .prop_map(|(fs, k2, q, c0, rs, ls)| MbvdParams { fs, k2, q, c0, rs, ls })
}
