//! Series/parallel resonance, coupling, Q and c0 from a resonator two-port,
//! using the device admittance `Y = −y21`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ladder::{s_to_y, FrequencyResponse};
use crate::mbvd::{k2_from, PI2_OVER_8};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonatorExtraction {
    pub fs: f64,
    pub fp: f64,
    pub k2: f64,
    pub q3db: f64,
    pub c0_est: f64,
}

impl ResonatorExtraction {
    pub fn report(&self) -> Vec<(String, String)> {
        vec![
            ("fs_hz".into(), format!("{:.6e}", self.fs)),
            ("fp_hz".into(), format!("{:.6e}", self.fp)),
            ("k2".into(), format!("{:.6}", self.k2)),
            ("q3db".into(), format!("{:.3}", self.q3db)),
            ("c0_f".into(), format!("{:.6e}", self.c0_est)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Off-resonance window for the c0 estimate, as fractions of fs.
    pub c0_window: (f64, f64),
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            c0_window: (0.5, 0.8),
        }
    }
}

/// Vertex of the parabola through three samples, clamped to the outer pair.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return x[1];
    }
    // y = y0 + d1·(x − x0) + curv·(x − x0)(x − x1)
    let v = 0.5 * (x[0] + x[1]) - d1 / (2.0 * curv);
    v.clamp(x[0], x[2])
}

/// Linear crossing of `level` between samples `i` and `j`.
fn crossing(f: &[f64], v: &[f64], i: usize, j: usize, level: f64) -> f64 {
    let t = (level - v[i]) / (v[j] - v[i]);
    f[i] + t * (f[j] - f[i])
}

pub fn extract_resonator(resp: &FrequencyResponse, opts: &ExtractOptions) -> Result<ResonatorExtraction> {
    let f = resp.freqs();
    let n = f.len();
    if n < 5 {
        return Err(Error::NoResonance(format!("{n} samples are too few")));
    }
    let y: Vec<Complex64> = s_to_y(resp)
        .into_iter()
        .zip(f)
        .map(|(m, &fi)| {
            m.map(|m| -m.c).ok_or_else(|| {
                Error::NoResonance(format!("Y matrix undefined at {fi} Hz (shunt-only two-port?)"))
            })
        })
        .collect::<Result<_>>()?;
    let mag2: Vec<f64> = y.iter().map(|v| v.norm_sqr()).collect();

    let i_s = (0..n).max_by(|&a, &b| mag2[a].total_cmp(&mag2[b])).unwrap();
    if i_s == 0 || i_s == n - 1 {
        return Err(Error::NoResonance("admittance maximum at the band edge".into()));
    }
    let i_p = (i_s + 1..n)
        .min_by(|&a, &b| mag2[a].total_cmp(&mag2[b]))
        .unwrap();
    if i_p == n - 1 {
        return Err(Error::NoResonance("no admittance minimum above fs".into()));
    }
    // Near a resonance the reactance is locally linear, so |Z|² (at fs) and
    // |Y|² (at fp) are locally parabolic.
    let z2: Vec<f64> = mag2.iter().map(|m| 1.0 / m).collect();
    let tri = |i: usize| [f[i - 1], f[i], f[i + 1]];
    let fs = parabola_vertex(tri(i_s), [z2[i_s - 1], z2[i_s], z2[i_s + 1]]);
    let fp = parabola_vertex(tri(i_p), [mag2[i_p - 1], mag2[i_p], mag2[i_p + 1]]);
    if !(fp > fs) {
        return Err(Error::NoResonance(format!("fp {fp} Hz not above fs {fs} Hz")));
    }
    let k2 = k2_from(fs, fp)?;

    let (w0, w1) = opts.c0_window;
    let est: Vec<f64> = f
        .iter()
        .zip(&y)
        .filter(|(fi, _)| **fi >= w0 * fs && **fi <= w1 * fs)
        .map(|(&fi, yi)| {
            let x = fi / fs;
            yi.im / (2.0 * PI * fi) / (1.0 + k2 / PI2_OVER_8 / (1.0 - x * x))
        })
        .collect();
    if est.is_empty() {
        return Err(Error::NoResonance(format!(
            "no samples in the c0 window [{w0}, {w1}]·fs"
        )));
    }
    let c0_est = est.iter().sum::<f64>() / est.len() as f64;
    // Q from the motional resonance alone: removing the static branch makes
    // the peak a plain series-RLC response, whose half-power width is exact.
    let ym2: Vec<f64> = f
        .iter()
        .zip(&y)
        .map(|(&fi, yi)| (yi - Complex64::new(0.0, 2.0 * PI * fi * c0_est)).norm_sqr())
        .collect();
    let i_m = (1..n - 1)
        .filter(|&i| (f[i] - fs).abs() <= (fp - fs))
        .max_by(|&a, &b| ym2[a].total_cmp(&ym2[b]))
        .unwrap_or(i_s);
    let half = 0.5 * ym2[i_m];
    let lo = (0..i_m).rev().find(|&i| ym2[i] <= half);
    let hi = (i_m + 1..n).find(|&i| ym2[i] <= half);
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::NoResonance("3-dB points of the peak outside the data".into()));
    };
    let width = crossing(f, &ym2, hi - 1, hi, half) - crossing(f, &ym2, lo, lo + 1, half);
    let q3db = fs / width;

    Ok(ResonatorExtraction {
        fs,
        fp,
        k2,
        q3db,
        c0_est,
    })
}
