//! Thickness dispersion of the A1 resonance, `fs(t) = a/(t + offset) + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect;

/// Thickness range (nm) over which a fitted model is trusted by default.
pub const DEFAULT_VALIDITY_NM: (f64, f64) = (60.0, 130.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionModel {
    /// GHz·nm
    pub a: f64,
    /// GHz
    pub b: f64,
    /// Additive wafer-thickness correction (nm), applied before evaluation.
    pub offset_nm: f64,
    /// `(t nm, fs GHz)` pairs the model was fitted to.
    pub anchors: Vec<(f64, f64)>,
    pub validity_nm: (f64, f64),
}

/// Least-squares fit of `fs = a/t + b` (linear in `1/t`).
pub fn fit_dispersion(anchors: &[(f64, f64)]) -> Result<DispersionModel> {
    let mut ts: Vec<f64> = anchors.iter().map(|a| a.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 2 {
        return Err(Error::InsufficientAnchors(format!(
            "dispersion fit needs >= 2 distinct thicknesses, got {}",
            ts.len()
        )));
    }
    if anchors.iter().any(|&(t, fs)| !(t > 0.0 && fs > 0.0)) {
        return Err(Error::param("dispersion anchor", "t and fs must be > 0"));
    }
    let n = anchors.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, fs) in anchors {
        let x = 1.0 / t;
        sx += x;
        sy += fs;
        sxx += x * x;
        sxy += x * fs;
    }
    let a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let b = (sy - a * sx) / n;
    if !(a > 0.0) {
        return Err(Error::param(
            "dispersion anchors",
            "fitted fs(t) is not decreasing in thickness",
        ));
    }
    Ok(DispersionModel {
        a,
        b,
        offset_nm: 0.0,
        anchors: anchors.to_vec(),
        validity_nm: DEFAULT_VALIDITY_NM,
    })
}

impl DispersionModel {
    /// Pure reciprocal law `fs = a/t`, under which frequency scales exactly with 1/t.
    pub fn reciprocal(a: f64) -> Self {
        DispersionModel {
            a,
            b: 0.0,
            offset_nm: 0.0,
            anchors: Vec::new(),
            validity_nm: DEFAULT_VALIDITY_NM,
        }
    }

    pub fn with_validity(mut self, lo_nm: f64, hi_nm: f64) -> Self {
        self.validity_nm = (lo_nm, hi_nm);
        self
    }

    pub fn fs_ghz(&self, t_nm: f64) -> f64 {
        self.a / (t_nm + self.offset_nm) + self.b
    }

    pub fn fs_hz(&self, t_nm: f64) -> f64 {
        self.fs_ghz(t_nm) * 1e9
    }

    pub fn in_validity(&self, t_nm: f64) -> bool {
        t_nm >= self.validity_nm.0 && t_nm <= self.validity_nm.1
    }

    pub fn check_validity(&self, t_nm: f64) -> Result<()> {
        if self.in_validity(t_nm) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what: "thickness (nm)",
                value: t_nm,
                lo: self.validity_nm.0,
                hi: self.validity_nm.1,
            })
        }
    }

    /// Relative residual `(model − anchor)/anchor` per anchor.
    pub fn residuals(&self) -> Vec<f64> {
        self.anchors
            .iter()
            .map(|&(t, fs)| (self.fs_ghz(t) - fs) / fs)
            .collect()
    }

    /// Thickness giving `fs_hz`, by bisection over the validity range to 1e-4 nm.
    pub fn thickness_for_fs(&self, fs_hz: f64) -> Result<f64> {
        let target = fs_hz / 1e9;
        let (lo, hi) = self.validity_nm;
        bisect(|t| self.fs_ghz(t) - target, lo, hi, 1e-4).ok_or(Error::OutOfRange {
            what: "fs (Hz)",
            value: fs_hz,
            lo: self.fs_hz(hi),
            hi: self.fs_hz(lo),
        })
    }

    /// Sets `offset_nm` so that a resonator of nominal thickness `t_nm`
    /// resonates at the measured `fs_hz`.
    pub fn calibrate_offset(&mut self, t_nm: f64, fs_hz: f64) -> Result<()> {
        let excess = fs_hz / 1e9 - self.b;
        if !(excess > 0.0) {
            return Err(Error::param("fs", "below the model asymptote"));
        }
        self.offset_nm = self.a / excess - t_nm;
        Ok(())
    }
}
