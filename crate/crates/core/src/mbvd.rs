//! Modified Butterworth-Van Dyke (mBVD) resonator model.
//!
//! Topology: `rs + jω·ls` in series with the parallel combination of the
//! static capacitance `c0` and the motional `rm–lm–cm` branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// π²/8, the prefactor shared by the coupling and motional-branch relations.
pub const PI2_OVER_8: f64 = PI * PI / 8.0;

/// Electrical description of one acoustic resonator. All quantities SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MbvdParams {
    /// Series resonance frequency (Hz).
    pub fs: f64,
    /// Electromechanical coupling as a fraction (0.17 = 17 %).
    pub k2: f64,
    /// Motional quality factor.
    pub q: f64,
    /// Static capacitance (F).
    pub c0: f64,
    /// Series parasitic resistance (Ω).
    pub rs: f64,
    /// Series parasitic inductance (H).
    pub ls: f64,
}

/// Motional branch derived from [`MbvdParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionalBranch {
    pub cm: f64,
    pub lm: f64,
    pub rm: f64,
}

/// Admittance/impedance pair at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Immittance {
    pub freq: f64,
    pub y: Complex64,
    pub z: Complex64,
}

impl MbvdParams {
    /// Builds a resonator, checking the parameter invariants.
    pub fn new(fs: f64, k2: f64, q: f64, c0: f64, rs: f64, ls: f64) -> Result<Self> {
        let p = MbvdParams {
            fs,
            k2,
            q,
            c0,
            rs,
            ls,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and > 0, got {v}")))
            }
        };
        let non_negative = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        positive("fs", self.fs)?;
        positive("q", self.q)?;
        positive("c0", self.c0)?;
        non_negative("rs", self.rs)?;
        non_negative("ls", self.ls)?;
        if !(self.k2 > 0.0 && self.k2 < 1.0) {
            return Err(Error::param("k2", format!("must lie in (0, 1), got {}", self.k2)));
        }
        Ok(())
    }

    pub fn motional(&self) -> Result<MotionalBranch> {
        derive_motional(self)
    }

    /// Parallel resonance frequency implied by `fs` and `k2`.
    pub fn fp(&self) -> f64 {
        fp_from(self.fs, self.k2)
    }

    pub fn admittance(&self, f: f64) -> Complex64 {
        admittance(self, f).y
    }

    /// Returns the same resonator with both parasitics removed.
    pub fn without_parasitics(mut self) -> Self {
        self.rs = 0.0;
        self.ls = 0.0;
        self
    }
}

/// Motional branch values: `cm = (8/π²)·c0·k2`, `lm = (π²/8)/(ωs²·c0·k2)`,
/// `rm = (π²/8)/(ωs·c0·k2·q)`.
pub fn derive_motional(p: &MbvdParams) -> Result<MotionalBranch> {
    if p.k2 <= 0.0 || !p.k2.is_finite() {
        return Err(Error::param("k2", "motional branch undefined for k2 <= 0"));
    }
    if p.c0 <= 0.0 || !p.c0.is_finite() {
        return Err(Error::param("c0", "motional branch undefined for c0 <= 0"));
    }
    if p.fs <= 0.0 || p.q <= 0.0 {
        return Err(Error::param("fs/q", "must be > 0"));
    }
    let ws = 2.0 * PI * p.fs;
    let c0k2 = p.c0 * p.k2;
    Ok(MotionalBranch {
        cm: c0k2 / PI2_OVER_8,
        lm: PI2_OVER_8 / (ws * ws * c0k2),
        rm: PI2_OVER_8 / (ws * c0k2 * p.q),
    })
}

/// `fp = fs·sqrt(1 + (8/π²)·k2)`.
pub fn fp_from(fs: f64, k2: f64) -> f64 {
    fs * (1.0 + k2 / PI2_OVER_8).sqrt()
}

/// `k2 = (π²/8)·[(fp/fs)² − 1]`.
pub fn k2_from(fs: f64, fp: f64) -> Result<f64> {
    if !(fs > 0.0) {
        return Err(Error::param("fs", format!("must be > 0, got {fs}")));
    }
    if fp < fs {
        return Err(Error::param(
            "fp",
            format!("fp ({fp}) below fs ({fs}) is non-physical"),
        ));
    }
    let r = fp / fs;
    Ok(PI2_OVER_8 * (r * r - 1.0))
}

#[inline]
fn admittance_with(p: &MbvdParams, m: &MotionalBranch, f: f64) -> Complex64 {
    let w = 2.0 * PI * f;
    let j = Complex64::i();
    let z_motional = Complex64::new(m.rm, w * m.lm - 1.0 / (w * m.cm));
    let y_core = j * (w * p.c0) + z_motional.inv();
    (Complex64::new(p.rs, w * p.ls) + y_core.inv()).inv()
}

/// Complex admittance of the resonator at `f` (Hz).
///
/// Parameters that fail [`derive_motional`] (k2 or c0 not positive) are a
/// programming error here; validate first.
pub fn admittance(p: &MbvdParams, f: f64) -> Immittance {
    let m = derive_motional(p).expect("admittance: invalid mBVD parameters");
    let y = admittance_with(p, &m, f);
    Immittance {
        freq: f,
        y,
        z: y.inv(),
    }
}

/// Admittance over a frequency list; identical to calling [`admittance`] per point.
pub fn admittance_grid(p: &MbvdParams, freqs: &[f64]) -> Vec<Complex64> {
    let m = derive_motional(p).expect("admittance_grid: invalid mBVD parameters");
    freqs.iter().map(|&f| admittance_with(p, &m, f)).collect()
}

/// Electrical equivalent of `m` identical resonators connected in parallel.
pub fn parallel_combine(p: &MbvdParams, m: u32) -> Result<MbvdParams> {
    if m == 0 {
        return Err(Error::param("multiplicity", "must be >= 1"));
    }
    let mf = f64::from(m);
    Ok(MbvdParams {
        c0: p.c0 * mf,
        rs: p.rs / mf,
        ls: p.ls / mf,
        ..*p
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_series() -> MbvdParams {
        MbvdParams::new(21e9, 0.17, 80.0, 48e-15, 3.0, 0.2e-9).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn motional_table1_series() {
        let m = derive_motional(&table1_series()).unwrap();
        assert!(rel(m.cm, 6.61e-15) < 2e-3, "cm = {}", m.cm);
        assert!(rel(m.lm, 8.68e-9) < 2e-3, "lm = {}", m.lm);
        assert!(rel(m.rm, 14.3) < 3e-3, "rm = {}", m.rm);
    }

    #[test]
    fn motional_identity_case() {
        let q = 37.0;
        let p = MbvdParams {
            fs: 1.0 / (2.0 * PI),
            k2: PI2_OVER_8,
            q,
            c0: 1.0,
            rs: 0.0,
            ls: 0.0,
        };
        let m = derive_motional(&p).unwrap();
        assert!((m.cm - 1.0).abs() < 1e-15);
        assert!((m.lm - 1.0).abs() < 1e-15);
        assert!((m.rm - 1.0 / q).abs() < 1e-15);
    }

    #[test]
    fn motional_table2_series() {
        let p = MbvdParams::new(22.13e9, 0.165, 80.0, 77e-15, 3.5, 0.1e-9).unwrap();
        let m = derive_motional(&p).unwrap();
        assert!(rel(m.cm, 10.3e-15) < 3e-3, "cm = {}", m.cm);
        assert!(rel(m.lm, 5.03e-9) < 3e-3, "lm = {}", m.lm);
        assert!(rel(m.rm, 8.74) < 3e-3, "rm = {}", m.rm);
    }

    #[test]
    fn motional_rejects_zero_k2_or_c0() {
        let mut p = table1_series();
        p.k2 = 0.0;
        assert!(derive_motional(&p).is_err());
        let mut p = table1_series();
        p.c0 = 0.0;
        assert!(derive_motional(&p).is_err());
    }

    #[test]
    fn fp_examples() {
        assert!((fp_from(21e9, 0.17) / 1e9 - 22.40).abs() < 0.005);
        assert_eq!(fp_from(5e9, 0.0), 5e9);
        assert!((fp_from(17.9e9, 0.425) / 1e9 - 20.76).abs() < 0.005);
    }

    #[test]
    fn k2_examples() {
        let fp = fp_from(21e9, 0.17);
        assert!(rel(k2_from(21e9, fp).unwrap(), 0.17) < 1e-12);
        assert_eq!(k2_from(7e9, 7e9).unwrap(), 0.0);
        // fs/fp of the 22.6 % shunt resonator.
        let fp = fp_from(19.1e9, 0.226);
        assert!((fp / 1e9 - 20.776).abs() < 1e-3);
        assert!((k2_from(19.1e9, fp).unwrap() - 0.226).abs() < 1e-12);
        assert!(k2_from(21e9, 20e9).is_err());
    }

    #[test]
    fn admittance_at_fs_is_real_one_over_rm() {
        let p = table1_series().without_parasitics();
        let m = p.motional().unwrap();
        let y = admittance(&p, p.fs).y;
        // The static branch still contributes jωc0 at fs.
        let w = 2.0 * PI * p.fs;
        let expect = Complex64::new(1.0 / m.rm, w * p.c0);
        assert!((y - expect).norm() / expect.norm() < 1e-12);
        let motional_only = y - Complex64::new(0.0, w * p.c0);
        assert!((motional_only.norm() - 0.0699).abs() < 5e-4);
        assert!(motional_only.im.abs() < 1e-9 * motional_only.re);
    }

    #[test]
    fn series_inductance_pulls_peak_down() {
        let p = table1_series();
        let freqs: Vec<f64> = (0..4000).map(|i| 19e9 + i as f64 * 1e6).collect();
        let ys = admittance_grid(&p, &freqs);
        let (imax, _) = ys
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        let peak = freqs[imax];
        assert!(peak < 21e9, "peak {peak}");
        // Lossless oracle: series resonance of ls with the core reactance.
        let m = p.motional().unwrap();
        let reactance = |f: f64| {
            let w = 2.0 * PI * f;
            let core = (Complex64::new(0.0, w * p.c0)
                + Complex64::new(0.0, w * m.lm - 1.0 / (w * m.cm)).inv())
            .inv();
            w * p.ls + core.im
        };
        let shifted = crate::numeric::bisect(reactance, 15e9, p.fs, 1e3).unwrap();
        assert!((peak - shifted).abs() < 150e6, "peak {peak}, predicted {shifted}");
    }

    #[test]
    fn low_frequency_limit_is_a_capacitor() {
        let p = table1_series();
        let m = p.motional().unwrap();
        let f = 1e3;
        let y = admittance(&p, f).y;
        // Far below fs the motional branch is just cm, in parallel with c0.
        let yc = Complex64::new(0.0, 2.0 * PI * f * (p.c0 + m.cm));
        assert!((y - yc).norm() / yc.norm() < 1e-3);
        let static_only = Complex64::new(0.0, 2.0 * PI * f * p.c0);
        assert!(((y - static_only).norm() / static_only.norm() - p.k2 / PI2_OVER_8).abs() < 1e-3);
    }

    #[test]
    fn grid_equals_pointwise() {
        let p = table1_series();
        let freqs: Vec<f64> = (1..200).map(|i| i as f64 * 1.7e8).collect();
        let ys = admittance_grid(&p, &freqs);
        for (f, y) in freqs.iter().zip(&ys) {
            assert_eq!(admittance(&p, *f).y, *y);
        }
    }

    #[test]
    fn parallel_combine_examples() {
        let split = MbvdParams::new(20.5e9, 0.175, 80.0, 32.5e-15, 2.5, 0.05e-9).unwrap();
        let c = parallel_combine(&split, 4).unwrap();
        assert!(rel(c.c0, 130e-15) < 1e-12);
        assert_eq!(parallel_combine(&split, 1).unwrap(), split);
        assert!(parallel_combine(&split, 0).is_err());

        let p = MbvdParams::new(21e9, 0.17, 80.0, 48e-15, 3.0, 0.2e-9).unwrap();
        let d = parallel_combine(&p, 2).unwrap();
        assert!(rel(d.c0, 96e-15) < 1e-15);
        assert!(rel(d.rs, 1.5) < 1e-15);
        // Y-summation oracle at scattered frequencies.
        for i in 0..100 {
            let f = 1e9 + (i as f64 * 0.6180339887).fract() * 39e9;
            let sum = p.admittance(f) + p.admittance(f);
            assert!((d.admittance(f) - sum).norm() / sum.norm() < 1e-12);
        }
    }

    #[test]
    fn higher_q_lowers_rm() {
        let mut p = table1_series();
        let mut last = f64::INFINITY;
        for q in [10.0, 20.0, 80.0, 200.0, 1e4] {
            p.q = q;
            let rm = p.motional().unwrap().rm;
            assert!(rm < last);
            last = rm;
        }
    }
}
