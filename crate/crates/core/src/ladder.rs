//! Series/shunt ladder assembly and two-port cascade analysis.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mbvd::{derive_motional, parallel_combine, MbvdParams};
use crate::twoport::{self, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Series,
    Shunt,
}

/// One ladder element: a resonator (or `multiplicity` identical copies in
/// parallel) placed in series between the ports or shunted to ground.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub placement: Placement,
    pub resonator: MbvdParams,
    pub multiplicity: u32,
    /// Stages with equal labels describe the same physical resonator design.
    pub label: String,
}

impl Stage {
    pub fn new(placement: Placement, label: impl Into<String>, resonator: MbvdParams) -> Self {
        Stage {
            placement,
            resonator,
            multiplicity: 1,
            label: label.into(),
        }
    }

    pub fn series(label: impl Into<String>, resonator: MbvdParams) -> Self {
        Stage::new(Placement::Series, label, resonator)
    }

    pub fn shunt(label: impl Into<String>, resonator: MbvdParams) -> Self {
        Stage::new(Placement::Shunt, label, resonator)
    }

    pub fn with_multiplicity(mut self, m: u32) -> Self {
        self.multiplicity = m;
        self
    }

    /// Electrical equivalent of the parallel copies.
    pub fn combined(&self) -> Result<MbvdParams> {
        parallel_combine(&self.resonator, self.multiplicity)
    }

    pub fn validate(&self) -> Result<()> {
        if self.multiplicity == 0 {
            return Err(Error::param("multiplicity", "must be >= 1"));
        }
        self.resonator.validate()
    }
}

/// ABCD matrix of a single stage at `f`.
pub fn stage_abcd(stage: &Stage, f: f64) -> Mat2 {
    let p = stage.combined().expect("stage_abcd: invalid stage");
    let y = p.admittance(f);
    match stage.placement {
        Placement::Series => Mat2::series(y.inv()),
        Placement::Shunt => Mat2::shunt(y),
    }
}

/// An ordered ladder (port-1 side first) referenced to `z0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderDesign {
    pub stages: Vec<Stage>,
    pub z0: f64,
}

/// Precomputed per-stage constants for fast repeated evaluation.
struct Prepared {
    placement: Placement,
    p: MbvdParams,
    cm: f64,
    lm: f64,
    rm: f64,
}

impl Prepared {
    #[inline]
    fn admittance(&self, f: f64) -> Complex64 {
        let w = 2.0 * std::f64::consts::PI * f;
        let zm = Complex64::new(self.rm, w * self.lm - 1.0 / (w * self.cm));
        let y_core = Complex64::new(0.0, w * self.p.c0) + zm.inv();
        (Complex64::new(self.p.rs, w * self.p.ls) + y_core.inv()).inv()
    }
}

impl LadderDesign {
    pub fn new(stages: Vec<Stage>, z0: f64) -> Result<Self> {
        let d = LadderDesign { stages, z0 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::EmptyDesign);
        }
        if !(self.z0 > 0.0 && self.z0.is_finite()) {
            return Err(Error::param("z0", format!("must be > 0, got {}", self.z0)));
        }
        for s in &self.stages {
            s.validate()?;
        }
        Ok(())
    }

    fn prepare(&self) -> Vec<Prepared> {
        self.stages
            .iter()
            .map(|s| {
                let p = s.combined().expect("invalid stage");
                let m = derive_motional(&p).expect("invalid stage");
                Prepared {
                    placement: s.placement,
                    p,
                    cm: m.cm,
                    lm: m.lm,
                    rm: m.rm,
                }
            })
            .collect()
    }

    fn abcd_prepared(prep: &[Prepared], f: f64) -> Mat2 {
        prep.iter().fold(Mat2::IDENTITY, |acc, st| {
            let y = st.admittance(f);
            let m = match st.placement {
                Placement::Series => Mat2::series(y.inv()),
                Placement::Shunt => Mat2::shunt(y),
            };
            acc * m
        })
    }

    /// Product of the stage ABCD matrices at `f`.
    pub fn abcd(&self, f: f64) -> Mat2 {
        Self::abcd_prepared(&self.prepare(), f)
    }

    /// S-matrix at a single frequency.
    pub fn s_at(&self, f: f64) -> Mat2 {
        twoport::abcd_to_s(&self.abcd(f), self.z0)
    }

    /// Simulates the ladder over `grid`.
    pub fn cascade(&self, grid: &FrequencyGrid) -> FrequencyResponse {
        let prep = self.prepare();
        let z0 = self.z0;
        let s: Vec<Mat2> = grid
            .points()
            .par_iter()
            .map(|&f| twoport::abcd_to_s(&Self::abcd_prepared(&prep, f), z0))
            .collect();
        FrequencyResponse::from_matrices(grid.clone(), &s, z0)
    }

    /// The same ladder seen from the other port.
    pub fn reversed(&self) -> LadderDesign {
        let mut stages = self.stages.clone();
        stages.reverse();
        LadderDesign {
            stages,
            z0: self.z0,
        }
    }

    /// Replaces every multiplicity-`m` stage with `m` adjacent single copies.
    /// Only meaningful for shunt stages; series copies would be cascaded, not paralleled.
    pub fn expand_multiplicity(&self) -> LadderDesign {
        let mut stages = Vec::new();
        for s in &self.stages {
            if s.placement == Placement::Shunt && s.multiplicity > 1 {
                for _ in 0..s.multiplicity {
                    stages.push(Stage {
                        multiplicity: 1,
                        ..s.clone()
                    });
                }
            } else {
                stages.push(s.clone());
            }
        }
        LadderDesign {
            stages,
            z0: self.z0,
        }
    }

    /// Distinct labels in first-appearance order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.stages {
            if !out.contains(&s.label) {
                out.push(s.label.clone());
            }
        }
        out
    }

    /// Resonator of the first stage carrying `label`.
    pub fn resonator(&self, label: &str) -> Option<&MbvdParams> {
        self.stages
            .iter()
            .find(|s| s.label == label)
            .map(|s| &s.resonator)
    }

    /// Placement of the first stage carrying `label`.
    pub fn placement(&self, label: &str) -> Option<Placement> {
        self.stages
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.placement)
    }

    /// Sets the resonator of every stage carrying `label`.
    pub fn set_resonator(&mut self, label: &str, p: MbvdParams) {
        for s in self.stages.iter_mut().filter(|s| s.label == label) {
            s.resonator = p;
        }
    }

    /// Applies `f` to every stage resonator.
    pub fn map_resonators(&self, mut f: impl FnMut(&Stage) -> MbvdParams) -> LadderDesign {
        let stages = self
            .stages
            .iter()
            .map(|s| Stage {
                resonator: f(s),
                ..s.clone()
            })
            .collect();
        LadderDesign {
            stages,
            z0: self.z0,
        }
    }
}

/// Strictly increasing list of analysis frequencies (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    /// Uniform grid from `start` to `stop` inclusive.
    pub fn uniform(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start > 0.0 && stop > start && step > 0.0) || !stop.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need 0 < start < stop and step > 0 (start={start}, stop={stop}, step={step})"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if n < 2 {
            return Err(Error::InvalidGrid("fewer than two points".into()));
        }
        let points = (0..n).map(|i| start + i as f64 * step).collect();
        Ok(FrequencyGrid { points })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid("fewer than two points".into()));
        }
        if !(points[0] > 0.0) {
            return Err(Error::InvalidGrid("first frequency must be > 0".into()));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(format!(
                "frequencies not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(FrequencyGrid { points })
    }

    /// 1–40 GHz at 10 MHz.
    pub fn default_simulation() -> Self {
        FrequencyGrid::uniform(1e9, 40e9, 10e6).expect("static grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn stop(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Two-port S-parameters sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub grid: FrequencyGrid,
    pub s11: Vec<Complex64>,
    pub s21: Vec<Complex64>,
    pub s12: Vec<Complex64>,
    pub s22: Vec<Complex64>,
    pub z0: f64,
}

impl FrequencyResponse {
    pub fn from_matrices(grid: FrequencyGrid, s: &[Mat2], z0: f64) -> Self {
        FrequencyResponse {
            grid,
            s11: s.iter().map(|m| m.a).collect(),
            s12: s.iter().map(|m| m.b).collect(),
            s21: s.iter().map(|m| m.c).collect(),
            s22: s.iter().map(|m| m.d).collect(),
            z0,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn freqs(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn matrix(&self, i: usize) -> Mat2 {
        Mat2::new(self.s11[i], self.s12[i], self.s21[i], self.s22[i])
    }

    /// Insertion loss `-20·log10|s21|` at grid index `i`.
    pub fn il_db(&self, i: usize) -> f64 {
        magnitude_to_loss_db(self.s21[i].norm())
    }

    /// Return loss `-20·log10|s11|` at grid index `i`.
    pub fn rl_db(&self, i: usize) -> f64 {
        magnitude_to_loss_db(self.s11[i].norm())
    }

    /// Reverse the port order (s11 ↔ s22, s21 ↔ s12).
    pub fn swapped_ports(&self) -> FrequencyResponse {
        FrequencyResponse {
            grid: self.grid.clone(),
            s11: self.s22.clone(),
            s21: self.s12.clone(),
            s12: self.s21.clone(),
            s22: self.s11.clone(),
            z0: self.z0,
        }
    }
}

/// `-20·log10(mag)`, with zero magnitude mapped to a large finite loss.
pub fn magnitude_to_loss_db(mag: f64) -> f64 {
    -20.0 * mag.max(1e-300).log10()
}

/// Per-frequency Y-matrices; `None` marks points at the conversion singularity.
pub fn s_to_y(resp: &FrequencyResponse) -> Vec<Option<Mat2>> {
    (0..resp.len())
        .map(|i| twoport::s_to_y(&resp.matrix(i), resp.z0))
        .collect()
}

/// Inverse of [`s_to_y`].
pub fn y_to_s(grid: &FrequencyGrid, ys: &[Mat2], z0: f64) -> Result<FrequencyResponse> {
    if ys.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} Y-matrices for {} grid points",
            ys.len(),
            grid.len()
        )));
    }
    let mut s = Vec::with_capacity(ys.len());
    for (y, f) in ys.iter().zip(grid.points()) {
        let m = twoport::y_to_s(y, z0).ok_or_else(|| {
            Error::InvalidGrid(format!("singular Y→S conversion at {f} Hz"))
        })?;
        s.push(m);
    }
    Ok(FrequencyResponse::from_matrices(grid.clone(), &s, z0))
}
