//! mBVD ladder fitting to two-port S-parameters.
//!
//! Every distinct label is one share group: all stages carrying it use the
//! same parameter values, so they stay bit-identical throughout the fit.

use rayon::prelude::*;
use serde::Serialize;

use super::lm::{self, LmOptions, LmStatus};
use crate::error::{Error, Result};
use crate::ladder::{FrequencyGrid, FrequencyResponse, LadderDesign};
use crate::mbvd::MbvdParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    Fs,
    K2,
    Q,
    C0,
    Rs,
    Ls,
}

impl ParamKind {
    pub const ALL: [ParamKind; 6] = [
        ParamKind::Fs,
        ParamKind::K2,
        ParamKind::Q,
        ParamKind::C0,
        ParamKind::Rs,
        ParamKind::Ls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Fs => "fs",
            ParamKind::K2 => "k2",
            ParamKind::Q => "q",
            ParamKind::C0 => "c0",
            ParamKind::Rs => "rs",
            ParamKind::Ls => "ls",
        }
    }

    fn get(self, p: &MbvdParams) -> f64 {
        match self {
            ParamKind::Fs => p.fs,
            ParamKind::K2 => p.k2,
            ParamKind::Q => p.q,
            ParamKind::C0 => p.c0,
            ParamKind::Rs => p.rs,
            ParamKind::Ls => p.ls,
        }
    }

    fn set(self, p: &mut MbvdParams, v: f64) {
        match self {
            ParamKind::Fs => p.fs = v,
            ParamKind::K2 => p.k2 = v,
            ParamKind::Q => p.q = v,
            ParamKind::C0 => p.c0 = v,
            ParamKind::Rs => p.rs = v,
            ParamKind::Ls => p.ls = v,
        }
    }

    /// Scale used when the initial value is zero.
    fn unit(self) -> f64 {
        match self {
            ParamKind::Rs => 1.0,
            ParamKind::Ls => 0.1e-9,
            _ => 1.0,
        }
    }
}

/// Bounds as multiples of each initial value, in [`ParamKind::ALL`] order.
/// For a zero initial value the upper bound multiplies the kind's unit
/// (1 Ω, 0.1 nH) instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitBounds {
    pub relative: [(f64, f64); 6],
}

impl Default for FitBounds {
    fn default() -> Self {
        FitBounds {
            relative: [
                (0.8, 1.2),
                (0.5, 2.0),
                (0.25, 4.0),
                (0.5, 2.0),
                (0.0, 10.0),
                (0.0, 10.0),
            ],
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitProblem {
    pub data: FrequencyResponse,
    /// Initial model; its labels define the share groups.
    pub model: LadderDesign,
    pub bounds: FitBounds,
    /// Which kinds are free, in [`ParamKind::ALL`] order.
    pub free: [bool; 6],
    /// Per-frequency weights (one per data point), default 1.
    pub weights: Option<Vec<f64>>,
    /// Inclusive frequency interval; default the whole data grid.
    pub fit_band: Option<(f64, f64)>,
    /// Points per fs scan across its bounds before the local solve (0 = off).
    pub fs_scan_points: usize,
    pub lm: LmOptions,
}

impl FitProblem {
    pub fn new(data: FrequencyResponse, model: LadderDesign) -> Self {
        FitProblem {
            data,
            model,
            bounds: FitBounds::default(),
            free: [true; 6],
            weights: None,
            fit_band: None,
            fs_scan_points: 81,
            lm: LmOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupFit {
    pub label: String,
    pub stages: Vec<usize>,
    pub params: MbvdParams,
    /// Free parameters that ended on a bound, by name.
    pub at_bound: Vec<&'static str>,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub design: LadderDesign,
    pub groups: Vec<GroupFit>,
    pub initial_residual: f64,
    pub residual: f64,
    pub iterations: usize,
    pub status: LmStatus,
    pub history: Vec<f64>,
}

impl FitResult {
    pub fn report(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("status".into(), format!("{:?}", self.status)),
            ("converged".into(), self.status.converged().to_string()),
            ("iterations".into(), self.iterations.to_string()),
            ("initial_residual".into(), format!("{:.6e}", self.initial_residual)),
            ("residual".into(), format!("{:.6e}", self.residual)),
        ];
        for g in &self.groups {
            out.push((format!("{}.at_bound", g.label), g.at_bound.join(";")));
        }
        out
    }
}

struct Slot {
    group: usize,
    kind: ParamKind,
    scale: f64,
}

pub fn fit_mbvd(problem: &FitProblem) -> Result<FitResult> {
    let model = &problem.model;
    model.validate()?;
    let data = &problem.data;
    if let Some(w) = &problem.weights {
        if w.len() != data.len() {
            return Err(Error::FitSetup(format!(
                "{} weights for {} data points",
                w.len(),
                data.len()
            )));
        }
        if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::FitSetup("weights must be finite and >= 0".into()));
        }
    }
    let (b_lo, b_hi) = problem.fit_band.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let idx: Vec<usize> = (0..data.len())
        .filter(|&i| data.freqs()[i] >= b_lo && data.freqs()[i] <= b_hi)
        .collect();
    let labels = model.labels();
    let groups: Vec<Vec<usize>> = labels
        .iter()
        .map(|l| {
            (0..model.stages.len())
                .filter(|&i| model.stages[i].label == *l)
                .collect()
        })
        .collect();

    let mut slots = Vec::new();
    let mut x0 = Vec::new();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for (g, l) in labels.iter().enumerate() {
        let p = model.resonator(l).expect("label from design");
        for (k, kind) in ParamKind::ALL.into_iter().enumerate() {
            if !problem.free[k] {
                continue;
            }
            let v = kind.get(p);
            let scale = if v > 0.0 { v } else { kind.unit() };
            let (rl, rh) = problem.bounds.relative[k];
            if !(rl <= 1.0 && rh >= 1.0) && v > 0.0 {
                return Err(Error::FitSetup(format!(
                    "bounds for {} do not contain the initial value",
                    kind.name()
                )));
            }
            slots.push(Slot { group: g, kind, scale });
            x0.push(v / scale);
            lo.push(rl);
            hi.push(rh);
        }
    }
    let n_res = 6 * idx.len();
    if slots.is_empty() {
        return Err(Error::FitSetup("no free parameters".into()));
    }
    if n_res < slots.len() {
        return Err(Error::FitSetup(format!(
            "{} points in the fit band for {} parameters",
            idx.len(),
            slots.len()
        )));
    }
    let grid = FrequencyGrid::from_points(idx.iter().map(|&i| data.freqs()[i]).collect())?;
    let sw: Vec<f64> = idx
        .iter()
        .map(|&i| problem.weights.as_ref().map_or(1.0, |w| w[i]).sqrt())
        .collect();

    let build = |x: &[f64]| -> Option<LadderDesign> {
        let mut params: Vec<MbvdParams> = labels
            .iter()
            .map(|l| *model.resonator(l).expect("label from design"))
            .collect();
        for (s, v) in slots.iter().zip(x) {
            s.kind.set(&mut params[s.group], v * s.scale);
        }
        let d = model.map_resonators(|st| {
            let g = labels.iter().position(|l| *l == st.label).expect("known label");
            params[g]
        });
        d.validate().ok().map(|_| d)
    };
    let residual = |x: &[f64]| -> Vec<f64> {
        let Some(d) = build(x) else {
            return vec![1e6; n_res];
        };
        let m = d.cascade(&grid);
        let mut r = Vec::with_capacity(n_res);
        for (k, &i) in idx.iter().enumerate() {
            for (a, b) in [
                (m.s11[k], data.s11[i]),
                (m.s21[k], data.s21[i]),
                (m.s22[k], data.s22[i]),
            ] {
                let e = (a - b) * sw[k];
                r.push(e.re);
                r.push(e.im);
            }
        }
        r
    };

    // Resonance alignment is the multimodal direction: a resonator started a
    // few percent off can lock onto the wrong skirt. Scan each fs across its
    // bounds first (two sweeps), keeping only improvements.
    let cost = |x: &[f64]| residual(x).iter().map(|v| v * v).sum::<f64>();
    let mut x = x0.clone();
    let c0 = cost(&x);
    let mut history = vec![c0.sqrt()];
    if c0 > problem.lm.abs_tol && problem.fs_scan_points >= 2 {
        let mut best = c0;
        let np = problem.fs_scan_points;
        for _ in 0..2 {
            for j in (0..slots.len()).filter(|&j| slots[j].kind == ParamKind::Fs) {
                let (v, c) = (0..np)
                    .into_par_iter()
                    .map(|k| {
                        let mut y = x.clone();
                        y[j] = lo[j] + (hi[j] - lo[j]) * k as f64 / (np - 1) as f64;
                        (y[j], cost(&y))
                    })
                    .reduce(
                        || (f64::NAN, f64::INFINITY),
                        |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
                    );
                if c < best {
                    best = c;
                    x[j] = v;
                    history.push(c.sqrt());
                }
            }
        }
    }

    let rep = lm::minimize(&residual, &x, &lo, &hi, &problem.lm);
    history.extend(rep.history.iter().skip(1));
    let design = build(&rep.x).ok_or_else(|| Error::FitSetup("fit left the valid domain".into()))?;
    let groups = labels
        .iter()
        .enumerate()
        .map(|(g, l)| {
            let at_bound = slots
                .iter()
                .zip(&rep.x)
                .enumerate()
                .filter(|(j, (s, v))| {
                    s.group == g && (**v <= lo[*j] + 1e-9 || **v >= hi[*j] - 1e-9)
                })
                .map(|(_, (s, _))| s.kind.name())
                .collect();
            GroupFit {
                label: l.clone(),
                stages: groups[g].clone(),
                params: *design.resonator(l).expect("label from design"),
                at_bound,
            }
        })
        .collect();
    Ok(FitResult {
        design,
        groups,
        initial_residual: history[0],
        residual: rep.norm,
        iterations: rep.iterations,
        status: rep.status,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prototypes;

    fn data() -> FrequencyResponse {
        prototypes::three_element().cascade(&FrequencyGrid::uniform(10e9, 30e9, 50e6).unwrap())
    }

    #[test]
    fn exact_init_converges_without_steps() {
        let r = fit_mbvd(&FitProblem::new(data(), prototypes::three_element())).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.residual, r.initial_residual);
        assert_eq!(r.design, prototypes::three_element());
    }

    #[test]
    fn recovers_perturbed_fs() {
        let truth = prototypes::three_element();
        let init = truth.map_resonators(|s| MbvdParams {
            fs: s.resonator.fs * 1.03,
            c0: s.resonator.c0 * 0.95,
            ..s.resonator
        });
        let r = fit_mbvd(&FitProblem::new(data(), init)).unwrap();
        assert!(r.residual < 1e-6 * r.initial_residual, "{:?}", r.history);
        for l in truth.labels() {
            let (a, b) = (truth.resonator(&l).unwrap(), r.design.resonator(&l).unwrap());
            assert!((a.fs / b.fs - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn setup_errors() {
        let mut p = FitProblem::new(data(), prototypes::three_element());
        p.weights = Some(vec![1.0; 3]);
        assert!(matches!(fit_mbvd(&p), Err(Error::FitSetup(_))));
        let mut p = FitProblem::new(data(), prototypes::three_element());
        p.fit_band = Some((1e9, 2e9));
        assert!(matches!(fit_mbvd(&p), Err(Error::FitSetup(_))));
    }
}
