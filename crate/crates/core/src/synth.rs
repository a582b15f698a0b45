//! Ladder synthesis: alignment-rule seeding, derivative-free refinement,
//! physical realization through the material models, and frequency scaling.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{FrequencyGrid, LadderDesign, Stage};
use crate::material::{geometry_for_c0, plan_trims, MaterialModel, PhysicalRealization};
use crate::mbvd::{k2_from, MbvdParams};
use crate::metrics::{self, BandReference, FilterMetrics, MetricsOptions};

/// Round-trip tolerances between electrical targets and their realization.
pub const RT_FS_REL: f64 = 0.03;
pub const RT_K2_ABS: f64 = 0.02;
pub const RT_C0_REL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterOrder {
    ThreeElement,
    EightElement,
}

/// Extra-TZ strategy for the three-element ladder: the two shunts get
/// different fs and k2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OobBias {
    /// Port-1 shunt moved up, sharpening the lower skirt.
    Selectivity,
    /// Port-1 shunt moved down, adding a TZ further below the band.
    LowerRejection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterTargets {
    pub fc: f64,
    pub fbw: f64,
    pub z0: f64,
    pub order: FilterOrder,
    pub oob_bias: Option<OobBias>,
}

impl FilterTargets {
    pub fn validate(&self) -> Result<()> {
        if !(self.fc > 0.0 && self.fc.is_finite()) {
            return Err(Error::param("fc", format!("must be > 0, got {}", self.fc)));
        }
        if !(self.fbw > 0.0 && self.fbw < 0.3) {
            return Err(Error::param("fbw", format!("must lie in (0, 0.3), got {}", self.fbw)));
        }
        if !(self.z0 > 0.0 && self.z0.is_finite()) {
            return Err(Error::param("z0", format!("must be > 0, got {}", self.z0)));
        }
        Ok(())
    }
}

/// Seeding, objective and search settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthKnobs {
    pub q: f64,
    /// `(rs, ls)` applied to series resonators.
    pub series_parasitics: (f64, f64),
    /// `(rs, ls)` applied to shunt resonators.
    pub shunt_parasitics: (f64, f64),
    /// TZ span factor: shunt fs to series fp covers `beta·fbw·fc`.
    pub beta: f64,
    /// Impedance ratio for the initial c0 split.
    pub r: f64,
    /// Largest coupling the film can provide.
    pub k2_max: f64,
    /// Weights on the fbw error, the in-band |s11| excess and min IL.
    pub weights: (f64, f64, f64),
    /// Weight on the relative centre-frequency error.
    pub fc_weight: f64,
    pub s11_limit: f64,
    pub max_passes: usize,
    /// Pass improvement below which the step shrinks (and at the smallest
    /// step, the search stops).
    pub tol: f64,
    /// Number of step halvings before giving up on a stall.
    pub max_shrinks: u32,
    /// Objective at or below which the seed is accepted untouched.
    pub accept_objective: Option<f64>,
    /// Grid step for objective evaluation (Hz).
    pub grid_step: f64,
    /// Material models used for feasibility and realization.
    pub material: Option<MaterialModel>,
}

impl SynthKnobs {
    /// Q = 80 and the parasitics of the matching prototype.
    pub fn for_order(order: FilterOrder) -> Self {
        let (series, shunt, material) = match order {
            FilterOrder::ThreeElement => {
                ((3.0, 0.2e-9), (1.0, 0.1e-9), MaterialModel::three_element_default())
            }
            FilterOrder::EightElement => {
                ((3.5, 0.1e-9), (2.5, 0.05e-9), MaterialModel::eight_element_default())
            }
        };
        SynthKnobs {
            q: 80.0,
            series_parasitics: series,
            shunt_parasitics: shunt,
            beta: 1.8,
            r: 2.0,
            k2_max: 0.425,
            weights: (10.0, 5.0, 1.0),
            fc_weight: 100.0,
            s11_limit: 0.33,
            max_passes: 200,
            tol: 1e-4,
            max_shrinks: 6,
            accept_objective: None,
            grid_step: 10e6,
            material: Some(material),
        }
    }
}

/// One accepted refinement step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub design: LadderDesign,
    pub realization: BTreeMap<String, PhysicalRealization>,
    pub achieved: FilterMetrics,
    /// Names of the entries of [`TraceEntry::params`].
    pub param_names: Vec<String>,
    pub trace: Vec<TraceEntry>,
    pub passes: usize,
    pub converged: bool,
}

impl SynthesisResult {
    /// Trace as CSV: `iteration,objective,<param names...>`.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,objective");
        for n in &self.param_names {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for e in &self.trace {
            s.push_str(&format!("{},{:.12e}", e.iteration, e.objective));
            for v in &e.params {
                s.push_str(&format!(",{v:.12e}"));
            }
            s.push('\n');
        }
        s
    }
}

fn resonator(fs: f64, k2: f64, c0: f64, q: f64, (rs, ls): (f64, f64)) -> MbvdParams {
    MbvdParams { fs, k2, q, c0, rs, ls }
}

/// Alignment-rule starting point: shunt fp on series fs = fc, TZ span
/// `beta·fbw·fc` split evenly about fc, impedance ratio `r`.
pub fn seed_design(t: &FilterTargets, knobs: &SynthKnobs) -> Result<LadderDesign> {
    t.validate()?;
    let bw = t.fbw * t.fc;
    let span = knobs.beta * bw;
    let fs_series = t.fc;
    let fp_series = t.fc + 0.5 * span;
    let k2_series = k2_from(fs_series, fp_series)?;
    let wc = 2.0 * PI * t.fc;
    let c0_series = 1.0 / (wc * t.z0 * knobs.r);
    let c0_shunt = knobs.r / (wc * t.z0);

    let shunt_at = |fs: f64, label: &str| -> Result<MbvdParams> {
        let k2 = k2_from(fs, fs_series)?;
        if k2 > knobs.k2_max {
            return Err(Error::Unrealizable {
                label: label.into(),
                axis: "k2",
                reason: format!("seed needs k2 = {k2:.4} > material maximum {}", knobs.k2_max),
            });
        }
        Ok(resonator(fs, k2, c0_shunt, knobs.q, knobs.shunt_parasitics))
    };
    if k2_series > knobs.k2_max {
        return Err(Error::Unrealizable {
            label: "series".into(),
            axis: "k2",
            reason: format!(
                "seed needs k2 = {k2_series:.4} > material maximum {}",
                knobs.k2_max
            ),
        });
    }
    let series = resonator(fs_series, k2_series, c0_series, knobs.q, knobs.series_parasitics);
    let fs_shunt = t.fc - 0.5 * span;

    let stages = match t.order {
        FilterOrder::ThreeElement => {
            let fs1 = match t.oob_bias {
                None => fs_shunt,
                Some(OobBias::LowerRejection) => fs_shunt - 0.5 * bw,
                Some(OobBias::Selectivity) => fs_shunt + 0.25 * bw,
            };
            vec![
                Stage::shunt("shunt1", shunt_at(fs1, "shunt1")?),
                Stage::series("series", series),
                Stage::shunt("shunt2", shunt_at(fs_shunt, "shunt2")?),
            ]
        }
        FilterOrder::EightElement => {
            let sh = shunt_at(fs_shunt, "shunt1")?;
            let split = MbvdParams {
                c0: c0_shunt / 4.0,
                ..shunt_at(fs_shunt, "shunt2")?
            };
            vec![
                Stage::shunt("shunt1", sh),
                Stage::series("series", series),
                Stage::shunt("shunt2", split).with_multiplicity(4),
                Stage::series("series", series),
                Stage::shunt("shunt1", sh),
            ]
        }
    };
    LadderDesign::new(stages, t.z0)
}

/// Film thicknesses the process can produce, thickest first.
fn reachable_thicknesses(m: &MaterialModel) -> Vec<f64> {
    let (a_lo, a_hi) = m.anisotropy.thickness_span();
    let (v_lo, v_hi) = m.dispersion.validity_nm;
    let lo = a_lo.max(v_lo);
    let hi = a_hi.min(v_hi).min(f64::from(m.base_t_nm));
    let mut out: Vec<f64> = match &m.fixed_steps {
        Some(steps) => {
            let n = steps.len();
            (0u32..1 << n)
                .map(|mask| {
                    let d: u32 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| steps[i]).sum();
                    f64::from(m.base_t_nm) - f64::from(d)
                })
                .collect()
        }
        None => (lo.ceil() as u32..=hi.floor() as u32).map(f64::from).collect(),
    };
    out.retain(|&t| t >= lo && t <= hi);
    out.sort_by(|a, b| b.total_cmp(a));
    out.dedup();
    out
}

/// Reachable thickness whose resonance is closest to `fs`.
fn snap_thickness(m: &MaterialModel, reachable: &[f64], fs: f64) -> Option<f64> {
    reachable
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let da = (m.dispersion.fs_hz(a) / fs - 1.0).abs();
            let db = (m.dispersion.fs_hz(b) / fs - 1.0).abs();
            da.total_cmp(&db)
        })
}

/// True if `(fs, k2)` is producible within the round-trip tolerance.
fn feasible(m: &MaterialModel, reachable: &[f64], p: &MbvdParams) -> bool {
    let Some(t) = snap_thickness(m, reachable, p.fs) else {
        return false;
    };
    if (m.dispersion.fs_hz(t) / p.fs - 1.0).abs() > RT_FS_REL {
        return false;
    }
    matches!(m.anisotropy.k2_range(t), Ok((lo, hi)) if p.k2 >= lo && p.k2 <= hi)
}

/// Nearest producible `(fs, k2)` to `p`, keeping c0 and the parasitics.
fn project(m: &MaterialModel, reachable: &[f64], p: &MbvdParams) -> MbvdParams {
    let Some(t) = snap_thickness(m, reachable, p.fs) else {
        return *p;
    };
    let f_t = m.dispersion.fs_hz(t);
    let margin = 0.99 * RT_FS_REL;
    let fs = p.fs.clamp(f_t / (1.0 + margin), f_t / (1.0 - margin));
    let t = snap_thickness(m, reachable, fs).unwrap_or(t);
    let k2 = match m.anisotropy.k2_range(t) {
        Ok((lo, hi)) => p.k2.clamp(lo + 1e-6, hi - 1e-6),
        Err(_) => p.k2,
    };
    MbvdParams { fs, k2, ..*p }
}

/// Per-label search vector: `[fs, k2, c0]` for each distinct resonator.
fn pack(design: &LadderDesign, labels: &[String]) -> Vec<f64> {
    labels
        .iter()
        .flat_map(|l| {
            let p = design.resonator(l).expect("label from design");
            [p.fs, p.k2, p.c0]
        })
        .collect()
}

fn unpack(design: &LadderDesign, labels: &[String], x: &[f64]) -> LadderDesign {
    design.map_resonators(|s| {
        let i = labels.iter().position(|l| *l == s.label).expect("known label");
        MbvdParams {
            fs: x[3 * i],
            k2: x[3 * i + 1],
            c0: x[3 * i + 2],
            ..s.resonator
        }
    })
}

struct Objective<'a> {
    targets: &'a FilterTargets,
    knobs: &'a SynthKnobs,
    grid: FrequencyGrid,
    reachable: Vec<f64>,
}

impl Objective<'_> {
    fn eval(&self, d: &LadderDesign) -> f64 {
        if d.validate().is_err() {
            return f64::INFINITY;
        }
        if let Some(m) = &self.knobs.material {
            if !d.stages.iter().all(|s| feasible(m, &self.reachable, &s.resonator)) {
                return f64::INFINITY;
            }
        }
        let resp = d.cascade(&self.grid);
        let Ok(band) = metrics::passband(&resp, d, 3.0, BandReference::Peak) else {
            return f64::INFINITY;
        };
        let s11_max = resp
            .freqs()
            .iter()
            .zip(&resp.s11)
            .filter(|(f, _)| **f >= band.f_lo && **f <= band.f_hi)
            .map(|(_, s)| s.norm())
            .fold(0.0, f64::max);
        let t = self.targets;
        let (w1, w2, w3) = self.knobs.weights;
        w1 * (band.fbw - t.fbw).abs() / t.fbw
            + w2 * (s11_max - self.knobs.s11_limit).max(0.0)
            + w3 * band.peak_il
            + self.knobs.fc_weight * (band.fc - t.fc).abs() / t.fc
    }
}

/// Coordinate descent over `{fs, k2, c0}` per distinct resonator with
/// shrinking steps; the result carries the trace and full metrics.
pub fn refine(seed: &LadderDesign, t: &FilterTargets, knobs: &SynthKnobs) -> Result<SynthesisResult> {
    t.validate()?;
    seed.validate()?;
    let span = (0.5 * t.fbw + 0.2).min(0.45);
    let grid = FrequencyGrid::uniform(t.fc * (1.0 - span), t.fc * (1.0 + span), knobs.grid_step)?;
    let reachable = knobs.material.as_ref().map(reachable_thicknesses).unwrap_or_default();
    let obj = Objective {
        targets: t,
        knobs,
        grid,
        reachable,
    };
    let labels = seed.labels();
    let start = match &knobs.material {
        Some(m) => seed.map_resonators(|s| project(m, &obj.reachable, &s.resonator)),
        None => seed.clone(),
    };
    let mut x = pack(&start, &labels);
    let mut best = obj.eval(&start);
    if !best.is_finite() {
        return Err(Error::NoPassband);
    }
    let mut trace = vec![TraceEntry {
        iteration: 0,
        params: x.clone(),
        objective: best,
    }];

    let mut passes = 0;
    let mut converged = false;
    if knobs.accept_objective.map_or(false, |a| best <= a) {
        converged = true;
    } else {
        let mut scale = 1.0;
        let mut shrinks = 0;
        while passes < knobs.max_passes {
            passes += 1;
            let pass_start = best;
            for k in 0..x.len() {
                let step = |sign: f64| -> Vec<f64> {
                    let mut y = x.clone();
                    y[k] = match k % 3 {
                        0 => x[k] * (1.0 + sign * 0.01 * scale),
                        1 => x[k] + sign * 0.01 * scale,
                        _ => x[k] * (1.0 + sign * 0.1 * scale),
                    };
                    y
                };
                let (up, down) = (step(1.0), step(-1.0));
                let (fu, fd) = rayon::join(
                    || obj.eval(&unpack(seed, &labels, &up)),
                    || obj.eval(&unpack(seed, &labels, &down)),
                );
                let (cand, fc) = if fu <= fd { (up, fu) } else { (down, fd) };
                if fc < best {
                    best = fc;
                    x = cand;
                    trace.push(TraceEntry {
                        iteration: trace.len(),
                        params: x.clone(),
                        objective: best,
                    });
                }
            }
            if pass_start - best < knobs.tol {
                if shrinks >= knobs.max_shrinks {
                    converged = true;
                    break;
                }
                shrinks += 1;
                scale *= 0.5;
            }
        }
    }

    let design = unpack(seed, &labels, &x);
    let achieved = FilterMetrics::of_design(
        &design,
        &FrequencyGrid::default_simulation(),
        &MetricsOptions::default(),
    )?;
    let realization = match &knobs.material {
        Some(m) => realize(&design, m)?,
        None => BTreeMap::new(),
    };
    let param_names = labels
        .iter()
        .flat_map(|l| [format!("{l}_fs_hz"), format!("{l}_k2"), format!("{l}_c0_f")])
        .collect();
    Ok(SynthesisResult {
        design,
        realization,
        achieved,
        param_names,
        trace,
        passes,
        converged,
    })
}

/// Seed, refine and realize in one call.
pub fn synthesize(t: &FilterTargets, knobs: &SynthKnobs) -> Result<SynthesisResult> {
    let seed = seed_design(t, knobs)?;
    refine(&seed, t, knobs)
}

/// Maps every distinct resonator to a thickness, orientation, electrode
/// geometry and trim sequence, then checks the forward round trip.
pub fn realize(
    design: &LadderDesign,
    m: &MaterialModel,
) -> Result<BTreeMap<String, PhysicalRealization>> {
    design.validate()?;
    let reachable = reachable_thicknesses(m);
    let labels = design.labels();
    let mut partial = Vec::with_capacity(labels.len());
    for label in &labels {
        let p = *design.resonator(label).expect("label from design");
        let fail = |axis: &'static str, reason: String| Error::Unrealizable {
            label: label.clone(),
            axis,
            reason,
        };
        m.dispersion
            .thickness_for_fs(p.fs)
            .map_err(|e| fail("fs", e.to_string()))?;
        let t = snap_thickness(m, &reachable, p.fs)
            .ok_or_else(|| fail("fs", "no producible thickness".into()))?;
        let theta = m
            .anisotropy
            .theta_for_k2(p.k2, t)
            .map_err(|e| fail("k2", e.to_string()))?;
        let g = geometry_for_c0(&m.capacitance, p.c0, t, &m.geometry)
            .map_err(|e| fail("c0", e.to_string()))?;
        partial.push((label.clone(), p, t, theta, g));
    }
    let targets: Vec<u32> = partial.iter().map(|x| x.2 as u32).collect();
    let plan = plan_trims(m.base_t_nm, &targets, m.fixed_steps.as_deref())?;
    let mut out = BTreeMap::new();
    for (i, (label, p, t, theta, g)) in partial.into_iter().enumerate() {
        let r = PhysicalRealization {
            t_nm: t,
            theta_deg: theta,
            ne: g.ne,
            ng: g.ng,
            le_um: g.le_um,
            trims: plan.sequences[i].iter().map(|&d| f64::from(d)).collect(),
        };
        let fwd = m.forward(&r)?;
        let checks = [
            ("fs", (fwd.fs_hz / p.fs - 1.0).abs() <= RT_FS_REL, fwd.fs_hz, p.fs),
            ("k2", (fwd.k2 - p.k2).abs() <= RT_K2_ABS, fwd.k2, p.k2),
            ("c0", (fwd.c0_f / p.c0 - 1.0).abs() <= RT_C0_REL, fwd.c0_f, p.c0),
        ];
        if let Some((axis, _, got, want)) = checks.into_iter().find(|c| !c.1) {
            return Err(Error::Unrealizable {
                label,
                axis,
                reason: format!("realization gives {got:.6e}, target {want:.6e}"),
            });
        }
        out.insert(label, r);
    }
    Ok(out)
}

/// Thickness-scales every resonator by `1/factor` so the response moves up
/// by about `factor`. With a realization the dispersion model sets the new
/// fs and c0 follows thickness; without one the ideal `fs·factor`,
/// `c0/factor` mapping is used.
pub fn scale_design(
    design: &LadderDesign,
    realization: Option<&BTreeMap<String, PhysicalRealization>>,
    factor: f64,
    m: &MaterialModel,
) -> Result<(LadderDesign, Option<BTreeMap<String, PhysicalRealization>>)> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::param("factor", format!("must be > 0, got {factor}")));
    }
    design.validate()?;
    let Some(real) = realization else {
        let d = design.map_resonators(|s| MbvdParams {
            fs: s.resonator.fs * factor,
            c0: s.resonator.c0 / factor,
            ..s.resonator
        });
        return Ok((d, None));
    };
    let mut scaled = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for label in design.labels() {
        let r = real.get(&label).ok_or_else(|| {
            Error::LabelMismatch(format!("no realization for resonator `{label}`"))
        })?;
        let t2 = r.t_nm / factor;
        m.dispersion.check_validity(t2)?;
        let fs_ratio = m.dispersion.fs_hz(t2) / m.dispersion.fs_hz(r.t_nm);
        ratios.insert(label.clone(), (fs_ratio, t2 / r.t_nm));
        scaled.insert(
            label,
            PhysicalRealization {
                t_nm: t2,
                trims: r.trims.iter().map(|d| d / factor).collect(),
                ..r.clone()
            },
        );
    }
    let d = design.map_resonators(|s| {
        let (f, c) = ratios[&s.label];
        MbvdParams {
            fs: s.resonator.fs * f,
            c0: s.resonator.c0 * c,
            ..s.resonator
        }
    });
    Ok((d, Some(scaled)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::DispersionModel;
    use crate::mbvd::fp_from;
    use crate::prototypes;

    fn targets3() -> FilterTargets {
        FilterTargets {
            fc: 20.5e9,
            fbw: 0.095,
            z0: 50.0,
            order: FilterOrder::ThreeElement,
            oob_bias: Some(OobBias::LowerRejection),
        }
    }

    #[test]
    fn seed_alignment_and_shape() {
        let t = targets3();
        let d = seed_design(&t, &SynthKnobs::for_order(t.order)).unwrap();
        let series = d.resonator("series").unwrap();
        assert_eq!(series.fs, 20.5e9);
        for l in ["shunt1", "shunt2"] {
            let p = d.resonator(l).unwrap();
            assert!((fp_from(p.fs, p.k2) / series.fs - 1.0).abs() < 1e-9);
        }
        assert!(d.resonator("shunt1").unwrap().fs < d.resonator("shunt2").unwrap().fs);

        let t8 = FilterTargets {
            fc: 22e9,
            fbw: 0.064,
            order: FilterOrder::EightElement,
            oob_bias: None,
            ..t
        };
        let d8 = seed_design(&t8, &SynthKnobs::for_order(t8.order)).unwrap();
        let m: Vec<u32> = d8.stages.iter().map(|s| s.multiplicity).collect();
        assert_eq!(m, vec![1, 1, 4, 1, 1]);
    }

    #[test]
    fn seed_rejects_bad_targets() {
        let knobs = SynthKnobs::for_order(FilterOrder::ThreeElement);
        let t = FilterTargets { fbw: 0.0, ..targets3() };
        assert!(seed_design(&t, &knobs).is_err());
        let t = FilterTargets { fbw: 0.29, ..targets3() };
        assert!(matches!(
            seed_design(&t, &knobs),
            Err(Error::Unrealizable { axis: "k2", .. })
        ));
    }

    #[test]
    fn realize_three_element_reference() {
        let m = MaterialModel::three_element_default();
        let r = realize(&prototypes::three_element(), &m).unwrap();
        let s = &r["series"];
        assert_eq!(s.t_nm, 83.0);
        assert!((s.theta_deg - 50.0).abs() < 1.5, "{}", s.theta_deg);
        assert_eq!(s.trims, vec![7.0, 9.0]);
        assert_eq!(r["shunt1"].t_nm, 99.0);
        assert!(r["shunt1"].trims.is_empty());
        assert_eq!(r["shunt2"].trims, vec![7.0]);
    }

    #[test]
    fn realize_eight_element_reference() {
        let m = MaterialModel::eight_element_default();
        let r = realize(&prototypes::eight_element(), &m).unwrap();
        assert_eq!(r["shunt1"].t_nm, 89.0);
        assert_eq!(r["shunt1"].trims.len(), 1);
        assert_eq!(r["series"].t_nm, 80.0);
        for x in r.values() {
            x.validate(96.0).unwrap();
        }
    }

    #[test]
    fn unreachable_k2_names_resonator() {
        let mut d = prototypes::three_element();
        let mut p = *d.resonator("series").unwrap();
        p.k2 = 0.6;
        d.set_resonator("series", p);
        match realize(&d, &MaterialModel::three_element_default()) {
            Err(Error::Unrealizable { label, axis, .. }) => {
                assert_eq!(label, "series");
                assert_eq!(axis, "k2");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scale_identity_and_validity() {
        let m = MaterialModel::three_element_default();
        let d = prototypes::three_element();
        let r = realize(&d, &m).unwrap();
        let (d1, r1) = scale_design(&d, Some(&r), 1.0, &m).unwrap();
        assert_eq!(d1, d);
        assert_eq!(r1.unwrap(), r);
        let narrow = MaterialModel {
            dispersion: m.dispersion.clone().with_validity(60.0, 120.0),
            ..m.clone()
        };
        assert!(scale_design(&d, Some(&r), 0.5, &narrow).is_err());
    }

    #[test]
    fn reciprocal_scaling_is_exact() {
        let m = MaterialModel {
            dispersion: DispersionModel::reciprocal(1750.0),
            ..MaterialModel::three_element_default()
        };
        let d = prototypes::three_element().map_resonators(|s| s.resonator.without_parasitics());
        let r = realize(&d, &m).unwrap();
        let (d2, _) = scale_design(&d, Some(&r), 1.2, &m).unwrap();
        for f in [5e9, 17e9, 20.5e9, 23e9, 33e9] {
            let a = d.s_at(f);
            let b = d2.s_at(f * 1.2);
            assert!(a.max_abs_diff(&b) < 1e-9, "{f}");
        }
    }

    #[test]
    fn accept_objective_passes_seed_through() {
        let t = targets3();
        let knobs = SynthKnobs {
            accept_objective: Some(1e9),
            ..SynthKnobs::for_order(t.order)
        };
        let seed = seed_design(&t, &knobs).unwrap();
        let res = refine(&seed, &t, &SynthKnobs { material: None, ..knobs }).unwrap();
        assert_eq!(res.passes, 0);
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.design, seed);
    }
}
