//! Filter figures of merit: insertion loss, 3/20 dB bands, out-of-band
//! rejection and transmission-zero locations.
//!
//! Band edges, the passband peak and transmission zeros are first located on
//! the response grid and then refined by bisection against an [`IlProbe`],
//! which is either the exact ladder model or an interpolation of the samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{magnitude_to_loss_db, FrequencyGrid, FrequencyResponse, LadderDesign};

/// Refinement tolerance for every edge and extremum location (Hz).
pub const REFINE_TOL_HZ: f64 = 0.1e6;

/// Something that can report insertion loss at an arbitrary frequency.
pub trait IlProbe {
    fn il_db(&self, f: f64) -> f64;
}

impl IlProbe for LadderDesign {
    fn il_db(&self, f: f64) -> f64 {
        magnitude_to_loss_db(self.s_at(f).c.norm())
    }
}

/// Piecewise-linear interpolation of the sampled insertion loss (in dB).
impl IlProbe for FrequencyResponse {
    fn il_db(&self, f: f64) -> f64 {
        let fr = self.freqs();
        match fr.binary_search_by(|x| x.total_cmp(&f)) {
            Ok(i) => self.il_db(i),
            Err(0) => self.il_db(0),
            Err(i) if i >= fr.len() => self.il_db(fr.len() - 1),
            Err(i) => {
                let t = (f - fr[i - 1]) / (fr[i] - fr[i - 1]);
                let a = self.il_db(i - 1);
                let b = self.il_db(i);
                a + t * (b - a)
            }
        }
    }
}

/// Reference level for the band edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BandReference {
    /// Edges at `peak − drop`.
    #[default]
    Peak,
    /// Edges where the insertion loss reaches `drop` dB.
    Absolute,
}

/// Where the out-of-band search starts on each side of the passband.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OobExclusion {
    /// Exclude only the 20 dB band.
    Band20,
    /// Exclude the 20 dB band and the transition skirt up to the first
    /// transmission zero outside the 3 dB band.
    #[default]
    FirstTz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsOptions {
    pub tz_threshold_db: f64,
    /// Reference for the 20 dB band; the 3 dB band is always peak-relative.
    pub fbw20_reference: BandReference,
    pub oob_exclusion: OobExclusion,
    /// Half-width of the out-of-band window in 3 dB bandwidths.
    pub oob_span_bw: f64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            tz_threshold_db: 30.0,
            fbw20_reference: BandReference::Peak,
            oob_exclusion: OobExclusion::FirstTz,
            oob_span_bw: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub f_lo: f64,
    pub f_hi: f64,
    pub fc: f64,
    pub fbw: f64,
    /// Refined in-band minimum insertion loss (dB).
    pub peak_il: f64,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.f_hi - self.f_lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rejection {
    pub db: f64,
    pub freq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterMetrics {
    pub fc: f64,
    pub min_il: f64,
    pub fbw3: f64,
    pub fbw20: f64,
    pub band3: (f64, f64),
    pub band20: (f64, f64),
    pub oob_lower: Rejection,
    pub oob_upper: Rejection,
    pub tz_list: Vec<f64>,
}

impl FilterMetrics {
    pub fn compute(
        resp: &FrequencyResponse,
        probe: &dyn IlProbe,
        opts: &MetricsOptions,
    ) -> Result<Self> {
        let peak = passband_peak(resp, probe)?;
        let b3 = band_from_peak(resp, probe, &peak, 3.0, BandReference::Peak)?;
        let b20 = band_from_peak(resp, probe, &peak, 20.0, opts.fbw20_reference)?;
        let tzs = find_tzs(resp, probe, opts.tz_threshold_db);
        let (oob_lower, oob_upper) = oob_rejection(resp, probe, &b3, &b20, &tzs, opts)?;
        Ok(FilterMetrics {
            fc: b3.fc,
            min_il: peak.il_db,
            fbw3: b3.fbw,
            fbw20: b20.width() / b3.fc,
            band3: (b3.f_lo, b3.f_hi),
            band20: (b20.f_lo, b20.f_hi),
            oob_lower,
            oob_upper,
            tz_list: tzs,
        })
    }

    /// Simulates `design` on `grid` and extracts metrics with the exact model as probe.
    pub fn of_design(
        design: &LadderDesign,
        grid: &FrequencyGrid,
        opts: &MetricsOptions,
    ) -> Result<Self> {
        let resp = design.cascade(grid);
        FilterMetrics::compute(&resp, design, opts)
    }

    /// Flat `key=value` report lines.
    pub fn report(&self) -> Vec<(String, String)> {
        let tz = self
            .tz_list
            .iter()
            .map(|f| format!("{f:.6e}"))
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("fc_hz".into(), format!("{:.6e}", self.fc)),
            ("min_il_db".into(), format!("{:.4}", self.min_il)),
            ("fbw3".into(), format!("{:.6}", self.fbw3)),
            ("fbw20".into(), format!("{:.6}", self.fbw20)),
            ("band3_lo_hz".into(), format!("{:.6e}", self.band3.0)),
            ("band3_hi_hz".into(), format!("{:.6e}", self.band3.1)),
            ("band20_lo_hz".into(), format!("{:.6e}", self.band20.0)),
            ("band20_hi_hz".into(), format!("{:.6e}", self.band20.1)),
            ("oob_lower_db".into(), format!("{:.4}", self.oob_lower.db)),
            ("oob_lower_hz".into(), format!("{:.6e}", self.oob_lower.freq)),
            ("oob_upper_db".into(), format!("{:.4}", self.oob_upper.db)),
            ("oob_upper_hz".into(), format!("{:.6e}", self.oob_upper.freq)),
            ("tz_hz".into(), tz),
        ]
    }
}

/// `-20·log10|s21|` at `f`; exact on grid points, interpolated between them.
pub fn insertion_loss(resp: &FrequencyResponse, f: f64) -> f64 {
    IlProbe::il_db(resp, f)
}

#[derive(Debug, Clone, Copy)]
struct Peak {
    index: usize,
    il_db: f64,
}

fn passband_peak(resp: &FrequencyResponse, probe: &dyn IlProbe) -> Result<Peak> {
    let n = resp.len();
    let (index, _) = (0..n)
        .map(|i| (i, resp.il_db(i)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::NoPassband)?;
    if index == 0 || index + 1 == n {
        return Err(Error::NoPassband);
    }
    let fr = resp.freqs();
    let (_, refined) = golden_min(probe, fr[index - 1], fr[index + 1]);
    Ok(Peak {
        index,
        il_db: refined.min(resp.il_db(index)),
    })
}

/// Golden-section minimisation of the insertion loss on `[a, b]`.
fn golden_min(probe: &dyn IlProbe, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = probe.il_db(c);
    let mut fd = probe.il_db(d);
    while b - a > REFINE_TOL_HZ {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = probe.il_db(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = probe.il_db(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, probe.il_db(x))
}

/// Bisection for the crossing of `level` between `inside` (below level) and `outside`.
fn bisect_crossing(probe: &dyn IlProbe, level: f64, mut inside: f64, mut outside: f64) -> f64 {
    while (outside - inside).abs() > REFINE_TOL_HZ {
        let mid = 0.5 * (inside + outside);
        if probe.il_db(mid) < level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    0.5 * (inside + outside)
}

fn band_from_peak(
    resp: &FrequencyResponse,
    probe: &dyn IlProbe,
    peak: &Peak,
    drop_db: f64,
    reference: BandReference,
) -> Result<Band> {
    let level = match reference {
        BandReference::Peak => peak.il_db + drop_db,
        BandReference::Absolute => drop_db,
    };
    if peak.il_db >= level {
        return Err(Error::UnboundedBand {
            drop_db,
            side: "both",
        });
    }
    let fr = resp.freqs();
    let lo_idx = (0..peak.index)
        .rev()
        .find(|&j| resp.il_db(j) >= level)
        .ok_or(Error::UnboundedBand {
            drop_db,
            side: "lower",
        })?;
    let hi_idx = (peak.index + 1..resp.len())
        .find(|&j| resp.il_db(j) >= level)
        .ok_or(Error::UnboundedBand {
            drop_db,
            side: "upper",
        })?;
    let f_lo = bisect_crossing(probe, level, fr[lo_idx + 1], fr[lo_idx]);
    let f_hi = bisect_crossing(probe, level, fr[hi_idx - 1], fr[hi_idx]);
    let fc = 0.5 * (f_lo + f_hi);
    Ok(Band {
        f_lo,
        f_hi,
        fc,
        fbw: (f_hi - f_lo) / fc,
        peak_il: peak.il_db,
    })
}

/// Passband edges `drop_db` below the in-band peak (or at an absolute level).
pub fn passband(
    resp: &FrequencyResponse,
    probe: &dyn IlProbe,
    drop_db: f64,
    reference: BandReference,
) -> Result<Band> {
    let peak = passband_peak(resp, probe)?;
    band_from_peak(resp, probe, &peak, drop_db, reference)
}

/// Transmission zeros: local |s21| minima with insertion loss of at least
/// `threshold_db`, refined to [`REFINE_TOL_HZ`]. Zeros closer than two grid
/// steps collapse into the deeper one.
pub fn find_tzs(resp: &FrequencyResponse, probe: &dyn IlProbe, threshold_db: f64) -> Vec<f64> {
    let fr = resp.freqs();
    let n = resp.len();
    let il: Vec<f64> = (0..n).map(|i| resp.il_db(i)).collect();
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(il[i] > il[i - 1] && il[i] >= il[i + 1] && il[i] >= threshold_db) {
            continue;
        }
        let f = refine_max(probe, fr[i - 1], fr[i + 1]);
        let depth = probe.il_db(f).max(il[i]);
        let min_sep = 2.0 * (fr[i + 1] - fr[i - 1]);
        match found.last_mut() {
            Some(last) if (f - last.0).abs() < min_sep => {
                if depth > last.1 {
                    *last = (f, depth);
                }
            }
            _ => found.push((f, depth)),
        }
    }
    found.into_iter().map(|(f, _)| f).collect()
}

/// Bisection on the sign of d(IL)/df for a local maximum of the loss in `[a, b]`.
fn refine_max(probe: &dyn IlProbe, mut a: f64, mut b: f64) -> f64 {
    let h = REFINE_TOL_HZ * 0.05;
    while b - a > REFINE_TOL_HZ {
        let m = 0.5 * (a + b);
        let slope = probe.il_db(m + h) - probe.il_db(m - h);
        if slope > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Worst-case (minimum) insertion loss below and above the passband within
/// `fc ± oob_span_bw·BW3`.
pub fn oob_rejection(
    resp: &FrequencyResponse,
    probe: &dyn IlProbe,
    band3: &Band,
    band20: &Band,
    tzs: &[f64],
    opts: &MetricsOptions,
) -> Result<(Rejection, Rejection)> {
    let bw = band3.width();
    let fr = resp.freqs();
    let lo_start = (band3.fc - opts.oob_span_bw * bw).max(fr[0]);
    let hi_stop = (band3.fc + opts.oob_span_bw * bw).min(*fr.last().unwrap());
    let (mut lo_end, mut hi_start) = (band20.f_lo, band20.f_hi);
    if opts.oob_exclusion == OobExclusion::FirstTz {
        if let Some(&tz) = tzs.iter().rev().find(|&&t| t < band3.f_lo) {
            lo_end = lo_end.min(tz);
        }
        if let Some(&tz) = tzs.iter().find(|&&t| t > band3.f_hi) {
            hi_start = hi_start.max(tz);
        }
    }
    let lower = min_in(resp, probe, lo_start, lo_end).ok_or(Error::EmptySearchInterval("lower"))?;
    let upper =
        min_in(resp, probe, hi_start, hi_stop).ok_or(Error::EmptySearchInterval("upper"))?;
    Ok((lower, upper))
}

fn min_in(resp: &FrequencyResponse, probe: &dyn IlProbe, a: f64, b: f64) -> Option<Rejection> {
    if !(b > a) {
        return None;
    }
    let fr = resp.freqs();
    let mut best = Rejection {
        db: probe.il_db(a),
        freq: a,
    };
    let end = probe.il_db(b);
    if end < best.db {
        best = Rejection { db: end, freq: b };
    }
    let mut best_idx = None;
    for (i, &f) in fr.iter().enumerate() {
        if f > a && f < b {
            let v = resp.il_db(i);
            if v < best.db {
                best = Rejection { db: v, freq: f };
                best_idx = Some(i);
            }
        }
    }
    if let Some(i) = best_idx {
        let lo = if i > 0 { fr[i - 1].max(a) } else { a };
        let hi = if i + 1 < fr.len() { fr[i + 1].min(b) } else { b };
        let (f, v) = golden_min(probe, lo, hi);
        if v < best.db {
            best = Rejection { db: v, freq: f };
        }
    }
    Some(best)
}
