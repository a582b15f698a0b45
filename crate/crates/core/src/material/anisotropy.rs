//! Empirical k²(θ, t) from an anchor table.
//!
//! Each thickness with anchors gets a monotone cubic in θ; between two such
//! thicknesses the curves are blended linearly. A query is inside the hull
//! only if both bracketing curves cover its θ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, Pchip};

pub const THETA_MAX_DEG: f64 = 70.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K2Anchor {
    pub theta_deg: f64,
    pub t_nm: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Curve {
    t_nm: f64,
    interp: Pchip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyModel {
    anchors: Vec<K2Anchor>,
    curves: Vec<Curve>,
}

impl AnisotropyModel {
    pub fn from_anchors(anchors: &[K2Anchor]) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InsufficientAnchors("empty k2 anchor table".into()));
        }
        for a in anchors {
            if !(0.0..=THETA_MAX_DEG).contains(&a.theta_deg) {
                return Err(Error::param("theta_deg", format!("{} outside [0, 70]", a.theta_deg)));
            }
            if !(a.k2 > 0.0 && a.k2 < 1.0) || !(a.t_nm > 0.0) {
                return Err(Error::param("k2 anchor", format!("bad anchor {a:?}")));
            }
        }
        let mut sorted = anchors.to_vec();
        sorted.sort_by(|a, b| a.t_nm.total_cmp(&b.t_nm).then(a.theta_deg.total_cmp(&b.theta_deg)));
        let mut curves = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let t = sorted[i].t_nm;
            let group: Vec<&K2Anchor> = sorted[i..].iter().take_while(|a| a.t_nm == t).collect();
            i += group.len();
            let xs: Vec<f64> = group.iter().map(|a| a.theta_deg).collect();
            let ys: Vec<f64> = group.iter().map(|a| a.k2).collect();
            if ys.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::param(
                    "k2 anchors",
                    format!("k2 increases with theta at t = {t} nm"),
                ));
            }
            let interp = Pchip::new(xs, ys).ok_or_else(|| {
                Error::param("k2 anchors", format!("duplicate theta at t = {t} nm"))
            })?;
            curves.push(Curve { t_nm: t, interp });
        }
        Ok(AnisotropyModel {
            anchors: anchors.to_vec(),
            curves,
        })
    }

    pub fn anchors(&self) -> &[K2Anchor] {
        &self.anchors
    }

    pub fn thickness_span(&self) -> (f64, f64) {
        (self.curves[0].t_nm, self.curves.last().unwrap().t_nm)
    }

    /// Bracketing curves and the blend weight of the upper one.
    fn bracket(&self, t_nm: f64) -> Result<(&Curve, &Curve, f64)> {
        let (lo, hi) = self.thickness_span();
        if !(t_nm >= lo && t_nm <= hi) {
            return Err(Error::OutOfRange {
                what: "thickness (nm) for k2 model",
                value: t_nm,
                lo,
                hi,
            });
        }
        let j = self.curves.partition_point(|c| c.t_nm < t_nm);
        let c = &self.curves[j];
        if c.t_nm == t_nm {
            return Ok((c, c, 0.0));
        }
        let p = &self.curves[j - 1];
        Ok((p, c, (t_nm - p.t_nm) / (c.t_nm - p.t_nm)))
    }

    /// θ interval covered at `t_nm`.
    pub fn theta_span(&self, t_nm: f64) -> Result<(f64, f64)> {
        let (p, c, _) = self.bracket(t_nm)?;
        let (a0, a1) = p.interp.domain();
        let (b0, b1) = c.interp.domain();
        Ok((a0.max(b0), a1.min(b1)))
    }

    pub fn k2_at(&self, theta_deg: f64, t_nm: f64) -> Result<f64> {
        if !(0.0..=THETA_MAX_DEG).contains(&theta_deg) {
            return Err(Error::OutOfRange {
                what: "theta (deg)",
                value: theta_deg,
                lo: 0.0,
                hi: THETA_MAX_DEG,
            });
        }
        let (p, c, w) = self.bracket(t_nm)?;
        let (lo, hi) = self.theta_span(t_nm)?;
        let out = || Error::OutOfRange {
            what: "theta (deg) outside anchor hull",
            value: theta_deg,
            lo,
            hi,
        };
        let kp = p.interp.eval(theta_deg).ok_or_else(out)?;
        let kc = c.interp.eval(theta_deg).ok_or_else(out)?;
        Ok((1.0 - w) * kp + w * kc)
    }

    /// Achievable `(min, max)` k2 at `t_nm`.
    pub fn k2_range(&self, t_nm: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.theta_span(t_nm)?;
        Ok((self.k2_at(hi, t_nm)?, self.k2_at(lo, t_nm)?))
    }

    /// Orientation giving `k2` at `t_nm`, by bisection to 1e-4 degrees.
    pub fn theta_for_k2(&self, k2: f64, t_nm: f64) -> Result<f64> {
        let (kmin, kmax) = self.k2_range(t_nm)?;
        let unreachable = || Error::UnreachableK2 {
            k2,
            t_nm,
            lo: kmin,
            hi: kmax,
        };
        if !(k2 >= kmin && k2 <= kmax) {
            return Err(unreachable());
        }
        let (lo, hi) = self.theta_span(t_nm)?;
        if lo == hi {
            return Ok(lo);
        }
        bisect(
            |th| self.k2_at(th, t_nm).unwrap_or(f64::NAN) - k2,
            lo,
            hi,
            1e-4,
        )
        .ok_or_else(unreachable)
    }
}
