//! Static capacitance from IDE geometry: `c0 = rho · t · (ne·ng − 1) · le`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Capacitance per IDE pair, per µm finger length, per nm film thickness (F).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitanceDensity {
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub ne: u32,
    pub ng: u32,
    pub le_um: f64,
}

impl Geometry {
    /// Active gaps between adjacent fingers.
    pub fn pairs(&self) -> u32 {
        (self.ne * self.ng).saturating_sub(1)
    }
}

/// A known device: its capacitance, thickness and layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitanceRow {
    pub c0_f: f64,
    pub t_nm: f64,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryOptions {
    pub le_min_um: f64,
    pub le_max_um: f64,
    /// Candidate IDEs-per-group, tried in order.
    pub ne_options: Vec<u32>,
    pub ng_max: u32,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        GeometryOptions {
            le_min_um: 20.0,
            le_max_um: 80.0,
            ne_options: vec![16, 17],
            ng_max: 32,
        }
    }
}

impl CapacitanceDensity {
    pub fn c0(&self, t_nm: f64, g: &Geometry) -> f64 {
        self.rho * t_nm * f64::from(g.pairs()) * g.le_um
    }
}

/// Least-squares `rho` through the origin: `rho = Σ c·x / Σ x²`, `x = t·pairs·le`.
pub fn fit_capacitance_density(rows: &[CapacitanceRow]) -> Result<CapacitanceDensity> {
    if rows.is_empty() {
        return Err(Error::InsufficientAnchors("no capacitance rows".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for r in rows {
        let x = r.t_nm * f64::from(r.geometry.pairs()) * r.geometry.le_um;
        num += r.c0_f * x;
        den += x * x;
    }
    let rho = num / den;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::param("capacitance rows", "fitted density is not positive"));
    }
    Ok(CapacitanceDensity { rho })
}

/// First `ne` from the options and the fewest groups whose finger length
/// fits the bounds; `le` is then solved exactly.
pub fn geometry_for_c0(
    rho: &CapacitanceDensity,
    c0_f: f64,
    t_nm: f64,
    opts: &GeometryOptions,
) -> Result<Geometry> {
    if !(c0_f > 0.0 && c0_f.is_finite()) {
        return Err(Error::param("c0", format!("target must be > 0, got {c0_f}")));
    }
    if !(t_nm > 0.0) {
        return Err(Error::param("t", "thickness must be > 0"));
    }
    for &ne in &opts.ne_options {
        for ng in 1..=opts.ng_max {
            let pairs = ne * ng;
            if pairs < 2 {
                continue;
            }
            let le = c0_f / (rho.rho * t_nm * f64::from(pairs - 1));
            if le <= opts.le_max_um && le >= opts.le_min_um {
                return Ok(Geometry { ne, ng, le_um: le });
            }
            if le < opts.le_min_um {
                break;
            }
        }
    }
    Err(Error::InfeasibleGeometry(format!(
        "c0 = {:.4} fF at t = {t_nm} nm with le in [{}, {}] µm",
        c0_f * 1e15,
        opts.le_min_um,
        opts.le_max_um
    )))
}
