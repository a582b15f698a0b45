//! Empirical film models: thickness dispersion, orientation-dependent
//! coupling, capacitance density and trim planning.

pub mod anisotropy;
pub mod dispersion;
pub mod geometry;
pub mod trims;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use anisotropy::{AnisotropyModel, K2Anchor};
pub use dispersion::{fit_dispersion, DispersionModel};
pub use geometry::{
    fit_capacitance_density, geometry_for_c0, CapacitanceDensity, CapacitanceRow, Geometry,
    GeometryOptions,
};
pub use trims::{plan_trims, TrimPlan};

use crate::error::{Error, Result};

const K2_ANCHORS_CSV: &str = include_str!("../../data/k2_anchors.csv");
const DISPERSION_3_CSV: &str = include_str!("../../data/dispersion_three_element.csv");
const DISPERSION_8_CSV: &str = include_str!("../../data/dispersion_eight_element.csv");
const CAPACITANCE_CSV: &str = include_str!("../../data/capacitance_rows.csv");

/// Scalar layout and process description of one resonator design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalRealization {
    pub t_nm: f64,
    pub theta_deg: f64,
    pub ne: u32,
    pub ng: u32,
    pub le_um: f64,
    /// Trim depths (nm) applied in order from the base thickness.
    pub trims: Vec<f64>,
}

impl PhysicalRealization {
    pub fn geometry(&self) -> Geometry {
        Geometry {
            ne: self.ne,
            ng: self.ng,
            le_um: self.le_um,
        }
    }

    pub fn validate(&self, base_nm: f64) -> Result<()> {
        if self.ne * self.ng < 2 || !(self.le_um > 0.0) {
            return Err(Error::param("geometry", "need ne·ng >= 2 and le > 0"));
        }
        let trimmed = base_nm - self.trims.iter().sum::<f64>();
        if (trimmed - self.t_nm).abs() > 1e-9 * base_nm {
            return Err(Error::param(
                "trims",
                format!("base {base_nm} nm minus trims gives {trimmed} nm, not {}", self.t_nm),
            ));
        }
        Ok(())
    }
}

/// Electrical parameters implied by a realization through the forward models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardElectrical {
    pub fs_hz: f64,
    pub k2: f64,
    pub c0_f: f64,
}

/// Built-in wafer locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialPreset {
    ThreeElement,
    EightElement,
}

impl MaterialPreset {
    pub fn model(self) -> MaterialModel {
        match self {
            MaterialPreset::ThreeElement => MaterialModel::three_element_default(),
            MaterialPreset::EightElement => MaterialModel::eight_element_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub dispersion: DispersionModel,
    pub anisotropy: AnisotropyModel,
    pub capacitance: CapacitanceDensity,
    pub geometry: GeometryOptions,
    pub base_t_nm: u32,
    /// Trim depths that must be reused, if fixed by an earlier process run.
    pub fixed_steps: Option<Vec<u32>>,
}

impl MaterialModel {
    /// Wafer and anchors of the three-element prototype (base 99 nm).
    pub fn three_element_default() -> Self {
        MaterialModel {
            dispersion: fit_dispersion(&parse_dispersion(DISPERSION_3_CSV, "<builtin>").unwrap())
                .unwrap(),
            anisotropy: AnisotropyModel::from_anchors(&default_k2_anchors()).unwrap(),
            capacitance: fit_capacitance_density(&default_capacitance_rows()).unwrap(),
            geometry: GeometryOptions::default(),
            base_t_nm: 99,
            fixed_steps: None,
        }
    }

    /// Thinner wafer location of the eight-element prototype (base 96 nm),
    /// reusing the 7 nm and 9 nm trims.
    pub fn eight_element_default() -> Self {
        MaterialModel {
            dispersion: fit_dispersion(&parse_dispersion(DISPERSION_8_CSV, "<builtin>").unwrap())
                .unwrap(),
            base_t_nm: 96,
            fixed_steps: Some(vec![7, 9]),
            ..MaterialModel::three_element_default()
        }
    }

    /// Loads `k2_anchors.csv`, `dispersion.csv` and `capacitance.csv` from
    /// `dir`; a missing file falls back to the corresponding built-in table.
    pub fn load_dir(dir: &Path, base_t_nm: u32) -> Result<Self> {
        let mut m = MaterialModel::three_element_default().overlay_dir(dir)?;
        m.base_t_nm = base_t_nm;
        Ok(m)
    }

    /// Replaces the tables present in `dir` and keeps the rest.
    pub fn overlay_dir(mut self, dir: &Path) -> Result<Self> {
        let m = &mut self;
        let k2 = dir.join("k2_anchors.csv");
        if k2.exists() {
            let text = std::fs::read_to_string(&k2).map_err(|e| Error::io(&k2, e))?;
            m.anisotropy = AnisotropyModel::from_anchors(&parse_k2_anchors(&text, &k2)?)?;
        }
        let disp = dir.join("dispersion.csv");
        if disp.exists() {
            let text = std::fs::read_to_string(&disp).map_err(|e| Error::io(&disp, e))?;
            m.dispersion = fit_dispersion(&parse_dispersion(&text, &disp)?)?;
        }
        let cap = dir.join("capacitance.csv");
        if cap.exists() {
            let text = std::fs::read_to_string(&cap).map_err(|e| Error::io(&cap, e))?;
            m.capacitance = fit_capacitance_density(&parse_capacitance_rows(&text, &cap)?)?;
        }
        Ok(self)
    }

    /// Re-derives `(fs, k2, c0)` from a realization.
    pub fn forward(&self, r: &PhysicalRealization) -> Result<ForwardElectrical> {
        Ok(ForwardElectrical {
            fs_hz: self.dispersion.fs_hz(r.t_nm),
            k2: self.anisotropy.k2_at(r.theta_deg, r.t_nm)?,
            c0_f: self.capacitance.c0(r.t_nm, &r.geometry()),
        })
    }
}

pub fn default_k2_anchors() -> Vec<K2Anchor> {
    parse_k2_anchors(K2_ANCHORS_CSV, Path::new("<builtin>")).expect("builtin k2 anchors")
}

pub fn default_capacitance_rows() -> Vec<CapacitanceRow> {
    parse_capacitance_rows(CAPACITANCE_CSV, Path::new("<builtin>")).expect("builtin rows")
}

fn read_rows<const N: usize>(text: &str, path: &Path, cols: [&str; N]) -> Result<Vec<[f64; N]>> {
    let err = |msg: String| Error::Csv {
        path: path.to_path_buf(),
        msg,
    };
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| err(e.to_string()))?.clone();
    let mut idx = [0usize; N];
    for (k, c) in cols.iter().enumerate() {
        idx[k] = headers
            .iter()
            .position(|h| h == *c)
            .ok_or_else(|| err(format!("missing column `{c}`")))?;
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let mut row = [0.0; N];
        for k in 0..N {
            let s = rec.get(idx[k]).unwrap_or("");
            row[k] = s
                .parse()
                .map_err(|_| err(format!("row {}: bad number `{s}` in `{}`", line + 2, cols[k])))?;
        }
        out.push(row);
    }
    Ok(out)
}

pub fn parse_k2_anchors(text: &str, path: &Path) -> Result<Vec<K2Anchor>> {
    Ok(read_rows(text, path, ["theta_deg", "t_nm", "k2"])?
        .into_iter()
        .map(|[theta_deg, t_nm, k2]| K2Anchor { theta_deg, t_nm, k2 })
        .collect())
}

pub fn parse_dispersion(text: &str, path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    Ok(read_rows(text, path.as_ref(), ["t_nm", "fs_ghz"])?
        .into_iter()
        .map(|[t, f]| (t, f))
        .collect())
}

pub fn parse_capacitance_rows(text: &str, path: &Path) -> Result<Vec<CapacitanceRow>> {
    Ok(read_rows(text, path, ["c0_ff", "t_nm", "ne", "ng", "le_um"])?
        .into_iter()
        .map(|[c0, t, ne, ng, le]| CapacitanceRow {
            c0_f: c0 * 1e-15,
            t_nm: t,
            geometry: Geometry {
                ne: ne as u32,
                ng: ng as u32,
                le_um: le,
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build() {
        let m3 = MaterialModel::three_element_default();
        assert_eq!(m3.base_t_nm, 99);
        let m8 = MaterialModel::eight_element_default();
        assert!((m8.dispersion.thickness_for_fs(20.5e9).unwrap() - 89.0).abs() < 1e-3);
    }

    #[test]
    fn csv_errors_name_column() {
        let e = parse_k2_anchors("theta,t_nm,k2\n0,90,0.4\n", Path::new("x.csv")).unwrap_err();
        assert!(e.to_string().contains("theta_deg"), "{e}");
        let e = parse_dispersion("t_nm,fs_ghz\n90,abc\n", "y.csv").unwrap_err();
        assert!(e.to_string().contains("row 2"), "{e}");
    }

    #[test]
    fn load_dir_overrides_and_falls_back() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("dispersion.csv"),
            "t_nm,fs_ghz\n100,17.5\n120,14.6\n",
        )
        .unwrap();
        let m = MaterialModel::load_dir(dir.path(), 120).unwrap();
        assert!((m.dispersion.fs_ghz(100.0) - 17.5).abs() < 1e-9);
        assert_eq!(m.anisotropy, MaterialModel::three_element_default().anisotropy);
        let m8 = MaterialModel::eight_element_default().overlay_dir(dir.path()).unwrap();
        assert_eq!(m8.base_t_nm, 96);
        assert!((m8.dispersion.fs_ghz(120.0) - 14.6).abs() < 1e-9);
    }

    #[test]
    fn realization_trim_consistency() {
        let r = PhysicalRealization {
            t_nm: 83.0,
            theta_deg: 50.0,
            ne: 16,
            ng: 2,
            le_um: 62.0,
            trims: vec![7.0, 9.0],
        };
        r.validate(99.0).unwrap();
        assert!(r.validate(98.0).is_err());
    }

    #[test]
    fn constant_impedance_with_reciprocal_dispersion() {
        let m = MaterialModel {
            dispersion: DispersionModel::reciprocal(1750.0),
            ..MaterialModel::three_element_default()
        };
        let g = Geometry {
            ne: 16,
            ng: 4,
            le_um: 60.0,
        };
        let p0 = m.dispersion.fs_ghz(60.0) * m.capacitance.c0(60.0, &g);
        let mut t = 60.0;
        while t <= 130.0 {
            let p = m.dispersion.fs_ghz(t) * m.capacitance.c0(t, &g);
            assert!((p / p0 - 1.0).abs() < 0.05);
            t += 1.0;
        }
    }
}
