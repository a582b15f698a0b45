//! JSON design schema.
//!
//! Loading is strict (unknown keys are errors, reported with their JSON path).
//! Saving is canonical: sorted keys, SI units, floats rounded to 12
//! significant digits, so load → save → load is a fixed point.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ladder::{LadderDesign, Placement, Stage};
use crate::material::{
    fit_capacitance_density, fit_dispersion, parse_capacitance_rows, parse_dispersion,
    parse_k2_anchors, AnisotropyModel, MaterialModel, MaterialPreset, PhysicalRealization,
};
use crate::mbvd::MbvdParams;

/// Optional anchor-table locations, relative to the design file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialPaths {
    /// Built-in starting point; three-element when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<MaterialPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_anchors: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacitance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_t_nm: Option<u32>,
}

impl MaterialPaths {
    /// Material model from the listed tables, resolved against `base_dir`.
    /// Tables not listed come from the preset.
    pub fn load(&self, base_dir: &Path) -> Result<MaterialModel> {
        let mut m = self.preset.unwrap_or(MaterialPreset::ThreeElement).model();
        let read = |rel: &str| -> Result<(PathBuf, String)> {
            let p = base_dir.join(rel);
            let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            Ok((p, text))
        };
        if let Some(rel) = &self.k2_anchors {
            let (p, text) = read(rel)?;
            m.anisotropy = AnisotropyModel::from_anchors(&parse_k2_anchors(&text, &p)?)?;
        }
        if let Some(rel) = &self.dispersion {
            let (p, text) = read(rel)?;
            m.dispersion = fit_dispersion(&parse_dispersion(&text, &p)?)?;
        }
        if let Some(rel) = &self.capacitance {
            let (p, text) = read(rel)?;
            m.capacitance = fit_capacitance_density(&parse_capacitance_rows(&text, &p)?)?;
        }
        if let Some(base) = self.base_t_nm {
            m.base_t_nm = base;
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignFile {
    pub design: LadderDesign,
    pub physical: BTreeMap<String, PhysicalRealization>,
    pub material: Option<MaterialPaths>,
}

impl DesignFile {
    pub fn new(design: LadderDesign) -> Self {
        DesignFile {
            design,
            physical: BTreeMap::new(),
            material: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default = "default_z0")]
    z0_ohm: f64,
    stages: Vec<RawStage>,
    #[serde(default)]
    physical: BTreeMap<String, PhysicalRealization>,
    #[serde(default)]
    material: Option<MaterialPaths>,
}

fn default_z0() -> f64 {
    50.0
}

fn default_multiplicity() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStage {
    placement: Placement,
    label: String,
    #[serde(default = "default_multiplicity")]
    multiplicity: u32,
    resonator: RawResonator,
}

/// Each quantity may be given in SI or in the scaled unit named by its key.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResonator {
    fs_hz: Option<f64>,
    fs_ghz: Option<f64>,
    k2: Option<f64>,
    k2_percent: Option<f64>,
    q: f64,
    c0_f: Option<f64>,
    c0_ff: Option<f64>,
    #[serde(default)]
    rs_ohm: f64,
    ls_h: Option<f64>,
    ls_nh: Option<f64>,
}

fn either(
    path: &str,
    si_key: &str,
    si: Option<f64>,
    scaled_key: &str,
    scaled: Option<f64>,
    scale: f64,
    default: Option<f64>,
) -> Result<f64> {
    match (si, scaled) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v * scale),
        (Some(_), Some(_)) => Err(Error::Schema {
            path: path.to_string(),
            msg: format!("give only one of `{si_key}` and `{scaled_key}`"),
        }),
        (None, None) => default.ok_or_else(|| Error::Schema {
            path: path.to_string(),
            msg: format!("missing `{si_key}` (or `{scaled_key}`)"),
        }),
    }
}

impl RawResonator {
    fn into_params(self, path: &str) -> Result<MbvdParams> {
        let p = MbvdParams {
            fs: either(path, "fs_hz", self.fs_hz, "fs_ghz", self.fs_ghz, 1e9, None)?,
            k2: either(path, "k2", self.k2, "k2_percent", self.k2_percent, 0.01, None)?,
            q: self.q,
            c0: either(path, "c0_f", self.c0_f, "c0_ff", self.c0_ff, 1e-15, None)?,
            rs: self.rs_ohm,
            ls: either(path, "ls_h", self.ls_h, "ls_nh", self.ls_nh, 1e-9, Some(0.0))?,
        };
        p.validate().map_err(|e| Error::Schema {
            path: path.to_string(),
            msg: e.to_string(),
        })?;
        Ok(p)
    }
}

impl DesignFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        if raw.stages.is_empty() {
            return Err(Error::Schema {
                path: "stages".into(),
                msg: "at least one stage required".into(),
            });
        }
        if !(raw.z0_ohm > 0.0) {
            return Err(Error::Schema {
                path: "z0_ohm".into(),
                msg: format!("must be > 0, got {}", raw.z0_ohm),
            });
        }
        let mut stages = Vec::with_capacity(raw.stages.len());
        for (i, s) in raw.stages.into_iter().enumerate() {
            if s.multiplicity == 0 {
                return Err(Error::Schema {
                    path: format!("stages[{i}].multiplicity"),
                    msg: "must be >= 1".into(),
                });
            }
            let resonator = s.resonator.into_params(&format!("stages[{i}].resonator"))?;
            stages.push(Stage {
                placement: s.placement,
                resonator,
                multiplicity: s.multiplicity,
                label: s.label,
            });
        }
        let design = LadderDesign::new(stages, raw.z0_ohm)?;
        let labels = design.labels();
        if let Some(unknown) = raw.physical.keys().find(|k| !labels.contains(k)) {
            return Err(Error::Schema {
                path: format!("physical.{unknown}"),
                msg: "no stage carries this label".into(),
            });
        }
        Ok(DesignFile {
            design,
            physical: raw.physical,
            material: raw.material,
        })
    }

    pub fn to_value(&self) -> Value {
        let stages: Vec<Value> = self
            .design
            .stages
            .iter()
            .map(|s| {
                let p = &s.resonator;
                json!({
                    "placement": s.placement,
                    "label": s.label,
                    "multiplicity": s.multiplicity,
                    "resonator": {
                        "fs_hz": round12(p.fs),
                        "k2": round12(p.k2),
                        "q": round12(p.q),
                        "c0_f": round12(p.c0),
                        "rs_ohm": round12(p.rs),
                        "ls_h": round12(p.ls),
                    }
                })
            })
            .collect();
        let mut root = Map::new();
        root.insert("z0_ohm".into(), json!(round12(self.design.z0)));
        root.insert("stages".into(), Value::Array(stages));
        if !self.physical.is_empty() {
            let mut phys = serde_json::to_value(&self.physical).expect("serializable");
            round_all(&mut phys);
            root.insert("physical".into(), phys);
        }
        if let Some(m) = &self.material {
            root.insert("material".into(), serde_json::to_value(m).expect("serializable"));
        }
        Value::Object(root)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float")
}

fn round_all(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = json!(round12(n.as_f64().unwrap()));
        }
        Value::Array(a) => a.iter_mut().for_each(round_all),
        Value::Object(o) => o.values_mut().for_each(round_all),
        _ => {}
    }
}

pub fn load_design(path: &Path) -> Result<DesignFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DesignFile::from_json_str(&text)
}

pub fn save_design(file: &DesignFile, path: &Path) -> Result<()> {
    std::fs::write(path, file.to_json_string()).map_err(|e| Error::io(path, e))
}
