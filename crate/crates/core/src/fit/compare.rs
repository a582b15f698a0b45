//! Design-vs-fit parameter table (rows per resonator and source).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ladder::LadderDesign;
use crate::mbvd::MbvdParams;

pub const SOURCE_DESIGN: &str = "Design";
pub const SOURCE_FILTER_FIT: &str = "Filter fitting";
pub const SOURCE_RES_FIT: &str = "Res. fitting";

const COLUMNS: [&str; 6] = ["fs_ghz", "k2_pct", "q", "c0_ff", "rs_ohm", "ls_nh"];

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub resonator: String,
    pub source: String,
    /// fs (GHz), k2 (%), Q, c0 (fF), Rs (Ω), Ls (nH).
    pub values: [f64; 6],
}

impl CompareRow {
    pub fn new(resonator: &str, source: &str, p: &MbvdParams) -> Self {
        CompareRow {
            resonator: resonator.into(),
            source: source.into(),
            values: [p.fs * 1e-9, p.k2 * 100.0, p.q, p.c0 * 1e15, p.rs, p.ls * 1e9],
        }
    }

    pub fn formatted(&self) -> Vec<String> {
        self.values.iter().map(|&v| sig4(v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub rows: Vec<CompareRow>,
}

/// Four significant digits with trailing zeros dropped.
pub fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (3 - mag).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Rows per resonator: design, filter fit and (when given) per-resonator
/// fits. Label sets must agree.
pub fn compare_table(
    design: &LadderDesign,
    fitted: &LadderDesign,
    res_fits: Option<&BTreeMap<String, MbvdParams>>,
) -> Result<CompareTable> {
    let labels = design.labels();
    let mut a = labels.clone();
    let mut b = fitted.labels();
    a.sort();
    b.sort();
    if a != b {
        return Err(Error::LabelMismatch(format!("design {a:?} vs fit {b:?}")));
    }
    if let Some(r) = res_fits {
        if let Some(k) = r.keys().find(|k| !labels.contains(k)) {
            return Err(Error::LabelMismatch(format!("resonator fit `{k}` not in design")));
        }
    }
    let mut rows = Vec::new();
    for l in &labels {
        rows.push(CompareRow::new(l, SOURCE_DESIGN, design.resonator(l).unwrap()));
        rows.push(CompareRow::new(l, SOURCE_FILTER_FIT, fitted.resonator(l).unwrap()));
        if let Some(p) = res_fits.and_then(|r| r.get(l)) {
            rows.push(CompareRow::new(l, SOURCE_RES_FIT, p));
        }
    }
    Ok(CompareTable { rows })
}

impl CompareTable {
    /// Relative change of every non-design row against its design row;
    /// absolute change where the design value is zero.
    pub fn deltas(&self) -> Vec<(String, String, [f64; 6])> {
        let mut out = Vec::new();
        for r in self.rows.iter().filter(|r| r.source != SOURCE_DESIGN) {
            let Some(d) = self
                .rows
                .iter()
                .find(|d| d.resonator == r.resonator && d.source == SOURCE_DESIGN)
            else {
                continue;
            };
            let mut v = [0.0; 6];
            for k in 0..6 {
                let (x, y) = (r.values[k], d.values[k]);
                v[k] = if y == 0.0 { x - y } else { (x - y) / y };
            }
            out.push((r.resonator.clone(), r.source.clone(), v));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("resonator,source,{}\n", COLUMNS.join(","));
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.resonator, r.source, r.formatted().join(",")));
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> =
            vec![["resonator", "source", "fs (GHz)", "k2 (%)", "Q", "C0 (fF)", "Rs (Ω)", "Ls (nH)"]
                .iter()
                .map(|s| s.to_string())
                .collect()];
        for r in &self.rows {
            let mut row = vec![r.resonator.clone(), r.source.clone()];
            row.extend(r.formatted());
            cells.push(row);
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (v, &w))| {
                    let pad = w - v.chars().count();
                    if c < 2 {
                        format!("{v}{}", " ".repeat(pad))
                    } else {
                        format!("{}{v}", " ".repeat(pad))
                    }
                })
                .collect();
            s.push_str(line.join("  ").trim_end());
            s.push('\n');
        }
        s
    }
}
