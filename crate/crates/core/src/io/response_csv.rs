//! Plot-ready CSV form of a simulated response.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::{FrequencyGrid, FrequencyResponse};

pub const HEADER: [&str; 9] = [
    "f_hz", "s11_re", "s11_im", "s21_re", "s21_im", "s22_re", "s22_im", "il_db", "rl_db",
];

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    }
}

pub fn format_response_csv(resp: &FrequencyResponse) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory csv");
    for i in 0..resp.len() {
        let row = [
            resp.freqs()[i],
            resp.s11[i].re,
            resp.s11[i].im,
            resp.s21[i].re,
            resp.s21[i].im,
            resp.s22[i].re,
            resp.s22[i].im,
            resp.il_db(i),
            resp.rl_db(i),
        ];
        w.write_record(row.iter().map(|v| v.to_string()))
            .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}

pub fn write_response_csv(resp: &FrequencyResponse, path: &Path) -> Result<()> {
    std::fs::write(path, format_response_csv(resp)).map_err(|e| Error::io(path, e))
}

/// Reads a response written by [`write_response_csv`]. The file carries no
/// s12 column; the network is taken as reciprocal (s12 = s21).
pub fn read_response_csv(path: &Path, z0: f64) -> Result<FrequencyResponse> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| csv_err(path, format!("missing column `{name}`")))
    };
    let idx: Vec<usize> = HEADER[..7].iter().map(|h| col(h)).collect::<Result<_>>()?;
    let mut f = Vec::new();
    let (mut s11, mut s21, mut s22) = (vec![], vec![], vec![]);
    for (row_no, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let mut v = [0.0; 7];
        for (k, &i) in idx.iter().enumerate() {
            let s = rec.get(i).unwrap_or("");
            v[k] = s.trim().parse().map_err(|_| {
                csv_err(path, format!("row {}: bad number `{s}`", row_no + 2))
            })?;
        }
        f.push(v[0]);
        s11.push(Complex64::new(v[1], v[2]));
        s21.push(Complex64::new(v[3], v[4]));
        s22.push(Complex64::new(v[5], v[6]));
    }
    let grid = FrequencyGrid::from_points(f)?;
    Ok(FrequencyResponse {
        grid,
        s12: s21.clone(),
        s11,
        s21,
        s22,
        z0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::touchstone::{format_touchstone, parse_touchstone, FreqUnit, TouchstoneOptions};
    use crate::prototypes;

    #[test]
    fn csv_round_trip_and_agrees_with_touchstone() {
        let d = prototypes::eight_element();
        let r = d.cascade(&FrequencyGrid::uniform(10e9, 30e9, 50e6).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_response_csv(&r, &p).unwrap();
        let back = read_response_csv(&p, 50.0).unwrap();
        assert_eq!(back.grid, r.grid);
        assert_eq!((&back.s11, &back.s21, &back.s22), (&r.s11, &r.s21, &r.s22));
        for i in 0..r.len() {
            assert!((back.s12[i] - r.s12[i]).norm() < 1e-10);
        }
        let ts = parse_touchstone(&format_touchstone(
            &r,
            &TouchstoneOptions {
                unit: FreqUnit::GHz,
                ..Default::default()
            },
        ))
        .unwrap();
        for i in 0..r.len() {
            assert!((ts.freqs()[i] - back.freqs()[i]).abs() <= 1e-9 * back.freqs()[i]);
            assert!(ts.matrix(i).max_abs_diff(&back.matrix(i)) < 1e-9);
        }
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "f_hz,s11_re\n1,0\n").unwrap();
        let e = read_response_csv(&p, 50.0).unwrap_err();
        assert!(e.to_string().contains("s11_im"), "{e}");
    }
}
