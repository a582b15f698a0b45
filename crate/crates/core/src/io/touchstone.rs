//! Touchstone v1 two-port reader and writer.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::ladder::{FrequencyGrid, FrequencyResponse};

#[derive(Debug, Error, PartialEq)]
pub enum TouchstoneError {
    #[error("touchstone line {line}: malformed option line: {reason}")]
    MalformedOptionLine { line: usize, reason: String },

    #[error("touchstone line {line}: frequency {freq} does not increase (previous {prev})")]
    NonMonotoneFrequency { line: usize, prev: f64, freq: f64 },

    #[error("touchstone: expected a 2-port file, found {found} ports")]
    WrongPortCount { found: String },

    #[error("touchstone line {line}: cannot parse number `{token}`")]
    BadNumber { line: usize, token: String },

    #[error("touchstone line {line}: record has {found} values, expected 9")]
    BadRecord { line: usize, found: usize },

    #[error("touchstone: no data records")]
    Empty,

    #[error("touchstone: need at least two frequency points, found {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataFormat {
    #[default]
    Ri,
    Ma,
    Db,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreqUnit {
    #[default]
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            FreqUnit::Hz => "HZ",
            FreqUnit::KHz => "KHZ",
            FreqUnit::MHz => "MHZ",
            FreqUnit::GHz => "GHZ",
        }
    }
}

impl DataFormat {
    fn keyword(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }
}

/// Header options. Defaults apply to writing; a file without an option line
/// is read as `# GHZ S MA R 50`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TouchstoneOptions {
    pub unit: FreqUnit,
    pub format: DataFormat,
    pub z0: f64,
}

impl Default for TouchstoneOptions {
    fn default() -> Self {
        TouchstoneOptions {
            unit: FreqUnit::Hz,
            format: DataFormat::Ri,
            z0: 50.0,
        }
    }
}

fn parse_options(line_no: usize, body: &str) -> Result<TouchstoneOptions, TouchstoneError> {
    let bad = |reason: String| TouchstoneError::MalformedOptionLine {
        line: line_no,
        reason,
    };
    let mut opts = TouchstoneOptions {
        unit: FreqUnit::GHz,
        format: DataFormat::Ma,
        z0: 50.0,
    };
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => opts.unit = FreqUnit::Hz,
            "KHZ" => opts.unit = FreqUnit::KHz,
            "MHZ" => opts.unit = FreqUnit::MHz,
            "GHZ" => opts.unit = FreqUnit::GHz,
            "S" => {}
            p @ ("Y" | "Z" | "H" | "G") => {
                return Err(bad(format!("parameter type {p} not supported, only S")))
            }
            "RI" => opts.format = DataFormat::Ri,
            "MA" => opts.format = DataFormat::Ma,
            "DB" => opts.format = DataFormat::Db,
            "R" => {
                let v = tokens
                    .next()
                    .ok_or_else(|| bad("`R` without a resistance".into()))?;
                let z0: f64 = v
                    .parse()
                    .map_err(|_| bad(format!("bad reference resistance `{v}`")))?;
                if !(z0 > 0.0) {
                    return Err(bad(format!("reference resistance must be > 0, got {z0}")));
                }
                opts.z0 = z0;
            }
            other => return Err(bad(format!("unknown token `{other}`"))),
        }
    }
    Ok(opts)
}

fn pair_to_complex(fmt: DataFormat, x: f64, y: f64) -> Complex64 {
    match fmt {
        DataFormat::Ri => Complex64::new(x, y),
        DataFormat::Ma => Complex64::from_polar(x, y.to_radians()),
        DataFormat::Db => Complex64::from_polar(10f64.powf(x / 20.0), y.to_radians()),
    }
}

/// Parses Touchstone v1 text holding two-port S-parameters.
pub fn parse_touchstone(text: &str) -> Result<FrequencyResponse, TouchstoneError> {
    let mut opts: Option<TouchstoneOptions> = None;
    let mut records: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            // Only the first option line counts.
            if opts.is_none() {
                opts = Some(parse_options(line_no, body)?);
            }
            continue;
        }
        let mut vals = Vec::new();
        for tok in line.split_whitespace() {
            vals.push(tok.parse::<f64>().map_err(|_| TouchstoneError::BadNumber {
                line: line_no,
                token: tok.to_string(),
            })?);
        }
        records.push((line_no, vals));
    }
    let opts = opts.unwrap_or(TouchstoneOptions {
        unit: FreqUnit::GHz,
        format: DataFormat::Ma,
        z0: 50.0,
    });
    let first = records.first().ok_or(TouchstoneError::Empty)?;
    if first.1.len() != 9 {
        // 1 + 2·n² values per record for an n-port (n ≤ 2 fits on one line).
        let n = first.1.len();
        let found = match n {
            3 => "1".to_string(),
            _ => format!("{} (record of {} values)", if n > 9 { ">2" } else { "?" }, n),
        };
        return Err(TouchstoneError::WrongPortCount { found });
    }
    let mut freqs = Vec::with_capacity(records.len());
    let (mut s11, mut s21, mut s12, mut s22) = (vec![], vec![], vec![], vec![]);
    for (line, v) in &records {
        if v.len() != 9 {
            return Err(TouchstoneError::BadRecord {
                line: *line,
                found: v.len(),
            });
        }
        let f = v[0] * opts.unit.scale();
        if let Some(&prev) = freqs.last() {
            if !(f > prev) {
                return Err(TouchstoneError::NonMonotoneFrequency {
                    line: *line,
                    prev,
                    freq: f,
                });
            }
        }
        freqs.push(f);
        // v1 two-port order: S11 S21 S12 S22.
        s11.push(pair_to_complex(opts.format, v[1], v[2]));
        s21.push(pair_to_complex(opts.format, v[3], v[4]));
        s12.push(pair_to_complex(opts.format, v[5], v[6]));
        s22.push(pair_to_complex(opts.format, v[7], v[8]));
    }
    let n = freqs.len();
    let grid = FrequencyGrid::from_points(freqs).map_err(|_| TouchstoneError::TooFewPoints(n))?;
    Ok(FrequencyResponse {
        grid,
        s11,
        s21,
        s12,
        s22,
        z0: opts.z0,
    })
}

/// Port count implied by a `.sNp` extension, if the name has one.
fn ports_from_extension(path: &Path) -> Option<String> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    let inner = ext.strip_prefix('s')?.strip_suffix('p')?;
    inner.parse::<u32>().ok().map(|n| n.to_string())
}

pub fn read_touchstone(path: &Path) -> Result<FrequencyResponse> {
    if let Some(n) = ports_from_extension(path) {
        if n != "2" {
            return Err(TouchstoneError::WrongPortCount { found: n }.into());
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_touchstone(&text)?)
}

fn fmt_pair(out: &mut String, fmt: DataFormat, z: Complex64) {
    let (x, y) = match fmt {
        DataFormat::Ri => (z.re, z.im),
        DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
        DataFormat::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
    };
    // `{}` is the shortest representation that parses back to the same f64.
    let _ = write!(out, " {x} {y}");
}

pub fn format_touchstone(resp: &FrequencyResponse, opts: &TouchstoneOptions) -> String {
    let mut out = String::with_capacity(resp.len() * 120);
    let _ = writeln!(
        out,
        "# {} S {} R {}",
        opts.unit.keyword(),
        opts.format.keyword(),
        resp.z0
    );
    let _ = writeln!(out, "! f s11 s21 s12 s22");
    for i in 0..resp.len() {
        let f = resp.freqs()[i] / opts.unit.scale();
        let _ = write!(out, "{f}");
        fmt_pair(&mut out, opts.format, resp.s11[i]);
        fmt_pair(&mut out, opts.format, resp.s21[i]);
        fmt_pair(&mut out, opts.format, resp.s12[i]);
        fmt_pair(&mut out, opts.format, resp.s22[i]);
        out.push('\n');
    }
    out
}

pub fn write_touchstone(resp: &FrequencyResponse, path: &Path, opts: &TouchstoneOptions) -> Result<()> {
    std::fs::write(path, format_touchstone(resp, opts)).map_err(|e| Error::io(path, e))
}
