use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the workbench library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("ladder design has no stages")]
    EmptyDesign,

    #[error("response has no interior |s21| maximum; cannot locate a passband")]
    NoPassband,

    #[error("band edge at -{drop_db} dB not found within the grid ({side} side)")]
    UnboundedBand { drop_db: f64, side: &'static str },

    #[error("empty out-of-band search interval on the {0} side")]
    EmptySearchInterval(&'static str),

    #[error("value {value} outside model range [{lo}, {hi}] for {what}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("k2 = {k2} unreachable at t = {t_nm} nm (achievable range [{lo}, {hi}])")]
    UnreachableK2 { k2: f64, t_nm: f64, lo: f64, hi: f64 },

    #[error("resonator `{label}`: {axis} unreachable: {reason}")]
    Unrealizable {
        label: String,
        axis: &'static str,
        reason: String,
    },

    #[error("not enough anchors: {0}")]
    InsufficientAnchors(String),

    #[error("no feasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("no feasible trim plan: {0}")]
    InfeasibleTrim(String),

    #[error("no identifiable resonance: {0}")]
    NoResonance(String),

    #[error("fit setup: {0}")]
    FitSetup(String),

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("schema error at `{path}`: {msg}")]
    Schema { path: String, msg: String },

    #[error(transparent)]
    Touchstone(#[from] crate::io::touchstone::TouchstoneError),

    #[error("csv error in {path}: {msg}")]
    Csv { path: PathBuf, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad argument values.
    Input,
    /// Malformed or inconsistent input files.
    Schema,
    /// A solver or search found no acceptable answer.
    Solver,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidParameter { .. } | InvalidGrid(_) | OutOfRange { .. } | EmptyDesign => {
                ErrorClass::Input
            }
            Schema { .. } | Touchstone(_) | Csv { .. } | LabelMismatch(_) | InsufficientAnchors(_) => {
                ErrorClass::Schema
            }
            NoPassband
            | UnboundedBand { .. }
            | EmptySearchInterval(_)
            | UnreachableK2 { .. }
            | Unrealizable { .. }
            | InfeasibleGeometry(_)
            | InfeasibleTrim(_)
            | NoResonance(_)
            | FitSetup(_) => ErrorClass::Solver,
            Io { .. } => ErrorClass::Io,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
