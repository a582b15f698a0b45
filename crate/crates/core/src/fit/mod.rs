//! Resonator extraction from two-port data and mBVD ladder fitting.

pub mod compare;
pub mod extract;
pub mod lm;
pub mod problem;

pub use compare::{compare_table, CompareRow, CompareTable};
pub use extract::{extract_resonator, ExtractOptions, ResonatorExtraction};
pub use lm::{LmOptions, LmReport, LmStatus};
pub use problem::{fit_mbvd, FitBounds, FitProblem, FitResult, GroupFit, ParamKind};
