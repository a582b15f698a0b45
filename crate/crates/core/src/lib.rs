//! XBAR acoustic ladder filter workbench: mBVD resonators, ladder cascade
//! analysis, filter metrics, film material models, synthesis and fitting.

pub mod error;
pub mod fit;
pub mod io;
pub mod ladder;
pub mod material;
pub mod mbvd;
pub mod metrics;
pub mod numeric;
pub mod prototypes;
pub mod synth;
pub mod twoport;

pub use error::{Error, ErrorClass, Result};
pub use ladder::{FrequencyGrid, FrequencyResponse, LadderDesign, Placement, Stage};
pub use material::{MaterialModel, PhysicalRealization};
pub use mbvd::{MbvdParams, MotionalBranch};
pub use metrics::{BandReference, FilterMetrics, MetricsOptions, OobExclusion};
pub use num_complex::Complex64;
pub use twoport::Mat2;
