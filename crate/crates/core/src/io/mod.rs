//! File formats: Touchstone, response CSV and the JSON design schema.

pub mod design_file;
pub mod response_csv;
pub mod touchstone;

pub use design_file::{load_design, save_design, DesignFile};
pub use response_csv::{read_response_csv, write_response_csv};
pub use touchstone::{read_touchstone, write_touchstone, TouchstoneError, TouchstoneOptions};
