//! Graph files and reports.

mod graphfile;
mod report;

pub use graphfile::{GraphFile, ParseError};
pub use report::{
    ensemble_report, ensemble_row, fmt_real, genericity_flags, nodal_row, Report, ENSEMBLE_COLUMNS,
    NODAL_COLUMNS,
};
