//! Experiment harness: configuration, reproducible runs, CSV/JSON records
//! and SVG figures for the `mesochaos` kernels.

pub mod error;
pub mod figure;
pub mod record;
pub mod run;
pub mod spec;

pub use error::{HarnessError, Result};
pub use figure::{emit_figure, Figure};
pub use record::ResultRecord;
pub use run::run;
pub use spec::{ExperimentSpec, FigureStyle, Kind};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MESOCHAOS_OUT";
