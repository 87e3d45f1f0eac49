//! Command-line harness for the w535 engine: bundled expected tables,
//! subgroup references, the acceptance pipeline and report diffing.

pub mod compare;
pub mod config;
pub mod expected;
pub mod pipeline;
pub mod render;
pub mod resolve;

pub use config::{Check, Format, RunConfig};
pub use expected::{ExpectedRow, ExpectedTables};
pub use pipeline::{run_pipeline, Context, Report, Status};
