//! Scenario-driven verification runs over the cmpadic library.

pub mod report;
pub mod run;
pub mod scenario;

pub use report::{Check, Report};
pub use run::{execute, CliError, Command, Overrides};
pub use scenario::{SchemaError, Scenario};
