//! Scenario files, move scripts, reports and the `ghs` command line on top
//! of `ghs-core`.

pub mod checks;
pub mod cli;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod script;

pub use scenario::{parse, ParseError, ScenarioFile};
