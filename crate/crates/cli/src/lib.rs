//! Configuration, execution and reporting behind the `ladderlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, Quantity, Task};
pub use report::{emit, Report, Row, RunMeta, Verdict};
pub use runner::{run, run_task, RunError, RunOptions};
