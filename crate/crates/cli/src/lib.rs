//! Library half of the `tro` command: workload specs, single-run commands,
//! the benchmark harness and exit-code mapping.

pub mod bench;
pub mod commands;
pub mod exit;
pub mod specs;
