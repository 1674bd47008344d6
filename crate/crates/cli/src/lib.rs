//! Configuration, check suite, experiment runner and report emission behind the `pinned` binary.

pub mod checks;
pub mod config;
pub mod experiments;
pub mod report;
