//! Command-line and HTTP front ends for `repolabel-core`.

pub mod api;
pub mod cli;
pub mod jobs;
