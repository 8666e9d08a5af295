//! Configuration input and artifact output.

pub mod config;
pub mod emit;
pub mod off;
pub mod report;
