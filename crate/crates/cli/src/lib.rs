//! Configuration-driven runs of the darkstate library.

pub mod build;
pub mod config;
pub mod run;
