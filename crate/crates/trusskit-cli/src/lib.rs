//! Command line and HTTP front ends for `trusskit`.

pub mod api;
pub mod cli;
pub mod error;
