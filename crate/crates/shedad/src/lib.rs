//! Ingest, simulation, file formats and command-line front end for the
//! district-heating topology and anomaly pipeline in `shedad-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod formats;
pub mod ingest;
pub mod matrices;
pub mod pipeline;
pub mod sim;

pub use error::{Error, Result};
