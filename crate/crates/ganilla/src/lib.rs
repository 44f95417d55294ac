//! Training, inference and evaluation tools around the core networks:
//! image folders, checkpoints, run directories and the `ganilla` binary.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod evaluate;
pub mod imageio;
pub mod params_report;
pub mod toy;
pub mod trainer;
pub mod translate;
