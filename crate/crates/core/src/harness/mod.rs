//! Instance generation, single runs and parameter sweeps.

pub mod generator;
pub mod run;
pub mod sweep;

pub use generator::{generate, Family, GeneratorSpec};
pub use run::{oracle_report, run, Mode, OracleReport, RunConfig, RunReport};
pub use sweep::{run_grid, write_csv, Grid, SweepRow};
