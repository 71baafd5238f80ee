//! Simulation driver, Monte-Carlo aggregation, bound checks and CSV output.

mod config;
mod csv;
mod run;

pub use config::{CapacitySpec, EtaChoice, ExperimentConfig, PolicyConfig, SeedPlan, TraceSource};
pub use csv::{emit_csv, parse_csv, subsampled_slots, write_csv, CsvRow, SlotRows, CSV_HEADER};
pub use run::{
    bound_check, run_monte_carlo, run_one, simulate, AggregateSeries, BoundCheck, Experiment,
    MonteCarloResult, RunOutcome, SeedSummary, SlotStats,
};
