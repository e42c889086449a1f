//! Configuration, orchestration of the stages, and report emission.

mod config;
mod emit;
mod report;
mod run;

pub use config::ExperimentConfig;
pub use emit::{
    emit, load_saved, prepare_dir, write_json, write_tables, COUNTING_TABLE, INTERPOLANT_FILE, ITERATION_TABLE,
    RECONSTRUCTION_TABLE, REPORT_FILE, TYPE_TABLE,
};
pub use report::{
    CartwrightSection, ExperimentReport, Gate, GrowthSection, InterpolationSection, IterationSection, OperatorSection,
    ParametersSection, PoleSection, RestoredRun, SavedRun, SineSanity, SCHEMA_VERSION,
};
pub use run::{
    analyze_poles, exit_code, reconstruction_stage, run, solve_stage, thresholds, RunOutput, Solved, BM_LENGTHS,
    QUOTIENT_POINTS,
};
