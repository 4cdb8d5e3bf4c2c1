//! Run configuration, report rendering and the command-line entry point.
//!
//! Every report is a JSON document tagged `"schema": "alphamod/1"` that
//! embeds the resolved configuration and seed; CSV and aligned text are
//! derived from it.

mod args;
mod config;
mod run;

pub use args::{init_threads, main_with_args};
pub use config::{parse_grid, parse_pair, parse_range, parse_space, Builtin, Command, Format, GridParams, NormInput, RunConfig, SpaceText};
pub use run::{emit, exit_code, read_grid_file, render, run, Outcome, SCHEMA};
