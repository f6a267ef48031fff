//! Trace-driven two-tier memory simulation.
//!
//! The crate models a slow memory tier fronted by a device-side hot-page
//! profiler: a count-min sketch with per-entry valid and hot bits, an H3 hash
//! per lane, a duplicate-suppressing hot-page buffer, and a 64-bin histogram
//! used to estimate a tight error bound. Around it sit a bandwidth monitor,
//! emulations of the usual host-side profilers (page-table scanning, hint
//! faults, PMU sampling), a two-tier placement simulator with LRU-2Q cold page
//! detection, and a dynamic hotness-threshold policy.
//!
//! Most users start from [`experiment::run_experiment`]; the `examples/`
//! directory has one runnable program per subsystem.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod monitor;
pub mod policy;
pub mod profilers;
pub mod sketch;
pub mod tiersim;
pub mod trace;
pub mod workloads;

pub use error::{Error, Result};
pub use trace::{AccessEvent, Op, SimConfig, SimRng};
