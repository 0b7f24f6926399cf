//! System-level simulation of downlink service to passengers aboard a
//! high-speed train.
//!
//! Radio units sit in pairs along the track, one facing each direction.
//! Passengers inside the carriages are served either directly (baseline,
//! coordinated or cooperative transmission) or through a roof-mounted
//! relay. The engine runs drop-based Monte Carlo sweeps over train
//! positions; the mobility module counts handover signaling for per-UE
//! handover and for a moving cell.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod mobility;
pub mod phy;
pub mod report;
pub mod scheduler;
pub mod schemes;

pub use config::{parse_config, ScenarioConfig};
pub use engine::{derive_seed, mean_ci95, run_drop, sweep, DropResult, Scenario, SweepPoint, SweepResult};
pub use error::{ConfigError, Result, SimError};
pub use schemes::SchemeKind;
