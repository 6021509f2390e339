//! Auto-tuning of the VDTP chunked file transfer protocol for vehicular
//! ad hoc networks.
//!
//! The pipeline has four layers:
//!
//! - [`space`]: the three protocol knobs and their admissible ranges.
//! - [`sim`]: a discrete-event simulator of the FIRQ/FIRP/DRQ/DRP exchange
//!   over an intermittent, lossy vehicular link.
//! - [`fitness`]: the replicated-simulation objective that scores a knob
//!   setting.
//! - [`optim`]: five budget-accounted metaheuristics (PSO, DE, GA, ES, SA).
//!
//! [`stats`] and [`harness`] turn many optimizer runs into comparison tables.

pub mod error;
pub mod fitness;
pub mod harness;
pub mod optim;
pub mod seed;
pub mod sim;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
pub use fitness::{evaluate, FitnessReport};
pub use optim::{run, Algorithm, OptimizerParams, RunRecord};
pub use sim::{Scenario, TransferOutcome};
pub use space::{Bounds, ProtocolSettings, VdtpConfig};
