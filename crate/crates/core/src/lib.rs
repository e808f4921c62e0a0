//! Agent-based simulation of a foraging robot swarm that plays the minimal
//! naming game while collectively choosing between two identical resources.
//!
//! The crate is organised by model layer: [`arena`] geometry, [`motion`]
//! kinematics, [`commitment`] to resources, the [`naming`] game, the
//! [`sim`] loop that binds them, [`metrics`] over the resulting event logs,
//! [`batch`] orchestration and [`summarize`] for the CSV outputs.

pub mod arena;
pub mod batch;
pub mod chooser;
pub mod commitment;
pub mod config;
pub mod error;
pub mod events;
pub mod geometry;
pub mod metrics;
pub mod motion;
pub mod naming;
pub mod sim;
pub mod summarize;

pub use arena::{AreaKind, Arena, Resource};
pub use chooser::{Chooser, RngChooser, Site};
pub use config::{BeaconPolicy, Mode, RunConfig};
pub use error::{ConfigError, Error, Result};
pub use events::{Event, EventKind, EventLog};
pub use geometry::Vec2;
pub use naming::{GameVariant, WordId};
pub use sim::{simulate, RunOutcome, RunRecord, Simulation};
