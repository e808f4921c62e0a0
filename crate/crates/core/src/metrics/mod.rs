//! Quantities computed from a run: population partitions, end-state
//! classification of the last two words, first-word origins, neighbourhood
//! size distributions, communication and exchange counts, and a log audit.
//!
//! Everything except the population snapshot and neighbourhood sampling is
//! a pure function of the event log.

pub mod audit;
pub mod end_state;
pub mod interactions;
pub mod neighborhood;
pub mod origins;
pub mod population;
pub mod replay;

pub use audit::{audit_log, AuditReport};
pub use end_state::{detect_end_states, spread_bin, EndClass, EndState, EndStateError, SpreadBin};
pub use interactions::{interaction_tally, InteractionTally};
pub use neighborhood::{NeighborhoodCounts, Scope};
pub use origins::{first_word_origins, origin_series, FirstWordOrigin, OriginBin};
pub use population::PopulationSnapshot;
pub use replay::Replay;
