//! Word traffic within and between the two committed sub-populations, and
//! robots moving from one sub-population to the other.

use serde::{Deserialize, Serialize};

use super::replay::Replay;
use crate::commitment::CommitmentState;
use crate::events::{EventKind, EventLog};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionTally {
    /// Deliveries between robots committed to the same resource.
    pub within: u64,
    /// Deliveries between robots committed to different resources.
    pub between: u64,
    /// Robots committing to a resource other than the one they were last
    /// committed to.
    pub exchanges: u64,
}

impl InteractionTally {
    pub fn merge(&mut self, o: &InteractionTally) {
        self.within += o.within;
        self.between += o.between;
        self.exchanges += o.exchanges;
    }
}

/// Per-interval tallies; interval `k` covers steps `[k*interval, (k+1)*interval)`.
/// Deliveries with an uncommitted endpoint count in neither series.
pub fn interaction_tally(log: &EventLog, n_robots: usize, interval_steps: u64) -> Vec<InteractionTally> {
    let mut replay = Replay::new(n_robots);
    let mut out: Vec<InteractionTally> = Vec::new();
    for e in log.iter() {
        let k = (e.step / interval_steps) as usize;
        let slot = |out: &mut Vec<InteractionTally>| {
            if out.len() <= k {
                out.resize(k + 1, InteractionTally::default());
            }
        };
        match (&e.kind, e.robot) {
            (EventKind::Utter { hearers, .. }, Some(s)) => {
                if let CommitmentState::Committed(rs) = replay.commitments[s as usize] {
                    slot(&mut out);
                    for &h in hearers {
                        if let CommitmentState::Committed(rh) = replay.commitments[h as usize] {
                            if rh == rs {
                                out[k].within += 1;
                            } else {
                                out[k].between += 1;
                            }
                        }
                    }
                }
            }
            (EventKind::Recruit { resource, .. }, Some(r)) | (EventKind::Discover { resource }, Some(r)) => {
                if replay.last_resource[r as usize].is_some_and(|prev| prev != *resource) {
                    slot(&mut out);
                    out[k].exchanges += 1;
                }
            }
            _ => {}
        }
        replay.apply(e);
    }
    out
}
