//! How each robot obtained its first word.

use serde::{Deserialize, Serialize};

use super::replay::Replay;
use crate::events::{EventKind, EventLog};
use crate::naming::WordOrigin;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstWordOrigin {
    pub robot: u32,
    pub step: u64,
    pub committed: bool,
    /// `SelfSpeak` or `SelfEnterResource` for invented words, `Received`
    /// for words learnt from a neighbour.
    pub trigger: WordOrigin,
}

impl FirstWordOrigin {
    pub fn is_self(&self) -> bool {
        self.trigger.is_self()
    }
}

/// At most one entry per robot, in log order.
pub fn first_word_origins(log: &EventLog, n_robots: usize) -> Vec<FirstWordOrigin> {
    let mut replay = Replay::new(n_robots);
    let mut done = vec![false; n_robots];
    let mut out = Vec::new();
    for e in log.iter() {
        let origin = match (&e.kind, e.robot) {
            (EventKind::WordCreated { trigger, committed, .. }, Some(r)) => Some((r, *committed, *trigger)),
            (EventKind::Game { before, .. }, Some(r)) if before.is_empty() => {
                Some((r, replay.commitments[r as usize].is_committed(), WordOrigin::Received))
            }
            _ => None,
        };
        if let Some((robot, committed, trigger)) = origin {
            if !done[robot as usize] {
                done[robot as usize] = true;
                out.push(FirstWordOrigin {
                    robot,
                    step: e.step,
                    committed,
                    trigger,
                });
            }
        }
        replay.apply(e);
    }
    out
}

/// Counts of first words per time bin, split by commitment and by
/// self-invented versus received.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginBin {
    pub committed_self: u64,
    pub committed_received: u64,
    pub uncommitted_self: u64,
    pub uncommitted_received: u64,
}

impl OriginBin {
    pub fn add(&mut self, o: &FirstWordOrigin) {
        match (o.committed, o.is_self()) {
            (true, true) => self.committed_self += 1,
            (true, false) => self.committed_received += 1,
            (false, true) => self.uncommitted_self += 1,
            (false, false) => self.uncommitted_received += 1,
        }
    }

    pub fn merge(&mut self, other: &OriginBin) {
        self.committed_self += other.committed_self;
        self.committed_received += other.committed_received;
        self.uncommitted_self += other.uncommitted_self;
        self.uncommitted_received += other.uncommitted_received;
    }

    pub fn total(&self) -> u64 {
        self.committed_self + self.committed_received + self.uncommitted_self + self.uncommitted_received
    }
}

/// Bins origins by `bin_steps`; bin `k` covers steps `[k*bin, (k+1)*bin)`.
pub fn origin_series(origins: &[FirstWordOrigin], bin_steps: u64) -> Vec<OriginBin> {
    let mut bins: Vec<OriginBin> = Vec::new();
    for o in origins {
        let k = (o.step / bin_steps) as usize;
        if bins.len() <= k {
            bins.resize(k + 1, OriginBin::default());
        }
        bins[k].add(o);
    }
    bins
}
