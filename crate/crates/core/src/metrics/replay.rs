//! Re-derives population state by walking an event log.

use crate::arena::Resource;
use crate::commitment::CommitmentState;
use crate::events::{Event, EventKind};
use crate::naming::WordId;

/// Commitment of every robot, the resource it last belonged to, and every
/// inventory, as implied by the events applied so far.
#[derive(Clone, Debug)]
pub struct Replay {
    pub commitments: Vec<CommitmentState>,
    /// Resource each robot was last committed to, kept through demotion.
    pub last_resource: Vec<Option<Resource>>,
    pub inventories: Vec<Vec<WordId>>,
    pub provenance: Vec<Option<Resource>>,
}

impl Replay {
    pub fn new(n_robots: usize) -> Self {
        Replay {
            commitments: vec![CommitmentState::Uncommitted; n_robots],
            last_resource: vec![None; n_robots],
            inventories: vec![Vec::new(); n_robots],
            provenance: Vec::new(),
        }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut u = 0;
        let mut a = 0;
        let mut b = 0;
        for c in &self.commitments {
            match c {
                CommitmentState::Uncommitted => u += 1,
                CommitmentState::Committed(Resource::A) => a += 1,
                CommitmentState::Committed(Resource::B) => b += 1,
            }
        }
        (u, a, b)
    }

    pub fn provenance_of(&self, w: WordId) -> Option<Resource> {
        self.provenance.get(w.0 as usize).copied().flatten()
    }

    /// Applies one event without checking it.
    pub fn apply(&mut self, e: &Event) {
        let robot = e.robot.map(|r| r as usize);
        match (&e.kind, robot) {
            (EventKind::Discover { resource }, Some(r))
            | (EventKind::Recruit { resource, .. }, Some(r))
            | (EventKind::Locked { resource }, Some(r)) => {
                self.commitments[r] = CommitmentState::Committed(*resource);
                self.last_resource[r] = Some(*resource);
            }
            (EventKind::CrossInhibit { .. }, Some(r)) | (EventKind::Abandon { .. }, Some(r)) => {
                self.commitments[r] = CommitmentState::Uncommitted;
            }
            (EventKind::WordCreated { word, provenance, .. }, Some(r)) => {
                let i = word.0 as usize;
                if self.provenance.len() <= i {
                    self.provenance.resize(i + 1, None);
                }
                self.provenance[i] = Some(*provenance);
                self.inventories[r] = vec![*word];
            }
            (EventKind::Game { after, .. }, Some(r)) => {
                self.inventories[r] = after.clone();
            }
            _ => {}
        }
    }
}
