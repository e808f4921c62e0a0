use serde::{Deserialize, Serialize};

use crate::arena::Resource;
use crate::commitment::CommitmentState;
use crate::naming::WordId;

/// Partition of the swarm by commitment and by vocabulary at one instant.
///
/// `know_a` and `know_b` may overlap: a robot holding words of both
/// provenances is counted in both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationSnapshot {
    pub step: u64,
    pub uncommitted: usize,
    pub committed_a: usize,
    pub committed_b: usize,
    /// Robots knowing at least one A-tagged word.
    pub know_a: usize,
    pub know_b: usize,
    pub no_words: usize,
    /// Committed robots knowing a word of their own resource.
    pub matching: usize,
    /// Committed robots knowing a word of the other resource.
    pub mismatched: usize,
    /// Distinct surviving words per provenance.
    pub words_a: usize,
    pub words_b: usize,
}

impl PopulationSnapshot {
    /// `provenance` maps a word to its tag.
    pub fn compute<F>(step: u64, commitments: &[CommitmentState], inventories: &[Vec<WordId>], provenance: F) -> Self
    where
        F: Fn(WordId) -> Resource,
    {
        let mut s = PopulationSnapshot {
            step,
            uncommitted: 0,
            committed_a: 0,
            committed_b: 0,
            know_a: 0,
            know_b: 0,
            no_words: 0,
            matching: 0,
            mismatched: 0,
            words_a: 0,
            words_b: 0,
        };
        let mut seen = std::collections::BTreeSet::new();
        for (c, inv) in commitments.iter().zip(inventories) {
            let has_a = inv.iter().any(|&w| provenance(w) == Resource::A);
            let has_b = inv.iter().any(|&w| provenance(w) == Resource::B);
            s.know_a += usize::from(has_a);
            s.know_b += usize::from(has_b);
            s.no_words += usize::from(inv.is_empty());
            match c {
                CommitmentState::Uncommitted => s.uncommitted += 1,
                CommitmentState::Committed(Resource::A) => {
                    s.committed_a += 1;
                    s.matching += usize::from(has_a);
                    s.mismatched += usize::from(has_b);
                }
                CommitmentState::Committed(Resource::B) => {
                    s.committed_b += 1;
                    s.matching += usize::from(has_b);
                    s.mismatched += usize::from(has_a);
                }
            }
            seen.extend(inv.iter().copied());
        }
        for w in seen {
            match provenance(w) {
                Resource::A => s.words_a += 1,
                Resource::B => s.words_b += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.uncommitted + self.committed_a + self.committed_b
    }

    /// No committed robot knows a word of the other resource.
    pub fn polarised(&self) -> bool {
        self.mismatched == 0
    }
}
