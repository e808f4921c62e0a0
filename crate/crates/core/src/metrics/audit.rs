//! Independent consistency check of an event log against the model's laws.

use std::collections::BTreeSet;

use serde::Serialize;

use super::replay::Replay;
use crate::commitment::CommitmentState;
use crate::events::{EventKind, EventLog};
use crate::naming::{Outcome, WordId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub games: u64,
    pub successes: u64,
    /// Transitions not allowed from the replayed commitment state.
    pub commitment_violations: u64,
    /// Games whose recorded inventories break the success/failure rules or
    /// disagree with the replayed inventory.
    pub game_violations: u64,
    /// Word ids created twice, or words in circulation with no provenance.
    pub disjointness_violations: u64,
    /// Extinction events not matching the replayed holder counts.
    pub extinction_violations: u64,
    /// Convergence declared while inventories differ.
    pub convergence_violations: u64,
    /// Interaction or word events stamped inside the warm-up.
    pub warmup_violations: u64,
    pub abandonments: u64,
    pub cross_inhibitions: u64,
}

impl AuditReport {
    pub fn violations(&self) -> u64 {
        self.commitment_violations
            + self.game_violations
            + self.disjointness_violations
            + self.extinction_violations
            + self.convergence_violations
            + self.warmup_violations
    }
}

pub fn audit_log(log: &EventLog, n_robots: usize, warmup_steps: u64) -> AuditReport {
    let mut r = AuditReport::default();
    let mut replay = Replay::new(n_robots);
    let mut holders: Vec<u32> = Vec::new();
    let mut created: BTreeSet<WordId> = BTreeSet::new();

    let change_holders = |holders: &mut Vec<u32>, before: &[WordId], after: &[WordId]| -> Vec<WordId> {
        let mut died = Vec::new();
        for w in before {
            if !after.contains(w) {
                let h = &mut holders[w.0 as usize];
                *h = h.saturating_sub(1);
                if *h == 0 {
                    died.push(*w);
                }
            }
        }
        for w in after {
            if !before.contains(w) {
                let i = w.0 as usize;
                if holders.len() <= i {
                    holders.resize(i + 1, 0);
                }
                holders[i] += 1;
            }
        }
        died
    };

    let mut pending_extinct: Vec<WordId> = Vec::new();
    // beacons carry the sender's state from the start of the step
    let mut step_start = replay.commitments.clone();
    let mut current_step = None;
    for e in log.iter() {
        if current_step != Some(e.step) {
            current_step = Some(e.step);
            step_start.clone_from(&replay.commitments);
        }
        let robot = e.robot.map(|x| x as usize);
        let in_warmup = e.step <= warmup_steps;
        match (&e.kind, robot) {
            (EventKind::Locked { .. }, Some(i)) => {
                if e.step != 0 || replay.commitments[i].is_committed() {
                    r.commitment_violations += 1;
                }
            }
            (EventKind::Discover { .. }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                if replay.commitments[i].is_committed() {
                    r.commitment_violations += 1;
                }
            }
            (EventKind::Recruit { resource, sender }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                let sender_state = step_start.get(*sender as usize).copied();
                if replay.commitments[i].is_committed()
                    || sender_state != Some(CommitmentState::Committed(*resource))
                {
                    r.commitment_violations += 1;
                }
            }
            (EventKind::CrossInhibit { from, sender }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                r.cross_inhibitions += 1;
                let sender_state = step_start.get(*sender as usize).copied();
                if replay.commitments[i] != CommitmentState::Committed(*from)
                    || sender_state != Some(CommitmentState::Committed(from.other()))
                {
                    r.commitment_violations += 1;
                }
            }
            (EventKind::Abandon { from }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                r.abandonments += 1;
                if replay.commitments[i] != CommitmentState::Committed(*from) {
                    r.commitment_violations += 1;
                }
            }
            (EventKind::WordCreated { word, .. }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                if !created.insert(*word) {
                    r.disjointness_violations += 1;
                }
                if !replay.inventories[i].is_empty() {
                    r.game_violations += 1;
                }
                let died = change_holders(&mut holders, &replay.inventories[i], &[*word]);
                pending_extinct.extend(died);
            }
            (EventKind::Utter { word, .. }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                if !replay.inventories[i].contains(word) {
                    r.game_violations += 1;
                }
            }
            (EventKind::Game { word, outcome, before, after, .. }, Some(i)) => {
                r.warmup_violations += u64::from(in_warmup);
                r.games += 1;
                if !created.contains(word) || after.iter().any(|w| replay.provenance_of(*w).is_none()) {
                    r.disjointness_violations += 1;
                }
                let lawful = match outcome {
                    Outcome::Success => {
                        r.successes += 1;
                        before.contains(word) && after.as_slice() == [*word]
                    }
                    Outcome::Failure => {
                        !before.contains(word)
                            && after.len() == before.len() + 1
                            && after[..before.len()] == before[..]
                            && after.last() == Some(word)
                    }
                };
                if !lawful || *before != replay.inventories[i] {
                    r.game_violations += 1;
                }
                let died = change_holders(&mut holders, before, after);
                pending_extinct.extend(died);
            }
            (EventKind::Extinct { word }, None) => {
                match pending_extinct.iter().position(|w| w == word) {
                    Some(p) => {
                        pending_extinct.remove(p);
                    }
                    None => r.extinction_violations += 1,
                }
            }
            (EventKind::Converged { word }, None) => {
                if replay.inventories.iter().any(|inv| inv.as_slice() != [*word]) {
                    r.convergence_violations += 1;
                }
            }
            (EventKind::Timeout, None) => {}
            _ => r.commitment_violations += 1,
        }
        replay.apply(e);
    }
    r.extinction_violations += pending_extinct.len() as u64;
    r
}
