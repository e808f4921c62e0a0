//! Commitment to a resource: discovery, recruitment, cross-inhibition and
//! abandonment.

use serde::{Deserialize, Serialize};

use crate::arena::Resource;
use crate::chooser::{Chooser, Site};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommitmentState {
    Uncommitted,
    Committed(Resource),
}

impl CommitmentState {
    pub fn resource(self) -> Option<Resource> {
        match self {
            CommitmentState::Uncommitted => None,
            CommitmentState::Committed(r) => Some(r),
        }
    }

    pub fn is_committed(self) -> bool {
        matches!(self, CommitmentState::Committed(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommitmentParams {
    /// Per processed beacon.
    pub p_recruit: f64,
    /// Per processed beacon.
    pub p_cross_inhibit: f64,
    /// Per control step.
    pub p_abandon: f64,
}

impl Default for CommitmentParams {
    fn default() -> Self {
        CommitmentParams {
            p_recruit: 0.7,
            p_cross_inhibit: 0.7,
            p_abandon: 0.0,
        }
    }
}

/// Commitment broadcast heard from a neighbour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Beacon {
    pub sender: usize,
    pub commitment: CommitmentState,
}

/// An uncommitted robot stepping onto a resource commits to it.
pub fn on_discovery(state: CommitmentState, resource: Resource) -> CommitmentState {
    match state {
        CommitmentState::Uncommitted => CommitmentState::Committed(resource),
        committed => committed,
    }
}

/// Applies one processed beacon to a hearer standing in the nest:
/// recruitment of an uncommitted hearer or cross-inhibition of a hearer
/// committed elsewhere.
pub fn on_beacon<C: Chooser>(
    state: CommitmentState,
    beacon: &Beacon,
    params: &CommitmentParams,
    robot: usize,
    chooser: &mut C,
) -> CommitmentState {
    let CommitmentState::Committed(theirs) = beacon.commitment else {
        return state;
    };
    match state {
        CommitmentState::Uncommitted => {
            if chooser.chance(Site::Recruit(robot), params.p_recruit) {
                CommitmentState::Committed(theirs)
            } else {
                state
            }
        }
        CommitmentState::Committed(mine) if mine != theirs => {
            if chooser.chance(Site::CrossInhibit(robot), params.p_cross_inhibit) {
                CommitmentState::Uncommitted
            } else {
                state
            }
        }
        CommitmentState::Committed(_) => state,
    }
}

/// Spontaneous loss of commitment, drawn once per control step.
pub fn on_abandon<C: Chooser>(
    state: CommitmentState,
    params: &CommitmentParams,
    robot: usize,
    chooser: &mut C,
) -> CommitmentState {
    if state.is_committed() && chooser.chance(Site::Abandon(robot), params.p_abandon) {
        CommitmentState::Uncommitted
    } else {
        state
    }
}

/// The resource with more committed robots, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Selection {
    Selected(Resource),
    Tie,
}

pub fn selected_resource(count_a: usize, count_b: usize) -> Selection {
    use std::cmp::Ordering::*;
    match count_a.cmp(&count_b) {
        Greater => Selection::Selected(Resource::A),
        Less => Selection::Selected(Resource::B),
        Equal => Selection::Tie,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chooser::RngChooser;
    use CommitmentState::*;

    fn beacon(c: CommitmentState) -> Beacon {
        Beacon {
            sender: 9,
            commitment: c,
        }
    }

    #[test]
    fn discovery() {
        assert_eq!(on_discovery(Uncommitted, Resource::A), Committed(Resource::A));
        assert_eq!(on_discovery(Committed(Resource::B), Resource::A), Committed(Resource::B));
    }

    #[test]
    fn certain_recruitment() {
        let p = CommitmentParams {
            p_recruit: 1.0,
            ..Default::default()
        };
        let mut c = RngChooser::new(0);
        let s = on_beacon(Uncommitted, &beacon(Committed(Resource::A)), &p, 0, &mut c);
        assert_eq!(s, Committed(Resource::A));
    }

    #[test]
    fn no_cross_inhibition_at_zero() {
        let p = CommitmentParams {
            p_cross_inhibit: 0.0,
            ..Default::default()
        };
        let mut c = RngChooser::new(0);
        for _ in 0..1000 {
            let s = on_beacon(Committed(Resource::A), &beacon(Committed(Resource::B)), &p, 0, &mut c);
            assert_eq!(s, Committed(Resource::A));
        }
    }

    #[test]
    fn same_resource_and_uncommitted_beacons_are_inert() {
        let p = CommitmentParams {
            p_recruit: 1.0,
            p_cross_inhibit: 1.0,
            p_abandon: 0.0,
        };
        let mut c = RngChooser::new(0);
        let a = Committed(Resource::A);
        assert_eq!(on_beacon(a, &beacon(a), &p, 0, &mut c), a);
        assert_eq!(on_beacon(a, &beacon(Uncommitted), &p, 0, &mut c), a);
        assert_eq!(on_beacon(Uncommitted, &beacon(Uncommitted), &p, 0, &mut c), Uncommitted);
    }

    #[test]
    fn cross_inhibition_rate() {
        let p = CommitmentParams {
            p_cross_inhibit: 0.7,
            ..Default::default()
        };
        let mut c = RngChooser::new(42);
        let trials = 100_000;
        let flips = (0..trials)
            .filter(|_| on_beacon(Committed(Resource::A), &beacon(Committed(Resource::B)), &p, 0, &mut c) == Uncommitted)
            .count();
        let f = flips as f64 / trials as f64;
        assert!((f - 0.7).abs() <= 0.01, "{f}");
    }

    #[test]
    fn abandonment() {
        let mut c = RngChooser::new(1);
        let never = CommitmentParams::default();
        for _ in 0..10_000 {
            assert_eq!(on_abandon(Committed(Resource::B), &never, 0, &mut c), Committed(Resource::B));
        }
        let always = CommitmentParams {
            p_abandon: 1.0,
            ..Default::default()
        };
        assert_eq!(on_abandon(Committed(Resource::B), &always, 0, &mut c), Uncommitted);

        let some = CommitmentParams {
            p_abandon: 0.01,
            ..Default::default()
        };
        let trials = 10_000;
        let n = (0..trials)
            .filter(|_| on_abandon(Committed(Resource::A), &some, 0, &mut c) == Uncommitted)
            .count();
        let rate = n as f64 / trials as f64;
        assert!((rate - 0.01).abs() <= 0.003, "{rate}");
    }

    #[test]
    fn selection() {
        assert_eq!(selected_resource(30, 10), Selection::Selected(Resource::A));
        assert_eq!(selected_resource(3, 10), Selection::Selected(Resource::B));
        assert_eq!(selected_resource(0, 0), Selection::Tie);
        assert_eq!(selected_resource(25, 25), Selection::Tie);
    }
}
