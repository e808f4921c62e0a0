//! Hand-traced three-robot schedules replayed through the engine.

mod common;

fn check(s: common::Scenario) {
    assert_eq!(s.actual, s.expected);
    assert_eq!(s.outcome, s.expected_outcome);
}

#[test]
fn well_mixed_pairwise_schedule() {
    check(common::well_mixed_pairwise());
}

#[test]
fn broadcast_in_the_nest_schedule() {
    check(common::broadcast_in_the_nest());
}

#[test]
fn silent_schedule_times_out() {
    check(common::silent());
}
