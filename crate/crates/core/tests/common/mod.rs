//! Three-robot runs driven by a hand-written schedule. Every expected event
//! below was traced by hand from the schedule, not produced by the engine.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use swarm_naming::naming::{Outcome, WordOrigin};
use swarm_naming::{Chooser, EventKind, GameVariant, Mode, Resource, RunConfig, RunOutcome, Simulation, Site, WordId};

/// Replays a fixed schedule. Unscheduled Bernoulli trials fail, except
/// provenance ties which favour A; unscheduled indices are 0, unscheduled
/// uniforms are 0.5 and Gaussians are 0.
#[derive(Default)]
struct Script {
    step: u64,
    speakers: HashMap<u64, Vec<usize>>,
    indices: HashMap<(u64, Site), usize>,
    units: HashMap<Site, VecDeque<f64>>,
}

impl Script {
    fn speak(mut self, step: u64, robots: &[usize]) -> Self {
        self.speakers.insert(step, robots.to_vec());
        self
    }

    fn pick(mut self, step: u64, site: Site, k: usize) -> Self {
        self.indices.insert((step, site), k);
        self
    }

    fn place(mut self, robot: usize, radius_unit: f64, angle_unit: f64) -> Self {
        self.units
            .insert(Site::Placement(robot), VecDeque::from([radius_unit, angle_unit]));
        self
    }
}

impl Chooser for Script {
    fn begin_step(&mut self, step: u64) {
        self.step = step;
    }

    fn chance(&mut self, site: Site, _p: f64) -> bool {
        match site {
            Site::Speak(i) => self.speakers.get(&self.step).is_some_and(|s| s.contains(&i)),
            Site::ProvenanceTie(_) => true,
            _ => false,
        }
    }

    fn index(&mut self, site: Site, n: usize) -> usize {
        let k = self.indices.get(&(self.step, site)).copied().unwrap_or(0);
        assert!(k < n, "scripted index {k} out of range {n} at {site:?}");
        k
    }

    fn unit(&mut self, site: Site) -> f64 {
        self.units.get_mut(&site).and_then(|q| q.pop_front()).unwrap_or(0.5)
    }

    fn gaussian(&mut self, _site: Site, _sigma: f64) -> f64 {
        0.0
    }
}

fn w(i: u32) -> WordId {
    WordId(i)
}

fn created(word: u32, provenance: Resource) -> EventKind {
    EventKind::WordCreated {
        word: w(word),
        provenance,
        trigger: WordOrigin::SelfSpeak,
        committed: false,
    }
}

fn utter(word: u32, hearers: &[u32]) -> EventKind {
    EventKind::Utter {
        word: w(word),
        hearers: hearers.to_vec(),
    }
}

fn game(word: u32, speaker: u32, outcome: Outcome, before: &[u32], after: &[u32]) -> EventKind {
    EventKind::Game {
        word: w(word),
        speaker,
        outcome,
        before: before.iter().copied().map(w).collect(),
        after: after.iter().copied().map(w).collect(),
    }
}

fn base_config(mode: Mode) -> RunConfig {
    RunConfig {
        mode,
        variant: GameVariant::Classic,
        n_robots: 3,
        warmup_s: 0.0,
        horizon_s: 1.0,
        ..RunConfig::default()
    }
}

type Row = (u64, Option<u32>, EventKind);

fn run(cfg: RunConfig, script: Script) -> (Vec<Row>, RunOutcome, u64) {
    let rec = Simulation::with_chooser(cfg, script).unwrap().run();
    let events = rec.events.iter().map(|e| (e.step, e.robot, e.kind.clone())).collect();
    (events, rec.outcome, rec.last_step)
}

use Outcome::{Failure, Success};
use Resource::{A, B};


pub struct Scenario {
    pub actual: Vec<Row>,
    pub expected: Vec<Row>,
    pub outcome: RunOutcome,
    pub expected_outcome: RunOutcome,
}

impl Scenario {
    pub fn matches(&self) -> bool {
        self.actual == self.expected && self.outcome == self.expected_outcome
    }
}

pub fn well_mixed_pairwise() -> Scenario {
    // robots 0 and 1 sit at (-0.21, 0), robot 2 at (+0.21, 0)
    let script = Script::default()
        .place(2, 0.5, 0.0)
        .speak(1, &[0])
        .speak(2, &[2])
        .pick(2, Site::Partner(2), 1)
        .speak(3, &[1])
        .pick(3, Site::Word(1), 1)
        .speak(4, &[0, 2])
        .pick(4, Site::Partner(0), 1)
        .speak(5, &[1])
        .pick(5, Site::Partner(1), 1)
        .speak(6, &[0])
        .pick(6, Site::Word(0), 1)
        .speak(7, &[1])
        .speak(8, &[0])
        .pick(8, Site::Partner(0), 1);
    let (events, outcome, steps) = run(base_config(Mode::MeanFieldMng), script);

    let expected = vec![
        (1, Some(0), created(0, A)),
        (1, Some(0), utter(0, &[1])),
        (1, Some(1), game(0, 0, Failure, &[], &[0])),
        (2, Some(2), created(1, B)),
        (2, Some(2), utter(1, &[1])),
        (2, Some(1), game(1, 2, Failure, &[0], &[0, 1])),
        (3, Some(1), utter(1, &[0])),
        (3, Some(0), game(1, 1, Failure, &[0], &[0, 1])),
        // both speakers address each other; speakers do not listen
        (4, Some(0), utter(0, &[2])),
        (4, Some(2), utter(1, &[0])),
        (5, Some(1), utter(0, &[2])),
        (5, Some(2), game(0, 1, Failure, &[1], &[1, 0])),
        (6, Some(0), utter(1, &[1])),
        (6, Some(1), game(1, 0, Success, &[0, 1], &[1])),
        (7, Some(1), utter(1, &[0])),
        (7, Some(0), game(1, 1, Success, &[0, 1], &[1])),
        (8, Some(0), utter(1, &[2])),
        (8, Some(2), game(1, 0, Success, &[1, 0], &[1])),
        (8, None, EventKind::Extinct { word: w(0) }),
        (8, None, EventKind::Converged { word: w(1) }),
    ];
    assert_eq!(steps, 8);
    Scenario {
        actual: events,
        expected,
        outcome,
        expected_outcome: RunOutcome::Converged { step: 8, word: w(1) },
    }
}

pub fn broadcast_in_the_nest() -> Scenario {
    // three slow robots clustered in the nest, all within range of each
    // other: robot 0 at (-0.05, 0), robot 1 at (0.05, 0), robot 2 at
    // (0.015, 0.048)
    let cfg = RunConfig {
        speed: 0.001,
        avoidance_radius: 0.0,
        ..base_config(Mode::Foraging)
    };
    let script = Script::default()
        .place(0, 1.0 / 36.0, 0.5)
        .place(1, 1.0 / 36.0, 0.0)
        .place(2, 1.0 / 36.0, 0.2)
        .speak(1, &[0, 1])
        .pick(1, Site::Utterance(2), 1)
        .speak(2, &[2])
        .speak(3, &[0])
        .speak(4, &[1])
        .speak(5, &[0]);
    let (events, outcome, _) = run(cfg, script);

    let expected = vec![
        (1, Some(0), created(0, A)),
        (1, Some(1), created(1, B)),
        (1, Some(0), utter(0, &[1, 2])),
        (1, Some(1), utter(1, &[0, 2])),
        // robot 2 hears both and plays the second
        (1, Some(2), game(1, 1, Failure, &[], &[1])),
        (2, Some(2), utter(1, &[0, 1])),
        (2, Some(0), game(1, 2, Failure, &[0], &[0, 1])),
        (2, Some(1), game(1, 2, Success, &[1], &[1])),
        (3, Some(0), utter(0, &[1, 2])),
        (3, Some(1), game(0, 0, Failure, &[1], &[1, 0])),
        (3, Some(2), game(0, 0, Failure, &[1], &[1, 0])),
        (4, Some(1), utter(1, &[0, 2])),
        (4, Some(0), game(1, 1, Success, &[0, 1], &[1])),
        (4, Some(2), game(1, 1, Success, &[1, 0], &[1])),
        (5, Some(0), utter(1, &[1, 2])),
        (5, Some(1), game(1, 0, Success, &[1, 0], &[1])),
        (5, None, EventKind::Extinct { word: w(0) }),
        (5, Some(2), game(1, 0, Success, &[1], &[1])),
        (5, None, EventKind::Converged { word: w(1) }),
    ];
    Scenario {
        actual: events,
        expected,
        outcome,
        expected_outcome: RunOutcome::Converged { step: 5, word: w(1) },
    }
}

pub fn silent() -> Scenario {
    let (events, outcome, steps) = run(base_config(Mode::MeanFieldMng), Script::default());
    assert_eq!(steps, 10);
    Scenario {
        actual: events,
        expected: vec![(10, None, EventKind::Timeout)],
        outcome,
        expected_outcome: RunOutcome::Timeout { step: 10 },
    }
}
