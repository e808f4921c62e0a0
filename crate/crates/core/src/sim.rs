//! The simulation loop.
//!
//! Every control step runs the same phases in order:
//!
//! 1. motion of all robots against the positions at the start of the step;
//! 2. arrivals: discovery, spatial word creation, returns to the nest;
//! 3. beacons in the nest: recruitment and cross-inhibition, then abandonment;
//! 4. speak decisions;
//! 5. utterance delivery and hearer updates;
//! 6. snapshots, neighbourhood samples and the convergence check.
//!
//! Within a phase robots are handled in index order, and all randomness is
//! drawn from a single [`Chooser`], so a run is a pure function of its
//! configuration and seed.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use crate::arena::{Arena, Resource};
use crate::chooser::{Chooser, RngChooser, Site};
use crate::commitment::{on_abandon, on_beacon, on_discovery, Beacon, CommitmentParams, CommitmentState};
use crate::config::{BeaconPolicy, Mode, RunConfig};
use crate::error::Result;
use crate::events::{EventKind, EventLog};
use crate::geometry::Vec2;
use crate::metrics::{NeighborhoodCounts, PopulationSnapshot};
use crate::motion::{arrival_check, maybe_return_to_nest, step_motion, Arrival, MotionMode, MotionParams, Navigator, Pose};
use crate::naming::{NamingGame, Utterance, WordId, WordOrigin};

#[derive(Clone, Debug)]
pub struct Robot {
    pub nav: Navigator,
    pub commitment: CommitmentState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Converged { step: u64, word: WordId },
    Timeout { step: u64 },
}

impl RunOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, RunOutcome::Converged { .. })
    }

    pub fn step(&self) -> u64 {
        match *self {
            RunOutcome::Converged { step, .. } | RunOutcome::Timeout { step } => step,
        }
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: RunConfig,
    pub events: EventLog,
    pub snapshots: Vec<PopulationSnapshot>,
    pub neighborhood: NeighborhoodCounts,
    /// Population at the last simulated step.
    pub final_population: PopulationSnapshot,
    pub outcome: RunOutcome,
    /// Last simulated step; equals the horizon unless the run stopped at
    /// convergence.
    pub last_step: u64,
    pub wall_clock: Duration,
}

pub struct Simulation<C: Chooser> {
    cfg: RunConfig,
    arena: Arena,
    motion: MotionParams,
    commit: CommitmentParams,
    chooser: C,
    robots: Vec<Robot>,
    game: NamingGame,
    step: u64,
    warmup_steps: u64,
    horizon_steps: u64,
    snapshot_every: u64,
    sample_every: u64,
    sample_from: u64,
    log: EventLog,
    /// Robots within radio range, from the latest positions.
    neighbors: Vec<Vec<u16>>,
    /// Robots in range while the hearer was in the nest, previous step.
    nest_contacts: Vec<Vec<u16>>,
    /// Set once a robot may not act on further beacons during this visit.
    arrived: Vec<bool>,
    snapshots: Vec<PopulationSnapshot>,
    neighborhood: NeighborhoodCounts,
    converged_at: Option<(u64, WordId)>,
    finished: Option<RunOutcome>,
    // scratch buffers reused across steps
    positions: Vec<Vec2>,
    received: Vec<Vec<Utterance>>,
    spoke: Vec<bool>,
}

fn uniform_in_disk<C: Chooser>(chooser: &mut C, robot: usize, center: Vec2, radius: f64) -> Vec2 {
    uniform_in_disk_at(chooser, Site::Placement(robot), center, radius)
}

fn uniform_in_disk_at<C: Chooser>(chooser: &mut C, site: Site, center: Vec2, radius: f64) -> Vec2 {
    let r = radius * chooser.unit(site).sqrt();
    let theta = TAU * chooser.unit(site);
    center + Vec2::from_angle(theta) * r
}

impl Simulation<RngChooser> {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        let chooser = RngChooser::new(cfg.seed);
        Self::with_chooser(cfg, chooser)
    }
}

impl<C: Chooser> Simulation<C> {
    /// Builds a run drawing every random decision from `chooser`.
    pub fn with_chooser(cfg: RunConfig, mut chooser: C) -> Result<Self> {
        cfg.validate()?;
        let arena = cfg.arena();
        let n = cfg.n_robots;
        let warmup_steps = cfg.warmup_steps();
        let mut log = EventLog::new();

        let mut robots = Vec::with_capacity(n);
        for i in 0..n {
            let (commitment, home) = match cfg.mode {
                Mode::LockedPopulations => {
                    let r = if i < cfg.locked_a { Resource::A } else { Resource::B };
                    (CommitmentState::Committed(r), arena.resource_center(r))
                }
                _ => (CommitmentState::Uncommitted, arena.nest_center()),
            };
            let position = uniform_in_disk(&mut chooser, i, home, arena.area_radius());
            let heading = TAU * chooser.unit(Site::Heading(i));
            if let CommitmentState::Committed(resource) = commitment {
                log.push(0, cfg.dt, Some(i), EventKind::Locked { resource });
            }
            robots.push(Robot {
                nav: Navigator::new(Pose::new(position, heading), MotionMode::BlindWalk),
                commitment,
            });
        }

        let mut sim = Simulation {
            arena,
            motion: cfg.motion_params(),
            commit: cfg.commitment_params(),
            chooser,
            robots,
            game: NamingGame::new(cfg.variant, n),
            step: 0,
            warmup_steps,
            horizon_steps: cfg.horizon_steps(),
            snapshot_every: cfg.period_steps(cfg.snapshot_period_s),
            sample_every: cfg.period_steps(cfg.neighborhood_period_s),
            sample_from: (cfg.neighborhood_start_s / cfg.dt).round() as u64,
            log,
            neighbors: vec![Vec::new(); n],
            nest_contacts: vec![Vec::new(); n],
            arrived: vec![false; n],
            snapshots: Vec::new(),
            neighborhood: NeighborhoodCounts::new(),
            converged_at: None,
            finished: None,
            positions: Vec::with_capacity(n),
            received: vec![Vec::new(); n],
            spoke: vec![false; n],
            cfg,
        };
        if sim.cfg.mode.moves() {
            sim.refresh_neighbors();
        }
        sim.snapshots.push(sim.population());
        Ok(sim)
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn game(&self) -> &NamingGame {
        &self.game
    }

    pub fn events(&self) -> &EventLog {
        &self.log
    }

    pub fn neighbors(&self) -> &[Vec<u16>] {
        &self.neighbors
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    fn warmed_up(&self) -> bool {
        self.step > self.warmup_steps
    }

    pub fn population(&self) -> PopulationSnapshot {
        let commitments: Vec<_> = self.robots.iter().map(|r| r.commitment).collect();
        PopulationSnapshot::compute(self.step, &commitments, self.game.inventories(), |w| {
            self.game.word(w).provenance
        })
    }

    fn emit(&mut self, robot: Option<usize>, kind: EventKind) {
        self.log.push(self.step, self.cfg.dt, robot, kind);
    }

    fn refresh_neighbors(&mut self) {
        let r2 = self.cfg.comm_radius * self.cfg.comm_radius;
        for list in &mut self.neighbors {
            list.clear();
        }
        let n = self.robots.len();
        for i in 0..n {
            let pi = self.robots[i].nav.pose.position;
            for j in (i + 1)..n {
                if pi.dist_sq(self.robots[j].nav.pose.position) <= r2 {
                    self.neighbors[i].push(j as u16);
                    self.neighbors[j].push(i as u16);
                }
            }
        }
    }

    /// Switches every robot out of the blind walk.
    fn end_warmup(&mut self) {
        for i in 0..self.robots.len() {
            let r = &mut self.robots[i];
            r.nav.mode = match r.commitment {
                CommitmentState::Committed(res) => MotionMode::GoToResource(res),
                CommitmentState::Uncommitted => MotionMode::Explore,
            };
            r.nav.last_area = crate::arena::AreaKind::Open;
            self.new_goal(i);
        }
    }

    fn phase_motion(&mut self) {
        self.positions.clear();
        self.positions.extend(self.robots.iter().map(|r| r.nav.pose.position));
        let mut near = Vec::new();
        let avoid2 = self.motion.avoidance_radius * self.motion.avoidance_radius;
        for i in 0..self.robots.len() {
            near.clear();
            let pi = self.positions[i];
            near.extend(
                self.neighbors[i]
                    .iter()
                    .map(|&j| self.positions[j as usize])
                    .filter(|p| p.dist_sq(pi) < avoid2),
            );
            let pose = step_motion(&self.robots[i].nav, &self.arena, &near, &self.motion, i, &mut self.chooser);
            self.robots[i].nav.pose = pose;
        }
        self.refresh_neighbors();
    }

    fn new_goal(&mut self, i: usize) {
        let nav = &mut self.robots[i].nav;
        if matches!(nav.mode, MotionMode::GoToNest | MotionMode::GoToResource(_)) && self.cfg.dropoff_radius > 0.0 {
            nav.goal_offset = uniform_in_disk_at(&mut self.chooser, Site::Waypoint(i), Vec2::ZERO, self.cfg.dropoff_radius);
        }
    }

    fn phase_arrivals(&mut self) {
        let dynamics = self.cfg.mode.commitment_dynamics();
        let plays = self.cfg.mode.plays_game();
        for i in 0..self.robots.len() {
            let commitment = self.robots[i].commitment;
            let exploring = self.robots[i].nav.mode == MotionMode::Explore;
            let arrival = arrival_check(&mut self.robots[i].nav, &self.arena, &self.motion, commitment.resource());
            self.arrived[i] = arrival == Some(Arrival::ReachedNest);
            if arrival.is_some() {
                self.new_goal(i);
            }
            if let Some(Arrival::ReachedResource(r)) = arrival {
                let discovery = exploring && dynamics && !commitment.is_committed();
                let lands = discovery || commitment == CommitmentState::Committed(r);
                if plays && lands {
                    let committed = commitment.is_committed();
                    if let Some(word) = self.game.on_enter_resource(i, r, committed, self.step) {
                        self.emit(
                            Some(i),
                            EventKind::WordCreated {
                                word,
                                provenance: r,
                                trigger: WordOrigin::SelfEnterResource,
                                committed,
                            },
                        );
                    }
                }
                if discovery {
                    self.robots[i].commitment = on_discovery(commitment, r);
                    self.robots[i].nav.mode = MotionMode::GoToNest;
                    self.new_goal(i);
                    self.emit(Some(i), EventKind::Discover { resource: r });
                }
            }
            if dynamics && self.robots[i].commitment == CommitmentState::Uncommitted {
                if maybe_return_to_nest(&mut self.robots[i].nav, self.cfg.p_return, i, &mut self.chooser) {
                    self.new_goal(i);
                }
            }
        }
    }

    fn phase_commitment(&mut self) {
        let states: Vec<CommitmentState> = self.robots.iter().map(|r| r.commitment).collect();
        let mut fresh = Vec::new();
        for i in 0..self.robots.len() {
            let in_nest = self.arena.in_nest(self.robots[i].nav.pose.position);
            let contacts = if in_nest { self.neighbors[i].clone() } else { Vec::new() };
            fresh.clear();
            match self.cfg.beacon_policy {
                BeaconPolicy::OnArrival => {
                    if self.arrived[i] {
                        fresh.extend(contacts.iter().copied())
                    }
                }
                BeaconPolicy::FreshContacts => fresh.extend(
                    contacts
                        .iter()
                        .copied()
                        .filter(|j| self.nest_contacts[i].binary_search(j).is_err()),
                ),
                BeaconPolicy::EveryStep => fresh.extend(contacts.iter().copied()),
            }
            self.nest_contacts[i] = contacts;
            if fresh.is_empty() {
                continue;
            }
            let pick = if fresh.len() == 1 {
                0
            } else {
                self.chooser.index(Site::Beacon(i), fresh.len())
            };
            let sender = fresh[pick] as usize;
            let beacon = Beacon {
                sender,
                commitment: states[sender],
            };
            let before = self.robots[i].commitment;
            let after = on_beacon(before, &beacon, &self.commit, i, &mut self.chooser);
            if after == before {
                continue;
            }
            self.robots[i].commitment = after;
            match (before, after) {
                (CommitmentState::Uncommitted, CommitmentState::Committed(r)) => {
                    self.robots[i].nav.mode = MotionMode::GoToResource(r);
                    self.new_goal(i);
                    self.emit(Some(i), EventKind::Recruit { resource: r, sender: sender as u32 });
                }
                (CommitmentState::Committed(from), CommitmentState::Uncommitted) => {
                    self.robots[i].nav.mode = MotionMode::Explore;
                    self.emit(Some(i), EventKind::CrossInhibit { from, sender: sender as u32 });
                }
                _ => unreachable!("beacons only recruit or inhibit"),
            }
        }
        if self.commit.p_abandon > 0.0 {
            for i in 0..self.robots.len() {
                let before = self.robots[i].commitment;
                let CommitmentState::Committed(from) = before else { continue };
                let after = on_abandon(before, &self.commit, i, &mut self.chooser);
                if after != before {
                    self.robots[i].commitment = after;
                    self.robots[i].nav.mode = MotionMode::Explore;
                    self.emit(Some(i), EventKind::Abandon { from });
                }
            }
        }
    }

    fn phase_game(&mut self) {
        let n = self.robots.len();
        for r in &mut self.received {
            r.clear();
        }
        self.spoke.iter_mut().for_each(|s| *s = false);

        let mut speeches = Vec::new();
        for i in 0..n {
            let position = self.robots[i].nav.pose.position;
            let committed = self.robots[i].commitment.is_committed();
            let speech = self.game.maybe_speak(
                i,
                self.cfg.p_speak,
                position,
                committed,
                self.step,
                &self.arena,
                &mut self.chooser,
            );
            if let Some(s) = speech {
                if s.created {
                    let provenance = self.game.word(s.word).provenance;
                    self.emit(
                        Some(i),
                        EventKind::WordCreated {
                            word: s.word,
                            provenance,
                            trigger: WordOrigin::SelfSpeak,
                            committed,
                        },
                    );
                }
                self.spoke[i] = true;
                speeches.push((i, s.word));
            }
        }

        for (speaker, word) in speeches {
            let hearers: Vec<u32> = if self.cfg.mode == Mode::MeanFieldMng {
                let k = self.chooser.index(Site::Partner(speaker), n - 1);
                vec![if k >= speaker { k + 1 } else { k } as u32]
            } else {
                self.neighbors[speaker].iter().map(|&j| u32::from(j)).collect()
            };
            for &h in &hearers {
                self.received[h as usize].push(Utterance { speaker, word });
            }
            self.emit(Some(speaker), EventKind::Utter { word, hearers });
        }

        for i in 0..n {
            if self.spoke[i] || self.received[i].is_empty() {
                continue;
            }
            let received = std::mem::take(&mut self.received[i]);
            let rec = self.game.on_hear(i, &received, &mut self.chooser);
            self.received[i] = received;
            self.emit(
                Some(i),
                EventKind::Game {
                    word: rec.word,
                    speaker: rec.speaker as u32,
                    outcome: rec.outcome,
                    before: rec.before,
                    after: rec.after,
                },
            );
            for word in rec.extinct {
                self.emit(None, EventKind::Extinct { word });
            }
        }
    }

    /// Advances one control step. Does nothing once the run has finished.
    pub fn step(&mut self) {
        if self.finished.is_some() {
            return;
        }
        self.step += 1;
        self.chooser.begin_step(self.step);
        if self.step == self.warmup_steps + 1 {
            self.end_warmup();
        }
        let active = self.warmed_up();
        let mode = self.cfg.mode;

        if mode.moves() {
            self.phase_motion();
        }
        if active && mode.moves() {
            self.phase_arrivals();
        }
        if active && mode.commitment_dynamics() {
            self.phase_commitment();
        }
        if active && mode.plays_game() {
            self.phase_game();
        }

        if self.step % self.snapshot_every == 0 {
            self.snapshots.push(self.population());
        }
        if mode.moves() && self.step >= self.sample_from && self.step % self.sample_every == 0 {
            let labels: Vec<_> = self.robots.iter().map(|r| r.commitment).collect();
            self.neighborhood.sample(&self.neighbors, &labels);
        }

        if active && mode.plays_game() && self.converged_at.is_none() {
            if let Some(word) = self.game.converged_word() {
                self.converged_at = Some((self.step, word));
                self.emit(None, EventKind::Converged { word });
                if self.cfg.stop_on_convergence {
                    self.finished = Some(RunOutcome::Converged { step: self.step, word });
                    return;
                }
            }
        }
        if self.step >= self.horizon_steps {
            self.finished = Some(match self.converged_at {
                Some((step, word)) => RunOutcome::Converged { step, word },
                None => {
                    self.emit(None, EventKind::Timeout);
                    RunOutcome::Timeout { step: self.step }
                }
            });
        }
    }

    /// Steps until convergence (when configured to stop there) or horizon.
    pub fn run(mut self) -> RunRecord {
        let started = Instant::now();
        while self.finished.is_none() {
            self.step();
        }
        let final_population = self.population();
        RunRecord {
            outcome: self.finished.expect("loop ends when finished"),
            last_step: self.step,
            final_population,
            events: self.log,
            snapshots: self.snapshots,
            neighborhood: self.neighborhood,
            config: self.cfg,
            wall_clock: started.elapsed(),
        }
    }
}

/// Runs one configuration with its own seed.
pub fn simulate(cfg: &RunConfig) -> Result<RunRecord> {
    Ok(Simulation::new(cfg.clone())?.run())
}
