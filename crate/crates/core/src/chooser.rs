//! Source of every random decision in a run.
//!
//! The engine never touches a generator directly. Each draw names the
//! decision it serves through a [`Site`], so a scripted implementation can
//! replay a hand-written schedule while [`RngChooser`] simply ignores the
//! label and pulls from one seeded stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// The decision a random draw belongs to. Robot indices are included so
/// scripted schedules can target individual robots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Site {
    /// Initial placement inside the nest (two uniforms per robot).
    Placement(usize),
    /// Heading increment of the correlated random walk.
    Turn(usize),
    /// Exploring robot heading back to the nest.
    Return(usize),
    /// Which of the fresh beacons a hearer processes.
    Beacon(usize),
    Recruit(usize),
    CrossInhibit(usize),
    Abandon(usize),
    Speak(usize),
    /// Which inventory word a speaker utters.
    Word(usize),
    /// Which received utterance a hearer plays.
    Utterance(usize),
    /// Partner of a speaker in the well-mixed mode.
    Partner(usize),
    /// Fair coin for equidistant word provenance.
    ProvenanceTie(usize),
    /// Locked-population initial heading.
    Heading(usize),
    /// Turnaround point inside the next area a robot navigates to.
    Waypoint(usize),
}

pub trait Chooser {
    /// Called once at the start of every control step.
    fn begin_step(&mut self, _step: u64) {}

    /// Bernoulli trial with success probability `p`.
    fn chance(&mut self, site: Site, p: f64) -> bool;

    /// Uniform index in `0..n`; `n` is never zero.
    fn index(&mut self, site: Site, n: usize) -> usize;

    /// Uniform draw from [0, 1).
    fn unit(&mut self, site: Site) -> f64;

    /// Zero-mean Gaussian with standard deviation `sigma`.
    fn gaussian(&mut self, site: Site, sigma: f64) -> f64;
}

/// Seeded ChaCha8 stream; every call consumes the generator in call order.
#[derive(Clone, Debug)]
pub struct RngChooser {
    rng: ChaCha8Rng,
}

impl RngChooser {
    pub fn new(seed: u64) -> Self {
        RngChooser {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Chooser for RngChooser {
    fn chance(&mut self, _site: Site, p: f64) -> bool {
        // always consume one draw so the stream layout does not depend on p
        self.rng.random::<f64>() < p
    }

    fn index(&mut self, _site: Site, n: usize) -> usize {
        debug_assert!(n > 0);
        self.rng.random_range(0..n)
    }

    fn unit(&mut self, _site: Site) -> f64 {
        self.rng.random::<f64>()
    }

    fn gaussian(&mut self, _site: Site, sigma: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        z * sigma
    }
}
