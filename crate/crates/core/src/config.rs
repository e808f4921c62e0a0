//! Run configuration: a flat TOML file with one key per parameter. Unknown
//! keys are rejected.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arena::Arena;
use crate::commitment::CommitmentParams;
use crate::error::{ConfigError, Error, Result};
use crate::motion::MotionParams;
use crate::naming::GameVariant;

/// Which parts of the model are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Foraging, commitment dynamics and naming game together.
    #[default]
    Foraging,
    /// No motion, no commitment; each speaker talks to one partner drawn
    /// uniformly from the rest of the population.
    MeanFieldMng,
    /// `locked_a` robots committed to A and the rest to B, shuttling
    /// forever; no discovery, recruitment, cross-inhibition or game.
    LockedPopulations,
    /// Uncommitted robots walking at random; neighbourhood statistics only.
    RandomWalkReference,
    /// Foraging and commitment without the naming game.
    CommitmentOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Foraging => "foraging",
            Mode::MeanFieldMng => "mean_field_mng",
            Mode::LockedPopulations => "locked_populations",
            Mode::RandomWalkReference => "random_walk_reference",
            Mode::CommitmentOnly => "commitment_only",
        })
    }
}

impl Mode {
    pub fn plays_game(self) -> bool {
        matches!(self, Mode::Foraging | Mode::MeanFieldMng)
    }

    pub fn moves(self) -> bool {
        self != Mode::MeanFieldMng
    }

    pub fn commitment_dynamics(self) -> bool {
        matches!(self, Mode::Foraging | Mode::CommitmentOnly)
    }
}

/// Which beacons a hearer in the nest may act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeaconPolicy {
    /// Only beacons from robots that were not already in range of the
    /// hearer, inside the nest, on the previous step: one roll per encounter.
    #[default]
    FreshContacts,
    /// Any beacon received this step: one roll per step of contact.
    EveryStep,
    /// A single roll per nest visit, at the turnaround point, among all
    /// robots in range.
    OnArrival,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Mode,
    pub variant: GameVariant,
    pub seed: u64,
    pub n_robots: usize,

    pub area_radius: f64,
    pub nest_distance: f64,

    pub dt: f64,
    pub speed: f64,
    pub comm_radius: f64,
    pub avoidance_radius: f64,
    /// Distance from a target's center at which a trip ends.
    pub arrival_radius: f64,
    /// Each trip aims at a point drawn uniformly within this distance of the
    /// target's center. Zero aims at the center.
    pub dropoff_radius: f64,
    pub turn_sigma: f64,

    pub warmup_s: f64,
    pub horizon_s: f64,
    pub stop_on_convergence: bool,

    pub p_speak: f64,
    pub p_recruit: f64,
    pub p_cross_inhibit: f64,
    pub p_abandon: f64,
    pub p_return: f64,
    pub beacon_policy: BeaconPolicy,

    /// Robots locked to resource A in `locked_populations` mode.
    pub locked_a: usize,

    pub snapshot_period_s: f64,
    pub neighborhood_period_s: f64,
    pub neighborhood_start_s: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Foraging,
            variant: GameVariant::Classic,
            seed: 0,
            n_robots: 50,
            area_radius: 0.3,
            nest_distance: 2.5,
            dt: 0.1,
            speed: 0.1,
            comm_radius: 0.2,
            avoidance_radius: 0.1,
            arrival_radius: 0.05,
            dropoff_radius: 0.0,
            turn_sigma: 0.3,
            warmup_s: 200.0,
            horizon_s: 12_000.0,
            stop_on_convergence: true,
            p_speak: 0.001,
            p_recruit: 0.7,
            p_cross_inhibit: 0.7,
            p_abandon: 0.0,
            p_return: 5e-4,
            beacon_policy: BeaconPolicy::FreshContacts,
            locked_a: 25,
            snapshot_period_s: 10.0,
            neighborhood_period_s: 1.0,
            neighborhood_start_s: 200.0,
        }
    }
}

fn probability(key: &str, p: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, format!("{p} is not a probability in [0, 1]")))
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, format!("{v} must be positive and finite")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, format!("{v} must be non-negative and finite")))
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::parse(text, Path::new("<inline>"))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e: toml::de::Error| Error::ConfigSyntax {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ConfigSyntax {
                path: "<table>".into(),
                message: e.message().to_string(),
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_table(&self) -> toml::Table {
        match toml::Value::try_from(self).expect("config serializes") {
            toml::Value::Table(t) => t,
            _ => unreachable!("config is a table"),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_robots == 0 {
            return Err(ConfigError::invalid("n_robots", "need at least one robot"));
        }
        if self.n_robots > u16::MAX as usize {
            return Err(ConfigError::invalid("n_robots", "at most 65535 robots"));
        }
        Arena::new(self.area_radius, self.nest_distance)?;
        positive("dt", self.dt)?;
        positive("speed", self.speed)?;
        positive("comm_radius", self.comm_radius)?;
        non_negative("avoidance_radius", self.avoidance_radius)?;
        if self.avoidance_radius > self.comm_radius {
            return Err(ConfigError::invalid(
                "avoidance_radius",
                "must not exceed comm_radius (neighbours are found through the radio range)",
            ));
        }
        positive("arrival_radius", self.arrival_radius)?;
        if self.arrival_radius > self.area_radius {
            return Err(ConfigError::invalid("arrival_radius", "must not exceed area_radius"));
        }
        if self.arrival_radius < self.speed * self.dt {
            return Err(ConfigError::invalid(
                "arrival_radius",
                "must be at least one step length (speed * dt)",
            ));
        }
        non_negative("dropoff_radius", self.dropoff_radius)?;
        if self.dropoff_radius + self.arrival_radius > self.area_radius {
            return Err(ConfigError::invalid(
                "dropoff_radius",
                "dropoff_radius + arrival_radius must not exceed area_radius",
            ));
        }
        non_negative("turn_sigma", self.turn_sigma)?;
        non_negative("warmup_s", self.warmup_s)?;
        positive("horizon_s", self.horizon_s)?;
        if self.horizon_s <= self.warmup_s {
            return Err(ConfigError::invalid("horizon_s", "must exceed warmup_s"));
        }
        probability("p_speak", self.p_speak)?;
        probability("p_recruit", self.p_recruit)?;
        probability("p_cross_inhibit", self.p_cross_inhibit)?;
        probability("p_abandon", self.p_abandon)?;
        probability("p_return", self.p_return)?;
        if self.mode == Mode::LockedPopulations && self.locked_a > self.n_robots {
            return Err(ConfigError::invalid("locked_a", "exceeds n_robots"));
        }
        positive("snapshot_period_s", self.snapshot_period_s)?;
        positive("neighborhood_period_s", self.neighborhood_period_s)?;
        non_negative("neighborhood_start_s", self.neighborhood_start_s)?;
        if self.mode == Mode::MeanFieldMng && self.variant == GameVariant::Spatial {
            return Err(ConfigError::invalid(
                "variant",
                "mean_field_mng has no motion, so spatial word creation never fires; use classic",
            ));
        }
        if self.mode == Mode::MeanFieldMng && self.n_robots < 2 {
            return Err(ConfigError::invalid("n_robots", "mean_field_mng needs a partner"));
        }
        Ok(())
    }

    pub fn arena(&self) -> Arena {
        Arena::new(self.area_radius, self.nest_distance).expect("validated")
    }

    pub fn motion_params(&self) -> MotionParams {
        MotionParams {
            dt: self.dt,
            speed: self.speed,
            turn_sigma: self.turn_sigma,
            avoidance_radius: self.avoidance_radius,
            arrival_radius: self.arrival_radius,
        }
    }

    pub fn commitment_params(&self) -> CommitmentParams {
        CommitmentParams {
            p_recruit: self.p_recruit,
            p_cross_inhibit: self.p_cross_inhibit,
            p_abandon: self.p_abandon,
        }
    }

    fn steps(&self, seconds: f64) -> u64 {
        (seconds / self.dt).round() as u64
    }

    pub fn warmup_steps(&self) -> u64 {
        self.steps(self.warmup_s)
    }

    pub fn horizon_steps(&self) -> u64 {
        self.steps(self.horizon_s)
    }

    /// Period in steps, never below one.
    pub fn period_steps(&self, seconds: f64) -> u64 {
        self.steps(seconds).max(1)
    }

    pub fn seconds(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }
}

/// Parses `key=v1,v2,...` into a key and raw values.
pub fn parse_sweep(spec: &str) -> Result<(String, Vec<String>), ConfigError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError::invalid(spec, "sweep must look like key=v1,v2,..."))?;
    let key = key.trim().to_string();
    let values: Vec<String> = values
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(ConfigError::invalid(key, "sweep lists no values"));
    }
    Ok((key, values))
}

/// Interprets a raw command-line value as a TOML scalar, falling back to a
/// bare string (so `variant=spatial` needs no quotes).
pub fn raw_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
