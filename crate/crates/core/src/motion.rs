//! Per-step kinematics: correlated random walk while exploring, straight
//! navigation between nest and resource when going somewhere, and a
//! short-range repulsion that bends headings away from close neighbours.
//!
//! Robots are point agents moving at constant speed on the plane. Odometry
//! is perfect, so a robot heading for an area always aims at its center.

use std::f64::consts::PI;

use crate::arena::{AreaKind, Arena, Resource};
use crate::chooser::{Chooser, Site};
use crate::geometry::{wrap_angle, Vec2};

/// Weight of the summed repulsion relative to the unit travel direction.
pub const AVOID_GAIN: f64 = 3.0;

/// Clockwise rotation applied to every repulsion vector so that two robots
/// meeting head-on both veer to their own right and pass each other.
pub const PASS_BIAS: f64 = PI / 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    /// Radians in [0, 2π).
    pub heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Pose {
            position,
            heading: wrap_angle(heading),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MotionMode {
    /// Warm-up walk: no sensing, no communication.
    BlindWalk,
    Explore,
    GoToNest,
    GoToResource(Resource),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrival {
    ReachedNest,
    ReachedResource(Resource),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionParams {
    /// Control step in seconds.
    pub dt: f64,
    /// Meters per second.
    pub speed: f64,
    /// Standard deviation of the per-step heading increment (radians).
    pub turn_sigma: f64,
    pub avoidance_radius: f64,
    /// Distance to an area's center at which a navigating robot has arrived.
    pub arrival_radius: f64,
}

impl MotionParams {
    pub fn step_length(&self) -> f64 {
        self.speed * self.dt
    }
}

impl Default for MotionParams {
    fn default() -> Self {
        MotionParams {
            dt: 0.1,
            speed: 0.1,
            turn_sigma: 0.3,
            avoidance_radius: 0.1,
            arrival_radius: 0.05,
        }
    }
}

/// Pose, mode and the last ground colour sensed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Navigator {
    pub pose: Pose,
    pub mode: MotionMode,
    pub last_area: AreaKind,
    /// Offset of the turnaround point from the center of the area being
    /// navigated to.
    pub goal_offset: Vec2,
}

impl Navigator {
    pub fn new(pose: Pose, mode: MotionMode) -> Self {
        Navigator {
            pose,
            mode,
            last_area: AreaKind::Open,
            goal_offset: Vec2::ZERO,
        }
    }

    pub fn target(&self, arena: &Arena) -> Option<Vec2> {
        match self.mode {
            MotionMode::GoToNest => Some(arena.nest_center() + self.goal_offset),
            MotionMode::GoToResource(r) => Some(arena.resource_center(r) + self.goal_offset),
            MotionMode::Explore | MotionMode::BlindWalk => None,
        }
    }
}

/// Repulsion from every neighbour strictly closer than the avoidance radius,
/// weighted linearly from 1 at contact to 0 at the radius.
fn repulsion(position: Vec2, neighbors: &[Vec2], radius: f64) -> Vec2 {
    let mut total = Vec2::ZERO;
    for &other in neighbors {
        let away = position - other;
        let d = away.norm();
        if d > 0.0 && d < radius {
            let w = 1.0 - d / radius;
            total += (away * (1.0 / d)).rotated(-PASS_BIAS) * w;
        }
    }
    total
}

/// Advances one robot by one control step. `neighbors` holds the positions
/// of other robots at the start of the step; those beyond the avoidance
/// radius are ignored.
pub fn step_motion<C: Chooser>(
    nav: &Navigator,
    arena: &Arena,
    neighbors: &[Vec2],
    params: &MotionParams,
    robot: usize,
    chooser: &mut C,
) -> Pose {
    let position = nav.pose.position;
    let mut heading = match nav.target(arena) {
        Some(target) => match (target - position).normalized() {
            Some(dir) => dir.angle(),
            None => nav.pose.heading,
        },
        None => nav.pose.heading + chooser.gaussian(Site::Turn(robot), params.turn_sigma),
    };

    let push = repulsion(position, neighbors, params.avoidance_radius);
    if push != Vec2::ZERO {
        let desired = Vec2::from_angle(heading) + push * AVOID_GAIN;
        if let Some(dir) = desired.normalized() {
            heading = dir.angle();
        }
    }

    let heading = wrap_angle(heading);
    Pose {
        position: position + Vec2::from_angle(heading) * params.step_length(),
        heading,
    }
}

/// Checks the ground under a robot after it moved and flips navigation
/// modes on arrival. `commitment` is the resource the robot is committed
/// to, if any.
///
/// Exploring robots report a resource the moment they step onto it.
/// Navigating robots report arrival once within `arrival_radius` of the
/// target's center; committed robots then turn around, uncommitted robots
/// back at the nest resume exploring.
pub fn arrival_check(
    nav: &mut Navigator,
    arena: &Arena,
    params: &MotionParams,
    commitment: Option<Resource>,
) -> Option<Arrival> {
    let kind = arena.classify(nav.pose.position);
    let entered = kind != nav.last_area;
    nav.last_area = kind;

    let offset = nav.goal_offset;
    let reached = |center: Vec2| nav.pose.position.dist(center + offset) <= params.arrival_radius;
    match nav.mode {
        MotionMode::BlindWalk => None,
        MotionMode::Explore => match kind {
            AreaKind::Resource(r) if entered => Some(Arrival::ReachedResource(r)),
            _ => None,
        },
        MotionMode::GoToNest => {
            if !reached(arena.nest_center()) {
                return None;
            }
            nav.mode = match commitment {
                Some(r) => MotionMode::GoToResource(r),
                None => MotionMode::Explore,
            };
            Some(Arrival::ReachedNest)
        }
        MotionMode::GoToResource(r) => {
            if !reached(arena.resource_center(r)) {
                return None;
            }
            if commitment == Some(r) {
                nav.mode = MotionMode::GoToNest;
            }
            Some(Arrival::ReachedResource(r))
        }
    }
}

/// With probability `p_return` an exploring robot starts heading home.
pub fn maybe_return_to_nest<C: Chooser>(
    nav: &mut Navigator,
    p_return: f64,
    robot: usize,
    chooser: &mut C,
) -> bool {
    if nav.mode != MotionMode::Explore {
        return false;
    }
    if chooser.chance(Site::Return(robot), p_return) {
        nav.mode = MotionMode::GoToNest;
        true
    } else {
        false
    }
}
