//! Static world geometry: a circular nest and two circular resource areas
//! on an unbounded obstacle-free plane.

use serde::{Deserialize, Serialize};

use crate::chooser::{Chooser, Site};
use crate::error::ConfigError;
use crate::geometry::Vec2;

/// One of the two identical resources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Resource {
    A,
    B,
}

impl Resource {
    pub fn other(self) -> Resource {
        match self {
            Resource::A => Resource::B,
            Resource::B => Resource::A,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Resource::A => "A",
            Resource::B => "B",
        }
    }
}

/// Ground colour seen by a robot at some point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AreaKind {
    Nest,
    Resource(Resource),
    Open,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arena {
    nest_center: Vec2,
    resource_a_center: Vec2,
    resource_b_center: Vec2,
    area_radius: f64,
    nest_distance: f64,
}

impl Arena {
    /// Nest at the origin with resource A at `(-d, 0)` and B at `(+d, 0)`.
    pub fn new(area_radius: f64, nest_distance: f64) -> Result<Self, ConfigError> {
        if !(area_radius.is_finite() && area_radius > 0.0) {
            return Err(ConfigError::invalid("area_radius", "must be positive and finite"));
        }
        if !(nest_distance.is_finite() && nest_distance > 2.0 * area_radius) {
            return Err(ConfigError::invalid(
                "nest_distance",
                "must exceed twice area_radius so the areas are disjoint",
            ));
        }
        Ok(Arena {
            nest_center: Vec2::ZERO,
            resource_a_center: Vec2::new(-nest_distance, 0.0),
            resource_b_center: Vec2::new(nest_distance, 0.0),
            area_radius,
            nest_distance,
        })
    }

    pub fn nest_center(&self) -> Vec2 {
        self.nest_center
    }

    pub fn resource_center(&self, r: Resource) -> Vec2 {
        match r {
            Resource::A => self.resource_a_center,
            Resource::B => self.resource_b_center,
        }
    }

    pub fn area_radius(&self) -> f64 {
        self.area_radius
    }

    pub fn nest_distance(&self) -> f64 {
        self.nest_distance
    }

    pub fn center_of(&self, kind: AreaKind) -> Option<Vec2> {
        match kind {
            AreaKind::Nest => Some(self.nest_center),
            AreaKind::Resource(r) => Some(self.resource_center(r)),
            AreaKind::Open => None,
        }
    }

    /// Which area contains `p`; points on a boundary circle are inside.
    pub fn classify(&self, p: Vec2) -> AreaKind {
        let r2 = self.area_radius * self.area_radius;
        if p.dist_sq(self.nest_center) <= r2 {
            AreaKind::Nest
        } else if p.dist_sq(self.resource_a_center) <= r2 {
            AreaKind::Resource(Resource::A)
        } else if p.dist_sq(self.resource_b_center) <= r2 {
            AreaKind::Resource(Resource::B)
        } else {
            AreaKind::Open
        }
    }

    pub fn in_nest(&self, p: Vec2) -> bool {
        p.dist_sq(self.nest_center) <= self.area_radius * self.area_radius
    }

    /// Resource whose center is nearer to `p`. An exact tie is settled by a
    /// fair coin drawn from `chooser`.
    pub fn closest_resource<C: Chooser>(&self, p: Vec2, robot: usize, chooser: &mut C) -> Resource {
        let da = p.dist_sq(self.resource_a_center);
        let db = p.dist_sq(self.resource_b_center);
        if da < db {
            Resource::A
        } else if db < da {
            Resource::B
        } else if chooser.chance(Site::ProvenanceTie(robot), 0.5) {
            Resource::A
        } else {
            Resource::B
        }
    }
}

impl Default for Arena {
    fn default() -> Self {
        Arena::new(0.3, 2.5).expect("default arena is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chooser::RngChooser;
    use proptest::prelude::*;

    #[test]
    fn center_of_nest_is_nest() {
        let a = Arena::default();
        assert_eq!(a.classify(a.nest_center()), AreaKind::Nest);
    }

    #[test]
    fn resource_at_nest_distance() {
        let a = Arena::default();
        let p = a.nest_center() + Vec2::new(-2.5, 0.0);
        assert_eq!(a.classify(p), AreaKind::Resource(Resource::A));
        let p = a.nest_center() + Vec2::new(2.5, 0.0);
        assert_eq!(a.classify(p), AreaKind::Resource(Resource::B));
    }

    #[test]
    fn midpoint_is_open() {
        let a = Arena::default();
        assert_eq!(a.classify(Vec2::new(1.25, 0.0)), AreaKind::Open);
        assert_eq!(a.classify(Vec2::new(-1.25, 0.0)), AreaKind::Open);
    }

    #[test]
    fn boundary_counts_inside() {
        let a = Arena::default();
        assert_eq!(a.classify(Vec2::new(0.0, 0.3)), AreaKind::Nest);
        assert_eq!(a.classify(Vec2::new(2.5 - 0.3, 0.0)), AreaKind::Resource(Resource::B));
        assert_eq!(a.classify(Vec2::new(0.0, 0.300_000_1)), AreaKind::Open);
    }

    #[test]
    fn rejects_overlapping_areas() {
        assert!(Arena::new(0.3, 0.6).is_err());
        assert!(Arena::new(0.0, 2.5).is_err());
        assert!(Arena::new(0.3, 0.61).is_ok());
    }

    #[test]
    fn closest_resource_strict() {
        let a = Arena::default();
        let mut c = RngChooser::new(0);
        assert_eq!(a.closest_resource(Vec2::new(-2.4, 0.1), 0, &mut c), Resource::A);
        assert_eq!(a.closest_resource(Vec2::new(0.01, 0.0), 0, &mut c), Resource::B);
        assert_eq!(a.closest_resource(Vec2::new(-0.01, 0.2), 0, &mut c), Resource::A);
    }

    #[test]
    fn equidistant_tie_is_fair() {
        let a = Arena::default();
        let trials = 10_000;
        let mut hits = 0;
        for seed in 0..trials {
            let mut c = RngChooser::new(seed);
            if a.closest_resource(Vec2::new(0.0, 0.7), 0, &mut c) == Resource::A {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "tie frequency {freq}");
    }

    proptest! {
        #[test]
        fn classify_is_pure_and_consistent(x in -4.0f64..4.0, y in -2.0f64..2.0) {
            let a = Arena::default();
            let p = Vec2::new(x, y);
            let k = a.classify(p);
            prop_assert_eq!(k, a.classify(p));
            let r = a.area_radius();
            let inside = [
                (AreaKind::Nest, a.nest_center()),
                (AreaKind::Resource(Resource::A), a.resource_center(Resource::A)),
                (AreaKind::Resource(Resource::B), a.resource_center(Resource::B)),
            ];
            let hits: Vec<_> = inside.iter().filter(|(_, c)| p.dist(*c) <= r).collect();
            prop_assert!(hits.len() <= 1);
            match hits.first() {
                Some((kind, _)) => prop_assert_eq!(k, *kind),
                None => prop_assert_eq!(k, AreaKind::Open),
            }
        }
    }
}
