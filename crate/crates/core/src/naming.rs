//! Broadcast minimal naming game.
//!
//! A speaker utters one word from its inventory; every robot in range hears
//! it. A hearer that received several utterances in a step plays exactly
//! one of them, chosen uniformly: if it already knows the word it drops
//! everything else (success), otherwise it learns the word (failure). The
//! speaker never updates.
//!
//! Each word is tagged at creation with the resource closest to its
//! creator. That tag never changes, so the two provenance classes are
//! disjoint.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arena::{Arena, Resource};
use crate::chooser::{Chooser, Site};
use crate::geometry::Vec2;

/// Creation serial of a word, unique within one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordId(pub u32);

impl fmt::Display for WordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// How a robot came by a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordOrigin {
    /// Invented when asked to speak with nothing to say (classic game).
    SelfSpeak,
    /// Invented on stepping onto a resource (spatial game).
    SelfEnterResource,
    /// Learnt from a neighbour.
    Received,
}

impl WordOrigin {
    pub fn is_self(self) -> bool {
        !matches!(self, WordOrigin::Received)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameVariant {
    /// Words are invented by speakers with an empty inventory.
    #[default]
    Classic,
    /// Words are invented by robots entering a resource with an empty inventory.
    Spatial,
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameVariant::Classic => "classic",
            GameVariant::Spatial => "spatial",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Word {
    pub id: WordId,
    pub provenance: Resource,
    pub created_step: u64,
    pub creator_committed: bool,
    pub trigger: WordOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Utterance {
    pub speaker: usize,
    pub word: WordId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Failure,
}

/// Everything that happened to one hearer in one game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub hearer: usize,
    pub speaker: usize,
    pub word: WordId,
    pub outcome: Outcome,
    pub before: Vec<WordId>,
    pub after: Vec<WordId>,
    /// Words no robot knows any more after this game.
    pub extinct: Vec<WordId>,
}

/// Result of a speak decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Speech {
    pub word: WordId,
    /// True when the word was invented for this utterance.
    pub created: bool,
}

/// Inventories of the whole population plus the word registry and the
/// counters that make the convergence test O(1).
#[derive(Clone, Debug)]
pub struct NamingGame {
    variant: GameVariant,
    words: Vec<Word>,
    inventories: Vec<Vec<WordId>>,
    holders: Vec<u32>,
    surviving: usize,
    empty: usize,
    multi: usize,
}

impl NamingGame {
    pub fn new(variant: GameVariant, n_robots: usize) -> Self {
        NamingGame {
            variant,
            words: Vec::new(),
            inventories: vec![Vec::new(); n_robots],
            holders: Vec::new(),
            surviving: 0,
            empty: n_robots,
            multi: 0,
        }
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn inventory(&self, robot: usize) -> &[WordId] {
        &self.inventories[robot]
    }

    pub fn inventories(&self) -> &[Vec<WordId>] {
        &self.inventories
    }

    pub fn word(&self, id: WordId) -> &Word {
        &self.words[id.0 as usize]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_surviving(&self, id: WordId) -> bool {
        self.holders[id.0 as usize] > 0
    }

    /// Number of distinct words held by at least one robot.
    pub fn surviving_count(&self) -> usize {
        self.surviving
    }

    pub fn surviving_words(&self) -> impl Iterator<Item = &Word> + '_ {
        self.words.iter().filter(|w| self.holders[w.id.0 as usize] > 0)
    }

    /// The shared word once every inventory is the same singleton.
    pub fn converged_word(&self) -> Option<WordId> {
        if self.surviving == 1 && self.empty == 0 && self.multi == 0 {
            self.inventories.first().map(|inv| inv[0])
        } else {
            None
        }
    }

    fn set_inventory(&mut self, robot: usize, new: Vec<WordId>) -> Vec<WordId> {
        let old = std::mem::replace(&mut self.inventories[robot], new);
        let new = &self.inventories[robot];
        self.empty = self.empty + usize::from(new.is_empty()) - usize::from(old.is_empty());
        self.multi = self.multi + usize::from(new.len() > 1) - usize::from(old.len() > 1);
        let mut extinct = Vec::new();
        for w in &old {
            if !new.contains(w) {
                let h = &mut self.holders[w.0 as usize];
                *h -= 1;
                if *h == 0 {
                    self.surviving -= 1;
                    extinct.push(*w);
                }
            }
        }
        for w in new.clone() {
            if !old.contains(&w) {
                let h = &mut self.holders[w.0 as usize];
                if *h == 0 {
                    self.surviving += 1;
                }
                *h += 1;
            }
        }
        extinct
    }

    fn create_word(
        &mut self,
        robot: usize,
        provenance: Resource,
        step: u64,
        committed: bool,
        trigger: WordOrigin,
    ) -> WordId {
        debug_assert!(self.inventories[robot].is_empty());
        let id = WordId(u32::try_from(self.words.len()).expect("word serial overflow"));
        self.words.push(Word {
            id,
            provenance,
            created_step: step,
            creator_committed: committed,
            trigger,
        });
        self.holders.push(0);
        self.set_inventory(robot, vec![id]);
        id
    }

    /// Speak decision for one robot. With probability `p_speak` the robot
    /// utters a word drawn uniformly from its inventory. With an empty
    /// inventory a classic-game speaker invents a word tagged with the
    /// resource closest to `position`; a spatial-game speaker stays silent.
    #[allow(clippy::too_many_arguments)]
    pub fn maybe_speak<C: Chooser>(
        &mut self,
        robot: usize,
        p_speak: f64,
        position: Vec2,
        committed: bool,
        step: u64,
        arena: &Arena,
        chooser: &mut C,
    ) -> Option<Speech> {
        if !chooser.chance(Site::Speak(robot), p_speak) {
            return None;
        }
        let inv = &self.inventories[robot];
        if inv.is_empty() {
            return match self.variant {
                GameVariant::Classic => {
                    let provenance = arena.closest_resource(position, robot, chooser);
                    let word = self.create_word(robot, provenance, step, committed, WordOrigin::SelfSpeak);
                    Some(Speech { word, created: true })
                }
                GameVariant::Spatial => None,
            };
        }
        let word = inv[chooser.index(Site::Word(robot), inv.len())];
        Some(Speech { word, created: false })
    }

    /// Spatial-game word invention on arriving at a resource with an empty
    /// inventory. The new word is not broadcast.
    pub fn on_enter_resource(
        &mut self,
        robot: usize,
        resource: Resource,
        committed: bool,
        step: u64,
    ) -> Option<WordId> {
        if self.variant != GameVariant::Spatial || !self.inventories[robot].is_empty() {
            return None;
        }
        Some(self.create_word(robot, resource, step, committed, WordOrigin::SelfEnterResource))
    }

    /// Plays one game for a hearer that received `received` this step.
    pub fn on_hear<C: Chooser>(
        &mut self,
        robot: usize,
        received: &[Utterance],
        chooser: &mut C,
    ) -> GameRecord {
        assert!(!received.is_empty(), "hearer without utterances");
        let pick = if received.len() == 1 {
            0
        } else {
            chooser.index(Site::Utterance(robot), received.len())
        };
        let Utterance { speaker, word } = received[pick];
        let before = self.inventories[robot].clone();
        let (outcome, after) = if before.contains(&word) {
            (Outcome::Success, vec![word])
        } else {
            let mut grown = before.clone();
            grown.push(word);
            (Outcome::Failure, grown)
        };
        let extinct = self.set_inventory(robot, after.clone());
        GameRecord {
            hearer: robot,
            speaker,
            word,
            outcome,
            before,
            after,
            extinct,
        }
    }

    /// Surviving words split into those tagged with `selected` and those
    /// tagged with the other resource.
    pub fn word_sets(&self, selected: Resource) -> (Vec<WordId>, Vec<WordId>) {
        self.surviving_words()
            .map(|w| (w.id, w.provenance))
            .fold((Vec::new(), Vec::new()), |(mut o, mut x), (id, p)| {
                if p == selected {
                    o.push(id);
                } else {
                    x.push(id);
                }
                (o, x)
            })
    }
}
