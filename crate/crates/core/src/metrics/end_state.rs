//! Classification of a converged run by the provenance of its last two
//! words relative to the resource the swarm had selected.
//!
//! `w_f` is the word everyone ends up sharing; `w_e` is the other word
//! alive when only two remained. `w_f` is judged against the selection at
//! convergence, `w_e` against the selection at the moment the swarm was
//! down to those two words. When the selection is tied the run is split
//! in halves over both hypothetical selections.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::replay::Replay;
use crate::arena::Resource;
use crate::commitment::{selected_resource, Selection};
use crate::events::{EventKind, EventLog};
use crate::naming::WordId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EndClass {
    OO,
    OX,
    XO,
    XX,
}

impl EndClass {
    pub const ALL: [EndClass; 4] = [EndClass::OO, EndClass::OX, EndClass::XO, EndClass::XX];

    /// From whether `w_f` and `w_e` match their reference selection.
    pub fn from_matches(final_matches: bool, second_matches: bool) -> Self {
        match (final_matches, second_matches) {
            (true, true) => EndClass::OO,
            (true, false) => EndClass::OX,
            (false, true) => EndClass::XO,
            (false, false) => EndClass::XX,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EndClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Share of committed robots on the non-selected resource, in tenths:
/// bin `k` covers `[10k %, 10(k+1) %)` and an even split lands in bin 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpreadBin(pub u8);

impl SpreadBin {
    pub const COUNT: usize = 5;

    pub fn label(self) -> String {
        format!("{}-{}", self.0 as u32 * 10, self.0 as u32 * 10 + 10)
    }
}

impl fmt::Display for SpreadBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Spread bin of a committed split, or `None` when nobody is committed.
pub fn spread_bin(count_a: usize, count_b: usize) -> Option<SpreadBin> {
    let total = count_a + count_b;
    if total == 0 {
        return None;
    }
    let minority = count_a.min(count_b);
    let bin = (10 * minority / total).min(SpreadBin::COUNT - 1);
    Some(SpreadBin(bin as u8))
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EndStateError {
    #[error("run did not reach a single shared word")]
    NotConverged,
    #[error("only one word ever existed")]
    SingleWord,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndState {
    /// Class weights summing to one.
    pub weights: Vec<(EndClass, f64)>,
    pub final_word: WordId,
    pub second_word: WordId,
    pub final_provenance: Resource,
    pub second_provenance: Resource,
    pub two_words_step: u64,
    pub convergence_step: u64,
    pub selection_at_two_words: Selection,
    pub selection_at_convergence: Selection,
    /// Uncommitted, A, B at convergence.
    pub counts_at_convergence: (usize, usize, usize),
    pub spread_bin: Option<SpreadBin>,
}

impl EndState {
    pub fn weight(&self, class: EndClass) -> f64 {
        self.weights.iter().filter(|(c, _)| *c == class).map(|(_, w)| w).sum()
    }
}

fn options(sel: Selection) -> Vec<(Resource, f64)> {
    match sel {
        Selection::Selected(r) => vec![(r, 1.0)],
        Selection::Tie => vec![(Resource::A, 0.5), (Resource::B, 0.5)],
    }
}

/// Class weights for a final word tagged `final_prov` and second-last word
/// tagged `second_prov`. A tie at both reference times is resolved with one
/// shared hypothetical selection, so `AA` splits between OO and XX and
/// `AB` between OX and XO.
pub fn classify(
    final_prov: Resource,
    second_prov: Resource,
    at_convergence: Selection,
    at_two_words: Selection,
) -> Vec<(EndClass, f64)> {
    let mut acc = [0.0f64; 4];
    if at_convergence == Selection::Tie && at_two_words == Selection::Tie {
        for (o, w) in options(Selection::Tie) {
            acc[EndClass::from_matches(final_prov == o, second_prov == o).index()] += w;
        }
    } else {
        for (oc, wc) in options(at_convergence) {
            for (ot, wt) in options(at_two_words) {
                acc[EndClass::from_matches(final_prov == oc, second_prov == ot).index()] += wc * wt;
            }
        }
    }
    EndClass::ALL
        .iter()
        .zip(acc)
        .filter(|(_, w)| *w > 0.0)
        .map(|(c, w)| (*c, w))
        .collect()
}

/// Reads the end state of a run from its event log.
pub fn detect_end_states(log: &EventLog, n_robots: usize) -> Result<EndState, EndStateError> {
    let mut created: Vec<Option<usize>> = Vec::new();
    let mut extinct: Vec<Option<usize>> = Vec::new();
    let mut converged = None;
    for (i, e) in log.iter().enumerate() {
        match &e.kind {
            EventKind::WordCreated { word, .. } => {
                let k = word.0 as usize;
                if created.len() <= k {
                    created.resize(k + 1, None);
                    extinct.resize(k + 1, None);
                }
                created[k] = Some(i);
            }
            EventKind::Extinct { word } => {
                extinct[word.0 as usize] = Some(i);
            }
            EventKind::Converged { word } => {
                converged = Some((i, *word));
                break;
            }
            _ => {}
        }
    }
    let (conv_idx, final_word) = converged.ok_or(EndStateError::NotConverged)?;

    let second_word = extinct
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != final_word.0 as usize)
        .filter_map(|(k, ext)| ext.map(|i| (i, k)))
        .max()
        .map(|(_, k)| WordId(k as u32))
        .ok_or(EndStateError::SingleWord)?;

    let others_gone = extinct
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != final_word.0 as usize && k != second_word.0 as usize)
        .filter_map(|(_, ext)| *ext)
        .max();
    let two_idx = [
        others_gone,
        created[second_word.0 as usize],
        created[final_word.0 as usize],
    ]
    .into_iter()
    .flatten()
    .max()
    .expect("both words were created");

    let mut replay = Replay::new(n_robots);
    let mut at_two = None;
    for (i, e) in log.events[..=conv_idx].iter().enumerate() {
        replay.apply(e);
        if i == two_idx {
            let (_, a, b) = replay.counts();
            at_two = Some(selected_resource(a, b));
        }
    }
    let selection_at_two_words = at_two.expect("index within log");
    let counts_at_convergence = replay.counts();
    let (_, a, b) = counts_at_convergence;
    let selection_at_convergence = selected_resource(a, b);

    let final_provenance = replay.provenance_of(final_word).expect("created word");
    let second_provenance = replay.provenance_of(second_word).expect("created word");

    Ok(EndState {
        weights: classify(
            final_provenance,
            second_provenance,
            selection_at_convergence,
            selection_at_two_words,
        ),
        final_word,
        second_word,
        final_provenance,
        second_provenance,
        two_words_step: log.events[two_idx].step,
        convergence_step: log.events[conv_idx].step,
        selection_at_two_words,
        selection_at_convergence,
        counts_at_convergence,
        spread_bin: spread_bin(a, b),
    })
}
