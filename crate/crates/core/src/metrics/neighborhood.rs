//! Distribution of neighbourhood sizes, conditioned on the size of the
//! smaller committed sub-population.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arena::Resource;
use crate::commitment::CommitmentState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Whole,
    Within,
    Between,
}

impl Scope {
    pub const ALL: [Scope; 3] = [Scope::Whole, Scope::Within, Scope::Between];
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Whole => "whole",
            Scope::Within => "within",
            Scope::Between => "between",
        })
    }
}

/// `counts[n_small][scope][k]` robot-samples with `k` neighbours in scope.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodCounts {
    counts: Vec<[Vec<u64>; 3]>,
    /// Robot-samples where within + between differed from whole.
    pub identity_violations: u64,
}

fn bump(v: &mut Vec<u64>, k: usize, by: u64) {
    if v.len() <= k {
        v.resize(k + 1, 0);
    }
    v[k] += by;
}

impl NeighborhoodCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one sample of every robot. `neighbors[i]` lists the robots
    /// within radio range of robot `i`; sub-populations are the commitment
    /// states (uncommitted robots form their own group).
    pub fn sample(&mut self, neighbors: &[Vec<u16>], labels: &[CommitmentState]) {
        let a = labels.iter().filter(|c| **c == CommitmentState::Committed(Resource::A)).count();
        let b = labels.iter().filter(|c| **c == CommitmentState::Committed(Resource::B)).count();
        let n_small = a.min(b);
        if self.counts.len() <= n_small {
            self.counts.resize_with(n_small + 1, Default::default);
        }
        for (i, nbs) in neighbors.iter().enumerate() {
            let whole = nbs.len();
            let within = nbs.iter().filter(|&&j| labels[j as usize] == labels[i]).count();
            let between = nbs.iter().filter(|&&j| labels[j as usize] != labels[i]).count();
            if within + between != whole {
                self.identity_violations += 1;
            }
            let slot = &mut self.counts[n_small];
            bump(&mut slot[0], whole, 1);
            bump(&mut slot[1], within, 1);
            bump(&mut slot[2], between, 1);
        }
    }

    pub fn add_count(&mut self, n_small: usize, scope: Scope, k: usize, count: u64) {
        if self.counts.len() <= n_small {
            self.counts.resize_with(n_small + 1, Default::default);
        }
        bump(&mut self.counts[n_small][scope as usize], k, count);
    }

    pub fn merge(&mut self, other: &NeighborhoodCounts) {
        for (n, scopes) in other.counts.iter().enumerate() {
            for scope in Scope::ALL {
                for (k, &c) in scopes[scope as usize].iter().enumerate() {
                    if c > 0 {
                        self.add_count(n, scope, k, c);
                    }
                }
            }
        }
        self.identity_violations += other.identity_violations;
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|s| s[0].iter().all(|&c| c == 0))
    }

    /// Non-zero `(n_small, scope, k, count)` entries in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Scope, usize, u64)> + '_ {
        self.counts.iter().enumerate().flat_map(|(n, scopes)| {
            Scope::ALL.into_iter().flat_map(move |scope| {
                scopes[scope as usize]
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(move |(k, &c)| (n, scope, k, c))
            })
        })
    }

    /// `P(|N| = k | n_small, scope)` for every non-empty entry.
    pub fn probabilities(&self) -> Vec<(usize, Scope, usize, f64)> {
        let mut out = Vec::new();
        for (n, scopes) in self.counts.iter().enumerate() {
            for scope in Scope::ALL {
                let row = &scopes[scope as usize];
                let total: u64 = row.iter().sum();
                if total == 0 {
                    continue;
                }
                for (k, &c) in row.iter().enumerate() {
                    if c > 0 {
                        out.push((n, scope, k, c as f64 / total as f64));
                    }
                }
            }
        }
        out
    }

    /// Pooled over all conditioning values.
    pub fn pooled(&self, scope: Scope) -> Vec<u64> {
        let mut out = Vec::new();
        for scopes in &self.counts {
            for (k, &c) in scopes[scope as usize].iter().enumerate() {
                bump(&mut out, k, c);
            }
        }
        out
    }

    pub fn mean(&self, scope: Scope) -> f64 {
        let pooled = self.pooled(scope);
        let total: u64 = pooled.iter().sum();
        if total == 0 {
            return 0.0;
        }
        let weighted: u64 = pooled.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        weighted as f64 / total as f64
    }

    /// Most frequent neighbourhood size, smallest on ties.
    pub fn mode(&self, scope: Scope) -> Option<usize> {
        let pooled = self.pooled(scope);
        let best = *pooled.iter().max()?;
        (best > 0).then(|| pooled.iter().position(|&c| c == best).expect("max exists"))
    }

    /// Sum of neighbour counts over all samples in a scope.
    pub fn total_links(&self, scope: Scope) -> u64 {
        self.pooled(scope).iter().enumerate().map(|(k, &c)| k as u64 * c).sum()
    }
}
