//! Aggregation of a batch directory into the summary CSV files.
//!
//! | file | columns |
//! |---|---|
//! | `end_states.csv` | run_id, seed, variant, p_speak, p_sigma, end_state, weight, spread_bin, t_two_words, t_convergence |
//! | `end_state_histogram.csv` | variant, p_speak, p_sigma, end_state, weight, frequency, converged_runs |
//! | `spread.csv` | variant, p_speak, p_sigma, spread_bin, end_state, weight, runs_in_bin |
//! | `excluded.csv` | run_id, reason |
//! | `commitment.csv` | run_id, seed, variant, p_speak, p_sigma, t_end, uncommitted, committed_a, committed_b |
//! | `origins.csv` | t_bin, committed, trigger, rate |
//! | `interactions.csv` | t_bin, within, between, exchanges |
//! | `neighborhood.csv` | n_small, scope, k, probability |
//! | `neighborhood_reference.csv` | n_small, scope, k, probability |
//!
//! `origins.csv`, `interactions.csv` and `neighborhood.csv` pool every run
//! of the batch; the same files restricted to one grid cell are written to
//! `by_cell/<cell>/`. A run whose end state cannot be classified (timeout,
//! or a single word ever created) is listed in `excluded.csv` and left out
//! of the histograms.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::batch::{read_neighborhood_counts, run_dir, RunSummary};
use crate::config::{Mode, RunConfig};
use crate::error::{Error, Result};
use crate::events::EventLog;
use crate::metrics::{
    detect_end_states, first_word_origins, interaction_tally, origin_series, EndClass, EndStateError,
    InteractionTally, NeighborhoodCounts, OriginBin, Replay,
};
use crate::naming::GameVariant;

/// One run loaded back from disk.
#[derive(Clone, Debug)]
pub struct LoadedRun {
    pub summary: RunSummary,
    pub config: RunConfig,
    pub events: EventLog,
    pub neighborhood: NeighborhoodCounts,
}

/// Reads every successful run listed in `<dir>/runs.csv`. Runs whose
/// status is `error` are returned separately with their message.
pub fn load_batch(dir: &Path) -> Result<(Vec<LoadedRun>, Vec<(String, String)>)> {
    let mut rd = csv::Reader::from_path(dir.join("runs.csv"))?;
    let mut runs = Vec::new();
    let mut failed = Vec::new();
    for row in rd.deserialize() {
        let summary: RunSummary = row?;
        if summary.status == "error" {
            failed.push((summary.run_id.clone(), summary.error.clone().unwrap_or_default()));
            continue;
        }
        let rd = run_dir(dir, &summary.run_id);
        let config = RunConfig::from_file(&rd.join("config.toml"))?;
        let events = EventLog::load(&rd.join("events.jsonl"))?;
        let neighborhood = read_neighborhood_counts(&rd.join("neighborhood_counts.csv"))?;
        runs.push(LoadedRun {
            summary,
            config,
            events,
            neighborhood,
        });
    }
    Ok((runs, failed))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndStateRow {
    pub run_id: String,
    pub seed: u64,
    pub variant: GameVariant,
    pub p_speak: f64,
    pub p_sigma: f64,
    pub end_state: EndClass,
    pub weight: f64,
    pub spread_bin: Option<String>,
    pub t_two_words: f64,
    pub t_convergence: f64,
}

/// End-state rows of all classifiable runs (one row per class with
/// non-zero weight) and the reasons the others were excluded.
pub fn end_state_rows(runs: &[LoadedRun]) -> (Vec<EndStateRow>, Vec<(String, String)>) {
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for r in runs {
        if !r.config.mode.plays_game() {
            continue;
        }
        match detect_end_states(&r.events, r.config.n_robots) {
            Ok(es) => {
                for (class, weight) in &es.weights {
                    rows.push(EndStateRow {
                        run_id: r.summary.run_id.clone(),
                        seed: r.config.seed,
                        variant: r.config.variant,
                        p_speak: r.config.p_speak,
                        p_sigma: r.config.p_cross_inhibit,
                        end_state: *class,
                        weight: *weight,
                        spread_bin: es.spread_bin.map(|b| b.label()),
                        t_two_words: r.config.seconds(es.two_words_step),
                        t_convergence: r.config.seconds(es.convergence_step),
                    });
                }
            }
            Err(e) => {
                let reason = match e {
                    EndStateError::NotConverged => "not_converged",
                    EndStateError::SingleWord => "single_word",
                };
                excluded.push((r.summary.run_id.clone(), reason.to_string()));
            }
        }
    }
    (rows, excluded)
}

type GroupKey = (String, String, String);

fn group_key(variant: GameVariant, p_speak: f64, p_sigma: f64) -> GroupKey {
    (variant.to_string(), p_speak.to_string(), p_sigma.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub variant: String,
    pub p_speak: String,
    pub p_sigma: String,
    pub end_state: EndClass,
    pub weight: f64,
    pub frequency: f64,
    pub converged_runs: usize,
}

/// Class weights per (variant, P_s, P_σ); `frequency` divides by the
/// number of classified runs in the group.
pub fn end_state_histogram(rows: &[EndStateRow]) -> Vec<HistogramRow> {
    let mut groups: BTreeMap<GroupKey, ([f64; 4], std::collections::BTreeSet<&str>)> = BTreeMap::new();
    for r in rows {
        let g = groups.entry(group_key(r.variant, r.p_speak, r.p_sigma)).or_default();
        g.0[r.end_state.index()] += r.weight;
        g.1.insert(&r.run_id);
    }
    let mut out = Vec::new();
    for ((variant, p_speak, p_sigma), (w, ids)) in groups {
        let n = ids.len();
        for class in EndClass::ALL {
            out.push(HistogramRow {
                variant: variant.clone(),
                p_speak: p_speak.clone(),
                p_sigma: p_sigma.clone(),
                end_state: class,
                weight: w[class.index()],
                frequency: w[class.index()] / n as f64,
                converged_runs: n,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadRow {
    pub variant: String,
    pub p_speak: String,
    pub p_sigma: String,
    pub spread_bin: String,
    pub end_state: EndClass,
    pub weight: f64,
    pub runs_in_bin: usize,
}

/// Class weights per group and spread bin.
pub fn spread_table(rows: &[EndStateRow]) -> Vec<SpreadRow> {
    type Acc<'a> = ([f64; 4], std::collections::BTreeSet<&'a str>);
    let mut groups: BTreeMap<(GroupKey, String), Acc> = BTreeMap::new();
    for r in rows {
        let Some(bin) = &r.spread_bin else { continue };
        let g = groups
            .entry((group_key(r.variant, r.p_speak, r.p_sigma), bin.clone()))
            .or_default();
        g.0[r.end_state.index()] += r.weight;
        g.1.insert(&r.run_id);
    }
    let mut out = Vec::new();
    for (((variant, p_speak, p_sigma), bin), (w, ids)) in groups {
        for class in EndClass::ALL {
            out.push(SpreadRow {
                variant: variant.clone(),
                p_speak: p_speak.clone(),
                p_sigma: p_sigma.clone(),
                spread_bin: bin.clone(),
                end_state: class,
                weight: w[class.index()],
                runs_in_bin: ids.len(),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommitmentRow {
    pub run_id: String,
    pub seed: u64,
    pub variant: GameVariant,
    pub p_speak: f64,
    pub p_sigma: f64,
    pub t_end: f64,
    pub uncommitted: usize,
    pub committed_a: usize,
    pub committed_b: usize,
}

/// Commitment counts at the end of every run, replayed from its log.
pub fn commitment_rows(runs: &[LoadedRun]) -> Vec<CommitmentRow> {
    runs.iter()
        .map(|r| {
            let mut replay = Replay::new(r.config.n_robots);
            for e in r.events.iter() {
                replay.apply(e);
            }
            let (u, a, b) = replay.counts();
            CommitmentRow {
                run_id: r.summary.run_id.clone(),
                seed: r.config.seed,
                variant: r.config.variant,
                p_speak: r.config.p_speak,
                p_sigma: r.config.p_cross_inhibit,
                t_end: r.summary.t_end.unwrap_or(0.0),
                uncommitted: u,
                committed_a: a,
                committed_b: b,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OriginRow {
    pub t_bin: f64,
    pub committed: bool,
    /// `self` or `received`.
    pub trigger: &'static str,
    /// First words per second per run.
    pub rate: f64,
}

/// First-word origin rates in bins of `bin_s` seconds.
pub fn origin_rows(runs: &[&LoadedRun], bin_s: f64) -> Vec<OriginRow> {
    let mut total: Vec<OriginBin> = Vec::new();
    let mut n = 0usize;
    for r in runs {
        if !r.config.mode.plays_game() {
            continue;
        }
        n += 1;
        let origins = first_word_origins(&r.events, r.config.n_robots);
        let series = origin_series(&origins, r.config.period_steps(bin_s));
        if total.len() < series.len() {
            total.resize(series.len(), OriginBin::default());
        }
        for (t, b) in total.iter_mut().zip(&series) {
            t.merge(b);
        }
    }
    let mut out = Vec::new();
    for (k, b) in total.iter().enumerate() {
        let t_bin = k as f64 * bin_s;
        let scale = 1.0 / (n as f64 * bin_s);
        for (committed, trigger, count) in [
            (true, "self", b.committed_self),
            (true, "received", b.committed_received),
            (false, "self", b.uncommitted_self),
            (false, "received", b.uncommitted_received),
        ] {
            out.push(OriginRow {
                t_bin,
                committed,
                trigger,
                rate: count as f64 * scale,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteractionRow {
    pub t_bin: f64,
    pub within: f64,
    pub between: f64,
    pub exchanges: f64,
}

/// Mean per-run tallies in bins of `bin_s` seconds. Each bin averages over
/// the runs still going at the start of the bin.
pub fn interaction_rows(runs: &[&LoadedRun], bin_s: f64) -> Vec<InteractionRow> {
    let mut sums: Vec<InteractionTally> = Vec::new();
    let mut alive: Vec<usize> = Vec::new();
    for r in runs {
        if !r.config.mode.commitment_dynamics() && !r.config.mode.plays_game() {
            continue;
        }
        let bin_steps = r.config.period_steps(bin_s);
        let series = interaction_tally(&r.events, r.config.n_robots, bin_steps);
        let t_end = r.summary.t_end.unwrap_or(0.0);
        let bins = ((t_end / bin_s).floor() as usize + 1).max(series.len());
        if sums.len() < bins {
            sums.resize(bins, InteractionTally::default());
            alive.resize(bins, 0);
        }
        for k in 0..bins {
            alive[k] += 1;
            if let Some(t) = series.get(k) {
                sums[k].merge(t);
            }
        }
    }
    sums.iter()
        .zip(&alive)
        .enumerate()
        .map(|(k, (s, &n))| {
            let n = n.max(1) as f64;
            InteractionRow {
                t_bin: k as f64 * bin_s,
                within: s.within as f64 / n,
                between: s.between as f64 / n,
                exchanges: s.exchanges as f64 / n,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeighborhoodRow {
    pub n_small: usize,
    pub scope: crate::metrics::Scope,
    pub k: usize,
    pub probability: f64,
}

pub fn neighborhood_rows<'a>(runs: impl IntoIterator<Item = &'a LoadedRun>) -> Vec<NeighborhoodRow> {
    let mut pooled = NeighborhoodCounts::new();
    for r in runs {
        pooled.merge(&r.neighborhood);
    }
    pooled
        .probabilities()
        .into_iter()
        .map(|(n_small, scope, k, probability)| NeighborhoodRow {
            n_small,
            scope,
            k,
            probability,
        })
        .collect()
}

/// Writes `header` then one serialized row per item; the header must list
/// the struct fields in declaration order.
fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const END_STATE_COLUMNS: &[&str] = &[
    "run_id",
    "seed",
    "variant",
    "p_speak",
    "p_sigma",
    "end_state",
    "weight",
    "spread_bin",
    "t_two_words",
    "t_convergence",
];
const HISTOGRAM_COLUMNS: &[&str] = &["variant", "p_speak", "p_sigma", "end_state", "weight", "frequency", "converged_runs"];
const SPREAD_COLUMNS: &[&str] = &["variant", "p_speak", "p_sigma", "spread_bin", "end_state", "weight", "runs_in_bin"];
const COMMITMENT_COLUMNS: &[&str] = &[
    "run_id",
    "seed",
    "variant",
    "p_speak",
    "p_sigma",
    "t_end",
    "uncommitted",
    "committed_a",
    "committed_b",
];
const ORIGIN_COLUMNS: &[&str] = &["t_bin", "committed", "trigger", "rate"];
const INTERACTION_COLUMNS: &[&str] = &["t_bin", "within", "between", "exchanges"];
const NEIGHBORHOOD_COLUMNS: &[&str] = &["n_small", "scope", "k", "probability"];

#[derive(Serialize)]
struct Excluded<'a> {
    run_id: &'a str,
    reason: &'a str,
}

/// Options of the `summarize` command.
#[derive(Clone, Copy, Debug)]
pub struct SummarizeOptions {
    /// Bin width of the origin series, seconds.
    pub origin_bin_s: f64,
    /// Bin width of the interaction series, seconds.
    pub interaction_bin_s: f64,
}

impl Default for SummarizeOptions {
    fn default() -> Self {
        SummarizeOptions {
            origin_bin_s: 100.0,
            interaction_bin_s: 100.0,
        }
    }
}

fn write_series(out: &Path, runs: &[&LoadedRun], opts: &SummarizeOptions) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_csv(&out.join("origins.csv"), ORIGIN_COLUMNS, &origin_rows(runs, opts.origin_bin_s))?;
    write_csv(
        &out.join("interactions.csv"),
        INTERACTION_COLUMNS,
        &interaction_rows(runs, opts.interaction_bin_s),
    )?;
    let nb = neighborhood_rows(runs.iter().copied().filter(|r| r.config.mode != Mode::RandomWalkReference));
    write_csv(&out.join("neighborhood.csv"), NEIGHBORHOOD_COLUMNS, &nb)
}

/// Reads the batch in `input` and writes every summary file to `out`.
pub fn summarize(input: &Path, out: &Path, opts: &SummarizeOptions) -> Result<()> {
    let (runs, failed) = load_batch(input)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let (rows, mut excluded) = end_state_rows(&runs);
    excluded.extend(failed.iter().map(|(id, msg)| (id.clone(), format!("error: {msg}"))));
    write_csv(&out.join("end_states.csv"), END_STATE_COLUMNS, &rows)?;
    write_csv(&out.join("end_state_histogram.csv"), HISTOGRAM_COLUMNS, &end_state_histogram(&rows))?;
    write_csv(&out.join("spread.csv"), SPREAD_COLUMNS, &spread_table(&rows))?;
    let ex: Vec<Excluded> = excluded
        .iter()
        .map(|(run_id, reason)| Excluded { run_id, reason })
        .collect();
    write_csv(&out.join("excluded.csv"), &["run_id", "reason"], &ex)?;
    write_csv(&out.join("commitment.csv"), COMMITMENT_COLUMNS, &commitment_rows(&runs))?;

    let all: Vec<&LoadedRun> = runs.iter().collect();
    write_series(out, &all, opts)?;
    let reference = neighborhood_rows(runs.iter().filter(|r| r.config.mode == Mode::RandomWalkReference));
    write_csv(&out.join("neighborhood_reference.csv"), NEIGHBORHOOD_COLUMNS, &reference)?;

    let mut cells: BTreeMap<&str, Vec<&LoadedRun>> = BTreeMap::new();
    for r in &runs {
        cells.entry(r.summary.cell.as_str()).or_default().push(r);
    }
    for (cell, members) in cells {
        write_series(&out.join("by_cell").join(cell), &members, opts)?;
    }
    Ok(())
}
