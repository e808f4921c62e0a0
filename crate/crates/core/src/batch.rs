//! Many runs at once: expand a template over seeds and swept keys, run the
//! grid on a thread pool, and persist every run to its own directory.
//!
//! Layout of a batch output directory:
//!
//! ```text
//! <out>/runs.csv                one row per run, failures included
//! <out>/cells.csv               swept values of each grid cell
//! <out>/runs/<run_id>/config.toml
//! <out>/runs/<run_id>/events.jsonl
//! <out>/runs/<run_id>/populations.csv
//! <out>/runs/<run_id>/neighborhood_counts.csv
//! <out>/runs/<run_id>/summary.json
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{raw_value, Mode, RunConfig};
use crate::error::{ConfigError, Error, Result};
use crate::events::EventLog;
use crate::metrics::Scope;
use crate::naming::GameVariant;
use crate::sim::{simulate, RunOutcome, RunRecord};

/// Hex SHA-256 of the JSON-lines rendering of a log.
pub fn log_digest(log: &EventLog) -> String {
    let digest = Sha256::digest(log.to_jsonl());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One point of the sweep grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub id: String,
    /// Swept keys and their raw values, in sweep order.
    pub values: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub run_id: String,
    pub cell: String,
    pub config: RunConfig,
}

/// Cartesian product of the sweeps, the first sweep varying slowest.
/// Every resulting configuration is validated before anything runs.
pub fn expand(
    template: &RunConfig,
    seeds: &[u64],
    sweeps: &[(String, Vec<String>)],
) -> Result<(Vec<Cell>, Vec<RunSpec>)> {
    let mut cells: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in sweeps {
        if key == "seed" {
            return Err(ConfigError::invalid("seed", "seeds come from --seeds, not from a sweep").into());
        }
        let mut next = Vec::with_capacity(cells.len() * values.len());
        for cell in &cells {
            for v in values {
                let mut c = cell.clone();
                c.push((key.clone(), v.clone()));
                next.push(c);
            }
        }
        cells = next;
    }

    let width = cells.len().saturating_sub(1).to_string().len().max(2);
    let base = template.to_table();
    let mut out_cells = Vec::with_capacity(cells.len());
    let mut runs = Vec::with_capacity(cells.len() * seeds.len());
    for (ci, values) in cells.into_iter().enumerate() {
        let id = format!("c{ci:0width$}");
        let mut table = base.clone();
        for (k, v) in &values {
            if !table.contains_key(k) {
                return Err(ConfigError::invalid(k.as_str(), "unknown key in sweep").into());
            }
            table.insert(k.clone(), raw_value(v));
        }
        let cell_cfg = RunConfig::from_table(table)?;
        for &seed in seeds {
            let mut config = cell_cfg.clone();
            config.seed = seed;
            runs.push(RunSpec {
                run_id: format!("{id}-s{seed:04}"),
                cell: id.clone(),
                config,
            });
        }
        out_cells.push(Cell { id, values });
    }
    Ok((out_cells, runs))
}

/// Per-run result line of `runs.csv` and contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub cell: String,
    pub seed: u64,
    pub mode: Mode,
    pub variant: GameVariant,
    pub p_speak: f64,
    pub p_sigma: f64,
    /// `converged`, `timeout` or `error`.
    pub status: String,
    /// Last simulated time in seconds.
    pub t_end: Option<f64>,
    pub t_convergence: Option<f64>,
    pub events: Option<usize>,
    pub log_sha256: Option<String>,
    pub wall_ms: Option<u128>,
    pub error: Option<String>,
}

impl RunSummary {
    fn base(spec: &RunSpec) -> Self {
        let c = &spec.config;
        RunSummary {
            run_id: spec.run_id.clone(),
            cell: spec.cell.clone(),
            seed: c.seed,
            mode: c.mode,
            variant: c.variant,
            p_speak: c.p_speak,
            p_sigma: c.p_cross_inhibit,
            status: "error".into(),
            t_end: None,
            t_convergence: None,
            events: None,
            log_sha256: None,
            wall_ms: None,
            error: None,
        }
    }

    pub fn from_record(spec: &RunSpec, rec: &RunRecord) -> Self {
        let c = &rec.config;
        let mut s = Self::base(spec);
        s.status = match rec.outcome {
            RunOutcome::Converged { .. } => "converged".into(),
            RunOutcome::Timeout { .. } => "timeout".into(),
        };
        s.t_end = Some(c.seconds(rec.last_step));
        s.t_convergence = match rec.outcome {
            RunOutcome::Converged { step, .. } => Some(c.seconds(step)),
            RunOutcome::Timeout { .. } => None,
        };
        s.events = Some(rec.events.len());
        s.log_sha256 = Some(log_digest(&rec.events));
        s.wall_ms = Some(rec.wall_clock.as_millis());
        s
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes everything a run produced into `dir`.
pub fn write_run(dir: &Path, rec: &RunRecord, summary: &RunSummary) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("config.toml"), rec.config.to_toml_string().as_bytes())?;

    let events = dir.join("events.jsonl");
    let f = fs::File::create(&events).map_err(|e| Error::io(&events, e))?;
    let mut w = BufWriter::new(f);
    rec.events.write_jsonl(&mut w).map_err(|e| Error::io(&events, e))?;
    w.flush().map_err(|e| Error::io(&events, e))?;

    let mut pop = csv::Writer::from_path(dir.join("populations.csv"))?;
    pop.write_record([
        "t",
        "uncommitted",
        "committed_a",
        "committed_b",
        "know_a",
        "know_b",
        "no_words",
        "matching",
        "mismatched",
        "words_a",
        "words_b",
    ])?;
    let rows = rec.snapshots.iter().chain(std::iter::once(&rec.final_population));
    let mut last_step = None;
    for s in rows {
        if last_step == Some(s.step) {
            continue;
        }
        last_step = Some(s.step);
        pop.write_record([
            format!("{}", rec.config.seconds(s.step)),
            s.uncommitted.to_string(),
            s.committed_a.to_string(),
            s.committed_b.to_string(),
            s.know_a.to_string(),
            s.know_b.to_string(),
            s.no_words.to_string(),
            s.matching.to_string(),
            s.mismatched.to_string(),
            s.words_a.to_string(),
            s.words_b.to_string(),
        ])?;
    }
    pop.flush().map_err(|e| Error::io(dir.join("populations.csv"), e))?;

    let mut nb = csv::Writer::from_path(dir.join("neighborhood_counts.csv"))?;
    nb.write_record(["n_small", "scope", "k", "count"])?;
    for (n_small, scope, k, count) in rec.neighborhood.entries() {
        nb.write_record([n_small.to_string(), scope.to_string(), k.to_string(), count.to_string()])?;
    }
    nb.flush().map_err(|e| Error::io(dir.join("neighborhood_counts.csv"), e))?;

    let json = serde_json::to_vec_pretty(summary)?;
    write_file(&dir.join("summary.json"), &json)
}

/// Reads back a run's neighbourhood counts.
pub fn read_neighborhood_counts(path: &Path) -> Result<crate::metrics::NeighborhoodCounts> {
    let mut counts = crate::metrics::NeighborhoodCounts::new();
    let mut rd = csv::Reader::from_path(path)?;
    for row in rd.deserialize() {
        let (n_small, scope, k, count): (usize, Scope, usize, u64) = row?;
        counts.add_count(n_small, scope, k, count);
    }
    Ok(counts)
}

pub fn run_dir(out: &Path, run_id: &str) -> PathBuf {
    out.join("runs").join(run_id)
}

fn execute(spec: &RunSpec, out: &Path) -> RunSummary {
    let rec = match simulate(&spec.config) {
        Ok(rec) => rec,
        Err(e) => {
            let mut s = RunSummary::base(spec);
            s.error = Some(e.to_string());
            return s;
        }
    };
    let summary = RunSummary::from_record(spec, &rec);
    match write_run(&run_dir(out, &spec.run_id), &rec, &summary) {
        Ok(()) => summary,
        Err(e) => {
            let mut s = summary;
            s.status = "error".into();
            s.error = Some(e.to_string());
            s
        }
    }
}

/// Runs every spec on `jobs` threads and writes the batch layout under
/// `out`. A failing run is recorded in `runs.csv` and does not stop the
/// others. Results do not depend on `jobs`.
pub fn run_batch(cells: &[Cell], specs: &[RunSpec], out: &Path, jobs: usize) -> Result<Vec<RunSummary>> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let summaries: Vec<RunSummary> = pool.install(|| specs.par_iter().map(|s| execute(s, out)).collect());

    let mut runs = csv::Writer::from_path(out.join("runs.csv"))?;
    for s in &summaries {
        runs.serialize(s)?;
    }
    if summaries.is_empty() {
        runs.write_record([
            "run_id",
            "cell",
            "seed",
            "mode",
            "variant",
            "p_speak",
            "p_sigma",
            "status",
            "t_end",
            "t_convergence",
            "events",
            "log_sha256",
            "wall_ms",
            "error",
        ])?;
    }
    runs.flush().map_err(|e| Error::io(out.join("runs.csv"), e))?;

    let mut cw = csv::Writer::from_path(out.join("cells.csv"))?;
    cw.write_record(["cell", "key", "value"])?;
    for c in cells {
        for (k, v) in &c.values {
            cw.write_record([c.id.as_str(), k, v])?;
        }
    }
    cw.flush().map_err(|e| Error::io(out.join("cells.csv"), e))?;
    Ok(summaries)
}
