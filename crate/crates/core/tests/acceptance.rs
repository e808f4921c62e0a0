//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs in a few minutes on one core.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use swarm_naming::batch::{expand, log_digest, run_batch};
use swarm_naming::metrics::{audit_log, detect_end_states, interaction_tally, EndClass, InteractionTally, Replay, Scope};
use swarm_naming::{simulate, EventKind, GameVariant, Mode, RunConfig, RunRecord};

const N: usize = 50;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn run_all(cfgs: Vec<RunConfig>) -> Vec<RunRecord> {
    cfgs.into_par_iter().map(|c| simulate(&c).expect("valid config")).collect()
}

fn seeds(base: RunConfig, n: u64) -> Vec<RunConfig> {
    (0..n).map(|seed| RunConfig { seed, ..base.clone() }).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-sided Welch t-test p-value.
fn welch_p(a: &[f64], b: &[f64]) -> f64 {
    let var = |xs: &[f64]| {
        let m = mean(xs);
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let (va, vb) = (var(a) / a.len() as f64, var(b) / b.len() as f64);
    if va + vb == 0.0 {
        return if mean(a) == mean(b) { 1.0 } else { 0.0 };
    }
    let t = (mean(a) - mean(b)) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive df");
    2.0 * (1.0 - dist.cdf(t.abs()))
}

fn whole_run_tally(rec: &RunRecord) -> InteractionTally {
    let mut total = InteractionTally::default();
    for t in interaction_tally(&rec.events, rec.config.n_robots, u64::MAX / 2) {
        total.merge(&t);
    }
    total
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut report = Report { failed: 0 };
    let mut pool: Vec<RunRecord> = Vec::new();

    // oracle equivalence
    let scenarios = [
        ("well-mixed", common::well_mixed_pairwise()),
        ("broadcast", common::broadcast_in_the_nest()),
        ("silent", common::silent()),
    ];
    let mismatched: Vec<&str> = scenarios.iter().filter(|(_, s)| !s.matches()).map(|(n, _)| *n).collect();
    report.line(
        "oracle equivalence",
        mismatched.is_empty(),
        format!("{} hand-traced schedules, mismatched: {mismatched:?}", scenarios.len()),
    );

    // mean-field convergence
    let mf = |n| RunConfig {
        mode: Mode::MeanFieldMng,
        n_robots: n,
        ..RunConfig::default()
    };
    let mf20 = run_all(seeds(mf(20), 20));
    let mf50 = run_all(seeds(mf(50), 20));
    let conv = |rs: &[RunRecord]| rs.iter().filter(|r| r.outcome.is_converged()).count();
    let t_mean = |rs: &[RunRecord]| mean(&rs.iter().map(|r| r.config.seconds(r.outcome.step())).collect::<Vec<_>>());
    let (t20, t50) = (t_mean(&mf20), t_mean(&mf50));
    report.line(
        "mean-field convergence",
        conv(&mf20) == 20 && conv(&mf50) == 20 && t50 > t20,
        format!("converged {}/20 and {}/20; mean time N=20 {t20:.0} s, N=50 {t50:.0} s", conv(&mf20), conv(&mf50)),
    );
    pool.extend(mf20);
    pool.extend(mf50);

    // commitment regimes; the game has no influence on commitment, so runs
    // use the commitment-only mode over the full horizon
    let regime = |p_sigma| RunConfig {
        mode: Mode::CommitmentOnly,
        p_recruit: 0.7,
        p_cross_inhibit: p_sigma,
        p_speak: 0.001,
        stop_on_convergence: false,
        ..RunConfig::default()
    };
    let strong = run_all(seeds(regime(0.7), 50));
    let weak = run_all(seeds(regime(0.1), 50));
    let frac = |rs: &[RunRecord], f: &dyn Fn(usize, usize) -> bool| {
        rs.iter()
            .filter(|r| f(r.final_population.committed_a, r.final_population.committed_b))
            .count() as f64
            / rs.len() as f64
    };
    let consensus = |a: usize, b: usize| 10 * a.max(b) >= 9 * N;
    let split = |a: usize, b: usize| 5 * a.min(b) >= N;
    let strong_consensus = frac(&strong, &consensus);
    let (strong_split, weak_split) = (frac(&strong, &split), frac(&weak, &split));
    report.line(
        "commitment regimes",
        strong_consensus >= 0.7 && weak_split >= 2.0 * strong_split && weak_split > strong_split,
        format!(
            "strong: {:.0}% reach 90% on one resource, {:.0}% split; weak: {:.0}% split, {:.0}% reach 90%",
            100.0 * strong_consensus,
            100.0 * strong_split,
            100.0 * weak_split,
            100.0 * frac(&weak, &consensus)
        ),
    );
    pool.extend(strong);
    pool.extend(weak);

    // spatial vs classic end states
    let mut cells = Vec::new();
    for variant in [GameVariant::Classic, GameVariant::Spatial] {
        for p_sigma in [0.7, 0.1] {
            let base = RunConfig {
                variant,
                p_speak: 0.001,
                p_cross_inhibit: p_sigma,
                ..RunConfig::default()
            };
            cells.push(((variant, p_sigma), run_all(seeds(base, 100))));
        }
    }
    let mut freq = std::collections::BTreeMap::new();
    let mut spread_oo = std::collections::BTreeMap::new();
    for ((variant, p_sigma), runs) in &cells {
        let mut w = [0.0; 4];
        let mut n = 0usize;
        for r in runs {
            let Ok(es) = detect_end_states(&r.events, N) else { continue };
            n += 1;
            for class in EndClass::ALL {
                w[class.index()] += es.weight(class);
            }
            if let Some(bin) = es.spread_bin {
                let e = spread_oo.entry((variant.to_string(), bin.0)).or_insert((0.0, 0usize));
                e.0 += es.weight(EndClass::OO);
                e.1 += 1;
            }
        }
        let f: Vec<f64> = w.iter().map(|x| x / n as f64).collect();
        freq.insert((variant.to_string(), p_sigma.to_string()), (f, n));
    }
    let show = |v: &str, s: f64| {
        let (f, n) = &freq[&(v.to_string(), s.to_string())];
        format!(
            "{v} P_sigma={s}: OO {:.2} OX {:.2} XO {:.2} XX {:.2} (n={n})",
            f[0], f[1], f[2], f[3]
        )
    };
    let oo = |v: &str, s: f64| freq[&(v.to_string(), s.to_string())].0[0];
    let oo_ok = [0.7, 0.1].iter().all(|&s| oo("spatial", s) > oo("classic", s));
    let uniform_ok = [0.7, 0.1]
        .iter()
        .all(|&s| freq[&("classic".to_string(), s.to_string())].0.iter().all(|&f| (f - 0.25).abs() <= 0.15));
    let weak_spatial = &freq[&("spatial".to_string(), 0.1.to_string())].0;
    let xx_min = weak_spatial[3] < weak_spatial[..3].iter().cloned().fold(f64::INFINITY, f64::min);
    report.line(
        "spatial OO exceeds classic OO",
        oo_ok,
        format!("{}; {}; {}; {}", show("classic", 0.7), show("spatial", 0.7), show("classic", 0.1), show("spatial", 0.1)),
    );
    report.line(
        "classic end states near uniform",
        uniform_ok,
        format!("{}; {}", show("classic", 0.7), show("classic", 0.1)),
    );
    report.line("spatial weak XX is the rarest class", xx_min, show("spatial", 0.1));

    // spread correlation, both cross-inhibition strengths pooled
    let share = |bin: u8| {
        spread_oo
            .get(&("spatial".to_string(), bin))
            .map_or((f64::NAN, 0), |&(w, n)| (w / n as f64, n))
    };
    let ((low, n_low), (high, n_high)) = (share(0), share(4));
    report.line(
        "spatial OO share falls with spread",
        n_low > 0 && n_high > 0 && low > high,
        format!("OO share {low:.2} in 0-10% (n={n_low}) vs {high:.2} in 40-50% (n={n_high})"),
    );

    // within vs between, over converged runs of the end-state batch
    let mut within = 0u64;
    let mut between = 0u64;
    let mut converged = 0usize;
    for (_, runs) in &cells {
        for r in runs.iter().filter(|r| r.outcome.is_converged()) {
            let t = whole_run_tally(r);
            within += t.within;
            between += t.between;
            converged += 1;
        }
    }
    let per = |x: u64| x as f64 / converged as f64;

    // exchanges over a fixed window, independent of when runs converge
    let window = |p_speak, p_sigma| RunConfig {
        p_speak,
        p_cross_inhibit: p_sigma,
        horizon_s: 2000.0,
        stop_on_convergence: false,
        ..RunConfig::default()
    };
    let exchanges = |rs: &[RunRecord]| rs.iter().map(|r| whole_run_tally(r).exchanges as f64).collect::<Vec<_>>();
    let slow = run_all(seeds(window(0.001, 0.7), 40));
    let fast = run_all(seeds(window(0.01, 0.7), 40));
    let (ex_slow, ex_fast) = (exchanges(&slow), exchanges(&fast));
    let p = welch_p(&ex_slow, &ex_fast);
    let locked_in = run_all(seeds(window(0.001, 0.0), 10));
    let ex_zero: f64 = exchanges(&locked_in).iter().sum();
    let inhibitions = locked_in
        .iter()
        .flat_map(|r| r.events.iter())
        .filter(|e| matches!(e.kind, EventKind::CrossInhibit { .. }))
        .count();
    report.line(
        "interaction tallies",
        within > between && p > 0.05 && ex_zero == 0.0,
        format!(
            "per converged run within {:.0} vs between {:.0} (n={converged}); exchanges per run {:.1} at P_s=0.001 vs {:.1} at P_s=0.01, Welch p={p:.2}; P_sigma=0: {ex_zero} exchanges, {inhibitions} cross-inhibitions",
            per(within),
            per(between),
            mean(&ex_slow),
            mean(&ex_fast)
        ),
    );
    pool.extend(slow);
    pool.extend(fast);
    pool.extend(locked_in);
    pool.extend(cells.into_iter().flat_map(|(_, r)| r));

    // neighbourhoods
    let locked = run_all(seeds(
        RunConfig {
            mode: Mode::LockedPopulations,
            locked_a: 25,
            horizon_s: 3000.0,
            ..RunConfig::default()
        },
        5,
    ));
    let walkers = run_all(seeds(
        RunConfig {
            mode: Mode::RandomWalkReference,
            horizon_s: 3000.0,
            ..RunConfig::default()
        },
        5,
    ));
    let mut lk = swarm_naming::metrics::NeighborhoodCounts::new();
    locked.iter().for_each(|r| lk.merge(&r.neighborhood));
    let mut rw = swarm_naming::metrics::NeighborhoodCounts::new();
    walkers.iter().for_each(|r| rw.merge(&r.neighborhood));
    let mean_whole = lk.mean(Scope::Whole);
    let identity = lk.total_links(Scope::Within) + lk.total_links(Scope::Between) == lk.total_links(Scope::Whole);
    let rw_mode = rw.mode(Scope::Whole);
    report.line(
        "neighbourhood statistics",
        (1.0..=3.0).contains(&mean_whole) && rw_mode == Some(0) && identity,
        format!(
            "locked mean whole {mean_whole:.2}, within {:.2}, between {:.2}, identity {identity}; random-walk mode {rw_mode:?}, mean {:.2}",
            lk.mean(Scope::Within),
            lk.mean(Scope::Between),
            rw.mean(Scope::Whole)
        ),
    );
    pool.extend(locked);
    pool.extend(walkers);

    // laws over every run above
    let mut bad_snapshots = 0usize;
    let mut bad_replays = 0usize;
    let mut game_violations = 0u64;
    let mut disjoint_violations = 0u64;
    let mut other_violations = 0u64;
    let mut games = 0u64;
    for r in &pool {
        let n = r.config.n_robots;
        bad_snapshots += r
            .snapshots
            .iter()
            .chain(std::iter::once(&r.final_population))
            .filter(|s| s.uncommitted + s.committed_a + s.committed_b != n)
            .count();
        let mut replay = Replay::new(n);
        r.events.iter().for_each(|e| replay.apply(e));
        let p = &r.final_population;
        bad_replays += usize::from(replay.counts() != (p.uncommitted, p.committed_a, p.committed_b));
        let audit = audit_log(&r.events, n, r.config.warmup_steps());
        games += audit.games;
        game_violations += audit.game_violations;
        disjoint_violations += audit.disjointness_violations;
        other_violations += audit.violations() - audit.game_violations - audit.disjointness_violations;
    }
    let snapshots: usize = pool.iter().map(|r| r.snapshots.len() + 1).sum();
    report.line(
        "conservation",
        bad_snapshots == 0 && bad_replays == 0,
        format!(
            "{snapshots} snapshots over {} runs, {bad_snapshots} bad; {bad_replays} final states disagree with the log replay",
            pool.len()
        ),
    );
    report.line(
        "naming game laws",
        game_violations == 0 && other_violations == 0,
        format!("{games} games audited, {game_violations} game violations, {other_violations} other log violations"),
    );
    report.line(
        "word-set disjointness",
        disjoint_violations == 0,
        format!("{disjoint_violations} violations"),
    );

    // determinism
    let probes = [
        RunConfig {
            seed: 42,
            variant: GameVariant::Spatial,
            horizon_s: 3000.0,
            ..RunConfig::default()
        },
        RunConfig {
            seed: 7,
            p_cross_inhibit: 0.1,
            horizon_s: 3000.0,
            ..RunConfig::default()
        },
    ];
    let twice = probes.iter().all(|c| {
        let a = simulate(c).unwrap().events.to_jsonl();
        let b = simulate(c).unwrap().events.to_jsonl();
        a == b
    });
    let tmp = tempfile::TempDir::new().expect("temp dir");
    let sweeps = vec![("p_cross_inhibit".to_string(), vec!["0.1".to_string(), "0.7".to_string()])];
    let (grid, specs) = expand(&probes[0], &[0, 1, 2, 3], &sweeps).unwrap();
    let serial = run_batch(&grid, &specs, &tmp.path().join("j1"), 1).unwrap();
    let parallel = run_batch(&grid, &specs, &tmp.path().join("j8"), 8).unwrap();
    let same_batches = serial.len() == 8
        && serial.iter().zip(&parallel).all(|(a, b)| {
            let read = |dir: &str, id: &str| std::fs::read(tmp.path().join(dir).join("runs").join(id).join("events.jsonl")).unwrap();
            a.log_sha256.is_some() && a.log_sha256 == b.log_sha256 && read("j1", &a.run_id) == read("j8", &b.run_id)
        });
    let digest_matches = {
        let rec = simulate(&specs[0].config).unwrap();
        serial[0].log_sha256.as_deref() == Some(log_digest(&rec.events).as_str())
    };
    report.line(
        "determinism",
        twice && same_batches && digest_matches,
        format!("repeat runs identical: {twice}; 8-run batch with 1 and 8 workers identical: {same_batches}; in-process digest matches: {digest_matches}"),
    );

    println!(
        "{} criteria failed; {:.0} s",
        report.failed,
        started.elapsed().as_secs_f64()
    );
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
