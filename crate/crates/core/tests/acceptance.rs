//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Correctness criteria (metrics, SEI machine, recommender oracles, decay,
//! determinism) fail the test binary. The qualitative reproduction criteria
//! (ordering, MRD signs, user-knn proximity) are reported but only fail the
//! binary with `ACCEPTANCE_STRICT=1`.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use common::*;
use misinfo_abm::content::{ContentCatalog, EngagementModel};
use misinfo_abm::domain::{
    AgentId, AgentKind, Algorithm, ContentId, ContentItem, EpidemicState, RandomSource,
    SimulationConfig,
};
use misinfo_abm::expcli::{run_batch, simulate_batch, BatchPlan, RunResult};
use misinfo_abm::metrics::{mc, mrd, msp};
use misinfo_abm::recsys::{
    build_recommender, recommend_content_based, recommend_item_knn, recommend_user_knn,
    user_knn_scores, InteractionMatrix, ItemSimilarityIndex, RecContext,
};
use misinfo_abm::{RunSummary, StepMetricsRow};
use rand::Rng;
use sha2::{Digest, Sha256};

const SCORE_TOL: f64 = 1e-9;
const METRIC_TOL: f64 = 1e-9;
const DECAY_TOL: f64 = 1e-9;
const SEI_TRACES: usize = 10_000;
const ORACLE_CASES: usize = 100;
const REPRO_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const REPRO_REQUIRED: usize = 4;
const SPIKE_LEVEL: f64 = 0.05;
const SPIKE_STEPS: usize = 5;
const PROXIMITY_MC: f64 = 0.15;
const PROXIMITY_MSP: f64 = 2.0;

type Check = Result<String, String>;

struct Report {
    lines: Vec<(bool, bool, &'static str, String)>,
}

impl Report {
    fn record(&mut self, hard: bool, name: &'static str, outcome: Check) {
        let (ok, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((ok, hard, name, detail));
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what}: got {got}, want {want}"))
}

fn fixed_catalog(total: usize, fake: usize) -> ContentCatalog {
    let mut c = ContentCatalog::new(EngagementModel::default());
    for id in 0..total {
        c.push(ContentItem::new(id as ContentId, id < fake, vec![1.0], 0, None)).unwrap();
    }
    c
}

fn metric_examples() -> Result<(), String> {
    let population = |infected: usize| {
        (0..200)
            .map(|i| {
                let mut a = agent(i as AgentId, AgentKind::Regular, vec![1.0]);
                if i < infected {
                    a.state = EpidemicState::Infected;
                    a.infected_since = Some(0);
                }
                a
            })
            .collect::<Vec<_>>()
    };
    close(msp(&population(0)).unwrap(), 0.0, METRIC_TOL, "msp 0/200")?;
    close(msp(&population(20)).unwrap(), 10.0, METRIC_TOL, "msp 20/200")?;
    close(msp(&population(200)).unwrap(), 100.0, METRIC_TOL, "msp 200/200")?;

    let c = fixed_catalog(100, 10);
    let over: Vec<ContentId> = vec![0, 1, 20, 21, 22, 23, 24, 25, 26, 27];
    close(mrd(&over, &c), 0.10, METRIC_TOL, "mrd over")?;
    let under: Vec<ContentId> = (20..30).collect();
    close(mrd(&under, &c), -0.10, METRIC_TOL, "mrd under")?;
    close(mrd(&[], &c), 0.0, METRIC_TOL, "mrd empty")?;

    let mixed = vec![(0, vec![0, 1, 50]), (1, vec![50, 51]), (2, vec![2, 60, 61])];
    close(mc(&mixed, &c), 1.0, METRIC_TOL, "mc mixed")?;
    close(mc(&[(0, (20..30).collect())], &c), 0.0, METRIC_TOL, "mc clean")?;
    Ok(())
}

fn conservation(runs: &[&RunResult]) -> Result<usize, String> {
    let mut rows = 0;
    for run in runs {
        for r in &run.rows {
            ensure(r.population() == 200, || format!("{} step {}: S+E+I = {}", run.spec.run_id(), r.step, r.population()))?;
            rows += 1;
        }
    }
    Ok(rows)
}

fn sei_soundness() -> Check {
    let mut rng = RandomSource::from_seed(0x5E1);
    for trace in 0..SEI_TRACES {
        let len = rng.random_range(1..=300);
        let inputs = random_sei_inputs(&mut rng, len);
        check_sei_trace(&inputs, 40).map_err(|e| format!("trace {trace}: {e}"))?;
    }
    let mut cfg = SimulationConfig {
        misinfo_pct: 0.0,
        rng_seed: 99,
        ..SimulationConfig::default()
    };
    for kind in AgentKind::ALL {
        cfg.kind_params_mut(kind).post_misinfo_prob = 0.0;
    }
    for algorithm in Algorithm::ALL {
        let (_, rows) = misinfo_abm::run(SimulationConfig { algorithm, ..cfg.clone() }).map_err(|e| e.to_string())?;
        ensure(rows.len() == 600, || format!("{algorithm}: {} rows", rows.len()))?;
        if let Some(r) = rows.iter().find(|r| r.n_exposed + r.n_infected > 0) {
            return Err(format!("misinfo-free {algorithm}: E/I at step {}", r.step));
        }
    }
    Ok(format!("{SEI_TRACES} traces legal; misinfo-free runs stay S for 600 steps x 5 algorithms"))
}

fn scores_match(got: &[(ContentId, f64)], want: &[(usize, f64)]) -> bool {
    got.len() == want.len()
        && got.iter().zip(want).all(|(&(gi, gs), &(wi, ws))| gi as usize == wi && (gs - ws).abs() <= SCORE_TOL)
}

fn oracle_equivalence() -> Check {
    const N: usize = 10;
    let mut rng = RandomSource::from_seed(0x0AC1E);
    for case in 0..ORACLE_CASES {
        let dense = Dense::random(&mut rng, 10, 12);
        let matrix = dense.to_sparse();
        let catalog = catalog(&mut rng, dense.items, 4);
        let k = rng.random_range(1..=6);
        let index = ItemSimilarityIndex::build(&matrix, k);
        for u in 0..dense.users() {
            let id = u as AgentId;
            let eligible = |i: usize| !dense.cells[u][i] && catalog.item(i as ContentId).author != Some(id);
            let want = oracle_user_knn_scores(&dense, u, k);
            ensure(scores_match(&user_knn_scores(id, &matrix, k), &want), || format!("user-knn scores, case {case} user {u}"))?;
            ensure(recommend_user_knn(id, &matrix, &catalog, k, N) == oracle_rank(&want, eligible, N), || {
                format!("user-knn ranking, case {case} user {u}")
            })?;
            let want = oracle_item_knn_scores(&dense, u, k);
            ensure(scores_match(&index.scores(id, &matrix), &want), || format!("item-knn scores, case {case} user {u}"))?;
            ensure(recommend_item_knn(id, &index, &matrix, &catalog, N) == oracle_rank(&want, eligible, N), || {
                format!("item-knn ranking, case {case} user {u}")
            })?;
        }
    }

    let config = SimulationConfig::default();
    for case in 0..ORACLE_CASES {
        let dim = rng.random_range(1..=6);
        let n_items = rng.random_range(1..=20);
        let agents = agents(&mut rng, 3, dim);
        let catalog = catalog(&mut rng, n_items, dim);
        let engaged: Vec<(AgentId, ContentId)> = (0..n_items as ContentId)
            .filter(|_| rng.random::<f64>() < 0.2)
            .map(|i| (2, i))
            .collect();
        let matrix = InteractionMatrix::from_pairs(3, &engaged);
        let ctx = RecContext::new(1, &agents, &catalog, &matrix, &config);
        let mut cached = build_recommender(Algorithm::ContentBased);
        cached.prepare(&ctx);
        for a in &agents {
            let scores: Vec<(usize, f64)> = catalog
                .items()
                .iter()
                .map(|it| (it.id as usize, cosine(&a.preference, &it.topic)))
                .collect();
            let eligible = |i: usize| !matrix.contains(a.id, i as ContentId) && catalog.item(i as ContentId).author != Some(a.id);
            let want = oracle_rank(&scores, eligible, N);
            let mut r = RandomSource::from_seed(0);
            ensure(recommend_content_based(&ctx, a.id, N) == want && cached.recommend(&ctx, a.id, N, &mut r) == want, || {
                format!("content-based ranking, case {case} agent {}", a.id)
            })?;
        }
    }
    Ok(format!("{ORACLE_CASES} matrices (user-knn, item-knn) and {ORACLE_CASES} catalogs (content-based) match"))
}

fn decay_exactness() -> Check {
    let mut worst: f64 = 0.0;
    for (fake, initial) in [(false, 1.0), (true, 1.5)] {
        for created in [0u32, 7, 250] {
            let mut c = ContentCatalog::new(EngagementModel::default());
            c.push(ContentItem::new(0, fake, vec![1.0], created, None)).unwrap();
            for age in 0..=100u32 {
                let e = c.engagement(0, created + age).unwrap();
                let err = (e - initial * (-0.1 * age as f64).exp()).abs();
                worst = worst.max(err);
                ensure(err <= DECAY_TOL, || format!("closed form off by {err:e} at age {age}"))?;
                let ratio = c.engagement(0, created + age + 1).unwrap() / e;
                let err = (ratio - (-0.1f64).exp()).abs();
                ensure(err <= DECAY_TOL, || format!("ratio off by {err:e} at age {age}"))?;
            }
        }
    }
    Ok(format!("ages 0..=100, max closed-form error {worst:.1e}"))
}

fn digest_tree(dir: &Path) -> Result<String, String> {
    let mut names: Vec<_> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.path()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    names.sort();
    let mut h = Sha256::new();
    for p in names {
        h.update(p.file_name().unwrap().as_encoded_bytes());
        h.update(fs::read(&p).map_err(|e| e.to_string())?);
    }
    Ok(format!("{:x}", h.finalize()))
}

fn by_algorithm(aggregates: &[RunSummary]) -> BTreeMap<Algorithm, &RunSummary> {
    aggregates.iter().map(|s| (s.algorithm, s)).collect()
}

/// Ordering check for one base seed; `Err` carries the observed MSP order.
fn ordering_holds(aggregates: &[RunSummary]) -> Result<(), String> {
    use Algorithm::*;
    let a = by_algorithm(aggregates);
    let msp = |x: Algorithm| a[&x].mean_msp;
    let mc = |x: Algorithm| a[&x].mean_mc;
    let middle_hi = msp(Random).max(msp(UserKnn));
    let middle_lo = msp(Random).min(msp(UserKnn));
    let bottom_hi = msp(ItemKnn).max(msp(ContentBased));
    let ok = msp(Popularity) > middle_hi
        && middle_lo > bottom_hi
        && Algorithm::ALL.iter().all(|&x| x == Popularity || mc(Popularity) > mc(x));
    let mut order: Vec<&RunSummary> = aggregates.iter().collect();
    order.sort_by(|x, y| y.mean_msp.total_cmp(&x.mean_msp));
    let desc = order
        .iter()
        .map(|s| format!("{}={:.1}", s.algorithm, s.mean_msp))
        .collect::<Vec<_>>()
        .join(" > ");
    let top_mc = order.iter().max_by(|x, y| x.mean_mc.total_cmp(&y.mean_mc)).unwrap().algorithm;
    if ok {
        Ok(())
    } else {
        Err(format!("msp {desc}; top mc {top_mc}"))
    }
}

fn mrd_holds(aggregates: &[RunSummary], runs: &[RunResult]) -> Result<(), String> {
    use Algorithm::*;
    let a = by_algorithm(aggregates);
    let mrd = |x: Algorithm| a[&x].mean_mrd;
    let spikes: Vec<usize> = runs
        .iter()
        .filter(|r| r.spec.algorithm == Popularity)
        .map(|r| r.rows.iter().filter(|row: &&StepMetricsRow| row.mrd > SPIKE_LEVEL).count())
        .collect();
    let ok = mrd(Popularity) > 0.0
        && mrd(ItemKnn) < 0.0
        && mrd(ContentBased) < 0.0
        && spikes.iter().all(|&s| s >= SPIKE_STEPS);
    let detail = format!(
        "mrd popularity {:+.4}, item_knn {:+.4}, content_based {:+.4}; spike steps {spikes:?}",
        mrd(Popularity),
        mrd(ItemKnn),
        mrd(ContentBased)
    );
    if ok {
        Ok(())
    } else {
        Err(detail)
    }
}

fn tally(name: &str, outcomes: &[(u64, Result<(), String>)]) -> Check {
    let passed = outcomes.iter().filter(|(_, o)| o.is_ok()).count();
    let failures: Vec<String> = outcomes
        .iter()
        .filter_map(|(seed, o)| o.as_ref().err().map(|e| format!("seed {seed}: {e}")))
        .collect();
    let head = format!("{passed}/{} base seeds (need {REPRO_REQUIRED})", outcomes.len());
    if passed >= REPRO_REQUIRED {
        Ok(head)
    } else {
        println!("  {name} per-seed detail:");
        for f in &failures {
            println!("    {f}");
        }
        Err(head)
    }
}

fn proximity(aggregates: &[RunSummary]) -> Check {
    let a = by_algorithm(aggregates);
    let (u, r) = (a[&Algorithm::UserKnn], a[&Algorithm::Random]);
    let d_mc = (u.mean_mc - r.mean_mc).abs();
    let d_msp = (u.mean_msp - r.mean_msp).abs();
    let detail = format!("|dMC| = {d_mc:.3} (<= {PROXIMITY_MC}), |dMSP| = {d_msp:.2} pp (<= {PROXIMITY_MSP})");
    if d_mc <= PROXIMITY_MC && d_msp <= PROXIMITY_MSP {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut report = Report { lines: Vec::new() };
    let started = Instant::now();

    report.record(true, "sei_soundness", sei_soundness());
    report.record(true, "oracle_equivalence", oracle_equivalence());
    report.record(true, "decay_exactness", decay_exactness());

    // Default plan (base seed 0) through the writer, twice at 8 jobs and once at 1.
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut default_report = None;
    let mut digests = Vec::new();
    let mut batch_secs = 0.0;
    for (label, jobs) in [("a", 8), ("b", 8), ("c", 1)] {
        let plan = BatchPlan {
            out_dir: tmp.path().join(label),
            jobs,
            ..BatchPlan::default()
        };
        let t = Instant::now();
        match run_batch(&plan) {
            Ok(r) => {
                batch_secs = t.elapsed().as_secs_f64();
                digests.push(digest_tree(&plan.out_dir));
                default_report.get_or_insert(r);
            }
            Err(e) => digests.push(Err(e.to_string())),
        }
    }
    let determinism = match digests.as_slice() {
        [Ok(a), Ok(b), Ok(c)] if a == b && b == c => Ok(format!("26 files identical across runs and --jobs 1/8 (sha256 {})", &a[..16])),
        other => Err(format!("digests differ or failed: {other:?}")),
    };
    report.record(true, "determinism", determinism);

    let mut repro = Vec::new();
    for seed in REPRO_SEEDS {
        let plan = BatchPlan {
            base_seed: seed,
            ..BatchPlan::default()
        };
        repro.push((seed, simulate_batch(&plan).expect("default plan runs")));
    }

    let mut all_runs: Vec<&RunResult> = repro.iter().flat_map(|(_, (runs, _))| runs).collect();
    if let Some(r) = &default_report {
        all_runs.extend(&r.runs);
    }
    let exact = metric_examples().and_then(|_| conservation(&all_runs));
    report.record(
        true,
        "metric_exactness",
        exact.map(|rows| format!("hand examples within {METRIC_TOL:e}; S+E+I = 200 on {rows} rows of {} runs", all_runs.len())),
    );

    let ordering: Vec<_> = repro.iter().map(|(s, (_, agg))| (*s, ordering_holds(agg))).collect();
    report.record(false, "algorithm_ordering", tally("algorithm_ordering", &ordering));
    let signs: Vec<_> = repro.iter().map(|(s, (runs, agg))| (*s, mrd_holds(agg, runs))).collect();
    report.record(false, "mrd_sign_structure", tally("mrd_sign_structure", &signs));
    report.record(
        false,
        "user_knn_baseline_proximity",
        default_report
            .as_ref()
            .map_or_else(|| Err("default batch failed".into()), |r| proximity(&r.aggregates)),
    );

    let failed: Vec<&(bool, bool, &str, String)> = report.lines.iter().filter(|l| !l.0).collect();
    let hard_failed = failed.iter().filter(|l| l.1).count();
    println!(
        "acceptance: {}/{} criteria pass ({} correctness failures); default 25-run batch {batch_secs:.1}s, total {:.1}s",
        report.lines.len() - failed.len(),
        report.lines.len(),
        hard_failed,
        started.elapsed().as_secs_f64()
    );
    if hard_failed > 0 || (strict && !failed.is_empty()) {
        std::process::exit(1);
    }
}
