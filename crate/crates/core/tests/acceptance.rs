//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::Rng;
use tiermem::experiment::{run_experiment, to_csv, ExperimentConfig, Intervals, PolicySpec, RunOutput, WorkloadSpec};
use tiermem::policy::{update_threshold, PeriodStats, PolicyParams, PolicyState};
use tiermem::profilers::ProfilerKind;
use tiermem::sketch::{error_bound, Histogram, SketchDetector, SketchParams};
use tiermem::trace::streams;
use tiermem::workloads::{gen_zipf, GupsSpec, ZipfPhase, ZipfSpec};
use tiermem::{SimConfig, SimRng};

const SEEDS: u64 = 10;
const EVENTS_PER_EPOCH: u64 = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Everything the cross-run criteria (hot-filter soundness, quota, determinism) need.
#[derive(Default)]
struct Ledger {
    runs: u64,
    duplicate_reports: u64,
    quota_violations: u64,
    worst_epoch_migrations: u64,
    replays: Vec<(String, ExperimentConfig, String)>,
}

impl Ledger {
    fn record(&mut self, label: &str, cfg: &ExperimentConfig, out: &RunOutput) {
        self.runs += 1;
        self.duplicate_reports += out.summary.duplicate_hot_reports;
        let cap = quota_cap(cfg);
        for r in &out.epochs {
            let moved = r.promotions + r.demotions;
            self.worst_epoch_migrations = self.worst_epoch_migrations.max(moved);
            if moved > cap {
                self.quota_violations += 1;
            }
        }
        if cfg.seed() == 0 {
            self.replays.push((label.to_string(), cfg.clone(), to_csv(out)));
        }
    }
}

/// Quota per epoch computed independently: ceil(MB/s * 2^20 / 4096 * seconds).
fn quota_cap(cfg: &ExperimentConfig) -> u64 {
    let pages_per_s = cfg.policy_params.m_quota * 256.0;
    let exact = pages_per_s * cfg.intervals.migration_interval_ms / 1000.0;
    let rounded = exact.round();
    if (exact - rounded).abs() < 1e-9 {
        rounded as u64
    } else {
        exact.ceil() as u64
    }
}

fn exact_counts(pages: &[u64]) -> HashMap<u64, u64> {
    let mut m = HashMap::new();
    for &p in pages {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}

fn sketch(width: usize, depth: usize) -> SketchParams {
    SketchParams::with_shape(width, depth)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut violations = 0u64;
    let mut checked = 0u64;
    for seed in 0..100u64 {
        let mut rng = SimRng::seed_from(seed);
        let mut det = SketchDetector::new(sketch(1024, 2), 32, seed).unwrap();
        let pages: Vec<u64> = (0..100_000).map(|_| rng.gen_range(0..1000u64)).collect();
        for &p in &pages {
            det.observe(p, u32::MAX);
        }
        for (page, exact) in exact_counts(&pages) {
            checked += 1;
            if (det.estimate(page) as u64) < exact {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        violations == 0 && elapsed < Duration::from_secs(10),
        format!("{violations} underestimates over {checked} page checks, {:.2?}", elapsed),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let width = 1024usize;
    let epsilon = 2.0 / width as f64;
    let delta = 0.25;
    let n = 10 * width;
    let slack = epsilon * n as f64;
    let mut violating = 0u64;
    let mut pages_total = 0u64;
    let mut worst_stream = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = SimRng::seed_from(1000 + seed);
        let params = SketchParams { delta: Some(delta), epsilon: Some(epsilon), ..sketch(width, 2) };
        let mut det = SketchDetector::new(params, 32, seed).unwrap();
        let zipf = ZipfSpec { total_pages: 4096, exponent: 0.9, events: n as u64, ..ZipfSpec::default() };
        let pages: Vec<u64> = gen_zipf(&zipf, &mut rng).unwrap().into_iter().map(|e| e.page).collect();
        for &p in &pages {
            det.observe(p, u32::MAX);
        }
        let counts = exact_counts(&pages);
        let bad = counts.iter().filter(|(&p, &c)| det.estimate(p) as f64 > c as f64 + slack).count();
        worst_stream = worst_stream.max(bad as f64 / counts.len() as f64);
        violating += bad as u64;
        pages_total += counts.len() as u64;
    }
    let rate = violating as f64 / pages_total as f64;
    let elapsed = start.elapsed();
    Outcome::new(
        rate <= delta + 0.05 && elapsed < Duration::from_secs(30),
        format!(
            "violation rate {rate:.4} (worst stream {worst_stream:.4}) vs bound {:.2}, eps*N = {slack}, {:.2?}",
            delta + 0.05,
            elapsed
        ),
    )
}

/// Criterion 4; also feeds drained buffers into the duplicate ledger.
fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let width = 4096usize;
    let distinct = (width / 16) as u64;
    let theta = 50u32;
    let mut recall_sum = 0.0;
    let mut min_recall = 1.0f64;
    for seed in 0..100u64 {
        let mut rng = SimRng::seed_from(5000 + seed);
        let mut det = SketchDetector::new(sketch(width, 2), 32, seed).unwrap();
        // Page ids spread across the address space; per-page rates straddle θ.
        let ids: Vec<u64> = (0..distinct).map(|_| rng.gen_range(0..u32::MAX as u64)).collect();
        let weights: Vec<f64> = (0..distinct).map(|i| 1.0 / (1.0 + i as f64).powf(0.6)).collect();
        let total_w: f64 = weights.iter().sum();
        let mut pages = Vec::with_capacity(20_000);
        for _ in 0..20_000 {
            let mut u = rng.gen::<f64>() * total_w;
            let mut k = 0;
            while k + 1 < weights.len() && u >= weights[k] {
                u -= weights[k];
                k += 1;
            }
            pages.push(ids[k]);
        }
        for &p in &pages {
            det.observe(p, theta);
        }
        let drained = det.drain_hot_pages();
        let unique: HashSet<u64> = drained.iter().copied().collect();
        ledger.duplicate_reports += (drained.len() - unique.len()) as u64;
        let hot: Vec<u64> =
            exact_counts(&pages).into_iter().filter(|&(_, c)| c > theta as u64).map(|(p, _)| p).collect();
        let recall = if hot.is_empty() {
            1.0
        } else {
            hot.iter().filter(|p| unique.contains(p)).count() as f64 / hot.len() as f64
        };
        recall_sum += recall;
        min_recall = min_recall.min(recall);
    }
    let mean = recall_sum / 100.0;
    Outcome::new(
        mean >= 0.99,
        format!("mean recall {mean:.4}, min {min_recall:.4}, {distinct} distinct pages, W={width}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = SimRng::seed_from(77);
    let mut worst_gap_in_widths = 0.0f64;
    let mut failures = 0;
    let median_rank_ok = SketchParams { delta: Some(0.25), ..sketch(4096, 2) }.error_rank() == 2048;
    for case in 0..1000u64 {
        let width = [256usize, 1024, 4096][rng.gen_range(0..3)];
        let depth = rng.gen_range(1..=4);
        let delta = [0.05, 0.1, 0.25, 0.5][rng.gen_range(0..4)];
        let ceiling = [16u32, 64, 256, 4096][rng.gen_range(0..4)];
        let params = SketchParams { delta: Some(delta), hist_threshold_ceiling: ceiling, ..sketch(width, depth) };
        let mut det = SketchDetector::new(params.clone(), 32, case).unwrap();
        let universe = rng.gen_range(10..4 * width as u64);
        let events = rng.gen_range(0..40 * width);
        for _ in 0..events {
            det.observe(rng.gen_range(0..universe), u32::MAX);
        }
        let hist = det.compute_histogram();
        let e = error_bound(&hist, &params);
        let mut lane: Vec<u64> = det.lane_values(0).into_iter().map(u64::from).collect();
        lane.sort_unstable_by(|a, b| b.cmp(a));
        let rank = ((width as f64) * delta.powf(1.0 / depth as f64) - 1e-9).ceil() as usize;
        let exact = lane[rank.clamp(1, width) - 1];
        let bin = hist.bin_of(e);
        let (lo, hi) = (hist.lower_edge(bin), hist.upper_edge(bin));
        let width_here = (hi - lo) as f64;
        let gap = exact as f64 - e as f64;
        worst_gap_in_widths = worst_gap_in_widths.max(gap.abs() / width_here);
        if lo != e || exact < lo || exact >= hi {
            failures += 1;
        }
    }
    Outcome::new(
        failures == 0 && median_rank_ok,
        format!(
            "{failures} of 1000 states with the exact value outside [e, e + bin width) (worst {worst_gap_in_widths:.3} widths); D=2, delta=0.25 rank is median: {median_rank_ok}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let spec = ZipfSpec { total_pages: 100_000, exponent: 0.8, events: 1_000_000, ..ZipfSpec::default() };
    let pages: Vec<u64> =
        gen_zipf(&spec, &mut SimRng::stream(6, streams::WORKLOAD)).unwrap().into_iter().map(|e| e.page).collect();
    let distinct = exact_counts(&pages).len();
    let mut bounds = Vec::new();
    for width in [32 << 10, 64 << 10, 128 << 10, 256 << 10, 512 << 10] {
        let params = sketch(width, 2);
        let mut det = SketchDetector::new(params.clone(), 32, 6).unwrap();
        for &p in &pages {
            det.observe(p, u32::MAX);
        }
        bounds.push((width, det.error_bound()));
    }
    let nonincreasing = bounds.windows(2).all(|w| w[1].1 <= w[0].1);
    let last_zero = bounds.last().unwrap().1 == 0;
    let elapsed = start.elapsed();
    let shown: Vec<String> = bounds.iter().map(|(w, e)| format!("{}K:{e}", w >> 10)).collect();
    Outcome::new(
        nonincreasing && last_zero && distinct <= 100_000 && elapsed < Duration::from_secs(60),
        format!("e by W [{}], {distinct} distinct pages, N=10^6, {:.2?}", shown.join(" "), elapsed),
    )
}

/// Independent statement of the threshold update used as the oracle.
#[allow(clippy::too_many_arguments)]
fn oracle_update(
    p: f64,
    hist: &Histogram,
    b: f64,
    pp: f64,
    e: u64,
    m: u64,
    quota: u64,
    prm: &PolicyParams,
) -> (f64, u64) {
    let q = |x: f64| {
        let total: u64 = hist.counts().iter().sum();
        let mut acc = 0u64;
        for (i, c) in hist.counts().iter().enumerate() {
            acc += c;
            if acc as f64 >= x * total as f64 {
                return hist.upper_edges()[i];
            }
        }
        *hist.upper_edges().last().unwrap()
    };
    let mut p = if m < quota {
        (p * (1.0 + b).powf(prm.alpha) / (1.0 + pp).powf(prm.beta)).max(prm.p_min).min(prm.p_max)
    } else {
        (p / 2.0).max(prm.p_min)
    };
    if q(1.0 - p) < e {
        p = (p / 2.0).max(prm.p_min);
    }
    (p, q(1.0 - p).max(1))
}

fn criterion_7() -> Outcome {
    let params = PolicyParams::default();
    let layout = SketchParams { hist_threshold_ceiling: 256, ..sketch(1024, 2) }.empty_histogram();
    let mut rng = SimRng::seed_from(7);
    let values: Vec<u64> = (0..1024).map(|_| rng.gen_range(0..600)).collect();
    let hist = Histogram::from_values(&layout, values);
    let quota = 656;
    let step = |p: f64, b: f64, pp: f64, m: u64| {
        let mut st = PolicyState { p, ..PolicyState::new(&params, quota) };
        let stats = PeriodStats { histogram: Some(&hist), bandwidth: b, pingpong: pp, error_bound: 0, migrated: m };
        update_threshold(&mut st, &stats, &params);
        st.p
    };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
    let identity = close(step(0.001, 0.0, 0.0, 0), 0.001);
    let halving = close(step(0.001, 0.0, 0.0, quota), 0.0005);
    let doubling = close(step(0.001, 1.0, 0.0, 0), 0.002);

    let mut mismatches = 0;
    let mut out_of_range = 0;
    for _ in 0..10_000 {
        let p0 = rng.gen_range(params.p_min..=params.p_max);
        let b = rng.gen_range(0.0..=1.0);
        let pp = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..3.0) };
        let e = rng.gen_range(0..700);
        let m = rng.gen_range(0..2 * quota);
        let scale = rng.gen_range(1..2000u64);
        let values: Vec<u64> = (0..1024).map(|_| rng.gen_range(0..scale)).collect();
        let h = Histogram::from_values(&layout, values);
        let mut st = PolicyState { p: p0, ..PolicyState::new(&params, quota) };
        let stats = PeriodStats { histogram: Some(&h), bandwidth: b, pingpong: pp, error_bound: e, migrated: m };
        let theta = update_threshold(&mut st, &stats, &params);
        let (p_ref, theta_ref) = oracle_update(p0, &h, b, pp, e, m, quota, &params);
        if !close(st.p, p_ref) || theta as u64 != theta_ref {
            mismatches += 1;
        }
        if st.p < params.p_min || st.p > params.p_max || theta < 1 {
            out_of_range += 1;
        }
    }
    Outcome::new(
        identity && halving && doubling && mismatches == 0 && out_of_range == 0,
        format!(
            "identity {identity}, quota halving {halving}, B=1 doubling {doubling}; random: {mismatches} oracle mismatches, {out_of_range} out of [p_min, p_max]"
        ),
    )
}

/// Sketch shaped for the desk-scale footprints used below.
fn desk_sketch() -> SketchParams {
    SketchParams { hist_threshold_ceiling: 256, ..SketchParams::with_shape(64 << 10, 2) }
}

fn desk_config(seed: u64, total_pages: u64, fast_pages: u64, workload: WorkloadSpec) -> ExperimentConfig {
    ExperimentConfig {
        sim: SimConfig { fast_pages, slow_pages: total_pages, rng_seed: seed, ..SimConfig::default() },
        sketch: desk_sketch(),
        intervals: Intervals { cycles_per_ns: EVENTS_PER_EPOCH as f64 / 1e7, ..Intervals::default() },
        workload,
        ..ExperimentConfig::default()
    }
}

fn run_all(jobs: Vec<(String, ExperimentConfig)>, ledger: &mut Ledger) -> Vec<(String, ExperimentConfig, RunOutput)> {
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(label, cfg)| {
                scope.spawn(move || {
                    let out = run_experiment(&cfg).expect("acceptance run");
                    (label, cfg, out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (label, cfg, out) in &results {
        ledger.record(label, cfg, out);
    }
    results
}

const GUPS_PAGES: u64 = 8192;
const SHIFT_EPOCH: u64 = 750;
const POST_SHIFT_EPOCHS: u64 = 2000;

/// Epochs after the shift until the fast-tier hit fraction first reaches 90%
/// of its post-shift steady state (mean of the last fifth of epochs).
fn convergence_epochs(out: &RunOutput) -> (usize, f64) {
    let post = &out.epochs[SHIFT_EPOCH as usize..];
    let tail = &post[post.len() * 4 / 5..];
    let steady = tail.iter().map(|r| r.fast_fraction()).sum::<f64>() / tail.len() as f64;
    let at = post.iter().position(|r| r.fast_fraction() >= 0.9 * steady).unwrap_or(post.len());
    (at, steady)
}

fn criterion_8(ledger: &mut Ledger) -> Outcome {
    let start = Instant::now();
    let kinds = [ProfilerKind::Neoprof, ProfilerKind::PteScan, ProfilerKind::PmuSample];
    let mut jobs = Vec::new();
    for seed in 0..SEEDS {
        for kind in kinds {
            let hot = (GUPS_PAGES as f64 * 0.1).round() as u64;
            let shift = SHIFT_EPOCH * EVENTS_PER_EPOCH;
            let workload = WorkloadSpec::Gups(GupsSpec {
                total_pages: GUPS_PAGES,
                hot_fraction: 0.1,
                hot_access_prob: 0.9,
                shift_at: Some(shift),
                events: shift + POST_SHIFT_EPOCHS * EVENTS_PER_EPOCH,
                ..GupsSpec::default()
            });
            let mut cfg = desk_config(seed, GUPS_PAGES, 2 * hot, workload);
            cfg.profiler = kind;
            jobs.push((format!("convergence/{kind}"), cfg));
        }
    }
    let results = run_all(jobs, ledger);
    let mut table: BTreeMap<u64, HashMap<ProfilerKind, (usize, f64)>> = BTreeMap::new();
    for (_, cfg, out) in &results {
        table.entry(cfg.seed()).or_default().insert(cfg.profiler, convergence_epochs(out));
    }
    let mut wins = 0;
    let mut rows = Vec::new();
    for (seed, row) in &table {
        let n = row[&ProfilerKind::Neoprof].0;
        let pte = row[&ProfilerKind::PteScan].0;
        let pmu = row[&ProfilerKind::PmuSample].0;
        if n < pte && n < pmu {
            wins += 1;
        }
        rows.push(format!("s{seed}:{n}/{pte}/{pmu}"));
    }
    let elapsed = start.elapsed();
    Outcome::new(
        wins >= 8 && elapsed < Duration::from_secs(300),
        format!(
            "neoprof faster in {wins}/{SEEDS} seeds; epochs neoprof/pte-scan/pmu {}; {:.2?}",
            rows.join(" "),
            elapsed
        ),
    )
}

fn criterion_9(ledger: &mut Ledger) -> Outcome {
    let policies = ["dynamic", "fixed:100", "fixed:200", "fixed:300", "fixed:400"];
    let total = 16_384;
    let events = 2_000_000;
    let mut jobs = Vec::new();
    for seed in 0..SEEDS {
        for policy in policies {
            let workload = WorkloadSpec::Zipf(ZipfSpec {
                total_pages: total,
                exponent: 0.8,
                events,
                phase_shifts: vec![ZipfPhase { at_cycle: events / 2, perm_seed: 1000 + seed, exponent: Some(1.2) }],
                ..ZipfSpec::default()
            });
            let mut cfg = desk_config(seed, total, total / 4, workload);
            cfg.policy = policy.parse().unwrap();
            jobs.push((format!("threshold/{policy}"), cfg));
        }
    }
    let results = run_all(jobs, ledger);
    let mut by_seed: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for (_, cfg, out) in &results {
        let entry = by_seed.entry(cfg.seed()).or_insert((0.0, f64::INFINITY));
        match cfg.policy {
            PolicySpec::Dynamic => entry.0 = out.summary.total_latency_ns,
            _ => entry.1 = entry.1.min(out.summary.total_latency_ns),
        }
    }
    let ratios: Vec<f64> = by_seed.values().map(|(d, f)| d / f).collect();
    let ok = ratios.iter().filter(|&&r| r <= 1.05).count();
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Outcome::new(
        ok >= 8,
        format!("dynamic / best fixed latency within 1.05 in {ok}/{SEEDS} seeds: [{}]", shown.join(" ")),
    )
}

fn criterion_10(ledger: &mut Ledger) -> Outcome {
    let mut jobs = Vec::new();
    let gups_hot = (GUPS_PAGES as f64 * 0.1).round() as u64;
    for seed in 0..SEEDS {
        let workloads = [
            (
                "gups",
                GUPS_PAGES,
                2 * gups_hot,
                WorkloadSpec::Gups(GupsSpec {
                    total_pages: GUPS_PAGES,
                    events: 2_000_000,
                    init_pass: true,
                    ..GupsSpec::default()
                }),
            ),
            (
                "zipf",
                16_384,
                4096,
                WorkloadSpec::Zipf(ZipfSpec {
                    total_pages: 16_384,
                    exponent: 1.2,
                    events: 2_000_000,
                    ..ZipfSpec::default()
                }),
            ),
        ];
        for (name, total, fast, workload) in workloads {
            for kind in ProfilerKind::ALL {
                let mut cfg = desk_config(seed, total, fast, workload.clone());
                cfg.profiler = kind;
                jobs.push((format!("{name}/{kind}"), cfg));
            }
            let mut cfg = desk_config(seed, total, fast, workload);
            cfg.policy = PolicySpec::None;
            jobs.push((format!("{name}/first-touch"), cfg));
        }
    }
    let results = run_all(jobs, ledger);
    let mut grouped: BTreeMap<(String, u64), Vec<(String, f64)>> = BTreeMap::new();
    for (label, cfg, out) in &results {
        let (workload, who) = label.split_once('/').unwrap();
        grouped
            .entry((workload.to_string(), cfg.seed()))
            .or_default()
            .push((who.to_string(), out.summary.slow_fraction));
    }
    let mut wins: BTreeMap<String, usize> = BTreeMap::new();
    let mut margins: BTreeMap<String, f64> = BTreeMap::new();
    let mut losses: Vec<String> = Vec::new();
    for ((workload, seed), entries) in &grouped {
        let neo = entries.iter().find(|(w, _)| w == "neoprof").unwrap().1;
        let (rival, best_other) = entries
            .iter()
            .filter(|(w, _)| w != "neoprof")
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(w, f)| (w.as_str(), *f))
            .unwrap();
        if neo < best_other {
            *wins.entry(workload.clone()).or_default() += 1;
        } else {
            losses.push(format!("{workload} s{seed} to {rival}"));
        }
        let m = margins.entry(workload.clone()).or_insert(f64::INFINITY);
        *m = m.min(best_other - neo);
    }
    let pass = ["gups", "zipf"].iter().all(|w| wins.get(*w).copied().unwrap_or(0) >= 8);
    let detail: Vec<String> = ["gups", "zipf"]
        .iter()
        .map(|w| {
            format!("{w}: lowest in {}/{SEEDS} (min margin {:.4})", wins.get(*w).copied().unwrap_or(0), margins[*w])
        })
        .collect();
    Outcome::new(pass, format!("{}; lost: {:?}", detail.join("; "), losses))
}

fn criterion_11(ledger: &Ledger) -> Outcome {
    Outcome::new(
        ledger.quota_violations == 0 && ledger.runs > 0,
        format!(
            "{} over-quota epochs in {} runs; busiest epoch moved {} pages, cap {}",
            ledger.quota_violations,
            ledger.runs,
            ledger.worst_epoch_migrations,
            quota_cap(&ExperimentConfig::default())
        ),
    )
}

fn criterion_12(ledger: &Ledger) -> Outcome {
    let replays: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = ledger
            .replays
            .iter()
            .map(|(label, cfg, csv)| scope.spawn(move || (label, to_csv(&run_experiment(cfg).unwrap()) == *csv)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mismatched: Vec<&String> = replays.iter().filter(|(_, same)| !same).map(|(l, _)| *l).collect();
    Outcome::new(
        mismatched.is_empty() && !replays.is_empty(),
        format!("{} configurations replayed, mismatches: {:?}", replays.len(), mismatched),
    )
}

fn main() {
    let mut ledger = Ledger::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |id: u32, name: &'static str, outcome: Outcome| {
        println!("[{}] criterion {id:>2} {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        results.push((id, name, outcome));
    };
    report(1, "sketch one-sided error", criterion_1());
    report(2, "sketch probabilistic bound", criterion_2());
    let c4 = criterion_4(&mut ledger);
    report(4, "detector recall at low load", c4);
    report(5, "error-bound estimator", criterion_5());
    report(6, "error bound vs sketch width", criterion_6());
    report(7, "threshold update rule", criterion_7());
    let c8 = criterion_8(&mut ledger);
    report(8, "convergence after hot-set shift", c8);
    let c9 = criterion_9(&mut ledger);
    report(9, "dynamic vs fixed threshold", c9);
    let c10 = criterion_10(&mut ledger);
    report(10, "slow-tier traffic ordering", c10);
    let c3 = Outcome::new(
        ledger.duplicate_reports == 0,
        format!(
            "{} duplicate hot-page reports across {} runs and 100 drained sketches",
            ledger.duplicate_reports, ledger.runs
        ),
    );
    report(3, "hot-filter soundness", c3);
    report(11, "quota enforcement", criterion_11(&ledger));
    report(12, "determinism", criterion_12(&ledger));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {}/{} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
