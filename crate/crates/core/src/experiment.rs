//! Experiment harness: configuration, the profile/classify/migrate loop,
//! per-epoch reports, parameter sweeps and CSV/JSON output.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::monitor::StateMonitor;
use crate::policy::{fixed_threshold_policy, DynamicPolicy, PeriodStats, PolicyParams, ThresholdPolicy};
use crate::profilers::{
    BaselineParams, CollectContext, HintFault, Neoprof, PmuSample, Profiler, ProfilerKind, PteScan,
};
use crate::sketch::SketchParams;
use crate::tiersim::{LatencyModel, MigrationQuota, PageMap, Tier, TierState};
use crate::trace::{read_trace, streams, AccessEvent, SimConfig, SimRng, RNG_NAME};
use crate::workloads::{gen_gups, gen_zipf, GupsSpec, ZipfSpec};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Threshold policy selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    Dynamic,
    Fixed(u32),
    /// First-touch placement with no profiling and no migration.
    None,
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Dynamic => f.write_str("dynamic"),
            PolicySpec::Fixed(t) => write!(f, "fixed:{t}"),
            PolicySpec::None => f.write_str("none"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamic" => Ok(PolicySpec::Dynamic),
            "none" | "first-touch" => Ok(PolicySpec::None),
            _ => {
                let theta =
                    s.strip_prefix("fixed:").and_then(|t| t.parse::<u32>().ok()).filter(|&t| t > 0).ok_or_else(
                        || Error::Config(format!("unknown policy `{s}`; expected dynamic, fixed:<θ> or none")),
                    )?;
                Ok(PolicySpec::Fixed(theta))
            }
        }
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(p: PolicySpec) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Intervals {
    pub migration_interval_ms: f64,
    pub clear_interval_ms: f64,
    /// Simulated cycles per nanosecond; scales every interval to trace cycles.
    pub cycles_per_ns: f64,
}

impl Default for Intervals {
    fn default() -> Self {
        Intervals { migration_interval_ms: 10.0, clear_interval_ms: 5000.0, cycles_per_ns: 1.0 }
    }
}

impl Intervals {
    pub fn ms_to_cycles(&self, ms: f64) -> u64 {
        ((ms * 1e6 * self.cycles_per_ns).round() as u64).max(1)
    }

    pub fn epoch_cycles(&self) -> u64 {
        self.ms_to_cycles(self.migration_interval_ms)
    }

    pub fn clear_cycles(&self) -> u64 {
        self.ms_to_cycles(self.clear_interval_ms)
    }

    pub fn epoch_seconds(&self) -> f64 {
        self.migration_interval_ms / 1000.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.migration_interval_ms) || !positive(self.clear_interval_ms) || !positive(self.cycles_per_ns) {
            return Err(Error::Config("intervals and cycles_per_ns must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TierParams {
    pub migration_cost_ns: f64,
    /// Fraction of the fast tier kept free by background demotion.
    pub free_watermark: f64,
    /// Link cycles charged per slow-tier access by the bandwidth monitor.
    pub transfer_cycles: u64,
    /// A promotion within this long of the page's demotion is a ping-pong.
    pub pingpong_window_ms: f64,
    /// Reported pages waiting for migration quota, at most this many.
    pub promotion_queue_capacity: usize,
}

impl Default for TierParams {
    fn default() -> Self {
        TierParams {
            migration_cost_ns: 3000.0,
            free_watermark: 0.01,
            transfer_cycles: 1,
            pingpong_window_ms: 1000.0,
            promotion_queue_capacity: 16 * 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkloadSpec {
    Gups(GupsSpec),
    Zipf(ZipfSpec),
    Trace { path: PathBuf },
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec::Gups(GupsSpec::default())
    }
}

impl WorkloadSpec {
    /// Materialize the access stream. Generated workloads draw from the
    /// workload stream of `seed`.
    pub fn events(&self, seed: u64) -> Result<Vec<AccessEvent>> {
        let mut rng = SimRng::stream(seed, streams::WORKLOAD);
        match self {
            WorkloadSpec::Gups(spec) => Ok(gen_gups(spec, &mut rng)?.events),
            WorkloadSpec::Zipf(spec) => gen_zipf(spec, &mut rng),
            WorkloadSpec::Trace { path } => read_trace(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub profiler: ProfilerKind,
    pub baselines: BaselineParams,
    pub policy: PolicySpec,
    pub policy_params: PolicyParams,
    pub sketch: SketchParams,
    pub intervals: Intervals,
    pub tiers: TierParams,
    pub workload: WorkloadSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sim: SimConfig::default(),
            profiler: ProfilerKind::Neoprof,
            baselines: BaselineParams::default(),
            policy: PolicySpec::Dynamic,
            policy_params: PolicyParams::default(),
            sketch: SketchParams::default(),
            intervals: Intervals::default(),
            tiers: TierParams::default(),
            workload: WorkloadSpec::default(),
        }
    }
}

/// Short names accepted in place of full dotted paths.
const ALIASES: &[(&str, &str)] = &[
    ("seed", "sim.rng_seed"),
    ("fast_pages", "sim.fast_pages"),
    ("slow_pages", "sim.slow_pages"),
    ("migration_interval", "intervals.migration_interval_ms"),
    ("clear_interval", "intervals.clear_interval_ms"),
    ("cycles_per_ns", "intervals.cycles_per_ns"),
    ("m_quota", "policy_params.m_quota"),
    ("p_min", "policy_params.p_min"),
    ("p_max", "policy_params.p_max"),
    ("p_init", "policy_params.p_init"),
    ("alpha", "policy_params.alpha"),
    ("beta", "policy_params.beta"),
    ("W", "sketch.width"),
    ("sketch_width", "sketch.width"),
    ("D", "sketch.depth"),
    ("sketch_depth", "sketch.depth"),
    ("hot_buffer", "sketch.hot_buffer_capacity"),
    ("page_scanning_rate", "baselines.pte_scan.scan_interval_ms"),
    ("pte_sampling_rate", "baselines.hint_fault.resample_interval_ms"),
    ("pebs_rate", "baselines.pmu.sample_period"),
    ("migration_cost", "tiers.migration_cost_ns"),
];

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn seed(&self) -> u64 {
        self.sim.rng_seed
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.policy_params.validate()?;
        self.sketch.validate()?;
        self.intervals.validate()?;
        if !(0.0..1.0).contains(&self.tiers.free_watermark) || !(self.tiers.migration_cost_ns >= 0.0) {
            return Err(Error::Config("free_watermark must lie in [0, 1) and migration_cost_ns be >= 0".into()));
        }
        match &self.workload {
            WorkloadSpec::Gups(g) => g.validate(),
            WorkloadSpec::Zipf(z) => z.validate(),
            WorkloadSpec::Trace { .. } => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Override one field by dotted path (or alias). The value is parsed as
    /// JSON when possible and taken as a string otherwise.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "threshold" || key == "fixed_threshold" {
            self.policy = format!("fixed:{value}").parse()?;
            return Ok(());
        }
        let path = ALIASES.iter().find(|(k, _)| *k == key).map(|(_, p)| *p).unwrap_or(key);
        let mut root = serde_json::to_value(&*self)?;
        let mut node = &mut root;
        for part in path.split('.') {
            node = node
                .as_object_mut()
                .and_then(|m| m.get_mut(part))
                .ok_or_else(|| Error::Config(format!("unknown parameter `{key}`")))?;
        }
        *node = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        *self = serde_json::from_value(root).map_err(|e| Error::Config(format!("bad value for `{key}`: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub epoch: u64,
    /// Simulated time at the end of the epoch.
    pub time_ns: f64,
    pub slow_accesses: u64,
    pub fast_accesses: u64,
    pub promotions: u64,
    pub demotions: u64,
    pub pingpongs: u64,
    pub hot_pages_reported: u64,
    pub threshold: u32,
    pub p: Option<f64>,
    pub bandwidth: f64,
    pub error_bound: u64,
    pub profiling_cost_cycles: u64,
    pub cumulative_latency_ns: f64,
}

impl EpochReport {
    pub fn events(&self) -> u64 {
        self.slow_accesses + self.fast_accesses
    }

    pub fn fast_fraction(&self) -> f64 {
        match self.events() {
            0 => 0.0,
            n => self.fast_accesses as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub events: u64,
    pub epochs: u64,
    pub slow_accesses: u64,
    pub fast_accesses: u64,
    pub slow_fraction: f64,
    pub total_latency_ns: f64,
    pub latency_per_access_ns: f64,
    pub promotions: u64,
    pub demotions: u64,
    pub pingpongs: u64,
    pub profiling_cost_cycles: u64,
    pub hot_buffer_overflows: u64,
    /// Pages drained from the hot buffer more than once between resets.
    pub duplicate_hot_reports: u64,
    pub max_epoch_migrations: u64,
    pub quota_per_epoch: u64,
    pub max_error_bound: u64,
    pub final_threshold: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub seed: u64,
    pub config_sha256: String,
    pub rng: String,
}

impl Metadata {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Metadata {
            tool: TOOL_VERSION.to_string(),
            seed: cfg.seed(),
            config_sha256: cfg.hash(),
            rng: RNG_NAME.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub metadata: Metadata,
    pub epochs: Vec<EpochReport>,
    pub summary: Summary,
}

pub fn build_profiler(cfg: &ExperimentConfig) -> Result<Box<dyn Profiler>> {
    let b = &cfg.baselines;
    let seed = cfg.seed();
    Ok(match cfg.profiler {
        ProfilerKind::Neoprof => Box::new(Neoprof::new(cfg.sketch.clone(), cfg.sim.page_bits, seed, b.costs.clone())?),
        ProfilerKind::PteScan => {
            let every = cfg.intervals.ms_to_cycles(b.pte_scan.scan_interval_ms);
            Box::new(PteScan::new(&b.pte_scan, every, b.costs.clone()))
        }
        ProfilerKind::HintFault => {
            let every = cfg.intervals.ms_to_cycles(b.hint_fault.resample_interval_ms);
            Box::new(HintFault::new(&b.hint_fault, every, seed, b.costs.clone()))
        }
        ProfilerKind::PmuSample => Box::new(PmuSample::new(&b.pmu, seed, b.costs.clone())),
    })
}

/// Generate (or load) the workload and run it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let events = cfg.workload.events(cfg.seed())?;
    run_on_events(cfg, &events)
}

struct Driver<'a> {
    cfg: &'a ExperimentConfig,
    tiers: TierState,
    monitor: StateMonitor,
    profiler: Option<Box<dyn Profiler>>,
    policy: Option<Box<dyn ThresholdPolicy>>,
    quota: MigrationQuota,
    watermark_pages: u64,
    epoch: u64,
    next_clear: u64,
    clear_cycles: u64,
    reported_since_clear: PageMap<()>,
    queue: VecDeque<u64>,
    queued: PageMap<()>,
    slow: u64,
    fast: u64,
    latency_ns: f64,
    reports: Vec<EpochReport>,
    summary: Summary,
}

impl Driver<'_> {
    fn access(&mut self, event: &AccessEvent) -> Result<()> {
        let outcome = self.tiers.access(event)?;
        let in_slow = outcome.tier == Tier::Slow;
        if in_slow {
            self.slow += 1;
            self.monitor.record(event, self.cfg.tiers.transfer_cycles);
        } else {
            self.fast += 1;
        }
        self.latency_ns += outcome.latency_ns;
        if let Some(p) = self.profiler.as_mut() {
            p.observe(event, in_slow);
        }
        Ok(())
    }

    fn end_epoch(&mut self, now: u64) {
        let sample = self.monitor.sample_and_reset(now);
        let mut report = EpochReport {
            epoch: self.epoch,
            time_ns: now as f64 / self.cfg.intervals.cycles_per_ns,
            slow_accesses: std::mem::take(&mut self.slow),
            fast_accesses: std::mem::take(&mut self.fast),
            promotions: 0,
            demotions: 0,
            pingpongs: 0,
            hot_pages_reported: 0,
            threshold: self.policy.as_ref().map_or(0, |p| p.threshold()),
            p: None,
            bandwidth: sample.bandwidth,
            error_bound: 0,
            profiling_cost_cycles: 0,
            cumulative_latency_ns: 0.0,
        };

        if let (Some(profiler), Some(policy)) = (self.profiler.as_mut(), self.policy.as_mut()) {
            // The histogram is read before any reset falling on this tick.
            let histogram = profiler.histogram();
            let error_bound = histogram.as_ref().map_or(0, |h| profiler.error_bound(h));
            let hot = profiler.collect(&CollectContext {
                now,
                epoch: self.epoch,
                threshold: policy.threshold(),
                slow_resident: self.tiers.slow_resident_pages(),
            });
            if profiler.kind() == ProfilerKind::Neoprof {
                for &page in &hot.pages {
                    if self.reported_since_clear.insert(page, ()).is_some() {
                        self.summary.duplicate_hot_reports += 1;
                    }
                }
            }
            let capacity = self.cfg.tiers.promotion_queue_capacity;
            for &page in &hot.pages {
                if self.queue.len() < capacity && self.queued.insert(page, ()).is_none() {
                    self.queue.push_back(page);
                }
            }
            self.quota.start_epoch();
            while self.quota.remaining() > 0 {
                let Some(page) = self.queue.pop_front() else { break };
                if self.tiers.promote(&[page], &mut self.quota).skipped_quota > 0 {
                    self.queue.push_front(page);
                    break;
                }
                self.queued.remove(&page);
            }
            self.tiers.demote_cold(self.watermark_pages, &mut self.quota);
            let moved = self.tiers.take_epoch_counters();
            let migrated = moved.promotions + moved.demotions;
            let pingpong = match moved.promotions {
                0 => 0.0,
                n => moved.pingpongs as f64 / n as f64,
            };
            let threshold = policy.update(&PeriodStats {
                histogram: histogram.as_ref(),
                bandwidth: sample.bandwidth,
                pingpong,
                error_bound,
                migrated,
            });
            profiler.set_threshold(threshold);
            if now >= self.next_clear {
                profiler.clear();
                self.reported_since_clear.clear();
                while self.next_clear <= now {
                    self.next_clear += self.clear_cycles;
                }
            }

            self.latency_ns += migrated as f64 * self.cfg.tiers.migration_cost_ns;
            report.promotions = moved.promotions;
            report.demotions = moved.demotions;
            report.pingpongs = moved.pingpongs;
            report.hot_pages_reported = hot.pages.len() as u64;
            report.threshold = threshold;
            report.p = policy.percentile();
            report.error_bound = error_bound;
            report.profiling_cost_cycles = hot.profiling_cost_cycles;
            self.summary.max_epoch_migrations = self.summary.max_epoch_migrations.max(migrated);
            self.summary.max_error_bound = self.summary.max_error_bound.max(error_bound);
        }
        report.cumulative_latency_ns = self.latency_ns;
        self.reports.push(report);
        self.epoch += 1;
    }

    fn finish(mut self) -> RunOutput {
        let s = &mut self.summary;
        for r in &self.reports {
            s.slow_accesses += r.slow_accesses;
            s.fast_accesses += r.fast_accesses;
            s.promotions += r.promotions;
            s.demotions += r.demotions;
            s.pingpongs += r.pingpongs;
            s.profiling_cost_cycles += r.profiling_cost_cycles;
        }
        s.events = s.slow_accesses + s.fast_accesses;
        s.epochs = self.reports.len() as u64;
        s.total_latency_ns = self.latency_ns;
        if s.events > 0 {
            s.slow_fraction = s.slow_accesses as f64 / s.events as f64;
            s.latency_per_access_ns = self.latency_ns / s.events as f64;
        }
        s.final_threshold = self.reports.last().map_or(0, |r| r.threshold);
        RunOutput { metadata: Metadata::for_config(self.cfg), epochs: self.reports, summary: self.summary }
    }
}

type Controllers = (Option<Box<dyn Profiler>>, Option<Box<dyn ThresholdPolicy>>);

/// Run the simulation loop over an explicit, cycle-sorted access stream.
pub fn run_on_events(cfg: &ExperimentConfig, events: &[AccessEvent]) -> Result<RunOutput> {
    cfg.validate()?;
    if let Some(i) = events.windows(2).position(|w| w[1].cycle < w[0].cycle) {
        return Err(Error::Validation(format!("events not sorted by cycle at index {}", i + 1)));
    }
    let latency = LatencyModel::from_config(&cfg.sim, cfg.tiers.migration_cost_ns);
    let watermark_pages = (cfg.sim.fast_pages as f64 * cfg.tiers.free_watermark).ceil() as u64;
    let mut tiers = TierState::new(&cfg.sim, latency)
        .with_pingpong_window(cfg.intervals.ms_to_cycles(cfg.tiers.pingpong_window_ms));
    if cfg.policy != PolicySpec::None {
        tiers = tiers.with_alloc_reserve(watermark_pages);
    }
    let (profiler, policy): Controllers = match cfg.policy {
        PolicySpec::None => (None, None),
        PolicySpec::Dynamic => (
            Some(build_profiler(cfg)?),
            Some(Box::new(DynamicPolicy::new(cfg.policy_params.clone(), cfg.intervals.epoch_seconds())?)),
        ),
        PolicySpec::Fixed(t) => (Some(build_profiler(cfg)?), Some(Box::new(fixed_threshold_policy(t)?))),
    };
    let quota = MigrationQuota::new(cfg.policy_params.quota_pages_per_second(), cfg.intervals.epoch_seconds());
    let mut driver = Driver {
        cfg,
        tiers,
        monitor: StateMonitor::new(0),
        profiler,
        policy,
        quota,
        watermark_pages,
        epoch: 0,
        next_clear: cfg.intervals.clear_cycles(),
        clear_cycles: cfg.intervals.clear_cycles(),
        reported_since_clear: PageMap::default(),
        queue: VecDeque::new(),
        queued: PageMap::default(),
        slow: 0,
        fast: 0,
        latency_ns: 0.0,
        reports: Vec::new(),
        summary: Summary { quota_per_epoch: quota.per_epoch(), ..Summary::default() },
    };
    if let (Some(p), Some(pol)) = (driver.profiler.as_mut(), driver.policy.as_ref()) {
        p.set_threshold(pol.threshold());
    }

    let epoch_cycles = cfg.intervals.epoch_cycles();
    let mut epoch_end = epoch_cycles;
    for event in events {
        while event.cycle >= epoch_end {
            driver.end_epoch(epoch_end);
            epoch_end += epoch_cycles;
        }
        driver.access(event)?;
    }
    if !events.is_empty() {
        driver.end_epoch(epoch_end);
    }
    if let Some(p) = driver.profiler.as_ref() {
        driver.summary.hot_buffer_overflows = p.dropped_reports();
    }
    Ok(driver.finish())
}

/// One row of a sweep: the axis value and the run it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: String,
    pub output: RunOutput,
}

/// Run `base` once per value of `axis`, in parallel, sharing the seed.
pub fn run_sweep(base: &ExperimentConfig, axis: &str, values: &[String]) -> Result<Vec<SweepRow>> {
    let configs = values
        .iter()
        .map(|v| {
            let mut cfg = base.clone();
            cfg.set(axis, v)?;
            Ok((v.clone(), cfg))
        })
        .collect::<Result<Vec<_>>>()?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|(v, cfg)| {
                scope.spawn(move || run_experiment(cfg).map(|output| SweepRow { value: v.clone(), output }))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

pub const EPOCH_COLUMNS: [&str; 14] = [
    "epoch",
    "time_ns",
    "slow_accesses",
    "fast_accesses",
    "promotions",
    "demotions",
    "pingpongs",
    "hot_pages_reported",
    "threshold",
    "p",
    "bandwidth",
    "error_bound",
    "profiling_cost_cycles",
    "cumulative_latency_ns",
];

fn epoch_row(r: &EpochReport) -> String {
    let p = r.p.map(|p| p.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.epoch,
        r.time_ns,
        r.slow_accesses,
        r.fast_accesses,
        r.promotions,
        r.demotions,
        r.pingpongs,
        r.hot_pages_reported,
        r.threshold,
        p,
        r.bandwidth,
        r.error_bound,
        r.profiling_cost_cycles,
        r.cumulative_latency_ns
    )
}

fn metadata_lines(meta: &Metadata) -> String {
    format!(
        "# tool: {}\n# seed: {}\n# config_sha256: {}\n# rng: {}\n",
        meta.tool, meta.seed, meta.config_sha256, meta.rng
    )
}

/// Per-epoch CSV: `#` metadata lines, a header, one row per epoch.
pub fn to_csv(out: &RunOutput) -> String {
    let mut s = metadata_lines(&out.metadata);
    s.push_str(&csv_body(&out.epochs));
    s
}

/// Header and rows without metadata.
pub fn csv_body(epochs: &[EpochReport]) -> String {
    let mut s = EPOCH_COLUMNS.join(",");
    s.push('\n');
    for r in epochs {
        s.push_str(&epoch_row(r));
        s.push('\n');
    }
    s
}

pub fn to_json(out: &RunOutput) -> String {
    serde_json::to_string_pretty(out).expect("run output serializes")
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "value",
    "events",
    "epochs",
    "slow_fraction",
    "latency_per_access_ns",
    "promotions",
    "demotions",
    "pingpongs",
    "profiling_cost_cycles",
    "max_epoch_migrations",
    "max_error_bound",
    "final_threshold",
];

pub fn sweep_to_csv(axis: &str, base: &ExperimentConfig, rows: &[SweepRow]) -> String {
    let mut s = metadata_lines(&Metadata::for_config(base));
    let _ = writeln!(s, "# axis: {axis}");
    s.push_str(&SWEEP_COLUMNS.join(","));
    s.push('\n');
    for row in rows {
        let m = &row.output.summary;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.value,
            m.events,
            m.epochs,
            m.slow_fraction,
            m.latency_per_access_ns,
            m.promotions,
            m.demotions,
            m.pingpongs,
            m.profiling_cost_cycles,
            m.max_epoch_migrations,
            m.max_error_bound,
            m.final_threshold
        );
    }
    s
}

/// Write a run in the requested format.
pub fn report(out: &RunOutput, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    if out.epochs.is_empty() {
        return Err(Error::Validation("nothing to report: the run has no epochs".into()));
    }
    let text = match format {
        ReportFormat::Csv => to_csv(out),
        ReportFormat::Json => to_json(out),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Closed-form total latency of first-touch placement with no migration.
pub fn first_touch_latency(sim: &SimConfig, events: &[AccessEvent]) -> f64 {
    let mut seen = PageMap::default();
    let mut fast = 0.0;
    let mut slow = 0.0;
    for e in events {
        let n = seen.len() as u64;
        let tier_fast = *seen.entry(e.page).or_insert(n < sim.fast_pages);
        if tier_fast {
            fast += 1.0;
        } else {
            slow += 1.0;
        }
    }
    fast * sim.fast_latency_ns + slow * sim.slow_latency_ns
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workloads::GupsSpec;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            sim: SimConfig { fast_pages: 256, slow_pages: 2048, ..SimConfig::default() },
            sketch: SketchParams::with_shape(4096, 2),
            intervals: Intervals { cycles_per_ns: 1e-4, ..Intervals::default() },
            workload: WorkloadSpec::Gups(GupsSpec { total_pages: 2048, events: 50_000, ..GupsSpec::default() }),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn defaults_match_reference_tables() {
        let c = ExperimentConfig::default();
        assert_eq!(c.intervals.migration_interval_ms, 10.0);
        assert_eq!(c.intervals.clear_interval_ms, 5000.0);
        assert_eq!(c.policy_params, PolicyParams::default());
        assert_eq!((c.sketch.width, c.sketch.depth, c.sketch.counter_bits), (512 * 1024, 2, 16));
        assert_eq!(c.sketch.hot_buffer_capacity, 16 * 1024);
        assert_eq!(c.policy_params.quota_per_period(c.intervals.epoch_seconds()), 656);
    }

    #[test]
    fn policy_spec_parsing() {
        assert_eq!("fixed:300".parse::<PolicySpec>().unwrap(), PolicySpec::Fixed(300));
        assert_eq!("dynamic".parse::<PolicySpec>().unwrap(), PolicySpec::Dynamic);
        assert_eq!("none".parse::<PolicySpec>().unwrap(), PolicySpec::None);
        for bad in ["fixed:0", "fixed:", "static", "fixed:-3"] {
            assert!(matches!(bad.parse::<PolicySpec>(), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn config_json_round_trip_and_overrides() {
        let mut c = small();
        let back = ExperimentConfig::from_json_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let h = c.hash();
        c.set("migration_interval", "100").unwrap();
        c.set("W", "8192").unwrap();
        c.set("profiler", "pte-scan").unwrap();
        c.set("threshold", "250").unwrap();
        c.set("workload.hot_fraction", "0.2").unwrap();
        assert_eq!(c.intervals.migration_interval_ms, 100.0);
        assert_eq!(c.sketch.width, 8192);
        assert_eq!(c.profiler, ProfilerKind::PteScan);
        assert_eq!(c.policy, PolicySpec::Fixed(250));
        assert!(matches!(&c.workload, WorkloadSpec::Gups(g) if g.hot_fraction == 0.2));
        assert_ne!(c.hash(), h);
        assert!(matches!(c.set("bogus_axis", "1"), Err(Error::Config(_))));
        assert!(matches!(c.set("W", "\"wide\""), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_json_str(r#"{"sim": {"fast_pagez": 3}}"#).is_err());
    }

    #[test]
    fn empty_trace_gives_empty_report() {
        let out = run_on_events(&small(), &[]).unwrap();
        assert!(out.epochs.is_empty());
        assert_eq!(out.summary, Summary { quota_per_epoch: 656, ..Summary::default() });
        assert!(report(&out, ReportFormat::Csv, std::env::temp_dir().join("never.csv")).is_err());
    }

    #[test]
    fn first_touch_matches_closed_form() {
        let mut cfg = small();
        cfg.policy = PolicySpec::None;
        let events = cfg.workload.events(3).unwrap();
        let out = run_on_events(&cfg, &events).unwrap();
        assert_eq!(out.summary.promotions + out.summary.demotions, 0);
        assert_eq!(out.summary.total_latency_ns, first_touch_latency(&cfg.sim, &events));
        for r in &out.epochs {
            assert_eq!(r.events(), if r.epoch < 50 { 1000 } else { 0 });
        }
    }

    #[test]
    fn epochs_partition_events_and_respect_quota() {
        for kind in ProfilerKind::ALL {
            let mut cfg = small();
            cfg.profiler = kind;
            cfg.policy_params.m_quota = 8.0;
            let out = run_experiment(&cfg).unwrap();
            assert_eq!(out.epochs.iter().map(EpochReport::events).sum::<u64>(), 50_000);
            assert!(out.epochs.iter().all(|r| r.promotions + r.demotions <= out.summary.quota_per_epoch));
            assert_eq!(out.summary.quota_per_epoch, 21);
            assert_eq!(out.summary.duplicate_hot_reports, 0);
        }
    }

    #[test]
    fn neoprof_moves_hot_pages_up() {
        let cfg = small();
        let out = run_experiment(&cfg).unwrap();
        let mut first_touch = cfg.clone();
        first_touch.policy = PolicySpec::None;
        let base = run_experiment(&first_touch).unwrap();
        assert!(out.summary.promotions > 0);
        assert!(out.summary.slow_fraction < base.summary.slow_fraction);
    }

    #[test]
    fn csv_and_json_agree_and_are_deterministic() {
        let cfg = small();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(to_csv(&a), to_csv(&b));
        let parsed: RunOutput = serde_json::from_str(&to_json(&a)).unwrap();
        assert_eq!(csv_body(&parsed.epochs), csv_body(&a.epochs));
        let csv = to_csv(&a);
        assert_eq!(csv.lines().filter(|l| l.starts_with('#')).count(), 4);
        assert!(csv.contains(&format!("# config_sha256: {}", cfg.hash())));
    }

    #[test]
    fn single_value_sweep_equals_run() {
        let cfg = small();
        let rows = run_sweep(&cfg, "seed", &["0".to_string()]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].output, run_experiment(&cfg).unwrap());
        assert!(run_sweep(&cfg, "nope", &["1".into()]).is_err());
    }
}
