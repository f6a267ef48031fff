use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::tiersim::PageMap;
use crate::trace::{streams, AccessEvent, SimRng};

use super::{CollectContext, HotReport, Profiler, ProfilerKind, ProfilingCosts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HintFaultParams {
    /// Time between re-poisoning rounds, in ms.
    pub resample_interval_ms: f64,
    /// Fraction of slow-resident pages poisoned per round.
    pub sample_fraction: f64,
    /// Faults a page must take before it is reported.
    pub fault_threshold: u32,
}

impl Default for HintFaultParams {
    fn default() -> Self {
        HintFaultParams { resample_interval_ms: 1000.0, sample_fraction: 0.01, fault_threshold: 1 }
    }
}

/// NUMA hint-fault emulation. A sampled subset of slow-tier pages is poisoned;
/// the first touch of a poisoned page faults, is recorded and unpoisons it.
#[derive(Debug, Clone)]
pub struct HintFault {
    params: HintFaultParams,
    resample_interval: u64,
    next_resample: u64,
    poisoned: PageMap<()>,
    faults: PageMap<u32>,
    faults_since_collect: u64,
    rng: SimRng,
    costs: ProfilingCosts,
}

impl HintFault {
    pub fn new(params: &HintFaultParams, resample_interval_cycles: u64, seed: u64, costs: ProfilingCosts) -> Self {
        HintFault {
            params: params.clone(),
            resample_interval: resample_interval_cycles.max(1),
            next_resample: 0,
            poisoned: PageMap::default(),
            faults: PageMap::default(),
            faults_since_collect: 0,
            rng: SimRng::stream(seed, streams::HINT_FAULT),
            costs,
        }
    }

    pub fn is_poisoned(&self, page: u64) -> bool {
        self.poisoned.contains_key(&page)
    }

    pub fn poisoned_count(&self) -> usize {
        self.poisoned.len()
    }

    pub fn fault_count(&self, page: u64) -> u32 {
        self.faults.get(&page).copied().unwrap_or(0)
    }

    /// Poison a fresh random sample of `slow_resident`.
    pub fn resample(&mut self, slow_resident: &[u64]) {
        self.poisoned.clear();
        let n = slow_resident.len();
        let amount = ((n as f64 * self.params.sample_fraction).ceil() as usize).min(n);
        for i in index::sample(&mut self.rng, n, amount) {
            self.poisoned.insert(slow_resident[i], ());
        }
    }
}

impl Profiler for HintFault {
    fn kind(&self) -> ProfilerKind {
        ProfilerKind::HintFault
    }

    fn observe(&mut self, event: &AccessEvent, _in_slow_tier: bool) {
        if self.poisoned.remove(&event.page).is_some() {
            *self.faults.entry(event.page).or_insert(0) += 1;
            self.faults_since_collect += 1;
        }
    }

    fn collect(&mut self, ctx: &CollectContext<'_>) -> HotReport {
        let threshold = self.params.fault_threshold.max(1);
        let mut pages: Vec<u64> = self.faults.iter().filter(|(_, &f)| f >= threshold).map(|(&p, _)| p).collect();
        pages.sort_unstable();
        for p in &pages {
            self.faults.remove(p);
        }
        let cost = self.faults_since_collect * self.costs.hint_fault_per_fault;
        self.faults_since_collect = 0;
        if ctx.now >= self.next_resample {
            self.resample(ctx.slow_resident);
            self.next_resample = ctx.now + self.resample_interval;
        }
        HotReport { pages, epoch: ctx.epoch, profiling_cost_cycles: cost }
    }
}
