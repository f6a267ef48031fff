use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::tiersim::PageMap;
use crate::trace::{streams, AccessEvent, SimRng};

use super::{CollectContext, HotReport, Profiler, ProfilerKind, ProfilingCosts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmuParams {
    /// One sample per this many slow-tier accesses.
    pub sample_period: u64,
}

impl Default for PmuParams {
    fn default() -> Self {
        PmuParams { sample_period: 200 }
    }
}

/// Event-based sampling of slow-tier loads and stores.
#[derive(Debug, Clone)]
pub struct PmuSample {
    period: u64,
    countdown: u64,
    counts: PageMap<u64>,
    total_samples: u64,
    pending_samples: u64,
    costs: ProfilingCosts,
}

impl PmuSample {
    pub fn new(params: &PmuParams, seed: u64, costs: ProfilingCosts) -> Self {
        let period = params.sample_period.max(1);
        let mut rng = SimRng::stream(seed, streams::PMU);
        PmuSample {
            period,
            countdown: rng.gen_range(1..=period),
            counts: PageMap::default(),
            total_samples: 0,
            pending_samples: 0,
            costs,
        }
    }

    pub fn sample_period(&self) -> u64 {
        self.period
    }

    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    pub fn sample_count(&self, page: u64) -> u64 {
        self.counts.get(&page).copied().unwrap_or(0)
    }
}

impl Profiler for PmuSample {
    fn kind(&self) -> ProfilerKind {
        ProfilerKind::PmuSample
    }

    fn observe(&mut self, event: &AccessEvent, in_slow_tier: bool) {
        if !in_slow_tier {
            return;
        }
        self.countdown -= 1;
        if self.countdown == 0 {
            self.countdown = self.period;
            *self.counts.entry(event.page).or_insert(0) += 1;
            self.total_samples += 1;
            self.pending_samples += 1;
        }
    }

    fn collect(&mut self, ctx: &CollectContext<'_>) -> HotReport {
        let per_interrupt = self.costs.pmu_samples_per_interrupt.max(1);
        let interrupts = self.pending_samples / per_interrupt;
        self.pending_samples %= per_interrupt;

        // Scale sample counts back to estimated accesses before thresholding.
        let threshold = ctx.threshold.max(1) as u64;
        let mut hot: Vec<(u64, u64)> =
            self.counts.iter().filter(|(_, &n)| n * self.period >= threshold).map(|(&p, &n)| (p, n)).collect();
        hot.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (p, _) in &hot {
            self.counts.remove(p);
        }
        HotReport {
            pages: hot.into_iter().map(|(p, _)| p).collect(),
            epoch: ctx.epoch,
            profiling_cost_cycles: interrupts * self.costs.pmu_per_interrupt,
        }
    }

    fn clear(&mut self) {
        self.counts.clear();
    }
}
