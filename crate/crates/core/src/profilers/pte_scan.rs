use serde::{Deserialize, Serialize};

use crate::tiersim::PageMap;
use crate::trace::AccessEvent;

use super::{CollectContext, HotReport, Profiler, ProfilerKind, ProfilingCosts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PteScanParams {
    /// Time between scans of the slow tier's accessed bits, in ms.
    pub scan_interval_ms: f64,
    /// Consecutive scans a page must be seen in before it is reported.
    pub hotness_epochs: u8,
}

impl Default for PteScanParams {
    fn default() -> Self {
        PteScanParams { scan_interval_ms: 5000.0, hotness_epochs: 2 }
    }
}

/// Accessed-bit scanning. A page registers at most one access per scan epoch
/// no matter how often it is touched.
#[derive(Debug, Clone)]
pub struct PteScan {
    hotness_epochs: u8,
    scan_interval: u64,
    last_scan: u64,
    accessed: PageMap<()>,
    epoch_counts: PageMap<u8>,
    costs: ProfilingCosts,
}

impl PteScan {
    pub fn new(params: &PteScanParams, scan_interval_cycles: u64, costs: ProfilingCosts) -> Self {
        PteScan {
            hotness_epochs: params.hotness_epochs.max(1),
            scan_interval: scan_interval_cycles.max(1),
            last_scan: 0,
            accessed: PageMap::default(),
            epoch_counts: PageMap::default(),
            costs,
        }
    }

    /// Scan epochs in which `page` was seen, consecutively, so far.
    pub fn epoch_count(&self, page: u64) -> u8 {
        self.epoch_counts.get(&page).copied().unwrap_or(0)
    }

    pub fn accessed_bit(&self, page: u64) -> bool {
        self.accessed.contains_key(&page)
    }
}

impl Profiler for PteScan {
    fn kind(&self) -> ProfilerKind {
        ProfilerKind::PteScan
    }

    fn observe(&mut self, event: &AccessEvent, _in_slow_tier: bool) {
        self.accessed.insert(event.page, ());
    }

    fn collect(&mut self, ctx: &CollectContext<'_>) -> HotReport {
        if ctx.now < self.last_scan + self.scan_interval {
            return HotReport { epoch: ctx.epoch, ..HotReport::default() };
        }
        self.last_scan = ctx.now;
        let mut pages = Vec::new();
        for &page in ctx.slow_resident {
            if self.accessed.contains_key(&page) {
                let count = self.epoch_counts.entry(page).or_insert(0);
                *count = count.saturating_add(1);
                if *count >= self.hotness_epochs {
                    self.epoch_counts.remove(&page);
                    pages.push(page);
                }
            } else {
                self.epoch_counts.remove(&page);
            }
        }
        self.accessed.clear();
        HotReport {
            pages,
            epoch: ctx.epoch,
            profiling_cost_cycles: self.costs.pte_scan_fixed
                + self.costs.pte_scan_per_pte * ctx.slow_resident.len() as u64,
        }
    }
}
