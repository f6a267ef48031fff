use crate::error::Result;
use crate::monitor::{MonitorSample, StateMonitor, DEFAULT_TRANSFER_CYCLES};
use crate::sketch::{error_bound, Histogram, SketchDetector, SketchParams};
use crate::trace::AccessEvent;

use super::{CollectContext, HotReport, Profiler, ProfilerKind, ProfilingCosts};

/// The device as the host sees it: one method per control command.
#[derive(Debug, Clone)]
pub struct NeoProfDevice {
    detector: SketchDetector,
    monitor: StateMonitor,
    threshold: u32,
    transfer_cycles: u64,
    histogram: Option<Histogram>,
}

impl NeoProfDevice {
    pub fn new(params: SketchParams, page_bits: u32, seed: u64) -> Result<Self> {
        Ok(NeoProfDevice {
            detector: SketchDetector::new(params, page_bits, seed)?,
            monitor: StateMonitor::new(0),
            threshold: 1,
            transfer_cycles: DEFAULT_TRANSFER_CYCLES,
            histogram: None,
        })
    }

    pub fn with_transfer_cycles(mut self, cycles: u64) -> Self {
        self.transfer_cycles = cycles;
        self
    }

    /// Page-monitor path: a request reaching the device.
    pub fn snoop(&mut self, event: &AccessEvent) -> Option<u64> {
        self.monitor.record(event, self.transfer_cycles);
        self.detector.observe(event.page, self.threshold)
    }

    pub fn detector(&self) -> &SketchDetector {
        &self.detector
    }

    /// `Reset`: clear sketch state, hot buffer and any computed histogram.
    pub fn reset(&mut self) {
        self.detector.reset();
        self.histogram = None;
    }

    /// `SetThreshold`.
    pub fn set_threshold(&mut self, threshold: u32) {
        self.threshold = threshold.max(1);
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    /// `GetNrHotPage`.
    pub fn nr_hot_pages(&self) -> usize {
        self.detector.hot_page_count()
    }

    /// `GetHotPage`: next buffered hot page, oldest first.
    pub fn hot_page(&mut self) -> Option<u64> {
        self.detector.pop_hot_page()
    }

    /// `GetNrSample`.
    pub fn nr_sample(&self) -> u64 {
        self.monitor.sampled_cycles()
    }

    /// `GetRdCnt`.
    pub fn rd_cnt(&self) -> u64 {
        self.monitor.read_cycles()
    }

    /// `GetWrCnt`.
    pub fn wr_cnt(&self) -> u64 {
        self.monitor.write_cycles()
    }

    /// Close the monitor window at `now`.
    pub fn sample_monitor(&mut self, now: u64) -> MonitorSample {
        self.monitor.sample_and_reset(now)
    }

    /// `SetHistEn`: bucket lane-0 counters.
    pub fn set_hist_en(&mut self) {
        self.histogram = Some(self.detector.compute_histogram());
    }

    /// `GetNrHistBin`.
    pub fn nr_hist_bins(&self) -> usize {
        self.detector.params().hist_bins
    }

    /// `GetHist`: bins of the last triggered histogram.
    pub fn hist(&self) -> Option<&[u64]> {
        self.histogram.as_ref().map(|h| h.counts())
    }

    pub fn histogram(&self) -> Option<&Histogram> {
        self.histogram.as_ref()
    }
}

/// Sketch-backed profiler: hot pages are detected on the device as accesses
/// arrive and read out once per interval.
#[derive(Debug, Clone)]
pub struct Neoprof {
    device: NeoProfDevice,
    costs: ProfilingCosts,
    dropped: u64,
}

impl Neoprof {
    pub fn new(params: SketchParams, page_bits: u32, seed: u64, costs: ProfilingCosts) -> Result<Self> {
        Ok(Neoprof { device: NeoProfDevice::new(params, page_bits, seed)?, costs, dropped: 0 })
    }

    pub fn device(&self) -> &NeoProfDevice {
        &self.device
    }

    pub fn device_mut(&mut self) -> &mut NeoProfDevice {
        &mut self.device
    }
}

impl Profiler for Neoprof {
    fn kind(&self) -> ProfilerKind {
        ProfilerKind::Neoprof
    }

    fn observe(&mut self, event: &AccessEvent, in_slow_tier: bool) {
        if in_slow_tier {
            self.device.snoop(event);
        }
    }

    fn collect(&mut self, ctx: &CollectContext<'_>) -> HotReport {
        let count = self.device.nr_hot_pages();
        let pages: Vec<u64> = std::iter::from_fn(|| self.device.hot_page()).take(count).collect();
        HotReport {
            profiling_cost_cycles: self.costs.neoprof_fixed + self.costs.neoprof_per_page * pages.len() as u64,
            pages,
            epoch: ctx.epoch,
        }
    }

    fn set_threshold(&mut self, threshold: u32) {
        self.device.set_threshold(threshold);
    }

    fn histogram(&mut self) -> Option<Histogram> {
        self.device.set_hist_en();
        self.device.histogram().cloned()
    }

    fn error_bound(&self, hist: &Histogram) -> u64 {
        error_bound(hist, self.device.detector().params())
    }

    fn clear(&mut self) {
        self.dropped += self.device.detector().overflow_count();
        self.device.reset();
    }

    fn dropped_reports(&self) -> u64 {
        self.dropped + self.device.detector().overflow_count()
    }
}
