//! Count-min sketch hot-page detector.
//!
//! Every entry carries a saturating counter plus a valid bit and a hot bit.
//! Valid bits make [`SketchDetector::reset`] cheap: an entry whose valid bit is
//! clear reads as zero and is re-initialised on its next increment. Hot bits
//! act as a bloom filter in front of the hot-page buffer so a page is queued at
//! most once between resets.

mod h3;
mod histogram;

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use h3::H3Hash;
pub use histogram::Histogram;

use crate::error::{Error, Result};
use crate::trace::{streams, SimRng};

/// Upper bound on lanes; keeps per-observation index scratch on the stack.
pub const MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SketchParams {
    /// Counters per lane; a power of two.
    pub width: usize,
    /// Number of lanes.
    pub depth: usize,
    pub counter_bits: u32,
    pub hot_buffer_capacity: usize,
    pub hist_bins: usize,
    /// Largest threshold the histogram is expected to resolve; the uniform bins
    /// span `[1, 4 * hist_threshold_ceiling)`.
    pub hist_threshold_ceiling: u32,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

impl Default for SketchParams {
    fn default() -> Self {
        SketchParams {
            width: 512 * 1024,
            depth: 2,
            counter_bits: 16,
            hot_buffer_capacity: 16 * 1024,
            hist_bins: 64,
            hist_threshold_ceiling: 4096,
            epsilon: None,
            delta: None,
        }
    }
}

impl SketchParams {
    pub fn with_shape(width: usize, depth: usize) -> Self {
        SketchParams { width, depth, ..Self::default() }
    }

    /// Size the sketch from an error target: `W = ceil(2/eps)` rounded up to a
    /// power of two, `D = ceil(log2(1/delta))`.
    pub fn from_error(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config("epsilon and delta must lie in (0, 1)".into()));
        }
        let width = ceil_tolerant(2.0 / epsilon) as usize;
        let depth = ceil_tolerant((1.0 / delta).log2()).max(1.0) as usize;
        Ok(SketchParams {
            width: width.max(2).next_power_of_two(),
            depth,
            epsilon: Some(epsilon),
            delta: Some(delta),
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || !self.width.is_power_of_two() {
            return Err(Error::Config(format!("sketch width {} must be a power of two >= 2", self.width)));
        }
        if self.width > 1 << 32 {
            return Err(Error::Config("sketch width exceeds 2^32".into()));
        }
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return Err(Error::Config(format!("sketch depth must be in 1..={MAX_DEPTH}")));
        }
        if self.counter_bits == 0 || self.counter_bits > 32 {
            return Err(Error::Config("counter_bits must be in 1..=32".into()));
        }
        if self.hist_bins < 3 {
            return Err(Error::Config("hist_bins must be at least 3".into()));
        }
        if self.hist_threshold_ceiling == 0 {
            return Err(Error::Config("hist_threshold_ceiling must be positive".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::Config("delta must lie in (0, 1)".into()));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Config("epsilon must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    pub fn index_bits(&self) -> u32 {
        self.width.trailing_zeros()
    }

    pub fn counter_max(&self) -> u32 {
        if self.counter_bits == 32 {
            u32::MAX
        } else {
            (1u32 << self.counter_bits) - 1
        }
    }

    /// Failure probability used for the error bound; `2^-D` when unset.
    pub fn effective_delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| 0.5f64.powi(self.depth as i32))
    }

    /// Error rate implied by the width, `2 / W`, unless set explicitly.
    pub fn effective_epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(2.0 / self.width as f64)
    }

    /// Descending rank `ceil(W * delta^(1/D))` whose counter is the error bound.
    pub fn error_rank(&self) -> usize {
        let frac = self.effective_delta().powf(1.0 / self.depth as f64);
        (ceil_tolerant(self.width as f64 * frac) as usize).clamp(1, self.width)
    }

    pub fn empty_histogram(&self) -> Histogram {
        Histogram::new(self.hist_bins, self.hist_threshold_ceiling, self.counter_max())
    }
}

fn ceil_tolerant(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

/// Error bound `e` read off a lane-0 histogram: the lower edge of the bin that
/// holds the counter at descending rank [`SketchParams::error_rank`].
pub fn error_bound(hist: &Histogram, params: &SketchParams) -> u64 {
    let rank = params.error_rank() as u64;
    let mut cumulative = 0u64;
    for bin in (0..hist.bins()).rev() {
        cumulative += hist.counts()[bin];
        if cumulative >= rank {
            return hist.lower_edge(bin);
        }
    }
    0
}

#[derive(Debug, Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i >> 6] & (1 << (i & 63)) != 0
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.0[i >> 6] &= !(1 << (i & 63));
    }

    fn clear_all(&mut self) {
        self.0.fill(0);
    }
}

/// Read-only view of one sketch entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchEntry {
    pub counter: u32,
    pub valid: bool,
    pub hot: bool,
}

#[derive(Debug, Clone)]
pub struct SketchDetector {
    params: SketchParams,
    counter_max: u32,
    hashes: Vec<H3Hash>,
    counters: Vec<u32>,
    valid: BitSet,
    hot: BitSet,
    hot_buffer: VecDeque<u64>,
    total_seen: u64,
    overflow_count: u64,
}

impl SketchDetector {
    /// Detector whose hash seeds are derived from `seed`.
    pub fn new(params: SketchParams, page_bits: u32, seed: u64) -> Result<Self> {
        params.validate()?;
        if page_bits == 0 || page_bits > 32 {
            return Err(Error::Config("page_bits must be in 1..=32".into()));
        }
        let mut rng = SimRng::stream(seed, streams::SKETCH_SEEDS);
        let mut hashes: Vec<H3Hash> = Vec::with_capacity(params.depth);
        while hashes.len() < params.depth {
            let h = H3Hash::random(page_bits, params.index_bits(), &mut rng);
            if !hashes.contains(&h) {
                hashes.push(h);
            }
        }
        Self::with_hashes(params, hashes)
    }

    /// Detector with caller-provided lane hashes.
    pub fn with_hashes(params: SketchParams, hashes: Vec<H3Hash>) -> Result<Self> {
        params.validate()?;
        if hashes.len() != params.depth || hashes.iter().any(|h| h.output_bits() != params.index_bits()) {
            return Err(Error::Config("one hash of log2(width) output bits per lane required".into()));
        }
        let cells = params.width * params.depth;
        Ok(SketchDetector {
            counter_max: params.counter_max(),
            hashes,
            counters: vec![0; cells],
            valid: BitSet::new(cells),
            hot: BitSet::new(cells),
            hot_buffer: VecDeque::with_capacity(params.hot_buffer_capacity.min(1 << 16)),
            total_seen: 0,
            overflow_count: 0,
            params,
        })
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn hashes(&self) -> &[H3Hash] {
        &self.hashes
    }

    /// Accesses observed since the last reset.
    pub fn total_seen(&self) -> u64 {
        self.total_seen
    }

    /// Hot pages dropped because the buffer was full.
    pub fn overflow_count(&self) -> u64 {
        self.overflow_count
    }

    pub fn h3_index(&self, page: u64, lane: usize) -> usize {
        self.hashes[lane].index(page) as usize
    }

    #[inline]
    fn cell(&self, lane: usize, page: u64) -> usize {
        lane * self.params.width + self.hashes[lane].index(page) as usize
    }

    /// Count one access to `page`; returns the page if this access makes it a
    /// newly detected hot page (estimate above `threshold` and not already
    /// flagged by the hot bits).
    pub fn observe(&mut self, page: u64, threshold: u32) -> Option<u64> {
        let depth = self.params.depth;
        let mut cells = [0usize; MAX_DEPTH];
        let mut estimate = u32::MAX;
        for (lane, slot) in cells.iter_mut().enumerate().take(depth) {
            let c = self.cell(lane, page);
            *slot = c;
            let value = if self.valid.get(c) {
                let v = self.counters[c].saturating_add(1).min(self.counter_max);
                self.counters[c] = v;
                v
            } else {
                self.counters[c] = 1;
                self.valid.set(c);
                self.hot.clear(c);
                1
            };
            estimate = estimate.min(value);
        }
        self.total_seen += 1;

        if estimate <= threshold {
            return None;
        }
        let cells = &cells[..depth];
        if cells.iter().all(|&c| self.hot.get(c)) {
            return None;
        }
        for &c in cells {
            self.hot.set(c);
        }
        if self.hot_buffer.len() < self.params.hot_buffer_capacity {
            self.hot_buffer.push_back(page);
        } else {
            self.overflow_count += 1;
        }
        Some(page)
    }

    /// Min over lanes of the hashed counters; never below the true count since
    /// the last reset.
    pub fn estimate(&self, page: u64) -> u32 {
        (0..self.params.depth).map(|lane| self.effective(self.cell(lane, page))).min().unwrap_or(0)
    }

    #[inline]
    fn effective(&self, cell: usize) -> u32 {
        if self.valid.get(cell) {
            self.counters[cell]
        } else {
            0
        }
    }

    pub fn entry(&self, lane: usize, index: usize) -> SketchEntry {
        let c = lane * self.params.width + index;
        let valid = self.valid.get(c);
        SketchEntry { counter: if valid { self.counters[c] } else { 0 }, valid, hot: valid && self.hot.get(c) }
    }

    /// Effective counter values of one lane (invalid entries read as zero).
    pub fn lane_values(&self, lane: usize) -> Vec<u32> {
        let base = lane * self.params.width;
        (base..base + self.params.width).map(|c| self.effective(c)).collect()
    }

    /// Clear valid and hot bits, the buffer and the statistics. Counter words
    /// are left as they are.
    pub fn reset(&mut self) {
        self.valid.clear_all();
        self.hot.clear_all();
        self.hot_buffer.clear();
        self.total_seen = 0;
        self.overflow_count = 0;
    }

    pub fn compute_histogram(&self) -> Histogram {
        let mut hist = self.params.empty_histogram();
        for c in 0..self.params.width {
            hist.add(self.effective(c) as u64);
        }
        hist
    }

    pub fn error_bound(&self) -> u64 {
        error_bound(&self.compute_histogram(), &self.params)
    }

    pub fn hot_page_count(&self) -> usize {
        self.hot_buffer.len()
    }

    pub fn pop_hot_page(&mut self) -> Option<u64> {
        self.hot_buffer.pop_front()
    }

    /// Empty the hot-page buffer in detection order. Hot bits stay set until
    /// the next reset.
    pub fn drain_hot_pages(&mut self) -> Vec<u64> {
        self.hot_buffer.drain(..).collect()
    }

    /// Text dump for debugging: totals and the lane-0 histogram.
    pub fn diagnostic_dump(&self) -> String {
        let hist = self.compute_histogram();
        let mut out = String::new();
        let _ = writeln!(out, "width={} depth={}", self.params.width, self.params.depth);
        let _ = writeln!(out, "total_seen={}", self.total_seen);
        let _ = writeln!(out, "overflow_count={}", self.overflow_count);
        let _ = writeln!(out, "buffered_hot_pages={}", self.hot_buffer.len());
        let _ = writeln!(out, "error_bound={}", error_bound(&hist, &self.params));
        for bin in 0..hist.bins() {
            let _ = writeln!(
                out,
                "bin[{bin}] [{}, {}) = {}",
                hist.lower_edge(bin),
                hist.upper_edge(bin),
                hist.counts()[bin]
            );
        }
        out
    }
}
