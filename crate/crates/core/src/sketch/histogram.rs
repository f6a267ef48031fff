//! Fixed-layout counter histogram.
//!
//! Bin 0 holds exactly the value zero, bins `1..bins-1` split `[1, 4 * ceiling)`
//! into equal-width ranges, and the last bin catches everything above up to the
//! counter maximum. Edges are exclusive upper bounds.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    counts: Vec<u64>,
    upper_edges: Vec<u64>,
    width: u64,
}

impl Histogram {
    /// Empty histogram with `bins` bins laid out for thresholds up to
    /// `threshold_ceiling` over counters saturating at `counter_max`.
    pub fn new(bins: usize, threshold_ceiling: u32, counter_max: u32) -> Self {
        assert!(bins >= 3, "histogram needs a zero bin, a range bin and an overflow bin");
        let uniform = (bins - 2) as u64;
        let span = (4 * threshold_ceiling as u64).max(2) - 1;
        let width = span.div_ceil(uniform).max(1);
        let cap = counter_max as u64 + 1;
        let mut upper_edges = Vec::with_capacity(bins);
        upper_edges.push(1.min(cap));
        for i in 1..=uniform {
            upper_edges.push((1 + i * width).min(cap));
        }
        upper_edges.push(cap);
        Histogram { counts: vec![0; bins], upper_edges, width }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn upper_edges(&self) -> &[u64] {
        &self.upper_edges
    }

    /// Width of the uniform bins.
    pub fn bin_width(&self) -> u64 {
        self.width
    }

    pub fn lower_edge(&self, bin: usize) -> u64 {
        if bin == 0 {
            0
        } else {
            self.upper_edges[bin - 1]
        }
    }

    pub fn upper_edge(&self, bin: usize) -> u64 {
        self.upper_edges[bin]
    }

    pub fn bin_of(&self, value: u64) -> usize {
        let last = self.counts.len() - 1;
        if value == 0 {
            return 0;
        }
        let bin = 1 + ((value - 1) / self.width) as usize;
        bin.min(last)
    }

    pub fn add(&mut self, value: u64) {
        let bin = self.bin_of(value);
        self.counts[bin] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bucket a set of values into an empty copy of this layout.
    pub fn from_values(layout: &Histogram, values: impl IntoIterator<Item = u64>) -> Histogram {
        let mut hist = Histogram {
            counts: vec![0; layout.counts.len()],
            upper_edges: layout.upper_edges.clone(),
            width: layout.width,
        };
        for v in values {
            hist.add(v);
        }
        hist
    }

    /// Rebuild from raw bin counts read back from a device.
    pub fn with_counts(mut self, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), self.counts.len(), "bin count mismatch");
        self.counts = counts;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let h = Histogram::new(64, 4096, u16::MAX as u32);
        assert_eq!(h.bins(), 64);
        assert_eq!(h.bin_width(), 265);
        assert_eq!(h.upper_edge(0), 1);
        assert_eq!(h.upper_edge(1), 266);
        assert_eq!(h.upper_edge(62), 1 + 62 * 265);
        assert_eq!(h.upper_edge(63), 65536);
        assert!(h.upper_edge(62) >= 4 * 4096);
    }

    #[test]
    fn every_value_lands_between_its_edges() {
        let h = Histogram::new(64, 100, u16::MAX as u32);
        for v in (0..=u16::MAX as u64).step_by(7).chain([0, 1, 399, 400, 65535]) {
            let b = h.bin_of(v);
            assert!(h.lower_edge(b) <= v && v < h.upper_edge(b), "value {v} bin {b}");
        }
    }

    #[test]
    fn small_counter_caps_edges() {
        let h = Histogram::new(64, 4096, 255);
        assert!(h.upper_edges().windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*h.upper_edges().last().unwrap(), 256);
        for v in 0..=255u64 {
            let b = h.bin_of(v);
            assert!(h.lower_edge(b) <= v && v < h.upper_edge(b));
        }
    }
}
