//! Device-side state monitor: bandwidth utilization and read/write split.

use crate::trace::{AccessEvent, Op};

/// Cycles a single 64-byte transfer keeps the link busy.
pub const DEFAULT_TRANSFER_CYCLES: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSample {
    /// Bandwidth utilization `(read + write) / total`, clamped to `[0, 1]`.
    pub bandwidth: f64,
    /// `read / (read + write)`; 0.5 for an idle window.
    pub read_fraction: f64,
    pub read_cycles: u64,
    pub write_cycles: u64,
    pub total_cycles: u64,
}

#[derive(Debug, Clone, Default)]
pub struct StateMonitor {
    read_cycles: u64,
    write_cycles: u64,
    total_cycles: u64,
    window_start: u64,
}

impl StateMonitor {
    pub fn new(window_start: u64) -> Self {
        StateMonitor { window_start, ..Default::default() }
    }

    pub fn record(&mut self, event: &AccessEvent, transfer_cycles: u64) {
        debug_assert!(event.cycle >= self.window_start);
        match event.op {
            Op::Read => self.read_cycles += transfer_cycles,
            Op::Write => self.write_cycles += transfer_cycles,
        }
        self.total_cycles = self.total_cycles.max(event.cycle.saturating_sub(self.window_start));
    }

    pub fn window_start(&self) -> u64 {
        self.window_start
    }

    /// Sampled cycles so far in the window.
    pub fn sampled_cycles(&self) -> u64 {
        self.total_cycles
    }

    pub fn read_cycles(&self) -> u64 {
        self.read_cycles
    }

    pub fn write_cycles(&self) -> u64 {
        self.write_cycles
    }

    /// Close the window at `now` and start a new one there.
    pub fn sample_and_reset(&mut self, now: u64) -> MonitorSample {
        let total = self.total_cycles.max(now.saturating_sub(self.window_start));
        let sample = summarize(self.read_cycles, self.write_cycles, total);
        *self = StateMonitor::new(now.max(self.window_start));
        sample
    }
}

fn summarize(read: u64, write: u64, total: u64) -> MonitorSample {
    let busy = read + write;
    let bandwidth = if busy == 0 {
        0.0
    } else if total == 0 {
        1.0
    } else {
        (busy as f64 / total as f64).min(1.0)
    };
    let read_fraction = if busy == 0 { 0.5 } else { read as f64 / busy as f64 };
    MonitorSample { bandwidth, read_fraction, read_cycles: read, write_cycles: write, total_cycles: total }
}
