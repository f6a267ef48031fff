//! Hot-page profilers behind one interface.
//!
//! [`Neoprof`] wraps the device-side sketch detector and sees only accesses
//! that reach the slow tier. The three host-side baselines are emulated from
//! the same trace: [`PteScan`] and [`HintFault`] work from page touches at
//! epoch granularity, [`PmuSample`] records every k-th slow-tier access.

mod hint_fault;
mod neoprof;
mod pmu;
mod pte_scan;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use hint_fault::{HintFault, HintFaultParams};
pub use neoprof::{NeoProfDevice, Neoprof};
pub use pmu::{PmuParams, PmuSample};
pub use pte_scan::{PteScan, PteScanParams};

use crate::error::{Error, Result};
use crate::sketch::Histogram;
use crate::trace::AccessEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProfilerKind {
    Neoprof,
    PteScan,
    HintFault,
    PmuSample,
}

impl ProfilerKind {
    pub const ALL: [ProfilerKind; 4] =
        [ProfilerKind::Neoprof, ProfilerKind::PteScan, ProfilerKind::HintFault, ProfilerKind::PmuSample];

    pub fn name(self) -> &'static str {
        match self {
            ProfilerKind::Neoprof => "neoprof",
            ProfilerKind::PteScan => "pte-scan",
            ProfilerKind::HintFault => "hint-fault",
            ProfilerKind::PmuSample => "pmu",
        }
    }
}

impl fmt::Display for ProfilerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfilerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neoprof" => Ok(ProfilerKind::Neoprof),
            "pte-scan" | "ptescan" => Ok(ProfilerKind::PteScan),
            "hint-fault" | "hintfault" => Ok(ProfilerKind::HintFault),
            "pmu" | "pmu-sample" | "pebs" => Ok(ProfilerKind::PmuSample),
            other => Err(Error::Config(format!("unknown profiler `{other}`"))),
        }
    }
}

impl TryFrom<String> for ProfilerKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ProfilerKind> for String {
    fn from(k: ProfilerKind) -> String {
        k.name().to_string()
    }
}

/// CPU cycles charged for profiling work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilingCosts {
    pub pte_scan_per_pte: u64,
    pub pte_scan_fixed: u64,
    pub hint_fault_per_fault: u64,
    pub pmu_per_interrupt: u64,
    pub pmu_samples_per_interrupt: u64,
    pub neoprof_per_page: u64,
    pub neoprof_fixed: u64,
}

impl Default for ProfilingCosts {
    fn default() -> Self {
        ProfilingCosts {
            pte_scan_per_pte: 50,
            pte_scan_fixed: 10_000,
            hint_fault_per_fault: 2000,
            pmu_per_interrupt: 500,
            pmu_samples_per_interrupt: 64,
            neoprof_per_page: 200,
            neoprof_fixed: 1000,
        }
    }
}

/// Pages a profiler considers hot at one collection point.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HotReport {
    pub pages: Vec<u64>,
    pub epoch: u64,
    pub profiling_cost_cycles: u64,
}

/// What the simulation hands a profiler when collecting.
#[derive(Debug, Clone, Copy)]
pub struct CollectContext<'a> {
    pub now: u64,
    pub epoch: u64,
    /// Current hotness threshold.
    pub threshold: u32,
    pub slow_resident: &'a [u64],
}

pub trait Profiler: Send {
    fn kind(&self) -> ProfilerKind;

    /// Feed one access. `in_slow_tier` is the placement at access time.
    fn observe(&mut self, event: &AccessEvent, in_slow_tier: bool);

    /// Called once per migration interval.
    fn collect(&mut self, ctx: &CollectContext<'_>) -> HotReport;

    /// Threshold applied at observation time, if the backend does that.
    fn set_threshold(&mut self, _threshold: u32) {}

    /// Access-frequency histogram, for backends that can produce one.
    fn histogram(&mut self) -> Option<Histogram> {
        None
    }

    /// Error bound matching [`Profiler::histogram`].
    fn error_bound(&self, _hist: &Histogram) -> u64 {
        0
    }

    /// Periodic state clear.
    fn clear(&mut self) {}

    /// Hot pages lost to a full report buffer since creation.
    fn dropped_reports(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineParams {
    pub pte_scan: PteScanParams,
    pub hint_fault: HintFaultParams,
    pub pmu: PmuParams,
    pub costs: ProfilingCosts,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ProfilerKind::ALL {
            assert_eq!(k.name().parse::<ProfilerKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<ProfilerKind>(&json).unwrap(), k);
        }
        assert!("bogus".parse::<ProfilerKind>().is_err());
    }
}
