//! Hotness-threshold policies.
//!
//! The dynamic policy keeps a percentile `p` and sets the threshold to the
//! histogram quantile `Q_F(1 - p)`, so roughly the top `p` of sketch entries
//! count as hot. Each period `p` is scaled by `(1 + B)^alpha / (1 + P)^beta`
//! (bandwidth utilization `B`, ping-pong ratio `P`) and clamped, or halved when
//! the previous period used its whole migration quota. A further halving
//! applies when the resulting threshold falls below the sketch error bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sketch::Histogram;
use crate::tiersim::{mb_per_s_to_pages, MigrationQuota};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    pub p_min: f64,
    pub p_max: f64,
    pub p_init: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Maximum migration rate in MB/s.
    pub m_quota: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams { p_min: 0.0001, p_max: 0.0156, p_init: 0.001, alpha: 1.0, beta: 2.0, m_quota: 256.0 }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.p_min && self.p_min <= self.p_init && self.p_init <= self.p_max && self.p_max < 1.0) {
            return Err(Error::Config("percentiles must satisfy 0 < p_min <= p_init <= p_max < 1".into()));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("alpha and beta must be finite".into()));
        }
        if !(self.m_quota > 0.0) {
            return Err(Error::Config("m_quota must be positive".into()));
        }
        Ok(())
    }

    pub fn quota_pages_per_second(&self) -> f64 {
        mb_per_s_to_pages(self.m_quota)
    }

    /// Migration budget for one period of `period_seconds`.
    pub fn quota_per_period(&self, period_seconds: f64) -> u64 {
        MigrationQuota::new(self.quota_pages_per_second(), period_seconds).per_epoch()
    }
}

/// Histogram quantile: the smallest bin upper edge `y` such that at least a
/// fraction `x` of entries lie below `y`.
pub fn quantile(hist: &Histogram, x: f64) -> Result<u64> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::Validation("quantile of an empty histogram".into()));
    }
    let mut cumulative = 0u64;
    for (bin, &count) in hist.counts().iter().enumerate() {
        cumulative += count;
        if cumulative as f64 >= x * total as f64 {
            return Ok(hist.upper_edge(bin));
        }
    }
    Ok(hist.upper_edge(hist.bins() - 1))
}

/// Inputs gathered over the period that just ended.
#[derive(Debug, Clone, Copy)]
pub struct PeriodStats<'a> {
    pub histogram: Option<&'a Histogram>,
    /// Bandwidth utilization `B` in `[0, 1]`.
    pub bandwidth: f64,
    /// Ping-pong ratio `P`: ping-pongs over promotions.
    pub pingpong: f64,
    /// Sketch error bound `E`.
    pub error_bound: u64,
    /// Pages migrated `M`.
    pub migrated: u64,
}

impl PeriodStats<'_> {
    pub fn idle() -> Self {
        PeriodStats { histogram: None, bandwidth: 0.0, pingpong: 0.0, error_bound: 0, migrated: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyState {
    pub p: f64,
    pub threshold: u32,
    pub quota_per_period: u64,
    pub last_bandwidth: f64,
    pub last_pingpong: f64,
    pub last_error_bound: u64,
    pub last_migrated: u64,
}

impl PolicyState {
    pub fn new(params: &PolicyParams, quota_per_period: u64) -> Self {
        PolicyState {
            p: params.p_init,
            threshold: 1,
            quota_per_period,
            last_bandwidth: 0.0,
            last_pingpong: 0.0,
            last_error_bound: 0,
            last_migrated: 0,
        }
    }
}

fn halve(p: f64, params: &PolicyParams) -> f64 {
    params.p_min.max(p / 2.0)
}

/// One period of the dynamic threshold adjustment. Without a histogram the
/// percentile still evolves but the threshold is left unchanged.
pub fn update_threshold(state: &mut PolicyState, stats: &PeriodStats<'_>, params: &PolicyParams) -> u32 {
    let mut p = state.p;
    if stats.migrated < state.quota_per_period {
        p *= (1.0 + stats.bandwidth).powf(params.alpha) / (1.0 + stats.pingpong).powf(params.beta);
        p = p.clamp(params.p_min, params.p_max);
    } else {
        p = halve(p, params);
    }
    if let Some(hist) = stats.histogram.filter(|h| h.total() > 0) {
        if quantile(hist, 1.0 - p).expect("nonempty") < stats.error_bound {
            p = halve(p, params);
        }
        state.threshold = quantile(hist, 1.0 - p).expect("nonempty").clamp(1, u32::MAX as u64) as u32;
    }
    state.p = p;
    state.last_bandwidth = stats.bandwidth;
    state.last_pingpong = stats.pingpong;
    state.last_error_bound = stats.error_bound;
    state.last_migrated = stats.migrated;
    state.threshold
}

/// A source of hotness thresholds for the simulation loop.
pub trait ThresholdPolicy: Send {
    fn threshold(&self) -> u32;

    /// Current percentile, for policies that keep one.
    fn percentile(&self) -> Option<f64> {
        None
    }

    /// Fold in one period's statistics and return the threshold for the next.
    fn update(&mut self, stats: &PeriodStats<'_>) -> u32;
}

#[derive(Debug, Clone)]
pub struct DynamicPolicy {
    params: PolicyParams,
    state: PolicyState,
}

impl DynamicPolicy {
    pub fn new(params: PolicyParams, period_seconds: f64) -> Result<Self> {
        params.validate()?;
        let quota = params.quota_per_period(period_seconds);
        Ok(DynamicPolicy { state: PolicyState::new(&params, quota), params })
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn params(&self) -> &PolicyParams {
        &self.params
    }
}

impl ThresholdPolicy for DynamicPolicy {
    fn threshold(&self) -> u32 {
        self.state.threshold
    }

    fn percentile(&self) -> Option<f64> {
        Some(self.state.p)
    }

    fn update(&mut self, stats: &PeriodStats<'_>) -> u32 {
        update_threshold(&mut self.state, stats, &self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPolicy {
    threshold: u32,
}

impl ThresholdPolicy for FixedPolicy {
    fn threshold(&self) -> u32 {
        self.threshold
    }

    fn update(&mut self, _stats: &PeriodStats<'_>) -> u32 {
        self.threshold
    }
}

pub fn fixed_threshold_policy(threshold: u32) -> Result<FixedPolicy> {
    if threshold == 0 {
        return Err(Error::Config("fixed threshold must be at least 1".into()));
    }
    Ok(FixedPolicy { threshold })
}
