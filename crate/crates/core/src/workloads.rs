//! Synthetic trace generators: hot-region GUPS and permuted Zipf.
//!
//! Both emit one event per cycle starting at cycle 0, so their output is
//! already sorted. Generators are pure functions of their parameters and the RNG.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{AccessEvent, Op, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GupsSpec {
    pub total_pages: u64,
    pub hot_fraction: f64,
    pub hot_access_prob: f64,
    /// First page of the hot region; random when unset. The region wraps.
    pub hot_start: Option<u64>,
    /// Cycle at which the hot region moves to a disjoint range.
    pub shift_at: Option<u64>,
    pub read_fraction: f64,
    pub events: u64,
    /// Touch every page once, in order, before the random phase.
    pub init_pass: bool,
}

impl Default for GupsSpec {
    fn default() -> Self {
        GupsSpec {
            total_pages: 16_384,
            hot_fraction: 0.1,
            hot_access_prob: 0.9,
            hot_start: None,
            shift_at: None,
            read_fraction: 0.5,
            events: 1_000_000,
            init_pass: false,
        }
    }
}

impl GupsSpec {
    pub fn hot_len(&self) -> u64 {
        ((self.total_pages as f64 * self.hot_fraction).round() as u64).clamp(1, self.total_pages.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_pages == 0 {
            return Err(Error::Config("gups.total_pages must be positive".into()));
        }
        if !(self.hot_fraction > 0.0 && self.hot_fraction < 1.0) {
            return Err(Error::Config("gups.hot_fraction must lie in (0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.hot_access_prob) || !(0.0..=1.0).contains(&self.read_fraction) {
            return Err(Error::Config("gups probabilities must lie in [0, 1]".into()));
        }
        if self.shift_at.is_some() && (self.hot_fraction > 0.5 || 2 * self.hot_len() > self.total_pages) {
            return Err(Error::Config("hot region larger than half the pages cannot move to a disjoint range".into()));
        }
        Ok(())
    }
}

/// Hot region `[start, start + len)` modulo the page count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HotRegion {
    pub start: u64,
    pub len: u64,
    pub total: u64,
}

impl HotRegion {
    pub fn contains(&self, page: u64) -> bool {
        (page + self.total - self.start) % self.total < self.len
    }

    pub fn page(&self, offset: u64) -> u64 {
        (self.start + offset) % self.total
    }

    pub fn pages(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.page(i))
    }
}

/// The GUPS trace plus the hot region in force before and after the shift.
#[derive(Debug, Clone)]
pub struct GupsTrace {
    pub events: Vec<AccessEvent>,
    pub regions: Vec<(u64, HotRegion)>,
}

impl GupsTrace {
    /// Region active at `cycle`.
    pub fn region_at(&self, cycle: u64) -> HotRegion {
        self.regions.iter().rev().find(|(from, _)| *from <= cycle).map(|(_, r)| *r).unwrap_or(self.regions[0].1)
    }
}

pub fn gen_gups(spec: &GupsSpec, rng: &mut impl Rng) -> Result<GupsTrace> {
    spec.validate()?;
    let total = spec.total_pages;
    let len = spec.hot_len();
    let start = spec.hot_start.map(|s| s % total).unwrap_or_else(|| rng.gen_range(0..total));
    let mut region = HotRegion { start, len, total };
    let mut regions = vec![(0, region)];
    let moved = spec.shift_at.map(|at| {
        let offset = rng.gen_range(0..=total - 2 * len);
        (at, HotRegion { start: (start + len + offset) % total, len, total })
    });

    let init = if spec.init_pass { total } else { 0 };
    let mut events = Vec::with_capacity((init + spec.events) as usize);
    for page in 0..init {
        events.push(AccessEvent::new(page, page, draw_op(rng, spec.read_fraction)));
    }
    for i in 0..spec.events {
        let cycle = init + i;
        if let Some((at, next)) = moved {
            if cycle == at.max(init) && region != next {
                region = next;
                regions.push((cycle, next));
            }
        }
        let page = if rng.gen_bool(spec.hot_access_prob) {
            region.page(rng.gen_range(0..len))
        } else {
            rng.gen_range(0..total)
        };
        events.push(AccessEvent::new(cycle, page, draw_op(rng, spec.read_fraction)));
    }
    Ok(GupsTrace { events, regions })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZipfPhase {
    pub at_cycle: u64,
    /// Seed of the rank-to-page permutation used from `at_cycle` on.
    pub perm_seed: u64,
    /// New exponent from `at_cycle` on; unchanged when unset.
    #[serde(default)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZipfSpec {
    pub total_pages: u64,
    pub exponent: f64,
    pub events: u64,
    pub phase_shifts: Vec<ZipfPhase>,
    pub read_fraction: f64,
    pub init_pass: bool,
}

impl Default for ZipfSpec {
    fn default() -> Self {
        ZipfSpec {
            total_pages: 16_384,
            exponent: 1.2,
            events: 1_000_000,
            phase_shifts: Vec::new(),
            read_fraction: 0.5,
            init_pass: false,
        }
    }
}

impl ZipfSpec {
    pub fn validate(&self) -> Result<()> {
        if self.total_pages == 0 {
            return Err(Error::Config("zipf.total_pages must be positive".into()));
        }
        let exponents = std::iter::once(self.exponent).chain(self.phase_shifts.iter().filter_map(|p| p.exponent));
        for s in exponents {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("zipf exponent must be positive, got {s}")));
            }
        }
        if !(0.0..=1.0).contains(&self.read_fraction) {
            return Err(Error::Config("zipf.read_fraction must lie in [0, 1]".into()));
        }
        if self.phase_shifts.windows(2).any(|w| w[0].at_cycle > w[1].at_cycle) {
            return Err(Error::Config("zipf phase shifts must be in cycle order".into()));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over ranks `0..n` with weight `(rank + 1)^-s`.
#[derive(Debug, Clone)]
pub struct ZipfTable {
    cdf: Vec<f64>,
}

impl ZipfTable {
    pub fn new(n: u64, exponent: f64) -> Self {
        let mut acc = 0.0;
        let cdf = (1..=n)
            .map(|k| {
                acc += (k as f64).powf(-exponent);
                acc
            })
            .collect();
        ZipfTable { cdf }
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    /// Probability of `rank`.
    pub fn probability(&self, rank: usize) -> f64 {
        let total = *self.cdf.last().unwrap_or(&1.0);
        let below = if rank == 0 { 0.0 } else { self.cdf[rank - 1] };
        (self.cdf[rank] - below) / total
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let u = rng.gen::<f64>() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

fn permutation(n: u64, rng: &mut impl Rng) -> Vec<u64> {
    let mut perm: Vec<u64> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

pub fn gen_zipf(spec: &ZipfSpec, rng: &mut impl Rng) -> Result<Vec<AccessEvent>> {
    spec.validate()?;
    let n = spec.total_pages;
    let mut table = ZipfTable::new(n, spec.exponent);
    let mut perm = permutation(n, rng);
    let init = if spec.init_pass { n } else { 0 };
    let mut events = Vec::with_capacity((init + spec.events) as usize);
    for page in 0..init {
        events.push(AccessEvent::new(page, page, draw_op(rng, spec.read_fraction)));
    }
    let mut phases = spec.phase_shifts.iter().peekable();
    for i in 0..spec.events {
        let cycle = init + i;
        while let Some(phase) = phases.next_if(|p| p.at_cycle <= cycle) {
            perm = permutation(n, &mut SimRng::seed_from(phase.perm_seed));
            if let Some(s) = phase.exponent {
                table = ZipfTable::new(n, s);
            }
        }
        let page = perm[table.sample(rng)];
        events.push(AccessEvent::new(cycle, page, draw_op(rng, spec.read_fraction)));
    }
    Ok(events)
}

fn draw_op(rng: &mut impl Rng, read_fraction: f64) -> Op {
    if rng.gen_bool(read_fraction) {
        Op::Read
    } else {
        Op::Write
    }
}
