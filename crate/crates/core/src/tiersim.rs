//! Two-tier page placement with first-touch allocation, LRU-2Q cold page
//! detection, quota-limited migration and ping-pong accounting.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{AccessEvent, SimConfig, PAGE_SIZE};

/// Deterministic map keyed by page index (fixed-key SipHash).
pub type PageMap<V> = HashMap<u64, V, BuildHasherDefault<DefaultHasher>>;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tier {
    Fast,
    Slow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListKind {
    Active,
    Inactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PageMeta {
    pub tier: Tier,
    pub demoted_flag: bool,
    pub last_touch: u64,
    /// Fast-tier pages only.
    pub list_membership: Option<ListKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub fast_latency_ns: f64,
    pub slow_latency_ns: f64,
    pub migration_cost_ns_per_page: f64,
}

impl LatencyModel {
    pub fn from_config(cfg: &SimConfig, migration_cost_ns_per_page: f64) -> Self {
        LatencyModel {
            fast_latency_ns: cfg.fast_latency_ns,
            slow_latency_ns: cfg.slow_latency_ns,
            migration_cost_ns_per_page,
        }
    }

    pub fn access_ns(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Fast => self.fast_latency_ns,
            Tier::Slow => self.slow_latency_ns,
        }
    }
}

/// Convert a migration rate in MB/s to 4 KiB pages per second.
pub fn mb_per_s_to_pages(mb_per_s: f64) -> f64 {
    mb_per_s * (1024.0 * 1024.0) / PAGE_SIZE as f64
}

/// Per-epoch migration budget shared by promotions and demotions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationQuota {
    pub pages_per_second: f64,
    per_epoch: u64,
    consumed: u64,
}

impl MigrationQuota {
    pub fn new(pages_per_second: f64, epoch_seconds: f64) -> Self {
        let raw = pages_per_second * epoch_seconds;
        let per_epoch = (raw - 1e-9 * raw.abs().max(1.0)).ceil().max(0.0) as u64;
        MigrationQuota { pages_per_second, per_epoch, consumed: 0 }
    }

    pub fn unlimited() -> Self {
        MigrationQuota { pages_per_second: f64::INFINITY, per_epoch: u64::MAX, consumed: 0 }
    }

    pub fn per_epoch(&self) -> u64 {
        self.per_epoch
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn remaining(&self) -> u64 {
        self.per_epoch - self.consumed
    }

    fn consume(&mut self, n: u64) {
        debug_assert!(n <= self.remaining());
        self.consumed += n;
    }

    pub fn start_epoch(&mut self) {
        self.consumed = 0;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromotionResult {
    pub promoted: u64,
    pub pingpongs: u64,
    pub skipped_quota: u64,
    /// Entries that were not slow-resident when their turn came.
    pub skipped_not_slow: u64,
    /// Demotions made to open fast-tier space.
    pub demoted: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationCounters {
    pub promotions: u64,
    pub demotions: u64,
    pub pingpongs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessOutcome {
    pub tier: Tier,
    pub latency_ns: f64,
    pub first_touch: bool,
}

#[derive(Debug, Clone)]
struct Slot {
    page: u64,
    tier: Tier,
    demoted: bool,
    demoted_at: u64,
    last_touch: u64,
    list: Option<ListKind>,
    prev: u32,
    next: u32,
    slow_pos: u32,
}

/// Intrusive doubly linked list over slot ids; head is most recently used.
#[derive(Debug, Clone, Copy)]
struct LruList {
    head: u32,
    tail: u32,
    len: usize,
}

impl LruList {
    const fn new() -> Self {
        LruList { head: NIL, tail: NIL, len: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct TierState {
    fast_capacity: u64,
    slow_capacity: u64,
    fast_used: u64,
    slow_used: u64,
    index: PageMap<u32>,
    slots: Vec<Slot>,
    active: LruList,
    inactive: LruList,
    slow_resident: Vec<u64>,
    latency: LatencyModel,
    epoch: MigrationCounters,
    total: MigrationCounters,
    alloc_reserve: u64,
    pingpong_window: u64,
    clock: u64,
}

impl TierState {
    pub fn new(cfg: &SimConfig, latency: LatencyModel) -> Self {
        TierState {
            fast_capacity: cfg.fast_pages,
            slow_capacity: cfg.slow_pages,
            fast_used: 0,
            slow_used: 0,
            index: PageMap::default(),
            slots: Vec::new(),
            active: LruList::new(),
            inactive: LruList::new(),
            slow_resident: Vec::new(),
            latency,
            epoch: MigrationCounters::default(),
            total: MigrationCounters::default(),
            alloc_reserve: 0,
            pingpong_window: u64::MAX,
            clock: 0,
        }
    }

    /// Fast pages first-touch allocation leaves free for promotions.
    pub fn with_alloc_reserve(mut self, pages: u64) -> Self {
        self.alloc_reserve = pages.min(self.fast_capacity);
        self
    }

    /// A promotion counts as a ping-pong only within `cycles` of the page's
    /// last demotion.
    pub fn with_pingpong_window(mut self, cycles: u64) -> Self {
        self.pingpong_window = cycles;
        self
    }

    pub fn latency_model(&self) -> &LatencyModel {
        &self.latency
    }

    pub fn fast_free(&self) -> u64 {
        self.fast_capacity - self.fast_used
    }

    pub fn slow_free(&self) -> u64 {
        self.slow_capacity - self.slow_used
    }

    pub fn fast_used(&self) -> u64 {
        self.fast_used
    }

    pub fn slow_used(&self) -> u64 {
        self.slow_used
    }

    pub fn fast_capacity(&self) -> u64 {
        self.fast_capacity
    }

    pub fn active_len(&self) -> usize {
        self.active.len
    }

    pub fn inactive_len(&self) -> usize {
        self.inactive.len
    }

    /// Slow-resident pages in placement order.
    pub fn slow_resident_pages(&self) -> &[u64] {
        &self.slow_resident
    }

    pub fn tier_of(&self, page: u64) -> Option<Tier> {
        self.index.get(&page).map(|&s| self.slots[s as usize].tier)
    }

    pub fn page_meta(&self, page: u64) -> Option<PageMeta> {
        self.index.get(&page).map(|&s| {
            let slot = &self.slots[s as usize];
            PageMeta {
                tier: slot.tier,
                demoted_flag: slot.demoted,
                last_touch: slot.last_touch,
                list_membership: slot.list,
            }
        })
    }

    /// Fast-tier pages from most to least recently used, per list.
    pub fn list_pages(&self, kind: ListKind) -> Vec<u64> {
        let list = self.list(kind);
        let mut out = Vec::with_capacity(list.len);
        let mut cur = list.head;
        while cur != NIL {
            out.push(self.slots[cur as usize].page);
            cur = self.slots[cur as usize].next;
        }
        out
    }

    /// Migration counters since the previous call.
    pub fn take_epoch_counters(&mut self) -> MigrationCounters {
        std::mem::take(&mut self.epoch)
    }

    pub fn epoch_counters(&self) -> MigrationCounters {
        self.epoch
    }

    pub fn total_counters(&self) -> MigrationCounters {
        self.total
    }

    /// Serve one access, allocating on first touch (fast tier while it has
    /// room, then slow).
    pub fn access(&mut self, event: &AccessEvent) -> Result<AccessOutcome> {
        let (slot, first_touch) = match self.index.get(&event.page) {
            Some(&s) => (s, false),
            None => (self.allocate(event.page)?, true),
        };
        let s = slot as usize;
        self.slots[s].last_touch = event.cycle;
        self.clock = self.clock.max(event.cycle);
        let tier = self.slots[s].tier;
        if tier == Tier::Fast && !first_touch {
            self.unlink(slot);
            self.push_front(ListKind::Active, slot);
        }
        Ok(AccessOutcome { tier, latency_ns: self.latency.access_ns(tier), first_touch })
    }

    fn allocate(&mut self, page: u64) -> Result<u32> {
        let tier = if self.fast_free() > self.alloc_reserve {
            Tier::Fast
        } else if self.slow_free() > 0 {
            Tier::Slow
        } else {
            return Err(Error::Simulation(format!("address space exhausted: page {page} does not fit in either tier")));
        };
        let id = self.slots.len() as u32;
        self.slots.push(Slot {
            page,
            tier,
            demoted: false,
            demoted_at: 0,
            last_touch: 0,
            list: None,
            prev: NIL,
            next: NIL,
            slow_pos: NIL,
        });
        self.index.insert(page, id);
        match tier {
            Tier::Fast => {
                self.fast_used += 1;
                self.push_front(ListKind::Inactive, id);
            }
            Tier::Slow => self.add_slow(id),
        }
        Ok(id)
    }

    /// Promote slow-resident pages in order while quota lasts. A full fast tier
    /// first gives up its coldest page, which costs one more unit of quota.
    pub fn promote(&mut self, pages: &[u64], quota: &mut MigrationQuota) -> PromotionResult {
        let mut result = PromotionResult::default();
        for &page in pages {
            let Some(&slot) = self.index.get(&page) else {
                result.skipped_not_slow += 1;
                continue;
            };
            if self.slots[slot as usize].tier != Tier::Slow {
                result.skipped_not_slow += 1;
                continue;
            }
            let need = if self.fast_free() == 0 { 2 } else { 1 };
            if quota.remaining() < need || (need == 2 && self.coldest_fast().is_none()) {
                result.skipped_quota += 1;
                continue;
            }
            self.remove_slow(slot);
            if need == 2 {
                let victim = self.coldest_fast().expect("checked above");
                self.demote_slot(victim);
                quota.consume(1);
                result.demoted += 1;
            }
            let window = self.pingpong_window;
            let now = self.clock;
            let s = &mut self.slots[slot as usize];
            s.tier = Tier::Fast;
            if s.demoted && now.saturating_sub(s.demoted_at) <= window {
                result.pingpongs += 1;
                self.epoch.pingpongs += 1;
                self.total.pingpongs += 1;
            }
            s.demoted = false;
            self.fast_used += 1;
            self.push_front(ListKind::Active, slot);
            quota.consume(1);
            result.promoted += 1;
            self.epoch.promotions += 1;
            self.total.promotions += 1;
        }
        result
    }

    /// Demote coldest fast pages until `target_free` fast pages are free or
    /// the quota (or slow capacity) runs out. Returns the number demoted.
    pub fn demote_cold(&mut self, target_free: u64, quota: &mut MigrationQuota) -> u64 {
        let mut demoted = 0;
        while self.fast_free() < target_free && quota.remaining() > 0 && self.slow_free() > 0 {
            let Some(victim) = self.coldest_fast() else { break };
            self.demote_slot(victim);
            quota.consume(1);
            demoted += 1;
        }
        demoted
    }

    fn coldest_fast(&self) -> Option<u32> {
        [self.inactive.tail, self.active.tail].into_iter().find(|&t| t != NIL)
    }

    fn demote_slot(&mut self, slot: u32) {
        self.unlink(slot);
        self.fast_used -= 1;
        let s = &mut self.slots[slot as usize];
        s.tier = Tier::Slow;
        s.demoted = true;
        s.demoted_at = self.clock;
        self.add_slow(slot);
        self.epoch.demotions += 1;
        self.total.demotions += 1;
    }

    fn add_slow(&mut self, slot: u32) {
        self.slots[slot as usize].slow_pos = self.slow_resident.len() as u32;
        self.slow_resident.push(self.slots[slot as usize].page);
        self.slow_used += 1;
    }

    fn remove_slow(&mut self, slot: u32) {
        let pos = self.slots[slot as usize].slow_pos as usize;
        self.slow_resident.swap_remove(pos);
        if let Some(&moved) = self.slow_resident.get(pos) {
            let moved_slot = self.index[&moved];
            self.slots[moved_slot as usize].slow_pos = pos as u32;
        }
        self.slots[slot as usize].slow_pos = NIL;
        self.slow_used -= 1;
    }

    fn list(&self, kind: ListKind) -> &LruList {
        match kind {
            ListKind::Active => &self.active,
            ListKind::Inactive => &self.inactive,
        }
    }

    fn list_mut(&mut self, kind: ListKind) -> &mut LruList {
        match kind {
            ListKind::Active => &mut self.active,
            ListKind::Inactive => &mut self.inactive,
        }
    }

    fn push_front(&mut self, kind: ListKind, slot: u32) {
        let old_head = self.list(kind).head;
        {
            let s = &mut self.slots[slot as usize];
            s.list = Some(kind);
            s.prev = NIL;
            s.next = old_head;
        }
        if old_head != NIL {
            self.slots[old_head as usize].prev = slot;
        }
        let list = self.list_mut(kind);
        list.head = slot;
        if list.tail == NIL {
            list.tail = slot;
        }
        list.len += 1;
    }

    fn unlink(&mut self, slot: u32) {
        let (kind, prev, next) = {
            let s = &self.slots[slot as usize];
            match s.list {
                Some(kind) => (kind, s.prev, s.next),
                None => return,
            }
        };
        if prev != NIL {
            self.slots[prev as usize].next = next;
        } else {
            self.list_mut(kind).head = next;
        }
        if next != NIL {
            self.slots[next as usize].prev = prev;
        } else {
            self.list_mut(kind).tail = prev;
        }
        self.list_mut(kind).len -= 1;
        let s = &mut self.slots[slot as usize];
        s.list = None;
        s.prev = NIL;
        s.next = NIL;
    }

    /// Structural consistency; used by tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let fast = self.slots.iter().filter(|s| s.tier == Tier::Fast).count() as u64;
        let slow = self.slots.iter().filter(|s| s.tier == Tier::Slow).count() as u64;
        if fast != self.fast_used || slow != self.slow_used {
            return Err(format!("occupancy mismatch: fast {fast}/{} slow {slow}/{}", self.fast_used, self.slow_used));
        }
        if self.fast_used > self.fast_capacity || self.slow_used > self.slow_capacity {
            return Err("capacity exceeded".into());
        }
        if self.active.len + self.inactive.len != fast as usize {
            return Err("lists do not cover the fast tier".into());
        }
        let listed = self.list_pages(ListKind::Active).len() + self.list_pages(ListKind::Inactive).len();
        if listed != fast as usize {
            return Err("list walk length mismatch".into());
        }
        if self.slow_resident.len() as u64 != slow {
            return Err("slow resident index mismatch".into());
        }
        for s in &self.slots {
            match s.tier {
                Tier::Fast if s.demoted => return Err(format!("fast page {} carries demoted flag", s.page)),
                Tier::Fast if s.list.is_none() => return Err(format!("fast page {} not listed", s.page)),
                Tier::Slow if s.list.is_some() => return Err(format!("slow page {} listed", s.page)),
                _ => {}
            }
        }
        Ok(())
    }
}
