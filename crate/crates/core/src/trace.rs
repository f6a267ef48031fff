//! Access events, simulation-wide configuration, the seeded generator, and the
//! on-disk trace formats.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! "TIERTRC1" | version: u32 (=1) | count: u64 | count x { cycle: u64, page: u32, op: u8 }
//! ```
//!
//! The text layout has one `cycle,page,R|W` record per line; blank lines and
//! anything after `#` are ignored. Files ending in `.csv` or `.txt` use the text
//! layout, everything else the binary one.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TRACE_MAGIC: &[u8; 8] = b"TIERTRC1";
pub const TRACE_VERSION: u32 = 1;
pub const TRACE_HEADER_LEN: usize = 8 + 4 + 8;
pub const TRACE_RECORD_LEN: usize = 8 + 4 + 1;

/// Bytes per simulated page.
pub const PAGE_SIZE: u64 = 4096;

/// Name of the generator behind [`SimRng`], recorded in report metadata.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.3), per-purpose streams";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    Read,
    Write,
}

impl Op {
    fn code(self) -> u8 {
        match self {
            Op::Read => 0,
            Op::Write => 1,
        }
    }

    fn from_code(code: u8) -> Option<Op> {
        match code {
            0 => Some(Op::Read),
            1 => Some(Op::Write),
            _ => None,
        }
    }
}

/// One memory reference as seen by the memory system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccessEvent {
    /// Logical time; nondecreasing within a trace.
    pub cycle: u64,
    /// 4 KiB page index.
    pub page: u64,
    pub op: Op,
}

impl AccessEvent {
    pub fn new(cycle: u64, page: u64, op: Op) -> Self {
        AccessEvent { cycle, page, op }
    }

    pub fn read(cycle: u64, page: u64) -> Self {
        Self::new(cycle, page, Op::Read)
    }

    pub fn write(cycle: u64, page: u64) -> Self {
        Self::new(cycle, page, Op::Write)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub fast_pages: u64,
    pub slow_pages: u64,
    pub fast_latency_ns: f64,
    pub slow_latency_ns: f64,
    /// Width of a device-side page address. Traces store 32-bit pages, so
    /// values above 32 are rejected.
    pub page_bits: u32,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            fast_pages: 8192,
            slow_pages: 16384,
            fast_latency_ns: 120.0,
            slow_latency_ns: 430.0,
            page_bits: 32,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fast_pages == 0 || self.slow_pages == 0 {
            return Err(Error::Config("fast_pages and slow_pages must be at least 1".into()));
        }
        if !(self.fast_latency_ns > 0.0) || !(self.slow_latency_ns > self.fast_latency_ns) {
            return Err(Error::Config("latencies must satisfy 0 < fast_latency_ns < slow_latency_ns".into()));
        }
        if self.page_bits == 0 || self.page_bits > 32 {
            return Err(Error::Config("page_bits must be in 1..=32".into()));
        }
        Ok(())
    }

    /// Number of distinct page indices the address space admits.
    pub fn address_space_pages(&self) -> u64 {
        1u64 << self.page_bits
    }
}

/// Seeded generator shared by every randomized component.
///
/// Each consumer derives its own stream with [`SimRng::stream`], so adding
/// draws in one component never perturbs another.
#[derive(Debug, Clone)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn seed_from(seed: u64) -> Self {
        SimRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent generator for a named purpose under the same seed.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SimRng(rng)
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Stream identifiers handed to [`SimRng::stream`].
pub mod streams {
    pub const SKETCH_SEEDS: u64 = 1;
    pub const WORKLOAD: u64 = 2;
    pub const HINT_FAULT: u64 = 3;
    pub const PMU: u64 = 4;
}

fn is_text_path(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref(),
        Some("csv") | Some("txt")
    )
}

/// Read a trace, picking the layout from the file extension.
pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<AccessEvent>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    if is_text_path(path) {
        parse_text(BufReader::new(file))
    } else {
        let mut bytes = Vec::new();
        BufReader::new(file).read_to_end(&mut bytes)?;
        decode_binary(&bytes)
    }
}

/// Write a trace, picking the layout from the file extension.
pub fn write_trace(events: &[AccessEvent], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    validate_events(events)?;
    let mut out = BufWriter::new(File::create(path)?);
    if is_text_path(path) {
        for ev in events {
            let op = match ev.op {
                Op::Read => 'R',
                Op::Write => 'W',
            };
            writeln!(out, "{},{},{}", ev.cycle, ev.page, op)?;
        }
    } else {
        out.write_all(&encode_binary(events)?)?;
    }
    out.flush()?;
    Ok(())
}

fn validate_events(events: &[AccessEvent]) -> Result<()> {
    for (i, pair) in events.windows(2).enumerate() {
        if pair[1].cycle < pair[0].cycle {
            return Err(Error::Validation(format!("events not sorted by cycle at index {}", i + 1)));
        }
    }
    if let Some(ev) = events.iter().find(|ev| ev.page > u32::MAX as u64) {
        return Err(Error::Validation(format!("page {} does not fit in 32 bits", ev.page)));
    }
    Ok(())
}

/// Serialize events into the binary layout.
pub fn encode_binary(events: &[AccessEvent]) -> Result<Vec<u8>> {
    validate_events(events)?;
    let mut buf = Vec::with_capacity(TRACE_HEADER_LEN + events.len() * TRACE_RECORD_LEN);
    buf.extend_from_slice(TRACE_MAGIC);
    buf.extend_from_slice(&TRACE_VERSION.to_le_bytes());
    buf.extend_from_slice(&(events.len() as u64).to_le_bytes());
    for ev in events {
        buf.extend_from_slice(&ev.cycle.to_le_bytes());
        buf.extend_from_slice(&(ev.page as u32).to_le_bytes());
        buf.push(ev.op.code());
    }
    Ok(buf)
}

/// Parse the binary layout.
pub fn decode_binary(bytes: &[u8]) -> Result<Vec<AccessEvent>> {
    let parse_err =
        |offset: usize, reason: &str| Error::TraceParse { offset: offset as u64, reason: reason.to_string() };
    if bytes.len() < TRACE_HEADER_LEN {
        return Err(parse_err(bytes.len(), "truncated header"));
    }
    if &bytes[..8] != TRACE_MAGIC {
        return Err(parse_err(0, "bad magic"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != TRACE_VERSION {
        return Err(parse_err(8, &format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let body = &bytes[TRACE_HEADER_LEN..];
    let expected = count.checked_mul(TRACE_RECORD_LEN as u64).ok_or_else(|| parse_err(12, "record count overflows"))?;
    if (body.len() as u64) < expected {
        let complete = body.len() / TRACE_RECORD_LEN;
        return Err(parse_err(TRACE_HEADER_LEN + complete * TRACE_RECORD_LEN, "truncated record"));
    }
    if body.len() as u64 > expected {
        return Err(parse_err(TRACE_HEADER_LEN + expected as usize, "trailing bytes after last record"));
    }

    let mut events = Vec::with_capacity(count as usize);
    let mut last_cycle = 0u64;
    for (i, rec) in body.chunks_exact(TRACE_RECORD_LEN).enumerate() {
        let offset = TRACE_HEADER_LEN + i * TRACE_RECORD_LEN;
        let cycle = u64::from_le_bytes(rec[0..8].try_into().unwrap());
        let page = u32::from_le_bytes(rec[8..12].try_into().unwrap()) as u64;
        let op = Op::from_code(rec[12]).ok_or_else(|| parse_err(offset + 12, &format!("bad op code {}", rec[12])))?;
        if cycle < last_cycle {
            return Err(parse_err(offset, "cycle goes backwards"));
        }
        last_cycle = cycle;
        events.push(AccessEvent { cycle, page, op });
    }
    Ok(events)
}

/// Parse the line-oriented layout. Offsets in errors are byte offsets of the
/// offending line.
pub fn parse_text(reader: impl BufRead) -> Result<Vec<AccessEvent>> {
    let mut events = Vec::new();
    let mut offset = 0u64;
    let mut last_cycle = 0u64;
    for line in reader.lines() {
        let line = line?;
        let line_offset = offset;
        offset += line.len() as u64 + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |reason: String| Error::TraceParse { offset: line_offset, reason };
        let mut fields = content.split(',').map(str::trim);
        let (Some(cycle), Some(page), Some(op), None) = (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(err(format!("expected `cycle,page,R|W`, got `{content}`")));
        };
        let cycle: u64 = cycle.parse().map_err(|_| err(format!("bad cycle `{cycle}`")))?;
        let page: u64 = page.parse().map_err(|_| err(format!("bad page `{page}`")))?;
        if page > u32::MAX as u64 {
            return Err(err(format!("page {page} does not fit in 32 bits")));
        }
        let op = match op {
            "R" | "r" => Op::Read,
            "W" | "w" => Op::Write,
            other => return Err(err(format!("bad op `{other}`"))),
        };
        if cycle < last_cycle {
            return Err(err("cycle goes backwards".into()));
        }
        last_cycle = cycle;
        events.push(AccessEvent { cycle, page, op });
    }
    Ok(events)
}
