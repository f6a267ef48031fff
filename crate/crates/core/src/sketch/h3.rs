//! H3 universal hashing over a bit matrix.
//!
//! A seed is an `n x m` bit matrix (one `m`-bit row per input bit). The hash of
//! `x` is the XOR of the rows selected by the set bits of `x`. Because the map
//! is linear over GF(2), it can be evaluated one input byte at a time through
//! precomputed 256-entry tables, which is what [`H3Hash::index`] does.

use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H3Hash {
    rows: Vec<u32>,
    output_bits: u32,
    tables: Vec<[u32; 256]>,
}

impl H3Hash {
    /// Build from explicit rows. Row `i` is the output for an input with only
    /// bit `i` set; rows are masked to `output_bits`.
    pub fn from_rows(rows: Vec<u32>, output_bits: u32) -> Self {
        assert!((1..=32).contains(&output_bits), "output_bits out of range");
        assert!(!rows.is_empty() && rows.len() <= 32, "input width out of range");
        let mask = mask(output_bits);
        let rows: Vec<u32> = rows.into_iter().map(|r| r & mask).collect();
        let tables = (0..rows.len().div_ceil(8))
            .map(|chunk| {
                let mut table = [0u32; 256];
                for byte in 1..256usize {
                    let low = byte.trailing_zeros() as usize;
                    let bit = chunk * 8 + low;
                    let row = rows.get(bit).copied().unwrap_or(0);
                    table[byte] = table[byte & (byte - 1)] ^ row;
                }
                table
            })
            .collect();
        H3Hash { rows, output_bits, tables }
    }

    pub fn random(input_bits: u32, output_bits: u32, rng: &mut impl Rng) -> Self {
        let rows = (0..input_bits).map(|_| rng.gen::<u32>()).collect();
        Self::from_rows(rows, output_bits)
    }

    pub fn input_bits(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn output_bits(&self) -> u32 {
        self.output_bits
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Hash a page index. Bits at or above the input width are ignored.
    #[inline]
    pub fn index(&self, page: u64) -> u32 {
        let mut x = page;
        let mut out = 0u32;
        for table in &self.tables {
            out ^= table[(x & 0xff) as usize];
            x >>= 8;
        }
        out
    }
}

fn mask(bits: u32) -> u32 {
    if bits == 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}
