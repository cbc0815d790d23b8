//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! Each segment covers `segment_len` consecutive integers and stores one bit
//! per odd candidate. Base primes up to `sqrt(hi)` are produced once by a
//! plain sieve and reused by every segment, so memory stays bounded by the
//! segment size no matter how far the scan runs.

use crate::error::{Error, Result};

/// Default number of integers covered by one segment (2^22).
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 22;

/// Default memory budget for materialized tables (1 GiB).
pub const DEFAULT_MEM_BUDGET: u64 = 1 << 30;

/// Knobs shared by every sieve entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    pub segment_len: u64,
    pub mem_budget_bytes: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            segment_len: DEFAULT_SEGMENT_LEN,
            mem_budget_bytes: DEFAULT_MEM_BUDGET,
        }
    }
}

impl SieveConfig {
    pub fn with_budget_mb(mb: u64) -> Self {
        Self {
            mem_budget_bytes: mb.saturating_mul(1 << 20),
            ..Self::default()
        }
    }

    fn segment_len(&self) -> u64 {
        // even length keeps every segment start on the same parity
        self.segment_len.max(64) & !1
    }
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// All primes `<= limit` by a plain odd-only sieve.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    // composite[i] describes the odd number 2i + 1
    let mut composite = vec![false; n / 2 + 1];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < composite.len() {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_prime_count(limit) as usize);
    primes.push(2);
    primes.extend(
        (1..composite.len())
            .filter(|&i| !composite[i] && 2 * i + 1 <= n)
            .map(|i| (2 * i + 1) as u64),
    );
    primes
}

/// Upper bound on the number of primes in an interval of `len` integers.
pub(crate) fn estimate_prime_count(len: u64) -> u64 {
    if len < 20 {
        return len / 2 + 2;
    }
    let l = len as f64;
    (2.0 * l / l.ln()) as u64 + 2
}

/// Sieves the odd numbers of `[seg_lo, seg_lo + len)` and returns the primes
/// in increasing order. `base` must contain every prime up to the square root
/// of the segment end.
fn sieve_segment(seg_lo: u64, len: u64, base: &[u64], words: &mut Vec<u64>, out: &mut Vec<u64>) {
    let seg_hi = seg_lo + len; // exclusive
    let first_odd = seg_lo | 1;
    if first_odd >= seg_hi {
        if seg_lo <= 2 && 2 < seg_hi {
            out.push(2);
        }
        return;
    }
    let count = (seg_hi - first_odd + 1) / 2;
    words.clear();
    words.resize(count.div_ceil(64) as usize, 0);

    for &p in base.iter().skip(1) {
        let pp = p * p;
        if pp >= seg_hi {
            break;
        }
        let mut start = if pp >= first_odd { pp } else { first_odd.div_ceil(p) * p };
        if start % 2 == 0 {
            start += p;
        }
        let mut idx = (start - first_odd) / 2;
        while idx < count {
            words[(idx / 64) as usize] |= 1 << (idx % 64);
            idx += p;
        }
    }
    // 1 is not prime
    if first_odd == 1 {
        words[0] |= 1;
    }
    if seg_lo <= 2 && 2 < seg_hi {
        out.push(2);
    }
    for (w, &word) in words.iter().enumerate() {
        let mut free = !word;
        while free != 0 {
            let bit = free.trailing_zeros() as u64;
            let idx = w as u64 * 64 + bit;
            if idx >= count {
                break;
            }
            out.push(first_odd + 2 * idx);
            free &= free - 1;
        }
    }
}

/// Streams the primes of `[lo, hi]` in increasing order, one segment at a time.
pub struct PrimeStream {
    base: Vec<u64>,
    next_lo: u64,
    hi: u64,
    segment_len: u64,
    words: Vec<u64>,
    buffer: Vec<u64>,
    pos: usize,
}

impl PrimeStream {
    pub fn new(lo: u64, hi: u64, config: &SieveConfig) -> Result<Self> {
        if hi >= u64::MAX / 2 {
            return Err(Error::InvalidParameter(format!("upper bound {hi} is too large")));
        }
        let root = isqrt(hi);
        let base_bytes = root / 2 + estimate_prime_count(root) * 8;
        if base_bytes > config.mem_budget_bytes {
            return Err(Error::MemoryBudget {
                requested: base_bytes,
                budget: config.mem_budget_bytes,
            });
        }
        Ok(Self {
            base: small_primes(root),
            next_lo: lo,
            hi,
            segment_len: config.segment_len(),
            words: Vec::new(),
            buffer: Vec::new(),
            pos: 0,
        })
    }

    fn refill(&mut self) -> bool {
        while self.next_lo <= self.hi {
            let len = self.segment_len.min(self.hi - self.next_lo + 1);
            self.buffer.clear();
            self.pos = 0;
            sieve_segment(self.next_lo, len, &self.base, &mut self.words, &mut self.buffer);
            self.next_lo += len;
            if !self.buffer.is_empty() {
                return true;
            }
        }
        false
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pos >= self.buffer.len() && !self.refill() {
            return None;
        }
        let p = self.buffer[self.pos];
        self.pos += 1;
        Some(p)
    }
}

/// Primality bitmask plus sorted prime list for the closed range `[lo, hi]`.
///
/// Only odd numbers get a bit; 2 is answered from the range bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    first_odd: u64,
    bits: Vec<u64>,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && n <= self.hi
    }

    /// Primality of `n`. Panics if `n` lies outside `[lo, hi]`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(self.contains(n), "{n} outside table [{}, {}]", self.lo, self.hi);
        if n % 2 == 0 {
            return n == 2;
        }
        let idx = (n - self.first_odd) / 2;
        self.bits[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    /// Number of primes in `[a, b]` (clamped to the table range).
    pub fn count_between(&self, a: u64, b: u64) -> usize {
        if a > b {
            return 0;
        }
        let start = self.primes.partition_point(|&p| p < a);
        let end = self.primes.partition_point(|&p| p <= b);
        end.saturating_sub(start)
    }

    /// Primes in the half-open-on-the-left interval `(a, b]`.
    pub fn primes_in(&self, a: u64, b: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p <= a);
        let end = self.primes.partition_point(|&p| p <= b);
        &self.primes[start..end.max(start)]
    }
}

/// Sieves `[lo, hi]` into a [`PrimeTable`].
pub fn sieve_range(lo: u64, hi: u64, config: &SieveConfig) -> Result<PrimeTable> {
    if lo >= hi {
        return Err(Error::InvalidParameter(format!(
            "empty sieve range: lo = {lo} must be below hi = {hi}"
        )));
    }
    let len = hi - lo + 1;
    let requested = len / 16 + 8 + estimate_prime_count(len) * 8 + config.segment_len() / 16;
    if requested > config.mem_budget_bytes {
        return Err(Error::MemoryBudget {
            requested,
            budget: config.mem_budget_bytes,
        });
    }
    let primes: Vec<u64> = PrimeStream::new(lo, hi, config)?.collect();
    let first_odd = lo | 1;
    let odd_count = if first_odd > hi { 0 } else { (hi - first_odd) / 2 + 1 };
    let mut bits = vec![0u64; odd_count.div_ceil(64).max(1) as usize];
    for &p in primes.iter().filter(|&&p| p != 2) {
        let idx = (p - first_odd) / 2;
        bits[(idx / 64) as usize] |= 1 << (idx % 64);
    }
    Ok(PrimeTable {
        lo,
        hi,
        first_odd,
        bits,
        primes,
    })
}
