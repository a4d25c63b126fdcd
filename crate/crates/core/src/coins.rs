//! Seeded, replayable streams of fair bits.
//!
//! Each stream is a ChaCha8 generator seeded from a 64-bit value. Bits are
//! taken from successive `u64` outputs, most significant bit first, so a
//! stream is reproducible on every platform.

use rand_chacha::rand_core::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chains::Coin;

/// Identifies the bit source; recorded in every report.
pub const GENERATOR: &str = "chacha8/u64-msb-first";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent 64-bit seed from `(seed, index)`. Used both for
/// per-level coin streams and for per-replicate seeds.
pub fn mix64(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_mul(GOLDEN) ^ 0x243F_6A88_85A3_08D3))
}

/// A stream of fair coins. Also keeps an FNV-1a style digest of every bit
/// it has produced, so two passes over the same seed can be compared.
#[derive(Debug, Clone)]
pub struct CoinStream {
    rng: ChaCha8Rng,
    word: u64,
    left: u32,
    drawn: u64,
    digest: u64,
}

impl CoinStream {
    pub fn new(seed: u64) -> Self {
        CoinStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            word: 0,
            left: 0,
            drawn: 0,
            digest: 0xCBF2_9CE4_8422_2325,
        }
    }

    #[inline]
    pub fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        self.left -= 1;
        let bit = (self.word >> self.left) & 1 == 1;
        self.drawn += 1;
        self.digest = (self.digest ^ bit as u64).wrapping_mul(0x0000_0100_0000_01B3);
        bit
    }

    #[inline]
    pub fn next_coin(&mut self) -> Coin {
        Coin::from_bit(self.next_bit())
    }

    pub fn fill(&mut self, coins: &mut [Coin]) {
        for c in coins {
            *c = self.next_coin();
        }
    }

    /// `bits` fair bits as an integer, first bit most significant.
    pub fn next_bits(&mut self, bits: u32) -> u64 {
        debug_assert!(bits <= 64);
        (0..bits).fold(0u64, |acc, _| (acc << 1) | self.next_bit() as u64)
    }

    /// Uniform on `0..m` by rejection on `ceil(log2 m)` bits.
    pub fn uniform_below(&mut self, m: u64) -> u64 {
        assert!(m >= 1);
        if m == 1 {
            return 0;
        }
        let bits = 64 - (m - 1).leading_zeros();
        loop {
            let x = self.next_bits(bits);
            if x < m {
                return x;
            }
        }
    }

    /// Bits produced so far.
    pub fn drawn(&self) -> u64 {
        self.drawn
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }
}

/// The coins of one CFTP level: `sweeps` rows of `width = n - 1` coins,
/// regenerated from `seed` whenever the level is replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoinTape {
    pub seed: u64,
    pub sweeps: u64,
    pub width: usize,
}

impl CoinTape {
    pub fn new(seed: u64, sweeps: u64, width: usize) -> Self {
        CoinTape { seed, sweeps, width }
    }

    /// Total coins in the tape.
    pub fn len(&self) -> u64 {
        self.sweeps * self.width as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A fresh stream positioned at the first coin.
    pub fn stream(&self) -> CoinStream {
        CoinStream::new(self.seed)
    }

    /// Calls `f` once per sweep with that sweep's coins.
    pub fn for_each_sweep(&self, mut f: impl FnMut(&[Coin])) -> CoinStream {
        let mut stream = self.stream();
        let mut buf = vec![Coin::ZERO; self.width];
        for _ in 0..self.sweeps {
            stream.fill(&mut buf);
            f(&buf);
        }
        stream
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_bit_exact() {
        let mut a = CoinStream::new(7);
        let mut b = CoinStream::new(7);
        let xs: Vec<bool> = (0..1000).map(|_| a.next_bit()).collect();
        let ys: Vec<bool> = (0..1000).map(|_| b.next_bit()).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.digest(), b.digest());
        assert_ne!(CoinStream::new(8).next_bits(64), CoinStream::new(7).next_bits(64));
    }

    #[test]
    fn bits_are_msb_first() {
        let word = ChaCha8Rng::seed_from_u64(3).next_u64();
        let mut s = CoinStream::new(3);
        assert_eq!(s.next_bits(64), word);
        assert_eq!(s.drawn(), 64);
    }

    #[test]
    fn mix_separates_indices() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| mix64(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(mix64(1, 0), mix64(0, 1));
    }

    #[test]
    fn uniform_below_stays_in_range_and_is_balanced() {
        let mut s = CoinStream::new(11);
        let mut counts = [0u32; 5];
        for _ in 0..50_000 {
            counts[s.uniform_below(5) as usize] += 1;
        }
        for c in counts {
            // 10_000 expected, sd = 89
            assert!((9_600..=10_400).contains(&c), "{counts:?}");
        }
        assert_eq!(s.uniform_below(1), 0);
    }

    #[test]
    fn tape_rows_are_reproducible() {
        let tape = CoinTape::new(99, 10, 4);
        let mut first = Vec::new();
        let s1 = tape.for_each_sweep(|c| first.extend_from_slice(c));
        let mut second = Vec::new();
        let s2 = tape.for_each_sweep(|c| second.extend_from_slice(c));
        assert_eq!(first, second);
        assert_eq!(first.len() as u64, tape.len());
        assert_eq!(s1.digest(), s2.digest());
    }
}
