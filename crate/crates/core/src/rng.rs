//! Seeded randomness with named streams.
//!
//! Every sampled experiment draws from a PCG-XSL-RR 128/64 generator
//! (`pcg64`). The generator state is the 64-bit seed widened to 128 bits and
//! the stream selector is the 64-bit FNV-1a hash of the stream name, so each
//! sub-experiment gets its own independent sequence from one user seed.
//! Bounded integers use rejection sampling on whole 64-bit outputs.

use rand_core::Rng;
use rand_pcg::Pcg64;

pub struct Stream {
    inner: Pcg64,
}

fn fnv1a(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl Stream {
    pub fn new(seed: u64, name: &str) -> Self {
        Stream {
            inner: Pcg64::new(seed as u128, fnv1a(name) as u128),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range");
        if hi - lo == u64::MAX {
            return self.next_u64();
        }
        lo + self.below(hi - lo + 1)
    }

    /// `k` distinct values from `pool`, in draw order (partial Fisher–Yates).
    pub fn choose<T: Copy>(&mut self, pool: &[T], k: usize) -> Vec<T> {
        assert!(k <= pool.len());
        let mut v = pool.to_vec();
        for i in 0..k {
            let j = i + self.below((v.len() - i) as u64) as usize;
            v.swap(i, j);
        }
        v.truncate(k);
        v
    }
}
