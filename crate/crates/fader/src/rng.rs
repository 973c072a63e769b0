//! Seedable PRNG used everywhere randomness is needed.
//!
//! All sampling in this crate goes through [`Rng`], a xoshiro256** generator
//! seeded via splitmix64. The generator is fixed so that a given seed yields
//! the same byte stream on every platform and every run, which is what makes
//! dataset construction, training, and the synthetic generator reproducible.

/// FNV-1a 64-bit hash. Used for subword bucket hashing and for deriving
/// per-entity sampling streams from names.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xCBF29CE484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001B3);
    }
    hash
}

/// splitmix64 step; used to expand a single `u64` seed into generator state.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// xoshiro256** generator.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng { s }
    }

    /// Derives an independent child seed, used to give parallel units
    /// (entities, days, shards) their own streams without interleaving.
    pub fn derive(seed: u64, stream: u64) -> u64 {
        let mut sm = seed ^ stream.wrapping_mul(0xA24BAED4963EE407);
        splitmix64(&mut sm)
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1]
            .wrapping_mul(5)
            .rotate_left(7)
            .wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform f64 in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) without modulo bias (Lemire's method
    /// with rejection).
    pub fn gen_range(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "gen_range bound must be positive");
        let bound = bound as u64;
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            let (hi, lo) = mul_hi_lo(r, bound);
            if lo >= threshold {
                return hi as usize;
            }
        }
    }

    /// Uniform f64 in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.gen_range(i + 1);
            items.swap(i, j);
        }
    }

    /// Uniform sample of `k` items without replacement. Returns all items
    /// (in input order) when `k >= items.len()`; otherwise the sample keeps
    /// the shuffle order so callers get a deterministic sequence.
    pub fn sample<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        if k >= items.len() {
            return items.to_vec();
        }
        let mut idx: Vec<usize> = (0..items.len()).collect();
        // partial Fisher-Yates: the first k slots are a uniform sample
        for i in 0..k {
            let j = i + self.gen_range(items.len() - i);
            idx.swap(i, j);
        }
        idx[..k].iter().map(|&i| items[i].clone()).collect()
    }

    /// Poisson sample via Knuth's product method. Fine for the desk-scale
    /// rates used here (lambda up to a few hundred).
    pub fn poisson(&mut self, lambda: f64) -> usize {
        assert!(lambda >= 0.0);
        if lambda == 0.0 {
            return 0;
        }
        // split large lambdas so exp(-lambda) stays representable
        let mut remaining = lambda;
        let mut count = 0usize;
        while remaining > 500.0 {
            count += self.poisson_knuth(500.0);
            remaining -= 500.0;
        }
        count + self.poisson_knuth(remaining)
    }

    fn poisson_knuth(&mut self, lambda: f64) -> usize {
        let limit = (-lambda).exp();
        let mut k = 0usize;
        let mut p = 1.0;
        loop {
            p *= self.next_f64();
            if p <= limit {
                return k;
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Rng::new(1);
        let mut b = Rng::new(2);
        assert_ne!(
            (0..8).map(|_| a.next_u64()).collect::<Vec<_>>(),
            (0..8).map(|_| b.next_u64()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn gen_range_in_bounds() {
        let mut rng = Rng::new(7);
        for bound in [1usize, 2, 3, 10, 1000] {
            for _ in 0..200 {
                assert!(rng.gen_range(bound) < bound);
            }
        }
    }

    #[test]
    fn sample_undersupply_returns_all_in_order() {
        let mut rng = Rng::new(3);
        let items = vec![1, 2, 3];
        assert_eq!(rng.sample(&items, 10), vec![1, 2, 3]);
    }

    #[test]
    fn sample_is_subset_of_right_size() {
        let mut rng = Rng::new(9);
        let items: Vec<u32> = (0..20).collect();
        let s = rng.sample(&items, 5);
        assert_eq!(s.len(), 5);
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 5);
        assert!(s.iter().all(|x| items.contains(x)));
    }

    #[test]
    fn poisson_mean_close() {
        let mut rng = Rng::new(11);
        let lambda = 4.0;
        let n = 20_000;
        let total: usize = (0..n).map(|_| rng.poisson(lambda)).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - lambda).abs() < 0.1, "mean {mean}");
    }
}

fn mul_hi_lo(a: u64, b: u64) -> (u64, u64) {
    let wide = (a as u128) * (b as u128);
    ((wide >> 64) as u64, wide as u64)
}
