//! Exponential pair-activation clocks.
//!
//! Every unordered pair of `n` vertices carries an exponential clock of rate
//! `1/N`. Instead of materializing the `n(n-1)/2` clocks, the stream draws the
//! gaps sequentially: after `k` activations the next one comes after an
//! `Exp((M - k)/N)` time and hits a uniform not-yet-activated pair.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use rustc_hash::FxHashSet;

/// Number of unordered pairs among `n` vertices.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Probability that a given pair has been activated by time `t` when clocks
/// have rate `1/big_n`.
pub fn activation_probability(t: f64, big_n: usize) -> f64 {
    -(-t / big_n as f64).exp_m1()
}

/// Edge set of an Erdős–Rényi graph `G(n, p)`, in increasing `(u, v)` order
/// with `u < v`. Costs `O(edges)` through geometric skips.
pub fn bernoulli_pairs<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let total = pair_count(n);
    let mut pairs = Vec::new();
    if p <= 0.0 || total == 0 {
        return pairs;
    }
    let mut keys = Vec::new();
    if p >= 1.0 {
        keys.extend(0..total);
    } else {
        let skip = Geometric::new(p).expect("p in (0, 1)");
        let mut idx: u64 = 0;
        loop {
            let s = skip.sample(rng);
            idx = match idx.checked_add(s) {
                Some(i) if i < total => i,
                _ => break,
            };
            keys.push(idx);
            idx += 1;
        }
    }
    // walk rows of the upper triangle to decode linear indices
    let mut row = 0u64;
    let mut row_start = 0u64;
    let nn = n as u64;
    pairs.reserve(keys.len());
    for &k in &keys {
        while k >= row_start + (nn - 1 - row) {
            row_start += nn - 1 - row;
            row += 1;
        }
        pairs.push((row as u32, (row + 1 + (k - row_start)) as u32));
    }
    pairs
}

#[derive(Debug, Clone)]
pub struct ActivationStream {
    n: usize,
    rate_scale: f64,
    total_pairs: u64,
    // sorted keys of pairs activated in bulk (see `with_prefix`)
    prefix: Vec<u64>,
    activated: FxHashSet<u64>,
    emitted: u64,
    clock: f64,
}

impl ActivationStream {
    /// Stream over `n` vertices with clocks of rate `1/big_n`, starting at time 0.
    pub fn new(n: usize, big_n: usize) -> Self {
        Self {
            n,
            rate_scale: big_n as f64,
            total_pairs: pair_count(n),
            prefix: Vec::new(),
            activated: FxHashSet::default(),
            emitted: 0,
            clock: 0.0,
        }
    }

    /// Stream positioned at time `t`, with the activations of `[0, t]` drawn in
    /// one go (each pair independently with probability `1 - e^{-t/N}`).
    ///
    /// Returns the stream and the activated pairs, in increasing key order. The
    /// order of activations before `t` is not recorded, so this is only a
    /// faithful replacement for processes whose state at `t` does not depend
    /// on that order.
    pub fn with_prefix<R: Rng + ?Sized>(
        n: usize,
        big_n: usize,
        t: f64,
        rng: &mut R,
    ) -> (Self, Vec<(u32, u32)>) {
        let mut stream = Self::new(n, big_n);
        stream.clock = t;
        let pairs = bernoulli_pairs(n, activation_probability(t, big_n), rng);
        let nn = n as u64;
        stream.prefix = pairs.iter().map(|&(u, v)| u as u64 * nn + v as u64).collect();
        stream.emitted = pairs.len() as u64;
        (stream, pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Activations emitted so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn is_exhausted(&self) -> bool {
        self.emitted >= self.total_pairs
    }

    fn seen(&self, key: u64) -> bool {
        self.activated.contains(&key) || self.prefix.binary_search(&key).is_ok()
    }

    /// Next activation time and pair, or `None` once every pair has rung.
    pub fn next_activation<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<(f64, (u32, u32))> {
        if self.is_exhausted() {
            return None;
        }
        let remaining = (self.total_pairs - self.emitted) as f64;
        let gap: f64 = Exp1.sample(rng);
        self.clock += gap * self.rate_scale / remaining;
        let n = self.n as u32;
        loop {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let (u, v) = (a.min(b), a.max(b));
            let key = u as u64 * self.n as u64 + v as u64;
            if !self.seen(key) {
                self.activated.insert(key);
                self.emitted += 1;
                return Some((self.clock, (u, v)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_vertices_emit_one_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let reps = 100_000;
        let mut total = 0.0;
        for _ in 0..reps {
            let mut s = ActivationStream::new(2, 2);
            let (t, pair) = s.next_activation(&mut rng).unwrap();
            assert_eq!(pair, (0, 1));
            assert!(s.next_activation(&mut rng).is_none());
            total += t;
        }
        // Exp(1/2): mean 2, sd 2
        let mean = total / reps as f64;
        assert!((mean - 2.0).abs() < 4.0 * 2.0 / (reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn first_activation_among_three_is_exp1() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reps = 100_000;
        let mean = (0..reps)
            .map(|_| ActivationStream::new(3, 3).next_activation(&mut rng).unwrap().0)
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 1.0).abs() < 4.0 / (reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn each_pair_emitted_once_and_times_increase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = ActivationStream::new(6, 6);
        let mut seen = std::collections::HashSet::new();
        let mut last = 0.0;
        while let Some((t, p)) = s.next_activation(&mut rng) {
            assert!(t > last);
            last = t;
            assert!(seen.insert(p));
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn activations_by_time_one_match_binomial_mean() {
        // M(1 - e^{-t/N}) at N = 10^4, t = 1
        let n = 10_000;
        let m = pair_count(n) as f64;
        let p = activation_probability(1.0, n);
        let expect = m * p;
        let sd = (m * p * (1.0 - p)).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let reps = 50;
        let mut total = 0.0;
        for _ in 0..reps {
            let mut s = ActivationStream::new(n, n);
            let mut count = 0u64;
            while let Some((t, _)) = s.next_activation(&mut rng) {
                if t > 1.0 {
                    break;
                }
                count += 1;
            }
            total += count as f64;
        }
        let mean = total / reps as f64;
        assert!((expect - 4999.25).abs() < 0.01, "{expect}");
        assert!((mean - expect).abs() < 3.0 * sd / (reps as f64).sqrt(), "{mean} vs {expect}");
    }

    #[test]
    fn prefix_decodes_all_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut s, pairs) = ActivationStream::with_prefix(5, 5, f64::INFINITY, &mut rng);
        assert_eq!(pairs.len(), 10);
        let expect: Vec<(u32, u32)> = (0..5u32)
            .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
            .collect();
        assert_eq!(pairs, expect);
        assert!(s.next_activation(&mut rng).is_none());
    }

    #[test]
    fn prefix_marginals_are_bernoulli() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 6;
        let t = 2.0;
        let p = activation_probability(t, n);
        let reps = 40_000;
        let mut hits = [0u32; 36];
        for _ in 0..reps {
            let (mut s, pairs) = ActivationStream::with_prefix(n, n, t, &mut rng);
            for &(u, v) in &pairs {
                hits[u as usize * n + v as usize] += 1;
            }
            // the continuation never repeats a prefix pair
            let mut seen: std::collections::HashSet<_> = pairs.into_iter().collect();
            while let Some((tt, pr)) = s.next_activation(&mut rng) {
                assert!(tt > t);
                assert!(seen.insert(pr));
            }
        }
        let sd = (p * (1.0 - p) / reps as f64).sqrt();
        for u in 0..n {
            for v in u + 1..n {
                let f = hits[u * n + v] as f64 / reps as f64;
                assert!((f - p).abs() < 4.5 * sd, "pair ({u},{v}): {f} vs {p}");
            }
        }
    }
}
