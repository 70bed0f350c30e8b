//! Breadth-first exploration of Erdős–Rényi graphs encoded as a walk.
//!
//! At step `k` one active vertex is explored: its `X_k` neutral neighbours
//! become active and the walk moves by `X_k - 1`. When no vertex is active a
//! neutral one is activated first, so each component is an excursion of the
//! walk above its running minimum.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationRecord {
    pub n: usize,
    pub p: f64,
    /// `walk[k] = S_k`, with `S_0 = 0`.
    pub walk: Vec<i64>,
    /// Vertices per excursion, in exploration order. The last one may be
    /// partial when the exploration was cut at `max_steps`.
    pub excursion_sizes: Vec<usize>,
    pub steps_taken: usize,
}

/// Unexplored, inactive vertices with O(1) removal.
struct NeutralSet {
    list: Vec<u32>,
    pos: Vec<u32>,
}

const GONE: u32 = u32::MAX;

impl NeutralSet {
    fn full(n: usize) -> Self {
        Self {
            list: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
        }
    }

    fn len(&self) -> usize {
        self.list.len()
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != GONE
    }

    fn remove(&mut self, v: u32) {
        let i = self.pos[v as usize] as usize;
        let last = *self.list.last().expect("nonempty");
        self.list.swap_remove(i);
        if last != v {
            self.pos[last as usize] = i as u32;
        }
        self.pos[v as usize] = GONE;
    }

    /// Removes and returns the entries at `positions` (ascending).
    fn take_positions(&mut self, positions: &[usize], out: &mut Vec<u32>) {
        let start = out.len();
        out.extend(positions.iter().map(|&i| self.list[i]));
        for idx in (start..out.len()).rev() {
            self.remove(out[idx]);
        }
    }
}

/// Source of the neutral neighbours of an explored vertex.
trait Neighbours {
    fn discover(&mut self, v: u32, neutral: &mut NeutralSet, out: &mut Vec<u32>);
    fn next_root(&mut self, neutral: &NeutralSet) -> u32;
}

/// Lazily revealed `G(n, p)`: each (explored, neutral) pair is examined once.
struct RandomGraph<'a, R: Rng + ?Sized> {
    skip: Option<Geometric>,
    rng: &'a mut R,
    positions: Vec<usize>,
}

impl<R: Rng + ?Sized> Neighbours for RandomGraph<'_, R> {
    fn discover(&mut self, _v: u32, neutral: &mut NeutralSet, out: &mut Vec<u32>) {
        let Some(skip) = self.skip else { return };
        self.positions.clear();
        let len = neutral.len() as u64;
        let mut i = 0u64;
        loop {
            i = match i.checked_add(skip.sample(self.rng)) {
                Some(j) if j < len => j,
                _ => break,
            };
            self.positions.push(i as usize);
            i += 1;
        }
        neutral.take_positions(&self.positions, out);
    }

    fn next_root(&mut self, neutral: &NeutralSet) -> u32 {
        neutral.list[self.rng.random_range(0..neutral.len())]
    }
}

/// Explicit graph given by adjacency lists.
struct FixedGraph {
    adjacency: Vec<Vec<u32>>,
    next: u32,
}

impl Neighbours for FixedGraph {
    fn discover(&mut self, v: u32, neutral: &mut NeutralSet, out: &mut Vec<u32>) {
        for &w in &self.adjacency[v as usize] {
            if neutral.contains(w) {
                neutral.remove(w);
                out.push(w);
            }
        }
    }

    fn next_root(&mut self, neutral: &NeutralSet) -> u32 {
        while !neutral.contains(self.next) {
            self.next += 1;
        }
        self.next
    }
}

fn run_exploration(n: usize, p: f64, max_steps: usize, graph: &mut impl Neighbours) -> ExplorationRecord {
    let mut neutral = NeutralSet::full(n);
    let mut active: VecDeque<u32> = VecDeque::new();
    let mut walk = Vec::with_capacity(max_steps + 1);
    walk.push(0i64);
    let mut found = Vec::new();
    let mut s = 0i64;
    for _ in 0..max_steps {
        if active.is_empty() {
            let root = graph.next_root(&neutral);
            neutral.remove(root);
            active.push_back(root);
        }
        let v = active.pop_front().expect("active vertex");
        found.clear();
        graph.discover(v, &mut neutral, &mut found);
        active.extend(found.iter().copied());
        s += found.len() as i64 - 1;
        walk.push(s);
    }
    let excursion_sizes = excursions_from_walk(&walk);
    ExplorationRecord {
        n,
        p,
        steps_taken: walk.len() - 1,
        walk,
        excursion_sizes,
    }
}

/// Splits a walk into excursions above its running minimum: an excursion
/// ends at each step where the walk reaches a new minimum.
pub fn excursions_from_walk(walk: &[i64]) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut min = 0i64;
    let mut current = 0usize;
    for &s in walk.iter().skip(1) {
        current += 1;
        if s < min {
            min = s;
            sizes.push(current);
            current = 0;
        }
    }
    if current > 0 {
        sizes.push(current);
    }
    sizes
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("{p} is not a probability")));
    }
    Ok(())
}

/// Explores `max_steps` vertices of a fresh `G(n, p)`.
pub fn explore<R: Rng + ?Sized>(n: usize, p: f64, max_steps: usize, rng: &mut R) -> Result<ExplorationRecord> {
    check_p(p)?;
    if max_steps > n {
        return Err(invalid("max_steps", format!("{max_steps} exceeds n = {n}")));
    }
    if n > u32::MAX as usize - 1 {
        return Err(Error::TooLarge(n));
    }
    let skip = if p > 0.0 {
        Some(Geometric::new(p).map_err(|e| invalid("p", e.to_string()))?)
    } else {
        None
    };
    let mut graph = RandomGraph {
        skip,
        rng,
        positions: Vec::new(),
    };
    Ok(run_exploration(n, p, max_steps, &mut graph))
}

/// Explores the whole graph on `[n]` with the given edges; new components are
/// started from the smallest unexplored vertex.
pub fn explore_edges(n: usize, edges: &[(u32, u32)]) -> Result<ExplorationRecord> {
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u as usize >= n || v as usize >= n {
            return Err(Error::ParticleOutOfRange {
                particle: u.max(v) as usize,
                n,
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u as usize));
        }
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    let mut graph = FixedGraph { adjacency, next: 0 };
    Ok(run_exploration(n, f64::NAN, n, &mut graph))
}

/// Walk from the binomial recursion `S_k = S_{k-1} + X_k - 1` with
/// `X_k ~ Bin(n - k - S_{k-1}, p)` (trial counts clamped at 0). Matches the
/// exploration in law up to the end of the first excursion.
pub fn binomial_walk<R: Rng + ?Sized>(n: usize, p: f64, max_steps: usize, rng: &mut R) -> Result<Vec<i64>> {
    check_p(p)?;
    let mut walk = Vec::with_capacity(max_steps + 1);
    walk.push(0i64);
    let mut s = 0i64;
    for k in 1..=max_steps as i64 {
        let trials = (n as i64 - k - s).max(0) as u64;
        let x = Binomial::new(trials, p)
            .map_err(|e| invalid("p", e.to_string()))?
            .sample(rng) as i64;
        s += x - 1;
        walk.push(s);
    }
    Ok(walk)
}

/// `sup_{k <= 3 n eps} |S_k - k (gamma eps - k / 2n)| / (n eps^2)`.
pub fn tube_deviation(record: &ExplorationRecord, gamma: f64, eps: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&gamma) {
        return Err(invalid("gamma", format!("{gamma} outside [-1, 1]")));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("{eps} must be positive")));
    }
    let n = record.n as f64;
    let horizon = (3.0 * n * eps).floor() as usize;
    if record.walk.len() <= horizon {
        return Err(Error::RecordTooShort {
            needed: horizon + 1,
            available: record.walk.len(),
        });
    }
    let scale = n * eps * eps;
    let sup = record.walk[..=horizon]
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let k = k as f64;
            (s as f64 - k * (gamma * eps - k / (2.0 * n))).abs()
        })
        .fold(0.0, f64::max);
    Ok(sup / scale)
}

/// Sizes of the two largest components of one `G(n, p)` draw; the second is
/// 0 when there is a single component.
pub fn largest_two_components<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<(usize, usize)> {
    let record = explore(n, p, n, rng)?;
    let mut first = 0;
    let mut second = 0;
    for &s in &record.excursion_sizes {
        if s > first {
            second = first;
            first = s;
        } else if s > second {
            second = s;
        }
    }
    Ok((first, second))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowBounds {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub varsigma_minus: f64,
    pub varsigma_plus: f64,
}

/// Closed-form window for the time at which a dynamic graph on `n` vertices
/// (edges at rate `1/big_n`) first holds a component of size `alpha`:
/// `-N ln(1 - (1 + (1 ± delta) alpha / 2n) / n)` and
/// `-N ln(1 - (1 - (1 ∓ delta) alpha / 2n) / n)`.
pub fn gelation_window_bounds(n: usize, big_n: usize, alpha: usize, delta: f64) -> Result<WindowBounds> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("{delta} outside (0, 1)")));
    }
    if !(alpha < n && n <= big_n) {
        return Err(invalid("n", format!("need alpha < n <= N, got {alpha}, {n}, {big_n}")));
    }
    let (nf, a, bn) = (n as f64, alpha as f64, big_n as f64);
    let time = |x: f64| -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::LogDomain(1.0 - x));
        }
        Ok(-bn * (-x).ln_1p())
    };
    let sigma = |sign: f64| time((1.0 + 0.5 * (1.0 + sign * delta) * a / nf) / nf);
    let varsigma = |sign: f64| time((1.0 - 0.5 * (1.0 - sign * delta) * a / nf) / nf);
    Ok(WindowBounds {
        sigma_minus: sigma(-1.0)?,
        sigma_plus: sigma(1.0)?,
        varsigma_minus: varsigma(-1.0)?,
        varsigma_plus: varsigma(1.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::ClusterForest;
    use crate::stream::bernoulli_pairs;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn empty_graph_walks_down() {
        let r = explore(10, 0.0, 10, &mut rng(1)).unwrap();
        assert_eq!(r.walk, (0..=10).map(|k| -k).collect::<Vec<i64>>());
        assert_eq!(r.excursion_sizes, vec![1; 10]);
        assert_eq!(largest_two_components(5, 0.0, &mut rng(1)).unwrap(), (1, 1));
    }

    #[test]
    fn complete_graph_is_one_excursion() {
        let r = explore(8, 1.0, 8, &mut rng(2)).unwrap();
        assert_eq!(r.excursion_sizes, vec![8]);
        assert_eq!(r.walk[1], 6);
        assert_eq!(largest_two_components(4, 1.0, &mut rng(2)).unwrap(), (4, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(explore(5, 1.5, 5, &mut rng(0)).is_err());
        assert!(explore(5, 0.5, 6, &mut rng(0)).is_err());
        let r = explore(100, 0.01, 10, &mut rng(0)).unwrap();
        assert!(matches!(tube_deviation(&r, 1.0, 0.1), Err(Error::RecordTooShort { .. })));
        assert!(explore_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn triangle_partition_law() {
        // enumeration over the 8 edge subsets of K_3 at p = 1/2
        let reps = 1_000_000;
        let mut r = rng(3);
        let mut counts = [0usize; 3]; // {3}, {2,1}, {1,1,1}
        for _ in 0..reps {
            let rec = explore(3, 0.5, 3, &mut r).unwrap();
            match rec.excursion_sizes.len() {
                1 => counts[0] += 1,
                2 => counts[1] += 1,
                _ => counts[2] += 1,
            }
        }
        let expect = [0.5, 0.375, 0.125];
        let p = 0.5f64;
        assert!((p * p * (3.0 - 2.0 * p) - expect[0]).abs() < 1e-15);
        for (c, e) in counts.iter().zip(expect) {
            let f = *c as f64 / reps as f64;
            let sd = (e * (1.0 - e) / reps as f64).sqrt();
            assert!((f - e).abs() < 4.0 * sd, "{f} vs {e}");
        }
    }

    #[test]
    fn recursion_matches_exploration_in_first_excursion() {
        // law of the first excursion length, both ways
        let (n, p) = (60, 1.3 / 60.0);
        let reps = 200_000;
        let mut r = rng(4);
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for _ in 0..reps {
            let rec = explore(n, p, n, &mut r).unwrap();
            *a.entry(rec.excursion_sizes[0].min(20)).or_insert(0usize) += 1;
            let w = binomial_walk(n, p, n, &mut r).unwrap();
            let first = w.iter().position(|&s| s == -1).unwrap();
            *b.entry(first.min(20)).or_insert(0usize) += 1;
        }
        let keys: Vec<usize> = a.keys().chain(b.keys()).copied().collect();
        let mut chi2 = 0.0;
        let mut dof = 0;
        for k in keys.into_iter().collect::<std::collections::BTreeSet<_>>() {
            let x = *a.get(&k).unwrap_or(&0) as f64;
            let y = *b.get(&k).unwrap_or(&0) as f64;
            if x + y > 0.0 {
                chi2 += (x - y).powi(2) / (x + y);
                dof += 1;
            }
        }
        let crit = statrs::distribution::ContinuousCDF::inverse_cdf(
            &statrs::distribution::ChiSquared::new((dof - 1) as f64).unwrap(),
            0.999,
        );
        assert!(chi2 < crit, "chi2 {chi2} dof {dof}");
    }

    #[test]
    fn excursion_splitting() {
        assert_eq!(excursions_from_walk(&[0, 1, 0, -1, -2, -1, -3]), vec![3, 1, 2]);
        assert_eq!(excursions_from_walk(&[0, 2, 1]), vec![2]);
        assert!(excursions_from_walk(&[0]).is_empty());
    }

    fn component_sizes(n: usize, edges: &[(u32, u32)]) -> Vec<usize> {
        let mut f = ClusterForest::new(n).unwrap();
        for &(u, v) in edges {
            f.try_link(u as usize, v as usize, n + 1).unwrap();
        }
        let mut s: Vec<usize> = f.solution_cluster_sizes().collect();
        s.sort_unstable();
        s
    }

    proptest! {
        #[test]
        fn excursions_are_components(n in 1usize..=12, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let edges = bernoulli_pairs(n, p, &mut rng(seed));
            let rec = explore_edges(n, &edges).unwrap();
            let mut sizes = rec.excursion_sizes.clone();
            sizes.sort_unstable();
            prop_assert_eq!(sizes, component_sizes(n, &edges));
            prop_assert!(rec.walk.windows(2).all(|w| w[1] - w[0] >= -1));
            prop_assert_eq!(rec.excursion_sizes.iter().sum::<usize>(), n);
        }

        #[test]
        fn random_exploration_invariants(n in 1usize..200, p in 0.0f64..0.05, seed in any::<u64>()) {
            let rec = explore(n, p, n, &mut rng(seed)).unwrap();
            prop_assert_eq!(rec.walk[0], 0);
            prop_assert!(rec.walk.windows(2).all(|w| w[1] - w[0] >= -1));
            prop_assert_eq!(rec.excursion_sizes.iter().sum::<usize>(), n);
            // full exploration ends at minus the number of components
            prop_assert_eq!(*rec.walk.last().unwrap(), -(rec.excursion_sizes.len() as i64));
        }
    }

    #[test]
    fn largest_component_is_monotone_in_p() {
        // coupled thinning: keep each edge of G(n, p') with probability p / p'
        let n = 1000;
        let (p, p2) = (1.1 / n as f64, 1.6 / n as f64);
        let mut r = rng(5);
        for _ in 0..100 {
            let dense = bernoulli_pairs(n, p2, &mut r);
            let sparse: Vec<_> = dense.iter().copied().filter(|_| r.random::<f64>() < p / p2).collect();
            let big = *component_sizes(n, &dense).last().unwrap();
            let small = *component_sizes(n, &sparse).last().unwrap();
            assert!(big >= small);
        }
    }

    #[test]
    fn parabola_has_zero_deviation() {
        // flat walk against the parabola: worst point k = 3 n eps, |k(eps - k/2n)| = 1.5 n eps^2
        let n = 10_000usize;
        let rec = ExplorationRecord {
            n,
            p: 0.0,
            walk: vec![0; n + 1],
            excursion_sizes: vec![],
            steps_taken: n,
        };
        let d = tube_deviation(&rec, 1.0, 0.1).unwrap();
        assert!((d - 1.5).abs() < 1e-9, "{d}");
        // the parabola rounded to integers
        let eps = 0.1;
        let scale = n as f64 * eps * eps;
        let walk: Vec<i64> = (0..=n)
            .map(|k| (k as f64 * (eps - k as f64 / (2.0 * n as f64))).round() as i64)
            .collect();
        let rec = ExplorationRecord {
            n,
            p: 0.0,
            walk: walk.clone(),
            excursion_sizes: vec![],
            steps_taken: n,
        };
        assert!(tube_deviation(&rec, 1.0, eps).unwrap() <= 0.5 / scale);
        let shifted = ExplorationRecord {
            walk: walk.iter().map(|s| s + scale as i64 + 1).collect(),
            ..rec
        };
        assert!(tube_deviation(&shifted, 1.0, eps).unwrap() >= 1.0);
    }

    #[test]
    fn window_bounds_first_order() {
        let n = 1_000_000usize;
        let alpha = (n as f64).powf(0.75).round() as usize;
        let b = gelation_window_bounds(n, n, alpha, 0.5).unwrap();
        let r = alpha as f64 / n as f64;
        assert!((b.sigma_minus - (1.0 + 0.25 * r)).abs() < 1e-4);
        assert!((b.sigma_plus - (1.0 + 0.75 * r)).abs() < 1e-4);
        assert!(b.sigma_minus <= b.sigma_plus && b.varsigma_minus <= b.varsigma_plus);
        // vanishing threshold: everything collapses to -N ln(1 - 1/n)
        let b = gelation_window_bounds(1000, 1000, 1, 0.5).unwrap();
        let base = -1000.0 * (-1e-3f64).ln_1p();
        for v in [b.sigma_minus, b.sigma_plus, b.varsigma_minus, b.varsigma_plus] {
            assert!((v - base).abs() < 2e-3);
        }
        assert!(gelation_window_bounds(10, 10, 10, 0.5).is_err());
        assert!(gelation_window_bounds(10, 10, 3, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn window_bounds_ordered(n in 10usize..100_000, frac in 0.0f64..0.9, delta in 0.01f64..0.99) {
            let alpha = ((n as f64 * frac) as usize).clamp(1, n - 1);
            if let Ok(b) = gelation_window_bounds(n, n, alpha, delta) {
                prop_assert!(b.sigma_minus <= b.sigma_plus);
                prop_assert!(b.varsigma_minus <= b.varsigma_plus);
            }
        }
    }
}
