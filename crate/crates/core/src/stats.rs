//! Observables over replica ensembles, with standard errors, and the
//! comparison primitives (tolerance bands, total variation, chi-square).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};
use crate::sim::{run_replicas, Sample, SimConfig, SimResult, TypicalSnapshot};
use crate::trees::{canonicalize, Canonical};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Sample mean and its standard error (0 for fewer than two samples).
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self { mean, stderr: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            stderr: (var / n).sqrt(),
        }
    }

    /// Frequency of `hits` among `n` trials with its binomial standard error.
    pub fn proportion(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

/// A check passes when the deviation is inside `abs` or inside `sigmas`
/// standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub sigmas: f64,
}

impl Tolerance {
    pub fn new(abs: f64, sigmas: f64) -> Self {
        Self { abs, sigmas }
    }

    pub fn passes(&self, deviation: f64, stderr: f64) -> bool {
        let d = deviation.abs();
        d <= self.abs || d <= self.sigmas * stderr
    }

    /// Same tolerance with both parts multiplied by `factor`.
    pub fn widened(&self, factor: f64) -> Self {
        Self {
            abs: self.abs * factor,
            sigmas: self.sigmas * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub empirical: f64,
    pub stderr: f64,
    pub theoretical: f64,
    pub tolerance: String,
    pub pass: bool,
}

impl Check {
    pub fn compare(label: impl Into<String>, est: Estimate, theoretical: f64, tol: Tolerance) -> Self {
        Self {
            label: label.into(),
            empirical: est.mean,
            stderr: est.stderr,
            theoretical,
            tolerance: format!("abs {} or {} sigma", tol.abs, tol.sigmas),
            pass: tol.passes(est.mean - theoretical, est.stderr),
        }
    }

    /// Deviation within `abs + sigmas * stderr`.
    pub fn compare_additive(label: impl Into<String>, est: Estimate, theoretical: f64, abs: f64, sigmas: f64) -> Self {
        Self {
            label: label.into(),
            empirical: est.mean,
            stderr: est.stderr,
            theoretical,
            tolerance: format!("abs {abs} + {sigmas} sigma"),
            pass: (est.mean - theoretical).abs() <= abs + sigmas * est.stderr,
        }
    }

    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            empirical: value,
            stderr: 0.0,
            theoretical: bound,
            tolerance: "at most".into(),
            pass: value <= bound,
        }
    }

    pub fn at_least(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            empirical: value,
            stderr: 0.0,
            theoretical: bound,
            tolerance: "at least".into(),
            pass: value >= bound,
        }
    }

    /// `value` in `[lo, hi]`; `theoretical` records the midpoint.
    pub fn in_range(label: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            label: label.into(),
            empirical: value,
            stderr: 0.0,
            theoretical: 0.5 * (lo + hi),
            tolerance: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub observable: String,
    /// Formula or law the empirical values are compared with.
    pub reference: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ComparisonReport {
    pub fn new(observable: impl Into<String>, reference: impl Into<String>) -> Self {
        Self {
            observable: observable.into(),
            reference: reference.into(),
            checks: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Report that failed before producing checks (e.g. an error).
    pub fn failed(observable: impl Into<String>, reference: impl Into<String>, why: impl Into<String>) -> Self {
        let mut r = Self::new(observable, reference);
        r.pass = false;
        r.note(why);
        r
    }
}

/// Replicas of one configuration differing only by seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaEnsemble {
    pub config: SimConfig,
    pub results: Vec<SimResult>,
}

impl ReplicaEnsemble {
    pub fn run(config: &SimConfig, replicas: usize) -> Result<Self> {
        if replicas == 0 {
            return Err(invalid("replicas", "must be at least 1"));
        }
        Ok(Self {
            config: config.clone(),
            results: run_replicas(config, replicas)?,
        })
    }

    pub fn replica_count(&self) -> usize {
        self.results.len()
    }

    fn n(&self) -> f64 {
        self.config.n_particles as f64
    }

    fn samples_at(&self, t: f64) -> Result<Vec<&Sample>> {
        self.results
            .iter()
            .map(|r| r.sample_at(t).ok_or(Error::TimeNotSampled(t)))
            .collect()
    }

    fn typical_at(&self, t: f64) -> Result<Vec<&TypicalSnapshot>> {
        self.results
            .iter()
            .map(|r| r.typical_at(t).ok_or(Error::TimeNotSampled(t)))
            .collect()
    }
}

/// Per-replica `c_t(m) = count(m) / N`, averaged.
pub fn estimate_concentrations(
    ens: &ReplicaEnsemble,
    t: f64,
    m_range: impl IntoIterator<Item = usize>,
) -> Result<BTreeMap<usize, Estimate>> {
    let samples = ens.samples_at(t)?;
    let n = ens.n();
    let mut out = BTreeMap::new();
    for m in m_range {
        if m == 0 || m > ens.config.m_cap {
            return Err(Error::CapTooSmall {
                cap: ens.config.m_cap,
                k: m,
            });
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.count(m) as f64 / n).collect();
        out.insert(m, Estimate::from_samples(&xs));
    }
    Ok(out)
}

/// Mass in solution `n_t = |S(t)| / N`.
pub fn estimate_mass(ens: &ReplicaEnsemble, t: f64) -> Result<Estimate> {
    let n = ens.n();
    let xs: Vec<f64> = ens.samples_at(t)?.iter().map(|s| s.n_in_solution as f64 / n).collect();
    Ok(Estimate::from_samples(&xs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauStatistics {
    pub mean: f64,
    pub stderr: f64,
    pub first_times: Vec<f64>,
    pub first_sizes: Vec<usize>,
    /// Whether each first time lies in the closed-form window.
    pub in_window: Vec<bool>,
}

/// First gelation time and size per replica, checked against the window
/// bounds with parameter `delta`.
pub fn tau_statistics(ens: &ReplicaEnsemble, delta: f64) -> Result<TauStatistics> {
    let first: Vec<_> = ens
        .results
        .iter()
        .map(|r| {
            r.gelation_events
                .first()
                .copied()
                .ok_or_else(|| Error::InsufficientData(format!("replica with seed {} never gelled", r.seed)))
        })
        .collect::<Result<_>>()?;
    let times: Vec<f64> = first.iter().map(|e| e.time).collect();
    let est = Estimate::from_samples(&times);
    let big_n = ens.config.n_particles;
    let alpha = ens.results[0].threshold;
    let window = crate::exploration::gelation_window_bounds(big_n, big_n, alpha, delta)?;
    Ok(TauStatistics {
        mean: est.mean,
        stderr: est.stderr,
        in_window: times
            .iter()
            .map(|&t| (window.sigma_minus..=window.sigma_plus).contains(&t))
            .collect(),
        first_times: times,
        first_sizes: first.iter().map(|e| e.fallen_size).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStatistics {
    /// `(tau_{i+1} - tau_i) N n_{tau_i}^2 / alpha`.
    pub gaps: Vec<f64>,
    /// `(n_{tau_i} - n_{tau_{i+1}}) N / alpha`.
    pub drops: Vec<f64>,
}

impl GapStatistics {
    pub fn fraction_in(values: &[f64], lo: f64, hi: f64) -> f64 {
        values.iter().filter(|v| (lo..=hi).contains(*v)).count() as f64 / values.len() as f64
    }
}

/// Normalized gaps and drops after every gelation time in `[lo, hi]` that
/// is followed by another one.
pub fn gap_statistics(ens: &ReplicaEnsemble, window: (f64, f64)) -> Result<GapStatistics> {
    let big_n = ens.n();
    let mut gaps = Vec::new();
    let mut drops = Vec::new();
    for r in &ens.results {
        let alpha = r.threshold as f64;
        for w in r.gelation_events.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(window.0..=window.1).contains(&a.time) {
                continue;
            }
            let n_tau = a.n_after as f64 / big_n;
            gaps.push((b.time - a.time) * big_n * n_tau * n_tau / alpha);
            drops.push((a.n_after - b.n_after) as f64 / alpha);
        }
    }
    if gaps.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no consecutive gelation times in [{}, {}]",
            window.0, window.1
        )));
    }
    Ok(GapStatistics { gaps, drops })
}

/// Typical clusters binned by canonical code.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TypicalDistribution {
    pub trees: BTreeMap<String, usize>,
    /// Trees larger than the canonicalization limit.
    pub larger_trees: usize,
    /// Components with at least one cycle.
    pub cycles: usize,
    pub total: usize,
}

impl TypicalDistribution {
    pub fn add(&mut self, graph: &crate::forest::ComponentGraph, max_tree_size: usize) -> Result<()> {
        self.total += 1;
        if !graph.is_tree() {
            self.cycles += 1;
        } else if graph.size() > max_tree_size {
            self.larger_trees += 1;
        } else {
            match canonicalize(graph, 0)? {
                Canonical::Tree(t) => *self.trees.entry(t.code().to_string()).or_insert(0) += 1,
                Canonical::NotATree => self.cycles += 1,
            }
        }
        Ok(())
    }

    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        let total = self.total as f64;
        self.trees.iter().map(|(k, &c)| (k.clone(), c as f64 / total)).collect()
    }

    pub fn cycle_frequency(&self) -> f64 {
        self.cycles as f64 / self.total as f64
    }

    /// Frequency of each component size among the sampled clusters, for
    /// sizes up to the canonicalization limit.
    pub fn size_frequencies(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for (code, &c) in &self.trees {
            *out.entry(code.len() / 2).or_insert(0.0) += c as f64 / self.total as f64;
        }
        out
    }
}

/// Typical-cluster samples recorded at `t`, pooled over replicas.
pub fn typical_cluster_distribution(ens: &ReplicaEnsemble, t: f64, max_tree_size: usize) -> Result<TypicalDistribution> {
    let mut dist = TypicalDistribution::default();
    for snap in ens.typical_at(t)? {
        for g in &snap.samples {
            dist.add(g, max_tree_size)?;
        }
    }
    if dist.total == 0 {
        return Err(Error::InsufficientData(format!("no typical clusters sampled at {t}")));
    }
    Ok(dist)
}

/// Total variation distance over the union of supports, with the missing
/// mass of each side treated as one extra outcome.
pub fn tv_distance<K: Ord + Clone>(empirical: &BTreeMap<K, f64>, exact: &BTreeMap<K, f64>) -> f64 {
    let mut keys: Vec<&K> = empirical.keys().chain(exact.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut sum = 0.0;
    for k in keys {
        let p = empirical.get(k).copied().unwrap_or(0.0);
        let q = exact.get(k).copied().unwrap_or(0.0);
        sum += (p - q).abs();
    }
    let rest_p = 1.0 - empirical.values().sum::<f64>();
    let rest_q = 1.0 - exact.values().sum::<f64>();
    0.5 * (sum + (rest_p - rest_q).abs())
}

/// Empirical `P(Z > t)` with binomial errors. A particle still in solution
/// at `t_max` counts as surviving every `t <= t_max`.
pub fn z_survival_curve(ens: &ReplicaEnsemble, t_grid: &[f64]) -> Result<Vec<(f64, Estimate)>> {
    t_grid
        .iter()
        .map(|&t| {
            if t > ens.config.t_max {
                return Err(invalid("t_grid", format!("{t} beyond the horizon {}", ens.config.t_max)));
            }
            let alive = ens.results.iter().filter(|r| r.z() > t).count();
            Ok((t, Estimate::proportion(alive, ens.results.len())))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurplusBin {
    pub z_lo: f64,
    pub z_hi: f64,
    pub count: usize,
    pub z_mean: f64,
    /// `(N^2 / alpha^3) * surplus` of the cluster in which particle 0 fell.
    pub statistic: Estimate,
    /// Mean of `Z^2 / 12` over the bin.
    pub prediction: f64,
}

fn surplus_points(ens: &ReplicaEnsemble) -> Vec<(f64, f64)> {
    let n = ens.n();
    ens.results
        .iter()
        .filter_map(|r| {
            let z = r.z_particle_one?;
            let s = r.particle_one_surplus? as f64;
            let a = r.threshold as f64;
            Some((z, n * n / (a * a * a) * s))
        })
        .collect()
}

fn surplus_bin(points: &[(f64, f64)], lo: f64, hi: f64) -> SurplusBin {
    let zs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let stats: Vec<f64> = points.iter().map(|p| p.1).collect();
    SurplusBin {
        z_lo: lo,
        z_hi: hi,
        count: points.len(),
        z_mean: zs.iter().sum::<f64>() / zs.len() as f64,
        statistic: Estimate::from_samples(&stats),
        prediction: zs.iter().map(|z| z * z / 12.0).sum::<f64>() / zs.len() as f64,
    }
}

/// Normalized surplus over replicas whose particle 0 fell at `Z` in `[lo, hi)`.
pub fn surplus_statistic(ens: &ReplicaEnsemble, lo: f64, hi: f64, min_count: usize) -> Result<SurplusBin> {
    let points: Vec<_> = surplus_points(ens).into_iter().filter(|p| p.0 >= lo && p.0 < hi).collect();
    if points.len() < min_count.max(1) {
        return Err(Error::InsufficientData(format!(
            "{} replicas with Z in [{lo}, {hi}), need {min_count}",
            points.len()
        )));
    }
    Ok(surplus_bin(&points, lo, hi))
}

/// Equal-count bins in `Z`, each with at least `min_per_bin` replicas.
pub fn surplus_bins(ens: &ReplicaEnsemble, bins: usize, min_per_bin: usize) -> Result<Vec<SurplusBin>> {
    let mut points = surplus_points(ens);
    if bins == 0 || points.len() < bins * min_per_bin.max(1) {
        return Err(Error::InsufficientData(format!(
            "{} fallen replicas for {bins} bins of {min_per_bin}",
            points.len()
        )));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let per = points.len() / bins;
    Ok((0..bins)
        .map(|b| {
            let end = if b + 1 == bins { points.len() } else { (b + 1) * per };
            let chunk = &points[b * per..end];
            surplus_bin(chunk, chunk[0].0, chunk[chunk.len() - 1].0)
        })
        .collect())
}

/// Empirical `sum_{m >= k} m c_t(m)`, computed as the mass in solution minus
/// the clusters below `k`.
pub fn tail_mass_empirical(ens: &ReplicaEnsemble, t: f64, k_list: &[usize]) -> Result<BTreeMap<usize, Estimate>> {
    let samples = ens.samples_at(t)?;
    let n = ens.n();
    let mut out = BTreeMap::new();
    for &k in k_list {
        if k == 0 || k > ens.config.m_cap + 1 {
            return Err(Error::CapTooSmall {
                cap: ens.config.m_cap,
                k,
            });
        }
        let xs: Vec<f64> = samples
            .iter()
            .map(|s| {
                let below: u64 = (1..k).map(|m| m as u64 * s.count(m)).sum();
                (s.n_in_solution as u64 - below) as f64 / n
            })
            .collect();
        out.insert(k, Estimate::from_samples(&xs));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square_p(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic)
}

/// Pearson goodness of fit of `observed` counts against probabilities
/// `expected` (which must sum to 1). Cells with expected count below 5 are
/// pooled.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() {
        return Err(invalid("expected", "length differs from observed"));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InsufficientData("no observations".into()));
    }
    let n = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = p * n;
        if e < 5.0 {
            pooled.0 += o as f64;
            pooled.1 += e;
        } else {
            cells.push((o as f64, e));
        }
    }
    if pooled.1 > 0.0 || pooled.0 > 0.0 {
        cells.push(pooled);
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = cells.len().saturating_sub(1);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof),
    })
}

/// Pearson test that two count vectors over the same cells come from the
/// same law. Cells with fewer than 10 pooled counts are merged.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.len() != b.len() {
        return Err(invalid("b", "length differs from a"));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let mut cells = Vec::new();
    let mut pooled = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        if x + y < 10 {
            pooled.0 += x as f64;
            pooled.1 += y as f64;
        } else {
            cells.push((x as f64, y as f64));
        }
    }
    if pooled.0 + pooled.1 > 0.0 {
        cells.push(pooled);
    }
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let statistic: f64 = cells
        .iter()
        .map(|&(x, y)| (ka * x - kb * y).powi(2) / (x + y))
        .sum();
    let dof = cells.len().saturating_sub(1);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof),
    })
}
