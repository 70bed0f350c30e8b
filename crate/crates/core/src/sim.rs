//! Event-driven simulation of the threshold coagulation model and of pure
//! percolation (every activated link created).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::forest::{ClusterForest, ComponentGraph, LinkOutcome};
use crate::stream::ActivationStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Links touching a large cluster are refused; large clusters are inert.
    Smoluchowski,
    /// Every activated link is created (dynamic Erdős–Rényi graph).
    Flory,
    /// Rejection construction built from independent dynamic graphs.
    Alternative,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoluchowski" => Ok(Mode::Smoluchowski),
            "flory" => Ok(Mode::Flory),
            "alternative" => Ok(Mode::Alternative),
            other => Err(invalid("mode", format!("unknown model {other:?}"))),
        }
    }
}

/// Cluster-size threshold above which clusters become large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    Absolute { value: usize },
    /// `round(N^exponent * ln(N)^log_exponent)`.
    Rule { exponent: f64, log_exponent: f64 },
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Rule {
            exponent: 0.75,
            log_exponent: 0.0,
        }
    }
}

impl Threshold {
    pub fn power(exponent: f64) -> Self {
        Threshold::Rule {
            exponent,
            log_exponent: 0.0,
        }
    }

    /// The integer threshold for a system of `n` particles, clamped to `[1, n]`.
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            Threshold::Absolute { value } => value,
            Threshold::Rule {
                exponent,
                log_exponent,
            } => {
                let nf = n as f64;
                let log_factor = if log_exponent == 0.0 {
                    1.0
                } else {
                    nf.ln().max(0.0).powf(log_exponent)
                };
                (nf.powf(exponent) * log_factor).round().clamp(1.0, nf) as usize
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_particles: usize,
    pub threshold: Threshold,
    pub t_max: f64,
    pub mode: Mode,
    pub seed: u64,
    pub sample_times: Vec<f64>,
    /// Largest cluster size tabulated in the sampled histograms.
    pub m_cap: usize,
    pub typical_samples_per_time: usize,
}

impl SimConfig {
    pub fn new(n_particles: usize) -> Self {
        Self {
            n_particles,
            threshold: Threshold::default(),
            t_max: 2.0,
            mode: Mode::Smoluchowski,
            seed: 0,
            sample_times: Vec::new(),
            m_cap: 100,
            typical_samples_per_time: 0,
        }
    }

    pub fn threshold(mut self, threshold: Threshold) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn sample_times(mut self, times: impl Into<Vec<f64>>) -> Self {
        self.sample_times = times.into();
        self
    }

    pub fn m_cap(mut self, m_cap: usize) -> Self {
        self.m_cap = m_cap;
        self
    }

    pub fn typical_samples(mut self, per_time: usize) -> Self {
        self.typical_samples_per_time = per_time;
        self
    }

    /// Checks the configuration and returns the resolved threshold.
    pub fn validate(&self) -> Result<usize> {
        if self.n_particles == 0 {
            return Err(invalid("n_particles", "must be at least 1"));
        }
        if self.n_particles > u32::MAX as usize {
            return Err(invalid("n_particles", "must fit in 32 bits"));
        }
        if !self.t_max.is_finite() || self.t_max < 0.0 {
            return Err(invalid("t_max", format!("{} is not a finite nonnegative time", self.t_max)));
        }
        let alpha = self.threshold.resolve(self.n_particles);
        if alpha < 1 || alpha > self.n_particles {
            return Err(invalid(
                "threshold",
                format!("{alpha} outside [1, {}]", self.n_particles),
            ));
        }
        if let Threshold::Rule { exponent, log_exponent } = self.threshold {
            if !exponent.is_finite() || !log_exponent.is_finite() {
                return Err(invalid("threshold", "rule exponents must be finite"));
            }
        }
        for w in self.sample_times.windows(2) {
            if w[1] < w[0] {
                return Err(invalid("sample_times", "must be sorted"));
            }
        }
        if let Some(&t) = self
            .sample_times
            .iter()
            .find(|&&t| !(0.0..=self.t_max).contains(&t))
        {
            return Err(invalid("sample_times", format!("{t} outside [0, {}]", self.t_max)));
        }
        if self.m_cap == 0 {
            return Err(invalid("m_cap", "must be at least 1"));
        }
        Ok(alpha)
    }
}

/// State observed at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub time: f64,
    pub n_in_solution: usize,
    pub gel_mass: usize,
    pub events_so_far: usize,
    /// `histogram[m - 1]` clusters of size `m` in solution, for `m <= m_cap`.
    pub histogram: Vec<u64>,
}

impl Sample {
    pub fn count(&self, m: usize) -> u64 {
        if m == 0 {
            0
        } else {
            self.histogram.get(m - 1).copied().unwrap_or(0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GelationEvent {
    pub time: f64,
    pub fallen_size: usize,
    /// Particles left in solution right after the event.
    pub n_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalSnapshot {
    pub time: f64,
    /// Components of uniformly chosen particles in solution, each rooted at
    /// its local vertex 0.
    pub samples: Vec<ComponentGraph>,
}

/// Outcome of the rejection construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    /// Number of candidate graphs used at each step (`K(i)`, step 0 first).
    pub candidates_used: Vec<usize>,
    /// First step needing more than one candidate.
    pub first_rejection_step: Option<usize>,
    /// Time at which that step started.
    pub first_rejection_time: Option<f64>,
    /// No rejection happened before `t_max`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub time: f64,
    pub n_in_solution: usize,
    pub gel_mass: usize,
    pub activations: u64,
    pub created_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub mode: Mode,
    pub n_particles: usize,
    pub threshold: usize,
    pub seed: u64,
    pub trajectory: Vec<Sample>,
    pub gelation_events: Vec<GelationEvent>,
    pub typical_clusters: Vec<TypicalSnapshot>,
    /// Time at which the cluster of particle 0 fell; `None` if it was still in
    /// solution at `t_max`.
    pub z_particle_one: Option<f64>,
    /// Surplus edges of that cluster when it fell.
    pub particle_one_surplus: Option<usize>,
    pub coupling: Option<CouplingReport>,
    pub final_state: FinalState,
}

impl SimResult {
    /// Fall time of particle 0 with `+∞` when it never fell.
    pub fn z(&self) -> f64 {
        self.z_particle_one.unwrap_or(f64::INFINITY)
    }

    pub fn sample_at(&self, t: f64) -> Option<&Sample> {
        self.trajectory.iter().find(|s| s.time == t)
    }

    pub fn typical_at(&self, t: f64) -> Option<&TypicalSnapshot> {
        self.typical_clusters.iter().find(|s| s.time == t)
    }
}

/// Instantaneous coagulation rate: relevant (inter-cluster, in-solution) links
/// times `1/N`.
pub fn coagulation_rate(
    histogram: &BTreeMap<usize, usize>,
    n_in_solution: usize,
    big_n: usize,
    threshold: usize,
) -> Result<f64> {
    let mass: usize = histogram.iter().map(|(&m, &c)| m * c).sum();
    if mass != n_in_solution {
        return Err(Error::InconsistentHistogram {
            histogram_mass: mass,
            n_in_solution,
        });
    }
    let twice_links: f64 = histogram
        .iter()
        .filter(|(&m, _)| m < threshold)
        .map(|(&m, &c)| c as f64 * m as f64 * (n_in_solution - m) as f64)
        .sum();
    Ok(twice_links / (2.0 * big_n as f64))
}

/// Component of a uniformly chosen particle in solution, rooted at it.
pub fn sample_typical_cluster<R: Rng + ?Sized>(
    forest: &mut ClusterForest,
    rng: &mut R,
) -> Result<ComponentGraph> {
    if forest.n_in_solution() == 0 {
        return Err(Error::EmptySolution);
    }
    let n = forest.n_particles();
    loop {
        let v = rng.random_range(0..n);
        if !forest.is_frozen(v)? {
            return forest.extract_component(v);
        }
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `index` derived from a base seed.
pub fn replica_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5EED)))
}

pub(crate) fn observer_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x0B5E_87E5))
}

/// Streaming observer: emits samples at the configured times.
pub(crate) struct Recorder<'a> {
    config: &'a SimConfig,
    next: usize,
    rng: ChaCha8Rng,
    pub trajectory: Vec<Sample>,
    pub typical: Vec<TypicalSnapshot>,
}

impl<'a> Recorder<'a> {
    pub fn new(config: &'a SimConfig) -> Self {
        Self {
            config,
            next: 0,
            rng: observer_rng(config.seed),
            trajectory: Vec::with_capacity(config.sample_times.len()),
            typical: Vec::new(),
        }
    }

    /// Records pending sample times before `t` for a system with nothing left
    /// in solution.
    pub fn record_empty_before(&mut self, t: f64, gel_mass: usize, events: usize) {
        while self.next < self.config.sample_times.len() && self.config.sample_times[self.next] < t
        {
            let time = self.config.sample_times[self.next];
            self.next += 1;
            self.trajectory.push(Sample {
                time,
                n_in_solution: 0,
                gel_mass,
                events_so_far: events,
                histogram: vec![0; self.config.m_cap],
            });
            if self.config.typical_samples_per_time > 0 {
                self.typical.push(TypicalSnapshot {
                    time,
                    samples: Vec::new(),
                });
            }
        }
    }

    /// Records every pending sample time strictly before `t` from `forest`.
    ///
    /// `extra_gel` is mass already removed from the system outside `forest`
    /// (used by the rejection construction, whose graphs shrink).
    pub fn record_before(
        &mut self,
        t: f64,
        forest: &mut ClusterForest,
        extra_gel: usize,
        events: usize,
    ) -> Result<()> {
        while self.next < self.config.sample_times.len() && self.config.sample_times[self.next] < t
        {
            let time = self.config.sample_times[self.next];
            self.next += 1;
            let mut histogram = vec![0u64; self.config.m_cap];
            for s in forest.solution_cluster_sizes() {
                if s <= self.config.m_cap {
                    histogram[s - 1] += 1;
                }
            }
            self.trajectory.push(Sample {
                time,
                n_in_solution: forest.n_in_solution(),
                gel_mass: forest.gel_mass() + extra_gel,
                events_so_far: events,
                histogram,
            });
            if self.config.typical_samples_per_time > 0 {
                let mut samples = Vec::with_capacity(self.config.typical_samples_per_time);
                if forest.n_in_solution() > 0 {
                    for _ in 0..self.config.typical_samples_per_time {
                        samples.push(sample_typical_cluster(forest, &mut self.rng)?);
                    }
                }
                self.typical.push(TypicalSnapshot { time, samples });
            }
        }
        Ok(())
    }
}

/// Runs one replica of the configured model.
pub fn run(config: &SimConfig) -> Result<SimResult> {
    match config.mode {
        Mode::Smoluchowski | Mode::Flory => run_sim(config),
        Mode::Alternative => crate::alternative::run_alternative(config),
    }
}

/// Runs the threshold model (`Mode::Smoluchowski`) or pure percolation
/// (`Mode::Flory`) up to `t_max`.
pub fn run_sim(config: &SimConfig) -> Result<SimResult> {
    let alpha = config.validate()?;
    if config.mode == Mode::Alternative {
        return Err(invalid("mode", "use run_alternative for the alternative model"));
    }
    let n = config.n_particles;
    let smoluchowski = config.mode == Mode::Smoluchowski;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut forest = ClusterForest::new(n)?;
    let mut stream = ActivationStream::new(n, n);
    let mut recorder = Recorder::new(config);
    let mut events = Vec::new();
    let mut z = None;
    let mut z_surplus = None;
    let mut now = 0.0;

    while let Some((t, (u, v))) = stream.next_activation(&mut rng) {
        if t > config.t_max {
            break;
        }
        now = t;
        recorder.record_before(t, &mut forest, 0, events.len())?;
        let outcome = if smoluchowski {
            forest.try_link(u as usize, v as usize, alpha)?
        } else {
            forest.link_unconditional(u as usize, v as usize, alpha)?
        };
        if let LinkOutcome::MergedAndFell(size) = outcome {
            events.push(GelationEvent {
                time: t,
                fallen_size: size,
                n_after: forest.n_in_solution(),
            });
            if smoluchowski && z.is_none() && forest.is_frozen(0)? {
                z = Some(t);
                z_surplus = Some(forest.cluster_surplus(0)?);
            }
        }
        // nothing can change once fewer than two particles remain in solution
        if smoluchowski && forest.n_in_solution() < 2 {
            break;
        }
    }
    recorder.record_before(f64::INFINITY, &mut forest, 0, events.len())?;

    Ok(SimResult {
        mode: config.mode,
        n_particles: n,
        threshold: alpha,
        seed: config.seed,
        trajectory: recorder.trajectory,
        gelation_events: events,
        typical_clusters: recorder.typical,
        z_particle_one: z,
        particle_one_surplus: z_surplus,
        coupling: None,
        final_state: FinalState {
            time: now,
            n_in_solution: forest.n_in_solution(),
            gel_mass: forest.gel_mass(),
            activations: stream.emitted(),
            created_edges: forest.created_edges().len(),
        },
    })
}

/// Runs `replicas` independent replicas, seeded from `config.seed` and the
/// replica index. Results come back in replica order.
pub fn run_replicas(config: &SimConfig, replicas: usize) -> Result<Vec<SimResult>> {
    config.validate()?;
    (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut c = config.clone();
            c.seed = replica_seed(config.seed, i);
            run(&c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: usize, alpha: usize) -> SimConfig {
        SimConfig::new(n).threshold(Threshold::Absolute { value: alpha })
    }

    #[test]
    fn threshold_rule_resolves() {
        assert_eq!(Threshold::power(0.75).resolve(1_000_000), 31623);
        assert_eq!(Threshold::Absolute { value: 50 }.resolve(1000), 50);
        let with_log = Threshold::Rule {
            exponent: 0.7,
            log_exponent: 0.5,
        }
        .resolve(10_000);
        assert_eq!(with_log, (10_000f64.powf(0.7) * 10_000f64.ln().sqrt()).round() as usize);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(small(0, 1).validate().is_err());
        assert!(small(10, 11).validate().is_err());
        assert!(small(10, 0).validate().is_err());
        assert!(small(10, 3).t_max(f64::INFINITY).validate().is_err());
        assert!(small(10, 3).sample_times(vec![1.0, 0.5]).validate().is_err());
        assert!(small(10, 3).t_max(1.0).sample_times(vec![0.5, 1.5]).validate().is_err());
        assert!(small(10, 3).mode(Mode::Alternative).validate().is_ok());
    }

    #[test]
    fn mode_parses() {
        assert_eq!("flory".parse::<Mode>().unwrap(), Mode::Flory);
        assert!("other".parse::<Mode>().is_err());
    }

    #[test]
    fn rate_of_singletons() {
        let n = 10;
        let hist = BTreeMap::from([(1, n)]);
        let r = coagulation_rate(&hist, n, n, n).unwrap();
        assert!((r - (n as f64 - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rate_matches_pair_enumeration() {
        // N = 4 with clusters {2, 1, 1}
        let hist = BTreeMap::from([(1, 2), (2, 1)]);
        let r = coagulation_rate(&hist, 4, 4, 4).unwrap();
        let sizes = [2usize, 1, 1];
        let mut pairs = 0;
        for i in 0..sizes.len() {
            for j in i + 1..sizes.len() {
                pairs += sizes[i] * sizes[j];
            }
        }
        assert_eq!(pairs, 5);
        assert!((r - pairs as f64 / 4.0).abs() < 1e-12);
        assert!((r - 1.25).abs() < 1e-12);
        assert!(coagulation_rate(&hist, 5, 4, 4).is_err());
        assert_eq!(coagulation_rate(&BTreeMap::new(), 0, 4, 4).unwrap(), 0.0);
    }

    #[test]
    fn rate_matches_brute_force_on_random_forests() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..14);
            let alpha = rng.random_range(2..=n);
            let mut f = ClusterForest::new(n).unwrap();
            for _ in 0..rng.random_range(0..2 * n) {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u != v {
                    f.try_link(u, v, alpha).unwrap();
                }
            }
            let mut relevant = 0usize;
            for u in 0..n {
                for v in u + 1..n {
                    let (ru, rv) = (f.find_root(u).unwrap(), f.find_root(v).unwrap());
                    if ru != rv && !f.is_frozen(u).unwrap() && !f.is_frozen(v).unwrap() {
                        relevant += 1;
                    }
                }
            }
            let hist = f.component_size_histogram();
            let r = coagulation_rate(&hist, f.n_in_solution(), n, alpha).unwrap();
            assert!((r - relevant as f64 / n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn typical_cluster_at_time_zero_is_a_vertex() {
        let mut f = ClusterForest::new(20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let c = sample_typical_cluster(&mut f, &mut rng).unwrap();
            assert_eq!((c.size(), c.edges.len()), (1, 0));
        }
    }

    #[test]
    fn typical_cluster_is_size_biased() {
        let mut f = ClusterForest::new(10).unwrap();
        f.try_link(0, 1, 4).unwrap();
        f.try_link(1, 2, 4).unwrap();
        f.try_link(3, 4, 4).unwrap();
        f.try_link(5, 6, 4).unwrap();
        f.try_link(6, 7, 4).unwrap();
        f.try_link(7, 8, 4).unwrap(); // falls (size 4)
        let hist = f.component_size_histogram();
        let n_sol = f.n_in_solution();
        assert_eq!(n_sol, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reps = 60_000;
        let mut by_size = BTreeMap::new();
        for _ in 0..reps {
            let c = sample_typical_cluster(&mut f, &mut rng).unwrap();
            assert!(!f.is_frozen(c.vertices[0] as usize).unwrap());
            *by_size.entry(c.size()).or_insert(0usize) += 1;
        }
        for (&m, &count) in &hist {
            let p = (m * count) as f64 / n_sol as f64;
            let f_emp = by_size[&m] as f64 / reps as f64;
            let sd = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((f_emp - p).abs() < 4.0 * sd, "size {m}: {f_emp} vs {p}");
        }
    }

    #[test]
    fn empty_solution_has_no_typical_cluster() {
        let mut f = ClusterForest::new(2).unwrap();
        f.try_link(0, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            sample_typical_cluster(&mut f, &mut rng),
            Err(Error::EmptySolution)
        ));
    }

    #[test]
    fn deterministic_per_seed() {
        let c = small(2000, 100)
            .t_max(2.5)
            .sample_times(vec![0.5, 1.0, 2.0, 2.5])
            .typical_samples(5)
            .seed(42);
        let a = run_sim(&c).unwrap();
        let b = run_sim(&c).unwrap();
        assert_eq!(a, b);
        let other = run_sim(&c.clone().seed(43)).unwrap();
        assert_ne!(a.gelation_events, other.gelation_events);
    }

    #[test]
    fn sample_times_are_reported_exactly() {
        let times = vec![0.0, 0.25, 1.0, 1.0, 1.75];
        let r = run_sim(&small(500, 30).t_max(2.0).sample_times(times.clone())).unwrap();
        let got: Vec<f64> = r.trajectory.iter().map(|s| s.time).collect();
        assert_eq!(got, times);
        assert_eq!(r.trajectory[0].n_in_solution, 500);
        assert_eq!(r.trajectory[0].count(1), 500);
    }

    #[test]
    fn flory_and_smoluchowski_agree_before_first_gelation() {
        for seed in 0..5 {
            let times: Vec<f64> = (0..=30).map(|i| i as f64 * 0.1).collect();
            let base = small(3000, 150).t_max(3.0).sample_times(times).seed(seed);
            let s = run_sim(&base.clone().mode(Mode::Smoluchowski)).unwrap();
            let f = run_sim(&base.clone().mode(Mode::Flory)).unwrap();
            let tau1 = s.gelation_events[0].time;
            assert_eq!(tau1, f.gelation_events[0].time);
            assert_eq!(s.gelation_events[0], f.gelation_events[0]);
            for (a, b) in s.trajectory.iter().zip(&f.trajectory) {
                if a.time < tau1 {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn smoluchowski_trajectory_invariants() {
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let r = run_sim(&small(5000, 200).t_max(4.0).sample_times(times).seed(9)).unwrap();
        for w in r.trajectory.windows(2) {
            assert!(w[1].n_in_solution <= w[0].n_in_solution);
        }
        for s in &r.trajectory {
            assert_eq!(s.n_in_solution + s.gel_mass, 5000);
        }
        for w in r.gelation_events.windows(2) {
            assert!(w[1].time >= w[0].time);
        }
        assert!(r.gelation_events.iter().all(|e| e.fallen_size >= 200));
        let fallen: usize = r.gelation_events.iter().map(|e| e.fallen_size).sum();
        assert_eq!(fallen, r.final_state.gel_mass);
        if let Some(z) = r.z_particle_one {
            assert!(r.gelation_events.iter().any(|e| e.time == z));
        }
    }

    #[test]
    fn replicas_are_independent_and_ordered() {
        let c = small(300, 20).t_max(2.0).sample_times(vec![2.0]).seed(5);
        let a = run_replicas(&c, 4).unwrap();
        let b = run_replicas(&c, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].final_state, a[1].final_state);
    }
}
