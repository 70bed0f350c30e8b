//! Laws of small systems and exact identities of the dynamics.

use std::collections::{BTreeMap, HashMap};

use gelation::acceptance::{exact_flory_law, exact_threshold_law, small_system_p_value, SmallOutcome};
use gelation::alternative::run_alternative;
use gelation::sim::{coagulation_rate, replica_seed, Sample};
use gelation::stats::{chi_square_gof, Estimate};
use gelation::{run_sim, Mode, SimConfig, Threshold};

fn outcome(s: &Sample) -> SmallOutcome {
    let mut sizes = Vec::new();
    for (i, &c) in s.histogram.iter().enumerate() {
        sizes.extend(std::iter::repeat_n(i + 1, c as usize));
    }
    (sizes, s.gel_mass)
}

fn small(n: usize, alpha: usize, t: f64, mode: Mode) -> SimConfig {
    SimConfig::new(n)
        .threshold(Threshold::Absolute { value: alpha })
        .mode(mode)
        .t_max(t)
        .sample_times(vec![t])
        .m_cap(n)
}

fn p_value_of(law: &BTreeMap<SmallOutcome, f64>, outcomes: impl Iterator<Item = SmallOutcome>) -> f64 {
    let index: HashMap<&SmallOutcome, usize> = law.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let mut counts = vec![0u64; law.len()];
    for o in outcomes {
        let i = *index.get(&o).unwrap_or_else(|| panic!("outcome {o:?} has probability zero"));
        counts[i] += 1;
    }
    let probs: Vec<f64> = law.values().copied().collect();
    chi_square_gof(&counts, &probs).unwrap().p_value
}

#[test]
fn direct_simulation_matches_enumeration_at_six() {
    for (mode, alpha, t) in [(Mode::Smoluchowski, 3, 1.0), (Mode::Smoluchowski, 4, 2.5), (Mode::Flory, 3, 1.0)] {
        let law = if mode == Mode::Flory {
            exact_flory_law(6, alpha, t)
        } else {
            exact_threshold_law(6, alpha, t)
        };
        let p = small_system_p_value(&law, mode, 6, alpha, t, 200_000, 17).unwrap();
        assert!(p > 1e-3, "{mode:?} alpha {alpha} t {t}: p = {p}");
    }
}

#[test]
fn rejection_construction_matches_enumeration() {
    for (n, alpha, t) in [(5, 3, 1.0), (6, 3, 1.0), (6, 2, 0.8)] {
        let law = exact_threshold_law(n, alpha, t);
        let config = small(n, alpha, t, Mode::Alternative);
        let outcomes = (0..100_000u64).map(|i| {
            let mut c = config.clone();
            c.seed = replica_seed(31, i);
            outcome(&run_alternative(&c).unwrap().trajectory[0])
        });
        let p = p_value_of(&law, outcomes);
        assert!(p > 1e-3, "N {n} alpha {alpha} t {t}: p = {p}");
    }
}

#[test]
fn solution_is_a_conditioned_random_graph() {
    // given |S(t)| = s, the solution is G(s, p_t) conditioned on having no
    // component of size alpha or more, with p_t = 1 - exp(-t/N)
    let (n, alpha, t, reps) = (5, 3, 1.0, 1_000_000u64);
    let config = small(n, alpha, t, Mode::Smoluchowski);
    let mut by_size: BTreeMap<usize, Vec<SmallOutcome>> = BTreeMap::new();
    for i in 0..reps {
        let mut c = config.clone();
        c.seed = replica_seed(5, i);
        let o = outcome(&run_sim(&c).unwrap().trajectory[0]);
        by_size.entry(n - o.1).or_default().push(o);
    }
    assert!(by_size.len() >= 2);
    for (s, outcomes) in by_size {
        if s < 2 {
            continue;
        }
        // rescaling t keeps the edge probability at 1 - exp(-t/N) on s vertices
        let flory = exact_flory_law(s, alpha, t * s as f64 / n as f64);
        let no_gel: f64 = flory.iter().filter(|(k, _)| k.1 == 0).map(|(_, p)| p).sum();
        let conditioned: BTreeMap<SmallOutcome, f64> = flory
            .into_iter()
            .filter(|(k, _)| k.1 == 0)
            .map(|((sizes, _), p)| ((sizes, n - s), p / no_gel))
            .collect();
        let p = p_value_of(&conditioned, outcomes.into_iter());
        assert!(p > 1e-3, "|S| = {s}: p = {p}");
    }
}

#[test]
fn isolated_particles() {
    // no clock of a particle has rung with probability exp(-t (N-1)/N): this
    // is the isolated fraction under percolation and a lower bound under the
    // threshold, where links to the gel are refused
    let n = 500;
    for t in [1.0, 2.0] {
        let exact = (-t * (n as f64 - 1.0) / n as f64).exp();
        for mode in [Mode::Flory, Mode::Smoluchowski] {
            let config = SimConfig::new(n)
                .threshold(Threshold::Absolute { value: 50 })
                .mode(mode)
                .t_max(t)
                .sample_times(vec![t])
                .m_cap(10);
            let fractions: Vec<f64> = (0..400u64)
                .map(|i| {
                    let mut c = config.clone();
                    c.seed = replica_seed(8, i);
                    run_sim(&c).unwrap().trajectory[0].count(1) as f64 / n as f64
                })
                .collect();
            let est = Estimate::from_samples(&fractions);
            if mode == Mode::Flory {
                assert!((est.mean - exact).abs() < 4.0 * est.stderr, "t {t}: {} vs {exact}", est.mean);
            } else {
                assert!(est.mean > exact - 4.0 * est.stderr, "t {t}: {} below {exact}", est.mean);
            }
        }
    }
}

#[test]
fn merge_counts_follow_the_coagulation_rate() {
    // E[merges in [t, t + h]] = E[rate(t)] h + O(h^2)
    let (n, alpha, h) = (2000, 100, 0.004);
    for t in [0.5, 1.5] {
        let config = SimConfig::new(n)
            .threshold(Threshold::Absolute { value: alpha })
            .t_max(t + h)
            .sample_times(vec![t, t + h])
            .m_cap(n);
        let mut rates = Vec::new();
        let mut merges = Vec::new();
        for i in 0..3000u64 {
            let mut c = config.clone();
            c.seed = replica_seed(44, i);
            let r = run_sim(&c).unwrap();
            let clusters = |s: &Sample| s.histogram.iter().sum::<u64>() as f64 + s.events_so_far as f64;
            let (a, b) = (&r.trajectory[0], &r.trajectory[1]);
            let hist: BTreeMap<usize, usize> = a
                .histogram
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(m, &c)| (m + 1, c as usize))
                .collect();
            rates.push(coagulation_rate(&hist, a.n_in_solution, n, alpha).unwrap());
            merges.push((clusters(a) - clusters(b)) / h);
        }
        let (rate, observed) = (Estimate::from_samples(&rates), Estimate::from_samples(&merges));
        let tol = 4.0 * (rate.stderr.powi(2) + observed.stderr.powi(2)).sqrt() + 0.01 * rate.mean;
        assert!((rate.mean - observed.mean).abs() < tol, "t {t}: {} vs {}", rate.mean, observed.mean);
    }
}
