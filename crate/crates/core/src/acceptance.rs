//! The acceptance suite: twelve finite-size checks of the limit theory, each
//! producing a [`ComparisonReport`] with its tolerances pinned here.
//!
//! Criteria 1 to 7 share one replica ensemble, which is run once per
//! [`Suite`].

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::alternative::coupling_event;
use crate::error::Result;
use crate::exploration::{explore, explore_edges, largest_two_components, tube_deviation};
use crate::forest::ClusterForest;
use crate::kinetics::{
    borel_pmf, flory_mass, smoluchowski_exact_mono, solve_flory_ode, solve_smoluchowski_ode, tail_mass,
};
use crate::sim::{replica_seed, run_sim, splitmix64, Mode, Sample, SimConfig, Threshold};
use crate::stats::{
    chi_square_gof, estimate_concentrations, estimate_mass, gap_statistics, tail_mass_empirical, tau_statistics,
    tv_distance, typical_cluster_distribution, z_survival_curve, Check, ComparisonReport, Estimate,
    GapStatistics, ReplicaEnsemble, Tolerance,
};
use crate::stream::bernoulli_pairs;
use crate::trees::{enumerate_rooted_trees, gw_distribution, gw_tree_prob};

/// Number of criteria in the suite.
pub const CRITERIA: u8 = 12;

/// Sizes and tolerance factors for one run of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub n: usize,
    pub replicas: usize,
    pub pareto_replicas: usize,
    pub coupling_replicas: usize,
    pub er_n: usize,
    pub er_runs: usize,
    pub small_n_replicas: usize,
    /// Typical clusters pooled over the main ensemble at each sample time.
    pub typical_pool: usize,
    /// Multiplies every absolute band and sigma count.
    pub widen: f64,
    /// Required fraction for "in at least 95% of runs" style checks.
    pub coverage: f64,
}

impl Scale {
    pub fn full() -> Self {
        Self {
            n: 1_000_000,
            replicas: 100,
            pareto_replicas: 500,
            coupling_replicas: 200,
            er_n: 1_000_000,
            er_runs: 100,
            small_n_replicas: 1_000_000,
            typical_pool: 10_000,
            widen: 1.0,
            coverage: 0.95,
        }
    }

    /// Reduced sizes: `N = 10^5`, fewer replicas, bands and sigma counts
    /// doubled, coverage lowered to 90%.
    pub fn quick() -> Self {
        Self {
            n: 100_000,
            replicas: 40,
            pareto_replicas: 200,
            coupling_replicas: 60,
            er_n: 100_000,
            er_runs: 40,
            small_n_replicas: 100_000,
            typical_pool: 10_000,
            widen: 2.0,
            coverage: 0.90,
        }
    }

    fn tol(&self, abs: f64, sigmas: f64) -> Tolerance {
        Tolerance::new(abs, sigmas).widened(self.widen)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub seconds: f64,
    pub report: ComparisonReport,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {} ({:.1} s)",
            self.id,
            if self.report.pass { "PASS" } else { "FAIL" },
            self.name,
            self.seconds
        )
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "first gelation time",
        2 => "first fallen mass",
        3 => "mass in solution",
        4 => "concentrations",
        5 => "typical cluster law",
        6 => "tail mass after gelation",
        7 => "gaps and drops between gelations",
        8 => "law of the fall time of a particle",
        9 => "coupling with the rejection construction",
        10 => "near-critical random graph",
        11 => "kinetic solvers",
        12 => "small systems against exact laws",
        _ => "unknown",
    }
}

const MAIN_TIMES: [f64; 4] = [0.5, 1.5, 2.0, 3.0];

pub struct Suite {
    pub seed: u64,
    pub scale: Scale,
    main: OnceLock<std::result::Result<ReplicaEnsemble, String>>,
}

impl Suite {
    pub fn new(seed: u64, scale: Scale) -> Self {
        Self {
            seed,
            scale,
            main: OnceLock::new(),
        }
    }

    fn sub_seed(&self, tag: u64) -> u64 {
        splitmix64(self.seed ^ splitmix64(tag))
    }

    /// `N`, `alpha = N^0.75`, `T = 3`, sampled at 0.5, 1.5, 2 and 3.
    pub fn main_ensemble(&self) -> std::result::Result<&ReplicaEnsemble, String> {
        self.main
            .get_or_init(|| {
                let s = &self.scale;
                let config = SimConfig::new(s.n)
                    .threshold(Threshold::power(0.75))
                    .t_max(3.0)
                    .sample_times(MAIN_TIMES.to_vec())
                    .m_cap(100)
                    .typical_samples(s.typical_pool.div_ceil(s.replicas))
                    .seed(self.seed);
                ReplicaEnsemble::run(&config, s.replicas).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Runs one criterion; errors and panics become failed reports.
    pub fn run(&self, id: u8) -> CriterionResult {
        let start = Instant::now();
        let name = criterion_name(id);
        let outcome = catch_unwind(AssertUnwindSafe(|| match id {
            1..=7 => {
                let ens = self.main_ensemble().map_err(crate::Error::Domain)?;
                match id {
                    1 => criterion_gelation_time(ens, &self.scale),
                    2 => criterion_first_mass(ens, &self.scale),
                    3 => criterion_mass_curve(ens, &self.scale),
                    4 => criterion_concentrations(ens, &self.scale),
                    5 => criterion_typical(ens, &self.scale),
                    6 => criterion_tail(ens, &self.scale),
                    _ => criterion_gaps(ens, &self.scale),
                }
            }
            8 => criterion_pareto(&self.scale, self.sub_seed(8)),
            9 => criterion_coupling(&self.scale, self.sub_seed(9)),
            10 => criterion_near_critical(&self.scale, self.sub_seed(10)),
            11 => criterion_kinetics(),
            12 => criterion_small_systems(&self.scale, self.sub_seed(12)),
            _ => Err(crate::error::invalid("criterion", format!("{id} is not in 1..={CRITERIA}"))),
        }));
        let report = match outcome {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => ComparisonReport::failed(name, "", format!("error: {e}")),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                ComparisonReport::failed(name, "", format!("panic: {msg}"))
            }
        };
        CriterionResult {
            id,
            name: name.into(),
            seconds: start.elapsed().as_secs_f64(),
            report,
        }
    }

    /// Runs `ids` in order, handing each result to `on_done` as it finishes.
    pub fn run_all(&self, ids: &[u8], mut on_done: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
        ids.iter()
            .map(|&id| {
                let r = self.run(id);
                on_done(&r);
                r
            })
            .collect()
    }
}

fn alpha_of(ens: &ReplicaEnsemble) -> f64 {
    ens.results[0].threshold as f64
}

pub fn criterion_gelation_time(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(1), "tau_1 = 1 + alpha/(2N) + o(alpha/N)");
    let n = ens.config.n_particles as f64;
    let a = alpha_of(ens);
    let tau = tau_statistics(ens, 0.9)?;
    let shift = (tau.mean - 1.0) / (a / (2.0 * n));
    let (lo, hi) = (1.0 - 0.5 * s.widen, 1.0 + 0.5 * s.widen);
    r.push(Check::in_range("(mean tau_1 - 1) / (alpha/2N)", shift, lo, hi));
    let inside = tau.in_window.iter().filter(|&&b| b).count() as f64 / tau.in_window.len() as f64;
    r.push(Check::at_least("fraction of tau_1 in the delta = 0.9 window", inside, s.coverage));
    r.note(format!("mean tau_1 = {} +- {}", tau.mean, tau.stderr));
    Ok(r)
}

pub fn criterion_first_mass(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(2), "alpha <= first fallen size <= (1 + delta) alpha");
    let a = alpha_of(ens);
    let tau = tau_statistics(ens, 0.9)?;
    let hi = 1.0 + 0.5 * s.widen;
    let inside = tau
        .first_sizes
        .iter()
        .filter(|&&m| (a..=hi * a).contains(&(m as f64)))
        .count() as f64
        / tau.first_sizes.len() as f64;
    r.push(Check::at_least(format!("fraction of sizes in [alpha, {hi} alpha]"), inside, s.coverage));
    Ok(r)
}

pub fn criterion_mass_curve(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(3), "n_t = min(1, 1/t)");
    let band = 2.0 * alpha_of(ens) / ens.config.n_particles as f64;
    for t in MAIN_TIMES {
        let est = estimate_mass(ens, t)?;
        r.push(Check::compare_additive(
            format!("n_t at t = {t}"),
            est,
            (1.0 / t).min(1.0),
            band * s.widen,
            3.0 * s.widen,
        ));
    }
    Ok(r)
}

pub fn criterion_concentrations(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(4), "c_t(m) = B(min(t,1), m) / (m max(t,1))");
    for t in [0.5, 2.0] {
        let est = estimate_concentrations(ens, t, [1, 2, 3, 5])?;
        for (m, e) in est {
            let exact = smoluchowski_exact_mono(t, m)?;
            r.push(Check::compare(format!("c_{t}({m})"), e, exact, s.tol(0.05 * exact, 3.0)));
        }
    }
    Ok(r)
}

pub fn criterion_typical(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(5), "critical Poisson(1) Galton-Watson tree");
    let dist = typical_cluster_distribution(ens, 2.0, 3)?;
    let exact: BTreeMap<String, f64> = gw_distribution(1.0, 3)?
        .into_iter()
        .map(|(t, p)| (t.code().to_string(), p))
        .collect();
    let tv = tv_distance(&dist.frequencies(), &exact);
    r.push(Check::at_most("total variation, trees up to size 3", tv, 0.02 * s.widen));
    r.push(Check::at_most("frequency of clusters with a cycle", dist.cycle_frequency(), 0.005 * s.widen));
    r.note(format!("{} typical clusters pooled", dist.total));
    Ok(r)
}

pub fn criterion_tail(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(6), "sum_{m>=k} m c_t(m) ~ sqrt(2)/(t sqrt(pi)) k^(-1/2)");
    let t = 2.0;
    let emp = tail_mass_empirical(ens, t, &[50, 100])?;
    for (k, e) in emp {
        let exact = tail_mass(t, k)?.exact;
        r.push(Check::compare(format!("tail mass from k = {k}"), e, exact, s.tol(0.0, 3.0)));
    }
    let tm = tail_mass(t, 100)?;
    let rel = (tm.exact - tm.asymptote).abs() / tm.asymptote;
    r.push(Check::at_most("series vs asymptote at k = 100 (relative)", rel, 0.03));
    Ok(r)
}

pub fn criterion_gaps(ens: &ReplicaEnsemble, s: &Scale) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(
        criterion_name(7),
        "tau_{i+1} - tau_i ~ alpha / (N n^2) and n_{tau_i} - n_{tau_{i+1}} in [alpha/N, (1+delta) alpha/N]",
    );
    let g = gap_statistics(ens, (1.5, 2.5))?;
    let d = 0.5;
    let both = g
        .gaps
        .iter()
        .zip(&g.drops)
        .filter(|(&gap, &drop)| (1.0 - d..=1.0 + d).contains(&gap) && (1.0..=1.0 + d).contains(&drop))
        .count() as f64
        / g.gaps.len() as f64;
    r.push(Check::at_least("fraction of events with gap and drop in window", both, s.coverage));
    r.note(format!(
        "{} events; gaps alone {}, drops alone {}",
        g.gaps.len(),
        GapStatistics::fraction_in(&g.gaps, 1.0 - d, 1.0 + d),
        GapStatistics::fraction_in(&g.drops, 1.0, 1.0 + d)
    ));
    Ok(r)
}

pub fn criterion_pareto(s: &Scale, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(8), "P(Z > t) = min(1, 1/t)");
    let config = SimConfig::new(s.n).threshold(Threshold::power(0.75)).t_max(4.0).seed(seed);
    let ens = ReplicaEnsemble::run(&config, s.pareto_replicas)?;
    for (t, est) in z_survival_curve(&ens, &[1.5, 2.0, 4.0])? {
        r.push(Check::compare_additive(
            format!("P(Z > {t})"),
            est,
            1.0 / t,
            0.03 * s.widen,
            3.0 * s.widen,
        ));
    }
    Ok(r)
}

fn coupling_failures(s: &Scale, exponent: f64, seed: u64) -> Result<Estimate> {
    let config = SimConfig::new(s.n)
        .threshold(Threshold::power(exponent))
        .t_max(3.0)
        .mode(Mode::Alternative)
        .seed(seed);
    let held: Vec<bool> = (0..s.coupling_replicas as u64)
        .into_par_iter()
        .map(|i| {
            let mut c = config.clone();
            c.seed = replica_seed(seed, i);
            coupling_event(&c).map(|rep| rep.holds)
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::proportion(held.iter().filter(|h| !**h).count(), held.len()))
}

pub fn criterion_coupling(s: &Scale, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(9), "P(no second candidate needed before T) -> 1");
    let high = coupling_failures(s, 0.85, seed)?;
    let low = coupling_failures(s, 0.70, seed ^ 0x70)?;
    r.push(Check::at_most("failure frequency at alpha = N^0.85", high.mean, 0.1 * s.widen));
    r.push(Check::at_most("failure frequency N^0.85 minus N^0.70", high.mean - low.mean, 0.0));
    r.note(format!("failure frequency at alpha = N^0.70: {}", low.mean));
    Ok(r)
}

pub fn criterion_near_critical(s: &Scale, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(
        criterion_name(10),
        "|C_1| ~ 2 gamma eps n, |C_2| = o(eps n), S_k near k(gamma eps - k/2n) on k <= 3 n eps",
    );
    let n = s.er_n;
    let nf = n as f64;
    let eps = 0.03;
    let sizes: Vec<(usize, usize)> = (0..s.er_runs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, i));
            largest_two_components(n, (1.0 + eps) / nf, &mut rng)
        })
        .collect::<Result<_>>()?;
    let en = eps * nf;
    let w = 0.2 * s.widen;
    let good = sizes
        .iter()
        .filter(|&&(c1, c2)| {
            let (c1, c2) = (c1 as f64, c2 as f64);
            c1 >= (2.0 - w) * en && c1 <= (2.0 + w) * en && c2 <= w * en
        })
        .count() as f64
        / sizes.len() as f64;
    r.push(Check::at_least("fraction with |C_1|, |C_2| in window (eps = 0.03)", good, s.coverage));

    let eps = nf.powf(-0.25);
    let steps = ((3.0 * nf * eps).floor() as usize + 1).min(n);
    let devs: Vec<f64> = (0..s.er_runs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed ^ 0x7B, i));
            let rec = explore(n, (1.0 + eps) / nf, steps, &mut rng)?;
            tube_deviation(&rec, 1.0, eps)
        })
        .collect::<Result<_>>()?;
    let small = devs.iter().filter(|&&d| d < 0.2 * s.widen).count() as f64 / devs.len() as f64;
    r.push(Check::at_least("fraction with tube deviation below bound (eps = n^-1/4)", small, s.coverage));
    let c1: Vec<f64> = sizes.iter().map(|p| p.0 as f64 / en).collect();
    let c1 = Estimate::from_samples(&c1);
    let mut sorted = devs.clone();
    sorted.sort_by(f64::total_cmp);
    r.note(format!("|C_1| / (eps n): mean {} +- {}", c1.mean, c1.stderr));
    r.note(format!("median tube deviation {}", sorted[sorted.len() / 2]));
    Ok(r)
}

pub fn criterion_kinetics() -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(criterion_name(11), "truncated ODEs against closed forms");
    let grid: Vec<f64> = (1..=18).map(|i| i as f64 * 0.05).collect();
    let c0 = [1.0];
    let ode = solve_smoluchowski_ode(&c0, 2000, &grid)?;
    let mut worst: f64 = 0.0;
    for (i, &t) in grid.iter().enumerate() {
        for m in 1..=50 {
            worst = worst.max((ode.concentration(i, m) - smoluchowski_exact_mono(t, m)?).abs());
        }
    }
    r.push(Check::at_most("sup error, t <= 0.9, m <= 50", worst, 1e-6));
    let flory = solve_flory_ode(&c0, 2000, &[2.0])?;
    let exact = flory_mass(2.0);
    r.push(Check::at_most("Flory mass at t = 2, relative error", (flory.mass(0) - exact).abs() / exact, 0.01));
    r.note(format!("Flory mass {} against {}", flory.mass(0), exact));
    Ok(r)
}

/// Outcome of a small system: sorted sizes of clusters in solution and the
/// gel mass.
pub type SmallOutcome = (Vec<usize>, usize);

fn outcome_of(sample: &Sample) -> SmallOutcome {
    let mut sizes = Vec::new();
    for (i, &c) in sample.histogram.iter().enumerate() {
        sizes.extend(std::iter::repeat_n(i + 1, c as usize));
    }
    (sizes, sample.gel_mass)
}

fn outcome_of_labels(labels: &[usize], alpha: usize) -> SmallOutcome {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let mut sizes: Vec<usize> = counts.values().copied().filter(|&s| s < alpha).collect();
    sizes.sort_unstable();
    let gel = counts.values().copied().filter(|&s| s >= alpha).sum();
    (sizes, gel)
}

fn pairs_of(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Exact law at time `t` of the threshold model on `n <= 8` particles.
///
/// Only the first activation of a pair can change anything, the order of
/// first activations is a uniform permutation and the number of distinct
/// pairs activated by `t` is `Bin(M, 1 - exp(-t/n))`, independent of it.
pub fn exact_threshold_law(n: usize, alpha: usize, t: f64) -> BTreeMap<SmallOutcome, f64> {
    assert!((2..=8).contains(&n));
    let pairs = pairs_of(n);
    let m = pairs.len();
    let bin = Binomial::new(1.0 - (-t / n as f64).exp(), m as u64).expect("valid binomial");
    let mut law = BTreeMap::new();
    let mut layer: HashMap<(u32, Vec<usize>), f64> = HashMap::new();
    layer.insert((0, (0..n).collect()), 1.0);
    for k in 0..=m {
        let w = bin.pmf(k as u64);
        for ((_, labels), &p) in &layer {
            *law.entry(outcome_of_labels(labels, alpha)).or_insert(0.0) += w * p;
        }
        if k == m {
            break;
        }
        let mut next: HashMap<(u32, Vec<usize>), f64> = HashMap::new();
        let pick = 1.0 / (m - k) as f64;
        for ((used, labels), &p) in &layer {
            for (e, &(u, v)) in pairs.iter().enumerate() {
                if used & (1 << e) != 0 {
                    continue;
                }
                let size = |l: usize| labels.iter().filter(|&&x| x == l).count();
                let (lu, lv) = (labels[u], labels[v]);
                let mut new_labels = labels.clone();
                if lu != lv && size(lu) < alpha && size(lv) < alpha {
                    let (keep, drop) = (lu.min(lv), lu.max(lv));
                    for x in new_labels.iter_mut() {
                        if *x == drop {
                            *x = keep;
                        }
                    }
                }
                *next.entry((used | (1 << e), new_labels)).or_insert(0.0) += p * pick;
            }
        }
        layer = next;
    }
    law
}

/// Exact law at time `t` of pure percolation on `n <= 8` particles, by
/// enumerating edge subsets; clusters of size at least `alpha` count as gel.
pub fn exact_flory_law(n: usize, alpha: usize, t: f64) -> BTreeMap<SmallOutcome, f64> {
    assert!((2..=8).contains(&n));
    let pairs = pairs_of(n);
    let p = 1.0 - (-t / n as f64).exp();
    let mut law = BTreeMap::new();
    for subset in 0u32..(1 << pairs.len()) {
        let mut labels: Vec<usize> = (0..n).collect();
        for (e, &(u, v)) in pairs.iter().enumerate() {
            if subset & (1 << e) != 0 {
                let (a, b) = (labels[u], labels[v]);
                if a != b {
                    for x in labels.iter_mut() {
                        if *x == b {
                            *x = a;
                        }
                    }
                }
            }
        }
        let k = subset.count_ones() as i32;
        let w = p.powi(k) * (1.0 - p).powi(pairs.len() as i32 - k);
        *law.entry(outcome_of_labels(&labels, alpha)).or_insert(0.0) += w;
    }
    law
}

/// Chi-square p-value of `replicas` simulated outcomes against `law`.
pub fn small_system_p_value(
    law: &BTreeMap<SmallOutcome, f64>,
    mode: Mode,
    n: usize,
    alpha: usize,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<f64> {
    let config = SimConfig::new(n)
        .threshold(Threshold::Absolute { value: alpha })
        .mode(mode)
        .t_max(t)
        .sample_times(vec![t])
        .m_cap(n)
        .seed(seed);
    let index: HashMap<&SmallOutcome, usize> = law.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let cells = law.len() + 1;
    let counts = (0..replicas as u64)
        .into_par_iter()
        .try_fold(
            || vec![0u64; cells],
            |mut acc, i| -> Result<Vec<u64>> {
                let mut c = config.clone();
                c.seed = replica_seed(seed, i);
                let res = run_sim(&c)?;
                let o = outcome_of(&res.trajectory[0]);
                acc[index.get(&o).copied().unwrap_or(cells - 1)] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    if counts[cells - 1] > 0 {
        return Ok(0.0);
    }
    let mut probs: Vec<f64> = law.values().copied().collect();
    probs.push(0.0);
    Ok(chi_square_gof(&counts, &probs)?.p_value)
}

pub fn criterion_small_systems(s: &Scale, seed: u64) -> Result<ComparisonReport> {
    let mut r = ComparisonReport::new(
        criterion_name(12),
        "exhaustive enumeration over activation orders and edge subsets",
    );
    let min_p = 1e-3;
    let cases = [
        (Mode::Smoluchowski, 5, 3, 1.0),
        (Mode::Smoluchowski, 5, 3, 3.0),
        (Mode::Smoluchowski, 4, 2, 2.0),
        (Mode::Flory, 5, 3, 1.0),
    ];
    for (i, &(mode, n, alpha, t)) in cases.iter().enumerate() {
        let law = match mode {
            Mode::Flory => exact_flory_law(n, alpha, t),
            _ => exact_threshold_law(n, alpha, t),
        };
        let p = small_system_p_value(&law, mode, n, alpha, t, s.small_n_replicas, seed ^ i as u64)?;
        r.push(Check::at_least(
            format!("chi-square p-value, {mode:?} N = {n}, alpha = {alpha}, t = {t}"),
            p,
            min_p,
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE0);
    let mut mismatches = 0;
    for _ in 0..5000 {
        let n = rng.random_range(1..=12);
        let p = rng.random::<f64>();
        let edges = bernoulli_pairs(n, p, &mut rng);
        let mut forest = ClusterForest::new(n)?;
        for &(u, v) in &edges {
            forest.link_unconditional(u as usize, v as usize, n + 1)?;
        }
        let mut want: Vec<usize> = forest
            .component_size_histogram()
            .into_iter()
            .flat_map(|(s, c)| std::iter::repeat_n(s, c))
            .collect();
        let mut got = explore_edges(n, &edges)?.excursion_sizes;
        want.sort_unstable();
        got.sort_unstable();
        mismatches += usize::from(want != got);
    }
    r.push(Check::at_most("graphs whose excursions differ from components", mismatches as f64, 0.0));

    let trees = enumerate_rooted_trees(6)?;
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 1.0] {
        for (k, of_size) in trees.iter().enumerate() {
            let total: f64 = of_size.iter().map(|t| gw_tree_prob(lambda, t)).sum();
            worst = worst.max((total - borel_pmf(lambda, k + 1)?).abs());
        }
    }
    r.push(Check::at_most("tree probabilities vs Borel, sizes <= 6", worst, 1e-10));
    Ok(r)
}
