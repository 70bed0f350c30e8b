// Shapes of size-biased clusters after gelation against the critical
// Poisson Galton-Watson tree.

use std::collections::BTreeMap;

use gelation::stats::{tv_distance, typical_cluster_distribution, ReplicaEnsemble};
use gelation::trees::gw_distribution;
use gelation::{SimConfig, Threshold};

/// Returns the total variation distance on trees of size at most 3.
pub fn run_example() -> gelation::Result<f64> {
    let config = SimConfig::new(100_000)
        .threshold(Threshold::power(0.75))
        .t_max(2.0)
        .sample_times(vec![2.0])
        .typical_samples(500)
        .seed(11);
    let ens = ReplicaEnsemble::run(&config, 8)?;
    let dist = typical_cluster_distribution(&ens, 2.0, 3)?;
    let exact: BTreeMap<String, f64> = gw_distribution(1.0, 3)?
        .into_iter()
        .map(|(t, p)| (t.code().to_string(), p))
        .collect();
    let freq = dist.frequencies();
    println!("{:>10} {:>9} {:>9}", "tree", "sampled", "GW(1)");
    for (code, p) in &exact {
        println!("{code:>10} {:>9.4} {p:>9.4}", freq.get(code).copied().unwrap_or(0.0));
    }
    let tv = tv_distance(&freq, &exact);
    println!("total variation {tv:.4}, clusters with a cycle {:.4}", dist.cycle_frequency());
    Ok(tv)
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
