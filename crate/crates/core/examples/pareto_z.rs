// Time at which a tagged particle falls into the gel: `P(Z > t) = 1/t`, and
// the surplus of the cluster it falls with.

use gelation::stats::{surplus_statistic, z_survival_curve, ReplicaEnsemble};
use gelation::{SimConfig, Threshold};

/// Returns the largest deviation of `P(Z > t)` from `min(1, 1/t)`.
pub fn run_example() -> gelation::Result<f64> {
    let config = SimConfig::new(20_000).threshold(Threshold::power(0.75)).t_max(4.0).seed(21);
    let ens = ReplicaEnsemble::run(&config, 200)?;
    let grid = [0.5, 1.5, 2.0, 3.0, 4.0];
    let mut worst: f64 = 0.0;
    for (t, est) in z_survival_curve(&ens, &grid)? {
        let exact = (1.0 / t).min(1.0);
        worst = worst.max((est.mean - exact).abs());
        println!("P(Z > {t}) = {:.3} +- {:.3}, 1/t = {exact:.3}", est.mean, est.stderr);
    }
    let bin = surplus_statistic(&ens, 1.0, 4.0, 1)?;
    println!(
        "surplus N^2/alpha^3 at fall: {:.3} +- {:.3}, Z^2/12 averaged {:.3} ({} replicas)",
        bin.statistic.mean, bin.statistic.stderr, bin.prediction, bin.count
    );
    Ok(worst)
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
