// First gelation time and first fallen mass against `1 + alpha/(2N)`.

use gelation::stats::{tau_statistics, ReplicaEnsemble};
use gelation::{SimConfig, Threshold};

/// Returns `(mean tau_1, 1 + alpha / 2N)`.
pub fn run_example() -> gelation::Result<(f64, f64)> {
    let n = 100_000;
    let config = SimConfig::new(n).threshold(Threshold::power(0.75)).t_max(1.5).seed(7);
    let ens = ReplicaEnsemble::run(&config, 20)?;
    let alpha = ens.results[0].threshold as f64;
    let tau = tau_statistics(&ens, 0.9)?;
    let prediction = 1.0 + alpha / (2.0 * n as f64);
    println!("N = {n}, alpha = {alpha}");
    println!("mean tau_1 = {:.5} +- {:.5}, prediction {prediction:.5}", tau.mean, tau.stderr);
    let ratios: Vec<String> = tau.first_sizes.iter().map(|&s| format!("{:.2}", s as f64 / alpha)).collect();
    println!("first fallen size / alpha: {}", ratios.join(" "));
    Ok((tau.mean, prediction))
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
