// The rejection construction from independent graphs: how often it needs a
// second candidate, and its mass curve next to the direct simulation.

use gelation::alternative::coupling_event;
use gelation::stats::{estimate_mass, ReplicaEnsemble};
use gelation::{Mode, SimConfig, Threshold};

/// Returns `(failure frequency, alternative n_2, direct n_2)`.
pub fn run_example() -> gelation::Result<(f64, f64, f64)> {
    let n = 50_000;
    let base = SimConfig::new(n).threshold(Threshold::power(0.85)).t_max(3.0).mode(Mode::Alternative);
    let mut failures = 0;
    let runs = 10;
    for seed in 0..runs {
        let report = coupling_event(&base.clone().seed(seed))?;
        if !report.holds {
            failures += 1;
            println!("seed {seed}: rejection at event {:?}", report.first_rejection_step);
        }
    }
    let freq = failures as f64 / runs as f64;
    println!("needed a second candidate in {failures} of {runs} runs");

    let sampled = base.clone().t_max(2.0).sample_times(vec![2.0]).seed(1);
    let alt = estimate_mass(&ReplicaEnsemble::run(&sampled, 10)?, 2.0)?;
    let direct = estimate_mass(&ReplicaEnsemble::run(&sampled.mode(Mode::Smoluchowski), 10)?, 2.0)?;
    println!("n_2: alternative {:.4} +- {:.4}, direct {:.4} +- {:.4}", alt.mean, alt.stderr, direct.mean, direct.stderr);
    Ok((freq, alt.mean, direct.mean))
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
