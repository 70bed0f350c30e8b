// Mass in solution with and without the threshold: `1/t` against the
// Galton-Watson extinction mass of pure percolation.

use gelation::kinetics::{flory_mass, mass_in_solution};
use gelation::{run, Mode, SimConfig, Threshold};

/// Returns `(threshold n_2, percolation n_2)` from simulation.
pub fn run_example() -> gelation::Result<(f64, f64)> {
    let n = 100_000;
    let times = vec![0.5, 1.0, 1.5, 2.0];
    let mut out = Vec::new();
    for mode in [Mode::Smoluchowski, Mode::Flory] {
        let config = SimConfig::new(n)
            .threshold(Threshold::power(0.75))
            .t_max(2.0)
            .sample_times(times.clone())
            .mode(mode)
            .seed(5);
        out.push(run(&config)?);
    }
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "t", "threshold", "1/t", "flory", "GW");
    for (i, &t) in times.iter().enumerate() {
        let a = out[0].trajectory[i].n_in_solution as f64 / n as f64;
        let b = out[1].trajectory[i].n_in_solution as f64 / n as f64;
        println!("{t:>4} {a:>10.5} {:>10.5} {b:>10.5} {:>10.5}", mass_in_solution(t), flory_mass(t));
    }
    let last = times.len() - 1;
    Ok((
        out[0].trajectory[last].n_in_solution as f64 / n as f64,
        out[1].trajectory[last].n_in_solution as f64 / n as f64,
    ))
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
