// Mass in solution along one trajectory against `min(1, 1/t)`.

use gelation::{run, SimConfig, Threshold};

/// Returns the largest deviation from `min(1, 1/t)` on the grid.
pub fn run_example() -> gelation::Result<f64> {
    let n = 200_000;
    let times: Vec<f64> = (1..=12).map(|i| i as f64 * 0.25).collect();
    let config = SimConfig::new(n)
        .threshold(Threshold::power(0.75))
        .t_max(3.0)
        .sample_times(times)
        .seed(3);
    let result = run(&config)?;
    let mut worst: f64 = 0.0;
    println!("{:>6} {:>10} {:>10}", "t", "n_t", "min(1,1/t)");
    for s in &result.trajectory {
        let n_t = s.n_in_solution as f64 / n as f64;
        let limit = (1.0 / s.time).min(1.0);
        worst = worst.max((n_t - limit).abs());
        println!("{:>6} {:>10.5} {:>10.5}", s.time, n_t, limit);
    }
    println!("{} gelation events, alpha = {}", result.gelation_events.len(), result.threshold);
    Ok(worst)
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
