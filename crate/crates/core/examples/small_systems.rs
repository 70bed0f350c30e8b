// Five particles: the exact law from enumerating activation orders against
// simulated frequencies.

use gelation::acceptance::{exact_threshold_law, small_system_p_value};
use gelation::Mode;

/// Returns the chi-square p-value.
pub fn run_example() -> gelation::Result<f64> {
    let (n, alpha, t) = (5, 3, 1.0);
    let law = exact_threshold_law(n, alpha, t);
    println!("N = {n}, alpha = {alpha}, t = {t}");
    for ((sizes, gel), p) in &law {
        println!("solution {sizes:?}, gel {gel}: {p:.6}");
    }
    let p = small_system_p_value(&law, Mode::Smoluchowski, n, alpha, t, 100_000, 1)?;
    println!("chi-square p-value over 100000 runs: {p:.3}");
    Ok(p)
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
