// Breadth-first exploration of a slightly supercritical random graph: the
// walk follows `k (eps - k / 2n)` and the giant holds about `2 eps n`.

use gelation::exploration::{explore, largest_two_components, tube_deviation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns `(tube deviation, |C_1| / (eps n))`.
pub fn run_example() -> gelation::Result<(f64, f64)> {
    let n = 200_000;
    let eps = 0.05;
    let p = (1.0 + eps) / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let steps = (3.0 * n as f64 * eps) as usize + 1;
    let record = explore(n, p, steps, &mut rng)?;
    let dev = tube_deviation(&record, 1.0, eps)?;
    let (c1, c2) = largest_two_components(n, p, &mut rng)?;
    let scale = eps * n as f64;
    println!("n = {n}, eps = {eps}");
    println!("tube deviation over k <= 3 n eps: {dev:.3}");
    println!("|C_1| = {c1} ({:.3} eps n), |C_2| = {c2} ({:.3} eps n)", c1 as f64 / scale, c2 as f64 / scale);
    for k in (0..=steps).step_by(steps / 6) {
        let kf = k as f64;
        println!("S_{k} = {:>6}, parabola {:>9.1}", record.walk[k], kf * (eps - kf / (2.0 * n as f64)));
    }
    Ok((dev, c1 as f64 / scale))
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
