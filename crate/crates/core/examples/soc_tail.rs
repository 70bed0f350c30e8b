// After gelation the mass in clusters of size at least `k` decays like
// `k^(-1/2)`: exact series, asymptote and simulation.

use gelation::kinetics::tail_mass;
use gelation::stats::{tail_mass_empirical, ReplicaEnsemble};
use gelation::{SimConfig, Threshold};

/// Returns the relative gap between the series and the asymptote at `k = 100`.
pub fn run_example() -> gelation::Result<f64> {
    let t = 2.0;
    let ks = [5, 10, 20, 50, 100];
    let config = SimConfig::new(100_000)
        .threshold(Threshold::power(0.75))
        .t_max(t)
        .sample_times(vec![t])
        .m_cap(100)
        .seed(4);
    let ens = ReplicaEnsemble::run(&config, 10)?;
    let emp = tail_mass_empirical(&ens, t, &ks)?;
    println!("{:>4} {:>10} {:>10} {:>16}", "k", "series", "asymptote", "simulated");
    let mut gap = 0.0;
    for k in ks {
        let tm = tail_mass(t, k)?;
        let e = emp[&k];
        println!("{k:>4} {:>10.5} {:>10.5} {:>9.5} +- {:.4}", tm.exact, tm.asymptote, e.mean, e.stderr);
        gap = (tm.exact - tm.asymptote).abs() / tm.asymptote;
    }
    Ok(gap)
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
