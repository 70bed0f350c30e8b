//! Command-line front end: `simulate`, `kinetics`, `explore` and `verify`.
//!
//! Exit codes: 0 on success, 1 when a verified criterion fails, 2 on invalid
//! input or I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::acceptance::{Scale, Suite, CRITERIA};
use crate::error::{invalid, Error, Result};
use crate::exploration::{explore, tube_deviation};
use crate::kinetics::{
    explicit_table, flory_mass, mass_in_solution, solve_flory_ode, solve_smoluchowski_ode, KineticsTable,
};
use crate::sim::{replica_seed, Mode, SimConfig, SimResult, Threshold};
use crate::trees::{canonicalize, Canonical};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "gelsim", version, about = "Threshold coagulation simulator and verifier")]
pub struct Cli {
    /// Master seed; replica seeds are derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run replicas of a particle system and write trajectories.
    Simulate(SimulateArgs),
    /// Tabulate exact and ODE concentrations.
    Kinetics(KineticsArgs),
    /// Explore near-critical random graphs.
    Explore(ExploreArgs),
    /// Run the acceptance suite and write report.json.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "smoluchowski")]
    pub model: Mode,
    #[arg(long = "n", default_value_t = 10_000)]
    pub n: usize,
    /// Threshold rule `N^a` or `N^a*log^g` (a bare number means `N^a`).
    #[arg(long, conflicts_with = "alpha_abs")]
    pub alpha: Option<String>,
    /// Absolute threshold.
    #[arg(long)]
    pub alpha_abs: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// Comma-separated, increasing.
    #[arg(long, value_delimiter = ',')]
    pub sample_times: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, default_value_t = 100)]
    pub m_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub typical_samples: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KineticsSourceArg {
    Explicit,
    Ode,
    Flory,
    All,
}

#[derive(Debug, Args)]
pub struct KineticsArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub source: KineticsSourceArg,
    /// Comma-separated, increasing.
    #[arg(long, value_delimiter = ',', num_args = 0.., default_value = "0.5,1,2")]
    pub times: Vec<f64>,
    /// Largest size written.
    #[arg(long, default_value_t = 10)]
    pub m_out: usize,
    /// Truncation of the ODE systems.
    #[arg(long, default_value_t = 2000)]
    pub m_max: usize,
    /// Initial concentrations c0(1), c0(2), ... (default monodisperse).
    #[arg(long, value_delimiter = ',', conflicts_with = "initial_file")]
    pub initial: Vec<f64>,
    /// JSON array of initial concentrations.
    #[arg(long)]
    pub initial_file: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[arg(long = "n", default_value_t = 100_000)]
    pub n: usize,
    /// Distance from criticality; `p = (1 + gamma eps) / n`.
    #[arg(long, default_value_t = 0.03)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced sizes with widened tolerances.
    #[arg(long)]
    pub quick: bool,
    /// Subset of criteria to run (default all).
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u8>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Parses `N^a`, `N^a*log^g` or a bare exponent.
pub fn parse_threshold_rule(s: &str) -> Result<Threshold> {
    let bad = || invalid("alpha", format!("'{s}' is not N^a or N^a*log^g"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (power, log) = match compact.split_once('*') {
        Some((p, l)) => (p, Some(l)),
        None => (compact.as_str(), None),
    };
    let exponent: f64 = power.strip_prefix("N^").unwrap_or(power).parse().map_err(|_| bad())?;
    let log_exponent: f64 = match log {
        Some(l) => l
            .strip_prefix("log^")
            .or_else(|| l.strip_prefix("ln^"))
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?,
        None => 0.0,
    };
    Ok(Threshold::Rule {
        exponent,
        log_exponent,
    })
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_file(path, s)
}

/// A long-format table written as CSV or as a JSON array of records.
struct Table {
    name: &'static str,
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &'static [&'static str]) -> Self {
        Self {
            name,
            header,
            rows: Vec::new(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    fn write(&self, dir: &Path, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                write_file(&dir.join(format!("{}.csv", self.name)), s)
            }
            Format::Json => {
                let records: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        self.header
                            .iter()
                            .zip(r)
                            .map(|(h, v)| {
                                let value = serde_json::from_str(v).unwrap_or_else(|_| json!(v));
                                (h.to_string(), value)
                            })
                            .collect()
                    })
                    .collect();
                write_json(
                    &dir.join(format!("{}.json", self.name)),
                    &json!({ "schema_version": SCHEMA_VERSION, "rows": records }),
                )
            }
        }
    }
}

macro_rules! cells {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

pub fn simulate(seed: u64, args: &SimulateArgs) -> Result<Vec<SimResult>> {
    if args.replicas == 0 {
        return Err(invalid("replicas", "must be at least 1"));
    }
    let threshold = match (&args.alpha, args.alpha_abs) {
        (_, Some(value)) => Threshold::Absolute { value },
        (Some(rule), None) => parse_threshold_rule(rule)?,
        (None, None) => Threshold::default(),
    };
    let config = SimConfig::new(args.n)
        .threshold(threshold)
        .t_max(args.t_max)
        .mode(args.model)
        .seed(seed)
        .sample_times(args.sample_times.clone())
        .m_cap(args.m_cap)
        .typical_samples(args.typical_samples);
    let alpha = config.validate()?;
    create_dir(&args.out)?;
    let results = crate::sim::run_replicas(&config, args.replicas)?;

    let mut trajectory = Table::new("trajectory", &["replica", "time", "n_solution", "gel_mass", "events_so_far"]);
    let mut conc = Table::new("concentrations", &["replica", "time", "m", "c_emp"]);
    let mut events = Table::new("gelation_events", &["replica", "i", "tau_i", "fallen_size", "n_after"]);
    let n = args.n as f64;
    let mut typical = serde_json::Map::new();
    for (r, res) in results.iter().enumerate() {
        for s in &res.trajectory {
            trajectory.row(cells![r, s.time, s.n_in_solution, s.gel_mass, s.events_so_far]);
            for m in 1..=args.m_cap {
                conc.row(cells![r, s.time, m, s.count(m) as f64 / n]);
            }
        }
        for (i, e) in res.gelation_events.iter().enumerate() {
            events.row(cells![r, i + 1, e.time, e.fallen_size, e.n_after]);
        }
        for snap in &res.typical_clusters {
            let codes = snap
                .samples
                .iter()
                .map(|g| {
                    Ok(match canonicalize(g, 0)? {
                        Canonical::Tree(t) => json!(t.code()),
                        Canonical::NotATree => json!({ "cycle": true, "size": g.size(), "surplus": g.surplus() }),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let entry = typical
                .entry(snap.time.to_string())
                .or_insert_with(|| json!([]))
                .as_array_mut()
                .expect("array");
            entry.extend(codes);
        }
    }
    trajectory.write(&args.out, args.format)?;
    conc.write(&args.out, args.format)?;
    events.write(&args.out, args.format)?;
    write_json(
        &args.out.join("typical_clusters.json"),
        &json!({ "schema_version": SCHEMA_VERSION, "pooled_over_replicas": true, "clusters": typical }),
    )?;
    let seeds: Vec<u64> = (0..args.replicas as u64).map(|i| replica_seed(seed, i)).collect();
    write_json(
        &args.out.join("meta.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "crate_version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "resolved_alpha": alpha,
            "replicas": args.replicas,
            "replica_seeds": seeds,
        }),
    )?;
    Ok(results)
}

fn initial_condition(args: &KineticsArgs) -> Result<Vec<f64>> {
    if let Some(path) = &args.initial_file {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        return Ok(serde_json::from_str(&text)?);
    }
    if args.initial.is_empty() {
        Ok(vec![1.0])
    } else {
        Ok(args.initial.clone())
    }
}

pub fn kinetics(args: &KineticsArgs) -> Result<()> {
    if args.times.windows(2).any(|w| !(w[0] < w[1])) || args.times.iter().any(|t| !(*t >= 0.0)) {
        return Err(invalid("times", "must be nonnegative and increasing"));
    }
    if args.m_out == 0 || args.m_out > args.m_max {
        return Err(invalid("m_out", format!("must be in 1..={}", args.m_max)));
    }
    let c0 = initial_condition(args)?;
    let monodisperse = c0 == [1.0];
    let want = |s: KineticsSourceArg| args.source == s || args.source == KineticsSourceArg::All;
    create_dir(&args.out)?;

    let mut tables: Vec<KineticsTable> = Vec::new();
    if !args.times.is_empty() {
        if args.source == KineticsSourceArg::Explicit && !monodisperse {
            return Err(invalid("source", "the explicit solution needs the monodisperse start"));
        }
        if want(KineticsSourceArg::Explicit) && monodisperse {
            tables.push(explicit_table(&args.times, args.m_out)?);
        }
        if want(KineticsSourceArg::Ode) {
            tables.push(solve_smoluchowski_ode(&c0, args.m_max, &args.times)?);
        }
        if want(KineticsSourceArg::Flory) || (!monodisperse && args.source == KineticsSourceArg::All) {
            tables.push(solve_flory_ode(&c0, args.m_max, &args.times)?);
        }
    }
    let mut csv = String::from("source,time,m,c\n");
    for table in &tables {
        for (i, t) in table.times.iter().enumerate() {
            for m in 1..=args.m_out.min(table.m_max) {
                let _ = writeln!(csv, "{},{},{},{}", table.source.name(), t, m, table.concentration(i, m));
            }
        }
    }
    write_file(&args.out.join("kinetics.csv"), csv)?;

    let mut mass = String::from("time,n_t,flory_mass\n");
    if monodisperse {
        for &t in &args.times {
            let _ = writeln!(mass, "{},{},{}", t, mass_in_solution(t), flory_mass(t));
        }
    } else if !args.times.is_empty() {
        let s = solve_smoluchowski_ode(&c0, args.m_max, &args.times)?;
        let f = solve_flory_ode(&c0, args.m_max, &args.times)?;
        for (i, t) in args.times.iter().enumerate() {
            let _ = writeln!(mass, "{},{},{}", t, s.mass(i), f.mass(i));
        }
    }
    write_file(&args.out.join("mass.csv"), mass)?;
    write_json(
        &args.out.join("meta.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "kinetics",
            "crate_version": env!("CARGO_PKG_VERSION"),
            "times": args.times,
            "m_out": args.m_out,
            "m_max": args.m_max,
            "initial": c0,
        }),
    )
}

pub fn explore_cmd(seed: u64, args: &ExploreArgs) -> Result<()> {
    if args.runs == 0 {
        return Err(invalid("runs", "must be at least 1"));
    }
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(invalid("eps", "must be in (0, 1)"));
    }
    let n = args.n;
    let p = (1.0 + args.gamma * args.eps) / n as f64;
    create_dir(&args.out)?;
    let runs: Vec<(Vec<usize>, f64, Vec<i64>)> = (0..args.runs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, i));
            let rec = explore(n, p, n, &mut rng)?;
            let dev = tube_deviation(&rec, args.gamma, args.eps)?;
            let mut sizes = rec.excursion_sizes.clone();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            sizes.truncate(2);
            sizes.resize(2, 0);
            let horizon = ((3.0 * n as f64 * args.eps).floor() as usize).min(rec.walk.len() - 1);
            Ok((sizes, dev, rec.walk[..=horizon].to_vec()))
        })
        .collect::<Result<_>>()?;
    let mut comps = String::from("run,largest,second,tube_deviation\n");
    let mut walk = String::from("run,k,s\n");
    for (r, (sizes, dev, w)) in runs.iter().enumerate() {
        let _ = writeln!(comps, "{},{},{},{}", r, sizes[0], sizes[1], dev);
        if r == 0 {
            for (k, s) in w.iter().enumerate() {
                let _ = writeln!(walk, "{r},{k},{s}");
            }
        }
    }
    write_file(&args.out.join("components.csv"), comps)?;
    write_file(&args.out.join("walk.csv"), walk)?;
    write_json(
        &args.out.join("meta.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "explore",
            "crate_version": env!("CARGO_PKG_VERSION"),
            "n": n, "eps": args.eps, "gamma": args.gamma, "p": p,
            "runs": args.runs, "seed": seed,
        }),
    )
}

/// Runs the suite; returns whether every selected criterion passed.
pub fn verify(seed: u64, args: &VerifyArgs) -> Result<bool> {
    let ids: Vec<u8> = if args.criteria.is_empty() {
        (1..=CRITERIA).collect()
    } else {
        args.criteria.clone()
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA) {
        return Err(invalid("criteria", format!("{bad} is not in 1..={CRITERIA}")));
    }
    create_dir(&args.out)?;
    let scale = if args.quick { Scale::quick() } else { Scale::full() };
    let suite = Suite::new(seed, scale);
    let results = suite.run_all(&ids, |r| println!("{}", r.line()));
    let pass = results.iter().all(|r| r.report.pass);
    write_json(
        &args.out.join("report.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "crate_version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "quick": args.quick,
            "scale": scale,
            "pass": pass,
            "criteria": results,
        }),
    )?;
    Ok(pass)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli.seed, a).map(|_| 0),
        Command::Kinetics(a) => kinetics(a).map(|_| 0),
        Command::Explore(a) => explore_cmd(cli.seed, a).map(|_| 0),
        Command::Verify(a) => verify(cli.seed, a).map(|pass| if pass { 0 } else { 1 }),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let run = || match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    match cli.jobs {
        Some(0) => {
            eprintln!("error: --jobs must be at least 1");
            2
        }
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        None => run(),
    }
}
