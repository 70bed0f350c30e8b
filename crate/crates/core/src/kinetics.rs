//! Multiplicative-kernel coagulation kinetics: Borel law, the explicit
//! monodisperse solution, survival and fixed-point equations, and truncated
//! ODE integrators for the Smoluchowski and Flory equations.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// `(lambda m)^(m-1) e^(-lambda m) / m!` for `lambda` in `[0, 1]`.
pub fn borel_pmf(lambda: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("{lambda} outside [0, 1]")));
    }
    if m == 0 {
        return Err(invalid("m", "sizes start at 1"));
    }
    if lambda == 0.0 {
        return Ok(if m == 1 { 1.0 } else { 0.0 });
    }
    let mf = m as f64;
    if m <= 20 {
        let factorial: f64 = (1..=m).map(|i| i as f64).product();
        Ok((lambda * mf).powi(m as i32 - 1) * (-lambda * mf).exp() / factorial)
    } else {
        Ok(((mf - 1.0) * (lambda * mf).ln() - lambda * mf - ln_gamma(mf + 1.0)).exp())
    }
}

fn borel(lambda: f64, m: usize) -> f64 {
    borel_pmf(lambda, m).expect("lambda checked by caller")
}

/// Explicit monodisperse solution: `B(t, m) / m` for `t <= 1` and
/// `B(1, m) / (m t)` afterwards.
pub fn smoluchowski_exact_mono(t: f64, m: usize) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} is negative")));
    }
    if m == 0 {
        return Err(invalid("m", "sizes start at 1"));
    }
    let mf = m as f64;
    if t <= 1.0 {
        Ok(borel(t, m) / mf)
    } else {
        Ok(borel(1.0, m) / (mf * t))
    }
}

/// Mass in solution for the monodisperse threshold model, `min(1, 1/t)`.
pub fn mass_in_solution(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else {
        1.0 / t
    }
}

const BISECTION_TOL: f64 = 1e-13;

fn bisect(mut lo: f64, mut hi: f64, positive_below_root: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if positive_below_root(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Survival probability of a Galton–Watson process with Poisson(`lambda`)
/// offspring: the largest root of `z = 1 - e^(-lambda z)`.
pub fn gw_survival(lambda: f64) -> f64 {
    if lambda <= 1.0 {
        return 0.0;
    }
    bisect(0.0, 1.0, |z| -(-lambda * z).exp_m1() - z > 0.0)
}

/// Mass in solution for Flory's equation (monodisperse): `1 - zeta(t)`.
pub fn flory_mass(t: f64) -> f64 {
    1.0 - gw_survival(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllRoot {
    /// Root of `x g0(x) = 1/t` in `(0, 1)`.
    pub ell: f64,
    /// `g0(ell)`.
    pub g0_at_ell: f64,
}

/// Generating function `g0(x) = sum_m m c0(m) x^m`, with `c0[m - 1] = c0(m)`.
pub fn size_biased_gf(c0: &[f64], x: f64) -> f64 {
    // Horner from the top coefficient
    let mut acc = 0.0;
    for (i, &c) in c0.iter().enumerate().rev() {
        acc = acc * x + (i + 1) as f64 * c;
    }
    acc * x
}

/// Solves `x g0(x) = 1/t` on `(0, 1)` by bisection, for `t` past the
/// gelation time `1 / <c0, m^2>`.
pub fn ell_fixed_point(c0: &[f64], t: f64) -> Result<EllRoot> {
    check_initial(c0)?;
    let m2: f64 = c0.iter().enumerate().map(|(i, &c)| ((i + 1) as f64).powi(2) * c).sum();
    if !(m2 > 0.0) {
        return Err(Error::NoRoot);
    }
    let t_gel = 1.0 / m2;
    if !(t > t_gel) {
        return Err(Error::Domain(format!("t = {t} is not past the gelation time {t_gel}")));
    }
    let target = 1.0 / t;
    let h = |x: f64| x * size_biased_gf(c0, x) - target;
    if h(1.0) <= 0.0 {
        return Err(Error::NoRoot);
    }
    let ell = bisect(0.0, 1.0, |x| h(x) < 0.0);
    Ok(EllRoot {
        ell,
        g0_at_ell: size_biased_gf(c0, ell),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailMass {
    /// `(1/t) sum_{m >= k} B(1, m)`.
    pub exact: f64,
    /// `sqrt(2) / (t sqrt(pi)) k^(-1/2)`.
    pub asymptote: f64,
}

/// Mass carried by clusters of size at least `k` after gelation.
pub fn tail_mass(t: f64, k: usize) -> Result<TailMass> {
    if !(t >= 1.0) {
        return Err(invalid("t", format!("{t} is before gelation")));
    }
    if k == 0 {
        return Err(invalid("k", "sizes start at 1"));
    }
    // B(1, .) sums to 1, so the tail is the complement of a finite sum
    let head: f64 = (1..k).map(|m| borel(1.0, m)).sum();
    let exact = (1.0 - head).max(0.0) / t;
    let asymptote = std::f64::consts::SQRT_2 / (t * std::f64::consts::PI.sqrt()) / (k as f64).sqrt();
    Ok(TailMass { exact, asymptote })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticsSource {
    Explicit,
    OdeSmoluchowski,
    OdeFlory,
}

impl KineticsSource {
    pub fn name(self) -> &'static str {
        match self {
            KineticsSource::Explicit => "explicit",
            KineticsSource::OdeSmoluchowski => "ode_smoluchowski",
            KineticsSource::OdeFlory => "ode_flory",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticsTable {
    pub times: Vec<f64>,
    pub m_max: usize,
    /// `values[i][m - 1] = c_{times[i]}(m)`.
    pub values: Vec<Vec<f64>>,
    pub source: KineticsSource,
}

impl KineticsTable {
    pub fn concentration(&self, time_index: usize, m: usize) -> f64 {
        self.values[time_index][m - 1]
    }

    /// `sum_m m c(m)` at a grid index.
    pub fn mass(&self, time_index: usize) -> f64 {
        moment(&self.values[time_index], 1)
    }

    /// `sum_m m^2 c(m)` at a grid index.
    pub fn second_moment(&self, time_index: usize) -> f64 {
        moment(&self.values[time_index], 2)
    }
}

fn moment(c: &[f64], power: i32) -> f64 {
    c.iter().enumerate().map(|(i, &v)| ((i + 1) as f64).powi(power) * v).sum()
}

/// Explicit monodisperse solution tabulated on a grid.
pub fn explicit_table(t_grid: &[f64], m_max: usize) -> Result<KineticsTable> {
    check_grid(t_grid)?;
    let values = t_grid
        .iter()
        .map(|&t| (1..=m_max).map(|m| smoluchowski_exact_mono(t, m)).collect())
        .collect::<Result<_>>()?;
    Ok(KineticsTable {
        times: t_grid.to_vec(),
        m_max,
        values,
        source: KineticsSource::Explicit,
    })
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("t_grid", "times must be finite and nonnegative"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("t_grid", "times must be sorted"));
    }
    Ok(())
}

fn check_initial(c0: &[f64]) -> Result<()> {
    if c0.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(invalid("c0", "concentrations must be finite and nonnegative"));
    }
    Ok(())
}

/// Largest allowed negative excursion of a concentration.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-13,
        }
    }
}

/// Half the truncated convolution, `gain[m] = 1/2 sum_{j=1}^{m-1} a[j] a[m-j]`,
/// with `a[m] = m c(m)` (index 0 unused).
fn coagulation_gain(a: &[f64], gain: &mut [f64]) {
    let m_max = a.len() - 1;
    gain[0] = 0.0;
    if m_max >= 1 {
        gain[1] = 0.0;
    }
    for m in 2..=m_max {
        let half = (m - 1) / 2;
        let mut s = 0.0;
        for j in 1..=half {
            s += a[j] * a[m - j];
        }
        if m % 2 == 0 {
            s += 0.5 * a[m / 2] * a[m / 2];
        }
        gain[m] = s;
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Loss {
    /// Against the mass still tabulated.
    Solution,
    /// Against the total initial mass (solution plus gel).
    Total(f64),
}

struct CoagulationRhs {
    loss: Loss,
    a: Vec<f64>,
    gain: Vec<f64>,
}

impl CoagulationRhs {
    /// `y[m - 1] = c(m)`; writes `dc/dt` into `dy`.
    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        let m_max = y.len();
        for m in 1..=m_max {
            self.a[m] = m as f64 * y[m - 1];
        }
        coagulation_gain(&self.a, &mut self.gain);
        let partner = match self.loss {
            Loss::Solution => self.a[1..].iter().sum(),
            Loss::Total(mass) => mass,
        };
        for m in 1..=m_max {
            dy[m - 1] = self.gain[m] - self.a[m] * partner;
        }
    }
}

// Dormand–Prince 5(4) tableau (the system is autonomous, so no c nodes)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of `rhs` from `y0` at time 0,
/// returning the state at each grid time.
fn integrate(
    rhs: &mut CoagulationRhs,
    y0: Vec<f64>,
    t_grid: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<f64>>> {
    let dim = y0.len();
    let mut y = y0;
    let mut t = 0.0f64;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    rhs.eval(&y, &mut k[0]);
    let mut h: f64 = 1e-3;
    for &target in t_grid {
        while t < target {
            let step = h.min(target - t);
            // land on the grid point instead of leaving a sliver
            let last = step >= target - t;
            if step < 1e-14 * t.max(1.0) && !last {
                return Err(Error::StepUnderflow(t));
            }
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    stage[i] = y[i] + step * acc;
                }
                rhs.eval(&stage, &mut k[s]);
            }
            // stage 6 was evaluated at the fifth-order solution itself
            y_new.copy_from_slice(&stage);
            let mut err = 0.0f64;
            for i in 0..dim {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((step * e).abs() / scale);
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                if let Some((m, &v)) = y.iter().enumerate().find(|(_, v)| **v < -NEGATIVITY_TOLERANCE) {
                    return Err(Error::NegativeConcentration { t, m: m + 1, value: v });
                }
                // first-same-as-last
                k.swap(0, 6);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * t.max(1.0) {
                    return Err(Error::StepUnderflow(t));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_state(c0: &[f64], m_max: usize) -> Result<Vec<f64>> {
    check_initial(c0)?;
    if m_max == 0 {
        return Err(invalid("m_max", "must be at least 1"));
    }
    if c0.iter().skip(m_max).any(|&c| c != 0.0) {
        return Err(invalid("c0", format!("support exceeds m_max = {m_max}")));
    }
    let mut y = vec![0.0; m_max];
    for (i, &c) in c0.iter().take(m_max).enumerate() {
        y[i] = c;
    }
    Ok(y)
}

fn solve(c0: &[f64], m_max: usize, t_grid: &[f64], loss: Loss, source: KineticsSource, opts: OdeOptions) -> Result<KineticsTable> {
    check_grid(t_grid)?;
    let y0 = initial_state(c0, m_max)?;
    let mut rhs = CoagulationRhs {
        loss,
        a: vec![0.0; m_max + 1],
        gain: vec![0.0; m_max + 1],
    };
    let values = integrate(&mut rhs, y0, t_grid, opts)?;
    Ok(KineticsTable {
        times: t_grid.to_vec(),
        m_max,
        values,
        source,
    })
}

/// Truncated Smoluchowski equation with multiplicative kernel: coagulations
/// producing sizes above `m_max` leave the table. Only meaningful before
/// gelation.
pub fn solve_smoluchowski_ode(c0: &[f64], m_max: usize, t_grid: &[f64]) -> Result<KineticsTable> {
    solve_smoluchowski_ode_with(c0, m_max, t_grid, OdeOptions::default())
}

pub fn solve_smoluchowski_ode_with(c0: &[f64], m_max: usize, t_grid: &[f64], opts: OdeOptions) -> Result<KineticsTable> {
    solve(c0, m_max, t_grid, Loss::Solution, KineticsSource::OdeSmoluchowski, opts)
}

/// Truncated Flory equation: clusters also coagulate with the gel, whose
/// mass is `<m, c0> - sum_{m <= m_max} m c_t(m)`.
pub fn solve_flory_ode(c0: &[f64], m_max: usize, t_grid: &[f64]) -> Result<KineticsTable> {
    solve_flory_ode_with(c0, m_max, t_grid, OdeOptions::default())
}

pub fn solve_flory_ode_with(c0: &[f64], m_max: usize, t_grid: &[f64], opts: OdeOptions) -> Result<KineticsTable> {
    let y0 = initial_state(c0, m_max)?;
    let total = moment(&y0, 1);
    solve(c0, m_max, t_grid, Loss::Total(total), KineticsSource::OdeFlory, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn borel_small_values() {
        for l in [0.0, 0.3, 1.0] {
            assert!(close(borel_pmf(l, 1).unwrap(), (-l).exp(), 1e-15));
        }
        // GW(Poisson(1)) of size 2: root has one child, child has none
        let size2 = (-1f64).exp() * (-1f64).exp();
        assert!(close(borel_pmf(1.0, 2).unwrap(), size2, 1e-15));
        // size 3: root with two children (e^-1/2 e^-2) or a path (e^-1 e^-1 e^-1)
        let size3 = (-1f64).exp() / 2.0 * (-2f64).exp() + (-3f64).exp();
        assert!(close(borel_pmf(1.0, 3).unwrap(), size3, 1e-15));
        assert!(close(size3, 0.074681, 1e-6));
        assert!(borel_pmf(1.2, 3).is_err());
        assert!(borel_pmf(0.5, 0).is_err());
    }

    #[test]
    fn borel_branches_agree() {
        // direct and log-space evaluation meet at m = 20/21
        for l in [0.2, 0.7, 1.0] {
            let direct = (l * 21.0f64).powi(20) * (-l * 21.0f64).exp() / (1..=21).map(|i| i as f64).product::<f64>();
            assert!((borel_pmf(l, 21).unwrap() / direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn borel_normalization() {
        for l in [0.3, 0.7] {
            let s: f64 = (1..=100_000).map(|m| borel_pmf(l, m).unwrap()).sum();
            assert!(close(s, 1.0, 1e-8), "{l}: {s}");
        }
        let s: f64 = (1..=100_000).map(|m| borel_pmf(1.0, m).unwrap()).sum();
        let tail = tail_mass(1.0, 100_001).unwrap();
        assert!(close(s, 1.0, 1e-2));
        assert!(close(1.0 - s, tail.asymptote, 1e-5));
    }

    #[test]
    fn explicit_solution_values() {
        assert_eq!(smoluchowski_exact_mono(0.0, 1).unwrap(), 1.0);
        assert_eq!(smoluchowski_exact_mono(0.0, 3).unwrap(), 0.0);
        assert!(close(smoluchowski_exact_mono(2.0, 1).unwrap(), (-1f64).exp() / 2.0, 1e-15));
        assert!(close(smoluchowski_exact_mono(2.0, 1).unwrap(), 0.18394, 1e-5));
        // (1/2) (0.5 * 2) e^{-1} / 2!
        assert!(close(smoluchowski_exact_mono(0.5, 2).unwrap(), 0.25 * (-1f64).exp(), 1e-15));
        for m in 1..30 {
            let below = smoluchowski_exact_mono(1.0, m).unwrap();
            let above = smoluchowski_exact_mono(1.0 + 1e-12, m).unwrap();
            assert!(close(below, above, 1e-10));
        }
    }

    #[test]
    fn explicit_mass_identity() {
        for t in [0.5, 1.0, 2.0, 4.0] {
            let m_max = 200_000;
            let mass: f64 = (1..=m_max).map(|m| m as f64 * smoluchowski_exact_mono(t, m).unwrap()).sum();
            // tail beyond m_max is at most the Borel(1) tail
            let bound = tail_mass(1.0, m_max + 1).unwrap().asymptote * 1.01;
            assert!((mass - mass_in_solution(t)).abs() <= bound, "{t}: {mass}");
        }
    }

    #[test]
    fn mass_curve() {
        assert_eq!(mass_in_solution(0.5), 1.0);
        assert_eq!(mass_in_solution(1.0), 1.0);
        assert_eq!(mass_in_solution(4.0), 0.25);
    }

    #[test]
    fn survival() {
        assert_eq!(gw_survival(1.0), 0.0);
        assert_eq!(gw_survival(0.3), 0.0);
        let z = gw_survival(2.0);
        assert!(close(z, 1.0 - (-2.0 * z).exp(), 1e-12));
        assert!(close(z, 0.79681, 1e-5));
        let mut last = 0.0;
        for l in [1.01, 1.5, 3.0, 10.0, 40.0] {
            let z = gw_survival(l);
            assert!(z > last);
            last = z;
        }
        assert!(last > 1.0 - 1e-12);
        assert!(close(flory_mass(2.0), 0.20319, 1e-5));
        assert_eq!(flory_mass(0.5), 1.0);
        for t in [0.5, 1.0, 1.2, 2.0, 5.0] {
            let f = flory_mass(t);
            assert!(f <= mass_in_solution(t));
            if t > 1.0 {
                assert!(f < mass_in_solution(t));
            }
        }
    }

    #[test]
    fn ell_root_monodisperse() {
        let r = ell_fixed_point(&[1.0], 4.0).unwrap();
        assert!(close(r.ell, 0.5, 1e-12));
        // differs from min(1, 1/t) = 0.25
        assert!(close(r.g0_at_ell, 0.5, 1e-12));
        assert!(ell_fixed_point(&[1.0], 1.0).is_err());
        let near = ell_fixed_point(&[1.0], 1.0 + 1e-9).unwrap();
        assert!(near.ell > 1.0 - 1e-6);
        let mut last = 1.0;
        for t in [1.5, 2.0, 3.0, 10.0] {
            let r = ell_fixed_point(&[0.2, 0.3, 0.1], t).unwrap();
            assert!(r.ell < last);
            last = r.ell;
        }
    }

    #[test]
    fn tail_values() {
        assert!(close(tail_mass(1.0, 1).unwrap().exact, 1.0, 1e-15));
        let r = tail_mass(1.0, 100).unwrap();
        let ratio = r.exact / r.asymptote;
        assert!((0.97..=1.03).contains(&ratio), "{ratio}");
        let mut last = f64::INFINITY;
        for k in 1..300 {
            let e = tail_mass(2.0, k).unwrap().exact;
            assert!(e < last);
            last = e;
        }
        assert!(tail_mass(0.5, 3).is_err());
    }

    #[test]
    fn zero_initial_condition_stays_zero() {
        let tab = solve_smoluchowski_ode(&[], 20, &[0.0, 0.5, 1.0]).unwrap();
        assert!(tab.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn ode_matches_explicit_before_gelation() {
        let grid: Vec<f64> = (0..=9).map(|i| i as f64 * 0.1).collect();
        let tab = solve_smoluchowski_ode(&[1.0], 2000, &grid).unwrap();
        let mut worst = 0.0f64;
        for (i, &t) in grid.iter().enumerate() {
            for m in 1..=50 {
                worst = worst.max((tab.concentration(i, m) - smoluchowski_exact_mono(t, m).unwrap()).abs());
            }
        }
        assert!(worst <= 1e-6, "{worst}");
        for i in 1..grid.len() {
            assert!(tab.mass(i) <= tab.mass(i - 1) + 1e-9);
            assert!(tab.second_moment(i) > tab.second_moment(i - 1));
        }
        let flory = solve_flory_ode(&[1.0], 2000, &grid).unwrap();
        for i in 0..grid.len() {
            for m in 1..=50 {
                assert!((flory.concentration(i, m) - tab.concentration(i, m)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn second_moment_of_size_two_start() {
        // with c0 = delta_2 / 2, <c, m^2> = 1 / (1/2 - t) until gelation at 1/2
        let grid = [0.1, 0.2, 0.3, 0.4, 0.45];
        let tab = solve_smoluchowski_ode(&[0.0, 0.5], 2000, &grid).unwrap();
        for (i, &t) in grid.iter().enumerate().take(4) {
            let exact = 1.0 / (0.5 - t);
            assert!((tab.second_moment(i) / exact - 1.0).abs() < 1e-6, "{t}");
        }
        // the truncated system starts shedding mass as the moment blows up
        assert!(tab.mass(3) > 1.0 - 1e-9);
        assert!(tab.second_moment(4) > tab.second_moment(3));
        assert!(tab.values.iter().flatten().all(|&v| v >= -NEGATIVITY_TOLERANCE));
    }

    #[test]
    fn bad_inputs() {
        assert!(solve_smoluchowski_ode(&[-1.0], 10, &[1.0]).is_err());
        assert!(solve_smoluchowski_ode(&[1.0], 10, &[1.0, 0.5]).is_err());
        assert!(solve_smoluchowski_ode(&[0.0, 0.0, 1.0], 2, &[1.0]).is_err());
        assert!(solve_smoluchowski_ode(&[1.0], 0, &[1.0]).is_err());
    }
}
