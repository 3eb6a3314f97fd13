//! Instance generation, the lifetime model and batch experiments.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, Point};
use crate::heuristics::{solve, Algorithm};

pub const DEFAULT_REGION: f64 = 10_000.0;
pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_BATTERY: f64 = 1e12;

pub const CSV_HEADER: [&str; 9] = [
    "algorithm",
    "n",
    "k",
    "trial",
    "seed",
    "bottleneck",
    "lifetime_a2",
    "lifetime_a4",
    "wall_time_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    /// Density increasing towards a random base station.
    Weighted,
}

fn default_region() -> f64 {
    DEFAULT_REGION
}
fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}
fn default_alpha() -> f64 {
    2.0
}
fn default_battery() -> f64 {
    DEFAULT_BATTERY
}
fn default_trials() -> usize {
    1
}
fn default_distribution() -> Distribution {
    Distribution::Uniform
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k_values: Vec<usize>,
    #[serde(default = "default_region")]
    pub region: f64,
    #[serde(default = "default_distribution")]
    pub distribution: Distribution,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Path-loss exponent for the `mean_lifetime` summary column.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Constant per-packet energy term.
    #[serde(default)]
    pub energy_c: f64,
    #[serde(default = "default_battery")]
    pub battery: f64,
    #[serde(default)]
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Fixed terminal set used for every trial instead of generated ones.
    #[serde(default)]
    pub terminals: Option<Vec<[f64; 2]>>,
    /// Report zero wall time so that repeated runs are byte-identical.
    #[serde(default)]
    pub zero_wall_time: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, k_values: Vec<usize>, trials: usize, algorithms: Vec<Algorithm>) -> Self {
        Self {
            n,
            k_values,
            region: DEFAULT_REGION,
            distribution: Distribution::Uniform,
            gamma: DEFAULT_GAMMA,
            trials,
            alpha: 2.0,
            energy_c: 0.0,
            battery: DEFAULT_BATTERY,
            seed: 0,
            algorithms,
            terminals: None,
            zero_wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.trials < 1 {
            return bad("trials must be at least 1");
        }
        if self.terminals.is_none() && self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.k_values.is_empty() {
            return bad("k_values must not be empty");
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty");
        }
        if !(self.region.is_finite() && self.region > 0.0) {
            return bad("region must be positive");
        }
        if self.distribution == Distribution::Weighted && (self.gamma.is_nan() || self.gamma <= 1.0)
        {
            return bad("gamma must exceed 1");
        }
        if !(2.0..=4.0).contains(&self.alpha) {
            return bad("alpha must lie in [2, 4]");
        }
        if self.energy_c.is_nan()
            || self.energy_c < 0.0
            || self.battery.is_nan()
            || self.battery <= 0.0
        {
            return bad("energy_c must be non-negative and battery positive");
        }
        if let Some(t) = &self.terminals {
            if t.len() < 2 || t.iter().flatten().any(|v| !v.is_finite()) {
                return bad("terminals must hold at least two finite points");
            }
        }
        Ok(())
    }

    fn instance_size(&self) -> usize {
        self.terminals.as_ref().map_or(self.n, Vec::len)
    }
}

/// Result of one algorithm on one trial instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub bottleneck: f64,
    pub lifetime_a2: f64,
    pub lifetime_a4: f64,
    pub lifetime: f64,
    pub wall_time: f64,
    /// Set when the algorithm failed on this instance.
    pub error: Option<String>,
}

impl ExperimentRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lifetime {
    Finite(f64),
    /// Zero bottleneck with no constant term: nothing ever drains.
    Unbounded,
}

impl Lifetime {
    pub fn value(self) -> f64 {
        match self {
            Lifetime::Finite(v) => v,
            Lifetime::Unbounded => f64::INFINITY,
        }
    }
}

/// Battery divided by the per-packet energy `bottleneck^alpha + c`.
pub fn lifetime(bottleneck: f64, alpha: f64, c: f64, battery: f64) -> Lifetime {
    let power = bottleneck.powf(alpha) + c;
    if power == 0.0 {
        Lifetime::Unbounded
    } else {
        Lifetime::Finite(battery / power)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points uniform on `[0, region]^2`.
pub fn generate_uniform(n: usize, region: f64, seed: u64) -> Vec<Point> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..region), rng.gen_range(0.0..region)))
        .collect()
}

/// A uniform base station and `n` points whose distance to it is
/// `r_max * u^gamma`, resampled until inside the region.
pub fn generate_base_station_weighted(
    n: usize,
    region: f64,
    gamma: f64,
    seed: u64,
) -> Result<(Point, Vec<Point>)> {
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::InvalidParameter("gamma must exceed 1".into()));
    }
    let mut rng = rng(seed);
    let base = Point::new(rng.gen_range(0.0..region), rng.gen_range(0.0..region));
    let r_max = [(0.0, 0.0), (region, 0.0), (0.0, region), (region, region)]
        .iter()
        .map(|&c| dist(&base, &Point::from(c)))
        .fold(0.0, f64::max);
    let inside = |p: &Point| (0.0..=region).contains(&p.x) && (0.0..=region).contains(&p.y);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let u: f64 = rng.gen();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = r_max * u.powf(gamma);
        let p = Point::new(base.x + r * theta.cos(), base.y + r * theta.sin());
        if inside(&p) {
            points.push(p);
        }
    }
    Ok((base, points))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the instance for `(k, trial)` under a master seed.
pub fn trial_seed(seed: u64, k: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ k as u64) ^ trial as u64)
}

pub fn instance(config: &ExperimentConfig, seed: u64) -> Result<Vec<Point>> {
    if let Some(t) = &config.terminals {
        return Ok(t.iter().map(|&[x, y]| Point::new(x, y)).collect());
    }
    match config.distribution {
        Distribution::Uniform => Ok(generate_uniform(config.n, config.region, seed)),
        Distribution::Weighted => {
            generate_base_station_weighted(config.n, config.region, config.gamma, seed)
                .map(|(_, pts)| pts)
        }
    }
}

fn run_trial(config: &ExperimentConfig, k: usize, trial: usize) -> Vec<ExperimentRecord> {
    let seed = trial_seed(config.seed, k, trial);
    let n = config.instance_size();
    let points = instance(config, seed);
    config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let start = Instant::now();
            let outcome = points
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|pts| solve(algorithm, pts, k).map_err(|e| e.to_string()));
            let elapsed = if config.zero_wall_time {
                0.0
            } else {
                start.elapsed().as_secs_f64()
            };
            let (bottleneck, error) = match outcome {
                Ok(sol) => (sol.bottleneck, None),
                Err(e) => (f64::NAN, Some(e)),
            };
            let life = |alpha| lifetime(bottleneck, alpha, config.energy_c, config.battery).value();
            ExperimentRecord {
                algorithm,
                n,
                k,
                trial,
                seed,
                bottleneck,
                lifetime_a2: life(2.0),
                lifetime_a4: life(4.0),
                lifetime: life(config.alpha),
                wall_time: elapsed,
                error,
            }
        })
        .collect()
}

/// Runs every configured algorithm on every `(k, trial)` instance. Work is
/// spread over at most `jobs` threads (all cores when `None`); records come
/// back ordered by `(k, trial, algorithm)` regardless.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    jobs: Option<usize>,
    progress: &(dyn Fn(&ExperimentRecord) + Sync),
) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let units: Vec<(usize, usize)> = config
        .k_values
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    let work = || {
        units
            .par_iter()
            .map(|&(k, t)| {
                let recs = run_trial(config, k, t);
                recs.iter().for_each(progress);
                recs
            })
            .collect::<Vec<_>>()
    };
    let nested = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    };
    Ok(nested.into_iter().flatten().collect())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run_experiment_with(config, None, &|_| {})
}

/// Formats like C's `%g` with six significant digits.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.algorithm.as_str().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format_g(r.bottleneck),
            format_g(r.lifetime_a2),
            format_g(r.lifetime_a4),
            format_g(r.wall_time),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean_bottleneck: f64,
    pub std_bottleneck: f64,
    pub mean_lifetime_a2: f64,
    pub std_lifetime_a2: f64,
    pub mean_lifetime_a4: f64,
    pub std_lifetime_a4: f64,
    /// At the configured path-loss exponent.
    pub mean_lifetime: f64,
    pub mean_wall_time: f64,
}

/// Paired comparison of one algorithm against MSTH at a given budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioPoint {
    pub algorithm: Algorithm,
    pub k: usize,
    pub k_over_n: f64,
    pub pairs: usize,
    /// Mean of per-trial bottleneck ratios against MSTH.
    pub mean_ratio: f64,
    /// Mean of `1 - ratio`.
    pub relative_improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub algorithms: BTreeMap<Algorithm, BTreeMap<usize, Stats>>,
    pub ratio_series: Vec<RatioPoint>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-(algorithm, k) statistics and paired ratio series; failed records
/// are left out.
pub fn aggregate(records: &[ExperimentRecord]) -> Result<Summary> {
    let good: Vec<&ExperimentRecord> = records.iter().filter(|r| r.ok()).collect();
    if good.is_empty() {
        return Err(Error::EmptyInput("no successful records to aggregate"));
    }
    let mut groups: BTreeMap<(Algorithm, usize), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in &good {
        groups.entry((r.algorithm, r.k)).or_default().push(r);
    }
    let mut algorithms: BTreeMap<Algorithm, BTreeMap<usize, Stats>> = BTreeMap::new();
    for (&(alg, k), rs) in &groups {
        let col = |f: fn(&ExperimentRecord) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<_>>();
        let (mean_bottleneck, std_bottleneck) = mean_std(&col(|r| r.bottleneck));
        let (mean_lifetime_a2, std_lifetime_a2) = mean_std(&col(|r| r.lifetime_a2));
        let (mean_lifetime_a4, std_lifetime_a4) = mean_std(&col(|r| r.lifetime_a4));
        let (mean_lifetime, _) = mean_std(&col(|r| r.lifetime));
        let (mean_wall_time, _) = mean_std(&col(|r| r.wall_time));
        algorithms.entry(alg).or_default().insert(
            k,
            Stats {
                count: rs.len(),
                mean_bottleneck,
                std_bottleneck,
                mean_lifetime_a2,
                std_lifetime_a2,
                mean_lifetime_a4,
                std_lifetime_a4,
                mean_lifetime,
                mean_wall_time,
            },
        );
    }

    let mut baseline: BTreeMap<(usize, usize), &ExperimentRecord> = BTreeMap::new();
    for r in good.iter().filter(|r| r.algorithm == Algorithm::Msth) {
        baseline.insert((r.k, r.trial), r);
    }
    let mut ratio_series = Vec::new();
    for (&(alg, k), rs) in groups.iter().filter(|((a, _), _)| *a != Algorithm::Msth) {
        let ratios: Vec<f64> = rs
            .iter()
            .filter_map(|r| {
                baseline
                    .get(&(k, r.trial))
                    .filter(|b| b.bottleneck > 0.0)
                    .map(|b| r.bottleneck / b.bottleneck)
            })
            .collect();
        if ratios.is_empty() {
            continue;
        }
        let (mean_ratio, _) = mean_std(&ratios);
        ratio_series.push(RatioPoint {
            algorithm: alg,
            k,
            k_over_n: k as f64 / rs[0].n as f64,
            pairs: ratios.len(),
            mean_ratio,
            relative_improvement: 1.0 - mean_ratio,
        });
    }
    Ok(Summary {
        algorithms,
        ratio_series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifetime_examples() {
        assert_eq!(lifetime(1.0, 2.0, 0.0, 1.0), Lifetime::Finite(1.0));
        let full = lifetime(2.0, 4.0, 0.0, 1.0).value();
        let half = lifetime(1.0, 4.0, 0.0, 1.0).value();
        assert!((half / full - 16.0).abs() < 1e-12);
        assert_eq!(lifetime(0.0, 2.0, 0.0, 1.0), Lifetime::Unbounded);
        assert_eq!(lifetime(0.0, 2.0, 0.5, 1.0), Lifetime::Finite(2.0));
    }

    #[test]
    fn generators_are_deterministic_and_bounded() {
        assert_eq!(generate_uniform(50, 10.0, 3), generate_uniform(50, 10.0, 3));
        assert_ne!(generate_uniform(50, 10.0, 3), generate_uniform(50, 10.0, 4));
        let one = generate_uniform(1, 10.0, 9);
        assert!((0.0..10.0).contains(&one[0].x) && (0.0..10.0).contains(&one[0].y));
        let (base, pts) = generate_base_station_weighted(200, 10.0, 2.0, 5).unwrap();
        assert_eq!(
            (base, pts.clone()),
            generate_base_station_weighted(200, 10.0, 2.0, 5).unwrap()
        );
        assert!(pts
            .iter()
            .all(|p| (0.0..=10.0).contains(&p.x) && (0.0..=10.0).contains(&p.y)));
        assert!(generate_base_station_weighted(5, 10.0, 1.0, 5).is_err());
    }

    #[test]
    fn uniform_mean_is_central() {
        let pts = generate_uniform(10_000, 10_000.0, 1);
        let mx = pts.iter().map(|p| p.x).sum::<f64>() / 1e4;
        let my = pts.iter().map(|p| p.y).sum::<f64>() / 1e4;
        assert!((mx - 5000.0).abs() < 50.0 && (my - 5000.0).abs() < 50.0);
    }

    #[test]
    fn weighted_points_crowd_the_base() {
        let (base, pts) = generate_base_station_weighted(10_000, 10_000.0, 2.0, 11).unwrap();
        let uni = generate_uniform(10_000, 10_000.0, 11);
        let median = |ps: &[Point]| {
            let mut d: Vec<f64> = ps.iter().map(|p| dist(p, &base)).collect();
            d.sort_by(f64::total_cmp);
            d[d.len() / 2]
        };
        assert!(median(&pts) < median(&uni));
    }

    #[test]
    fn format_g_matches_printf() {
        let cases = [
            (2.864, "2.864"),
            (374.455_912, "374.456"),
            (1e12, "1e+12"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.000123456, "0.000123456"),
            (0.0000123456, "1.23456e-05"),
            (0.0, "0"),
            (999999.7, "1e+06"),
            (-2.5, "-2.5"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x), want, "{x}");
        }
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
        assert_eq!(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
    }

    #[test]
    fn aggregate_single_and_identical() {
        let mut cfg = ExperimentConfig::new(8, vec![2], 3, vec![Algorithm::Msth, Algorithm::Msth]);
        cfg.zero_wall_time = true;
        let recs = run_experiment(&cfg).unwrap();
        let summary = aggregate(&recs[..1]).unwrap();
        let s = &summary.algorithms[&Algorithm::Msth][&2];
        assert_eq!(s.count, 1);
        assert_eq!(s.std_bottleneck, 0.0);
        assert_eq!(s.mean_bottleneck, recs[0].bottleneck);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn config_rejects_bad_values() {
        let mut cfg = ExperimentConfig::new(8, vec![2], 0, vec![Algorithm::Msth]);
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.alpha = 5.0;
        assert!(cfg.validate().is_err());
        cfg.alpha = 4.0;
        assert!(cfg.validate().is_ok());
    }
}
