//! Parameter sweeps over `(a, omega, N)`.
//!
//! One trajectory of length `max(N_list)` is generated per parameter and each
//! data length `N` uses its first `N` samples. The frequency list is drawn
//! once from the master seed and shared by every parameter and every `N`.
//! Work is parallel over parameters and frequencies; all randomness is derived
//! from the master seed, so output does not depend on the thread count or on
//! scheduling.

mod checkpoint;
mod probe;
mod report;
mod seed;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    median_k, sweep_summary, tally, ClassCounts, IntervalScheme, Label, SweepSummary,
};
use crate::dynamics::{generate, SystemKind, SystemSpec};
use crate::error::{Error, Result};
use crate::spectral::{k_for_omega, regression_range, DEFAULT_DELTA};

pub use checkpoint::{Checkpoint, CompletedUnit, CHECKPOINT_VERSION};
pub use probe::{delta_probe, probe_curve, DeltaProbe, ProbeCurve};
pub use report::{
    format_real, write_median_csv, write_outliers_csv, write_probe_csv, write_probe_k_csv,
    write_results_csv, write_summary_csv,
};
pub use seed::{derive_seed, Stream};

pub const DEFAULT_N_OMEGA: usize = 100;
pub const DEFAULT_OMEGA_WINDOW: (f64, f64) = (0.01, std::f64::consts::PI - 0.01);
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Template system; `a` is replaced by each grid value.
    pub system: SystemSpec,
    pub a_start: f64,
    pub a_end: f64,
    pub a_step: f64,
    pub n_omega: usize,
    pub omega_window: (f64, f64),
    /// Data lengths, strictly ascending.
    pub n_list: Vec<usize>,
    pub delta: f64,
    pub schemes: Vec<IntervalScheme>,
    pub master_seed: u64,
    pub threshold_fraction: f64,
}

impl SweepConfig {
    /// Logistic map on `3.5 <= a <= 4` in steps of 0.01.
    pub fn logistic_default() -> Self {
        SweepConfig {
            system: SystemSpec::logistic(3.5),
            a_start: 3.5,
            a_end: 4.0,
            a_step: 0.01,
            n_omega: DEFAULT_N_OMEGA,
            omega_window: DEFAULT_OMEGA_WINDOW,
            n_list: vec![10_000, 100_000, 500_000],
            delta: DEFAULT_DELTA,
            schemes: IntervalScheme::standard(),
            master_seed: 0,
            threshold_fraction: DEFAULT_THRESHOLD_FRACTION,
        }
    }

    /// Lorenz-96 with `m = 40` on `3 <= a <= 7` in steps of 0.1.
    pub fn lorenz96_default() -> Self {
        SweepConfig {
            system: SystemSpec::lorenz96(3.0),
            a_start: 3.0,
            a_end: 7.0,
            a_step: 0.1,
            n_omega: DEFAULT_N_OMEGA,
            omega_window: DEFAULT_OMEGA_WINDOW,
            n_list: vec![1_000_000, 2_000_000, 3_000_000],
            delta: DEFAULT_DELTA,
            schemes: IntervalScheme::standard(),
            master_seed: 0,
            threshold_fraction: DEFAULT_THRESHOLD_FRACTION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_step > 0.0 && self.a_step.is_finite()) {
            return Err(Error::config(
                "a_step",
                format!("must be positive, got {}", self.a_step),
            ));
        }
        if !(self.a_start.is_finite() && self.a_end.is_finite()) || self.a_end < self.a_start {
            return Err(Error::config(
                "a_end",
                format!(
                    "need a_start <= a_end, got {} > {}",
                    self.a_start, self.a_end
                ),
            ));
        }
        if self.n_omega == 0 {
            return Err(Error::config("n_omega", "must be positive"));
        }
        let (lo, hi) = self.omega_window;
        if !(lo > 0.0 && lo < hi && hi <= std::f64::consts::PI) {
            return Err(Error::config(
                "omega_window",
                format!("need 0 < lo < hi <= pi, got ({lo}, {hi})"),
            ));
        }
        if self.n_list.is_empty() {
            return Err(Error::config("n_list", "must not be empty"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n_list", "must be strictly ascending"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(
                "delta",
                format!("must lie in (0, 1), got {}", self.delta),
            ));
        }
        regression_range(self.n_list[0], self.delta)
            .map_err(|e| Error::config("delta", format!("delta * min(N) too small: {e}")))?;
        if self.schemes.is_empty() {
            return Err(Error::config("schemes", "at least one scheme is required"));
        }
        if !(self.threshold_fraction >= 0.0 && self.threshold_fraction < 1.0) {
            return Err(Error::config(
                "threshold_fraction",
                format!("must lie in [0, 1), got {}", self.threshold_fraction),
            ));
        }
        for (i, a) in self.parameter_grid().into_iter().enumerate() {
            self.system
                .with_a(a)
                .validate()
                .map_err(|e| Error::config("system", format!("grid point {i} (a = {a}): {e}")))?;
        }
        Ok(())
    }

    /// `a_start + i a_step` for every grid point up to `a_end`, tolerating a
    /// relative rounding slack of 1e-9 steps at the upper end.
    pub fn parameter_grid(&self) -> Vec<f64> {
        if !(self.a_step > 0.0) || self.a_end < self.a_start {
            return Vec::new();
        }
        let count = ((self.a_end - self.a_start) / self.a_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.a_start + i as f64 * self.a_step)
            .collect()
    }

    pub fn max_n(&self) -> usize {
        self.n_list.last().copied().unwrap_or(0)
    }

    /// Stable digest of the configuration, used to match checkpoints.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Frequencies i.i.d. uniform on the open window, deterministic in `seed`.
pub fn sample_omegas(count: usize, window: (f64, f64), seed: u64) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "empty frequency window ({lo}, {hi})"
        )));
    }
    if !(lo >= 0.0 && hi <= std::f64::consts::PI) {
        return Err(Error::Domain(format!(
            "window ({lo}, {hi}) not inside (0, pi)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            // Rounding can land exactly on an endpoint for extremely narrow
            // windows; fall back to the midpoint there.
            let w = lo + (hi - lo) * u;
            if w > lo && w < hi {
                w
            } else {
                0.5 * (lo + hi)
            }
        })
        .collect())
}

/// Frequencies used by a sweep.
pub fn sweep_omegas(config: &SweepConfig) -> Result<Vec<f64>> {
    sample_omegas(
        config.n_omega,
        config.omega_window,
        derive_seed(config.master_seed, Stream::Omega, 0, 0),
    )
}

/// Seed of the initial state; the same for every parameter value.
pub fn initial_seed(config: &SweepConfig) -> u64 {
    derive_seed(config.master_seed, Stream::InitialState, 0, 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub a: f64,
    pub omega: f64,
    pub n: usize,
    pub k: f64,
    /// One label per configured scheme, in configuration order.
    pub labels: Vec<Label>,
}

/// Statistics for one `(N, scheme)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NSummary {
    pub n: usize,
    pub scheme: String,
    pub summary: SweepSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResults {
    pub grid: Vec<f64>,
    pub omegas: Vec<f64>,
    pub n_list: Vec<usize>,
    pub schemes: Vec<IntervalScheme>,
    /// `ks[a_index][n_index][omega_index]`.
    pub ks: Vec<Vec<Vec<f64>>>,
    pub summaries: Vec<NSummary>,
}

impl SweepResults {
    /// Assembles results from a fully populated K grid.
    pub fn from_ks(config: &SweepConfig, omegas: Vec<f64>, ks: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let grid = config.parameter_grid();
        let mut summaries = Vec::with_capacity(config.n_list.len() * config.schemes.len());
        for (ni, &n) in config.n_list.iter().enumerate() {
            for scheme in &config.schemes {
                let rows: Vec<(f64, ClassCounts)> = grid
                    .iter()
                    .zip(&ks)
                    .map(|(&a, per_a)| (a, tally(per_a[ni].iter().copied(), scheme)))
                    .collect();
                summaries.push(NSummary {
                    n,
                    scheme: scheme.name.clone(),
                    summary: sweep_summary(&rows, config.threshold_fraction)?,
                });
            }
        }
        Ok(SweepResults {
            grid,
            omegas,
            n_list: config.n_list.clone(),
            schemes: config.schemes.clone(),
            ks,
            summaries,
        })
    }

    /// Rows ordered by parameter, then data length, then frequency.
    pub fn rows(&self) -> impl Iterator<Item = ResultRow> + '_ {
        self.grid.iter().zip(&self.ks).flat_map(move |(&a, per_a)| {
            self.n_list.iter().zip(per_a).flat_map(move |(&n, per_n)| {
                self.omegas
                    .iter()
                    .zip(per_n)
                    .map(move |(&omega, &k)| ResultRow {
                        a,
                        omega,
                        n,
                        k,
                        labels: self.schemes.iter().map(|s| s.classify(k)).collect(),
                    })
            })
        })
    }

    pub fn summary(&self, n: usize, scheme: &str) -> Option<&SweepSummary> {
        self.summaries
            .iter()
            .find(|s| s.n == n && s.scheme == scheme)
            .map(|s| &s.summary)
    }

    /// Class counts per parameter at data length `n` under `scheme`.
    pub fn counts(&self, n: usize, scheme: &IntervalScheme) -> Vec<(f64, ClassCounts)> {
        let Some(ni) = self.n_list.iter().position(|&x| x == n) else {
            return Vec::new();
        };
        self.grid
            .iter()
            .zip(&self.ks)
            .map(|(&a, per_a)| (a, tally(per_a[ni].iter().copied(), scheme)))
            .collect()
    }

    /// `(a, N, median K)` for every grid point and data length.
    pub fn medians(&self) -> Vec<(f64, usize, f64)> {
        self.grid
            .iter()
            .zip(&self.ks)
            .flat_map(|(&a, per_a)| {
                self.n_list
                    .iter()
                    .zip(per_a)
                    .map(move |(&n, per_n)| (a, n, median_k(per_n)))
            })
            .collect()
    }
}

/// Execution controls that do not affect results.
#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Resume from and persist progress to this file.
    pub checkpoint: Option<PathBuf>,
    /// Stop after computing this many new `(a, N)` units.
    pub unit_limit: Option<usize>,
}

#[derive(Debug)]
pub enum SweepOutcome {
    Complete(SweepResults),
    /// Stopped early by `unit_limit`; progress is in the checkpoint.
    Interrupted {
        completed: usize,
        total: usize,
    },
}

/// Runs the full sweep with default execution options.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResults> {
    match run_sweep_with(config, &SweepOptions::default())? {
        SweepOutcome::Complete(results) => Ok(results),
        SweepOutcome::Interrupted { .. } => unreachable!("no unit limit was set"),
    }
}

struct Progress {
    done: BTreeMap<(usize, usize), Vec<f64>>,
    checkpoint: Option<(PathBuf, String)>,
}

impl Progress {
    fn record(&mut self, a_index: usize, n: usize, ks: Vec<f64>) -> Result<()> {
        self.done.insert((a_index, n), ks);
        if let Some((path, fingerprint)) = &self.checkpoint {
            Checkpoint::from_map(fingerprint.clone(), &self.done).write(path)?;
        }
        Ok(())
    }
}

pub fn run_sweep_with(config: &SweepConfig, options: &SweepOptions) -> Result<SweepOutcome> {
    config.validate()?;
    let grid = config.parameter_grid();
    let omegas = sweep_omegas(config)?;
    let fingerprint = config.fingerprint();

    let mut done = BTreeMap::new();
    if let Some(path) = &options.checkpoint {
        if path.exists() {
            let cp = Checkpoint::read(path)?;
            if cp.fingerprint != fingerprint {
                return Err(Error::Checkpoint {
                    path: path.clone(),
                    message: "written for a different configuration".into(),
                });
            }
            done = cp.into_map();
        }
    }
    let total = grid.len() * config.n_list.len();
    let pending: Vec<usize> = (0..grid.len())
        .filter(|&ai| config.n_list.iter().any(|n| !done.contains_key(&(ai, *n))))
        .collect();

    let progress = Mutex::new(Progress {
        done,
        checkpoint: options.checkpoint.clone().map(|p| (p, fingerprint)),
    });
    let claimed = AtomicUsize::new(0);
    let work = || -> Result<()> {
        pending.par_iter().try_for_each(|&ai| {
            sweep_parameter(
                config,
                &grid,
                ai,
                &omegas,
                &progress,
                &claimed,
                options.unit_limit,
            )
        })
    };
    match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(work)?,
        None => work()?,
    }

    let done = progress.into_inner().expect("progress lock poisoned").done;
    if done.len() < total {
        return Ok(SweepOutcome::Interrupted {
            completed: done.len(),
            total,
        });
    }
    let mut done = done;
    let ks = (0..grid.len())
        .map(|ai| {
            config
                .n_list
                .iter()
                .map(|n| done.remove(&(ai, *n)).expect("all units complete"))
                .collect()
        })
        .collect();
    Ok(SweepOutcome::Complete(SweepResults::from_ks(
        config, omegas, ks,
    )?))
}

fn sweep_parameter(
    config: &SweepConfig,
    grid: &[f64],
    ai: usize,
    omegas: &[f64],
    progress: &Mutex<Progress>,
    claimed: &AtomicUsize,
    unit_limit: Option<usize>,
) -> Result<()> {
    let a = grid[ai];
    let missing: Vec<usize> = {
        let p = progress.lock().expect("progress lock poisoned");
        config
            .n_list
            .iter()
            .copied()
            .filter(|n| !p.done.contains_key(&(ai, *n)))
            .collect()
    };
    let mut series = None;
    for n in missing {
        if let Some(limit) = unit_limit {
            if claimed.fetch_add(1, Ordering::SeqCst) >= limit {
                return Ok(());
            }
        }
        if series.is_none() {
            let spec = config.system.with_a(a);
            let s = generate(&spec, initial_seed(config), config.max_n()).map_err(|e| {
                Error::AtPoint {
                    a,
                    omega: None,
                    source: Box::new(e),
                }
            })?;
            series = Some(s);
        }
        let values = series.as_ref().expect("generated above").prefix(n);
        let ks = omegas
            .par_iter()
            .map(|&omega| {
                k_for_omega(values, omega, config.delta)
                    .map(|est| est.k)
                    .map_err(|e| Error::AtPoint {
                        a,
                        omega: Some(omega),
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(ni) = config.n_list.iter().position(|&x| x == n) {
            let counts = tally(ks.iter().copied(), &config.schemes[0]);
            log::info!(
                "{} a = {a:.6} N = {n} ({}/{}): M0 = {} M1 = {} Mu = {} [scheme {}]",
                config.system.kind.name(),
                ni + 1,
                config.n_list.len(),
                counts.m0,
                counts.m1,
                counts.mu,
                config.schemes[0].name,
            );
        }
        progress
            .lock()
            .expect("progress lock poisoned")
            .record(ai, n, ks)?;
    }
    Ok(())
}

/// Default sweep for a system kind.
pub fn default_config(kind: SystemKind) -> SweepConfig {
    match kind {
        SystemKind::LogisticMap => SweepConfig::logistic_default(),
        SystemKind::Lorenz96 => SweepConfig::lorenz96_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_logistic() -> SweepConfig {
        SweepConfig {
            a_start: 3.8,
            a_end: 4.0,
            a_step: 0.1,
            n_omega: 8,
            n_list: vec![2000, 4000],
            ..SweepConfig::logistic_default()
        }
    }

    #[test]
    fn grid_includes_endpoint() {
        let c = SweepConfig::logistic_default();
        let g = c.parameter_grid();
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 3.5);
        assert!((g[50] - 4.0).abs() < 1e-12);
        assert_eq!(SweepConfig::lorenz96_default().parameter_grid().len(), 41);
    }

    #[test]
    fn omegas_are_deterministic_and_inside_window() {
        let w = DEFAULT_OMEGA_WINDOW;
        let a = sample_omegas(100, w, 11).unwrap();
        assert_eq!(a, sample_omegas(100, w, 11).unwrap());
        assert!(a.iter().all(|&x| x > w.0 && x < w.1));
        assert_ne!(a, sample_omegas(100, w, 12).unwrap());
    }

    #[test]
    fn omegas_look_uniform() {
        let w = DEFAULT_OMEGA_WINDOW;
        let xs = sample_omegas(10_000, w, 3).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let mid = 0.5 * (w.0 + w.1);
        assert!((mean - mid).abs() <= 0.02 * mid, "mean {mean}");
    }

    #[test]
    fn empty_window_is_rejected() {
        assert!(sample_omegas(5, (1.0, 1.0), 0).is_err());
        assert!(sample_omegas(5, (2.0, 1.0), 0).is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = small_logistic();
        c.a_step = 0.0;
        match c.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "a_step"),
            other => panic!("unexpected {other:?}"),
        }
        let mut c = small_logistic();
        c.n_list = vec![4000, 2000];
        assert!(c.validate().is_err());
        let mut c = small_logistic();
        c.n_list = vec![500];
        assert!(c.validate().is_err());
        let mut c = small_logistic();
        c.a_end = 4.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn prefix_k_matches_independent_short_run() {
        let c = small_logistic();
        let results = run_sweep(&c).unwrap();
        let spec = c.system.with_a(results.grid[1]);
        let short = generate(&spec, initial_seed(&c), 2000).unwrap();
        for (wi, &omega) in results.omegas.iter().enumerate() {
            let k = k_for_omega(short.values(), omega, c.delta).unwrap().k;
            assert_eq!(k.to_bits(), results.ks[1][0][wi].to_bits());
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = small_logistic();
        let one = run_sweep_with(
            &c,
            &SweepOptions {
                threads: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let three = run_sweep_with(
            &c,
            &SweepOptions {
                threads: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        match (one, three) {
            (SweepOutcome::Complete(a), SweepOutcome::Complete(b)) => assert_eq!(a, b),
            _ => panic!("sweep did not complete"),
        }
    }

    #[test]
    fn aggregates_stay_in_bounds() {
        let c = small_logistic();
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.summaries.len(), 2 * 3);
        for s in &r.summaries {
            assert!(s.summary.q_u <= c.n_omega * r.grid.len());
            assert!(s.summary.q_u_prime <= r.grid.len());
            assert!(s.summary.q_min_prime <= r.grid.len());
        }
        assert_eq!(r.rows().count(), r.grid.len() * 2 * 8);
    }

    #[test]
    fn numerical_errors_are_tagged_with_parameter() {
        // A stable fixed point gives a constant series after the transient.
        let c = SweepConfig {
            a_start: 2.0,
            a_end: 2.0,
            ..small_logistic()
        };
        let err = run_sweep(&c).unwrap_err();
        assert!(err.is_numerical());
        assert!(
            matches!(err, Error::AtPoint { a, omega: Some(_), .. } if a == 2.0),
            "{err}"
        );
    }
}
