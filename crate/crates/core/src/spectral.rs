//! Growth exponent of the finite-data power spectrum.
//!
//! For a scalar series `v_0 .. v_{N-1}` and a frequency `omega`, the weighted
//! partial sums are `p(n) = sum_{l<n} e^{i l omega} v_l`. The structure
//! function averages squared increments of `p` over `J` time shifts,
//!
//! ```text
//! S(n) = (1/J) sum_{j<J} |p(j+n) - p(j)|^2,     n = 1 .. n_max,
//! ```
//!
//! and the growth exponent `K` is the slope of `log D(n)` against `log n`,
//! where `D` is `S` with the oscillatory mean contribution removed and shifted
//! to be non-negative. `K` is close to 0 for regular dynamics and close to 1
//! for strongly chaotic dynamics.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of the data length used as the regression range.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Relative size below which `D0` is treated as identically zero.
pub const NULL_TOLERANCE: f64 = 1e-10;

/// Smallest regression range `floor(delta N)` accepted by [`k_for_omega`].
pub const MIN_REGRESSION_POINTS: usize = 10;

/// The rotating phase is re-anchored to `cis(l omega)` this often.
const PHASE_REANCHOR: usize = 1 << 16;

/// `p(0) .. p(N)` for one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSums {
    omega: f64,
    values: Vec<Complex64>,
}

impl WeightedSums {
    /// Wraps precomputed sums. `values[0]` must be zero.
    pub fn from_values(omega: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.first() != Some(&Complex64::new(0.0, 0.0)) {
            return Err(Error::Domain("weighted sums must start at p(0) = 0".into()));
        }
        Ok(WeightedSums { omega, values })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of underlying samples `N` (one less than the number of sums).
    pub fn samples(&self) -> usize {
        self.values.len() - 1
    }
}

/// Structure function, modified MSD and shift for one `(series, omega)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub omega: f64,
    pub n_max: usize,
    pub j: usize,
    /// `S(1) .. S(n_max)`.
    pub s: Vec<f64>,
    pub mean_v: f64,
    pub d0: Vec<f64>,
    pub c: f64,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub omega: f64,
    /// Fitted slope of `ln D(n)` against `ln n`.
    pub k: f64,
    pub intercept: f64,
    pub points_used: usize,
    pub residual_rms: f64,
}

/// Output of [`modified_msd`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedMsd {
    pub d0: Vec<f64>,
    pub c: f64,
    pub d: Vec<f64>,
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 && omega < TAU {
        Ok(())
    } else {
        Err(Error::Domain(format!("omega = {omega} outside (0, 2 pi)")))
    }
}

/// Computes `p(0) .. p(N)` in one pass, advancing the phase `e^{i l omega}` by
/// complex multiplication.
pub fn weighted_sums(values: &[f64], omega: f64) -> Result<WeightedSums> {
    check_omega(omega)?;
    let step = Complex64::cis(omega);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(acc);
    for (l, &v) in values.iter().enumerate() {
        if l % PHASE_REANCHOR == 0 && l > 0 {
            phase = Complex64::cis(l as f64 * omega);
        }
        acc += phase * v;
        out.push(acc);
        phase *= step;
    }
    Ok(WeightedSums { omega, values: out })
}

fn check_window(samples: usize, n_max: usize, j: usize) -> Result<()> {
    if n_max == 0 || j == 0 {
        return Err(Error::Size(format!(
            "need n_max >= 1 and J >= 1, got n_max = {n_max}, J = {j}"
        )));
    }
    if j + n_max > samples {
        return Err(Error::Size(format!(
            "J + n_max = {} exceeds N = {samples}",
            j + n_max
        )));
    }
    Ok(())
}

/// Reference evaluation of `S(1) .. S(n_max)`, `O(J n_max)`.
pub fn structure_function_direct(p: &WeightedSums, n_max: usize, j: usize) -> Result<Vec<f64>> {
    check_window(p.samples(), n_max, j)?;
    let p = &p.values;
    Ok((1..=n_max)
        .map(|n| (0..j).map(|s| (p[s + n] - p[s]).norm_sqr()).sum::<f64>() / j as f64)
        .collect())
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `c(n) = sum_j conj(a_j) b_{j+n}` for `n = 0 .. max_lag`, with `a` and `b`
/// zero outside their slices. The cyclic transform length is at least
/// `max(b.len(), a.len() + max_lag)` so no index wraps.
fn cross_correlation(a: &[Complex64], b: &[Complex64], max_lag: usize) -> Vec<Complex64> {
    let len = b.len().max(a.len() + max_lag).next_power_of_two();
    let (fwd, inv) = PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
    });
    let zero = Complex64::new(0.0, 0.0);
    let mut fa = vec![zero; len];
    fa[..a.len()].copy_from_slice(a);
    fwd.process(&mut fa);
    let same = std::ptr::eq(a, b);
    if same {
        for x in fa.iter_mut() {
            *x = Complex64::new(x.norm_sqr(), 0.0);
        }
    } else {
        let mut fb = vec![zero; len];
        fb[..b.len()].copy_from_slice(b);
        fwd.process(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = x.conj() * y;
        }
    }
    inv.process(&mut fa);
    let scale = 1.0 / len as f64;
    fa.truncate(max_lag + 1);
    fa.iter_mut().for_each(|x| *x *= scale);
    fa
}

/// Compensated prefix sums `q[k] = sum_{i<k} |p(i)|^2`.
fn squared_prefix(p: &[Complex64]) -> Vec<f64> {
    let mut q = Vec::with_capacity(p.len() + 1);
    let mut sum = NeumaierSum::default();
    q.push(0.0);
    for z in p {
        sum.add(z.norm_sqr());
        q.push(sum.value());
    }
    q
}

/// Same values as [`structure_function_direct`] in `O(N log N)`, expanding
/// `|p(j+n) - p(j)|^2 = |p(j+n)|^2 + |p(j)|^2 - 2 Re(conj(p(j)) p(j+n))`.
pub fn structure_function_fast(p: &WeightedSums, n_max: usize, j: usize) -> Result<Vec<f64>> {
    let samples = p.samples();
    check_window(samples, n_max, j)?;
    // Indices touched are at most j - 1 + n_max <= N - 1.
    let used = &p.values[..j + n_max];
    let q = squared_prefix(used);
    let cross = cross_correlation(&used[..j], used, n_max);
    let inv_j = 1.0 / j as f64;
    Ok((1..=n_max)
        .map(|n| {
            let total = (q[j + n] - q[n]) + q[j] - 2.0 * cross[n].re;
            (total * inv_j).max(0.0)
        })
        .collect())
}

/// `S(n)` for every lag `n = 1 .. N-1`, each averaged over all `N - n`
/// available shifts.
pub fn structure_function_all_lags(p: &WeightedSums) -> Result<Vec<f64>> {
    let samples = p.samples();
    if samples < 2 {
        return Err(Error::Size(format!("need N >= 2, got {samples}")));
    }
    let used = &p.values[..samples];
    let q = squared_prefix(used);
    let cross = cross_correlation(used, used, samples - 1);
    Ok((1..samples)
        .map(|n| {
            let shifts = samples - n;
            let total = (q[samples] - q[n]) + q[shifts] - 2.0 * cross[n].re;
            (total / shifts as f64).max(0.0)
        })
        .collect())
}

#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Time average of the observable, with compensated summation.
pub fn mean_observable(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sum = NeumaierSum::default();
    values.iter().for_each(|&v| sum.add(v));
    sum.value() / values.len() as f64
}

/// `D0(n) = S(n) - mean^2 (1 - cos n omega) / (1 - cos omega)`, then
/// `D = D0 + C` with `C = max(0, -min D0)`, the smallest shift making `D`
/// non-negative.
///
/// When every `|D0(n)|` is within [`NULL_TOLERANCE`] of the scale of `S` the
/// curve is rounding noise: `C = 0` and `D` is identically zero.
pub fn modified_msd(s: &[f64], mean_v: f64, omega: f64) -> Result<ModifiedMsd> {
    let denom = 1.0 - omega.cos();
    if !(denom >= 1e-12) {
        return Err(Error::Domain(format!(
            "1 - cos(omega) = {denom:e} too small for omega = {omega}"
        )));
    }
    let scale = mean_v * mean_v / denom;
    let d0: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(i, &sn)| sn - scale * (1.0 - ((i + 1) as f64 * omega).cos()))
        .collect();
    let reference = s.iter().fold(2.0 * scale, |m, &x| m.max(x.abs()));
    let largest = d0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if largest <= NULL_TOLERANCE * reference {
        let d = vec![0.0; d0.len()];
        return Ok(ModifiedMsd { d0, c: 0.0, d });
    }
    let c = d0.iter().fold(0.0f64, |m, &x| m.max(-x));
    let d = d0.iter().map(|x| x + c).collect();
    Ok(ModifiedMsd { d0, c, d })
}

/// Unweighted least-squares slope of `ln D(n)` against `ln n` over
/// `n = 1 .. n_max`. Non-positive entries are skipped.
pub fn estimate_k(d: &[f64], n_max: usize) -> Result<KEstimate> {
    if n_max > d.len() {
        return Err(Error::Size(format!(
            "n_max = {n_max} exceeds curve length {}",
            d.len()
        )));
    }
    let points: Vec<(f64, f64)> = d[..n_max]
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > 0.0 && y.is_finite())
        .map(|(i, &y)| (((i + 1) as f64).ln(), y.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::DegenerateData {
            positive: points.len(),
        });
    }
    let count = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / count;
    let my = points.iter().map(|p| p.1).sum::<f64>() / count;
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    let k = sxy / sxx;
    let intercept = my - k * mx;
    let sse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + k * x);
            r * r
        })
        .sum();
    Ok(KEstimate {
        omega: f64::NAN,
        k,
        intercept,
        points_used: points.len(),
        residual_rms: (sse / count).sqrt(),
    })
}

/// Regression range for `samples` data points: `floor(delta N)`.
pub fn regression_range(samples: usize, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    let n_max = (delta * samples as f64).floor() as usize;
    if n_max < MIN_REGRESSION_POINTS {
        return Err(Error::Size(format!(
            "floor(delta N) = {n_max} below {MIN_REGRESSION_POINTS} (delta = {delta}, N = {samples})"
        )));
    }
    Ok(n_max)
}

/// Full pipeline for one frequency with `n_max = floor(delta N)` and
/// `J = N - n_max`.
pub fn spectral_profile(values: &[f64], omega: f64, delta: f64) -> Result<SpectralProfile> {
    if !(omega > 0.0 && omega <= PI) {
        return Err(Error::Domain(format!("omega = {omega} outside (0, pi]")));
    }
    let samples = values.len();
    let n_max = regression_range(samples, delta)?;
    let j = samples - n_max;
    let p = weighted_sums(values, omega)?;
    let s = structure_function_fast(&p, n_max, j)?;
    let mean_v = mean_observable(values);
    let ModifiedMsd { d0, c, d } = modified_msd(&s, mean_v, omega)?;
    Ok(SpectralProfile {
        omega,
        n_max,
        j,
        s,
        mean_v,
        d0,
        c,
        d,
    })
}

/// Growth exponent `K` of the series at frequency `omega`.
pub fn k_for_omega(values: &[f64], omega: f64, delta: f64) -> Result<KEstimate> {
    let profile = spectral_profile(values, omega, delta)?;
    let mut est = estimate_k(&profile.d, profile.n_max)?;
    est.omega = omega;
    Ok(est)
}
