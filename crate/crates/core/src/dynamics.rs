//! Trajectory generation for the logistic map and the Lorenz-96 flow.
//!
//! Both systems produce a scalar [`TimeSeries`]: the logistic map records the
//! state itself, the Lorenz-96 flow records the first coordinate `x_1`
//! sampled stroboscopically every `stride` integration steps.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LOGISTIC_TRANSIENT: u64 = 1000;
pub const DEFAULT_LORENZ96_TRANSIENT: u64 = 10_000;
pub const DEFAULT_LORENZ96_DIM: usize = 40;
pub const DEFAULT_LORENZ96_DT: f64 = 0.0005;
pub const DEFAULT_LORENZ96_STRIDE: u64 = 1000;
pub const DEFAULT_BLOWUP_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemKind {
    LogisticMap,
    Lorenz96,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::LogisticMap => "logistic",
            SystemKind::Lorenz96 => "lorenz96",
        }
    }
}

/// A parameterized system together with its sampling protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub a: f64,
    /// State dimension: 1 for the logistic map.
    pub m: usize,
    /// Integration step (Lorenz-96 only).
    pub dt: f64,
    /// Integration steps per recorded sample (Lorenz-96 only).
    pub stride: u64,
    /// Iterates (map) or integration steps (flow) discarded before recording.
    pub transient: u64,
    pub blowup_bound: f64,
}

impl SystemSpec {
    pub fn logistic(a: f64) -> Self {
        SystemSpec {
            kind: SystemKind::LogisticMap,
            a,
            m: 1,
            dt: 1.0,
            stride: 1,
            transient: DEFAULT_LOGISTIC_TRANSIENT,
            blowup_bound: DEFAULT_BLOWUP_BOUND,
        }
    }

    pub fn lorenz96(a: f64) -> Self {
        SystemSpec {
            kind: SystemKind::Lorenz96,
            a,
            m: DEFAULT_LORENZ96_DIM,
            dt: DEFAULT_LORENZ96_DT,
            stride: DEFAULT_LORENZ96_STRIDE,
            transient: DEFAULT_LORENZ96_TRANSIENT,
            blowup_bound: DEFAULT_BLOWUP_BOUND,
        }
    }

    /// Same protocol, different parameter.
    pub fn with_a(&self, a: f64) -> Self {
        SystemSpec { a, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SystemKind::LogisticMap => {
                if !(0.0..=4.0).contains(&self.a) {
                    return Err(Error::Domain(format!(
                        "logistic parameter a = {} outside [0, 4]",
                        self.a
                    )));
                }
                if self.m != 1 {
                    return Err(Error::Dimension(format!(
                        "logistic map has m = 1, got {}",
                        self.m
                    )));
                }
            }
            SystemKind::Lorenz96 => {
                if self.m < 4 {
                    return Err(Error::Dimension(format!(
                        "Lorenz-96 needs m >= 4, got {}",
                        self.m
                    )));
                }
                if !(self.dt > 0.0 && self.dt.is_finite()) {
                    return Err(Error::Domain(format!("dt = {} must be positive", self.dt)));
                }
                if self.stride == 0 {
                    return Err(Error::Domain("stride must be at least 1".into()));
                }
                if !self.a.is_finite() {
                    return Err(Error::Domain(format!("a = {} is not finite", self.a)));
                }
            }
        }
        if !(self.blowup_bound > 0.0) {
            return Err(Error::Domain(format!(
                "blowup bound {} must be positive",
                self.blowup_bound
            )));
        }
        Ok(())
    }

    /// Time between recorded samples.
    pub fn sample_interval(&self) -> f64 {
        match self.kind {
            SystemKind::LogisticMap => 1.0,
            SystemKind::Lorenz96 => self.dt * self.stride as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::Dimension("state vector is empty".into()));
        }
        if let Some(i) = coordinates.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("coordinate {i} is not finite")));
        }
        Ok(StateVector(coordinates))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Recorded observable values plus sampling metadata. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sample_interval: f64,
    origin: String,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, sample_interval: f64, origin: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Size(format!(
                "time series needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("sample {i} is not finite")));
        }
        Ok(TimeSeries {
            values,
            sample_interval,
            origin: origin.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// First `n` samples.
    pub fn prefix(&self, n: usize) -> &[f64] {
        &self.values[..n.min(self.values.len())]
    }
}

#[inline]
fn logistic(a: f64, x: f64) -> f64 {
    a * x * (1.0 - x)
}

/// Iterates `f_a(x) = a x (1 - x)` from `x1`, discards `transient` iterates and
/// records the next `count`.
pub fn logistic_orbit(a: f64, x1: f64, transient: u64, count: usize) -> Result<TimeSeries> {
    if !(0.0..=4.0).contains(&a) {
        return Err(Error::Domain(format!(
            "logistic parameter a = {a} outside [0, 4]"
        )));
    }
    if !(0.0..=1.0).contains(&x1) {
        return Err(Error::Domain(format!(
            "initial point x1 = {x1} outside [0, 1]"
        )));
    }
    if count < 2 {
        return Err(Error::Size(format!("need at least 2 samples, got {count}")));
    }
    let mut x = x1;
    for _ in 0..transient {
        x = logistic(a, x);
    }
    let mut values = Vec::with_capacity(count);
    for step in 0..count {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Overflow { step, value: x });
        }
        values.push(x);
        x = logistic(a, x);
    }
    TimeSeries::new(
        values,
        1.0,
        format!("logistic a={a} x1={x1} transient={transient}"),
    )
}

/// Lorenz-96 vector field into a caller-provided buffer. `x.len() >= 4` is
/// the caller's responsibility.
#[inline]
pub fn lorenz96_rhs_into(x: &[f64], a: f64, out: &mut [f64]) {
    let m = x.len();
    debug_assert!(m >= 4 && out.len() == m);
    out[0] = x[m - 1] * (x[1] - x[m - 2]) - x[0] + a;
    out[1] = x[0] * (x[2] - x[m - 1]) - x[1] + a;
    for i in 2..m - 1 {
        out[i] = x[i - 1] * (x[i + 1] - x[i - 2]) - x[i] + a;
    }
    out[m - 1] = x[m - 2] * (x[0] - x[m - 3]) - x[m - 1] + a;
}

/// `dx_i/dt = x_{i-1} (x_{i+1} - x_{i-2}) - x_i + a` with cyclic indices.
pub fn lorenz96_rhs(state: &StateVector, a: f64) -> Result<StateVector> {
    let m = state.dim();
    if m < 4 {
        return Err(Error::Dimension(format!("Lorenz-96 needs m >= 4, got {m}")));
    }
    let mut out = vec![0.0; m];
    lorenz96_rhs_into(state.as_slice(), a, &mut out);
    Ok(StateVector(out))
}

/// Scratch buffers for repeated classical Runge-Kutta steps.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Rk4 {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `x` in place by one step of size `dt`.
    pub fn step<F>(&mut self, field: &F, x: &mut [f64], dt: f64)
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let half = 0.5 * dt;
        field(x, &mut self.k1);
        for ((t, &xi), &k) in self.tmp.iter_mut().zip(x.iter()).zip(&self.k1) {
            *t = xi + half * k;
        }
        field(&self.tmp, &mut self.k2);
        for ((t, &xi), &k) in self.tmp.iter_mut().zip(x.iter()).zip(&self.k2) {
            *t = xi + half * k;
        }
        field(&self.tmp, &mut self.k3);
        for ((t, &xi), &k) in self.tmp.iter_mut().zip(x.iter()).zip(&self.k3) {
            *t = xi + dt * k;
        }
        field(&self.tmp, &mut self.k4);
        let sixth = dt / 6.0;
        let stages = self.k1.iter().zip(&self.k2).zip(&self.k3).zip(&self.k4);
        for (xi, (((a, b), c), d)) in x.iter_mut().zip(stages) {
            *xi += sixth * (a + 2.0 * (b + c) + d);
        }
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<F>(field: F, state: &StateVector, dt: f64) -> StateVector
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut x = state.0.clone();
    Rk4::new(x.len()).step(&field, &mut x, dt);
    StateVector(x)
}

/// Integration protocol for [`lorenz96_orbit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz96Run {
    pub dt: f64,
    pub stride: u64,
    pub transient_steps: u64,
    pub blowup_bound: f64,
}

impl Default for Lorenz96Run {
    fn default() -> Self {
        Lorenz96Run {
            dt: DEFAULT_LORENZ96_DT,
            stride: DEFAULT_LORENZ96_STRIDE,
            transient_steps: DEFAULT_LORENZ96_TRANSIENT,
            blowup_bound: DEFAULT_BLOWUP_BOUND,
        }
    }
}

/// Integrates Lorenz-96 with RK4 and records `x_1` every `run.stride` steps
/// after discarding `run.transient_steps` steps. The first sample is the
/// state right after the transient.
pub fn lorenz96_orbit(
    a: f64,
    initial: &StateVector,
    run: &Lorenz96Run,
    count: usize,
) -> Result<TimeSeries> {
    let m = initial.dim();
    if m < 4 {
        return Err(Error::Dimension(format!("Lorenz-96 needs m >= 4, got {m}")));
    }
    if !(run.dt > 0.0) || run.stride == 0 {
        return Err(Error::Domain(format!(
            "need dt > 0 and stride >= 1, got dt = {}, stride = {}",
            run.dt, run.stride
        )));
    }
    if count < 2 {
        return Err(Error::Size(format!("need at least 2 samples, got {count}")));
    }
    let field = |x: &[f64], out: &mut [f64]| lorenz96_rhs_into(x, a, out);
    let mut rk = Rk4::new(m);
    let mut x = initial.as_slice().to_vec();
    let mut step: u64 = 0;
    let mut advance = |x: &mut [f64], n: u64| -> Result<()> {
        for _ in 0..n {
            rk.step(&field, x, run.dt);
            step += 1;
            let magnitude = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            // `!(<=)` also catches NaN.
            if !(magnitude <= run.blowup_bound) {
                return Err(Error::NumericalBlowup {
                    step,
                    magnitude,
                    bound: run.blowup_bound,
                });
            }
        }
        Ok(())
    };
    advance(&mut x, run.transient_steps)?;
    let mut values = Vec::with_capacity(count);
    values.push(x[0]);
    for _ in 1..count {
        advance(&mut x, run.stride)?;
        values.push(x[0]);
    }
    let origin = format!(
        "lorenz96 a={a} m={m} dt={} stride={} transient_steps={}",
        run.dt, run.stride, run.transient_steps
    );
    TimeSeries::new(values, run.dt * run.stride as f64, origin)
}

/// Initial condition for a trajectory. Logistic: `x1` uniform on the open
/// interval (0, 1), drawn from `seed`. Lorenz-96: every coordinate equal to
/// `a`, with the first raised by `0.01 a` to leave the equilibrium.
pub fn initial_state(spec: &SystemSpec, seed: u64) -> StateVector {
    match spec.kind {
        SystemKind::LogisticMap => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: f64 = rng.sample(Open01);
            StateVector(vec![x])
        }
        SystemKind::Lorenz96 => {
            let mut x = vec![spec.a; spec.m];
            x[0] += 0.01 * spec.a;
            StateVector(x)
        }
    }
}

/// Generates `count` observable samples for `spec` from the initial state
/// determined by `seed`.
pub fn generate(spec: &SystemSpec, seed: u64, count: usize) -> Result<TimeSeries> {
    spec.validate()?;
    let initial = initial_state(spec, seed);
    match spec.kind {
        SystemKind::LogisticMap => logistic_orbit(spec.a, initial.0[0], spec.transient, count),
        SystemKind::Lorenz96 => {
            let run = Lorenz96Run {
                dt: spec.dt,
                stride: spec.stride,
                transient_steps: spec.transient,
                blowup_bound: spec.blowup_bound,
            };
            lorenz96_orbit(spec.a, &initial, &run, count)
        }
    }
}
