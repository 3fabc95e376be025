//! Zero/one/undecided labels for growth exponents and the sweep statistics
//! built from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        OpenInterval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_subset_of(&self, other: &OpenInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// Intervals `I0` around 0 and `I1` around 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalScheme {
    pub name: String,
    pub i0: OpenInterval,
    pub i1: OpenInterval,
}

impl IntervalScheme {
    pub fn new(name: impl Into<String>, i0: OpenInterval, i1: OpenInterval) -> Result<Self> {
        let name = name.into();
        if !(i0.lo < i0.hi && i1.lo < i1.hi) || i0.hi > i1.lo {
            return Err(Error::Domain(format!(
                "scheme {name}: need I0 = ({}, {}) below and disjoint from I1 = ({}, {})",
                i0.lo, i0.hi, i1.lo, i1.hi
            )));
        }
        Ok(IntervalScheme { name, i0, i1 })
    }

    pub fn scheme_i() -> Self {
        IntervalScheme {
            name: "i".into(),
            i0: OpenInterval::new(-0.1, 0.3),
            i1: OpenInterval::new(0.7, 1.1),
        }
    }

    pub fn scheme_ii() -> Self {
        IntervalScheme {
            name: "ii".into(),
            i0: OpenInterval::new(-0.1, 0.2),
            i1: OpenInterval::new(0.8, 1.1),
        }
    }

    pub fn scheme_iii() -> Self {
        IntervalScheme {
            name: "iii".into(),
            i0: OpenInterval::new(-0.1, 0.1),
            i1: OpenInterval::new(0.9, 1.1),
        }
    }

    /// Schemes (i), (ii) and (iii), in that order.
    pub fn standard() -> Vec<Self> {
        vec![Self::scheme_i(), Self::scheme_ii(), Self::scheme_iii()]
    }

    /// Looks up a standard scheme by name (`i`, `ii` or `iii`).
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "i" => Some(Self::scheme_i()),
            "ii" => Some(Self::scheme_ii()),
            "iii" => Some(Self::scheme_iii()),
            _ => None,
        }
    }

    pub fn classify(&self, k: f64) -> Label {
        classify_k(k, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Zero,
    One,
    Undecided,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Zero => "zero",
            Label::One => "one",
            Label::Undecided => "undecided",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Label::Zero),
            "one" => Ok(Label::One),
            "undecided" => Ok(Label::Undecided),
            _ => Err(Error::Domain(format!("unknown label {s:?}"))),
        }
    }
}

/// Boundary values and non-finite `K` are undecided.
pub fn classify_k(k: f64, scheme: &IntervalScheme) -> Label {
    if scheme.i0.contains(k) {
        Label::Zero
    } else if scheme.i1.contains(k) {
        Label::One
    } else {
        Label::Undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts {
    pub m0: usize,
    pub m1: usize,
    pub mu: usize,
    pub n_omega: usize,
}

impl ClassCounts {
    pub fn add(&mut self, label: Label) {
        match label {
            Label::Zero => self.m0 += 1,
            Label::One => self.m1 += 1,
            Label::Undecided => self.mu += 1,
        }
        self.n_omega += 1;
    }

    pub fn min_zero_one(&self) -> usize {
        self.m0.min(self.m1)
    }

    /// `M_u` as a percentage of the frequencies tested.
    pub fn undecided_percent(&self) -> f64 {
        if self.n_omega == 0 {
            0.0
        } else {
            100.0 * self.mu as f64 / self.n_omega as f64
        }
    }
}

/// Counts of each label over a list of growth exponents.
pub fn tally<I>(ks: I, scheme: &IntervalScheme) -> ClassCounts
where
    I: IntoIterator<Item = f64>,
{
    let mut counts = ClassCounts::default();
    for k in ks {
        counts.add(classify_k(k, scheme));
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub per_parameter: Vec<(f64, ClassCounts)>,
    pub q_u: usize,
    pub q_u_prime: usize,
    pub q_min: usize,
    pub q_min_prime: usize,
    /// Counts strictly above this are outliers for the primed statistics.
    pub threshold: f64,
}

/// Aggregates per-parameter counts. A parameter counts toward `Q_u'` or
/// `Q_min'` when its count strictly exceeds `threshold_fraction * n_omega`.
pub fn sweep_summary(rows: &[(f64, ClassCounts)], threshold_fraction: f64) -> Result<SweepSummary> {
    let n_omega = rows.first().map_or(0, |r| r.1.n_omega);
    if let Some((a, c)) = rows.iter().find(|r| r.1.n_omega != n_omega) {
        return Err(Error::InconsistentCounts(format!(
            "a = {a} has {} frequencies, expected {n_omega}",
            c.n_omega
        )));
    }
    if let Some((a, _)) = rows
        .iter()
        .find(|r| r.1.m0 + r.1.m1 + r.1.mu != r.1.n_omega)
    {
        return Err(Error::InconsistentCounts(format!(
            "a = {a}: M0 + M1 + Mu differs from the number of frequencies"
        )));
    }
    let threshold = threshold_fraction * n_omega as f64;
    let exceeds = |x: usize| x as f64 > threshold;
    Ok(SweepSummary {
        per_parameter: rows.to_vec(),
        q_u: rows.iter().map(|r| r.1.mu).sum(),
        q_u_prime: rows.iter().filter(|r| exceeds(r.1.mu)).count(),
        q_min: rows.iter().map(|r| r.1.min_zero_one()).sum(),
        q_min_prime: rows.iter().filter(|r| exceeds(r.1.min_zero_one())).count(),
        threshold,
    })
}

/// Median with the even-length convention of averaging the middle pair.
/// Returns NaN for an empty list.
pub fn median_k(ks: &[f64]) -> f64 {
    if ks.is_empty() {
        return f64::NAN;
    }
    let mut sorted = ks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}
