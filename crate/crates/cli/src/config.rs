//! Configuration files: UTF-8 `key = value` lines grouped under `[section]`
//! headers, `#` starting a comment. Lists are comma separated.
//!
//! ```text
//! [system]
//! kind = logistic
//! transient = 1000
//!
//! [sweep]
//! a_start = 3.5
//! a_end = 4.0
//! a_step = 0.01
//! N_list = 10000, 100000
//! delta = 0.01
//!
//! [output]
//! out_dir = out
//!
//! [probe]
//! a = 3.6022
//! omega = 1.9418
//! N_list = 50000, 100000, 200000, 400000
//! delta_list = 0.01, 0.02, 0.1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use dichotomy_core::{default_config, IntervalScheme, SweepConfig, SystemKind};

use crate::CliError;

/// Settings of the `probe-delta` command.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub a: f64,
    pub omega: f64,
    pub n_list: Vec<usize>,
    pub delta_list: Vec<f64>,
}

impl ProbeConfig {
    fn default_for(kind: SystemKind) -> Self {
        match kind {
            SystemKind::LogisticMap => ProbeConfig {
                a: 3.6022,
                omega: 1.9418,
                n_list: vec![50_000, 100_000, 200_000, 400_000],
                delta_list: vec![0.01, 0.02, 0.1],
            },
            SystemKind::Lorenz96 => ProbeConfig {
                a: 6.2,
                omega: 0.6283,
                n_list: vec![50_000, 100_000, 200_000, 400_000],
                delta_list: vec![0.01, 0.02, 0.1],
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.a.is_finite() {
            return Err(invalid(
                "probe.a",
                format!("must be finite, got {}", self.a),
            ));
        }
        if !(self.omega > 0.0 && self.omega <= std::f64::consts::PI) {
            return Err(invalid(
                "probe.omega",
                format!("must lie in (0, pi], got {}", self.omega),
            ));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(invalid(
                "probe.N_list",
                "needs at least one positive length",
            ));
        }
        if self.delta_list.is_empty() {
            return Err(invalid("probe.delta_list", "must not be empty"));
        }
        if let Some(d) = self.delta_list.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return Err(invalid("probe.delta_list", format!("{d} outside (0, 1)")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub sweep: SweepConfig,
    pub out_dir: PathBuf,
    pub probe: ProbeConfig,
}

impl CliConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.sweep.validate()?;
        self.probe.validate()
    }

    /// Canonical text form; parses back to an identical configuration.
    pub fn to_text(&self) -> String {
        let s = &self.sweep;
        let sys = &s.system;
        let p = &self.probe;
        let mut out = String::new();
        let _ = writeln!(out, "[system]");
        let _ = writeln!(out, "kind = {}", sys.kind.name());
        let _ = writeln!(out, "m = {}", sys.m);
        let _ = writeln!(out, "dt = {:?}", sys.dt);
        let _ = writeln!(out, "stride = {}", sys.stride);
        let _ = writeln!(out, "transient = {}", sys.transient);
        let _ = writeln!(out, "blowup_bound = {:?}", sys.blowup_bound);
        let _ = writeln!(out, "\n[sweep]");
        let _ = writeln!(out, "a_start = {:?}", s.a_start);
        let _ = writeln!(out, "a_end = {:?}", s.a_end);
        let _ = writeln!(out, "a_step = {:?}", s.a_step);
        let _ = writeln!(out, "n_omega = {}", s.n_omega);
        let _ = writeln!(out, "omega_lo = {:?}", s.omega_window.0);
        let _ = writeln!(out, "omega_hi = {:?}", s.omega_window.1);
        let _ = writeln!(out, "N_list = {}", join(&s.n_list, |n| n.to_string()));
        let _ = writeln!(out, "delta = {:?}", s.delta);
        let _ = writeln!(out, "schemes = {}", join(&s.schemes, |x| x.name.clone()));
        let _ = writeln!(out, "master_seed = {}", s.master_seed);
        let _ = writeln!(out, "threshold_fraction = {:?}", s.threshold_fraction);
        let _ = writeln!(out, "\n[output]");
        let _ = writeln!(out, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(out, "\n[probe]");
        let _ = writeln!(out, "a = {:?}", p.a);
        let _ = writeln!(out, "omega = {:?}", p.omega);
        let _ = writeln!(out, "N_list = {}", join(&p.n_list, |n| n.to_string()));
        let _ = writeln!(
            out,
            "delta_list = {}",
            join(&p.delta_list, |d| format!("{d:?}"))
        );
        out
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config(format!("{field}: {}", message.into()))
}

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "system",
        &["kind", "m", "dt", "stride", "transient", "blowup_bound"],
    ),
    (
        "sweep",
        &[
            "a_start",
            "a_end",
            "a_step",
            "n_omega",
            "omega_lo",
            "omega_hi",
            "N_list",
            "delta",
            "schemes",
            "master_seed",
            "threshold_fraction",
        ],
    ),
    ("output", &["out_dir"]),
    ("probe", &["a", "omega", "N_list", "delta_list"]),
];

struct Entry {
    value: String,
    line: usize,
}

/// Raw `section.key -> value` map with line numbers for diagnostics.
struct Raw(BTreeMap<String, Entry>);

impl Raw {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        let mut section: Option<&str> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::Config(format!("line {line_no}: {msg}"));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                section = Some(
                    SECTIONS
                        .iter()
                        .find(|(s, _)| *s == name)
                        .map(|(s, _)| *s)
                        .ok_or_else(|| err(format!("unknown section [{name}]")))?,
                );
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let sec = section.ok_or_else(|| err(format!("key `{key}` outside any section")))?;
            let known = SECTIONS
                .iter()
                .find(|(s, _)| *s == sec)
                .map(|(_, k)| *k)
                .unwrap_or(&[]);
            if !known.contains(&key) {
                return Err(err(format!("unknown key `{key}` in [{sec}]")));
            }
            let full = format!("{sec}.{key}");
            if map.contains_key(&full) {
                return Err(err(format!("duplicate key `{key}` in [{sec}]")));
            }
            map.insert(
                full,
                Entry {
                    value: value.trim().to_string(),
                    line: line_no,
                },
            );
        }
        Ok(Raw(map))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|e| {
                e.value.parse().map_err(|_| {
                    CliError::Config(format!(
                        "line {}: {key}: cannot parse `{}`",
                        e.line, e.value
                    ))
                })
            })
            .transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        self.0
            .get(key)
            .map(|e| {
                parse_list(&e.value).map_err(|bad| {
                    CliError::Config(format!("line {}: {key}: cannot parse `{bad}`", e.line))
                })
            })
            .transpose()
    }
}

/// Comma-separated list; on failure returns the offending item.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| s.to_string()))
        .collect()
}

pub fn parse_kind(name: &str) -> Option<SystemKind> {
    match name {
        "logistic" => Some(SystemKind::LogisticMap),
        "lorenz96" => Some(SystemKind::Lorenz96),
        _ => None,
    }
}

pub fn parse_scheme(name: &str) -> Result<IntervalScheme, CliError> {
    IntervalScheme::by_name(name)
        .ok_or_else(|| CliError::Config(format!("unknown scheme `{name}`, expected i, ii or iii")))
}

/// Parses a configuration. Keys that are absent take the defaults of the
/// system kind; a notice is logged for each defaulted key that affects the
/// numerics.
pub fn parse(text: &str) -> Result<CliConfig, CliError> {
    let raw = Raw::parse(text)?;
    let kind_name: String = raw
        .get("system.kind")?
        .ok_or_else(|| invalid("system.kind", "required (logistic or lorenz96)"))?;
    let kind = parse_kind(&kind_name)
        .ok_or_else(|| invalid("system.kind", format!("unknown system `{kind_name}`")))?;

    let mut sweep = default_config(kind);
    let mut probe = ProbeConfig::default_for(kind);
    let mut out_dir = PathBuf::from("out");

    let mut physics = vec![("sweep.delta", sweep.delta.to_string())];
    physics.push(("system.transient", sweep.system.transient.to_string()));
    if kind == SystemKind::Lorenz96 {
        physics.push(("system.dt", sweep.system.dt.to_string()));
        physics.push(("system.stride", sweep.system.stride.to_string()));
    }
    for (key, value) in physics {
        if !raw.has(key) {
            log::warn!("{key} not set, using default {value}");
        }
    }

    let sys = &mut sweep.system;
    if let Some(v) = raw.get("system.m")? {
        sys.m = v;
    }
    if let Some(v) = raw.get("system.dt")? {
        sys.dt = v;
    }
    if let Some(v) = raw.get("system.stride")? {
        sys.stride = v;
    }
    if let Some(v) = raw.get("system.transient")? {
        sys.transient = v;
    }
    if let Some(v) = raw.get("system.blowup_bound")? {
        sys.blowup_bound = v;
    }
    if let Some(v) = raw.get("sweep.a_start")? {
        sweep.a_start = v;
    }
    if let Some(v) = raw.get("sweep.a_end")? {
        sweep.a_end = v;
    }
    if let Some(v) = raw.get("sweep.a_step")? {
        sweep.a_step = v;
    }
    if let Some(v) = raw.get("sweep.n_omega")? {
        sweep.n_omega = v;
    }
    if let Some(v) = raw.get("sweep.omega_lo")? {
        sweep.omega_window.0 = v;
    }
    if let Some(v) = raw.get("sweep.omega_hi")? {
        sweep.omega_window.1 = v;
    }
    if let Some(v) = raw.list("sweep.N_list")? {
        sweep.n_list = v;
    }
    if let Some(v) = raw.get("sweep.delta")? {
        sweep.delta = v;
    }
    if let Some(names) = raw.list::<String>("sweep.schemes")? {
        sweep.schemes = names
            .iter()
            .map(|n| parse_scheme(n))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = raw.get("sweep.master_seed")? {
        sweep.master_seed = v;
    }
    if let Some(v) = raw.get("sweep.threshold_fraction")? {
        sweep.threshold_fraction = v;
    }
    if let Some(v) = raw.get::<String>("output.out_dir")? {
        out_dir = PathBuf::from(v);
    }
    if let Some(v) = raw.get("probe.a")? {
        probe.a = v;
    }
    if let Some(v) = raw.get("probe.omega")? {
        probe.omega = v;
    }
    if let Some(v) = raw.list("probe.N_list")? {
        probe.n_list = v;
    }
    if let Some(v) = raw.list("probe.delta_list")? {
        probe.delta_list = v;
    }
    sweep.system.a = sweep.a_start;

    Ok(CliConfig {
        sweep,
        out_dir,
        probe,
    })
}
