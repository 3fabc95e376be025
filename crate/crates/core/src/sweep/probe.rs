//! Choosing `delta`: full log-log curves of `D(n)` with regression cut-offs.

use crate::error::{Error, Result};
use crate::spectral::{
    estimate_k, k_for_omega, mean_observable, modified_msd, structure_function_all_lags,
    weighted_sums,
};

/// One data length's curve. `lags`, `log_n` and `log_d` are parallel and only
/// hold lags with `D(n) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCurve {
    pub n_samples: usize,
    pub lags: Vec<usize>,
    pub log_n: Vec<f64>,
    pub log_d: Vec<f64>,
    /// `floor(delta N)` for each delta.
    pub cutoffs: Vec<usize>,
    /// Slope of the plotted curve over `n <= cutoff`, per delta.
    pub slopes: Vec<f64>,
    /// `K` from the sweep pipeline at this delta (NaN when `floor(delta N)`
    /// is too short for it).
    pub pipeline_k: Vec<f64>,
}

impl ProbeCurve {
    pub fn in_range(&self, row: usize, delta_index: usize) -> bool {
        self.lags[row] <= self.cutoffs[delta_index]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaProbe {
    pub omega: f64,
    pub deltas: Vec<f64>,
    pub curves: Vec<ProbeCurve>,
}

/// Builds a curve from `D(1) .. D(len)` for data length `n_samples`.
pub fn probe_curve(n_samples: usize, d: &[f64], deltas: &[f64]) -> Result<ProbeCurve> {
    let positive = d.iter().filter(|&&x| x > 0.0).count();
    if positive < 3 {
        return Err(Error::DegenerateData { positive });
    }
    let mut curve = ProbeCurve {
        n_samples,
        lags: Vec::with_capacity(positive),
        log_n: Vec::with_capacity(positive),
        log_d: Vec::with_capacity(positive),
        cutoffs: Vec::with_capacity(deltas.len()),
        slopes: Vec::with_capacity(deltas.len()),
        pipeline_k: vec![f64::NAN; deltas.len()],
    };
    for (i, &x) in d.iter().enumerate() {
        if x > 0.0 {
            curve.lags.push(i + 1);
            curve.log_n.push(((i + 1) as f64).ln());
            curve.log_d.push(x.ln());
        }
    }
    for &delta in deltas {
        check_delta(delta)?;
        let cutoff = ((delta * n_samples as f64).floor() as usize).min(d.len());
        curve.cutoffs.push(cutoff);
        curve.slopes.push(estimate_k(d, cutoff)?.k);
    }
    Ok(curve)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta = {delta} outside (0, 1)")))
    }
}

/// For each data length, the curve `log D(n)` for `n = 1 .. N-1` (each lag
/// averaged over all `N - n` shifts) with cut-off markers for every delta.
pub fn delta_probe(
    values: &[f64],
    omega: f64,
    n_list: &[usize],
    deltas: &[f64],
) -> Result<DeltaProbe> {
    if let Some(&n) = n_list.iter().find(|&&n| n > values.len() || n < 2) {
        return Err(Error::Size(format!(
            "data length {n} not in [2, {}]",
            values.len()
        )));
    }
    for &delta in deltas {
        check_delta(delta)?;
    }
    let mut curves = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let prefix = &values[..n];
        let p = weighted_sums(prefix, omega)?;
        let s = structure_function_all_lags(&p)?;
        let msd = modified_msd(&s, mean_observable(prefix), omega)?;
        let mut curve = probe_curve(n, &msd.d, deltas)?;
        for (slot, &delta) in curve.pipeline_k.iter_mut().zip(deltas) {
            match k_for_omega(prefix, omega, delta) {
                Ok(est) => *slot = est.k,
                Err(Error::Size(_)) => {}
                Err(e) => return Err(e),
            }
        }
        curves.push(curve);
    }
    Ok(DeltaProbe {
        omega,
        deltas: deltas.to_vec(),
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_curve_has_unit_slope_everywhere() {
        let d: Vec<f64> = (1..=999).map(|n| n as f64).collect();
        let c = probe_curve(1000, &d, &[0.01, 0.02, 0.1]).unwrap();
        assert_eq!(c.cutoffs, vec![10, 20, 100]);
        for s in &c.slopes {
            assert!((s - 1.0).abs() < 1e-12);
        }
        for (ln, ld) in c.log_n.iter().zip(&c.log_d) {
            assert!((ln - ld).abs() < 1e-12);
        }
        assert!(c.in_range(9, 0) && !c.in_range(10, 0));
    }

    #[test]
    fn constant_series_is_degenerate() {
        let err = delta_probe(&[0.7; 3000], 1.0, &[3000], &[0.01]).unwrap_err();
        assert!(matches!(err, Error::DegenerateData { .. }));
    }

    #[test]
    fn zero_delta_is_rejected() {
        let d: Vec<f64> = (1..=99).map(|n| n as f64).collect();
        assert!(probe_curve(100, &d, &[0.0]).is_err());
    }

    #[test]
    fn chaotic_probe_is_linear_at_small_delta() {
        let s = crate::dynamics::logistic_orbit(4.0, 0.271_828, 1000, 20_000).unwrap();
        let probe = delta_probe(s.values(), 1.9418, &[10_000, 20_000], &[0.01, 0.1]).unwrap();
        assert_eq!(probe.curves.len(), 2);
        for c in &probe.curves {
            assert!(c.lags.iter().all(|&n| n < c.n_samples));
            assert!(
                c.slopes[0] > 0.7 && c.slopes[0] < 1.2,
                "slope {}",
                c.slopes[0]
            );
            assert!(c.pipeline_k[0] > 0.7 && c.pipeline_k[0] < 1.2);
        }
    }
}
