//! CSV output. Reals use 17 significant digits in scientific notation with a
//! dot decimal separator, independent of locale.

use std::io::{self, Write};

use crate::classify::IntervalScheme;

use super::{DeltaProbe, SweepResults};

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns `a, omega, N, K, label_scheme_<name>...`.
pub fn write_results_csv<W: Write>(mut w: W, results: &SweepResults) -> io::Result<()> {
    write!(w, "a,omega,N,K")?;
    for s in &results.schemes {
        write!(w, ",label_scheme_{}", s.name)?;
    }
    writeln!(w)?;
    for row in results.rows() {
        write!(
            w,
            "{},{},{},{}",
            format_real(row.a),
            format_real(row.omega),
            row.n,
            format_real(row.k)
        )?;
        for label in &row.labels {
            write!(w, ",{label}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn write_summary_csv<W: Write>(mut w: W, results: &SweepResults) -> io::Result<()> {
    writeln!(w, "N,scheme,Q_u,Q_u_prime,Q_min,Q_min_prime")?;
    for s in &results.summaries {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.n,
            s.scheme,
            s.summary.q_u,
            s.summary.q_u_prime,
            s.summary.q_min,
            s.summary.q_min_prime
        )?;
    }
    w.flush()
}

/// Percentage of undecided frequencies per parameter and data length.
pub fn write_outliers_csv<W: Write>(
    mut w: W,
    results: &SweepResults,
    scheme: &IntervalScheme,
) -> io::Result<()> {
    writeln!(w, "a,N,M_u_percent")?;
    let per_n: Vec<_> = results
        .n_list
        .iter()
        .map(|&n| (n, results.counts(n, scheme)))
        .collect();
    for ai in 0..results.grid.len() {
        for (n, counts) in &per_n {
            let (a, c) = counts[ai];
            writeln!(
                w,
                "{},{},{}",
                format_real(a),
                n,
                format_real(c.undecided_percent())
            )?;
        }
    }
    w.flush()
}

pub fn write_median_csv<W: Write>(mut w: W, results: &SweepResults) -> io::Result<()> {
    writeln!(w, "a,N,median_K")?;
    for (a, n, m) in results.medians() {
        writeln!(w, "{},{},{}", format_real(a), n, format_real(m))?;
    }
    w.flush()
}

/// One row per plotted lag: `N, n, log_n, log_D, in_delta_<delta>...`.
pub fn write_probe_csv<W: Write>(mut w: W, probe: &DeltaProbe) -> io::Result<()> {
    write!(w, "N,n,log_n,log_D")?;
    for d in &probe.deltas {
        write!(w, ",in_delta_{d}")?;
    }
    writeln!(w)?;
    for c in &probe.curves {
        for row in 0..c.lags.len() {
            write!(
                w,
                "{},{},{},{}",
                c.n_samples,
                c.lags[row],
                format_real(c.log_n[row]),
                format_real(c.log_d[row])
            )?;
            for di in 0..probe.deltas.len() {
                write!(w, ",{}", u8::from(c.in_range(row, di)))?;
            }
            writeln!(w)?;
        }
    }
    w.flush()
}

/// Per `(N, delta)`: cut-off, slope of the plotted curve and pipeline `K`.
pub fn write_probe_k_csv<W: Write>(mut w: W, probe: &DeltaProbe) -> io::Result<()> {
    writeln!(w, "N,delta,n_max,curve_slope,K")?;
    for c in &probe.curves {
        for (di, d) in probe.deltas.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                c.n_samples,
                d,
                c.cutoffs[di],
                format_real(c.slopes[di]),
                format_real(c.pipeline_k[di])
            )?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_significant_digits() {
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(-3.5), "-3.5000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
    }
}
