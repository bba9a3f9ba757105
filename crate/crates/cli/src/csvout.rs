//! CSV emitters: UTF-8, header row, 12 significant digits, infinities as
//! +inf/-inf.

use epsim_core::dynamics::PropagationRecord;
use epsim_core::linalg::SpectrumResult;
use epsim_core::metrics::{sample_metrics, MetricSample};
use std::io::{self, Write};
use std::path::Path;

pub fn sig12(x: f64) -> String {
    if x.is_infinite() {
        (if x > 0.0 { "+inf" } else { "-inf" }).to_string()
    } else {
        format!("{:.11e}", x)
    }
}

fn write_file(path: &Path, body: &str) -> io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())
}

/// Time-series export: one row per recorded sample. The
/// `trace_before_renorm` column reports the step that ended at that sample
/// time (1 for the initial row); `include_state` adds the 32 re/im state
/// entries.
pub fn timeseries_csv(record: &PropagationRecord, include_state: bool) -> String {
    let mut out = String::new();
    out.push('t');
    if include_state {
        for i in 0..4 {
            for j in 0..4 {
                out.push_str(&format!(",re_rho_{i}_{j},im_rho_{i}_{j}"));
            }
        }
    }
    out.push_str(",fidelity_psi_plus,fidelity_psi_minus,concurrence,purity,trace_before_renorm\n");
    for (idx, (t, state)) in record.times.iter().zip(&record.states).enumerate() {
        let m = sample_metrics(state);
        let trace = if idx == 0 {
            1.0
        } else {
            let step = (t / record.dt).round() as usize;
            record.trace_before_renorm[step - 1]
        };
        out.push_str(&sig12(*t));
        if include_state {
            for i in 0..4 {
                for j in 0..4 {
                    let z = state.matrix()[(i, j)];
                    out.push_str(&format!(",{},{}", sig12(z.re), sig12(z.im)));
                }
            }
        }
        out.push_str(&format!(
            ",{},{},{},{},{}\n",
            sig12(m.fidelity_plus),
            sig12(m.fidelity_minus),
            sig12(m.concurrence),
            sig12(m.purity),
            sig12(trace)
        ));
    }
    out
}

pub fn write_timeseries(
    path: &Path,
    record: &PropagationRecord,
    include_state: bool,
) -> io::Result<()> {
    write_file(path, &timeseries_csv(record, include_state))
}

/// Sweep export: final metrics per grid point, rows in grid order.
pub fn sweep_csv(rows: &[(f64, MetricSample)]) -> String {
    let mut out =
        String::from("sweep_value,fidelity_psi_plus,fidelity_psi_minus,concurrence\n");
    for (value, m) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig12(*value),
            sig12(m.fidelity_plus),
            sig12(m.fidelity_minus),
            sig12(m.concurrence)
        ));
    }
    out
}

pub fn write_sweep(path: &Path, rows: &[(f64, MetricSample)]) -> io::Result<()> {
    write_file(path, &sweep_csv(rows))
}

/// Spectrum export: continuity-ordered eigenvalue branches per grid point.
pub fn spectrum_csv(grid: &[f64], points: &[SpectrumResult]) -> String {
    let mut out = String::from("sweep_value");
    for k in 1..=16 {
        out.push_str(&format!(",re_lambda_{k}"));
    }
    for k in 1..=16 {
        out.push_str(&format!(",im_lambda_{k}"));
    }
    out.push_str(",near_defective\n");
    for (value, point) in grid.iter().zip(points) {
        out.push_str(&sig12(*value));
        for l in &point.eigenvalues {
            out.push_str(&format!(",{}", sig12(l.re)));
        }
        for l in &point.eigenvalues {
            out.push_str(&format!(",{}", sig12(l.im)));
        }
        out.push_str(&format!(",{}\n", point.near_defective));
    }
    out
}

pub fn write_spectrum(path: &Path, grid: &[f64], points: &[SpectrumResult]) -> io::Result<()> {
    write_file(path, &spectrum_csv(grid, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits_and_infinity_tokens() {
        assert_eq!(sig12(0.25), "2.50000000000e-1");
        assert_eq!(sig12(-1.0 / 3.0), "-3.33333333333e-1");
        assert_eq!(sig12(f64::INFINITY), "+inf");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
    }
}
