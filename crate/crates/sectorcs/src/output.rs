//! CSV and JSON rendering of designs, diagnostics, and sweep results.
//!
//! Complex entries print as `re:im` with enough digits to round-trip;
//! vector-valued CSV cells hold comma-joined entries and are quoted.
//! Non-finite rates (noiseless runs report NaN) become `NaN` in CSV and
//! `null` in JSON.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::beam::BaseBeam;
use crate::dft::ComplexVector;
use crate::eval::{ExperimentSummary, Scheme, TrialOutput};
use crate::sampling::{PsfReport, ShiftSet};

/// `re:im` with 17 significant digits, enough to reconstruct the f64 pair
/// exactly.
pub fn fmt_complex(z: Complex64) -> String {
    format!("{:.16e}:{:.16e}", z.re, z.im)
}

fn fmt_vector(v: &ComplexVector) -> String {
    v.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(",")
}

/// Shortest round-trip decimal, switching to exponent form when plain
/// notation would drown the value in zeros.
pub fn fmt_scalar(v: f64) -> String {
    if v != 0.0 && v.is_finite() && (v.abs() < 1e-4 || v.abs() >= 1e16) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Quotes a cell when it holds separators or quotes, doubling any quotes.
pub fn csv_escape(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    cells.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(",")
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&csv_line(&row));
        out.push('\n');
    }
    out
}

// ── Sweep results ───────────────────────────────────────────────────────────

pub const SWEEP_HEADER: [&str; 9] = [
    "scheme",
    "n",
    "n_sec",
    "m",
    "snr_db",
    "trials",
    "nmse",
    "mean_rate_bits",
    "mean_mu",
];

pub fn sweep_csv(summaries: &[ExperimentSummary]) -> String {
    let rows = summaries
        .iter()
        .map(|s| {
            vec![
                s.scheme.to_string(),
                s.n.to_string(),
                s.n_sec.to_string(),
                s.m.to_string(),
                fmt_scalar(s.snr_db),
                s.trials.to_string(),
                fmt_scalar(s.nmse),
                fmt_scalar(s.mean_rate_bits),
                fmt_scalar(s.mean_mu),
            ]
        })
        .collect();
    csv_table(&SWEEP_HEADER, rows)
}

fn summary_json(s: &ExperimentSummary) -> Value {
    json!({
        "scheme": s.scheme.as_str(),
        "n": s.n,
        "n_sec": s.n_sec,
        "m": s.m,
        "snr_db": s.snr_db,
        "trials": s.trials,
        "nmse": s.nmse,
        "mean_rate_bits": s.mean_rate_bits,
        "mean_mu": s.mean_mu,
        "noise_std": s.noise_std,
        "rate_noise_var": s.rate_noise_var,
        "misselect_count": s.misselect_count,
        "degenerate_rate_count": s.degenerate_rate_count,
    })
}

pub fn sweep_json(summaries: &[ExperimentSummary]) -> Value {
    Value::Array(summaries.iter().map(summary_json).collect())
}

// ── Beam designs ────────────────────────────────────────────────────────────

pub const DESIGN_HEADER: [&str; 7] =
    ["sector", "d1", "d2", "papr", "norm_factor", "mask", "beam"];

pub fn design_csv(bases: &[BaseBeam]) -> String {
    let rows = bases
        .iter()
        .enumerate()
        .map(|(s, base)| {
            vec![
                s.to_string(),
                base.sector().d1().to_string(),
                base.sector().d2().to_string(),
                fmt_scalar(base.papr()),
                fmt_scalar(base.norm_factor()),
                fmt_vector(base.mask().p()),
                fmt_vector(base.beam()),
            ]
        })
        .collect();
    csv_table(&DESIGN_HEADER, rows)
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn vector_json(v: &ComplexVector) -> Value {
    Value::Array(v.iter().map(|&z| complex_json(z)).collect())
}

pub fn design_json(bases: &[BaseBeam]) -> Value {
    Value::Array(
        bases
            .iter()
            .enumerate()
            .map(|(s, base)| {
                json!({
                    "sector": s,
                    "d1": base.sector().d1(),
                    "d2": base.sector().d2(),
                    "papr": base.papr(),
                    "norm_factor": base.norm_factor(),
                    "mask": vector_json(base.mask().p()),
                    "beam": vector_json(base.beam()),
                })
            })
            .collect(),
    )
}

// ── Point spread function diagnostics ───────────────────────────────────────

pub const PSF_HEADER: [&str; 4] = ["lag", "psf_re", "psf_im", "magnitude"];

pub fn psf_csv(report: &PsfReport) -> String {
    let rows = report
        .psf()
        .iter()
        .enumerate()
        .map(|(lag, &z)| {
            vec![
                lag.to_string(),
                fmt_scalar(z.re),
                fmt_scalar(z.im),
                fmt_scalar(z.norm()),
            ]
        })
        .collect();
    csv_table(&PSF_HEADER, rows)
}

pub fn psf_json(scheme: Scheme, shifts: &ShiftSet, report: &PsfReport) -> Value {
    json!({
        "scheme": scheme.as_str(),
        "n": shifts.n(),
        "m": shifts.m(),
        "shifts": shifts.shifts(),
        "mu": report.mu(),
        "argmax_lag": report.argmax_index(),
        "psf": vector_json(report.psf()),
    })
}

pub const CDF_HEADER: [&str; 6] = ["draw", "scheme", "n", "n_sec", "m", "mu"];

/// Sorted coherence samples, one row per draw.
pub fn coherence_cdf_csv(scheme: Scheme, n: usize, n_sec: usize, m: usize, mu: &[f64]) -> String {
    let rows = mu
        .iter()
        .enumerate()
        .map(|(draw, value)| {
            vec![
                draw.to_string(),
                scheme.to_string(),
                n.to_string(),
                n_sec.to_string(),
                m.to_string(),
                fmt_scalar(*value),
            ]
        })
        .collect();
    csv_table(&CDF_HEADER, rows)
}

pub fn coherence_cdf_json(scheme: Scheme, n: usize, n_sec: usize, m: usize, mu: &[f64]) -> Value {
    json!({
        "scheme": scheme.as_str(),
        "n": n,
        "n_sec": n_sec,
        "m": m,
        "draws": mu.len(),
        "mu": mu,
    })
}

// ── Single-trial estimates ──────────────────────────────────────────────────

pub const ESTIMATE_HEADER: [&str; 11] = [
    "scheme",
    "trial",
    "selected_sector",
    "misselected",
    "noise_std",
    "nmse",
    "rate_bits",
    "mu",
    "g_true",
    "g_hat",
    "h_hat",
];

pub fn estimate_csv(scheme: Scheme, out: &TrialOutput) -> String {
    let r = &out.record;
    let row = vec![
        scheme.to_string(),
        r.trial_index.to_string(),
        r.selected_sector.to_string(),
        r.misselected.to_string(),
        fmt_scalar(out.noise_std),
        fmt_scalar(r.nmse_numerator / r.nmse_denominator),
        fmt_scalar(r.rate_bits),
        fmt_scalar(r.mu),
        fmt_vector(&out.g_true_l),
        fmt_vector(&out.g_hat_l),
        fmt_vector(&out.h_hat),
    ];
    csv_table(&ESTIMATE_HEADER, vec![row])
}

pub fn estimate_json(scheme: Scheme, out: &TrialOutput) -> Value {
    let r = &out.record;
    json!({
        "scheme": scheme.as_str(),
        "trial": r.trial_index,
        "selected_sector": r.selected_sector,
        "misselected": r.misselected,
        "noise_std": out.noise_std,
        "nmse": r.nmse_numerator / r.nmse_denominator,
        "rate_bits": r.rate_bits,
        "mu": r.mu,
        "d1": out.sector.d1(),
        "d2": out.sector.d2(),
        "g_true": vector_json(&out.g_true_l),
        "g_hat": vector_json(&out.g_hat_l),
        "h": vector_json(&out.h),
        "h_hat": vector_json(&out.h_hat),
    })
}
