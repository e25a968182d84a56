//! Rendering of sweep and ratio reports as CSV or JSON text.
//!
//! Floating-point values are printed with 17 significant digits
//! (`{:.16e}`), which round-trips every finite `f64` bit-exactly; the JSON
//! emitted for a convergence report parses back into an identical
//! [`ConvergenceReport`]. CSV output is strictly the header line plus data
//! rows — configuration lives in the report structure and its JSON form.

use std::io::Write as _;
use std::path::Path;

use crate::bounds::BoundRatioReport;
use crate::convergence::ConvergenceReport;
use crate::error::{Error, Result};

/// Output flavour of the textual reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// Parse `csv` / `json`.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Domain(format!(
                "unknown format `{other}`; expected csv or json"
            ))),
        }
    }
}

/// Column order of the convergence CSV.
pub const CONVERGENCE_CSV_HEADER: &str =
    "n,p,error_lp,error_sup,a_nr,tau_scale,omega_scale,ratio_tau,ratio_omega";

/// Column order of the bound-ratio CSV.
pub const RATIO_CSV_HEADER: &str = "n,lhs,rhs,ratio";

/// 17-significant-digit form that parses back to the same bits.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_g17(v: Option<f64>) -> String {
    v.map(fmt_g17).unwrap_or_default()
}

fn json_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt_g17(x),
        _ => "null".to_string(),
    }
}

fn json_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_f64_array(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| fmt_g17(v)).collect();
    format!("[{}]", inner.join(","))
}

fn json_usize_array(values: &[usize]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", inner.join(","))
}

/// Render a convergence report as CSV: the pinned header plus one row per
/// `(n, p)` pair; empty cells stand for absent ratios.
pub fn render_convergence_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from(CONVERGENCE_CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.n,
            fmt_g17(row.p),
            fmt_g17(row.error_lp),
            fmt_g17(row.error_sup),
            fmt_g17(row.a_nr),
            fmt_g17(row.tau_scale),
            fmt_g17(row.omega_scale),
            opt_g17(row.ratio_tau),
            opt_g17(row.ratio_omega),
        ));
    }
    out
}

/// Render a convergence report as JSON that parses back bit-exactly via
/// [`parse_convergence_json`].
pub fn render_convergence_json(report: &ConvergenceReport) -> String {
    let mut rows = Vec::with_capacity(report.rows.len());
    for row in &report.rows {
        rows.push(format!(
            "{{\"n\":{},\"p\":{},\"error_lp\":{},\"error_sup\":{},\"a_nr\":{},\
             \"tau_scale\":{},\"omega_scale\":{},\"ratio_tau\":{},\"ratio_omega\":{}}}",
            row.n,
            fmt_g17(row.p),
            fmt_g17(row.error_lp),
            fmt_g17(row.error_sup),
            fmt_g17(row.a_nr),
            fmt_g17(row.tau_scale),
            fmt_g17(row.omega_scale),
            json_opt(row.ratio_tau),
            json_opt(row.ratio_omega),
        ));
    }
    format!(
        "{{\"label\":{},\"d\":{},\"r\":{},\"config\":{{\"n_list\":{},\"p_list\":{},\
         \"quad_order\":{},\"cells_per_axis\":{},\"x_points\":{},\"h_points\":{}}},\
         \"rows\":[{}],\"fitted_order\":{}}}",
        json_string(&report.label),
        report.d,
        report.r,
        json_usize_array(&report.config.n_list),
        json_f64_array(&report.config.p_list),
        report.config.quad_order,
        report.config.cells_per_axis,
        report.config.x_points,
        report.config.h_points,
        rows.join(","),
        json_opt(report.fitted_order),
    )
}

/// Parse JSON produced by [`render_convergence_json`].
pub fn parse_convergence_json(text: &str) -> Result<ConvergenceReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        pos: 0,
        msg: format!("convergence report JSON: {e}"),
    })
}

/// Render a bound-ratio report as CSV (pinned header, one row per degree).
pub fn render_ratio_csv(report: &BoundRatioReport) -> String {
    let mut out = String::from(RATIO_CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.n,
            fmt_g17(row.lhs),
            fmt_g17(row.rhs),
            opt_g17(row.ratio),
        ));
    }
    out
}

/// Render a bound-ratio report as JSON.
pub fn render_ratio_json(report: &BoundRatioReport) -> String {
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|row| {
            format!(
                "{{\"n\":{},\"lhs\":{},\"rhs\":{},\"ratio\":{}}}",
                row.n,
                fmt_g17(row.lhs),
                fmt_g17(row.rhs),
                json_opt(row.ratio),
            )
        })
        .collect();
    format!(
        "{{\"theorem\":{},\"label\":{},\"d\":{},\"r\":{},\"p\":{},\"rows\":[{}],\
         \"max_ratio\":{}}}",
        json_string(report.theorem.name()),
        json_string(&report.label),
        report.d,
        report.r,
        fmt_g17(report.p),
        rows.join(","),
        json_opt(report.max_ratio),
    )
}

/// A modulus profile prepared for rendering.
#[derive(Clone, Debug)]
pub struct ProfileReport {
    /// Which modulus: `omega`, `tau`, or `local`.
    pub kind: String,
    pub label: String,
    pub d: usize,
    pub p: f64,
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
}

/// Render a modulus profile as CSV (`delta,value`).
pub fn render_profile_csv(report: &ProfileReport) -> String {
    let mut out = String::from("delta,value\n");
    for (&delta, &value) in report.deltas.iter().zip(&report.values) {
        out.push_str(&format!("{},{}\n", fmt_g17(delta), fmt_g17(value)));
    }
    out
}

/// Render a modulus profile as JSON.
pub fn render_profile_json(report: &ProfileReport) -> String {
    format!(
        "{{\"kind\":{},\"label\":{},\"d\":{},\"p\":{},\"deltas\":{},\"values\":{}}}",
        json_string(&report.kind),
        json_string(&report.label),
        report.d,
        fmt_g17(report.p),
        json_f64_array(&report.deltas),
        json_f64_array(&report.values),
    )
}

/// Write text to a file, or to stdout when no path is given.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{BoundRatioRow, TheoremId};
    use crate::convergence::{ConvergenceRow, SweepEcho};

    fn sample_report() -> ConvergenceReport {
        ConvergenceReport {
            label: "abs(x1 - 0.5)".to_string(),
            d: 1,
            r: 1,
            config: SweepEcho {
                n_list: vec![4, 8],
                p_list: vec![1.0, 2.0],
                quad_order: 8,
                cells_per_axis: 64,
                x_points: 257,
                h_points: 65,
            },
            rows: vec![
                ConvergenceRow {
                    n: 4,
                    p: 1.0,
                    error_lp: 0.012345678901234567,
                    error_sup: 0.1,
                    a_nr: 13.0 / 300.0,
                    tau_scale: 0.2,
                    omega_scale: 1.0 / 3.0,
                    ratio_tau: Some(0.061728394506172835),
                    ratio_omega: Some(0.0370370367037037),
                },
                ConvergenceRow {
                    n: 8,
                    p: 1.0,
                    error_lp: 1e-300,
                    error_sup: 0.0,
                    a_nr: 25.0 / 972.0,
                    tau_scale: 0.0,
                    omega_scale: 0.0,
                    ratio_tau: None,
                    ratio_omega: None,
                },
            ],
            fitted_order: None,
        }
    }

    #[test]
    fn header_is_pinned() {
        assert_eq!(
            CONVERGENCE_CSV_HEADER,
            "n,p,error_lp,error_sup,a_nr,tau_scale,omega_scale,ratio_tau,ratio_omega"
        );
        let csv = render_convergence_csv(&sample_report());
        assert!(csv.starts_with("n,p,error_lp,"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn g17_round_trips_awkward_values() {
        for v in [
            0.1,
            1.0 / 3.0,
            1e-300,
            123456.78901234567,
            -0.4999999999999999,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            let text = fmt_g17(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {text} -> {back}");
        }
    }

    #[test]
    fn absent_ratios_are_empty_csv_cells() {
        let csv = render_convergence_csv(&sample_report());
        let last = csv.lines().last().unwrap();
        assert!(last.ends_with(",,"), "row should end with two empty cells: {last}");
        assert_eq!(last.matches(',').count(), 8);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let report = sample_report();
        let json = render_convergence_json(&report);
        let back = parse_convergence_json(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn json_rejects_garbage() {
        assert!(parse_convergence_json("{\"label\": 3}").is_err());
        assert!(parse_convergence_json("not json").is_err());
    }

    #[test]
    fn ratio_report_rendering() {
        let report = BoundRatioReport {
            theorem: TheoremId::LpNormBound,
            label: "step(x1 - 0.5)".to_string(),
            d: 1,
            r: 2,
            p: 1.0,
            rows: vec![
                BoundRatioRow {
                    n: 5,
                    lhs: 0.5,
                    rhs: 0.6,
                    ratio: Some(0.5 / 0.6),
                },
                BoundRatioRow {
                    n: 9,
                    lhs: 0.0,
                    rhs: 0.0,
                    ratio: None,
                },
            ],
            max_ratio: Some(0.5 / 0.6),
        };
        let csv = render_ratio_csv(&report);
        assert!(csv.starts_with("n,lhs,rhs,ratio\n"));
        assert!(csv.lines().last().unwrap().ends_with(','));
        let json = render_ratio_json(&report);
        assert!(json.contains("\"theorem\":\"lp-norm-bound\""));
        assert!(json.contains("\"ratio\":null"));
    }

    #[test]
    fn profile_rendering() {
        let profile = ProfileReport {
            kind: "tau".to_string(),
            label: "x1".to_string(),
            d: 1,
            p: 1.0,
            deltas: vec![0.1, 0.2],
            values: vec![0.0975, 0.19],
        };
        let csv = render_profile_csv(&profile);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("delta,value\n"));
        let json = render_profile_json(&profile);
        assert!(json.contains("\"kind\":\"tau\""));
    }

    #[test]
    fn labels_are_escaped_in_json() {
        assert_eq!(json_string("a\"b\\c"), "\"a\\\"b\\\\c\"");
        assert_eq!(json_string("line\nbreak"), "\"line\\nbreak\"");
    }

    #[test]
    fn write_text_hits_the_filesystem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_text(Some(&path), "a,b\n1,2\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
    }
}
