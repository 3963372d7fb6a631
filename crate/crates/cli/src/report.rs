use std::fmt::Write as _;
use std::path::PathBuf;

use crate::config::Quantity;
use crate::error::CliError;
use crate::results::{with_uncertainty, Method, Record, Results};

/// Exact residuals beyond this are flagged.
pub const EXACT_TOL: f64 = 1e-10;
/// Sampled residuals beyond this many standard errors are flagged.
pub const SAMPLED_SIGMAS: f64 = 3.0;

#[derive(Debug, Default)]
pub struct Report {
    pub text: String,
    pub rows: Vec<ReportRow>,
    /// Flagged rows plus violations recorded at run time.
    pub flags: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub file: PathBuf,
    pub theta: f64,
    /// `D^2 + V^2 - 1` with `V_P` when measured, else `V_C` or `V`.
    pub residual: Option<f64>,
    pub flags: Vec<&'static str>,
}

#[derive(Clone, Copy)]
struct Cell {
    value: f64,
    std_error: f64,
}

fn cell(records: &[&Record], theta: f64, q: Quantity) -> Option<Cell> {
    records
        .iter()
        .find(|r| r.theta == theta && r.quantity == q)
        .map(|r| Cell {
            value: r.value,
            std_error: r.std_error,
        })
}

fn show(c: Option<Cell>, exact: bool) -> String {
    match c {
        None => "-".into(),
        Some(c) if exact || c.std_error == 0.0 => format!("{:.6}", c.value),
        Some(c) => with_uncertainty(c.value, Some(c.std_error)),
    }
}

/// Tabulates `D`, `V_C`, `V_P` and the duality residual per angle of each
/// results file, flagging rows that break duality or the hierarchy.
pub fn report(files: &[PathBuf]) -> Result<Report, CliError> {
    if files.is_empty() {
        return Err(CliError::Input {
            path: PathBuf::from("-"),
            message: "no results files given".into(),
        });
    }
    let mut loaded = Vec::with_capacity(files.len());
    for path in files {
        let results = Results::load(path)?;
        if !results
            .records
            .iter()
            .any(|r| matches!(r.method, Method::Exact | Method::Sampled))
        {
            return Err(CliError::Input {
                path: path.clone(),
                message: "no measured records".into(),
            });
        }
        loaded.push(results);
    }
    let mut out = Report::default();
    for (path, results) in files.iter().zip(&loaded) {
        section(&mut out, path, results);
    }
    let _ = writeln!(out.text, "{} flagged row(s)", out.flags);
    Ok(out)
}

fn section(out: &mut Report, path: &std::path::Path, results: &Results) {
    let ideal = results.config.noise.is_ideal();
    // Protocol data only: model curves and Monte Carlo oracles are references.
    let records: Vec<&Record> = results
        .records
        .iter()
        .filter(|r| matches!(r.method, Method::Exact | Method::Sampled))
        .collect();
    let exact = records.iter().all(|r| r.method == Method::Exact);
    let mut thetas: Vec<f64> = records.iter().map(|r| r.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();

    let _ = writeln!(
        out.text,
        "{} (N = {}, {}, {})",
        path.display(),
        results.config.paths,
        if exact { "exact" } else { "sampled" },
        if ideal { "ideal" } else { "noisy" }
    );
    let _ = writeln!(
        out.text,
        "{:>10} {:>14} {:>14} {:>14} {:>14}  flags",
        "theta", "D", "V_C or V", "V_P", "D^2+V^2-1"
    );
    for &theta in &thetas {
        let d = cell(&records, theta, Quantity::Distinguishability);
        let v_c = cell(&records, theta, Quantity::CoherenceVisibility).or(cell(
            &records,
            theta,
            Quantity::FringeVisibility,
        ));
        let v_p = cell(&records, theta, Quantity::PurityVisibility);
        let mut flags = Vec::new();
        let tolerance = |se: f64| {
            if exact {
                EXACT_TOL
            } else {
                SAMPLED_SIGMAS * se
            }
        };

        let residual = match (d, v_p.or(v_c)) {
            (Some(d), Some(v)) => {
                let r = d.value * d.value + v.value * v.value - 1.0;
                let se = (2.0 * d.value * d.std_error).hypot(2.0 * v.value * v.std_error);
                // Without V_P or without the ideal model only the bound applies.
                let two_sided = ideal && v_p.is_some();
                let broken = if two_sided {
                    r.abs() > tolerance(se)
                } else {
                    r > tolerance(se)
                };
                if broken {
                    flags.push("duality");
                }
                Some(r)
            }
            _ => None,
        };
        if let (Some(c), Some(p)) = (v_c, v_p) {
            if c.value - p.value > tolerance(c.std_error.hypot(p.std_error)) {
                flags.push("hierarchy");
            }
        }
        out.flags += usize::from(!flags.is_empty());
        out.rows.push(ReportRow {
            file: path.to_path_buf(),
            theta,
            residual,
            flags: flags.clone(),
        });
        let _ = writeln!(
            out.text,
            "{:>10.6} {:>14} {:>14} {:>14} {:>14}  {}",
            theta,
            show(d, exact),
            show(v_c, exact),
            show(v_p, exact),
            residual.map_or("-".into(), |r| format!("{r:.3e}")),
            flags.join(",")
        );
    }
    for v in &results.violations {
        out.flags += 1;
        let _ = writeln!(out.text, "  violation: {v}");
    }
    let _ = writeln!(out.text);
}
