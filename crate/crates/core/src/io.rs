//! CSV artifacts. Every file has a header row; floats are written in Rust's
//! shortest round-trip form, so output bytes do not depend on the locale.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::dashboard::ReportBundle;
use crate::error::Result;
use crate::fundamental::FundamentalSolution;
use crate::mild::Trajectory;
use crate::report::FitReport;
use crate::stochastic::PathEnsemble;

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(
        path,
    )?)))
}

#[derive(Serialize)]
struct FundamentalRow {
    mode_index: usize,
    lambda: f64,
    t: f64,
    g: f64,
}

/// `fundamental.csv`: one row per (mode, node), modes 1-based.
pub fn write_fundamental(path: &Path, fs: &FundamentalSolution) -> Result<()> {
    let mut w = writer(path)?;
    let nodes = fs.grid.nodes();
    for (k, mode) in fs.modes.iter().enumerate() {
        for (&t, &g) in nodes.iter().zip(&mode.values) {
            w.serialize(FundamentalRow {
                mode_index: k + 1,
                lambda: mode.lambda,
                t,
                g,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct FitRow<'a> {
    estimate_name: &'a str,
    n: Option<usize>,
    gamma: Option<f64>,
    beta: Option<f64>,
    constant: f64,
    argmax_s: Option<f64>,
    argmax_t: Option<f64>,
    refine_ratio: Option<f64>,
    diverged: bool,
    kappa: Option<f64>,
    truncation_ratio: Option<f64>,
    outside_proven_range: bool,
}

/// `fits.csv`: one row per fitted constant.
pub fn write_fits<'a>(path: &Path, reports: impl IntoIterator<Item = &'a FitReport>) -> Result<()> {
    let mut w = writer(path)?;
    for r in reports {
        w.serialize(FitRow {
            estimate_name: r.estimate.name(),
            n: r.params.n,
            gamma: r.params.gamma,
            beta: r.params.beta,
            constant: r.value,
            argmax_s: r.argmax.map(|a| a.0),
            argmax_t: r.argmax.map(|a| a.1),
            refine_ratio: r.refine_ratio,
            diverged: r.diverged,
            kappa: r.params.kappa,
            truncation_ratio: r.truncation_ratio,
            outside_proven_range: r.outside_proven_range,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// `trajectory.csv`: `t, h_norm, gamma_norm` and, with `dump_modes`, one
/// column `y_k` per mode.
pub fn write_trajectory(
    path: &Path,
    traj: &Trajectory,
    gamma: f64,
    dump_modes: bool,
) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["t".to_string(), "h_norm".into(), "gamma_norm".into()];
    if dump_modes {
        header.extend((1..=traj.modes()).map(|k| format!("y_{k}")));
    }
    w.write_record(&header)?;
    for i in 0..traj.grid.len() {
        let mut row = vec![traj.grid.node(i), traj.h_norm(i), traj.gamma_norm(gamma, i)];
        if dump_modes {
            row.extend(traj.values.iter().map(|y| y[i]));
        }
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `moments.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub s: f64,
    pub t: f64,
    pub gamma: f64,
    pub quadrature_value: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub paths: usize,
}

pub fn write_moments(path: &Path, rows: &[MomentRow]) -> Result<()> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PathRow {
    t: f64,
    path_id: usize,
    h_norm: f64,
    gamma_norm: f64,
}

/// `paths.csv`: per-path norms at every node, grouped by path.
pub fn write_paths(path: &Path, ensemble: &PathEnsemble<'_>, gamma: f64) -> Result<()> {
    let nodes = ensemble.grid().nodes();
    let norms = ensemble.map(|_, p| {
        (0..nodes.len())
            .map(|i| (p.h_norm(i), p.gamma_norm(gamma, i)))
            .collect::<Vec<_>>()
    });
    let mut w = writer(path)?;
    for (path_id, rows) in norms.iter().enumerate() {
        for (&t, &(h_norm, gamma_norm)) in nodes.iter().zip(rows) {
            w.serialize(PathRow {
                t,
                path_id,
                h_norm,
                gamma_norm,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ReportRow<'a> {
    estimate_name: &'a str,
    n: Option<usize>,
    gamma: Option<f64>,
    beta: Option<f64>,
    kappa: Option<f64>,
    value: f64,
    interval_lo: Option<f64>,
    interval_hi: Option<f64>,
    refine_ratio: Option<f64>,
    truncation_ratio: Option<f64>,
    diverged: bool,
    degenerate: bool,
    outside_proven_range: bool,
    passed: bool,
    check: &'a str,
}

/// `report.csv`: one row per dashboard cell.
pub fn write_report(path: &Path, bundle: &ReportBundle) -> Result<()> {
    let mut w = writer(path)?;
    for c in &bundle.cells {
        let r = &c.report;
        w.serialize(ReportRow {
            estimate_name: r.estimate.name(),
            n: r.params.n,
            gamma: r.params.gamma,
            beta: r.params.beta,
            kappa: r.params.kappa,
            value: r.value,
            interval_lo: r.interval.map(|i| i.0),
            interval_hi: r.interval.map(|i| i.1),
            refine_ratio: r.refine_ratio,
            truncation_ratio: r.truncation_ratio,
            diverged: r.diverged,
            degenerate: r.degenerate,
            outside_proven_range: r.outside_proven_range,
            passed: c.passed,
            check: &c.check,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, bundle: &ReportBundle) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(bundle.summary().as_bytes())?;
    f.flush()?;
    Ok(())
}
