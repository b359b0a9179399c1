use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::run::ExperimentSummary;
use crate::error::Result;

/// `printf("%.{digits}g")`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip(&format!("{x:.decimals$}"))
    }
}

fn sig6(x: f64) -> String {
    format_sig(x, 6)
}

/// One line per algorithm: `algorithm,episodes,mean_final_regret,ci95`.
pub fn emit_csv(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "episodes", "mean_final_regret", "ci95"])?;
    for row in &summary.rows {
        w.write_record([
            row.algorithm.clone(),
            row.episodes.to_string(),
            sig6(row.mean_final_regret),
            sig6(row.ci95),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One line per algorithm and checkpoint: `algorithm,t,mean_regret,ci95`.
pub fn emit_curves(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "t", "mean_regret", "ci95"])?;
    for row in &summary.rows {
        for p in &row.curve {
            w.write_record([
                row.algorithm.clone(),
                p.t.to_string(),
                sig6(p.mean_regret),
                sig6(p.ci95),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub episodes: usize,
    pub mean_final_regret: f64,
    pub ci95: f64,
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Algorithms × columns grid of `mean ± ci95` cells, one column per
/// labelled summary (typically one per switch probability).
pub fn render_table(columns: &[(String, ExperimentSummary)]) -> String {
    let mut algorithms: Vec<String> = Vec::new();
    for (_, s) in columns {
        for r in &s.rows {
            if !algorithms.contains(&r.algorithm) {
                algorithms.push(r.algorithm.clone());
            }
        }
    }
    let header: Vec<String> = std::iter::once("algorithm".to_string())
        .chain(columns.iter().map(|(label, _)| label.clone()))
        .collect();
    let mut rows = vec![header];
    for alg in &algorithms {
        let mut line = vec![alg.clone()];
        for (_, s) in columns {
            line.push(match s.row(alg) {
                Some(r) => format!(
                    "{} ± {}",
                    format_sig(r.mean_final_regret, 6),
                    format_sig(r.ci95, 3)
                ),
                None => "-".into(),
            });
        }
        rows.push(line);
    }
    let ncol = rows[0].len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, w))| {
                let pad = w - cell.chars().count();
                if c == 0 {
                    format!("{cell}{}", " ".repeat(pad))
                } else {
                    format!("{}{cell}", " ".repeat(pad))
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  "));
        if i == 0 {
            let _ = writeln!(
                out,
                "{}",
                "-".repeat(widths.iter().sum::<usize>() + 2 * (ncol - 1))
            );
        }
    }
    if let Some((_, s)) = columns.first() {
        let _ = writeln!(
            out,
            "episodes = {}, A = {}, T = {}, regime = {:?}",
            s.config.episodes,
            s.config.num_arms(),
            s.config.horizon(),
            s.config.regime
        );
    }
    out
}
