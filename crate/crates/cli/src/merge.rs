//! Merging gap reports into plot tables: one CSV and one whitespace-separated
//! `.dat` file with a `delta` column followed by `data_distance`/`gap` pairs
//! per report (blank / `NaN` where a report has no row for that δ).

use anyhow::{bail, Context, Result};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use wavemap_core::experiment::GapReport;

pub struct Merged {
    pub labels: Vec<String>,
    /// δ in decreasing order.
    pub deltas: Vec<f64>,
    /// `[report][delta] -> (data_distance, gap)`.
    pub cells: Vec<Vec<Option<(f64, f64)>>>,
}

pub fn load_reports(paths: &[PathBuf]) -> Result<Vec<(String, GapReport)>> {
    if paths.is_empty() {
        bail!("report: no input reports given");
    }
    let mut out = Vec::new();
    for p in paths {
        if !p.exists() {
            bail!("input file not found: {}", p.display());
        }
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let r: GapReport = serde_json::from_str(&text).with_context(|| format!("schema mismatch in report {}", p.display()))?;
        let mut label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if out.iter().any(|(l, _): &(String, GapReport)| *l == label) {
            label = format!("{label}_{}", out.len());
        }
        out.push((label, r));
    }
    Ok(out)
}

pub fn merge(reports: &[(String, GapReport)]) -> Merged {
    let keys: BTreeSet<u64> = reports.iter().flat_map(|(_, r)| r.rows.iter().map(|row| row.delta.to_bits())).collect();
    let mut deltas: Vec<f64> = keys.into_iter().map(f64::from_bits).collect();
    deltas.sort_by(|a, b| b.total_cmp(a));
    let cells = reports
        .iter()
        .map(|(_, r)| {
            deltas
                .iter()
                .map(|d| r.rows.iter().find(|row| row.delta == *d).map(|row| (row.data_distance, row.gap)))
                .collect()
        })
        .collect();
    Merged { labels: reports.iter().map(|(l, _)| l.clone()).collect(), deltas, cells }
}

fn header(m: &Merged) -> Vec<String> {
    let mut h = vec!["delta".to_string()];
    for l in &m.labels {
        h.push(format!("{l}.data_distance"));
        h.push(format!("{l}.gap"));
    }
    h
}

pub fn write_csv(m: &Merged, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header(m))?;
    for (k, d) in m.deltas.iter().enumerate() {
        let mut rec = vec![format!("{d:e}")];
        for col in &m.cells {
            match col[k] {
                Some((dd, gap)) => {
                    rec.push(format!("{dd:.17e}"));
                    rec.push(format!("{gap:.17e}"));
                }
                None => rec.extend([String::new(), String::new()]),
            }
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dat(m: &Merged, path: &Path) -> Result<()> {
    let mut s = format!("# {}\n", header(m).join(" "));
    for (k, d) in m.deltas.iter().enumerate() {
        s.push_str(&format!("{d:e}"));
        for col in &m.cells {
            match col[k] {
                Some((dd, gap)) => s.push_str(&format!(" {dd:.17e} {gap:.17e}")),
                None => s.push_str(" NaN NaN"),
            }
        }
        s.push('\n');
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
