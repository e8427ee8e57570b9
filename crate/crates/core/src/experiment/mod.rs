//! Experiment drivers: the norm-inflation gap sweep, the radial lower-bound
//! certificate, the product/commutator ratio suite and the scaling suite.
//! Each produces a serializable report with a pass/fail verdict.

pub mod appendix;
pub mod gap;
pub mod scaling;

pub use appendix::{appendix_ratio_suite, AppendixConfig, AppendixReport};
pub use gap::{
    prop1_radial_run, prop1_radial_run_opts, theorem1_gap_run, theorem1_gap_run_opts, GapReport, GapRow, GapRunConfig, RunKind, Verdict,
};
pub use scaling::{scaling_suite, ScalingReport};

use crate::error::{LabError, Result};

/// Execution options for the drivers.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker count (`None`: one per core).
    pub jobs: Option<usize>,
    /// Directory for cached strip maxima.
    pub cache_dir: Option<std::path::PathBuf>,
}

/// Run `f` on a pool of `jobs` workers (`None`: rayon's default, one per core).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(LabError::Param("--jobs must be at least 1".into()));
        }
        b = b.num_threads(j);
    }
    let pool = b.build().map_err(|e| LabError::Param(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Least-squares slope and intercept of `y` against `x`, with the largest residual.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).abs()).fold(0.0, f64::max);
    (slope, icpt, res)
}

/// `|b − a| / max(|a|, |b|)`.
pub fn rel_drift(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (b - a).abs() / m
    }
}
