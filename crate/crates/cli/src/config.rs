//! Sweep configuration files: TOML (flat `key = value` lines plus `[target]`
//! and `[grid]` sections). Grammar:
//!
//! ```text
//! kind             = "gap" | "certificate"      (default "gap")
//! n                = 2
//! deltas           = [0.3, 0.1, 0.03, 0.01]      (strictly decreasing)
//! lambda           = <real > 0>
//! mu               = <real ≥ 0>                  (certificate: optional, default c0/2)
//! r0               = <real > 0>
//! seed             = <integer>                   (default 0)
//! negative_control = true | false                (default false)
//!
//! [target]
//! name = "sphere_great_circle" | "flat_line" | "circle_radius"
//! rho  = <real>                                  (circle_radius only)
//!
//! [grid]
//! dim = 2
//! l   = <half width>
//! n   = <points per axis>
//! ```
//!
//! Unknown keys are rejected.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use wavemap_core::experiment::GapRunConfig;
use wavemap_core::field::TorusGrid;
use wavemap_core::geometry::{geodesic_constants, make_preset, TargetPreset};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    #[default]
    Gap,
    Certificate,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    #[serde(default)]
    kind: SweepKind,
    n: usize,
    deltas: Vec<f64>,
    lambda: f64,
    mu: Option<f64>,
    r0: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    negative_control: bool,
    target: TargetPreset,
    grid: GridSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    dim: usize,
    l: f64,
    n: usize,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub run: GapRunConfig,
}

pub fn parse_sweep(text: &str) -> Result<SweepConfig> {
    let f: SweepFile = toml::from_str(text).map_err(|e| anyhow!("{}", e.message()))?;
    let grid = TorusGrid::new(f.grid.dim, f.grid.l, f.grid.n)?;
    let mu = match (f.mu, f.kind) {
        (Some(mu), _) => mu,
        (None, SweepKind::Certificate) => 0.5 * geodesic_constants(&make_preset(f.target)?)?.0,
        (None, SweepKind::Gap) => bail!("missing key `mu`"),
    };
    Ok(SweepConfig {
        kind: f.kind,
        run: GapRunConfig {
            n: f.n,
            target: f.target,
            deltas: f.deltas,
            lambda: f.lambda,
            mu,
            r0: f.r0,
            grid,
            seed: f.seed,
            negative_control: f.negative_control,
        },
    })
}

pub fn load_sweep(path: &Path) -> Result<SweepConfig> {
    if !path.exists() {
        bail!("input file not found: {}", path.display());
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_sweep(&text).with_context(|| format!("malformed config {}", path.display()))
}
