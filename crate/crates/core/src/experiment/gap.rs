//! Gap sweeps. For each δ the pipeline builds the normalized datum `φ̃`
//! (maximum 1 on the strip, attained at `(t_j, 0)`), the half-level radius
//! `r* = 2/R`, and the backward wave `v` with `v(t_j) = 0`,
//! `∂_t v(t_j) = λR·χ(R·)`; then `w = v + μz̃` and, at `t = t_j`,
//!
//! `∂_t(γ∘v) − ∂_t(γ∘w) = (γ′(0) − γ′(w))·v_t − γ′(w)·μ z̃_t`.
//!
//! Everything is radial, so the gap is a radial integral: on the disk
//! `|x| < r*` (support of `v_t`) by Gauss–Legendre panels, and outside it
//! `|γ′| = 1` reduces the integrand to `μ² z̃_t²`.

use super::{with_jobs, RunOptions};
use crate::construct::{bump, choose_r, choose_r_with, chi_mean_zero, corollary1_normalize_cached, lemma1_datum, rescaled_family, ChiReference};
use crate::error::{LabError, Result};
use crate::field::{RadialProfile, TorusGrid};
use crate::geometry::{make_preset, GeodesicCurve, TargetPreset};
use crate::quad::gauss_legendre;
use crate::wave::radial2d;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRunConfig {
    pub n: usize,
    pub target: TargetPreset,
    pub deltas: Vec<f64>,
    /// `M_j = λ R_j`.
    pub lambda: f64,
    pub mu: f64,
    /// Radius of the data neighbourhood.
    pub r0: f64,
    /// Grid on which the data constants of the rescaled waves are measured.
    pub grid: TorusGrid,
    pub seed: u64,
    /// Accept a flat target and skip the `μ < c₀/2` bound.
    #[serde(default)]
    pub negative_control: bool,
}

impl GapRunConfig {
    fn check(&self) -> Result<()> {
        if self.n != 2 {
            return Err(LabError::Param(format!("gap runs use the radial engine in n = 2, got n = {}", self.n)));
        }
        if self.deltas.is_empty() || self.deltas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(LabError::Param(format!("δ list {:?} must be nonempty and strictly decreasing", self.deltas)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(LabError::Param(format!("λ = {} must be positive", self.lambda)));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(LabError::Param(format!("μ = {} must be nonnegative", self.mu)));
        }
        if !(self.r0 > 0.0) {
            return Err(LabError::Param(format!("r0 = {} must be positive", self.r0)));
        }
        if self.grid.dim != 2 {
            return Err(LabError::Grid(format!("measurement grid must be 2D, got dim {}", self.grid.dim)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTerms {
    /// `c₁ μ ‖z̃ v_t‖`
    pub main: f64,
    /// `‖(γ′(0) − γ′(w) + γ″(0)w) v_t‖`
    pub commutator: f64,
    /// `μ ‖∂_t z̃‖`
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub delta: f64,
    pub data_distance: f64,
    pub gap: f64,
    pub t_j: f64,
    /// `1 − t_j²`
    pub eps_j: f64,
    pub r_star: f64,
    #[serde(rename = "R_j")]
    pub r_j: f64,
    #[serde(rename = "M_j")]
    pub m_j: f64,
    /// Strip maximum `m_j` of `|z_j|` (normalized so `z_j(1, 0) = 1`); absent for certificate rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_strip: Option<f64>,
    pub terms: GapTerms,
    /// `gap² + (c₀²/4)‖φ_j‖²` (radial certificate runs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Self::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConstants {
    pub c0: f64,
    pub c1: f64,
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    /// Measured `c_n` in `‖v₀‖_{H^{n/2}} + ‖v₁‖_{H^{n/2−1}} ≤ c_n κ M/R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_data: Option<f64>,
    /// Measured `C′` in `sup |v| ≤ C′ M/R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_linf: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Gap,
    NegativeControl,
    RadialCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub kind: RunKind,
    pub config_echo: GapRunConfig,
    pub rows: Vec<GapRow>,
    pub verdict: Verdict,
    pub constants: ReportConstants,
}

impl GapReport {
    /// The verdict recomputed from the stored numbers alone.
    pub fn recompute_verdict(&self) -> Verdict {
        Verdict::from_bool(match self.kind {
            RunKind::Gap => gap_verdict(&self.rows),
            RunKind::NegativeControl => control_verdict(&self.rows),
            RunKind::RadialCertificate => self.constants.c3.is_some_and(|c3| certificate_verdict(&self.rows, c3)),
        })
    }
}

/// Data distance strictly decreasing with `final/initial ≤ 0.1`, and
/// `min gap ≥ gap₁/2 > 0`.
pub fn gap_verdict(rows: &[GapRow]) -> bool {
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return false;
    };
    let decreasing = rows.windows(2).all(|w| w[1].data_distance < w[0].data_distance);
    let shrinks = last.data_distance <= 0.1 * first.data_distance;
    let min_gap = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    decreasing && shrinks && first.gap > 0.0 && min_gap >= 0.5 * first.gap
}

/// The gap never exceeds the data distance by more than 1%.
pub fn control_verdict(rows: &[GapRow]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.gap <= 1.01 * r.data_distance)
}

/// `gap² + (c₀²/4)‖φ_j‖² ≥ 0.95 c₃` for every row.
pub fn certificate_verdict(rows: &[GapRow], c3: f64) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.certificate.is_some_and(|c| c >= 0.95 * c3))
}

/// Data constants of `v_{R,M,T}` measured on `grid` over `R ∈ {1, 2, 4, 8}`, `T = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredConstants {
    pub c_data: f64,
    pub c_linf: f64,
}

pub fn measure_rescaled_constants(chi: &ChiReference, grid: TorusGrid) -> Result<MeasuredConstants> {
    let times: Vec<f64> = (0..=32).map(|k| k as f64 / 32.0).collect();
    let mut c_data = 0.0f64;
    let mut c_linf = 0.0f64;
    for r in [1.0, 2.0, 4.0, 8.0] {
        let v = rescaled_family(chi, r, r, 1.0, grid)?;
        c_data = c_data.max(v.init_norm / chi.kappa);
        c_linf = c_linf.max(v.linf_over(&times));
    }
    Ok(MeasuredConstants { c_data, c_linf })
}

/// Number of Gauss–Legendre nodes per disk panel.
const DISK_GL: usize = 10;

/// Gap and decomposition terms at `t = √(1−ε)` for radial `v_t = Mχ(R·)`
/// and `w = μ z̃`.
fn radial_gap(g: &GeodesicCurve, chi_b: f64, phi: &RadialProfile, eps: f64, r_star: f64, big_r: f64, m: f64, mu: f64) -> Result<(f64, GapTerms)> {
    let rule = gauss_legendre(DISK_GL);
    let mut edges = vec![0.0, r_star, 0.5 * r_star];
    let mut x = 1e-7 * r_star;
    while x < r_star {
        edges.push(x);
        x *= std::f64::consts::SQRT_2;
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * r_star);
    let (d1_0, d2_0) = (g.d1(0.0), g.d2(0.0));
    let (mut gap2, mut main2, mut comm2, mut zt2) = (0.0, 0.0, 0.0, 0.0);
    for e in edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let half = 0.5 * (b - a);
        for (xi, wi) in rule.0.iter().zip(&rule.1) {
            let r = a + half * (xi + 1.0);
            let wt = wi * half * 2.0 * PI * r;
            let z = radial2d::z(phi, eps, r)?;
            let zt = radial2d::dz_dt(phi, eps, r)?;
            let vt = m * (bump(big_r * r) - chi_b * bump(0.5 * big_r * r));
            let w = mu * z;
            let d1_w = g.d1(w);
            let (mut dg, mut dc) = (0.0, 0.0);
            for c in 0..3 {
                let diff = d1_0[c] * vt - d1_w[c] * (vt + mu * zt);
                let rem = (d1_0[c] - d1_w[c] + d2_0[c] * w) * vt;
                dg += diff * diff;
                dc += rem * rem;
            }
            gap2 += wt * dg;
            comm2 += wt * dc;
            main2 += wt * (z * vt) * (z * vt);
            zt2 += wt * zt * zt;
        }
    }
    let outer = radial2d::dt_sq_integral(phi, eps, r_star, f64::INFINITY)?;
    let gap = (gap2 + mu * mu * outer).sqrt();
    let terms = GapTerms { main: g.c1 * mu * main2.sqrt(), commutator: comm2.sqrt(), energy: mu * (zt2 + outer).sqrt() };
    Ok((gap, terms))
}

fn gap_row(g: &GeodesicCurve, chi: &ChiReference, delta: f64, lambda: f64, mu: f64, cache: Option<&Path>) -> Result<GapRow> {
    let datum = lemma1_datum(2, delta)?;
    let nz = corollary1_normalize_cached(&datum, cache)?;
    if mu * nz.strip_max >= g.s0 {
        return Err(LabError::Range { max_abs: mu * nz.strip_max, s0: g.s0 });
    }
    let cr = choose_r(&nz)?;
    let m = lambda * cr.r_big;
    let (gap, terms) = radial_gap(g, chi.b, &nz.phi, nz.eps_j, cr.r_star, cr.r_big, m, mu)?;
    Ok(GapRow {
        delta,
        data_distance: mu * nz.phi.l2_norm(2),
        gap,
        t_j: nz.t_j,
        eps_j: nz.eps_j,
        r_star: cr.r_star,
        r_j: cr.r_big,
        m_j: m,
        m_strip: Some(nz.m_j),
        terms,
        certificate: None,
    })
}

fn admissibility(cfg: &GapRunConfig, g: &GeodesicCurve, chi: &ChiReference, mc: &MeasuredConstants, lambda: f64) -> Result<()> {
    let size = 4.0 * mc.c_data * chi.kappa * lambda;
    if !(size < cfg.r0) {
        return Err(LabError::Admissibility(format!(
            "data size: 4·c_n·κ·λ = {size} (c_n = {}, κ = {}, λ = {lambda}) is not below r0 = {}",
            mc.c_data, chi.kappa, cfg.r0
        )));
    }
    if g.s0.is_finite() && !(mc.c_linf * lambda < 0.5 * g.c0) {
        return Err(LabError::Admissibility(format!(
            "range: C′·λ = {} is not below c0/2 = {}",
            mc.c_linf * lambda,
            0.5 * g.c0
        )));
    }
    Ok(())
}

/// Gap sweep over the δ list at `T = t_j` (rows computed in parallel).
pub fn theorem1_gap_run(cfg: &GapRunConfig) -> Result<GapReport> {
    gap_run_inner(cfg, None)
}

fn gap_run_inner(cfg: &GapRunConfig, cache: Option<&Path>) -> Result<GapReport> {
    cfg.check()?;
    let g = make_preset(cfg.target)?;
    if g.is_flat() && !cfg.negative_control {
        return Err(LabError::FlatTarget);
    }
    if !cfg.negative_control && !(cfg.mu < 0.5 * g.c0) {
        return Err(LabError::Admissibility(format!("μ = {} is not below c0/2 = {}", cfg.mu, 0.5 * g.c0)));
    }
    let chi = chi_mean_zero(2)?;
    let mc = measure_rescaled_constants(&chi, cfg.grid)?;
    admissibility(cfg, &g, &chi, &mc, cfg.lambda)?;
    let rows = cfg.deltas.par_iter().map(|&d| gap_row(&g, &chi, d, cfg.lambda, cfg.mu, cache)).collect::<Result<Vec<_>>>()?;
    let (kind, ok) = if cfg.negative_control {
        (RunKind::NegativeControl, control_verdict(&rows))
    } else {
        (RunKind::Gap, gap_verdict(&rows))
    };
    Ok(GapReport {
        kind,
        config_echo: cfg.clone(),
        rows,
        verdict: Verdict::from_bool(ok),
        constants: ReportConstants {
            c0: g.c0,
            c1: g.c1,
            kappa: chi.kappa,
            c3: None,
            lambda0: None,
            c_data: Some(mc.c_data),
            c_linf: Some(mc.c_linf),
        },
    })
}

/// Radii sampled when checking `1/2 < z_j(1, x) < 2` on `|x| ≤ 2/R_j`.
const WINDOW_SAMPLES: usize = 64;

fn certificate_row(g: &GeodesicCurve, chi: &ChiReference, delta: f64, lambda0: f64, mu: f64) -> Result<GapRow> {
    let datum = lemma1_datum(2, delta)?;
    let phi = &datum.phi;
    let zf = |r: f64| radial2d::z(phi, 0.0, r);
    let cr = choose_r_with(zf, 0.0)?;
    for i in 0..=WINDOW_SAMPLES {
        let r = cr.r_star * i as f64 / WINDOW_SAMPLES as f64;
        let v = zf(r)?;
        if !(v >= 0.5 * (1.0 - 1e-9) && v < 2.0) {
            return Err(LabError::Resolution(format!("window 1/2 < z(1, x) < 2 fails at |x| = {r} (z = {v}) for δ = {delta}")));
        }
    }
    let m = lambda0 * cr.r_big;
    let (gap, terms) = radial_gap(g, chi.b, phi, 0.0, cr.r_star, cr.r_big, m, mu)?;
    let dd = mu * phi.l2_norm(2);
    Ok(GapRow {
        delta,
        data_distance: dd,
        gap,
        t_j: 1.0,
        eps_j: 0.0,
        r_star: cr.r_star,
        r_j: cr.r_big,
        m_j: m,
        m_strip: None,
        terms,
        // μ = c₀/2, so the data distance squared is (c₀²/4)‖φ_j‖²
        certificate: Some(gap * gap + dd * dd),
    })
}

/// Radial lower-bound certificate at `T = t = 1` with `μ = c₀/2` and
/// `M_j/R_j = λ₀ = r₀/(8‖χ‖_{L²})`: checks
/// `‖∂_t(u¹ − u²)(1)‖² + (c₀²/4)‖φ_j‖² ≥ 0.95·c₃`, `c₃ = (c₀c₁λ₀‖χ‖_{L²})²/16`.
pub fn prop1_radial_run(cfg: &GapRunConfig) -> Result<GapReport> {
    cfg.check()?;
    let g = make_preset(cfg.target)?;
    if g.is_flat() {
        return Err(LabError::FlatTarget);
    }
    if g.s0.is_finite() {
        return Err(LabError::Param("the certificate needs a globally defined geodesic".into()));
    }
    let mu = 0.5 * g.c0;
    if (cfg.mu - mu).abs() > 1e-9 * mu {
        return Err(LabError::Param(format!("μ is pinned to c0/2 = {mu}, got {}", cfg.mu)));
    }
    let chi = chi_mean_zero(2)?;
    let lambda0 = cfg.r0 / (8.0 * chi.l2);
    let c3 = (g.c0 * g.c1 * lambda0 * chi.l2).powi(2) / 16.0;
    let rows = cfg.deltas.par_iter().map(|&d| certificate_row(&g, &chi, d, lambda0, mu)).collect::<Result<Vec<_>>>()?;
    let ok = certificate_verdict(&rows, c3);
    Ok(GapReport {
        kind: RunKind::RadialCertificate,
        config_echo: cfg.clone(),
        rows,
        verdict: Verdict::from_bool(ok),
        constants: ReportConstants { c0: g.c0, c1: g.c1, kappa: chi.kappa, c3: Some(c3), lambda0: Some(lambda0), c_data: None, c_linf: None },
    })
}

/// [`theorem1_gap_run`] on a dedicated pool, with the optional strip cache.
pub fn theorem1_gap_run_opts(cfg: &GapRunConfig, opts: &RunOptions) -> Result<GapReport> {
    with_jobs(opts.jobs, || gap_run_inner(cfg, opts.cache_dir.as_deref()))?
}

/// [`prop1_radial_run`] on a dedicated pool.
pub fn prop1_radial_run_opts(cfg: &GapRunConfig, opts: &RunOptions) -> Result<GapReport> {
    with_jobs(opts.jobs, || prop1_radial_run(cfg))?
}
