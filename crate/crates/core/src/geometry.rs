//! Target geodesics `γ` with `γ(0) = 0`, the composition `u = γ∘v`, the
//! non-flatness constants `(c₀, c₁, j)` and wave-map residuals.

use crate::error::{LabError, Result};
use crate::field::{ScalarField, VectorField};
use crate::norms::sobolev_norm;
use crate::spectral::{derivative, Transform};
use crate::wave::{spectral_propagate, WaveState};
use serde::{Deserialize, Serialize};

/// Preset targets. `flat_line` is a negative control violating `γ″(0) ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum TargetPreset {
    SphereGreatCircle,
    FlatLine,
    CircleRadius { rho: f64 },
}

impl TargetPreset {
    pub fn label(&self) -> String {
        match self {
            Self::SphereGreatCircle => "sphere_great_circle".into(),
            Self::FlatLine => "flat_line".into(),
            Self::CircleRadius { rho } => format!("circle_radius({rho})"),
        }
    }
}

/// Arc-length geodesic through the origin of the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCurve {
    pub preset: TargetPreset,
    pub ambient_dim: usize,
    /// Half-width of the parameter domain (`∞` for global curves).
    pub s0: f64,
    pub arc_length: bool,
    /// Radius and lower bound of `|γ″_j(s)| ≥ c₁` on `|s| ≤ c₀`; zero for the flat line.
    pub c0: f64,
    pub c1: f64,
    /// 1-based component index `j`.
    pub comp_index: usize,
}

impl GeodesicCurve {
    pub fn gamma(&self, s: f64) -> [f64; 3] {
        match self.preset {
            TargetPreset::SphereGreatCircle => {
                let h = (0.5 * s).sin();
                [s.sin(), 2.0 * h * h, 0.0]
            }
            TargetPreset::FlatLine => [s, 0.0, 0.0],
            TargetPreset::CircleRadius { rho } => {
                // 1 − cos written as 2 sin² to keep small arguments exact
                let h = (0.5 * s / rho).sin();
                [rho * (s / rho).sin(), 2.0 * rho * h * h, 0.0]
            }
        }
    }

    pub fn d1(&self, s: f64) -> [f64; 3] {
        match self.preset {
            TargetPreset::SphereGreatCircle => [s.cos(), s.sin(), 0.0],
            TargetPreset::FlatLine => [1.0, 0.0, 0.0],
            TargetPreset::CircleRadius { rho } => [(s / rho).cos(), (s / rho).sin(), 0.0],
        }
    }

    pub fn d2(&self, s: f64) -> [f64; 3] {
        match self.preset {
            TargetPreset::SphereGreatCircle => [-s.sin(), s.cos(), 0.0],
            TargetPreset::FlatLine => [0.0; 3],
            TargetPreset::CircleRadius { rho } => [-(s / rho).sin() / rho, (s / rho).cos() / rho, 0.0],
        }
    }

    /// Whether the curve is a straight line (violates non-flatness).
    pub fn is_flat(&self) -> bool {
        self.preset == TargetPreset::FlatLine
    }

    /// Centre and squared radius of the osculating sphere/circle carrying the curve.
    fn normal_center(&self) -> Option<([f64; 3], f64)> {
        match self.preset {
            TargetPreset::SphereGreatCircle => Some(([0.0, 1.0, 0.0], 1.0)),
            TargetPreset::CircleRadius { rho } => Some(([0.0, rho, 0.0], rho * rho)),
            TargetPreset::FlatLine => None,
        }
    }
}

pub fn make_preset(preset: TargetPreset) -> Result<GeodesicCurve> {
    let ambient_dim = match preset {
        TargetPreset::SphereGreatCircle => 3,
        TargetPreset::FlatLine => 2,
        TargetPreset::CircleRadius { rho } => {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(LabError::Param(format!("circle radius ρ = {rho} must be positive")));
            }
            2
        }
    };
    let mut g = GeodesicCurve { preset, ambient_dim, s0: f64::INFINITY, arc_length: true, c0: 0.0, c1: 0.0, comp_index: 1 };
    if !g.is_flat() {
        let (c0, c1, j) = geodesic_constants(&g)?;
        g.c0 = c0;
        g.c1 = c1;
        g.comp_index = j;
    }
    Ok(g)
}

/// `(c₀, c₁, j)`: `j = argmax |γ″_j(0)|`, `c₁ = |γ″_j(0)|/2`, `c₀` the largest
/// half-width with `min_{|s|≤c₀} |γ″_j(s)| ≥ c₁` (dense scan, then bisection).
pub fn geodesic_constants(g: &GeodesicCurve) -> Result<(f64, f64, usize)> {
    let dd = g.d2(0.0);
    let j = (0..g.ambient_dim).max_by(|&a, &b| dd[a].abs().total_cmp(&dd[b].abs())).unwrap_or(0);
    if dd[j].abs() == 0.0 {
        return Err(LabError::FlatTarget);
    }
    let c1 = 0.5 * dd[j].abs();
    let ok = |s: f64| g.d2(s)[j].abs() >= c1 && g.d2(-s)[j].abs() >= c1;
    let cap = g.s0.min(1e3);
    let ds = 1e-4 * (1.0 / dd[j].abs()).max(1.0);
    let mut lo = 0.0;
    let mut hi = None;
    let mut s = ds;
    while s <= cap {
        if !ok(s) {
            hi = Some(s);
            break;
        }
        lo = s;
        s += ds;
    }
    let c0 = match hi {
        None => cap,
        Some(mut hi) => {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    Ok((c0, c1, j + 1))
}

fn check_range(g: &GeodesicCurve, v: &ScalarField) -> Result<()> {
    let m = v.max_abs();
    if m >= g.s0 {
        return Err(LabError::Range { max_abs: m, s0: g.s0 });
    }
    Ok(())
}

/// `u = γ∘v`, componentwise.
pub fn compose(g: &GeodesicCurve, v: &ScalarField) -> Result<VectorField> {
    check_range(g, v)?;
    let comps = (0..g.ambient_dim).map(|c| v.values.iter().map(|&s| g.gamma(s)[c]).collect()).collect();
    VectorField::new(v.grid, comps)
}

/// `∂_t(γ∘v) = γ′(v)·v_t`.
pub fn compose_dt(g: &GeodesicCurve, state: &WaveState) -> Result<VectorField> {
    check_range(g, &state.u)?;
    let comps = (0..g.ambient_dim)
        .map(|c| state.u.values.iter().zip(&state.ut.values).map(|(&s, &vt)| g.d1(s)[c] * vt).collect())
        .collect();
    VectorField::new(state.u.grid, comps)
}

/// Wave-map residual of `u = γ∘v` at one time step `τ` and at `τ/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub target: String,
    pub tau: f64,
    pub residual: f64,
    pub tau_half_residual: f64,
}

fn residual_at(g: &GeodesicCurve, state: &WaveState, tau: f64) -> Result<f64> {
    let t = state.t;
    let grid = state.u.grid;
    let minus = compose(g, &spectral_propagate(state, t - tau).u)?;
    let mid = compose(g, &state.u)?;
    let plus = compose(g, &spectral_propagate(state, t + tau).u)?;
    let tr = Transform::new(grid);
    let m = g.ambient_dim;
    let len = grid.len();
    let mut box_u = vec![vec![0.0; len]; m];
    let mut ut2 = vec![0.0; len];
    let mut grad2 = vec![0.0; len];
    for c in 0..m {
        let uc = mid.component(c);
        for i in 0..len {
            let (a, b, d) = (minus.components[c][i], uc.values[i], plus.components[c][i]);
            let utt = (d - 2.0 * b + a) / (tau * tau);
            let ut = (d - a) / (2.0 * tau);
            box_u[c][i] = utt;
            ut2[i] += ut * ut;
        }
        for axis in 0..grid.dim {
            let d1 = derivative(&tr, &uc, axis);
            let d2 = derivative(&tr, &d1, axis);
            for i in 0..len {
                box_u[c][i] -= d2.values[i];
                grad2[i] += d1.values[i] * d1.values[i];
            }
        }
    }
    let mut worst = 0.0f64;
    for i in 0..len {
        let mut r2 = 0.0;
        for c in 0..m {
            let normal = match g.normal_center() {
                Some((center, rad2)) => (ut2[i] - grad2[i]) * (mid.components[c][i] - center[c]) / rad2,
                None => 0.0,
            };
            let r = box_u[c][i] + normal;
            r2 += r * r;
        }
        worst = worst.max(r2.sqrt());
    }
    Ok(worst)
}

/// Max-norm of `□u + (|u_t|² − |∇u|²)(u − c)/ρ²` (zero normal term for the
/// line) with `u = γ∘v`, `□v = 0` enforced by spectral propagation, time
/// derivatives by a centred stencil of width `τ`.
pub fn wavemap_residual(g: &GeodesicCurve, v_state: &WaveState, tau: f64) -> Result<ResidualReport> {
    if !(tau > 0.0) {
        return Err(LabError::Param(format!("stencil width τ = {tau} must be positive")));
    }
    Ok(ResidualReport {
        target: g.preset.label(),
        tau,
        residual: residual_at(g, v_state, tau)?,
        tau_half_residual: residual_at(g, v_state, 0.5 * tau)?,
    })
}

/// Residual for the unit-sphere preset.
pub fn wavemap_residual_sphere(v_state: &WaveState, tau: f64) -> Result<ResidualReport> {
    wavemap_residual(&make_preset(TargetPreset::SphereGreatCircle)?, v_state, tau)
}

/// `‖F(f)‖_{H^s} / ‖f‖_{H^s}` for `F(0) = 0`.
pub fn moser_ratio(f_map: impl Fn(f64) -> f64, f: &ScalarField, s: f64) -> Result<f64> {
    if f_map(0.0) != 0.0 {
        return Err(LabError::Param("F(0) must vanish".into()));
    }
    let den = sobolev_norm(f, s, false)?;
    if den == 0.0 {
        return Err(LabError::Param("‖f‖ = 0: ratio undefined".into()));
    }
    Ok(sobolev_norm(&f.map(f_map), s, false)? / den)
}
