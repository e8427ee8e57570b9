//! Linear wave propagation: exact spectral evolution on the torus, the 2D
//! Poisson-kernel value, radial representation formulas, Kirchhoff and
//! odd-dimension boundary values, and energy bookkeeping.

pub mod calib;
pub mod radial2d;

use crate::constants;
use crate::error::{LabError, Result};
use crate::field::{ProfileRepr, RadialProfile, ScalarField};
use crate::norms::sobolev_norm_spectrum;
use crate::quad::composite_gl_refined;
use crate::spectral::{xi_abs, Transform};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Value field, time-derivative field and time stamp.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub u: ScalarField,
    pub ut: ScalarField,
    pub t: f64,
}

impl WaveState {
    pub fn new(u: ScalarField, ut: ScalarField, t: f64) -> Result<Self> {
        if u.grid != ut.grid {
            return Err(LabError::Grid("u and ut live on different grids".into()));
        }
        Ok(Self { u, ut, t })
    }

    pub fn zeros(grid: crate::field::TorusGrid, t: f64) -> Self {
        Self { u: ScalarField::zeros(grid), ut: ScalarField::zeros(grid), t }
    }
}

/// Cached spectra of a state; evaluates the exact multiplier solution at any time.
pub struct Propagator {
    transform: Transform,
    xi: Vec<f64>,
    u0: Vec<Complex64>,
    v0: Vec<Complex64>,
    t0: f64,
}

impl Propagator {
    pub fn new(state: &WaveState) -> Self {
        let transform = Transform::new(state.u.grid);
        let xi = xi_abs(&state.u.grid);
        let u0 = transform.forward(&state.u.values);
        let v0 = transform.forward(&state.ut.values);
        Self { transform, xi, u0, v0, t0: state.t }
    }

    /// Spectra of (u, ut) at time `t`.
    pub fn spectra_at(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let tau = t - self.t0;
        let mut u = Vec::with_capacity(self.xi.len());
        let mut v = Vec::with_capacity(self.xi.len());
        for ((&k, a), b) in self.xi.iter().zip(&self.u0).zip(&self.v0) {
            if k == 0.0 {
                u.push(a + b * tau);
                v.push(*b);
            } else {
                let (s, c) = (k * tau).sin_cos();
                u.push(a * c + b * (s / k));
                v.push(b * c - a * (k * s));
            }
        }
        (u, v)
    }

    pub fn at(&self, t: f64) -> WaveState {
        let (u, v) = self.spectra_at(t);
        let g = self.transform.grid;
        let mut uf = ScalarField { grid: g, values: self.transform.inverse_real(u), time_stamp: Some(t) };
        let mut vf = ScalarField { grid: g, values: self.transform.inverse_real(v), time_stamp: Some(t) };
        uf.time_stamp = Some(t);
        vf.time_stamp = Some(t);
        WaveState { u: uf, ut: vf, t }
    }

    /// `‖u(t)‖_{Ḣ^s}` (or inhomogeneous) without leaving Fourier space.
    pub fn u_norm_at(&self, t: f64, s: f64, homogeneous: bool) -> Result<f64> {
        let (u, _) = self.spectra_at(t);
        sobolev_norm_spectrum(&u, &self.xi, &self.transform.grid, s, homogeneous)
    }

    pub fn ut_norm_at(&self, t: f64, s: f64, homogeneous: bool) -> Result<f64> {
        let (_, v) = self.spectra_at(t);
        sobolev_norm_spectrum(&v, &self.xi, &self.transform.grid, s, homogeneous)
    }

    pub fn energy_at(&self, t: f64, s: f64) -> Result<f64> {
        let (u, v) = self.spectra_at(t);
        let g = &self.transform.grid;
        let a = sobolev_norm_spectrum(&u, &self.xi, g, s, true)?;
        let b = sobolev_norm_spectrum(&v, &self.xi, g, s - 1.0, true)?;
        Ok((a * a + b * b).sqrt())
    }
}

/// Exact multiplier evolution `û(t) = cos(τ|ξ|)û₀ + sin(τ|ξ|)/|ξ|·û_t0`.
pub fn spectral_propagate(state: &WaveState, t_target: f64) -> WaveState {
    Propagator::new(state).at(t_target)
}

/// `(‖u‖²_{Ḣ^s} + ‖ut‖²_{Ḣ^{s−1}})^{1/2}`.
pub fn energy(state: &WaveState, s: f64) -> Result<f64> {
    let t = Transform::new(state.u.grid);
    let xi = xi_abs(&state.u.grid);
    let a = sobolev_norm_spectrum(&t.forward(&state.u.values), &xi, &state.u.grid, s, true)?;
    let b = sobolev_norm_spectrum(&t.forward(&state.ut.values), &xi, &state.u.grid, s - 1.0, true)?;
    Ok((a * a + b * b).sqrt())
}

/// Point value together with the quadrature's own error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    pub value: f64,
    pub err_est: f64,
}

/// Refinement tolerance of the polar kernel quadrature.
pub const KERNEL_TOL: f64 = 1e-8;

/// `z(t, x)` for `□z = 0, z(0) = 0, ∂_t z(0) = ψ(|·|)` in two dimensions:
/// `z = (1/2π) ∫_{|x−y|<t} ψ(y) / √(t² − |x−y|²) dy`, evaluated in polar
/// coordinates around `x` with `ρ = t sin α`, which turns the kernel into
/// the smooth weight `t sin α dα`.
pub fn kernel_solution_2d(psi: &RadialProfile, t: f64, x: [f64; 2]) -> Result<PointValue> {
    if psi.dim_hint != 2 {
        return Err(LabError::Param(format!("profile dimension hint {} ≠ 2", psi.dim_hint)));
    }
    if !(t > 0.0) {
        return Err(LabError::Param(format!("time t = {t} must be positive")));
    }
    let eps = (1.0 - t) * (1.0 + t);
    let rx = (x[0] * x[0] + x[1] * x[1]).sqrt();
    if rx == 0.0 {
        let edges = alpha_edges_origin(psi, t, eps);
        let f = |a: f64| {
            let (s, c) = a.sin_cos();
            let r = t * s;
            let u = eps + t * t * c * c;
            psi.eval_ru(r, u) * t * s
        };
        let (value, err_est) = composite_gl_refined(&f, &edges, KERNEL_TOL, 14)?;
        return Ok(PointValue { value, err_est });
    }
    // θ-integral over [0, π] (the integrand is symmetric about the x axis)
    let radii = profile_radii(psi);
    let inner = |theta: f64| -> f64 {
        let ex = theta.cos();
        // projection of x on the ray direction, radius of x
        let b = rx * ex;
        let mut edges = vec![0.0, FRAC_PI_2];
        for &rad in &radii {
            let disc = b * b - rx * rx + rad * rad;
            if disc < 0.0 {
                continue;
            }
            for rho in [-b - disc.sqrt(), -b + disc.sqrt()] {
                if rho > 0.0 && rho < t {
                    edges.push((rho / t).asin());
                }
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let f = |a: f64| {
            let rho = t * a.sin();
            let r = (rx * rx + 2.0 * rho * b + rho * rho).max(0.0).sqrt();
            psi.eval(r) * rho
        };
        crate::quad::composite_gl(&f, &edges, 2)
    };
    let mut theta_edges = vec![0.0, PI];
    for &rad in &radii {
        // tangency directions of the circle |y| = rad seen from x
        if rad < rx {
            let a = (rad / rx).asin();
            theta_edges.push(PI - a);
        }
        // the light-cone circle |y − x| = t meets |y| = rad
        let c = (rad * rad - rx * rx - t * t) / (2.0 * rx * t);
        if c.abs() < 1.0 {
            theta_edges.push(c.acos());
        }
    }
    theta_edges.sort_by(f64::total_cmp);
    theta_edges.dedup();
    let (v, err) = composite_gl_refined(&inner, &theta_edges, KERNEL_TOL * PI, 10)?;
    Ok(PointValue { value: v / PI, err_est: err / PI })
}

fn profile_radii(psi: &RadialProfile) -> Vec<f64> {
    let mut r = psi.panels();
    if let ProfileRepr::Sampled { r_max, samples } = &psi.repr {
        // interpolation kinks sit at every sample radius
        let m = samples.len() - 1;
        r = (0..=m).map(|i| r_max * i as f64 / m as f64).collect();
    }
    r.retain(|&x| x > 0.0 && x.is_finite());
    r
}

/// α-panel edges for `x = 0`: the ray radius `t sin α` crosses each profile breakpoint.
fn alpha_edges_origin(psi: &RadialProfile, t: f64, eps: f64) -> Vec<f64> {
    let mut e = vec![0.0, FRAC_PI_2];
    for r in profile_radii(psi) {
        if r < t {
            e.push((r / t).asin());
        }
    }
    if let Some(us) = psi.unit_sphere_breaks() {
        for u in us {
            // t sin α = √(1−u)  ⇔  tan α = √(1−u) / √(u − ε)
            if u > eps {
                e.push((1.0 - u).max(0.0).sqrt().atan2((u - eps).sqrt()));
            }
        }
    }
    e.sort_by(f64::total_cmp);
    e.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    e
}

/// `∫₀^{π/2} g(sin α, cos² α) dα`, i.e. `∫₀¹ g(r, 1−r²) (1−r²)^{−1/2} dr`.
fn arcsine_integral(psi: &RadialProfile, g: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let edges = alpha_edges_origin(psi, 1.0, 0.0);
    let f = |a: f64| {
        let (s, c) = a.sin_cos();
        g(s, c * c)
    };
    Ok(composite_gl_refined(&f, &edges, 1e-12, 14)?.0)
}

/// The integrals `∫₀¹ ∂_r^ν φ(r) (1−r²)^{−1/2} r^{ν+n−1} dr` for `ν < n/2`.
pub fn radial_even_integrals(phi: &RadialProfile, n: usize) -> Result<Vec<f64>> {
    if n != 2 && n != 4 {
        return Err(LabError::Param(format!("even representation supports n ∈ {{2, 4}}, got {n}")));
    }
    (0..n / 2)
        .map(|nu| {
            let pw = (nu + n - 1) as i32;
            if nu == 0 {
                arcsine_integral(phi, |r, u| phi.eval_ru(r, u) * r.powi(pw))
            } else {
                arcsine_integral(phi, |r, _| phi.deriv(r) * r.powi(pw))
            }
        })
        .collect()
}

/// Even-dimension radial representation of `z(1, 0)`:
/// `Σ_ν c_ν ∫₀¹ ∂_r^ν φ(r) (1−r²)^{−1/2} r^{ν+n−1} dr` with calibrated `c_ν`.
pub fn radial_even_representation(phi: &RadialProfile, n: usize) -> Result<f64> {
    let c = match n {
        2 => &constants::EVEN_C_N2[..],
        4 => &constants::EVEN_C_N4[..],
        _ => return Err(LabError::Param(format!("even representation supports n ∈ {{2, 4}}, got {n}"))),
    };
    calib::ensure_calibrated(n)?;
    Ok(radial_even_integrals(phi, n)?.iter().zip(c).map(|(a, b)| a * b).sum())
}

/// `(1/4π) ∫_{∂B₁} φ dS = φ(1)` for a radial datum in three dimensions.
pub fn kirchhoff_3d_origin(phi: &RadialProfile) -> Result<f64> {
    if phi.dim_hint != 3 {
        return Err(LabError::Param(format!("profile dimension hint {} ≠ 3", phi.dim_hint)));
    }
    if let ProfileRepr::Sampled { r_max, .. } = phi.repr {
        if r_max < 1.0 {
            return Err(LabError::ProfileRange { radius: 1.0, r_max });
        }
    }
    Ok(phi.eval_ru(1.0, 0.0))
}

/// `Σ_ν b_ν ∂_r^ν φ(1)` for odd `n ∈ {3, 5}`.
pub fn odd_n_boundary_value(phi: &RadialProfile, n: usize) -> Result<f64> {
    match n {
        3 => {
            calib::ensure_calibrated(3)?;
            Ok(constants::ODD_B_N3[0] * phi.eval_ru(1.0, 0.0))
        }
        5 => {
            calib::ensure_calibrated(5)?;
            let b = constants::ODD_B_N5;
            Ok(b[0] * phi.eval_ru(1.0, 0.0) + b[1] * phi.deriv(1.0))
        }
        _ => Err(LabError::Param(format!("odd boundary formula supports n ∈ {{3, 5}}, got {n}"))),
    }
}
