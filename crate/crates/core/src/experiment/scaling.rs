//! Scaling of the rescaled waves `v_{R,M,T}` at fixed `M/R`: fitted exponents
//! of `sup_t ‖v(t)‖_{Ḣ^s}` against `R` (expected `s − n/2`), the fixed-time
//! slopes, energy uniformity in time, and the `L^∞` constant.

use super::{fit_line, rel_drift};
use crate::construct::{rescaled_family, ChiReference};
use crate::error::{LabError, Result};
use crate::field::TorusGrid;
use serde::{Deserialize, Serialize};

pub const SCALING_RADII: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
pub const SCALING_ORDERS: [f64; 2] = [0.5, 1.0];
pub const M_OVER_R: f64 = 0.1;
pub const T_FINAL: f64 = 1.0;
/// Time at which the fixed-time slopes are reported.
pub const FIXED_TIME: f64 = 0.5;
/// Samples of `[0, T]` for the suprema.
pub const TIME_SAMPLES: usize = 128;
pub const SLOPE_TOL: f64 = 0.05;
pub const LINF_TOL: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub s: f64,
    pub expected: f64,
    /// `sup_t ‖v(t)‖_{Ḣ^s}` per radius.
    pub sup_norms: Vec<f64>,
    pub slope: f64,
    pub residual: f64,
    pub fixed_time_norms: Vec<f64>,
    pub fixed_time_slope: f64,
    /// `(‖v‖²_{Ḣ^s} + ‖v_t‖²_{Ḣ^{s−1}})^{1/2}` per radius (time-independent).
    pub energies: Vec<f64>,
    pub energy_slope: f64,
    /// Largest relative change of the energy over the sampled times, over all radii.
    pub energy_drift: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub grid: TorusGrid,
    pub radii: Vec<f64>,
    pub m_over_r: f64,
    pub t_final: f64,
    pub fixed_time: f64,
    pub rows: Vec<ScalingRow>,
    /// `sup_{t,x} |v| / (M/R)` per radius.
    pub linf_constants: Vec<f64>,
    /// `(max − min)/max` of the `L^∞` constants.
    pub linf_variation: f64,
    pub pass: bool,
}

pub fn scaling_suite(chi: &ChiReference, grid: TorusGrid) -> Result<ScalingReport> {
    if chi.n != 2 || grid.dim != 2 {
        return Err(LabError::Param("the scaling suite runs in n = 2".into()));
    }
    let times: Vec<f64> = (0..=TIME_SAMPLES).map(|k| T_FINAL * k as f64 / TIME_SAMPLES as f64).collect();
    let waves = SCALING_RADII
        .iter()
        .map(|&r| rescaled_family(chi, r, M_OVER_R * r, T_FINAL, grid))
        .collect::<Result<Vec<_>>>()?;
    let props: Vec<_> = waves.iter().map(|w| w.propagator()).collect();
    let logr: Vec<f64> = SCALING_RADII.iter().map(|r| r.ln()).collect();
    let mut rows = Vec::new();
    for &s in &SCALING_ORDERS {
        let expected = s - 0.5 * grid.dim as f64;
        let mut sup_norms = Vec::new();
        let mut fixed = Vec::new();
        let mut energies = Vec::new();
        let mut energy_drift = 0.0f64;
        for p in &props {
            let mut sup = 0.0f64;
            let e0 = p.energy_at(0.0, s)?;
            for &t in &times {
                sup = sup.max(p.u_norm_at(t, s, true)?);
                energy_drift = energy_drift.max(rel_drift(e0, p.energy_at(t, s)?));
            }
            sup_norms.push(sup);
            fixed.push(p.u_norm_at(FIXED_TIME, s, true)?);
            energies.push(e0);
        }
        let ln = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
        let (slope, _, residual) = fit_line(&logr, &ln(&sup_norms));
        let (fixed_time_slope, _, _) = fit_line(&logr, &ln(&fixed));
        let (energy_slope, _, _) = fit_line(&logr, &ln(&energies));
        rows.push(ScalingRow {
            s,
            expected,
            sup_norms,
            slope,
            residual,
            fixed_time_norms: fixed,
            fixed_time_slope,
            energies,
            energy_slope,
            energy_drift,
            pass: (slope - expected).abs() <= SLOPE_TOL && slope.is_finite(),
        });
    }
    let linf_times: Vec<f64> = (0..=32).map(|k| T_FINAL * k as f64 / 32.0).collect();
    let linf_constants: Vec<f64> = waves.iter().map(|w| w.linf_over(&linf_times) / M_OVER_R).collect();
    let hi = linf_constants.iter().cloned().fold(f64::MIN, f64::max);
    let lo = linf_constants.iter().cloned().fold(f64::MAX, f64::min);
    let linf_variation = (hi - lo) / hi;
    let pass = rows.iter().all(|r| r.pass) && linf_variation < LINF_TOL;
    Ok(ScalingReport {
        grid,
        radii: SCALING_RADII.to_vec(),
        m_over_r: M_OVER_R,
        t_final: T_FINAL,
        fixed_time: FIXED_TIME,
        rows,
        linf_constants,
        linf_variation,
        pass,
    })
}
