//! Exact radial engine for `□z = 0` in ℝ² with `z(0) = 0, ∂_t z(0) = ψ(|x|)`.
//!
//! `z(t, r) = ∫ ψ(s) s K(t, r, s) ds`, where the angular average of the
//! Poisson kernel is `K = 1/agm(√(A+B), √(A−B))` with `A = t² − r² − s²`,
//! `B = 2rs`, continued to `1/agm(√(2B), √(B−A))` for `|A| < B`. Time enters
//! through `ε = 1 − t²` and the cone is described by `t − r − 1`, both kept
//! without cancellation so profiles living within `1e-8` of the unit sphere
//! stay resolved.

use crate::error::{LabError, Result};
use crate::field::RadialProfile;
use crate::quad::tanh_sinh;
use std::f64::consts::PI;

/// Relative tolerance of the per-panel double-exponential quadrature.
pub const ENGINE_TOL: f64 = 1e-11;

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    0.5 * (a + b)
}

/// Angular kernel from `A + B` and `A − B`; zero outside the cone.
pub fn kernel(apb: f64, amb: f64) -> f64 {
    if !(apb > 0.0) {
        0.0
    } else if amb >= 0.0 {
        1.0 / agm(apb.sqrt(), amb.sqrt())
    } else {
        1.0 / agm((apb - amb).sqrt(), (-amb).sqrt())
    }
}

/// Backward light cone of `(t, r)`, with `dm1 = t − r − 1` supplied exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone {
    pub t: f64,
    pub r: f64,
    pub dm1: f64,
}

impl Cone {
    /// Cone at time `t = √(1 − ε)` and radius `r`.
    pub fn at(eps: f64, r: f64) -> Result<Self> {
        if !(eps <= 1.0) || !(r >= 0.0) {
            return Err(LabError::Param(format!("need ε ≤ 1 and r ≥ 0, got ε = {eps}, r = {r}")));
        }
        let t = (1.0 - eps).sqrt();
        Ok(Self { t, r, dm1: -eps / (1.0 + t) - r })
    }

    pub fn from_t(t: f64, r: f64) -> Self {
        Self { t, r, dm1: t - r - 1.0 }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Root {
    None,
    /// `s′ = t − r` (A − B = 0)
    Inner,
    /// `s′ = t + r` (A + B = 0)
    Outer,
}

/// Source point in both coordinates: `s′` and `u′ = 1 − s′²`.
struct Src {
    s: f64,
    one_minus_s: f64,
}

fn kernel_at(c: &Cone, p: &Src, near: Option<(Root, f64)>) -> f64 {
    // `near` carries `s_root − s′` computed from the panel-end distance
    let a1 = match near {
        Some((Root::Inner, g)) => g,
        _ => c.dm1 + p.one_minus_s,
    };
    if c.r == 0.0 {
        let a = a1 * (c.t + p.s);
        return if a > 0.0 { 1.0 / a.sqrt() } else { 0.0 };
    }
    let cc = match near {
        Some((Root::Outer, g)) => g,
        _ => c.dm1 + 2.0 * c.r + p.one_minus_s,
    };
    kernel((c.t - c.r + p.s) * cc, a1 * (c.t + c.r + p.s))
}

/// `z` on a cone, with the profile's natural coordinate.
pub fn z_cone(psi: &RadialProfile, c: &Cone, tol: f64) -> Result<f64> {
    let s_in = 1.0 + c.dm1; // t − r
    let s_out = 1.0 + c.dm1 + 2.0 * c.r; // t + r
    let mut total = 0.0;
    if let Some(us) = psi.unit_sphere_breaks() {
        // w = −ln u′; ψ s′ ds′ = ψ (u′/2) dw
        let u_of = |s: f64| if s >= 0.0 && s < 1.0 { Some((1.0 - s) * (1.0 + s)) } else { None };
        let u_in = if s_in >= 0.0 { u_of(s_in).map(|_| -c.dm1 * (2.0 + c.dm1)) } else { None };
        let u_out = u_of(s_out).map(|_| -(c.dm1 + 2.0 * c.r) * (2.0 + c.dm1 + 2.0 * c.r));
        let u_back = if c.r > c.t { u_of(c.r - c.t) } else { None };
        let umax = us.iter().cloned().fold(f64::MIN, f64::max);
        let umin = us.iter().cloned().fold(f64::MAX, f64::min);
        let mut edges: Vec<(f64, Root, f64)> = us.iter().map(|&u| (-u.ln(), Root::None, u)).collect();
        for (u, tag) in [(u_in, Root::Inner), (u_out, Root::Outer), (u_back, Root::None)] {
            if let Some(u) = u {
                if u > umin && u < umax {
                    edges.push((-u.ln(), tag, u));
                }
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        edges.dedup_by(|a, b| a.0 == b.0);
        for e in edges.windows(2) {
            let ((wa, ta, ua), (wb, tb, ub)) = (e[0], e[1]);
            let f = |w: f64, da: f64, db: f64| {
                let u = (-w).exp();
                let s = (1.0 - u).sqrt();
                let p = Src { s, one_minus_s: u / (1.0 + s) };
                let near = if da <= db && ta != Root::None {
                    // u′ − u_a = u_a·expm1(−da); s_a − s′ = (u′ − u_a)/(s_a + s′)
                    let sa = (1.0 - ua).sqrt();
                    Some((ta, ua * (-da).exp_m1() / (sa + s)))
                } else if db < da && tb != Root::None {
                    let sb = (1.0 - ub).sqrt();
                    Some((tb, ub * db.exp_m1() / (sb + s)))
                } else {
                    None
                };
                let v = psi.eval_ru(s, u);
                if v == 0.0 {
                    return 0.0;
                }
                v * 0.5 * u * kernel_at(c, &p, near)
            };
            total += tanh_sinh(&f, wa, wb, tol).0;
        }
    } else {
        let (lo, hi) = psi.support();
        let mut edges: Vec<(f64, Root)> = psi.panels().into_iter().map(|x| (x, Root::None)).collect();
        for (x, tag) in [(s_in, Root::Inner), (s_out, Root::Outer), (c.r - c.t, Root::None)] {
            if x > lo && x < hi {
                edges.push((x, tag));
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        edges.dedup_by(|a, b| a.0 == b.0);
        for e in edges.windows(2) {
            let ((xa, ta), (xb, tb)) = (e[0], e[1]);
            let f = |s: f64, da: f64, db: f64| {
                let p = Src { s, one_minus_s: 1.0 - s };
                let near = if da <= db && ta != Root::None {
                    Some((ta, -da))
                } else if db < da && tb != Root::None {
                    Some((tb, db))
                } else {
                    None
                };
                let v = psi.eval(s);
                if v == 0.0 {
                    return 0.0;
                }
                v * s * kernel_at(c, &p, near)
            };
            total += tanh_sinh(&f, xa, xb, tol).0;
        }
    }
    if !total.is_finite() {
        return Err(LabError::Quadrature { estimate: total, tol });
    }
    Ok(total)
}

/// `z(√(1−ε), r)`.
pub fn z(psi: &RadialProfile, eps: f64, r: f64) -> Result<f64> {
    z_cone(psi, &Cone::at(eps, r)?, ENGINE_TOL)
}

/// `∂_t z` on a cone, five-point stencil of step `ht` in `t` (shifting
/// `t − r − 1` by the same amount keeps the cone exact).
fn dz_dt_cone(psi: &RadialProfile, c: &Cone, ht: f64) -> Result<f64> {
    let zz = |k: f64| z_cone(psi, &Cone { t: c.t + k * ht, r: c.r, dm1: c.dm1 + k * ht }, ENGINE_TOL);
    Ok((-zz(2.0)? + 8.0 * zz(1.0)? - 8.0 * zz(-1.0)? + zz(-2.0)?) / (12.0 * ht))
}

/// Smallest radial feature of a profile: the narrowest gap between its
/// breakpoints (or between the outermost one and the unit sphere).
fn data_scale(psi: &RadialProfile) -> f64 {
    let mut d: Vec<f64> = match psi.unit_sphere_breaks() {
        // distances below the unit sphere, 1 − s = u/(1 + s)
        Some(us) => us.iter().map(|&u| u / (1.0 + (1.0 - u).sqrt())).chain([0.0]).collect(),
        None => psi.panels(),
    };
    d.sort_by(f64::total_cmp);
    d.windows(2).map(|w| w[1] - w[0]).filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min)
}

/// Time step for `∂_t z` near `(t, r)`: a fraction of the distance to the
/// fronts `r = 1 ± t` leaving the unit sphere (never below the profile's own
/// feature size), capped so the stencil keeps `t > 0`.
fn time_step(c: &Cone, floor: f64) -> f64 {
    // r − (1 − t) = (t − r − 1) + 2r,  1 + t − r = 2 + (t − r − 1)
    let d = (c.dm1 + 2.0 * c.r).abs().min((2.0 + c.dm1).abs()).max(floor).max(1e-13);
    (5e-4 * d).min(0.25 * c.t)
}

/// `∂_t z` at `t = √(1−ε)`.
pub fn dz_dt(psi: &RadialProfile, eps: f64, r: f64) -> Result<f64> {
    let c = Cone::at(eps, r)?;
    dz_dt_cone(psi, &c, time_step(&c, data_scale(psi)))
}

/// `2π ∫_a^b (∂_t z(t, r))² r dr` at `t = √(1−ε)`, with panels split where the
/// cone through `(t, r)` touches a profile break.
pub fn dt_sq_integral(psi: &RadialProfile, eps: f64, a: f64, b: f64) -> Result<f64> {
    let t = (1.0 - eps).sqrt();
    let (_, hi) = psi.support();
    let b = b.min(t + hi);
    if !(b > a) {
        return Ok(0.0);
    }
    let srcs: Vec<(f64, f64)> = match psi.unit_sphere_breaks() {
        Some(us) => us.iter().map(|&u| ((1.0 - u).sqrt(), u)).collect(),
        None => psi.panels().into_iter().map(|s| (s, (1.0 - s) * (1.0 + s))).collect(),
    };
    let mut edges = vec![a, b];
    for (s, u) in srcs {
        // t − s = (u − ε)/(t + s)
        for x in [((u - eps) / (t + s)).abs(), t + s] {
            if x > a && x < b {
                edges.push(x);
            }
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let floor = data_scale(psi);
    let mut total = 0.0;
    let mut failed = None;
    for e in edges.windows(2) {
        let f = |r: f64, _: f64, _: f64| match Cone::at(eps, r).and_then(|c| dz_dt_cone(psi, &c, time_step(&c, floor))) {
            Ok(v) => v * v * r,
            Err(_) => f64::NAN,
        };
        let (v, _) = tanh_sinh(&f, e[0], e[1], 1e-8);
        if !v.is_finite() {
            failed = Some(v);
        }
        total += v;
    }
    if let Some(v) = failed {
        return Err(LabError::Quadrature { estimate: v, tol: 1e-8 });
    }
    Ok(2.0 * PI * total)
}

/// `‖∂_t z(t)‖_{L²(ℝ²)}` at `t = √(1−ε)`.
pub fn dt_norm(psi: &RadialProfile, eps: f64) -> Result<f64> {
    Ok(dt_sq_integral(psi, eps, 0.0, f64::INFINITY)?.sqrt())
}

/// `⟨ψ, Z(τ)⟩_{L²(ℝ²)}` with `τ = 2t + h`, `t = √(1−ε)`.
fn pairing(psi: &RadialProfile, eps: f64, h: f64) -> Result<f64> {
    let t = (1.0 - eps).sqrt();
    let tau = 2.0 * t + h;
    let mut total = 0.0;
    let mut failed = None;
    if let Some(us) = psi.unit_sphere_breaks() {
        let mut ws: Vec<f64> = us.iter().map(|u| -u.ln()).collect();
        ws.sort_by(f64::total_cmp);
        for e in ws.windows(2) {
            let f = |w: f64, _: f64, _: f64| {
                let u = (-w).exp();
                let s = (1.0 - u).sqrt();
                let v = psi.eval_ru(s, u);
                if v == 0.0 {
                    return 0.0;
                }
                // τ − s − 1 = −2ε/(1+t) + u/(1+s) + h
                let c = Cone { t: tau, r: s, dm1: -2.0 * eps / (1.0 + t) + u / (1.0 + s) + h };
                v * 0.5 * u * z_cone(psi, &c, ENGINE_TOL).unwrap_or(f64::NAN)
            };
            let (v, _) = tanh_sinh(&f, e[0], e[1], 1e-10);
            if !v.is_finite() {
                failed = Some(v);
            }
            total += v;
        }
    } else {
        let edges = psi.panels();
        for e in edges.windows(2) {
            let f = |s: f64, _: f64, _: f64| {
                let v = psi.eval(s);
                if v == 0.0 {
                    return 0.0;
                }
                v * s * z_cone(psi, &Cone::from_t(tau, s), ENGINE_TOL).unwrap_or(f64::NAN)
            };
            total += tanh_sinh(&f, e[0], e[1], 1e-10).0;
        }
    }
    if let Some(v) = failed {
        return Err(LabError::Quadrature { estimate: v, tol: 1e-10 });
    }
    Ok(2.0 * PI * total)
}

/// `‖∂_t z(t)‖_{L²(ℝ²)}` from `‖cos(t|ξ|)ψ̂‖² = ½‖ψ‖² + ½ ∂_τ⟨ψ, Z(τ)⟩|_{τ=2t}`,
/// with a τ-stencil of width `h`; only reliable when `h` is well below every
/// length scale of `ψ` and `ε`.
pub fn dt_norm_pairing(psi: &RadialProfile, eps: f64, h: f64) -> Result<f64> {
    let n2 = psi.lp_norm_pow(2.0, 2);
    if eps >= 1.0 {
        return Ok(n2.sqrt());
    }
    let d = (-pairing(psi, eps, 2.0 * h)? + 8.0 * pairing(psi, eps, h)? - 8.0 * pairing(psi, eps, -h)?
        + pairing(psi, eps, -2.0 * h)?)
        / (12.0 * h);
    Ok((0.5 * n2 + 0.5 * d).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agm_matches_elliptic_value() {
        // agm(1, 1/√2) = π / (2 K(1/2)) with K(1/2) = 1.854074677301372
        assert!((agm(1.0, 0.5f64.sqrt()) - PI / (2.0 * 1.854_074_677_301_372)).abs() < 1e-14);
    }

    #[test]
    fn constant_datum_gives_t_on_the_axis_and_off_it() {
        let one = RadialProfile::from_fn(|_| 1.0, (0.0, 5.0), 2);
        for (t, r) in [(0.8, 0.0), (0.8, 0.3), (0.5, 1.2)] {
            let v = z_cone(&one, &Cone::from_t(t, r), 1e-12).unwrap();
            assert!((v - t).abs() < 1e-9, "t={t} r={r} v={v}");
        }
    }
}
