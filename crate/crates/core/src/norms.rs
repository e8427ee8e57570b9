//! Norm machinery: Fourier-side Sobolev norms, Lebesgue norms, difference
//! operators, the Leibniz expansion, fractional-integral seminorms and Besov
//! norms (dyadic h-shells), and dilations.

use crate::error::{LabError, Result};
use crate::field::{lattice_shift, ScalarField, TorusGrid};
use crate::spectral::{xi_abs, Transform};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Exponents of a norm request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    pub homogeneous: bool,
    pub p: f64,
    pub q: f64,
}

/// Output of the difference-based norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffNormReport {
    pub norm: f64,
    pub shells_used: usize,
    /// Upper bound on the increase of `norm` from the truncated region |h| > L/2.
    pub tail_estimate: f64,
}

/// Multiplier weight of order `s`.
fn weight(xi: f64, s: f64, homogeneous: bool) -> f64 {
    if homogeneous {
        if xi == 0.0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            xi.powf(s)
        }
    } else {
        (1.0 + xi * xi).powf(0.5 * s)
    }
}

/// Sobolev norm from a precomputed spectrum of a field on `grid`.
pub fn sobolev_norm_spectrum(spec: &[Complex64], xi: &[f64], grid: &TorusGrid, s: f64, homogeneous: bool) -> Result<f64> {
    let scale = grid.cell_volume() / grid.len() as f64;
    if homogeneous && s < 0.0 {
        let zero = (scale * spec[0].norm_sqr()).sqrt();
        let l2 = (scale * spec.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
        if zero > 1e-10 * l2 {
            return Err(LabError::NotInHomogeneous { s, zero_mode: zero });
        }
    }
    let acc: f64 = spec
        .iter()
        .zip(xi)
        .map(|(c, &x)| {
            let w = weight(x, s, homogeneous);
            w * w * c.norm_sqr()
        })
        .sum();
    Ok((scale * acc).sqrt())
}

/// `‖f‖_{H^s}` or `‖f‖_{Ḣ^s}`, normalized so that `s = 0` is the discrete L² norm.
pub fn sobolev_norm(f: &ScalarField, s: f64, homogeneous: bool) -> Result<f64> {
    let t = Transform::new(f.grid);
    let spec = t.forward(&f.values);
    sobolev_norm_spectrum(&spec, &xi_abs(&f.grid), &f.grid, s, homogeneous)
}

/// Discrete `(h^d Σ|f|^p)^{1/p}`; `p = ∞` gives the max norm.
pub fn lp_norm(f: &ScalarField, p: f64) -> f64 {
    lp_of(&f.values, f.grid.cell_volume(), p)
}

fn lp_of(v: &[f64], vol: f64, p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if p == 2.0 {
        (vol * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
    } else {
        (vol * v.iter().map(|x| x.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

/// `Δ_h^ℓ f` with `Δf(x) = f(x + h) − f(x)`, built by ℓ successive applications.
pub fn difference(f: &ScalarField, h_vec: &[i64], order: usize) -> Result<ScalarField> {
    if order == 0 || order > 8 {
        return Err(LabError::Param(format!("difference order {order} not in 1..=8")));
    }
    let mut d = f.clone();
    for _ in 0..order {
        let s = lattice_shift(&d, h_vec);
        d = s.zip_with(&d, |a, b| a - b);
    }
    Ok(d)
}

fn binom(k: usize, l: usize) -> f64 {
    (0..l).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Right-hand side of `Δ^k(fg) = Σ_{ℓ+m=k} C(k,ℓ) (Δ^ℓ f)_m Δ^m g`, where the
/// subscript `m` denotes translation by `m·h`.
pub fn leibniz_expand(f: &ScalarField, g: &ScalarField, h_vec: &[i64], k: usize) -> Result<ScalarField> {
    if k == 0 || k > 6 {
        return Err(LabError::Param(format!("Leibniz order {k} not in 1..=6")));
    }
    let mut acc = ScalarField::zeros(f.grid);
    for l in 0..=k {
        let m = k - l;
        let dl = if l == 0 { f.clone() } else { difference(f, h_vec, l)? };
        let shift: Vec<i64> = h_vec.iter().map(|x| x * m as i64).collect();
        let dlm = lattice_shift(&dl, &shift);
        let dm = if m == 0 { g.clone() } else { difference(g, h_vec, m)? };
        let c = binom(k, l);
        acc = acc.zip_with(&dlm.zip_with(&dm, |a, b| a * b), |x, y| x + c * y);
    }
    Ok(acc)
}

/// Lattice vectors with length in the dyadic shell `[2^{−a}L, 2^{−a+1}L)`.
fn shells(grid: &TorusGrid, cap: usize) -> Vec<Vec<(Vec<i64>, f64)>> {
    let h = grid.h();
    let jmax = (grid.n / 4) as i64;
    let mut all: Vec<(Vec<i64>, f64)> = Vec::new();
    let mut push = |j: Vec<i64>| {
        let len = h * (j.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
        if len > 0.0 && len < 0.5 * grid.l {
            all.push((j, len));
        }
    };
    match grid.dim {
        1 => (-jmax..=jmax).for_each(|a| push(vec![a])),
        2 => {
            for a in -jmax..=jmax {
                for b in -jmax..=jmax {
                    push(vec![a, b]);
                }
            }
        }
        _ => {
            for a in -jmax..=jmax {
                for b in -jmax..=jmax {
                    for c in -jmax..=jmax {
                        push(vec![a, b, c]);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut a = 2;
    loop {
        let hi = grid.l * 2f64.powi(-(a - 1));
        let lo = grid.l * 2f64.powi(-a);
        if hi <= h {
            break;
        }
        let mut members: Vec<(Vec<i64>, f64)> = all.iter().filter(|(_, l)| *l >= lo && *l < hi).cloned().collect();
        if !members.is_empty() {
            // spread the subsample over directions
            members.sort_by(|x, y| {
                let ax = (x.0.get(1).copied().unwrap_or(0) as f64).atan2(x.0[0] as f64);
                let ay = (y.0.get(1).copied().unwrap_or(0) as f64).atan2(y.0[0] as f64);
                ax.total_cmp(&ay).then(x.1.total_cmp(&y.1))
            });
            let count = members.len();
            let stride = count.div_ceil(cap).max(1);
            let chosen: Vec<(Vec<i64>, f64)> = members.into_iter().step_by(stride).collect();
            let w = count as f64 / chosen.len() as f64;
            out.push(chosen.into_iter().map(|(j, _)| (j, w)).collect());
        }
        a += 1;
    }
    out
}

/// Maximum lattice vectors evaluated per dyadic shell.
pub const SHELL_CAP: usize = 96;

/// `Σ_shells Σ_j mult·h^d·|jh|^{−n−sq}·‖Δ_{jh}^{k} f‖_p^q` together with the
/// shell count; `k = ⌊s⌋ + 1`.
fn difference_integral(f: &ScalarField, s: f64, p: f64, q: f64) -> Result<(f64, usize)> {
    if !(s > 0.0) {
        return Err(LabError::Param(format!("order s = {s} must be positive")));
    }
    let g = f.grid;
    let k = s.floor() as usize + 1;
    let sh = shells(&g, SHELL_CAP);
    if sh.is_empty() {
        return Err(LabError::Resolution("no lattice vectors in any dyadic shell".into()));
    }
    let vol = g.cell_volume();
    let n = g.dim as f64;
    let h = g.h();
    let mut acc = 0.0;
    for shell in &sh {
        for (j, mult) in shell {
            let len = h * (j.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
            let d = difference(f, j, k)?;
            let lp = lp_of(&d.values, vol, p);
            acc += mult * vol * len.powf(-n - s * q) * lp.powf(q);
        }
    }
    Ok((acc, sh.len()))
}

fn tail_bound(f: &ScalarField, s: f64, p: f64, q: f64) -> f64 {
    let g = f.grid;
    let k = s.floor() as i32 + 1;
    let lp = lp_norm(f, p);
    let area = crate::field::sphere_area(g.dim);
    (2f64.powi(k) * lp).powf(q) * area * (0.5 * g.l).powf(-s * q) / (s * q)
}

/// `I_{s,p}(f) = (∫∫ |Δ_h^{⌊s⌋+1} f(x)|^p / |h|^{n+sp} dx dh)^{1/p}` over |h| ≤ L/2.
pub fn fractional_integral_seminorm(f: &ScalarField, s: f64, p: f64) -> Result<DiffNormReport> {
    if s.fract() == 0.0 {
        return Err(LabError::Param(format!("s = {s} is an integer; use sobolev_norm")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::Param(format!("p = {p} not in (1, ∞)")));
    }
    let (acc, shells_used) = difference_integral(f, s, p, p)?;
    let norm = acc.powf(1.0 / p);
    let tail_estimate = (acc + tail_bound(f, s, p, p)).powf(1.0 / p) - norm;
    Ok(DiffNormReport { norm, shells_used, tail_estimate })
}

/// `‖f‖_{B^s_{p,q}} = ‖f‖_{L^p} + (∫ ‖Δ_h^{⌊s⌋+1} f‖_{L^p}^q / |h|^{n+sq} dh)^{1/q}`.
pub fn besov_norm(f: &ScalarField, s: f64, p: f64, q: f64) -> Result<DiffNormReport> {
    if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
        return Err(LabError::Param(format!("p = {p}, q = {q} must lie in (1, ∞)")));
    }
    let (acc, shells_used) = difference_integral(f, s, p, q)?;
    let semi = acc.powf(1.0 / q);
    let tail_estimate = (acc + tail_bound(f, s, p, q)).powf(1.0 / q) - semi;
    Ok(DiffNormReport { norm: lp_norm(f, p) + semi, shells_used, tail_estimate })
}

/// `(S_λ f)(x) = f(λx)` on the same grid. The box stands in for ℝⁿ, so
/// points `λx` that leave `[−L, L)^dim` read zero rather than a periodic
/// copy (periodic reading would alias 2^dim copies of a bump for λ = 2).
/// Integer λ reads lattice values exactly; other λ use multilinear
/// interpolation.
pub fn rescale(f: &ScalarField, lambda: f64) -> Result<ScalarField> {
    if !(lambda > 0.0) {
        return Err(LabError::Param(format!("dilation λ = {lambda} must be positive")));
    }
    let g = f.grid;
    let n = g.n as i64;
    let half = (g.n / 2) as i64;
    let integer = lambda.fract() == 0.0;
    let mut out = Vec::with_capacity(g.len());
    for idx in 0..g.len() {
        let m = g.multi_index(idx);
        if integer {
            let mut src = [0usize; 3];
            let mut inside = true;
            for a in 0..g.dim {
                let k = (m[a] as i64 - half) * lambda as i64 + half;
                inside &= (0..n).contains(&k);
                src[a] = k.clamp(0, n - 1) as usize;
            }
            out.push(if inside { f.values[g.flat_index(&src)] } else { 0.0 });
        } else {
            // fractional lattice position of λx, then multilinear weights
            let mut base = [0i64; 3];
            let mut frac = [0.0; 3];
            for a in 0..g.dim {
                let pos = (m[a] as i64 - half) as f64 * lambda + half as f64;
                base[a] = pos.floor() as i64;
                frac[a] = pos - pos.floor();
            }
            let mut v = 0.0;
            for corner in 0..(1usize << g.dim) {
                let mut w = 1.0;
                let mut src = [0usize; 3];
                let mut inside = true;
                for a in 0..g.dim {
                    let bit = ((corner >> a) & 1) as i64;
                    w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                    let k = base[a] + bit;
                    inside &= (0..n).contains(&k);
                    src[a] = k.clamp(0, n - 1) as usize;
                }
                if w != 0.0 && inside {
                    v += w * f.values[g.flat_index(&src)];
                }
            }
            out.push(v);
        }
    }
    Ok(ScalarField { grid: g, values: out, time_stamp: f.time_stamp })
}

/// `‖φ(|·|)‖_{H^s(ℝ³)}` for a radial profile via the odd extension
/// `g(r) = r φ(|r|)` on a 1D grid: `‖φ‖_{H^s(ℝ³)} = √(2π)·‖g‖_{H^s(ℝ)}`.
pub fn radial3d_sobolev_norm(
    profile: &crate::field::RadialProfile,
    s: f64,
    homogeneous: bool,
    grid1d: TorusGrid,
) -> Result<f64> {
    if grid1d.dim != 1 {
        return Err(LabError::Grid("radial reduction needs a 1D grid".into()));
    }
    let g = crate::field::sample(|x| x[0] * profile.eval(x[0].abs()), grid1d)?;
    Ok((2.0 * std::f64::consts::PI).sqrt() * sobolev_norm(&g, s, homogeneous)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;

    fn grid2(n: usize, l: f64) -> TorusGrid {
        TorusGrid::new(2, l, n).unwrap()
    }

    #[test]
    fn zero_field_norms() {
        let g = grid2(16, 4.0);
        let z = ScalarField::zeros(g);
        assert_eq!(sobolev_norm(&z, 0.5, true).unwrap(), 0.0);
        assert_eq!(lp_norm(&z, 3.0), 0.0);
        assert_eq!(fractional_integral_seminorm(&z, 0.5, 2.0).unwrap().norm, 0.0);
        assert_eq!(besov_norm(&z, 0.5, 2.0, 2.0).unwrap().norm, 0.0);
    }

    #[test]
    fn single_mode_multiplier() {
        let l = std::f64::consts::PI;
        let g = grid2(32, l);
        let f = sample(|x| (3.0 * x[0] + 4.0 * x[1]).cos(), g).unwrap();
        let l2 = lp_norm(&f, 2.0);
        for s in [0.5, 1.0, -1.0] {
            let v = sobolev_norm(&f, s, true).unwrap();
            assert!((v - 5f64.powf(s) * l2).abs() < 1e-12 * l2.max(1.0));
        }
    }

    #[test]
    fn constant_lp() {
        let g = grid2(16, 2.0);
        let c = sample(|_| -3.0, g).unwrap();
        assert!((lp_norm(&c, 3.0) - 3.0 * 16f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(lp_norm(&c, f64::INFINITY), 3.0);
    }

    #[test]
    fn negative_order_requires_mean_zero() {
        let g = grid2(16, 4.0);
        let f = sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), g).unwrap();
        assert!(matches!(sobolev_norm(&f, -1.0, true), Err(LabError::NotInHomogeneous { .. })));
    }

    #[test]
    fn differences_annihilate_constants_and_affine() {
        let g = grid2(16, 4.0);
        let c = sample(|_| 2.0, g).unwrap();
        assert!(difference(&c, &[1, 2], 3).unwrap().values.iter().all(|&v| v == 0.0));
        let ramp = sample(|x| 3.0 * x[0] + 1.0, g).unwrap();
        let d2 = difference(&ramp, &[1, 0], 2).unwrap();
        // away from the wrap seam (first axis index ≤ N − 3)
        for i in 0..14 {
            for k in 0..16 {
                assert!(d2.at(&[i, k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn integer_order_is_rejected() {
        let g = grid2(16, 4.0);
        assert!(fractional_integral_seminorm(&ScalarField::zeros(g), 1.0, 2.0).is_err());
    }

    #[test]
    fn rescale_identity_and_l2_law() {
        let g = grid2(128, 8.0);
        let u = sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), g).unwrap();
        assert_eq!(rescale(&u, 1.0).unwrap(), u);
        let s2 = rescale(&u, 2.0).unwrap();
        let ratio = lp_norm(&s2, 2.0) / lp_norm(&u, 2.0);
        assert!((ratio - 0.5).abs() < 1e-3 * 0.5, "{ratio}");
        let h = sobolev_norm(&s2, 0.5, true).unwrap() / sobolev_norm(&u, 0.5, true).unwrap();
        assert!((h - 2f64.powf(-0.5)).abs() < 1e-2 * 2f64.powf(-0.5), "{h}");
    }

    #[test]
    fn shells_cover_all_vectors_with_weights() {
        let g = grid2(32, 4.0);
        let sh = shells(&g, 10_000);
        let total: f64 = sh.iter().flat_map(|s| s.iter().map(|e| e.1)).sum();
        let direct = {
            let mut c = 0;
            let h = g.h();
            for a in -8i64..=8 {
                for b in -8i64..=8 {
                    let l = h * ((a * a + b * b) as f64).sqrt();
                    if l >= h && l < 2.0 {
                        c += 1;
                    }
                }
            }
            c
        };
        assert_eq!(total as usize, direct);
    }
}
