//! Counterexample data: the δ-families `ψ_{p,q}`, `ψ̃_{p,q}` and their
//! normalized sequences, the n = 3 logarithmic cutoffs, the maximum
//! normalization on the strip `[0, 1] × ℝ²`, the mean-zero bump `χ`, and the
//! backward-propagated rescaled waves `v_{R,M,T}`.

use crate::error::{LabError, Result};
use crate::field::{radial_embed, RadialFunction, RadialProfile, ScalarField, TorusGrid};
use crate::norms::{radial3d_sobolev_norm, sobolev_norm};
use crate::wave::radial2d;
use crate::wave::{kirchhoff_3d_origin, radial_even_representation, spectral_propagate, Propagator, WaveState};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// `S(x) = e(x)/(e(x) + e(1−x))`, `e(x) = exp(−1/x)`: a C^∞ step from 0 to 1 on `[0, 1]`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// Radii with `1−p₁² = δ, 1−p² = δ², 1−q² = δ³, 1−q₁² = δ⁴`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaFamily {
    pub delta: f64,
    pub p1: f64,
    pub p: f64,
    pub q: f64,
    pub q1: f64,
}

impl DeltaFamily {
    /// `(δ, δ², δ³, δ⁴)`, i.e. `1 − r²` at `p₁, p, q, q₁`.
    pub fn u_levels(&self) -> [f64; 4] {
        let d = self.delta;
        [d, d * d, d * d * d, d * d * d * d]
    }

    pub fn log_delta(&self) -> f64 {
        -self.delta.ln()
    }
}

pub fn delta_family(delta: f64) -> Result<DeltaFamily> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(LabError::Param(format!("δ = {delta} outside (0, 0.5]")));
    }
    let r = |u: f64| (1.0 - u).sqrt();
    Ok(DeltaFamily { delta, p1: r(delta), p: r(delta.powi(2)), q: r(delta.powi(3)), q1: r(delta.powi(4)) })
}

/// `−1/(√u log u)` with `u = 1 − r²`.
fn log_weight(u: f64) -> f64 {
    -1.0 / (u.sqrt() * u.ln())
}

/// `ψ_{p,q}` on the annulus `p ≤ |y| ≤ q`.
#[derive(Debug)]
pub struct PsiExact {
    pub fam: DeltaFamily,
}

impl RadialFunction for PsiExact {
    fn eval_ru(&self, _r: f64, u: f64) -> f64 {
        let [_, u2, u3, _] = self.fam.u_levels();
        if u >= u3 && u <= u2 {
            log_weight(u)
        } else {
            0.0
        }
    }
    fn support(&self) -> (f64, f64) {
        (self.fam.p, self.fam.q)
    }
    fn unit_sphere_breaks(&self) -> Option<Vec<f64>> {
        let [_, u2, u3, _] = self.fam.u_levels();
        Some(vec![u2, u3])
    }
}

/// `ψ̃_{p,q}`: `ψ_{p,q}` with the indicator replaced by a C^∞ cutoff equal to 1
/// on `[p, q]` and vanishing outside `[p₁, q₁]`.
#[derive(Debug)]
pub struct PsiSmooth {
    pub fam: DeltaFamily,
}

impl PsiSmooth {
    /// The cutoff, written in `u` so transition arguments stay exact near `r = 1`.
    pub fn cutoff(&self, r: f64, u: f64) -> f64 {
        let f = &self.fam;
        let [u1, u2, u3, u4] = f.u_levels();
        if u >= u1 || u <= u4 {
            return 0.0;
        }
        // (r − p₁)/(p − p₁) and (q₁ − r)/(q₁ − q)
        let x1 = ((u1 - u) / (r + f.p1)) / ((u1 - u2) / (f.p + f.p1));
        let x2 = ((u - u4) / (f.q1 + r)) / ((u3 - u4) / (f.q1 + f.q));
        smooth_step(x1) * smooth_step(x2)
    }
}

impl RadialFunction for PsiSmooth {
    fn eval_ru(&self, r: f64, u: f64) -> f64 {
        let c = self.cutoff(r, u);
        if c == 0.0 {
            0.0
        } else {
            c * log_weight(u)
        }
    }
    fn support(&self) -> (f64, f64) {
        (self.fam.p1, self.fam.q1)
    }
    fn unit_sphere_breaks(&self) -> Option<Vec<f64>> {
        Some(self.fam.u_levels().to_vec())
    }
}

/// `‖ψ_{p,q}‖²_{L²(ℝ²)} = π (1/log(1−q²) − 1/log(1−p²)) = π/(6|log δ|)`.
pub fn psi_exact_norm_sq(fam: &DeltaFamily) -> f64 {
    PI / (6.0 * fam.log_delta())
}

/// Bracket for `‖ψ̃‖²`: `[π/(6|log δ|), 3π/(4|log δ|)]`.
pub fn psi_smooth_norm_sq_bracket(fam: &DeltaFamily) -> (f64, f64) {
    let a = fam.log_delta();
    (PI / (6.0 * a), 3.0 * PI / (4.0 * a))
}

/// `z_{p,q}(1, 0) = ½ log(log(1−q²)/log(1−p²)) = ½ log(3/2)` for the exact profile.
pub fn psi_exact_z10() -> f64 {
    0.5 * 1.5f64.ln()
}

/// Bracket for `z̃(1, 0)`: `[½ log(3/2), ½ log 4]`.
pub fn psi_smooth_z10_bracket() -> (f64, f64) {
    (0.5 * 1.5f64.ln(), 0.5 * 4f64.ln())
}

pub fn psi_exact(fam: DeltaFamily) -> RadialProfile {
    RadialProfile::analytic(Arc::new(PsiExact { fam }), 2)
}

/// The smooth profile, with its L² norm checked against the bracket.
pub fn psi_smooth(fam: DeltaFamily) -> Result<RadialProfile> {
    let p = RadialProfile::analytic(Arc::new(PsiSmooth { fam }), 2);
    let n2 = p.lp_norm_pow(2.0, 2);
    let (lo, hi) = psi_smooth_norm_sq_bracket(&fam);
    if !(n2 >= lo * (1.0 - 1e-6) && n2 <= hi * (1.0 + 1e-6)) {
        return Err(LabError::Param(format!("‖ψ̃‖² = {n2} outside [{lo}, {hi}] for δ = {}", fam.delta)));
    }
    Ok(p)
}

/// `1 − S(log(d/ε²)/log(1/ε))` with `d = |r − 1|`: equal to 1 for `d ≤ ε²`,
/// vanishing for `d ≥ ε`.
#[derive(Debug)]
pub struct LogCutoff {
    pub eps: f64,
}

impl RadialFunction for LogCutoff {
    fn eval_ru(&self, r: f64, _u: f64) -> f64 {
        let e = self.eps;
        let d = (r - 1.0).abs();
        if d >= e {
            0.0
        } else if d <= e * e {
            1.0
        } else {
            1.0 - smooth_step((d / (e * e)).ln() / (1.0 / e).ln())
        }
    }
    fn support(&self) -> (f64, f64) {
        (1.0 - self.eps, 1.0 + self.eps)
    }
    fn breakpoints(&self) -> Vec<f64> {
        let e = self.eps;
        vec![1.0 - e * e, 1.0 + e * e]
    }
}

pub fn log_cutoff(eps: f64) -> Result<RadialProfile> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::Param(format!("cutoff width ε = {eps} outside (0, 1)")));
    }
    Ok(RadialProfile::analytic(Arc::new(LogCutoff { eps }), 3))
}

/// 1D grid for `H^s(ℝ³)` norms of radial data via `r·φ(|r|)`.
pub fn radial3d_grid() -> TorusGrid {
    TorusGrid { dim: 1, l: 4.0, n: 65536 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma1Datum {
    pub n: usize,
    /// δ (n = 2) or cutoff width ε (n = 3).
    pub delta: f64,
    /// Normalized datum with `z(1, 0) = 1`.
    #[serde(skip, default = "empty_profile")]
    pub phi: RadialProfile,
    /// `z(1, 0)` of the un-normalized profile.
    pub z_value_at_10: f64,
    /// `H^{n/2−1}` norm of the un-normalized profile.
    pub psi_norm: f64,
    /// `H^{n/2−1}` norm of `phi`.
    pub norm: f64,
}

fn empty_profile() -> RadialProfile {
    RadialProfile::from_fn(|_| 0.0, (0.0, 0.0), 2)
}

/// Counterexample data sequence for `n ∈ {2, 3}` over a strictly decreasing parameter list.
pub fn lemma1_sequence(n: usize, deltas: &[f64]) -> Result<Vec<Lemma1Datum>> {
    if deltas.is_empty() || deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::Param(format!("parameter list {deltas:?} must be nonempty and strictly decreasing")));
    }
    let out: Vec<Lemma1Datum> = deltas.iter().map(|&d| lemma1_datum(n, d)).collect::<Result<_>>()?;
    if let Some(w) = out.windows(2).find(|w| !(w[1].norm < w[0].norm)) {
        return Err(LabError::Param(format!(
            "norm does not decay: {} (δ = {}) → {} (δ = {})",
            w[0].norm, w[0].delta, w[1].norm, w[1].delta
        )));
    }
    Ok(out)
}

pub fn lemma1_datum(n: usize, delta: f64) -> Result<Lemma1Datum> {
    match n {
        2 => {
            let psi = psi_smooth(delta_family(delta)?)?;
            let z10 = radial_even_representation(&psi, 2)?;
            let psi_norm = psi.l2_norm(2);
            Ok(Lemma1Datum { n, delta, phi: psi.scaled(1.0 / z10), z_value_at_10: z10, psi_norm, norm: psi_norm / z10 })
        }
        3 => {
            let phi = log_cutoff(delta)?;
            let z10 = kirchhoff_3d_origin(&phi)?;
            let norm = radial3d_sobolev_norm(&phi, 0.5, false, radial3d_grid())?;
            Ok(Lemma1Datum { n, delta, phi, z_value_at_10: z10, psi_norm: norm, norm })
        }
        _ => Err(LabError::Param(format!("sequence factory supports n ∈ {{2, 3}}, got {n}"))),
    }
}

/// Time step of the strip scan.
pub const STRIP_TIME_STEP: f64 = 1.0 / 256.0;

/// `z̃ = z/(±m)` normalized by its maximum modulus `m` on the strip, attained at `(t_j, x_j)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizedZ {
    #[serde(skip, default = "empty_profile")]
    pub phi: RadialProfile,
    pub t_j: f64,
    /// `1 − t_j²`.
    pub eps_j: f64,
    pub shift: [f64; 2],
    pub m_j: f64,
    pub sign: f64,
    pub time_step: f64,
    /// Largest sampled `|z̃|` over the strip verification grid.
    pub strip_max: f64,
    pub strip_samples: usize,
    /// The refined maximum sits at an end of its search bracket.
    pub boundary_warning: bool,
}

impl NormalizedZ {
    pub fn z(&self, r: f64) -> Result<f64> {
        radial2d::z(&self.phi, self.eps_j, r)
    }

    pub fn dz_dt(&self, r: f64) -> Result<f64> {
        radial2d::dz_dt(&self.phi, self.eps_j, r)
    }
}

fn eps_of(t: f64) -> f64 {
    (1.0 - t) * (1.0 + t)
}

/// Strip normalization of an n = 2 datum: maximum modulus 1 on `[0, 1] × ℝ²`.
pub fn corollary1_normalize(datum: &Lemma1Datum) -> Result<NormalizedZ> {
    if datum.n != 2 {
        return Err(LabError::Param(format!("strip normalization needs n = 2, got {}", datum.n)));
    }
    normalize_profile(&datum.phi)
}

/// Scan `|z(t, 0)|` on `t = k/256`, refine in `log ε` (log scan, then golden
/// section), rescale, and verify `|z̃| ≤ 1` on a (time × geometric radius) grid.
pub fn normalize_profile(phi: &RadialProfile) -> Result<NormalizedZ> {
    let steps = (1.0 / STRIP_TIME_STEP).round() as usize;
    let zabs = |eps: f64| radial2d::z(phi, eps, 0.0).map(f64::abs);
    let mut best = (0usize, 0.0f64);
    let mut grid_vals = Vec::with_capacity(steps);
    for k in 1..=steps {
        let v = zabs(eps_of(k as f64 * STRIP_TIME_STEP))?;
        grid_vals.push(v);
        if v > best.1 {
            best = (k, v);
        }
    }
    if best.1 == 0.0 {
        return Err(LabError::Param("solution vanishes on the sampled strip".into()));
    }
    let k = best.0;
    let eps_hi = eps_of((k - 1) as f64 * STRIP_TIME_STEP);
    let eps_lo = if k == steps { f64::EPSILON * 1e-2 } else { eps_of((k + 1) as f64 * STRIP_TIME_STEP) };
    let (mut a, mut b) = (eps_lo.ln(), eps_hi.ln());
    // coarse log scan guards against several local maxima inside the bracket
    let m = 64;
    let mut scan_best = (a, -1.0);
    for i in 0..=m {
        let le = a + (b - a) * i as f64 / m as f64;
        let v = zabs(le.exp())?;
        if v > scan_best.1 {
            scan_best = (le, v);
        }
    }
    let step = (b - a) / m as f64;
    let boundary_warning = scan_best.0 <= a + 0.5 * step || scan_best.0 >= b - 0.5 * step;
    a = (scan_best.0 - step).max(a);
    b = (scan_best.0 + step).min(b);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - gr * (b - a), a + gr * (b - a));
    let (mut f1, mut f2) = (zabs(x1.exp())?, zabs(x2.exp())?);
    while b - a > 1e-7 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = zabs(x2.exp())?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = zabs(x1.exp())?;
        }
    }
    let (mut le, mut mv) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    if scan_best.1 > mv {
        le = scan_best.0;
        mv = scan_best.1;
    }
    let eps_j = le.exp();
    let t_j = (1.0 - eps_j).sqrt();
    let signed = radial2d::z(phi, eps_j, 0.0)?;
    let sign = signed.signum();
    let nphi = phi.scaled(sign / mv);
    // verification on the strip: time grid × {0} ∪ geometric radii
    let mut radii = vec![0.0];
    radii.extend((0..24).map(|i| 1e-6 * (3.0f64 / 1e-6).powf(i as f64 / 23.0)));
    let mut strip_max = 1.0f64;
    let mut strip_samples = 0;
    for kk in 1..=steps {
        let e = eps_of(kk as f64 * STRIP_TIME_STEP);
        for &r in &radii {
            let v = if r == 0.0 { grid_vals[kk - 1] / mv } else { radial2d::z(&nphi, e, r)?.abs() };
            strip_max = strip_max.max(v);
            strip_samples += 1;
        }
    }
    for &r in &radii[1..] {
        strip_max = strip_max.max(radial2d::z(&nphi, eps_j, r)?.abs());
        strip_samples += 1;
    }
    if strip_max > 1.0 + 1e-9 {
        return Err(LabError::Resolution(format!(
            "sampled |z̃| reaches {strip_max} > 1 away from the axis maximum; refine the strip scan"
        )));
    }
    Ok(NormalizedZ {
        phi: nphi,
        t_j,
        eps_j,
        shift: [0.0, 0.0],
        m_j: mv,
        sign,
        time_step: STRIP_TIME_STEP,
        strip_max,
        strip_samples,
        boundary_warning,
    })
}

/// [`corollary1_normalize`] with an on-disk cache of the strip maximum, keyed by
/// `(n, δ, time step, constants version)`. A hit skips the strip scan and
/// rebuilds `φ̃` from the stored sign and maximum.
pub fn corollary1_normalize_cached(datum: &Lemma1Datum, cache_dir: Option<&std::path::Path>) -> Result<NormalizedZ> {
    let Some(dir) = cache_dir else {
        return corollary1_normalize(datum);
    };
    let steps = (1.0 / STRIP_TIME_STEP).round() as usize;
    let key = format!("z_n{}_d{:e}_ts{}_v{}.json", datum.n, datum.delta, steps, crate::constants::CONSTANTS_VERSION);
    let path = dir.join(key);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(mut nz) = serde_json::from_str::<NormalizedZ>(&text) {
            nz.phi = datum.phi.scaled(nz.sign / nz.m_j);
            return Ok(nz);
        }
    }
    let nz = corollary1_normalize(datum)?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(&path, serde_json::to_string(&nz)?)?;
    Ok(nz)
}

/// Half-level radius `r*` and `R = 2/r*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenRadius {
    pub r_star: f64,
    pub r_big: f64,
}

/// Largest `r*` with `z̃(t_j, r) ≥ 1/2` for all sampled `r ≤ r*` (64 geometric
/// samples from `10⁻³√ε_j` to 2, then bisection in `log r`).
pub fn choose_r(nz: &NormalizedZ) -> Result<ChosenRadius> {
    choose_r_with(|r| nz.z(r), nz.eps_j)
}

pub fn choose_r_with(zf: impl Fn(f64) -> Result<f64>, eps: f64) -> Result<ChosenRadius> {
    let lo = 1e-3 * eps.abs().sqrt().max(1e-9);
    let hi = 2.0f64;
    let k = 64;
    let radii: Vec<f64> = (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect();
    let fail = radii.iter().map(|&r| zf(r).map(|v| v < 0.5)).collect::<Result<Vec<bool>>>()?;
    let i_f = match fail.iter().position(|&f| f) {
        Some(i) => i,
        None => return Ok(ChosenRadius { r_star: hi, r_big: 2.0 / hi }),
    };
    if i_f < 2 {
        return Err(LabError::Resolution(format!("half-level crossing at sample {i_f}: radius below resolution")));
    }
    let (mut a, mut b) = (radii[i_f - 1].ln(), radii[i_f].ln());
    for _ in 0..50 {
        let mid = 0.5 * (a + b);
        if zf(mid.exp())? >= 0.5 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let r_star = a.exp();
    Ok(ChosenRadius { r_star, r_big: 2.0 / r_star })
}

/// Grid version: nodes sorted by radius; `r*` is the last radius before the
/// first node with `z < 1/2`.
pub fn choose_r_grid(z: &ScalarField) -> Result<ChosenRadius> {
    let g = z.grid;
    let mut nodes: Vec<(f64, f64)> = (0..g.len()).map(|i| (g.radius(i), z.values[i])).collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut r_star = 0.0;
    let mut failed = false;
    for (r, v) in nodes {
        if v < 0.5 {
            failed = true;
            break;
        }
        r_star = r;
    }
    if !failed {
        r_star = g.l;
    }
    if r_star < 2.0 * g.h() {
        return Err(LabError::Resolution(format!("r* = {r_star} below two grid cells (h = {})", g.h())));
    }
    Ok(ChosenRadius { r_star, r_big: 2.0 / r_star })
}

/// `B(r) = exp(1 − 1/(1 − r²))` on `r < 1`.
pub fn bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / ((1.0 - r) * (1.0 + r))).exp()
    }
}

/// `χ(r) = B(r) − b B(r/2)`.
#[derive(Debug)]
pub struct ChiBump {
    pub b: f64,
}

impl RadialFunction for ChiBump {
    fn eval_ru(&self, r: f64, _u: f64) -> f64 {
        bump(r) - self.b * bump(0.5 * r)
    }
    fn support(&self) -> (f64, f64) {
        (0.0, 2.0)
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![1.0]
    }
}

/// Reference mean-zero bump with `κ = ‖χ‖_{Ḣ^{n/2−1}}`.
#[derive(Clone, Debug)]
pub struct ChiReference {
    pub n: usize,
    pub b: f64,
    pub profile: RadialProfile,
    pub kappa: f64,
    /// `‖χ‖_{L²(ℝⁿ)}`.
    pub l2: f64,
}

/// `χ = B(r) − 2^{−n} B(r/2)`, so that `∫_{ℝⁿ} χ = 0`.
pub fn chi_mean_zero(n: usize) -> Result<ChiReference> {
    if n != 2 && n != 3 {
        return Err(LabError::Param(format!("χ reference supports n ∈ {{2, 3}}, got {n}")));
    }
    let b = 0.5f64.powi(n as i32);
    let profile = RadialProfile::analytic(Arc::new(ChiBump { b }), n);
    let l2 = profile.l2_norm(n);
    let kappa = if n == 2 { l2 } else { radial3d_sobolev_norm(&profile, 0.5, true, TorusGrid { dim: 1, l: 8.0, n: 8192 })? };
    if kappa < 1e-6 {
        return Err(LabError::Param(format!("κ = {kappa} too small")));
    }
    Ok(ChiReference { n, b, profile, kappa, l2 })
}

/// `∫_{ℝⁿ} χ` by radial quadrature.
pub fn chi_integral(chi: &ChiReference) -> f64 {
    let area = crate::field::sphere_area(chi.n);
    let f = |r: f64| chi.profile.eval(r) * r.powi(chi.n as i32 - 1);
    area * crate::quad::gauss_kronrod(&f, &[0.0, 1.0, 2.0], 1e-15, 1e-14, 2000).map(|x| x.0).unwrap_or(f64::NAN)
}

/// `M·χ(R·)` on a grid, with `b` re-solved from lattice sums so the discrete
/// integral vanishes to roundoff.
pub fn chi_on_grid(r_scale: f64, amplitude: f64, grid: TorusGrid) -> Result<ScalarField> {
    let inner = ScalarField::from_values(grid, (0..grid.len()).map(|i| bump(r_scale * grid.radius(i))).collect())?;
    let outer = ScalarField::from_values(grid, (0..grid.len()).map(|i| bump(0.5 * r_scale * grid.radius(i))).collect())?;
    let si: f64 = inner.values.iter().sum();
    let so: f64 = outer.values.iter().sum();
    if so == 0.0 {
        return Err(LabError::Resolution(format!("χ(R·) with R = {r_scale} not resolved on the grid")));
    }
    let b = si / so;
    Ok(inner.zip_with(&outer, |a, c| amplitude * (a - b * c)))
}

/// `v_{R,M,T}`: the free wave with `v(T) = 0`, `∂_t v(T) = M χ(R·)`.
#[derive(Clone, Debug)]
pub struct RescaledWave {
    pub r_scale: f64,
    pub m: f64,
    pub t_final: f64,
    pub kappa: f64,
    pub state0: WaveState,
    /// Max-norm error of `propagate(state0, T)` against the prescribed state, relative to its scale.
    pub round_trip_error: f64,
    /// `‖v₀‖_{H^{n/2}} + ‖v₁‖_{H^{n/2−1}}`.
    pub init_norm: f64,
}

impl RescaledWave {
    pub fn propagator(&self) -> Propagator {
        Propagator::new(&self.state0)
    }

    /// `max |v|` over the sampled times.
    pub fn linf_over(&self, times: &[f64]) -> f64 {
        let p = self.propagator();
        times.iter().map(|&t| p.at(t).u.max_abs()).fold(0.0, f64::max)
    }
}

pub fn rescaled_family(chi: &ChiReference, r_scale: f64, m: f64, t_final: f64, grid: TorusGrid) -> Result<RescaledWave> {
    if !(r_scale >= 1.0) || !(m >= 0.0) || !(0.0..=1.0).contains(&t_final) {
        return Err(LabError::Param(format!("need R ≥ 1, M ≥ 0, T ∈ [0, 1]; got R = {r_scale}, M = {m}, T = {t_final}")));
    }
    if grid.dim != chi.n {
        return Err(LabError::Grid(format!("grid dimension {} ≠ χ dimension {}", grid.dim, chi.n)));
    }
    if 2.0 / r_scale + 1.0 > grid.l - 1.0 {
        return Err(LabError::Param(format!("support 2/R + 1 does not fit in the box of half-width {}", grid.l)));
    }
    let ut = chi_on_grid(r_scale, m, grid)?;
    let at_t = WaveState::new(ScalarField::zeros(grid), ut, t_final)?;
    let state0 = spectral_propagate(&at_t, 0.0);
    let back = spectral_propagate(&state0, t_final);
    let scale = at_t.ut.max_abs().max(f64::MIN_POSITIVE);
    let err = back
        .u
        .values
        .iter()
        .zip(&at_t.u.values)
        .chain(back.ut.values.iter().zip(&at_t.ut.values))
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let round_trip_error = if m == 0.0 { err } else { err / scale };
    if round_trip_error > 1e-10 {
        return Err(LabError::Resolution(format!("round trip error {round_trip_error:e}")));
    }
    let half = 0.5 * grid.dim as f64;
    let init_norm = sobolev_norm(&state0.u, half, false)? + sobolev_norm(&state0.ut, half - 1.0, false)?;
    Ok(RescaledWave { r_scale, m, t_final, kappa: chi.kappa, state0, round_trip_error, init_norm })
}

/// Embedded field of a normalized datum on a grid (for spectral cross-checks).
pub fn embed(phi: &RadialProfile, grid: TorusGrid) -> Result<ScalarField> {
    radial_embed(phi, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_family_half() {
        let f = delta_family(0.5).unwrap();
        assert!((f.p1 - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((f.p - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((f.q - 0.875f64.sqrt()).abs() < 1e-15);
        assert!((f.q1 - 0.9375f64.sqrt()).abs() < 1e-15);
        assert!(delta_family(0.6).is_err() && delta_family(0.0).is_err());
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chi_has_zero_mean() {
        for n in [2, 3] {
            let c = chi_mean_zero(n).unwrap();
            assert!(chi_integral(&c).abs() < 1e-12);
        }
        let c = chi_mean_zero(2).unwrap();
        assert!((c.kappa - 0.706_107_5).abs() < 1e-6);
    }

    #[test]
    fn choose_r_grid_on_cosine() {
        let g = TorusGrid::new(2, 4.0, 256).unwrap();
        let f = crate::field::sample(|x| (x[0] * x[0] + x[1] * x[1]).sqrt().cos(), g).unwrap();
        let c = choose_r_grid(&f).unwrap();
        assert!((c.r_star - PI / 3.0).abs() < g.h());
    }
}
