//! Ratio statistics for the product and composition inequalities behind the
//! commutator estimate, measured on a seeded random family of smooth pairs
//! and re-measured after doubling the grid resolution.

use super::rel_drift;
use crate::construct::{bump, smooth_step};
use crate::error::{LabError, Result};
use crate::family::{random_family, BumpSum};
use crate::field::{ScalarField, TorusGrid};
use crate::geometry::moser_ratio;
use crate::norms::{difference, fractional_integral_seminorm, leibniz_expand, lp_norm, rescale, sobolev_norm};
use serde::{Deserialize, Serialize};

/// Allowed relative change of a measured constant under `N → 2N`.
pub const DRIFT_TOL: f64 = 0.15;
pub const LEIBNIZ_TOL: f64 = 1e-12;
/// `f` is cut off at this radius in the plateau family; `g` is lifted on it.
pub const PLATEAU_RADIUS: f64 = 9.0;
/// Width of the plateau's smooth descent.
pub const PLATEAU_RAMP: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixConfig {
    pub seed: u64,
    /// Coarse grid; the refined grid doubles `N`.
    pub grid: TorusGrid,
    pub pairs: usize,
    pub s: f64,
    pub lambda: f64,
    /// Members used for the `I_{s,2}/Ḣ^s` window (grids `2N` and `4N`).
    pub window_functions: usize,
    pub c_primes: Vec<f64>,
    pub linf_levels: Vec<f64>,
}

impl Default for AppendixConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            grid: TorusGrid { dim: 2, l: 12.0, n: 128 },
            pairs: 100,
            s: 0.5,
            lambda: 0.75,
            window_functions: 50,
            c_primes: vec![0.0, 0.01, 0.1, 1.0],
            linf_levels: vec![0.5, 1.0, 2.0, 4.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub name: String,
    pub count: usize,
    pub excluded: usize,
    pub coarse_max: f64,
    pub fine_max: f64,
    pub coarse_mean: f64,
    pub drift: f64,
    pub finite: bool,
    pub stable: bool,
}

impl RatioStats {
    fn new(name: &str, coarse: &[Option<f64>], fine: &[Option<f64>]) -> Self {
        let c: Vec<f64> = coarse.iter().flatten().cloned().collect();
        let f: Vec<f64> = fine.iter().flatten().cloned().collect();
        let max = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
        let coarse_max = max(&c);
        let fine_max = max(&f);
        let drift = rel_drift(coarse_max, fine_max);
        let finite = !c.is_empty() && c.iter().chain(&f).all(|x| x.is_finite());
        Self {
            name: name.into(),
            count: c.len(),
            excluded: coarse.len() - c.len(),
            coarse_max,
            fine_max,
            coarse_mean: c.iter().sum::<f64>() / c.len().max(1) as f64,
            drift,
            finite,
            stable: finite && drift < DRIFT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePoint {
    pub c_prime: f64,
    /// Largest `c` with `‖fg‖_{Ḣ^s} ≥ cC₁‖f‖_{Ḣ^s} − c′‖f‖_{H^s}‖g‖_{H^{n/2}}` on every pair.
    pub c_max_coarse: f64,
    pub c_max_fine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundSweep {
    /// Smallest `min_{supp f} |g|` over the plateau pairs.
    pub c1_min: f64,
    pub points: Vec<FeasiblePoint>,
    pub nonempty: bool,
    pub drift: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionStats {
    pub map: String,
    pub linf_level: f64,
    pub stats: RatioStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalWindow {
    pub functions: usize,
    pub coarse: [f64; 2],
    pub fine: [f64; 2],
    /// `max(hi, 1/lo)` on each grid.
    pub c_coarse: f64,
    pub c_fine: f64,
    pub drift: f64,
    /// Continuum value of the ratio for `n = 2, s = 1/2`.
    pub continuum: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub config: AppendixConfig,
    pub leibniz_max_error: f64,
    pub product: RatioStats,
    pub product_split: RatioStats,
    /// Range of `ratio(S₂f, g)/ratio(f, g)` over the family (coarse grid).
    pub dilation_factor: [f64; 2],
    pub lower_bound: LowerBoundSweep,
    pub composition: Vec<CompositionStats>,
    pub fractional_window: FractionalWindow,
    pub pass: bool,
}

fn grid_with(g: TorusGrid, n: usize) -> TorusGrid {
    TorusGrid { n, ..g }
}

/// `‖fg‖_{H^s} / (‖f‖_{H^s}(‖g‖_∞ + ‖g‖_{H^{n/2}}))`; `None` when the denominator vanishes.
fn product_ratio(f: &ScalarField, g: &ScalarField, s: f64) -> Result<Option<f64>> {
    let half = 0.5 * f.grid.dim as f64;
    let den = sobolev_norm(f, s, false)? * (lp_norm(g, f64::INFINITY) + sobolev_norm(g, half, false)?);
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some(sobolev_norm(&f.zip_with(g, |a, b| a * b), s, false)? / den))
}

/// `‖fg‖_{H^s} / (‖f‖_{H^{n/2+s−λ}} ‖g‖_{H^λ})`.
fn split_ratio(f: &ScalarField, g: &ScalarField, s: f64, lambda: f64) -> Result<Option<f64>> {
    let half = 0.5 * f.grid.dim as f64;
    let den = sobolev_norm(f, half + s - lambda, false)? * sobolev_norm(g, lambda, false)?;
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some(sobolev_norm(&f.zip_with(g, |a, b| a * b), s, false)? / den))
}

/// `f` cut off smoothly inside `|x| < 9`, `g` lifted by a plateau of height
/// `max|g| + 1` over `|x| ≤ 9`, so that `|g| ≥ 1` on the support of `f`.
fn plateau_pair(f: &BumpSum, g: &BumpSum, grid: TorusGrid) -> Result<(ScalarField, ScalarField, f64)> {
    let fs = f.sample(grid)?;
    let gs = g.sample(grid)?;
    let lift = gs.max_abs() + 1.0;
    let mut fv = Vec::with_capacity(grid.len());
    let mut gv = Vec::with_capacity(grid.len());
    let mut c1 = f64::INFINITY;
    for i in 0..grid.len() {
        let r = grid.radius(i);
        let fi = fs.values[i] * bump(r / PLATEAU_RADIUS);
        let gi = gs.values[i] + lift * (1.0 - smooth_step((r - PLATEAU_RADIUS) / PLATEAU_RAMP));
        if fi != 0.0 {
            c1 = c1.min(gi.abs());
        }
        fv.push(fi);
        gv.push(gi);
    }
    Ok((ScalarField::from_values(grid, fv)?, ScalarField::from_values(grid, gv)?, c1))
}

/// Per pair: `(‖fg‖_{Ḣ^s}, ‖f‖_{H^s}‖g‖_{H^{n/2}}, C₁‖f‖_{Ḣ^s})`.
fn lower_bound_terms(f: &ScalarField, g: &ScalarField, c1: f64, s: f64) -> Result<(f64, f64, f64)> {
    let half = 0.5 * f.grid.dim as f64;
    let a = sobolev_norm(&f.zip_with(g, |x, y| x * y), s, true)?;
    let b = sobolev_norm(f, s, false)? * sobolev_norm(g, half, false)?;
    Ok((a, b, c1 * sobolev_norm(f, s, true)?))
}

fn c_max(terms: &[(f64, f64, f64)], c_prime: f64) -> f64 {
    terms.iter().filter(|t| t.2 > 0.0).map(|(a, b, d)| (a + c_prime * b) / d).fold(f64::INFINITY, f64::min)
}

fn leibniz_error(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    let fg = f.zip_with(g, |a, b| a * b);
    let mut worst = 0.0f64;
    for h in [[1i64, 0], [0, 1], [2, -1], [3, 2]] {
        for k in 1..=3 {
            let lhs = difference(&fg, &h, k)?;
            let rhs = leibniz_expand(f, g, &h, k)?;
            for (x, y) in lhs.values.iter().zip(&rhs.values) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(worst)
}

fn window(fs: &[BumpSum], grid: TorusGrid, s: f64) -> Result<[f64; 2]> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for f in fs {
        let x = f.sample(grid)?;
        let r = fractional_integral_seminorm(&x, s, 2.0)?.norm / sobolev_norm(&x, s, true)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok([lo, hi])
}

pub fn appendix_ratio_suite(cfg: &AppendixConfig) -> Result<AppendixReport> {
    if cfg.grid.dim != 2 || cfg.pairs == 0 {
        return Err(LabError::Param("the ratio suite needs a 2D grid and at least one pair".into()));
    }
    if cfg.grid.l < PLATEAU_RADIUS + PLATEAU_RAMP + 1.0 {
        return Err(LabError::Grid(format!("L = {} does not hold the plateau family", cfg.grid.l)));
    }
    let coarse = cfg.grid;
    let fine = grid_with(coarse, 2 * coarse.n);
    let fam = random_family(cfg.seed, 2 * cfg.pairs, 2);
    let pairs: Vec<(&BumpSum, &BumpSum)> = fam.chunks(2).map(|c| (&c[0], &c[1])).collect();

    let mut prod = (Vec::new(), Vec::new());
    let mut split = (Vec::new(), Vec::new());
    let mut lb = (Vec::new(), Vec::new());
    let mut c1_min = f64::INFINITY;
    let mut dil = [f64::INFINITY, 0.0f64];
    let mut leib = 0.0f64;
    let mut comp: Vec<(String, f64, Vec<Option<f64>>, Vec<Option<f64>>)> = Vec::new();
    let maps: [(&str, fn(f64) -> f64); 2] = [("sin", f64::sin), ("two_sin_sq_half", |x| 2.0 * (0.5 * x).sin().powi(2))];
    for (name, _) in &maps {
        for &lvl in &cfg.linf_levels {
            comp.push((name.to_string(), lvl, Vec::new(), Vec::new()));
        }
    }
    for (k, (f, g)) in pairs.iter().enumerate() {
        for (grid, fine_pass) in [(coarse, false), (fine, true)] {
            let fs = f.sample(grid)?;
            let gs = g.sample(grid)?;
            let pr = product_ratio(&fs, &gs, cfg.s)?;
            let sr = split_ratio(&fs, &gs, cfg.s, cfg.lambda)?;
            let (pf, pg, c1) = plateau_pair(f, g, grid)?;
            let lt = lower_bound_terms(&pf, &pg, c1, cfg.s)?;
            c1_min = c1_min.min(c1);
            let mut ci = 0;
            for (_, map) in &maps {
                for &lvl in &cfg.linf_levels {
                    let m = fs.max_abs();
                    let v = if m > 0.0 { Some(moser_ratio(map, &fs.scale(lvl / m), cfg.s)?) } else { None };
                    if fine_pass {
                        comp[ci].3.push(v);
                    } else {
                        comp[ci].2.push(v);
                    }
                    ci += 1;
                }
            }
            if fine_pass {
                prod.1.push(pr);
                split.1.push(sr);
                lb.1.push(lt);
            } else {
                prod.0.push(pr);
                split.0.push(sr);
                lb.0.push(lt);
                if let Some(p) = pr {
                    if let Some(q) = product_ratio(&rescale(&fs, 2.0)?, &gs, cfg.s)? {
                        dil[0] = dil[0].min(q / p);
                        dil[1] = dil[1].max(q / p);
                    }
                }
                if k < 10 {
                    leib = leib.max(leibniz_error(&fs, &gs)?);
                }
            }
        }
    }
    let product = RatioStats::new("product", &prod.0, &prod.1);
    let product_split = RatioStats::new("product_split", &split.0, &split.1);
    let points: Vec<FeasiblePoint> = cfg
        .c_primes
        .iter()
        .map(|&cp| FeasiblePoint { c_prime: cp, c_max_coarse: c_max(&lb.0, cp), c_max_fine: c_max(&lb.1, cp) })
        .collect();
    let nonempty = points.iter().any(|p| p.c_max_coarse > 0.0 && p.c_max_fine > 0.0 && p.c_max_coarse.is_finite());
    let lb_drift = points.first().map_or(f64::INFINITY, |p| rel_drift(p.c_max_coarse, p.c_max_fine));
    let lower_bound = LowerBoundSweep { c1_min, points, nonempty, drift: lb_drift, stable: lb_drift < DRIFT_TOL };
    let composition: Vec<CompositionStats> = comp
        .into_iter()
        .map(|(map, lvl, c, f)| CompositionStats { stats: RatioStats::new(&format!("{map}@{lvl}"), &c, &f), map, linf_level: lvl })
        .collect();

    let wf = &fam[..cfg.window_functions.min(fam.len())];
    let wc = window(wf, grid_with(coarse, 2 * coarse.n), cfg.s)?;
    let wfi = window(wf, grid_with(coarse, 4 * coarse.n), cfg.s)?;
    let c_of = |w: [f64; 2]| w[1].max(1.0 / w[0]);
    let (c_coarse, c_fine) = (c_of(wc), c_of(wfi));
    let wdrift = rel_drift(c_coarse, c_fine);
    let fractional_window = FractionalWindow {
        functions: wf.len(),
        coarse: wc,
        fine: wfi,
        c_coarse,
        c_fine,
        drift: wdrift,
        continuum: (4.0 * std::f64::consts::PI).sqrt(),
        stable: wdrift < DRIFT_TOL && c_coarse.is_finite(),
    };

    let pass = leib <= LEIBNIZ_TOL
        && product.stable
        && product_split.stable
        && composition.iter().all(|c| c.stats.stable)
        && lower_bound.nonempty
        && lower_bound.stable
        && fractional_window.stable
        && dil[1].is_finite();
    Ok(AppendixReport {
        config: cfg.clone(),
        leibniz_max_error: leib,
        product,
        product_split,
        dilation_factor: dil,
        lower_bound,
        composition,
        fractional_window,
        pass,
    })
}
