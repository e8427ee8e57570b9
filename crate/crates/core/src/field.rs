//! Sampled fields on periodic boxes and radial profiles.
//!
//! A [`TorusGrid`] covers `[−L, L)^dim` with `N` nodes per axis; node `k`
//! sits at `x = (k − N/2)·h`, so the origin is a lattice node and lattice
//! reflections `k → (N − k) mod N` negate coordinates exactly.

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub dim: usize,
    pub l: f64,
    pub n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, l: f64, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(LabError::Grid(format!("dim {dim} not in {{1,2,3}}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(LabError::Grid(format!("N = {n} must be even and ≥ 8")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(LabError::Grid(format!("half width L = {l} must be positive")));
        }
        Ok(Self { dim, l, n })
    }

    /// Grid suitable for counterexample runs (supports in B(0,10) for |t| ≤ 1).
    pub fn check_counterexample(&self) -> Result<()> {
        if self.l < 12.0 {
            return Err(LabError::Grid(format!("L = {} < 12 lets periodic images interact", self.l)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.h()
    }

    /// Multi-index (row-major, last axis fastest) of a flat index.
    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let mut m = [0usize; 3];
        for a in (0..self.dim).rev() {
            m[a] = idx % self.n;
            idx /= self.n;
        }
        m
    }

    pub fn flat_index(&self, m: &[usize]) -> usize {
        m.iter().take(self.dim).fold(0, |acc, &k| acc * self.n + k)
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(m[a]);
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.point(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Flat index of the origin node.
    pub fn origin(&self) -> usize {
        self.flat_index(&[self.n / 2; 3])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
    pub time_stamp: Option<f64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], time_stamp: None }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::Grid(format!("{} values for a grid of {}", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(LabError::NonFinite { node: grid.multi_index(i)[..grid.dim].to_vec(), value: values[i] });
        }
        Ok(Self { grid, values, time_stamp: None })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), time_stamp: self.time_stamp }
    }

    pub fn zip_with(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, o.grid, "fields live on different grids");
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&o.values).map(|(&a, &b)| f(a, b)).collect(),
            time_stamp: self.time_stamp,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at a multi-index.
    pub fn at(&self, m: &[usize]) -> f64 {
        self.values[self.grid.flat_index(m)]
    }
}

/// Vector-valued field (values in ℝ^m).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: TorusGrid,
    pub components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(grid: TorusGrid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() < 2 {
            return Err(LabError::Param("vector fields need at least two components".into()));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(LabError::Grid("component length mismatch".into()));
            }
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(LabError::NonFinite { node: grid.multi_index(i)[..grid.dim].to_vec(), value: c[i] });
            }
        }
        Ok(Self { grid, components })
    }

    pub fn component(&self, i: usize) -> ScalarField {
        ScalarField { grid: self.grid, values: self.components[i].clone(), time_stamp: None }
    }

    /// Pointwise Euclidean norm.
    pub fn pointwise_norm(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }
}

/// Pointwise evaluation of `f` at every lattice node.
pub fn sample(f: impl Fn(&[f64]) -> f64, grid: TorusGrid) -> Result<ScalarField> {
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.point(i);
        let v = f(&x[..grid.dim]);
        if !v.is_finite() {
            return Err(LabError::NonFinite { node: grid.multi_index(i)[..grid.dim].to_vec(), value: v });
        }
        values.push(v);
    }
    Ok(ScalarField { grid, values, time_stamp: None })
}

/// Rectangle (= trapezoid on the torus) rule. Values are summed in sorted
/// order with Neumaier compensation, so any permutation of the nodes (a
/// lattice shift in particular) gives a bit-identical result.
pub fn integrate(f: &ScalarField) -> f64 {
    let mut v = f.values.clone();
    v.sort_unstable_by(f64::total_cmp);
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in v {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    f.grid.cell_volume() * (sum + c)
}

/// Periodic translate `f_j(x) = f(x + j·h)`.
pub fn lattice_shift(f: &ScalarField, j: &[i64]) -> ScalarField {
    let g = f.grid;
    let n = g.n;
    // pad to three axes: sizes (n0, n1, n2), last axis fastest
    let mut sizes = [1usize; 3];
    let mut shifts = [0i64; 3];
    for a in 0..g.dim {
        sizes[3 - g.dim + a] = n;
        shifts[3 - g.dim + a] = j.get(a).copied().unwrap_or(0);
    }
    let maps: Vec<Vec<usize>> = (0..3)
        .map(|a| (0..sizes[a]).map(|k| (k as i64 + shifts[a]).rem_euclid(sizes[a] as i64) as usize).collect())
        .collect();
    let mut out = Vec::with_capacity(g.len());
    for a in 0..sizes[0] {
        let sa = maps[0][a] * sizes[1];
        for b in 0..sizes[1] {
            let sb = (sa + maps[1][b]) * sizes[2];
            out.extend(maps[2].iter().map(|&c| f.values[sb + c]));
        }
    }
    ScalarField { grid: g, values: out, time_stamp: f.time_stamp }
}

// ---------------------------------------------------------------------------
// Radial profiles
// ---------------------------------------------------------------------------

/// Analytically backed radial function. `eval_ru` receives both `r` and
/// `u = 1 − r²`; profiles living near the unit sphere should read `u`.
pub trait RadialFunction: Send + Sync + Debug {
    fn eval_ru(&self, r: f64, u: f64) -> f64;

    /// Closed interval outside which the function vanishes (or is negligible).
    fn support(&self) -> (f64, f64);

    /// Radii where the function is not smooth or changes scale.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// For profiles concentrated at the unit sphere: breakpoints expressed as
    /// `u = 1 − r²` values (descending). Quadratures then run in `−log u`.
    fn unit_sphere_breaks(&self) -> Option<Vec<f64>> {
        None
    }

    /// Radial derivative; default is a centered difference.
    fn deriv(&self, r: f64) -> f64 {
        let h = 1e-5 * r.abs().max(1e-2);
        let f = |x: f64| self.eval_ru(x, (1.0 - x) * (1.0 + x));
        (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h)
    }
}

#[derive(Clone, Debug)]
pub enum ProfileRepr {
    /// Uniform samples on `[0, r_max]`, linearly interpolated; zero beyond.
    Sampled { r_max: f64, samples: Vec<f64> },
    Analytic(Arc<dyn RadialFunction>),
}

#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub repr: ProfileRepr,
    pub dim_hint: usize,
}

#[derive(Debug)]
struct Scaled(Arc<dyn RadialFunction>, f64);

impl RadialFunction for Scaled {
    fn eval_ru(&self, r: f64, u: f64) -> f64 {
        self.1 * self.0.eval_ru(r, u)
    }
    fn support(&self) -> (f64, f64) {
        self.0.support()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
    fn unit_sphere_breaks(&self) -> Option<Vec<f64>> {
        self.0.unit_sphere_breaks()
    }
    fn deriv(&self, r: f64) -> f64 {
        self.1 * self.0.deriv(r)
    }
}

/// Closure-backed radial function with a declared support.
pub struct FnRadial<F: Fn(f64) -> f64 + Send + Sync> {
    pub f: F,
    pub support: (f64, f64),
}

impl<F: Fn(f64) -> f64 + Send + Sync> Debug for FnRadial<F> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "FnRadial(support = {:?})", self.support)
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> RadialFunction for FnRadial<F> {
    fn eval_ru(&self, r: f64, _u: f64) -> f64 {
        (self.f)(r)
    }
    fn support(&self) -> (f64, f64) {
        self.support
    }
}

impl RadialProfile {
    pub fn sampled(r_max: f64, samples: Vec<f64>, dim_hint: usize) -> Result<Self> {
        if samples.len() < 2 || !(r_max > 0.0) {
            return Err(LabError::Param("sampled profile needs ≥ 2 samples and r_max > 0".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(LabError::NonFinite { node: vec![i], value: samples[i] });
        }
        Ok(Self { repr: ProfileRepr::Sampled { r_max, samples }, dim_hint })
    }

    pub fn analytic(f: Arc<dyn RadialFunction>, dim_hint: usize) -> Self {
        Self { repr: ProfileRepr::Analytic(f), dim_hint }
    }

    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static, support: (f64, f64), dim_hint: usize) -> Self {
        Self::analytic(Arc::new(FnRadial { f, support }), dim_hint)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_ru(r, (1.0 - r) * (1.0 + r))
    }

    pub fn eval_ru(&self, r: f64, u: f64) -> f64 {
        match &self.repr {
            ProfileRepr::Sampled { r_max, samples } => {
                if r > *r_max || r < 0.0 {
                    return 0.0;
                }
                let m = samples.len() - 1;
                let x = r / r_max * m as f64;
                let k = (x.floor() as usize).min(m - 1);
                let t = x - k as f64;
                samples[k] * (1.0 - t) + samples[k + 1] * t
            }
            ProfileRepr::Analytic(f) => f.eval_ru(r, u),
        }
    }

    pub fn deriv(&self, r: f64) -> f64 {
        match &self.repr {
            ProfileRepr::Analytic(f) => f.deriv(r),
            ProfileRepr::Sampled { r_max, samples } => {
                let h = r_max / (samples.len() - 1) as f64;
                (self.eval(r + 0.5 * h) - self.eval((r - 0.5 * h).max(0.0))) / (r + 0.5 * h - (r - 0.5 * h).max(0.0))
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match &self.repr {
            ProfileRepr::Sampled { r_max, .. } => (0.0, *r_max),
            ProfileRepr::Analytic(f) => f.support(),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            ProfileRepr::Sampled { .. } => Vec::new(),
            ProfileRepr::Analytic(f) => f.breakpoints(),
        }
    }

    pub fn unit_sphere_breaks(&self) -> Option<Vec<f64>> {
        match &self.repr {
            ProfileRepr::Sampled { .. } => None,
            ProfileRepr::Analytic(f) => f.unit_sphere_breaks(),
        }
    }

    /// `c·self`, keeping the representation.
    pub fn scaled(&self, c: f64) -> Self {
        match &self.repr {
            ProfileRepr::Sampled { r_max, samples } => Self {
                repr: ProfileRepr::Sampled { r_max: *r_max, samples: samples.iter().map(|v| c * v).collect() },
                dim_hint: self.dim_hint,
            },
            ProfileRepr::Analytic(f) => Self::analytic(Arc::new(Scaled(f.clone(), c)), self.dim_hint),
        }
    }

    /// Uniformly resampled copy on `[0, r_max]`.
    pub fn resample(&self, r_max: f64, count: usize) -> Result<Self> {
        let s = (0..count).map(|i| self.eval(r_max * i as f64 / (count - 1) as f64)).collect();
        Self::sampled(r_max, s, self.dim_hint)
    }

    /// Estimated first radial derivative at 0 (should vanish for an even extension).
    pub fn odd_derivative_at_origin(&self) -> f64 {
        match &self.repr {
            ProfileRepr::Sampled { r_max, samples } => {
                let h = r_max / (samples.len() - 1) as f64;
                (samples[1] - samples[0]) / h
            }
            ProfileRepr::Analytic(f) => f.deriv(1e-6),
        }
    }

    /// Panel edges covering the support, split at the breakpoints.
    pub fn panels(&self) -> Vec<f64> {
        let (a, b) = self.support();
        let mut e = vec![a, b];
        e.extend(self.breakpoints().into_iter().filter(|&x| x > a && x < b));
        if let Some(us) = self.unit_sphere_breaks() {
            e.extend(us.into_iter().map(|u| (1.0 - u).max(0.0).sqrt()).filter(|&x| x > a && x < b));
        }
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }

    /// ∫ |f|^p over ℝ^dim (radially), using the unit-sphere coordinate when available.
    pub fn lp_norm_pow(&self, p: f64, dim: usize) -> f64 {
        let area = sphere_area(dim);
        if let Some(us) = self.unit_sphere_breaks() {
            // r = sqrt(1 − e^{−w}),  r dr = e^{−w} dw / 2
            let ws: Vec<f64> = us.iter().map(|u| -u.ln()).collect();
            let f = |w: f64| {
                let u = (-w).exp();
                let r = (1.0 - u).sqrt();
                self.eval_ru(r, u).abs().powf(p) * r.powi(dim as i32 - 2) * 0.5 * u
            };
            let mut acc = 0.0;
            for e in ws.windows(2) {
                acc += crate::quad::gauss_kronrod(&f, &[e[0], e[1]], 1e-300, 1e-13, 4000)
                    .map(|x| x.0)
                    .unwrap_or(f64::NAN);
            }
            return area * acc;
        }
        let f = |r: f64| self.eval(r).abs().powf(p) * r.powi(dim as i32 - 1);
        area * crate::quad::gauss_kronrod(&f, &self.panels(), 1e-300, 1e-13, 4000).map(|x| x.0).unwrap_or(f64::NAN)
    }

    pub fn l2_norm(&self, dim: usize) -> f64 {
        self.lp_norm_pow(2.0, dim).sqrt()
    }
}

/// Surface area of the unit sphere in ℝ^dim.
pub fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        d => 2.0 * PI * sphere_area(d - 2) / (d as f64 - 2.0),
    }
}

/// Embed a radial profile on a grid. Sampled profiles are linearly
/// interpolated; a profile that does not cover a lattice radius must be zero
/// at its last sample.
pub fn radial_embed(p: &RadialProfile, grid: TorusGrid) -> Result<ScalarField> {
    if let ProfileRepr::Sampled { r_max, samples } = &p.repr {
        let reach = grid.l * (grid.dim as f64).sqrt();
        let tail = samples.last().copied().unwrap_or(0.0);
        if *r_max < reach && tail.abs() > 1e-14 * samples.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
            return Err(LabError::ProfileRange { radius: reach, r_max: *r_max });
        }
    }
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let v = p.eval(grid.radius(i));
        if !v.is_finite() {
            return Err(LabError::NonFinite { node: grid.multi_index(i)[..grid.dim].to_vec(), value: v });
        }
        values.push(v);
    }
    Ok(ScalarField { grid, values, time_stamp: None })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FieldJson {
    dim: usize,
    n: usize,
    l: f64,
    time_stamp: Option<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    n: usize,
    l: f64,
    t: f64,
    u: Vec<f64>,
    ut: Vec<f64>,
}

fn header(grid: &TorusGrid, t: Option<f64>) -> Vec<u8> {
    let mut b = Vec::with_capacity(32);
    b.extend_from_slice(&(grid.dim as u64).to_le_bytes());
    b.extend_from_slice(&(grid.n as u64).to_le_bytes());
    b.extend_from_slice(&grid.l.to_le_bytes());
    b.extend_from_slice(&t.unwrap_or(f64::NAN).to_le_bytes());
    b
}

fn parse_header(b: &[u8]) -> Result<(TorusGrid, Option<f64>)> {
    if b.len() < 32 {
        return Err(LabError::Param("field file shorter than its header".into()));
    }
    let w = |i: usize| <[u8; 8]>::try_from(&b[8 * i..8 * i + 8]).expect("8 bytes");
    let dim = u64::from_le_bytes(w(0)) as usize;
    let n = u64::from_le_bytes(w(1)) as usize;
    let l = f64::from_le_bytes(w(2));
    let t = f64::from_le_bytes(w(3));
    Ok((TorusGrid::new(dim, l, n)?, if t.is_nan() { None } else { Some(t) }))
}

fn floats(b: &[u8]) -> Vec<f64> {
    b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect()
}

fn is_json(path: &std::path::Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// Write a field as binary (`.field`) or JSON (`.json`) according to the extension.
pub fn write_field(path: &std::path::Path, f: &ScalarField) -> Result<()> {
    if is_json(path) {
        let j = FieldJson { dim: f.grid.dim, n: f.grid.n, l: f.grid.l, time_stamp: f.time_stamp, values: f.values.clone() };
        std::fs::write(path, serde_json::to_vec(&j)?)?;
    } else {
        let mut b = header(&f.grid, f.time_stamp);
        for v in &f.values {
            b.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(path, b)?;
    }
    Ok(())
}

pub fn read_field(path: &std::path::Path) -> Result<ScalarField> {
    if is_json(path) {
        let j: FieldJson = serde_json::from_slice(&std::fs::read(path)?)?;
        let grid = TorusGrid::new(j.dim, j.l, j.n)?;
        let mut f = ScalarField::from_values(grid, j.values)?;
        f.time_stamp = j.time_stamp;
        return Ok(f);
    }
    let b = std::fs::read(path)?;
    let (grid, t) = parse_header(&b)?;
    let mut f = ScalarField::from_values(grid, floats(&b[32..]))?;
    f.time_stamp = t;
    Ok(f)
}

/// Write a wave state: header, then `u`, then `ut` (binary) or a JSON mirror.
pub fn write_state(path: &std::path::Path, s: &crate::wave::WaveState) -> Result<()> {
    let g = s.u.grid;
    if is_json(path) {
        let j = StateJson { dim: g.dim, n: g.n, l: g.l, t: s.t, u: s.u.values.clone(), ut: s.ut.values.clone() };
        std::fs::write(path, serde_json::to_vec(&j)?)?;
    } else {
        let mut b = header(&g, Some(s.t));
        for v in s.u.values.iter().chain(&s.ut.values) {
            b.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(path, b)?;
    }
    Ok(())
}

pub fn read_state(path: &std::path::Path) -> Result<crate::wave::WaveState> {
    let (grid, t, u, ut) = if is_json(path) {
        let j: StateJson = serde_json::from_slice(&std::fs::read(path)?)?;
        (TorusGrid::new(j.dim, j.l, j.n)?, j.t, j.u, j.ut)
    } else {
        let b = std::fs::read(path)?;
        let (grid, t) = parse_header(&b)?;
        let v = floats(&b[32..]);
        if v.len() != 2 * grid.len() {
            return Err(LabError::Grid("state file length does not match its header".into()));
        }
        let (u, ut) = v.split_at(grid.len());
        (grid, t.unwrap_or(0.0), u.to_vec(), ut.to_vec())
    };
    crate::wave::WaveState::new(ScalarField::from_values(grid, u)?, ScalarField::from_values(grid, ut)?, t)
}
