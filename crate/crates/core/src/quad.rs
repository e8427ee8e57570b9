//! One-dimensional quadrature: Gauss–Legendre (fixed and composite with
//! refinement), adaptive Gauss–Kronrod 7/15, and tanh–sinh for panels with
//! endpoint singularities.

use crate::error::{LabError, Result};
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(20))
}

/// Fixed-order Gauss–Legendre on [a, b].
pub fn gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// Composite 20-point Gauss–Legendre over the given panel edges.
pub fn composite_gl<F: Fn(f64) -> f64>(f: &F, edges: &[f64], subdiv: usize) -> f64 {
    let rule = gl20();
    let mut acc = 0.0;
    for e in edges.windows(2) {
        let dh = (e[1] - e[0]) / subdiv as f64;
        for k in 0..subdiv {
            let a = e[0] + k as f64 * dh;
            acc += gl(f, a, a + dh, rule);
        }
    }
    acc
}

/// Composite Gauss–Legendre refined (panel doubling) until two successive
/// levels differ by less than `tol` (absolute). Returns (value, last difference).
pub fn composite_gl_refined<F: Fn(f64) -> f64>(
    f: &F,
    edges: &[f64],
    tol: f64,
    max_level: usize,
) -> Result<(f64, f64)> {
    let mut prev = composite_gl(f, edges, 1);
    let mut sub = 1;
    for _ in 0..max_level {
        sub *= 2;
        let cur = composite_gl(f, edges, sub);
        let diff = (cur - prev).abs();
        if diff <= tol {
            return Ok((cur, diff));
        }
        prev = cur;
    }
    Err(LabError::Quadrature {
        estimate: (composite_gl(f, edges, sub * 2) - prev).abs(),
        tol,
    })
}

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut rk = WK[7] * fc;
    let mut rg = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Seg {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}
impl PartialEq for Seg {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Seg {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive Gauss–Kronrod 7/15 over [a, b] with interior breakpoints.
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::new();
    for e in points.windows(2) {
        if e[1] > e[0] {
            let (val, err) = gk15(f, e[0], e[1]);
            heap.push(Seg { a: e[0], b: e[1], val, err });
        }
    }
    loop {
        let total: f64 = heap.iter().map(|s| s.val).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        if heap.len() >= max_segments {
            return Err(LabError::Quadrature { estimate: err, tol: abs_tol.max(rel_tol * total.abs()) });
        }
        let s = heap.pop().expect("nonempty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            // interval exhausted at machine precision; accept it
            heap.push(Seg { err: 0.0, ..s });
            continue;
        }
        for (a, b) in [(s.a, m), (m, s.b)] {
            let (val, err) = gk15(f, a, b);
            heap.push(Seg { a, b, val, err });
        }
    }
}

/// tanh–sinh quadrature on [a, b]. The integrand receives `(x, x − a, b − x)`
/// with the endpoint distances computed without cancellation, so endpoint
/// singularities (log, inverse square root) are integrated accurately.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    if half <= 0.0 {
        return (0.0, 0.0);
    }
    let tmax = 6.0;
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // 1 − tanh(u) and 1 + tanh(u) without cancellation
        let e = (-2.0 * u.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let (dm, dp) = if u >= 0.0 { (2.0 - small, small) } else { (small, 2.0 - small) };
        let da = half * dm;
        let db = half * dp;
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let x = if da < db { a + da } else { b - db };
        let v = f(x, da, db);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut est = sum * h * half;
    let mut err = f64::INFINITY;
    for _ in 0..7 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while k as f64 * h <= tmax {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let new = sum * h * half;
        err = (new - est).abs();
        est = new;
        if err <= tol * est.abs().max(1e-300) {
            break;
        }
    }
    (est, err)
}
