//! Acceptance criteria 1–10, evaluated as stated. One line per criterion;
//! where a literal closed form disagrees with direct computation, an extra
//! `supplementary` line reports the corrected comparison (it does not change
//! the verdict of the criterion).
//!
//! Run with `cargo test --release -p wavemap-core --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::Instant;
use wavemap_core::construct::{chi_mean_zero, delta_family, lemma1_datum, psi_exact, psi_smooth};
use wavemap_core::experiment::{appendix_ratio_suite, prop1_radial_run, scaling_suite, theorem1_gap_run, AppendixConfig, GapRunConfig};
use wavemap_core::field::{sample, RadialProfile, ScalarField, TorusGrid};
use wavemap_core::geometry::{geodesic_constants, make_preset, TargetPreset};
use wavemap_core::spectral::{derivative, Transform};
use wavemap_core::wave::{kernel_solution_2d, kirchhoff_3d_origin, radial_even_representation, spectral_propagate, Propagator, WaveState};

struct Line {
    id: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Sheet {
    lines: Vec<Line>,
}

impl Sheet {
    fn record(&mut self, id: impl Into<String>, pass: bool, detail: String) {
        let l = Line { id: id.into(), pass, detail };
        println!("{}: {} — {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail);
        self.lines.push(l);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn sphere_config() -> GapRunConfig {
    GapRunConfig {
        n: 2,
        target: TargetPreset::SphereGreatCircle,
        deltas: vec![0.3, 0.1, 0.03, 0.01],
        lambda: 20.0,
        mu: 0.1,
        r0: 100.0,
        grid: TorusGrid { dim: 2, l: 16.0, n: 512 },
        seed: 1,
        negative_control: false,
    }
}

fn criterion_1(sh: &mut Sheet) {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_corr = 0.0f64;
    for d in [0.3, 0.1, 0.03] {
        let fam = delta_family(d).unwrap();
        let quad = psi_exact(fam).lp_norm_pow(2.0, 2);
        let bracket = 1.0 / (1.0 - fam.q * fam.q).ln() - 1.0 / (1.0 - fam.p * fam.p).ln();
        worst = worst.max(rel(quad, 0.5 * bracket));
        worst_corr = worst_corr.max(rel(quad, PI * bracket));
    }
    let secs = t0.elapsed().as_secs_f64();
    sh.record(
        "criterion 1",
        worst < 1e-6 && secs < 5.0,
        format!("‖ψ‖² vs ½(1/log(1−q²) − 1/log(1−p²)): max rel err {worst:.3e} (tol 1e-6), {secs:.2}s"),
    );
    sh.record("criterion 1 supplementary", worst_corr < 1e-6, format!("‖ψ‖² vs π(1/log(1−q²) − 1/log(1−p²)): max rel err {worst_corr:.3e}"));
}

fn criterion_2(sh: &mut Sheet) {
    let t0 = Instant::now();
    let mut err = 0.0f64;
    let mut err_corr = 0.0f64;
    let mut smooth = Vec::new();
    for d in [0.3, 0.1, 0.03] {
        let fam = delta_family(d).unwrap();
        let ratio = ((1.0 - fam.q * fam.q).ln() / (1.0 - fam.p * fam.p).ln()).abs().ln();
        let v = kernel_solution_2d(&psi_exact(fam), 1.0, [0.0, 0.0]).unwrap().value;
        err = err.max((v - ratio / (4.0 * PI)).abs());
        err_corr = err_corr.max((v - 0.5 * ratio).abs());
        smooth.push(kernel_solution_2d(&psi_smooth(fam).unwrap(), 1.0, [0.0, 0.0]).unwrap().value);
    }
    let secs = t0.elapsed().as_secs_f64();
    let (lo, hi) = (1.5f64.ln() / (4.0 * PI), 4f64.ln() / (4.0 * PI));
    let in_bracket = smooth.iter().all(|&v| (lo..=hi).contains(&v));
    sh.record(
        "criterion 2",
        err < 1e-4 && in_bracket && secs < 30.0,
        format!(
            "z(1,0) vs (1/4π)log|log(1−q²)/log(1−p²)| = {:.7}: max err {err:.3e} (tol 1e-4); smooth {smooth:.4?} in [{lo:.4}, {hi:.4}]: {in_bracket}; {secs:.2}s",
            1.5f64.ln() / (4.0 * PI)
        ),
    );
    let (clo, chi) = (0.5 * 1.5f64.ln(), 0.5 * 4f64.ln());
    let corr_bracket = smooth.iter().all(|&v| (clo..=chi).contains(&v));
    sh.record(
        "criterion 2 supplementary",
        err_corr < 1e-4 && corr_bracket,
        format!("vs ½log|…|: max err {err_corr:.3e}; smooth in [{clo:.4}, {chi:.4}]: {corr_bracket}"),
    );
}

/// `exp(−a r²)(1 + b r²)`: five smooth radial data, disjoint from the calibration family.
fn smooth_family() -> Vec<RadialProfile> {
    [(0.7f64, 0.5f64), (1.2, -0.3), (2.5, 1.0), (0.9, 2.0), (1.7, 0.0)]
        .into_iter()
        .map(|(a, b)| RadialProfile::from_fn(move |r: f64| (-a * r * r).exp() * (1.0 + b * r * r), (0.0, (42.0 / a).sqrt()), 2))
        .collect()
}

fn criterion_3(sh: &mut Sheet) {
    let t0 = Instant::now();
    let grid = TorusGrid { dim: 2, l: 16.0, n: 512 };
    let mut worst = 0.0f64;
    for phi in smooth_family() {
        let ut = sample(|x| phi.eval((x[0] * x[0] + x[1] * x[1]).sqrt()), grid).unwrap();
        let st = WaveState::new(ScalarField::zeros(grid), ut, 0.0).unwrap();
        let spec = spectral_propagate(&st, 1.0).u.values[grid.origin()];
        let kern = kernel_solution_2d(&phi, 1.0, [0.0, 0.0]).unwrap().value;
        let repr = radial_even_representation(&phi, 2).unwrap();
        worst = worst.max((spec - kern).abs()).max((spec - repr).abs()).max((kern - repr).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    sh.record(
        "criterion 3",
        worst < 1e-3 && secs < 120.0,
        format!("spectral / kernel / representation at (1,0), 5 data, N=512: max spread {worst:.3e} (tol 1e-3), {secs:.2}s"),
    );
}

fn criterion_4(sh: &mut Sheet) {
    let grid = TorusGrid { dim: 2, l: 16.0, n: 256 };
    let tr = Transform::new(grid);
    let u = sample(|x| (-(x[0] - 1.0).powi(2) - 0.5 * x[1] * x[1]).exp() + 0.5 * (-(x[0] + 2.0).powi(2) - (x[1] - 1.0).powi(2)).exp(), grid).unwrap();
    // an x-derivative has no zero mode, as Ḣ^{−1/2} requires
    let ut = derivative(&tr, &sample(|x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp(), grid).unwrap(), 0);
    let s0 = WaveState::new(u, ut, 0.0).unwrap();
    let p = Propagator::new(&s0);
    let mut drift = 0.0f64;
    for s in [0.5, 1.0] {
        let e0 = p.energy_at(0.0, s).unwrap();
        for k in 1..=64 {
            drift = drift.max(rel(p.energy_at(k as f64 / 64.0, s).unwrap(), e0));
        }
    }
    let back = spectral_propagate(&spectral_propagate(&s0, 1.0), 0.0);
    let rt = back
        .u
        .values
        .iter()
        .zip(&s0.u.values)
        .chain(back.ut.values.iter().zip(&s0.ut.values))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    sh.record(
        "criterion 4",
        drift < 1e-12 && rt < 1e-12,
        format!("energy drift over t ∈ [0,1], s ∈ {{½,1}}: {drift:.3e} (tol 1e-12); round trip {rt:.3e} (tol 1e-12)"),
    );
}

fn criterion_5(sh: &mut Sheet) {
    let chi = chi_mean_zero(2).unwrap();
    let rep = scaling_suite(&chi, TorusGrid { dim: 2, l: 8.0, n: 512 }).unwrap();
    let mut slopes_ok = true;
    let mut parts = Vec::new();
    for row in &rep.rows {
        let ok = (row.slope - row.expected).abs() <= 0.05;
        slopes_ok &= ok;
        parts.push(format!("s={}: slope {:.4} vs {:.1}", row.s, row.slope, row.expected));
    }
    let linf_ok = rep.linf_variation < 0.15;
    sh.record(
        "criterion 5",
        slopes_ok && linf_ok,
        format!("{}; L∞ constant variation {:.4} (tol 0.15)", parts.join(", "), rep.linf_variation),
    );
}

fn criterion_6(sh: &mut Sheet) {
    let t0 = Instant::now();
    let rep = theorem1_gap_run(&sphere_config()).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let dd: Vec<f64> = rep.rows.iter().map(|r| r.data_distance).collect();
    let gap: Vec<f64> = rep.rows.iter().map(|r| r.gap).collect();
    let decreasing = dd.windows(2).all(|w| w[1] < w[0]);
    let halved = dd[dd.len() - 1] <= 0.5 * dd[0];
    let mut rate_err = 0.0f64;
    for (k, w) in dd.windows(2).enumerate() {
        let (a, b) = (rep.rows[k].delta, rep.rows[k + 1].delta);
        let predicted = (a.ln() / b.ln()).sqrt();
        rate_err = rate_err.max(rel(w[1] / w[0], predicted));
    }
    let rate_ok = rate_err <= 0.2;
    let gap_ok = gap[0] > 0.0 && gap.iter().all(|&g| g >= 0.5 * gap[0]);
    let last = rep.rows.last().unwrap().terms;
    let dom = last.main >= 2.0 * (last.commutator + last.energy);
    sh.record(
        "criterion 6",
        decreasing && halved && rate_ok && gap_ok && dom && secs < 900.0,
        format!(
            "data_distance {dd:.4?} decreasing: {decreasing}; final/initial {:.3} ≤ 0.5: {halved}; log-rate err {rate_err:.3} ≤ 0.2: {rate_ok}; gap {gap:.4?} ≥ ½gap₁: {gap_ok}; main {:.4} ≥ 2(comm {:.4} + energy {:.4}): {dom}; {secs:.1}s",
            dd[dd.len() - 1] / dd[0],
            last.main,
            last.commutator,
            last.energy
        ),
    );
}

fn criterion_7(sh: &mut Sheet) {
    let cfg = GapRunConfig { target: TargetPreset::FlatLine, negative_control: true, ..sphere_config() };
    let rep = theorem1_gap_run(&cfg).unwrap();
    let worst = rep.rows.iter().map(|r| r.gap / r.data_distance).fold(0.0, f64::max);
    sh.record("criterion 7", worst <= 1.01, format!("flat target: max gap/data_distance {worst:.6} (tol 1.01)"));
}

fn criterion_8(sh: &mut Sheet) {
    let t0 = Instant::now();
    let (c0, _, _) = geodesic_constants(&make_preset(TargetPreset::SphereGreatCircle).unwrap()).unwrap();
    let cfg = GapRunConfig { mu: 0.5 * c0, r0: 0.5, ..sphere_config() };
    let rep = prop1_radial_run(&cfg).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let c3 = rep.constants.c3.unwrap();
    let certs: Vec<f64> = rep.rows.iter().map(|r| r.gap * r.gap + 0.25 * c0 * c0 * (r.data_distance / cfg.mu).powi(2)).collect();
    let ok = certs.iter().all(|&c| c >= 0.95 * c3);
    sh.record(
        "criterion 8",
        ok && secs < 600.0,
        format!("‖∂_t(u¹−u²)(1)‖² + (c₀²/4)‖φ_j‖² = {certs:.4?} ≥ 0.95·c₃ = {:.3e}: {ok}; {secs:.1}s", 0.95 * c3),
    );
}

fn criterion_9(sh: &mut Sheet) {
    let rep = appendix_ratio_suite(&AppendixConfig::default()).unwrap();
    let leib = rep.leibniz_max_error <= 1e-12;
    let fw = &rep.fractional_window;
    let window_ok = fw.stable && fw.drift < 0.15;
    let mut ratios = vec![&rep.product, &rep.product_split];
    ratios.extend(rep.composition.iter().map(|c| &c.stats));
    let ratios_ok = ratios.iter().all(|r| r.finite && r.drift < 0.15);
    let worst_drift = ratios.iter().map(|r| r.drift).fold(0.0, f64::max);
    let lb = rep.lower_bound.nonempty;
    sh.record(
        "criterion 9",
        leib && window_ok && ratios_ok && lb,
        format!(
            "Leibniz err {:.2e}; I/Ḣ window C {:.4} → {:.4} (drift {:.4}); ratio maxima finite, worst drift {worst_drift:.4}: {ratios_ok}; lower-bound region nonempty: {lb}",
            rep.leibniz_max_error, fw.c_coarse, fw.c_fine, fw.drift
        ),
    );
}

fn criterion_10(sh: &mut Sheet) {
    // plateau: 1 on [0, 1.5], smooth ramp to 0 at 2.5
    let plateau = RadialProfile::from_fn(|r: f64| wavemap_core::construct::smooth_step(2.5 - r), (0.0, 2.5), 3);
    let k1 = kirchhoff_3d_origin(&plateau).unwrap();
    let norms: Vec<f64> = (1..=5).map(|j| lemma1_datum(3, 0.5f64.powi(j)).unwrap().norm).collect();
    let kj: Vec<f64> = (1..=5).map(|j| kirchhoff_3d_origin(&lemma1_datum(3, 0.5f64.powi(j)).unwrap().phi).unwrap()).collect();
    let exact = (k1 - 1.0).abs() <= 1e-12 && kj.iter().all(|k| (k - 1.0).abs() <= 1e-12);
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let drop = ratios.iter().all(|&r| r <= 0.75);
    sh.record(
        "criterion 10",
        exact && drop,
        format!("Kirchhoff on plateau data {k1:.15} (log-cutoff {kj:.15?}); ‖φ_j‖_{{H^½}} step ratios {ratios:.4?} ≤ 0.75: {drop}"),
    );
    let rate_ok = ratios.iter().enumerate().all(|(k, &r)| {
        let j = (k + 1) as f64;
        rel(r, (j / (j + 1.0)).sqrt()) <= 0.3
    });
    sh.record("criterion 10 supplementary", rate_ok, "step ratios within 30% of √(j/(j+1)) (|log ε|^{-½} decay)".into());
}

#[test]
fn acceptance_criteria() {
    let mut sh = Sheet::default();
    criterion_1(&mut sh);
    criterion_2(&mut sh);
    criterion_3(&mut sh);
    criterion_4(&mut sh);
    criterion_5(&mut sh);
    criterion_6(&mut sh);
    criterion_7(&mut sh);
    criterion_8(&mut sh);
    criterion_9(&mut sh);
    criterion_10(&mut sh);
    let failed: Vec<&str> = sh.lines.iter().filter(|l| !l.pass && !l.id.contains("supplementary")).map(|l| l.id.as_str()).collect();
    let supp_failed: Vec<&str> = sh.lines.iter().filter(|l| !l.pass && l.id.contains("supplementary")).map(|l| l.id.as_str()).collect();
    println!("summary: {} of 10 criteria pass; failing: {failed:?}", 10 - failed.len());
    assert!(supp_failed.is_empty(), "supplementary checks failed: {supp_failed:?}");
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
