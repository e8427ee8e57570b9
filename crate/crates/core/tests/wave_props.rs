use proptest::prelude::*;
use wavemap_core::construct::bump;
use wavemap_core::family::random_family;
use wavemap_core::field::{sample, RadialProfile, ScalarField, TorusGrid};
use wavemap_core::wave::{kernel_solution_2d, radial_even_representation, spectral_propagate, Propagator, WaveState};

fn grid() -> TorusGrid {
    TorusGrid::new(2, 12.0, 64).unwrap()
}

fn state(seed: u64) -> WaveState {
    let fam = random_family(seed, 2, 2);
    let u = fam[0].sample(grid()).unwrap();
    let ut = fam[1].sample(grid()).unwrap();
    let m = ut.values.iter().sum::<f64>() / ut.values.len() as f64;
    WaveState::new(u, ut.map(|v| v - m), 0.0).unwrap()
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn time_reversible(seed in 0u64..10_000, t in -1.0f64..1.0) {
        let s0 = state(seed);
        let back = spectral_propagate(&spectral_propagate(&s0, t), 0.0);
        prop_assert!(max_diff(&back.u, &s0.u) < 1e-12 && max_diff(&back.ut, &s0.ut) < 1e-12);
    }

    #[test]
    fn energy_conserved(seed in 0u64..10_000) {
        let p = Propagator::new(&state(seed));
        for s in [0.5, 1.0] {
            let e0 = p.energy_at(0.0, s).unwrap();
            for k in 1..=16 {
                let e = p.energy_at(k as f64 / 16.0, s).unwrap();
                prop_assert!((e - e0).abs() < 1e-12 * e0);
            }
        }
    }

    #[test]
    fn linear(s1 in 0u64..10_000, s2 in 0u64..10_000, a in -3.0f64..3.0, b in -3.0f64..3.0, t in 0.0f64..1.0) {
        let (x, y) = (state(s1), state(s2));
        let comb = |p: &ScalarField, q: &ScalarField| p.zip_with(q, |u, v| a * u + b * v);
        let lhs = spectral_propagate(&WaveState::new(comb(&x.u, &y.u), comb(&x.ut, &y.ut), 0.0).unwrap(), t);
        let (px, py) = (spectral_propagate(&x, t), spectral_propagate(&y, t));
        let scale = 1.0 + a.abs() + b.abs();
        prop_assert!(max_diff(&lhs.u, &comb(&px.u, &py.u)) < 1e-12 * scale);
        prop_assert!(max_diff(&lhs.ut, &comb(&px.ut, &py.ut)) < 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // the bump's spectrum decays only like exp(−c√|ξ|): the support must be
    // resolved (ρ/h ≥ 128) for the leakage outside the cone to reach 1e−10
    #[test]
    fn finite_speed(rho in 2.0f64..2.4, t in 0.1f64..1.0, shift in -0.5f64..0.5) {
        let g = TorusGrid::new(2, 4.0, 512).unwrap();
        let ut = sample(|x| bump(((x[0] - shift).powi(2) + x[1] * x[1]).sqrt() / rho), g).unwrap();
        let s = spectral_propagate(&WaveState::new(ScalarField::zeros(g), ut, 0.0).unwrap(), t);
        let peak = s.u.max_abs();
        let reach = rho + t + 2.0 * g.h();
        for i in 0..g.len() {
            let x = g.point(i);
            if ((x[0] - shift).powi(2) + x[1] * x[1]).sqrt() > reach {
                prop_assert!(s.u.values[i].abs() < 1e-10 * peak, "|u| = {:e} at {:?}", s.u.values[i], x);
            }
        }
    }

    #[test]
    fn three_representations_agree(a in 0.5f64..3.0, b in -0.4f64..2.0) {
        let phi = RadialProfile::from_fn(move |r: f64| (-a * r * r).exp() * (1.0 + b * r * r), (0.0, (42.0 / a).sqrt()), 2);
        let g = TorusGrid::new(2, 16.0, 256).unwrap();
        let ut = sample(|x| phi.eval((x[0] * x[0] + x[1] * x[1]).sqrt()), g).unwrap();
        let spec = spectral_propagate(&WaveState::new(ScalarField::zeros(g), ut, 0.0).unwrap(), 1.0).u.values[g.origin()];
        let kern = kernel_solution_2d(&phi, 1.0, [0.0, 0.0]).unwrap().value;
        let repr = radial_even_representation(&phi, 2).unwrap();
        prop_assert!((spec - kern).abs() < 1e-3 && (spec - repr).abs() < 1e-3 && (kern - repr).abs() < 1e-3);
    }
}
