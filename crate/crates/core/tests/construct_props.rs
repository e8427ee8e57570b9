use proptest::prelude::*;
use wavemap_core::construct::{chi_mean_zero, chi_on_grid, lemma1_datum, lemma1_sequence, rescaled_family};
use wavemap_core::field::{integrate, TorusGrid};
use wavemap_core::wave::radial2d::{z_cone, Cone, ENGINE_TOL};
use wavemap_core::wave::{kernel_solution_2d, radial_even_representation, spectral_propagate};

/// The normalized n = 2 data give `z(1, 0) = 1` by the kernel quadrature, the
/// radial representation and the radial engine. (A grid leg cannot resolve
/// the shell of width ~δ² at desk resolution.)
#[test]
fn normalized_data_point_value_three_ways() {
    for d in [0.3, 0.1, 0.03] {
        let phi = lemma1_datum(2, d).unwrap().phi;
        let k = kernel_solution_2d(&phi, 1.0, [0.0, 0.0]).unwrap().value;
        let r = radial_even_representation(&phi, 2).unwrap();
        let e = z_cone(&phi, &Cone::from_t(1.0, 0.0), ENGINE_TOL).unwrap();
        for v in [k, r, e] {
            assert!((v - 1.0).abs() < 1e-3, "δ = {d}: {k} {r} {e}");
        }
    }
}

#[test]
fn profiles_fit_inside_the_box() {
    let l = 16.0;
    for d in [0.3, 0.01] {
        assert!(lemma1_datum(2, d).unwrap().phi.support().1 < l - 2.0);
    }
    for e in [0.5, 0.0625] {
        assert!(lemma1_datum(3, e).unwrap().phi.support().1 < l - 2.0);
    }
    for n in [2, 3] {
        assert!(chi_mean_zero(n).unwrap().profile.support().1 < l - 2.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn norms_decay_along_sequences(mut ds in prop::collection::btree_set(1u32..=50, 2..5)) {
        // δ = k/100, strictly decreasing
        let deltas: Vec<f64> = std::mem::take(&mut ds).into_iter().rev().map(|k| k as f64 / 100.0).collect();
        let seq = lemma1_sequence(2, &deltas).unwrap();
        prop_assert!(seq.windows(2).all(|w| w[1].norm < w[0].norm));
    }

    #[test]
    fn rescaled_round_trip(r in 1.0f64..6.0, m in 0.1f64..50.0, t in 0.0f64..1.0) {
        let chi = chi_mean_zero(2).unwrap();
        let g = TorusGrid::new(2, 8.0, 256).unwrap();
        let w = rescaled_family(&chi, r, m, t, g).unwrap();
        let at_t = spectral_propagate(&w.state0, t);
        let target = chi_on_grid(r, m, g).unwrap();
        let scale = target.max_abs();
        let err = at_t.u.values.iter().map(|x| x.abs())
            .chain(at_t.ut.values.iter().zip(&target.values).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        prop_assert!(err <= 1e-10 * scale, "{err:e}");
        prop_assert!(w.round_trip_error <= 1e-10);
    }

    #[test]
    fn chi_on_grid_has_zero_mean(r in 1.0f64..8.0, m in 0.1f64..100.0) {
        let g = TorusGrid::new(2, 8.0, 256).unwrap();
        let f = chi_on_grid(r, m, g).unwrap();
        prop_assert!(integrate(&f).abs() <= 1e-12 * m);
    }
}

#[test]
fn n3_sequence_decays() {
    let eps: Vec<f64> = (1..=4).map(|j| 0.5f64.powi(j)).collect();
    let seq = lemma1_sequence(3, &eps).unwrap();
    assert!(seq.windows(2).all(|w| w[1].norm < w[0].norm));
    assert!(lemma1_sequence(3, &[0.25, 0.5]).is_err());
}
