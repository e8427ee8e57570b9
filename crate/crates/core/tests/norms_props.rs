use proptest::prelude::*;
use wavemap_core::family::random_family;
use wavemap_core::field::{lattice_shift, ScalarField, TorusGrid};
use wavemap_core::norms::{besov_norm, difference, fractional_integral_seminorm, lp_norm, sobolev_norm};

fn grid() -> TorusGrid {
    TorusGrid::new(2, 12.0, 64).unwrap()
}

fn member(seed: u64) -> ScalarField {
    random_family(seed, 1, 2)[0].sample(grid()).unwrap()
}

/// Mean-zero member, so that negative homogeneous orders are defined.
fn centred(seed: u64) -> ScalarField {
    let f = member(seed);
    let m = f.values.iter().sum::<f64>() / f.values.len() as f64;
    f.map(|v| v - m)
}

fn tri(a: f64, b: f64, c: f64) -> bool {
    a <= (b + c) * (1.0 + 1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval(seed in 0u64..10_000, homogeneous in any::<bool>()) {
        let f = member(seed);
        let a = sobolev_norm(&f, 0.0, homogeneous).unwrap();
        let b = lp_norm(&f, 2.0);
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn triangle_inequality_fourier_and_lp(s1 in 0u64..5000, s2 in 0u64..5000, s in -1.0f64..2.0, p in 1.0f64..6.0, homogeneous in any::<bool>()) {
        let (f, g) = (centred(s1), centred(s2));
        let fg = f.zip_with(&g, |a, b| a + b);
        prop_assert!(tri(sobolev_norm(&fg, s, homogeneous).unwrap(), sobolev_norm(&f, s, homogeneous).unwrap(), sobolev_norm(&g, s, homogeneous).unwrap()));
        prop_assert!(tri(lp_norm(&fg, p), lp_norm(&f, p), lp_norm(&g, p)));
        prop_assert!(tri(lp_norm(&fg, f64::INFINITY), lp_norm(&f, f64::INFINITY), lp_norm(&g, f64::INFINITY)));
    }

    #[test]
    fn group_law_is_bit_exact(seed in 0u64..10_000, i in 1usize..4, j in 1usize..4, h in prop::array::uniform2(-5i64..6)) {
        let f = member(seed);
        let lhs = difference(&difference(&f, &h, j).unwrap(), &h, i).unwrap();
        let rhs = difference(&f, &h, i + j).unwrap();
        prop_assert_eq!(lhs.values, rhs.values);
    }

    #[test]
    fn homogeneous_norm_is_shift_invariant(seed in 0u64..10_000, s in -0.5f64..2.0, j in prop::array::uniform2(-30i64..30)) {
        let f = centred(seed);
        let a = sobolev_norm(&f, s, true).unwrap();
        let b = sobolev_norm(&lattice_shift(&f, &j), s, true).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn triangle_inequality_difference_norms(s1 in 0u64..5000, s2 in 0u64..5000, s in 0.2f64..0.9, q in 1.0f64..4.0) {
        let (f, g) = (member(s1), member(s2));
        let fg = f.zip_with(&g, |a, b| a + b);
        let i = |x: &ScalarField| fractional_integral_seminorm(x, s, 2.0).unwrap().norm;
        prop_assert!(tri(i(&fg), i(&f), i(&g)));
        let b = |x: &ScalarField| besov_norm(x, s, 2.0, q).unwrap().norm;
        prop_assert!(tri(b(&fg), b(&f), b(&g)));
    }
}

/// `I_{s,2}/‖·‖_{Ḣ^s}` over the standard family lies in `[1/C, C]` with `C`
/// stable under `N = 256 → 512`.
#[test]
fn equivalence_window_is_grid_stable() {
    let fam = random_family(20240611, 8, 2);
    let c_at = |n: usize| {
        let g = TorusGrid::new(2, 12.0, n).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for f in &fam {
            let x = f.sample(g).unwrap();
            let r = fractional_integral_seminorm(&x, 0.5, 2.0).unwrap().norm / sobolev_norm(&x, 0.5, true).unwrap();
            lo = lo.min(r);
            hi = hi.max(r);
        }
        hi.max(1.0 / lo)
    };
    let (c1, c2) = (c_at(256), c_at(512));
    assert!(c1.is_finite() && c2.is_finite());
    assert!((c2 - c1).abs() / c1 < 0.15, "C(256) = {c1}, C(512) = {c2}");
}
