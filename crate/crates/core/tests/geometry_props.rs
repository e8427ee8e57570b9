use proptest::prelude::*;
use wavemap_core::family::random_family;
use wavemap_core::field::{ScalarField, TorusGrid, VectorField};
use wavemap_core::geometry::{compose, compose_dt, geodesic_constants, make_preset, GeodesicCurve, TargetPreset};
use wavemap_core::wave::{Propagator, WaveState};

fn curves() -> Vec<GeodesicCurve> {
    [TargetPreset::SphereGreatCircle, TargetPreset::CircleRadius { rho: 0.5 }, TargetPreset::CircleRadius { rho: 3.0 }]
        .into_iter()
        .map(|p| make_preset(p).unwrap())
        .collect()
}

fn field(seed: u64, amp: f64) -> ScalarField {
    random_family(seed, 1, 2)[0].sample(TorusGrid::new(2, 12.0, 32).unwrap()).unwrap().scale(amp)
}

fn max_diff(a: &VectorField, b: &VectorField) -> f64 {
    a.components.iter().zip(&b.components).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_stays_on_target(seed in 0u64..10_000, amp in 0.1f64..20.0, rho in 0.2f64..5.0) {
        let v = field(seed, amp);
        for (g, radius) in [(make_preset(TargetPreset::SphereGreatCircle).unwrap(), 1.0), (make_preset(TargetPreset::CircleRadius { rho }).unwrap(), rho)] {
            let u = compose(&g, &v).unwrap();
            for i in 0..v.values.len() {
                let d2 = u.components[0][i].powi(2) + (u.components[1][i] - radius).powi(2)
                    + u.components.get(2).map_or(0.0, |c| c[i].powi(2));
                prop_assert!((d2.sqrt() - radius).abs() < 1e-12 * radius.max(1.0));
            }
        }
    }

    #[test]
    fn chain_rule_is_second_order(s1 in 0u64..10_000, s2 in 0u64..10_000, t in 0.2f64..0.8) {
        let ut = field(s2, 1.0);
        let m = ut.values.iter().sum::<f64>() / ut.values.len() as f64;
        let p = Propagator::new(&WaveState::new(field(s1, 1.0), ut.map(|x| x - m), 0.0).unwrap());
        for g in curves() {
            let exact = compose_dt(&g, &p.at(t)).unwrap();
            let err = |tau: f64| {
                let a = compose(&g, &p.at(t + tau).u).unwrap();
                let b = compose(&g, &p.at(t - tau).u).unwrap();
                let fd = VectorField::new(a.grid, a.components.iter().zip(&b.components).map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q) / (2.0 * tau)).collect()).collect()).unwrap();
                max_diff(&fd, &exact)
            };
            let ratio = err(0.04) / err(0.02);
            prop_assert!((3.5..=4.5).contains(&ratio), "{:?}: ratio {}", g.preset, ratio);
        }
    }
}

#[test]
fn arc_length_is_unit() {
    for g in curves().into_iter().chain([make_preset(TargetPreset::FlatLine).unwrap()]) {
        for k in 0..10_000 {
            let s = -50.0 + 100.0 * k as f64 / 9_999.0;
            let d = g.d1(s);
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-10, "{:?} at {s}: {n}", g.preset);
        }
    }
}

#[test]
fn geodesic_constants_hold_on_finer_grid() {
    for g in curves() {
        let (c0, c1, j) = geodesic_constants(&g).unwrap();
        let ds = 1e-5 * (1.0 / (2.0 * c1)).max(1.0);
        let mut s = 0.0;
        while s <= c0 {
            for x in [s, -s] {
                assert!(g.d2(x)[j - 1].abs() >= c1 * (1.0 - 1e-12), "{:?}: |γ″| < c₁ at {x}", g.preset);
            }
            s += ds;
        }
        // and c₀ is not needlessly small
        assert!(g.d2(c0 * 1.001)[j - 1].abs() < c1 || g.d2(-c0 * 1.001)[j - 1].abs() < c1);
    }
}
