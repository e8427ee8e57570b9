//! Reproducible random smooth test functions: sums of Gaussian bumps.

use crate::error::Result;
use crate::field::{sample, ScalarField, TorusGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const BUMPS_PER_FUNCTION: usize = 10;
pub const WIDTH_RANGE: (f64, f64) = (0.5, 2.0);
pub const CENTER_RADIUS: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub width: f64,
    pub amplitude: f64,
}

/// `Σ a_k exp(−|x − c_k|² / w_k²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSum {
    pub bumps: Vec<Bump>,
}

impl BumpSum {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.bumps
            .iter()
            .map(|b| {
                let d2: f64 = x.iter().zip(&b.center).map(|(a, c)| (a - c) * (a - c)).sum();
                b.amplitude * (-d2 / (b.width * b.width)).exp()
            })
            .sum()
    }

    pub fn sample(&self, grid: TorusGrid) -> Result<ScalarField> {
        sample(|x| self.eval(x), grid)
    }
}

/// `count` functions in `dim` dimensions from a fixed seed: 10 bumps each,
/// widths in `[0.5, 2]`, centres uniform in `B(0, 6)`, amplitudes in `[−1, 1]`.
pub fn random_family(seed: u64, count: usize, dim: usize) -> Vec<BumpSum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bumps = (0..BUMPS_PER_FUNCTION)
                .map(|_| {
                    let mut c = [0.0; 3];
                    loop {
                        for a in c.iter_mut().take(dim) {
                            *a = rng.gen_range(-CENTER_RADIUS..CENTER_RADIUS);
                        }
                        if c.iter().map(|v| v * v).sum::<f64>() < CENTER_RADIUS * CENTER_RADIUS {
                            break;
                        }
                    }
                    Bump {
                        center: c,
                        width: rng.gen_range(WIDTH_RANGE.0..WIDTH_RANGE.1),
                        amplitude: rng.gen_range(-1.0..1.0),
                    }
                })
                .collect();
            BumpSum { bumps }
        })
        .collect()
}
