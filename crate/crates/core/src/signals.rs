//! Test-signal generators shared by the self-test, the acceptance suite and the CLI.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{FixedComplex, FxFormat};

/// Seeded complex vector with both components uniform in `[-1, 1]`.
pub fn random_complex(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_complex_from(&mut rng, n)
}

pub fn random_complex_from(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect()
}

/// Seeded fixed-point frame with `|re|, |im| <= 1`.
pub fn random_frame(n: usize, format: FxFormat, seed: u64) -> Vec<FixedComplex> {
    quantize_all(&random_complex(n, seed), format)
}

/// Unit impulse at `index`.
pub fn impulse(n: usize, index: usize, format: FxFormat) -> Vec<FixedComplex> {
    (0..n)
        .map(|i| FixedComplex::quantize(if i == index { 1.0 } else { 0.0 }, 0.0, format))
        .collect()
}

pub fn constant(n: usize, value: Complex64, format: FxFormat) -> Vec<FixedComplex> {
    vec![FixedComplex::from_complex(value, format); n]
}

pub fn quantize_all(x: &[Complex64], format: FxFormat) -> Vec<FixedComplex> {
    x.iter()
        .map(|&z| FixedComplex::from_complex(z, format))
        .collect()
}

pub fn to_complex(x: &[FixedComplex]) -> Vec<Complex64> {
    x.iter().map(|z| z.to_complex64()).collect()
}
