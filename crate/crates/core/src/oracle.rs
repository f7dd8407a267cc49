//! Double-precision reference transforms.
//!
//! [`dft_direct`] evaluates the DFT sum term by term and is the ground truth for
//! every numerical check; [`fft_recursive`] is the textbook even/odd split and is
//! cross-checked against it.

use std::f64::consts::PI;

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// `W_n^k = exp(-j 2 pi k / n)`.
pub fn twiddle(k: usize, n: usize) -> Complex64 {
    let (sin, cos) = (-2.0 * PI * k as f64 / n as f64).sin_cos();
    Complex64::new(cos, sin)
}

/// `Y(k) = sum_n x(n) W_N^(nk)`, O(N^2).
pub fn dft_direct(x: &[Complex64]) -> Result<Vec<Complex64>> {
    dft_direct_with(Execution::default(), x)
}

/// [`dft_direct`] with explicit scheduling; output bins are independent.
pub fn dft_direct_with(exec: Execution, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    // W^(nk) only depends on nk mod N
    let roots: Vec<Complex64> = (0..n).map(|m| twiddle(m, n)).collect();
    Ok(par::map_range(exec, n, |k| {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| xi * roots[(i * k) % n])
            .sum()
    }))
}

/// Radix-2 decimation in time: `Y(k) = E(k) + W_N^k O(k)`, recursively.
pub fn fft_recursive(x: &[Complex64]) -> Result<Vec<Complex64>> {
    crate::log2_exact(x.len())?;
    Ok(split(x))
}

fn split(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 1 {
        return x.to_vec();
    }
    let even: Vec<Complex64> = x.iter().step_by(2).copied().collect();
    let odd: Vec<Complex64> = x.iter().skip(1).step_by(2).copied().collect();
    let (e, o) = (split(&even), split(&odd));
    let half = n / 2;
    let mut out = vec![Complex64::default(); n];
    for k in 0..half {
        let t = twiddle(k, n) * o[k];
        out[k] = e[k] + t;
        out[k + half] = e[k] - t;
    }
    out
}

/// `max_k max(|re(a_k - b_k)|, |im(a_k - b_k)|)`.
pub fn max_abs_error(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(p, q)| (p.re - q.re).abs().max((p.im - q.im).abs()))
        .fold(0.0, f64::max))
}
