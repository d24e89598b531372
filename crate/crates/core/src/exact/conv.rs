//! Convolutions of polynomial-valued sequences.
//!
//! A sequence `g[q][j]` is read as `G_j(x) = sum_q g[q][j] x^q`. Products
//! convolve in `j` and multiply polynomials in `x`, truncated at a degree.

use crate::num::Field;

/// Product of two polynomial sequences, truncated to degree `deg` and length `len`.
pub fn poly_seq_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>], deg: usize, len: usize) -> Vec<Vec<F>> {
    let mut out = vec![vec![F::zero(); len]; deg + 1];
    for (d1, ar) in a.iter().enumerate().take(deg + 1) {
        for (d2, br) in b.iter().enumerate().take(deg + 1 - d1) {
            let row = &mut out[d1 + d2];
            let la = ar.len().min(len);
            for (i, ai) in ar.iter().enumerate().take(la) {
                if ai.is_zero_value() {
                    continue;
                }
                let lb = br.len().min(len - i);
                for (j, bj) in br.iter().enumerate().take(lb) {
                    row[i + j] += ai.clone() * bj.clone();
                }
            }
        }
    }
    out
}

/// `m`-fold product of `g` with itself.
pub fn poly_seq_power<F: Field>(g: &[Vec<F>], m: usize, deg: usize, len: usize) -> Vec<Vec<F>> {
    assert!(m >= 1);
    let trunc: Vec<Vec<F>> = g
        .iter()
        .take(deg + 1)
        .map(|r| r.iter().take(len).cloned().collect())
        .collect();
    let mut acc = trunc.clone();
    for _ in 1..m {
        acc = poly_seq_mul(&acc, &trunc, deg, len);
    }
    acc
}

/// Plain sequence self-convolution in `f64` via FFT, returning `len` terms.
pub fn self_convolution_fft(a: &[f64], len: usize) -> Vec<f64> {
    use rustfft::num_complex::Complex;
    use rustfft::FftPlanner;
    let size = (2 * a.len()).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..size)
        .map(|i| Complex::new(a.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in buf.iter_mut() {
        *z = *z * *z;
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / size as f64;
    buf.iter().take(len).map(|z| z.re * scale).collect()
}
