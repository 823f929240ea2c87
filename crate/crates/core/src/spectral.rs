//! Spectral differentiation of periodic samples.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Derivative of uniformly sampled periodic data on a period of length `period`.
/// The Nyquist mode is dropped for even lengths.
pub fn periodic_derivative(values: &[f64], period: f64) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex64::new(0.0, TAU * freq / period);
    }
    inverse.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_trig_polynomials() {
        let n = 64;
        let p = 3.0;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * p / n as f64).collect();
        let f: Vec<f64> = xs.iter().map(|x| (TAU * 2.0 * x / p).sin()).collect();
        let d = periodic_derivative(&f, p);
        for (x, v) in xs.iter().zip(d) {
            let exact = TAU * 2.0 / p * (TAU * 2.0 * x / p).cos();
            assert!((v - exact).abs() < 1e-12);
        }
    }
}
