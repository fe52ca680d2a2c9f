//! Monte-Carlo estimate of ⟨exp(i∫₀ᵗω dt′)⟩ over a stationary Gaussian ω(t).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Correlation function c(τ) = ⟨ω(t+τ)ω(t)⟩ of the sampled process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKernel {
    /// e^{−α₀τ²}.
    Gaussian,
    /// 2(1 − α₀τ²)e^{−α₀τ²}, whose Gaussian functional average is exactly
    /// exp[−(t/2)√(π/α₀) erf(t√α₀)].
    ErfMatched,
}

impl CorrelationKernel {
    pub fn eval(self, tau: f64, alpha0: f64) -> f64 {
        let s = alpha0 * tau * tau;
        match self {
            Self::Gaussian => (-s).exp(),
            Self::ErfMatched => 2.0 * (1.0 - s) * (-s).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub alpha0: f64,
    pub kernel: CorrelationKernel,
    pub realizations: usize,
    pub t_max: f64,
    /// Number of sample points on [0, t_max], endpoints included.
    pub n_grid: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self { alpha0: 1.0, kernel: CorrelationKernel::ErfMatched, realizations: 100_000, t_max: 3.0, n_grid: 101, seed: 0 }
    }
}

const CHUNK: usize = 1024;

/// Mean of exp(i∫₀ᵗω) on the config grid, returned as (t, ⟨Q⟩) pairs.
///
/// Realization r draws from ChaCha8 stream r of `seed`, so results do not
/// depend on the thread count.
pub fn monte_carlo_mean_q(cfg: &EnsembleConfig) -> Result<Vec<(f64, Complex64)>> {
    if !(cfg.alpha0 > 0.0 && cfg.t_max > 0.0) || cfg.n_grid < 2 || cfg.realizations == 0 {
        return Err(Error::Domain("ensemble needs alpha0 > 0, t_max > 0, n_grid >= 2, realizations >= 1".into()));
    }
    let m = cfg.n_grid;
    let dt = cfg.t_max / (m - 1) as f64;
    let cov = DMatrix::from_fn(m, m, |i, j| cfg.kernel.eval((i as f64 - j as f64) * dt, cfg.alpha0));
    let eig = SymmetricEigen::new(cov);
    // ω = V √Λ z; round-off negative eigenvalues are dropped.
    let mut factor = eig.eigenvectors;
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        factor.column_mut(k).scale_mut(s);
    }

    let chunks: Vec<Vec<Complex64>> = (0..cfg.realizations.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Complex64::default(); m];
            let mut z = nalgebra::DVector::<f64>::zeros(m);
            for r in c * CHUNK..((c + 1) * CHUNK).min(cfg.realizations) {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64);
                for zi in z.iter_mut() {
                    *zi = StandardNormal.sample(&mut rng);
                }
                let w = &factor * &z;
                let mut phase = 0.0;
                acc[0] += Complex64::new(1.0, 0.0);
                for k in 1..m {
                    phase += 0.5 * dt * (w[k - 1] + w[k]);
                    acc[k] += Complex64::from_polar(1.0, phase);
                }
            }
            acc
        })
        .collect();

    let mut total = vec![Complex64::default(); m];
    for acc in &chunks {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
    }
    let n = cfg.realizations as f64;
    Ok(total.into_iter().enumerate().map(|(k, s)| (k as f64 * dt, s / n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_starts_at_one() {
        let cfg = EnsembleConfig { realizations: 3000, n_grid: 31, ..Default::default() };
        let a = monte_carlo_mean_q(&cfg).unwrap();
        let b = monte_carlo_mean_q(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].1, Complex64::new(1.0, 0.0));
        let other = monte_carlo_mean_q(&EnsembleConfig { seed: 9, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn gaussian_kernel_matches_its_own_functional() {
        // ⟨Q⟩ = exp(−∫₀ᵗ(t−τ)c(τ)dτ); for c = e^{−τ²} and t = 1 the integral is
        // (√π/2)erf(1) − (1 − e^{−1})/2.
        let cfg = EnsembleConfig { kernel: CorrelationKernel::Gaussian, realizations: 40_000, t_max: 1.0, n_grid: 41, ..Default::default() };
        let q = monte_carlo_mean_q(&cfg).unwrap();
        let integral = 0.5 * std::f64::consts::PI.sqrt() * crate::specfun::error_function(1.0) - 0.5 * (1.0 - (-1.0f64).exp());
        let expect = (-integral).exp();
        let (_, last) = q[q.len() - 1];
        assert!((last.re - expect).abs() < 0.02, "{} vs {expect}", last.re);
        assert!(last.im.abs() < 0.02);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(monte_carlo_mean_q(&EnsembleConfig { alpha0: 0.0, ..Default::default() }).is_err());
        assert!(monte_carlo_mean_q(&EnsembleConfig { realizations: 0, ..Default::default() }).is_err());
    }
}
