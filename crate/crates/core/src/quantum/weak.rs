use num_complex::Complex64;

use super::density::{purity, PurityCurve, PurityRegime, ReducedDensityMatrix};
use crate::error::{Error, Result};
use crate::semiclassical::ModelParams;
use crate::specfun::{cosine_integral, error_function};

/// Weak-coupling solution of one (n, n+2) block at δ_q = 0.
///
/// `phase` is ∫₀ᵗ cos x(t′) dt′; Q = e^{in·phase}.
pub fn amplitudes_weak_resonant(
    t: f64,
    n: usize,
    phase: f64,
    ce0: Complex64,
    cg0: Complex64,
    params: &ModelParams,
) -> (Complex64, Complex64) {
    let nf = n as f64;
    let c1 = (ce0 + cg0) / 2.0;
    let c2 = (ce0 - cg0) / 2.0;
    let q = Complex64::from_polar(1.0, nf * phase);
    let ce = Complex64::from_polar(1.0, -nf * params.zeta * t / 2.0) * (c1 * q + c2 * q.conj());
    let cg = Complex64::from_polar(1.0, (nf + 1.0) * params.zeta * t / 2.0) * (c1 * q - c2 * q.conj());
    (ce, cg)
}

/// Reduced state after tracing a coherent field, given Q[2ω(t)] as `q2`.
///
/// ρ₁₂ = ¼e^{−iζ}e^{−n̄}(exp(n̄q₂*e^{−itζ}) − exp(n̄q₂e^{−itζ})); ρ₂₁ is its conjugate.
pub fn density_weak(t: f64, q2: Complex64, n_bar: f64, zeta: f64) -> ReducedDensityMatrix {
    let damp = (-n_bar).exp();
    let rho11 = 0.5 + 0.5 * damp * (n_bar * q2).exp().re;
    let rot = Complex64::from_polar(1.0, -t * zeta);
    let rho12 = 0.25
        * Complex64::from_polar(damp, -zeta)
        * ((n_bar * q2.conj() * rot).exp() - (n_bar * q2 * rot).exp());
    ReducedDensityMatrix { rho11, rho22: 1.0 - rho11, rho12 }
}

/// Q[2ω(t)] for regular motion: exp[2i√(Ω₀/αζ)(Ci(e^{t√(αζ/Ω₀)}) − Ci(1))].
pub fn q_regular(t: f64, params: &ModelParams) -> Result<Complex64> {
    let ratio = params.alpha * params.zeta / params.omega0;
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::Domain(format!("alpha*zeta/Omega0 = {ratio} must be positive")));
    }
    let arg = (t * ratio.sqrt()).exp();
    // |Ci(y)| ≤ 1/y for large y; past 1e300 it is zero in double precision.
    let ci = if arg.is_finite() { cosine_integral(arg)? } else { 0.0 };
    Ok(Complex64::from_polar(1.0, 2.0 / ratio.sqrt() * (ci - cosine_integral(1.0)?)))
}

/// Ensemble mean exp[−(t/2)√(π/α₀) erf(t√α₀)].
pub fn q_chaotic_mean(t: f64, alpha0: f64) -> Result<f64> {
    if !(alpha0 > 0.0) {
        return Err(Error::Domain(format!("alpha0 = {alpha0} must be positive")));
    }
    Ok((-(t / 2.0) * (std::f64::consts::PI / alpha0).sqrt() * error_function(t * alpha0.sqrt())).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeakRegime {
    Regular,
    Chaotic { alpha0: f64 },
}

/// Purity of [`density_weak`] along `t_grid`.
pub fn purity_weak(t_grid: &[f64], regime: WeakRegime, params: &ModelParams) -> Result<PurityCurve> {
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let q2 = match regime {
            WeakRegime::Regular => q_regular(t, params)?,
            WeakRegime::Chaotic { alpha0 } => Complex64::new(q_chaotic_mean(t, alpha0)?, 0.0),
        };
        out.push(purity(&density_weak(t, q2, params.n_bar, params.zeta)));
    }
    let regime = match regime {
        WeakRegime::Regular => PurityRegime::WeakRegular,
        WeakRegime::Chaotic { .. } => PurityRegime::WeakChaotic,
    };
    Ok(PurityCurve { times: t_grid.to_vec(), purity: out, regime })
}

/// Angular frequency in [w_min, w_max] maximising |Σ (v − v̄) e^{−iωt}| over `n_grid` trial values.
pub fn dominant_frequency(times: &[f64], values: &[f64], w_min: f64, w_max: f64, n_grid: usize) -> Result<f64> {
    if times.len() != values.len() || times.len() < 4 {
        return Err(Error::InsufficientData(format!("{} samples", times.len())));
    }
    if !(w_max > w_min && w_min >= 0.0) || n_grid < 2 {
        return Err(Error::Domain("need 0 <= w_min < w_max and n_grid >= 2".into()));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let mut best = (w_min, -1.0);
    for j in 0..n_grid {
        let w = w_min + (w_max - w_min) * j as f64 / (n_grid - 1) as f64;
        let s: Complex64 = times
            .iter()
            .zip(values)
            .map(|(t, v)| (v - mean) * Complex64::from_polar(1.0, -w * t))
            .sum();
        if s.norm() > best.1 {
            best = (w, s.norm());
        }
    }
    Ok(best.0)
}
