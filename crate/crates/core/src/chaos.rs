//! Small-Stark-shift limit, the driven pendulum it reduces to, and generic
//! correlation diagnostics for deciding whether a series is chaotic.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalised RMS misfit above which a spectrum is not accepted as Lorentzian.
pub const LORENTZ_RESIDUAL_MAX: f64 = 0.2;
/// A chaotic series must decorrelate within this fraction of its length.
pub const TAU_C_FRACTION_MAX: f64 = 0.1;

/// Constants of the Δ = 0 spin/field rotation at a frozen position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallDssParams {
    pub delta: f64,
    /// C₀ = −R₀ cos x.
    pub c0: f64,
    /// Ω_N = √(δ² + C₀²).
    pub omega_n: f64,
    /// ω = 4R₀√(α|δ|)/Ω_N.
    pub omega_pend: f64,
}

impl SmallDssParams {
    pub fn new(delta: f64, r0: f64, x: f64, alpha: f64) -> Self {
        let c0 = -r0 * x.cos();
        let omega_n = delta.hypot(c0);
        Self { delta, c0, omega_n, omega_pend: 4.0 * r0 * (alpha * delta.abs()).sqrt() / omega_n }
    }
}

/// Rotation taking (u, v, R₀s_z) at 0 to its value at τ.
///
/// The axis is (C₀, 0, δ)/Ω_N and the angle Ω_Nτ.
pub fn propagator_matrix(tau: f64, sd: &SmallDssParams) -> Matrix3<f64> {
    let n = Vector3::new(sd.c0, 0.0, sd.delta) / sd.omega_n;
    let k = Matrix3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0);
    let (s, c) = (sd.omega_n * tau).sin_cos();
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

/// Propagate (u, v, s_z) through the small-shift rotation.
pub fn evolve_small_dss(u0: f64, v0: f64, sz0: f64, tau: f64, sd: &SmallDssParams, r0: f64) -> (f64, f64, f64) {
    let y = propagator_matrix(tau, sd) * Vector3::new(u0, v0, r0 * sz0);
    (y.x, y.y, y.z / r0)
}

/// ẍ = ω²(1 − cos Ω_Nτ) sin x.
pub fn pendulum_rhs(x: f64, _xdot: f64, tau: f64, sd: &SmallDssParams) -> f64 {
    sd.omega_pend * sd.omega_pend * (1.0 - (sd.omega_n * tau).cos()) * x.sin()
}

/// Energy of the averaged pendulum ẍ = ω² sin x, H₀ = ẋ²/2 + ω² cos x.
pub fn pendulum_energy(x: f64, xdot: f64, omega_pend: f64) -> f64 {
    xdot * xdot / 2.0 + omega_pend * omega_pend * x.cos()
}

/// Separatrix orbit x = 4 arctan e^{±ω(τ−τ₀)}; `sign` picks the branch.
pub fn separatrix_solution(tau: f64, tau0: f64, omega_pend: f64, sign: f64) -> (f64, f64) {
    let sign = if sign < 0.0 { -1.0 } else { 1.0 };
    let th = omega_pend * (tau - tau0);
    (4.0 * (sign * th).exp().atan(), sign * 2.0 * omega_pend / th.cosh())
}

/// Energy width of the chaotic layer around the separatrix,
/// (4πΩ_N³/ω)·e^{πΩ_N/2ω}/sinh(πΩ_N/ω), evaluated in log space.
pub fn stochastic_layer_width(sd: &SmallDssParams) -> f64 {
    layer_width(sd.omega_n, sd.omega_pend)
}

pub fn layer_width(omega_n: f64, omega: f64) -> f64 {
    let y = PI * omega_n / omega;
    let ln_sinh = if y > 1.0 { y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2 } else { y.sinh().ln() };
    ((4.0 * PI).ln() + 3.0 * omega_n.ln() - omega.ln() + y / 2.0 - ln_sinh).exp()
}

/// Autocorrelation, its windowed cosine transform and the Lorentzian fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub lags: Vec<f64>,
    pub autocorr: Vec<f64>,
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    /// NaN until [`correlation_time`] has run.
    pub tau_c: f64,
    pub fit_residual: f64,
    /// Fitted Lorentzian amplitude.
    pub amplitude: f64,
    /// Length of the analysed series in time units.
    pub duration: f64,
}

impl SpectrumEstimate {
    pub fn write_autocorr_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "lag,corr")?;
        for (l, c) in self.lags.iter().zip(&self.autocorr) {
            writeln!(w, "{l:.16e},{c:.16e}")?;
        }
        Ok(())
    }

    pub fn write_spectrum_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "omega,power")?;
        for (f, p) in self.freqs.iter().zip(&self.power) {
            writeln!(w, "{f:.16e},{p:.16e}")?;
        }
        Ok(())
    }

    /// Lorentzian model A·τ_c/(1 + ω²τ_c²) at the fitted parameters.
    pub fn model(&self, omega: f64) -> f64 {
        self.amplitude * self.tau_c / (1.0 + omega * omega * self.tau_c * self.tau_c)
    }
}

/// Normalised time-averaged autocorrelation up to `max_lag`, and the
/// Hann-windowed cosine transform of it on [0, π/dt).
pub fn autocorrelation(series: &[f64], dt: f64, max_lag: f64) -> Result<SpectrumEstimate> {
    if !(dt > 0.0 && max_lag > 0.0) {
        return Err(Error::Domain("dt and max_lag must be positive".into()));
    }
    let n = series.len();
    let lag_count = (max_lag / dt).round() as usize;
    if lag_count < 2 || (n as f64) < 10.0 * max_lag / dt {
        return Err(Error::InsufficientData(format!(
            "{n} samples cannot support a lag window of {max_lag} at dt = {dt}"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let mut acf: Vec<f64> = (0..lag_count)
        .map(|k| centred[..n - k].iter().zip(&centred[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect();
    let g0 = acf[0];
    if !(g0 > 0.0) {
        return Err(Error::InsufficientData("series has zero variance".into()));
    }
    acf.iter_mut().for_each(|v| *v /= g0);

    let l = lag_count as f64;
    let window: Vec<f64> = (0..lag_count).map(|k| 0.5 * (1.0 + (PI * k as f64 / l).cos())).collect();
    let freqs: Vec<f64> = (0..lag_count).map(|j| j as f64 * PI / (l * dt)).collect();
    let power = freqs
        .iter()
        .map(|&w| {
            let tail: f64 = (1..lag_count).map(|k| window[k] * acf[k] * (w * k as f64 * dt).cos()).sum();
            dt * (acf[0] + 2.0 * tail)
        })
        .collect();

    Ok(SpectrumEstimate {
        lags: (0..lag_count).map(|k| k as f64 * dt).collect(),
        autocorr: acf,
        freqs,
        power,
        tau_c: f64::NAN,
        fit_residual: f64::NAN,
        amplitude: f64::NAN,
        duration: n as f64 * dt,
    })
}

/// Fit A·τ_c/(1 + ω²τ_c²) to the spectrum by damped Gauss–Newton.
///
/// The misfit is reported as ‖S − model‖₂ / ‖S‖₂ over the whole band. The
/// fitted values are stored in `est` even when the fit is rejected.
pub fn correlation_time(est: &mut SpectrumEstimate) -> Result<f64> {
    let (w, s) = (&est.freqs, &est.power);
    let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(s_norm > 0.0) {
        return Err(Error::InsufficientData("empty spectrum".into()));
    }

    // Start from the half-width at half-maximum of the zero-frequency value.
    let s0 = s[0].max(s.iter().cloned().fold(0.0, f64::max) * 1e-3);
    let half = w.iter().zip(s).find(|(_, p)| **p < s0 / 2.0).map(|(f, _)| *f);
    let tau0 = match half {
        Some(f) if f > 0.0 => 1.0 / f,
        _ => 1.0 / w[1],
    };
    // Parameters are logarithms so both stay positive.
    let mut la = (s0 / tau0).ln();
    let mut lt = tau0.ln();
    let cost = |la: f64, lt: f64| -> f64 {
        let (a, t) = (la.exp(), lt.exp());
        w.iter().zip(s).map(|(f, p)| (p - a * t / (1.0 + f * f * t * t)).powi(2)).sum()
    };
    let mut c = cost(la, lt);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let (a, t) = (la.exp(), lt.exp());
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for (f, p) in w.iter().zip(s) {
            let d = 1.0 + f * f * t * t;
            let m = a * t / d;
            // ∂m/∂ln A = m, ∂m/∂ln τ = m(1 − ω²τ²)/(1 + ω²τ²).
            let j = [m, m * (1.0 - f * f * t * t) / d];
            let r = p - m;
            for i in 0..2 {
                jtr[i] += j[i] * r;
                for k in 0..2 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let m00 = jtj[0][0] * (1.0 + lambda);
            let m11 = jtj[1][1] * (1.0 + lambda);
            let det = m00 * m11 - jtj[0][1] * jtj[1][0];
            if det.abs() < 1e-300 {
                lambda *= 10.0;
                continue;
            }
            let da = (m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
            let dt = (m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
            let (na, nt) = (la + da.clamp(-5.0, 5.0), lt + dt.clamp(-5.0, 5.0));
            let nc = cost(na, nt);
            if nc.is_finite() && nc < c {
                let rel = (c - nc) / c.max(1e-300);
                la = na;
                lt = nt;
                c = nc;
                lambda = (lambda / 3.0).max(1e-12);
                improved = rel > 1e-14;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }

    est.amplitude = la.exp();
    est.tau_c = lt.exp();
    est.fit_residual = c.sqrt() / s_norm;
    if !est.tau_c.is_finite() || !est.fit_residual.is_finite() {
        return Err(Error::FitFailure { residual: f64::INFINITY, tau_c: est.tau_c });
    }
    if est.fit_residual > LORENTZ_RESIDUAL_MAX {
        return Err(Error::FitFailure { residual: est.fit_residual, tau_c: est.tau_c });
    }
    Ok(est.tau_c)
}

/// Serializable chaos decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosVerdict {
    pub tau_c: f64,
    pub fit_residual: f64,
    pub chaotic: bool,
}

/// Chaotic when the spectrum is Lorentzian and τ_c is short against the record.
pub fn chaos_verdict(est: &mut SpectrumEstimate) -> Result<ChaosVerdict> {
    let lorentzian = match correlation_time(est) {
        Ok(_) => true,
        Err(Error::FitFailure { .. }) => false,
        Err(e) => return Err(e),
    };
    let short = est.tau_c < TAU_C_FRACTION_MAX * est.duration;
    Ok(ChaosVerdict { tau_c: est.tau_c, fit_residual: est.fit_residual, chaotic: lorentzian && short })
}
