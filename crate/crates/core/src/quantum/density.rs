use std::io::{self, Write};

use num_complex::Complex64;

use super::amplitudes::QuantumAmplitudes;
use crate::semiclassical::ModelParams;

/// 2×2 Hermitian atomic state; ρ₂₁ is the conjugate of `rho12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: Complex64,
}

impl ReducedDensityMatrix {
    pub fn rho21(&self) -> Complex64 {
        self.rho12.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    /// ρ₁₁ρ₂₂ − |ρ₁₂|², non-negative for a valid state.
    pub fn determinant(&self) -> f64 {
        self.rho11 * self.rho22 - self.rho12.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityRegime {
    AdiabaticClosedForm,
    WeakRegular,
    WeakChaotic,
    NumericFromAmplitudes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityCurve {
    pub times: Vec<f64>,
    pub purity: Vec<f64>,
    pub regime: PurityRegime,
}

impl PurityCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,purity")?;
        for (t, p) in self.times.iter().zip(&self.purity) {
            writeln!(w, "{t:.16e},{p:.16e}")?;
        }
        Ok(())
    }
}

/// Trace out the field, pairing C_{e,n} with C_{g,n+2}.
pub fn reduced_density(amps: &QuantumAmplitudes) -> ReducedDensityMatrix {
    let rho11 = amps.ce.iter().map(|c| c.norm_sqr()).sum();
    let rho22 = amps.cg.iter().map(|c| c.norm_sqr()).sum();
    let rho12 = amps.ce.iter().zip(&amps.cg).map(|(e, g)| e * g.conj()).sum();
    ReducedDensityMatrix { rho11, rho22, rho12 }
}

/// Tr ρ² = ρ₁₁² + ρ₂₂² + 2|ρ₁₂|².
pub fn purity(rho: &ReducedDensityMatrix) -> f64 {
    rho.rho11 * rho.rho11 + rho.rho22 * rho.rho22 + 2.0 * rho.rho12.norm_sqr()
}

fn lambda_and_coupling(x: f64, params: &ModelParams) -> (f64, f64) {
    let g = params.omega0 * x.cos();
    ((params.zeta * params.zeta / 4.0 + g * g).sqrt(), g)
}

/// Large-n̄ closed form of the reduced state, starting excited with a coherent field.
pub fn density_resonant_closed(t: f64, x: f64, params: &ModelParams) -> ReducedDensityMatrix {
    let (lam, g) = lambda_and_coupling(x, params);
    let n_bar = params.n_bar;
    let (s2, c2) = (2.0 * t * lam).sin_cos();
    let env = (-n_bar * (1.0 - c2)).exp();
    let a = env * (n_bar * s2).cos();
    let b = env * (n_bar * s2).sin();
    let l2 = lam * lam;
    let zeta = params.zeta;
    let rho11 = 0.5 * (1.0 + a) + 0.5 * zeta * zeta / (4.0 * l2) * (1.0 - a);
    let rho22 = 0.5 * g * g / l2 * (1.0 - a);
    let phase = Complex64::from_polar(1.0, -zeta * t);
    let rho12 = phase * Complex64::new(0.5 * g * zeta / (2.0 * l2) * (1.0 - a), -g / (2.0 * lam) * b);
    ReducedDensityMatrix { rho11, rho22, rho12 }
}

/// P = 1 − (g²/(2λ²))·(1 − e^{−2n̄(1 − cos 2λt)}), the purity of [`density_resonant_closed`].
pub fn purity_closed_adiabatic(t: f64, x: f64, params: &ModelParams) -> f64 {
    let (lam, g) = lambda_and_coupling(x, params);
    let e2 = (-2.0 * params.n_bar * (1.0 - (2.0 * t * lam).cos())).exp();
    1.0 - g * g / (2.0 * lam * lam) * (1.0 - e2)
}
