use num_complex::Complex64;

use super::density::{purity, reduced_density, PurityCurve, PurityRegime};
use crate::error::{Error, Result};
use crate::ode::{sample_grid, solve, Tolerances};
use crate::semiclassical::ModelParams;

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Largest Poisson tail tolerated when truncating the Fock space.
pub const TAIL_MAX: f64 = 1e-10;
/// Largest tail tolerated during a hybrid run.
pub const RUN_TAIL_MAX: f64 = 1e-8;

/// Amplitudes of |e, n⟩ (`ce[n]`) and |g, n+2⟩ (`cg[n]`) for n = 0..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumAmplitudes {
    pub n_max: usize,
    pub ce: Vec<Complex64>,
    pub cg: Vec<Complex64>,
    pub t: f64,
}

impl QuantumAmplitudes {
    pub fn zeros(n_max: usize) -> Self {
        Self { n_max, ce: vec![Complex64::default(); n_max + 1], cg: vec![Complex64::default(); n_max + 1], t: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        self.ce.iter().chain(&self.cg).map(|c| c.norm_sqr()).sum()
    }

    pub fn tail_mass(&self) -> f64 {
        self.ce[self.n_max].norm_sqr() + self.cg[self.n_max].norm_sqr()
    }

    fn to_real(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(4 * (self.n_max + 1));
        for c in self.ce.iter().chain(&self.cg) {
            y.push(c.re);
            y.push(c.im);
        }
        y
    }

    fn from_real(y: &[f64], n_max: usize, t: f64) -> Self {
        let m = n_max + 1;
        let c = |k: usize| Complex64::new(y[2 * k], y[2 * k + 1]);
        Self { n_max, ce: (0..m).map(c).collect(), cg: (m..2 * m).map(c).collect(), t }
    }
}

/// Fock cutoff ⌈n̄ + 10√(n̄+1) + 20⌉.
pub fn truncation_for(n_bar: f64) -> usize {
    (n_bar + 10.0 * (n_bar + 1.0).sqrt() + 20.0).ceil() as usize
}

/// Coherent-state amplitudes W_n, W_n² = n̄ⁿe^{−n̄}/n!, renormalised after truncation.
pub fn coherent_weights(n_bar: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(n_bar >= 0.0) {
        return Err(Error::Domain(format!("n_bar = {n_bar} must be non-negative")));
    }
    let mut p = Vec::with_capacity(n_max + 1);
    let mut w2 = (-n_bar).exp();
    for n in 0..=n_max {
        p.push(w2);
        w2 *= n_bar / (n + 1) as f64;
    }
    let total: f64 = p.iter().sum();
    let tail = (1.0 - total).max(0.0);
    if tail > TAIL_MAX {
        return Err(Error::Truncation(tail));
    }
    Ok(p.iter().map(|v| (v / total).sqrt()).collect())
}

/// Atom excited, field coherent: C_{e,n}(0) = W_n, C_{g,n+2}(0) = 0.
pub fn excited_coherent(n_bar: f64, n_max: usize) -> Result<QuantumAmplitudes> {
    let w = coherent_weights(n_bar, n_max)?;
    let mut a = QuantumAmplitudes::zeros(n_max);
    for (c, wn) in a.ce.iter_mut().zip(w) {
        *c = Complex64::new(wn, 0.0);
    }
    Ok(a)
}

fn coupling(n: usize) -> f64 {
    (((n + 1) * (n + 2)) as f64).sqrt()
}

/// Time derivative of the amplitudes at position `x`; returns (dC_e, dC_g).
pub fn amplitude_rhs(
    amps: &QuantumAmplitudes,
    t: f64,
    x: f64,
    params: &ModelParams,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut de = vec![Complex64::default(); amps.n_max + 1];
    let mut dg = de.clone();
    rhs_into(&amps.ce, &amps.cg, t, params.omega0 * x.cos(), params, &mut de, &mut dg);
    (de, dg)
}

fn rhs_into(
    ce: &[Complex64],
    cg: &[Complex64],
    t: f64,
    gx: f64,
    params: &ModelParams,
    de: &mut [Complex64],
    dg: &mut [Complex64],
) {
    let phase = Complex64::from_polar(1.0, -params.delta_q * t);
    for n in 0..ce.len() {
        let b = gx * coupling(n);
        let nf = n as f64;
        de[n] = -I * (params.zeta * nf / 2.0 * ce[n] + b * phase * cg[n]);
        dg[n] = -I * (-params.zeta * (nf + 2.0) / 2.0 * cg[n] + b * phase.conj() * ce[n]);
    }
}

/// Exact two-level solution for one (n, n+2) block at frozen position `x`.
///
/// With Δ' = ζ(n+1) − δ_q and λ = √(Δ'² + 4b²)/2,
/// C_e = e^{−i(δ_q−ζ)t/2}[(cos λt − iΔ'/(2λ) sin λt)C_e(0) − i(b/λ) sin λt C_g(0)],
/// C_g = e^{+i(δ_q+ζ)t/2}[(cos λt + iΔ'/(2λ) sin λt)C_g(0) − i(b/λ) sin λt C_e(0)].
pub fn amplitudes_adiabatic(
    t: f64,
    n: usize,
    x: f64,
    params: &ModelParams,
    ce0: Complex64,
    cg0: Complex64,
) -> (Complex64, Complex64) {
    let b = params.omega0 * x.cos() * coupling(n);
    let dp = params.zeta * (n as f64 + 1.0) - params.delta_q;
    let lam = (dp * dp + 4.0 * b * b).sqrt() / 2.0;
    let c = (lam * t).cos();
    // sin(λt)/λ, continuous at λ = 0.
    let s_over = if lam * t.abs() < 1e-8 { t } else { (lam * t).sin() / lam };
    let a = Complex64::new(c, -dp / 2.0 * s_over) * ce0 - I * b * s_over * cg0;
    let g = Complex64::new(c, dp / 2.0 * s_over) * cg0 - I * b * s_over * ce0;
    let pe = Complex64::from_polar(1.0, -(params.delta_q - params.zeta) * t / 2.0);
    let pg = Complex64::from_polar(1.0, (params.delta_q + params.zeta) * t / 2.0);
    (pe * a, pg * g)
}

/// ⟨û⟩ = (2/√N) Re(e^{iδ_q t} Σ √((n+1)(n+2)) C*_{e,n} C_{g,n+2}).
pub fn hybrid_mean_u(amps: &QuantumAmplitudes, t: f64, params: &ModelParams) -> f64 {
    mean_u(&amps.ce, &amps.cg, t, params)
}

fn mean_u(ce: &[Complex64], cg: &[Complex64], t: f64, params: &ModelParams) -> f64 {
    let s: Complex64 = ce.iter().zip(cg).enumerate().map(|(n, (e, g))| coupling(n) * e.conj() * g).sum();
    2.0 / params.n_field.sqrt() * (Complex64::from_polar(1.0, params.delta_q * t) * s).re
}

/// Output of [`hybrid_evolve`].
#[derive(Debug, Clone)]
pub struct HybridRun {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub purity: PurityCurve,
    pub history: Vec<QuantumAmplitudes>,
    /// Largest deviation of the total norm from its initial value.
    pub norm_drift: f64,
}

/// Co-integrate the classical atom (ẋ = αp, ṗ = −⟨û⟩ sin x) with the amplitudes.
pub fn hybrid_evolve(
    amps0: &QuantumAmplitudes,
    x0: f64,
    p0: f64,
    t_end: f64,
    dt_out: f64,
    params: &ModelParams,
    tol: &Tolerances,
) -> Result<HybridRun> {
    if amps0.tail_mass() > RUN_TAIL_MAX {
        return Err(Error::Truncation(amps0.tail_mass()));
    }
    let n_max = amps0.n_max;
    let m = n_max + 1;
    let dim = 2 + 4 * m;
    let pr = *params;
    let sys = (dim, move |t: f64, y: &[f64], dy: &mut [f64]| {
        let (x, p) = (y[0], y[1]);
        let amp = |k: usize| Complex64::new(y[2 + 2 * k], y[3 + 2 * k]);
        let ce: Vec<Complex64> = (0..m).map(amp).collect();
        let cg: Vec<Complex64> = (m..2 * m).map(amp).collect();
        let mut de = vec![Complex64::default(); m];
        let mut dg = vec![Complex64::default(); m];
        rhs_into(&ce, &cg, t, pr.omega0 * x.cos(), &pr, &mut de, &mut dg);
        dy[0] = pr.alpha * p;
        dy[1] = -mean_u(&ce, &cg, t, &pr) * x.sin();
        for (k, d) in de.iter().chain(&dg).enumerate() {
            dy[2 + 2 * k] = d.re;
            dy[3 + 2 * k] = d.im;
        }
    });
    let mut y0 = vec![x0, p0];
    y0.extend(amps0.to_real());
    let ts = sample_grid(amps0.t, amps0.t + t_end, dt_out);
    let sol = solve(&sys, amps0.t, &y0, &ts, tol)?;

    let norm0 = amps0.norm();
    let mut run = HybridRun {
        times: sol.times.clone(),
        x: Vec::with_capacity(ts.len()),
        p: Vec::with_capacity(ts.len()),
        purity: PurityCurve { times: sol.times.clone(), purity: Vec::with_capacity(ts.len()), regime: PurityRegime::NumericFromAmplitudes },
        history: Vec::with_capacity(ts.len()),
        norm_drift: 0.0,
    };
    for (t, y) in sol.times.iter().zip(&sol.states) {
        let a = QuantumAmplitudes::from_real(&y[2..], n_max, *t);
        if a.tail_mass() > RUN_TAIL_MAX {
            return Err(Error::Truncation(a.tail_mass()));
        }
        run.norm_drift = run.norm_drift.max((a.norm() - norm0).abs());
        run.x.push(y[0]);
        run.p.push(y[1]);
        run.purity.purity.push(purity(&reduced_density(&a)));
        run.history.push(a);
    }
    Ok(run)
}
