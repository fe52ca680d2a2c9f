//! Closed-form spin dynamics at a frozen atomic position, bifurcation
//! analysis and the slow drift of the atom.
//!
//! All solutions start from the fully excited state `sz = 1, u = v = 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::semiclassical::ModelParams;
use crate::specfun::{
    complete_elliptic_k, depressed_cubic_roots, jacobi_elliptic, weierstrass_p, CubicRoots,
    WeierstrassCoeffs,
};

/// Half-width of the band around κ = 1 treated as the separatrix.
pub const SOLITON_TIE: f64 = 1e-6;
const NODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// κ < 1: sz = cn, full inversion.
    Oscillatory,
    /// κ = 1: sech pulse, infinite period.
    Soliton,
    /// κ > 1: sz = dn, the inversion never crosses zero.
    Rotational,
}

/// Frozen-position data for the resonant (g = 0) solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantSolutionParams {
    pub c: f64,
    pub r0: f64,
    /// |Δ/(2cR₀)|.
    pub kappa: f64,
    pub branch: Branch,
    /// Signed Stark shift Δ; fixes the sign of u.
    pub stark: f64,
}

impl ResonantSolutionParams {
    pub fn new(c: f64, r0: f64, stark: f64) -> Result<Self> {
        if c.abs() < NODE_TOL {
            return Err(Error::Node);
        }
        let kappa = (stark / (2.0 * c * r0)).abs();
        Ok(Self { c, r0, kappa, branch: branch_of(kappa), stark })
    }

    pub fn from_params(params: &ModelParams, x: f64) -> Result<Self> {
        Self::new(x.cos(), params.r0, params.stark)
    }
}

pub fn branch_of(kappa: f64) -> Branch {
    if (kappa - 1.0).abs() < SOLITON_TIE {
        Branch::Soliton
    } else if kappa < 1.0 {
        Branch::Oscillatory
    } else {
        Branch::Rotational
    }
}

/// How κ is built from the atomic position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KappaForm {
    /// κ = Δ/(2R₀ cos x).
    #[default]
    Linear,
    /// κ = (Δ/(2R₀ cos x))^{1/2}, reaching 1 at the same position.
    SquareRoot,
}

/// κ = Δ/(2R₀ cos x).
pub fn kappa_resonant(params: &ModelParams, x: f64) -> Result<f64> {
    let c = x.cos();
    if c.abs() < NODE_TOL {
        return Err(Error::Node);
    }
    Ok(params.stark / (2.0 * c * params.r0))
}

/// κ in either form; the square-root form uses the magnitude.
pub fn kappa_with_form(params: &ModelParams, x: f64, form: KappaForm) -> Result<f64> {
    let k = kappa_resonant(params, x)?;
    Ok(match form {
        KappaForm::Linear => k,
        KappaForm::SquareRoot => k.abs().sqrt(),
    })
}

fn rotational_args(tau: f64, rp: &ResonantSolutionParams) -> (f64, f64) {
    (rp.c * rp.r0 * rp.kappa * tau, 1.0 / rp.kappa)
}

/// Inversion s_z(τ).
pub fn sz_resonant(tau: f64, rp: &ResonantSolutionParams) -> f64 {
    let s = rp.c * rp.r0 * tau;
    match rp.branch {
        Branch::Oscillatory => jacobi_elliptic(s, rp.kappa).map(|t| t.cn).unwrap_or(f64::NAN),
        Branch::Soliton => 1.0 / s.cosh(),
        Branch::Rotational => {
            let (w, m) = rotational_args(tau, rp);
            jacobi_elliptic(w, m).map(|t| t.dn).unwrap_or(f64::NAN)
        }
    }
}

/// Quadrature u(τ).
pub fn u_resonant(tau: f64, rp: &ResonantSolutionParams) -> f64 {
    let amp = -rp.stark / (2.0 * rp.c);
    let s = rp.c * rp.r0 * tau;
    match rp.branch {
        Branch::Oscillatory => {
            let sn = jacobi_elliptic(s, rp.kappa).map(|t| t.sn).unwrap_or(f64::NAN);
            amp * sn * sn
        }
        Branch::Soliton => amp * s.tanh() * s.tanh(),
        Branch::Rotational => {
            let (w, m) = rotational_args(tau, rp);
            let sn = jacobi_elliptic(w, m).map(|t| t.sn).unwrap_or(f64::NAN);
            amp * m * m * sn * sn
        }
    }
}

/// Quadrature v(τ).
pub fn v_resonant(tau: f64, rp: &ResonantSolutionParams) -> f64 {
    let s = rp.c * rp.r0 * tau;
    match rp.branch {
        Branch::Oscillatory => jacobi_elliptic(s, rp.kappa)
            .map(|t| rp.r0 * t.sn * t.dn)
            .unwrap_or(f64::NAN),
        Branch::Soliton => rp.r0 * s.tanh() / s.cosh(),
        Branch::Rotational => {
            let (w, m) = rotational_args(tau, rp);
            jacobi_elliptic(w, m).map(|t| rp.r0 * m * t.sn * t.cn).unwrap_or(f64::NAN)
        }
    }
}

/// Oscillation period of s_z.
pub fn period_resonant(rp: &ResonantSolutionParams) -> Result<f64> {
    let cr = rp.c.abs() * rp.r0;
    match rp.branch {
        Branch::Oscillatory => Ok(4.0 * complete_elliptic_k(rp.kappa)? / cr),
        Branch::Soliton => Err(Error::InfinitePeriod),
        Branch::Rotational => Ok(2.0 * complete_elliptic_k(1.0 / rp.kappa)? / (cr * rp.kappa)),
    }
}

/// H = c v²/2 + (Δ²/8c)(1 − s_z²)² + (c/2)R₀² s_z².
pub fn effective_hamiltonian(sz: f64, v: f64, c: f64, stark: f64, r0: f64) -> Result<f64> {
    if c.abs() < NODE_TOL {
        return Err(Error::Node);
    }
    let w = 1.0 - sz * sz;
    Ok(c * v * v / 2.0 + stark * stark / (8.0 * c) * w * w + c / 2.0 * r0 * r0 * sz * sz)
}

/// Linear stability index of the frozen-position fixed point: +1 centre, −1 saddle.
pub fn poincare_index(x: f64, zeta: f64, omega0: f64, r0: f64) -> Result<i32> {
    let ratio = zeta / (omega0 * r0);
    let d = x.cos().powi(2) - ratio * ratio;
    if d.abs() <= 1e-12 {
        return Err(Error::BifurcationPoint);
    }
    Ok(if d > 0.0 { 1 } else { -1 })
}

/// Slow atomic drift in the linearised well, with its fast ripple.
pub fn x_adiabatic(tau: f64, params: &ModelParams) -> Result<f64> {
    let (rate, ripple) = adiabatic_rates(params)?;
    Ok((rate * tau).sinh() * (1.0 + ripple * (2.0 * params.r0 * tau).cos()))
}

/// Envelope growth rate and relative ripple amplitude of [`x_adiabatic`].
pub fn adiabatic_rates(params: &ModelParams) -> Result<(f64, f64)> {
    let (z, a, w, r) = (params.zeta, params.alpha, params.omega0, params.r0);
    if !(z > 0.0 && a > 0.0) {
        return Err(Error::Domain("adiabatic drift needs zeta > 0 and alpha > 0".into()));
    }
    let radicand = z / (a * w) - z * z / (8.0 * r * r * w * w);
    if radicand < 0.0 {
        return Err(Error::Domain(format!("negative growth radicand {radicand}")));
    }
    Ok((radicand.sqrt() * a, a * z / (4.0 * r * r * w)))
}

/// τ_b = √(Ω₀/(αζ)) · ln(arccos(ζ/(2R₀Ω₀))).
pub fn bifurcation_time(params: &ModelParams) -> Result<f64> {
    let arg = params.zeta / (2.0 * params.r0 * params.omega0);
    if !(arg < 1.0) || arg < -1.0 {
        return Err(Error::Domain(format!("arccos argument {arg} outside [-1, 1)")));
    }
    if !(params.alpha * params.zeta > 0.0) {
        return Err(Error::Domain("alpha*zeta must be positive".into()));
    }
    let ac = arg.acos();
    if !(ac > 0.0) {
        return Err(Error::Domain("log argument must be positive".into()));
    }
    Ok((params.omega0 / (params.alpha * params.zeta)).sqrt() * ac.ln())
}

/// Result of scanning κ(τ) along the adiabatic drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityScan {
    /// First time the instantaneous period exceeded `multiple` × its initial value.
    pub tau: Option<f64>,
    pub initial_period: f64,
    pub multiple: f64,
}

/// Instantaneous s_z period at time τ of the drift, or ∞ on the separatrix.
pub fn instantaneous_period(tau: f64, params: &ModelParams, form: KappaForm) -> Result<f64> {
    let x = x_adiabatic(tau, params)?;
    let k = kappa_with_form(params, x, form)?.abs();
    let rp = ResonantSolutionParams { kappa: k, branch: branch_of(k), ..ResonantSolutionParams::new(x.cos(), params.r0, params.stark)? };
    match period_resonant(&rp) {
        Err(Error::InfinitePeriod) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Scan τ ∈ [0, t_max] with step `dt` for the first divergence of the period.
pub fn detect_singularity(
    params: &ModelParams,
    form: KappaForm,
    t_max: f64,
    dt: f64,
    multiple: f64,
) -> Result<SingularityScan> {
    let initial_period = instantaneous_period(0.0, params, form)?;
    let limit = multiple * initial_period;
    let exceeds = |tau: f64| -> bool {
        match instantaneous_period(tau, params, form) {
            Ok(t) => t > limit,
            Err(_) => true,
        }
    };
    let mut prev = 0.0;
    let steps = (t_max / dt).ceil() as usize;
    for i in 1..=steps {
        let tau = (i as f64 * dt).min(t_max);
        if exceeds(tau) {
            let (mut lo, mut hi) = (prev, tau);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if exceeds(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(SingularityScan { tau: Some(hi), initial_period, multiple });
        }
        prev = tau;
    }
    Ok(SingularityScan { tau: None, initial_period, multiple })
}

/// s_z(τ) with κ and c following the adiabatic drift.
pub fn sz_drifting(tau: f64, params: &ModelParams, form: KappaForm) -> Result<f64> {
    let x = x_adiabatic(tau, params)?;
    let k = kappa_with_form(params, x, form)?.abs();
    let base = ResonantSolutionParams::new(x.cos(), params.r0, params.stark)?;
    let rp = ResonantSolutionParams { kappa: k, branch: branch_of(k), ..base };
    Ok(sz_resonant(tau, &rp))
}

/// Data for the detuned switching solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingSolutionParams {
    /// Invariants and roots of the exact reduction.
    pub coeffs: WeierstrassCoeffs,
    pub c: f64,
    pub r0: f64,
    /// κ = ζ/(2Ω₀R₀c).
    pub kappa_nr: f64,
    pub g_over_r0c: f64,
    /// (g + Δ)/(R₀c).
    pub a: f64,
    /// Leading root e₁ = −A₂ of the small-κ reduction.
    pub e1: f64,
    /// Full oscillation period 2π/(cR₀√(6e₁)).
    pub period: f64,
    /// Lowest inversion reached, 1 − 1/(3e₁).
    pub floor: f64,
}

impl SwitchingSolutionParams {
    /// Time to travel from s_z = 1 down to the floor.
    pub fn switching_time(&self) -> f64 {
        self.period / 2.0
    }
}

/// Weierstrass data for the detuned solution at frozen position `x`.
///
/// With y = 1 − s_z and s = cR₀τ the inversion obeys
/// (dy/ds)² = 2y − (1 + a²)y² + 2aκy³ − κ²y⁴, and 1/y = 2℘(s) − A₂.
pub fn weierstrass_coeffs_nonresonant(params: &ModelParams, x: f64) -> Result<SwitchingSolutionParams> {
    let c = x.cos();
    if c.abs() < NODE_TOL {
        return Err(Error::Node);
    }
    let r0 = params.r0;
    let kappa = params.zeta / (2.0 * params.omega0 * r0 * c);
    let a = (params.g_detune + params.stark) / (r0 * c);
    let a0 = -kappa * kappa;
    let a1 = kappa * a / 2.0;
    let a2 = -(1.0 + a * a) / 6.0;
    let g2 = 3.0 * a2 * a2 - 2.0 * a1;
    let g3 = a1 * a2 - a2 * a2 * a2 - a0 / 4.0;
    let (e1, e2, e3) = match depressed_cubic_roots(g2, g3) {
        CubicRoots::Real(e1, e2, e3) => (e1, e2, e3),
        CubicRoots::Complex { real, re, .. } => (real, re, re),
    };
    let coeffs = WeierstrassCoeffs { g2, g3, e1, e2, e3, a0, a1, a2 };
    let e1_deg = -a2;
    Ok(SwitchingSolutionParams {
        coeffs,
        c,
        r0,
        kappa_nr: kappa,
        g_over_r0c: params.g_detune / (r0 * c),
        a,
        e1: e1_deg,
        period: 2.0 * PI / (c.abs() * r0 * (6.0 * e1_deg).sqrt()),
        floor: 1.0 - 1.0 / (3.0 * e1_deg),
    })
}

/// Small-κ switching solution s_z = 1 − 1/(3e₁(1 + cot²(√(3e₁/2)·cR₀τ))).
pub fn sz_nonresonant(tau: f64, sp: &SwitchingSolutionParams) -> f64 {
    let w = (1.5 * sp.e1).sqrt() * sp.c * sp.r0 * tau;
    let sin = w.sin();
    // 1/(1 + cot²) = sin², which also covers the pole at w = kπ.
    1.0 - sin * sin / (3.0 * sp.e1)
}

/// Exact detuned solution s_z = 1 − 1/(2℘(cR₀τ) − A₂).
pub fn sz_nonresonant_general(tau: f64, sp: &SwitchingSolutionParams) -> Result<f64> {
    let s = sp.c * sp.r0 * tau;
    match weierstrass_p(s, &sp.coeffs) {
        Ok(p) => Ok(1.0 - 1.0 / (2.0 * p - sp.coeffs.a2)),
        Err(Error::Pole(_)) => Ok(1.0),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> ModelParams {
        ModelParams::with_r0(5e-3, -1.0, 1.0, 2.0, 20.0)
    }

    #[test]
    fn kappa_examples() {
        let p = fig1();
        assert!((kappa_resonant(&p, 0.0).unwrap() - 0.05).abs() < 1e-15);
        let x = (p.zeta / (2.0 * p.omega0 * p.r0)).acos();
        assert!((kappa_resonant(&p, x).unwrap() - 1.0).abs() < 1e-12);
        let q = ModelParams::with_r0(5e-3, -1.0, 1.0, 0.0, 20.0);
        assert_eq!(kappa_resonant(&q, 0.4).unwrap(), 0.0);
        assert!(matches!(kappa_resonant(&p, std::f64::consts::FRAC_PI_2), Err(Error::Node)));
    }

    #[test]
    fn start_values() {
        for stark in [0.4, 4.0, 8.0, 24.0] {
            let rp = ResonantSolutionParams::new(1.0, 4.0, stark).unwrap();
            assert_eq!(sz_resonant(0.0, &rp), 1.0);
            assert_eq!(u_resonant(0.0, &rp), 0.0);
            assert_eq!(v_resonant(0.0, &rp), 0.0);
        }
    }

    #[test]
    fn harmonic_limit() {
        let rp = ResonantSolutionParams::new(0.8, 4.0, 0.0).unwrap();
        for tau in [0.1, 0.7, 2.3] {
            assert!((sz_resonant(tau, &rp) - (0.8 * 4.0 * tau as f64).cos()).abs() < 1e-14);
        }
        assert!((period_resonant(&ResonantSolutionParams::new(1.0, 4.0, 0.0).unwrap()).unwrap() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn quarter_period_zero() {
        let rp = ResonantSolutionParams::new(1.0, 4.0, 4.0).unwrap();
        assert_eq!(rp.kappa, 0.5);
        let tau = complete_elliptic_k(0.5).unwrap() / 4.0;
        assert!(sz_resonant(tau, &rp).abs() < 1e-12);
    }

    #[test]
    fn radius_identity_all_branches() {
        let r0 = 4.0;
        let n = r0 * r0 / 16.0;
        for stark in [1.6, 4.0, 7.2, 8.0, 12.0, 24.0, -12.0] {
            for c in [1.0, -0.7] {
                let rp = ResonantSolutionParams::new(c, r0, stark * c.abs()).unwrap();
                for i in 0..200 {
                    let t = i as f64 * 0.013;
                    let (s, u, v) = (sz_resonant(t, &rp), u_resonant(t, &rp), v_resonant(t, &rp));
                    assert!((u * u + v * v + 16.0 * n * s * s - 16.0 * n).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn soliton_asymptote() {
        let rp = ResonantSolutionParams::new(0.5, 4.0, 4.0).unwrap();
        assert_eq!(rp.branch, Branch::Soliton);
        assert!((u_resonant(40.0, &rp) + 4.0).abs() < 1e-12);
        assert!(matches!(period_resonant(&rp), Err(Error::InfinitePeriod)));
    }

    #[test]
    fn period_diverges_near_separatrix() {
        let near = ResonantSolutionParams { kappa: 1.0 - 1e-8, branch: Branch::Oscillatory, ..ResonantSolutionParams::new(1.0, 4.0, 0.0).unwrap() };
        let far = ResonantSolutionParams { kappa: 0.9, ..near };
        assert!(period_resonant(&near).unwrap() > 2.0 * period_resonant(&far).unwrap());
    }

    #[test]
    fn hamiltonian_values_and_gradient() {
        let (c, stark, r0) = (0.6, 3.0, 4.0);
        assert!((effective_hamiltonian(1.0, 0.0, c, stark, r0).unwrap() - c * r0 * r0 / 2.0).abs() < 1e-14);
        assert!((effective_hamiltonian(-1.0, 0.0, c, stark, r0).unwrap() - c * r0 * r0 / 2.0).abs() < 1e-14);
        assert!(matches!(effective_hamiltonian(0.5, 0.1, 0.0, stark, r0), Err(Error::Node)));

        let p = ModelParams::with_r0(0.0, -stark / 2.0, 1.0, stark, r0);
        let h = 1e-6;
        for &(sz, v) in &[(0.3, 1.2), (-0.8, -2.0), (0.95, 0.4)] {
            let u = stark * (sz * sz - 1.0) / (2.0 * c);
            let (_, dv, dsz) = crate::semiclassical::rhs_fast_subsystem(u, v, sz, c, &p);
            let hv = |s: f64, w: f64| effective_hamiltonian(s, w, c, stark, r0).unwrap();
            let dh_dv = (hv(sz, v + h) - hv(sz, v - h)) / (2.0 * h);
            let dh_ds = (hv(sz + h, v) - hv(sz - h, v)) / (2.0 * h);
            assert!((dsz + dh_dv).abs() < 1e-8);
            assert!((dv - dh_ds).abs() < 1e-8);
        }
    }

    #[test]
    fn poincare_cases() {
        assert_eq!(poincare_index(0.0, 0.1, 1.0, 1.0).unwrap(), 1);
        assert_eq!(poincare_index(0.7, 0.0, 1.0, 3.0).unwrap(), 1);
        let xb = 0.1f64.acos();
        assert_eq!(poincare_index(xb - 1e-3, 0.1, 1.0, 1.0).unwrap(), 1);
        assert_eq!(poincare_index(xb + 1e-3, 0.1, 1.0, 1.0).unwrap(), -1);
        assert!(matches!(poincare_index(xb, 0.1, 1.0, 1.0), Err(Error::BifurcationPoint)));
    }

    #[test]
    fn drift_examples() {
        let p = fig1();
        assert_eq!(x_adiabatic(0.0, &p).unwrap(), 0.0);
        let (rate, ripple) = adiabatic_rates(&p).unwrap();
        assert!((rate - 0.1).abs() < 1e-5);
        assert!((ripple - 6.25e-6).abs() < 1e-18);
    }

    #[test]
    fn bifurcation_time_fig1() {
        let tb = bifurcation_time(&fig1()).unwrap();
        assert!((tb - 10.0 * 0.05f64.acos().ln()).abs() < 1e-12);
        assert!((tb - 4.19).abs() < 0.005);
        let q = ModelParams::with_r0(5e-3, -1.0, 1.0, 40.0, 20.0);
        assert!(bifurcation_time(&q).is_err());
    }

    #[test]
    fn degenerate_switching_values() {
        // g/(R0 c) = 1 with a tiny Stark shift.
        let p = ModelParams::with_r0(0.0, 4.0 - 5e-7, 1.0, 1e-6, 4.0);
        let sp = weierstrass_coeffs_nonresonant(&p, 0.0).unwrap();
        assert!((sp.g_over_r0c - 1.0).abs() < 1e-12);
        assert!((sp.e1 - (1.0 + sp.a * sp.a) / 6.0).abs() < 1e-15);
        assert!(sp.coeffs.is_degenerate() || (sp.coeffs.e2 - sp.coeffs.e3).abs() < 1e-5);
        assert_eq!(sz_nonresonant(0.0, &sp), 1.0);
        assert!((sz_nonresonant(sp.switching_time(), &sp) - sp.floor).abs() < 1e-12);
    }

    #[test]
    fn resonant_limit_full_inversion() {
        let p = ModelParams::with_r0(0.0, 0.0, 1.0, 0.0, 4.0);
        let sp = weierstrass_coeffs_nonresonant(&p, 0.0).unwrap();
        assert!((sp.e1 - 1.0 / 6.0).abs() < 1e-15);
        assert!((sp.floor + 1.0).abs() < 1e-14);
        let rp = ResonantSolutionParams::new(1.0, 4.0, 0.0).unwrap();
        for t in [0.05, 0.3, 1.1] {
            assert!((sz_nonresonant(t, &sp) - sz_resonant(t, &rp)).abs() < 1e-12);
        }
    }

    #[test]
    fn general_reduction_matches_resonant_cn() {
        // At g = 0 the Weierstrass form must reproduce the cn solution.
        for stark in [1.6, 4.0, 7.2] {
            let p = ModelParams::with_r0(0.0, -stark / 2.0, 1.0, stark, 4.0);
            let sp = weierstrass_coeffs_nonresonant(&p, 0.0).unwrap();
            let rp = ResonantSolutionParams::new(1.0, 4.0, stark).unwrap();
            for i in 1..60 {
                let t = i as f64 * 0.021;
                let a = sz_nonresonant_general(t, &sp).unwrap();
                assert!((a - sz_resonant(t, &rp)).abs() < 1e-9, "stark {stark} t {t}");
            }
        }
    }
}
