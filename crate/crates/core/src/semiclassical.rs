//! Model parameters, the semiclassical equations of motion and their integrals.
//!
//! State variables: `x` is the atomic position in units of 1/k_f, `p` the
//! scaled momentum, `u` and `v` the field–spin quadratures and `sz` the
//! inversion. Time is measured in units of 1/Ω₀.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{sample_grid, solve, Tolerances};

/// Dimensionless model constants, with the redundant fields kept consistent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Recoil ratio α = k_f²/(mΩ₀).
    pub alpha: f64,
    /// Detuning δ = (ω_f − ω₀)/Ω₀.
    pub delta: f64,
    /// Scaled Stark shift Δ = ζ/Ω₀.
    #[serde(rename = "Delta")]
    pub stark: f64,
    /// Field invariant N = a_x² + a_y² − s_z².
    #[serde(rename = "N")]
    pub n_field: f64,
    pub s: f64,
    #[serde(rename = "Omega0")]
    pub omega0: f64,
    pub zeta: f64,
    pub n_bar: f64,
    /// Effective detuning g = δ + Δ/2.
    pub g_detune: f64,
    /// R₀ = 4√N.
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Two-photon detuning ω₀ − 2ω_f used by the quantum amplitudes.
    #[serde(default)]
    pub delta_q: f64,
}

impl ModelParams {
    /// Build a consistent parameter set from the independent quantities.
    pub fn new(alpha: f64, delta: f64, omega0: f64, zeta: f64, n_field: f64) -> Self {
        let stark = zeta / omega0;
        Self {
            alpha,
            delta,
            stark,
            n_field,
            s: 1.0,
            omega0,
            zeta,
            n_bar: 0.0,
            g_detune: delta + stark / 2.0,
            r0: 4.0 * n_field.sqrt(),
            delta_q: 0.0,
        }
    }

    /// Same, but parameterised by R₀ instead of N.
    pub fn with_r0(alpha: f64, delta: f64, omega0: f64, zeta: f64, r0: f64) -> Self {
        Self::new(alpha, delta, omega0, zeta, r0 * r0 / 16.0)
    }

    pub fn with_n_bar(mut self, n_bar: f64) -> Self {
        self.n_bar = n_bar;
        self
    }

    pub fn with_spin(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn with_delta_q(mut self, delta_q: f64) -> Self {
        self.delta_q = delta_q;
        self
    }

    /// Check the redundancy relations and physical ranges.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha", self.alpha),
            ("delta", self.delta),
            ("Delta", self.stark),
            ("N", self.n_field),
            ("s", self.s),
            ("Omega0", self.omega0),
            ("zeta", self.zeta),
            ("n_bar", self.n_bar),
            ("g_detune", self.g_detune),
            ("R0", self.r0),
            ("delta_q", self.delta_q),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Config(format!("{name} is not finite")));
        }
        if !(self.n_field > 0.0) {
            return Err(Error::Config("N must be positive".into()));
        }
        if !(self.omega0 > 0.0) {
            return Err(Error::Config("Omega0 must be positive".into()));
        }
        if self.n_bar < 0.0 {
            return Err(Error::Config("n_bar must be non-negative".into()));
        }
        if (self.stark - self.zeta / self.omega0).abs() > 1e-12 * self.stark.abs().max(1.0) {
            return Err(Error::Config(format!(
                "Delta = {} is inconsistent with zeta/Omega0 = {}",
                self.stark,
                self.zeta / self.omega0
            )));
        }
        if (self.g_detune - (self.delta + self.stark / 2.0)).abs() > 1e-12 * self.g_detune.abs().max(1.0) {
            return Err(Error::Config("g_detune must equal delta + Delta/2".into()));
        }
        if (self.r0 - 4.0 * self.n_field.sqrt()).abs() > 1e-12 * self.r0.max(1.0) {
            return Err(Error::Config("R0 must equal 4*sqrt(N)".into()));
        }
        Ok(())
    }
}

/// One phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiclassicalState {
    pub x: f64,
    pub p: f64,
    pub u: f64,
    pub v: f64,
    pub sz: f64,
}

impl SemiclassicalState {
    pub fn new(x: f64, p: f64, u: f64, v: f64, sz: f64) -> Self {
        Self { x, p, u, v, sz }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.x, self.p, self.u, self.v, self.sz]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self { x: y[0], p: y[1], u: y[2], v: y[3], sz: y[4] }
    }
}

/// Which vector field to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    /// The complete semiclassical equations.
    Full,
    /// Strong-coupling form, with N − s² + 2s_z² replaced by N.
    Strong,
    /// Spin/field subsystem with the atom frozen at cos x = `c`.
    FastSubsystem { c: f64 },
}

/// Full vector field.
pub fn rhs_full(s: &SemiclassicalState, params: &ModelParams) -> SemiclassicalState {
    let (sin, cos) = s.x.sin_cos();
    let w = params.delta + params.stark / 2.0 + params.stark * s.sz;
    let n_eff = params.n_field - params.s * params.s + 2.0 * s.sz * s.sz;
    SemiclassicalState {
        x: params.alpha * s.p,
        p: -sin * s.u,
        u: -w * s.v,
        v: w * s.u + 16.0 * cos * s.sz * n_eff,
        sz: -cos * s.v,
    }
}

/// Strong-coupling vector field.
pub fn rhs_strong(s: &SemiclassicalState, params: &ModelParams) -> SemiclassicalState {
    let (sin, cos) = s.x.sin_cos();
    let w = params.g_detune + params.stark * s.sz;
    SemiclassicalState {
        x: params.alpha * s.p,
        p: -sin * s.u,
        u: -w * s.v,
        v: w * s.u + 16.0 * cos * params.n_field * s.sz,
        sz: -cos * s.v,
    }
}

/// Fast spin/field subsystem at frozen `c = cos x`; returns (u̇, v̇, ṡ_z).
pub fn rhs_fast_subsystem(u: f64, v: f64, sz: f64, c: f64, params: &ModelParams) -> (f64, f64, f64) {
    let w = params.g_detune + params.stark * sz;
    (-w * v, w * u + 16.0 * c * params.n_field * sz, -c * v)
}

fn rhs_dispatch(system: System, params: &ModelParams, y: &[f64], dy: &mut [f64]) {
    let s = SemiclassicalState::from_slice(y);
    let d = match system {
        System::Full => rhs_full(&s, params),
        System::Strong => rhs_strong(&s, params),
        System::FastSubsystem { c } => {
            let (du, dv, dsz) = rhs_fast_subsystem(s.u, s.v, s.sz, c, params);
            SemiclassicalState { x: 0.0, p: 0.0, u: du, v: dv, sz: dsz }
        }
    };
    dy.copy_from_slice(&d.to_array());
}

/// Sampled solution of one of the systems.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SemiclassicalState>,
    /// Largest relative drift of the invariants tracked for this system.
    pub conserved_drift: f64,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "tau,x,p,u,v,sz")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, s.x, s.p, s.u, s.v, s.sz
            )?;
        }
        Ok(())
    }

    pub fn last(&self) -> &SemiclassicalState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn series(&self, f: impl Fn(&SemiclassicalState) -> f64) -> Vec<f64> {
        self.states.iter().map(f).collect()
    }
}

/// Integrate `system` from τ = 0 to `t_end`, sampling every `dt_out`.
pub fn integrate(
    system: System,
    params: &ModelParams,
    state0: SemiclassicalState,
    t_end: f64,
    dt_out: f64,
    tol: &Tolerances,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !(dt_out > 0.0) {
        return Err(Error::Domain("t_end and dt_out must be positive".into()));
    }
    integrate_between(system, params, state0, 0.0, t_end, dt_out, tol)
}

/// Integrate between arbitrary times; `t_end < t0` runs backward.
pub fn integrate_between(
    system: System,
    params: &ModelParams,
    state0: SemiclassicalState,
    t0: f64,
    t_end: f64,
    dt_out: f64,
    tol: &Tolerances,
) -> Result<Trajectory> {
    let params_copy = *params;
    let sys = (5usize, move |_t: f64, y: &[f64], dy: &mut [f64]| {
        rhs_dispatch(system, &params_copy, y, dy)
    });
    let ts = sample_grid(t0, t_end, dt_out);
    let sol = solve(&sys, t0, &state0.to_array(), &ts, tol)?;
    let states: Vec<SemiclassicalState> =
        sol.states.iter().map(|y| SemiclassicalState::from_slice(y)).collect();
    let conserved_drift = tracked_drift(system, params, &states);
    Ok(Trajectory { times: sol.times, states, conserved_drift })
}

fn tracked_drift(system: System, params: &ModelParams, states: &[SemiclassicalState]) -> f64 {
    let drift = |f: &dyn Fn(&SemiclassicalState) -> f64| relative_drift(states.iter().map(f));
    match system {
        System::Full => drift(&|s| invariant_generalized(s, params)),
        System::FastSubsystem { .. } => drift(&|s| invariant_r2(s, params)),
        System::Strong => {
            let r2 = drift(&|s| invariant_r2(s, params));
            if params.stark == 0.0 {
                r2
            } else {
                r2.max(drift(&|s| invariant_w(s, params).unwrap_or(0.0)))
            }
        }
    }
}

/// Max |I(τ) − I(0)| / |I(0)| over a series (absolute when I(0) = 0).
pub fn relative_drift(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = values.into_iter();
    let Some(first) = it.next() else { return 0.0 };
    let scale = if first == 0.0 { 1.0 } else { first.abs() };
    it.map(|v| (v - first).abs() / scale).fold(0.0, f64::max)
}

/// W = αp²/2 − u cos x + (g + Δs_z)²/(2Δ).
pub fn invariant_w(s: &SemiclassicalState, params: &ModelParams) -> Result<f64> {
    if params.stark == 0.0 {
        return Err(Error::DivisionByZero("invariant W needs a non-zero Stark shift"));
    }
    let w = params.g_detune + params.stark * s.sz;
    Ok(params.alpha * s.p * s.p / 2.0 - s.u * s.x.cos() + w * w / (2.0 * params.stark))
}

/// R² = u² + v² + 16N s_z², conserved by the strong-coupling flow.
pub fn invariant_r2(s: &SemiclassicalState, params: &ModelParams) -> f64 {
    s.u * s.u + s.v * s.v + 16.0 * params.n_field * s.sz * s.sz
}

/// u² + v² + 16 s_z²(N − s² + s_z²), conserved by the full flow.
pub fn invariant_generalized(s: &SemiclassicalState, params: &ModelParams) -> f64 {
    let sz2 = s.sz * s.sz;
    s.u * s.u + s.v * s.v + 16.0 * sz2 * (params.n_field - params.s * params.s + sz2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> ModelParams {
        ModelParams::new(0.5, -0.5, 1.0, 0.0, 50.0)
    }

    #[test]
    fn full_rhs_at_excited_rest() {
        let d = rhs_full(&SemiclassicalState::new(0.0, 0.0, 0.0, 0.0, 1.0), &fig3());
        assert_eq!(d.to_array(), [0.0, 0.0, 0.0, 816.0, 0.0]);
    }

    #[test]
    fn strong_rhs_at_excited_rest() {
        let d = rhs_strong(&SemiclassicalState::new(0.0, 0.0, 0.0, 0.0, 1.0), &fig3());
        assert_eq!(d.v, 800.0);
    }

    #[test]
    fn node_decouples_spin() {
        let d = rhs_full(&SemiclassicalState::new(std::f64::consts::FRAC_PI_2, 0.3, 0.2, -0.7, 0.4), &fig3());
        assert!(d.sz.abs() < 1e-16);
    }

    #[test]
    fn fig3_initial_velocity() {
        let d = rhs_full(&SemiclassicalState::new(0.0, 1.0, 0.0, 0.0, 1.0), &fig3());
        assert_eq!(d.x, 0.5);
    }

    #[test]
    fn strong_rhs_simple_state() {
        let p = ModelParams::new(0.3, 0.0, 1.0, 0.0, 2.0);
        let d = rhs_strong(&SemiclassicalState::new(0.4, 2.0, 0.0, 1.0, 0.0), &p);
        assert!((d.x - 0.6).abs() < 1e-15);
        assert_eq!(d.p, -0.0);
        assert_eq!((d.u, d.v), (0.0, 0.0));
        assert!((d.sz + 0.4f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn full_and_strong_agree_when_sz_squared_is_half() {
        let p = ModelParams::new(0.2, 0.1, 1.0, 0.3, 10.0);
        let s = SemiclassicalState::new(0.3, 0.1, 0.5, -0.2, std::f64::consts::FRAC_1_SQRT_2);
        let (a, b) = (rhs_full(&s, &p), rhs_strong(&s, &p));
        for (x, y) in a.to_array().iter().zip(b.to_array()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_subsystem_cases() {
        let p = ModelParams::new(0.0, 0.0, 1.0, 0.0, 3.0);
        assert_eq!(rhs_fast_subsystem(0.0, 0.0, 1.0, 1.0, &p), (-0.0, 48.0, -0.0));
        let q = ModelParams::new(0.0, 0.2, 1.0, 0.4, 3.0);
        let (du, _, dsz) = rhs_fast_subsystem(0.7, 0.0, 0.3, 0.5, &q);
        assert_eq!((du, dsz), (-0.0, -0.0));
        let (du, dv, dsz) = rhs_fast_subsystem(0.7, 0.2, 0.3, 0.0, &q);
        let w = q.g_detune + q.stark * 0.3;
        assert_eq!((du, dv, dsz), (-w * 0.2, w * 0.7, -0.0));
    }

    #[test]
    fn invariant_examples() {
        let p = ModelParams::new(0.1, -1.0, 1.0, 2.0, 1.0);
        assert_eq!(p.g_detune, 0.0);
        let s = SemiclassicalState::new(std::f64::consts::FRAC_PI_2, 0.0, 0.4, 0.0, 1.0);
        assert!((invariant_w(&s, &p).unwrap() - 1.0).abs() < 1e-15);
        let rest = SemiclassicalState::new(0.0, 0.0, 0.0, 0.0, 1.0);
        assert_eq!(invariant_w(&rest, &p).unwrap(), p.stark / 2.0);
        assert_eq!(invariant_r2(&rest, &p), 16.0);
        let zero = ModelParams::new(0.1, -1.0, 1.0, 0.0, 1.0);
        assert!(matches!(invariant_w(&rest, &zero), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn zero_field_stays_put() {
        let p = ModelParams::new(0.5, 0.0, 1.0, 0.0, 4.0);
        let s0 = SemiclassicalState::new(0.3, 0.0, 0.0, 0.0, 0.0);
        let tr = integrate(System::Strong, &p, s0, 10.0, 1.0, &Tolerances::default()).unwrap();
        for s in &tr.states {
            for (a, b) in s.to_array().iter().zip(s0.to_array()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn validation_catches_inconsistency() {
        let mut p = ModelParams::new(0.5, 0.0, 1.0, 0.2, 4.0);
        assert!(p.validate().is_ok());
        p.stark = 0.3;
        assert!(p.validate().is_err());
    }

    #[test]
    fn csv_header_and_precision() {
        let tr = Trajectory {
            times: vec![0.0],
            states: vec![SemiclassicalState::new(1.0 / 3.0, 0.0, 0.0, 0.0, 1.0)],
            conserved_drift: 0.0,
        };
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tau,x,p,u,v,sz\n"));
        assert!(text.contains("3.3333333333333331e-1"));
    }
}
