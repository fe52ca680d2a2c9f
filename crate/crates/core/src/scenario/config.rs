use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiclassical::{ModelParams, SemiclassicalState};

/// Built-in parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    ResonantBifurcation,
    NonresonantSwitching,
    ChaoticMotion,
    PurityAdiabatic,
    PurityWeakRegular,
    PurityWeakChaotic,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::ResonantBifurcation,
        Scenario::NonresonantSwitching,
        Scenario::ChaoticMotion,
        Scenario::PurityAdiabatic,
        Scenario::PurityWeakRegular,
        Scenario::PurityWeakChaotic,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ResonantBifurcation => "ResonantBifurcation",
            Self::NonresonantSwitching => "NonresonantSwitching",
            Self::ChaoticMotion => "ChaoticMotion",
            Self::PurityAdiabatic => "PurityAdiabatic",
            Self::PurityWeakRegular => "PurityWeakRegular",
            Self::PurityWeakChaotic => "PurityWeakChaotic",
            Self::Custom => "Custom",
        }
    }

    /// One-line summary for `tavis scenarios`.
    pub fn describe(self) -> &'static str {
        match self {
            Self::ResonantBifurcation => {
                "resonant inversion under adiabatic drift and its bifurcation time (R0=20, alpha=5e-3, zeta/Omega0=2)"
            }
            Self::NonresonantSwitching => "detuned switching solution with g/(R0 c)=1 against direct integration",
            Self::ChaoticMotion => {
                "full semiclassical run, autocorrelation, spectrum and chaos verdict (delta=-0.5, alpha=0.5, N=50)"
            }
            Self::PurityAdiabatic => "strong-coupling purity surface over (t, x) (Omega0=1, n_bar=1, zeta=1)",
            Self::PurityWeakRegular => "weak-coupling purity with the regular-motion phase (alpha=1e-2, zeta=0.2, Omega0=0.1)",
            Self::PurityWeakChaotic => "weak-coupling purity with the ensemble-averaged phase (alpha0=1)",
            Self::Custom => "hybrid classical-quantum run from user parameters and initial state",
        }
    }

    pub fn default_params(self) -> ModelParams {
        match self {
            Self::ResonantBifurcation => ModelParams::with_r0(5e-3, -1.0, 1.0, 2.0, 20.0),
            // g = δ + Δ/2 = R₀ gives g/(R₀c) = 1 at x = 0; Δ is kept small.
            Self::NonresonantSwitching => ModelParams::with_r0(0.0, 20.0 - 5e-4, 1.0, 1e-3, 20.0),
            Self::ChaoticMotion => ModelParams::new(0.5, -0.5, 1.0, 0.5, 50.0),
            Self::PurityAdiabatic => ModelParams::new(5e-3, 0.0, 1.0, 1.0, 1.0).with_n_bar(1.0).with_delta_q(1.0),
            Self::PurityWeakRegular => ModelParams::new(1e-2, 0.0, 0.1, 0.2, 1.0).with_n_bar(1.0),
            Self::PurityWeakChaotic => ModelParams::new(0.5, 0.0, 0.1, 0.2, 1.0).with_n_bar(1.0),
            Self::Custom => ModelParams::new(0.5, 0.0, 1.0, 0.2, 1.0).with_n_bar(1.0),
        }
    }

    pub fn default_initial(self) -> SemiclassicalState {
        match self {
            Self::ChaoticMotion => SemiclassicalState::new(0.0, 1.0, 0.0, 0.0, 1.0),
            _ => SemiclassicalState::new(0.0, 0.0, 0.0, 0.0, 1.0),
        }
    }

    pub fn default_integrate(self) -> IntegrateSettings {
        let (t_max, dt_out) = match self {
            Self::ResonantBifurcation => (12.0, 0.005),
            Self::NonresonantSwitching => (1.0, 1e-3),
            Self::ChaoticMotion => (400.0, 0.02),
            Self::PurityAdiabatic => (10.0, 0.05),
            Self::PurityWeakRegular => (150.0, 0.01),
            Self::PurityWeakChaotic => (20.0, 0.01),
            Self::Custom => (20.0, 0.05),
        };
        // The long chaotic run needs tighter control to hold its invariant.
        let (rtol, atol) = if self == Self::ChaoticMotion { (1e-11, 1e-14) } else { (1e-9, 1e-12) };
        IntegrateSettings { t_max, dt_out, rtol, atol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateSettings {
    pub t_max: f64,
    pub dt_out: f64,
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSettings {
    /// Fock cutoff; derived from n̄ when absent.
    pub n_max: Option<usize>,
    pub alpha0: f64,
    /// Monte-Carlo realizations for the ensemble-averaged phase.
    pub realizations: usize,
}

impl Default for QuantumSettings {
    fn default() -> Self {
        Self { n_max: None, alpha0: 1.0, realizations: 100_000 }
    }
}

/// Fully resolved run description; echoed verbatim into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub params: ModelParams,
    pub initial: SemiclassicalState,
    pub integrate: IntegrateSettings,
    pub quantum: QuantumSettings,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults of a built-in scenario.
    pub fn defaults(scenario: Scenario) -> Self {
        Self {
            scenario,
            params: scenario.default_params(),
            initial: scenario.default_initial(),
            integrate: scenario.default_integrate(),
            quantum: QuantumSettings::default(),
            seed: 0,
            output_dir: None,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsPatch {
    alpha: Option<f64>,
    delta: Option<f64>,
    #[serde(rename = "Delta")]
    stark: Option<f64>,
    #[serde(rename = "N")]
    n_field: Option<f64>,
    s: Option<f64>,
    #[serde(rename = "Omega0")]
    omega0: Option<f64>,
    zeta: Option<f64>,
    n_bar: Option<f64>,
    g_detune: Option<f64>,
    #[serde(rename = "R0")]
    r0: Option<f64>,
    delta_q: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatePatch {
    x: Option<f64>,
    p: Option<f64>,
    u: Option<f64>,
    v: Option<f64>,
    sz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratePatch {
    t_max: Option<f64>,
    dt_out: Option<f64>,
    rtol: Option<f64>,
    atol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumPatch {
    n_max: Option<usize>,
    alpha0: Option<f64>,
    realizations: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    #[serde(default)]
    params: ParamsPatch,
    #[serde(default)]
    initial: StatePatch,
    #[serde(default)]
    integrate: IntegratePatch,
    #[serde(default)]
    quantum: QuantumPatch,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
}

fn consistent(name: &str, given: f64, derived: f64) -> Result<()> {
    if (given - derived).abs() > 1e-12 * derived.abs().max(1.0) {
        return Err(Error::Config(format!("{name} = {given} is inconsistent with the derived value {derived}")));
    }
    Ok(())
}

fn resolve_params(base: ModelParams, p: &ParamsPatch) -> Result<ModelParams> {
    let omega0 = p.omega0.unwrap_or(base.omega0);
    // Δ may stand in for ζ, and g for δ, but both members of a pair must agree.
    let zeta = match (p.zeta, p.stark) {
        (Some(z), Some(d)) => {
            consistent("Delta", d, z / omega0)?;
            z
        }
        (None, Some(d)) => d * omega0,
        (Some(z), None) => z,
        (None, None) => base.zeta,
    };
    let stark = zeta / omega0;
    let delta = match (p.delta, p.g_detune) {
        (Some(dl), Some(g)) => {
            consistent("g_detune", g, dl + stark / 2.0)?;
            dl
        }
        (None, Some(g)) => g - stark / 2.0,
        (Some(dl), None) => dl,
        (None, None) => base.delta,
    };
    let n_field = match (p.n_field, p.r0) {
        (Some(n), Some(r)) => {
            consistent("R0", r, 4.0 * n.sqrt())?;
            n
        }
        (None, Some(r)) => r * r / 16.0,
        (Some(n), None) => n,
        (None, None) => base.n_field,
    };
    let params = ModelParams::new(p.alpha.unwrap_or(base.alpha), delta, omega0, zeta, n_field)
        .with_spin(p.s.unwrap_or(base.s))
        .with_n_bar(p.n_bar.unwrap_or(base.n_bar))
        .with_delta_q(p.delta_q.unwrap_or(base.delta_q));
    params.validate()?;
    Ok(params)
}

/// Parse a JSON config, apply the scenario defaults and check every constraint.
pub fn validate_config(raw: &str) -> Result<RunConfig> {
    let rc: RawConfig = serde_json::from_str(raw).map_err(|e| Error::Config(e.to_string()))?;
    let mut cfg = RunConfig::defaults(rc.scenario);
    cfg.params = resolve_params(cfg.params, &rc.params)?;

    let st = &mut cfg.initial;
    let ip = &rc.initial;
    st.x = ip.x.unwrap_or(st.x);
    st.p = ip.p.unwrap_or(st.p);
    st.u = ip.u.unwrap_or(st.u);
    st.v = ip.v.unwrap_or(st.v);
    st.sz = ip.sz.unwrap_or(st.sz);

    let ig = &mut cfg.integrate;
    ig.t_max = rc.integrate.t_max.unwrap_or(ig.t_max);
    ig.dt_out = rc.integrate.dt_out.unwrap_or(ig.dt_out);
    ig.rtol = rc.integrate.rtol.unwrap_or(ig.rtol);
    ig.atol = rc.integrate.atol.unwrap_or(ig.atol);

    let q = &mut cfg.quantum;
    q.n_max = rc.quantum.n_max.or(q.n_max);
    q.alpha0 = rc.quantum.alpha0.unwrap_or(q.alpha0);
    q.realizations = rc.quantum.realizations.unwrap_or(q.realizations);

    cfg.seed = rc.seed.unwrap_or(0);
    cfg.output_dir = rc.output_dir;
    check(&cfg)?;
    Ok(cfg)
}

/// Constraints that do not depend on how the config was built.
pub fn check(cfg: &RunConfig) -> Result<()> {
    cfg.params.validate()?;
    let s = &cfg.initial;
    for (name, v) in [("x", s.x), ("p", s.p), ("u", s.u), ("v", s.v), ("sz", s.sz)] {
        if !v.is_finite() {
            return Err(Error::Config(format!("initial.{name} is not finite")));
        }
    }
    let ig = &cfg.integrate;
    if !(ig.t_max > 0.0 && ig.t_max.is_finite()) {
        return Err(Error::Config(format!("integrate.t_max = {} must be positive and finite", ig.t_max)));
    }
    if !(ig.dt_out > 0.0 && ig.dt_out <= ig.t_max) {
        return Err(Error::Config(format!("integrate.dt_out = {} must lie in (0, t_max]", ig.dt_out)));
    }
    if !(ig.rtol > 0.0 && ig.rtol < 1.0) || !(ig.atol >= 0.0 && ig.atol.is_finite()) {
        return Err(Error::Config("integrate.rtol must lie in (0, 1) and atol be non-negative".into()));
    }
    if ig.t_max / ig.dt_out > 1e7 {
        return Err(Error::Config("more than 1e7 output samples requested".into()));
    }
    let q = &cfg.quantum;
    if !(q.alpha0 > 0.0 && q.alpha0.is_finite()) {
        return Err(Error::Config("quantum.alpha0 must be positive".into()));
    }
    if q.realizations == 0 {
        return Err(Error::Config("quantum.realizations must be at least 1".into()));
    }
    if cfg.scenario == Scenario::ResonantBifurcation && !(cfg.params.alpha > 0.0 && cfg.params.zeta > 0.0) {
        return Err(Error::Config("ResonantBifurcation needs alpha > 0 and zeta > 0".into()));
    }
    if cfg.scenario == Scenario::PurityWeakRegular && !(cfg.params.alpha > 0.0 && cfg.params.zeta > 0.0) {
        return Err(Error::Config("PurityWeakRegular needs alpha > 0 and zeta > 0".into()));
    }
    Ok(())
}
