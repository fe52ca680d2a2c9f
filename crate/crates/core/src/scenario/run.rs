use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{RunConfig, Scenario};
use crate::analytic::{
    bifurcation_time, detect_singularity, kappa_resonant, sz_drifting, sz_nonresonant,
    weierstrass_coeffs_nonresonant, x_adiabatic, KappaForm,
};
use crate::chaos::{autocorrelation, chaos_verdict};
use crate::error::{Error, Result};
use crate::ode::{sample_grid, Tolerances};
use crate::quantum::{
    density_resonant_closed, density_weak, dominant_frequency, excited_coherent, hybrid_evolve,
    monte_carlo_mean_q, purity, purity_closed_adiabatic, purity_weak, q_chaotic_mean, q_regular,
    reduced_density, truncation_for, CorrelationKernel, EnsembleConfig, PurityCurve,
    ReducedDensityMatrix, WeakRegime,
};
use crate::semiclassical::{integrate, System};

/// Largest relative drift of a tracked invariant accepted in a run.
pub const DRIFT_MAX: f64 = 1e-6;
/// Largest change of the total amplitude norm accepted in a hybrid run.
pub const NORM_DRIFT_MAX: f64 = 1e-8;
/// Slack allowed outside [1/2, 1] before a purity sample counts as a violation.
pub const PURITY_SLACK: f64 = 1e-9;
/// The period must grow by this factor before a singularity is reported.
pub const SINGULARITY_MULTIPLE: f64 = 10.0;
pub const SINGULARITY_STEP: f64 = 0.01;
/// Lag window of the autocorrelation in the chaos run.
pub const CHAOS_MAX_LAG: f64 = 10.0;
/// Points per axis of the (t, x) purity surface.
pub const PURITY_GRID: usize = 200;
/// Fraction of the record averaged for the late-time purity.
pub const FINAL_WINDOW: f64 = 0.25;
/// Horizon and resolution of the Monte-Carlo phase average.
pub const ENSEMBLE_T_MAX: f64 = 3.0;
pub const ENSEMBLE_GRID: usize = 101;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Record of one run, written as `manifest.json` beside the outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: Scenario,
    pub version: &'static str,
    pub config: RunConfig,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputFile>,
    /// Worst relative drift of each tracked invariant.
    pub drift: BTreeMap<String, f64>,
    /// Scenario-specific headline numbers.
    pub summary: BTreeMap<String, Value>,
    /// Drift limits that were exceeded; a non-empty list fails the run.
    pub violations: Vec<String>,
}

struct Report {
    dir: PathBuf,
    outputs: Vec<OutputFile>,
    drift: BTreeMap<String, f64>,
    summary: BTreeMap<String, Value>,
    violations: Vec<String>,
}

impl Report {
    fn emit(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        fs::write(self.dir.join(name), &buf)?;
        self.outputs.push(OutputFile { file: name.to_string(), sha256: sha256_hex(&buf), bytes: buf.len() });
        Ok(())
    }

    fn emit_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        self.emit(name, |w| writeln!(w, "{text}"))
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    fn drift(&mut self, key: &str, value: f64, limit: f64) {
        self.drift.insert(key.to_string(), value);
        if !(value <= limit) {
            self.violations.push(format!("{key} drift {value:e} exceeds {limit:e}"));
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Run one scenario, writing its outputs and `manifest.json` into `out_dir`.
pub fn run_scenario(cfg: &RunConfig, out_dir: &Path) -> Result<RunManifest> {
    super::config::check(cfg)?;
    let start = Instant::now();
    fs::create_dir_all(out_dir)?;
    let mut rep = Report {
        dir: out_dir.to_path_buf(),
        outputs: Vec::new(),
        drift: BTreeMap::new(),
        summary: BTreeMap::new(),
        violations: Vec::new(),
    };
    match cfg.scenario {
        Scenario::ResonantBifurcation => resonant_bifurcation(cfg, &mut rep)?,
        Scenario::NonresonantSwitching => nonresonant_switching(cfg, &mut rep)?,
        Scenario::ChaoticMotion => chaotic_motion(cfg, &mut rep)?,
        Scenario::PurityAdiabatic => purity_adiabatic(cfg, &mut rep)?,
        Scenario::PurityWeakRegular => purity_weak_regular(cfg, &mut rep)?,
        Scenario::PurityWeakChaotic => purity_weak_chaotic(cfg, &mut rep)?,
        Scenario::Custom => custom(cfg, &mut rep)?,
    }
    let manifest = RunManifest {
        scenario: cfg.scenario,
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: rep.outputs,
        drift: rep.drift,
        summary: rep.summary,
        violations: rep.violations,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(out_dir.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}

fn tolerances(cfg: &RunConfig) -> Tolerances {
    Tolerances::new(cfg.integrate.rtol, cfg.integrate.atol)
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

/// Mean spacing of successive local minima, refined by a parabola through
/// each minimum and its neighbours.
pub fn oscillation_period(times: &[f64], values: &[f64]) -> Option<f64> {
    let mut minima = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b < a && b <= c {
            let denom = a - 2.0 * b + c;
            let shift = if denom > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let h = times[i + 1] - times[i];
            minima.push(times[i] + shift * h);
        }
    }
    if minima.len() < 2 {
        return None;
    }
    Some((minima[minima.len() - 1] - minima[0]) / (minima.len() - 1) as f64)
}

fn resonant_bifurcation(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    let tau_b = bifurcation_time(p)?;
    let scan = detect_singularity(p, KappaForm::Linear, cfg.integrate.t_max, SINGULARITY_STEP, SINGULARITY_MULTIPLE)?;
    let mut rows = Vec::new();
    for tau in sample_grid(0.0, cfg.integrate.t_max, cfg.integrate.dt_out) {
        let x = x_adiabatic(tau, p)?;
        // The linearised drift eventually carries the atom onto a node.
        let (Ok(kappa), Ok(sz)) = (kappa_resonant(p, x), sz_drifting(tau, p, KappaForm::Linear)) else {
            break;
        };
        rows.push([tau, x, kappa, sz]);
    }
    let kappa_b = kappa_resonant(p, x_adiabatic(tau_b, p)?).ok();
    rep.emit("inversion.csv", |w| {
        writeln!(w, "tau,x,kappa,sz")?;
        for r in &rows {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", r[0], r[1], r[2], r[3])?;
        }
        Ok(())
    })?;
    let info = json!({
        "tau_b": tau_b,
        "singularity_tau": opt(scan.tau),
        "initial_period": scan.initial_period,
        "period_multiple": scan.multiple,
        "kappa_at_tau_b": opt(kappa_b),
        "curve_end_tau": rows.last().map_or(0.0, |r| r[0]),
    });
    rep.emit_json("bifurcation.json", &info)?;
    rep.note("tau_b", tau_b);
    rep.note("singularity_tau", opt(scan.tau));
    Ok(())
}

fn nonresonant_switching(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    let sp = weierstrass_coeffs_nonresonant(p, cfg.initial.x)?;
    let mut start = cfg.initial;
    start.p = 0.0;
    let traj = integrate(
        System::FastSubsystem { c: sp.c },
        p,
        start,
        cfg.integrate.t_max,
        cfg.integrate.dt_out,
        &tolerances(cfg),
    )?;
    let numeric = traj.series(|s| s.sz);
    let analytic: Vec<f64> = traj.times.iter().map(|t| sz_nonresonant(*t, &sp)).collect();
    rep.emit("switching.csv", |w| {
        writeln!(w, "tau,sz,sz_numeric")?;
        for ((t, a), n) in traj.times.iter().zip(&analytic).zip(&numeric) {
            writeln!(w, "{t:.16e},{a:.16e},{n:.16e}")?;
        }
        Ok(())
    })?;
    let period_numeric = oscillation_period(&traj.times, &numeric);
    let info = json!({
        "e1": sp.e1,
        "g2": sp.coeffs.g2,
        "g3": sp.coeffs.g3,
        "floor": sp.floor,
        "period": sp.period,
        "period_numeric": opt(period_numeric),
        "min_numeric": numeric.iter().cloned().fold(f64::INFINITY, f64::min),
        "g_over_r0c": sp.g_over_r0c,
        "kappa": sp.kappa_nr,
    });
    rep.emit_json("switching.json", &info)?;
    rep.drift("r2", traj.conserved_drift, DRIFT_MAX);
    rep.note("floor", sp.floor);
    rep.note("period", sp.period);
    rep.note("period_numeric", opt(period_numeric));
    Ok(())
}

fn chaotic_motion(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let ig = &cfg.integrate;
    let traj = integrate(System::Full, &cfg.params, cfg.initial, ig.t_max, ig.dt_out, &tolerances(cfg))?;
    let mut est = autocorrelation(&traj.series(|s| s.sz), ig.dt_out, CHAOS_MAX_LAG)?;
    let verdict = chaos_verdict(&mut est)?;
    rep.emit("trajectory.csv", |w| traj.write_csv(w))?;
    rep.emit("autocorr.csv", |w| est.write_autocorr_csv(w))?;
    rep.emit("spectrum.csv", |w| est.write_spectrum_csv(w))?;
    rep.emit_json("verdict.json", &verdict)?;
    rep.drift("generalized", traj.conserved_drift, DRIFT_MAX);
    rep.note("tau_c", verdict.tau_c);
    rep.note("fit_residual", verdict.fit_residual);
    rep.note("chaotic", verdict.chaotic);
    Ok(())
}

fn write_purity(rep: &mut Report, curve: &PurityCurve) -> Result<()> {
    if let Some((t, v)) = curve
        .times
        .iter()
        .zip(&curve.purity)
        .find(|(_, v)| !(**v >= 0.5 - PURITY_SLACK && **v <= 1.0 + PURITY_SLACK))
    {
        rep.violations.push(format!("purity {v} at t = {t} outside [1/2, 1]"));
    }
    rep.emit("purity.csv", |w| curve.write_csv(w))
}

fn write_density(rep: &mut Report, times: &[f64], rhos: &[ReducedDensityMatrix]) -> Result<()> {
    rep.emit("density.csv", |w| {
        writeln!(w, "t,rho11,rho22,re_rho12,im_rho12")?;
        for (t, r) in times.iter().zip(rhos) {
            writeln!(w, "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.rho11, r.rho22, r.rho12.re, r.rho12.im)?;
        }
        Ok(())
    })
}

fn final_window_mean(values: &[f64]) -> f64 {
    let k = ((values.len() as f64 * FINAL_WINDOW).ceil() as usize).clamp(1, values.len());
    let tail = &values[values.len() - k..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

fn purity_adiabatic(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    let t_max = cfg.integrate.t_max;
    let n = PURITY_GRID;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut grid = Vec::with_capacity(n * n);
    for i in 0..n {
        let t = t_max * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x = PI * j as f64 / (n - 1) as f64;
            let v = purity_closed_adiabatic(t, x, p);
            sum += v;
            min = min.min(v);
            grid.push([t, x, v]);
        }
    }
    rep.emit("purity_grid.csv", |w| {
        writeln!(w, "t,x,purity")?;
        for g in &grid {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", g[0], g[1], g[2])?;
        }
        Ok(())
    })?;
    let x = cfg.initial.x;
    let times = sample_grid(0.0, t_max, cfg.integrate.dt_out);
    let rhos: Vec<_> = times.iter().map(|t| density_resonant_closed(*t, x, p)).collect();
    let curve = PurityCurve {
        purity: times.iter().map(|t| purity_closed_adiabatic(*t, x, p)).collect(),
        times: times.clone(),
        regime: crate::quantum::PurityRegime::AdiabaticClosedForm,
    };
    write_purity(rep, &curve)?;
    write_density(rep, &times, &rhos)?;
    rep.note("grid_mean_purity", sum / (n * n) as f64);
    rep.note("grid_min_purity", min);
    Ok(())
}

fn purity_weak_regular(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    let times = sample_grid(0.0, cfg.integrate.t_max, cfg.integrate.dt_out);
    let curve = purity_weak(&times, WeakRegime::Regular, p)?;
    let rhos = times
        .iter()
        .map(|t| Ok(density_weak(*t, q_regular(*t, p)?, p.n_bar, p.zeta)))
        .collect::<Result<Vec<_>>>()?;
    write_purity(rep, &curve)?;
    write_density(rep, &times, &rhos)?;
    let window = |lo: f64, hi: f64| -> Option<f64> {
        let (ts, vs): (Vec<f64>, Vec<f64>) = times
            .iter()
            .zip(&curve.purity)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(t, v)| (*t, *v))
            .unzip();
        dominant_frequency(&ts, &vs, 0.01, 10.0, 5000).ok()
    };
    rep.note("dominant_frequency_early", opt(window(0.0, 30.0)));
    rep.note("dominant_frequency_late", opt(window(70.0, f64::INFINITY)));
    rep.note("final_window_mean_purity", final_window_mean(&curve.purity));
    Ok(())
}

fn purity_weak_chaotic(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    let alpha0 = cfg.quantum.alpha0;
    let times = sample_grid(0.0, cfg.integrate.t_max, cfg.integrate.dt_out);
    let curve = purity_weak(&times, WeakRegime::Chaotic { alpha0 }, p)?;
    let rhos = times
        .iter()
        .map(|t| Ok(density_weak(*t, Complex64::new(q_chaotic_mean(*t, alpha0)?, 0.0), p.n_bar, p.zeta)))
        .collect::<Result<Vec<_>>>()?;
    write_purity(rep, &curve)?;
    write_density(rep, &times, &rhos)?;

    let ens = EnsembleConfig {
        alpha0,
        kernel: CorrelationKernel::ErfMatched,
        realizations: cfg.quantum.realizations,
        t_max: ENSEMBLE_T_MAX,
        n_grid: ENSEMBLE_GRID,
        seed: cfg.seed,
    };
    let mc = monte_carlo_mean_q(&ens)?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(mc.len());
    for (t, q) in &mc {
        let closed = q_chaotic_mean(*t, alpha0)?;
        worst = worst.max((q.re - closed).abs() / closed);
        rows.push([*t, q.re, q.im, closed]);
    }
    rep.emit("q_ensemble.csv", |w| {
        writeln!(w, "t,re_q,im_q,closed_form")?;
        for r in &rows {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", r[0], r[1], r[2], r[3])?;
        }
        Ok(())
    })?;
    rep.note("final_window_mean_purity", final_window_mean(&curve.purity));
    rep.note("ensemble_max_relative_error", worst);
    Ok(())
}

fn custom(cfg: &RunConfig, rep: &mut Report) -> Result<()> {
    let p = &cfg.params;
    let ig = &cfg.integrate;
    let tol = tolerances(cfg);
    let traj = integrate(System::Full, p, cfg.initial, ig.t_max, ig.dt_out, &tol)?;
    rep.emit("trajectory.csv", |w| traj.write_csv(w))?;
    rep.drift("generalized", traj.conserved_drift, DRIFT_MAX);

    let n_max = cfg.quantum.n_max.unwrap_or_else(|| truncation_for(p.n_bar));
    let amps = excited_coherent(p.n_bar, n_max)?;
    let run = hybrid_evolve(&amps, cfg.initial.x, cfg.initial.p, ig.t_max, ig.dt_out, p, &tol)?;
    let rhos: Vec<_> = run.history.iter().map(reduced_density).collect();
    write_purity(rep, &run.purity)?;
    write_density(rep, &run.times, &rhos)?;
    rep.emit("hybrid.csv", |w| {
        writeln!(w, "t,x,p")?;
        for ((t, x), q) in run.times.iter().zip(&run.x).zip(&run.p) {
            writeln!(w, "{t:.16e},{x:.16e},{q:.16e}")?;
        }
        Ok(())
    })?;
    rep.drift("norm", run.norm_drift, NORM_DRIFT_MAX);
    let min = rhos.iter().map(purity).fold(f64::INFINITY, f64::min);
    rep.note("min_purity", min);
    rep.note("final_window_mean_purity", final_window_mean(&run.purity.purity));
    Ok(())
}
