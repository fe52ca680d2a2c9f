//! Browser bindings for three interactive views: the drifting resonant
//! inversion, the strong-coupling purity surface and the weak-coupling
//! purity curve. Every function returns a flat `Float64Array`.

use std::f64::consts::PI;

use tavis::analytic::{bifurcation_time, kappa_resonant, sz_drifting, x_adiabatic, KappaForm};
use tavis::quantum::{purity_closed_adiabatic, purity_weak, WeakRegime};
use tavis::semiclassical::ModelParams;
use wasm_bindgen::prelude::*;

fn js(e: tavis::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// τ_b for the resonant drift with Ω₀ = 1.
#[wasm_bindgen]
pub fn bifurcation_tau(r0: f64, alpha: f64, zeta: f64) -> Result<f64, JsError> {
    bifurcation_time(&ModelParams::with_r0(alpha, -zeta / 2.0, 1.0, zeta, r0)).map_err(js)
}

/// Triples (τ, κ, s_z) along the adiabatic drift, stopping at the first node.
#[wasm_bindgen]
pub fn resonant_inversion(r0: f64, alpha: f64, zeta: f64, t_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let p = ModelParams::with_r0(alpha, -zeta / 2.0, 1.0, zeta, r0);
    p.validate().map_err(js)?;
    let mut out = Vec::with_capacity(3 * n);
    for tau in grid(t_max, n) {
        let x = x_adiabatic(tau, &p).map_err(js)?;
        let (Ok(k), Ok(sz)) = (kappa_resonant(&p, x), sz_drifting(tau, &p, KappaForm::Linear)) else {
            break;
        };
        out.extend([tau, k, sz]);
    }
    Ok(out)
}

/// Row-major purity on an `nt × nx` grid over t ∈ [0, t_max], x ∈ [0, π].
#[wasm_bindgen]
pub fn purity_surface(omega0: f64, zeta: f64, n_bar: f64, t_max: f64, nt: usize, nx: usize) -> Result<Vec<f64>, JsError> {
    let p = ModelParams::new(0.0, 0.0, omega0, zeta, 1.0).with_n_bar(n_bar);
    p.validate().map_err(js)?;
    let xs = grid(PI, nx);
    Ok(grid(t_max, nt)
        .into_iter()
        .flat_map(|t| xs.iter().map(move |x| (t, *x)))
        .map(|(t, x)| purity_closed_adiabatic(t, x, &p))
        .collect())
}

/// Pairs (t, P) in the weak-coupling regime; `alpha0 > 0` selects the
/// ensemble-averaged phase, otherwise the regular one.
#[wasm_bindgen]
pub fn weak_purity(alpha: f64, zeta: f64, omega0: f64, n_bar: f64, alpha0: f64, t_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let p = ModelParams::new(alpha, 0.0, omega0, zeta, 1.0).with_n_bar(n_bar);
    p.validate().map_err(js)?;
    let regime = if alpha0 > 0.0 { WeakRegime::Chaotic { alpha0 } } else { WeakRegime::Regular };
    let ts = grid(t_max, n);
    let c = purity_weak(&ts, regime, &p).map_err(js)?;
    Ok(ts.into_iter().zip(c.purity).flat_map(|(t, v)| [t, v]).collect())
}
