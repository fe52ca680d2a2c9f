//! Dormand–Prince 5(4) integrator with continuous output.
//!
//! Only what the crate needs: fixed-dimension real systems, mixed
//! absolute/relative error control and sampling at caller-chosen times in
//! either direction of integration.

use crate::error::{Error, Result};

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.1)(t, y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h_max: f64::INFINITY, max_steps: 50_000_000 }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output weights (Hairer & Wanner).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate from `(t0, y0)` and return the state at each of `t_out`.
///
/// `t_out` must be monotone in one direction starting from `t0`; backward
/// integration is selected when it decreases.
pub fn solve<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_out: &[f64],
    tol: &Tolerances,
) -> Result<Solution> {
    let n = sys.dim();
    assert_eq!(y0.len(), n, "initial state has wrong dimension");
    if !(tol.rtol > 0.0 && tol.atol >= 0.0) {
        return Err(Error::Domain("rtol must be positive and atol non-negative".into()));
    }
    let mut out = Solution {
        times: Vec::with_capacity(t_out.len()),
        states: Vec::with_capacity(t_out.len()),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let Some(&t_last) = t_out.last() else {
        return Ok(out);
    };
    let dir = if t_last >= t0 { 1.0 } else { -1.0 };
    if t_out.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || (t_out[0] - t0) * dir < 0.0 {
        return Err(Error::Domain("output times must be monotone away from t0".into()));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t });
    }
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut cont = vec![[0.0; 5]; n];
    sys.rhs(t, &y, &mut k1);

    let mut next = 0;
    while next < t_out.len() && t_out[next] == t0 {
        out.times.push(t0);
        out.states.push(y.clone());
        next += 1;
    }
    if next == t_out.len() {
        return Ok(out);
    }

    let span = (t_last - t0).abs();
    let mut h = initial_step(sys, t, &y, &k1, tol, dir).min(span).min(tol.h_max) * dir;
    let mut h_prev_rejected = false;

    while next < t_out.len() {
        if out.accepted_steps + out.rejected_steps >= tol.max_steps {
            return Err(Error::StepSizeUnderflow { t });
        }
        if h.abs() <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let remaining = t_last - t;
        if (h - remaining) * dir > 0.0 {
            h = remaining;
        }

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(t + C2 * h, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs(t + h, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let t_new = t + h;
        sys.rhs(t_new, &ynew, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err += (e / sc) * (e / sc);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            if ynew.iter().any(|v| !v.is_finite()) && h.abs() <= 1e-10 * t.abs().max(1.0) {
                return Err(Error::NonFinite { t: t_new });
            }
            h *= 0.1;
            out.rejected_steps += 1;
            h_prev_rejected = true;
            continue;
        }

        if err <= 1.0 {
            for i in 0..n {
                let dy = ynew[i] - y[i];
                let bspl = h * k1[i] - dy;
                cont[i] = [
                    y[i],
                    dy,
                    bspl,
                    dy - h * k7[i] - bspl,
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]),
                ];
            }
            while next < t_out.len() && (t_out[next] - t_new) * dir <= 0.0 {
                let th = (t_out[next] - t) / h;
                let th1 = 1.0 - th;
                let state = cont
                    .iter()
                    .map(|r| r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4]))))
                    .collect();
                out.times.push(t_out[next]);
                out.states.push(state);
                next += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            out.accepted_steps += 1;
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 10.0);
            if h_prev_rejected {
                fac = fac.min(1.0);
            }
            h_prev_rejected = false;
            h = (h * fac).abs().min(tol.h_max) * dir;
        } else {
            out.rejected_steps += 1;
            h_prev_rejected = true;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok(out)
}

fn initial_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    tol: &Tolerances,
    dir: f64,
) -> f64 {
    let n = y.len();
    let sc: Vec<f64> = y.iter().map(|v| tol.atol + tol.rtol * v.abs()).collect();
    let norm = |v: &[f64]| {
        (v.iter().zip(&sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + dir * h0 * b).collect();
    let mut f1 = vec![0.0; n];
    sys.rhs(t + dir * h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Evenly spaced sample times `t0, t0 + dt, …` up to and including `t_end`.
pub fn sample_grid(t0: f64, t_end: f64, dt: f64) -> Vec<f64> {
    let steps = ((t_end - t0) / dt).abs();
    let count = (steps + 1e-9).floor() as usize;
    let sign = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut ts: Vec<f64> = (0..=count).map(|i| t0 + sign * dt * i as f64).collect();
    if (ts[count] - t_end).abs() > 1e-12 * t_end.abs().max(1.0) {
        ts.push(t_end);
    } else {
        ts[count] = t_end;
    }
    ts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator() -> (usize, impl Fn(f64, &[f64], &mut [f64])) {
        (2, |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        })
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let ts = sample_grid(0.0, 20.0, 0.05);
        let sol = solve(&oscillator(), 0.0, &[1.0, 0.0], &ts, &Tolerances::new(1e-11, 1e-13)).unwrap();
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y[0] - t.cos()).abs() < 1e-9, "t = {t}");
            assert!((y[1] + t.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn backward_integration() {
        let ts = [-0.5, -1.0, -3.0];
        let sol = solve(&oscillator(), 0.0, &[1.0, 0.0], &ts, &Tolerances::new(1e-11, 1e-13)).unwrap();
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y[0] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = (1, |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let r = solve(&sys, 0.0, &[1.0], &[2.0], &Tolerances::default());
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. }) | Err(Error::NonFinite { .. })));
    }

    #[test]
    fn zero_field_is_constant() {
        let sys = (3, |_t: f64, _y: &[f64], dy: &mut [f64]| dy.fill(0.0));
        let sol = solve(&sys, 0.0, &[1.0, -2.0, 3.5], &[1.0, 10.0], &Tolerances::default()).unwrap();
        assert_eq!(sol.states[1], vec![1.0, -2.0, 3.5]);
    }

    #[test]
    fn rejects_non_monotone_output() {
        assert!(solve(&oscillator(), 0.0, &[1.0, 0.0], &[1.0, 0.5], &Tolerances::default()).is_err());
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = sample_grid(0.0, 1.0, 0.3);
        assert_eq!(g.first(), Some(&0.0));
        assert_eq!(g.last(), Some(&1.0));
        assert_eq!(sample_grid(0.0, 1.0, 0.25).len(), 5);
    }
}
