use std::f64::consts::PI;

use super::elliptic::jacobi_elliptic;
use crate::error::{Error, Result};

/// Default distance from the lattice pole below which ℘ refuses to evaluate.
pub const POLE_THRESHOLD: f64 = 1e-9;

/// Relative root separation below which the trigonometric degenerate form is used.
const DEGENERATE_TOL: f64 = 1e-9;

/// Roots of `4x³ − g₂x − g₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three real roots, sorted descending.
    Real(f64, f64, f64),
    /// One real root and a complex-conjugate pair `re ± i·im`.
    Complex { real: f64, re: f64, im: f64 },
}

impl CubicRoots {
    pub fn real_triple(&self) -> Option<(f64, f64, f64)> {
        match *self {
            CubicRoots::Real(a, b, c) => Some((a, b, c)),
            CubicRoots::Complex { .. } => None,
        }
    }
}

/// Solve `4x³ − g₂x − g₃ = 0`.
pub fn depressed_cubic_roots(g2: f64, g3: f64) -> CubicRoots {
    if g2 == 0.0 && g3 == 0.0 {
        return CubicRoots::Real(0.0, 0.0, 0.0);
    }
    let a = g2 * g2 * g2;
    let b = 27.0 * g3 * g3;
    let disc = a - b;
    let scale = a.abs().max(b);

    if disc.abs() <= 1e-13 * scale {
        // Double root; only reachable with g₂ > 0.
        let double = -1.5 * g3 / g2;
        let single = 3.0 * g3 / g2;
        let mut r = [single, double, double];
        r.iter_mut().for_each(|x| *x = polish(*x, g2, g3));
        r.sort_by(|x, y| y.total_cmp(x));
        return CubicRoots::Real(r[0], r[1], r[2]);
    }

    if disc > 0.0 {
        let m = 2.0 * (g2 / 12.0).sqrt();
        let arg = (b / a).sqrt() * g3.signum();
        let theta = arg.clamp(-1.0, 1.0).acos() / 3.0;
        let mut r = [
            m * theta.cos(),
            m * (theta - 2.0 * PI / 3.0).cos(),
            m * (theta + 2.0 * PI / 3.0).cos(),
        ];
        r.iter_mut().for_each(|x| *x = polish(*x, g2, g3));
        r.sort_by(|x, y| y.total_cmp(x));
        // Enforce the trace exactly after polishing.
        let shift = (r[0] + r[1] + r[2]) / 3.0;
        CubicRoots::Real(r[0] - shift, r[1] - shift, r[2] - shift)
    } else {
        // Cardano for x³ + p x + q with p = −g₂/4, q = −g₃/4.
        let q = -g3 / 4.0;
        let p = -g2 / 4.0;
        let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let real = polish((-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt(), g2, g3);
        let re = -real / 2.0;
        // Product of the pair equals g₃ / (4·real); its modulus² gives im.
        let im2 = (g3 / (4.0 * real) - re * re).max(0.0);
        CubicRoots::Complex { real, re, im: im2.sqrt() }
    }
}

fn polish(x: f64, g2: f64, g3: f64) -> f64 {
    let f = 4.0 * x * x * x - g2 * x - g3;
    let df = 12.0 * x * x - g2;
    if df.abs() > 1e-300 && f != 0.0 {
        let y = x - f / df;
        let fy = 4.0 * y * y * y - g2 * y - g3;
        if fy.abs() < f.abs() {
            return y;
        }
    }
    x
}

/// Invariants, roots and quartic coefficients of a Weierstrass ℘.
///
/// When the cubic has a complex pair, `e1` holds the real root and `e2`, `e3`
/// the common real part of the pair.
///
/// `a0..a2` are the coefficients of the quartic the function was reduced from;
/// they are carried along for the caller and play no role in evaluating ℘.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassCoeffs {
    pub g2: f64,
    pub g3: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl WeierstrassCoeffs {
    /// Build from invariants alone; fails when the roots are not all real.
    pub fn from_invariants(g2: f64, g3: f64) -> Result<Self> {
        let (e1, e2, e3) = depressed_cubic_roots(g2, g3).real_triple().ok_or_else(|| {
            Error::Domain(format!("g2 = {g2}, g3 = {g3} give complex roots; use weierstrass_p_with"))
        })?;
        Ok(Self { g2, g3, e1, e2, e3, a0: 0.0, a1: 0.0, a2: 0.0 })
    }

    /// True when the invariants have a double root below a positive e₁.
    pub fn is_degenerate(&self) -> bool {
        matches!(depressed_cubic_roots(self.g2, self.g3), CubicRoots::Real(..))
            && (self.e2 - self.e3).abs() < DEGENERATE_TOL * self.e1.abs()
    }
}

/// ℘(z; g₂, g₃) on the real axis, with the default pole threshold.
pub fn weierstrass_p(z: f64, c: &WeierstrassCoeffs) -> Result<f64> {
    weierstrass_p_with(z, c, POLE_THRESHOLD)
}

/// ℘(z; g₂, g₃) with an explicit pole-proximity threshold.
///
/// Falls back to the complex-root reduction when the stored invariants have
/// only one real root.
pub fn weierstrass_p_with(z: f64, c: &WeierstrassCoeffs, pole_eps: f64) -> Result<f64> {
    if z.abs() < pole_eps {
        return Err(Error::Pole(z));
    }
    match depressed_cubic_roots(c.g2, c.g3) {
        CubicRoots::Real(e1, e2, e3) => {
            if (e2 - e3).abs() < DEGENERATE_TOL * e1.abs() && e1 > 0.0 {
                let w = (1.5 * e1).sqrt() * z;
                let cot = w.cos() / w.sin();
                return Ok(e1 + 1.5 * e1 * cot * cot);
            }
            let span = e1 - e3;
            if span <= 0.0 {
                // All roots coincide at zero: the lattice degenerates to 1/z².
                return Ok(1.0 / (z * z));
            }
            let k = ((e2 - e3) / span).clamp(0.0, 1.0).sqrt();
            let sn = jacobi_elliptic(span.sqrt() * z, k)?.sn;
            Ok(e3 + span / (sn * sn))
        }
        CubicRoots::Complex { real, .. } => {
            let h2 = (3.0 * real * real - c.g2 / 4.0).sqrt();
            let k = (0.5 - 0.75 * real / h2).clamp(0.0, 1.0).sqrt();
            let cn = jacobi_elliptic(2.0 * h2.sqrt() * z, k)?.cn;
            Ok(real + h2 * (1.0 + cn) / (1.0 - cn))
        }
    }
}
