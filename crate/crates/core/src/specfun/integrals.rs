use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this the power series is used for Ci; above it a continued fraction.
const CI_SWITCH: f64 = 2.0;
const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 500;

/// Cosine integral Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1)/t dt for x > 0.
pub fn cosine_integral(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Ci requires x > 0, got {x}")));
    }
    if x < CI_SWITCH {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_TERMS {
            let k2 = 2.0 * k as f64;
            term *= -x2 / ((k2 - 1.0) * k2);
            let add = term / k2;
            sum += add;
            if add.abs() < EPS * sum.abs().max(1e-300) {
                break;
            }
        }
        return Ok(EULER_GAMMA + x.ln() + sum);
    }
    // Ci(x) = −Re E₁(ix); E₁ by the modified Lentz continued fraction.
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / 1e-300, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let a = -((i * i) as f64);
        b += 2.0;
        d = one / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    let e1 = h * Complex64::new(x.cos(), -x.sin());
    Ok(-e1.re)
}

/// Error function, accurate to about 1e-15 relative.
pub fn error_function(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 3.0 {
        // erf x = (2/√π)·e^{−x²}·Σ 2ⁿx^{2n+1}/(1·3···(2n+1)); all terms positive.
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        for n in 1..MAX_TERMS {
            term *= 2.0 * x2 / (2 * n + 1) as f64;
            sum += term;
            if term < EPS * sum {
                break;
            }
        }
        2.0 / PI.sqrt() * (-x2).exp() * sum
    } else {
        1.0 - erfc_cf(ax)
    };
    value.copysign(x)
}

/// erfc for x ≥ 3 via the Laplace continued fraction, evaluated with Lentz.
fn erfc_cf(x: f64) -> f64 {
    if x > 27.0 {
        return 0.0;
    }
    // erfc x = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..MAX_TERMS {
        let a = n as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let del = c * d;
        f *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_reference_values() {
        // mpmath.ci at 50 digits, rounded.
        let cases = [
            (0.1, -1.727_868_386_657_296_6),
            (1.0, 0.337_403_922_900_968_14),
            (1.999, 0.423_188_726_794_006_2),
            (2.0, 0.422_980_828_774_864_99),
            (5.0, -0.190_029_749_656_643_88),
            (20.0, 0.044_419_820_845_353_32),
            (50.0, -0.005_628_386_324_116_305),
        ];
        for (x, expect) in cases {
            let got = cosine_integral(x).unwrap();
            assert!((got - expect).abs() < 1e-13, "Ci({x}) = {got}, want {expect}");
        }
    }

    #[test]
    fn ci_small_argument_limit() {
        let x = 1e-6_f64;
        assert!((cosine_integral(x).unwrap() - x.ln() - EULER_GAMMA).abs() < 1e-10);
    }

    #[test]
    fn ci_domain() {
        assert!(cosine_integral(0.0).is_err());
        assert!(cosine_integral(-1.0).is_err());
    }

    #[test]
    fn erf_reference_values() {
        let cases = [
            (0.0, 0.0),
            (0.3, 0.328_626_759_459_127_4),
            (1.0, 0.842_700_792_949_714_9),
            (2.9, 0.999_958_902_121_900_5),
            (3.1, 0.999_988_351_342_632_8),
            (4.5, 0.999_999_999_803_383_9),
        ];
        for (x, expect) in cases {
            assert!((error_function(x) - expect).abs() < 1e-14, "erf({x})");
            assert!((error_function(-x) + expect).abs() < 1e-14);
        }
        assert!((error_function(6.0) - 1.0).abs() < 1e-15);
    }
}
