use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Landen/AGM iterations stop once successive means agree to this relative level.
const AGM_TOL: f64 = 1e-14;
const MAX_AGM_STEPS: usize = 32;

/// Values of sn, cn and dn at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Complete elliptic integral of the first kind, K(k), for modulus `0 <= k < 1`.
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("elliptic modulus k = {k} not in [0, 1)")));
    }
    // (1-k)(1+k) keeps the complementary modulus accurate as k -> 1.
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(FRAC_PI_2 / agm(1.0, kp))
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Jacobi elliptic functions sn, cn, dn of real argument `u` and modulus `k` in [0, 1].
///
/// Descending Landen transformation on the complementary parameter, then
/// back-substitution. At `k = 1` the hyperbolic limit is returned directly.
pub fn jacobi_elliptic(u: f64, k: f64) -> Result<EllipticTriple> {
    if !(0.0..=1.0).contains(&k) || k.is_nan() {
        return Err(Error::Domain(format!("elliptic modulus k = {k} not in [0, 1]")));
    }
    let mut emc = (1.0 - k) * (1.0 + k);
    if emc == 0.0 {
        let sech = 1.0 / u.cosh();
        return Ok(EllipticTriple { sn: u.tanh(), cn: sech, dn: sech });
    }

    let mut em = [0.0; MAX_AGM_STEPS];
    let mut en = [0.0; MAX_AGM_STEPS];
    let mut a = 1.0;
    let mut c = 1.0;
    let mut levels = 0;
    for i in 0..MAX_AGM_STEPS {
        levels = i + 1;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= AGM_TOL * a {
            break;
        }
        emc *= a;
        a = c;
    }

    let w = u * c;
    let mut sn = w.sin();
    let mut cn = w.cos();
    let mut dn = 1.0;
    if sn != 0.0 {
        let mut a = cn / sn;
        c *= a;
        for ii in (0..levels).rev() {
            let b = em[ii];
            a *= c;
            c *= dn;
            dn = (en[ii] + a) / (b + a);
            a = c / b;
        }
        let s = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { s } else { -s };
        cn = c * sn;
    }
    Ok(EllipticTriple { sn, cn, dn })
}
