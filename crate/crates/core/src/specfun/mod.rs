//! Special functions used as closed-form oracles throughout the crate.

mod elliptic;
mod integrals;
mod weierstrass;

pub use elliptic::{complete_elliptic_k, jacobi_elliptic, EllipticTriple};
pub use integrals::{cosine_integral, error_function, EULER_GAMMA};
pub use weierstrass::{
    depressed_cubic_roots, weierstrass_p, weierstrass_p_with, CubicRoots, WeierstrassCoeffs,
    POLE_THRESHOLD,
};
