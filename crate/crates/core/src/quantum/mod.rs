//! Quantum treatment of the atom–field coupling: truncated Fock amplitudes,
//! the reduced atomic density matrix and its purity.

mod amplitudes;
mod density;
mod ensemble;
mod weak;

pub use amplitudes::{
    amplitude_rhs, amplitudes_adiabatic, coherent_weights, excited_coherent, hybrid_evolve,
    hybrid_mean_u, truncation_for, HybridRun, QuantumAmplitudes,
};
pub use density::{
    density_resonant_closed, purity, purity_closed_adiabatic, reduced_density, PurityCurve,
    PurityRegime, ReducedDensityMatrix,
};
pub use ensemble::{monte_carlo_mean_q, CorrelationKernel, EnsembleConfig};
pub use weak::{
    amplitudes_weak_resonant, density_weak, dominant_frequency, purity_weak, q_chaotic_mean,
    q_regular, WeakRegime,
};
