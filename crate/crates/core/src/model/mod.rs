//! Parameters, joint spin-field states and the four Rabi-model generators.
//!
//! Units are fixed by `omega0 = 1`, `hbar = 1`. The joint basis is
//! spin-major: indices `0..=n_max` hold `|+z, n>`, indices
//! `n_max + 1..2 (n_max + 1)` hold `|-z, n>`.

mod chain;
pub(crate) mod field;
mod hamiltonian;
mod params;
mod parity;
mod state;

pub use chain::{Parity, RabiChain};
pub use field::{coherent_amplitudes, displaced_start_truncation, lab_truncation, tail_weight};
pub use hamiltonian::{
    build_displaced_generator, build_full_hamiltonian, build_hamiltonian, build_rwa_hamiltonian,
    semiclassical_generator, semiclassical_matrix, DisplacedGenerator,
};
pub use params::{Branch, Coupling, FieldSpec, Frame, ModelParams, SemiclassicalParams, Spin};
pub use parity::{
    excitation_expectation, number_moment, parity_expectation, parity_operator, rwa_eigenpair, rwa_energy,
};
pub use state::JointState;
