//! Multi-photon interference of partially distinguishable particles.
//!
//! Photons carry a *System* degree of freedom (the spatial modes an
//! interferometer acts on) and a *Label* degree of freedom (frequency, time
//! bin, polarization, ...) that the interferometer leaves alone and the
//! detectors cannot resolve. States are Fock arrays with System modes as
//! rows and Label modes as columns.
//!
//! - [`kernels`]: complex matrices, permanents, determinants, immanants.
//! - [`fock`]: Fock arrays, pure states, canonical inputs.
//! - [`evolve`]: applying `U ⊗ 1` to a state, plus a brute-force oracle.
//! - [`duality`]: two-photon first quantization and the triplet/singlet
//!   System⊗Label decomposition.
//! - [`measure`]: label-blind detection, vacuum postselection, HOM tests,
//!   classical predictions.
//! - [`search`]: the filter family and a seeded search over U(S).
//! - [`cli`]: the scenario runner behind the `labelblind` binary.
//!
//! All mode and port indices are 0-based.

pub mod cli;
pub mod duality;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod kernels;
pub mod measure;
pub mod search;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
