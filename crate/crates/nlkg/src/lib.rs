//! Pseudospectral simulator for the radial 3D defocusing Klein-Gordon equation
//! `u_tt - Lap(u) + u = -|u|^(p-1) u`, `3 < p < 5`, with a diagnostics toolkit
//! for low-regularity scattering experiments: smoothing-multiplier (mollified)
//! energies and their almost-conservation, Morawetz-Strauss space-time
//! budgets, wave-admissible mixed norms, dispersive kernel probes, and
//! scattering-state extraction through the free-flow pullback.

pub mod data;
pub mod error;
pub mod functionals;
pub mod exponents;
pub mod propagator;
pub mod spectral;

pub use error::{Error, Result};
