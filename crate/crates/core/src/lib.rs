//! Pseudo-spectral toolkit for two-dimensional deep-water gravity waves over a
//! uniform shear current.

pub mod coeffs;
pub mod dno;
pub mod envelope;
pub mod error;
pub mod euler;
pub mod harness;
pub mod normalform;
pub mod spectral;

pub use coeffs::{compute_coefficients, ModelCoefficients, PhysicalParams};
pub use dno::DnoExpansion;
pub use error::{Error, Result};
pub use euler::{CanonicalState, EulerStepper, SpectralSurface, SurfaceState};
pub use spectral::{ComplexField, RealField, SpectralGrid, Symbol, C64};
