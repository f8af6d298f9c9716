//! Momentum-space operator algebra of massive Dirac fermions.
//!
//! Every operator is carried by its Fourier transform, a 4×4 matrix valued
//! function of the on-shell momentum, or by its 2×2 restriction to the
//! one-particle wave functions of a polarization basis.

pub mod algebra;
pub mod bases;
pub mod connection;
pub mod error;
pub mod kinematics;
pub mod linalg;
pub mod numdiff;
pub mod operators;
pub mod quadrature;
pub mod spinors;
pub mod verify;
pub mod wavepacket;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix2, ComplexMatrix4, Spinor2, Spinor4, Vec3};
