//! Finite abelian phase spaces `Ξ = G × Ĝ`, their Weyl representations,
//! Lagrangian subgroups, and the commutative operator algebras those
//! subgroups cut out.
//!
//! Group data, multipliers and Weyl matrices are exact (roots of unity as
//! [`TorusExponent`]). Linear algebra on operators is generic over a real
//! scalar `R: nalgebra::RealField`; the aliases below fix `R = f64`.

pub mod algebra;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod linalg;
pub mod modular;
pub mod phase_space;
pub mod pretty;
pub mod torus;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use group::{FiniteAbelianGroup, GroupElement, Subgroup};
pub use phase_space::{Convention, Multiplier, PhaseSpace};
pub use torus::TorusExponent;
pub use weyl::{ExactUnitary, ProjectiveRep};

pub type Real = f64;
pub type Complex = num_complex::Complex<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type Tolerance = linalg::Tol<f64>;
pub type Algebra = algebra::OperatorAlgebra<f64>;
pub type Spectrum = algebra::GelfandData<f64>;
pub type Transform<'a> = algebra::GelfandTransform<'a, f64>;
