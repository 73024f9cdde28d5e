//! Bases, transforms, differential operators, projectors and norms on the
//! periodic channel `(0, l) × (0, 1)`.

pub mod basis;
pub mod beam;
pub mod domain;
pub mod field;
pub mod operators;
pub mod quadrature;
pub mod transform;

pub use basis::{Discretization, ScalarBasis, ScalarMode, SolenoidalBasis, VelocityBlock};
pub use domain::{DomainSpec, Resolution};
pub use field::{Component, GridField, GridVector, ScalarField, SolenoidalField};
pub use operators::{leray_project, neg_laplacian, rot_rot, rot_scalar, rot_vector, Exponent, ScalarNorms};
pub use quadrature::GridQuadrature;
