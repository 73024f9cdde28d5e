//! Spectral Galerkin simulator for two-dimensional thermomicropolar
//! convection in a periodic channel, with monitors for the energy
//! inequalities, Gronwall envelopes and continuous dependence on data.
//!
//! Everything numerical is generic over [`Real`]; the `*64` aliases below
//! fix the scalar to `f64`, which is what the verification tolerances assume.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod nonlinear;
pub mod real;
pub mod spectral;

pub use error::{Error, Result};
pub use real::Real;
pub use spectral::{
    Discretization, DomainSpec, Exponent, GridField, GridVector, Resolution, ScalarBasis, ScalarField, SolenoidalBasis,
    SolenoidalField,
};

pub type Domain64 = DomainSpec<f64>;
pub type Discretization64 = Discretization<f64>;
pub type ScalarBasis64 = ScalarBasis<f64>;
pub type SolenoidalBasis64 = SolenoidalBasis<f64>;
pub type ScalarField64 = ScalarField<f64>;
pub type SolenoidalField64 = SolenoidalField<f64>;
pub type PhysParams64 = dynamics::PhysParams<f64>;
pub type State64 = dynamics::State<f64>;
pub type StepperConfig64 = dynamics::StepperConfig<f64>;
pub type EnergyLedger64 = analysis::EnergyLedger<f64>;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
