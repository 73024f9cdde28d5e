//! Galerkin ODE for the transformed system and its IMEX time integration.
//!
//! Velocity: `M a' = (−(u·∇)u + Pr(2N² rot ω + Ra θ e₂), Φ) − Pr K a`.
//! Microrotation: `ω' = −Pr(β/L² + 4N²) ω + P(−u·∇ω + 2N²Pr rot u)`.
//! Temperature: `θ' = −β θ + P(−u·∇θ + D rot ω·∇θ + D ∂ₓω + u₂)`.
//! The dissipative terms are implicit, everything else explicit.

pub mod checkpoint;
pub mod params;
pub mod presets;
pub mod rhs;
pub mod state;
pub mod stepper;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, History};
pub use params::PhysParams;
pub use presets::{DataBand, Preset};
pub use rhs::{assemble_rhs, Explicit, Model, Tendency};
pub use state::{lift_temperature, unlift, State, StateNorms};
pub use stepper::{simulate, simulate_with, step, Integrator, Scheme, StepperConfig, Trajectory};
