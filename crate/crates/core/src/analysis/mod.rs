//! Energy ledgers, inequality monitors, functional-inequality constants and
//! the paired-trajectory experiments.

pub mod constants;
pub mod experiments;
pub mod ledger;
pub mod monitors;
pub mod report;

pub use constants::{constant_ratio, estimate_constant, ConstantEstimate, ConstantName};
pub use experiments::{
    continuous_dependence_experiment, galerkin_convergence_study, ConvergenceReport, DependenceReport, DifferenceRow,
};
pub use ledger::{EnergyLedger, LedgerRow, COLUMNS};
pub use monitors::{
    c3_with_poincare, check_gronwall_weak, check_strong_differential, default_tolerance, derive_c2_c3, Check,
    InequalityReport,
};
pub use report::{format_real, KeyValues};
