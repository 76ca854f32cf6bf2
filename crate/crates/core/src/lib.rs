//! Steady states, currents, and rectification for boundary-driven XXZ spin-1/2 chains.
//!
//! The chain evolves under a Lindblad master equation with polarizing baths
//! attached to its first and last sites. This crate builds the Hamiltonian and
//! the vectorized Liouvillian, solves for the unique steady state, and reports
//! spin and energy currents together with rectification factors obtained by
//! reversing the drive.
//!
//! Organization:
//! - [`spin_ops`]: Pauli matrices and embedding into the chain Hilbert space.
//! - [`model`]: coupling/field profiles, Hamiltonian, local energy terms.
//! - [`lindblad`]: boundary drives, jump operators, Liouvillian assembly.
//! - [`steady`]: steady-state solvers and spectral diagnostics.
//! - [`observables`]: magnetization, spin current, energy current.
//! - [`closed_form`]: exact three-site currents used to validate the solvers.
//! - [`analysis`]: drive-reversal pairs, rectification, sweeps, NDR scans.
//!
//! ```
//! use spinflux::prelude::*;
//!
//! let chain = ChainConfig::new(
//!     3,
//!     CouplingProfile::ZGraded { alpha: 1.0, anisotropy: 1.0, grade: 0.25 },
//!     FieldProfile::Uniform { b: 0.1 },
//! );
//! let bath = BoundarySpec::z_target(1.0, 1.0);
//! let liouv = build_liouvillian(&chain, &bath).unwrap();
//! let steady = solve_steady(&liouv, &SolveOptions::default()).unwrap();
//! assert!(steady.residual < 1e-9);
//! ```

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod lindblad;
pub mod model;
pub mod observables;
pub mod spin_ops;
mod sparse;
pub mod steady;

pub use analysis::{
    ndr_scan, rectification_factor, run_pair, run_record, sweep, NdrReport, RectValue,
    RectificationRecord, RunRecord, SweepAxis, SweepPoint, SweepSpec,
};
pub use closed_form::{
    energy_current_exact, energy_current_series, energy_current_series_smallf,
    spin_current_exact, spin_current_series_delta2, ThreeSiteParams,
};
pub use error::Error;
pub use lindblad::{
    build_liouvillian, dissipator_apply, devectorize, jump_operators, master_rhs, vectorize,
    BoundaryDrive, BoundarySpec, Liouvillian,
};
pub use model::{
    build_hamiltonian, local_energy_terms, resolve_profiles, ChainConfig, CouplingProfile,
    FieldProfile, LocalEnergyTerms, ResolvedProfiles,
};
pub use observables::{CurrentReport, ObservableSet};
pub use spin_ops::{embed, pauli, two_site, Axis, LocalOperator, OperatorMatrix};
pub use steady::{solve_steady, spectral_check, SolveOptions, SolverMethod, SpectralReport, SteadyStateResult};

/// Everything needed for a typical run, in one import.
pub mod prelude {
    pub use crate::analysis::*;
    pub use crate::closed_form;
    pub use crate::error::Error;
    pub use crate::lindblad::*;
    pub use crate::model::*;
    pub use crate::observables::*;
    pub use crate::spin_ops::*;
    pub use crate::steady::*;
}
