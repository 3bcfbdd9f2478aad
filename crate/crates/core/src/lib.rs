//! Optimal state-dependent `1 → 2` cloning of coplanar qubit families.
//!
//! The library builds the family of `N` candidate inputs spread over an arc
//! of width `Φ`, writes the global fidelity as a quadratic form in the
//! symmetric machine parameters `(ξ, η, c)`, and maximizes it over the
//! single free parameter `η` left by the unitarity constraints. A
//! brute-force search over all eight complex output amplitudes
//! ([`oracle`]) checks the reduction independently.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod error;
pub mod family;
pub mod form;
pub mod oracle;
pub mod poly;
pub mod quadrature;
pub mod qubit;
pub mod reduced;
pub mod report;
pub mod scalar;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use family::{
    build_family, complement_basis, denseness, expansion_coeffs, shannon_entropy, Parity,
    StateFamily,
};
pub use form::{continuum_form, discrete_form, overlap_vector, OverlapVector, QuadraticForm};
pub use oracle::{
    constraint_residuals, full_fidelity, oracle_optimize, symmetry_report, FullParams,
    OracleOutcome, SymmetryReport,
};
pub use poly::{solve_quartic, Quartic, RealRoot};
pub use qubit::{inner_product, linear_combination, tensor_product, Ket, Ket2, Ket4};
pub use reduced::{
    c_sq_of_eta, derive_quartic, feasible_interval, fidelity_of_eta, optimize_continuum,
    optimize_family, optimize_reduced, xi_of_eta, CSign, FeasibleInterval, Geometry, Optimum,
    ReducedParams,
};
pub use report::{format_number, sweep, to_csv, NStates, PointReport, SweepRow, SweepSpec};
pub use scalar::Real;
pub use verify::{run_suite, Mutation, VerifyReport};

pub type Ket2f64 = Ket2<f64>;
pub type Ket4f64 = Ket4<f64>;
pub type StateFamily64 = StateFamily<f64>;
pub type QuadraticForm64 = QuadraticForm<f64>;
pub type Geometry64 = Geometry<f64>;
pub type ReducedParams64 = ReducedParams<f64>;
pub type Optimum64 = Optimum<f64>;
pub type Quartic64 = Quartic<f64>;
pub type FullParams64 = FullParams<f64>;

pub type StateFamily32 = StateFamily<f32>;
pub type QuadraticForm32 = QuadraticForm<f32>;
pub type Optimum32 = Optimum<f32>;
