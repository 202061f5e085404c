// SPDX-License-Identifier: Apache-2.0

//! Steady states of linear open bosonic systems.
//!
//! A quadratic Hamiltonian plus linear Lindblad operators produce a linear
//! drift `Γ` and diffusion `D` acting on the vector of quadratures. The
//! asymptotic covariance matrix solves `ΓV + VΓᵀ + D = 0`. This crate solves
//! that equation, decides uncertainty, classicality, separability and
//! steerability either on the state or directly on `(Γ, D)`, and builds
//! reservoirs whose unique steady state is a chosen Gaussian state.
//!
//! Phase-space vectors are ordered `(q₁..qₙ, p₁..pₙ)` throughout and `ħ = 1`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod criteria;
mod error;
pub mod evolution;
pub mod expm;
pub mod lyapunov;
pub mod model;
pub mod numerics;
pub mod symmetry;
pub mod williamson;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Dense real vector.
pub type RVec = nalgebra::DVector<f64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<Complex64>;

pub use catalog::{catalog_analytic, catalog_build, AnalyticQuantity, AnalyticValue, CatalogId, CatalogParams};
pub use criteria::{
    environment_criterion, evaluate, state_criterion, steerability_both_parts, xi_matrix, Conclusiveness,
    CriterionKind, CriterionResult, Level, Outcome, Partition, SteeringSide, Subject, Verdict,
};
pub use evolution::{evolve, Trajectory};
pub use lyapunov::{solve, solve_integral, CovarianceMatrix, IntegralSolution, LyapunovProblem};
pub use model::{
    build_dynamics, realize_lindblad, stability_check, GaussianDynamics, LindbladRealization, LindbladVector,
    ModelSpec, QuadraticHamiltonian, StabilityReport, StabilityStatus,
};
pub use numerics::{inertia, psd_verdict, symplectic_form, Definiteness, InertiaIndex, Layout, ModeOrdering, Tolerances};
pub use symmetry::{gibbs_condition, invariance_check, match_template, transform_triple, CovarianceTransform, StructureTemplate};
pub use williamson::{
    engineer_covariant_target, engineer_gibbs_target, is_symplectic, symplectic_spectrum, williamson_decompose,
    EngineeredReservoir, WilliamsonDecomposition,
};
