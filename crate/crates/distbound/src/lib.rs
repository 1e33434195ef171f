//! Certified lower bounds on the minimum distance between trajectories of a
//! polynomial dynamical system and an unsafe set.
//!
//! The pipeline assembles truncated occupation-measure programs as
//! moment-matrix semidefinite relaxations, solves them with a built-in
//! primal-dual interior-point solver, recovers near-optimal trajectories and
//! dual polynomial certificates, and cross-checks every lower bound against a
//! trajectory-sampling upper bound.

pub mod poly;
pub mod sets;
pub mod moments;
pub mod program;
pub mod sdp;
pub mod sparsity;
pub mod problem;
pub mod recovery;
pub mod report;
pub mod sim;

pub use poly::{lie_derivative, monomial_basis, parse_polynomial, MultiIndex, Polynomial};
pub use sets::SemialgebraicSet;
