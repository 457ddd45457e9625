//! Numerical workbench for the focusing nonlinear Schrödinger equation on
//! starlike metric graphs.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: metric graphs with a compact core and half-lines, intrinsic
//!   distance, balls and their volumes.
//! * [`potential`]: a small expression language for per-edge potentials.
//! * [`mesh`], [`function`], [`assembly`]: P1 discretization of the energy
//!   space, discrete norms and the quadratic form of the linear Hamiltonian.
//! * [`spectral`]: bottom of the discrete spectrum and the spectral gap.
//! * [`nls`]: nonlinear energy, the mass-constrained minimizer and the
//!   concentration-compactness diagnostics.
//! * [`bifurcation`]: Newton continuation of the branch that bifurcates from
//!   the linear ground state, asymptotic fits and the half-line soliton
//!   threshold.
//! * [`dynamics`]: conservative time stepping and orbital diagnostics.
//! * [`spec_file`] and [`cli`]: the JSON graph description and the command
//!   line driver.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bifurcation;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod function;
pub mod graph;
pub mod linalg;
pub mod mesh;
pub mod nls;
pub mod potential;
pub mod spec_file;
pub mod spectral;

pub use assembly::{assemble, LinearForm};
pub use bifurcation::{Branch, BranchOptions, BranchPoint};
pub use error::{Error, Result};
pub use function::GraphFunction;
pub use graph::{EdgeId, GraphPoint, MetricGraph, VertexId};
pub use mesh::Mesh;
pub use nls::{GroundStateResult, NlsParams, Status};
pub use potential::PotentialExpr;
pub use spectral::SpectralResult;
