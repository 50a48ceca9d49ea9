//! Exact block-recursive linear algebra on quadtree matrices.
//!
//! Matrices are [`QuadMatrix`] values over a [`domain::Ring`]. On top of
//! them sit recursive standard/Strassen multiplication ([`multiply`]),
//! Strassen inversion, triangular inversion and Cholesky ([`factorize`]),
//! the fraction-free extended adjoint mapping with kernel, rank and
//! determinant ([`adjoint`]), and its multi-modular variant ([`crt`]).
//! Every algorithm takes a [`TaskContext`]; [`engine::Engine`] runs them on a
//! pool of workers, [`TaskContext::serial`] runs them inline.

pub mod adjoint;
pub mod crt;
pub mod domain;
pub mod engine;
pub mod error;
pub mod factorize;
pub mod generate;
pub mod io;
pub mod multiply;
pub mod quad;

pub use adjoint::{adjoint_extended, determinant, echelon_form, kernel_basis, rank, AdjointResult};
pub use engine::{Engine, EngineConfig, SchedulerMode, TaskContext, TaskGraph, WorkerTopology};
pub use error::{Error, Result};
pub use multiply::{Algorithm, MultiplyConfig};
pub use quad::{DiagSelector, PadMode, PivotStructure, QuadMatrix};
