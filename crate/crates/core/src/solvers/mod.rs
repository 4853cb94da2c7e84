//! Iterative building blocks shared by the imagers: the complex
//! soft-thresholding operator, conjugate gradients for Hermitian
//! positive-definite systems, and FISTA with backtracking line search.

pub mod cg;
pub mod fista;
pub mod prox;

pub use cg::{cg_solve, CgConfig, CgOutcome};
pub use fista::{fista, FistaConfig, FistaReport};
pub use prox::soft_threshold;
