//! Scalar abstraction for the numeric kernels.
//!
//! Everything numeric in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The dataset format and the CLI pin
//! `f64`; the narrower type exists for memory-constrained deployments of
//! the operator and solver kernels.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar usable by every kernel in this crate.
///
/// The supertraits cover what the kernels actually need: transcendental
/// functions and constants (`Float`, `FloatConst`), conversion from
/// configuration literals (`FromPrimitive`), accumulation (`NumAssign`,
/// `Sum`), formatting for logs and error messages, and thread-safety for
/// the parallel paths.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant (tolerance, default parameter) into `Self`.
    ///
    /// Rounds to nearest for `f32`; exact for `f64`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
