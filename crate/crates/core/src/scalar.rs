//! Scalar abstraction for the numeric pipeline.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! pipeline runs in `f32` or `f64`. Concrete aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar usable throughout the pipeline.
///
/// Implemented by `f32` and `f64` via the blanket impl below.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + FromStr
    + Display
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + Sum
        + FromStr
        + Display
        + Debug
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into `T`.
///
/// Only used for small literals (hyperparameters, recipe constants), which
/// are representable in every `Scalar`.
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar type")
}

/// Converts a count into `T`.
pub(crate) fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}
