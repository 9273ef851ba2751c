use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::Float;

/// Floating-point type used for rewards and action values.
///
/// `Display` must print a value that parses back to the identical bits via
/// `FromStr`; the Q bank snapshot format relies on it. Both `f32` and `f64`
/// satisfy this with the standard library formatting.
pub trait Scalar: Float + FromStr + Display + Debug + Default + Send + Sync + 'static {
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}
