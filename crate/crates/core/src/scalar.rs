//! Scalar abstraction shared by the numeric modules.
//!
//! Everything that does arithmetic on embeddings, losses or statistics is
//! written against [`Scalar`], so the same code runs in `f32` for storage-bound
//! work and `f64` for accumulation and finite-difference checks.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn as_f32(self) -> f32 {
        self.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Cast a slice between scalar types.
pub fn cast_slice<A: Scalar, B: Scalar>(xs: &[A]) -> Vec<B> {
    xs.iter().map(|&x| B::lit(x.as_f64())).collect()
}
