use std::fmt::{Debug, Display, LowerExp};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Real scalar the dense linear algebra is written against.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + LowerExp + FromStr + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    /// Lossy conversion from a count.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count representable")
    }

    /// Widening to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
