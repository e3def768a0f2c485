use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Numeric type the engine computes with.
///
/// Comparisons inside the engine must be exact, so the bound requires a total
/// order. That admits machine integers, `Ratio<i64>` and `BigRational`, and
/// rules out `f32`/`f64`.
pub trait Scalar:
    Clone + Debug + Display + Ord + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_int(value: i64) -> Self {
        Self::from_i64(value).expect("integer fits the scalar type")
    }

    /// Returns the value as an integer when it has no fractional part.
    fn as_integer(&self) -> Option<i64>;
}

impl Scalar for i64 {
    fn as_integer(&self) -> Option<i64> {
        Some(*self)
    }
}

impl Scalar for i128 {
    fn as_integer(&self) -> Option<i64> {
        i64::try_from(*self).ok()
    }
}

impl<T> Scalar for num_rational::Ratio<T>
where
    T: Clone
        + Debug
        + Display
        + Ord
        + num_integer::Integer
        + Signed
        + FromPrimitive
        + num_traits::ToPrimitive
        + Send
        + Sync
        + 'static,
    num_rational::Ratio<T>: FromPrimitive,
{
    fn as_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().to_i64()
        } else {
            None
        }
    }
}
