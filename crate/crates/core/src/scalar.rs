use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by the geometry code: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal; panics only for values the type cannot represent,
    /// which never happens for the small constants used here.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_px(v: i64) -> Self {
        Self::from_i64(v).expect("pixel offset representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Slack allowed on the `x + w <= 1` style predicates to absorb the
    /// rounding of `(1 - w) + w`.
    fn boundary_slack() -> Self {
        Self::epsilon() * Self::lit(4.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
