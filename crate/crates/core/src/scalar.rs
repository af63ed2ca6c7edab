//! Scalar types usable as dissimilarity and inertia values.
//!
//! L1-based quantities are integers and are best carried in `i64`, which keeps
//! every incremental update exact. Jaccard dissimilarities are fractions and
//! need a floating point scalar.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{Num, NumCast, ToPrimitive};

/// Numeric type carried through dissimilarity matrices, criteria and heuristics.
pub trait Scalar:
    Num
    + NumCast
    + ToPrimitive
    + Copy
    + PartialOrd
    + Debug
    + Display
    + Sum
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + serde::Serialize
    + 'static
{
    /// Arithmetic on this type is exact (integers).
    const EXACT: bool;

    /// Relative tolerance used by [`Scalar::approx_eq`]; zero for exact types.
    const REL_TOL: f64;

    fn from_count(count: u64) -> Self {
        <Self as NumCast>::from(count).expect("count representable in scalar type")
    }

    fn from_i64(value: i64) -> Self {
        <Self as NumCast>::from(value).expect("value representable in scalar type")
    }

    /// Jaccard dissimilarity `1 - shared/union`, or `None` when the type cannot
    /// represent fractions.
    fn from_jaccard(shared: u32, union: u32) -> Option<Self>;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Equality up to [`Scalar::REL_TOL`] relative error (exact for integers).
    fn approx_eq(self, other: Self) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let (a, b) = (self.as_f64(), other.as_f64());
        let scale = a.abs().max(b.abs()).max(1.0);
        (a - b).abs() <= Self::REL_TOL * scale
    }
}

impl Scalar for i64 {
    const EXACT: bool = true;
    const REL_TOL: f64 = 0.0;

    fn from_jaccard(shared: u32, union: u32) -> Option<Self> {
        // representable only in the degenerate cases 0 and 1
        if union == 0 || shared == union {
            Some(0)
        } else if shared == 0 {
            Some(1)
        } else {
            None
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const REL_TOL: f64 = 1e-9;

    fn from_jaccard(shared: u32, union: u32) -> Option<Self> {
        if union == 0 {
            return Some(0.0);
        }
        Some(1.0 - <f64 as From<u32>>::from(shared) / <f64 as From<u32>>::from(union))
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    const REL_TOL: f64 = 1e-5;

    fn from_jaccard(shared: u32, union: u32) -> Option<Self> {
        if union == 0 {
            return Some(0.0);
        }
        Some(1.0 - shared as f32 / union as f32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_jaccard_only_for_degenerate_values() {
        assert_eq!(i64::from_jaccard(0, 0), Some(0));
        assert_eq!(i64::from_jaccard(3, 3), Some(0));
        assert_eq!(i64::from_jaccard(0, 3), Some(1));
        assert_eq!(i64::from_jaccard(1, 3), None);
    }

    #[test]
    fn approx_eq_respects_exactness() {
        assert!(!5i64.approx_eq(6));
        assert!(1.0f64.approx_eq(1.0 + 1e-12));
        assert!(!1.0f64.approx_eq(1.0 + 1e-6));
        assert!(1.0f32.approx_eq(1.000001));
    }
}
