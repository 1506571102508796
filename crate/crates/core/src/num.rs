//! Counter value types.
//!
//! All semantics (programs, VASS, the search engine) are generic over the
//! unsigned integer type that stores counter values. Narrow types keep the
//! visited set of the search engine small; `u64` is the default used by the
//! type aliases at the crate root.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, PrimInt, ToPrimitive, Unsigned};

/// An unsigned machine integer usable as a counter value.
pub trait CounterValue:
    PrimInt
    + Unsigned
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Hash
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts from `u64`, returning `None` if the value does not fit.
    fn from_u64_checked(v: u64) -> Option<Self> {
        Self::from_u64(v)
    }

    /// Widens to `u128`; every supported type fits.
    fn widen(self) -> u128 {
        self.to_u128().expect("counter values fit in u128")
    }

    /// Applies a signed delta, returning `None` on underflow or overflow.
    fn offset(self, delta: i64) -> Option<Self> {
        if delta >= 0 {
            self.checked_add(&Self::from_u64(delta as u64)?)
        } else {
            self.checked_sub(&Self::from_u64(delta.unsigned_abs())?)
        }
    }
}

impl<T> CounterValue for T where
    T: PrimInt
        + Unsigned
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Hash
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Picks the narrowest supported width for a maximum value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    U16,
    U32,
    U64,
}

impl Width {
    pub fn for_max(max: u128) -> Option<Width> {
        if max <= u16::MAX as u128 {
            Some(Width::U16)
        } else if max <= u32::MAX as u128 {
            Some(Width::U32)
        } else if max <= u64::MAX as u128 {
            Some(Width::U64)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_are_checked() {
        assert_eq!(3u8.offset(-3), Some(0));
        assert_eq!(3u8.offset(-4), None);
        assert_eq!(250u8.offset(6), None);
        assert_eq!(250u8.offset(5), Some(255));
        assert_eq!(7u64.offset(0), Some(7));
    }

    #[test]
    fn width_selection() {
        assert_eq!(Width::for_max(65_535), Some(Width::U16));
        assert_eq!(Width::for_max(65_536), Some(Width::U32));
        assert_eq!(Width::for_max(1 << 40), Some(Width::U64));
        assert_eq!(Width::for_max(u128::MAX), None);
    }
}
