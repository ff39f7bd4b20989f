//! Saturating natural numbers used as modulus values.

use std::fmt;
use std::ops::{Add, Mul, Sub};

/// A natural number with a hard ceiling.
///
/// Every arithmetic operation saturates at [`Nat::CEILING`] instead of
/// wrapping, and a saturated value stays saturated through further
/// arithmetic. A saturated value stands for "some index at least this large";
/// consumers treat it as lying beyond any finite horizon.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Nat(u64);

impl Nat {
    pub const CEILING: u64 = i64::MAX as u64;
    pub const ZERO: Nat = Nat(0);
    pub const ONE: Nat = Nat(1);
    pub const SATURATED: Nat = Nat(Self::CEILING);

    pub const fn new(value: u64) -> Nat {
        if value >= Self::CEILING {
            Self::SATURATED
        } else {
            Nat(value)
        }
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    pub const fn is_saturated(self) -> bool {
        self.0 == Self::CEILING
    }

    /// The least natural number `>= x`. Non-finite or out-of-range values
    /// saturate; negative values map to zero.
    pub fn ceil_f64(x: f64) -> Nat {
        if x.is_nan() || x >= Self::CEILING as f64 {
            return Self::SATURATED;
        }
        if x <= 0.0 {
            return Self::ZERO;
        }
        Nat::new(x.ceil() as u64)
    }

    /// `self - 1`, clamped at zero.
    pub fn pred(self) -> Nat {
        self - Nat::ONE
    }

    /// Index form for slicing, `None` when the value does not fit or is saturated.
    pub fn as_index(self) -> Option<usize> {
        if self.is_saturated() {
            None
        } else {
            usize::try_from(self.0).ok()
        }
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64
    }
}

impl From<u64> for Nat {
    fn from(value: u64) -> Self {
        Nat::new(value)
    }
}

impl Add for Nat {
    type Output = Nat;
    fn add(self, rhs: Nat) -> Nat {
        if self.is_saturated() || rhs.is_saturated() {
            return Nat::SATURATED;
        }
        Nat::new(self.0.saturating_add(rhs.0))
    }
}

impl Add<u64> for Nat {
    type Output = Nat;
    fn add(self, rhs: u64) -> Nat {
        self + Nat::new(rhs)
    }
}

impl Mul for Nat {
    type Output = Nat;
    fn mul(self, rhs: Nat) -> Nat {
        if self.0 == 0 || rhs.0 == 0 {
            return Nat::ZERO;
        }
        if self.is_saturated() || rhs.is_saturated() {
            return Nat::SATURATED;
        }
        Nat::new(self.0.saturating_mul(rhs.0))
    }
}

impl Mul<u64> for Nat {
    type Output = Nat;
    fn mul(self, rhs: u64) -> Nat {
        self * Nat::new(rhs)
    }
}

/// Truncated subtraction. A saturated minuend stays saturated: its true value
/// is unknown, and rounding an index up keeps every certificate valid.
impl Sub for Nat {
    type Output = Nat;
    fn sub(self, rhs: Nat) -> Nat {
        if self.is_saturated() {
            return Nat::SATURATED;
        }
        Nat(self.0.saturating_sub(rhs.0))
    }
}

impl Sub<u64> for Nat {
    type Output = Nat;
    fn sub(self, rhs: u64) -> Nat {
        self - Nat::new(rhs)
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_saturated() {
            f.write_str("saturated")
        } else {
            write!(f, "{}", self.0)
        }
    }
}
