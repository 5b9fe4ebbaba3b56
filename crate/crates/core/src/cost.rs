//! Exact rational arithmetic for embedding-cost bookkeeping.
//!
//! Every cost in the model is a multiple of half a bit divided by an
//! occurrence count, so comparisons and identities can be kept exact.

use std::cmp::Ordering;
use std::fmt;

/// A non-negative-denominator fraction compared by cross-multiplication.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    num: i64,
    den: u64,
}

impl Ratio {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        Ratio { num, den }
    }

    /// A value given in half-bit units.
    pub fn half_bits(half: i64) -> Self {
        Ratio::new(half, 2)
    }

    pub fn integer(n: i64) -> Self {
        Ratio::new(n, 1)
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Product with an integer, kept unreduced.
    pub fn scale(&self, m: u64) -> Ratio {
        Ratio::new(self.num * m as i64, self.den)
    }

    pub fn sub(&self, other: &Ratio) -> Ratio {
        Ratio::new(
            self.num * other.den as i64 - other.num * self.den as i64,
            self.den * other.den,
        )
    }

    /// Value in half-bit units when it is an exact multiple of one half.
    pub fn as_half_bits(&self) -> Option<i64> {
        let twice = self.num as i128 * 2;
        (twice % self.den as i128 == 0).then(|| (twice / self.den as i128) as i64)
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.to_f64())
    }
}
