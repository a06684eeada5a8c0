//! The five-element chain of robust truth values.
//!
//! A truth value is a monotone 4-bit vector `b1 b2 b3 b4` (if `i <= j` then
//! `b_i <= b_j`), which leaves exactly five values:
//!
//! ```text
//! 0000 < 0001 < 0011 < 0111 < 1111
//! ```
//!
//! Meet and join are minimum and maximum on this chain, implication is the
//! residual of meet, and negation sends `1111` to `0000` and everything else
//! to `1111`. Together these form a da Costa algebra.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruthValueError {
    #[error("bits {0} are not monotone (b1 <= b2 <= b3 <= b4 must hold)")]
    NotMonotone(String),
    #[error("bit index {0} is out of range, expected 1..=4")]
    BitIndex(usize),
    #[error("`{0}` is not a truth value, expected one of 0000, 0001, 0011, 0111, 1111")]
    Parse(String),
}

/// A robust truth value. Variants are listed in increasing order, so the
/// derived `Ord` is the truth order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruthValue {
    B0000,
    B0001,
    B0011,
    B0111,
    B1111,
}

use TruthValue::*;

impl TruthValue {
    /// All values from bottom to top; `ALL[l]` is the value with `l` bits set.
    pub const ALL: [TruthValue; 5] = [B0000, B0001, B0011, B0111, B1111];
    pub const TOP: TruthValue = B1111;
    pub const BOTTOM: TruthValue = B0000;

    /// Number of bits set, i.e. the position of the value in the chain.
    pub fn level(self) -> usize {
        self as usize
    }

    pub fn from_level(level: usize) -> Option<TruthValue> {
        Self::ALL.get(level).copied()
    }

    pub fn from_bool(b: bool) -> TruthValue {
        if b {
            B1111
        } else {
            B0000
        }
    }

    pub fn from_bits(bits: [bool; 4]) -> Result<TruthValue, TruthValueError> {
        if bits.windows(2).any(|w| w[0] && !w[1]) {
            return Err(TruthValueError::NotMonotone(render_bits(bits)));
        }
        Ok(Self::ALL[bits.iter().filter(|b| **b).count()])
    }

    pub fn bits(self) -> [bool; 4] {
        let level = self.level();
        // bit k (1-based) is set iff k > 4 - level
        std::array::from_fn(|i| i + 1 > 4 - level)
    }

    /// Reads bit `k`, 1-based.
    pub fn project(self, k: usize) -> Result<bool, TruthValueError> {
        if !(1..=4).contains(&k) {
            return Err(TruthValueError::BitIndex(k));
        }
        Ok(self.bits()[k - 1])
    }

    /// Same as [`project`](Self::project) for an index already known to be valid.
    pub fn bit(self, k: usize) -> bool {
        self.bits()[k - 1]
    }

    pub fn meet(self, other: TruthValue) -> TruthValue {
        self.min(other)
    }

    pub fn join(self, other: TruthValue) -> TruthValue {
        self.max(other)
    }

    pub fn leq(self, other: TruthValue) -> bool {
        self <= other
    }

    pub fn negate(self) -> TruthValue {
        if self == B1111 {
            B0000
        } else {
            B1111
        }
    }

    pub fn residual_implies(self, other: TruthValue) -> TruthValue {
        if self <= other {
            B1111
        } else {
            other
        }
    }

    /// Double negation: `1111` stays, every shade of false collapses to `0000`.
    pub fn quantize(self) -> TruthValue {
        self.negate().negate()
    }
}

fn render_bits(bits: [bool; 4]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_bits(self.bits()))
    }
}

impl FromStr for TruthValue {
    type Err = TruthValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Self::ALL.into_iter().find(|v| v.to_string() == s).ok_or_else(|| TruthValueError::Parse(s.to_string()))
    }
}
