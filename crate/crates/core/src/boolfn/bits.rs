use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result, M_MAX, N_MAX};

/// Scatter the low bits of `local` into the set positions of `mask`.
///
/// Bit `j` of `local` lands on the `j`-th lowest set bit of `mask`.
#[inline]
pub fn deposit(local: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut m = mask;
    let mut j = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if local >> j & 1 == 1 {
            out |= low;
        }
        m ^= low;
        j += 1;
    }
    out
}

/// Gather the bits of `value` at the set positions of `mask` into the low bits.
#[inline]
pub fn extract(value: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut m = mask;
    let mut j = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if value & low != 0 {
            out |= 1 << j;
        }
        m ^= low;
        j += 1;
    }
    out
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > N_MAX {
        return Err(Error::DimensionTooLarge(n));
    }
    Ok(())
}

/// A point of `{0,1}^n`.
///
/// Internally the integer index with variable 1 as the least significant bit.
/// The textual form lists variable 1 first, so `"00100"` has only `x₃ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: u32,
    n: u8,
}

impl BitString {
    pub fn new(bits: u32, n: usize) -> Result<Self> {
        check_dim(n)?;
        if n < 32 && bits >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "value {bits:#x} does not fit in {n} bits"
            )));
        }
        Ok(BitString { bits, n: n as u8 })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    #[inline]
    pub(crate) fn from_raw(bits: u32, n: usize) -> Self {
        debug_assert!(n <= N_MAX && bits >> n == 0);
        BitString { bits, n: n as u8 }
    }

    /// Integer index of the point (variable 1 is bit 0).
    #[inline]
    pub fn value(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Value of variable `i` (1-based).
    pub fn get(&self, i: usize) -> Result<bool> {
        if i == 0 || i > self.dim() {
            return Err(Error::IndexOutOfRange { index: i, n: self.dim() });
        }
        Ok(self.bits >> (i - 1) & 1 == 1)
    }

    /// Returns `x^T`, the string with the bits in `t` flipped.
    pub fn flip(&self, t: &IndexSet) -> Result<Self> {
        t.check_within(self.dim())?;
        Ok(BitString { bits: self.bits ^ t.mask(), n: self.n })
    }

    /// Positions where the two strings differ.
    pub fn disagreement(&self, other: &BitString) -> Result<IndexSet> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(IndexSet::from_mask(self.bits ^ other.bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => {
                    if i < 32 {
                        bits |= 1 << i;
                    }
                }
                _ => return Err(Error::Parse(format!("invalid bit {c:?} in {s:?}"))),
            }
        }
        BitString::new(bits, s.chars().count())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of `[n]`, stored as a bitmask with variable `i` at bit `i - 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn empty() -> Self {
        Self::EMPTY
    }

    /// Builds a set from 1-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut mask = 0u32;
        for i in indices {
            if i == 0 || i > N_MAX {
                return Err(Error::IndexOutOfRange { index: i, n: N_MAX });
            }
            mask |= 1 << (i - 1);
        }
        Ok(IndexSet(mask))
    }

    #[inline]
    pub fn from_mask(mask: u32) -> Self {
        IndexSet(mask)
    }

    /// `[n]`.
    pub fn full(n: usize) -> Self {
        IndexSet(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    #[inline]
    pub fn mask(&self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Errors unless every member lies in `1..=n`.
    pub fn check_within(&self, n: usize) -> Result<()> {
        let outside = self.0 & !IndexSet::full(n).0;
        if outside != 0 {
            let index = outside.trailing_zeros() as usize + 1;
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(())
    }

    /// Members in ascending order, 1-based.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i + 1)
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        for (pos, i) in self.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        IndexSet::from_indices(v).map_err(serde::de::Error::custom)
    }
}

/// Axis-aligned subcube spanned by two opposite corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub x: BitString,
    pub y: BitString,
}

impl Cube {
    pub fn new(x: BitString, y: BitString) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch { expected: x.dim(), actual: y.dim() });
        }
        Ok(Cube { x, y })
    }

    /// `I(B)`: the positions where the corners disagree.
    #[inline]
    pub fn disagreement(&self) -> IndexSet {
        IndexSet::from_mask(self.x.value() ^ self.y.value())
    }

    /// Number of free coordinates, `|I(B)|`.
    #[inline]
    pub fn free_dim(&self) -> usize {
        self.disagreement().len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn is_degenerate(&self) -> bool {
        self.x == self.y
    }

    /// The point `x^T` where `T` is the subset of `I(B)` encoded by `local`
    /// (bit `j` of `local` selects the `j`-th smallest element of `I(B)`).
    #[inline]
    pub fn point(&self, local: u32) -> BitString {
        let offset = deposit(local, self.disagreement().mask());
        BitString::from_raw(self.x.value() ^ offset, self.dim())
    }

    pub fn contains(&self, z: &BitString) -> bool {
        z.dim() == self.dim() && (z.value() ^ self.x.value()) & !self.disagreement().mask() == 0
    }

    /// All `2^{|I(B)|}` points, ordered by the local subset index.
    pub fn points(&self) -> Result<Vec<BitString>> {
        let m = self.free_dim();
        if m > M_MAX {
            return Err(Error::CubeTooLarge(m));
        }
        Ok((0..1u32 << m).map(|t| self.point(t)).collect())
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
