//! Ternary words, permutations in one-line notation, and the handful of
//! sequence operations the constructions are built from.
//!
//! Positions and permutation values are 1-based at every public boundary.
//! Internally trits and values are stored as `u8`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Number of differing coordinates between two equal-length sequences.
pub fn hamming_distance<T: PartialEq>(a: &[T], b: &[T]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(distance_unchecked(a, b))
}

#[inline]
pub(crate) fn distance_unchecked<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// `3^n` as a `usize`, or `None` on overflow.
pub fn domain_size(n: usize) -> Option<usize> {
    3usize.checked_pow(u32::try_from(n).ok()?)
}

/// A fixed-length vector over `{0, 1, 2}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TernaryWord {
    trits: Box<[u8]>,
}

impl TernaryWord {
    pub fn new(trits: impl Into<Vec<u8>>) -> Result<Self> {
        let trits = trits.into();
        if let Some((position, &value)) = trits.iter().enumerate().find(|(_, &t)| t > 2) {
            return Err(Error::InvalidTrit {
                position: position + 1,
                value,
            });
        }
        Ok(Self {
            trits: trits.into_boxed_slice(),
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            trits: vec![0; n].into_boxed_slice(),
        }
    }

    /// The word at position `index` of the lexicographic enumeration of
    /// `Z_3^n` (first trit most significant).
    pub fn from_index(n: usize, index: usize) -> Self {
        let mut trits = vec![0u8; n];
        write_word(index, &mut trits);
        Self {
            trits: trits.into_boxed_slice(),
        }
    }

    /// Inverse of [`TernaryWord::from_index`].
    pub fn index(&self) -> usize {
        word_index(&self.trits)
    }

    pub fn len(&self) -> usize {
        self.trits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trits.is_empty()
    }

    pub fn trits(&self) -> &[u8] {
        &self.trits
    }

    /// Trit at 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<u8> {
        i.checked_sub(1).and_then(|i| self.trits.get(i).copied())
    }

    pub fn distance(&self, other: &Self) -> Result<usize> {
        hamming_distance(&self.trits, &other.trits)
    }

    /// Enumerates `Z_3^n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = TernaryWord> {
        let count = domain_size(n).expect("domain too large to enumerate");
        (0..count).map(move |i| TernaryWord::from_index(n, i))
    }
}

impl fmt::Debug for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryWord({self})")
    }
}

/// Compact form, e.g. `01202`.
impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.trits.iter() {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Lexicographic rank of a trit slice.
#[inline]
pub(crate) fn word_index(trits: &[u8]) -> usize {
    trits.iter().fold(0, |acc, &t| acc * 3 + t as usize)
}

/// Writes the trits of `index` into `out` (most significant first).
#[inline]
pub(crate) fn write_word(mut index: usize, out: &mut [u8]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % 3) as u8;
        index /= 3;
    }
}

/// A permutation of `{1..n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    values: Box<[u8]>,
}

impl Permutation {
    pub fn new(values: impl Into<Vec<u8>>) -> Result<Self> {
        let values = values.into();
        if !is_permutation(&values) {
            return Err(Error::NotPermutation {
                len: values.len(),
                values: values.iter().map(|&v| v as u32).collect(),
            });
        }
        Ok(Self {
            values: values.into_boxed_slice(),
        })
    }

    /// Builds from wider integers, rejecting values that do not fit.
    pub fn from_u32(values: &[u32]) -> Result<Self> {
        let narrow: Option<Vec<u8>> = values.iter().map(|&v| u8::try_from(v).ok()).collect();
        match narrow {
            Some(v) => Self::new(v),
            None => Err(Error::NotPermutation {
                len: values.len(),
                values: values.to_vec(),
            }),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= u8::MAX as usize, "permutation length {n} exceeds 255");
        Self {
            values: (1..=n as u8).collect(),
        }
    }

    pub(crate) fn from_raw_unchecked(values: Vec<u8>) -> Self {
        debug_assert!(is_permutation(&values));
        Self {
            values: values.into_boxed_slice(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Value at 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<u8> {
        i.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// 1-based position holding `value`.
    pub fn position_of(&self, value: u8) -> Option<usize> {
        self.values.iter().position(|&v| v == value).map(|p| p + 1)
    }

    pub fn distance(&self, other: &Self) -> Result<usize> {
        hamming_distance(&self.values, &other.values)
    }

    /// Relabels values pairwise; see [`swap_values`].
    pub fn swap_values(&self, pairs: &[(u8, u8)]) -> Result<Self> {
        swap_values(self, pairs)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", &self.values[..])
    }
}

/// Space separated, e.g. `3 1 5 2 4`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_spaced(f, &self.values)
    }
}

pub(crate) fn write_spaced(f: &mut impl fmt::Write, values: &[u8]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// True when `values` is a bijection on `{1..len}`.
pub fn is_permutation(values: &[u8]) -> bool {
    let n = values.len();
    if n > u8::MAX as usize {
        return false;
    }
    let mut seen = [false; 256];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// A set of 1-based coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: BTreeSet<usize>,
}

impl IndexSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Every position of a length-`len` sequence.
    pub fn all(len: usize) -> Self {
        Self::new(1..=len)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// Fails unless every index lies in `1..=len`.
    pub fn check_within(&self, len: usize) -> Result<()> {
        match self.indices.iter().find(|&&i| i == 0 || i > len) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len }),
            None => Ok(()),
        }
    }

    /// 0-based positions of a length-`len` sequence that survive projection.
    pub(crate) fn kept_positions(&self, len: usize) -> Vec<usize> {
        (0..len).filter(|p| !self.contains(p + 1)).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.indices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Deletes the coordinates in `removed`, keeping order.
pub fn project_out<T: Clone>(v: &[T], removed: &IndexSet) -> Result<Vec<T>> {
    removed.check_within(v.len())?;
    Ok(v.iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i + 1))
        .map(|(_, x)| x.clone())
        .collect())
}

/// Exchanges values pairwise: every occurrence of `a` becomes `b` and vice versa.
pub fn swap_values(p: &Permutation, pairs: &[(u8, u8)]) -> Result<Permutation> {
    let table = swap_table(pairs, p.len())?;
    let values = p.values.iter().map(|&v| table[v as usize]).collect();
    Ok(Permutation::from_raw_unchecked(values))
}

/// Value relabeling lookup for `pairs`, validated against `1..=len`.
pub(crate) fn swap_table(pairs: &[(u8, u8)], len: usize) -> Result<[u8; 256]> {
    let mut table = [0u8; 256];
    for (i, slot) in table.iter_mut().enumerate() {
        *slot = i as u8;
    }
    let mut touched = [false; 256];
    for &(a, b) in pairs {
        for v in [a, b] {
            if v == 0 || v as usize > len {
                return Err(Error::IndexOutOfRange {
                    index: v as usize,
                    len,
                });
            }
        }
        if a == b || touched[a as usize] {
            return Err(Error::OverlappingSwap { value: a });
        }
        if touched[b as usize] {
            return Err(Error::OverlappingSwap { value: b });
        }
        touched[a as usize] = true;
        touched[b as usize] = true;
        table[a as usize] = b;
        table[b as usize] = a;
    }
    Ok(table)
}

/// Whether output distance must be at least (`Preserve`) or strictly above
/// (`Increase`) the input distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceMode {
    Preserve,
    Increase,
}

impl DistanceMode {
    #[inline(always)]
    pub fn admits(self, input: usize, output: usize) -> bool {
        match self {
            DistanceMode::Preserve => output >= input,
            DistanceMode::Increase => output > input,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMode::Preserve => "preserve",
            DistanceMode::Increase => "increase",
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "preserve" | "dpm" => Ok(DistanceMode::Preserve),
            "increase" | "dim" => Ok(DistanceMode::Increase),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}
