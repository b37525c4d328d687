//! Bitmask subsets of a ground set `{0, .., n-1}` with `n <= 64`.
//!
//! Elements are 0-based internally. `Display` renders them 1-based, which is
//! how every external format labels coordinates.

use std::fmt;

/// Largest ground set a [`Subset`] can address.
pub const MAX_GROUND: usize = 64;

/// A subset of the ground set, stored as a machine-word bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The whole ground set `{0, .., n-1}`.
    #[inline]
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_GROUND);
        if n >= 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(e: usize) -> Self {
        debug_assert!(e < MAX_GROUND);
        Subset(1u64 << e)
    }

    /// Builds a subset from 0-based element indices.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        elements.into_iter().fold(Subset::EMPTY, |s, e| s.with(e))
    }

    /// Builds a subset from 1-based labels, as written in `[n]` notation.
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        labels.into_iter().fold(Subset::EMPTY, |s, l| s.with(l - 1))
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        e < MAX_GROUND && self.0 >> e & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Self {
        Subset(self.0 | 1u64 << e)
    }

    #[inline]
    pub fn without(self, e: usize) -> Self {
        Subset(self.0 & !(1u64 << e))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// 1-based labels in increasing order.
    pub fn labels(self) -> Vec<usize> {
        self.iter().map(|e| e + 1).collect()
    }

    /// Ordering by cardinality first, then lexicographically on the sorted
    /// element lists.
    pub fn cmp_size_lex(&self, other: &Subset) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }

    /// All subsets of `self` (including `∅` and `self`), in increasing bit order.
    pub fn subsets(self) -> Submasks {
        Submasks {
            mask: self.0,
            next: Some(0),
        }
    }

    /// All subsets of `self` with exactly `size` elements, in lexicographic
    /// order of their element lists.
    pub fn subsets_of_size(self, size: usize) -> Combinations {
        Combinations::new(self.iter().collect(), size)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", e + 1)?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_elements(iter)
    }
}

/// Iterator over the elements of a subset.
#[derive(Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Iterator over all submasks of a mask.
pub struct Submasks {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        // (cur - mask) & mask steps to the next submask in increasing order.
        self.next = if cur == self.mask {
            None
        } else {
            Some(cur.wrapping_sub(self.mask) & self.mask)
        };
        Some(Subset(cur))
    }
}

/// Fixed-size combinations of a list of elements, lexicographic.
pub struct Combinations {
    pool: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(pool: Vec<usize>, size: usize) -> Self {
        let done = size > pool.len();
        Combinations {
            idx: (0..size).collect(),
            pool,
            done,
        }
    }
}

impl Iterator for Combinations {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.pool[i]).collect();
        let k = self.idx.len();
        let n = self.pool.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] != i + n - k {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
