//! Fixed-width bitsets used for object sets, attribute sets and focal sets.

use std::cmp::Ordering;
use std::fmt;

const WORD: usize = 64;

/// A set of indices below a fixed width.
///
/// Ordering is graded: smaller sets come first, and sets of equal size are
/// compared lexicographically on their sorted index lists. Lattice exports
/// and subset scans rely on this order being stable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    width: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(width: usize) -> Self {
        BitSet {
            width,
            words: vec![0; width.div_ceil(WORD)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut s = Self::empty(width);
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * WORD;
            let n = (width - lo).min(WORD);
            *w = if n == WORD { u64::MAX } else { (1u64 << n) - 1 };
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Self {
        let mut s = Self::empty(width);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds a set from the low `width` bits of `mask`. Only valid for
    /// widths up to 64.
    pub fn from_mask(width: usize, mask: u64) -> Self {
        assert!(width <= WORD, "from_mask needs width <= 64");
        let mut s = Self::empty(width);
        if width > 0 {
            let keep = if width == WORD { u64::MAX } else { (1u64 << width) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.width, "index {i} out of bounds for width {}", self.width);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.width, "index {i} out of bounds for width {}", self.width);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.width && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.width
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &BitSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &BitSet) -> BitSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> BitSet {
        BitSet::full(self.width).difference(self)
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Iterates set indices in increasing order.
    pub fn iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Low 64 bits as an integer mask.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    /// True when `self` and `other` agree on every index below `bound`.
    pub fn agrees_below(&self, other: &BitSet, bound: usize) -> bool {
        self.check_width(other);
        let full_words = bound / WORD;
        if self.words[..full_words] != other.words[..full_words] {
            return false;
        }
        let rem = bound % WORD;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        (self.words[full_words] ^ other.words[full_words]) & mask == 0
    }

    fn zip_with(&self, other: &BitSet, f: impl Fn(u64, u64) -> u64) -> BitSet {
        self.check_width(other);
        BitSet {
            width: self.width,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn check_width(&self, other: &BitSet) {
        assert_eq!(
            self.width, other.width,
            "bitset width mismatch ({} vs {})",
            self.width, other.width
        );
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * WORD + tz);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

impl Ord for BitSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.len().cmp(&other.len()))
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for BitSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of `{0..width}` in graded order (size, then lexicographic).
/// Callers guard `width`; this allocates `2^width` sets.
pub fn graded_subsets(width: usize) -> Vec<BitSet> {
    assert!(width < WORD, "graded_subsets needs width < 64");
    let mut all: Vec<BitSet> = (0..1u64 << width).map(|m| BitSet::from_mask(width, m)).collect();
    all.sort();
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_complement() {
        let f = BitSet::full(70);
        assert_eq!(f.len(), 70);
        assert!(f.complement().is_empty());
        let s = BitSet::from_indices(70, [0, 63, 64, 69]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 69]);
        assert_eq!(s.complement().len(), 66);
    }

    #[test]
    fn graded_order() {
        let subsets = graded_subsets(3);
        let lists: Vec<Vec<usize>> = subsets.iter().map(|s| s.iter().collect()).collect();
        assert_eq!(
            lists,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn agrees_below_spans_words() {
        let a = BitSet::from_indices(130, [1, 70, 129]);
        let b = BitSet::from_indices(130, [1, 70, 128]);
        assert!(a.agrees_below(&b, 128));
        assert!(!a.agrees_below(&b, 130));
        assert!(a.agrees_below(&b, 0));
    }

    proptest! {
        #[test]
        fn set_algebra_matches_masks(a in any::<u64>(), b in any::<u64>(), w in 1usize..=64) {
            let x = BitSet::from_mask(w, a);
            let y = BitSet::from_mask(w, b);
            let keep = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
            prop_assert_eq!(x.intersection(&y).to_mask(), a & b & keep);
            prop_assert_eq!(x.union(&y).to_mask(), (a | b) & keep);
            prop_assert_eq!(x.difference(&y).to_mask(), a & !b & keep);
            prop_assert_eq!(x.is_subset(&y), (a & keep) & !(b & keep) == 0);
            prop_assert_eq!(x.len(), (a & keep).count_ones() as usize);
        }
    }
}
