//! Fixed-length bitset used for per-sample correctness vectors and feature columns.

/// A fixed-length set of bits backed by `u64` words.
///
/// Bits past `len` in the last word are always zero, so word-wise popcounts
/// never need masking.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// All bits set.
    pub fn full(len: usize) -> Self {
        let mut b = Bitset {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        b.trim();
        b
    }

    /// Takes ownership of raw words; bits past `len` are cleared.
    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert_eq!(words.len(), len.div_ceil(64), "word count does not match length");
        let mut b = Bitset { words, len };
        b.trim();
        b
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut b = Bitset::new(len);
        for i in 0..len {
            if f(i) {
                b.set(i);
            }
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        self.words[pos / 64] >> (pos % 64) & 1 == 1
    }

    pub fn set(&mut self, pos: usize) {
        assert!(pos < self.len, "bit {pos} out of range for length {}", self.len);
        self.words[pos / 64] |= 1 << (pos % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|self ∪ other|` without allocating.
    pub fn union_count(&self, other: &Bitset) -> usize {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// `|self ∩ other|` without allocating.
    pub fn and_count(&self, other: &Bitset) -> usize {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `|self \ other|` without allocating.
    pub fn and_not_count(&self, other: &Bitset) -> usize {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    pub fn and(&self, other: &Bitset) -> Bitset {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn and_not(&self, other: &Bitset) -> Bitset {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn or(&self, other: &Bitset) -> Bitset {
        self.zip_with(other, |a, b| a | b)
    }

    /// Bits where the two sets agree.
    pub fn xnor(&self, other: &Bitset) -> Bitset {
        let mut b = self.zip_with(other, |a, b| !(a ^ b));
        b.trim();
        b
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    fn zip_with(&self, other: &Bitset, f: impl Fn(u64, u64) -> u64) -> Bitset {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        Bitset {
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
            len: self.len,
        }
    }

    fn trim(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_is_trimmed() {
        let b = Bitset::full(70);
        assert_eq!(b.count_ones(), 70);
        assert_eq!(Bitset::full(64).count_ones(), 64);
        assert_eq!(Bitset::full(0).count_ones(), 0);
    }

    #[test]
    fn xnor_does_not_leak_tail_bits() {
        let a = Bitset::new(3);
        let b = Bitset::new(3);
        assert_eq!(a.xnor(&b).count_ones(), 3);
    }

    proptest! {
        #[test]
        fn counts_match_naive(bits_a in prop::collection::vec(any::<bool>(), 0..300), seed in any::<u64>()) {
            let n = bits_a.len();
            let bits_b: Vec<bool> = (0..n).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
            let a = Bitset::from_fn(n, |i| bits_a[i]);
            let b = Bitset::from_fn(n, |i| bits_b[i]);
            let union = (0..n).filter(|&i| bits_a[i] || bits_b[i]).count();
            let inter = (0..n).filter(|&i| bits_a[i] && bits_b[i]).count();
            let diff = (0..n).filter(|&i| bits_a[i] && !bits_b[i]).count();
            prop_assert_eq!(a.union_count(&b), union);
            prop_assert_eq!(a.or(&b).count_ones(), union);
            prop_assert_eq!(a.and_count(&b), inter);
            prop_assert_eq!(a.and(&b).count_ones(), inter);
            prop_assert_eq!(a.and_not_count(&b), diff);
            prop_assert_eq!(a.and_not(&b).count_ones(), diff);
            prop_assert_eq!(a.ones().collect::<Vec<_>>(), (0..n).filter(|&i| bits_a[i]).collect::<Vec<_>>());
        }
    }
}
