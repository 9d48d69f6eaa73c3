//! A set of goods, stored as a bitset over 0-based good indices.

use std::fmt;

use smallvec::SmallVec;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle {
    // Canonical form: no trailing zero words, so derived Eq/Hash are set equality.
    words: SmallVec<[u64; 1]>,
}

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bundle holding goods `0..m`.
    pub fn full(m: usize) -> Self {
        (0..m).collect()
    }

    /// Builds a bundle from the low bits of `mask` (bit g set means good g).
    pub fn from_mask(mask: u64) -> Self {
        let mut b = Bundle::new();
        if mask != 0 {
            b.words.push(mask);
        }
        b
    }

    /// The bundle as a single machine word, if every good index is below 64.
    pub fn mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn contains(&self, g: usize) -> bool {
        self.words
            .get(g / 64)
            .is_some_and(|w| w & (1u64 << (g % 64)) != 0)
    }

    pub fn insert(&mut self, g: usize) -> bool {
        let (word, bit) = (g / 64, 1u64 << (g % 64));
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        let fresh = self.words[word] & bit == 0;
        self.words[word] |= bit;
        fresh
    }

    pub fn remove(&mut self, g: usize) -> bool {
        let (word, bit) = (g / 64, 1u64 << (g % 64));
        let Some(w) = self.words.get_mut(word) else {
            return false;
        };
        let present = *w & bit != 0;
        *w &= !bit;
        self.trim();
        present
    }

    pub fn with(&self, g: usize) -> Bundle {
        let mut b = self.clone();
        b.insert(g);
        b
    }

    pub fn without(&self, g: usize) -> Bundle {
        let mut b = self.clone();
        b.remove(g);
        b
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.clone();
        for (w, s) in out.words.iter_mut().zip(short.words.iter()) {
            *w |= s;
        }
        out
    }

    pub fn difference(&self, other: &Bundle) -> Bundle {
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
        out.trim();
        out
    }

    pub fn intersection(&self, other: &Bundle) -> Bundle {
        let mut out: Bundle = Bundle {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & b)
                .collect(),
        };
        out.trim();
        out
    }

    pub fn intersection_len(&self, other: &Bundle) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Bundle) -> bool {
        self.words.iter().enumerate().all(|(i, w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    /// Largest good index plus one (0 for the empty bundle).
    pub fn upper_bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
        }
    }

    /// Goods in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut b = Bundle::new();
        for g in iter {
            b.insert(g);
        }
        b
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders 1-based good names, e.g. `{g1,g4}`.
impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, g) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "g{}", g + 1)?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_set_operations() {
        let a: Bundle = [0, 3, 70].into_iter().collect();
        assert!(a.contains(70) && a.contains(3) && !a.contains(1));
        assert_eq!(a.len(), 3);
        assert_eq!(a.mask(), None);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 3, 70]);
        let b = a.without(70);
        assert_eq!(b.mask(), Some(0b1001));
        assert_eq!(b, Bundle::from_mask(0b1001));
        assert_eq!(b.upper_bound(), 4);
        assert_eq!(b.to_string(), "{g1,g4}");
        assert!(b.is_subset(&a));
        assert!(!a.is_subset(&b));
    }

    proptest! {
        #[test]
        fn operations_match_btreeset(xs in proptest::collection::btree_set(0usize..150, 0..20),
                                     ys in proptest::collection::btree_set(0usize..150, 0..20)) {
            let a: Bundle = xs.iter().copied().collect();
            let b: Bundle = ys.iter().copied().collect();
            let union: Vec<_> = xs.union(&ys).copied().collect();
            let diff: Vec<_> = xs.difference(&ys).copied().collect();
            prop_assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), union.clone());
            prop_assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), diff.clone());
            prop_assert_eq!(a.is_disjoint(&b), xs.is_disjoint(&ys));
            prop_assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(),
                            xs.intersection(&ys).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.intersection_len(&b), xs.intersection(&ys).count());
            prop_assert_eq!(a.is_subset(&b), xs.is_subset(&ys));
            prop_assert_eq!(a.union(&b), union.into_iter().collect::<Bundle>());
            prop_assert_eq!(a.difference(&b), diff.into_iter().collect::<Bundle>());
        }
    }
}
