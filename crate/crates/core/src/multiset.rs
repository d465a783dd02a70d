//! Finite multisets backed by a count map.

use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;

/// A finite multiset. Elements with count zero are never stored, so two
/// multisets are equal exactly when their count functions agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, usize>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset { counts: BTreeMap::new() }
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: T) {
        *self.counts.entry(item).or_insert(0) += 1;
    }

    /// Removes one copy of `item`. Returns false if it was absent.
    pub fn remove(&mut self, item: &T) -> bool {
        match self.counts.get_mut(item) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(item);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, item: &T) -> usize {
        self.counts.get(item).copied().unwrap_or(0)
    }

    /// Total number of elements, counting repetitions.
    pub fn size(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `true` iff every count in `small` is at most the count in `self`.
    pub fn contains_sub_multiset(&self, small: &Multiset<T>) -> bool {
        small.counts.iter().all(|(k, &c)| self.count(k) >= c)
    }

    /// Distinct elements with their counts, in ascending element order.
    pub fn counts(&self) -> btree_map::Iter<'_, T, usize> {
        self.counts.iter()
    }

    /// Elements with repetition, in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.counts
            .iter()
            .flat_map(|(k, &c)| std::iter::repeat_n(k, c))
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn to_vec(&self) -> Vec<T> {
        self.iter().cloned().collect()
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x);
        }
        m
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Free-function form of [`Multiset::contains_sub_multiset`].
pub fn contains_sub_multiset<T: Ord>(big: &Multiset<T>, small: &Multiset<T>) -> bool {
    big.contains_sub_multiset(small)
}
