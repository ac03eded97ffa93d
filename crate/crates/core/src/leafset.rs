//! Compact bit sets over dense leaf-label ids.
//!
//! Leaf sets show up everywhere: clusters, pendant-subtree detection, display
//! checks. Instances are small (tens to a few hundred leaves), so a word
//! vector with the first word inline covers the common case without
//! allocating.

use smallvec::SmallVec;

use crate::newick::LabelId;

/// A set of leaf-label ids backed by bit words.
///
/// Invariant: no trailing zero words, so `Eq`/`Hash`/`Ord` on the word vector
/// are structural set equality/ordering.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LeafSet {
    words: SmallVec<[u64; 1]>,
}

impl LeafSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(id: LabelId) -> Self {
        let mut s = Self::new();
        s.insert(id);
        s
    }

    pub fn from_iter<I: IntoIterator<Item = LabelId>>(iter: I) -> Self {
        let mut s = Self::new();
        for id in iter {
            s.insert(id);
        }
        s
    }

    pub fn insert(&mut self, id: LabelId) {
        let (w, b) = (id.0 as usize / 64, id.0 as usize % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, id: LabelId) {
        let (w, b) = (id.0 as usize / 64, id.0 as usize % 64);
        if w < self.words.len() {
            self.words[w] &= !(1 << b);
            self.normalize();
        }
    }

    pub fn contains(&self, id: LabelId) -> bool {
        let (w, b) = (id.0 as usize / 64, id.0 as usize % 64);
        w < self.words.len() && self.words[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn union_with(&mut self, other: &LeafSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (i, w) in other.words.iter().enumerate() {
            self.words[i] |= w;
        }
    }

    pub fn difference_with(&mut self, other: &LeafSet) {
        for (i, w) in other.words.iter().enumerate() {
            if i >= self.words.len() {
                break;
            }
            self.words[i] &= !w;
        }
        self.normalize();
    }

    pub fn intersect_with(&mut self, other: &LeafSet) {
        if self.words.len() > other.words.len() {
            self.words.truncate(other.words.len());
        }
        for (i, w) in self.words.iter_mut().enumerate() {
            *w &= other.words[i];
        }
        self.normalize();
    }

    pub fn is_subset_of(&self, other: &LeafSet) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words.iter().enumerate().all(|(i, w)| w & !other.words[i] == 0)
    }

    pub fn is_disjoint_from(&self, other: &LeafSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    Some(LabelId(i as u32 * 64 + b))
                }
            })
        })
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl std::fmt::Debug for LeafSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}

impl FromIterator<LabelId> for LeafSet {
    fn from_iter<I: IntoIterator<Item = LabelId>>(iter: I) -> Self {
        Self::from_iter(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: u32) -> LabelId {
        LabelId(i)
    }

    #[test]
    fn insert_remove_roundtrip() {
        let mut s = LeafSet::new();
        s.insert(l(3));
        s.insert(l(70));
        assert!(s.contains(l(3)) && s.contains(l(70)));
        assert_eq!(s.len(), 2);
        s.remove(l(70));
        // trailing word dropped, so equality with a fresh singleton holds
        assert_eq!(s, LeafSet::singleton(l(3)));
    }

    #[test]
    fn subset_and_union() {
        let a = LeafSet::from_iter([l(1), l(2)]);
        let mut b = LeafSet::from_iter([l(1)]);
        assert!(b.is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
        b.union_with(&a);
        assert_eq!(a, b);
    }

    #[test]
    fn iter_is_sorted() {
        let s = LeafSet::from_iter([l(65), l(2), l(64), l(0)]);
        let v: Vec<u32> = s.iter().map(|x| x.0).collect();
        assert_eq!(v, vec![0, 2, 64, 65]);
    }
}
