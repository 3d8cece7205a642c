/// A set of positions within one attribute range, stored as a bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ValueSet {
    words: Vec<u64>,
    universe: usize,
}

impl ValueSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for i in 0..universe {
            set.insert(i);
        }
        set
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &ValueSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// Positions in ascending order.
    pub fn positions(&self) -> Vec<usize> {
        (0..self.universe).filter(|&i| self.contains(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersect_and_count_across_word_boundary() {
        let mut a = ValueSet::empty(130);
        let mut b = ValueSet::empty(130);
        for i in [0, 63, 64, 129] {
            a.insert(i);
        }
        for i in [63, 64, 100] {
            b.insert(i);
        }
        a.intersect_with(&b);
        assert_eq!(a.positions(), vec![63, 64]);
        assert_eq!(a.len(), 2);
        assert!(!a.contains(200));
    }

    #[test]
    fn full_set_has_every_position() {
        let s = ValueSet::full(5);
        assert_eq!(s.len(), 5);
        assert!(!ValueSet::empty(5).contains(0));
        assert!(ValueSet::empty(0).is_empty());
    }
}
