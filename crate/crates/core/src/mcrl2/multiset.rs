use std::collections::BTreeMap;
use std::fmt;

/// A finite multiset; entries with multiplicity zero are never stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiSet<T: Ord>(BTreeMap<T, usize>);

impl<T: Ord> Default for MultiSet<T> {
    fn default() -> Self {
        MultiSet(BTreeMap::new())
    }
}

impl<T: Ord + Clone> MultiSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(t: T) -> Self {
        let mut m = Self::new();
        m.insert(t, 1);
        m
    }

    pub fn insert(&mut self, t: T, n: usize) {
        if n > 0 {
            *self.0.entry(t).or_default() += n;
        }
    }

    /// Removes up to `n` copies of `t`.
    pub fn remove(&mut self, t: &T, n: usize) {
        if let Some(c) = self.0.get_mut(t) {
            *c = c.saturating_sub(n);
            if *c == 0 {
                self.0.remove(t);
            }
        }
    }

    pub fn count(&self, t: &T) -> usize {
        self.0.get(t).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct elements with their multiplicities, in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> + '_ {
        self.0.iter().map(|(t, &n)| (t, n))
    }

    /// Every element repeated by its multiplicity, in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = &T> + '_ {
        self.0.iter().flat_map(|(t, &n)| std::iter::repeat(t).take(n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, n) in other.iter() {
            out.insert(t.clone(), n);
        }
        out
    }

    /// Pointwise subtraction truncated at zero.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, n) in other.iter() {
            out.remove(t, n);
        }
        out
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|(t, n)| n <= other.count(t))
    }

    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> MultiSet<U> {
        let mut out = MultiSet::new();
        for (t, n) in self.iter() {
            out.insert(f(t), n);
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&T) -> bool) -> Self {
        MultiSet(
            self.0
                .iter()
                .filter(|(t, _)| keep(t))
                .map(|(t, &n)| (t.clone(), n))
                .collect(),
        )
    }
}

impl<T: Ord + Clone> FromIterator<T> for MultiSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = MultiSet::new();
        for t in iter {
            m.insert(t, 1);
        }
        m
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for MultiSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟦")?;
        for (i, (t, n)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t:?}:{n}")?;
        }
        f.write_str("⟧")
    }
}
