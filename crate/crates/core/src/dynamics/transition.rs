use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::DynamicsError;

/// A finite ordered set of state identifiers, shared cheaply between values.
#[derive(Clone)]
pub struct StateSet(Arc<Inner>);

struct Inner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateSet {
    /// Fails on the first repeated name.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, DynamicsError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(DynamicsError::DuplicateState(n.clone()));
            }
        }
        Ok(Self(Arc::new(Inner { names, index })))
    }

    pub fn empty() -> Self {
        Self(Arc::new(Inner {
            names: Vec::new(),
            index: HashMap::new(),
        }))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.index.contains_key(name)
    }

    pub(crate) fn same(&self, other: &StateSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl PartialEq for StateSet {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for StateSet {}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.names.iter()).finish()
    }
}

/// A non-deterministic transition `S ⇝ T`: a binary relation between two
/// finite state sets, stored as one sorted image row per source state.
#[derive(Clone, PartialEq, Eq)]
pub struct Transition {
    source: StateSet,
    target: StateSet,
    rows: Vec<Vec<usize>>,
}

impl Transition {
    pub fn empty(source: StateSet, target: StateSet) -> Self {
        let rows = vec![Vec::new(); source.len()];
        Self {
            source,
            target,
            rows,
        }
    }

    /// Builds from index pairs. Indices must be in range.
    pub fn from_pairs(
        source: StateSet,
        target: StateSet,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut t = Self::empty(source, target);
        for (a, b) in pairs {
            assert!(
                a < t.source.len() && b < t.target.len(),
                "pair out of range"
            );
            t.rows[a].push(b);
        }
        for row in &mut t.rows {
            row.sort_unstable();
            row.dedup();
        }
        t
    }

    pub fn from_named_pairs<S: AsRef<str>>(
        source: StateSet,
        target: StateSet,
        pairs: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self, DynamicsError> {
        let mut idx = Vec::new();
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ai = source
                .index_of(a)
                .ok_or_else(|| DynamicsError::UnknownState(a.to_owned()))?;
            let bi = target
                .index_of(b)
                .ok_or_else(|| DynamicsError::UnknownState(b.to_owned()))?;
            idx.push((ai, bi));
        }
        Ok(Self::from_pairs(source, target, idx))
    }

    pub fn diagonal(set: StateSet) -> Self {
        let n = set.len();
        Self::from_pairs(set.clone(), set, (0..n).map(|i| (i, i)))
    }

    pub fn source(&self) -> &StateSet {
        &self.source
    }

    pub fn target(&self) -> &StateSet {
        &self.target
    }

    /// `u(a)`, sorted in target order.
    pub fn image(&self, a: usize) -> &[usize] {
        &self.rows[a]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].binary_search(&b).is_ok()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&b| (a, b)))
    }

    pub fn named_pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.pairs()
            .map(|(a, b)| (self.source.name(a), self.target.name(b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub(crate) fn insert(&mut self, a: usize, b: usize) -> bool {
        match self.rows[a].binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                self.rows[a].insert(pos, b);
                true
            }
        }
    }

    pub(crate) fn remove(&mut self, a: usize, b: usize) -> bool {
        match self.rows[a].binary_search(&b) {
            Ok(pos) => {
                self.rows[a].remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    fn same_endpoints(&self, other: &Transition) -> Result<(), DynamicsError> {
        if self.source.same(&other.source) && self.target.same(&other.target) {
            Ok(())
        } else {
            Err(DynamicsError::EndpointMismatch)
        }
    }

    /// `self ⊂ other` as pair sets.
    pub fn is_subset(&self, other: &Transition) -> Result<bool, DynamicsError> {
        self.same_endpoints(other)?;
        Ok(self
            .rows
            .iter()
            .zip(&other.rows)
            .all(|(r, s)| r.iter().all(|b| s.binary_search(b).is_ok())))
    }

    pub fn union(&self, other: &Transition) -> Result<Transition, DynamicsError> {
        self.same_endpoints(other)?;
        let mut out = self.clone();
        for (a, b) in other.pairs() {
            out.insert(a, b);
        }
        Ok(out)
    }

    pub fn intersection(&self, other: &Transition) -> Result<Transition, DynamicsError> {
        self.same_endpoints(other)?;
        let pairs: Vec<_> = self
            .pairs()
            .filter(|&(a, b)| other.contains(a, b))
            .collect();
        Ok(Transition::from_pairs(
            self.source.clone(),
            self.target.clone(),
            pairs,
        ))
    }

    /// `next ⊙ self`: first `self`, then `next`.
    pub fn then(&self, next: &Transition) -> Result<Transition, DynamicsError> {
        compose_transitions(self, next)
    }

    /// Every image is exactly a singleton.
    pub fn is_total_single_valued(&self) -> bool {
        self.rows.iter().all(|r| r.len() == 1)
    }

    /// Every image has at most one element.
    pub fn is_partial_single_valued(&self) -> bool {
        self.rows.iter().all(|r| r.len() <= 1)
    }
}

/// Relational composition `v ⊙ u`: `(a, c)` is in the result iff some `b`
/// has `(a, b) ∈ u` and `(b, c) ∈ v`.
pub fn compose_transitions(u: &Transition, v: &Transition) -> Result<Transition, DynamicsError> {
    if !u.target.same(&v.source) {
        return Err(DynamicsError::EndpointMismatch);
    }
    let mut out = Transition::empty(u.source.clone(), v.target.clone());
    for (a, row) in u.rows.iter().enumerate() {
        let mut image: Vec<usize> = row
            .iter()
            .flat_map(|&b| v.rows[b].iter().copied())
            .collect();
        image.sort_unstable();
        image.dedup();
        out.rows[a] = image;
    }
    Ok(out)
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.named_pairs()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(names: &[&str]) -> StateSet {
        StateSet::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn composes_functions() {
        let (s1, s2, s3) = (set(&["a1"]), set(&["a2"]), set(&["a3"]));
        let u = Transition::from_named_pairs(s1, s2.clone(), [("a1", "a2")]).unwrap();
        let v = Transition::from_named_pairs(s2, s3, [("a2", "a3")]).unwrap();
        let vu = compose_transitions(&u, &v).unwrap();
        assert_eq!(vu.named_pairs().collect::<Vec<_>>(), vec![("a1", "a3")]);
    }

    #[test]
    fn composes_the_union_branches() {
        let s1 = set(&["a1"]);
        let s2 = set(&["a2", "a2'"]);
        let s3 = set(&["a3", "a3'"]);
        let u =
            Transition::from_named_pairs(s1, s2.clone(), [("a1", "a2"), ("a1", "a2'")]).unwrap();
        let v = Transition::from_named_pairs(s2, s3, [("a2", "a3"), ("a2", "a3'"), ("a2'", "a3")])
            .unwrap();
        let vu = u.then(&v).unwrap();
        assert_eq!(
            vu.named_pairs().collect::<Vec<_>>(),
            vec![("a1", "a3"), ("a1", "a3'")]
        );
    }

    #[test]
    fn empty_absorbs_and_mismatch_errors() {
        let s1 = set(&["a1"]);
        let s2 = set(&["a2"]);
        let u = Transition::empty(s1.clone(), s2.clone());
        let v = Transition::from_named_pairs(s2.clone(), s1.clone(), [("a2", "a1")]).unwrap();
        assert!(u.then(&v).unwrap().is_empty());
        assert_eq!(u.then(&u), Err(DynamicsError::EndpointMismatch));
        assert!(StateSet::new(["x", "x"]).is_err());
    }

    fn arb_rel(n: usize, m: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
        proptest::collection::vec((0..n, 0..m), 0..10)
    }

    proptest! {
        #[test]
        fn composition_is_associative_and_monotone(
            p in arb_rel(3, 3), q in arb_rel(3, 3), r in arb_rel(3, 3), extra in arb_rel(3, 3)
        ) {
            let s = set(&["x", "y", "z"]);
            let u = Transition::from_pairs(s.clone(), s.clone(), p);
            let v = Transition::from_pairs(s.clone(), s.clone(), q);
            let w = Transition::from_pairs(s.clone(), s.clone(), r);
            let left = u.then(&v).unwrap().then(&w).unwrap();
            let right = u.then(&v.then(&w).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);

            let bigger = u.union(&Transition::from_pairs(s.clone(), s.clone(), extra)).unwrap();
            prop_assert!(u.then(&v).unwrap().is_subset(&bigger.then(&v).unwrap()).unwrap());
            prop_assert!(v.then(&u).unwrap().is_subset(&v.then(&bigger).unwrap()).unwrap());
        }
    }
}
