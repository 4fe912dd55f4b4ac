//! Relational dynamics over a motor.
//!
//! A [`Dynamics`] assigns a finite state set to every object of its motor and
//! a [`Transition`] to every arrow. Nothing beyond well-formedness is enforced
//! on construction: sub-categoricity, properness and the other properties are
//! decided by the checkers in [`checks`], so graph-level dynamics (the result
//! of forgetting composition) are representable too.

use std::sync::Arc;

use thiserror::Error;

use crate::category::Category;

mod checks;
mod lattice;
mod transition;

pub use checks::{
    check_categorical, check_deterministic, check_proper, check_quasi_deterministic,
    check_subcategorical, clean, out_of_play_states, Checks, PropertyReport, Violation,
    ViolationKind, DEFAULT_MAX_VIOLATIONS,
};
pub use lattice::{intersect_dynamics, is_subdynamics, largest_subcategorical, union_dynamics};
pub use transition::{compose_transitions, StateSet, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("transition endpoints do not match")]
    EndpointMismatch,
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("state `{0}` belongs to the state sets of two objects")]
    OverlappingStateSets(String),
    #[error("pair ({from}, {to}) of arrow `{arrow}` does not match the arrow's endpoints")]
    StateTypeMismatch {
        arrow: String,
        from: String,
        to: String,
    },
    #[error("dynamics have different motors")]
    MotorMismatch,
    #[error("an empty list of dynamics has no intersection")]
    EmptyList,
    #[error("dynamics is not sub-categorical")]
    NotSubcategorical,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// A dynamics: state sets per object and a transition per arrow.
#[derive(Clone, Debug, PartialEq)]
pub struct Dynamics {
    motor: Arc<Category>,
    states: Vec<StateSet>,
    transitions: Vec<Transition>,
    all: StateSet,
    offsets: Vec<usize>,
}

impl Dynamics {
    /// Checks shapes, endpoints and disjointness of the state sets.
    pub fn new(
        motor: Arc<Category>,
        states: Vec<StateSet>,
        transitions: Vec<Transition>,
    ) -> Result<Self, DynamicsError> {
        if states.len() != motor.num_objects() {
            return Err(DynamicsError::Shape(format!(
                "{} state sets for {} objects",
                states.len(),
                motor.num_objects()
            )));
        }
        if transitions.len() != motor.num_arrows() {
            return Err(DynamicsError::Shape(format!(
                "{} transitions for {} arrows",
                transitions.len(),
                motor.num_arrows()
            )));
        }
        for (a, t) in transitions.iter().enumerate() {
            let arrow = motor.arrow(a);
            if !t.source().same(&states[arrow.dom]) || !t.target().same(&states[arrow.cod]) {
                return Err(DynamicsError::Shape(format!(
                    "transition of `{}` is not typed by its endpoints",
                    arrow.name
                )));
            }
        }
        let mut offsets = Vec::with_capacity(states.len());
        let mut names = Vec::new();
        for s in &states {
            offsets.push(names.len());
            names.extend(s.names().iter().cloned());
        }
        let all = StateSet::new(names).map_err(|e| match e {
            DynamicsError::DuplicateState(n) => DynamicsError::OverlappingStateSets(n),
            other => other,
        })?;
        Ok(Self {
            motor,
            states,
            transitions,
            all,
            offsets,
        })
    }

    /// The dynamics with no states.
    pub fn empty(motor: Arc<Category>) -> Self {
        let states = vec![StateSet::empty(); motor.num_objects()];
        let transitions = (0..motor.num_arrows())
            .map(|_| Transition::empty(StateSet::empty(), StateSet::empty()))
            .collect();
        Self::new(motor, states, transitions).expect("empty dynamics is well formed")
    }

    pub fn motor(&self) -> &Arc<Category> {
        &self.motor
    }

    pub fn states(&self, object: usize) -> &StateSet {
        &self.states[object]
    }

    pub fn state_sets(&self) -> &[StateSet] {
        &self.states
    }

    pub fn transition(&self, arrow: usize) -> &Transition {
        &self.transitions[arrow]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// `st(α)` in document order: objects first, then their states.
    pub fn all_states(&self) -> &StateSet {
        &self.all
    }

    pub fn state_count(&self) -> usize {
        self.all.len()
    }

    pub fn global(&self, object: usize, local: usize) -> usize {
        self.offsets[object] + local
    }

    /// `(typ(s), local index)` of a global state index.
    pub fn locate(&self, global: usize) -> (usize, usize) {
        let object = self.offsets.partition_point(|&o| o <= global) - 1;
        // Skip empty state sets sharing the same offset.
        let object = (0..=object)
            .rev()
            .find(|&o| global - self.offsets[o] < self.states[o].len())
            .expect("global index in range");
        (object, global - self.offsets[object])
    }

    pub fn typ(&self, global: usize) -> usize {
        self.locate(global).0
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.all.index_of(name)
    }

    pub fn state_name(&self, global: usize) -> &str {
        self.all.name(global)
    }

    /// `f^α(s)` for a global state `s` of type `dom(f)`, as global indices.
    pub fn image(&self, arrow: usize, global: usize) -> impl Iterator<Item = usize> + '_ {
        let a = self.motor.arrow(arrow);
        let (object, local) = self.locate(global);
        let row: &[usize] = if object == a.dom {
            self.transitions[arrow].image(local)
        } else {
            &[]
        };
        let offset = self.offsets[a.cod];
        row.iter().map(move |&b| offset + b)
    }

    /// Same states, new transitions.
    pub fn with_transitions(&self, transitions: Vec<Transition>) -> Result<Self, DynamicsError> {
        Self::new(self.motor.clone(), self.states.clone(), transitions)
    }

    /// Restriction to the global states for which `keep` is true.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Dynamics {
        let mut local_maps = Vec::with_capacity(self.states.len());
        let mut states = Vec::with_capacity(self.states.len());
        for (o, set) in self.states.iter().enumerate() {
            let mut map = vec![None; set.len()];
            let mut names = Vec::new();
            for (i, slot) in map.iter_mut().enumerate() {
                if keep(self.offsets[o] + i) {
                    *slot = Some(names.len());
                    names.push(set.name(i).to_owned());
                }
            }
            local_maps.push(map);
            states.push(StateSet::new(names).expect("subset of distinct names"));
        }
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .map(|(a, t)| {
                let arrow = self.motor.arrow(a);
                let (dm, cm) = (&local_maps[arrow.dom], &local_maps[arrow.cod]);
                Transition::from_pairs(
                    states[arrow.dom].clone(),
                    states[arrow.cod].clone(),
                    t.pairs().filter_map(|(x, y)| Some((dm[x]?, cm[y]?))),
                )
            })
            .collect();
        Dynamics::new(self.motor.clone(), states, transitions).expect("restriction is well formed")
    }
}

/// Name-based construction of a [`Dynamics`]. Arrows without pairs get the
/// empty relation.
#[derive(Clone, Debug)]
pub struct DynamicsBuilder {
    motor: Arc<Category>,
    states: Vec<Vec<String>>,
    pairs: Vec<(String, String, String)>,
    error: Option<DynamicsError>,
}

impl DynamicsBuilder {
    pub fn new(motor: Arc<Category>) -> Self {
        let n = motor.num_objects();
        Self {
            motor,
            states: vec![Vec::new(); n],
            pairs: Vec::new(),
            error: None,
        }
    }

    /// Appends states to the state set of `object`. Unknown objects are
    /// reported by [`build`](Self::build).
    pub fn states<S: AsRef<str>>(mut self, object: &str, names: &[S]) -> Self {
        match self.motor.object_index(object) {
            Some(o) => self.states[o].extend(names.iter().map(|n| n.as_ref().to_owned())),
            None => {
                self.error
                    .get_or_insert(DynamicsError::UnknownObject(object.to_owned()));
            }
        }
        self
    }

    pub fn pair(mut self, arrow: &str, from: &str, to: &str) -> Self {
        self.pairs
            .push((arrow.to_owned(), from.to_owned(), to.to_owned()));
        self
    }

    pub fn pairs<S: AsRef<str>>(mut self, arrow: &str, pairs: &[(S, S)]) -> Self {
        for (a, b) in pairs {
            self = self.pair(arrow, a.as_ref(), b.as_ref());
        }
        self
    }

    /// Adds the full diagonal to every identity arrow.
    pub fn diagonal_identities(mut self) -> Self {
        for o in 0..self.motor.num_objects() {
            let id = self.motor.arrow_name(self.motor.identity(o)).to_owned();
            let states = self.states[o].clone();
            for s in states {
                self.pairs.push((id.clone(), s.clone(), s));
            }
        }
        self
    }

    pub fn build(self) -> Result<Dynamics, DynamicsError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let states = self
            .states
            .into_iter()
            .map(StateSet::new)
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.motor.num_arrows()];
        for (arrow, from, to) in &self.pairs {
            let a = self
                .motor
                .arrow_index(arrow)
                .ok_or_else(|| DynamicsError::UnknownArrow(arrow.clone()))?;
            let rec = self.motor.arrow(a);
            let mismatch = || DynamicsError::StateTypeMismatch {
                arrow: arrow.clone(),
                from: from.clone(),
                to: to.clone(),
            };
            let known = |s: &str| states.iter().any(|set| set.contains(s));
            let x = match states[rec.dom].index_of(from) {
                Some(x) => x,
                None if known(from) => return Err(mismatch()),
                None => return Err(DynamicsError::UnknownState(from.clone())),
            };
            let y = match states[rec.cod].index_of(to) {
                Some(y) => y,
                None if known(to) => return Err(mismatch()),
                None => return Err(DynamicsError::UnknownState(to.clone())),
            };
            rows[a].push((x, y));
        }
        let transitions = rows
            .into_iter()
            .enumerate()
            .map(|(a, pairs)| {
                let rec = self.motor.arrow(a);
                Transition::from_pairs(states[rec.dom].clone(), states[rec.cod].clone(), pairs)
            })
            .collect();
        Dynamics::new(self.motor, states, transitions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn global_indexing_round_trips() {
        let d = fixtures::alpha1();
        assert_eq!(d.state_count(), 5);
        for g in 0..d.state_count() {
            let (o, l) = d.locate(g);
            assert_eq!(d.global(o, l), g);
            assert_eq!(d.states(o).name(l), d.state_name(g));
        }
        let a2p = d.find("a2'").unwrap();
        assert_eq!(d.motor().object_name(d.typ(a2p)), "2");
    }

    #[test]
    fn empty_state_sets_do_not_confuse_locate() {
        let d = DynamicsBuilder::new(fixtures::cat3())
            .states("1", &["x"])
            .states("3", &["z"])
            .build()
            .unwrap();
        assert_eq!(d.locate(1), (2, 0));
        assert_eq!(d.locate(0), (0, 0));
    }

    #[test]
    fn builder_rejects_malformed_input() {
        let motor = fixtures::cat3();
        let overlap = DynamicsBuilder::new(motor.clone())
            .states("1", &["x"])
            .states("2", &["x"])
            .build();
        assert_eq!(
            overlap,
            Err(DynamicsError::OverlappingStateSets("x".into()))
        );
        let typed = DynamicsBuilder::new(motor.clone())
            .states("1", &["x"])
            .states("2", &["y"])
            .pair("u", "y", "x")
            .build();
        assert!(matches!(
            typed,
            Err(DynamicsError::StateTypeMismatch { .. })
        ));
        let unknown = DynamicsBuilder::new(motor.clone())
            .pair("zz", "a", "b")
            .build();
        assert_eq!(unknown, Err(DynamicsError::UnknownArrow("zz".into())));
        let unknown = DynamicsBuilder::new(motor).states("9", &["a"]).build();
        assert_eq!(unknown, Err(DynamicsError::UnknownObject("9".into())));
    }

    #[test]
    fn restriction_drops_pairs() {
        let d = fixtures::alpha1();
        let a2 = d.find("a2").unwrap();
        let r = d.restrict(|g| g != a2);
        assert_eq!(r.state_count(), 4);
        let u = r.motor().arrow_index("u").unwrap();
        assert!(r.transition(u).is_empty());
    }
}
