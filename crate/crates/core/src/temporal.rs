//! Clocks, the succession preorder on instants, and realizations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::category::Category;
use crate::dynamics::{check_deterministic, check_subcategorical, Dynamics, DynamicsError};
use crate::open::OpenDynamics;

pub const DEFAULT_MAX_INSTANTS: usize = 12;
pub const DEFAULT_MAX_PRODUCT_STATES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("clock is not deterministic: {0}")]
    ClockNotDeterministic(String),
    #[error("clock is not sub-categorical: {0}")]
    ClockNotSubcategorical(String),
    #[error("clock and dynamics have different motors")]
    MotorMismatch,
    #[error("size guard exceeded: {what} is {size}, limit {limit}")]
    SizeGuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown instant `{0}`")]
    UnknownInstant(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("instant `{later}` does not succeed `{earlier}`")]
    SuccessionViolation { earlier: String, later: String },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Bounds on enumeration and product sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_instants: usize,
    pub max_product_states: usize,
}

impl Default for SizeGuard {
    fn default() -> Self {
        Self {
            max_instants: DEFAULT_MAX_INSTANTS,
            max_product_states: DEFAULT_MAX_PRODUCT_STATES,
        }
    }
}

impl SizeGuard {
    pub fn unlimited() -> Self {
        Self {
            max_instants: usize::MAX,
            max_product_states: usize::MAX,
        }
    }

    pub(crate) fn instants(&self, n: usize) -> Result<(), TemporalError> {
        if n > self.max_instants {
            Err(TemporalError::SizeGuardExceeded {
                what: "instant count",
                size: n,
                limit: self.max_instants,
            })
        } else {
            Ok(())
        }
    }
}

/// A deterministic sub-categorical dynamics; its states are instants.
#[derive(Clone, Debug, PartialEq)]
pub struct Clock {
    base: Dynamics,
    // next[arrow][global instant], defined for instants of type dom(arrow)
    next: Vec<Vec<Option<usize>>>,
}

impl Clock {
    pub fn new(base: Dynamics) -> Result<Self, TemporalError> {
        let det = check_deterministic(&base);
        if !det.holds {
            return Err(TemporalError::ClockNotDeterministic(
                det.violations[0].to_string(),
            ));
        }
        let sub = check_subcategorical(&base);
        if !sub.holds {
            return Err(TemporalError::ClockNotSubcategorical(
                sub.violations[0].to_string(),
            ));
        }
        let motor = base.motor().clone();
        let next = (0..motor.num_arrows())
            .map(|f| {
                (0..base.state_count())
                    .map(|t| base.image(f, t).next())
                    .collect()
            })
            .collect();
        Ok(Self { base, next })
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.base
    }

    pub fn motor(&self) -> &Arc<Category> {
        self.base.motor()
    }

    pub fn instant_count(&self) -> usize {
        self.base.state_count()
    }

    pub fn instant_name(&self, t: usize) -> &str {
        self.base.state_name(t)
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.base.find(name)
    }

    pub fn typ(&self, t: usize) -> usize {
        self.base.typ(t)
    }

    /// `f^h(t)`, or `None` when `t` is not of type `dom(f)`.
    pub fn step(&self, arrow: usize, t: usize) -> Option<usize> {
        self.next[arrow][t]
    }

    /// Every `(f, t, f^h(t))` with `t` of type `dom(f)`.
    pub(crate) fn steps(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.next.iter().enumerate().flat_map(|(f, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(t, n)| n.map(|n| (f, t, n)))
        })
    }
}

/// The relation `s ≤ t ⟺ ∃e, e^h(s) = t` on instants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Succession {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl Succession {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.leq[s][t]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .filter(|&(s, t)| self.leq[s][t])
            .collect()
    }

    pub fn named_pairs(&self) -> Vec<(&str, &str)> {
        self.pairs()
            .into_iter()
            .map(|(s, t)| (self.names[s].as_str(), self.names[t].as_str()))
            .collect()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|t| self.leq[t][t])
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.leq[a][b] || (0..n).all(|c| !self.leq[b][c] || self.leq[a][c]))
        })
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (0..n).all(|b| a == b || !(self.leq[a][b] && self.leq[b][a])))
    }
}

pub fn succession(h: &Clock) -> Succession {
    let n = h.instant_count();
    let mut leq = vec![vec![false; n]; n];
    for (_, s, t) in h.steps() {
        leq[s][t] = true;
    }
    Succession {
        names: h.dynamics().all_states().names().to_vec(),
        leq,
    }
}

/// A realization: an optional parameter and a partial map from instants to
/// states.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Realization {
    pub parameter: Option<String>,
    pub assignment: BTreeMap<String, String>,
}

impl Realization {
    pub fn empty(parameter: Option<String>) -> Self {
        Self {
            parameter,
            assignment: BTreeMap::new(),
        }
    }

    /// `df(𝔞)`.
    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(String::as_str)
    }

    pub fn get(&self, instant: &str) -> Option<&str> {
        self.assignment.get(instant).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// The external part: the assignment without its parameter.
    pub fn external(&self) -> Realization {
        Realization::empty(None).with(self.assignment.clone())
    }

    fn with(mut self, assignment: BTreeMap<String, String>) -> Self {
        self.assignment = assignment;
        self
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.parameter {
            write!(f, "{p}: ")?;
        }
        write!(f, "{{")?;
        for (i, (t, s)) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}↦{s}")?;
        }
        write!(f, "}}")
    }
}

/// Realization over indices: `states[t]` is the global state at instant `t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Assignment(pub Vec<Option<usize>>);

/// Step condition: for every `(f, t, t')`, if `t'` is assigned then so is
/// `t`, and `𝔞(t') ∈ f^α(𝔞(t))`. Identities force assigned states to be in
/// play.
fn step_ok(d: &Dynamics, f: usize, a: Option<usize>, b: Option<usize>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => d.image(f, a).any(|x| x == b),
    }
}

pub(crate) fn satisfies(h: &Clock, d: &Dynamics, s: &[Option<usize>]) -> bool {
    h.steps().all(|(f, t, n)| step_ok(d, f, s[t], s[n]))
}

/// Backtracking over instants in an order compatible with succession. Each
/// constraint is checked as soon as both of its instants are decided, so the
/// result does not depend on the order.
pub(crate) fn search(h: &Clock, d: &Dynamics, candidates: &[Vec<usize>]) -> Vec<Assignment> {
    let n = h.instant_count();
    let succ = succession(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&t| (0..n).filter(|&s| succ.leq(s, t)).count());
    let mut position = vec![0; n];
    for (i, &t) in order.iter().enumerate() {
        position[t] = i;
    }
    // constraints to check once instant order[i] is decided
    let mut due: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for (f, t, u) in h.steps() {
        due[position[t].max(position[u])].push((f, t, u));
    }

    let mut out = Vec::new();
    let mut current = vec![None; n];
    fn go(
        i: usize,
        order: &[usize],
        due: &[Vec<(usize, usize, usize)>],
        candidates: &[Vec<usize>],
        d: &Dynamics,
        current: &mut Vec<Option<usize>>,
        out: &mut Vec<Assignment>,
    ) {
        if i == order.len() {
            out.push(Assignment(current.clone()));
            return;
        }
        let t = order[i];
        let options = std::iter::once(None).chain(candidates[t].iter().copied().map(Some));
        for choice in options {
            current[t] = choice;
            if due[i]
                .iter()
                .all(|&(f, a, b)| step_ok(d, f, current[a], current[b]))
            {
                go(i + 1, order, due, candidates, d, current, out);
            }
        }
        current[t] = None;
    }
    go(0, &order, &due, candidates, d, &mut current, &mut out);
    out
}

fn same_motor(h: &Clock, d: &Dynamics) -> Result<(), TemporalError> {
    if Arc::ptr_eq(h.motor(), d.motor()) || **h.motor() == **d.motor() {
        Ok(())
    } else {
        Err(TemporalError::MotorMismatch)
    }
}

fn to_realization(
    h: &Clock,
    d: &Dynamics,
    parameter: Option<String>,
    a: &Assignment,
) -> Realization {
    let assignment = a
        .0
        .iter()
        .enumerate()
        .filter_map(|(t, s)| s.map(|s| (h.instant_name(t).to_owned(), d.state_name(s).to_owned())))
        .collect();
    Realization::empty(parameter).with(assignment)
}

/// All h-realizations of `d`, in canonical order. Includes the empty one.
pub fn enumerate_h_realizations(
    h: &Clock,
    d: &Dynamics,
    guard: &SizeGuard,
) -> Result<Vec<Realization>, TemporalError> {
    same_motor(h, d)?;
    guard.instants(h.instant_count())?;
    let candidates: Vec<Vec<usize>> = (0..h.instant_count())
        .map(|t| {
            let o = h.typ(t);
            (0..d.states(o).len()).map(|l| d.global(o, l)).collect()
        })
        .collect();
    let mut out: Vec<Realization> = search(h, d, &candidates)
        .iter()
        .map(|a| to_realization(h, d, None, a))
        .collect();
    out.sort();
    Ok(out)
}

/// Realizations of an open dynamics: all of them, and their deduplicated
/// external parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizationSet {
    pub all: Vec<Realization>,
    pub external_parts: Vec<Realization>,
}

/// Realizations of one parameter slice, as index assignments in canonical
/// order.
pub(crate) fn slice_realizations(a: &OpenDynamics, param: usize) -> Vec<Assignment> {
    let h = a.clock();
    let candidates: Vec<Vec<usize>> = (0..h.instant_count())
        .map(|t| a.states_at(t).to_vec())
        .collect();
    let mut found = search(h, a.slice(param), &candidates);
    found.sort_by_cached_key(|x| to_realization(h, a.slice(param), None, x));
    found
}

pub fn enumerate_realizations(
    a: &OpenDynamics,
    guard: &SizeGuard,
) -> Result<RealizationSet, TemporalError> {
    guard.instants(a.clock().instant_count())?;
    let mut all = Vec::new();
    for p in 0..a.parameters().len() {
        let slice = a.slice(p);
        all.extend(
            slice_realizations(a, p)
                .iter()
                .map(|x| to_realization(a.clock(), slice, Some(a.parameters()[p].clone()), x)),
        );
    }
    let mut external_parts: Vec<Realization> = all.iter().map(Realization::external).collect();
    external_parts.sort();
    external_parts.dedup();
    Ok(RealizationSet {
        all,
        external_parts,
    })
}

/// Resolves a named realization against an open dynamics.
pub(crate) fn resolve(
    a: &OpenDynamics,
    r: &Realization,
) -> Result<(Option<usize>, Assignment), TemporalError> {
    let param = match &r.parameter {
        Some(p) => Some(
            a.parameter_index(p)
                .ok_or_else(|| TemporalError::UnknownParameter(p.clone()))?,
        ),
        None => None,
    };
    let h = a.clock();
    let mut states = vec![None; h.instant_count()];
    for (t, s) in &r.assignment {
        let ti = h
            .find(t)
            .ok_or_else(|| TemporalError::UnknownInstant(t.clone()))?;
        let si = a
            .find(s)
            .ok_or_else(|| TemporalError::UnknownState(s.clone()))?;
        states[ti] = Some(si);
    }
    Ok((param, Assignment(states)))
}

/// Whether `states` is a realization of slice `param`: datation and step
/// conditions.
pub(crate) fn is_slice_realization(
    a: &OpenDynamics,
    param: usize,
    states: &[Option<usize>],
) -> bool {
    states
        .iter()
        .enumerate()
        .all(|(t, s)| s.is_none_or(|s| a.datation(s) == t))
        && satisfies(a.clock(), a.slice(param), states)
}

/// `(λ, 𝔞) ∈ S_A`. A realization without parameter is checked against
/// every parameter.
pub fn is_realization(a: &OpenDynamics, r: &Realization) -> Result<bool, TemporalError> {
    let (param, states) = resolve(a, r)?;
    Ok(match param {
        Some(p) => is_slice_realization(a, p, &states.0),
        None => (0..a.parameters().len()).any(|p| is_slice_realization(a, p, &states.0)),
    })
}

/// `𝔞 ▷ a ⟺ 𝔞(τ(a)) = a`.
pub fn passes_through(
    r: &Realization,
    state: &str,
    a: &OpenDynamics,
) -> Result<bool, TemporalError> {
    let s = a
        .find(state)
        .ok_or_else(|| TemporalError::UnknownState(state.to_owned()))?;
    let t = a.clock().instant_name(a.datation(s));
    Ok(r.get(t) == Some(state))
}

/// `𝔞` passes through `first`, then through `second`.
pub fn passes_then(
    r: &Realization,
    first: &str,
    second: &str,
    a: &OpenDynamics,
) -> Result<bool, TemporalError> {
    let x = a
        .find(first)
        .ok_or_else(|| TemporalError::UnknownState(first.to_owned()))?;
    let y = a
        .find(second)
        .ok_or_else(|| TemporalError::UnknownState(second.to_owned()))?;
    let (tx, ty) = (a.datation(x), a.datation(y));
    if !succession(a.clock()).leq(tx, ty) {
        return Err(TemporalError::SuccessionViolation {
            earlier: a.clock().instant_name(tx).to_owned(),
            later: a.clock().instant_name(ty).to_owned(),
        });
    }
    Ok(passes_through(r, first, a)? && passes_through(r, second, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::union_dynamics;
    use crate::fixtures::{
        alpha1, alpha1_open, alpha2, cat3, cat3_clock, terminal, two_branch_open,
    };

    fn chains(rs: &[Realization], len: usize) -> Vec<Vec<&str>> {
        rs.iter()
            .filter(|r| r.assignment.len() == len)
            .map(|r| r.assignment.values().map(String::as_str).collect())
            .collect()
    }

    #[test]
    fn succession_of_cat3_clock_is_a_chain() {
        let s = succession(&cat3_clock());
        assert_eq!(
            s.named_pairs(),
            [
                ("t1", "t1"),
                ("t1", "t2"),
                ("t1", "t3"),
                ("t2", "t2"),
                ("t2", "t3"),
                ("t3", "t3")
            ]
        );
        assert!(s.is_reflexive() && s.is_transitive() && s.is_antisymmetric());
    }

    #[test]
    fn terminal_clock() {
        let motor = terminal();
        let d = crate::dynamics::DynamicsBuilder::new(motor)
            .states("*", &["t"])
            .diagonal_identities()
            .build()
            .unwrap();
        let h = Clock::new(d).unwrap();
        assert_eq!(succession(&h).named_pairs(), [("t", "t")]);
    }

    #[test]
    fn clock_must_be_deterministic() {
        assert!(matches!(
            Clock::new(alpha1()),
            Err(TemporalError::ClockNotDeterministic(_))
        ));
    }

    #[test]
    fn h_realizations_of_alpha1() {
        let rs = enumerate_h_realizations(&cat3_clock(), &alpha1(), &SizeGuard::default()).unwrap();
        assert!(rs[0].is_empty());
        assert_eq!(chains(&rs, 3), [["a1", "a2", "a3"]]);
    }

    #[test]
    fn h_realizations_of_the_union() {
        let u = union_dynamics(&cat3(), &[alpha1(), alpha2()]).unwrap();
        let rs = enumerate_h_realizations(&cat3_clock(), &u, &SizeGuard::default()).unwrap();
        assert_eq!(chains(&rs, 3), [["a1", "a2", "a3"], ["a1", "a2'", "a3"]]);
    }

    #[test]
    fn clock_realizes_itself_on_past_closed_sets() {
        let h = cat3_clock();
        let rs = enumerate_h_realizations(&h, h.dynamics(), &SizeGuard::default()).unwrap();
        let domains: Vec<Vec<&str>> = rs.iter().map(|r| r.domain().collect()).collect();
        assert_eq!(
            domains,
            [vec![], vec!["t1"], vec!["t1", "t2"], vec!["t1", "t2", "t3"]]
        );
        for r in &rs {
            assert!(r.assignment.iter().all(|(t, s)| t == s));
        }
    }

    #[test]
    fn size_guard() {
        let guard = SizeGuard {
            max_instants: 2,
            ..SizeGuard::default()
        };
        assert!(matches!(
            enumerate_h_realizations(&cat3_clock(), &alpha1(), &guard),
            Err(TemporalError::SizeGuardExceeded { size: 3, .. })
        ));
    }

    #[test]
    fn open_realizations_share_the_empty_one() {
        let a = two_branch_open();
        let set = enumerate_realizations(&a, &SizeGuard::default()).unwrap();
        assert_eq!(set.all.iter().filter(|r| r.is_empty()).count(), 2);
        assert_eq!(
            set.external_parts.iter().filter(|r| r.is_empty()).count(),
            1
        );
        assert_eq!(
            chains(&set.external_parts, 3),
            [["a1", "a2", "a3"], ["a1", "a2'", "a3"]]
        );
        assert_eq!(set.external_parts.len(), 6);
        for r in &set.all {
            assert!(is_realization(&a, r).unwrap());
        }
    }

    #[test]
    fn passing_through() {
        let a = alpha1_open();
        let set = enumerate_realizations(&a, &SizeGuard::default()).unwrap();
        let chain = set.all.iter().find(|r| r.assignment.len() == 3).unwrap();
        assert!(passes_through(chain, "a2", &a).unwrap());
        assert!(!passes_through(chain, "a2'", &a).unwrap());
        assert!(!passes_through(&set.all[0], "a1", &a).unwrap());
        assert!(passes_then(chain, "a1", "a3", &a).unwrap());
        assert!(matches!(
            passes_then(chain, "a3", "a1", &a),
            Err(TemporalError::SuccessionViolation { .. })
        ));
    }
}
