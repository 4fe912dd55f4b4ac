//! Interactions and dynamic families.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{validate_functor, Functor, FunctorError, RawFunctor};
use crate::open::OpenDynamics;
use crate::temporal::{
    enumerate_realizations, is_slice_realization, resolve, Realization, SizeGuard, TemporalError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("an interaction needs at least one tuple")]
    EmptyInteraction,
    #[error("tuple {tuple}: component `{component}` is not a realization of its parameter")]
    CoherenceViolation { component: String, tuple: usize },
    #[error("tuple {tuple}: {reason}")]
    UnknownRealizationReference { tuple: usize, reason: String },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("synchronization of `{0}` is not a total map on instants")]
    SynchronizationNotDeterministic(String),
    #[error("synchronization of `{component}` does not commute with `{arrow}` at `{instant}`")]
    SynchronizationNotCommuting {
        component: String,
        arrow: String,
        instant: String,
    },
    #[error("synchronization of `{component}`: {source}")]
    Functor {
        component: String,
        source: FunctorError,
    },
    #[error("unknown instant `{0}`")]
    UnknownInstant(String),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
}

/// A resolved tuple entry: parameter and instant ↦ state assignment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Part {
    pub param: usize,
    pub states: Vec<Option<usize>>,
}

/// A non-empty coherent set of `I`-indexed (realization, parameter) tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interaction {
    index: Vec<String>,
    tuples: Vec<Vec<Realization>>,
    parts: Vec<Vec<Part>>,
}

pub fn build_interaction(
    index: &[String],
    components: &[Arc<OpenDynamics>],
    raw: Vec<Vec<Realization>>,
) -> Result<Interaction, FamilyError> {
    if index.len() != components.len() {
        return Err(FamilyError::IndexMismatch(format!(
            "{} indices for {} components",
            index.len(),
            components.len()
        )));
    }
    if raw.is_empty() {
        return Err(FamilyError::EmptyInteraction);
    }
    let mut resolved: Vec<(Vec<Part>, Vec<Realization>)> = Vec::with_capacity(raw.len());
    for (k, tuple) in raw.into_iter().enumerate() {
        if tuple.len() != index.len() {
            return Err(FamilyError::UnknownRealizationReference {
                tuple: k,
                reason: format!("{} entries for {} components", tuple.len(), index.len()),
            });
        }
        let mut parts = Vec::with_capacity(tuple.len());
        for (i, r) in tuple.iter().enumerate() {
            let a = &components[i];
            let reference =
                |reason: String| FamilyError::UnknownRealizationReference { tuple: k, reason };
            let (param, states) =
                resolve(a, r).map_err(|e| reference(format!("{}: {e}", index[i])))?;
            let param =
                param.ok_or_else(|| reference(format!("{}: missing parameter", index[i])))?;
            if !is_slice_realization(a, param, &states.0) {
                return Err(FamilyError::CoherenceViolation {
                    component: index[i].clone(),
                    tuple: k,
                });
            }
            parts.push(Part {
                param,
                states: states.0,
            });
        }
        resolved.push((parts, tuple));
    }
    resolved.sort();
    resolved.dedup();
    let (parts, tuples) = resolved.into_iter().unzip();
    Ok(Interaction {
        index: index.to_vec(),
        tuples,
        parts,
    })
}

/// Builds `R` from a predicate over the full product of realization sets.
pub fn interaction_from_predicate(
    index: &[String],
    components: &[Arc<OpenDynamics>],
    guard: &SizeGuard,
    keep: impl Fn(&[Realization]) -> bool,
) -> Result<Interaction, FamilyError> {
    let sets = components
        .iter()
        .map(|a| enumerate_realizations(a, guard).map(|s| s.all))
        .collect::<Result<Vec<_>, _>>()?;
    let size = sets
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.len()));
    match size {
        Some(n) if n <= guard.max_product_states => {}
        _ => {
            return Err(TemporalError::SizeGuardExceeded {
                what: "realization product",
                size: size.unwrap_or(usize::MAX),
                limit: guard.max_product_states,
            }
            .into())
        }
    }
    let mut tuples = vec![Vec::new()];
    for set in &sets {
        tuples = tuples
            .into_iter()
            .flat_map(|t: Vec<Realization>| {
                set.iter().map(move |r| {
                    let mut t = t.clone();
                    t.push(r.clone());
                    t
                })
            })
            .collect();
    }
    tuples.retain(|t| keep(t));
    build_interaction(index, components, tuples)
}

/// Result of `rb(R)^{-1}(μ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RbInverse {
    /// External parts, one realization per component.
    pub tuples: Vec<Vec<Realization>>,
    /// Set when `μ` is not in `Im(rb(R))`.
    pub unknown_parameter_tuple: bool,
}

impl Interaction {
    pub fn index(&self) -> &[String] {
        &self.index
    }

    /// Canonically ordered, deduplicated tuples.
    pub fn tuples(&self) -> &[Vec<Realization>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub(crate) fn parts(&self) -> &[Vec<Part>] {
        &self.parts
    }

    pub(crate) fn param_tuple(&self, k: usize) -> Vec<usize> {
        self.parts[k].iter().map(|p| p.param).collect()
    }

    /// `Im(rb(R))` as index tuples, sorted.
    pub(crate) fn image_indices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = (0..self.len()).map(|k| self.param_tuple(k)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Tuple positions whose parameter tuple is `mu`.
    pub(crate) fn inverse_indices(&self, mu: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| self.param_tuple(k) == mu)
            .collect()
    }

    fn names_of(&self, k: usize) -> Vec<String> {
        self.tuples[k]
            .iter()
            .map(|r| r.parameter.clone().expect("resolved with a parameter"))
            .collect()
    }

    /// `rb(R)`: pairs of (realization tuple, parameter tuple).
    pub fn rb(&self) -> Vec<(Vec<Realization>, Vec<String>)> {
        (0..self.len())
            .map(|k| {
                let parts = self.tuples[k].iter().map(Realization::external).collect();
                (parts, self.names_of(k))
            })
            .collect()
    }

    /// `Im(rb(R))`, ordered by parameter declaration order.
    pub fn rb_image(&self) -> Vec<Vec<String>> {
        let mut seen: Vec<(Vec<usize>, Vec<String>)> = (0..self.len())
            .map(|k| (self.param_tuple(k), self.names_of(k)))
            .collect();
        seen.sort();
        seen.dedup();
        seen.into_iter().map(|(_, n)| n).collect()
    }

    pub fn rb_inverse(&self, mu: &[String]) -> RbInverse {
        let mut tuples: Vec<Vec<Realization>> = (0..self.len())
            .filter(|&k| self.names_of(k) == mu)
            .map(|k| self.tuples[k].iter().map(Realization::external).collect())
            .collect();
        tuples.dedup();
        RbInverse {
            unknown_parameter_tuple: tuples.is_empty(),
            tuples,
        }
    }

    /// Tuple-set union of two interactions over the same family.
    pub fn union(&self, other: &Interaction) -> Result<Interaction, FamilyError> {
        if self.index != other.index {
            return Err(FamilyError::IndexMismatch(
                "interactions over different indices".to_owned(),
            ));
        }
        let mut all: Vec<(Vec<Part>, Vec<Realization>)> = self
            .parts
            .iter()
            .cloned()
            .zip(self.tuples.iter().cloned())
            .chain(
                other
                    .parts
                    .iter()
                    .cloned()
                    .zip(other.tuples.iter().cloned()),
            )
            .collect();
        all.sort();
        all.dedup();
        let (parts, tuples) = all.into_iter().unzip();
        Ok(Interaction {
            index: self.index.clone(),
            tuples,
            parts,
        })
    }
}

/// A clock synchronization `(Δ_i, δ_i)` from the synchronizer to component
/// `i`. `delta[t]` is the image of instant `t` of `h_{i₀}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synchronization {
    pub functor: Functor,
    pub delta: Vec<usize>,
}

/// Document-level synchronization: functor maps and instant map by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawSynchronization {
    pub functor: RawFunctor,
    pub delta: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicFamily {
    index: Vec<String>,
    synchronizer: usize,
    components: Vec<Arc<OpenDynamics>>,
    interaction: Interaction,
    synchronizations: Vec<Synchronization>,
}

/// Validates every synchronization: functor laws, totality, typing and
/// exact commutation `δ(f^{h₀}(t)) = (Δf)^{h_i}(δ(t))`.
pub fn build_family(
    index: Vec<String>,
    synchronizer: &str,
    components: Vec<Arc<OpenDynamics>>,
    synchronizations: &BTreeMap<String, RawSynchronization>,
    interaction: Interaction,
) -> Result<DynamicFamily, FamilyError> {
    if index.len() != components.len() {
        return Err(FamilyError::IndexMismatch(format!(
            "{} indices for {} components",
            index.len(),
            components.len()
        )));
    }
    for (i, name) in index.iter().enumerate() {
        if index[..i].contains(name) {
            return Err(FamilyError::IndexMismatch(format!(
                "index `{name}` repeated"
            )));
        }
    }
    let i0 = index
        .iter()
        .position(|i| i == synchronizer)
        .ok_or_else(|| {
            FamilyError::IndexMismatch(format!("synchronizer `{synchronizer}` is not an index"))
        })?;
    if interaction.index() != index.as_slice() {
        return Err(FamilyError::IndexMismatch(
            "interaction is indexed differently".to_owned(),
        ));
    }
    for key in synchronizations.keys() {
        if !index.contains(key) || *key == index[i0] {
            return Err(FamilyError::IndexMismatch(format!(
                "unexpected synchronization for `{key}`"
            )));
        }
    }
    let h0 = components[i0].clock();
    let mut syncs = Vec::with_capacity(index.len());
    for (i, name) in index.iter().enumerate() {
        if i == i0 {
            syncs.push(Synchronization {
                functor: Functor::identity(h0.motor()),
                delta: (0..h0.instant_count()).collect(),
            });
            continue;
        }
        let raw = synchronizations.get(name).ok_or_else(|| {
            FamilyError::IndexMismatch(format!("missing synchronization for `{name}`"))
        })?;
        let hi = components[i].clock();
        let functor = validate_functor(h0.motor(), hi.motor(), &raw.functor).map_err(|source| {
            FamilyError::Functor {
                component: name.clone(),
                source,
            }
        })?;
        let mut delta = Vec::with_capacity(h0.instant_count());
        for tname in h0.dynamics().all_states().names() {
            let target = raw
                .delta
                .get(tname)
                .ok_or_else(|| FamilyError::SynchronizationNotDeterministic(name.clone()))?;
            delta.push(
                hi.find(target)
                    .ok_or_else(|| FamilyError::UnknownInstant(target.clone()))?,
            );
        }
        if raw.delta.len() != h0.instant_count() {
            let extra = raw
                .delta
                .keys()
                .find(|k| h0.find(k).is_none())
                .cloned()
                .unwrap_or_default();
            return Err(FamilyError::UnknownInstant(extra));
        }
        // identities last: commuting with them is exactly the typing of δ
        let mut arrows: Vec<usize> = (0..h0.motor().num_arrows()).collect();
        arrows.sort_by_key(|&f| h0.motor().is_identity(f));
        for f in arrows {
            for t in 0..h0.instant_count() {
                if let Some(next) = h0.step(f, t) {
                    if hi.step(functor.arrow(f), delta[t]) != Some(delta[next]) {
                        return Err(FamilyError::SynchronizationNotCommuting {
                            component: name.clone(),
                            arrow: h0.motor().arrow_name(f).to_owned(),
                            instant: h0.instant_name(t).to_owned(),
                        });
                    }
                }
            }
        }
        syncs.push(Synchronization { functor, delta });
    }
    Ok(DynamicFamily {
        index,
        synchronizer: i0,
        components,
        interaction,
        synchronizations: syncs,
    })
}

impl DynamicFamily {
    pub fn index(&self) -> &[String] {
        &self.index
    }

    pub fn synchronizer(&self) -> usize {
        self.synchronizer
    }

    pub fn synchronizer_name(&self) -> &str {
        &self.index[self.synchronizer]
    }

    pub fn components(&self) -> &[Arc<OpenDynamics>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &OpenDynamics {
        &self.components[i]
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    /// `(Δ_i, δ_i)`; the identity for the synchronizer.
    pub fn synchronization(&self, i: usize) -> &Synchronization {
        &self.synchronizations[i]
    }

    /// Same family, different interaction.
    pub fn with_interaction(&self, interaction: Interaction) -> Result<DynamicFamily, FamilyError> {
        if interaction.index() != self.index.as_slice() {
            return Err(FamilyError::IndexMismatch(
                "interaction is indexed differently".to_owned(),
            ));
        }
        Ok(DynamicFamily {
            interaction,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{alpha1_open, mimicry_family, two_branch_open};
    use crate::temporal::succession;

    fn idx(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn real(param: &str, pairs: &[(&str, &str)]) -> Realization {
        Realization {
            parameter: Some(param.to_owned()),
            assignment: pairs
                .iter()
                .map(|(t, s)| (t.to_string(), s.to_string()))
                .collect(),
        }
    }

    fn chain1() -> Realization {
        real("*", &[("t1", "a1"), ("t2", "a2"), ("t3", "a3")])
    }

    #[test]
    fn single_component_interaction() {
        let a = Arc::new(alpha1_open());
        let r = build_interaction(&idx(&["A"]), std::slice::from_ref(&a), vec![vec![chain1()]])
            .unwrap();
        assert_eq!(r.rb_image(), [["*"]]);
        let inv = r.rb_inverse(&idx(&["*"]));
        assert_eq!(inv.tuples.len(), 1);
        assert!(!inv.unknown_parameter_tuple);
        let missing = r.rb_inverse(&idx(&["nope"]));
        assert!(missing.unknown_parameter_tuple && missing.tuples.is_empty());
        let f = build_family(idx(&["A"]), "A", vec![a], &BTreeMap::new(), r).unwrap();
        assert_eq!(f.synchronizer_name(), "A");
    }

    #[test]
    fn coherence_and_emptiness() {
        let a = Arc::new(two_branch_open());
        let wrong = real("mu2", &[("t1", "a1"), ("t2", "a2"), ("t3", "a3")]);
        let err = build_interaction(&idx(&["A"]), std::slice::from_ref(&a), vec![vec![wrong]])
            .unwrap_err();
        assert_eq!(
            err,
            FamilyError::CoherenceViolation {
                component: "A".into(),
                tuple: 0
            }
        );
        assert_eq!(
            build_interaction(&idx(&["A"]), std::slice::from_ref(&a), vec![]),
            Err(FamilyError::EmptyInteraction)
        );
        let unknown = real("mu1", &[("t9", "a1")]);
        assert!(matches!(
            build_interaction(&idx(&["A"]), &[a], vec![vec![unknown]]),
            Err(FamilyError::UnknownRealizationReference { .. })
        ));
    }

    #[test]
    fn shared_parameter_tuple() {
        let a = Arc::new(two_branch_open());
        let r = build_interaction(
            &idx(&["A"]),
            &[a],
            vec![
                vec![real("mu1", &[("t1", "a1"), ("t2", "a2"), ("t3", "a3")])],
                vec![real("mu1", &[("t1", "a1")])],
                vec![real("mu1", &[("t1", "a1")])],
            ],
        )
        .unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.rb_inverse(&idx(&["mu1"])).tuples.len(), 2);
    }

    #[test]
    fn two_copies_with_identity_synchronization() {
        let a = Arc::new(alpha1_open());
        let r = build_interaction(
            &idx(&["A", "B"]),
            &[a.clone(), a.clone()],
            vec![vec![chain1(), chain1()]],
        )
        .unwrap();
        let sync = RawSynchronization {
            functor: RawFunctor::default(),
            delta: [("t1", "t1"), ("t2", "t2"), ("t3", "t3")]
                .iter()
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .collect(),
        };
        let mut syncs = BTreeMap::new();
        syncs.insert("B".to_string(), sync.clone());
        let f = build_family(
            idx(&["A", "B"]),
            "A",
            vec![a.clone(), a.clone()],
            &syncs,
            r.clone(),
        );
        // the raw functor is empty: object and arrow maps are required
        assert!(matches!(f, Err(FamilyError::Functor { .. })));

        let full = RawSynchronization {
            functor: crate::category::Functor::identity(a.motor()).to_raw(),
            ..sync
        };
        syncs.insert("B".to_string(), full.clone());
        let f = build_family(
            idx(&["A", "B"]),
            "A",
            vec![a.clone(), a.clone()],
            &syncs,
            r.clone(),
        )
        .unwrap();
        assert_eq!(f.synchronization(1).delta, [0, 1, 2]);

        let mut shifted = full;
        shifted.delta.insert("t1".into(), "t2".into());
        syncs.insert("B".to_string(), shifted);
        let err = build_family(idx(&["A", "B"]), "A", vec![a.clone(), a], &syncs, r).unwrap_err();
        assert_eq!(
            err,
            FamilyError::SynchronizationNotCommuting {
                component: "B".into(),
                arrow: "u".into(),
                instant: "t1".into()
            }
        );
    }

    #[test]
    fn synchronizations_are_monotone() {
        let f = mimicry_family();
        let s0 = succession(f.component(0).clock());
        for i in 0..f.index().len() {
            let si = succession(f.component(i).clock());
            let d = &f.synchronization(i).delta;
            for (s, t) in s0.pairs() {
                assert!(si.leq(d[s], d[t]));
            }
        }
    }

    #[test]
    fn union_of_interactions() {
        let a = Arc::new(two_branch_open());
        let comps = [a];
        let r1 = build_interaction(
            &idx(&["A"]),
            &comps,
            vec![vec![real("mu1", &[("t1", "a1")])]],
        )
        .unwrap();
        let r2 = build_interaction(
            &idx(&["A"]),
            &comps,
            vec![vec![real("mu2", &[("t1", "a1")])]],
        )
        .unwrap();
        let u = r1.union(&r2).unwrap();
        assert_eq!(u.rb_image(), [["mu1"], ["mu2"]]);
        let all = interaction_from_predicate(&idx(&["A"]), &comps, &SizeGuard::default(), |_| true)
            .unwrap();
        assert_eq!(all.len(), 8);
    }
}
