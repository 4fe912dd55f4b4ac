//! Multi-dynamics, open dynamics, parametric quotients and dynamorphisms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::category::{Category, Functor};
use crate::dynamics::{
    check_subcategorical, out_of_play_states, union_dynamics, Dynamics, DynamicsError, StateSet,
    Transition,
};
use crate::temporal::Clock;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpenError {
    #[error("a multi-dynamics needs at least one parameter")]
    EmptyParameters,
    #[error("parameter `{0}` is declared twice")]
    DuplicateParameter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("slice `{0}` is not sub-categorical: {1}")]
    SliceNotSubcategorical(String, String),
    #[error("slices must share motor and state sets")]
    SliceShapeMismatch,
    #[error("{0}")]
    DatationViolation(Box<DatationMismatch>),
    #[error("state `{0}` has no datation")]
    MissingDatation(String),
    #[error("state `{state}` of type `{object}` is dated by instant `{instant}` of another type")]
    DatationTypeMismatch {
        state: String,
        object: String,
        instant: String,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown instant `{0}`")]
    UnknownInstant(String),
    #[error("clock and dynamics have different motors")]
    MotorMismatch,
    #[error("not an equivalence on the parameters: {0}")]
    NotAnEquivalence(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// A pair `(a, b)` of `f` with `τ(b) ≠ f(τ(a))`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("datation violated for parameter `{param}`: {arrow}({from}) ∋ {to}, but τ({to}) = {found} ≠ {expected}")]
pub struct DatationMismatch {
    pub param: String,
    pub arrow: String,
    pub from: String,
    pub to: String,
    pub found: String,
    pub expected: String,
}

/// A non-empty family of dynamics `(α_μ)` sharing motor and state sets.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiDynamics {
    parameters: Vec<String>,
    slices: Vec<Dynamics>,
}

impl MultiDynamics {
    /// Validates shapes and sub-categoricity of every slice.
    pub fn new(parameters: Vec<String>, slices: Vec<Dynamics>) -> Result<Self, OpenError> {
        let m = Self::new_unchecked(parameters, slices)?;
        for (p, s) in m.parameters.iter().zip(&m.slices) {
            let r = check_subcategorical(s);
            if !r.holds {
                return Err(OpenError::SliceNotSubcategorical(
                    p.clone(),
                    r.violations[0].to_string(),
                ));
            }
        }
        Ok(m)
    }

    /// Shapes only; slices may fail sub-categoricity (graph-level data).
    pub fn new_unchecked(
        parameters: Vec<String>,
        slices: Vec<Dynamics>,
    ) -> Result<Self, OpenError> {
        if parameters.is_empty() {
            return Err(OpenError::EmptyParameters);
        }
        if parameters.len() != slices.len() {
            return Err(OpenError::SliceShapeMismatch);
        }
        for (i, p) in parameters.iter().enumerate() {
            if parameters[..i].contains(p) {
                return Err(OpenError::DuplicateParameter(p.clone()));
            }
        }
        let first = &slices[0];
        for s in &slices[1..] {
            if **s.motor() != **first.motor() || s.state_sets() != first.state_sets() {
                return Err(OpenError::SliceShapeMismatch);
            }
        }
        Ok(Self { parameters, slices })
    }

    /// The single-parameter multi-dynamics `{"*": d}`.
    pub fn mono(d: Dynamics) -> Result<Self, OpenError> {
        Self::new(vec!["*".to_owned()], vec![d])
    }

    pub fn motor(&self) -> &Arc<Category> {
        self.slices[0].motor()
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.parameters.iter().position(|p| p == name)
    }

    pub fn slice(&self, param: usize) -> &Dynamics {
        &self.slices[param]
    }

    pub fn slices(&self) -> &[Dynamics] {
        &self.slices
    }

    /// Shared `st(α)`.
    pub fn states(&self) -> &Dynamics {
        &self.slices[0]
    }
}

/// A multi-dynamics with a clock and a datation `τ: st(α) → st(h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenDynamics {
    multi: MultiDynamics,
    clock: Clock,
    datation: Vec<usize>,
    by_instant: Vec<Vec<usize>>,
}

impl OpenDynamics {
    /// `datation[s]` is the instant of global state `s`. Checks typing and the
    /// datation condition `τ(b) = f^h(τ(a))` for every pair of every slice.
    pub fn new(
        multi: MultiDynamics,
        clock: Clock,
        datation: Vec<usize>,
    ) -> Result<Self, OpenError> {
        let d = multi.states();
        if **d.motor() != **clock.motor() {
            return Err(OpenError::MotorMismatch);
        }
        if datation.len() != d.state_count() || datation.iter().any(|&t| t >= clock.instant_count())
        {
            return Err(OpenError::Dynamics(DynamicsError::Shape(
                "datation must send every state to an instant".to_owned(),
            )));
        }
        let motor = d.motor().clone();
        for (p, slice) in multi.slices.iter().enumerate() {
            for f in 0..motor.num_arrows() {
                for (a, b) in global_pairs(slice, f) {
                    // a mistyped τ(a) is reported by the typing pass below
                    let Some(expected) = clock.step(f, datation[a]) else {
                        continue;
                    };
                    if datation[b] != expected {
                        return Err(OpenError::DatationViolation(Box::new(DatationMismatch {
                            param: multi.parameters[p].clone(),
                            arrow: motor.arrow_name(f).to_owned(),
                            from: d.state_name(a).to_owned(),
                            to: d.state_name(b).to_owned(),
                            found: clock.instant_name(datation[b]).to_owned(),
                            expected: clock.instant_name(expected).to_owned(),
                        })));
                    }
                }
            }
        }
        for (s, &t) in datation.iter().enumerate() {
            if clock.typ(t) != d.typ(s) {
                return Err(OpenError::DatationTypeMismatch {
                    state: d.state_name(s).to_owned(),
                    object: d.motor().object_name(d.typ(s)).to_owned(),
                    instant: clock.instant_name(t).to_owned(),
                });
            }
        }
        let mut by_instant = vec![Vec::new(); clock.instant_count()];
        for (s, &t) in datation.iter().enumerate() {
            by_instant[t].push(s);
        }
        Ok(Self {
            multi,
            clock,
            datation,
            by_instant,
        })
    }

    pub fn multi(&self) -> &MultiDynamics {
        &self.multi
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    pub fn motor(&self) -> &Arc<Category> {
        self.multi.motor()
    }

    pub fn parameters(&self) -> &[String] {
        self.multi.parameters()
    }

    pub fn parameter_index(&self, name: &str) -> Option<usize> {
        self.multi.parameter_index(name)
    }

    pub fn slice(&self, param: usize) -> &Dynamics {
        self.multi.slice(param)
    }

    pub fn states(&self) -> &Dynamics {
        self.multi.states()
    }

    pub fn find(&self, state: &str) -> Option<usize> {
        self.states().find(state)
    }

    pub fn state_name(&self, s: usize) -> &str {
        self.states().state_name(s)
    }

    /// `τ(s)` as a global instant.
    pub fn datation(&self, s: usize) -> usize {
        self.datation[s]
    }

    pub fn datation_map(&self) -> &[usize] {
        &self.datation
    }

    /// States dated by instant `t`, in document order.
    pub fn states_at(&self, t: usize) -> &[usize] {
        &self.by_instant[t]
    }

    /// Every slice passes the deterministic check.
    pub fn is_deterministic(&self) -> bool {
        self.multi
            .slices()
            .iter()
            .all(|s| crate::dynamics::check_deterministic(s).holds)
    }

    /// Same clock and datation, new multi-dynamics over the same states.
    pub fn with_multi(&self, multi: MultiDynamics) -> Result<Self, OpenError> {
        Self::new(multi, self.clock.clone(), self.datation.clone())
    }

    pub fn quotient(&self, partition: &[Vec<String>]) -> Result<Self, OpenError> {
        self.with_multi(parametric_quotient(&self.multi, partition)?)
    }

    /// Removes the states out of play for every parameter.
    pub fn semi_proper_clean(&self) -> Result<Self, OpenError> {
        let (multi, kept) = clean_common(&self.multi)?;
        let datation = kept.iter().map(|&s| self.datation[s]).collect();
        Self::new(multi, self.clock.clone(), datation)
    }
}

fn global_pairs(d: &Dynamics, f: usize) -> Vec<(usize, usize)> {
    let arrow = d.motor().arrow(f);
    d.transition(f)
        .pairs()
        .map(|(a, b)| (d.global(arrow.dom, a), d.global(arrow.cod, b)))
        .collect()
}

/// Builds an open dynamics from named datation entries.
pub fn validate_open_dynamics(
    multi: MultiDynamics,
    clock: Clock,
    datation: &BTreeMap<String, String>,
) -> Result<OpenDynamics, OpenError> {
    let d = multi.states();
    for s in datation.keys() {
        if d.find(s).is_none() {
            return Err(OpenError::UnknownState(s.clone()));
        }
    }
    let mut tau = Vec::with_capacity(d.state_count());
    for s in d.all_states().names() {
        let t = datation
            .get(s)
            .ok_or_else(|| OpenError::MissingDatation(s.clone()))?;
        tau.push(
            clock
                .find(t)
                .ok_or_else(|| OpenError::UnknownInstant(t.clone()))?,
        );
    }
    OpenDynamics::new(multi, clock, tau)
}

fn check_partition(parameters: &[String], partition: &[Vec<String>]) -> Result<(), OpenError> {
    let mut seen = vec![false; parameters.len()];
    for block in partition {
        if block.is_empty() {
            return Err(OpenError::NotAnEquivalence("empty block".into()));
        }
        for p in block {
            let i = parameters
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| OpenError::NotAnEquivalence(format!("unknown parameter `{p}`")))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(OpenError::NotAnEquivalence(format!(
                    "`{p}` is in two blocks"
                )));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(OpenError::NotAnEquivalence(format!(
            "`{}` is in no block",
            parameters[i]
        )));
    }
    Ok(())
}

/// Label of a quotient class: `{μ1,μ2}`, members in parameter order.
pub fn class_label(parameters: &[String], block: &[String]) -> String {
    let members: Vec<&str> = parameters
        .iter()
        .filter(|p| block.contains(p))
        .map(String::as_str)
        .collect();
    format!("{{{}}}", members.join(","))
}

/// `f^β_λ(a) = ⋃_{μ∈λ} f^α_μ(a)` for every class `λ` of the partition.
pub fn parametric_quotient(
    a: &MultiDynamics,
    partition: &[Vec<String>],
) -> Result<MultiDynamics, OpenError> {
    check_partition(a.parameters(), partition)?;
    let motor = a.motor();
    let mut labels = Vec::with_capacity(partition.len());
    let mut slices = Vec::with_capacity(partition.len());
    for block in partition {
        labels.push(class_label(a.parameters(), block));
        let members: Vec<Dynamics> = block
            .iter()
            .map(|p| a.slice(a.parameter_index(p).expect("checked")).clone())
            .collect();
        let union = union_dynamics(motor, &members)?;
        // keep the exact shared state sets of the input
        let ts = (0..motor.num_arrows())
            .map(|f| {
                let rec = motor.arrow(f);
                let (s, t) = (a.states().states(rec.dom), a.states().states(rec.cod));
                Transition::from_pairs(
                    s.clone(),
                    t.clone(),
                    union.transition(f).named_pairs().map(|(x, y)| {
                        (
                            s.index_of(x).expect("shared"),
                            t.index_of(y).expect("shared"),
                        )
                    }),
                )
            })
            .collect();
        slices.push(a.states().with_transitions(ts)?);
    }
    if a.slices().iter().all(|s| check_subcategorical(s).holds) {
        MultiDynamics::new(labels, slices)
    } else {
        MultiDynamics::new_unchecked(labels, slices)
    }
}

/// The partition with one block per parameter.
pub fn discrete_partition(parameters: &[String]) -> Vec<Vec<String>> {
    parameters.iter().map(|p| vec![p.clone()]).collect()
}

/// The partition with a single block.
pub fn full_partition(parameters: &[String]) -> Vec<Vec<String>> {
    vec![parameters.to_vec()]
}

fn clean_common(a: &MultiDynamics) -> Result<(MultiDynamics, Vec<usize>), OpenError> {
    let d = a.states();
    let mut everywhere: Vec<usize> = (0..d.state_count()).collect();
    for s in a.slices() {
        let out = out_of_play_states(s)?;
        everywhere.retain(|&g| out.iter().any(|n| n == d.state_name(g)));
    }
    let kept: Vec<usize> = (0..d.state_count())
        .filter(|g| everywhere.binary_search(g).is_err())
        .collect();
    let slices = a
        .slices()
        .iter()
        .map(|s| s.restrict(|g| kept.binary_search(&g).is_ok()))
        .collect::<Vec<_>>();
    // restriction rebuilds state sets per slice; share the first one's
    let shared = slices[0].state_sets().to_vec();
    let slices = slices
        .iter()
        .map(|s| {
            let ts = s
                .transitions()
                .iter()
                .enumerate()
                .map(|(f, t)| {
                    let rec = s.motor().arrow(f);
                    Transition::from_pairs(
                        shared[rec.dom].clone(),
                        shared[rec.cod].clone(),
                        t.pairs(),
                    )
                })
                .collect();
            Dynamics::new(s.motor().clone(), shared.clone(), ts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((MultiDynamics::new(a.parameters().to_vec(), slices)?, kept))
}

/// Removes exactly the states out of play for every parameter. The result is
/// semi-proper.
pub fn semi_proper_clean(a: &MultiDynamics) -> Result<MultiDynamics, OpenError> {
    Ok(clean_common(a)?.0)
}

/// Restricts a dynamorphism `δ: st(a) ⇝ st(b)` to the cleaned state sets.
pub fn clean_dynamorphism(
    delta: &Transition,
    a: &Dynamics,
    b: &Dynamics,
) -> Result<Transition, DynamicsError> {
    let (ca, cb) = (crate::dynamics::clean(a)?, crate::dynamics::clean(b)?);
    let (src, tgt) = (ca.all_states().clone(), cb.all_states().clone());
    let pairs = delta
        .named_pairs()
        .filter_map(|(x, y)| Some((src.index_of(x)?, tgt.index_of(y)?)))
        .collect::<Vec<_>>();
    Ok(Transition::from_pairs(src, tgt, pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphismViolationKind {
    /// `δ(s)` leaves the state set of `Δ(typ s)`.
    Typing,
    /// `δ_T ⊙ f^α ⊄ (Δf)^β ⊙ δ_S`.
    Intertwining,
    /// `θ` undefined on a parameter.
    Parameter,
    /// The clock part `d` is not total single-valued.
    ClockNotDeterministic,
    /// `τ_B ⊙ δ ⊄ d ⊙ ρ_A`.
    Synchronization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismViolation {
    pub kind: MorphismViolationKind,
    /// Which part failed: `""`, a parameter, or `clock`.
    pub context: String,
    pub arrow: Option<String>,
    pub state: String,
    pub found: Vec<String>,
    pub expected: Vec<String>,
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.context.is_empty() {
            write!(f, "[{}] ", self.context)?;
        }
        let (found, expected) = (self.found.join(","), self.expected.join(","));
        let s = &self.state;
        match self.kind {
            MorphismViolationKind::Typing => write!(f, "δ({s}) = {{{found}}} ⊄ {{{expected}}}"),
            MorphismViolationKind::Intertwining => write!(
                f,
                "(δ⊙{a})({s}) = {{{found}}} ⊄ {{{expected}}} = (Δ{a}⊙δ)({s})",
                a = self.arrow.as_deref().unwrap_or("?")
            ),
            MorphismViolationKind::Parameter => write!(f, "θ({s}) is undefined"),
            MorphismViolationKind::ClockNotDeterministic => {
                write!(f, "d({s}) = {{{found}}} is not a singleton")
            }
            MorphismViolationKind::Synchronization => {
                write!(f, "(τ⊙δ)({s}) = {{{found}}} ⊄ {{{expected}}} = (d⊙ρ)({s})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamorphismReport {
    pub holds: bool,
    pub violations: Vec<MorphismViolation>,
}

impl DynamorphismReport {
    fn from(violations: Vec<MorphismViolation>) -> Self {
        Self {
            holds: violations.is_empty(),
            violations,
        }
    }
}

fn names(d: &Dynamics, gs: impl IntoIterator<Item = usize>) -> Vec<String> {
    gs.into_iter().map(|g| d.state_name(g).to_owned()).collect()
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn dynamorphism_violations(
    context: &str,
    functor: &Functor,
    delta: &Transition,
    a: &Dynamics,
    b: &Dynamics,
) -> Vec<MorphismViolation> {
    let mut out = Vec::new();
    if !delta.source().same(a.all_states()) || !delta.target().same(b.all_states()) {
        out.push(MorphismViolation {
            kind: MorphismViolationKind::Typing,
            context: context.to_owned(),
            arrow: None,
            state: "δ".to_owned(),
            found: Vec::new(),
            expected: Vec::new(),
        });
        return out;
    }
    for s in 0..a.state_count() {
        let target_object = functor.object(a.typ(s));
        let bad: Vec<usize> = delta
            .image(s)
            .iter()
            .copied()
            .filter(|&x| b.typ(x) != target_object)
            .collect();
        if !bad.is_empty() {
            out.push(MorphismViolation {
                kind: MorphismViolationKind::Typing,
                context: context.to_owned(),
                arrow: None,
                state: a.state_name(s).to_owned(),
                found: names(b, bad),
                expected: b.states(target_object).names().to_vec(),
            });
        }
    }
    let motor = a.motor();
    for f in 0..motor.num_arrows() {
        let df = functor.arrow(f);
        for s in 0..a.state_count() {
            if a.typ(s) != motor.arrow(f).dom {
                continue;
            }
            let left = sorted(
                a.image(f, s)
                    .flat_map(|x| delta.image(x).iter().copied())
                    .collect(),
            );
            let right = sorted(
                delta
                    .image(s)
                    .iter()
                    .filter(|&&y| b.typ(y) == motor_dom(b, df))
                    .flat_map(|&y| b.image(df, y))
                    .collect(),
            );
            if left.iter().any(|x| right.binary_search(x).is_err()) {
                out.push(MorphismViolation {
                    kind: MorphismViolationKind::Intertwining,
                    context: context.to_owned(),
                    arrow: Some(motor.arrow_name(f).to_owned()),
                    state: a.state_name(s).to_owned(),
                    found: names(b, left),
                    expected: names(b, right),
                });
            }
        }
    }
    out
}

fn motor_dom(d: &Dynamics, f: usize) -> usize {
    d.motor().arrow(f).dom
}

/// `(Δ, δ)` from `a` to `b`: typing of `δ` and `δ_T ⊙ f^a ⊂ (Δf)^b ⊙ δ_S` for
/// every arrow `f: S → T`. `δ` relates `st(a)` to `st(b)`.
pub fn check_dynamorphism(
    functor: &Functor,
    delta: &Transition,
    a: &Dynamics,
    b: &Dynamics,
) -> DynamorphismReport {
    DynamorphismReport::from(dynamorphism_violations("", functor, delta, a, b))
}

fn multi_violations(
    theta: &BTreeMap<String, String>,
    functor: &Functor,
    delta: &Transition,
    a: &MultiDynamics,
    b: &MultiDynamics,
) -> Vec<MorphismViolation> {
    let mut out = Vec::new();
    for (l, lambda) in a.parameters().iter().enumerate() {
        match theta.get(lambda).and_then(|m| b.parameter_index(m)) {
            Some(m) => out.extend(dynamorphism_violations(
                lambda,
                functor,
                delta,
                a.slice(l),
                b.slice(m),
            )),
            None => out.push(MorphismViolation {
                kind: MorphismViolationKind::Parameter,
                context: String::new(),
                arrow: None,
                state: lambda.clone(),
                found: Vec::new(),
                expected: Vec::new(),
            }),
        }
    }
    out
}

/// `(θ, Δ, δ)`: for every `λ`, `(Δ, δ)` is a dynamorphism from `a_λ` to
/// `b_θ(λ)`.
pub fn check_multi_dynamorphism(
    theta: &BTreeMap<String, String>,
    functor: &Functor,
    delta: &Transition,
    a: &MultiDynamics,
    b: &MultiDynamics,
) -> DynamorphismReport {
    DynamorphismReport::from(multi_violations(theta, functor, delta, a, b))
}

/// `(θ, Δ, δ, d)`: the multi part, the clock part `(Δ, d)` with `d`
/// deterministic, and `τ_B ⊙ δ ⊂ d ⊙ ρ_A`.
pub fn check_open_dynamorphism(
    theta: &BTreeMap<String, String>,
    functor: &Functor,
    delta: &Transition,
    d: &Transition,
    a: &OpenDynamics,
    b: &OpenDynamics,
) -> DynamorphismReport {
    let mut out = multi_violations(theta, functor, delta, a.multi(), b.multi());
    let (ha, hb) = (a.clock().dynamics(), b.clock().dynamics());
    out.extend(dynamorphism_violations("clock", functor, d, ha, hb));
    if !d.source().same(ha.all_states()) || !d.target().same(hb.all_states()) {
        return DynamorphismReport::from(out);
    }
    for t in 0..ha.state_count() {
        if d.image(t).len() != 1 {
            out.push(MorphismViolation {
                kind: MorphismViolationKind::ClockNotDeterministic,
                context: "clock".to_owned(),
                arrow: None,
                state: ha.state_name(t).to_owned(),
                found: names(hb, d.image(t).iter().copied()),
                expected: Vec::new(),
            });
        }
    }
    if delta.source().same(a.states().all_states()) && delta.target().same(b.states().all_states())
    {
        for s in 0..a.states().state_count() {
            let found = sorted(delta.image(s).iter().map(|&x| b.datation(x)).collect());
            let expected = d.image(a.datation(s)).to_vec();
            if found.iter().any(|x| expected.binary_search(x).is_err()) {
                out.push(MorphismViolation {
                    kind: MorphismViolationKind::Synchronization,
                    context: a.motor().object_name(a.states().typ(s)).to_owned(),
                    arrow: None,
                    state: a.state_name(s).to_owned(),
                    found: names(hb, found),
                    expected: names(hb, expected),
                });
            }
        }
    }
    DynamorphismReport::from(out)
}

/// The identity relation on `st(d)`, handy for inclusions and identity
/// morphisms.
pub fn identity_on(d: &Dynamics) -> Transition {
    Transition::diagonal(d.all_states().clone())
}

/// A relation `st(a) ⇝ st(b)` from named pairs.
pub fn relation_between(
    a: &Dynamics,
    b: &Dynamics,
    pairs: &[(&str, &str)],
) -> Result<Transition, DynamicsError> {
    Transition::from_named_pairs(
        a.all_states().clone(),
        b.all_states().clone(),
        pairs.iter().copied(),
    )
}

/// State sets of a multi-dynamics as a plain [`StateSet`] per object.
pub fn shared_states(a: &MultiDynamics) -> &[StateSet] {
    a.states().state_sets()
}
