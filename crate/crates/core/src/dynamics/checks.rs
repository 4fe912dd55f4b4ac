use std::fmt;

use serde::Serialize;

use super::{Dynamics, DynamicsError};

pub const DEFAULT_MAX_VIOLATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// An identity sends a state somewhere else.
    IdentityOffDiagonal,
    /// A composite reaches a state the chained transitions do not.
    CompositeNotCovered,
    /// An identity has empty image: the state is out of play.
    OutOfPlay,
    /// Composite and chained transitions differ.
    CompositeMismatch,
    /// An image that is not exactly one state.
    NotSingleton,
    /// An image with two or more states.
    MultiValued,
}

/// One failing instance of a property.
///
/// `arrows` is `[f]` for single-arrow conditions and `[f, g, g∘f]` for
/// composable pairs. `found` is the image under the single arrow (or the
/// composite), `expected` the diagonal or the chained image `(g⊙f)(state)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub arrows: Vec<String>,
    pub state: String,
    pub found: Vec<String>,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: &'static str,
    pub holds: bool,
    pub violations: Vec<Violation>,
    /// Violations beyond the reporting cap.
    pub omitted: usize,
}

fn set_str(states: &[String]) -> String {
    format!("{{{}}}", states.join(","))
}

fn is_subset(a: &[String], b: &[String]) -> bool {
    a.iter().all(|x| b.contains(x))
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let found = set_str(&self.found);
        let expected = set_str(&self.expected);
        let head = &self.arrows[0];
        match self.kind {
            ViolationKind::IdentityOffDiagonal => {
                write!(f, "{head}({}) = {found} ⊄ {expected}", self.state)
            }
            ViolationKind::OutOfPlay => write!(f, "{head}({}) = {found} ≠ {expected}", self.state),
            ViolationKind::CompositeNotCovered | ViolationKind::CompositeMismatch => {
                let (first, second, composite) =
                    (&self.arrows[0], &self.arrows[1], &self.arrows[2]);
                let rel = if self.kind == ViolationKind::CompositeNotCovered {
                    "⊄"
                } else if is_subset(&self.found, &self.expected) {
                    "⊊"
                } else if is_subset(&self.expected, &self.found) {
                    "⊋"
                } else {
                    "≠"
                };
                write!(
                    f,
                    "{composite}({s}) = {found} {rel} {expected} = ({second}⊙{first})({s})",
                    s = self.state
                )
            }
            ViolationKind::NotSingleton => {
                write!(f, "{head}({}) = {found} is not a singleton", self.state)
            }
            ViolationKind::MultiValued => {
                write!(
                    f,
                    "{head}({}) = {found} has more than one element",
                    self.state
                )
            }
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}",
            self.property,
            if self.holds { "yes" } else { "no" }
        )?;
        for v in &self.violations {
            write!(f, "\n  witness: {v}")?;
        }
        if self.omitted > 0 {
            write!(f, "\n  ... {} more", self.omitted)?;
        }
        Ok(())
    }
}

struct Collector {
    property: &'static str,
    cap: usize,
    violations: Vec<Violation>,
    omitted: usize,
}

impl Collector {
    fn new(property: &'static str, cap: usize) -> Self {
        Self {
            property,
            cap: cap.max(1),
            violations: Vec::new(),
            omitted: 0,
        }
    }

    fn push(&mut self, v: impl FnOnce() -> Violation) {
        if self.violations.len() < self.cap {
            self.violations.push(v());
        } else {
            self.omitted += 1;
        }
    }

    fn finish(self) -> PropertyReport {
        PropertyReport {
            property: self.property,
            holds: self.violations.is_empty(),
            violations: self.violations,
            omitted: self.omitted,
        }
    }
}

fn names(d: &Dynamics, object: usize, idx: &[usize]) -> Vec<String> {
    let set = d.states(object);
    idx.iter().map(|&i| set.name(i).to_owned()).collect()
}

/// Property checkers with a configurable cap on reported violations. The
/// `holds` verdict is always exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub max_violations: usize,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            max_violations: DEFAULT_MAX_VIOLATIONS,
        }
    }
}

impl Checks {
    pub fn new(max_violations: usize) -> Self {
        Self { max_violations }
    }

    /// `(Id_A)^α ⊂ Id` for every object and `(g∘f)^α ⊂ g^α ⊙ f^α` for every
    /// composable pair.
    pub fn subcategorical(&self, d: &Dynamics) -> PropertyReport {
        let motor = d.motor();
        let mut out = Collector::new("sub-categorical", self.max_violations);
        for o in 0..motor.num_objects() {
            let id = motor.identity(o);
            let t = d.transition(id);
            for a in 0..d.states(o).len() {
                if t.image(a).iter().any(|&b| b != a) {
                    out.push(|| Violation {
                        kind: ViolationKind::IdentityOffDiagonal,
                        arrows: vec![motor.arrow_name(id).to_owned()],
                        state: d.states(o).name(a).to_owned(),
                        found: names(d, o, t.image(a)),
                        expected: names(d, o, &[a]),
                    });
                }
            }
        }
        for (f, g, gf) in motor.composable_pairs() {
            let chained = d
                .transition(f)
                .then(d.transition(g))
                .expect("typed by the motor");
            let composite = d.transition(gf);
            let (dom, cod) = (motor.arrow(f).dom, motor.arrow(g).cod);
            for a in 0..d.states(dom).len() {
                if composite.image(a).iter().any(|&c| !chained.contains(a, c)) {
                    out.push(|| Violation {
                        kind: ViolationKind::CompositeNotCovered,
                        arrows: [f, g, gf]
                            .iter()
                            .map(|&x| motor.arrow_name(x).to_owned())
                            .collect(),
                        state: d.states(dom).name(a).to_owned(),
                        found: names(d, cod, composite.image(a)),
                        expected: names(d, cod, chained.image(a)),
                    });
                }
            }
        }
        out.finish()
    }

    /// Every identity transition is the full diagonal. Requires a
    /// sub-categorical dynamics.
    pub fn proper(&self, d: &Dynamics) -> Result<PropertyReport, DynamicsError> {
        if !self.subcategorical(d).holds {
            return Err(DynamicsError::NotSubcategorical);
        }
        let motor = d.motor();
        let mut out = Collector::new("proper", self.max_violations);
        for o in 0..motor.num_objects() {
            let id = motor.identity(o);
            let t = d.transition(id);
            for a in 0..d.states(o).len() {
                if t.image(a).is_empty() {
                    out.push(|| Violation {
                        kind: ViolationKind::OutOfPlay,
                        arrows: vec![motor.arrow_name(id).to_owned()],
                        state: d.states(o).name(a).to_owned(),
                        found: Vec::new(),
                        expected: names(d, o, &[a]),
                    });
                }
            }
        }
        Ok(out.finish())
    }

    /// Proper, and `(g∘f)^α = g^α ⊙ f^α` for every composable pair.
    pub fn categorical(&self, d: &Dynamics) -> PropertyReport {
        let motor = d.motor();
        let mut out = Collector::new("categorical", self.max_violations);
        for o in 0..motor.num_objects() {
            let id = motor.identity(o);
            let t = d.transition(id);
            for a in 0..d.states(o).len() {
                if t.image(a) != [a] {
                    let kind = if t.image(a).is_empty() {
                        ViolationKind::OutOfPlay
                    } else {
                        ViolationKind::IdentityOffDiagonal
                    };
                    out.push(|| Violation {
                        kind,
                        arrows: vec![motor.arrow_name(id).to_owned()],
                        state: d.states(o).name(a).to_owned(),
                        found: names(d, o, t.image(a)),
                        expected: names(d, o, &[a]),
                    });
                }
            }
        }
        for (f, g, gf) in motor.composable_pairs() {
            let chained = d
                .transition(f)
                .then(d.transition(g))
                .expect("typed by the motor");
            let composite = d.transition(gf);
            let (dom, cod) = (motor.arrow(f).dom, motor.arrow(g).cod);
            for a in 0..d.states(dom).len() {
                if composite.image(a) != chained.image(a) {
                    out.push(|| Violation {
                        kind: ViolationKind::CompositeMismatch,
                        arrows: [f, g, gf]
                            .iter()
                            .map(|&x| motor.arrow_name(x).to_owned())
                            .collect(),
                        state: d.states(dom).name(a).to_owned(),
                        found: names(d, cod, composite.image(a)),
                        expected: names(d, cod, chained.image(a)),
                    });
                }
            }
        }
        out.finish()
    }

    /// Every image `f^α(a)` is exactly a singleton.
    pub fn deterministic(&self, d: &Dynamics) -> PropertyReport {
        self.single_valued(d, "deterministic", ViolationKind::NotSingleton, |n| n == 1)
    }

    /// Every image `f^α(a)` has at most one element.
    pub fn quasi_deterministic(&self, d: &Dynamics) -> PropertyReport {
        self.single_valued(d, "quasi-deterministic", ViolationKind::MultiValued, |n| {
            n <= 1
        })
    }

    fn single_valued(
        &self,
        d: &Dynamics,
        property: &'static str,
        kind: ViolationKind,
        ok: impl Fn(usize) -> bool,
    ) -> PropertyReport {
        let motor = d.motor();
        let mut out = Collector::new(property, self.max_violations);
        for (f, arrow) in motor.arrows().iter().enumerate() {
            let t = d.transition(f);
            for a in 0..d.states(arrow.dom).len() {
                if !ok(t.image(a).len()) {
                    out.push(|| Violation {
                        kind,
                        arrows: vec![arrow.name.clone()],
                        state: d.states(arrow.dom).name(a).to_owned(),
                        found: names(d, arrow.cod, t.image(a)),
                        expected: Vec::new(),
                    });
                }
            }
        }
        out.finish()
    }
}

pub fn check_subcategorical(d: &Dynamics) -> PropertyReport {
    Checks::default().subcategorical(d)
}

pub fn check_proper(d: &Dynamics) -> Result<PropertyReport, DynamicsError> {
    Checks::default().proper(d)
}

pub fn check_categorical(d: &Dynamics) -> PropertyReport {
    Checks::default().categorical(d)
}

pub fn check_deterministic(d: &Dynamics) -> PropertyReport {
    Checks::default().deterministic(d)
}

pub fn check_quasi_deterministic(d: &Dynamics) -> PropertyReport {
    Checks::default().quasi_deterministic(d)
}

pub(crate) fn out_of_play_indices(d: &Dynamics) -> Vec<usize> {
    let motor = d.motor();
    (0..d.state_count())
        .filter(|&g| {
            let (o, a) = d.locate(g);
            d.transition(motor.identity(o)).image(a).is_empty()
        })
        .collect()
}

/// States `a` with `(Id_typ(a))^α(a) = ∅`, in document order.
pub fn out_of_play_states(d: &Dynamics) -> Result<Vec<String>, DynamicsError> {
    if !check_subcategorical(d).holds {
        return Err(DynamicsError::NotSubcategorical);
    }
    Ok(out_of_play_indices(d)
        .into_iter()
        .map(|g| d.state_name(g).to_owned())
        .collect())
}

/// Removes every out-of-play state. The result is proper.
pub fn clean(d: &Dynamics) -> Result<Dynamics, DynamicsError> {
    if !check_subcategorical(d).holds {
        return Err(DynamicsError::NotSubcategorical);
    }
    let out = out_of_play_indices(d);
    Ok(d.restrict(|g| out.binary_search(&g).is_err()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{union_dynamics, DynamicsBuilder};
    use crate::fixtures::{alpha1, alpha2, cat3};

    #[test]
    fn branches_are_categorical_and_quasi_deterministic() {
        for d in [alpha1(), alpha2()] {
            assert!(check_subcategorical(&d).holds);
            assert!(check_proper(&d).unwrap().holds);
            assert!(check_categorical(&d).holds);
            assert!(check_quasi_deterministic(&d).holds);
        }
        let det = check_deterministic(&alpha1());
        assert!(!det.holds);
        assert!(det
            .violations
            .iter()
            .any(|v| v.arrows == ["v"] && v.state == "a2'"));
    }

    #[test]
    fn union_is_subcategorical_but_not_categorical() {
        let u = union_dynamics(&cat3(), &[alpha1(), alpha2()]).unwrap();
        assert!(check_subcategorical(&u).holds);
        assert!(check_proper(&u).unwrap().holds);
        let cat = check_categorical(&u);
        assert!(!cat.holds);
        assert_eq!(cat.violations.len(), 1);
        assert_eq!(
            cat.violations[0].to_string(),
            "w(a1) = {a3} ⊊ {a3,a3'} = (v⊙u)(a1)"
        );
        for report in [check_deterministic(&u), check_quasi_deterministic(&u)] {
            assert!(!report.holds);
            assert!(report
                .violations
                .iter()
                .any(|v| v.arrows == ["u"] && v.state == "a1"));
        }
    }

    #[test]
    fn off_diagonal_identity_is_reported() {
        let d = DynamicsBuilder::new(cat3())
            .states("1", &["a1", "a1'"])
            .pair("Id1", "a1", "a1'")
            .build()
            .unwrap();
        let r = check_subcategorical(&d);
        assert!(!r.holds);
        assert_eq!(r.violations[0].kind, ViolationKind::IdentityOffDiagonal);
        assert_eq!(r.violations[0].found, ["a1'"]);
        assert_eq!(check_proper(&d), Err(DynamicsError::NotSubcategorical));
    }

    #[test]
    fn out_of_play_and_cleaning() {
        let d = DynamicsBuilder::new(cat3())
            .states("1", &["a1"])
            .states("2", &["a2", "a2'"])
            .states("3", &["a3"])
            .pairs("Id1", &[("a1", "a1")])
            .pairs("Id2", &[("a2", "a2")])
            .pairs("Id3", &[("a3", "a3")])
            .pairs("u", &[("a1", "a2")])
            .pairs("v", &[("a2", "a3")])
            .pairs("w", &[("a1", "a3")])
            .build()
            .unwrap();
        let proper = check_proper(&d).unwrap();
        assert!(!proper.holds);
        assert_eq!(proper.violations[0].state, "a2'");
        assert_eq!(out_of_play_states(&d).unwrap(), ["a2'"]);
        let c = clean(&d).unwrap();
        assert_eq!(c.state_count(), 3);
        assert!(check_proper(&c).unwrap().holds);
        assert_eq!(clean(&c).unwrap(), c);
        assert!(out_of_play_states(&alpha1()).unwrap().is_empty());
        assert_eq!(clean(&alpha1()).unwrap(), alpha1());
    }

    #[test]
    fn empty_and_fully_out_of_play() {
        let empty = Dynamics::empty(cat3());
        assert!(check_proper(&empty).unwrap().holds);
        assert!(check_deterministic(&empty).holds);
        let idle = DynamicsBuilder::new(cat3())
            .states("1", &["x"])
            .states("3", &["z"])
            .build()
            .unwrap();
        assert_eq!(clean(&idle).unwrap().state_count(), 0);
    }

    #[test]
    fn diagonal_only_is_deterministic() {
        let d = DynamicsBuilder::new(cat3())
            .states("1", &["x"])
            .states("2", &["y"])
            .states("3", &["z"])
            .diagonal_identities()
            .pairs("u", &[("x", "y")])
            .pairs("v", &[("y", "z")])
            .pairs("w", &[("x", "z")])
            .build()
            .unwrap();
        assert!(check_deterministic(&d).holds);
        assert!(check_categorical(&d).holds);
    }

    #[test]
    fn cap_limits_reports_not_verdicts() {
        let u = union_dynamics(&cat3(), &[alpha1(), alpha2()]).unwrap();
        let r = Checks::new(1).deterministic(&u);
        assert!(!r.holds);
        assert_eq!(r.violations.len(), 1);
        assert!(r.omitted > 0);
    }
}
