//! Small reference instances: the three-object motor, its two branch
//! dynamics, their clock, and the families used by the demos.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::category::{validate_category, Category, Functor, RawCategory};
use crate::dynamics::{Dynamics, DynamicsBuilder};
use crate::family::{build_family, build_interaction, DynamicFamily, RawSynchronization};
use crate::open::{validate_open_dynamics, MultiDynamics, OpenDynamics};
use crate::temporal::{Clock, Realization};

/// The motor generated by `1 → 2 → 3`: arrows `u`, `v` and `w = v∘u`.
pub fn cat3() -> Arc<Category> {
    let raw = RawCategory::new()
        .object("1")
        .object("2")
        .object("3")
        .identity("1", "Id1")
        .identity("2", "Id2")
        .identity("3", "Id3")
        .arrow("u", "1", "2")
        .arrow("v", "2", "3")
        .arrow("w", "1", "3")
        .compose("u", "v", "w");
    Arc::new(validate_category(&raw).expect("valid motor"))
}

/// One object `*`, one arrow `Id*`.
pub fn terminal() -> Arc<Category> {
    let raw = RawCategory::new().object("*").identity("*", "Id*");
    Arc::new(validate_category(&raw).expect("valid motor"))
}

/// The motor `0 → 1` with a single non-identity arrow `u`.
pub fn arrow_motor() -> Arc<Category> {
    let raw = RawCategory::new()
        .object("0")
        .object("1")
        .identity("0", "Id0")
        .identity("1", "Id1")
        .arrow("u", "0", "1");
    Arc::new(validate_category(&raw).expect("valid motor"))
}

fn branch(u: &str, v: &[(&str, &str)]) -> Dynamics {
    DynamicsBuilder::new(cat3())
        .states("1", &["a1"])
        .states("2", &["a2", "a2'"])
        .states("3", &["a3", "a3'"])
        .diagonal_identities()
        .pair("u", "a1", u)
        .pairs("v", v)
        .pair("w", "a1", "a3")
        .build()
        .expect("valid dynamics")
}

/// First branch: `u(a1) = a2`, `v(a2) = a3`, `w(a1) = a3`.
pub fn alpha1() -> Dynamics {
    branch("a2", &[("a2", "a3")])
}

/// Second branch: `u(a1) = a2'`, `v(a2') = a3`, `v(a2) = a3'`, `w(a1) = a3`.
pub fn alpha2() -> Dynamics {
    branch("a2'", &[("a2'", "a3"), ("a2", "a3'")])
}

/// The clock `t1 → t2 → t3` on [`cat3`].
pub fn cat3_clock() -> Clock {
    let d = DynamicsBuilder::new(cat3())
        .states("1", &["t1"])
        .states("2", &["t2"])
        .states("3", &["t3"])
        .diagonal_identities()
        .pair("u", "t1", "t2")
        .pair("v", "t2", "t3")
        .pair("w", "t1", "t3")
        .build()
        .expect("valid dynamics");
    Clock::new(d).expect("valid clock")
}

fn names(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn branch_datation() -> BTreeMap<String, String> {
    names(&[
        ("a1", "t1"),
        ("a2", "t2"),
        ("a2'", "t2"),
        ("a3", "t3"),
        ("a3'", "t3"),
    ])
}

/// [`alpha1`] as a single-parameter open dynamics over [`cat3_clock`].
pub fn alpha1_open() -> OpenDynamics {
    let multi = MultiDynamics::mono(alpha1()).expect("sub-categorical");
    validate_open_dynamics(multi, cat3_clock(), &branch_datation()).expect("valid open dynamics")
}

/// Parameters `mu1`, `mu2` with slices [`alpha1`], [`alpha2`].
pub fn two_branch_open() -> OpenDynamics {
    let multi = MultiDynamics::new(vec!["mu1".into(), "mu2".into()], vec![alpha1(), alpha2()])
        .expect("sub-categorical");
    validate_open_dynamics(multi, cat3_clock(), &branch_datation()).expect("valid open dynamics")
}

fn realization(param: &str, pairs: &[(&str, &str)]) -> Realization {
    Realization {
        parameter: Some(param.to_owned()),
        assignment: names(pairs),
    }
}

/// A two-branch component on [`arrow_motor`]: slice `p` sends `{s}0` to
/// `{s}1`, slice `q` sends it to `{s}1'`.
pub fn mimic_component(s: &str) -> OpenDynamics {
    let (s0, s1, s1p) = (format!("{s}0"), format!("{s}1"), format!("{s}1'"));
    let base = DynamicsBuilder::new(arrow_motor())
        .states("0", &[&s0])
        .states("1", &[&s1, &s1p])
        .diagonal_identities();
    let p = base.clone().pair("u", &s0, &s1).build().expect("valid");
    let q = base.pair("u", &s0, &s1p).build().expect("valid");
    let clock = DynamicsBuilder::new(arrow_motor())
        .states("0", &["t0"])
        .states("1", &["t1"])
        .diagonal_identities()
        .pair("u", "t0", "t1")
        .build()
        .expect("valid");
    let multi =
        MultiDynamics::new(vec!["p".into(), "q".into()], vec![p, q]).expect("sub-categorical");
    let tau = names(&[(&s0, "t0"), (&s1, "t1"), (&s1p, "t1")]);
    validate_open_dynamics(multi, Clock::new(clock).expect("clock"), &tau)
        .expect("valid open dynamics")
}

/// Two deterministic two-branch components whose interaction makes them
/// follow the same branch.
pub fn mimicry_family() -> DynamicFamily {
    let a = Arc::new(mimic_component("x"));
    let b = Arc::new(mimic_component("y"));
    let index = vec!["A".to_owned(), "B".to_owned()];
    let tuples = vec![
        vec![
            realization("p", &[("t0", "x0"), ("t1", "x1")]),
            realization("p", &[("t0", "y0"), ("t1", "y1")]),
        ],
        vec![
            realization("q", &[("t0", "x0"), ("t1", "x1'")]),
            realization("q", &[("t0", "y0"), ("t1", "y1'")]),
        ],
    ];
    let components = vec![a, b];
    let r = build_interaction(&index, &components, tuples).expect("coherent");
    let mut syncs = BTreeMap::new();
    syncs.insert(
        "B".to_owned(),
        RawSynchronization {
            functor: Functor::identity(&arrow_motor()).to_raw(),
            delta: names(&[("t0", "t0"), ("t1", "t1")]),
        },
    );
    build_family(index, "A", components, &syncs, r).expect("valid family")
}

/// One categorical component copying the clock, with the total chain as
/// interaction.
pub fn chain_family() -> DynamicFamily {
    let d = DynamicsBuilder::new(cat3())
        .states("1", &["c1"])
        .states("2", &["c2"])
        .states("3", &["c3"])
        .diagonal_identities()
        .pair("u", "c1", "c2")
        .pair("v", "c2", "c3")
        .pair("w", "c1", "c3")
        .build()
        .expect("valid");
    let a = validate_open_dynamics(
        MultiDynamics::mono(d).expect("sub-categorical"),
        cat3_clock(),
        &names(&[("c1", "t1"), ("c2", "t2"), ("c3", "t3")]),
    )
    .expect("valid open dynamics");
    let components = vec![Arc::new(a)];
    let index = vec!["A".to_owned()];
    let r = build_interaction(
        &index,
        &components,
        vec![vec![realization(
            "*",
            &[("t1", "c1"), ("t2", "c2"), ("t3", "c3")],
        )]],
    )
    .expect("coherent");
    build_family(index, "A", components, &BTreeMap::new(), r).expect("valid family")
}
