mod oracles;

use std::collections::{BTreeMap, BTreeSet};

use oracles::{
    brute_largest_subcategorical, flatten, oracle_h_realizations, oracle_open_realizations,
    oracle_primo, pairs_of,
};
use subcat::dynamics::{largest_subcategorical, union_dynamics, DynamicsBuilder};
use subcat::fixtures::{alpha1, alpha2, cat3, cat3_clock, mimicry_family, two_branch_open};
use subcat::generation::primo_engender;
use subcat::random::{self, FamilyShape, Style};
use subcat::temporal::{enumerate_h_realizations, enumerate_realizations, SizeGuard};

fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

#[test]
fn largest_example_is_frozen() {
    let g = DynamicsBuilder::new(cat3())
        .states("1", &["a1"])
        .states("2", &["a2"])
        .states("3", &["a3"])
        .diagonal_identities()
        .pair("u", "a1", "a2")
        .pair("w", "a1", "a3")
        .build()
        .unwrap();
    let oracle = brute_largest_subcategorical(&g);
    let ps = pairs_of(&oracle);
    assert!(ps["w"].is_empty());
    assert_eq!(ps["u"].len(), 1);
    assert_eq!(ps["Id1"].len() + ps["Id2"].len() + ps["Id3"].len(), 3);
    assert_eq!(largest_subcategorical(&g), oracle);
}

#[test]
fn largest_matches_brute_force() {
    let mut rng = random::rng(0x5eed);
    let mut checked = 0;
    while checked < 80 {
        let motor = random::random_motor(&mut rng);
        let g = random::random_dynamics(&mut rng, &motor, Style::Arbitrary, 6);
        let n: usize = g.transitions().iter().map(|t| t.len()).sum();
        if n > 12 {
            continue;
        }
        assert_eq!(largest_subcategorical(&g), brute_largest_subcategorical(&g));
        checked += 1;
    }
}

#[test]
fn alpha1_realizations_are_frozen() {
    let rs = oracle_h_realizations(&cat3_clock(), &alpha1());
    let expected: BTreeSet<_> = [
        map(&[]),
        map(&[("t1", "a1")]),
        map(&[("t1", "a1"), ("t2", "a2")]),
        map(&[("t1", "a1"), ("t2", "a2"), ("t3", "a3")]),
    ]
    .into_iter()
    .collect();
    assert_eq!(rs, expected);
    let got: BTreeSet<_> =
        enumerate_h_realizations(&cat3_clock(), &alpha1(), &SizeGuard::default())
            .unwrap()
            .into_iter()
            .map(|r| r.assignment)
            .collect();
    assert_eq!(got, expected);
}

#[test]
fn union_total_realizations_are_frozen() {
    let u = union_dynamics(&cat3(), &[alpha1(), alpha2()]).unwrap();
    let total: BTreeSet<_> = oracle_h_realizations(&cat3_clock(), &u)
        .into_iter()
        .filter(|m| m.len() == 3)
        .collect();
    let expected: BTreeSet<_> = [
        map(&[("t1", "a1"), ("t2", "a2"), ("t3", "a3")]),
        map(&[("t1", "a1"), ("t2", "a2'"), ("t3", "a3")]),
    ]
    .into_iter()
    .collect();
    assert_eq!(total, expected);
}

#[test]
fn two_branch_external_parts_are_frozen() {
    let a = two_branch_open();
    let oracle = oracle_open_realizations(&a);
    let parts: BTreeSet<_> = oracle.iter().map(|(_, m)| m.clone()).collect();
    assert_eq!(parts.len(), 6);
    let got = enumerate_realizations(&a, &SizeGuard::default()).unwrap();
    let got_all: BTreeSet<_> = got
        .all
        .iter()
        .map(|r| (r.parameter.clone().unwrap(), r.assignment.clone()))
        .collect();
    assert_eq!(got_all, oracle);
    assert_eq!(got.external_parts.len(), 6);
}

#[test]
fn realizations_match_all_partial_functions() {
    let mut rng = random::rng(0xc10c);
    let guard = SizeGuard::default();
    let mut checked = 0;
    while checked < 80 {
        let motor = random::random_motor(&mut rng);
        let h = random::random_clock(&mut rng, &motor, 6);
        if h.instant_count() > 6 {
            continue;
        }
        let d = random::random_dynamics(&mut rng, &motor, Style::Arbitrary, 8);
        if d.state_sets().iter().any(|s| s.len() > 4) {
            continue;
        }
        let got: BTreeSet<_> = enumerate_h_realizations(&h, &d, &guard)
            .unwrap()
            .into_iter()
            .map(|r| r.assignment)
            .collect();
        assert_eq!(got, oracle_h_realizations(&h, &d));

        let a = random::random_open(&mut rng, &h, "s", 8);
        let got: BTreeSet<_> = enumerate_realizations(&a, &guard)
            .unwrap()
            .all
            .into_iter()
            .map(|r| (r.parameter.unwrap(), r.assignment))
            .collect();
        assert_eq!(got, oracle_open_realizations(&a));
        checked += 1;
    }
}

#[test]
fn enumeration_order_is_canonical() {
    let mut rng = random::rng(99);
    for _ in 0..20 {
        let motor = random::random_motor(&mut rng);
        let h = random::random_clock(&mut rng, &motor, 6);
        let a = random::random_open(&mut rng, &h, "s", 8);
        let all = enumerate_realizations(&a, &SizeGuard::default())
            .unwrap()
            .all;
        let keys: Vec<_> = all
            .iter()
            .map(|r| {
                (
                    a.parameter_index(r.parameter.as_deref().unwrap()).unwrap(),
                    r.assignment.clone(),
                )
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}

#[test]
fn mimicry_primo_is_frozen() {
    let f = mimicry_family();
    let oracle = oracle_primo(&f);
    let p_u = &oracle.transitions[&("(p,p)".to_string(), "u".to_string())];
    let q_u = &oracle.transitions[&("(q,q)".to_string(), "u".to_string())];
    assert_eq!(
        p_u.iter().collect::<Vec<_>>(),
        [&("(x0,y0)".to_string(), "(x1,y1)".to_string())]
    );
    assert_eq!(
        q_u.iter().collect::<Vec<_>>(),
        [&("(x0,y0)".to_string(), "(x1',y1')".to_string())]
    );
    assert_eq!(oracle.states["1"].len(), 4);
    assert_eq!(
        flatten(&primo_engender(&f, &SizeGuard::default()).unwrap().result),
        oracle
    );
}

#[test]
fn primo_matches_set_comprehension() {
    let mut rng = random::rng(0xfa11);
    let shape = FamilyShape::default();
    for _ in 0..60 {
        let f = random::random_family_with(&mut rng, &shape);
        let g = primo_engender(&f, &SizeGuard::default()).unwrap();
        assert_eq!(flatten(&g.result), oracle_primo(&f));
    }
}
