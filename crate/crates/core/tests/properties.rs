use std::collections::BTreeMap;

use proptest::prelude::*;
use subcat::category::{underlying_graph, Functor};
use subcat::dynamics::{
    check_categorical, check_deterministic, check_proper, check_subcategorical, clean,
    is_subdynamics, out_of_play_states, union_dynamics, Dynamics,
};
use subcat::family::{interaction_from_predicate, DynamicFamily};
use subcat::generation::{mono_engender, primo_engender, quotient_engender};
use subcat::open::{
    check_open_dynamorphism, discrete_partition, full_partition, identity_on, parametric_quotient,
    OpenDynamics,
};
use subcat::random::{self, FamilyShape, Style};
use subcat::temporal::{
    enumerate_realizations, is_realization, succession, Realization, SizeGuard,
};

fn dynamics(seed: u64, style: Style) -> Dynamics {
    let mut rng = random::rng(seed);
    let motor = random::random_motor(&mut rng);
    random::random_dynamics(&mut rng, &motor, style, 8)
}

fn pair(seed: u64, style: Style) -> (Dynamics, Dynamics) {
    let mut rng = random::rng(seed);
    let motor = random::random_motor(&mut rng);
    (
        random::random_dynamics(&mut rng, &motor, style, 8),
        random::random_dynamics(&mut rng, &motor, style, 8),
    )
}

fn open(seed: u64) -> OpenDynamics {
    let mut rng = random::rng(seed);
    let motor = random::random_motor(&mut rng);
    let h = random::random_clock(&mut rng, &motor, 6);
    random::random_open(&mut rng, &h, "s", 8)
}

fn family(seed: u64) -> DynamicFamily {
    random::random_family_with(&mut random::rng(seed), &FamilyShape::default())
}

fn datation_respected(a: &OpenDynamics) -> bool {
    let h = a.clock();
    a.multi().slices().iter().all(|s| {
        let motor = s.motor();
        (0..motor.num_arrows()).all(|f| {
            (0..s.state_count()).all(|x| {
                s.image(f, x)
                    .all(|y| h.step(f, a.datation(x)) == Some(a.datation(y)))
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn categories_associate_and_graphs_keep_arrows(seed in any::<u64>()) {
        let c = random::random_motor(&mut random::rng(seed));
        for (f, g, gf) in c.composable_pairs() {
            for h in c.arrows_from(c.arrow(g).cod) {
                let left = c.compose(gf, h);
                let right = c.compose(f, c.compose(g, h).unwrap());
                prop_assert_eq!(left, right);
            }
        }
        let graph = underlying_graph(&c);
        prop_assert_eq!(graph.edges.len(), c.num_arrows());
        let mut names: Vec<_> = graph.edges.iter().map(|e| e.name.clone()).collect();
        names.dedup();
        prop_assert_eq!(names.len(), c.num_arrows());
        let id = Functor::identity(&c);
        prop_assert!(id.then(&id).is_ok());
    }

    #[test]
    fn deterministic_subcategorical_is_categorical(seed in any::<u64>()) {
        let d = dynamics(seed, Style::Deterministic);
        if check_deterministic(&d).holds && check_subcategorical(&d).holds {
            prop_assert!(check_categorical(&d).holds);
        }
    }

    #[test]
    fn unions_stay_subcategorical(seed in any::<u64>()) {
        let (a, b) = pair(seed, Style::SubCategorical);
        let u = union_dynamics(a.motor(), &[a.clone(), b.clone()]).unwrap();
        prop_assert!(check_subcategorical(&u).holds);
        prop_assert!(is_subdynamics(&a, &u).unwrap());
        let (ca, cb) = (clean(&a).unwrap(), clean(&b).unwrap());
        let cu = union_dynamics(a.motor(), &[ca, cb]).unwrap();
        prop_assert!(check_proper(&cu).unwrap().holds);
        prop_assert_eq!(union_dynamics(a.motor(), &[a.clone(), a.clone()]).unwrap(), a);
    }

    #[test]
    fn out_of_play_states_are_inert(seed in any::<u64>()) {
        let d = dynamics(seed, Style::SubCategorical);
        let motor = d.motor();
        for name in out_of_play_states(&d).unwrap() {
            let s = d.find(&name).unwrap();
            for f in 0..motor.num_arrows() {
                prop_assert_eq!(d.image(f, s).count(), 0);
                for x in 0..d.state_count() {
                    prop_assert!(d.image(f, x).all(|y| y != s));
                }
            }
        }
        let c = clean(&d).unwrap();
        prop_assert!(out_of_play_states(&c).unwrap().is_empty());
        prop_assert_eq!(clean(&c).unwrap(), c.clone());
        prop_assert!(check_proper(&c).unwrap().holds);
    }

    #[test]
    fn succession_is_a_preorder(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let motor = random::random_motor(&mut rng);
        let h = random::random_clock(&mut rng, &motor, 8);
        let s = succession(&h);
        prop_assert!(s.is_reflexive());
        prop_assert!(s.is_transitive());
    }

    #[test]
    fn realizations_are_past_closed_and_restrict(seed in any::<u64>()) {
        let a = open(seed);
        let h = a.clock();
        let set = enumerate_realizations(&a, &SizeGuard::default()).unwrap();
        for r in &set.all {
            for f in 0..h.motor().num_arrows() {
                for t in 0..h.instant_count() {
                    let Some(next) = h.step(f, t) else { continue };
                    if r.get(h.instant_name(t)).is_none() {
                        prop_assert!(r.get(h.instant_name(next)).is_none());
                    }
                }
            }
            // drop every instant at or after a chosen one: a past-closed subset
            if let Some(cut) = r.domain().next() {
                let t = h.find(cut).unwrap();
                let succ = succession(h);
                let restricted = Realization {
                    parameter: r.parameter.clone(),
                    assignment: r
                        .assignment
                        .iter()
                        .filter(|(x, _)| !succ.leq(t, h.find(x).unwrap()))
                        .map(|(x, y)| (x.clone(), y.clone()))
                        .collect(),
                };
                prop_assert!(is_realization(&a, &restricted).unwrap());
            }
        }
    }

    #[test]
    fn quotients_preserve_subcategoricity_and_datation(seed in any::<u64>()) {
        let a = open(seed);
        let mut rng = random::rng(seed ^ 1);
        let partition = random::random_partition(&mut rng, a.parameters());
        let q = a.quotient(&partition).unwrap();
        prop_assert!(q.multi().slices().iter().all(|s| check_subcategorical(s).holds));
        prop_assert!(datation_respected(&q));
        let discrete = a.quotient(&discrete_partition(a.parameters())).unwrap();
        for p in 0..a.parameters().len() {
            prop_assert_eq!(discrete.slice(p), a.slice(p));
        }
        // quotient then quotient again = quotient by the coarser partition
        let twice = parametric_quotient(q.multi(), &full_partition(q.parameters())).unwrap();
        let once = parametric_quotient(a.multi(), &full_partition(a.parameters())).unwrap();
        prop_assert_eq!(twice.slice(0), once.slice(0));
    }

    #[test]
    fn identity_quadruples_are_dynamorphisms(seed in any::<u64>()) {
        let a = open(seed);
        let theta: BTreeMap<String, String> = a.parameters().iter().map(|p| (p.clone(), p.clone())).collect();
        let id = Functor::identity(a.motor());
        let r = check_open_dynamorphism(&theta, &id, &identity_on(a.states()), &identity_on(a.clock().dynamics()), &a, &a);
        prop_assert!(r.holds, "{:?}", r.violations);
        if a.is_deterministic() {
            prop_assert!(a.multi().slices().iter().all(|s| check_categorical(s).holds));
        }
    }

    #[test]
    fn generated_dynamics_are_subcategorical(seed in any::<u64>()) {
        let f = family(seed);
        let guard = SizeGuard::default();
        let primo = primo_engender(&f, &guard).unwrap();
        prop_assert!(primo.result.multi().slices().iter().all(|s| check_subcategorical(s).holds));
        prop_assert!(datation_respected(&primo.result));
        let mono = mono_engender(&f, &guard).unwrap();
        prop_assert_eq!(mono.result.parameters().len(), 1);
        let mut rng = random::rng(seed);
        let partition = random::random_partition(&mut rng, primo.result.parameters());
        let q = quotient_engender(&f, &partition, &guard).unwrap();
        prop_assert!(q.result.multi().slices().iter().all(|s| check_subcategorical(s).holds));
    }

    #[test]
    fn provenance_is_sound(seed in any::<u64>()) {
        let f = family(seed);
        let g = primo_engender(&f, &SizeGuard::default()).unwrap();
        let tuples = f.interaction().tuples();
        let a = &g.result;
        for e in &g.provenance {
            let witness = &tuples[e.witness];
            let mu: Vec<String> = witness.iter().map(|r| r.parameter.clone().unwrap()).collect();
            prop_assert_eq!(format!("({})", mu.join(",")), e.parameter.clone());
            // the generated state names are tuples of component states
            let from: Vec<&str> = e.from.trim_matches(|c| c == '(' || c == ')').split(',').collect();
            let to: Vec<&str> = e.to.trim_matches(|c| c == '(' || c == ')').split(',').collect();
            for (i, r) in witness.iter().enumerate() {
                let c = f.component(i);
                for s in [from[i], to[i]] {
                    let t = c.clock().instant_name(c.datation(c.find(s).unwrap()));
                    prop_assert_eq!(r.get(t), Some(s));
                }
            }
            prop_assert!(a.find(&e.from).is_some() && a.find(&e.to).is_some());
        }
    }

    #[test]
    fn interactions_stay_coherent_under_union(seed in any::<u64>()) {
        let f = family(seed);
        let r = f.interaction();
        for mu in r.rb_image() {
            prop_assert!(!r.rb_inverse(&mu).tuples.is_empty());
        }
        let components = f.components().to_vec();
        let small = interaction_from_predicate(f.index(), &components, &SizeGuard::default(), |t| {
            t.iter().all(|r| r.is_empty())
        })
        .unwrap();
        let u = r.union(&small).unwrap();
        for tuple in u.tuples() {
            for (i, part) in tuple.iter().enumerate() {
                prop_assert!(is_realization(f.component(i), part).unwrap());
            }
        }
    }
}
