//! Brute-force reference implementations, written from the definitions and
//! sharing no code with the library beyond its data accessors.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use subcat::dynamics::{check_subcategorical, Dynamics, Transition};
use subcat::family::DynamicFamily;
use subcat::open::OpenDynamics;
use subcat::temporal::Clock;

pub type Pairs = BTreeSet<(String, String)>;

/// Arrow name ↦ named pairs.
pub fn pairs_of(d: &Dynamics) -> BTreeMap<String, Pairs> {
    let motor = d.motor();
    (0..motor.num_arrows())
        .map(|f| {
            let ps = d
                .transition(f)
                .named_pairs()
                .map(|(a, b)| (a.to_owned(), b.to_owned()))
                .collect();
            (motor.arrow_name(f).to_owned(), ps)
        })
        .collect()
}

fn with_pairs(g: &Dynamics, keep: &[(usize, usize, usize)]) -> Dynamics {
    let motor = g.motor();
    let ts = (0..motor.num_arrows())
        .map(|f| {
            let t = g.transition(f);
            Transition::from_pairs(
                t.source().clone(),
                t.target().clone(),
                keep.iter()
                    .filter(|(a, _, _)| *a == f)
                    .map(|&(_, x, y)| (x, y)),
            )
        })
        .collect();
    g.with_transitions(ts).unwrap()
}

/// Largest sub-categorical sub-dynamics with the same states, by trying
/// every subset of pairs. Panics if the sub-categorical subsets have no
/// maximum.
pub fn brute_largest_subcategorical(g: &Dynamics) -> Dynamics {
    let all: Vec<(usize, usize, usize)> = (0..g.motor().num_arrows())
        .flat_map(|f| g.transition(f).pairs().map(move |(a, b)| (f, a, b)))
        .collect();
    assert!(all.len() <= 16, "too many pairs for brute force");
    let mut good: Vec<u32> = Vec::new();
    for mask in 0u32..(1 << all.len()) {
        let keep: Vec<_> = (0..all.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| all[i])
            .collect();
        if check_subcategorical(&with_pairs(g, &keep)).holds {
            good.push(mask);
        }
    }
    let best = *good.iter().max_by_key(|m| m.count_ones()).unwrap();
    assert!(
        good.iter().all(|m| m & !best == 0),
        "no maximum sub-categorical sub-dynamics"
    );
    let keep: Vec<_> = (0..all.len())
        .filter(|i| best >> i & 1 == 1)
        .map(|i| all[i])
        .collect();
    with_pairs(g, &keep)
}

/// All partial maps `instant ↦ state` (as names), by odometer over every
/// instant's options including "undefined".
fn all_partial_maps(instants: &[String], options: &[Vec<String>]) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for (t, opts) in instants.iter().zip(options) {
        let mut next = Vec::new();
        for m in &out {
            next.push(m.clone());
            for s in opts {
                let mut m = m.clone();
                m.insert(t.clone(), s.clone());
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn image(d: &Dynamics, arrow: &str, state: &str) -> BTreeSet<String> {
    let f = d.motor().arrow_index(arrow).unwrap();
    let t = d.transition(f);
    match t.source().index_of(state) {
        Some(a) => t
            .image(a)
            .iter()
            .map(|&b| t.target().name(b).to_owned())
            .collect(),
        None => BTreeSet::new(),
    }
}

/// `𝔰(f^h(s)) ⊂ f^d(𝔰(s))` for every arrow and instant, undefined read as
/// the empty set.
fn is_h_realization(h: &Clock, d: &Dynamics, m: &BTreeMap<String, String>) -> bool {
    let hd = h.dynamics();
    let motor = hd.motor();
    for f in 0..motor.num_arrows() {
        let name = motor.arrow_name(f);
        for (s, next) in hd.transition(f).named_pairs() {
            let left: BTreeSet<String> = m.get(next).into_iter().cloned().collect();
            let right = m.get(s).map(|a| image(d, name, a)).unwrap_or_default();
            if !left.is_subset(&right) {
                return false;
            }
        }
    }
    true
}

pub fn oracle_h_realizations(h: &Clock, d: &Dynamics) -> BTreeSet<BTreeMap<String, String>> {
    let hd = h.dynamics();
    let instants = hd.all_states().names().to_vec();
    let options: Vec<Vec<String>> = (0..instants.len())
        .map(|t| d.states(hd.typ(t)).names().to_vec())
        .collect();
    all_partial_maps(&instants, &options)
        .into_iter()
        .filter(|m| is_h_realization(h, d, m))
        .collect()
}

/// `(λ, 𝔞)` pairs of an open dynamics: datation and step conditions.
pub fn oracle_open_realizations(a: &OpenDynamics) -> BTreeSet<(String, BTreeMap<String, String>)> {
    let h = a.clock();
    let hd = h.dynamics();
    let instants = hd.all_states().names().to_vec();
    let st = a.states();
    let options: Vec<Vec<String>> = (0..instants.len())
        .map(|t| {
            (0..st.state_count())
                .filter(|&s| a.datation(s) == t)
                .map(|s| st.state_name(s).to_owned())
                .collect()
        })
        .collect();
    let maps = all_partial_maps(&instants, &options);
    let mut out = BTreeSet::new();
    for (p, name) in a.parameters().iter().enumerate() {
        for m in &maps {
            if is_h_realization(h, a.slice(p), m) {
                out.insert((name.clone(), m.clone()));
            }
        }
    }
    out
}

/// A generated open dynamics as plain sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub states: BTreeMap<String, BTreeSet<String>>,
    pub datation: BTreeMap<String, String>,
    pub transitions: BTreeMap<(String, String), Pairs>,
}

pub fn flatten(a: &OpenDynamics) -> Generated {
    let st = a.states();
    let motor = st.motor();
    let states = (0..motor.num_objects())
        .map(|o| {
            (
                motor.object_name(o).to_owned(),
                st.states(o).names().iter().cloned().collect(),
            )
        })
        .collect();
    let datation = (0..st.state_count())
        .map(|s| {
            (
                st.state_name(s).to_owned(),
                a.clock().instant_name(a.datation(s)).to_owned(),
            )
        })
        .collect();
    let mut transitions = BTreeMap::new();
    for (p, param) in a.parameters().iter().enumerate() {
        for (arrow, ps) in pairs_of(a.slice(p)) {
            transitions.insert((param.clone(), arrow), ps);
        }
    }
    Generated {
        states,
        datation,
        transitions,
    }
}

/// `[F]_p` by the set comprehension: enumerate the full product of
/// component states, keep synchronized tuples, and test every candidate
/// pair against every tuple of the interaction.
pub fn oracle_primo(f: &DynamicFamily) -> Generated {
    let n = f.index().len();
    let i0 = f.synchronizer();
    let a0 = f.component(i0);
    let h0 = a0.clock();
    let motor = h0.motor();
    let tau = |i: usize, s: &str| -> String {
        let a = f.component(i);
        let g = a.find(s).unwrap();
        a.clock().instant_name(a.datation(g)).to_owned()
    };
    let delta = |i: usize, t: &str| -> String {
        let ti = h0.find(t).unwrap();
        f.component(i)
            .clock()
            .instant_name(f.synchronization(i).delta[ti])
            .to_owned()
    };
    let typ_name = |i: usize, s: &str| -> String {
        let a = f.component(i);
        a.motor()
            .object_name(a.states().typ(a.find(s).unwrap()))
            .to_owned()
    };

    // full product of all component states
    let mut product: Vec<Vec<String>> = vec![Vec::new()];
    for i in 0..n {
        let names = f.component(i).states().all_states().names().to_vec();
        product = product
            .into_iter()
            .flat_map(|t| {
                names.iter().map(move |s| {
                    let mut t = t.clone();
                    t.push(s.clone());
                    t
                })
            })
            .collect();
    }
    let name = |t: &[String]| format!("({})", t.join(","));
    let mut states: BTreeMap<String, BTreeSet<String>> = motor
        .objects()
        .iter()
        .map(|o| (o.clone(), BTreeSet::new()))
        .collect();
    let mut datation = BTreeMap::new();
    let mut typed: Vec<(String, Vec<String>)> = Vec::new();
    for t in &product {
        let object = typ_name(i0, &t[i0]);
        let o = motor.object_index(&object).unwrap();
        let t0 = tau(i0, &t[i0]);
        let ok = (0..n).all(|i| {
            let functor = &f.synchronization(i).functor;
            let di = f
                .component(i)
                .motor()
                .object_name(functor.object(o))
                .to_owned();
            typ_name(i, &t[i]) == di && tau(i, &t[i]) == delta(i, &t0)
        });
        if ok {
            states.get_mut(&object).unwrap().insert(name(t));
            datation.insert(name(t), t0);
            typed.push((object, t.clone()));
        }
    }

    let tuples = f.interaction().tuples();
    let params: BTreeSet<Vec<String>> = tuples
        .iter()
        .map(|tu| tu.iter().map(|r| r.parameter.clone().unwrap()).collect())
        .collect();
    let mut transitions = BTreeMap::new();
    for mu in &params {
        let pname = name(mu);
        for e in 0..motor.num_arrows() {
            let arrow = motor.arrow(e);
            let mut ps = Pairs::new();
            for (so, a) in &typed {
                if *so != motor.object_name(arrow.dom) {
                    continue;
                }
                let ta = h0.find(&tau(i0, &a[i0])).unwrap();
                let target = h0.instant_name(h0.step(e, ta).unwrap()).to_owned();
                for (to, b) in &typed {
                    if *to != motor.object_name(arrow.cod) || tau(i0, &b[i0]) != target {
                        continue;
                    }
                    let witnessed = tuples.iter().any(|tu| {
                        let tmu: Vec<String> =
                            tu.iter().map(|r| r.parameter.clone().unwrap()).collect();
                        tmu == *mu
                            && (0..n).all(|i| {
                                tu[i].get(&tau(i, &a[i])) == Some(a[i].as_str())
                                    && tu[i].get(&tau(i, &b[i])) == Some(b[i].as_str())
                            })
                    });
                    if witnessed {
                        ps.insert((name(a), name(b)));
                    }
                }
            }
            transitions.insert((pname.clone(), arrow.name.clone()), ps);
        }
    }
    Generated {
        states,
        datation,
        transitions,
    }
}
