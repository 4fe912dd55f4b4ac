//! Seeded random motors, dynamics, clocks and families.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::{validate_category, Category, Functor, RawCategory};
use crate::dynamics::{largest_subcategorical, Dynamics, DynamicsBuilder};
use crate::family::{build_family, build_interaction, DynamicFamily, RawSynchronization};
use crate::fixtures::terminal;
use crate::open::{MultiDynamics, OpenDynamics};
use crate::temporal::{enumerate_realizations, Clock, Realization, SizeGuard};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Objects `0..n`, one arrow `i → j` for each `i < j`.
pub fn chain_motor(n: usize) -> Arc<Category> {
    let mut raw = RawCategory::new();
    for i in 0..n {
        raw = raw.object(&i.to_string());
    }
    for i in 0..n {
        raw = raw.identity(&i.to_string(), &format!("Id{i}"));
    }
    for i in 0..n {
        for j in i + 1..n {
            raw = raw.arrow(&format!("a{i}{j}"), &i.to_string(), &j.to_string());
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                raw = raw.compose(
                    &format!("a{i}{j}"),
                    &format!("a{j}{k}"),
                    &format!("a{i}{k}"),
                );
            }
        }
    }
    Arc::new(validate_category(&raw).expect("chain is a category"))
}

/// `0 → 1 → 3` and `0 → 2 → 3`; the two composites coincide when
/// `commutative`.
pub fn diamond_motor(commutative: bool) -> Arc<Category> {
    let mut raw = RawCategory::new();
    for o in ["0", "1", "2", "3"] {
        raw = raw.object(o);
    }
    for o in ["0", "1", "2", "3"] {
        raw = raw.identity(o, &format!("Id{o}"));
    }
    raw = raw
        .arrow("f", "0", "1")
        .arrow("g", "1", "3")
        .arrow("h", "0", "2")
        .arrow("k", "2", "3");
    if commutative {
        raw = raw
            .arrow("d", "0", "3")
            .compose("f", "g", "d")
            .compose("h", "k", "d");
    } else {
        raw = raw
            .arrow("gf", "0", "3")
            .arrow("kh", "0", "3")
            .compose("f", "g", "gf")
            .compose("h", "k", "kh");
    }
    Arc::new(validate_category(&raw).expect("diamond is a category"))
}

/// The cyclic monoid `Z/n` on one object `*`, generator `c`.
pub fn cyclic_motor(n: usize) -> Arc<Category> {
    assert!(n >= 1);
    let name = |i: usize| {
        if i.is_multiple_of(n) {
            "Id*".to_owned()
        } else {
            format!("c{}", i % n)
        }
    };
    let mut raw = RawCategory::new().object("*").identity("*", "Id*");
    for i in 1..n {
        raw = raw.arrow(&name(i), "*", "*");
    }
    for i in 1..n {
        for j in 1..n {
            raw = raw.compose(&name(i), &name(j), &name(i + j));
        }
    }
    Arc::new(validate_category(&raw).expect("cyclic monoid is a category"))
}

pub fn random_motor<R: Rng>(rng: &mut R) -> Arc<Category> {
    match rng.gen_range(0..4) {
        0 => chain_motor(rng.gen_range(1..=4)),
        1 => diamond_motor(false),
        2 => diamond_motor(true),
        _ => cyclic_motor(rng.gen_range(2..=3)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// Any relation.
    Arbitrary,
    /// One image per state, diagonal identities, composites derived.
    Deterministic,
    /// [`Style::Arbitrary`] cut down to its largest sub-categorical part.
    SubCategorical,
}

/// States are named `{object}.{k}`, so two random dynamics over the same
/// motor share names and their unions are non-trivial.
pub fn random_dynamics<R: Rng>(
    rng: &mut R,
    motor: &Arc<Category>,
    style: Style,
    max_states: usize,
) -> Dynamics {
    let n = motor.num_objects();
    let mut counts = vec![0usize; n];
    let mut budget = max_states;
    for c in counts.iter_mut() {
        let want = rng.gen_range(0..=3).min(budget);
        *c = want;
        budget -= want;
    }
    let names: Vec<Vec<String>> = (0..n)
        .map(|o| {
            (0..counts[o])
                .map(|k| format!("{}.{k}", motor.object_name(o)))
                .collect()
        })
        .collect();
    let mut b = DynamicsBuilder::new(motor.clone());
    for (o, ns) in names.iter().enumerate() {
        b = b.states(motor.object_name(o), ns);
    }
    let mut pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); motor.num_arrows()];
    for (f, arrow) in motor.arrows().iter().enumerate() {
        let (src, tgt) = (counts[arrow.dom], counts[arrow.cod]);
        for a in 0..src {
            match style {
                Style::Deterministic if motor.is_identity(f) => pairs[f].push((a, a)),
                Style::Deterministic => {
                    if tgt > 0 {
                        pairs[f].push((a, rng.gen_range(0..tgt)));
                    }
                }
                _ if motor.is_identity(f) => {
                    if rng.gen_bool(0.85) {
                        pairs[f].push((a, a));
                    }
                    if tgt > 1 && rng.gen_bool(0.1) {
                        pairs[f].push((a, rng.gen_range(0..tgt)));
                    }
                }
                _ => {
                    for c in 0..tgt {
                        if rng.gen_bool(0.4) {
                            pairs[f].push((a, c));
                        }
                    }
                }
            }
        }
    }
    if style == Style::Deterministic {
        derive_composites(motor, &mut pairs);
    }
    for (f, ps) in pairs.iter().enumerate() {
        for &(a, c) in ps {
            let arrow = motor.arrow(f);
            b = b.pair(&arrow.name, &names[arrow.dom][a], &names[arrow.cod][c]);
        }
    }
    let d = b.build().expect("random dynamics is well formed");
    match style {
        Style::SubCategorical => largest_subcategorical(&d),
        _ => d,
    }
}

/// Replaces the transition of every non-identity composite by the chained
/// relation, in document order.
fn derive_composites(motor: &Category, pairs: &mut [Vec<(usize, usize)>]) {
    for (f, g, gf) in motor.composable_pairs().collect::<Vec<_>>() {
        if motor.is_identity(f)
            || motor.is_identity(g)
            || motor.is_identity(gf)
            || gf == f
            || gf == g
        {
            continue;
        }
        let mut chained: Vec<(usize, usize)> = pairs[f]
            .iter()
            .flat_map(|&(a, b)| {
                pairs[g]
                    .iter()
                    .filter(move |&&(x, _)| x == b)
                    .map(move |&(_, c)| (a, c))
            })
            .collect();
        chained.sort_unstable();
        chained.dedup();
        pairs[gf] = chained;
    }
}

/// `Hom(x, −)` with instants named `{tag}{arrow}`.
type Representable = (Vec<Vec<String>>, Vec<(usize, String, String)>);

fn representable(motor: &Arc<Category>, x: usize, tag: &str) -> Representable {
    let mut states = vec![Vec::new(); motor.num_objects()];
    let from_x: Vec<usize> = motor.arrows_from(x).collect();
    for &g in &from_x {
        states[motor.arrow(g).cod].push(format!("{tag}{}", motor.arrow_name(g)));
    }
    let mut pairs = Vec::new();
    for &g in &from_x {
        for f in motor.arrows_from(motor.arrow(g).cod) {
            let fg = motor.compose(g, f).expect("composable");
            pairs.push((
                f,
                format!("{tag}{}", motor.arrow_name(g)),
                format!("{tag}{}", motor.arrow_name(fg)),
            ));
        }
    }
    (states, pairs)
}

/// A coproduct of one or two representables, each optionally quotiented by
/// a random congruence. At most `max_instants` instants when possible.
pub fn random_clock<R: Rng>(rng: &mut R, motor: &Arc<Category>, max_instants: usize) -> Clock {
    let copies = rng.gen_range(1..=2);
    let mut states = vec![Vec::new(); motor.num_objects()];
    let mut pairs = Vec::new();
    for copy in 0..copies {
        let x = rng.gen_range(0..motor.num_objects());
        let (s, p) = representable(motor, x, &format!("h{copy}:"));
        let size: usize = s.iter().map(Vec::len).sum();
        let current: usize = states.iter().map(Vec::len).sum();
        if copy > 0 && current + size > max_instants {
            break;
        }
        for (o, names) in s.into_iter().enumerate() {
            states[o].extend(names);
        }
        pairs.extend(p);
    }
    let mut b = DynamicsBuilder::new(motor.clone());
    for (o, names) in states.iter().enumerate() {
        b = b.states(motor.object_name(o), names);
    }
    for (f, x, y) in &pairs {
        b = b.pair(motor.arrow_name(*f), x, y);
    }
    let clock = Clock::new(b.build().expect("representable")).expect("representables are clocks");
    if rng.gen_bool(0.4) {
        random_quotient(rng, &clock).0
    } else {
        clock
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// A quotient of `h` by the congruence generated by one random pair of
/// same-type instants, with the quotient map `t ↦ [t]`.
pub fn random_quotient<R: Rng>(rng: &mut R, h: &Clock) -> (Clock, Vec<usize>) {
    let n = h.instant_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let same_type: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
        .filter(|&(s, t)| h.typ(s) == h.typ(t))
        .collect();
    if let Some(&(s, t)) = same_type.choose(rng) {
        let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
        parent[rs.max(rt)] = rs.min(rt);
        loop {
            let mut changed = false;
            for f in 0..h.motor().num_arrows() {
                for s in 0..n {
                    for t in s + 1..n {
                        if find(&mut parent, s) != find(&mut parent, t) {
                            continue;
                        }
                        if let (Some(fs), Some(ft)) = (h.step(f, s), h.step(f, t)) {
                            let (a, b) = (find(&mut parent, fs), find(&mut parent, ft));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    let rep: Vec<usize> = (0..n).map(|t| find(&mut parent, t)).collect();
    let motor = h.motor();
    let mut b = DynamicsBuilder::new(motor.clone());
    for o in 0..motor.num_objects() {
        let names: Vec<&str> = (0..n)
            .filter(|&t| rep[t] == t && h.typ(t) == o)
            .map(|t| h.instant_name(t))
            .collect();
        b = b.states(motor.object_name(o), &names);
    }
    for f in 0..motor.num_arrows() {
        for t in 0..n {
            if let Some(u) = h.step(f, t) {
                b = b.pair(
                    motor.arrow_name(f),
                    h.instant_name(rep[t]),
                    h.instant_name(rep[u]),
                );
            }
        }
    }
    let q = Clock::new(b.build().expect("quotient is well formed"))
        .expect("congruence quotient is a clock");
    let map = rep
        .iter()
        .map(|&r| q.find(h.instant_name(r)).expect("representative"))
        .collect();
    (q, map)
}

/// The clock with every instant renamed by `rename`.
pub fn renamed_clock(h: &Clock, rename: impl Fn(&str) -> String) -> Clock {
    let motor = h.motor();
    let d = h.dynamics();
    let mut b = DynamicsBuilder::new(motor.clone());
    for o in 0..motor.num_objects() {
        let names: Vec<String> = d.states(o).names().iter().map(|n| rename(n)).collect();
        b = b.states(motor.object_name(o), &names);
    }
    for f in 0..motor.num_arrows() {
        for (x, y) in d.transition(f).named_pairs() {
            b = b.pair(motor.arrow_name(f), &rename(x), &rename(y));
        }
    }
    Clock::new(b.build().expect("renaming is well formed")).expect("renaming preserves clocks")
}

/// An open dynamics over `h`: one or two states per instant (at most
/// `max_states`), one or two parameters, slices biased toward deterministic
/// choices and cut down to their largest sub-categorical part.
pub fn random_open<R: Rng>(
    rng: &mut R,
    h: &Clock,
    prefix: &str,
    max_states: usize,
) -> OpenDynamics {
    let motor = h.motor();
    let n = h.instant_count();
    let mut per_instant = vec![1usize; n];
    let mut total = n;
    for c in per_instant.iter_mut() {
        if total < max_states && rng.gen_bool(0.5) {
            *c = 2;
            total += 1;
        }
    }
    // states[t] lists names dated t
    let mut counter = 0;
    let at: Vec<Vec<String>> = per_instant
        .iter()
        .map(|&c| {
            (0..c)
                .map(|_| {
                    counter += 1;
                    format!("{prefix}{counter}")
                })
                .collect()
        })
        .collect();
    let params: Vec<String> = (0..rng.gen_range(1..=2)).map(|p| format!("p{p}")).collect();
    let mut slices = Vec::with_capacity(params.len());
    for _ in &params {
        let mut pairs: Vec<Vec<(String, String)>> = vec![Vec::new(); motor.num_arrows()];
        for (f, row) in pairs.iter_mut().enumerate() {
            for t in 0..n {
                let Some(u) = h.step(f, t) else { continue };
                for a in &at[t] {
                    if motor.is_identity(f) {
                        if rng.gen_bool(0.9) {
                            row.push((a.clone(), a.clone()));
                        }
                        continue;
                    }
                    let roll: f64 = rng.gen();
                    let targets = &at[u];
                    if roll < 0.7 {
                        row.push((a.clone(), targets.choose(rng).expect("non-empty").clone()));
                    } else if roll < 0.85 {
                        for b in targets {
                            row.push((a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        if rng.gen_bool(0.6) {
            derive_named(motor, &mut pairs);
        }
        let mut b = DynamicsBuilder::new(motor.clone());
        for o in 0..motor.num_objects() {
            let names: Vec<&String> = (0..n)
                .filter(|&t| h.typ(t) == o)
                .flat_map(|t| at[t].iter())
                .collect();
            b = b.states(motor.object_name(o), &names);
        }
        for (f, ps) in pairs.iter().enumerate() {
            for (x, y) in ps {
                b = b.pair(motor.arrow_name(f), x, y);
            }
        }
        slices.push(largest_subcategorical(&b.build().expect("well formed")));
    }
    let tau: Vec<usize> = {
        let d = &slices[0];
        (0..d.state_count())
            .map(|s| {
                let name = d.state_name(s);
                (0..n)
                    .find(|&t| at[t].iter().any(|x| x == name))
                    .expect("dated")
            })
            .collect()
    };
    let multi = MultiDynamics::new(params, slices).expect("slices are sub-categorical");
    OpenDynamics::new(multi, h.clone(), tau).expect("random slices respect datation")
}

fn derive_named(motor: &Category, pairs: &mut [Vec<(String, String)>]) {
    for (f, g, gf) in motor.composable_pairs().collect::<Vec<_>>() {
        if motor.is_identity(f)
            || motor.is_identity(g)
            || motor.is_identity(gf)
            || gf == f
            || gf == g
        {
            continue;
        }
        let mut chained: Vec<(String, String)> = pairs[f]
            .iter()
            .flat_map(|(a, b)| {
                pairs[g]
                    .iter()
                    .filter(move |(x, _)| x == b)
                    .map(move |(_, c)| (a.clone(), c.clone()))
            })
            .collect();
        chained.sort();
        chained.dedup();
        pairs[gf] = chained;
    }
}

/// Knobs for [`random_family`].
#[derive(Clone, Copy, Debug)]
pub struct FamilyShape {
    pub max_components: usize,
    pub max_instants: usize,
    pub max_states: usize,
    pub max_tuples: usize,
}

impl Default for FamilyShape {
    fn default() -> Self {
        Self {
            max_components: 3,
            max_instants: 8,
            max_states: 8,
            max_tuples: 20,
        }
    }
}

fn sample_realization<R: Rng>(rng: &mut R, all: &[Realization]) -> Realization {
    if rng.gen_bool(0.6) {
        // prefer large domains
        let mut best = all.choose(rng).expect("non-empty").clone();
        for _ in 0..3 {
            let r = all.choose(rng).expect("non-empty");
            if r.assignment.len() > best.assignment.len() {
                best = r.clone();
            }
        }
        best
    } else {
        all.choose(rng).expect("non-empty").clone()
    }
}

pub fn random_family(seed: u64) -> DynamicFamily {
    random_family_with(&mut rng(seed), &FamilyShape::default())
}

/// Component 0 synchronizes. Every other component either shares the motor
/// (identity functor, clock a renamed copy or a quotient of `h₀`) or lives on
/// the terminal motor (constant functor, one-instant clock).
pub fn random_family_with<R: Rng>(rng: &mut R, shape: &FamilyShape) -> DynamicFamily {
    let motor = random_motor(rng);
    let h0 = random_clock(rng, &motor, shape.max_instants);
    let count = rng.gen_range(1..=shape.max_components.max(1));
    let prefixes = ["a", "b", "c", "d", "e"];
    let index: Vec<String> = (0..count).map(|i| format!("F{i}")).collect();
    let mut components = vec![Arc::new(random_open(
        rng,
        &h0,
        prefixes[0],
        shape.max_states,
    ))];
    let mut syncs = BTreeMap::new();
    for i in 1..count {
        let prefix = prefixes[i % prefixes.len()];
        let (component, sync) = match rng.gen_range(0..3) {
            0 => {
                let tag = format!("k{i}:");
                let hi = renamed_clock(&h0, |t| format!("{tag}{t}"));
                let delta = h0
                    .dynamics()
                    .all_states()
                    .names()
                    .iter()
                    .map(|t| (t.clone(), format!("{tag}{t}")))
                    .collect();
                let functor = Functor::identity(&motor).to_raw();
                (
                    random_open(rng, &hi, prefix, shape.max_states),
                    RawSynchronization { functor, delta },
                )
            }
            1 => {
                let (hi, map) = random_quotient(rng, &h0);
                let delta = (0..h0.instant_count())
                    .map(|t| {
                        (
                            h0.instant_name(t).to_owned(),
                            hi.instant_name(map[t]).to_owned(),
                        )
                    })
                    .collect();
                let functor = Functor::identity(&motor).to_raw();
                (
                    random_open(rng, &hi, prefix, shape.max_states),
                    RawSynchronization { functor, delta },
                )
            }
            _ => {
                let term = terminal();
                let d = DynamicsBuilder::new(term.clone())
                    .states("*", &["s"])
                    .diagonal_identities()
                    .build()
                    .expect("one instant");
                let hi = Clock::new(d).expect("one instant clock");
                let delta = h0
                    .dynamics()
                    .all_states()
                    .names()
                    .iter()
                    .map(|t| (t.clone(), "s".to_owned()))
                    .collect();
                let functor = Functor::constant(&motor, &term, 0).to_raw();
                (
                    random_open(rng, &hi, prefix, shape.max_states.min(2)),
                    RawSynchronization { functor, delta },
                )
            }
        };
        components.push(Arc::new(component));
        syncs.insert(index[i].clone(), sync);
    }
    let guard = SizeGuard::default();
    let sets: Vec<Vec<Realization>> = components
        .iter()
        .map(|a| {
            enumerate_realizations(a, &guard)
                .expect("within the guard")
                .all
        })
        .collect();
    let tuples: Vec<Vec<Realization>> = (0..rng.gen_range(1..=shape.max_tuples.max(1)))
        .map(|_| sets.iter().map(|s| sample_realization(rng, s)).collect())
        .collect();
    let r = build_interaction(&index, &components, tuples).expect("sampled tuples are coherent");
    build_family(index, "F0", components, &syncs, r).expect("random family is valid")
}

/// A random partition of `params` into at most `params.len()` blocks.
pub fn random_partition<R: Rng>(rng: &mut R, params: &[String]) -> Vec<Vec<String>> {
    let k = rng.gen_range(1..=params.len().max(1));
    let mut blocks: Vec<Vec<String>> = vec![Vec::new(); k];
    for p in params {
        blocks[rng.gen_range(0..k)].push(p.clone());
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{check_categorical, check_deterministic, check_subcategorical};
    use crate::temporal::succession;

    #[test]
    fn motors_are_valid() {
        for n in 1..=4 {
            assert_eq!(chain_motor(n).num_objects(), n);
        }
        assert_eq!(diamond_motor(false).num_arrows(), 4 + 4 + 2);
        assert_eq!(diamond_motor(true).num_arrows(), 4 + 4 + 1);
        assert_eq!(cyclic_motor(3).num_arrows(), 3);
    }

    #[test]
    fn clocks_are_clocks() {
        let mut r = rng(7);
        for _ in 0..50 {
            let m = random_motor(&mut r);
            let h = random_clock(&mut r, &m, 8);
            assert!(check_deterministic(h.dynamics()).holds);
            assert!(check_categorical(h.dynamics()).holds);
            let s = succession(&h);
            assert!(s.is_reflexive() && s.is_transitive());
        }
    }

    #[test]
    fn styles() {
        let mut r = rng(3);
        for _ in 0..50 {
            let m = random_motor(&mut r);
            let d = random_dynamics(&mut r, &m, Style::SubCategorical, 8);
            assert!(check_subcategorical(&d).holds);
            assert!(d.state_count() <= 8);
        }
    }

    #[test]
    fn families_are_reproducible() {
        let a = random_family(11);
        let b = random_family(11);
        assert_eq!(a, b);
        assert!(a.interaction().len() <= 20);
        assert!(a.index().len() <= 3);
    }
}
