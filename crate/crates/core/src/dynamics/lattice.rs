use std::sync::Arc;

use crate::category::Category;

use super::{Dynamics, DynamicsError, StateSet, Transition};

fn same_motor(motor: &Arc<Category>, ds: &[Dynamics]) -> Result<(), DynamicsError> {
    if ds
        .iter()
        .all(|d| Arc::ptr_eq(d.motor(), motor) || **d.motor() == **motor)
    {
        Ok(())
    } else {
        Err(DynamicsError::MotorMismatch)
    }
}

/// Rebuilds each member's named pairs over new state sets. Pairs whose
/// endpoints are missing from the new sets are dropped.
fn reindex<'a>(
    motor: &Arc<Category>,
    states: Vec<StateSet>,
    pairs_of: impl Fn(usize) -> Vec<(&'a str, &'a str)>,
) -> Result<Dynamics, DynamicsError> {
    let transitions = (0..motor.num_arrows())
        .map(|a| {
            let rec = motor.arrow(a);
            let (s, t) = (&states[rec.dom], &states[rec.cod]);
            let pairs = pairs_of(a)
                .into_iter()
                .filter_map(|(x, y)| Some((s.index_of(x)?, t.index_of(y)?)));
            Transition::from_pairs(s.clone(), t.clone(), pairs)
        })
        .collect();
    Dynamics::new(motor.clone(), states, transitions)
}

/// Per-object union of state sets and per-arrow union of pairs. The empty
/// list gives the empty dynamics.
pub fn union_dynamics(motor: &Arc<Category>, ds: &[Dynamics]) -> Result<Dynamics, DynamicsError> {
    same_motor(motor, ds)?;
    let mut states = Vec::with_capacity(motor.num_objects());
    for o in 0..motor.num_objects() {
        let mut names: Vec<String> = Vec::new();
        for d in ds {
            for n in d.states(o).names() {
                if !names.contains(n) {
                    names.push(n.clone());
                }
            }
        }
        states.push(StateSet::new(names)?);
    }
    reindex(motor, states, |a| {
        ds.iter()
            .flat_map(|d| d.transition(a).named_pairs())
            .collect()
    })
}

/// Per-object intersection of state sets and per-arrow intersection of pairs.
pub fn intersect_dynamics(ds: &[Dynamics]) -> Result<Dynamics, DynamicsError> {
    let first = ds.first().ok_or(DynamicsError::EmptyList)?;
    let motor = first.motor();
    same_motor(motor, ds)?;
    let mut states = Vec::with_capacity(motor.num_objects());
    for o in 0..motor.num_objects() {
        let names = first
            .states(o)
            .names()
            .iter()
            .filter(|n| ds.iter().all(|d| d.states(o).contains(n)))
            .cloned();
        states.push(StateSet::new(names)?);
    }
    reindex(motor, states, |a| {
        first
            .transition(a)
            .named_pairs()
            .filter(|&(x, y)| {
                ds[1..].iter().all(|d| {
                    let t = d.transition(a);
                    match (t.source().index_of(x), t.target().index_of(y)) {
                        (Some(i), Some(j)) => t.contains(i, j),
                        _ => false,
                    }
                })
            })
            .collect()
    })
}

/// `a ⊂ b`: state sets and pair sets included object-wise and arrow-wise.
pub fn is_subdynamics(a: &Dynamics, b: &Dynamics) -> Result<bool, DynamicsError> {
    same_motor(a.motor(), std::slice::from_ref(b))?;
    let motor = a.motor();
    for o in 0..motor.num_objects() {
        if !a.states(o).names().iter().all(|n| b.states(o).contains(n)) {
            return Ok(false);
        }
    }
    for f in 0..motor.num_arrows() {
        let tb = b.transition(f);
        let included = a.transition(f).named_pairs().all(|(x, y)| {
            matches!(
                (tb.source().index_of(x), tb.target().index_of(y)),
                (Some(i), Some(j)) if tb.contains(i, j)
            )
        });
        if !included {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The largest sub-categorical sub-dynamics γ̊ of `g`, with the same states.
///
/// Deletes off-diagonal identity pairs, then composite pairs without a
/// chained witness, until nothing changes.
pub fn largest_subcategorical(g: &Dynamics) -> Dynamics {
    let motor = g.motor();
    let mut ts: Vec<Transition> = g.transitions().to_vec();
    for o in 0..motor.num_objects() {
        let id = motor.identity(o);
        let off: Vec<_> = ts[id].pairs().filter(|&(a, b)| a != b).collect();
        for (a, b) in off {
            ts[id].remove(a, b);
        }
    }
    let triples: Vec<_> = motor.composable_pairs().collect();
    loop {
        let mut changed = false;
        for &(f, g2, gf) in &triples {
            let stale: Vec<_> = ts[gf]
                .pairs()
                .filter(|&(a, c)| !ts[f].image(a).iter().any(|&b| ts[g2].contains(b, c)))
                .collect();
            for (a, c) in stale {
                changed |= ts[gf].remove(a, c);
            }
        }
        if !changed {
            break;
        }
    }
    g.with_transitions(ts).expect("same shape as the input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{check_categorical, check_subcategorical, DynamicsBuilder};
    use crate::fixtures::{alpha1, alpha2, cat3};

    fn image(d: &Dynamics, arrow: &str, state: &str) -> Vec<String> {
        let f = d.motor().arrow_index(arrow).unwrap();
        let s = d.find(state).unwrap();
        d.image(f, s).map(|g| d.state_name(g).to_owned()).collect()
    }

    #[test]
    fn union_of_branches() {
        let u = union_dynamics(&cat3(), &[alpha1(), alpha2()]).unwrap();
        assert_eq!(image(&u, "u", "a1"), ["a2", "a2'"]);
        assert_eq!(image(&u, "v", "a2"), ["a3", "a3'"]);
        assert_eq!(image(&u, "v", "a2'"), ["a3"]);
        assert_eq!(image(&u, "w", "a1"), ["a3"]);
        assert!(is_subdynamics(&alpha1(), &u).unwrap());
        assert!(!is_subdynamics(&u, &alpha1()).unwrap());
        assert_eq!(
            union_dynamics(&cat3(), &[alpha1(), alpha1()]).unwrap(),
            alpha1()
        );
        assert_eq!(union_dynamics(&cat3(), &[]).unwrap().state_count(), 0);
    }

    #[test]
    fn intersection_is_extra_categorical() {
        let i = intersect_dynamics(&[alpha1(), alpha2()]).unwrap();
        assert!(image(&i, "u", "a1").is_empty());
        assert!(image(&i, "v", "a2").is_empty());
        assert!(image(&i, "v", "a2'").is_empty());
        assert_eq!(image(&i, "w", "a1"), ["a3"]);
        assert!(!check_categorical(&i).holds);
        assert!(!check_subcategorical(&i).holds);
        assert_eq!(intersect_dynamics(&[alpha1(), alpha1()]).unwrap(), alpha1());
        assert_eq!(intersect_dynamics(&[]), Err(DynamicsError::EmptyList));
    }

    #[test]
    fn motor_mismatch() {
        let other = crate::fixtures::terminal();
        assert_eq!(
            union_dynamics(&other, &[alpha1()]),
            Err(DynamicsError::MotorMismatch)
        );
        assert!(is_subdynamics(&Dynamics::empty(cat3()), &alpha1()).unwrap());
    }

    #[test]
    fn largest_drops_unwitnessed_composite() {
        let g = DynamicsBuilder::new(cat3())
            .states("1", &["a1"])
            .states("2", &["a2"])
            .states("3", &["a3"])
            .diagonal_identities()
            .pair("u", "a1", "a2")
            .pair("w", "a1", "a3")
            .pair("Id2", "a2", "a2")
            .build()
            .unwrap();
        let l = largest_subcategorical(&g);
        assert!(image(&l, "w", "a1").is_empty());
        assert_eq!(image(&l, "u", "a1"), ["a2"]);
        assert!(check_subcategorical(&l).holds);
        assert_eq!(largest_subcategorical(&alpha1()), alpha1());
    }

    #[test]
    fn largest_drops_off_diagonal_identity() {
        let g = DynamicsBuilder::new(cat3())
            .states("1", &["x", "y"])
            .pair("Id1", "x", "y")
            .pair("Id1", "x", "x")
            .build()
            .unwrap();
        let l = largest_subcategorical(&g);
        assert_eq!(image(&l, "Id1", "x"), ["x"]);
    }
}
