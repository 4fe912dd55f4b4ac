//! Dynamics generated by a family: primo-engendered, mono-engendered and
//! parametric quotients, with stability reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{check_categorical, check_subcategorical, Dynamics, StateSet, Transition};
use crate::family::DynamicFamily;
use crate::open::{class_label, full_partition, MultiDynamics, OpenDynamics, OpenError};
use crate::temporal::{SizeGuard, TemporalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error(transparent)]
    SizeGuardExceeded(#[from] TemporalError),
    #[error("partition does not match the generated parameters: {0}")]
    PartitionMismatch(String),
    #[error("generated dynamics failed its own validation: {0}")]
    InternalStabilityCheckFailed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "partition", rename_all = "snake_case")]
pub enum Mode {
    Primo,
    Mono,
    Quotient(Vec<Vec<String>>),
    /// Functional engendering, with a user-supplied partition.
    Functional(Vec<Vec<String>>),
    /// Souple engendering, with a user-supplied partition.
    Souple(Vec<Vec<String>>),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks = |p: &[Vec<String>]| {
            p.iter()
                .map(|b| format!("[{}]", b.join(",")))
                .collect::<Vec<_>>()
                .join("")
        };
        match self {
            Mode::Primo => write!(f, "primo"),
            Mode::Mono => write!(f, "mono"),
            Mode::Quotient(p) => write!(f, "quotient{}", blocks(p)),
            Mode::Functional(p) => write!(f, "functional{}", blocks(p)),
            Mode::Souple(p) => write!(f, "souple{}", blocks(p)),
        }
    }
}

/// One generated pair with a witnessing tuple of the interaction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ProvenanceEntry {
    pub parameter: String,
    pub arrow: String,
    pub from: String,
    pub to: String,
    /// Position of the witness in the interaction's tuple list.
    pub witness: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedDynamics {
    pub mode: Mode,
    pub result: OpenDynamics,
    pub provenance: Vec<ProvenanceEntry>,
}

fn tuple_name(parts: &[&str]) -> String {
    format!("({})", parts.join(","))
}

/// `[F]_p`.
pub fn primo_engender(
    family: &DynamicFamily,
    guard: &SizeGuard,
) -> Result<GeneratedDynamics, GenerationError> {
    let i0 = family.synchronizer();
    let a0 = family.component(i0);
    let h0 = a0.clock();
    let motor = h0.motor().clone();
    let n = family.index().len();

    // states: per instant t0, the product of the states dated δ_i(t0)
    let mut size = 0usize;
    for t0 in 0..h0.instant_count() {
        let mut p = 1usize;
        for i in 0..n {
            let ti = family.synchronization(i).delta[t0];
            p = p.saturating_mul(family.component(i).states_at(ti).len());
        }
        size = size.saturating_add(p);
    }
    if size > guard.max_product_states {
        return Err(TemporalError::SizeGuardExceeded {
            what: "product state count",
            size,
            limit: guard.max_product_states,
        }
        .into());
    }

    let mut names: Vec<Vec<String>> = vec![Vec::new(); motor.num_objects()];
    let mut index: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
    let mut rho_of: Vec<Vec<usize>> = vec![Vec::new(); motor.num_objects()];
    // a_0 runs over S^{α0} in document order, so tuples follow it
    for s0 in 0..a0.states().state_count() {
        let t0 = a0.datation(s0);
        let object = a0.states().typ(s0);
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for i in 0..n {
            let options: Vec<usize> = if i == i0 {
                vec![s0]
            } else {
                family
                    .component(i)
                    .states_at(family.synchronization(i).delta[t0])
                    .to_vec()
            };
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    options.iter().map(move |&o| {
                        let mut t = t.clone();
                        t.push(o);
                        t
                    })
                })
                .collect();
        }
        for t in tuples {
            let label: Vec<&str> = t
                .iter()
                .enumerate()
                .map(|(i, &s)| family.component(i).state_name(s))
                .collect();
            names[object].push(tuple_name(&label));
            index.insert(t, (object, names[object].len() - 1));
            rho_of[object].push(t0);
        }
    }
    let states = names
        .into_iter()
        .map(StateSet::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| GenerationError::InternalStabilityCheckFailed(e.to_string()))?;

    let interaction = family.interaction();
    let image = interaction.image_indices();
    let mut parameters = Vec::with_capacity(image.len());
    let mut slices = Vec::with_capacity(image.len());
    let mut provenance = Vec::new();
    for mu in &image {
        let label: Vec<&str> = mu
            .iter()
            .enumerate()
            .map(|(i, &p)| family.component(i).parameters()[p].as_str())
            .collect();
        let param = tuple_name(&label);
        let mut pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); motor.num_arrows()];
        let mut witness: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
        for k in interaction.inverse_indices(mu) {
            let parts = &interaction.parts()[k];
            // p(t0): the tuple passed through at t0, when every part is defined
            let passed = |t0: usize| -> Option<(usize, usize)> {
                let t: Option<Vec<usize>> = (0..n)
                    .map(|i| parts[i].states[family.synchronization(i).delta[t0]])
                    .collect();
                index.get(&t?).copied()
            };
            for t0 in 0..h0.instant_count() {
                let Some((_, a)) = passed(t0) else { continue };
                for e in motor.arrows_from(h0.typ(t0)) {
                    let t1 = h0.step(e, t0).expect("typed");
                    if let Some((_, b)) = passed(t1) {
                        pairs[e].push((a, b));
                        witness.entry((e, a, b)).or_insert(k);
                    }
                }
            }
        }
        let transitions = (0..motor.num_arrows())
            .map(|e| {
                let rec = motor.arrow(e);
                Transition::from_pairs(
                    states[rec.dom].clone(),
                    states[rec.cod].clone(),
                    pairs[e].drain(..),
                )
            })
            .collect();
        let slice = Dynamics::new(motor.clone(), states.clone(), transitions)
            .map_err(|e| GenerationError::InternalStabilityCheckFailed(e.to_string()))?;
        for ((e, a, b), k) in witness {
            let rec = motor.arrow(e);
            provenance.push(ProvenanceEntry {
                parameter: param.clone(),
                arrow: rec.name.clone(),
                from: states[rec.dom].name(a).to_owned(),
                to: states[rec.cod].name(b).to_owned(),
                witness: k,
            });
        }
        parameters.push(param);
        slices.push(slice);
    }

    let failed = |e: OpenError| GenerationError::InternalStabilityCheckFailed(e.to_string());
    let multi = MultiDynamics::new_unchecked(parameters, slices).map_err(failed)?;
    let rho: Vec<usize> = rho_of.into_iter().flatten().collect();
    let result = validated(multi, h0.clone(), rho)?;
    Ok(GeneratedDynamics {
        mode: Mode::Primo,
        result,
        provenance,
    })
}

/// Re-checks sub-categoricity and datation of generated data.
fn validated(
    multi: MultiDynamics,
    clock: crate::temporal::Clock,
    rho: Vec<usize>,
) -> Result<OpenDynamics, GenerationError> {
    for (p, s) in multi.parameters().iter().zip(multi.slices()) {
        let r = check_subcategorical(s);
        if !r.holds {
            return Err(GenerationError::InternalStabilityCheckFailed(format!(
                "slice {p}: {}",
                r.violations[0]
            )));
        }
    }
    OpenDynamics::new(multi, clock, rho)
        .map_err(|e| GenerationError::InternalStabilityCheckFailed(e.to_string()))
}

fn quotient_of(
    primo: GeneratedDynamics,
    partition: &[Vec<String>],
    mode: Mode,
) -> Result<GeneratedDynamics, GenerationError> {
    let params = primo.result.parameters().to_vec();
    let q =
        crate::open::parametric_quotient(primo.result.multi(), partition).map_err(|e| match e {
            OpenError::NotAnEquivalence(m) => GenerationError::PartitionMismatch(m),
            other => GenerationError::InternalStabilityCheckFailed(other.to_string()),
        })?;
    let result = validated(
        q,
        primo.result.clock().clone(),
        primo.result.datation_map().to_vec(),
    )?;
    let class_of: BTreeMap<&str, String> = partition
        .iter()
        .flat_map(|b| {
            let label = class_label(&params, b);
            b.iter().map(move |p| (p.as_str(), label.clone()))
        })
        .collect();
    let mut provenance: Vec<ProvenanceEntry> = primo
        .provenance
        .iter()
        .map(|e| ProvenanceEntry {
            parameter: class_of[e.parameter.as_str()].clone(),
            ..e.clone()
        })
        .collect();
    // keep one witness per generated pair
    provenance.sort_by(|x, y| {
        (&x.parameter, &x.arrow, &x.from, &x.to, x.witness).cmp(&(
            &y.parameter,
            &y.arrow,
            &y.from,
            &y.to,
            y.witness,
        ))
    });
    provenance.dedup_by(|x, y| {
        x.parameter == y.parameter && x.arrow == y.arrow && x.from == y.from && x.to == y.to
    });
    Ok(GeneratedDynamics {
        mode,
        result,
        provenance,
    })
}

/// `[F]_m`: the quotient of `[F]_p` by the full partition.
pub fn mono_engender(
    family: &DynamicFamily,
    guard: &SizeGuard,
) -> Result<GeneratedDynamics, GenerationError> {
    let primo = primo_engender(family, guard)?;
    let full = full_partition(primo.result.parameters());
    quotient_of(primo, &full, Mode::Mono)
}

/// Parametric quotient of `[F]_p` by a partition of `Im(rb(R))`.
pub fn quotient_engender(
    family: &DynamicFamily,
    partition: &[Vec<String>],
    guard: &SizeGuard,
) -> Result<GeneratedDynamics, GenerationError> {
    let primo = primo_engender(family, guard)?;
    quotient_of(primo, partition, Mode::Quotient(partition.to_vec()))
}

/// Generates in the given mode.
pub fn engender(
    family: &DynamicFamily,
    mode: &Mode,
    guard: &SizeGuard,
) -> Result<GeneratedDynamics, GenerationError> {
    match mode {
        Mode::Primo => primo_engender(family, guard),
        Mode::Mono => mono_engender(family, guard),
        Mode::Quotient(p) | Mode::Functional(p) | Mode::Souple(p) => {
            let primo = primo_engender(family, guard)?;
            quotient_of(primo, p, mode.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeStability {
    pub mode: String,
    pub subcategorical: bool,
    /// `None` when the family is not categorical.
    pub categorical: Option<bool>,
    /// First violation, prefixed by its parameter.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub categorical_family: bool,
    pub family_witness: Option<String>,
    pub modes: Vec<ModeStability>,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "categorical family: {}",
            if self.categorical_family { "yes" } else { "no" }
        )?;
        if let Some(w) = &self.family_witness {
            write!(f, "\n  witness: {w}")?;
        }
        for m in &self.modes {
            let stable = match m.categorical {
                None => "n/a",
                Some(true) => "yes",
                Some(false) => "no",
            };
            write!(
                f,
                "\n{}: sub-categorical: {}; stable: {stable}",
                m.mode,
                if m.subcategorical { "yes" } else { "no" }
            )?;
            if let Some(w) = &m.witness {
                write!(f, "\n  witness: {w}")?;
            }
        }
        Ok(())
    }
}

fn first_categorical_failure(a: &OpenDynamics) -> Option<String> {
    a.parameters()
        .iter()
        .zip(a.multi().slices())
        .find_map(|(p, s)| {
            let r = check_categorical(s);
            r.violations.first().map(|v| format!("{p}: {v}"))
        })
}

/// Whether `F` is categorical, and for primo, mono and each supplied
/// partition, whether the generated dynamics is.
pub fn stability_report(
    family: &DynamicFamily,
    partitions: &[Vec<Vec<String>>],
    guard: &SizeGuard,
) -> Result<StabilityReport, GenerationError> {
    let family_witness = family.components().iter().enumerate().find_map(|(i, a)| {
        first_categorical_failure(a).map(|w| format!("{}/{w}", family.index()[i]))
    });
    let categorical_family = family_witness.is_none();
    let mut modes = vec![Mode::Primo, Mode::Mono];
    modes.extend(partitions.iter().cloned().map(Mode::Quotient));
    let mut out = Vec::with_capacity(modes.len());
    for mode in modes {
        let g = engender(family, &mode, guard)?;
        let subcategorical = g
            .result
            .multi()
            .slices()
            .iter()
            .all(|s| check_subcategorical(s).holds);
        let failure = first_categorical_failure(&g.result);
        let (categorical, witness) = if categorical_family {
            (Some(failure.is_none()), failure)
        } else {
            (None, None)
        };
        out.push(ModeStability {
            mode: mode.to_string(),
            subcategorical,
            categorical,
            witness,
        });
    }
    Ok(StabilityReport {
        categorical_family,
        family_witness,
        modes: out,
    })
}
