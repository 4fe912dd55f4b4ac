//! Named, validated documents. Resolution is by name and layered by kind:
//! categories, then dynamics and clocks, then open dynamics, then families,
//! partitions and provenance tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use subcat::category::{validate_category, Category, Functor, RawCategory, RawFunctor};
use subcat::dynamics::{Dynamics, DynamicsBuilder};
use subcat::family::{build_family, build_interaction, DynamicFamily, RawSynchronization};
use subcat::generation::GeneratedDynamics;
use subcat::open::{validate_open_dynamics, MultiDynamics, OpenDynamics};
use subcat::temporal::{Clock, Realization};
use thiserror::Error;

use crate::doc::{
    line_of, parse_documents, ArrowDoc, ArrowTransitions, CategoryDoc, CompositionDoc, Document,
    DynamicsDoc, FamilyDoc, FunctorDoc, OpenDoc, Pairs, PartDoc, PartitionDoc, ProvenanceDoc,
    ProvenanceEntryDoc, SynchronizationDoc,
};

/// Where a document came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub file: String,
    pub line: Option<usize>,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{l}", self.file),
            None => write!(f, "{}", self.file),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error("{file}:{line}:{column}: parse error: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{at}: duplicate {kind} `{name}`")]
    DuplicateName {
        at: Origin,
        kind: &'static str,
        name: String,
    },
    #[error("{at}: {kind} `{name}` refers to unknown {target_kind} `{target}`")]
    UnknownReference {
        at: Origin,
        kind: &'static str,
        name: String,
        target_kind: &'static str,
        target: String,
    },
    #[error("{at}: invalid {kind} `{name}`: {message}")]
    Validation {
        at: Origin,
        kind: &'static str,
        name: String,
        message: String,
    },
}

/// Every error found while loading, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadErrors(pub Vec<LoadError>);

impl fmt::Display for LoadErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for LoadErrors {}

#[derive(Clone, Debug)]
pub struct DynamicsEntry {
    pub motor: String,
    pub dynamics: Dynamics,
}

#[derive(Clone, Debug)]
pub struct ClockEntry {
    pub motor: String,
    pub clock: Clock,
}

#[derive(Clone, Debug)]
pub struct OpenEntry {
    pub clock: String,
    pub open: Arc<OpenDynamics>,
}

#[derive(Clone, Debug)]
pub struct FamilyEntry {
    /// Open dynamics names, in index order.
    pub components: Vec<String>,
    pub family: DynamicFamily,
}

#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub categories: BTreeMap<String, Arc<Category>>,
    pub dynamics: BTreeMap<String, DynamicsEntry>,
    pub clocks: BTreeMap<String, ClockEntry>,
    pub opens: BTreeMap<String, OpenEntry>,
    pub families: BTreeMap<String, FamilyEntry>,
    pub partitions: BTreeMap<String, Vec<Vec<String>>>,
    pub provenance: BTreeMap<String, ProvenanceDoc>,
}

/// Structural equality: same documents once exported.
impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.to_documents() == other.to_documents()
    }
}

/// A source text and the name it is reported under.
pub struct Source {
    pub file: String,
    pub text: String,
}

fn json_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            out.extend(json_files(&p)?);
        } else if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Reads files and directories (recursively, `*.json` only).
pub fn read_sources(paths: &[PathBuf]) -> Result<Vec<Source>, LoadErrors> {
    let mut sources = Vec::new();
    let mut errors = Vec::new();
    for path in paths {
        let files = if path.is_dir() {
            match json_files(path) {
                Ok(fs) => fs,
                Err(e) => {
                    errors.push(LoadError::Io {
                        file: path.display().to_string(),
                        message: e.to_string(),
                    });
                    continue;
                }
            }
        } else {
            vec![path.clone()]
        };
        for f in files {
            match std::fs::read_to_string(&f) {
                Ok(text) => sources.push(Source {
                    file: f.display().to_string(),
                    text,
                }),
                Err(e) => errors.push(LoadError::Io {
                    file: f.display().to_string(),
                    message: e.to_string(),
                }),
            }
        }
    }
    if errors.is_empty() {
        Ok(sources)
    } else {
        Err(LoadErrors(errors))
    }
}

pub fn load(paths: &[PathBuf]) -> Result<Workspace, LoadErrors> {
    Workspace::from_sources(&read_sources(paths)?)
}

struct Loader {
    errors: Vec<LoadError>,
    /// (kind, name) of documents that failed; references to them are not
    /// reported again.
    failed: BTreeSet<(&'static str, String)>,
}

impl Loader {
    fn invalid(&mut self, at: &Origin, kind: &'static str, name: &str, message: impl fmt::Display) {
        self.failed.insert((kind, name.to_owned()));
        self.errors.push(LoadError::Validation {
            at: at.clone(),
            kind,
            name: name.to_owned(),
            message: message.to_string(),
        });
    }

    /// Records a dangling reference unless the target itself failed.
    fn missing(
        &mut self,
        at: &Origin,
        kind: &'static str,
        name: &str,
        target_kind: &'static str,
        target: &str,
    ) {
        self.failed.insert((kind, name.to_owned()));
        if !self.failed.contains(&(target_kind, target.to_owned())) {
            self.errors.push(LoadError::UnknownReference {
                at: at.clone(),
                kind,
                name: name.to_owned(),
                target_kind,
                target: target.to_owned(),
            });
        }
    }
}

fn dynamics_from(
    motor: &Arc<Category>,
    states: &BTreeMap<String, Vec<String>>,
    transitions: &BTreeMap<String, Pairs>,
) -> Result<Dynamics, String> {
    let mut b = DynamicsBuilder::new(motor.clone());
    for (o, names) in states {
        b = b.states(o, names);
    }
    for (arrow, pairs) in transitions {
        if motor.arrow_index(arrow).is_none() {
            return Err(format!("unknown arrow `{arrow}`"));
        }
        b = b.pairs(arrow, pairs);
    }
    b.build().map_err(|e| e.to_string())
}

fn category_from(doc: &CategoryDoc) -> RawCategory {
    let listed: BTreeSet<&str> = doc.arrows.iter().map(|a| a.name.as_str()).collect();
    let mut raw = RawCategory::new();
    for o in &doc.objects {
        raw = raw.object(o);
    }
    // unlisted identities go first, in object order
    for o in &doc.objects {
        if let Some(id) = doc.identities.get(o) {
            if !listed.contains(id.as_str()) {
                raw = raw.arrow(id, o, o);
            }
        }
    }
    for a in &doc.arrows {
        raw = raw.arrow(&a.name, &a.dom, &a.cod);
    }
    for (o, id) in &doc.identities {
        raw.identities.push((o.clone(), id.clone()));
    }
    for c in &doc.compositions {
        raw = raw.compose(&c.f, &c.g, &c.gf);
    }
    raw
}

fn open_parameters(doc: &OpenDoc) -> Result<Vec<String>, String> {
    let multi: Vec<&BTreeMap<String, Pairs>> = doc
        .transitions
        .values()
        .filter_map(|t| match t {
            ArrowTransitions::Multi(m) => Some(m),
            ArrowTransitions::Mono(_) => None,
        })
        .collect();
    let mono = doc.transitions.len() - multi.len();
    if mono > 0 && !multi.is_empty() {
        return Err("transitions mix mono and parametrized arrows".to_owned());
    }
    if let Some(ps) = &doc.parameters {
        if mono > 0 && ps.as_slice() != ["*"] {
            return Err("mono transitions with parameters other than `*`".to_owned());
        }
        return Ok(ps.clone());
    }
    if multi.is_empty() {
        return Ok(vec!["*".to_owned()]);
    }
    let keys: BTreeSet<&String> = multi.iter().flat_map(|m| m.keys()).collect();
    Ok(keys.into_iter().cloned().collect())
}

fn open_from(doc: &OpenDoc, clock: &Clock) -> Result<OpenDynamics, String> {
    let parameters = open_parameters(doc)?;
    let motor = clock.motor();
    let mut slices = Vec::with_capacity(parameters.len());
    for p in &parameters {
        let mut ts: BTreeMap<String, Pairs> = BTreeMap::new();
        for (arrow, t) in &doc.transitions {
            let pairs = match t {
                ArrowTransitions::Mono(ps) => Some(ps),
                ArrowTransitions::Multi(m) => m.get(p),
            };
            if let Some(ps) = pairs {
                ts.insert(arrow.clone(), ps.clone());
            }
        }
        slices.push(
            dynamics_from(motor, &doc.states, &ts).map_err(|e| format!("parameter `{p}`: {e}"))?,
        );
    }
    for t in doc.transitions.values() {
        if let ArrowTransitions::Multi(m) = t {
            if let Some(p) = m.keys().find(|k| !parameters.contains(k)) {
                return Err(format!("unknown parameter `{p}`"));
            }
        }
    }
    let multi = MultiDynamics::new(parameters, slices).map_err(|e| e.to_string())?;
    validate_open_dynamics(multi, clock.clone(), &doc.datation).map_err(|e| e.to_string())
}

fn family_from(
    doc: &FamilyDoc,
    components: Vec<Arc<OpenDynamics>>,
) -> Result<DynamicFamily, String> {
    let mut tuples = Vec::with_capacity(doc.interaction.len());
    for (k, tuple) in doc.interaction.iter().enumerate() {
        if let Some(extra) = tuple.keys().find(|i| !doc.index.contains(i)) {
            return Err(format!("interaction tuple {k}: unknown index `{extra}`"));
        }
        let mut parts = Vec::with_capacity(doc.index.len());
        for (i, a) in doc.index.iter().zip(&components) {
            let part = tuple
                .get(i)
                .ok_or_else(|| format!("interaction tuple {k}: no entry for `{i}`"))?;
            let param = match (&part.param, a.parameters()) {
                (Some(p), _) => p.clone(),
                (None, [only]) => only.clone(),
                (None, _) => return Err(format!("interaction tuple {k}: `{i}` needs a `param`")),
            };
            parts.push(Realization {
                parameter: Some(param),
                assignment: part.realization.clone(),
            });
        }
        tuples.push(parts);
    }
    let interaction =
        build_interaction(&doc.index, &components, tuples).map_err(|e| e.to_string())?;
    let syncs = doc
        .synchronizations
        .iter()
        .map(|(i, s)| {
            let raw = RawSynchronization {
                functor: RawFunctor {
                    objects: s.functor.objects.clone().into_iter().collect(),
                    arrows: s.functor.arrows.clone().into_iter().collect(),
                },
                delta: s.delta.clone(),
            };
            (i.clone(), raw)
        })
        .collect();
    if let Some(i) = doc.synchronizations.keys().find(|i| !doc.index.contains(i)) {
        return Err(format!("synchronization for unknown index `{i}`"));
    }
    build_family(
        doc.index.clone(),
        &doc.synchronizer,
        components,
        &syncs,
        interaction,
    )
    .map_err(|e| e.to_string())
}

fn check_partition(p: &[Vec<String>]) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for block in p {
        if block.is_empty() {
            return Err("empty block".to_owned());
        }
        for x in block {
            if !seen.insert(x) {
                return Err(format!("`{x}` is in two blocks"));
            }
        }
    }
    Ok(())
}

impl Workspace {
    /// Parses and validates every document of every source. Errors are
    /// aggregated; a document that fails is left out.
    pub fn from_sources(sources: &[Source]) -> Result<Workspace, LoadErrors> {
        let mut loader = Loader {
            errors: Vec::new(),
            failed: BTreeSet::new(),
        };
        let mut docs: Vec<(Origin, Document)> = Vec::new();
        for s in sources {
            match parse_documents(&s.text) {
                Ok(ds) => docs.extend(ds.into_iter().map(|d| {
                    let at = Origin {
                        file: s.file.clone(),
                        line: line_of(&s.text, d.name()),
                    };
                    (at, d)
                })),
                Err(e) => loader.errors.push(LoadError::Parse {
                    file: s.file.clone(),
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                }),
            }
        }
        let mut seen = BTreeSet::new();
        docs.retain(|(at, d)| {
            let fresh = seen.insert((d.kind(), d.name().to_owned()));
            if !fresh {
                loader.errors.push(LoadError::DuplicateName {
                    at: at.clone(),
                    kind: d.kind(),
                    name: d.name().to_owned(),
                });
                loader.failed.insert((d.kind(), d.name().to_owned()));
            }
            fresh
        });
        let ws = Workspace::resolve(&mut loader, &docs);
        if loader.errors.is_empty() {
            Ok(ws)
        } else {
            Err(LoadErrors(loader.errors))
        }
    }

    fn resolve(loader: &mut Loader, docs: &[(Origin, Document)]) -> Workspace {
        let mut ws = Workspace::default();
        for (at, d) in docs {
            if let Document::Category(c) = d {
                match validate_category(&category_from(c)) {
                    Ok(cat) => {
                        ws.categories.insert(c.name.clone(), Arc::new(cat));
                    }
                    Err(e) => loader.invalid(at, "category", &c.name, e),
                }
            }
        }
        for (at, d) in docs {
            let (kind, doc) = match d {
                Document::Dynamics(x) => ("dynamics", x),
                Document::Clock(x) => ("clock", x),
                _ => continue,
            };
            let Some(motor) = ws.categories.get(&doc.motor) else {
                loader.missing(at, kind, &doc.name, "category", &doc.motor);
                continue;
            };
            let dynamics = match dynamics_from(motor, &doc.states, &doc.transitions) {
                Ok(x) => x,
                Err(e) => {
                    loader.invalid(at, kind, &doc.name, e);
                    continue;
                }
            };
            if kind == "dynamics" {
                let entry = DynamicsEntry {
                    motor: doc.motor.clone(),
                    dynamics,
                };
                ws.dynamics.insert(doc.name.clone(), entry);
                continue;
            }
            match Clock::new(dynamics) {
                Ok(clock) => {
                    let entry = ClockEntry {
                        motor: doc.motor.clone(),
                        clock,
                    };
                    ws.clocks.insert(doc.name.clone(), entry);
                }
                Err(e) => loader.invalid(at, kind, &doc.name, e),
            }
        }
        for (at, d) in docs {
            let Document::Open(o) = d else { continue };
            let Some(h) = ws.clocks.get(&o.clock) else {
                loader.missing(at, "open", &o.name, "clock", &o.clock);
                continue;
            };
            match open_from(o, &h.clock) {
                Ok(a) => {
                    let entry = OpenEntry {
                        clock: o.clock.clone(),
                        open: Arc::new(a),
                    };
                    ws.opens.insert(o.name.clone(), entry);
                }
                Err(e) => loader.invalid(at, "open", &o.name, e),
            }
        }
        'families: for (at, d) in docs {
            let Document::Family(f) = d else { continue };
            let mut names = Vec::with_capacity(f.index.len());
            let mut components = Vec::with_capacity(f.index.len());
            for i in &f.index {
                let Some(c) = f.components.get(i) else {
                    loader.invalid(
                        at,
                        "family",
                        &f.name,
                        format!("no component for index `{i}`"),
                    );
                    continue 'families;
                };
                let Some(entry) = ws.opens.get(c) else {
                    loader.missing(at, "family", &f.name, "open", c);
                    continue 'families;
                };
                names.push(c.clone());
                components.push(entry.open.clone());
            }
            if let Some(i) = f.components.keys().find(|i| !f.index.contains(i)) {
                loader.invalid(
                    at,
                    "family",
                    &f.name,
                    format!("component for unknown index `{i}`"),
                );
                continue;
            }
            match family_from(f, components) {
                Ok(family) => {
                    ws.families.insert(
                        f.name.clone(),
                        FamilyEntry {
                            components: names,
                            family,
                        },
                    );
                }
                Err(e) => loader.invalid(at, "family", &f.name, e),
            }
        }
        for (at, d) in docs {
            match d {
                Document::Partition(p) => match check_partition(&p.partition) {
                    Ok(()) => {
                        ws.partitions.insert(p.name.clone(), p.partition.clone());
                    }
                    Err(e) => loader.invalid(at, "partition", &p.name, e),
                },
                Document::Provenance(p) => {
                    if ws.opens.contains_key(&p.of) {
                        ws.provenance.insert(p.name.clone(), p.clone());
                    } else {
                        loader.missing(at, "provenance", &p.name, "open", &p.of);
                    }
                }
                _ => {}
            }
        }
        ws
    }

    pub fn summary(&self) -> String {
        format!(
            "{} categories, {} dynamics, {} clocks, {} open dynamics, {} families, {} partitions",
            self.categories.len(),
            self.dynamics.len(),
            self.clocks.len(),
            self.opens.len(),
            self.families.len(),
            self.partitions.len()
        )
    }

    /// Name of a category in the workspace, by value.
    pub fn category_name(&self, c: &Category) -> Option<&str> {
        self.categories
            .iter()
            .find(|(_, x)| ***x == *c)
            .map(|(n, _)| n.as_str())
    }

    /// Every document, grouped by kind and sorted by name.
    pub fn to_documents(&self) -> Vec<Document> {
        let mut out: Vec<Document> = Vec::new();
        out.extend(
            self.categories
                .iter()
                .map(|(n, c)| Document::Category(category_doc(n, c))),
        );
        out.extend(
            self.dynamics
                .iter()
                .map(|(n, e)| Document::Dynamics(dynamics_doc(n, &e.motor, &e.dynamics))),
        );
        out.extend(
            self.clocks
                .iter()
                .map(|(n, e)| Document::Clock(dynamics_doc(n, &e.motor, e.clock.dynamics()))),
        );
        out.extend(
            self.opens
                .iter()
                .map(|(n, e)| Document::Open(open_doc(n, &e.clock, &e.open))),
        );
        out.extend(
            self.families
                .iter()
                .map(|(n, e)| Document::Family(family_doc(n, &e.components, &e.family))),
        );
        out.extend(self.partitions.iter().map(|(n, p)| {
            Document::Partition(PartitionDoc {
                name: n.clone(),
                partition: p.clone(),
            })
        }));
        out.extend(self.provenance.values().cloned().map(Document::Provenance));
        out
    }
}

pub fn category_doc(name: &str, c: &Category) -> CategoryDoc {
    let raw = c.to_raw();
    CategoryDoc {
        name: name.to_owned(),
        objects: raw.objects,
        arrows: raw
            .arrows
            .into_iter()
            .map(|(name, dom, cod)| ArrowDoc { name, dom, cod })
            .collect(),
        identities: raw.identities.into_iter().collect(),
        compositions: raw
            .compositions
            .into_iter()
            .map(|(f, g, gf)| CompositionDoc { f, g, gf })
            .collect(),
    }
}

fn states_of(d: &Dynamics) -> BTreeMap<String, Vec<String>> {
    let motor = d.motor();
    (0..motor.num_objects())
        .map(|o| {
            (
                motor.object_name(o).to_owned(),
                d.states(o).names().to_vec(),
            )
        })
        .collect()
}

fn pairs_of(d: &Dynamics, arrow: usize) -> Pairs {
    d.transition(arrow)
        .named_pairs()
        .map(|(a, b)| (a.to_owned(), b.to_owned()))
        .collect()
}

pub fn dynamics_doc(name: &str, motor: &str, d: &Dynamics) -> DynamicsDoc {
    let m = d.motor();
    DynamicsDoc {
        name: name.to_owned(),
        motor: motor.to_owned(),
        states: states_of(d),
        transitions: (0..m.num_arrows())
            .filter(|&f| !d.transition(f).is_empty())
            .map(|f| (m.arrow_name(f).to_owned(), pairs_of(d, f)))
            .collect(),
    }
}

pub fn open_doc(name: &str, clock: &str, a: &OpenDynamics) -> OpenDoc {
    let m = a.motor();
    let mono = a.parameters() == ["*"];
    let mut transitions = BTreeMap::new();
    for f in 0..m.num_arrows() {
        let t = if mono {
            let ps = pairs_of(a.slice(0), f);
            (!ps.is_empty()).then_some(ArrowTransitions::Mono(ps))
        } else {
            let per: BTreeMap<String, Pairs> = a
                .parameters()
                .iter()
                .enumerate()
                .map(|(p, n)| (n.clone(), pairs_of(a.slice(p), f)))
                .filter(|(_, ps)| !ps.is_empty())
                .collect();
            (!per.is_empty()).then_some(ArrowTransitions::Multi(per))
        };
        if let Some(t) = t {
            transitions.insert(m.arrow_name(f).to_owned(), t);
        }
    }
    let st = a.states();
    OpenDoc {
        name: name.to_owned(),
        clock: clock.to_owned(),
        parameters: (!mono).then(|| a.parameters().to_vec()),
        states: states_of(st),
        transitions,
        datation: (0..st.state_count())
            .map(|s| {
                (
                    st.state_name(s).to_owned(),
                    a.clock().instant_name(a.datation(s)).to_owned(),
                )
            })
            .collect(),
    }
}

fn functor_doc(f: &Functor) -> FunctorDoc {
    let raw = f.to_raw();
    FunctorDoc {
        objects: raw.objects.into_iter().collect(),
        arrows: raw.arrows.into_iter().collect(),
    }
}

pub fn family_doc(name: &str, components: &[String], f: &DynamicFamily) -> FamilyDoc {
    let index = f.index().to_vec();
    let h0 = f.component(f.synchronizer()).clock();
    let synchronizations = (0..index.len())
        .filter(|&i| i != f.synchronizer())
        .map(|i| {
            let s = f.synchronization(i);
            let hi = f.component(i).clock();
            let delta = (0..h0.instant_count())
                .map(|t| {
                    (
                        h0.instant_name(t).to_owned(),
                        hi.instant_name(s.delta[t]).to_owned(),
                    )
                })
                .collect();
            let doc = SynchronizationDoc {
                functor: functor_doc(&s.functor),
                delta,
            };
            (index[i].clone(), doc)
        })
        .collect();
    let interaction = f
        .interaction()
        .tuples()
        .iter()
        .map(|tuple| {
            index
                .iter()
                .zip(tuple)
                .map(|(i, r)| {
                    let part = PartDoc {
                        realization: r.assignment.clone(),
                        param: r.parameter.clone(),
                    };
                    (i.clone(), part)
                })
                .collect()
        })
        .collect();
    FamilyDoc {
        name: name.to_owned(),
        index: index.clone(),
        synchronizer: f.synchronizer_name().to_owned(),
        components: index
            .iter()
            .cloned()
            .zip(components.iter().cloned())
            .collect(),
        synchronizations,
        interaction,
    }
}

pub fn provenance_doc(name: &str, of: &str, g: &GeneratedDynamics) -> ProvenanceDoc {
    ProvenanceDoc {
        name: name.to_owned(),
        of: of.to_owned(),
        mode: g.mode.to_string(),
        entries: g
            .provenance
            .iter()
            .map(|e| ProvenanceEntryDoc {
                parameter: e.parameter.clone(),
                arrow: e.arrow.clone(),
                from: e.from.clone(),
                to: e.to.clone(),
                witness: e.witness,
            })
            .collect(),
    }
}

/// Documents for a family built outside any workspace: motors, clocks,
/// components and the family itself, named after `name`.
pub fn family_documents(name: &str, f: &DynamicFamily) -> Vec<Document> {
    let mut motors: Vec<(String, Arc<Category>)> = Vec::new();
    let mut docs = Vec::new();
    let mut motor_name = |c: &Arc<Category>, docs: &mut Vec<Document>| -> String {
        if let Some((n, _)) = motors.iter().find(|(_, m)| m == c) {
            return n.clone();
        }
        let n = format!("{name}.motor{}", motors.len());
        docs.push(Document::Category(category_doc(&n, c)));
        motors.push((n.clone(), c.clone()));
        n
    };
    let mut clocks: Vec<(String, Clock)> = Vec::new();
    let mut opens = Vec::new();
    let mut components = Vec::new();
    for (i, idx) in f.index().iter().enumerate() {
        let a = f.component(i);
        let m = motor_name(a.motor(), &mut docs);
        let h = match clocks.iter().find(|(_, c)| c == a.clock()) {
            Some((n, _)) => n.clone(),
            None => {
                let n = format!("{name}.clock{}", clocks.len());
                docs.push(Document::Clock(dynamics_doc(&n, &m, a.clock().dynamics())));
                clocks.push((n.clone(), a.clock().clone()));
                n
            }
        };
        let c = format!("{name}.{idx}");
        opens.push(Document::Open(open_doc(&c, &h, a)));
        components.push(c);
    }
    docs.extend(opens);
    docs.push(Document::Family(family_doc(name, &components, f)));
    docs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(text: &str) -> Vec<Source> {
        vec![Source {
            file: "t.json".into(),
            text: text.into(),
        }]
    }

    const CAT: &str = r#"{"kind":"category","name":"c","objects":["0","1"],
        "arrows":[{"name":"u","dom":"0","cod":"1"}],"identities":{"0":"Id0","1":"Id1"}}"#;

    #[test]
    fn dangling_clock_is_an_unknown_reference() {
        let text = format!(
            r#"[{CAT},
            {{"kind":"open","name":"a","clock":"nowhere","states":{{}},"datation":{{}}}}]"#
        );
        let err = Workspace::from_sources(&source(&text)).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert!(
            matches!(&err.0[0], LoadError::UnknownReference { target, .. } if target == "nowhere")
        );
        assert!(err.to_string().starts_with("t.json:3: open `a`"), "{err}");
    }

    #[test]
    fn failures_do_not_cascade() {
        let text = format!(
            r#"[{CAT},
            {{"kind":"clock","name":"h","motor":"c","states":{{"0":["t0"]}},"transitions":{{"u":[["t0","t0"]]}}}},
            {{"kind":"open","name":"a","clock":"h","states":{{}},"datation":{{}}}}]"#
        );
        let err = Workspace::from_sources(&source(&text)).unwrap_err();
        assert_eq!(err.0.len(), 1, "{err}");
        assert!(matches!(
            &err.0[0],
            LoadError::Validation { kind: "clock", .. }
        ));
    }

    #[test]
    fn duplicates_are_reported() {
        let text = format!("[{CAT},{CAT}]");
        let err = Workspace::from_sources(&source(&text)).unwrap_err();
        assert!(matches!(
            &err.0[0],
            LoadError::DuplicateName {
                kind: "category",
                ..
            }
        ));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err =
            Workspace::from_sources(&source("{\n  \"kind\": \"category\",\n  oops")).unwrap_err();
        assert!(
            matches!(&err.0[0], LoadError::Parse { line: 3, .. }),
            "{err}"
        );
    }
}
