//! Finite small categories ("motors"), their underlying graphs, and functors.
//!
//! A [`Category`] is given extensionally by its objects, its arrows and a full
//! composition table. Every axiom is checked by brute force when the category
//! is validated, so the rest of the crate can rely on them without further
//! checks.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// An arrow record of a category or an edge of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("arrow `{arrow}` has an endpoint `{object}` that is not a declared object")]
    DanglingEndpoint { arrow: String, object: String },
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("object `{0}` has no identity arrow")]
    MissingIdentity(String),
    #[error("identity `{arrow}` of `{object}` must have dom = cod = `{object}`")]
    IdentityEndpoint { object: String, arrow: String },
    #[error("arrow `{0}` is the identity of more than one object")]
    SharedIdentity(String),
    #[error("composition table entry for non-composable pair ({f}, {g})")]
    NonComposablePairInTable { f: String, g: String },
    #[error("composition table has no entry for composable pair ({f}, {g})")]
    MissingComposite { f: String, g: String },
    #[error("composition table gives two values for ({f}, {g})")]
    ConflictingComposite { f: String, g: String },
    #[error("composite {g}∘{f} = `{gf}` has the wrong endpoints")]
    CompositeEndpointMismatch { f: String, g: String, gf: String },
    #[error("identity law fails for arrow `{0}`")]
    IdentityLawViolation(String),
    #[error("associativity fails for ({f}, {g}, {h})")]
    AssociativityViolation { f: String, g: String, h: String },
}

/// Unvalidated category description, in the shape of the document format.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawCategory {
    pub objects: Vec<String>,
    /// `(name, dom, cod)`
    pub arrows: Vec<(String, String, String)>,
    /// `(object, identity arrow)`
    pub identities: Vec<(String, String)>,
    /// `(f, g, g∘f)`
    pub compositions: Vec<(String, String, String)>,
}

impl RawCategory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(mut self, name: &str) -> Self {
        self.objects.push(name.to_owned());
        self
    }

    pub fn arrow(mut self, name: &str, dom: &str, cod: &str) -> Self {
        self.arrows
            .push((name.to_owned(), dom.to_owned(), cod.to_owned()));
        self
    }

    /// Declares the identity arrow of `object`, adding the arrow record as well.
    pub fn identity(mut self, object: &str, arrow: &str) -> Self {
        self.arrows
            .push((arrow.to_owned(), object.to_owned(), object.to_owned()));
        self.identities.push((object.to_owned(), arrow.to_owned()));
        self
    }

    pub fn compose(mut self, f: &str, g: &str, gf: &str) -> Self {
        self.compositions
            .push((f.to_owned(), g.to_owned(), gf.to_owned()));
        self
    }
}

/// A validated finite small category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Category {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identity: Vec<usize>,
    /// `compose[f][g] = g∘f` when `cod(f) = dom(g)`.
    compose: Vec<Vec<Option<usize>>>,
    object_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
}

fn index_names(
    kind: &'static str,
    names: impl Iterator<Item = String>,
) -> Result<HashMap<String, usize>, CategoryError> {
    let mut index = HashMap::new();
    for (i, name) in names.enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(CategoryError::DuplicateName { kind, name });
        }
    }
    Ok(index)
}

/// Validates a raw description against every category axiom.
///
/// Table entries involving an identity may be omitted; they are filled in
/// from the identity laws. Explicit entries must agree with those laws.
pub fn validate_category(raw: &RawCategory) -> Result<Category, CategoryError> {
    let object_index = index_names("object", raw.objects.iter().cloned())?;
    let arrow_index = index_names("arrow", raw.arrows.iter().map(|a| a.0.clone()))?;

    let lookup_object = |arrow: &str, name: &str| {
        object_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::DanglingEndpoint {
                arrow: arrow.to_owned(),
                object: name.to_owned(),
            })
    };
    let arrows = raw
        .arrows
        .iter()
        .map(|(name, dom, cod)| {
            Ok(Arrow {
                name: name.clone(),
                dom: lookup_object(name, dom)?,
                cod: lookup_object(name, cod)?,
            })
        })
        .collect::<Result<Vec<_>, CategoryError>>()?;
    let lookup_arrow = |name: &str| {
        arrow_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownArrow(name.to_owned()))
    };

    let mut identity: Vec<Option<usize>> = vec![None; raw.objects.len()];
    for (object, arrow) in &raw.identities {
        let o = *object_index
            .get(object)
            .ok_or_else(|| CategoryError::UnknownObject(object.clone()))?;
        let a = lookup_arrow(arrow)?;
        if arrows[a].dom != o || arrows[a].cod != o {
            return Err(CategoryError::IdentityEndpoint {
                object: object.clone(),
                arrow: arrow.clone(),
            });
        }
        match identity[o] {
            Some(prev) if prev != a => {
                return Err(CategoryError::DuplicateName {
                    kind: "identity",
                    name: object.clone(),
                })
            }
            _ => identity[o] = Some(a),
        }
    }
    let identity = identity
        .iter()
        .enumerate()
        .map(|(o, id)| id.ok_or_else(|| CategoryError::MissingIdentity(raw.objects[o].clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut seen = vec![false; arrows.len()];
    for &id in &identity {
        if std::mem::replace(&mut seen[id], true) {
            return Err(CategoryError::SharedIdentity(arrows[id].name.clone()));
        }
    }

    let n = arrows.len();
    let mut compose: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    for (f, g, gf) in &raw.compositions {
        let (fi, gi, gfi) = (lookup_arrow(f)?, lookup_arrow(g)?, lookup_arrow(gf)?);
        if arrows[fi].cod != arrows[gi].dom {
            return Err(CategoryError::NonComposablePairInTable {
                f: f.clone(),
                g: g.clone(),
            });
        }
        match compose[fi][gi] {
            Some(prev) if prev != gfi => {
                return Err(CategoryError::ConflictingComposite {
                    f: f.clone(),
                    g: g.clone(),
                })
            }
            _ => compose[fi][gi] = Some(gfi),
        }
    }
    // Identity laws: fill in omitted entries, reject contradicting ones.
    for f in 0..n {
        for (a, b) in [(identity[arrows[f].dom], f), (f, identity[arrows[f].cod])] {
            match compose[a][b] {
                None => compose[a][b] = Some(f),
                Some(x) if x != f => {
                    return Err(CategoryError::IdentityLawViolation(arrows[f].name.clone()))
                }
                Some(_) => {}
            }
        }
    }
    for f in 0..n {
        for g in 0..n {
            if arrows[f].cod != arrows[g].dom {
                continue;
            }
            let gf = compose[f][g].ok_or_else(|| CategoryError::MissingComposite {
                f: arrows[f].name.clone(),
                g: arrows[g].name.clone(),
            })?;
            if arrows[gf].dom != arrows[f].dom || arrows[gf].cod != arrows[g].cod {
                return Err(CategoryError::CompositeEndpointMismatch {
                    f: arrows[f].name.clone(),
                    g: arrows[g].name.clone(),
                    gf: arrows[gf].name.clone(),
                });
            }
        }
    }
    for f in 0..n {
        for g in 0..n {
            let Some(gf) = compose[f][g] else { continue };
            for h in 0..n {
                let Some(hg) = compose[g][h] else { continue };
                if compose[gf][h] != compose[f][hg] {
                    return Err(CategoryError::AssociativityViolation {
                        f: arrows[f].name.clone(),
                        g: arrows[g].name.clone(),
                        h: arrows[h].name.clone(),
                    });
                }
            }
        }
    }

    Ok(Category {
        objects: raw.objects.clone(),
        arrows,
        identity,
        compose,
        object_index,
        arrow_index,
    })
}

impl Category {
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_name(&self, object: usize) -> &str {
        &self.objects[object]
    }

    pub fn arrow(&self, arrow: usize) -> &Arrow {
        &self.arrows[arrow]
    }

    pub fn arrow_name(&self, arrow: usize) -> &str {
        &self.arrows[arrow].name
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.object_index.get(name).copied()
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrow_index.get(name).copied()
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identity[object]
    }

    pub fn is_identity(&self, arrow: usize) -> bool {
        self.identity[self.arrows[arrow].dom] == arrow
    }

    /// `g∘f`, defined exactly when `cod(f) = dom(g)`.
    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        self.compose[f][g]
    }

    /// All composable pairs `(f, g, g∘f)` in document order of `f`, then `g`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.arrows.len()).flat_map(move |f| {
            (0..self.arrows.len()).filter_map(move |g| self.compose[f][g].map(|gf| (f, g, gf)))
        })
    }

    /// Arrows with the given domain, in document order.
    pub fn arrows_from(&self, object: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&a| self.arrows[a].dom == object)
    }

    pub fn to_raw(&self) -> RawCategory {
        RawCategory {
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| {
                    (
                        a.name.clone(),
                        self.objects[a.dom].clone(),
                        self.objects[a.cod].clone(),
                    )
                })
                .collect(),
            identities: self
                .identity
                .iter()
                .enumerate()
                .map(|(o, &a)| (self.objects[o].clone(), self.arrows[a].name.clone()))
                .collect(),
            compositions: self
                .composable_pairs()
                .filter(|&(f, g, _)| !self.is_identity(f) && !self.is_identity(g))
                .map(|(f, g, gf)| {
                    (
                        self.arrows[f].name.clone(),
                        self.arrows[g].name.clone(),
                        self.arrows[gf].name.clone(),
                    )
                })
                .collect(),
        }
    }
}

/// A directed multigraph; the image of a category under the forgetful map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<Arrow>,
}

/// Forgets composition: every arrow, identities included, becomes an edge.
pub fn underlying_graph(c: &Category) -> Graph {
    Graph {
        vertices: c.objects.clone(),
        edges: c.arrows.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("object `{0}` is not mapped")]
    IncompleteObjectMap(String),
    #[error("arrow `{0}` is not mapped")]
    IncompleteArrowMap(String),
    #[error("image of arrow `{0}` does not have the mapped endpoints")]
    EndpointMismatch(String),
    #[error("identity of `{0}` is not sent to an identity")]
    IdentityNotPreserved(String),
    #[error("composite of ({f}, {g}) is not preserved")]
    CompositionNotPreserved { f: String, g: String },
}

/// Unvalidated functor description: name-to-name maps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawFunctor {
    pub objects: Vec<(String, String)>,
    pub arrows: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    source: Arc<Category>,
    target: Arc<Category>,
    object_map: Vec<usize>,
    arrow_map: Vec<usize>,
}

/// Resolves names and checks that the maps form a functor.
pub fn validate_functor(
    source: &Arc<Category>,
    target: &Arc<Category>,
    raw: &RawFunctor,
) -> Result<Functor, FunctorError> {
    let mut object_map = vec![None; source.num_objects()];
    for (from, to) in &raw.objects {
        let f = source
            .object_index(from)
            .ok_or_else(|| FunctorError::UnknownObject(from.clone()))?;
        let t = target
            .object_index(to)
            .ok_or_else(|| FunctorError::UnknownObject(to.clone()))?;
        object_map[f] = Some(t);
    }
    let mut arrow_map = vec![None; source.num_arrows()];
    for (from, to) in &raw.arrows {
        let f = source
            .arrow_index(from)
            .ok_or_else(|| FunctorError::UnknownArrow(from.clone()))?;
        let t = target
            .arrow_index(to)
            .ok_or_else(|| FunctorError::UnknownArrow(to.clone()))?;
        arrow_map[f] = Some(t);
    }
    // Identities may be left implicit.
    for (o, target_object) in object_map.iter().enumerate() {
        let id = source.identity(o);
        if arrow_map[id].is_none() {
            if let Some(t) = *target_object {
                arrow_map[id] = Some(target.identity(t));
            }
        }
    }
    let object_map = object_map
        .into_iter()
        .enumerate()
        .map(|(o, t)| {
            t.ok_or_else(|| FunctorError::IncompleteObjectMap(source.object_name(o).to_owned()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let arrow_map = arrow_map
        .into_iter()
        .enumerate()
        .map(|(a, t)| {
            t.ok_or_else(|| FunctorError::IncompleteArrowMap(source.arrow_name(a).to_owned()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Functor::from_maps(source.clone(), target.clone(), object_map, arrow_map)
}

impl Functor {
    /// Checks identities, composites and endpoints exhaustively, in that order.
    pub fn from_maps(
        source: Arc<Category>,
        target: Arc<Category>,
        object_map: Vec<usize>,
        arrow_map: Vec<usize>,
    ) -> Result<Self, FunctorError> {
        assert_eq!(object_map.len(), source.num_objects());
        assert_eq!(arrow_map.len(), source.num_arrows());
        for o in 0..source.num_objects() {
            if arrow_map[source.identity(o)] != target.identity(object_map[o]) {
                return Err(FunctorError::IdentityNotPreserved(
                    source.object_name(o).to_owned(),
                ));
            }
        }
        for (f, g, gf) in source.composable_pairs() {
            if target.compose(arrow_map[f], arrow_map[g]) != Some(arrow_map[gf]) {
                return Err(FunctorError::CompositionNotPreserved {
                    f: source.arrow_name(f).to_owned(),
                    g: source.arrow_name(g).to_owned(),
                });
            }
        }
        for (a, arrow) in source.arrows().iter().enumerate() {
            let image = target.arrow(arrow_map[a]);
            if image.dom != object_map[arrow.dom] || image.cod != object_map[arrow.cod] {
                return Err(FunctorError::EndpointMismatch(arrow.name.clone()));
            }
        }
        Ok(Self {
            source,
            target,
            object_map,
            arrow_map,
        })
    }

    pub fn identity(c: &Arc<Category>) -> Self {
        Self {
            source: c.clone(),
            target: c.clone(),
            object_map: (0..c.num_objects()).collect(),
            arrow_map: (0..c.num_arrows()).collect(),
        }
    }

    /// The functor sending everything to the single object of `target`.
    pub fn constant(source: &Arc<Category>, target: &Arc<Category>, object: usize) -> Self {
        let id = target.identity(object);
        Self {
            source: source.clone(),
            target: target.clone(),
            object_map: vec![object; source.num_objects()],
            arrow_map: vec![id; source.num_arrows()],
        }
    }

    pub fn source(&self) -> &Arc<Category> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Category> {
        &self.target
    }

    pub fn object(&self, o: usize) -> usize {
        self.object_map[o]
    }

    pub fn arrow(&self, a: usize) -> usize {
        self.arrow_map[a]
    }

    /// `next ∘ self`, pointwise.
    pub fn then(&self, next: &Functor) -> Result<Functor, FunctorError> {
        if *self.target != *next.source {
            return Err(FunctorError::EndpointMismatch("<composite>".to_owned()));
        }
        Functor::from_maps(
            self.source.clone(),
            next.target.clone(),
            self.object_map
                .iter()
                .map(|&o| next.object_map[o])
                .collect(),
            self.arrow_map.iter().map(|&a| next.arrow_map[a]).collect(),
        )
    }

    pub fn to_raw(&self) -> RawFunctor {
        RawFunctor {
            objects: (0..self.source.num_objects())
                .map(|o| {
                    (
                        self.source.object_name(o).to_owned(),
                        self.target.object_name(self.object_map[o]).to_owned(),
                    )
                })
                .collect(),
            arrows: (0..self.source.num_arrows())
                .map(|a| {
                    (
                        self.source.arrow_name(a).to_owned(),
                        self.target.arrow_name(self.arrow_map[a]).to_owned(),
                    )
                })
                .collect(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "category with {} objects and {} arrows",
            self.objects.len(),
            self.arrows.len()
        )
    }
}
