//! JSON document format. Every document carries `kind` and `name`; a file
//! holds one document or an array of them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub type Pairs = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Category(CategoryDoc),
    Dynamics(DynamicsDoc),
    Clock(DynamicsDoc),
    Open(OpenDoc),
    Family(FamilyDoc),
    Partition(PartitionDoc),
    Provenance(ProvenanceDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Category(_) => "category",
            Document::Dynamics(_) => "dynamics",
            Document::Clock(_) => "clock",
            Document::Open(_) => "open",
            Document::Family(_) => "family",
            Document::Partition(_) => "partition",
            Document::Provenance(_) => "provenance",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Document::Category(d) => &d.name,
            Document::Dynamics(d) | Document::Clock(d) => &d.name,
            Document::Open(d) => &d.name,
            Document::Family(d) => &d.name,
            Document::Partition(d) => &d.name,
            Document::Provenance(d) => &d.name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// `gf = g∘f`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionDoc {
    pub f: String,
    pub g: String,
    pub gf: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub name: String,
    pub objects: Vec<String>,
    /// Identities may be listed here or left to `identities`.
    pub arrows: Vec<ArrowDoc>,
    /// object → identity arrow
    pub identities: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compositions: Vec<CompositionDoc>,
}

/// Also the shape of a clock document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsDoc {
    pub name: String,
    pub motor: String,
    /// object → state names
    pub states: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub transitions: BTreeMap<String, Pairs>,
}

/// Per-arrow transitions of an open dynamics: a mono-dynamics omits the
/// parameter level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArrowTransitions {
    Mono(Pairs),
    Multi(BTreeMap<String, Pairs>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenDoc {
    pub name: String,
    pub clock: String,
    /// Declared parameter order; sorted keys when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<String>>,
    pub states: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub transitions: BTreeMap<String, ArrowTransitions>,
    /// state → instant
    pub datation: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDoc {
    #[serde(default)]
    pub objects: BTreeMap<String, String>,
    #[serde(default)]
    pub arrows: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynchronizationDoc {
    pub functor: FunctorDoc,
    /// synchronizer instant → component instant
    pub delta: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartDoc {
    #[serde(default)]
    pub realization: BTreeMap<String, String>,
    /// May be omitted for single-parameter components.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub name: String,
    pub index: Vec<String>,
    pub synchronizer: String,
    /// index → open dynamics name
    pub components: BTreeMap<String, String>,
    /// One entry per non-synchronizer index.
    #[serde(default)]
    pub synchronizations: BTreeMap<String, SynchronizationDoc>,
    pub interaction: Vec<BTreeMap<String, PartDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub name: String,
    pub partition: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntryDoc {
    pub parameter: String,
    pub arrow: String,
    pub from: String,
    pub to: String,
    /// Position of the witnessing tuple in the family's interaction.
    pub witness: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDoc {
    pub name: String,
    /// The generated open dynamics.
    pub of: String,
    pub mode: String,
    pub entries: Vec<ProvenanceEntryDoc>,
}

/// Parses a file body: a single document or an array.
pub fn parse_documents(text: &str) -> Result<Vec<Document>, serde_json::Error> {
    if text.trim_start().starts_with('[') {
        serde_json::from_str(text)
    } else {
        serde_json::from_str(text).map(|d| vec![d])
    }
}

/// 1-based line of the first `"name": "<name>"` in `text`, if any.
pub fn line_of(text: &str, name: &str) -> Option<usize> {
    let quoted = serde_json::to_string(name).ok()?;
    text.lines()
        .position(|l| {
            l.find("\"name\"").is_some_and(|i| {
                l[i + 6..]
                    .trim_start()
                    .trim_start_matches(':')
                    .trim_start()
                    .starts_with(&quoted)
            })
        })
        .map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_and_multi_transitions_parse() {
        let text = r#"{"kind":"open","name":"a","clock":"h","states":{},
            "transitions":{"u":[["x","y"]],"v":{"p":[["y","z"]]}},"datation":{}}"#;
        let docs = parse_documents(text).unwrap();
        let Document::Open(o) = &docs[0] else {
            panic!()
        };
        assert_eq!(
            o.transitions["u"],
            ArrowTransitions::Mono(vec![("x".into(), "y".into())])
        );
        assert!(matches!(o.transitions["v"], ArrowTransitions::Multi(_)));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"kind":"partition","name":"p","partition":[],"extra":1}"#;
        assert!(parse_documents(text).is_err());
    }

    #[test]
    fn names_are_located() {
        let text = "[\n {\"kind\": \"partition\",\n  \"name\": \"p\", \"partition\": []}\n]";
        assert_eq!(line_of(text, "p"), Some(3));
        assert_eq!(line_of(text, "q"), None);
    }
}
