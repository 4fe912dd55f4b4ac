//! The bundled example documents.

use crate::workspace::{LoadErrors, Source, Workspace};

pub const FILES: &[(&str, &str)] = &[
    (
        "corpus/union_counterexample.json",
        include_str!("../corpus/union_counterexample.json"),
    ),
    (
        "corpus/mimicry.json",
        include_str!("../corpus/mimicry.json"),
    ),
];

pub fn sources() -> Vec<Source> {
    FILES
        .iter()
        .map(|(file, text)| Source {
            file: (*file).to_owned(),
            text: (*text).to_owned(),
        })
        .collect()
}

pub fn workspace() -> Result<Workspace, LoadErrors> {
    Workspace::from_sources(&sources())
}

#[cfg(test)]
mod tests {
    #[test]
    fn corpus_loads() {
        let ws = super::workspace().unwrap();
        assert!(ws.dynamics.contains_key("alpha1") && ws.dynamics.contains_key("alpha2"));
        assert!(ws.families.contains_key("mimicry"));
    }
}
