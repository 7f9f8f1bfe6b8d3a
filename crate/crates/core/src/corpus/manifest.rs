use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CorpusError;

/// The fourteen merged technique classes, in class-index order.
pub const DEFAULT_CLASSES: [&str; 14] = [
    "Flag-Waving",
    "Loaded Language",
    "Name Calling,Labeling",
    "Appeal to fear-prejudice",
    "Doubt",
    "Exaggeration,Minimisation",
    "Repetition",
    "Appeal to Authority",
    "Bandwagon,Reductio ad hitlerum",
    "Black-and-White Fallacy",
    "Causal Oversimplification",
    "Slogans",
    "Thought-terminating Cliches",
    "Whataboutism,Straw Men,Red Herring",
];

/// Index of a technique class in a [`Manifest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TechniqueLabel(usize);

impl TechniqueLabel {
    pub fn new(index: usize) -> Self {
        TechniqueLabel(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TechniqueLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One row of the manifest file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub raw_name: String,
    pub canonical_name: String,
}

/// Ordered label set mapping raw technique strings onto canonical classes.
///
/// Class indices follow the order in which canonical names first appear in
/// the entry list. Canonical names always resolve to themselves unless a raw
/// entry explicitly claims the same string.
#[derive(Debug, Clone)]
pub struct Manifest {
    entries: Vec<ManifestEntry>,
    classes: Vec<String>,
    lookup: HashMap<String, TechniqueLabel>,
}

impl Manifest {
    pub fn from_entries(entries: Vec<ManifestEntry>) -> Result<Self, CorpusError> {
        if entries.is_empty() {
            return Err(CorpusError::Manifest("manifest has no entries".into()));
        }
        let mut classes: Vec<String> = Vec::new();
        let mut class_index: HashMap<&str, usize> = HashMap::new();
        for e in &entries {
            if e.raw_name.is_empty() || e.canonical_name.is_empty() {
                return Err(CorpusError::Manifest("empty name in manifest entry".into()));
            }
            if !class_index.contains_key(e.canonical_name.as_str()) {
                class_index.insert(&e.canonical_name, classes.len());
                classes.push(e.canonical_name.clone());
            }
        }

        let mut lookup = HashMap::new();
        for e in &entries {
            let label = TechniqueLabel(class_index[e.canonical_name.as_str()]);
            if let Some(prev) = lookup.insert(e.raw_name.clone(), label) {
                if prev != label {
                    return Err(CorpusError::Manifest(format!(
                        "raw name {:?} maps to more than one class",
                        e.raw_name
                    )));
                }
            }
        }
        for (i, name) in classes.iter().enumerate() {
            lookup.entry(name.clone()).or_insert(TechniqueLabel(i));
        }
        Ok(Manifest {
            entries,
            classes,
            lookup,
        })
    }

    /// The shipped label set: the fourteen canonical names, plus the
    /// underscore spellings used by the task data files.
    pub fn default_set() -> Self {
        let mut entries = Vec::new();
        for name in DEFAULT_CLASSES {
            entries.push(ManifestEntry {
                raw_name: name.to_string(),
                canonical_name: name.to_string(),
            });
        }
        for name in DEFAULT_CLASSES {
            let underscored = name.replace(' ', "_");
            if underscored != name {
                entries.push(ManifestEntry {
                    raw_name: underscored,
                    canonical_name: name.to_string(),
                });
            }
        }
        Manifest::from_entries(entries).expect("default manifest is well formed")
    }

    pub fn from_json(json: &str) -> Result<Self, CorpusError> {
        let entries: Vec<ManifestEntry> = serde_json::from_str(json)
            .map_err(|e| CorpusError::Manifest(format!("invalid manifest JSON: {e}")))?;
        Manifest::from_entries(entries)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Manifest::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("manifest serializes")
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    /// Number of canonical classes.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_names(&self) -> &[String] {
        &self.classes
    }

    pub fn name(&self, label: TechniqueLabel) -> &str {
        &self.classes[label.0]
    }

    pub fn labels(&self) -> impl Iterator<Item = TechniqueLabel> {
        (0..self.classes.len()).map(TechniqueLabel)
    }

    pub fn resolve(&self, raw: &str) -> Option<TechniqueLabel> {
        self.lookup.get(raw).copied()
    }

    /// SHA-256 over the canonical class names in index order, newline
    /// separated. Raw aliases do not affect the hash.
    pub fn hash(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for name in &self.classes {
            hasher.update(name.as_bytes());
            hasher.update(b"\n");
        }
        hasher.finalize().into()
    }

    pub fn hash_hex(&self) -> String {
        self.hash().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_has_fourteen_classes_in_order() {
        let m = Manifest::default_set();
        assert_eq!(m.len(), 14);
        assert_eq!(m.name(TechniqueLabel(0)), "Flag-Waving");
        assert_eq!(m.resolve("Loaded_Language"), Some(TechniqueLabel(1)));
        assert_eq!(m.resolve("Loaded Language"), Some(TechniqueLabel(1)));
        assert_eq!(m.resolve("Propaganda"), None);
    }

    #[test]
    fn merge_via_raw_names() {
        let json = r#"[
            {"raw_name": "Whataboutism", "canonical_name": "Whataboutism,Straw Men,Red Herring"},
            {"raw_name": "Straw_Men", "canonical_name": "Whataboutism,Straw Men,Red Herring"},
            {"raw_name": "Doubt", "canonical_name": "Doubt"}
        ]"#;
        let m = Manifest::from_json(json).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.resolve("Straw_Men"), Some(TechniqueLabel(0)));
        assert_eq!(m.resolve("Doubt"), Some(TechniqueLabel(1)));
    }

    #[test]
    fn conflicting_raw_name_rejected() {
        let json = r#"[
            {"raw_name": "X", "canonical_name": "A"},
            {"raw_name": "X", "canonical_name": "B"}
        ]"#;
        assert!(matches!(
            Manifest::from_json(json),
            Err(CorpusError::Manifest(_))
        ));
    }

    #[test]
    fn hash_ignores_aliases_but_tracks_order() {
        let a = Manifest::from_json(r#"[{"raw_name":"a","canonical_name":"A"},{"raw_name":"b","canonical_name":"B"}]"#).unwrap();
        let b = Manifest::from_json(r#"[{"raw_name":"A","canonical_name":"A"},{"raw_name":"B","canonical_name":"B"}]"#).unwrap();
        let c = Manifest::from_json(r#"[{"raw_name":"B","canonical_name":"B"},{"raw_name":"A","canonical_name":"A"}]"#).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
