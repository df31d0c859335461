//! Corpus manifests: sample id, image path, colour class 1..=6 and vein
//! class 1..=3, as CSV with a header row.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{PipelineError, Result};

pub const COLOUR_CLASSES: usize = 6;
pub const VEIN_CLASSES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    /// As written in the file; relative paths resolve against the manifest's
    /// directory.
    pub path: String,
    pub colour_class: usize,
    pub vein_class: usize,
}

/// Which expert labelling a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelSet {
    Colour,
    Vein,
}

impl LabelSet {
    pub fn name(&self) -> &'static str {
        match self {
            LabelSet::Colour => "colour",
            LabelSet::Vein => "vein",
        }
    }
}

impl std::str::FromStr for LabelSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "colour" | "color" => Ok(LabelSet::Colour),
            "vein" => Ok(LabelSet::Vein),
            other => Err(format!("unknown label set '{other}' (colour|vein)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    entries: Vec<ManifestEntry>,
    base_dir: PathBuf,
}

impl CorpusManifest {
    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.id.clone()).collect()
    }

    /// Absolute path of one entry's image.
    pub fn resolve_path(&self, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Class labels for the chosen label set, as written in the manifest.
    pub fn classes(&self, labels: LabelSet) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| match labels {
                LabelSet::Colour => e.colour_class,
                LabelSet::Vein => e.vein_class,
            })
            .collect()
    }

    /// Parses and validates a manifest file. Duplicate ids, out-of-range
    /// classes and malformed rows are reported with their line number;
    /// `check_files` additionally requires every image path to exist.
    pub fn load(path: &Path, check_files: bool) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::data(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        let base_dir = path
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from("."));

        let mut entries = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        let mut problems: Vec<String> = Vec::new();

        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if idx == 0 && trimmed.to_ascii_lowercase().starts_with("id,") {
                continue; // header
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                problems.push(format!(
                    "line {line_no}: expected 4 fields (id,path,colour_class,vein_class), got {}",
                    fields.len()
                ));
                continue;
            }
            let id = fields[0].to_string();
            if id.is_empty() {
                problems.push(format!("line {line_no}: empty id"));
                continue;
            }
            if !seen.insert(id.clone()) {
                problems.push(format!("line {line_no}: duplicate id '{id}'"));
                continue;
            }
            let colour_class: usize = match fields[2].parse() {
                Ok(v) => v,
                Err(_) => {
                    problems.push(format!("line {line_no}: bad colour class '{}'", fields[2]));
                    continue;
                }
            };
            let vein_class: usize = match fields[3].parse() {
                Ok(v) => v,
                Err(_) => {
                    problems.push(format!("line {line_no}: bad vein class '{}'", fields[3]));
                    continue;
                }
            };
            if colour_class == 0 || colour_class > COLOUR_CLASSES {
                problems.push(format!(
                    "line {line_no}: colour class {colour_class} outside 1..={COLOUR_CLASSES}"
                ));
                continue;
            }
            if vein_class == 0 || vein_class > VEIN_CLASSES {
                problems.push(format!(
                    "line {line_no}: vein class {vein_class} outside 1..={VEIN_CLASSES}"
                ));
                continue;
            }
            let entry = ManifestEntry {
                id,
                path: fields[1].to_string(),
                colour_class,
                vein_class,
            };
            if check_files {
                let resolved = if Path::new(&entry.path).is_absolute() {
                    PathBuf::from(&entry.path)
                } else {
                    base_dir.join(&entry.path)
                };
                if !resolved.is_file() {
                    problems.push(format!(
                        "line {line_no}: image not found: {}",
                        resolved.display()
                    ));
                    continue;
                }
            }
            entries.push(entry);
        }

        if !problems.is_empty() {
            return Err(PipelineError::data(format!(
                "manifest {} invalid: {}",
                path.display(),
                problems.join("; ")
            )));
        }
        if entries.is_empty() {
            return Err(PipelineError::data(format!(
                "manifest {} has no entries",
                path.display()
            )));
        }
        Ok(Self { entries, base_dir })
    }

    /// Serializes back to the CSV schema.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,path,colour_class,vein_class\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.id, e.path, e.colour_class, e.vein_class
            ));
        }
        out
    }

    pub fn from_entries(entries: Vec<ManifestEntry>, base_dir: PathBuf) -> Self {
        Self { entries, base_dir }
    }
}
