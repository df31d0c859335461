//! End-to-end marble appearance pipeline: synthetic corpus generation,
//! manifest ingestion, HF/MF feature extraction to CSV, Table-style quality
//! reports, and LVQ / simulated-annealing clustering runs.

pub mod config;
pub mod error;
pub mod manifest;
pub mod run;
pub mod synth;
pub mod table;

pub use config::PipelineConfig;
pub use error::{ErrorKind, PipelineError};
pub use manifest::{CorpusManifest, LabelSet, ManifestEntry};
pub use run::{Algorithm, ClusterOutput, FeaturizeOutput, cluster, evaluate, featurize, render};
pub use synth::{SyntheticSpec, generate};
pub use table::{read_matrix_csv, write_matrix_csv};
