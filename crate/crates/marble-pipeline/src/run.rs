//! Pipeline operations behind the CLI subcommands: feature extraction,
//! quality evaluation, clustering runs and signature rendering.

use std::path::Path;

use marble_core::features::{
    FeatureSubsetId, assemble_mf, colour_features, granulometric_features, mf_feature_names,
    subset_indices,
};
use marble_core::quadtree::{extract_hf, hf_feature_names, merge_regions, quadtree_decompose};
use marble_core::quality::{ClusterSet, quality_table};
use marble_core::raster::Raster;
use marble_core::{
    ConfusionMatrix, FeatureMatrix, PrototypeSet, QualityReport, Signature, lvq_train,
    majority_vote_mapping, sa_cluster, znormalize,
};

use crate::config::PipelineConfig;
use crate::error::{PipelineError, Result};
use crate::manifest::{CorpusManifest, LabelSet};

/// Which classifier a cluster run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Lvq,
    Sa,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Lvq => "lvq",
            Algorithm::Sa => "sa",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lvq" => Ok(Algorithm::Lvq),
            "sa" => Ok(Algorithm::Sa),
            other => Err(format!("unknown algorithm '{other}' (lvq|sa)")),
        }
    }
}

/// Raw (un-normalized) HF and MF feature matrices, one row per manifest
/// entry in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturizeOutput {
    pub hf: FeatureMatrix,
    pub mf: FeatureMatrix,
}

/// Decodes one image file.
pub fn load_raster(path: &Path) -> Result<Raster> {
    let bytes = std::fs::read(path)
        .map_err(|e| PipelineError::data(format!("cannot read {}: {e}", path.display())))?;
    marble_core::decode_image(&bytes)
        .map_err(|e| PipelineError::data(format!("{}: {e}", path.display())))
}

fn hf_row(raster: &Raster, cfg: &PipelineConfig) -> std::result::Result<Vec<f64>, String> {
    let sig = quadtree_decompose(raster, cfg.quadtree_min_area, cfg.quadtree_alpha);
    let clusters =
        merge_regions(&sig, cfg.merge_metric, cfg.merge_threshold).map_err(|e| e.to_string())?;
    Ok(extract_hf::<f64>(&clusters).values.to_vec())
}

fn mf_row(raster: &Raster, cfg: &PipelineConfig) -> Vec<f64> {
    if cfg.morphology_max_size == marble_core::GRANULO_SIZES {
        assemble_mf::<f64>(raster, cfg.morphology_channel)
            .values
            .to_vec()
    } else {
        // Experimental size counts keep the colour block and shrink/grow the
        // granulometric blocks.
        let mut row = colour_features::<f64>(raster).to_vec();
        let plane = raster.channel_plane(cfg.morphology_channel);
        row.extend(granulometric_features::<f64>(
            &plane,
            cfg.morphology_max_size,
        ));
        row
    }
}

fn mf_names(cfg: &PipelineConfig) -> Vec<String> {
    if cfg.morphology_max_size == marble_core::GRANULO_SIZES {
        mf_feature_names()
    } else {
        let mut names: Vec<String> = mf_feature_names()
            .into_iter()
            .take(marble_core::COLOUR_FEATURES)
            .collect();
        for prefix in ["open", "close"] {
            for r in 1..=cfg.morphology_max_size {
                names.push(format!("{prefix}{r}_min"));
                for k in 1..=8 {
                    names.push(format!("{prefix}{r}_q{k}"));
                }
            }
        }
        names
    }
}

/// Extracts both feature families for every manifest entry. Per-image
/// failures are collected and reported together; any failure fails the run.
pub fn featurize(manifest: &CorpusManifest, cfg: &PipelineConfig) -> Result<FeaturizeOutput> {
    let mut hf_rows: Vec<Vec<f64>> = Vec::with_capacity(manifest.len());
    let mut mf_rows: Vec<Vec<f64>> = Vec::with_capacity(manifest.len());
    let mut failures: Vec<String> = Vec::new();

    for entry in manifest.entries() {
        let path = manifest.resolve_path(entry);
        match load_raster(&path) {
            Ok(raster) => {
                match hf_row(&raster, cfg) {
                    Ok(row) => hf_rows.push(row),
                    Err(e) => {
                        failures.push(format!("{}: {e}", entry.id));
                        continue;
                    }
                }
                mf_rows.push(mf_row(&raster, cfg));
            }
            Err(e) => failures.push(format!("{}: {}", entry.id, e.message)),
        }
    }

    if !failures.is_empty() {
        return Err(PipelineError::data(format!(
            "{} image(s) failed: {}",
            failures.len(),
            failures.join("; ")
        )));
    }

    let ids = manifest.ids();
    let hf = FeatureMatrix::new(
        ids.clone(),
        hf_feature_names(),
        hf_rows.into_iter().flatten().collect(),
    )
    .map_err(|e| PipelineError::runtime(e.to_string()))?;
    let mf = FeatureMatrix::new(ids, mf_names(cfg), mf_rows.into_iter().flatten().collect())
        .map_err(|e| PipelineError::runtime(e.to_string()))?;
    Ok(FeaturizeOutput { hf, mf })
}

/// Dense labels for the manifest's chosen class column, in ascending class
/// order, plus the original class names.
fn dense_labels(manifest: &CorpusManifest, labels: LabelSet) -> (Vec<usize>, Vec<String>) {
    let classes = manifest.classes(labels);
    let mut present: Vec<usize> = classes.clone();
    present.sort_unstable();
    present.dedup();
    let dense = classes
        .iter()
        .map(|c| present.binary_search(c).expect("present"))
        .collect();
    let names = present.iter().map(|c| c.to_string()).collect();
    (dense, names)
}

/// Rows of `features` for the manifest ids, in manifest order.
fn align(features: &FeatureMatrix, manifest: &CorpusManifest) -> Result<FeatureMatrix> {
    features
        .select_rows(&manifest.ids())
        .map_err(|e| PipelineError::data(format!("features/manifest mismatch: {e}")))
}

/// znormalize, project each subset, and compute the quality measures against
/// the chosen expert labels.
pub fn evaluate(
    features: &FeatureMatrix,
    manifest: &CorpusManifest,
    subset_ids: &[FeatureSubsetId],
    labels: LabelSet,
    cfg: &PipelineConfig,
) -> Result<QualityReport> {
    let aligned = align(features, manifest)?;
    let normalized = znormalize(&aligned)
        .map_err(|e| PipelineError::data(e.to_string()))?
        .matrix;

    let mut subsets = Vec::with_capacity(subset_ids.len());
    for id in subset_ids {
        let indices = subset_indices(*id, &cfg.subsets, normalized.cols())
            .map_err(|e| PipelineError::data(e.to_string()))?;
        subsets.push((id.name().to_string(), indices));
    }

    let (dense, _names) = dense_labels(manifest, labels);
    let k = dense.iter().max().map_or(0, |&c| c + 1);
    let set = ClusterSet::new(dense, k).map_err(|e| PipelineError::data(e.to_string()))?;

    quality_table(&normalized, &subsets, &[(labels.name().to_string(), set)])
        .map_err(|e| PipelineError::data(e.to_string()))
}

/// Subsets applicable to a matrix width when none are requested explicitly:
/// A and B always, C when resolvable.
pub fn default_subsets(width: usize, cfg: &PipelineConfig) -> Vec<FeatureSubsetId> {
    let candidates: &[FeatureSubsetId] = if width == marble_core::HF_LEN {
        &[
            FeatureSubsetId::HfA,
            FeatureSubsetId::HfB,
            FeatureSubsetId::HfC,
        ]
    } else {
        &[
            FeatureSubsetId::MfA,
            FeatureSubsetId::MfB,
            FeatureSubsetId::MfC,
        ]
    };
    candidates
        .iter()
        .copied()
        .filter(|id| subset_indices(*id, &cfg.subsets, width).is_ok())
        .collect()
}

/// Result of a clustering run.
#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub confusion: ConfusionMatrix,
    pub assignments_csv: String,
    /// LVQ codebook, when the algorithm was LVQ.
    pub prototypes: Option<PrototypeSet>,
}

/// Trains/resubstitutes LVQ or runs unsupervised SA on one feature subset,
/// then writes the class-indexed confusion matrix. SA clusters are mapped to
/// classes by within-cluster majority vote.
pub fn cluster(
    features: &FeatureMatrix,
    manifest: &CorpusManifest,
    algorithm: Algorithm,
    subset_id: FeatureSubsetId,
    labels: LabelSet,
    cfg: &PipelineConfig,
) -> Result<ClusterOutput> {
    let aligned = align(features, manifest)?;
    let normalized = znormalize(&aligned)
        .map_err(|e| PipelineError::data(e.to_string()))?
        .matrix;
    let indices = subset_indices(subset_id, &cfg.subsets, normalized.cols())
        .map_err(|e| PipelineError::data(e.to_string()))?;
    let projected = normalized
        .select_columns(&indices)
        .map_err(|e| PipelineError::data(e.to_string()))?;

    let (truth, class_names) = dense_labels(manifest, labels);
    let k = class_names.len();

    match algorithm {
        Algorithm::Lvq => {
            let set = lvq_train(&projected, &truth, &cfg.lvq_config())
                .map_err(|e| PipelineError::data(e.to_string()))?;
            let predicted: Vec<usize> = (0..projected.rows())
                .map(|r| set.classify(projected.row(r)).expect("dimensions match"))
                .collect();
            let confusion = marble_core::confusion_matrix(
                &truth,
                &predicted,
                k,
                None,
                Some(class_names.clone()),
            )
            .map_err(|e| PipelineError::runtime(e.to_string()))?;

            let mut csv = String::from("id,truth_class,predicted_class\n");
            for (i, id) in projected.row_ids().iter().enumerate() {
                csv.push_str(&format!(
                    "{id},{},{}\n",
                    class_names[truth[i]], class_names[predicted[i]]
                ));
            }
            Ok(ClusterOutput {
                confusion,
                assignments_csv: csv,
                prototypes: Some(set),
            })
        }
        Algorithm::Sa => {
            let outcome = sa_cluster(&projected, &cfg.sa_config(k))
                .map_err(|e| PipelineError::data(e.to_string()))?;
            let clusters = outcome.clusters.assignment();
            let mapping = majority_vote_mapping(&truth, clusters, k, k)
                .map_err(|e| PipelineError::runtime(e.to_string()))?;
            let confusion = marble_core::confusion_matrix(
                &truth,
                clusters,
                k,
                Some(&mapping),
                Some(class_names.clone()),
            )
            .map_err(|e| PipelineError::runtime(e.to_string()))?;

            let mut csv = String::from("id,truth_class,cluster,mapped_class\n");
            for (i, id) in projected.row_ids().iter().enumerate() {
                csv.push_str(&format!(
                    "{id},{},{},{}\n",
                    class_names[truth[i]], clusters[i], class_names[mapping[clusters[i]]]
                ));
            }
            Ok(ClusterOutput {
                confusion,
                assignments_csv: csv,
                prototypes: None,
            })
        }
    }
}

/// Decomposes one image and returns the signature with its rendering.
pub fn render(path: &Path, cfg: &PipelineConfig) -> Result<(Signature, Raster)> {
    let raster = load_raster(path)?;
    let sig = quadtree_decompose(&raster, cfg.quadtree_min_area, cfg.quadtree_alpha);
    let rendered = marble_core::render_signature(&sig);
    Ok((sig, rendered))
}
