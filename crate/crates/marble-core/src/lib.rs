//! Appearance analysis for ornamental stone imagery: quadtree
//! colour-homogeneity segmentation, grey-level granulometry with hexagonal
//! structuring elements, cluster-quality measures, and LVQ / simulated
//! annealing clustering.
//!
//! Feature-space maths is generic over the scalar type through
//! [`scalar::Real`]; the crate root exports `f64` aliases for the common
//! types, which is what the pipeline uses.

pub mod components;
pub mod confusion;
pub mod features;
pub mod lvq;
pub mod morphology;
pub mod pnm;
pub mod quadtree;
pub mod quality;
pub mod raster;
pub mod sa;
pub mod scalar;
pub mod stats;

pub use components::{Connectivity, LabelMap, connected_components, label_plane};
pub use confusion::{ConfusionError, ConfusionMatrix, confusion_matrix, majority_vote_mapping};
pub use features::{
    COLOUR_FEATURES, FeatureSubsetId, GRANULO_SIZES, MF_LEN, SubsetError, SubsetTable,
    mf_feature_names, select_subset, subset_indices,
};
pub use lvq::{LvqConfig, LvqError, lvq_train};
pub use morphology::{
    MorphologyError, StructuringElement, close, closing_family, dilate, erode, open,
    opening_family, volume,
};
pub use pnm::{PnmError, decode as decode_image, encode_p3, encode_p5, encode_p6};
pub use quadtree::{
    ColorCluster, DistanceMetric, HF_COLOURS, HF_LEN, QuadRegion, QuadtreeError, Signature,
    color_distance, gaussian_homogeneity_test, hf_feature_names, merge_regions, quadtree_decompose,
    render_signature,
};
pub use quality::{ClusterSet, QualityError, znormalize};
pub use raster::{Channel, Plane, Raster, RasterError, Rgb, rgb_to_hsv, rgbf_to_hsv};
pub use sa::{SaConfig, SaError, sa_cluster};
pub use scalar::Real;

/// `f64` instances of the scalar-generic types.
pub type HsvTriple = raster::HsvTriple<f64>;
pub type HfVector = quadtree::HfVector<f64>;
pub type MfVector = features::MfVector<f64>;
pub type FeatureMatrix = quality::FeatureMatrix<f64>;
pub type Normalized = quality::Normalized<f64>;
pub type QualityReport = quality::QualityReport<f64>;
pub type QualityRow = quality::QualityRow<f64>;
pub type PrototypeSet = lvq::PrototypeSet<f64>;
pub type SaOutcome = sa::SaOutcome<f64>;
