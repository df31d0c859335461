//! Morphological feature assembly: the 54 colour octils, the 540
//! granulometric octils, the 594-wide MF vector and the named feature
//! subsets.

use thiserror::Error;

use crate::morphology::{closing_family, octils, opening_family};
use crate::raster::{Channel, Plane, Raster};
use crate::scalar::Real;

/// Number of granulometric size classes per family.
pub const GRANULO_SIZES: usize = 30;
/// Colour block width: six channels times (min + eight octils).
pub const COLOUR_FEATURES: usize = 54;
/// Full morphological vector width.
pub const MF_LEN: usize = COLOUR_FEATURES + 2 * 9 * GRANULO_SIZES;

/// Minimum plus octils for each of R, G, B, H, S, V, in that order.
pub fn colour_features<T: Real>(raster: &Raster) -> [T; COLOUR_FEATURES] {
    let mut out = [T::zero(); COLOUR_FEATURES];
    for (c, channel) in Channel::ALL.iter().enumerate() {
        let plane = raster.channel_plane(*channel);
        out[c * 9..(c + 1) * 9].copy_from_slice(&octils::<T>(&plane));
    }
    out
}

/// Octils of every opening of sizes `1..=max_size`, then of every closing.
/// Each size class is the transform of the original plane, not a residue.
pub fn granulometric_features<T: Real>(plane: &Plane, max_size: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(2 * 9 * max_size);
    for opened in opening_family(plane, max_size) {
        out.extend_from_slice(&octils::<T>(&opened));
    }
    for closed in closing_family(plane, max_size) {
        out.extend_from_slice(&octils::<T>(&closed));
    }
    out
}

/// The 594-element morphological feature vector: 54 colour octils followed
/// by 270 opening-class and 270 closing-class octils.
#[derive(Debug, Clone, PartialEq)]
pub struct MfVector<T: Real> {
    pub values: [T; MF_LEN],
}

/// Assembles the MF vector. Granulometries run on `analysis` (V by default
/// in the pipeline).
pub fn assemble_mf<T: Real>(raster: &Raster, analysis: Channel) -> MfVector<T> {
    let mut values = [T::zero(); MF_LEN];
    values[..COLOUR_FEATURES].copy_from_slice(&colour_features::<T>(raster));
    let plane = raster.channel_plane(analysis);
    let granulo = granulometric_features::<T>(&plane, GRANULO_SIZES);
    values[COLOUR_FEATURES..].copy_from_slice(&granulo);
    MfVector { values }
}

/// Column names matching the MF layout.
pub fn mf_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(MF_LEN);
    for channel in Channel::ALL {
        names.push(format!("{}_min", channel.name()));
        for k in 1..=8 {
            names.push(format!("{}_q{k}", channel.name()));
        }
    }
    for prefix in ["open", "close"] {
        for r in 1..=GRANULO_SIZES {
            names.push(format!("{prefix}{r}_min"));
            for k in 1..=8 {
                names.push(format!("{prefix}{r}_q{k}"));
            }
        }
    }
    names
}

/// The six named feature subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureSubsetId {
    HfA,
    HfB,
    HfC,
    MfA,
    MfB,
    MfC,
}

impl FeatureSubsetId {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureSubsetId::HfA => "HF_A",
            FeatureSubsetId::HfB => "HF_B",
            FeatureSubsetId::HfC => "HF_C",
            FeatureSubsetId::MfA => "MF_A",
            FeatureSubsetId::MfB => "MF_B",
            FeatureSubsetId::MfC => "MF_C",
        }
    }

    /// True for the subsets drawn from the 56-wide homogeneity vector.
    pub fn is_hf(&self) -> bool {
        matches!(
            self,
            FeatureSubsetId::HfA | FeatureSubsetId::HfB | FeatureSubsetId::HfC
        )
    }
}

impl std::str::FromStr for FeatureSubsetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "HF_A" => Ok(FeatureSubsetId::HfA),
            "HF_B" => Ok(FeatureSubsetId::HfB),
            "HF_C" => Ok(FeatureSubsetId::HfC),
            "MF_A" => Ok(FeatureSubsetId::MfA),
            "MF_B" => Ok(FeatureSubsetId::MfB),
            "MF_C" => Ok(FeatureSubsetId::MfC),
            other => Err(format!("unknown feature subset '{other}'")),
        }
    }
}

/// User-configurable HF subsets as 1-based feature indices. HF_B ships with
/// a default; HF_C has no defensible default and must be provided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetTable {
    pub hf_b: Option<Vec<usize>>,
    pub hf_c: Option<Vec<usize>>,
}

impl SubsetTable {
    /// Colour-0 RGB plus its mean HSV: slots 3..5 and 26..28.
    pub const HF_B_DEFAULT: [usize; 6] = [3, 4, 5, 26, 27, 28];
}

impl Default for SubsetTable {
    fn default() -> Self {
        Self {
            hf_b: Some(Self::HF_B_DEFAULT.to_vec()),
            hf_c: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubsetError {
    #[error("subset {0} requires a configured index list")]
    MissingSubset(&'static str),
    #[error("subset {subset}: 1-based index {index} outside 1..={len}")]
    IndexOutOfRange {
        subset: &'static str,
        index: usize,
        len: usize,
    },
}

/// Resolves a subset to 0-based indices into a vector of length `len`.
pub fn subset_indices(
    id: FeatureSubsetId,
    table: &SubsetTable,
    len: usize,
) -> Result<Vec<usize>, SubsetError> {
    let one_based: Vec<usize> = match id {
        FeatureSubsetId::HfA => (1..=crate::quadtree::HF_LEN).collect(),
        FeatureSubsetId::MfA => (1..=MF_LEN).collect(),
        FeatureSubsetId::MfB => (1..=324).collect(),
        FeatureSubsetId::MfC => (325..=MF_LEN).collect(),
        FeatureSubsetId::HfB => table
            .hf_b
            .clone()
            .ok_or(SubsetError::MissingSubset("HF_B"))?,
        FeatureSubsetId::HfC => table
            .hf_c
            .clone()
            .ok_or(SubsetError::MissingSubset("HF_C"))?,
    };
    one_based
        .into_iter()
        .map(|i| {
            if i == 0 || i > len {
                Err(SubsetError::IndexOutOfRange {
                    subset: id.name(),
                    index: i,
                    len,
                })
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

/// Projects a feature vector onto a subset, preserving order.
pub fn select_subset<T: Real>(
    values: &[T],
    id: FeatureSubsetId,
    table: &SubsetTable,
) -> Result<Vec<T>, SubsetError> {
    let indices = subset_indices(id, table, values.len())?;
    Ok(indices.into_iter().map(|i| values[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rgb;

    #[test]
    fn colour_features_of_constant_raster() {
        let raster = Raster::filled(8, 8, Rgb::new(10, 20, 30)).unwrap();
        let feats = colour_features::<f64>(&raster);
        assert!(feats[..9].iter().all(|&v| v == 10.0));
        assert!(feats[9..18].iter().all(|&v| v == 20.0));
        assert!(feats[18..27].iter().all(|&v| v == 30.0));
        assert_eq!(feats.len(), 54);
    }

    #[test]
    fn granulometric_features_of_constant_plane() {
        let plane = Plane::filled(8, 8, 42).unwrap();
        let feats = granulometric_features::<f64>(&plane, 5);
        assert_eq!(feats.len(), 90);
        assert!(feats.iter().all(|&v| v == 42.0));
    }

    #[test]
    fn mf_layout_for_constant_raster() {
        let raster = Raster::filled(8, 8, Rgb::new(10, 20, 30)).unwrap();
        let mf = assemble_mf::<f64>(&raster, Channel::V);
        assert_eq!(mf.values.len(), 594);
        // V of (10,20,30) is 30/255, quantized back to 30.
        assert!(mf.values[54..].iter().all(|&v| v == 30.0));
        assert_eq!(mf_feature_names().len(), 594);
    }

    /// Closings fill dark veins as the size grows: the closing-block octils
    /// of a veined raster rise with r, a constant raster's stay flat.
    #[test]
    fn closing_block_responds_to_veins() {
        let mut veined = Raster::filled(32, 32, Rgb::grey(200)).unwrap();
        for y in 0..32 {
            for x in (5usize..10).chain(20..25) {
                veined.set(x, y, Rgb::grey(20));
            }
        }
        let mf = assemble_mf::<f64>(&veined, Channel::V);
        let closing_block = &mf.values[54 + 270..];
        let q1 = |r: usize| closing_block[(r - 1) * 9 + 1];
        assert!(q1(8) > q1(1), "q1 at r=8 {} vs r=1 {}", q1(8), q1(1));
        let min = |r: usize| closing_block[(r - 1) * 9];
        assert!(min(8) > min(1));

        let flat = assemble_mf::<f64>(&Raster::filled(32, 32, Rgb::grey(200)).unwrap(), Channel::V);
        let flat_block = &flat.values[54 + 270..];
        assert!(flat_block.iter().all(|&v| v == 200.0));
    }

    #[test]
    fn subset_widths() {
        let table = SubsetTable::default();
        let mf = vec![0.0f64; MF_LEN];
        assert_eq!(
            select_subset(&mf, FeatureSubsetId::MfA, &table)
                .unwrap()
                .len(),
            594
        );
        assert_eq!(
            select_subset(&mf, FeatureSubsetId::MfB, &table)
                .unwrap()
                .len(),
            324
        );
        assert_eq!(
            select_subset(&mf, FeatureSubsetId::MfC, &table)
                .unwrap()
                .len(),
            270
        );
    }

    #[test]
    fn hf_subsets_resolve_through_config() {
        let table = SubsetTable::default();
        let hf: Vec<f64> = (1..=56).map(|v| v as f64).collect();
        let b = select_subset(&hf, FeatureSubsetId::HfB, &table).unwrap();
        assert_eq!(b, vec![3.0, 4.0, 5.0, 26.0, 27.0, 28.0]);
        assert_eq!(
            select_subset(&hf, FeatureSubsetId::HfC, &table),
            Err(SubsetError::MissingSubset("HF_C"))
        );
    }

    #[test]
    fn out_of_range_subset_index() {
        let table = SubsetTable {
            hf_b: Some(vec![57]),
            hf_c: None,
        };
        let hf = vec![0.0f64; 56];
        assert!(matches!(
            select_subset(&hf, FeatureSubsetId::HfB, &table),
            Err(SubsetError::IndexOutOfRange { index: 57, .. })
        ));
    }

    #[test]
    fn mf_subset_on_hf_vector_is_rejected() {
        let table = SubsetTable::default();
        let hf = vec![0.0f64; 56];
        assert!(select_subset(&hf, FeatureSubsetId::MfB, &table).is_err());
    }
}
