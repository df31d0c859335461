//! Confusion matrices and the cluster-to-class mapping for unsupervised
//! results.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfusionError {
    #[error("truth has {truth} entries but prediction has {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label {label} outside the declared {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
}

/// A truth-by-prediction tally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    class_names: Vec<String>,
}

impl ConfusionMatrix {
    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, r: usize) -> u64 {
        self.counts[r].iter().sum()
    }

    pub fn diagonal_sum(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.diagonal_sum() as f64 / total as f64
        }
    }

    /// Integer grid with a header row and column.
    pub fn to_table(&self) -> String {
        let mut out = String::from("truth\\pred");
        for name in &self.class_names {
            out.push('\t');
            out.push_str(name);
        }
        out.push('\n');
        for (r, row) in self.counts.iter().enumerate() {
            out.push_str(&self.class_names[r]);
            for &c in row {
                out.push_str(&format!("\t{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Tallies truth against prediction over `n_classes` classes. When `mapping`
/// is given, predictions are cluster indices translated through it first.
pub fn confusion_matrix(
    truth: &[usize],
    predicted: &[usize],
    n_classes: usize,
    mapping: Option<&[usize]>,
    class_names: Option<Vec<String>>,
) -> Result<ConfusionMatrix, ConfusionError> {
    if truth.len() != predicted.len() {
        return Err(ConfusionError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        let p = match mapping {
            Some(map) => *map.get(p).ok_or(ConfusionError::LabelOutOfRange {
                label: p,
                classes: map.len(),
            })?,
            None => p,
        };
        if t >= n_classes {
            return Err(ConfusionError::LabelOutOfRange {
                label: t,
                classes: n_classes,
            });
        }
        if p >= n_classes {
            return Err(ConfusionError::LabelOutOfRange {
                label: p,
                classes: n_classes,
            });
        }
        counts[t][p] += 1;
    }
    let class_names =
        class_names.unwrap_or_else(|| (1..=n_classes).map(|c| c.to_string()).collect());
    Ok(ConfusionMatrix {
        counts,
        class_names,
    })
}

/// Majority-vote mapping from clusters to classes: each cluster takes the
/// most frequent truth class among its members, ties to the lower class
/// index. Empty clusters map to class 0.
pub fn majority_vote_mapping(
    truth: &[usize],
    clusters: &[usize],
    n_classes: usize,
    n_clusters: usize,
) -> Result<Vec<usize>, ConfusionError> {
    if truth.len() != clusters.len() {
        return Err(ConfusionError::LengthMismatch {
            truth: truth.len(),
            predicted: clusters.len(),
        });
    }
    let mut votes = vec![vec![0u64; n_classes]; n_clusters];
    for (&t, &c) in truth.iter().zip(clusters) {
        if t >= n_classes {
            return Err(ConfusionError::LabelOutOfRange {
                label: t,
                classes: n_classes,
            });
        }
        if c >= n_clusters {
            return Err(ConfusionError::LabelOutOfRange {
                label: c,
                classes: n_clusters,
            });
        }
        votes[c][t] += 1;
    }
    Ok(votes
        .iter()
        .map(|per_class| {
            per_class
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
                .map(|(i, _)| i)
                .unwrap_or(0)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction_is_diagonal() {
        let truth = vec![0, 1, 2, 0, 1, 2];
        let cm = confusion_matrix(&truth, &truth, 3, None, None).unwrap();
        assert_eq!(cm.diagonal_sum(), 6);
        assert_eq!(cm.total(), 6);
        assert_eq!(cm.accuracy(), 1.0);
    }

    #[test]
    fn row_sums_match_class_counts() {
        let truth = vec![0, 0, 0, 1, 1, 2];
        let predicted = vec![0, 1, 2, 1, 1, 0];
        let cm = confusion_matrix(&truth, &predicted, 3, None, None).unwrap();
        assert_eq!(cm.row_sum(0), 3);
        assert_eq!(cm.row_sum(1), 2);
        assert_eq!(cm.row_sum(2), 1);
        assert_eq!(cm.total(), 6);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(confusion_matrix(&[0, 1], &[0], 2, None, None).is_err());
    }

    #[test]
    fn majority_vote_ties_take_lower_class() {
        let truth = vec![0, 1, 0, 1];
        let clusters = vec![0, 0, 1, 1];
        // Both clusters split 1-1: ties resolve to class 0.
        let map = majority_vote_mapping(&truth, &clusters, 2, 2).unwrap();
        assert_eq!(map, vec![0, 0]);
    }

    #[test]
    fn mapping_translates_clusters() {
        let truth = vec![1, 1, 0, 0];
        let clusters = vec![0, 0, 1, 1];
        let map = majority_vote_mapping(&truth, &clusters, 2, 2).unwrap();
        assert_eq!(map, vec![1, 0]);
        let cm = confusion_matrix(&truth, &clusters, 2, Some(&map), None).unwrap();
        assert_eq!(cm.diagonal_sum(), 4);
    }

    #[test]
    fn table_shape() {
        let cm = confusion_matrix(&[0, 1], &[1, 1], 2, None, None).unwrap();
        let table = cm.to_table();
        assert_eq!(table.lines().count(), 3);
        assert!(table.starts_with("truth\\pred\t1\t2"));
    }
}
