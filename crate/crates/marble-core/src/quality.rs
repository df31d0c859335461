//! Feature-matrix normalization and the cluster-quality measures: intraset,
//! interset, their means and the combined intraset/interset ratio.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QualityError {
    #[error("feature matrix needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("row length {got} does not match {cols} columns")]
    RaggedRow { got: usize, cols: usize },
    #[error("duplicate sample id '{0}'")]
    DuplicateId(String),
    #[error("no row with sample id '{0}'")]
    UnknownId(String),
    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("interset needs two distinct clusters, got {0} twice")]
    SameCluster(usize),
    #[error("need at least 2 clusters, got {0}")]
    TooFewClusters(usize),
    #[error("all clusters are coincident: interset denominator is zero")]
    DegenerateInterset,
    #[error("assignment length {got} does not match {rows} rows")]
    AssignmentLength { got: usize, rows: usize },
    #[error("column selection index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
}

/// A rectangular samples-by-features matrix with named rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T: Real> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
    row_ids: Vec<String>,
    col_names: Vec<String>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(
        row_ids: Vec<String>,
        col_names: Vec<String>,
        values: Vec<T>,
    ) -> Result<Self, QualityError> {
        let rows = row_ids.len();
        let cols = col_names.len();
        if values.len() != rows * cols {
            return Err(QualityError::RaggedRow {
                got: values.len(),
                cols,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for id in &row_ids {
            if !seen.insert(id.as_str()) {
                return Err(QualityError::DuplicateId(id.clone()));
            }
        }
        Ok(Self {
            rows,
            cols,
            values,
            row_ids,
            col_names,
        })
    }

    /// Builds from per-row vectors with synthetic column names.
    pub fn from_rows(row_ids: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self, QualityError> {
        let cols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != cols {
                return Err(QualityError::RaggedRow { got: r.len(), cols });
            }
        }
        let col_names = (0..cols).map(|i| format!("f{}", i + 1)).collect();
        let values = rows.into_iter().flatten().collect();
        Self::new(row_ids, col_names, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    /// Projection onto a column subset, order preserved.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self, QualityError> {
        for &i in indices {
            if i >= self.cols {
                return Err(QualityError::ColumnOutOfRange {
                    index: i,
                    cols: self.cols,
                });
            }
        }
        let col_names = indices.iter().map(|&i| self.col_names[i].clone()).collect();
        let mut values = Vec::with_capacity(self.rows * indices.len());
        for r in 0..self.rows {
            let row = self.row(r);
            values.extend(indices.iter().map(|&i| row[i]));
        }
        Self::new(self.row_ids.clone(), col_names, values)
    }

    /// Reorders and filters rows by id, in the order given.
    pub fn select_rows(&self, ids: &[String]) -> Result<Self, QualityError> {
        let index: std::collections::HashMap<&str, usize> = self
            .row_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut values = Vec::with_capacity(ids.len() * self.cols);
        for id in ids {
            let &r = index
                .get(id.as_str())
                .ok_or_else(|| QualityError::UnknownId(id.clone()))?;
            values.extend_from_slice(self.row(r));
        }
        Self::new(ids.to_vec(), self.col_names.clone(), values)
    }
}

/// Result of z-normalization: every column has mean 0 and population
/// variance 1; constant columns become all-zeros and are listed.
#[derive(Debug, Clone)]
pub struct Normalized<T: Real> {
    pub matrix: FeatureMatrix<T>,
    pub zero_variance_columns: Vec<usize>,
}

/// Column-wise z-normalization with population variance.
pub fn znormalize<T: Real>(m: &FeatureMatrix<T>) -> Result<Normalized<T>, QualityError> {
    if m.rows < 2 {
        return Err(QualityError::TooFewRows(m.rows));
    }
    let n = T::of_usize(m.rows);
    let mut values = m.values.clone();
    let mut zero_variance = Vec::new();
    for c in 0..m.cols {
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        for r in 0..m.rows {
            let v = m.values[r * m.cols + c];
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(T::zero());
        if var == T::zero() {
            zero_variance.push(c);
            for r in 0..m.rows {
                values[r * m.cols + c] = T::zero();
            }
        } else {
            let sd = var.sqrt();
            for r in 0..m.rows {
                let v = &mut values[r * m.cols + c];
                *v = (*v - mean) / sd;
            }
        }
    }
    Ok(Normalized {
        matrix: FeatureMatrix {
            rows: m.rows,
            cols: m.cols,
            values,
            row_ids: m.row_ids.clone(),
            col_names: m.col_names.clone(),
        },
        zero_variance_columns: zero_variance,
    })
}

/// Squared Euclidean distance between two feature rows.
pub fn sq_distance<T: Real>(x: &[T], y: &[T]) -> Result<T, QualityError> {
    if x.len() != y.len() {
        return Err(QualityError::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(sq_distance_unchecked(x, y))
}

#[inline]
pub(crate) fn sq_distance_unchecked<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// A full assignment of matrix rows to clusters `0..n_clusters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    assignment: Vec<usize>,
    n_clusters: usize,
}

impl ClusterSet {
    /// Builds from an assignment vector; `n_clusters` may exceed the largest
    /// index used (empty clusters are permitted but flagged).
    pub fn new(assignment: Vec<usize>, n_clusters: usize) -> Result<Self, QualityError> {
        if let Some(&bad) = assignment.iter().find(|&&c| c >= n_clusters) {
            return Err(QualityError::EmptyCluster(bad));
        }
        Ok(Self {
            assignment,
            n_clusters,
        })
    }

    /// Builds from arbitrary labels, mapping them densely in first-encounter
    /// order.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut seen: Vec<L> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for l in labels {
            let idx = match seen.iter().position(|s| s == l) {
                Some(i) => i,
                None => {
                    seen.push(l.clone());
                    seen.len() - 1
                }
            };
            assignment.push(idx);
        }
        Self {
            assignment,
            n_clusters: seen.len(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == cluster)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn has_empty_clusters(&self) -> bool {
        (0..self.n_clusters).any(|c| !self.assignment.contains(&c))
    }
}

fn check_alignment<T: Real>(m: &FeatureMatrix<T>, set: &ClusterSet) -> Result<(), QualityError> {
    if set.len() != m.rows() {
        return Err(QualityError::AssignmentLength {
            got: set.len(),
            rows: m.rows(),
        });
    }
    Ok(())
}

/// Mean squared distance over the cross product of two distinct clusters.
pub fn interset<T: Real>(
    m: &FeatureMatrix<T>,
    set: &ClusterSet,
    c1: usize,
    c2: usize,
) -> Result<T, QualityError> {
    if c1 == c2 {
        return Err(QualityError::SameCluster(c1));
    }
    check_alignment(m, set)?;
    let a = set.members(c1);
    let b = set.members(c2);
    if a.is_empty() {
        return Err(QualityError::EmptyCluster(c1));
    }
    if b.is_empty() {
        return Err(QualityError::EmptyCluster(c2));
    }
    // Fixed pair enumeration keeps interset(c1,c2) bit-identical to
    // interset(c2,c1).
    let (outer, inner) = if c1 < c2 { (&a, &b) } else { (&b, &a) };
    let mut sum = T::zero();
    for &i in outer {
        for &j in inner {
            sum += sq_distance_unchecked(m.row(i), m.row(j));
        }
    }
    Ok(sum / (T::of_usize(a.len()) * T::of_usize(b.len())))
}

/// Average of the interset distance over all ordered cluster pairs.
pub fn mean_interset<T: Real>(m: &FeatureMatrix<T>, set: &ClusterSet) -> Result<T, QualityError> {
    let k = set.n_clusters();
    if k < 2 {
        return Err(QualityError::TooFewClusters(k));
    }
    let mut sum = T::zero();
    for c1 in 0..k {
        for c2 in 0..k {
            if c1 != c2 {
                sum += interset(m, set, c1, c2)?;
            }
        }
    }
    Ok(sum / T::of_usize(k * (k - 1)))
}

/// Mean squared distance over ordered within-cluster pairs; singleton
/// clusters score zero.
pub fn intraset<T: Real>(
    m: &FeatureMatrix<T>,
    set: &ClusterSet,
    c: usize,
) -> Result<T, QualityError> {
    check_alignment(m, set)?;
    let members = set.members(c);
    if members.is_empty() {
        return Err(QualityError::EmptyCluster(c));
    }
    let mc = members.len();
    if mc == 1 {
        return Ok(T::zero());
    }
    let mut sum = T::zero();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            sum += sq_distance_unchecked(m.row(i), m.row(j));
        }
    }
    // Ordered pairs double the unordered sum.
    let two = T::of(2.0);
    Ok(two * sum / (T::of_usize(mc) * T::of_usize(mc - 1)))
}

/// Combined quality: sum of intrasets divided by the sum of intersets over
/// ordered cluster pairs. Lower is better.
pub fn combined<T: Real>(m: &FeatureMatrix<T>, set: &ClusterSet) -> Result<T, QualityError> {
    let k = set.n_clusters();
    if k < 2 {
        return Err(QualityError::TooFewClusters(k));
    }
    let mut numerator = T::zero();
    for c in 0..k {
        numerator += intraset(m, set, c)?;
    }
    let mut denominator = T::zero();
    for c1 in 0..k {
        for c2 in 0..k {
            if c1 != c2 {
                denominator += interset(m, set, c1, c2)?;
            }
        }
    }
    if denominator == T::zero() {
        return Err(QualityError::DegenerateInterset);
    }
    Ok(numerator / denominator)
}

/// One evaluated (subset, label-set) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityRow<T: Real> {
    pub subset: String,
    /// Average of the per-cluster intraset distances.
    pub intra: T,
    /// Mean interset distance.
    pub inter: T,
    /// Combined ratio (sums, not means).
    pub combined: T,
    /// Largest per-cluster intraset distance.
    pub max_intra: T,
    /// Smallest pairwise interset distance.
    pub min_inter: T,
}

/// A block of rows per label set.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport<T: Real> {
    pub blocks: Vec<(String, Vec<QualityRow<T>>)>,
}

impl<T: Real> QualityReport<T> {
    /// Delimited rendering: subset, intra, inter, combined plus the max/min
    /// diagnostics, one block per label set.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (label_set, rows) in &self.blocks {
            out.push_str(&format!("# label set: {label_set}\n"));
            out.push_str("subset\tintra\tinter\tcombined\tmax_intra\tmin_inter\n");
            for row in rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    row.subset, row.intra, row.inter, row.combined, row.max_intra, row.min_inter
                ));
            }
        }
        out
    }
}

/// Evaluates the quality measures for one matrix and label set.
pub fn quality_row<T: Real>(
    m: &FeatureMatrix<T>,
    set: &ClusterSet,
    subset_name: &str,
) -> Result<QualityRow<T>, QualityError> {
    let k = set.n_clusters();
    if k < 2 {
        return Err(QualityError::TooFewClusters(k));
    }
    let mut intras = Vec::with_capacity(k);
    for c in 0..k {
        intras.push(intraset(m, set, c)?);
    }
    let intra_mean = intras.iter().copied().sum::<T>() / T::of_usize(k);
    let max_intra = intras
        .iter()
        .copied()
        .fold(T::neg_infinity(), |a, b| a.max(b));

    let mut inter_sum = T::zero();
    let mut min_inter = T::infinity();
    for c1 in 0..k {
        for c2 in 0..k {
            if c1 != c2 {
                let d = interset(m, set, c1, c2)?;
                inter_sum += d;
                min_inter = min_inter.min(d);
            }
        }
    }
    let pairs = T::of_usize(k * (k - 1));
    let intra_sum = intras.iter().copied().sum::<T>();
    if inter_sum == T::zero() {
        return Err(QualityError::DegenerateInterset);
    }
    Ok(QualityRow {
        subset: subset_name.to_string(),
        intra: intra_mean,
        inter: inter_sum / pairs,
        combined: intra_sum / inter_sum,
        max_intra,
        min_inter,
    })
}

/// Builds the full report: one row per feature subset, one block per label
/// set. `subsets` pairs a name with the column indices to project onto.
pub fn quality_table<T: Real>(
    m: &FeatureMatrix<T>,
    subsets: &[(String, Vec<usize>)],
    label_sets: &[(String, ClusterSet)],
) -> Result<QualityReport<T>, QualityError> {
    let mut blocks = Vec::with_capacity(label_sets.len());
    for (label_name, set) in label_sets {
        let mut rows = Vec::with_capacity(subsets.len());
        for (subset_name, indices) in subsets {
            let projected = m.select_columns(indices)?;
            rows.push(quality_row(&projected, set, subset_name)?);
        }
        blocks.push((label_name.clone(), rows));
    }
    Ok(QualityReport { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix<f64> {
        let ids = (0..rows.len()).map(|i| format!("s{i}")).collect();
        FeatureMatrix::from_rows(ids, rows).unwrap()
    }

    #[test]
    fn znormalize_basics() {
        let m = matrix(vec![vec![-1.0, 0.0, 5.0], vec![1.0, 10.0, 5.0]]);
        let normalized = znormalize(&m).unwrap();
        // Column (-1, 1) already has mean 0 and population variance 1.
        assert_eq!(normalized.matrix.row(0)[0], -1.0);
        assert_eq!(normalized.matrix.row(1)[0], 1.0);
        // Column (0, 10): mean 5, population sigma 5.
        assert_eq!(normalized.matrix.row(0)[1], -1.0);
        assert_eq!(normalized.matrix.row(1)[1], 1.0);
        // Constant column flagged and zeroed.
        assert_eq!(normalized.zero_variance_columns, vec![2]);
        assert_eq!(normalized.matrix.row(0)[2], 0.0);
    }

    #[test]
    fn znormalize_rejects_single_row() {
        let m = matrix(vec![vec![1.0, 2.0]]);
        assert_eq!(znormalize(&m).unwrap_err(), QualityError::TooFewRows(1));
    }

    #[test]
    fn sq_distance_cases() {
        assert_eq!(sq_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
        assert_eq!(sq_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(sq_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn interset_hand_cases() {
        // {(0,0),(0,2)} vs {(3,0)}: (9 + 13) / 2 = 11.
        let m = matrix(vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![3.0, 0.0]]);
        let set = ClusterSet::new(vec![0, 0, 1], 2).unwrap();
        assert_eq!(interset(&m, &set, 0, 1).unwrap(), 11.0);
        assert_eq!(interset(&m, &set, 1, 0).unwrap(), 11.0);
        assert!(interset(&m, &set, 0, 0).is_err());

        // Singletons give the plain squared distance.
        let m2 = matrix(vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        let s2 = ClusterSet::new(vec![0, 1], 2).unwrap();
        assert_eq!(interset(&m2, &s2, 0, 1).unwrap(), 25.0);

        // Identical duplicated points across clusters.
        let m3 = matrix(vec![vec![7.0], vec![7.0]]);
        assert_eq!(interset(&m3, &s2, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn intraset_hand_cases() {
        let m = matrix(vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        let both = ClusterSet::new(vec![0, 0], 1).unwrap();
        assert_eq!(intraset(&m, &both, 0).unwrap(), 25.0);

        let singleton = ClusterSet::new(vec![0, 1], 2).unwrap();
        assert_eq!(intraset(&m, &singleton, 0).unwrap(), 0.0);

        let dup = matrix(vec![vec![5.0], vec![5.0], vec![5.0]]);
        let all = ClusterSet::new(vec![0, 0, 0], 1).unwrap();
        assert_eq!(intraset(&dup, &all, 0).unwrap(), 0.0);
    }

    #[test]
    fn mean_interset_of_equilateral_singletons() {
        // Mutual squared distance 4: equilateral triangle of side 2.
        let s3 = 3.0f64.sqrt();
        let m = matrix(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, s3]]);
        let set = ClusterSet::new(vec![0, 1, 2], 3).unwrap();
        let got = mean_interset(&m, &set).unwrap();
        assert!((got - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mean_interset_of_two_clusters_equals_interset() {
        let m = matrix(vec![vec![0.0], vec![1.0], vec![5.0], vec![6.0]]);
        let set = ClusterSet::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(
            mean_interset(&m, &set).unwrap(),
            interset(&m, &set, 0, 1).unwrap()
        );
    }

    #[test]
    fn combined_four_point_case() {
        // Clusters {(0,0),(0,2)} and {(3,0),(3,2)}: 8/22.
        let m = matrix(vec![
            vec![0.0, 0.0],
            vec![0.0, 2.0],
            vec![3.0, 0.0],
            vec![3.0, 2.0],
        ]);
        let set = ClusterSet::new(vec![0, 0, 1, 1], 2).unwrap();
        let got = combined(&m, &set).unwrap();
        assert!((got - 8.0 / 22.0).abs() < 1e-15);
    }

    #[test]
    fn combined_of_singletons_is_zero() {
        let m = matrix(vec![vec![0.0], vec![1.0], vec![2.0]]);
        let set = ClusterSet::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(combined(&m, &set).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_interset_is_reported() {
        let m = matrix(vec![vec![1.0], vec![1.0]]);
        let set = ClusterSet::new(vec![0, 1], 2).unwrap();
        assert_eq!(
            combined(&m, &set).unwrap_err(),
            QualityError::DegenerateInterset
        );
    }

    #[test]
    fn quality_table_shape() {
        let m = matrix(vec![
            vec![0.0, 9.0],
            vec![0.1, 9.1],
            vec![5.0, 1.0],
            vec![5.1, 1.1],
        ]);
        let labels = ClusterSet::new(vec![0, 0, 1, 1], 2).unwrap();
        let subsets = vec![
            ("first".to_string(), vec![0usize]),
            ("second".to_string(), vec![1usize]),
            ("both".to_string(), vec![0usize, 1]),
        ];
        let report = quality_table(&m, &subsets, &[("labels".to_string(), labels)]).unwrap();
        assert_eq!(report.blocks.len(), 1);
        assert_eq!(report.blocks[0].1.len(), 3);
        let rendered = report.to_table();
        assert_eq!(rendered.lines().count(), 1 + 1 + 3);
        for row in &report.blocks[0].1 {
            assert!(row.combined.is_finite());
            assert!(row.max_intra >= row.intra || row.intra == 0.0);
        }
    }

    #[test]
    fn select_rows_reorders_and_rejects_unknown_ids() {
        let m = matrix(vec![vec![1.0], vec![2.0], vec![3.0]]);
        let picked = m
            .select_rows(&["s2".to_string(), "s0".to_string()])
            .unwrap();
        assert_eq!(picked.rows(), 2);
        assert_eq!(picked.row(0), &[3.0]);
        assert_eq!(picked.row(1), &[1.0]);
        assert_eq!(
            m.select_rows(&["nope".to_string()]).unwrap_err(),
            QualityError::UnknownId("nope".to_string())
        );
    }

    #[test]
    fn cluster_set_from_labels_is_first_encounter_dense() {
        let set = ClusterSet::from_labels(&["b", "a", "b", "c"]);
        assert_eq!(set.assignment(), &[0, 1, 0, 2]);
        assert_eq!(set.n_clusters(), 3);
        assert!(!set.has_empty_clusters());
    }
}
