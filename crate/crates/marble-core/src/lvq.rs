//! Supervised prototype learning (LVQ1) and nearest-prototype
//! classification.

use rand::SeedableRng;
use rand::rngs::ChaCha8Rng;
use rand::seq::SliceRandom;
use thiserror::Error;

use crate::quality::{FeatureMatrix, sq_distance_unchecked};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LvqError {
    #[error("labels length {got} does not match {rows} rows")]
    LabelLength { got: usize, rows: usize },
    #[error("class {0} has no training samples")]
    EmptyClass(usize),
    #[error("feature dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
}

/// LVQ1 training parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LvqConfig {
    /// Starting learning rate in (0, 1); decays linearly to 0 over epochs.
    pub initial_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub prototypes_per_class: usize,
}

impl Default for LvqConfig {
    fn default() -> Self {
        Self {
            initial_rate: 0.1,
            epochs: 50,
            seed: 0,
            prototypes_per_class: 1,
        }
    }
}

/// A labelled prototype.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototype<T: Real> {
    pub vector: Vec<T>,
    pub label: usize,
}

/// The learned codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSet<T: Real> {
    prototypes: Vec<Prototype<T>>,
    dim: usize,
}

impl<T: Real> PrototypeSet<T> {
    pub fn prototypes(&self) -> &[Prototype<T>] {
        &self.prototypes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Label of the nearest prototype by squared Euclidean distance; ties go
    /// to the lowest prototype index.
    pub fn classify(&self, x: &[T]) -> Result<usize, LvqError> {
        if x.len() != self.dim {
            return Err(LvqError::DimensionMismatch {
                left: x.len(),
                right: self.dim,
            });
        }
        let mut best = 0usize;
        let mut best_d = T::infinity();
        for (i, p) in self.prototypes.iter().enumerate() {
            let d = sq_distance_unchecked(&p.vector, x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(self.prototypes[best].label)
    }

    /// Delimited table: class label then the vector components.
    pub fn to_table(&self) -> String {
        let mut out = String::from("class");
        for i in 1..=self.dim {
            out.push_str(&format!("\tw{i}"));
        }
        out.push('\n');
        for p in &self.prototypes {
            out.push_str(&p.label.to_string());
            for v in &p.vector {
                out.push_str(&format!("\t{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Trains an LVQ1 codebook. Prototypes start at the per-class means (or at
/// seeded random class samples when `prototypes_per_class > 1`); each epoch
/// visits the samples in a seeded shuffled order, moving the winning
/// prototype toward same-class samples and away from other-class samples
/// with a linearly decaying rate.
pub fn lvq_train<T: Real>(
    m: &FeatureMatrix<T>,
    labels: &[usize],
    cfg: &LvqConfig,
) -> Result<PrototypeSet<T>, LvqError> {
    if m.rows() == 0 {
        return Err(LvqError::EmptyTrainingSet);
    }
    if labels.len() != m.rows() {
        return Err(LvqError::LabelLength {
            got: labels.len(),
            rows: m.rows(),
        });
    }
    let n_classes = labels.iter().max().map_or(0, |&c| c + 1);
    let mut class_rows: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (row, &label) in labels.iter().enumerate() {
        class_rows[label].push(row);
    }
    if let Some(empty) = class_rows.iter().position(|rows| rows.is_empty()) {
        return Err(LvqError::EmptyClass(empty));
    }

    let dim = m.cols();
    let per_class = cfg.prototypes_per_class.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut prototypes: Vec<Prototype<T>> = Vec::with_capacity(n_classes * per_class);
    for (class, rows) in class_rows.iter().enumerate() {
        if per_class == 1 {
            let mut mean = vec![T::zero(); dim];
            for &r in rows {
                for (m_i, v) in mean.iter_mut().zip(m.row(r)) {
                    *m_i += *v;
                }
            }
            let n = T::of_usize(rows.len());
            for v in &mut mean {
                *v /= n;
            }
            prototypes.push(Prototype {
                vector: mean,
                label: class,
            });
        } else {
            let mut pool = rows.clone();
            pool.shuffle(&mut rng);
            for k in 0..per_class {
                let row = pool[k % pool.len()];
                prototypes.push(Prototype {
                    vector: m.row(row).to_vec(),
                    label: class,
                });
            }
        }
    }

    let mut order: Vec<usize> = (0..m.rows()).collect();
    for epoch in 0..cfg.epochs {
        let rate = T::of(cfg.initial_rate * (1.0 - epoch as f64 / cfg.epochs as f64));
        order.shuffle(&mut rng);
        for &row in &order {
            let x = m.row(row);
            let mut winner = 0usize;
            let mut best_d = T::infinity();
            for (i, p) in prototypes.iter().enumerate() {
                let d = sq_distance_unchecked(&p.vector, x);
                if d < best_d {
                    best_d = d;
                    winner = i;
                }
            }
            let matched = prototypes[winner].label == labels[row];
            let w = &mut prototypes[winner].vector;
            for (w_i, &x_i) in w.iter_mut().zip(x) {
                let step = rate * (x_i - *w_i);
                if matched {
                    *w_i += step;
                } else {
                    *w_i -= step;
                }
            }
        }
    }

    Ok(PrototypeSet { prototypes, dim })
}
