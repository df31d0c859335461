//! Algebraic identities of the quality measures on random instances.

use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};

use marble_core::quality::{
    ClusterSet, FeatureMatrix, combined, interset, intraset, mean_interset, znormalize,
};

fn random_instance(rng: &mut ChaCha8Rng, max_rows: usize) -> (FeatureMatrix<f64>, ClusterSet) {
    let rows = rng.random_range(4..max_rows);
    let cols = rng.random_range(1..6usize);
    let k = rng.random_range(2..=rows.min(5));
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| rng.random::<f64>() * 20.0 - 10.0)
                .collect()
        })
        .collect();
    // Every cluster non-empty: first k rows get one cluster each.
    let assignment: Vec<usize> = (0..rows)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .collect();
    let ids = (0..rows).map(|i| format!("s{i}")).collect();
    (
        FeatureMatrix::from_rows(ids, data).unwrap(),
        ClusterSet::new(assignment, k).unwrap(),
    )
}

/// combined == sum(intra) / sum(inter) to 1e-12 relative.
#[test]
fn combined_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..200 {
        let (m, set) = random_instance(&mut rng, 20);
        let c = combined(&m, &set).unwrap();
        let num: f64 = (0..set.n_clusters())
            .map(|c| intraset(&m, &set, c).unwrap())
            .sum();
        let mut den = 0.0;
        for c1 in 0..set.n_clusters() {
            for c2 in 0..set.n_clusters() {
                if c1 != c2 {
                    den += interset(&m, &set, c1, c2).unwrap();
                }
            }
        }
        let expected = num / den;
        assert!(
            (c - expected).abs() <= 1e-12 * expected.abs().max(1e-300),
            "combined {c} vs {expected}"
        );
    }
}

#[test]
fn interset_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100 {
        let (m, set) = random_instance(&mut rng, 16);
        for c1 in 0..set.n_clusters() {
            for c2 in 0..set.n_clusters() {
                if c1 != c2 {
                    assert_eq!(
                        interset(&m, &set, c1, c2).unwrap(),
                        interset(&m, &set, c2, c1).unwrap()
                    );
                }
            }
        }
    }
}

/// Scaling all features by c scales intra and inter by c^2 and leaves the
/// combined ratio unchanged.
#[test]
fn quadratic_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..100 {
        let (m, set) = random_instance(&mut rng, 14);
        let scale = rng.random::<f64>() * 4.0 + 0.5;
        let scaled = FeatureMatrix::from_rows(
            m.row_ids().to_vec(),
            (0..m.rows())
                .map(|r| m.row(r).iter().map(|&v| v * scale).collect())
                .collect(),
        )
        .unwrap();

        let c2 = scale * scale;
        for c in 0..set.n_clusters() {
            let a = intraset(&m, &set, c).unwrap();
            let b = intraset(&scaled, &set, c).unwrap();
            assert!((b - c2 * a).abs() <= 1e-9 * (c2 * a).abs().max(1e-12));
        }
        let a = mean_interset(&m, &set).unwrap();
        let b = mean_interset(&scaled, &set).unwrap();
        assert!((b - c2 * a).abs() <= 1e-9 * (c2 * a).abs().max(1e-12));

        if let (Ok(ca), Ok(cb)) = (combined(&m, &set), combined(&scaled, &set)) {
            assert!((ca - cb).abs() <= 1e-9 * ca.abs().max(1e-12));
        }
    }
}

/// znormalize leaves every non-degenerate column with |mean| < 1e-9 and
/// |variance - 1| < 1e-9.
#[test]
fn znormalize_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..100 {
        let rows = rng.random_range(2..30usize);
        let cols = rng.random_range(1..8usize);
        let data: Vec<Vec<f64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| rng.random::<f64>() * 100.0 - 50.0)
                    .collect()
            })
            .collect();
        let ids = (0..rows).map(|i| format!("s{i}")).collect();
        let m = FeatureMatrix::from_rows(ids, data).unwrap();
        let normalized = znormalize(&m).unwrap();
        for c in 0..cols {
            if normalized.zero_variance_columns.contains(&c) {
                continue;
            }
            let column: Vec<f64> = (0..rows).map(|r| normalized.matrix.row(r)[c]).collect();
            let mean = column.iter().sum::<f64>() / rows as f64;
            let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows as f64;
            assert!(mean.abs() < 1e-9, "column {c} mean {mean}");
            assert!((var - 1.0).abs() < 1e-9, "column {c} var {var}");
        }
    }
}

/// All measures are invariant under a permutation of the matrix rows.
#[test]
fn row_permutation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..50 {
        let (m, set) = random_instance(&mut rng, 12);
        let rows = m.rows();
        let mut perm: Vec<usize> = (0..rows).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut rng);

        let permuted = FeatureMatrix::from_rows(
            perm.iter().map(|&i| m.row_ids()[i].clone()).collect(),
            perm.iter().map(|&i| m.row(i).to_vec()).collect(),
        )
        .unwrap();
        let permuted_set = ClusterSet::new(
            perm.iter().map(|&i| set.assignment()[i]).collect(),
            set.n_clusters(),
        )
        .unwrap();

        let a = combined(&m, &set).unwrap();
        let b = combined(&permuted, &permuted_set).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}

/// Cluster relabelling leaves the mean interset unchanged.
#[test]
fn mean_interset_relabel_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..50 {
        let (m, set) = random_instance(&mut rng, 12);
        let k = set.n_clusters();
        let mut relabel: Vec<usize> = (0..k).collect();
        use rand::seq::SliceRandom;
        relabel.shuffle(&mut rng);
        let relabelled =
            ClusterSet::new(set.assignment().iter().map(|&c| relabel[c]).collect(), k).unwrap();
        let a = mean_interset(&m, &set).unwrap();
        let b = mean_interset(&m, &relabelled).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}
