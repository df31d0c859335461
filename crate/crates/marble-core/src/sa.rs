//! Unsupervised clustering by simulated annealing over full assignments.
//!
//! The state is an assignment of every row to one of K clusters; the energy
//! is the total within-cluster sum of pairwise squared distances, the
//! unnormalized form of the intraset measure the quality report uses. The
//! mean-normalized form scores singleton clusters as zero, which makes
//! "park five singletons, lump the rest" a deep attractor of single-move
//! dynamics; dropping the 1/(M(M-1)) factor removes that trap while keeping
//! the same within-cluster quantity. Proposals move one random sample to
//! another random cluster and are rejected outright if they would empty a
//! cluster. Energy bookkeeping is incremental over a precomputed pairwise
//! distance table.

use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use thiserror::Error;

use crate::quality::{ClusterSet, FeatureMatrix, sq_distance_unchecked};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SaError {
    #[error("need at least 2 clusters, got {0}")]
    TooFewClusters(usize),
    #[error("cannot split {rows} rows into {k} non-empty clusters")]
    TooManyClusters { rows: usize, k: usize },
    #[error("invalid schedule: final temperature {final_t} not below initial {initial_t}")]
    BadSchedule { initial_t: String, final_t: String },
}

/// Annealing schedule and seed. `initial_temperature` and
/// `moves_per_temperature` may be left to their data-driven defaults: the
/// standard deviation of 100 seeded random-move energy changes, and 50 moves
/// per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub initial_temperature: Option<f64>,
    pub cooling_factor: f64,
    pub moves_per_temperature: Option<usize>,
    pub final_temperature: f64,
    pub seed: u64,
    pub k: usize,
}

impl SaConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            initial_temperature: None,
            cooling_factor: 0.95,
            moves_per_temperature: None,
            final_temperature: 1e-3,
            seed: 0,
            k,
        }
    }
}

/// Outcome of one annealing run: the best assignment seen, its energy, and
/// the best-so-far energy recorded after every temperature stage.
#[derive(Debug, Clone)]
pub struct SaOutcome<T: Real> {
    pub clusters: ClusterSet,
    pub best_energy: T,
    pub energy_trace: Vec<T>,
}

/// Metropolis acceptance: downhill always, uphill with probability
/// exp(-delta/temperature).
fn accept<T: Real>(delta: T, temperature: f64, rng: &mut ChaCha8Rng) -> bool {
    if delta <= T::zero() {
        return true;
    }
    let delta = delta.to_f64().unwrap_or(f64::INFINITY);
    if temperature <= 0.0 {
        return false;
    }
    let p = (-delta / temperature).exp();
    rng.random::<f64>() < p
}

struct State<T: Real> {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
    /// Per-cluster sum of unordered pairwise squared distances.
    pair_sums: Vec<T>,
}

impl<T: Real> State<T> {
    fn energy(&self) -> T {
        self.pair_sums.iter().copied().sum()
    }
}

struct PairTable<T: Real> {
    n: usize,
    d: Vec<T>,
}

impl<T: Real> PairTable<T> {
    fn build(m: &FeatureMatrix<T>) -> Self {
        let n = m.rows();
        let mut d = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = sq_distance_unchecked(m.row(i), m.row(j));
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self { n, d }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> T {
        self.d[i * self.n + j]
    }
}

/// Sum of distances from `row` to every member of `cluster` (excluding
/// `row` itself if present).
fn attachment<T: Real>(
    table: &PairTable<T>,
    assignment: &[usize],
    row: usize,
    cluster: usize,
) -> T {
    let mut sum = T::zero();
    for (j, &c) in assignment.iter().enumerate() {
        if c == cluster && j != row {
            sum += table.get(row, j);
        }
    }
    sum
}

fn stage_energy_delta<T: Real>(
    state: &State<T>,
    table: &PairTable<T>,
    row: usize,
    target: usize,
) -> (T, T, T) {
    let source = state.assignment[row];
    let detach = attachment(table, &state.assignment, row, source);
    let attach = attachment(table, &state.assignment, row, target);
    (attach - detach, detach, attach)
}

/// Anneals a full assignment of the matrix rows into `cfg.k` clusters and
/// returns the best state ever visited.
pub fn sa_cluster<T: Real>(m: &FeatureMatrix<T>, cfg: &SaConfig) -> Result<SaOutcome<T>, SaError> {
    let n = m.rows();
    let k = cfg.k;
    if k < 2 {
        return Err(SaError::TooFewClusters(k));
    }
    if k > n {
        return Err(SaError::TooManyClusters { rows: n, k });
    }
    if let Some(t0) = cfg.initial_temperature
        && t0 <= cfg.final_temperature
    {
        return Err(SaError::BadSchedule {
            initial_t: format!("{t0}"),
            final_t: format!("{}", cfg.final_temperature),
        });
    }
    if !(cfg.cooling_factor > 0.0 && cfg.cooling_factor < 1.0) {
        return Err(SaError::BadSchedule {
            initial_t: format!("cooling factor {}", cfg.cooling_factor),
            final_t: "must lie in (0, 1)".to_string(),
        });
    }

    let table = PairTable::build(m);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Random init with every cluster non-empty: one shuffled row per cluster,
    // the rest uniform.
    let mut assignment = vec![0usize; n];
    {
        let mut rows: Vec<usize> = (0..n).collect();
        use rand::seq::SliceRandom;
        rows.shuffle(&mut rng);
        for (cluster, &row) in rows.iter().take(k).enumerate() {
            assignment[row] = cluster;
        }
        for &row in rows.iter().skip(k) {
            assignment[row] = rng.random_range(0..k);
        }
    }

    let mut sizes = vec![0usize; k];
    for &c in &assignment {
        sizes[c] += 1;
    }
    let mut pair_sums = vec![T::zero(); k];
    for i in 0..n {
        for j in i + 1..n {
            if assignment[i] == assignment[j] {
                pair_sums[assignment[i]] += table.get(i, j);
            }
        }
    }
    let mut state = State {
        assignment,
        sizes,
        pair_sums,
    };

    let moves = cfg.moves_per_temperature.unwrap_or(50 * n).max(1);

    // Data-driven starting temperature: spread of random-move energy changes.
    let initial_t = match cfg.initial_temperature {
        Some(t) => t,
        None => {
            let mut deltas = Vec::with_capacity(100);
            for _ in 0..100 {
                let row = rng.random_range(0..n);
                let source = state.assignment[row];
                if state.sizes[source] == 1 {
                    continue;
                }
                let mut target = rng.random_range(0..k);
                if target == source {
                    target = (target + 1) % k;
                }
                let (delta, _, _) = stage_energy_delta(&state, &table, row, target);
                deltas.push(delta.to_f64().unwrap_or(0.0));
            }
            let spread = if deltas.is_empty() {
                0.0
            } else {
                let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
                (deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / deltas.len() as f64)
                    .sqrt()
            };
            if spread > 0.0 { spread } else { 1.0 }
        }
    };
    let initial_t = initial_t.max(cfg.final_temperature * 2.0);

    let mut best_assignment = state.assignment.clone();
    let mut best_energy = state.energy();
    let mut trace = vec![best_energy];

    let mut temperature = initial_t;
    while temperature >= cfg.final_temperature {
        for _ in 0..moves {
            let row = rng.random_range(0..n);
            let source = state.assignment[row];
            if state.sizes[source] == 1 {
                continue; // would empty a cluster
            }
            let mut target = rng.random_range(0..k);
            if target == source {
                target = (target + 1) % k;
            }
            let (delta, detach, attach) = stage_energy_delta(&state, &table, row, target);
            if accept(delta, temperature, &mut rng) {
                state.pair_sums[source] -= detach;
                state.pair_sums[target] += attach;
                state.sizes[source] -= 1;
                state.sizes[target] += 1;
                state.assignment[row] = target;
                let energy = state.energy();
                if energy < best_energy {
                    best_energy = energy;
                    best_assignment.copy_from_slice(&state.assignment);
                }
            }
        }
        trace.push(best_energy);
        temperature *= cfg.cooling_factor;
    }

    let clusters = ClusterSet::new(best_assignment, k).expect("indices bounded by k");
    Ok(SaOutcome {
        clusters,
        best_energy,
        energy_trace: trace,
    })
}
