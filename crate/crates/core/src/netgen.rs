//! Seeded generators for the example networks: the star of a hub plus leaves
//! and weighted Erdős–Rényi digraphs.
//!
//! Randomness comes from ChaCha8 keyed by the 64-bit seed. Edge inclusion,
//! edge weights and target vectors each read from their own ChaCha stream, so
//! changing how one is consumed never perturbs the others.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{input_err, Result};
use crate::numkit::{DenseMatrix, Vector};
use crate::reach::LtiSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

const STREAM_EDGES: u64 = 0;
const STREAM_WEIGHTS: u64 = 1;
const STREAM_TARGETS: u64 = 2;

fn stream(seed: RngSeed, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(id);
    rng
}

/// Star network with one hub (state 1) and `n_leaves` leaves. Every state
/// decays at unit rate and the hub integrates all leaves.
pub fn star(n_leaves: usize) -> Result<LtiSystem> {
    if n_leaves == 0 {
        return Err(input_err("a star needs at least one leaf"));
    }
    let n = n_leaves + 1;
    let mut a = DenseMatrix::from_diagonal(&vec![-1.0; n]);
    for j in 1..n {
        a[(0, j)] = 1.0;
    }
    LtiSystem::new(a)
}

/// Edge probability `min(1, 2 ln(n) / n)`.
pub fn edge_probability(n: usize) -> f64 {
    (2.0 * (n as f64).ln() / n as f64).min(1.0)
}

/// Weighted directed Erdős–Rényi graph on `n` nodes without self-loops. Each
/// ordered pair carries an independent standard normal weight with
/// probability [`edge_probability`].
pub fn erdos_renyi(n: usize, seed: RngSeed) -> Result<LtiSystem> {
    if n < 2 {
        return Err(input_err("an Erdős–Rényi network needs at least two nodes"));
    }
    let p = edge_probability(n);
    let mut edges = stream(seed, STREAM_EDGES);
    let mut weights = stream(seed, STREAM_WEIGHTS);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && edges.random::<f64>() < p {
                a[(i, j)] = weights.sample(StandardNormal);
            }
        }
    }
    LtiSystem::new(a)
}

/// `n` independent standard normal draws.
pub fn random_target(n: usize, seed: RngSeed) -> Result<Vector> {
    if n == 0 {
        return Err(input_err("target dimension must be positive"));
    }
    let mut rng = stream(seed, STREAM_TARGETS);
    Vector::new((0..n).map(|_| rng.sample(StandardNormal)).collect())
}
