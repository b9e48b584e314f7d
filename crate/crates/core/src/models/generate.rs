//! Seeded sampling of planted partitions and block-model graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{Alphabet, Graph};
use super::partition::{Partition, OUTLIER};
use super::spec::{ModelSpec, Variant};
use crate::error::Result;
use crate::matrix::Matrix;

/// Name of the pseudo-random generator behind every seeded routine.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edge law of a block model: in-cluster probability, cross/outlier
/// probability, and (for signed graphs) label-flip probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLaw {
    pub p_in: f64,
    pub p_out: f64,
    /// `Some(epsilon)` produces a censored graph with entries in `{-1, 0, +1}`.
    pub flip: Option<f64>,
}

impl EdgeLaw {
    pub fn of(spec: &ModelSpec) -> Self {
        match spec.variant {
            Variant::Censored => EdgeLaw { p_in: spec.p(), p_out: spec.p(), flip: Some(spec.epsilon_or_zero()) },
            _ => EdgeLaw { p_in: spec.p(), p_out: spec.q(), flip: None },
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GenerateOptions {
    /// Randomly permute vertex labels instead of the contiguous block layout.
    pub shuffle: bool,
}

/// The planted partition of `spec`: contiguous blocks, outliers last.
pub fn planted_partition(spec: &ModelSpec) -> Result<Partition> {
    spec.validate()?;
    Partition::contiguous(&spec.cluster_sizes(), spec.n)
}

/// Sample `(planted partition, graph)`. Identical `(spec, seed)` pairs give
/// identical output.
pub fn generate(spec: &ModelSpec, seed: u64) -> Result<(Partition, Graph)> {
    generate_with(spec, seed, GenerateOptions::default())
}

pub fn generate_with(spec: &ModelSpec, seed: u64, opts: GenerateOptions) -> Result<(Partition, Graph)> {
    let mut truth = planted_partition(spec)?;
    if opts.shuffle {
        let mut rng = rng_from_seed(seed);
        rng.set_stream(1);
        let mut labels = truth.labels().to_vec();
        labels.shuffle(&mut rng);
        truth = Partition::new(labels, truth.r())?;
    }
    let graph = sample_graph(&truth, EdgeLaw::of(spec), seed);
    Ok((truth, graph))
}

/// Sample a graph on a given partition under an explicit edge law. Outliers
/// connect to every vertex with probability `p_out`.
pub fn sample_graph(truth: &Partition, law: EdgeLaw, seed: u64) -> Graph {
    let n = truth.n();
    let mut rng = rng_from_seed(seed);
    let alphabet = if law.flip.is_some() { Alphabet::PlusMinusOne } else { Alphabet::ZeroOne };
    let mut entries = vec![0i8; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (li, lj) = (truth.label(i), truth.label(j));
            let same = li != OUTLIER && li == lj;
            let prob = if same { law.p_in } else { law.p_out };
            if rng.gen::<f64>() >= prob {
                continue;
            }
            let v = match law.flip {
                None => 1,
                Some(eps) => {
                    let agree: i8 = if same { 1 } else { -1 };
                    if rng.gen::<f64>() < eps {
                        -agree
                    } else {
                        agree
                    }
                }
            };
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Graph::from_dense(n, alphabet, entries).expect("sampler preserves graph invariants")
}

/// `E[A]` for the model in closed form (zero diagonal).
pub fn expected_adjacency(truth: &Partition, law: EdgeLaw) -> Matrix {
    let n = truth.n();
    Matrix::from_fn(n, |i, j| {
        if i == j {
            return 0.0;
        }
        let (li, lj) = (truth.label(i), truth.label(j));
        let same = li != OUTLIER && li == lj;
        match law.flip {
            // Censored: E[A_ij] = p (1 - 2 eps) sigma_i sigma_j.
            Some(eps) => {
                let s = if same { 1.0 } else { -1.0 };
                law.p_in * (1.0 - 2.0 * eps) * s
            }
            None => {
                if same {
                    law.p_in
                } else {
                    law.p_out
                }
            }
        }
    })
}
