//! Model specifications, seeded graph generation and partition encodings.

mod generate;
mod graph;
pub mod io;
mod partition;
mod spec;

pub(crate) use generate::rng_from_seed;
pub use generate::{
    expected_adjacency, generate, generate_with, planted_partition, sample_graph, EdgeLaw, GenerateOptions,
    RNG_ALGORITHM,
};
pub use graph::{Alphabet, Graph};
pub use partition::{exact_match, partition_to_matrix, z_from_y, ClusterMatrix, Encoding, Partition, OUTLIER};
pub use spec::{binary_cluster_size, ModelSpec, Variant};
