use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Label reserved for outlier vertices.
pub const OUTLIER: usize = 0;

/// Cluster assignment: `labels[i]` in `0..=r`, where `0` marks an outlier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    r: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, r: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l > r) {
            return Err(Error::Encoding(format!("label {bad} exceeds cluster count {r}")));
        }
        Ok(Self { labels, r })
    }

    /// Infer `r` as the largest label present.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let r = labels.iter().copied().max().unwrap_or(0);
        Self { labels, r }
    }

    /// Contiguous layout: the first `sizes[0]` vertices form cluster 1, and so
    /// on; trailing vertices up to `n` are outliers.
    pub fn contiguous(sizes: &[usize], n: usize) -> Result<Self> {
        let total: usize = sizes.iter().sum();
        if total > n {
            return Err(Error::Encoding(format!("sizes sum to {total} > n = {n}")));
        }
        let mut labels = Vec::with_capacity(n);
        for (k, &size) in sizes.iter().enumerate() {
            labels.extend(std::iter::repeat(k + 1).take(size));
        }
        labels.resize(n, OUTLIER);
        Ok(Self { labels, r: sizes.len() })
    }

    /// From a sign vector: `+1` maps to cluster 1, `-1` to cluster 2.
    pub fn from_signs(signs: &[f64]) -> Self {
        let labels = signs.iter().map(|&s| if s >= 0.0 { 1 } else { 2 }).collect();
        Self { labels, r: 2 }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Sizes of clusters `1..=r`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.r];
        for &l in &self.labels {
            if l != OUTLIER {
                sizes[l - 1] += 1;
            }
        }
        sizes
    }

    pub fn outliers(&self) -> usize {
        self.labels.iter().filter(|&&l| l == OUTLIER).count()
    }

    /// Vertex lists of clusters `1..=r` (index `k - 1`).
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.r];
        for (i, &l) in self.labels.iter().enumerate() {
            if l != OUTLIER {
                out[l - 1].push(i);
            }
        }
        out
    }

    /// True for a two-cluster partition without outliers.
    pub fn is_binary(&self) -> bool {
        self.r <= 2 && self.outliers() == 0
    }

    /// `sigma_i = +1` for cluster 1 and `-1` for cluster 2.
    pub fn signs(&self) -> Result<Vec<f64>> {
        if !self.is_binary() {
            return Err(Error::Encoding(format!(
                "sign encoding needs two clusters without outliers (r = {}, outliers = {})",
                self.r,
                self.outliers()
            )));
        }
        Ok(self.labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect())
    }

    /// Indicator vector of cluster `k` (1-based).
    pub fn indicator(&self, k: usize) -> Vec<f64> {
        self.labels.iter().map(|&l| if l == k { 1.0 } else { 0.0 }).collect()
    }
}

/// Matrix encoding of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Encoding {
    /// `Y = sigma sigma^T` with entries `+-1`.
    Ybinary,
    /// `Z = sum_k xi_k xi_k^T` with entries `0/1`.
    Zmulti,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMatrix {
    pub matrix: Matrix,
    pub encoding: Encoding,
}

pub fn partition_to_matrix(p: &Partition, encoding: Encoding) -> Result<ClusterMatrix> {
    let n = p.n();
    let matrix = match encoding {
        Encoding::Ybinary => Matrix::outer(&p.signs()?),
        Encoding::Zmulti => Matrix::from_fn(n, |i, j| {
            let (li, lj) = (p.label(i), p.label(j));
            if li != OUTLIER && li == lj {
                1.0
            } else {
                0.0
            }
        }),
    };
    Ok(ClusterMatrix { matrix, encoding })
}

/// `Z = ((r - 1) Y + J) / r`, mapping the simplex encoding to the 0/1 encoding.
pub fn z_from_y(y: &ClusterMatrix, r: usize) -> Result<ClusterMatrix> {
    if r < 1 {
        return Err(Error::Encoding("r must be positive".into()));
    }
    let rf = r as f64;
    let n = y.matrix.n();
    let matrix = Matrix::from_fn(n, |i, j| ((rf - 1.0) * y.matrix[(i, j)] + 1.0) / rf);
    Ok(ClusterMatrix { matrix, encoding: Encoding::Zmulti })
}

/// True iff some relabeling of clusters makes `est` identical to `truth`.
/// The outlier label is never permuted.
pub fn exact_match(est: &Partition, truth: &Partition) -> bool {
    if est.n() != truth.n() {
        return false;
    }
    let max_label = est.labels().iter().chain(truth.labels()).copied().max().unwrap_or(0);
    let mut forward = vec![None; max_label + 1];
    let mut backward = vec![None; max_label + 1];
    for (&e, &t) in est.labels().iter().zip(truth.labels()) {
        if (e == OUTLIER) != (t == OUTLIER) {
            return false;
        }
        match (forward[e], backward[t]) {
            (None, None) => {
                forward[e] = Some(t);
                backward[t] = Some(e);
            }
            (Some(ft), Some(be)) if ft == t && be == e => {}
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_from_signs() {
        let p = Partition::from_signs(&[1.0, 1.0, -1.0]);
        let y = partition_to_matrix(&p, Encoding::Ybinary).unwrap();
        assert_eq!(y.matrix[(0, 1)], 1.0);
        assert_eq!(y.matrix[(0, 2)], -1.0);
        assert_eq!(y.matrix[(2, 2)], 1.0);
    }

    #[test]
    fn z_is_block_diagonal() {
        let p = Partition::contiguous(&[2, 2], 4).unwrap();
        let z = partition_to_matrix(&p, Encoding::Zmulti).unwrap();
        let expected = [[1., 1., 0., 0.], [1., 1., 0., 0.], [0., 0., 1., 1.], [0., 0., 1., 1.]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(z.matrix[(i, j)], expected[i][j]);
            }
        }
    }

    #[test]
    fn outlier_rows_are_zero() {
        let p = Partition::new(vec![1, 1, 2, 2, 0], 2).unwrap();
        let z = partition_to_matrix(&p, Encoding::Zmulti).unwrap();
        for j in 0..5 {
            assert_eq!(z.matrix[(4, j)], 0.0);
            assert_eq!(z.matrix[(j, 4)], 0.0);
        }
        assert!(partition_to_matrix(&p, Encoding::Ybinary).is_err());
    }

    #[test]
    fn z_from_y_examples() {
        let p = Partition::from_signs(&[1.0, -1.0, 1.0]);
        let y = partition_to_matrix(&p, Encoding::Ybinary).unwrap();
        let z = z_from_y(&y, 2).unwrap();
        for v in z.matrix.as_slice() {
            assert!(*v == 0.0 || *v == 1.0);
        }
        let j = ClusterMatrix { matrix: Matrix::filled(3, 1.0), encoding: Encoding::Ybinary };
        assert_eq!(z_from_y(&j, 2).unwrap().matrix, Matrix::filled(3, 1.0));
        let simplex = ClusterMatrix { matrix: Matrix::filled(2, -0.5), encoding: Encoding::Ybinary };
        assert_eq!(z_from_y(&simplex, 3).unwrap().matrix[(0, 1)], 0.0);
    }

    #[test]
    fn exact_match_examples() {
        let a = Partition::from_labels(vec![1, 1, 2, 2]);
        assert!(exact_match(&a, &Partition::from_labels(vec![2, 2, 1, 1])));
        assert!(!exact_match(&a, &Partition::from_labels(vec![1, 2, 1, 2])));
        assert!(exact_match(&Partition::from_labels(vec![1, 1, 0]), &Partition::from_labels(vec![2, 2, 0])));
        assert!(!exact_match(&Partition::from_labels(vec![1, 1, 0]), &Partition::from_labels(vec![1, 1, 1])));
        assert!(!exact_match(&Partition::from_labels(vec![1, 1, 1]), &Partition::from_labels(vec![1, 1, 2])));
    }
}
