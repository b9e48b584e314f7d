use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Entry alphabet of a graph's adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alphabet {
    /// Plain adjacency, entries in `{0, 1}`.
    ZeroOne,
    /// Label-weighted adjacency, entries in `{-1, 0, +1}`.
    PlusMinusOne,
}

impl Alphabet {
    pub fn contains(self, v: i8) -> bool {
        match self {
            Alphabet::ZeroOne => v == 0 || v == 1,
            Alphabet::PlusMinusOne => (-1..=1).contains(&v),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Alphabet::ZeroOne => "01",
            Alphabet::PlusMinusOne => "pm1",
        }
    }
}

/// Dense symmetric adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    alphabet: Alphabet,
    entries: Vec<i8>,
}

impl Graph {
    pub fn empty(n: usize, alphabet: Alphabet) -> Self {
        Self { n, alphabet, entries: vec![0; n * n] }
    }

    /// Build from upper-triangle entries `(i, j, v)` with `i != j`.
    pub fn from_edges(
        n: usize,
        alphabet: Alphabet,
        edges: impl IntoIterator<Item = (usize, usize, i8)>,
    ) -> Result<Self> {
        let mut g = Self::empty(n, alphabet);
        for (i, j, v) in edges {
            g.set(i, j, v)?;
        }
        Ok(g)
    }

    /// Build from a full dense array; checks every invariant.
    pub fn from_dense(n: usize, alphabet: Alphabet, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Shape { expected: n * n, got: entries.len() });
        }
        let g = Self { n, alphabet, entries };
        g.check()?;
        Ok(g)
    }

    pub fn set(&mut self, i: usize, j: usize, v: i8) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::Shape { expected: self.n, got: i.max(j) + 1 });
        }
        if i == j {
            if v != 0 {
                return Err(Error::Alphabet(format!("diagonal entry ({i},{i}) must be zero")));
            }
            return Ok(());
        }
        if !self.alphabet.contains(v) {
            return Err(Error::Alphabet(format!("value {v} not in alphabet {}", self.alphabet.tag())));
        }
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
        Ok(())
    }

    /// Verify symmetry, zero diagonal and alphabet membership of every entry.
    pub fn check(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0 {
                return Err(Error::Alphabet(format!("nonzero diagonal at {i}")));
            }
            for j in 0..self.n {
                let v = self.get(i, j);
                if !self.alphabet.contains(v) {
                    return Err(Error::Alphabet(format!("entry ({i},{j}) = {v} outside alphabet")));
                }
                if v != self.get(j, i) {
                    return Err(Error::Alphabet(format!("asymmetric entry ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn require_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        if self.alphabet != alphabet {
            return Err(Error::Alphabet(format!(
                "expected alphabet {}, graph has {}",
                alphabet.tag(),
                self.alphabet.tag()
            )));
        }
        Ok(())
    }

    /// Row sums `d_i = sum_j A_ij`.
    pub fn degrees(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.row(i).iter().map(|&v| v as i64).sum()).collect()
    }

    /// Number of nonzero upper-triangle entries.
    pub fn edge_count(&self) -> usize {
        self.upper_nonzeros().count()
    }

    /// Iterator over nonzero upper-triangle entries in row-major order.
    pub fn upper_nonzeros(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let v = self.get(i, j);
                (v != 0).then_some((i, j, v))
            })
        })
    }

    pub fn to_matrix(&self) -> Matrix {
        let data = self.entries.iter().map(|&v| v as f64).collect();
        Matrix::from_row_major(self.n, data).expect("graph storage is square")
    }

    /// Disjoint union of `self` with `other` (vertices of `other` follow).
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        if self.alphabet != other.alphabet {
            return Err(Error::Alphabet("cannot join graphs with different alphabets".into()));
        }
        let n = self.n + other.n;
        let mut g = Graph::empty(n, self.alphabet);
        for (i, j, v) in self.upper_nonzeros() {
            g.set(i, j, v)?;
        }
        for (i, j, v) in other.upper_nonzeros() {
            g.set(i + self.n, j + self.n, v)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_is_symmetric_and_guards_alphabet() {
        let mut g = Graph::empty(3, Alphabet::ZeroOne);
        g.set(0, 2, 1).unwrap();
        assert_eq!(g.get(2, 0), 1);
        assert!(g.set(0, 1, -1).is_err());
        assert!(g.set(1, 1, 1).is_err());
        g.check().unwrap();
        assert_eq!(g.degrees(), vec![1, 0, 1]);
    }

    #[test]
    fn from_dense_rejects_asymmetry() {
        let e = vec![0, 1, 0, 0];
        assert!(Graph::from_dense(2, Alphabet::ZeroOne, e).is_err());
    }
}
