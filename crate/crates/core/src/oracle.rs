//! Exhaustive maximum-likelihood estimators for tiny graphs and single-swap
//! failure witnesses.
//!
//! Objectives are inner products with the adjacency matrix over ordered
//! pairs: `<A, sigma sigma^T>` for two clusters and signed graphs, `<A, Z>`
//! for equal-size clusters. They are directly comparable with SDP objectives.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::{Alphabet, Graph, Partition, OUTLIER};

pub const MAX_BINARY_N: usize = 24;
pub const MAX_CENSORED_N: usize = 22;
pub const MAX_MULTI_PARTITIONS: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlResult {
    /// First optimizer in enumeration order.
    pub best: Partition,
    pub objective: i64,
    /// Number of optimizers up to the model's symmetry.
    pub ties: u64,
    pub unique: bool,
}

impl MlResult {
    fn new(best: Partition, objective: i64, ties: u64) -> Self {
        Self { best, objective, ties, unique: ties == 1 }
    }
}

/// Upper-triangle adjacency as bitmasks, split by sign.
fn masks(a: &Graph) -> (Vec<u64>, Vec<u64>) {
    let n = a.n();
    let mut pos = vec![0u64; n];
    let mut neg = vec![0u64; n];
    for (i, j, v) in a.upper_nonzeros() {
        let m = if v > 0 { &mut pos } else { &mut neg };
        m[i] |= 1 << j;
        m[j] |= 1 << i;
    }
    (pos, neg)
}

fn from_mask(mask: u64, n: usize) -> Partition {
    let labels = (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { 2 }).collect();
    Partition::new(labels, 2).expect("labels are 1 or 2")
}

/// Best split into `K` vertices with `sigma = +1` and `n - K` with `-1`.
/// When `2K = n` vertex 0 is pinned to the first cluster.
pub fn ml_binary(a: &Graph, k: usize) -> Result<MlResult> {
    a.require_alphabet(Alphabet::ZeroOne)?;
    let n = a.n();
    if n > MAX_BINARY_N {
        return Err(Error::SizeCap(format!("binary enumeration limited to n <= {MAX_BINARY_N}, got {n}")));
    }
    if k > n {
        return domain(format!("K = {k} exceeds n = {n}"));
    }
    let (adj, _) = masks(a);
    let total: i64 = adj.iter().map(|m| m.count_ones() as i64).sum();
    let full: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let pinned = 2 * k == n && n > 0;
    let (mut best_mask, mut best, mut ties) = (0u64, i64::MIN, 0u64);
    let mut visit = |set: u64| {
        if pinned && set & 1 == 0 {
            return;
        }
        let mut cut = 0i64;
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            cut += (adj[i] & !set & full).count_ones() as i64;
        }
        let obj = total - 4 * cut;
        if obj > best {
            best = obj;
            best_mask = set;
            ties = 1;
        } else if obj == best {
            ties += 1;
        }
    };
    if k == 0 {
        visit(0);
    } else {
        // Gosper's hack walks the k-subsets in increasing numeric order.
        let mut set: u64 = (1u64 << k) - 1;
        while set <= full {
            visit(set);
            let c = set & set.wrapping_neg();
            let r = set + c;
            set = (((r ^ set) >> 2) / c) | r;
        }
    }
    Ok(MlResult::new(from_mask(best_mask, n), best, ties))
}

/// Best sign assignment of a signed graph with `sigma_0 = +1`.
pub fn ml_censored(a: &Graph) -> Result<MlResult> {
    a.require_alphabet(Alphabet::PlusMinusOne)?;
    let n = a.n();
    if n > MAX_CENSORED_N {
        return Err(Error::SizeCap(format!("signed enumeration limited to n <= {MAX_CENSORED_N}, got {n}")));
    }
    if n == 0 {
        return Ok(MlResult::new(Partition::from_labels(vec![]), 0, 1));
    }
    let (pos, neg) = masks(a);
    let full: u64 = (1u64 << n) - 1;
    let (mut best_mask, mut best, mut ties) = (1u64, i64::MIN, 0u64);
    for rest in 0..(1u64 << (n - 1)) {
        let set = (rest << 1) | 1;
        let other = !set & full;
        let mut obj = 0i64;
        for i in 0..n {
            let agree = (pos[i] & set).count_ones() as i64
                - (pos[i] & other).count_ones() as i64
                - (neg[i] & set).count_ones() as i64
                + (neg[i] & other).count_ones() as i64;
            obj += if set >> i & 1 == 1 { agree } else { -agree };
        }
        if obj > best {
            best = obj;
            best_mask = set;
            ties = 1;
        } else if obj == best {
            ties += 1;
        }
    }
    Ok(MlResult::new(from_mask(best_mask, n), best, ties))
}

/// Number of partitions of `r K` labelled vertices into `r` unlabelled blocks of size `K`.
fn equal_partition_count(r: usize, k: usize) -> f64 {
    let ln_fact = |m: usize| (1..=m).map(|x| (x as f64).ln()).sum::<f64>();
    (ln_fact(r * k) - r as f64 * ln_fact(k) - ln_fact(r)).exp()
}

/// Best partition into `r` clusters of size `K` (`n = r K`), maximizing `<A, Z>`.
/// Cluster labels are canonical: clusters are numbered by their smallest vertex.
pub fn ml_multi(a: &Graph, r: usize, k: usize) -> Result<MlResult> {
    a.require_alphabet(Alphabet::ZeroOne)?;
    let n = a.n();
    if r == 0 || k == 0 || r * k != n {
        return domain(format!("need n = r K with r, K >= 1, got n = {n}, r = {r}, K = {k}"));
    }
    let count = equal_partition_count(r, k);
    if n > 64 || count > MAX_MULTI_PARTITIONS * (1.0 + 1e-9) {
        return Err(Error::SizeCap(format!("{count:.3e} partitions exceed the cap {MAX_MULTI_PARTITIONS:e}")));
    }
    let (adj, _) = masks(a);
    let mut search = MultiSearch {
        adj,
        n,
        r,
        k,
        members: vec![0u64; r],
        sizes: vec![0; r],
        labels: vec![0; n],
        best: i64::MIN,
        best_labels: vec![],
        ties: 0,
    };
    search.descend(0, 0, 0);
    let best = Partition::new(search.best_labels, r)?;
    Ok(MlResult::new(best, search.best, search.ties))
}

struct MultiSearch {
    adj: Vec<u64>,
    n: usize,
    r: usize,
    k: usize,
    members: Vec<u64>,
    sizes: Vec<usize>,
    labels: Vec<usize>,
    best: i64,
    best_labels: Vec<usize>,
    ties: u64,
}

impl MultiSearch {
    /// Restricted-growth enumeration: vertex `v` joins an open cluster or the
    /// next unused one.
    fn descend(&mut self, v: usize, used: usize, score: i64) {
        if v == self.n {
            if score > self.best {
                self.best = score;
                self.best_labels = self.labels.clone();
                self.ties = 1;
            } else if score == self.best {
                self.ties += 1;
            }
            return;
        }
        // Remaining vertices must fill the unused clusters exactly.
        let remaining = self.n - v;
        let open: usize = (0..used).map(|c| self.k - self.sizes[c]).sum();
        for c in 0..(used + 1).min(self.r) {
            if self.sizes[c] == self.k {
                continue;
            }
            let new_used = used.max(c + 1);
            let capacity = open + (new_used - used) * self.k;
            if capacity + (self.r - new_used) * self.k < remaining {
                continue;
            }
            let gain = 2 * (self.adj[v] & self.members[c]).count_ones() as i64;
            self.members[c] |= 1 << v;
            self.sizes[c] += 1;
            self.labels[v] = c + 1;
            self.descend(v + 1, new_used, score + gain);
            self.members[c] &= !(1 << v);
            self.sizes[c] -= 1;
        }
    }
}

/// Single-move diagnostics around the planted partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapReport {
    /// Per cluster: `min_i (e(i, own) - max_other e(i, other))`.
    pub cluster_margins: Vec<f64>,
    /// Minimum over all inliers of `s_i - r_i`.
    pub min_s_minus_r: f64,
    /// Largest objective change achievable by one swap (plain graphs) or one
    /// flip (signed graphs).
    pub best_gain: f64,
    /// Some single move strictly improves the objective.
    pub ml_fails: bool,
    /// Some single move does not decrease the objective.
    pub ml_not_unique: bool,
}

/// For plain graphs, swaps exchange two vertices of different clusters
/// (keeping sizes); for signed graphs, flips change a single sign.
pub fn swap_witness(a: &Graph, truth: &Partition) -> Result<SwapReport> {
    let n = a.n();
    if truth.n() != n {
        return Err(Error::Shape { expected: n, got: truth.n() });
    }
    match a.alphabet() {
        Alphabet::PlusMinusOne => {
            let sigma = truth.signs()?;
            let margins: Vec<f64> =
                (0..n).map(|i| sigma[i] * (0..n).map(|j| a.get(i, j) as f64 * sigma[j]).sum::<f64>()).collect();
            let mut cluster_margins = vec![f64::INFINITY; 2];
            for i in 0..n {
                let c = truth.label(i) - 1;
                cluster_margins[c] = cluster_margins[c].min(margins[i]);
            }
            let min_s_minus_r = margins.iter().copied().fold(f64::INFINITY, f64::min);
            let best_gain = -4.0 * min_s_minus_r;
            Ok(SwapReport {
                cluster_margins,
                min_s_minus_r,
                best_gain,
                ml_fails: best_gain > 0.0,
                ml_not_unique: best_gain >= 0.0,
            })
        }
        Alphabet::ZeroOne => {
            let r = truth.r();
            if r < 2 || truth.outliers() > 0 {
                return Err(Error::Encoding("swap witness needs at least two clusters and no outliers".into()));
            }
            let mut e = vec![vec![0.0; r]; n];
            for (i, j, _) in a.upper_nonzeros() {
                e[i][truth.label(j) - 1] += 1.0;
                e[j][truth.label(i) - 1] += 1.0;
            }
            let own = |i: usize| truth.label(i) - 1;
            let mut cluster_margins = vec![f64::INFINITY; r];
            for i in 0..n {
                let rest = (0..r).filter(|&l| l != own(i)).map(|l| e[i][l]).fold(f64::NEG_INFINITY, f64::max);
                cluster_margins[own(i)] = cluster_margins[own(i)].min(e[i][own(i)] - rest);
            }
            let min_s_minus_r = cluster_margins.iter().copied().fold(f64::INFINITY, f64::min);
            let mut best_gain = f64::NEG_INFINITY;
            for i in 0..n {
                for j in (i + 1)..n {
                    let (k, l) = (own(i), own(j));
                    if k == l {
                        continue;
                    }
                    let delta_in = (e[i][l] - e[i][k]) + (e[j][k] - e[j][l]) - 2.0 * a.get(i, j) as f64;
                    // Ordered-pair objectives count every in-cluster edge twice.
                    best_gain = best_gain.max(2.0 * delta_in);
                }
            }
            Ok(SwapReport {
                cluster_margins,
                min_s_minus_r,
                best_gain,
                ml_fails: best_gain > 0.0,
                ml_not_unique: best_gain >= 0.0,
            })
        }
    }
}

/// `<A, Y>` or `<A, Z>` of a partition, matching the ML objectives above.
pub fn partition_objective(a: &Graph, p: &Partition) -> i64 {
    let mut total = 0i64;
    for (i, j, v) in a.upper_nonzeros() {
        let (li, lj) = (p.label(i), p.label(j));
        let same = li != OUTLIER && li == lj;
        match a.alphabet() {
            Alphabet::PlusMinusOne => total += 2 * v as i64 * if same { 1 } else { -1 },
            Alphabet::ZeroOne if p.r() == 2 && p.outliers() == 0 => total += if same { 2 } else { -2 },
            Alphabet::ZeroOne => total += if same { 2 } else { 0 },
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::exact_match;

    fn two_edges() -> Graph {
        Graph::from_edges(4, Alphabet::ZeroOne, [(0, 1, 1), (2, 3, 1)]).unwrap()
    }

    #[test]
    fn binary_two_edges() {
        let res = ml_binary(&two_edges(), 2).unwrap();
        assert!(res.unique);
        assert!(exact_match(&res.best, &Partition::from_labels(vec![1, 1, 2, 2])));
        assert_eq!(res.objective, 4);
        assert_eq!(partition_objective(&two_edges(), &res.best), 4);
    }

    #[test]
    fn binary_empty_and_trivial() {
        let g = Graph::empty(6, Alphabet::ZeroOne);
        assert_eq!(ml_binary(&g, 2).unwrap().ties, 15);
        // Balanced splits are counted once per complementary pair.
        assert_eq!(ml_binary(&g, 3).unwrap().ties, 10);
        let res = ml_binary(&two_edges(), 0).unwrap();
        assert_eq!((res.objective, res.ties), (4, 1));
        assert!(ml_binary(&Graph::empty(25, Alphabet::ZeroOne), 3).is_err());
    }

    #[test]
    fn censored_cycle_is_max_cut() {
        let g = Graph::from_edges(4, Alphabet::PlusMinusOne, [(0, 1, -1), (1, 2, -1), (2, 3, -1), (0, 3, -1)]).unwrap();
        let res = ml_censored(&g).unwrap();
        assert!(res.unique);
        assert_eq!(res.objective, 8);
        assert!(exact_match(&res.best, &Partition::from_labels(vec![1, 2, 1, 2])));
        let empty = ml_censored(&Graph::empty(5, Alphabet::PlusMinusOne)).unwrap();
        assert_eq!(empty.ties, 16);
    }

    #[test]
    fn censored_all_positive() {
        let g = Graph::from_edges(5, Alphabet::PlusMinusOne, [(0, 1, 1), (1, 2, 1), (3, 4, 1)]).unwrap();
        let res = ml_censored(&g).unwrap();
        assert_eq!(res.objective, 6);
        assert_eq!(res.best.labels(), &[1, 1, 1, 2, 2]);
        // The two components can be flipped independently.
        assert_eq!(res.ties, 2);
        assert!(!res.unique);
    }

    #[test]
    fn multi_triangles() {
        let g = Graph::from_edges(
            9,
            Alphabet::ZeroOne,
            [
                (0, 1, 1),
                (0, 2, 1),
                (1, 2, 1),
                (3, 4, 1),
                (3, 5, 1),
                (4, 5, 1),
                (6, 7, 1),
                (6, 8, 1),
                (7, 8, 1),
                (2, 3, 1),
            ],
        )
        .unwrap();
        let res = ml_multi(&g, 3, 3).unwrap();
        assert!(res.unique);
        assert_eq!(res.objective, 18);
        assert!(exact_match(&res.best, &Partition::contiguous(&[3, 3, 3], 9).unwrap()));
        let empty = ml_multi(&Graph::empty(6, Alphabet::ZeroOne), 2, 3).unwrap();
        assert_eq!(empty.ties, 10);
        assert!(ml_multi(&g, 2, 4).is_err());
        assert!(ml_multi(&Graph::empty(30, Alphabet::ZeroOne), 2, 15).is_err());
    }

    #[test]
    fn witness_disjoint_cliques() {
        let g =
            Graph::from_edges(6, Alphabet::ZeroOne, [(0, 1, 1), (0, 2, 1), (1, 2, 1), (3, 4, 1), (3, 5, 1), (4, 5, 1)])
                .unwrap();
        let rep = swap_witness(&g, &Partition::contiguous(&[3, 3], 6).unwrap()).unwrap();
        assert_eq!(rep.cluster_margins, vec![2.0, 2.0]);
        assert!(!rep.ml_fails && !rep.ml_not_unique);
        assert_eq!(rep.best_gain, -8.0);
    }

    #[test]
    fn witness_isolated_signed_vertex() {
        let g = Graph::from_edges(4, Alphabet::PlusMinusOne, [(0, 1, 1), (1, 2, -1)]).unwrap();
        let truth = Partition::from_labels(vec![1, 1, 2, 1]);
        let rep = swap_witness(&g, &truth).unwrap();
        assert_eq!(rep.min_s_minus_r, 0.0);
        assert!(rep.ml_not_unique && !rep.ml_fails);
    }

    #[test]
    fn witness_gain_matches_objective() {
        let g = Graph::from_edges(4, Alphabet::ZeroOne, [(0, 1, 1), (2, 3, 1), (0, 3, 1), (1, 3, 1)]).unwrap();
        let truth = Partition::from_labels(vec![1, 1, 2, 2]);
        let rep = swap_witness(&g, &truth).unwrap();
        let best = ml_binary(&g, 2).unwrap();
        let planted = partition_objective(&g, &truth);
        assert_eq!(rep.ml_fails, best.objective > planted);
        assert!(rep.best_gain <= (best.objective - planted) as f64);
    }
}
