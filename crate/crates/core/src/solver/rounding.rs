//! Extraction of integral partitions from fractional SDP solutions.

use crate::matrix::Matrix;
use crate::models::{Partition, OUTLIER};

/// Unit eigenvector of the largest eigenvalue, signed so that its entry of
/// largest magnitude (lowest index on ties) is positive.
pub fn leading_eigenvector(x: &Matrix) -> Vec<f64> {
    let n = x.n();
    if n == 0 {
        return Vec::new();
    }
    let eig = x.sym_eigen();
    let mut v = eig.vector(n - 1).to_vec();
    let mut top = 0;
    for i in 1..n {
        if v[i].abs() > v[top].abs() {
            top = i;
        }
    }
    if v[top] < 0.0 {
        v.iter_mut().for_each(|e| *e = -*e);
    }
    v
}

/// Two-cluster rounding from the leading eigenvector `v` of `x`.
///
/// With `k`, cluster 1 is either the `k` largest or the `k` smallest entries
/// of `v`, whichever split aligns better with `v`; otherwise cluster 1 is
/// `{i : v_i >= 0}`.
pub fn round_binary(x: &Matrix, k: Option<usize>) -> Partition {
    let n = x.n();
    let v = leading_eigenvector(x);
    let Some(k) = k else {
        let signs: Vec<f64> = v.iter().map(|&e| if e >= 0.0 { 1.0 } else { -1.0 }).collect();
        return Partition::from_signs(&signs);
    };
    let k = k.min(n);
    let mut desc: Vec<usize> = (0..n).collect();
    desc.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
    let mut asc: Vec<usize> = (0..n).collect();
    asc.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    let total: f64 = v.iter().sum();
    let score = |set: &[usize]| (2.0 * set.iter().map(|&i| v[i]).sum::<f64>() - total).abs();
    let chosen = if score(&asc[..k]) > score(&desc[..k]) { &asc[..k] } else { &desc[..k] };
    let mut labels = vec![2; n];
    for &i in chosen {
        labels[i] = 1;
    }
    Partition::new(labels, 2).expect("labels are 1 or 2")
}

/// Greedy clique extraction for `r` clusters of size `k`.
pub fn round_multi(x: &Matrix, r: usize, k: usize) -> Partition {
    round_sizes(x, &vec![k; r])
}

/// Greedy clique extraction for clusters of the given sizes, largest first.
/// Each round seeds with the unassigned vertex of largest row sum over
/// unassigned columns and adds its most similar unassigned vertices. Vertices
/// left over are outliers.
pub fn round_sizes(x: &Matrix, sizes: &[usize]) -> Partition {
    let n = x.n();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut labels = vec![OUTLIER; n];
    let mut free: Vec<bool> = vec![true; n];
    for &c in &order {
        let size = sizes[c];
        let unassigned: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        if size == 0 || unassigned.is_empty() {
            continue;
        }
        let row_sum = |i: usize| unassigned.iter().map(|&j| x[(i, j)]).sum::<f64>();
        let mut seed = unassigned[0];
        let mut best = row_sum(seed);
        for &i in &unassigned[1..] {
            let s = row_sum(i);
            if s > best {
                seed = i;
                best = s;
            }
        }
        let mut others: Vec<usize> = unassigned.iter().copied().filter(|&j| j != seed).collect();
        others.sort_by(|&i, &j| x[(seed, j)].total_cmp(&x[(seed, i)]).then(i.cmp(&j)));
        for &i in std::iter::once(&seed).chain(others.iter().take(size - 1)) {
            labels[i] = c + 1;
            free[i] = false;
        }
    }
    Partition::new(labels, sizes.len()).expect("labels bounded by cluster count")
}
