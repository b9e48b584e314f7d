//! Type-II Anderson acceleration for fixed-point iterations `w <- T(w)`.

use std::collections::VecDeque;

/// Relative Tikhonov weight on the least-squares normal equations.
const REGULARIZATION: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct Anderson {
    memory: usize,
    dw: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
    /// Cached inner products `<dg_i, dg_j>`, row-major over the history.
    gram: VecDeque<VecDeque<f64>>,
    last: Option<(Vec<f64>, Vec<f64>)>,
}

impl Anderson {
    pub(crate) fn new(memory: usize) -> Self {
        Self { memory, dw: VecDeque::new(), dg: VecDeque::new(), gram: VecDeque::new(), last: None }
    }

    pub(crate) fn reset(&mut self) {
        self.dw.clear();
        self.dg.clear();
        self.gram.clear();
        self.last = None;
    }

    /// Record the pair `(w, g = T(w) - w)` and return the extrapolated next
    /// point, or `None` while the history is empty.
    pub(crate) fn step(&mut self, w: &[f64], g: &[f64]) -> Option<Vec<f64>> {
        if self.memory == 0 {
            return None;
        }
        if let Some((pw, pg)) = self.last.take() {
            self.dw.push_back(w.iter().zip(&pw).map(|(a, b)| a - b).collect());
            let fresh: Vec<f64> = g.iter().zip(&pg).map(|(a, b)| a - b).collect();
            if self.dw.len() == self.memory {
                self.dw.pop_front();
                self.dg.pop_front();
                self.gram.pop_front();
                for row in &mut self.gram {
                    row.pop_front();
                }
            }
            let mut row: VecDeque<f64> = self.dg.iter().map(|d| dot(d, &fresh)).collect();
            for (r, &v) in self.gram.iter_mut().zip(&row) {
                r.push_back(v);
            }
            row.push_back(dot(&fresh, &fresh));
            self.gram.push_back(row);
            self.dg.push_back(fresh);
        }
        self.last = Some((w.to_vec(), g.to_vec()));
        let m = self.dg.len();
        if m == 0 {
            return None;
        }
        let mut gram = vec![0.0; m * m];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                gram[i * m + j] = self.gram[i][j];
            }
            rhs[i] = dot(&self.dg[i], g);
        }
        let scale = (0..m).map(|i| gram[i * m + i]).sum::<f64>().max(f64::MIN_POSITIVE);
        for i in 0..m {
            gram[i * m + i] += REGULARIZATION * scale;
        }
        let gamma = solve_dense(&mut gram, &mut rhs, m)?;
        let mut next: Vec<f64> = w.iter().zip(g).map(|(a, b)| a + b).collect();
        for (k, &c) in gamma.iter().enumerate() {
            for ((x, a), b) in next.iter_mut().zip(&self.dw[k]).zip(&self.dg[k]) {
                *x -= c * (a + b);
            }
        }
        next.iter().all(|v| v.is_finite()).then_some(next)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_dense(a: &mut [f64], b: &mut [f64], m: usize) -> Option<Vec<f64>> {
    for col in 0..m {
        let pivot = (col..m).max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()))?;
        if a[pivot * m + col].abs() < f64::MIN_POSITIVE {
            return None;
        }
        if pivot != col {
            for k in 0..m {
                a.swap(pivot * m + k, col * m + k);
            }
            b.swap(pivot, col);
        }
        for row in (col + 1)..m {
            let f = a[row * m + col] / a[col * m + col];
            for k in col..m {
                a[row * m + k] -= f * a[col * m + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = ((row + 1)..m).map(|k| a[row * m + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * m + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_converges_fast() {
        // T(w) = M w + c with a contraction M; the fixed point is reached in
        // a handful of accelerated steps.
        let m = [[0.9, 0.05, 0.0], [0.05, 0.8, 0.1], [0.0, 0.1, 0.95]];
        let c = [1.0, -2.0, 0.5];
        let t =
            |w: &[f64]| -> Vec<f64> { (0..3).map(|i| (0..3).map(|j| m[i][j] * w[j]).sum::<f64>() + c[i]).collect() };
        let mut aa = Anderson::new(5);
        let mut w = vec![0.0; 3];
        let mut res = f64::INFINITY;
        for _ in 0..12 {
            let tw = t(&w);
            let g: Vec<f64> = tw.iter().zip(&w).map(|(a, b)| a - b).collect();
            res = dot(&g, &g).sqrt();
            w = aa.step(&w, &g).unwrap_or(tw);
        }
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn dense_solve() {
        let mut a = vec![0.0, 2.0, 1.0, 1.0];
        let mut b = vec![4.0, 3.0];
        assert_eq!(solve_dense(&mut a, &mut b, 2).unwrap(), vec![1.0, 2.0]);
    }
}
