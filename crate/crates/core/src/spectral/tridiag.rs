//! Selected eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration. Only the lowest few pairs of a large matrix are ever needed,
//! so neither step touches more than O(n) memory.

use crate::{Error, Result};

/// Real symmetric tridiagonal matrix stored by its two bands.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diagonal: Vec<f64>,
    /// `off_diagonal[k]` couples rows `k` and `k + 1`.
    pub off_diagonal: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::Usage(format!(
                "tridiagonal bands have inconsistent lengths {} and {}",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diagonal[i],
            1 => self.off_diagonal[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diagonal: self.diagonal.iter().map(|d| d * factor).collect(),
            off_diagonal: self.off_diagonal.iter().map(|e| e * factor).collect(),
        }
    }

    /// y = T x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diagonal[i] * x[i];
                if i > 0 {
                    acc += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off_diagonal[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off_diagonal[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off_diagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the LDLᵀ
    /// pivots of T − xI).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e2 = self.off_diagonal[i - 1] * self.off_diagonal[i - 1];
            let denom = if q == 0.0 {
                f64::EPSILON * e2.sqrt().max(1.0)
            } else {
                q
            };
            q = self.diagonal[i] - x - e2 / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        while hi - lo > 4.0 * f64::EPSILON * scale {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The lowest `k` eigenpairs, ascending. Eigenvectors have unit
    /// Euclidean norm.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        if k > self.len() {
            return Err(Error::Usage(format!(
                "requested {k} eigenpairs of a {0}x{0} matrix",
                self.len()
            )));
        }
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
        for idx in 0..k {
            let lambda = self.eigenvalue(idx);
            let mut v = self.inverse_iteration(lambda, idx);
            for (_, prev) in &pairs {
                let overlap: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= overlap * b);
            }
            normalize(&mut v);
            pairs.push((lambda, v));
        }
        Ok(pairs)
    }

    fn inverse_iteration(&self, lambda: f64, seed: usize) -> Vec<f64> {
        let n = self.len();
        let (lo, hi) = self.gershgorin();
        let shift = lambda - 1e-10 * (hi - lo).max(lambda.abs());
        // Deterministic, non-symmetric start vector.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (((i + 7 * seed) as f64) * 0.618_033_988_75).fract())
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            normalize(&mut v);
        }
        v
    }

    /// Solve (T − σI) x = b by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            let d = self.diagonal[0] - sigma;
            return vec![b[0] / if d == 0.0 { f64::EPSILON } else { d }];
        }
        // Rows hold up to three nonzeros after pivoting: u0 (diag), u1, u2.
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let tiny = f64::EPSILON
            * self
                .diagonal
                .iter()
                .chain(&self.off_diagonal)
                .fold(0.0f64, |m, x| m.max(x.abs()));

        // Current working row i: (a, b, c) at columns i, i+1, i+2.
        let mut a = self.diagonal[0] - sigma;
        let mut bb = self.off_diagonal[0];
        let mut cc = 0.0;
        let mut r = rhs[0];
        for i in 0..n - 1 {
            let sub = self.off_diagonal[i];
            let next_d = self.diagonal[i + 1] - sigma;
            let next_e = if i + 1 < n - 1 {
                self.off_diagonal[i + 1]
            } else {
                0.0
            };
            let next_r = rhs[i + 1];
            if a.abs() >= sub.abs() {
                let piv = if a == 0.0 { tiny } else { a };
                let m = sub / piv;
                u0[i] = piv;
                u1[i] = bb;
                u2[i] = cc;
                rhs[i] = r;
                a = next_d - m * bb;
                bb = next_e - m * cc;
                cc = 0.0;
                r = next_r - m * r;
            } else {
                let m = a / sub;
                u0[i] = sub;
                u1[i] = next_d;
                u2[i] = next_e;
                rhs[i] = next_r;
                a = bb - m * next_d;
                bb = cc - m * next_e;
                cc = 0.0;
                r -= m * next_r;
            }
        }
        u0[n - 1] = if a == 0.0 { tiny } else { a };
        rhs[n - 1] = r;

        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= u2[i] * x[i + 2];
            }
            x[i] = acc / u0[i];
        }
        x
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}
