//! Banded LU without pivoting for the inner Jacobians, and a small dense
//! solver for the shock sensitivity system.

use crate::error::{Error, Result};

/// Row-major band storage: row `i` keeps columns `i - kl ..= i + ku`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            j + self.kl >= i && j <= i + self.ku,
            "({i}, {j}) outside band"
        );
        i * self.width + (j + self.kl - i)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j);
        self.data[o] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// In-place Doolittle factorisation; the band does not grow without pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.width);
        let a = &mut self.data;
        for k in 0..n {
            let pivot = a[k * w + kl];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularMatrix(k));
            }
            let imax = (k + kl).min(n - 1);
            let jmax = (k + ku).min(n - 1);
            for i in (k + 1)..=imax {
                let ik = i * w + (k + kl - i);
                let l = a[ik] / pivot;
                a[ik] = l;
                if l == 0.0 {
                    continue;
                }
                let row_i = i * w + kl - i;
                let row_k = k * w + kl - k;
                for j in (k + 1)..=jmax {
                    a[row_i + j] -= l * a[row_k + j];
                }
            }
        }
        Ok(BandLu { m: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku, w) = (self.m.n, self.m.kl, self.m.ku, self.m.width);
        let a = &self.m.data;
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let row = i * w + kl - i;
            let mut s = x[i];
            for j in lo..i {
                s -= a[row + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + ku).min(n - 1);
            let row = i * w + kl - i;
            let mut s = x[i];
            for j in (i + 1)..=hi {
                s -= a[row + j] * x[j];
            }
            x[i] = s / a[row + i];
        }
        x
    }
}

/// Gaussian elimination with partial pivoting on a dense row-major matrix.
pub fn dense_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .expect("non-empty");
        if a[p * n + k] == 0.0 || !a[p * n + k].is_finite() {
            return Err(Error::SingularMatrix(k));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let pivot = a[k * n + k];
        for i in (k + 1)..n {
            let l = a[i * n + k] / pivot;
            if l == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= l * a[k * n + j];
            }
            b[i] -= l * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_lu_matches_product() {
        let n = 40;
        let (kl, ku) = (3, 2);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = if i == j {
                    10.0
                } else {
                    ((i * 7 + j * 3) % 5) as f64 - 2.0
                };
                m.set(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = m.mul_vec(&x);
        let sol = m.factor().unwrap().solve(&b);
        for (a, e) in sol.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_solve_pivots() {
        let a = vec![0.0, 1.0, 1.0, 1.0];
        let x = dense_solve(a, vec![2.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(dense_solve(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0]).is_err());
    }
}
