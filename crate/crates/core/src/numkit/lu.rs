//! LU factorization with partial pivoting.

use super::matrix::DenseMatrix;
use crate::error::{dim_err, Error, Result};

#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    // L (unit lower, below the diagonal) and U packed together.
    factors: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(dim_err(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.norm_1().max(f64::MIN_POSITIVE);

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, f[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= f64::EPSILON * scale * n as f64 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let d = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / d;
                f[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        f[(i, j)] -= l * f[(k, j)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            factors: f,
            perm,
        })
    }

    /// Solves `A X = B` for every column of `B`.
    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows() != self.n {
            return Err(dim_err(format!(
                "right-hand side has {} rows, expected {}",
                b.rows(),
                self.n
            )));
        }
        let n = self.n;
        let f = &self.factors;
        let mut x = DenseMatrix::zeros(n, b.cols());
        for (i, &p) in self.perm.iter().enumerate() {
            for j in 0..b.cols() {
                x[(i, j)] = b[(p, j)];
            }
        }
        for j in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= f[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= f[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / f[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve(&DenseMatrix::identity(self.n))
            .expect("identity has matching rows")
    }
}

pub fn invert(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(Lu::factor(a)?.inverse())
}
