//! Incrementally built orthonormal bases and projections onto their span.

use super::matrix::{dot, Vector};
use crate::error::{dim_err, Result};

/// Relative tolerance below which a residual is treated as lying in the span.
pub const RANK_TOL: f64 = 1e-10;

/// An orthonormal set of columns spanning a subspace of `R^ambient_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    ambient_dim: usize,
    columns: Vec<Vec<f64>>,
}

impl OrthoBasis {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            columns: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.columns.iter().map(Vec::as_slice)
    }

    /// Returns the extended basis and whether `col` was absorbed.
    pub fn extend(&self, col: &Vector) -> Result<(OrthoBasis, bool)> {
        let mut next = self.clone();
        let absorbed = next.push(col)?;
        Ok((next, absorbed))
    }

    /// In-place variant of [`extend`](Self::extend). Returns `true` when the
    /// column was absorbed (already in the span up to [`RANK_TOL`]).
    pub fn push(&mut self, col: &Vector) -> Result<bool> {
        self.check_dim(col)?;
        Ok(self.push_slice(col.as_slice()))
    }

    pub(crate) fn push_slice(&mut self, col: &[f64]) -> bool {
        if self.is_full() {
            return true;
        }
        let Some(mut r) = normalized(col) else {
            return true;
        };
        // Two Gram-Schmidt sweeps.
        for _ in 0..2 {
            for q in &self.columns {
                let c = dot(&r, q);
                for (ri, qi) in r.iter_mut().zip(q) {
                    *ri -= c * qi;
                }
            }
        }
        let rn = dot(&r, &r).sqrt();
        if rn <= RANK_TOL * 2.0 {
            return true;
        }
        for x in &mut r {
            *x /= rn;
        }
        self.columns.push(r);
        false
    }

    /// Squared norm of the orthogonal projection of `v` onto the span.
    pub fn project_norm_sq(&self, v: &Vector) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.project_norm_sq_slice(v.as_slice()))
    }

    pub(crate) fn project_norm_sq_slice(&self, v: &[f64]) -> f64 {
        self.columns
            .iter()
            .map(|q| {
                let c = dot(v, q);
                c * c
            })
            .sum()
    }

    /// The orthogonal projection of `v` onto the span.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        self.check_dim(v)?;
        let mut p = vec![0.0; self.ambient_dim];
        for q in &self.columns {
            let c = dot(v.as_slice(), q);
            for (pi, qi) in p.iter_mut().zip(q) {
                *pi += c * qi;
            }
        }
        Ok(Vector::new(p).expect("projection of finite data is finite"))
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.ambient_dim {
            return Err(dim_err(format!(
                "vector of length {} against basis in R^{}",
                v.dim(),
                self.ambient_dim
            )));
        }
        Ok(())
    }
}

/// Unit-length copy of `col`, or `None` for the zero vector. Scales by the
/// largest entry first so that squaring cannot overflow.
pub(crate) fn normalized(col: &[f64]) -> Option<Vec<f64>> {
    let amax = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if amax == 0.0 {
        return None;
    }
    let mut r: Vec<f64> = col.iter().map(|x| x / amax).collect();
    let norm = dot(&r, &r).sqrt();
    for x in &mut r {
        *x /= norm;
    }
    Some(r)
}
