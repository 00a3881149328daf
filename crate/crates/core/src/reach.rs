//! Reachability semantics for `dx/dt = A x + B u` with `B = diag(δ)`.
//!
//! Actuating state `i` contributes the Krylov subspace
//! `K_i = span{e_i, A e_i, ..., A^{n-1} e_i}` (mapped through the output
//! matrix `W` when one is present). The reachable subspace of an actuator set
//! is the sum of those subspaces, and a transfer `0 -> v` is feasible exactly
//! when `v` lies in it.
//!
//! State indices at this API boundary are 1-based.

use rayon::prelude::*;

use crate::error::{dim_err, input_err, Error, Result};
use crate::numkit::{mat_exp, normalized, DenseMatrix, OrthoBasis, Vector};

/// Relative tolerance for exact feasibility: `residual <= TAU_EXACT * |v|^2`.
pub const TAU_EXACT: f64 = 1e-8;

/// Largest state dimension accepted by exhaustive subset enumeration.
pub const N_BRUTE: usize = 16;

/// A linear time-invariant system `dx/dt = A x + B u`, `y = W x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: DenseMatrix,
    w: Option<DenseMatrix>,
}

impl LtiSystem {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(dim_err(format!(
                "state matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(Self { a, w: None })
    }

    pub fn with_output(a: DenseMatrix, w: DenseMatrix) -> Result<Self> {
        let sys = Self::new(a)?;
        if w.cols() != sys.n() {
            return Err(dim_err(format!(
                "output matrix has {} columns, expected {}",
                w.cols(),
                sys.n()
            )));
        }
        Ok(Self { w: Some(w), ..sys })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn w(&self) -> Option<&DenseMatrix> {
        self.w.as_ref()
    }

    /// Dimension of the space targets live in: `q` with an output matrix, else `n`.
    pub fn output_dim(&self) -> usize {
        self.w.as_ref().map_or(self.n(), DenseMatrix::rows)
    }

    fn has_identity_output(&self) -> bool {
        match &self.w {
            None => true,
            Some(w) => *w == DenseMatrix::identity(self.n()),
        }
    }

    fn check_target(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.output_dim() {
            return Err(dim_err(format!(
                "target has length {}, system output dimension is {}",
                v.dim(),
                self.output_dim()
            )));
        }
        Ok(())
    }
}

/// A set of actuated states, stored as strictly increasing 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActuatorSet {
    n: usize,
    indices: Vec<usize>,
}

impl ActuatorSet {
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(input_err(format!("actuator index {bad} outside 1..={n}")));
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(input_err("duplicate actuator index"));
        }
        Ok(Self { n, indices })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indices: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            indices: (1..=n).collect(),
        }
    }

    /// Builds the set whose zero-based members are the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            n,
            indices: (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &ActuatorSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    /// Returns a copy with `i` added.
    pub fn with(&self, i: usize) -> Result<ActuatorSet> {
        let mut idx = self.indices.clone();
        idx.push(i);
        Self::new(self.n, idx)
    }

    /// The zero-one diagonal of the induced input matrix.
    pub fn diagonal(&self) -> Vec<u8> {
        (1..=self.n).map(|i| u8::from(self.contains(i))).collect()
    }
}

/// A requested transfer `x0` at time `t0` to `x1` at time `t1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferSpec {
    pub x0: Vector,
    pub x1: Vector,
    pub t0: f64,
    pub t1: f64,
}

impl TransferSpec {
    pub fn new(x0: Vector, x1: Vector, t0: f64, t1: f64) -> Result<Self> {
        if x0.dim() != x1.dim() {
            return Err(dim_err(format!(
                "initial state has length {}, final state {}",
                x0.dim(),
                x1.dim()
            )));
        }
        if !(t0.is_finite() && t1.is_finite()) || t1 <= t0 {
            return Err(input_err(format!("need finite t1 > t0, got t0={t0}, t1={t1}")));
        }
        Ok(Self { x0, x1, t0, t1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub residual_sq: f64,
    pub feasible: bool,
    pub basis_rank: usize,
}

/// Whether `residual_sq` counts as exact feasibility for a target of squared norm `norm_sq`.
pub fn exactly_feasible(residual_sq: f64, norm_sq: f64) -> bool {
    residual_sq <= TAU_EXACT * norm_sq
}

/// Per-index reachable subspaces of a system, computed once and shared by
/// every query against it.
#[derive(Debug, Clone)]
pub struct ReachModel {
    sys: LtiSystem,
    spans: Vec<OrthoBasis>,
}

impl ReachModel {
    pub fn new(sys: &LtiSystem) -> Self {
        let spans = (0..sys.n())
            .into_par_iter()
            .map(|i| index_span(sys, i))
            .collect();
        Self {
            sys: sys.clone(),
            spans,
        }
    }

    pub fn system(&self) -> &LtiSystem {
        &self.sys
    }

    pub fn n(&self) -> usize {
        self.sys.n()
    }

    /// Orthonormal basis of the subspace contributed by actuating state `i` (1-based).
    pub fn index_span(&self, i: usize) -> &OrthoBasis {
        &self.spans[i - 1]
    }

    pub fn subspace(&self, delta: &ActuatorSet) -> Result<OrthoBasis> {
        self.check_set(delta)?;
        let mut basis = OrthoBasis::empty(self.sys.output_dim());
        for &i in delta.indices() {
            self.absorb(&mut basis, i);
        }
        Ok(basis)
    }

    /// Copy of `basis` extended by the subspace of state `i` (1-based).
    pub fn extended(&self, basis: &OrthoBasis, i: usize) -> OrthoBasis {
        let mut next = basis.clone();
        self.absorb(&mut next, i);
        next
    }

    fn absorb(&self, basis: &mut OrthoBasis, i: usize) {
        for q in self.spans[i - 1].columns() {
            if basis.is_full() {
                break;
            }
            basis.push_slice(q);
        }
    }

    pub fn residual(&self, delta: &ActuatorSet, v: &Vector) -> Result<f64> {
        Ok(self.report(delta, v)?.residual_sq)
    }

    pub fn is_feasible(&self, delta: &ActuatorSet, v: &Vector) -> Result<FeasibilityReport> {
        self.report(delta, v)
    }

    fn report(&self, delta: &ActuatorSet, v: &Vector) -> Result<FeasibilityReport> {
        self.sys.check_target(v)?;
        let basis = self.subspace(delta)?;
        let norm_sq = v.norm_sq();
        let residual_sq = residual_against(&basis, v);
        Ok(FeasibilityReport {
            residual_sq,
            feasible: exactly_feasible(residual_sq, norm_sq),
            basis_rank: basis.rank(),
        })
    }

    fn check_set(&self, delta: &ActuatorSet) -> Result<()> {
        if delta.n() != self.n() {
            return Err(dim_err(format!(
                "actuator set over {} states used with a {}-state system",
                delta.n(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// `|v|^2 - |proj(v)|^2`, clamped at zero.
pub(crate) fn residual_against(basis: &OrthoBasis, v: &Vector) -> f64 {
    (v.norm_sq() - basis.project_norm_sq_slice(v.as_slice())).max(0.0)
}

// Orthonormal basis of W * span{e_i, A e_i, ...}, built Arnoldi-style: each
// new direction is A applied to the latest orthonormal vector, which spans
// the same space as the monomial columns without their ill-conditioning.
fn index_span(sys: &LtiSystem, i: usize) -> OrthoBasis {
    let n = sys.n();
    let mut state = OrthoBasis::empty(n);
    state.push_slice(Vector::unit(n, i).as_slice());
    while !state.is_full() {
        let last = state.columns().last().expect("non-empty").to_vec();
        let next = sys.a().mul_vec_unchecked(&last);
        if state.push_slice(next.as_slice()) {
            break;
        }
    }
    match sys.w() {
        None => state,
        Some(w) => {
            let mut out = OrthoBasis::empty(w.rows());
            for q in state.columns() {
                out.push_slice(w.mul_vec_unchecked(q).as_slice());
            }
            out
        }
    }
}

/// The unit-normalized columns `e_i, A e_i, ..., A^{n-1} e_i` (each mapped by
/// `W` when present). Columns that vanish stay as zero vectors.
pub fn krylov_columns(sys: &LtiSystem, i: usize) -> Result<Vec<Vector>> {
    let n = sys.n();
    if i == 0 || i > n {
        return Err(input_err(format!("state index {i} outside 1..={n}")));
    }
    let mut cols = Vec::with_capacity(n);
    let mut cur = Some(Vector::unit(n, i - 1).into_vec());
    for _ in 0..n {
        let state = cur.clone().unwrap_or_else(|| vec![0.0; n]);
        let out = match sys.w() {
            Some(w) => w.mul_vec_unchecked(&state).into_vec(),
            None => state,
        };
        let col = normalized(&out).unwrap_or_else(|| vec![0.0; out.len()]);
        cols.push(Vector::new(col)?);
        // Positive rescaling keeps every direction and avoids overflow of A^k.
        cur = cur.and_then(|c| normalized(sys.a().mul_vec_unchecked(&c).as_slice()));
    }
    Ok(cols)
}

pub fn reachable_subspace(sys: &LtiSystem, delta: &ActuatorSet) -> Result<OrthoBasis> {
    ReachModel::new(sys).subspace(delta)
}

/// Squared distance from `v` to the reachable subspace of `delta`.
pub fn residual(sys: &LtiSystem, delta: &ActuatorSet, v: &Vector) -> Result<f64> {
    ReachModel::new(sys).residual(delta, v)
}

pub fn is_feasible(sys: &LtiSystem, delta: &ActuatorSet, v: &Vector) -> Result<FeasibilityReport> {
    ReachModel::new(sys).is_feasible(delta, v)
}

/// Kalman rank test on `[B | AB | ... | A^{n-1} B]`.
pub fn is_controllable(sys: &LtiSystem, delta: &ActuatorSet) -> Result<bool> {
    if !sys.has_identity_output() {
        return Err(Error::Unsupported(
            "controllability is defined for the state, not a weighted output".into(),
        ));
    }
    Ok(reachable_subspace(sys, delta)?.rank() == sys.n())
}

/// `v = x1 - exp(A (t1 - t0)) x0`, the equivalent transfer from the origin.
pub fn transfer_vector(sys: &LtiSystem, spec: &TransferSpec) -> Result<Vector> {
    if spec.x0.dim() != sys.n() {
        return Err(dim_err(format!(
            "transfer states have length {}, system has {} states",
            spec.x0.dim(),
            sys.n()
        )));
    }
    let phi = mat_exp(sys.a(), spec.t1 - spec.t0)?;
    spec.x1.sub(&phi.mul_vec(&spec.x0)?)
}

/// Smallest residual over index sets that are infeasible but become feasible
/// by actuating one more state. Any approximation level at or below this value
/// makes close feasibility coincide with exact feasibility. Returns
/// `f64::INFINITY` when no such index set exists.
pub fn exactness_threshold(sys: &LtiSystem, v: &Vector) -> Result<f64> {
    let n = sys.n();
    if n > N_BRUTE {
        return Err(Error::Capacity { n, max: N_BRUTE });
    }
    sys.check_target(v)?;
    if v.is_zero() {
        return Err(input_err("target must be non-zero"));
    }
    let model = ReachModel::new(sys);
    let norm_sq = v.norm_sq();
    let residuals: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let basis = model
                .subspace(&ActuatorSet::from_mask(n, mask))
                .expect("set matches system");
            residual_against(&basis, v)
        })
        .collect();

    let mut best = f64::INFINITY;
    for (mask, &r) in residuals.iter().enumerate() {
        if exactly_feasible(r, norm_sq) {
            continue;
        }
        let one_short = (0..n)
            .filter(|b| mask >> b & 1 == 0)
            .any(|b| exactly_feasible(residuals[mask | 1 << b], norm_sq));
        if one_short {
            best = best.min(r);
        }
    }
    Ok(best)
}
