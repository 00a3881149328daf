//! Systems built from hitting-set instances whose sparsest actuator sets
//! encode minimum hitting sets, plus a verifier that checks each equivalence
//! by brute force on both sides.
//!
//! With `Φ` the `p x m` incidence matrix of an instance:
//!
//! * [`build_lemma1`]: `A = V⁻¹ diag(1..n) V` with
//!   `V = [2I, 0, 1; Φ, (m+1)I, 0; 0, 0, 1]` and target `V⁻¹ 1`. The transfer
//!   needs exactly one actuator more than a minimum hitting set has elements.
//! * [`build_lemma2`]: the same with a decoupled trailing state and target
//!   `V⁻¹ (1, ..., 1, 0)`. Same count, and the optimal sets never make the
//!   system controllable.
//! * [`build_lemma3`]: the nilpotent `A = [0, 0; Φ, 0]` with the open cone
//!   `{x : x_1..m = 0, x_{m+1..m+p} > 0}` as target. The cone is reachable with
//!   `k` actuators iff a `k`-element hitting set exists.

use std::fmt;
use std::str::FromStr;

use crate::error::{input_err, Error, Result};
use crate::hitting::{min_hitting_set, HittingSetInstance};
use crate::numkit::{invert, DenseMatrix, Vector};
use crate::reach::{is_controllable, ActuatorSet, LtiSystem, ReachModel, N_BRUTE, TAU_EXACT};
use crate::select::brute_force_all_opt;

/// Target of the nilpotent construction: states `1..=m` at zero and
/// states `m+1..=m+p` strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeTarget {
    pub m: usize,
    pub p: usize,
}

impl ConeTarget {
    pub fn contains(&self, x: &Vector) -> bool {
        let s = x.as_slice();
        s.len() == self.m + self.p
            && s[..self.m].iter().all(|&v| v == 0.0)
            && s[self.m..].iter().all(|&v| v > 0.0)
    }
}

fn is_strictly_diagonally_dominant(v: &DenseMatrix) -> bool {
    (0..v.rows()).all(|i| {
        let off: f64 = (0..v.cols()).filter(|&j| j != i).map(|j| v[(i, j)].abs()).sum();
        v[(i, i)].abs() > off
    })
}

/// The transform `V` of [`build_lemma1`] (`extra_state = false`) or
/// [`build_lemma2`] (`extra_state = true`).
pub fn reduction_transform(instance: &HittingSetInstance, extra_state: bool) -> DenseMatrix {
    let (m, p) = (instance.m(), instance.p());
    let n = m + p + 1 + usize::from(extra_state);
    let phi = instance.incidence().phi;
    let mut v = DenseMatrix::zeros(n, n);
    for i in 0..m {
        v[(i, i)] = 2.0;
        v[(i, m + p)] = 1.0;
    }
    for i in 0..p {
        for j in 0..m {
            v[(m + i, j)] = phi[(i, j)];
        }
        v[(m + i, m + i)] = (m + 1) as f64;
    }
    v[(m + p, m + p)] = 1.0;
    if extra_state {
        v[(n - 1, n - 1)] = 1.0;
    }
    v
}

fn similarity_system(v: &DenseMatrix, rhs: Vec<f64>) -> Result<(LtiSystem, Vector)> {
    assert!(
        is_strictly_diagonally_dominant(v),
        "reduction transform must be strictly diagonally dominant"
    );
    let n = v.rows();
    let v_inv = invert(v)?;
    let spectrum = DenseMatrix::from_diagonal(&(1..=n).map(|k| k as f64).collect::<Vec<_>>());
    let a = v_inv.matmul(&spectrum.matmul(v)?)?;
    let chi = v_inv.mul_vec(&Vector::new(rhs)?)?;
    Ok((LtiSystem::new(a)?, chi))
}

pub fn build_lemma1(instance: &HittingSetInstance) -> Result<(LtiSystem, Vector)> {
    let v = reduction_transform(instance, false);
    let n = v.rows();
    similarity_system(&v, vec![1.0; n])
}

pub fn build_lemma2(instance: &HittingSetInstance) -> Result<(LtiSystem, Vector)> {
    let v = reduction_transform(instance, true);
    let n = v.rows();
    let mut rhs = vec![1.0; n];
    rhs[n - 1] = 0.0;
    similarity_system(&v, rhs)
}

pub fn build_lemma3(instance: &HittingSetInstance) -> Result<(LtiSystem, ConeTarget)> {
    let (m, p) = (instance.m(), instance.p());
    let phi = instance.incidence().phi;
    let mut a = DenseMatrix::zeros(m + p, m + p);
    for i in 0..p {
        for j in 0..m {
            a[(m + i, j)] = phi[(i, j)];
        }
    }
    Ok((LtiSystem::new(a)?, ConeTarget { m, p }))
}

/// Whether the cone target of [`build_lemma3`] meets the reachable subspace of
/// `delta`. Since `A² = 0` that subspace is `span[B | AB]`, and a positive
/// point exists iff every set `i` is covered: either state `m+i` is actuated
/// or some actuated `j <= m` belongs to set `i`.
pub fn cone_k_reachable(instance: &HittingSetInstance, delta: &ActuatorSet) -> bool {
    let m = instance.m();
    instance.sets().iter().enumerate().all(|(i, set)| {
        delta.contains(m + i + 1) || set.iter().any(|&j| delta.contains(j))
    })
}

/// A point of the cone inside the reachable subspace of `delta`, when one exists.
pub fn cone_witness(instance: &HittingSetInstance, delta: &ActuatorSet) -> Option<Vector> {
    if !cone_k_reachable(instance, delta) {
        return None;
    }
    let (m, p) = (instance.m(), instance.p());
    let mut x = vec![0.0; m + p];
    for (i, set) in instance.sets().iter().enumerate() {
        if delta.contains(m + i + 1) {
            x[m + i] += 1.0;
        }
        x[m + i] += set.iter().filter(|&&j| delta.contains(j)).count() as f64;
    }
    Some(Vector::new(x).expect("finite"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Lemma1,
    Lemma2,
    Lemma3,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma1" => Ok(Variant::Lemma1),
            "lemma2" => Ok(Variant::Lemma2),
            "lemma3" => Ok(Variant::Lemma3),
            other => Err(input_err(format!(
                "unknown reduction `{other}` (expected lemma1, lemma2 or lemma3)"
            ))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Lemma1 => "lemma1",
            Variant::Lemma2 => "lemma2",
            Variant::Lemma3 => "lemma3",
        })
    }
}

/// Outcome of checking one reduction on one instance.
///
/// For `lemma1` and `lemma2` the expected actuator count is the hitting-set
/// size plus one; for `lemma3` it equals the hitting-set size.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub variant: Variant,
    pub hitting_set: Vec<usize>,
    pub expected: usize,
    /// Minimum actuator count found by brute force, `None` if nothing up to
    /// `k_max` works.
    pub observed: Option<usize>,
    pub optimal_sets: Vec<ActuatorSet>,
    /// `lemma2` only: whether some optimal set renders the system controllable.
    pub any_optimal_controllable: Option<bool>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn hitting_set_size(&self) -> usize {
        self.hitting_set.len()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let observed = self
            .observed
            .map_or_else(|| "none".to_string(), |a| a.to_string());
        write!(
            f,
            "{}: h={} a={} expected={}",
            self.variant,
            self.hitting_set_size(),
            observed,
            self.expected
        )?;
        if let Some(c) = self.any_optimal_controllable {
            write!(f, " controllable_at_optimum={c}")?;
        }
        write!(f, " {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

fn state_count(instance: &HittingSetInstance, variant: Variant) -> usize {
    let (m, p) = (instance.m(), instance.p());
    match variant {
        Variant::Lemma1 => m + p + 1,
        Variant::Lemma2 => m + p + 2,
        Variant::Lemma3 => m + p,
    }
}

pub fn verify_reduction(
    instance: &HittingSetInstance,
    variant: Variant,
    k_max: usize,
) -> Result<VerificationReport> {
    let n = state_count(instance, variant);
    if n > N_BRUTE {
        return Err(Error::Capacity { n, max: N_BRUTE });
    }
    let hitting_set = min_hitting_set(instance);
    let h = hitting_set.len();

    let (expected, optimal_sets) = match variant {
        Variant::Lemma1 | Variant::Lemma2 => {
            let (sys, chi) = if variant == Variant::Lemma1 {
                build_lemma1(instance)?
            } else {
                build_lemma2(instance)?
            };
            let model = ReachModel::new(&sys);
            let eps = TAU_EXACT * chi.norm_sq();
            (h + 1, brute_force_all_opt(&model, &chi, eps, k_max)?)
        }
        Variant::Lemma3 => (h, min_cone_sets(instance, k_max)),
    };
    let observed = optimal_sets.first().map(ActuatorSet::len);

    let any_optimal_controllable = if variant == Variant::Lemma2 {
        let (sys, _) = build_lemma2(instance)?;
        let mut any = false;
        for set in &optimal_sets {
            any |= is_controllable(&sys, set)?;
        }
        Some(any)
    } else {
        None
    };

    let pass = observed == Some(expected) && any_optimal_controllable != Some(true);
    Ok(VerificationReport {
        variant,
        hitting_set,
        expected,
        observed,
        optimal_sets,
        any_optimal_controllable,
        pass,
    })
}

/// All minimum-cardinality sets (up to `k_max`) that reach the cone target.
pub fn min_cone_sets(instance: &HittingSetInstance, k_max: usize) -> Vec<ActuatorSet> {
    use itertools::Itertools;
    let n = instance.m() + instance.p();
    for k in 0..=k_max.min(n) {
        let hits: Vec<ActuatorSet> = (1..=n)
            .combinations(k)
            .map(|c| ActuatorSet::new(n, c).expect("valid combination"))
            .filter(|s| cone_k_reachable(instance, s))
            .collect();
        if !hits.is_empty() {
            return hits;
        }
    }
    Vec::new()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::reachable_subspace;

    fn inst(m: usize, sets: &[&[usize]]) -> HittingSetInstance {
        HittingSetInstance::new(m, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn lemma1_transform_for_single_set() {
        let v = reduction_transform(&inst(1, &[&[1]]), false);
        assert_eq!(
            v.to_rows(),
            vec![vec![2.0, 0.0, 1.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]]
        );
        assert!(is_strictly_diagonally_dominant(&v));
    }

    #[test]
    fn lemma1_system_has_requested_spectrum() {
        let i = inst(2, &[&[1, 2], &[2]]);
        let v = reduction_transform(&i, false);
        let (sys, chi) = build_lemma1(&i).unwrap();
        assert_eq!(sys.n(), 5);
        // V A = diag(1..n) V.
        let lhs = v.matmul(sys.a()).unwrap();
        let d = DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let rhs = d.matmul(&v).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let back = v.mul_vec(&chi).unwrap();
        assert!(back.as_slice().iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn lemma1_single_set_needs_two_actuators() {
        let i = inst(1, &[&[1]]);
        let r = verify_reduction(&i, Variant::Lemma1, 3).unwrap();
        assert_eq!(r.hitting_set_size(), 1);
        assert_eq!(r.observed, Some(2));
        assert!(r.pass, "{r}");
    }

    #[test]
    fn lemma2_structure_and_count() {
        let i = inst(1, &[&[1]]);
        let (sys, chi) = build_lemma2(&i).unwrap();
        assert_eq!(sys.n(), 4);
        let v = reduction_transform(&i, true);
        assert!(v.mul_vec(&chi).unwrap()[3].abs() < 1e-15);
        let r = verify_reduction(&i, Variant::Lemma2, 4).unwrap();
        assert_eq!(r.observed, Some(2));
        assert_eq!(r.any_optimal_controllable, Some(false));
        assert!(r.pass, "{r}");
    }

    #[test]
    fn lemma3_structure() {
        let (sys, cone) = build_lemma3(&inst(2, &[&[1, 2]])).unwrap();
        assert_eq!(
            sys.a().to_rows(),
            vec![vec![0.0; 3], vec![0.0; 3], vec![1.0, 1.0, 0.0]]
        );
        assert_eq!(cone, ConeTarget { m: 2, p: 1 });
        let sq = sys.a().matmul(sys.a()).unwrap();
        assert_eq!(sq.count_nonzero(), 0);
    }

    #[test]
    fn cone_criterion_examples() {
        let i = inst(1, &[&[1]]);
        assert!(cone_k_reachable(&i, &ActuatorSet::new(2, vec![1]).unwrap()));
        assert!(cone_k_reachable(&i, &ActuatorSet::new(2, vec![2]).unwrap()));
        assert!(!cone_k_reachable(&i, &ActuatorSet::empty(2)));

        let j = inst(2, &[&[1], &[2]]);
        assert!(!cone_k_reachable(&j, &ActuatorSet::new(4, vec![1]).unwrap()));
        assert!(cone_k_reachable(&j, &ActuatorSet::new(4, vec![3, 4]).unwrap()));
    }

    #[test]
    fn cone_witness_lies_in_reachable_subspace() {
        let i = inst(3, &[&[1, 2], &[2, 3], &[3]]);
        let (sys, cone) = build_lemma3(&i).unwrap();
        for mask in 0..(1u64 << 6) {
            let delta = ActuatorSet::from_mask(6, mask);
            if let Some(x) = cone_witness(&i, &delta) {
                assert!(cone.contains(&x));
                let basis = reachable_subspace(&sys, &delta).unwrap();
                let proj = basis.project_norm_sq(&x).unwrap();
                assert!((x.norm_sq() - proj).abs() < 1e-9 * x.norm_sq());
            }
        }
    }

    #[test]
    fn verify_lemma3_examples() {
        let r = verify_reduction(&inst(3, &[&[1, 2], &[2, 3]]), Variant::Lemma3, 5).unwrap();
        assert_eq!((r.hitting_set_size(), r.observed), (1, Some(1)));
        assert!(r.pass);
        let r = verify_reduction(&inst(3, &[&[1], &[2], &[3]]), Variant::Lemma3, 6).unwrap();
        assert_eq!((r.hitting_set_size(), r.observed), (3, Some(3)));
        assert!(r.pass);
        assert_eq!(r.to_string(), "lemma3: h=3 a=3 expected=3 PASS");
    }

    #[test]
    fn verify_capacity_and_parse() {
        let big = HittingSetInstance::new(10, (1..=10).map(|e| vec![e]).collect()).unwrap();
        assert!(matches!(
            verify_reduction(&big, Variant::Lemma1, 3),
            Err(Error::Capacity { .. })
        ));
        assert_eq!("lemma2".parse::<Variant>().unwrap(), Variant::Lemma2);
        assert!("lemma4".parse::<Variant>().is_err());
    }

    #[test]
    fn small_k_max_reports_failure() {
        let r = verify_reduction(&inst(1, &[&[1]]), Variant::Lemma1, 1).unwrap();
        assert_eq!(r.observed, None);
        assert!(!r.pass);
    }
}
