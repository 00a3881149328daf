//! Actuator selection: greedy close-feasibility, bisection to exact
//! feasibility, reachability of a union of balls, and exhaustive oracles.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{dim_err, input_err, Error, Result};
use crate::numkit::{OrthoBasis, Vector};
use crate::reach::{exactly_feasible, residual_against, ActuatorSet, ReachModel, N_BRUTE};

/// Gains within this fraction of `|v|^2` of each other count as a tie.
const TIE_TOL: f64 = 1e-12;

/// Bisection never probes below `EPS_FLOOR * |v|^2`.
pub const EPS_FLOOR: f64 = 1e-12;

/// Picks made by the greedy loop together with the residual after each one.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    /// 1-based state indices in the order they were chosen.
    pub chosen: Vec<usize>,
    /// `residuals[k]` is the squared residual after `k` picks.
    pub residuals: Vec<f64>,
    pub epsilon: f64,
}

impl GreedyTrace {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("trace starts with the empty-set residual")
    }
}

/// Adds actuators one at a time, each maximizing the projected-norm gain,
/// until the residual of `v` is at most `eps`. Ties go to the smallest index.
pub fn greedy_eps(model: &ReachModel, v: &Vector, eps: f64) -> Result<(ActuatorSet, GreedyTrace)> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(input_err(format!("approximation level must be positive, got {eps}")));
    }
    let out_dim = model.system().output_dim();
    if v.dim() != out_dim {
        return Err(dim_err(format!(
            "target has length {}, system output dimension is {out_dim}",
            v.dim()
        )));
    }
    let n = model.n();
    let norm_sq = v.norm_sq();
    let tie = TIE_TOL * norm_sq;

    let mut basis = OrthoBasis::empty(out_dim);
    let mut delta = ActuatorSet::empty(n);
    let mut residual = norm_sq;
    let mut trace = GreedyTrace {
        chosen: Vec::new(),
        residuals: vec![residual],
        epsilon: eps,
    };

    while residual > eps {
        let candidates: Vec<usize> = (1..=n).filter(|&i| !delta.contains(i)).collect();
        let scored: Vec<(usize, f64, OrthoBasis)> = candidates
            .par_iter()
            .map(|&i| {
                let ext = model.extended(&basis, i);
                let r = residual_against(&ext, v);
                (i, r, ext)
            })
            .collect();

        // Ascending-index reduction: a later candidate must beat the best by
        // more than the tie tolerance.
        let mut best: Option<(usize, f64, OrthoBasis)> = None;
        for cand in scored {
            let better = match &best {
                None => true,
                Some((_, r_best, _)) => cand.1 < r_best - tie,
            };
            if better {
                best = Some(cand);
            }
        }
        let Some((i, r, ext)) = best else {
            return Err(Error::NumericallyInfeasible { residual_sq: residual });
        };
        if r >= residual {
            // No remaining state moves the projection.
            return Err(Error::NumericallyInfeasible { residual_sq: residual });
        }
        delta = delta.with(i)?;
        basis = ext;
        residual = r;
        trace.chosen.push(i);
        trace.residuals.push(r);
    }
    Ok((delta, trace))
}

/// One greedy run made during the bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub eps: f64,
    pub cardinality: usize,
    pub residual_sq: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionOutcome {
    pub actuators: ActuatorSet,
    /// Approximation level of the final greedy run.
    pub final_eps: f64,
    /// Midpoint of the bracket when the loop converged.
    pub converged_mid: f64,
    pub probes: Vec<Probe>,
    /// Trace of the final greedy run.
    pub trace: GreedyTrace,
}

/// Bisects the approximation level handed to [`greedy_eps`] until the returned
/// set makes `0 -> v` exactly feasible with as few actuators as the search finds.
///
/// The bracket starts as `[0, |v|^2]`. A probe whose greedy result is not
/// exactly feasible lowers the upper end; a feasible one raises the lower end,
/// since a larger level lets the greedy loop stop earlier. Once the bracket is
/// narrower than `accuracy` the level is moved below the bracket midpoint if
/// the last probe failed, and the greedy loop runs one final time.
pub fn bisection_exact(model: &ReachModel, v: &Vector, accuracy: f64) -> Result<BisectionOutcome> {
    if !(accuracy.is_finite() && accuracy > 0.0) {
        return Err(input_err(format!("bisection accuracy must be positive, got {accuracy}")));
    }
    let norm_sq = v.norm_sq();
    if norm_sq == 0.0 {
        if v.dim() != model.system().output_dim() {
            return Err(dim_err("target length does not match the system output"));
        }
        return Ok(BisectionOutcome {
            actuators: ActuatorSet::empty(model.n()),
            final_eps: 0.0,
            converged_mid: 0.0,
            probes: Vec::new(),
            trace: GreedyTrace {
                chosen: Vec::new(),
                residuals: vec![0.0],
                epsilon: 0.0,
            },
        });
    }
    let floor = EPS_FLOOR * norm_sq;

    let probe = |eps: f64| -> Result<(Probe, Option<(ActuatorSet, GreedyTrace)>)> {
        match greedy_eps(model, v, eps) {
            Ok((set, trace)) => {
                let r = trace.final_residual();
                let p = Probe {
                    eps,
                    cardinality: set.len(),
                    residual_sq: r,
                    feasible: exactly_feasible(r, norm_sq),
                };
                Ok((p, Some((set, trace))))
            }
            Err(Error::NumericallyInfeasible { residual_sq }) => Ok((
                Probe {
                    eps,
                    cardinality: model.n(),
                    residual_sq,
                    feasible: false,
                },
                None,
            )),
            Err(e) => Err(e),
        }
    };

    let (mut lo, mut hi) = (0.0, norm_sq);
    let mut eps = 0.5 * (lo + hi);
    let mut probes = Vec::new();
    let mut last_feasible = false;
    while hi - lo > accuracy && eps >= floor {
        let (p, _) = probe(eps)?;
        last_feasible = p.feasible;
        if p.feasible {
            lo = eps;
        } else {
            hi = eps;
        }
        probes.push(p);
        eps = 0.5 * (lo + hi);
    }
    let converged_mid = eps;

    if !last_feasible {
        hi = eps;
        eps = 0.5 * (lo + hi);
    }
    // Feasibility of the greedy result is monotone in the level, so moving
    // toward the feasible end of the bracket terminates.
    loop {
        let eps_used = eps.max(floor);
        let (p, run) = probe(eps_used)?;
        let feasible = p.feasible;
        let residual = p.residual_sq;
        probes.push(p);
        if feasible {
            let (actuators, trace) = run.expect("feasible probe has a result");
            return Ok(BisectionOutcome {
                actuators,
                final_eps: eps_used,
                converged_mid,
                probes,
                trace,
            });
        }
        if eps_used <= floor {
            return Err(Error::NumericallyInfeasible { residual_sq: residual });
        }
        hi = eps_used;
        eps = 0.5 * (lo + hi);
    }
}

/// A Euclidean ball given by its centre and squared radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vector,
    radius_sq: f64,
}

impl Ball {
    pub fn new(center: Vector, radius_sq: f64) -> Result<Self> {
        if !(radius_sq.is_finite() && radius_sq > 0.0) {
            return Err(input_err(format!("ball radius must be positive, got {radius_sq}")));
        }
        Ok(Self { center, radius_sq })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius_sq(&self) -> f64 {
        self.radius_sq
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetReach {
    pub actuators: ActuatorSet,
    /// 1-based index of the winning ball.
    pub ball_index: usize,
    pub trace: GreedyTrace,
}

/// Runs [`greedy_eps`] toward each ball centre with the ball's squared radius
/// as the level and keeps the sparsest result (earliest ball on ties).
pub fn subset_reach(model: &ReachModel, balls: &[Ball]) -> Result<SubsetReach> {
    if balls.is_empty() {
        return Err(input_err("at least one ball is required"));
    }
    let mut best: Option<SubsetReach> = None;
    for (k, ball) in balls.iter().enumerate() {
        let (actuators, trace) = greedy_eps(model, ball.center(), ball.radius_sq())?;
        if best.as_ref().is_none_or(|b| actuators.len() < b.actuators.len()) {
            best = Some(SubsetReach {
                actuators,
                ball_index: k + 1,
                trace,
            });
        }
    }
    Ok(best.expect("non-empty ball list"))
}

fn check_capacity(model: &ReachModel) -> Result<()> {
    if model.n() > N_BRUTE {
        return Err(Error::Capacity {
            n: model.n(),
            max: N_BRUTE,
        });
    }
    Ok(())
}

fn sets_of_size(n: usize, k: usize) -> impl Iterator<Item = ActuatorSet> {
    (1..=n)
        .combinations(k)
        .map(move |c| ActuatorSet::new(n, c).expect("combination is a valid set"))
}

/// Smallest set (lexicographically first among equals) with residual at most
/// `eps`, searching cardinalities `0..=k_max`.
pub fn brute_force_opt(
    model: &ReachModel,
    v: &Vector,
    eps: f64,
    k_max: usize,
) -> Result<Option<ActuatorSet>> {
    check_capacity(model)?;
    for k in 0..=k_max.min(model.n()) {
        for set in sets_of_size(model.n(), k) {
            if model.residual(&set, v)? <= eps {
                return Ok(Some(set));
            }
        }
    }
    Ok(None)
}

/// Every minimum-cardinality set with residual at most `eps`, searching
/// cardinalities `0..=k_max`. Empty when none exists.
pub fn brute_force_all_opt(
    model: &ReachModel,
    v: &Vector,
    eps: f64,
    k_max: usize,
) -> Result<Vec<ActuatorSet>> {
    check_capacity(model)?;
    for k in 0..=k_max.min(model.n()) {
        let mut hits = Vec::new();
        for set in sets_of_size(model.n(), k) {
            if model.residual(&set, v)? <= eps {
                hits.push(set);
            }
        }
        if !hits.is_empty() {
            return Ok(hits);
        }
    }
    Ok(Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::star;
    use crate::numkit::DenseMatrix;
    use crate::reach::{LtiSystem, TAU_EXACT};

    fn diag12() -> ReachModel {
        ReachModel::new(&LtiSystem::new(DenseMatrix::from_diagonal(&[1.0, 2.0])).unwrap())
    }

    fn vecf(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn greedy_stops_immediately_when_level_is_loose() {
        let m = diag12();
        let v = vecf(&[1.0, 1.0]);
        let (set, trace) = greedy_eps(&m, &v, 2.0).unwrap();
        assert!(set.is_empty());
        assert_eq!(trace.residuals, vec![2.0]);
        let (set, _) = greedy_eps(&m, &Vector::zeros(2), 1e-9).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn greedy_on_diagonal_picks_smallest_first() {
        let (set, trace) = greedy_eps(&diag12(), &vecf(&[1.0, 1.0]), 1e-6).unwrap();
        assert_eq!(set.indices(), &[1, 2]);
        assert_eq!(trace.chosen, vec![1, 2]);
        assert_eq!(trace.residuals.len(), 3);
        assert!((trace.residuals[0] - 2.0).abs() < 1e-15);
        assert!((trace.residuals[1] - 1.0).abs() < 1e-15);
        assert!(trace.residuals[2].abs() < 1e-15);
    }

    #[test]
    fn greedy_rejects_bad_level() {
        let m = diag12();
        assert!(greedy_eps(&m, &vecf(&[1.0, 1.0]), 0.0).is_err());
        assert!(greedy_eps(&m, &vecf(&[1.0, 1.0]), -1.0).is_err());
        assert!(greedy_eps(&m, &vecf(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn greedy_reports_unreachable_output() {
        let sys = LtiSystem::with_output(DenseMatrix::identity(2), DenseMatrix::zeros(1, 2)).unwrap();
        let m = ReachModel::new(&sys);
        assert!(matches!(
            greedy_eps(&m, &vecf(&[1.0]), 1e-3),
            Err(Error::NumericallyInfeasible { .. })
        ));
    }

    #[test]
    fn bisection_on_star_targets() {
        let m = ReachModel::new(&star(4).unwrap());
        let cases: [(&[f64], &[usize]); 3] = [
            (&[1.0, 0.0, 0.0, 0.0, 0.0], &[1]),
            (&[0.0, 1.0, 1.0, 0.0, 0.0], &[2, 3]),
            (&[1.0, 1.0, 1.0, 0.0, 0.0], &[2, 3]),
        ];
        for (x1, expect) in cases {
            let v = vecf(x1);
            let out = bisection_exact(&m, &v, 1e-3).unwrap();
            assert_eq!(out.actuators.indices(), expect, "target {x1:?}");
            assert!(m.is_feasible(&out.actuators, &v).unwrap().feasible);
            assert!((out.final_eps - out.converged_mid).abs() <= 0.5e-3);
        }
    }

    #[test]
    fn bisection_with_coarse_accuracy_still_feasible() {
        let m = ReachModel::new(&star(4).unwrap());
        let v = vecf(&[0.0, 1.0, 1.0, 0.0, 0.0]);
        let out = bisection_exact(&m, &v, 10.0).unwrap();
        assert_eq!(out.actuators.indices(), &[2, 3]);
        assert!(out.trace.final_residual() <= TAU_EXACT * v.norm_sq());
    }

    #[test]
    fn bisection_zero_target_and_errors() {
        let m = diag12();
        let out = bisection_exact(&m, &Vector::zeros(2), 1e-3).unwrap();
        assert!(out.actuators.is_empty());
        assert!(bisection_exact(&m, &vecf(&[1.0, 0.0]), 0.0).is_err());

        let sys = LtiSystem::with_output(DenseMatrix::identity(2), DenseMatrix::zeros(1, 2)).unwrap();
        let m = ReachModel::new(&sys);
        assert!(matches!(
            bisection_exact(&m, &vecf(&[1.0]), 1e-3),
            Err(Error::NumericallyInfeasible { .. })
        ));
    }

    #[test]
    fn subset_reach_examples() {
        let m = diag12();
        let origin = Ball::new(Vector::zeros(2), 0.5).unwrap();
        let r = subset_reach(&m, &[origin]).unwrap();
        assert!(r.actuators.is_empty());
        assert_eq!(r.ball_index, 1);

        let b1 = Ball::new(vecf(&[1.0, 1.0]), 1e-6).unwrap();
        let b2 = Ball::new(Vector::unit(2, 0), 1e-6).unwrap();
        let r = subset_reach(&m, &[b1.clone(), b2.clone()]).unwrap();
        assert_eq!(r.actuators.indices(), &[1]);
        assert_eq!(r.ball_index, 2);

        let r = subset_reach(&m, &[b2.clone(), b2]).unwrap();
        assert_eq!(r.ball_index, 1);

        assert!(subset_reach(&m, &[]).is_err());
        assert!(Ball::new(Vector::zeros(2), 0.0).is_err());

        let s = ReachModel::new(&star(4).unwrap());
        let hub = Ball::new(Vector::unit(5, 0), 1e-6).unwrap();
        let r = subset_reach(&s, &[hub]).unwrap();
        assert_eq!(r.actuators.len(), 1);
    }

    #[test]
    fn brute_force_examples() {
        let m = diag12();
        assert_eq!(
            brute_force_opt(&m, &Vector::zeros(2), 1e-6, 2).unwrap(),
            Some(ActuatorSet::empty(2))
        );
        let v = vecf(&[1.0, 1.0]);
        assert_eq!(brute_force_opt(&m, &v, 1e-6, 2).unwrap().unwrap().len(), 2);
        assert_eq!(brute_force_opt(&m, &v, 1e-6, 1).unwrap(), None);

        let s = ReachModel::new(&star(4).unwrap());
        let opt = brute_force_opt(&s, &Vector::unit(5, 0), 1e-6, 5).unwrap().unwrap();
        assert_eq!(opt.len(), 1);
        // Every single state reaches the hub target.
        assert_eq!(
            brute_force_all_opt(&s, &Vector::unit(5, 0), 1e-6, 5).unwrap().len(),
            5
        );

        let big = ReachModel::new(&LtiSystem::new(DenseMatrix::zeros(17, 17)).unwrap());
        assert!(matches!(
            brute_force_opt(&big, &Vector::unit(17, 0), 1e-6, 1),
            Err(Error::Capacity { .. })
        ));
    }
}
