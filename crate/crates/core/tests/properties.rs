use minreach::reductions::{cone_k_reachable, cone_witness, build_lemma3};
use minreach::{
    bisection_exact, exactness_threshold, greedy_eps, is_feasible, min_hitting_set,
    reachable_subspace, transfer_vector, ActuatorSet, DenseMatrix, HittingSetInstance, LtiSystem,
    OrthoBasis, ReachModel, TransferSpec, Vector, TAU_EXACT,
};
use proptest::prelude::*;

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

fn system_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<f64>, Vec<bool>)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(-2.0f64..2.0, n * n),
            prop::collection::vec(any::<bool>(), n * n),
        )
    })
}

fn sparse_system(n: usize, values: &[f64], mask: &[bool]) -> LtiSystem {
    let data = values
        .iter()
        .zip(mask)
        .map(|(&v, &keep)| if keep { v } else { 0.0 })
        .collect();
    LtiSystem::new(DenseMatrix::new(n, n, data).unwrap()).unwrap()
}

fn check_orthonormal(b: &OrthoBasis) {
    let cols: Vec<&[f64]> = b.columns().collect();
    for (i, c) in cols.iter().enumerate() {
        for (j, d) in cols.iter().enumerate() {
            let dot: f64 = c.iter().zip(d.iter()).map(|(x, y)| x * y).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((dot - expect).abs() < 1e-10, "gram[{i}][{j}] = {dot}");
        }
    }
}

fn brute_hitting(inst: &HittingSetInstance) -> Vec<usize> {
    let m = inst.m();
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << m) {
        let set: Vec<usize> = (1..=m).filter(|e| mask & (1 << (e - 1)) != 0).collect();
        if !inst.is_hitting_set(&set) {
            continue;
        }
        best = match best {
            None => Some(set),
            Some(b) if set.len() < b.len() || (set.len() == b.len() && set < b) => Some(set),
            keep => keep,
        };
    }
    best.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn basis_stays_orthonormal_and_grows(cols in prop::collection::vec(vec_strategy(5), 0..8)) {
        let mut b = OrthoBasis::empty(5);
        for c in &cols {
            let before = b.rank();
            let probe = Vector::new(c.clone()).unwrap();
            b.push(&probe).unwrap();
            prop_assert!(b.rank() == before || b.rank() == before + 1);
            prop_assert!(b.rank() <= 5);
            check_orthonormal(&b);
            // Every pushed vector is now in the span.
            let r = probe.norm_sq() - b.project_norm_sq(&probe).unwrap();
            prop_assert!(r <= 1e-9 * probe.norm_sq().max(1.0));
        }
    }

    #[test]
    fn subspace_grows_with_actuators((n, vals, mask) in system_strategy(6), bits in any::<u64>(), extra in 1usize..=6) {
        let sys = sparse_system(n, &vals, &mask);
        let small = ActuatorSet::from_mask(n, bits & ((1 << n) - 1));
        let big = small.with(1 + (extra - 1) % n).unwrap_or(small.clone());
        let bs = reachable_subspace(&sys, &small).unwrap();
        let bb = reachable_subspace(&sys, &big).unwrap();
        prop_assert!(bs.rank() <= bb.rank());
        check_orthonormal(&bb);
        for c in bs.columns() {
            let v = Vector::new(c.to_vec()).unwrap();
            prop_assert!(1.0 - bb.project_norm_sq(&v).unwrap() < 1e-8);
        }
    }

    #[test]
    fn hitting_set_matches_enumeration(
        m in 1usize..=8,
        raw in prop::collection::vec(prop::collection::vec(1usize..=8, 1..4), 1..6),
    ) {
        let mut sets: Vec<Vec<usize>> = raw
            .into_iter()
            .map(|s| s.into_iter().map(|e| 1 + (e - 1) % m).collect())
            .collect();
        // Cover any uncovered elements so the instance is valid.
        let missing: Vec<usize> = (1..=m).filter(|e| !sets.iter().any(|s| s.contains(e))).collect();
        if !missing.is_empty() {
            sets.push(missing);
        }
        let inst = HittingSetInstance::new(m, sets).unwrap();
        let got = min_hitting_set(&inst);
        prop_assert!(inst.is_hitting_set(&got));
        prop_assert_eq!(got, brute_hitting(&inst));
    }

    #[test]
    fn cone_reachability_is_monotone(
        m in 1usize..=4,
        raw in prop::collection::vec(prop::collection::vec(1usize..=4, 1..3), 1..4),
        bits in any::<u64>(),
        extra in 1usize..=16,
    ) {
        let mut sets: Vec<Vec<usize>> = raw
            .into_iter()
            .map(|s| s.into_iter().map(|e| 1 + (e - 1) % m).collect())
            .collect();
        let missing: Vec<usize> = (1..=m).filter(|e| !sets.iter().any(|s| s.contains(e))).collect();
        if !missing.is_empty() {
            sets.push(missing);
        }
        let inst = HittingSetInstance::new(m, sets).unwrap();
        let n = m + inst.p();
        let small = ActuatorSet::from_mask(n, bits & ((1 << n) - 1));
        let big = small.with(1 + (extra - 1) % n).unwrap_or(small.clone());
        if cone_k_reachable(&inst, &small) {
            prop_assert!(cone_k_reachable(&inst, &big));
        }
        // A witness exists exactly when the cone is reachable, lies in the
        // cone and in the reachable subspace.
        let (sys, cone) = build_lemma3(&inst).unwrap();
        match cone_witness(&inst, &big) {
            Some(x) => {
                prop_assert!(cone_k_reachable(&inst, &big));
                prop_assert!(cone.contains(&x));
                prop_assert!(is_feasible(&sys, &big, &x).unwrap().feasible);
            }
            None => prop_assert!(!cone_k_reachable(&inst, &big)),
        }
    }

    #[test]
    fn threshold_is_positive_or_sentinel((n, vals, mask) in system_strategy(5), v in vec_strategy(5)) {
        let sys = sparse_system(n, &vals, &mask);
        let v = Vector::new(v[..n].to_vec()).unwrap();
        prop_assume!(v.norm_sq() > 1e-6);
        let eps = exactness_threshold(&sys, &v).unwrap();
        prop_assert!(eps > 0.0);
        prop_assert!(eps.is_finite() || eps == f64::INFINITY);
    }

    #[test]
    fn feasibility_is_time_invariant(
        (n, vals, mask) in system_strategy(5),
        x0 in vec_strategy(5),
        x1 in vec_strategy(5),
        bits in any::<u64>(),
        shift in -3.0f64..3.0,
    ) {
        // Scale A so the transfer vectors stay well conditioned.
        let vals: Vec<f64> = vals.iter().map(|v| 0.3 * v).collect();
        let sys = sparse_system(n, &vals, &mask);
        let delta = ActuatorSet::from_mask(n, bits & ((1 << n) - 1));
        let x0 = Vector::new(x0[..n].to_vec()).unwrap();
        let x1 = Vector::new(x1[..n].to_vec()).unwrap();
        let a = TransferSpec::new(x0.clone(), x1.clone(), 0.0, 1.5).unwrap();
        let b = TransferSpec::new(x0, x1, shift, shift + 1.5).unwrap();
        let va = transfer_vector(&sys, &a).unwrap();
        let vb = transfer_vector(&sys, &b).unwrap();
        prop_assert!(va.sub(&vb).unwrap().norm() <= 1e-9 * va.norm().max(1.0));
        let ra = is_feasible(&sys, &delta, &va).unwrap();
        let rb = is_feasible(&sys, &delta, &vb).unwrap();
        // Agreement away from the decision boundary.
        let band = ra.residual_sq / (TAU_EXACT * va.norm_sq()).max(f64::MIN_POSITIVE);
        if !(0.5..=2.0).contains(&band) {
            prop_assert_eq!(ra.feasible, rb.feasible);
        }
    }

    #[test]
    fn exact_mode_always_ends_feasible((n, vals, mask) in system_strategy(6), v in vec_strategy(6)) {
        let sys = sparse_system(n, &vals, &mask);
        let model = ReachModel::new(&sys);
        let v = Vector::new(v[..n].to_vec()).unwrap();
        let out = bisection_exact(&model, &v, 1e-3).unwrap();
        let r = model.residual(&out.actuators, &v).unwrap();
        prop_assert!(r <= TAU_EXACT * v.norm_sq());
        prop_assert!((out.final_eps - out.converged_mid).abs() <= 0.5e-3 + 1e-15);
    }

    #[test]
    fn greedy_meets_its_level((n, vals, mask) in system_strategy(6), v in vec_strategy(6), frac in 0.01f64..0.9) {
        let sys = sparse_system(n, &vals, &mask);
        let model = ReachModel::new(&sys);
        let v = Vector::new(v[..n].to_vec()).unwrap();
        prop_assume!(v.norm_sq() > 1e-6);
        let eps = frac * v.norm_sq();
        let (set, trace) = greedy_eps(&model, &v, eps).unwrap();
        prop_assert!(trace.final_residual() <= eps);
        prop_assert_eq!(set.len(), trace.chosen.len());
        for w in trace.residuals.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
    }
}
