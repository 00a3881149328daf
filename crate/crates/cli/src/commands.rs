use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use minreach::netgen::{erdos_renyi, star, RngSeed};
use minreach::reductions::{build_lemma1, build_lemma2, build_lemma3, verify_reduction, Variant};
use minreach::{
    bisection_exact, brute_force_opt, greedy_eps, subset_reach as select_subset, transfer_vector,
    ActuatorSet, GreedyTrace, LtiSystem, ReachModel, TransferSpec, Vector, N_BRUTE,
};
use serde::Serialize;

use crate::files::{
    parse_vector, read_json, to_sorted_json, write_json, BallFile, InstanceFile, SystemFile,
    TargetFile,
};
use crate::CliError;

/// Relative size below which `x1 - exp(A T) x0` is treated as cancellation noise.
const CANCEL_TOL: f64 = 1e-12;

pub struct TransferInput {
    pub x0: Option<String>,
    pub x1: String,
    pub t0: f64,
    pub t1: f64,
}

pub enum ReachMode {
    Eps(f64),
    Exact { accuracy: f64 },
}

/// Result printed to standard output as JSON with sorted keys.
#[derive(Debug, Serialize)]
pub struct RunReport {
    /// 1-based actuated states.
    pub actuators: Vec<usize>,
    pub cardinality: usize,
    pub residual_sq: f64,
    pub epsilon_used: f64,
    /// Greedy picks, bisection probes, or cardinality levels searched.
    pub iterations: usize,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball_index: Option<usize>,
}

impl RunReport {
    fn new(set: &ActuatorSet, residual_sq: f64, epsilon_used: f64, iterations: usize, start: Instant) -> Self {
        Self {
            actuators: set.indices().to_vec(),
            cardinality: set.len(),
            residual_sq,
            epsilon_used,
            iterations,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            ball_index: None,
        }
    }

    fn print(&self) {
        print!("{}", to_sorted_json(self));
    }
}

fn load_system(path: &Path) -> Result<LtiSystem, CliError> {
    read_json::<SystemFile>(path)?.to_system()
}

/// The target of `x0 -> x1` as seen at the output: `W (x1 - exp(A T) x0)`.
fn target(sys: &LtiSystem, t: &TransferInput) -> Result<Vector, CliError> {
    let x1 = parse_vector(&t.x1)?;
    let x0 = match &t.x0 {
        Some(s) => parse_vector(s)?,
        None => Vector::zeros(x1.dim()),
    };
    if x1.dim() != sys.n() {
        return Err(CliError::Input(format!(
            "final state has length {}, system has {} states",
            x1.dim(),
            sys.n()
        )));
    }
    let spec = TransferSpec::new(x0, x1.clone(), t.t0, t.t1)?;
    let mut v = transfer_vector(sys, &spec)?;
    // x1 and exp(A T) x0 that agree to rounding error mean a zero target.
    let free = x1.sub(&v)?;
    if v.norm() <= CANCEL_TOL * (x1.norm() + free.norm()) {
        v = Vector::zeros(v.dim());
    }
    Ok(match sys.w() {
        Some(w) => w.mul_vec(&v)?,
        None => v,
    })
}

fn write_trace(path: &Path, trace: &GreedyTrace) -> Result<(), CliError> {
    let mut csv = String::from("iteration,chosen_index,residual_sq\n");
    for (k, r) in trace.residuals.iter().enumerate() {
        let chosen = if k == 0 {
            String::new()
        } else {
            trace.chosen[k - 1].to_string()
        };
        writeln!(csv, "{k},{chosen},{r}").expect("write to string");
    }
    fs::write(path, csv)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn reach(
    system: &Path,
    transfer: &TransferInput,
    mode: ReachMode,
    trace_path: Option<&Path>,
) -> Result<(), CliError> {
    let start = Instant::now();
    let sys = load_system(system)?;
    let v = target(&sys, transfer)?;
    let model = ReachModel::new(&sys);
    let (set, trace, eps_used, iterations) = match mode {
        ReachMode::Eps(eps) => {
            let (set, trace) = greedy_eps(&model, &v, eps)?;
            let picks = trace.chosen.len();
            (set, trace, eps, picks)
        }
        ReachMode::Exact { accuracy } => {
            let out = bisection_exact(&model, &v, accuracy)?;
            (out.actuators, out.trace, out.final_eps, out.probes.len())
        }
    };
    if let Some(p) = trace_path {
        write_trace(p, &trace)?;
    }
    RunReport::new(&set, trace.final_residual(), eps_used, iterations, start).print();
    Ok(())
}

pub fn subset_reach(system: &Path, balls: &Path, trace_path: Option<&Path>) -> Result<(), CliError> {
    let start = Instant::now();
    let sys = load_system(system)?;
    let specs: Vec<BallFile> = read_json(balls)?;
    if specs.is_empty() {
        return Err(CliError::Input("balls file must list at least one ball".into()));
    }
    let balls = specs
        .iter()
        .map(BallFile::to_ball)
        .collect::<Result<Vec<_>, _>>()?;
    let model = ReachModel::new(&sys);
    let out = select_subset(&model, &balls)?;
    if let Some(p) = trace_path {
        write_trace(p, &out.trace)?;
    }
    let eps = balls[out.ball_index - 1].radius_sq();
    let mut report = RunReport::new(
        &out.actuators,
        out.trace.final_residual(),
        eps,
        out.trace.chosen.len(),
        start,
    );
    report.ball_index = Some(out.ball_index);
    report.print();
    Ok(())
}

pub fn oracle(system: &Path, transfer: &TransferInput, eps: f64, kmax: usize) -> Result<(), CliError> {
    let start = Instant::now();
    let sys = load_system(system)?;
    if sys.n() > N_BRUTE {
        return Err(CliError::Input(format!(
            "oracle supports at most {N_BRUTE} states, system has {}",
            sys.n()
        )));
    }
    let v = target(&sys, transfer)?;
    let model = ReachModel::new(&sys);
    match brute_force_opt(&model, &v, eps, kmax)? {
        Some(set) => {
            let r = model.residual(&set, &v)?;
            RunReport::new(&set, r, eps, set.len() + 1, start).print();
            Ok(())
        }
        None => {
            println!("infeasible within k_max={kmax}");
            Err(CliError::OracleNone(format!(
                "no actuator set of size at most {kmax} reaches the target"
            )))
        }
    }
}

pub fn gen_star(n: usize, out: &Path) -> Result<(), CliError> {
    write_json(out, &SystemFile::from_system(&star(n)?, None))
}

pub fn gen_er(n: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let sys = erdos_renyi(n, RngSeed(seed))?;
    write_json(out, &SystemFile::from_system(&sys, Some(seed)))
}

fn load_instance(path: &Path) -> Result<minreach::HittingSetInstance, CliError> {
    read_json::<InstanceFile>(path)?.to_instance()
}

fn default_target_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into());
    out.with_file_name(format!("{stem}.target.json"))
}

pub fn reduce(
    instance: &Path,
    variant: &str,
    out: &Path,
    target_out: Option<&Path>,
) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let variant: Variant = variant.parse()?;
    let (sys, target) = match variant {
        Variant::Lemma1 => {
            let (sys, chi) = build_lemma1(&inst)?;
            (sys, TargetFile::Point { chi: chi.into_vec() })
        }
        Variant::Lemma2 => {
            let (sys, chi) = build_lemma2(&inst)?;
            (sys, TargetFile::Point { chi: chi.into_vec() })
        }
        Variant::Lemma3 => {
            let (sys, cone) = build_lemma3(&inst)?;
            (sys, TargetFile::Cone { m: cone.m, p: cone.p })
        }
    };
    write_json(out, &SystemFile::from_system(&sys, None))?;
    let target_path = target_out.map_or_else(|| default_target_path(out), Path::to_path_buf);
    write_json(&target_path, &target)
}

pub fn verify(instance: &Path, variant: &str, kmax: Option<usize>) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let variant: Variant = variant.parse()?;
    let n = inst.m() + inst.p() + 2;
    let report = verify_reduction(&inst, variant, kmax.unwrap_or(n))?;
    println!("{report}");
    if report.pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "{variant} equivalence failed on this instance"
        )))
    }
}
