use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use qot_core::coupling::{Convention, CouplingSet};
use qot_core::entanglement::{self, CriterionKind, CriterionReport, Direction};
use qot_core::metrology::{self, MonotoneFunction};
use qot_core::random::{random_density, random_hermitian, random_ppt_state, random_pure, rng_from_seed};
use qot_core::wasserstein::{self, sweep, CostSpec, TransportResult};
use qot_core::HermitianOperator;

use crate::io::{self, round12, sci10, CliError, CliResult, OperatorFile};

fn num(x: f64) -> Value {
    json!(round12(x))
}

pub struct DistanceArgs<'a> {
    pub rho: &'a Path,
    pub sigma: &'a Path,
    pub observables: &'a [PathBuf],
    pub set: &'a str,
    pub convention: &'a str,
    pub maximize: bool,
    pub tilde: bool,
    pub coupling_out: Option<&'a Path>,
}

fn read_observables(paths: &[PathBuf]) -> CliResult<Vec<HermitianOperator>> {
    paths.iter().map(|p| io::read_observable(p)).collect()
}

fn input<T>(r: qot_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Input(e.to_string()))
}

pub fn distance(args: DistanceArgs<'_>) -> CliResult<Value> {
    let rho = io::read_state(args.rho)?;
    let sigma = io::read_state(args.sigma)?;
    let set = input(CouplingSet::parse(args.set))?;
    let convention = input(Convention::parse(args.convention))?;
    if args.observables.is_empty() {
        return Err(CliError::Input("at least one --obs file is required".into()));
    }
    let spec = input(CostSpec::new(read_observables(args.observables)?, convention))?;
    let run = match (args.maximize, args.tilde) {
        (false, false) => wasserstein::distance_squared,
        (true, false) => wasserstein::wasserstein_variance,
        (false, true) => wasserstein::tilde_distance_squared,
        (true, true) => wasserstein::tilde_variance,
    };
    let result = run(&rho, &sigma, &spec, set)?;
    if let (Some(path), Some(c)) = (args.coupling_out, &result.coupling) {
        write_json(path, &serde_json::to_value(OperatorFile::from_matrix(c.matrix(), c.dims())).expect("serializable"))?;
    }
    Ok(result_json(&result, args.tilde))
}

fn result_json(r: &TransportResult, tilde: bool) -> Value {
    let diag = r.diagnostics.as_ref();
    json!({
        "value": num(r.value),
        "set": r.set.name(),
        "convention": r.convention.name(),
        "sense": match r.sense { qot_core::sdp::Sense::Minimize => "min", qot_core::sdp::Sense::Maximize => "max" },
        "tilde": tilde,
        "exactness": r.exactness.name(),
        "exactness_note": r.exactness_note,
        "status": diag.map_or("closed-form".to_string(), |d| format!("{:?}", d.status).to_lowercase()),
        "gap": num(r.gap()),
        "iterations": r.iterations(),
        "marginal_residual": num(diag.map_or(0.0, |d| d.marginal_residual)),
        "notes": r.notes,
        "coupling": r.coupling.as_ref().map(|c| OperatorFile::from_matrix(c.matrix(), c.dims())),
    })
}

pub fn fig2(points: usize, out: &Path, jobs: usize) -> CliResult<Value> {
    if points < 8 {
        return Err(CliError::Input(format!("--points must be at least 8, got {points}")));
    }
    let records = sweep::run(points, jobs)?;
    let phi0 = sweep::locate_phi0(&records, sweep::COINCIDENCE_THRESHOLD, 1e-7)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut csv = String::from("phi,d2_general,d2_ppt\n");
    for r in &records {
        writeln!(csv, "{},{},{}", sci10(r.phi), sci10(r.d2_general), sci10(r.d2_ppt)).expect("string write");
    }
    writeln!(csv, "phi0,{},{}", sci10(phi0), sci10(phi0 / std::f64::consts::PI)).expect("string write");
    fs::write(out, csv).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    Ok(json!({
        "points": points,
        "out": out.display().to_string(),
        "phi0": num(phi0),
        "phi0_over_pi": num(phi0 / std::f64::consts::PI),
    }))
}

pub fn table1(rho: &Path, obs: &Path) -> CliResult<Value> {
    let rho = io::read_state(rho)?;
    let h = io::read_observable(obs)?;
    let rows = wasserstein::self_distance_table(&rho, &h)?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "value": num(r.value),
                "closed_form": num(r.closed_form),
                "identity": r.identity,
                "exact": r.exact,
            })
        })
        .collect();
    Ok(json!({ "dim": rho.dim(), "rows": rows }))
}

fn report_json(r: &CriterionReport) -> Value {
    json!({
        "id": r.id,
        "lhs": num(r.lhs),
        "bound": num(r.bound),
        "direction": match r.direction {
            Direction::BelowIsEntangled => "below-is-entangled",
            Direction::AboveIsEntangled => "above-is-entangled",
        },
        "verdict": r.verdict.name(),
        "margin": num(r.margin),
        "tol": r.tol,
        "note": r.note,
    })
}

pub fn check(coupling: &Path, criteria: &str) -> CliResult<Value> {
    let state = io::read_coupling(coupling)?;
    let d = (state.dim() as f64).sqrt().round() as usize;
    let reports = if criteria.trim().eq_ignore_ascii_case("all") {
        entanglement::evaluate_all(&state)?
    } else {
        let mut out = Vec::new();
        for name in criteria.split(',') {
            let kind = input(CriterionKind::parse(name))?;
            if !kind.applies_to(d) {
                return Err(CliError::Input(format!("criterion `{}` does not apply to d = {d}", name.trim())));
            }
            out.extend(entanglement::evaluate(&state, kind)?);
        }
        out
    };
    Ok(Value::Array(reports.iter().map(report_json).collect()))
}

pub fn qfi(rho: &Path, obs: &Path) -> CliResult<Value> {
    let rho = io::read_state(rho)?;
    let h = io::read_observable(obs)?;
    let wy = MonotoneFunction::f_wy();
    Ok(json!({
        "expectation": num(metrology::expectation(&rho, &h)?),
        "variance": num(metrology::variance(&rho, &h)?),
        "qfi": num(metrology::qfi(&rho, &h)?),
        "skew_information": num(metrology::skew_information(&rho, &h)?),
        "wy_qfi": num(metrology::gen_qfi(&rho, &h, &wy)?),
    }))
}

pub fn random(kind: &str, dim: usize, seed: u64) -> CliResult<Value> {
    if dim < 2 {
        return Err(CliError::Input(format!("--dim must be at least 2, got {dim}")));
    }
    let mut rng = rng_from_seed(seed);
    let (m, dims) = match kind {
        "state" => (random_density(&mut rng, dim).matrix().clone(), vec![dim]),
        "pure" => (random_pure(&mut rng, dim).matrix().clone(), vec![dim]),
        "hermitian" => (random_hermitian(&mut rng, dim).matrix().clone(), vec![dim]),
        "ppt" => (random_ppt_state(&mut rng, dim, dim).matrix().clone(), vec![dim, dim]),
        other => return Err(CliError::Input(format!("unknown --kind `{other}`"))),
    };
    Ok(serde_json::to_value(OperatorFile::from_matrix(&m, &dims)).expect("serializable"))
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
