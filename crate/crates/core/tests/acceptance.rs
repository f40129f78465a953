//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use qot_core::coupling::{Convention, CouplingSet};
use qot_core::entanglement::{self, Verdict};
use qot_core::metrology::{self, MonotoneFunction};
use qot_core::qstates::{angular_momentum, maximally_entangled, pauli, Axis};
use qot_core::random::{
    random_density, random_hermitian, random_ppt_state, random_pure, random_state_vector, rng_from_seed, seed_from_env,
    QotRng,
};
use qot_core::sdp::SdpStatus;
use qot_core::transport::{build_channel, support_projector, Ensemble};
use qot_core::wasserstein::{
    self, distance_squared, generalized_distance_squared, product_closed_form, sweep, wasserstein_variance, CostSpec,
    GeneralizedMode, TransportResult,
};
use qot_core::{DensityMatrix, HermitianOperator, Result, C64};

/// Solver outcomes gathered across criteria 1–11.
#[derive(Default)]
struct Certification {
    solves: usize,
    worst_gap: f64,
    worst_residual: f64,
    failures: Vec<String>,
}

impl Certification {
    fn record(&mut self, r: &TransportResult) -> f64 {
        if let Some(d) = &r.diagnostics {
            self.solves += 1;
            self.worst_gap = self.worst_gap.max(d.gap);
            self.worst_residual = self.worst_residual.max(d.marginal_residual);
            if d.status != SdpStatus::Optimal {
                self.failures.push(format!("{} solve ended {:?}", r.set, d.status));
            }
        }
        r.value
    }

    fn record_sweep(&mut self, rec: &sweep::SweepRecord) {
        self.solves += 2;
        self.worst_gap = self.worst_gap.max(rec.solver_gap);
        self.worst_residual = self.worst_residual.max(rec.marginal_residual);
        for s in [rec.status_general, rec.status_ppt] {
            if s != SdpStatus::Optimal {
                self.failures.push(format!("sweep point {:.4} ended {s:?}", rec.phi));
            }
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(offset: u64) -> QotRng {
    rng_from_seed(seed_from_env().wrapping_add(offset))
}

fn d2(cert: &mut Certification, rho: &DensityMatrix, sigma: &DensityMatrix, spec: &CostSpec, set: CouplingSet) -> Result<f64> {
    Ok(cert.record(&distance_squared(rho, sigma, spec, set)?))
}

fn var(cert: &mut Certification, rho: &DensityMatrix, sigma: &DensityMatrix, spec: &CostSpec, set: CouplingSet) -> Result<f64> {
    Ok(cert.record(&wasserstein_variance(rho, sigma, spec, set)?))
}

fn criterion1(cert: &mut Certification) -> Result<Outcome> {
    let rho = sweep::base_state();
    let spec = CostSpec::single(pauli(Axis::Z), Convention::Dpt);
    let t = Instant::now();
    let g = d2(cert, &rho, &rho, &spec, CouplingSet::General)?;
    let tg = t.elapsed();
    let t = Instant::now();
    let p = d2(cert, &rho, &rho, &spec, CouplingSet::Ppt)?;
    let tp = t.elapsed();
    let eg = (g - (1.0 - 3f64.sqrt() / 2.0)).abs();
    let ep = (p - 0.25).abs();
    let pass = eg <= 1e-5 && ep <= 1e-5 && tg < Duration::from_secs(1) && tp < Duration::from_secs(1);
    Ok(outcome(
        pass,
        format!("general {g:.8} (err {eg:.1e}, {tg:.2?}), ppt {p:.8} (err {ep:.1e}, {tp:.2?})"),
    ))
}

fn criterion2(cert: &mut Certification) -> Result<Outcome> {
    let t = Instant::now();
    let records = sweep::run(64, 0)?;
    let phi0 = sweep::locate_phi0(&records, sweep::COINCIDENCE_THRESHOLD, 1e-7)?;
    let elapsed = t.elapsed();
    records.iter().for_each(|r| cert.record_sweep(r));
    let monotone = records.windows(2).all(|w| w[1].gap() <= w[0].gap() + 1e-8);
    let ordered = records.iter().all(|r| r.d2_general <= r.d2_ppt + 1e-6);
    let ratio = phi0 / PI;
    let pass = monotone && ordered && (0.2936..=0.2956).contains(&ratio) && elapsed < Duration::from_secs(30);
    Ok(outcome(
        pass,
        format!("phi0 = {ratio:.5} pi, monotone gap {monotone}, general <= ppt {ordered}, {elapsed:.2?}"),
    ))
}

fn criterion3(cert: &mut Certification) -> Result<Outcome> {
    let mut r = rng(3);
    let (mut worst_skew, mut worst_qfi) = (0.0f64, 0.0f64);
    for _ in 0..25 {
        let rho = random_density(&mut r, 2);
        let h = random_hermitian(&mut r, 2);
        let g = d2(cert, &rho, &rho, &CostSpec::single(h.clone(), Convention::Dpt), CouplingSet::General)?;
        let p = d2(cert, &rho, &rho, &CostSpec::single(h.clone(), Convention::Gmpc), CouplingSet::Ppt)?;
        worst_skew = worst_skew.max((g - metrology::skew_information(&rho, &h)?).abs());
        worst_qfi = worst_qfi.max((p - metrology::qfi(&rho, &h)? / 4.0).abs());
    }
    Ok(outcome(
        worst_skew <= 1e-6 && worst_qfi <= 1e-6,
        format!("max |D2_general - I| = {worst_skew:.1e}, max |D2_ppt - F_Q/4| = {worst_qfi:.1e}"),
    ))
}

/// Random qubit pairs with one or two observables, shared by criteria 4 and 5.
fn convention_instances() -> Vec<(DensityMatrix, DensityMatrix, Vec<HermitianOperator>)> {
    let mut r = rng(4);
    (0..25)
        .map(|k| {
            let rho = random_density(&mut r, 2);
            let sigma = random_density(&mut r, 2);
            let obs = (0..1 + k % 2).map(|_| random_hermitian(&mut r, 2)).collect();
            (rho, sigma, obs)
        })
        .collect()
}

fn criterion4(cert: &mut Certification) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (rho, sigma, obs) in convention_instances() {
        let dpt = d2(cert, &rho, &sigma, &CostSpec::new(obs.clone(), Convention::Dpt)?, CouplingSet::Ppt)?;
        let gmpc = d2(cert, &rho, &sigma, &CostSpec::new(obs, Convention::Gmpc)?, CouplingSet::Ppt)?;
        worst = worst.max((dpt - gmpc).abs());
    }
    Ok(outcome(worst <= 1e-6, format!("max |D2_dpt,ppt - D2_gmpc,ppt| = {worst:.1e}")))
}

fn criterion5(cert: &mut Certification) -> Result<Outcome> {
    let m = DensityMatrix::maximally_mixed(2)?;
    let sz = CostSpec::single(pauli(Axis::Z), Convention::Gmpc);
    let v_ppt = var(cert, &m, &m, &sz, CouplingSet::Ppt)?;
    let v_sym = var(cert, &m, &m, &sz, CouplingSet::SymmetricPpt)?;
    let mut worst = f64::INFINITY;
    for (rho, sigma, obs) in convention_instances() {
        for conv in [Convention::Dpt, Convention::Gmpc] {
            let spec = CostSpec::new(obs.clone(), conv)?;
            for set in [CouplingSet::General, CouplingSet::Ppt] {
                let v = var(cert, &rho, &sigma, &spec, set)?;
                let d = d2(cert, &rho, &sigma, &spec, set)?;
                worst = worst.min(v - d);
            }
        }
    }
    let pass = (v_ppt - 2.0).abs() <= 1e-6 && (v_sym - 1.0).abs() <= 1e-6 && worst >= -1e-7;
    Ok(outcome(
        pass,
        format!("V_ppt = {v_ppt:.8}, V_symmetric = {v_sym:.8}, min (V - D2) = {worst:.3e}"),
    ))
}

fn criterion6(cert: &mut Certification) -> Result<Outcome> {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    let sets = [
        CouplingSet::General,
        CouplingSet::Ppt,
        CouplingSet::PptExtension(2),
        CouplingSet::ClassicalQuantum,
        CouplingSet::QuantumClassical,
    ];
    let mut solves = 0;
    for k in 0..20 {
        let d = 2 + k % 2;
        let psi = random_pure(&mut r, d);
        let sigma = random_density(&mut r, d);
        let h = random_hermitian(&mut r, d);
        let expected = product_closed_form(&psi, &sigma, &CostSpec::single(h.clone(), Convention::Dpt))?;
        for conv in [Convention::Dpt, Convention::Gmpc] {
            let spec = CostSpec::single(h.clone(), conv);
            for set in sets {
                let a = d2(cert, &psi, &sigma, &spec, set)?;
                let b = var(cert, &psi, &sigma, &spec, set)?;
                worst = worst.max((a - expected).abs()).max((b - expected).abs());
                solves += 2;
            }
        }
    }
    Ok(outcome(worst <= 1e-6, format!("{solves} optimizations, max deviation {worst:.1e}")))
}

fn criterion7() -> Result<Outcome> {
    let mut r = rng(7);
    let (mut worst_tp, mut worst_map) = (0.0f64, 0.0f64);
    for k in 0..10 {
        let d = 2 + k % 2;
        let n = d + k % 3;
        let weights: Vec<f64> = random_state_vector(&mut r, n).iter().map(|z| z.norm_sqr()).collect();
        let sources: Vec<Vec<C64>> = (0..n).map(|_| random_state_vector(&mut r, d)).collect();
        let targets: Vec<Vec<C64>> = (0..n).map(|_| random_state_vector(&mut r, d)).collect();
        let e = Ensemble::new(weights, sources, targets)?;
        let rho = DensityMatrix::from_matrix(e.source_state())?;
        let channel = build_channel(&e, &rho)?;
        worst_tp = worst_tp.max(channel.completeness().max_abs_diff(&support_projector(&rho)?));
        worst_map = worst_map.max(channel.apply(rho.matrix())?.frobenius_distance(&e.target_state()));
    }
    Ok(outcome(
        worst_tp <= 1e-8 && worst_map <= 1e-7,
        format!("max |sum B^dag B - P| = {worst_tp:.1e}, max |Phi(rho) - sigma|_F = {worst_map:.1e}"),
    ))
}

fn criterion8() -> Result<Outcome> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);
    let singlet = DensityMatrix::pure_with_dims(&[zero, C64::new(h, 0.0), C64::new(-h, 0.0), zero], vec![2, 2])?;
    let (m, reports) = entanglement::pauli_xy_bounds(&singlet)?;
    let singlet_ok = (m - 8.0).abs() <= 1e-10 && reports[0].verdict == Verdict::Violated;
    let mut me_lhs = Vec::new();
    for d in [2, 3] {
        let r = entanglement::su_criterion(&maximally_entangled(d)?)?;
        me_lhs.push((r.lhs, r.verdict));
    }
    let me_ok = me_lhs.iter().all(|&(l, v)| l.abs() <= 1e-10 && v == Verdict::Violated);
    let mut r = rng(8);
    let mut violations = 0;
    for _ in 0..50 {
        let s = random_ppt_state(&mut r, 2, 2);
        violations += entanglement::evaluate_all(&s)?
            .iter()
            .filter(|rep| rep.verdict == Verdict::Violated)
            .count();
    }
    Ok(outcome(
        singlet_ok && me_ok && violations == 0,
        format!(
            "singlet second moment {m:.6}, su lhs for maximally entangled d=2,3: {:.1e}, {:.1e}; PPT violations {violations}",
            me_lhs[0].0, me_lhs[1].0
        ),
    ))
}

fn criterion9(cert: &mut Certification) -> Result<Outcome> {
    let fmax = MonotoneFunction::f_max();
    let fwy = MonotoneFunction::f_wy();
    let mut r = rng(9);
    let mut worst_conv = 0.0f64;
    for d in [2, 3] {
        for _ in 0..25 {
            let rho = random_density(&mut r, d);
            let h = random_hermitian(&mut r, d);
            for (f1, f2) in [(&fmax, &fwy), (&fwy, &fmax)] {
                let q = metrology::conversion_matrix(&rho, f1, f2)?;
                let converted = metrology::apply_kernel(&rho, &q, &h)?;
                let lhs = metrology::gen_qfi(&rho, &h, f1)?;
                let rhs = metrology::gen_qfi(&rho, &converted, f2)?;
                worst_conv = worst_conv.max((lhs - rhs).abs());
            }
        }
    }
    let mut worst_self = 0.0f64;
    for _ in 0..25 {
        let rho = random_density(&mut r, 2);
        let h = random_hermitian(&mut r, 2);
        for f in [&fmax, &fwy] {
            let target = metrology::gen_qfi(&rho, &h, f)? / 4.0;
            for mode in [GeneralizedMode::SepYf, GeneralizedMode::GeneralZf] {
                let v = cert.record(&generalized_distance_squared(&rho, &rho, &h, f, mode)?);
                worst_self = worst_self.max((v - target).abs());
            }
        }
    }
    Ok(outcome(
        worst_conv <= 1e-8 && worst_self <= 1e-6,
        format!("max conversion error {worst_conv:.1e}, max |D_f^2 - F_f/4| = {worst_self:.1e}"),
    ))
}

fn criterion10(cert: &mut Certification) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for h in [pauli(Axis::Z), angular_momentum(1.0)?.2] {
        let (value, psi) = wasserstein::maximal_self_distance(&h)?;
        for conv in [Convention::Dpt, Convention::Gmpc] {
            let spec = CostSpec::single(h.clone(), conv);
            for set in [CouplingSet::General, CouplingSet::Ppt] {
                worst = worst.max((d2(cert, &psi, &psi, &spec, set)? - value).abs());
            }
        }
        let spread = h.eigen()?;
        worst = worst.max((value - 0.25 * (spread.max_eigenvalue() - spread.min_eigenvalue()).powi(2)).abs());
    }
    Ok(outcome(worst <= 1e-6, format!("max deviation from (hmax - hmin)^2/4: {worst:.1e}")))
}

fn criterion11(cert: &mut Certification) -> Result<Outcome> {
    let mut r = rng(11);
    let t = Instant::now();
    let (mut worst2, mut worst3) = (f64::INFINITY, f64::INFINITY);
    for k in 0..10 {
        let rho = random_density(&mut r, 2);
        let sigma = random_density(&mut r, 2);
        let conv = if k % 2 == 0 { Convention::Dpt } else { Convention::Gmpc };
        let spec = CostSpec::single(random_hermitian(&mut r, 2), conv);
        let ppt = d2(cert, &rho, &sigma, &spec, CouplingSet::Ppt)?;
        let e2 = d2(cert, &rho, &sigma, &spec, CouplingSet::PptExtension(2))?;
        let e3 = d2(cert, &rho, &sigma, &spec, CouplingSet::PptExtension(3))?;
        worst2 = worst2.min(e2 - ppt);
        worst3 = worst3.min(e3 - e2);
    }
    let elapsed = t.elapsed();
    Ok(outcome(
        worst2 >= -1e-7 && worst3 >= -1e-7 && elapsed < Duration::from_secs(60),
        format!("min (ext2 - ppt) = {worst2:.2e}, min (ext3 - ext2) = {worst3:.2e}, {elapsed:.2?}"),
    ))
}

fn criterion12(cert: &Certification) -> Outcome {
    let pass = cert.failures.is_empty() && cert.worst_gap <= 1e-8 && cert.worst_residual <= 1e-7;
    let mut detail = format!(
        "{} solves, worst gap {:.1e}, worst marginal residual {:.1e}",
        cert.solves, cert.worst_gap, cert.worst_residual
    );
    if let Some(f) = cert.failures.first() {
        detail.push_str(&format!(", {} non-optimal (first: {f})", cert.failures.len()));
    }
    outcome(pass, detail)
}

fn report(id: usize, title: &str, result: Result<Outcome>, failed: &mut usize) {
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if !pass {
        *failed += 1;
    }
    println!("{} criterion {id:>2} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn main() {
    let mut cert = Certification::default();
    let mut failed = 0;
    report(1, "example anchors", criterion1(&mut cert), &mut failed);
    report(2, "rotation sweep", criterion2(&mut cert), &mut failed);
    report(3, "self-distance identities", criterion3(&mut cert), &mut failed);
    report(4, "convention equality", criterion4(&mut cert), &mut failed);
    report(5, "variance anchors", criterion5(&mut cert), &mut failed);
    report(6, "pure-state closed form", criterion6(&mut cert), &mut failed);
    report(7, "transport map", criterion7(), &mut failed);
    report(8, "entanglement thresholds", criterion8(), &mut failed);
    report(9, "generalized family", criterion9(&mut cert), &mut failed);
    report(10, "maximal self-distance", criterion10(&mut cert), &mut failed);
    report(11, "extension monotonicity", criterion11(&mut cert), &mut failed);
    report(12, "solver certification", Ok(criterion12(&cert)), &mut failed);
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
