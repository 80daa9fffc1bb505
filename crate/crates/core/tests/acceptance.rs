//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entangle::channels::{
    monotonicity_audit, random_instrument, truncation_scan, KrausChannel, MeasureMode, Side, Verdict,
    CERTIFICATE_TOL,
};
use entangle::linalg::{self, c, random_amplitudes, CMat, CVec};
use entangle::measures::{self, concurrence_minors, concurrence_purity, concurrence_schmidt, f_purity, tangle_pure};
use entangle::oracles::{
    random_density, random_product, random_separable_mixture, two_mode_squeezed_limit, werner,
    wootters_concurrence, StateFamily,
};
use entangle::phc::{phc_measure, phc_separability_check};
use entangle::roof::{roof_minimize, RoofConfig};
use entangle::states::{schmidt, DensityMatrix, PureState, DEFAULT_RANK_CUTOFF};

// Tolerances.
const FORMULA_TOL: f64 = 1e-9;
const TANGLE_TOL: f64 = 1e-12;
const PHC_TOL: f64 = 1e-9;
const ROOF_ABOVE: f64 = 5e-3;
const ROOF_BELOW: f64 = 1e-9;
const LIMIT_TOL: f64 = 1e-6;
const MARGIN_TOL: f64 = 1e-9;
const CONCAVITY_TOL: f64 = 1e-12;
const CONVEXITY_TOL: f64 = 1e-9;
const SEPARABLE_ROOF_TOL: f64 = 1e-6;
const PURE_SEPARABLE_TOL: f64 = 1e-9;

// Seeds.
const CORPUS_SEED: u64 = 2024;
const ROOF_SEED: u64 = 7;
const AUDIT_SEED: u64 = 1_000;
const CONVEX_SEED: u64 = 3_000;
const SEPARABLE_SEED: u64 = 4_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, name: &str, budget: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "criterion {n} [{name}]: {} — {} ({:.2}s, budget {}s{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    pass
}

fn corpus() -> Vec<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..500)
        .map(|_| {
            let a = rng.random_range(2..=8);
            let b = rng.random_range(2..=8);
            PureState::new(random_amplitudes(&mut rng, a, b)).unwrap()
        })
        .collect()
}

fn criterion_1(states: &[PureState]) -> Outcome {
    let (mut worst_c, mut worst_t) = (0.0f64, 0.0f64);
    for psi in states {
        let cp = concurrence_purity(psi);
        let cm = concurrence_minors(psi).unwrap();
        let cs = concurrence_schmidt(&schmidt(psi, DEFAULT_RANK_CUTOFF));
        worst_c = worst_c.max((cp - cm).abs()).max((cp - cs).abs()).max((cm - cs).abs());
        let t = tangle_pure(psi);
        worst_t = worst_t.max((t - cp * cp).abs()).max((t - cm * cm).abs()).max((t - cs * cs).abs());
    }
    Outcome {
        pass: worst_c <= FORMULA_TOL && worst_t <= TANGLE_TOL,
        detail: format!("{} states, max formula gap {worst_c:.2e}, max |τ − C²| {worst_t:.2e}", states.len()),
    }
}

fn criterion_2(states: &[PureState]) -> Outcome {
    let worst = states
        .iter()
        .map(|psi| (phc_measure(psi).unwrap() - concurrence_purity(psi)).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: worst <= PHC_TOL,
        detail: format!("{} states, max |E_PHC − C| {worst:.2e}", states.len()),
    }
}

fn bell_basis() -> Vec<PureState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0]]
        .iter()
        .map(|v| PureState::from_vector(&CVec::from_iterator(4, v.iter().map(|&x| c(x, 0.0))), 2, 2).unwrap())
        .collect()
}

fn roof_states() -> Vec<(String, DensityMatrix)> {
    let mut out: Vec<(String, DensityMatrix)> = [0.2, 0.4, 0.6, 0.8, 1.0]
        .iter()
        .map(|&p| (format!("werner p={p}"), werner(p)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ROOF_SEED);
    let bell = bell_basis();
    for k in 0..5 {
        let mut w: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
        w[0] += 1.0; // keep some of them entangled
        let total: f64 = w.iter().sum();
        let rho = bell
            .iter()
            .zip(&w)
            .fold(CMat::zeros(4, 4), |acc, (b, wk)| acc + b.projector().scale(wk / total));
        out.push((format!("bell-diagonal #{k}"), DensityMatrix::new(rho, Some((2, 2))).unwrap()));
    }
    for k in 0..10 {
        out.push((format!("rank-2 #{k}"), random_density(&mut rng, 2, 2, 2)));
    }
    out
}

struct RoofRun {
    values: Vec<f64>,
    worst_above: f64,
    worst_below: f64,
    checked: usize,
    violations: usize,
}

fn run_roof_suite() -> RoofRun {
    let cfg = RoofConfig::default().with_restarts(64).with_seed(ROOF_SEED);
    let mut run = RoofRun {
        values: Vec::new(),
        worst_above: 0.0,
        worst_below: 0.0,
        checked: 0,
        violations: 0,
    };
    for (_, rho) in roof_states() {
        let exact = wootters_concurrence(&rho).unwrap();
        let est = roof_minimize(&rho, &cfg).unwrap();
        run.worst_above = run.worst_above.max(est.value - exact);
        run.worst_below = run.worst_below.max(exact - est.value);
        run.checked += est.ensembles_checked;
        run.violations += est.bound_chain_violations;
        run.values.push(est.value);
    }
    run
}

fn criterion_3(run: &RoofRun) -> Outcome {
    Outcome {
        pass: run.worst_above <= ROOF_ABOVE && run.worst_below <= ROOF_BELOW,
        detail: format!(
            "{} states, max excess over Wootters {:.2e}, max deficit {:.2e}",
            run.values.len(),
            run.worst_above,
            run.worst_below
        ),
    }
}

fn criterion_4(run: &RoofRun) -> Outcome {
    Outcome {
        pass: run.violations == 0 && run.checked > 0,
        detail: format!("{} ensembles checked, {} chain violations", run.checked, run.violations),
    }
}

fn criterion_5() -> Outcome {
    let dims: Vec<usize> = (2..=64).collect();
    let mut worst_limit = 0.0f64;
    let mut worst_slack = f64::INFINITY;
    let mut all_hold = true;
    for r in [0.25, 0.5, 1.0] {
        let fam: StateFamily = format!("two_mode_squeezed:r={r}").parse().unwrap();
        let scan = truncation_scan(&fam, &dims).unwrap();
        all_hold &= scan.certificate_holds;
        for t in 0..scan.trace_gaps.len() {
            let slack = scan.certified_bounds[t] + CERTIFICATE_TOL - (scan.values[t + 1] - scan.values[t]).abs();
            worst_slack = worst_slack.min(slack);
        }
        let limit = two_mode_squeezed_limit(r);
        worst_limit = worst_limit.max((scan.values.last().unwrap() - limit).abs());
    }
    Outcome {
        pass: all_hold && worst_slack >= 0.0 && worst_limit <= LIMIT_TOL,
        detail: format!("min certificate slack {worst_slack:.2e}, max |C_64 − limit| {worst_limit:.2e}"),
    }
}

struct AuditRun {
    margins: Vec<f64>,
    violations: usize,
    unitary_worst: f64,
}

fn run_audit_suite() -> AuditRun {
    let cfg = RoofConfig::default();
    let mut run = AuditRun {
        margins: Vec::new(),
        violations: 0,
        unitary_worst: 0.0,
    };
    for t in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED + t);
        let k = rng.random_range(1..=4);
        let rho = random_density(&mut rng, 2, 2, k);
        let side = if rng.random_bool(0.5) { Side::A } else { Side::B };
        let branches = rng.random_range(2..=4);
        let per = rng.random_range(1..=2);
        let inst = random_instrument(&mut rng, side, (2, 2), branches, per).unwrap();
        let a = monotonicity_audit(&rho, &inst, MeasureMode::Wootters, &cfg).unwrap();
        if a.verdict == Verdict::Violation || a.margin < -MARGIN_TOL {
            run.violations += 1;
        }
        run.margins.push(a.margin);
    }
    for t in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED + 500 + t);
        let k = rng.random_range(1..=4);
        let rho = random_density(&mut rng, 2, 2, k);
        let ch = KrausChannel::local_unitary(linalg::random_unitary(&mut rng, 2), linalg::random_unitary(&mut rng, 2))
            .unwrap();
        let a = monotonicity_audit(&rho, &[ch], MeasureMode::Wootters, &cfg).unwrap();
        run.unitary_worst = run.unitary_worst.max(a.margin.abs());
        run.margins.push(a.margin);
    }
    run
}

fn criterion_6(run: &AuditRun) -> Outcome {
    let min = run.margins[..200].iter().copied().fold(f64::INFINITY, f64::min);
    Outcome {
        pass: run.violations == 0 && run.unitary_worst <= MARGIN_TOL,
        detail: format!(
            "200 instrument audits: {} violations, min margin {min:.2e}; 50 unitary audits: max |margin| {:.2e}",
            run.violations, run.unitary_worst
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CONVEX_SEED);
    let (mut worst_f, mut worst_tr) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..500 {
        let d = rng.random_range(2..=6);
        let (k1, k2) = (rng.random_range(1..=d), rng.random_range(1..=d));
        let r1 = random_density(&mut rng, d, 1, k1);
        let r2 = random_density(&mut rng, d, 1, k2);
        let lam: f64 = rng.random_range(0.0..=1.0);
        let mix = r1.mix(&r2, lam).unwrap();
        worst_f = worst_f.min(f_purity(&mix) - lam * f_purity(&r1) - (1.0 - lam) * f_purity(&r2));
        let cross = linalg::trace(&(r1.entries() * r2.entries())).re;
        worst_tr = worst_tr.min(r1.purity() + r2.purity() - 2.0 * cross);
    }
    let mut worst_w = f64::INFINITY;
    for _ in 0..100 {
        let (k1, k2) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let r1 = random_density(&mut rng, 2, 2, k1);
        let r2 = random_density(&mut rng, 2, 2, k2);
        let lam: f64 = rng.random_range(0.0..=1.0);
        let mix = r1.mix(&r2, lam).unwrap();
        let rhs = lam * wootters_concurrence(&r1).unwrap() + (1.0 - lam) * wootters_concurrence(&r2).unwrap();
        worst_w = worst_w.min(rhs - wootters_concurrence(&mix).unwrap());
    }
    Outcome {
        pass: worst_f >= -CONCAVITY_TOL && worst_tr >= -CONCAVITY_TOL && worst_w >= -CONVEXITY_TOL,
        detail: format!(
            "min concavity slack {worst_f:.2e}, min purity-cross slack {worst_tr:.2e}, min Wootters convexity slack {worst_w:.2e}"
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEPARABLE_SEED);
    let shapes = [(2, 2), (2, 3), (3, 2), (3, 3), (2, 4)];
    let cfg = RoofConfig::default().with_restarts(16).with_seed(SEPARABLE_SEED);
    let mut worst_roof = 0.0f64;
    for n in 0..50 {
        let (a, b) = shapes[n % shapes.len()];
        let k = rng.random_range(1..=(a * b).min(6));
        let rho = random_separable_mixture(&mut rng, a, b, k);
        worst_roof = worst_roof.max(roof_minimize(&rho, &cfg).unwrap().value);
    }
    let mut worst_pure = 0.0f64;
    let mut all_flagged = true;
    for _ in 0..50 {
        let (a, b) = (rng.random_range(2..=8), rng.random_range(2..=8));
        let psi = random_product(&mut rng, a, b);
        let r = measures::PureMeasureReport::compute(&psi).unwrap();
        for v in [r.c_purity, r.c_minors, r.c_schmidt, r.tangle, phc_measure(&psi).unwrap()] {
            worst_pure = worst_pure.max(v);
        }
        all_flagged &= phc_separability_check(&psi, PURE_SEPARABLE_TOL).unwrap();
    }
    Outcome {
        pass: worst_roof <= SEPARABLE_ROOF_TOL && worst_pure <= PURE_SEPARABLE_TOL && all_flagged,
        detail: format!("50 separable mixtures: max roof {worst_roof:.2e}; 50 product states: max measure {worst_pure:.2e}"),
    }
}

fn criterion_9(first_roof: &RoofRun, first_audit: &AuditRun) -> Outcome {
    let roof = run_roof_suite();
    let audit = run_audit_suite();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let same_roof = bits(&roof.values) == bits(&first_roof.values) && roof.checked == first_roof.checked;
    let same_audit = bits(&audit.margins) == bits(&first_audit.margins) && audit.violations == first_audit.violations;
    Outcome {
        pass: same_roof && same_audit,
        detail: format!("roof summary identical: {same_roof}, audit summary identical: {same_audit}"),
    }
}

fn main() {
    let states = corpus();
    let secs = Duration::from_secs;
    let mut results = Vec::new();
    results.push(report(1, "formula coincidence", secs(30), || criterion_1(&states)));
    results.push(report(2, "PHC equals concurrence", secs(60), || criterion_2(&states)));

    let mut roof = None;
    results.push(report(3, "Wootters-oracle roof", secs(300), || {
        let run = run_roof_suite();
        let out = criterion_3(&run);
        roof = Some(run);
        out
    }));
    let roof = roof.expect("criterion 3 ran");
    results.push(report(4, "bound chain", secs(300), || criterion_4(&roof)));
    results.push(report(5, "truncation continuity", secs(60), criterion_5));

    let mut audit = None;
    results.push(report(6, "LOCC monotonicity", secs(120), || {
        let run = run_audit_suite();
        let out = criterion_6(&run);
        audit = Some(run);
        out
    }));
    let audit = audit.expect("criterion 6 ran");
    results.push(report(7, "concavity and convexity", secs(30), criterion_7));
    results.push(report(8, "separability direction", secs(120), criterion_8));
    results.push(report(9, "determinism", secs(600), || criterion_9(&roof, &audit)));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
