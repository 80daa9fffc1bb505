//! `entangle` command-line front end.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use entangle::channels::{self, KrausChannel, MeasureMode, Side, Verdict};
use entangle::measures::{self, PureMeasureReport};
use entangle::oracles::{self, FamilyState, StateFamily};
use entangle::phc;
use entangle::roof::{self, Functional, RoofConfig};
use entangle::states::{schmidt, DEFAULT_RANK_CUTOFF};
use entangle::{io, Error, Result};

use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "entangle", version, about = "Concurrence, PHC and convex-roof estimates for bipartite states")]
struct Cli {
    /// Seed for every randomized step; generated and echoed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Separability / PHC-invariance tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Suppress the report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// State file (JSON).
    state: Option<PathBuf>,
    /// Generated state, `name:key=val,...`.
    #[arg(long, conflicts_with = "state")]
    family: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct RoofArgs {
    #[arg(long, default_value = "concurrence")]
    functional: String,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    ensemble_size: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// JSON file with a roof configuration block; flags override it.
    #[arg(long)]
    roof_config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Concurrence, tangle and PHC of a pure state, or roof upper bounds of a mixed one.
    Measure {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        roof: RoofArgs,
        /// Treat the input as a truncation of a larger state and report boundary weight.
        #[arg(long)]
        as_truncation: bool,
    },
    /// Schmidt decomposition of a pure state.
    Schmidt {
        #[command(flatten)]
        state: StateArgs,
    },
    /// PHC transform and measure.
    Phc {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Convex-roof estimate.
    Roof {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Concurrence across truncations of a pure family.
    Scan {
        #[arg(long)]
        family: String,
        /// Comma list (`2,4,8`) or inclusive range (`2..64`).
        #[arg(long)]
        dims: String,
        /// Write the scan table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// LOCC monotonicity audit under a one-sided instrument.
    Audit {
        #[command(flatten)]
        state: StateArgs,
        /// Instrument file (JSON). Without it a random instrument is drawn per trial.
        #[arg(long)]
        channel: Option<PathBuf>,
        /// pure_exact | wootters | roof
        #[arg(long, default_value = "wootters")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Side of the random instrument.
        #[arg(long, default_value = "B")]
        side: String,
        /// Branches of the random instrument.
        #[arg(long, default_value_t = 2)]
        branches: usize,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Write a generated state to a file.
    Family {
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Ctx {
    seed: u64,
    tol: f64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 3,
        Error::InvariantBreach { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (seed, generated) = match cli.seed {
        Some(s) => (s, false),
        None => {
            let nanos = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            (nanos, true)
        }
    };
    let ctx = Ctx { seed, tol: cli.tol };
    let mut rep = RunReport::new(command_name(&cli.command), seed);
    rep.input("tol", cli.tol);
    if generated {
        rep.warn(format!("no --seed given; using generated seed {seed}"));
    }
    let outcome = run(&cli.command, &ctx, &mut rep).and_then(|()| rep.check_finite());
    if let Err(e) = outcome {
        match &e {
            Error::InvariantBreach { invariant, .. } => {
                eprintln!("error: invariant breached: {invariant}\n  {e}")
            }
            _ => eprintln!("error: {e}"),
        }
        return ExitCode::from(exit_code(&e));
    }
    rep.wall_time_ms = started.elapsed().as_millis() as u64;
    let text = serde_json::to_string_pretty(&rep).expect("report serializes");
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    if !cli.quiet {
        println!("{text}");
    }
    ExitCode::SUCCESS
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Measure { .. } => "measure",
        Command::Schmidt { .. } => "schmidt",
        Command::Phc { .. } => "phc",
        Command::Roof { .. } => "roof",
        Command::Scan { .. } => "scan",
        Command::Audit { .. } => "audit",
        Command::Family { .. } => "family",
    }
}

fn run(cmd: &Command, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    match cmd {
        Command::Measure { state, roof, as_truncation } => cmd_measure(state, roof, *as_truncation, ctx, rep),
        Command::Schmidt { state } => cmd_schmidt(state, ctx, rep),
        Command::Phc { state, roof } => cmd_phc(state, roof, ctx, rep),
        Command::Roof { state, roof } => cmd_roof(state, roof, ctx, rep),
        Command::Scan { family, dims, csv } => cmd_scan(family, dims, csv.as_ref(), ctx, rep),
        Command::Audit {
            state,
            channel,
            mode,
            trials,
            side,
            branches,
            roof,
        } => cmd_audit(state, channel.as_ref(), mode, *trials, side, *branches, roof, ctx, rep),
        Command::Family { family, out } => cmd_family(family, out, ctx, rep),
    }
}

/// Family specs without an explicit seed inherit the global one.
fn resolve_family(spec: &str, seed: u64) -> Result<StateFamily> {
    let fam: StateFamily = spec.parse()?;
    Ok(if fam.seed.is_none() { fam.with_seed(seed) } else { fam })
}

fn load_state(args: &StateArgs, ctx: &Ctx, rep: &mut RunReport) -> Result<FamilyState> {
    match (&args.state, &args.family) {
        (Some(path), None) => {
            rep.input("state_file", path.display().to_string());
            let state = io::read_state(path)?;
            if let FamilyState::Pure(p) = &state {
                if p.was_renormalized() {
                    rep.warn("input amplitudes were renormalized");
                }
            }
            Ok(state)
        }
        (None, Some(spec)) => {
            let fam = resolve_family(spec, ctx.seed)?;
            rep.input("family", fam.to_string());
            oracles::make_family(&fam)
        }
        _ => Err(Error::Param("give either a state file or --family".into())),
    }
}

fn roof_config(args: &RoofArgs, ctx: &Ctx, rep: &mut RunReport) -> Result<RoofConfig> {
    let mut cfg = match &args.roof_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<RoofConfig>(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        }
        None => RoofConfig::default(),
    };
    cfg.functional = args.functional.parse()?;
    cfg.rng_seed = ctx.seed;
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    if let Some(m) = args.ensemble_size {
        cfg.ensemble_size = Some(m);
    }
    if let Some(it) = args.max_iters {
        cfg.max_iters = it;
    }
    rep.input("roof", &cfg);
    Ok(cfg)
}

fn put_roof(rep: &mut RunReport, prefix: &str, est: &roof::RoofEstimate) -> Result<()> {
    if est.bound_chain_violations > 0 {
        return Err(Error::InvariantBreach {
            invariant: "bound_chain".into(),
            detail: format!("{} sampled ensembles violated the chain", est.bound_chain_violations),
        });
    }
    rep.put(
        prefix,
        json!({
            "value": est.value,
            "label": "upper bound",
            "functional": est.functional,
            "converged": est.converged,
            "rank": est.rank,
            "ensemble_size": est.ensemble_size,
            "ensembles_checked": est.ensembles_checked,
            "bound_chain_violations": est.bound_chain_violations,
            "best_ensemble_members": est.best_ensemble.len(),
        }),
    );
    if !est.converged {
        rep.warn(format!("{prefix}: best restart hit the iteration limit"));
    }
    Ok(())
}

fn cmd_measure(args: &StateArgs, roof_args: &RoofArgs, as_truncation: bool, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    let state = load_state(args, ctx, rep)?;
    rep.input("as_truncation", as_truncation);
    let (a, b) = state.dims();
    rep.put("dims", [a, b]);
    match &state {
        FamilyState::Pure(psi) => {
            rep.put("kind", "pure");
            let r = PureMeasureReport::compute(psi)?;
            rep.put("c_purity", r.c_purity);
            rep.put("c_minors", r.c_minors);
            rep.put("c_schmidt", r.c_schmidt);
            rep.put("tangle", r.tangle);
            rep.put("max_pairwise_gap", r.max_pairwise_gap);
            rep.put("phc", phc::phc_measure(psi)?);
            rep.put("separable", phc::phc_separability_check(psi, ctx.tol)?);
            if as_truncation {
                // Weight on the outermost level of either factor: a large value
                // means the truncation is too small to stand in for the full state.
                let amps = psi.amps();
                let boundary: f64 = (0..a)
                    .flat_map(|i| (0..b).map(move |j| (i, j)))
                    .filter(|&(i, j)| i + 1 == a || j + 1 == b)
                    .map(|(i, j)| amps[(i, j)].norm_sqr())
                    .sum();
                rep.put("boundary_weight", boundary);
                rep.warn("values are for the renormalized truncation, not the untruncated state");
            }
        }
        FamilyState::Mixed(rho) => {
            rep.put("kind", "mixed");
            if as_truncation {
                rep.warn("--as-truncation only applies to pure states; ignored");
            }
            let cfg = roof_config(roof_args, ctx, rep)?;
            let est = roof::roof_minimize(rho, &cfg)?;
            put_roof(rep, "roof", &est)?;
            let bounds = roof::bound_report(rho, &cfg)?;
            rep.put("bound_chain", json!({
                "c_sq": bounds.c_sq,
                "tangle": bounds.tangle,
                "purity_bound": bounds.purity_bound,
                "label": "upper bound",
            }));
            if rho.factors() == Some((2, 2)) {
                rep.put("wootters_exact", oracles::wootters_concurrence(rho)?);
            }
        }
    }
    Ok(())
}

fn cmd_schmidt(args: &StateArgs, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    let FamilyState::Pure(psi) = load_state(args, ctx, rep)? else {
        return Err(Error::Kind("schmidt needs a pure state".into()));
    };
    let form = schmidt(&psi, DEFAULT_RANK_CUTOFF);
    let residual = entangle::linalg::max_abs(&(form.reconstruct() - psi.amps()));
    rep.put("coeffs", &form.coeffs);
    rep.put("rank", form.rank);
    rep.put("reconstruction_residual", residual);
    Ok(())
}

fn cmd_phc(args: &StateArgs, roof_args: &RoofArgs, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    match load_state(args, ctx, rep)? {
        FamilyState::Pure(psi) => {
            let r = phc::phc_result(&psi, ctx.tol)?;
            rep.put("hs_distance", r.hs_distance);
            rep.put("closed_form", r.closed_form);
            rep.put("is_phc_invariant", r.is_phc_invariant);
            rep.put("concurrence", measures::concurrence_purity(&psi));
            rep.put("trace_norm_variant", phc::phc_measure_trace_norm(&psi));
            rep.warn("trace_norm_variant is experimental and not expected to equal the concurrence");
        }
        FamilyState::Mixed(rho) => {
            let mut cfg = roof_config(roof_args, ctx, rep)?;
            cfg.functional = Functional::Phc;
            let est = phc::phc_measure_mixed(&rho, &cfg)?;
            put_roof(rep, "phc_roof", &est)?;
        }
    }
    Ok(())
}

fn cmd_roof(args: &StateArgs, roof_args: &RoofArgs, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    let rho = load_state(args, ctx, rep)?.density();
    let cfg = roof_config(roof_args, ctx, rep)?;
    let est = roof::roof_minimize(&rho, &cfg)?;
    put_roof(rep, "roof", &est)?;
    let vals = &est.per_restart_values;
    rep.put("per_restart_min", vals.iter().copied().fold(f64::INFINITY, f64::min));
    rep.put("per_restart_max", vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    if rho.factors() == Some((2, 2)) && cfg.functional != Functional::Tangle {
        rep.put("wootters_exact", oracles::wootters_concurrence(&rho)?);
    }
    Ok(())
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Param(format!("cannot parse dims '{s}'; use 2,4,8 or 2..64"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn cmd_scan(family: &str, dims: &str, csv: Option<&PathBuf>, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    let fam = resolve_family(family, ctx.seed)?;
    let dims = parse_dims(dims)?;
    rep.input("family", fam.to_string());
    rep.input("dims", &dims);
    let scan = channels::truncation_scan(&fam, &dims)?;
    if let Some(path) = csv {
        io::write_scan_csv(path, &scan)?;
        rep.input("csv", path.display().to_string());
    }
    rep.put("dims", &scan.dims);
    rep.put("concurrence", &scan.values);
    rep.put("trace_gaps", &scan.trace_gaps);
    rep.put("certified_bounds", &scan.certified_bounds);
    rep.put("trace_deficits", &scan.trace_deficits);
    if let Some(l) = scan.analytic_limit {
        rep.put("analytic_limit", l);
    }
    rep.put("certificate_holds", scan.certificate_holds);
    if let Some(t) = scan.first_violation() {
        return Err(Error::InvariantBreach {
            invariant: "truncation_certificate".into(),
            detail: format!("step {} -> {}", scan.dims[t], scan.dims[t + 1]),
        });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    args: &StateArgs,
    channel: Option<&PathBuf>,
    mode: &str,
    trials: usize,
    side: &str,
    branches: usize,
    roof_args: &RoofArgs,
    ctx: &Ctx,
    rep: &mut RunReport,
) -> Result<()> {
    use rand::SeedableRng;

    let mode: MeasureMode = mode.parse()?;
    if trials == 0 {
        return Err(Error::Param("--trials must be at least 1".into()));
    }
    let cfg = roof_config(roof_args, ctx, rep)?;
    rep.input("mode", mode);
    rep.input("trials", trials);
    let fixed_channel = match channel {
        Some(p) => {
            rep.input("channel", p.display().to_string());
            Some(io::read_instrument(p)?)
        }
        None => {
            rep.input("random_instrument", json!({ "side": side, "branches": branches }));
            None
        }
    };
    let side: Side = side.parse()?;
    let fixed_state = match (&args.state, &args.family) {
        (Some(_), _) => Some(load_state(args, ctx, rep)?),
        (None, Some(spec)) => {
            rep.input("family", spec);
            None
        }
        (None, None) => return Err(Error::Param("give either a state file or --family".into())),
    };

    let mut margins = Vec::with_capacity(trials);
    let (mut violations, mut inconclusive) = (0usize, 0usize);
    for t in 0..trials {
        let trial_seed = ctx.seed.wrapping_add(t as u64);
        let rho = match &fixed_state {
            Some(s) => s.density(),
            None => {
                let fam: StateFamily = args.family.as_deref().expect("family checked").parse()?;
                let fam = if fam.seed.is_none() { fam.with_seed(trial_seed) } else { fam };
                oracles::make_family(&fam)?.density()
            }
        };
        let inst: Vec<KrausChannel> = match &fixed_channel {
            Some(c) => c.clone(),
            None => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(trial_seed ^ 0x9e37_79b9_7f4a_7c15);
                channels::random_instrument(&mut rng, side, rho.require_factors()?, branches, 1)?
            }
        };
        let audit = channels::monotonicity_audit(&rho, &inst, mode, &cfg)?;
        match audit.verdict {
            Verdict::Violation => violations += 1,
            Verdict::Inconclusive => inconclusive += 1,
            Verdict::Holds => {}
        }
        if trials == 1 {
            rep.put("before", audit.before);
            rep.put("after_avg", audit.after_avg);
            rep.put("branch_probabilities", &audit.branch_probabilities);
            rep.put("verdict", audit.verdict);
            if audit.uses_estimates {
                rep.warn("some values are roof estimates (upper bounds)");
            }
        }
        margins.push(audit.margin);
    }
    let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = margins.iter().sum::<f64>() / margins.len() as f64;
    rep.put("min_margin", min);
    rep.put("mean_margin", mean);
    rep.put("violations", violations);
    rep.put("inconclusive", inconclusive);
    Ok(())
}

fn cmd_family(spec: &str, out: &PathBuf, ctx: &Ctx, rep: &mut RunReport) -> Result<()> {
    let fam = resolve_family(spec, ctx.seed)?;
    rep.input("family", fam.to_string());
    rep.input("out", out.display().to_string());
    let state = oracles::make_family(&fam)?;
    io::write_state(out, &state)?;
    let (a, b) = state.dims();
    rep.put("dims", [a, b]);
    rep.put("kind", if matches!(state, FamilyState::Pure(_)) { "pure" } else { "mixed" });
    Ok(())
}
