//! `restriction-lab`: runs the verification suites and writes reproducible
//! reports. Exit status is 0 when every check passes, 1 when a check fails
//! and 2 for any usage or configuration error.

mod report;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use restriction_lab::estimate::{
    cycled_signs, dyadic_sweep, make_extremizer, theoretical_constant, trial_fields, Coefficients, EstimateCase,
    Evaluator, ExtremizerKind, ExtremizerSpec, FitOn, SweepSpec, Theorem,
};
use restriction_lab::exec::{configure_threads, Exec};
use restriction_lab::fixtures::{Fixtures, CALIBRATION_SEED, FIXTURES_ENV};
use restriction_lab::geometry::{Sign, Vec3};
use restriction_lab::measure::sphere_sphere_volume;
use restriction_lab::suites::estimates::{CELL_L, CELL_N, CELL_SPACING, LOW_N};
use restriction_lab::suites::net::{criterion_gammas, NetScale};
use restriction_lab::suites::{self, Check, Row, SuiteReport, CRITERIA, DEFAULT_SEED};
use restriction_lab::{Error, Result};
use serde::Serialize;
use serde_json::json;

use report::{emit, suites_csv, Format, Report, RunConfig, Suites, Timestamp};

#[derive(Parser, Debug)]
#[command(
    name = "restriction-lab",
    version,
    about = "Numerical checks of bilinear restriction estimates on the wave cone"
)]
struct Cli {
    /// Base seed. Defaults to 1, or the calibration seed for `calibrate`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Fixture file overriding the built-in constants.
    #[arg(long, global = true, env = FIXTURES_ENV)]
    fixtures: Option<PathBuf>,
    /// Log progress to stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Covering, local counts, decompositions and hyperplane lemmas of the direction nets.
    VerifyNet(NetArgs),
    /// Volume and area bounds of the measure oracles.
    VerifyMeasure(MeasureArgs),
    /// Gaussian trials of one estimate against its constant.
    RunEstimate(EstimateArgs),
    /// Dyadic parameter sweep with a fitted log-log exponent.
    Sweep(SweepArgs),
    /// Builds a saturating family and reports its ratio.
    Extremizer(ExtremizerArgs),
    /// Recomputes the fixture constants.
    Calibrate,
    /// Runs acceptance criteria by number.
    Criteria(CriteriaArgs),
}

#[derive(Args, Debug, Serialize)]
struct NetArgs {
    /// Net scales, e.g. `pi/8,0.1`. Defaults to π/4, π/8, …, π/256.
    #[arg(long, value_delimiter = ',', value_parser = parse_angle)]
    gamma: Vec<f64>,
    /// Net seeds; defaults to --seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Smaller sample counts for a fast smoke run.
    #[arg(long)]
    quick: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum MeasureSuite {
    Spheres,
    Cones,
    Quadric,
}

#[derive(Args, Debug, Serialize)]
struct MeasureArgs {
    #[arg(value_enum)]
    suite: MeasureSuite,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Theorem id, e.g. `bilinear_input`. Starts from the canonical cell.
    #[arg(long, value_parser = parse_theorem, conflicts_with = "case")]
    theorem: Option<Theorem>,
    /// JSON EstimateCase to run instead of a theorem id.
    #[arg(long)]
    case: Option<PathBuf>,
    /// Case parameter override `name=value` (n0, l2, r, alpha, ...).
    #[arg(long = "set", value_parser = parse_assignment)]
    set: Vec<(String, f64)>,
    /// Fixed sign triple such as `+-+`; otherwise trials cycle through all eight.
    #[arg(long, value_parser = parse_signs)]
    signs: Option<[Sign; 3]>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, value_enum)]
    coefficients: Option<CoefficientsArg>,
    /// Ratio limit; defaults to the calibrated constant when there is one.
    #[arg(long)]
    bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CoefficientsArg {
    Gaussian,
    RadialSecond,
}

impl From<CoefficientsArg> for Coefficients {
    fn from(c: CoefficientsArg) -> Self {
        match c {
            CoefficientsArg::Gaussian => Coefficients::Gaussian,
            CoefficientsArg::RadialSecond => Coefficients::RadialSecond,
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Complete JSON SweepSpec; --vary, --grid and --trials override it.
    #[arg(long, conflicts_with_all = ["template", "extremizer"])]
    spec: Option<PathBuf>,
    /// JSON EstimateCase swept on its case parameters.
    #[arg(long, conflicts_with = "extremizer")]
    template: Option<PathBuf>,
    /// Extremizer family swept on N, alpha, delta or L1.
    #[arg(long, value_parser = parse_kind)]
    extremizer: Option<ExtremizerKind>,
    /// Extremizer scale when N is not the swept parameter.
    #[arg(long, default_value_t = 64.0)]
    n: f64,
    #[arg(long, value_parser = parse_theorem)]
    theorem: Option<Theorem>,
    #[arg(long)]
    vary: Option<String>,
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Fit LHS over ‖u₁‖‖u₂‖ instead of the theorem's right side.
    #[arg(long)]
    plain_norms: bool,
    /// Expected exponent; the run fails when the fit is outside the band.
    #[arg(long, allow_negative_numbers = true)]
    expect: Option<f64>,
    #[arg(long, default_value_t = 0.15)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct ExtremizerArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: ExtremizerKind,
    #[arg(long)]
    n: f64,
    #[arg(long, value_parser = parse_theorem)]
    theorem: Option<Theorem>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    l1: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct CriteriaArgs {
    /// Criterion numbers; all eleven by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

/// Accepts plain numbers and multiples of π: `0.3`, `pi`, `2pi`, `pi/8`.
fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let Some(i) = t.find("pi") else {
        return t.parse().map_err(|_| format!("'{s}' is not an angle"));
    };
    let coef = t[..i].trim_end_matches('*').trim();
    let coef: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| format!("bad multiple in '{s}'"))? };
    let rest = t[i + 2..].trim();
    let den: f64 = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse().map_err(|_| format!("bad divisor in '{s}'"))?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("'{s}' is not an angle")),
    };
    Ok(coef * PI / den)
}

fn parse_theorem(s: &str) -> std::result::Result<Theorem, String> {
    s.replace('-', "_").parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<ExtremizerKind, String> {
    serde_json::from_value(json!(s.replace('-', "_"))).map_err(|_| format!("unknown extremizer '{s}'"))
}

fn parse_assignment(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let v = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_signs(s: &str) -> std::result::Result<[Sign; 3], String> {
    let v: Vec<Sign> = s
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(format!("bad sign '{c}'")),
        })
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected three signs, got '{s}'"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

/// What a command hands back for the envelope.
enum Outcome {
    Suites(Vec<SuiteReport>),
    /// A body with its own CSV form and pass flag.
    Custom {
        body: serde_json::Value,
        csv: String,
        passed: bool,
    },
}

struct Context {
    fx: Fixtures,
    seed: u64,
    timestamp: Timestamp,
}

impl Context {
    fn run(&mut self, label: String, f: impl FnOnce() -> Result<SuiteReport>) -> Result<SuiteReport> {
        let t = Instant::now();
        let r = f()?;
        self.timestamp.seconds.insert(label, t.elapsed().as_secs_f64());
        Ok(r)
    }
}

fn verify_net(ctx: &mut Context, a: &NetArgs) -> Result<(serde_json::Value, Outcome)> {
    let gammas = if a.gamma.is_empty() { criterion_gammas() } else { a.gamma.clone() };
    for &g in &gammas {
        if !(g > 0.0 && g <= PI) {
            return Err(Error::Usage(format!("gamma = {g} is outside (0, pi]")));
        }
    }
    let seeds = if a.seeds.is_empty() { vec![ctx.seed] } else { a.seeds.clone() };
    let scale = if a.quick {
        NetScale {
            covering_samples: 10_000,
            separated_pairs: 1_000,
            near_samples: 200,
            overlap_per_cell: 100,
            sector_samples: 100_000,
        }
    } else {
        NetScale::FULL
    };
    let params = json!({
        "gamma": gammas,
        "seeds": seeds,
        "covering_samples": scale.covering_samples,
        "separated_pairs": scale.separated_pairs,
        "near_samples": scale.near_samples,
        "overlap_per_cell": scale.overlap_per_cell,
        "sector_samples": scale.sector_samples,
    });
    let mut reps = Vec::new();
    for &s in &seeds {
        let fx = ctx.fx.clone();
        reps.push(ctx.run(format!("net seed {s}"), || suites::net::full(&fx, s, &gammas, scale))?);
    }
    Ok((params, Outcome::Suites(reps)))
}

/// Two shells too far apart to meet.
fn disjoint_spot_check() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("empty intersection", 0);
    let v = sphere_sphere_volume(1.0, 0.01, 1.0, 0.01, Vec3::new(2.05, 0.0, 0.0))?;
    rep.rows.push(Row::new("disjoint_shells", &[("separation", 2.05)], v.estimate.value, v.estimate.stderr, v.bound));
    rep.checks.push(Check::at_most("disjoint shells volume", v.estimate.value, 0.0));
    Ok(rep)
}

fn verify_measure(ctx: &mut Context, a: &MeasureArgs) -> Result<(serde_json::Value, Outcome)> {
    let (seed, fx) = (ctx.seed, ctx.fx.clone());
    let reps = match a.suite {
        MeasureSuite::Spheres => vec![
            ctx.run("slab sphere".into(), || suites::measure::slab_sphere(seed))?,
            ctx.run("sphere sphere".into(), || suites::measure::sphere_sphere(&fx))?,
            ctx.run("empty intersection".into(), disjoint_spot_check)?,
        ],
        MeasureSuite::Cones => vec![
            ctx.run("cone cone".into(), || suites::measure::cone_cone(&fx, seed))?,
            ctx.run("cone ball".into(), || suites::measure::cone_ball(&fx, seed))?,
        ],
        MeasureSuite::Quadric => vec![ctx.run("quadric".into(), || suites::measure::quadric(&fx))?],
    };
    Ok((serde_json::to_value(a)?, Outcome::Suites(reps)))
}

/// The calibrated ratio limit of a theorem, if it has one.
fn calibrated_bound(fx: &Fixtures, t: Theorem) -> Option<f64> {
    let e = &fx.estimates;
    match t {
        Theorem::BilinearInput => Some(e.bilinear_input),
        Theorem::BilinearOutput => Some(e.bilinear_output),
        Theorem::BilinearSymmetric => Some(e.bilinear_symmetric),
        Theorem::LowOutputTube => Some(e.low_output_tube),
        _ => None,
    }
}

fn run_estimate(ctx: &mut Context, a: &EstimateArgs) -> Result<(serde_json::Value, Outcome)> {
    let mut case = match (&a.case, a.theorem) {
        (Some(p), _) => read_json::<EstimateCase>(p)?,
        (None, Some(t)) => {
            let n = if t == Theorem::LowOutputTube { LOW_N } else { CELL_N };
            EstimateCase::new(t, n, CELL_L, cycled_signs(0), CELL_SPACING)
        }
        (None, None) => return Err(Error::Usage("run-estimate needs --theorem or --case".into())),
    };
    for (k, v) in &a.set {
        case.set_param(k, *v)?;
    }
    if let Some(s) = a.signs {
        case.signs = s;
    }
    case.seed = ctx.seed;
    ensure_trials(a.trials)?;
    let coeffs = a.coefficients.map(Coefficients::from).unwrap_or(if case.theorem == Theorem::LowOutputTube {
        Coefficients::RadialSecond
    } else {
        Coefficients::Gaussian
    });
    let bound = a.bound.or_else(|| calibrated_bound(&ctx.fx, case.theorem));
    // The case file fixes its signs; a bare theorem id cycles them.
    let cycle = a.signs.is_none() && a.case.is_none();
    let constant = theoretical_constant(&case)?;
    let params = json!({
        "case": case,
        "trials": a.trials,
        "coefficients": coeffs,
        "cycle_signs": cycle,
        "bound": bound,
    });
    let eval = Evaluator::new(Exec::default());
    let t = Instant::now();
    let mut rep = SuiteReport::new(&format!("estimate {}", case.theorem), ctx.seed);
    let mut worst = 0.0f64;
    for trial in 0..a.trials {
        let mut c = case.clone();
        if cycle {
            c.signs = cycled_signs(trial);
        }
        let (u1, u2) = trial_fields(&c, trial, coeffs, eval.exec)?;
        let e = eval.evaluate(&c, &u1, &u2)?;
        let sign = |s: Sign| s.value();
        let p = [("trial", trial as f64), ("s0", sign(c.signs[0])), ("s1", sign(c.signs[1])), ("s2", sign(c.signs[2]))];
        rep.rows.push(Row::new("trial", &p, e.lhs, 0.0, e.constant * e.rhs_norms));
        worst = worst.max(e.ratio);
    }
    rep.metric("constant", constant);
    rep.metric("max_ratio", worst);
    match bound {
        Some(b) => rep.checks.push(Check::at_most("max ratio", worst, b)),
        None => log::warn!("{} has no calibrated constant; pass --bound to judge it", case.theorem),
    }
    ctx.timestamp.seconds.insert(rep.suite.clone(), t.elapsed().as_secs_f64());
    Ok((params, Outcome::Suites(vec![rep])))
}

fn ensure_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::Usage("at least one trial is needed".into()));
    }
    Ok(())
}

/// A spec file keeps its own seed unless --seed is given.
fn sweep(ctx: &mut Context, a: &SweepArgs, seed_given: bool) -> Result<(serde_json::Value, Outcome)> {
    let mut spec = if let Some(p) = &a.spec {
        read_json::<SweepSpec>(p)?
    } else {
        let (template, extremizer) = match (&a.template, a.extremizer) {
            (Some(p), None) => (Some(read_json::<EstimateCase>(p)?), None),
            (None, Some(kind)) => {
                let mut x = ExtremizerSpec::new(kind, a.n);
                x.theorem = a.theorem;
                (None, Some(x))
            }
            _ => return Err(Error::Usage("sweep needs --spec, --template or --extremizer".into())),
        };
        SweepSpec {
            template,
            extremizer,
            vary: String::new(),
            grid: Vec::new(),
            trials: 0,
            seed: ctx.seed,
            coefficients: Coefficients::Gaussian,
            fit_on: FitOn::RightSide,
        }
    };
    if let Some(v) = &a.vary {
        spec.vary = v.clone();
    }
    if !a.grid.is_empty() {
        spec.grid = a.grid.clone();
    }
    if let Some(t) = a.trials {
        spec.trials = t;
    }
    if a.plain_norms {
        spec.fit_on = FitOn::PlainNorms;
    }
    if a.spec.is_none() || seed_given {
        spec.seed = ctx.seed;
    }
    if spec.vary.is_empty() {
        return Err(Error::Usage("sweep needs --vary".into()));
    }
    if a.tolerance.is_nan() || a.tolerance < 0.0 {
        return Err(Error::Usage(format!("tolerance {} must be non-negative", a.tolerance)));
    }
    ctx.seed = spec.seed;
    let params = json!({ "spec": spec, "expect": a.expect, "tolerance": a.tolerance });
    let t = Instant::now();
    let rep = dyadic_sweep(&spec, &ctx.fx.hash(), &Evaluator::new(Exec::default()))?;
    ctx.timestamp.seconds.insert("sweep".into(), t.elapsed().as_secs_f64());
    let band = a.expect.map(|e| [e - a.tolerance, e + a.tolerance]);
    let passed = band.map_or(true, |[lo, hi]| lo <= rep.exponent && rep.exponent <= hi);
    eprintln!(
        "exponent {:.4} ± {:.4}{}",
        rep.exponent,
        rep.exponent_stderr,
        band.map(|[lo, hi]| format!(", band [{lo}, {hi}]: {}", if passed { "pass" } else { "FAIL" }))
            .unwrap_or_default()
    );
    let body = json!({ "sweep": rep, "band": band });
    Ok((params, Outcome::Custom { csv: rep.to_csv(), body, passed }))
}

/// The fixture window of a family and target, where one was calibrated.
fn calibrated_window(fx: &Fixtures, kind: ExtremizerKind, t: Theorem) -> Option<[f64; 2]> {
    let e = &fx.estimates;
    match (kind, t) {
        (ExtremizerKind::NullCaps, Theorem::AnisotropicSlab) => Some(e.null_caps),
        (ExtremizerKind::NullCaps, Theorem::NullFormTube) => Some(e.null_form_tube),
        (ExtremizerKind::ShortNullCaps, Theorem::NullFormBall) => Some(e.null_form_ball),
        _ => None,
    }
}

fn extremizer(ctx: &mut Context, a: &ExtremizerArgs) -> Result<(serde_json::Value, Outcome)> {
    let mut spec = ExtremizerSpec::new(a.kind, a.n);
    spec.theorem = a.theorem;
    spec.alpha = a.alpha;
    spec.delta = a.delta;
    spec.l1 = a.l1;
    let params = json!({ "spec": spec });
    let t = Instant::now();
    let eval = Evaluator::new(Exec::default());
    let x = make_extremizer(&spec, eval.exec)?;
    let e = eval.evaluate(&x.case, &x.u1, &x.u2)?;
    ctx.timestamp.seconds.insert("extremizer".into(), t.elapsed().as_secs_f64());
    let mut checks = Vec::new();
    if let Some(w) = calibrated_window(&ctx.fx, a.kind, x.case.theorem) {
        checks.push(Check::within("extremizer ratio", e.ratio, w));
    }
    let passed = checks.iter().all(|c| c.passed);
    let csv = format!(
        "kind,theorem,n,lhs,rhs_norms,constant,ratio\n{},{},{},{},{},{},{}\n",
        json!(a.kind).as_str().unwrap_or_default(),
        x.case.theorem,
        a.n,
        e.lhs,
        e.rhs_norms,
        e.constant,
        e.ratio
    );
    eprintln!("{} on {}: ratio {:.6}", json!(a.kind).as_str().unwrap_or_default(), x.case.theorem, e.ratio);
    let body = json!({
        "case": x.case,
        "certificate": x.certificate,
        "evaluation": e,
        "checks": checks,
    });
    Ok((params, Outcome::Custom { body, csv, passed }))
}

fn criteria(ctx: &mut Context, a: &CriteriaArgs) -> Result<(serde_json::Value, Outcome)> {
    let list: Vec<usize> = if a.only.is_empty() { (1..=CRITERIA.len()).collect() } else { a.only.clone() };
    if let Some(bad) = list.iter().find(|&&i| i == 0 || i > CRITERIA.len()) {
        return Err(Error::Usage(format!("no acceptance criterion {bad}")));
    }
    let mut reps = Vec::new();
    for i in &list {
        let r = suites::criterion(*i, &ctx.fx, ctx.seed)?;
        eprintln!(
            "criterion {i:>2} {}  {} ({:.1}s): {}",
            if r.passed() { "PASS" } else { "FAIL" },
            CRITERIA[i - 1],
            r.seconds,
            r.summary()
        );
        ctx.timestamp.seconds.insert(format!("criterion {i}"), r.seconds);
        reps.push(r);
    }
    Ok((json!({ "criteria": list }), Outcome::Suites(reps)))
}

fn run(cli: Cli) -> Result<bool> {
    let seed_given = cli.seed.is_some();
    let seed = cli.seed.unwrap_or(match cli.command {
        Command::Calibrate => CALIBRATION_SEED,
        _ => DEFAULT_SEED,
    });
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        configure_threads(j)?;
    }
    let jobs = if cfg!(feature = "parallel") {
        cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    } else {
        1
    };

    if let Command::Calibrate = cli.command {
        if cli.format != Format::Json {
            return Err(Error::Usage("calibrate writes JSON fixtures only".into()));
        }
        let fx = suites::calibrate(seed)?;
        log::info!("fixture hash {}", fx.hash());
        emit(cli.out.as_deref(), &fx.to_json()?)?;
        return Ok(true);
    }

    let fx = Fixtures::resolve(cli.fixtures.as_deref())?;
    let fixtures = match (&cli.fixtures, std::env::var_os(FIXTURES_ENV)) {
        (Some(p), _) => p.display().to_string(),
        (None, Some(p)) if !p.is_empty() => PathBuf::from(p).display().to_string(),
        _ => "builtin".to_string(),
    };
    let mut ctx = Context { fx, seed, timestamp: Timestamp::now() };
    let (name, (params, outcome)) = match &cli.command {
        Command::VerifyNet(a) => ("verify-net", verify_net(&mut ctx, a)?),
        Command::VerifyMeasure(a) => ("verify-measure", verify_measure(&mut ctx, a)?),
        Command::RunEstimate(a) => ("run-estimate", run_estimate(&mut ctx, a)?),
        Command::Sweep(a) => ("sweep", sweep(&mut ctx, a, seed_given)?),
        Command::Extremizer(a) => ("extremizer", extremizer(&mut ctx, a)?),
        Command::Criteria(a) => ("criteria", criteria(&mut ctx, a)?),
        Command::Calibrate => unreachable!("handled above"),
    };
    let config = RunConfig {
        command: name.to_string(),
        seed: ctx.seed,
        format: cli.format,
        jobs,
        fixtures,
        fixture_hash: ctx.fx.hash(),
        params,
    };
    let (text, passed) = match outcome {
        Outcome::Suites(suites) => {
            let passed = suites.iter().all(SuiteReport::passed);
            for s in &suites {
                log::info!("{} {}: {}", s.suite, if s.passed() { "pass" } else { "FAIL" }, s.summary());
            }
            let text = match cli.format {
                Format::Json => Report::new(config, ctx.timestamp, passed, Suites { suites }).to_json()?,
                Format::Csv => suites_csv(&suites),
            };
            (text, passed)
        }
        Outcome::Custom { body, csv, passed } => {
            let text = match cli.format {
                Format::Json => Report::new(config, ctx.timestamp, passed, body).to_json()?,
                Format::Csv => csv,
            };
            (text, passed)
        }
    };
    emit(cli.out.as_deref(), &text)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
