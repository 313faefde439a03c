use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ricci_conc_core::bounds::{parse_grid, solve_lambda0, sweep_csv, tail_bound, BoundVariant, TailBoundSpec};
use ricci_conc_core::curvature::{check_diameter_bound, lazy_kernel, ricci_lower_bound, LowerBoundOptions};
use ricci_conc_core::experiments::{estimate_tail, TailOptions};
use ricci_conc_core::geometrize::{build, enumeration_cap, Model};
use ricci_conc_core::observables::{claimed_lipschitz_constant, PatternSpec};
use ricci_conc_core::scalar::parse_rational;
use ricci_conc_core::state_space::{check_ergodic, parse_edge_list, SparseDistribution, StateGraph, WalkKernel};
use ricci_conc_core::transport::{coupling_cost, validate_coupling, wasserstein, Coupling};
use ricci_conc_core::verify::{self, ArithmeticMode, Group, VerifyConfig, VerifyReport};
use ricci_conc_core::{Error, Rational, Scalar};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "ricci-conc", version, about = "Ollivier-Ricci curvature and concentration bounds on geometrized probability spaces")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-edge curvature and the global lower bound of a walk on a graph.
    Curvature(CurvatureArgs),
    /// Build the configuration graph and walk of a random model.
    Geometrize(GeometrizeArgs),
    /// Evaluate the concentration bound.
    Bound(BoundArgs),
    /// Monte Carlo tail of an observable against the bounds.
    Simulate(SimulateArgs),
    /// Validate a coupling of two distributions and report its cost.
    VerifyCoupling(VerifyCouplingArgs),
    /// Run the small-instance verification suite.
    VerifyPaper(VerifyPaperArgs),
}

#[derive(Args)]
struct CurvatureArgs {
    /// Edge list: `u v` per line, 0-based.
    #[arg(long)]
    graph: PathBuf,
    /// Kernel JSON (rows of [state, weight] pairs).
    #[arg(long, conflicts_with = "lazy", required_unless_present = "lazy")]
    kernel: Option<PathBuf>,
    /// Laziness α of the uniform walk, in [0, 1).
    #[arg(long)]
    lazy: Option<String>,
    /// Keep the optimal coupling and potential of every edge.
    #[arg(long)]
    certificates: bool,
    #[arg(long, default_value = "float")]
    mode: String,
    /// Seed for the sampled non-adjacent pairs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    sample_pairs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GeometrizeArgs {
    /// gnp | gnm | hyper | doutreg | perm-ins | perm-trans
    #[arg(long)]
    model: String,
    /// e.g. n=4,M=2
    #[arg(long)]
    params: String,
    /// Include states, edges and kernel.
    #[arg(long)]
    explicit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    kappa: String,
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    t: Option<f64>,
    /// t0:t1:steps; emits CSV (t, bound).
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, default_value = "seven")]
    variant: String,
    #[arg(long)]
    two_sided: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    params: String,
    /// pattern:21 | subgraph:K3 | subgraph:0-1,1-2 | directed-triangles
    #[arg(long)]
    observable: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// a:b:steps (default 1:2/kappa:10)
    #[arg(long)]
    t_grid: Option<String>,
    /// Override the claimed Lipschitz constant of the observable.
    #[arg(long)]
    lipschitz: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write t, empirical, ci_lo, ci_hi, bound_seven, bound_five, bound_exact.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCouplingArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    mu1: PathBuf,
    #[arg(long)]
    mu2: PathBuf,
    /// [x, y, weight] triples.
    #[arg(long)]
    coupling: PathBuf,
}

#[derive(Args)]
struct VerifyPaperArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "rational")]
    mode: String,
    /// Comma-separated groups: gnp, gnm, hyper, dout, perm, transport, bounds.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// Direct samples per envelope instance.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Drop the meta block from the JSON report.
    #[arg(long)]
    no_meta: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// What a subcommand produced: JSON, a human summary, and whether its checks held.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match &cli.command {
        Command::Curvature(a) => curvature(a),
        Command::Geometrize(a) => geometrize(a),
        Command::Bound(a) => bound(a),
        Command::Simulate(a) => simulate(a),
        Command::VerifyCoupling(a) => verify_coupling(a),
        Command::VerifyPaper(a) => verify_paper(a, cli.json),
    };
    match result {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            } else if !out.text.is_empty() {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::TooLarge { .. }) => EXIT_CAP,
        Some(
            Error::Parse(_)
            | Error::BadParams(_)
            | Error::OutOfRange(_)
            | Error::UnsupportedModel(_)
            | Error::IncompatiblePair(_)
            | Error::PatternTooLarge(_)
            | Error::BadGrid(_)
            | Error::Io(_)
            | Error::Json(_),
        ) => EXIT_USAGE,
        Some(_) => EXIT_CHECK_FAILED,
        None if e.downcast_ref::<std::io::Error>().is_some() => EXIT_USAGE,
        None => EXIT_USAGE,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(Error::from).with_context(|| format!("reading {}", path.display()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = read(path)?;
    Ok(serde_json::from_str(&text).map_err(Error::from).with_context(|| format!("parsing {}", path.display()))?)
}

fn write_out(path: Option<&PathBuf>, value: &Value) -> anyhow::Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(value).map_err(Error::from)? + "\n";
        fs::write(path, text).map_err(Error::from).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn parse_mode(text: &str) -> anyhow::Result<ArithmeticMode> {
    Ok(text.parse::<ArithmeticMode>()?)
}

fn curvature(args: &CurvatureArgs) -> anyhow::Result<Output> {
    let g = parse_edge_list(&read(&args.graph)?)?.with_distance_cache();
    let options = LowerBoundOptions { sample_pairs: args.sample_pairs, seed: args.seed, certificates: args.certificates };
    let json = match parse_mode(&args.mode)? {
        ArithmeticMode::Float => {
            let (kernel, alpha) = curvature_kernel::<f64>(args, &g)?;
            curvature_json(&g, &kernel, alpha, options)?
        }
        ArithmeticMode::Rational => {
            let (kernel, alpha) = curvature_kernel::<Rational>(args, &g)?;
            curvature_json(&g, &kernel, alpha, options)?
        }
    };
    write_out(args.out.as_ref(), &json)?;
    let text = format!(
        "global_lb {}\nargmin_edge {} {}\nedges {}\n",
        json["global_lb"], json["argmin_edge"][0], json["argmin_edge"][1],
        json["edges"].as_array().map_or(0, Vec::len)
    );
    Ok(Output { json, text, ok: true })
}

fn curvature_kernel<T: Scalar>(args: &CurvatureArgs, g: &StateGraph) -> anyhow::Result<(WalkKernel<T>, Option<T>)> {
    match (&args.kernel, &args.lazy) {
        (Some(path), None) => {
            let kernel = WalkKernel::<T>::from_json(&read_json(path)?)?;
            kernel.check_support(g)?;
            Ok((kernel, None))
        }
        (None, Some(alpha)) => {
            let alpha = T::from_rational(&parse_rational(alpha)?);
            Ok((lazy_kernel(g, alpha.clone())?, Some(alpha)))
        }
        _ => bail!(Error::BadParams("give exactly one of --kernel and --lazy".into())),
    }
}

fn curvature_json<T: Scalar>(
    g: &StateGraph,
    kernel: &WalkKernel<T>,
    alpha: Option<T>,
    options: LowerBoundOptions,
) -> anyhow::Result<Value> {
    let mut report = ricci_lower_bound(g, kernel, options)?;
    report.alpha = alpha;
    let diameter = check_diameter_bound(g, kernel, &report.global_lb)?;
    let mut json = report.to_json();
    json["diameter_check"] = serde_json::to_value(diameter).map_err(Error::from)?;
    Ok(json)
}

fn geometrize(args: &GeometrizeArgs) -> anyhow::Result<Output> {
    let model = Model::from_params(&args.model, &args.params)?;
    let space = build(&model, enumeration_cap())?;
    let mut json = space.to_json(args.explicit);
    json["ergodicity"] = serde_json::to_value(check_ergodic(space.graph(), space.kernel_f64())).map_err(Error::from)?;
    write_out(args.out.as_ref(), &json)?;
    let text = format!(
        "{model}\nstates {}\nedges {}\nclaimed_kappa_lb {}\n",
        space.state_count(),
        space.graph().edge_count(),
        space.claimed_kappa_lb().map_or("none".to_string(), |k| k.display())
    );
    Ok(Output { json, text, ok: true })
}

fn bound(args: &BoundArgs) -> anyhow::Result<Output> {
    let kappa = parse_rational(&args.kappa)?.to_f64();
    let variant: BoundVariant = args.variant.parse()?;
    if let Some(sweep) = &args.sweep {
        let csv = sweep_csv(kappa, &parse_grid(sweep)?, variant, args.two_sided)?;
        let rows: Vec<Value> = csv
            .lines()
            .skip(1)
            .filter_map(|l| l.split_once(','))
            .map(|(t, b)| json!([t.parse::<f64>().unwrap_or(f64::NAN), b.parse::<f64>().unwrap_or(f64::NAN)]))
            .collect();
        let json = json!({ "kappa": kappa, "variant": variant.name(), "two_sided": args.two_sided, "rows": rows });
        return Ok(Output { json, text: csv, ok: true });
    }
    let t = args.t.expect("clap requires --t without --sweep");
    let b = tail_bound(&TailBoundSpec { kappa, t, variant, two_sided: args.two_sided })?;
    let lambda0 = solve_lambda0(kappa)?;
    let json = json!({
        "kappa": kappa,
        "t": t,
        "variant": variant.name(),
        "two_sided": args.two_sided,
        "lambda0": lambda0,
        "bound": b.value,
        "outside_theorem_hypothesis": b.outside_theorem_hypothesis,
        "beyond_diameter": b.beyond_diameter,
    });
    let mut text = format!("lambda0 {lambda0:.5}\nbound {}\n", b.value);
    if b.outside_theorem_hypothesis {
        text.push_str("note: t < 1 is outside the theorem's hypothesis\n");
    }
    Ok(Output { json, text, ok: true })
}

fn simulate(args: &SimulateArgs) -> anyhow::Result<Output> {
    let model = Model::from_params(&args.model, &args.params)?;
    let obs = PatternSpec::parse(&args.observable)?;
    let c = match args.lipschitz {
        Some(c) => c,
        None => claimed_lipschitz_constant(&obs, &model)? as f64,
    };
    let cap = enumeration_cap();
    let mut options = TailOptions { exact_kappa: None, exact_mean_cap: Some(cap) };
    if model.claimed_kappa_lb().is_none() && model.state_count() <= cap {
        let space = build(&model, cap)?;
        let report = ricci_lower_bound(space.graph(), space.kernel_f64(), LowerBoundOptions { sample_pairs: 0, ..Default::default() })?;
        options.exact_kappa = Some(report.global_lb);
    }
    let kappa = match (model.claimed_kappa_lb(), options.exact_kappa) {
        (Some(k), _) => k.to_f64(),
        (None, Some(k)) if k > 0.0 => k,
        _ => bail!(Error::MissingKappa(format!("{model} has no positive curvature bound"))),
    };
    let grid = match &args.t_grid {
        Some(text) => parse_grid(text)?,
        None => ricci_conc_core::bounds::linear_grid(1.0, 2.0 / kappa, 10),
    };
    let report = estimate_tail(&model, &obs.id(), |x| obs.evaluate(x).map(|v| v as f64), c, &grid, args.samples, args.seed, &options)?;
    let json = serde_json::to_value(&report).map_err(Error::from)?;
    write_out(args.out.as_ref(), &json)?;
    if let Some(path) = &args.csv {
        fs::write(path, report.to_csv()).map_err(Error::from).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut text = format!(
        "{model} {} c={c} kappa={kappa} mean={} ({})\n",
        obs.id(),
        report.mean,
        if report.mean_is_exact { "exact" } else { "sampled" }
    );
    text.push_str(&report.to_csv());
    text.push_str(&format!("envelope {}\n", if report.envelope_satisfied { "satisfied" } else { "VIOLATED" }));
    Ok(Output { json, text, ok: report.envelope_satisfied })
}

fn verify_coupling(args: &VerifyCouplingArgs) -> anyhow::Result<Output> {
    let g = parse_edge_list(&read(&args.graph)?)?;
    let m1 = SparseDistribution::<Rational>::from_json(&read_json(&args.mu1)?)?;
    let m2 = SparseDistribution::<Rational>::from_json(&read_json(&args.mu2)?)?;
    let a = Coupling::<Rational>::from_json(&read_json(&args.coupling)?)?;
    let verdict = validate_coupling(&a, &m1, &m2);
    let optimal = wasserstein(&m1, &m2, &g)?.distance;
    let (json, text) = match &verdict {
        Ok(()) => {
            let cost = coupling_cost(&a, &g)?;
            let gap = cost.clone() - optimal.clone();
            (
                json!({ "valid": true, "cost": cost.to_json(), "wasserstein": optimal.to_json(), "gap": gap.to_json() }),
                format!("valid\ncost {}\nwasserstein {}\n", cost.display(), optimal.display()),
            )
        }
        Err(v) => (
            json!({ "valid": false, "violation": v, "wasserstein": optimal.to_json() }),
            format!("invalid: {v}\n"),
        ),
    };
    Ok(Output { json, text, ok: verdict.is_ok() })
}

fn verify_paper(args: &VerifyPaperArgs, json_stdout: bool) -> anyhow::Result<Output> {
    let only = if args.only.is_empty() {
        None
    } else {
        Some(args.only.iter().map(|g| g.parse::<Group>()).collect::<Result<Vec<_>, _>>()?)
    };
    let config = VerifyConfig {
        seed: args.seed,
        mode: parse_mode(&args.mode)?,
        only,
        samples: args.samples,
        cap: enumeration_cap(),
    };
    let meta = (!args.no_meta).then(|| config.meta());
    let report = VerifyReport::new(meta, verify::run(&config));
    let json = serde_json::to_value(&report).map_err(Error::from)?;
    write_out(args.out.as_ref(), &json)?;
    let mut text = report.table();
    for f in report.failures() {
        text.push_str(&format!("failed: {} ({})\n", f.id, f.name));
    }
    if json_stdout {
        eprint!("{text}");
    }
    Ok(Output { json, text, ok: report.all_passed })
}
