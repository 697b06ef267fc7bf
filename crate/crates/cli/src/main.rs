//! `pwgs`: generate graphs, analyse spectra, certify lambda-sets, compute
//! frame bounds, reconstruct signals and run the verification suite.
//!
//! Every JSON report carries `"schema": 1` and the run manifest. Exit codes:
//! 0 success, 2 validation error, 3 verification violation, 64 unknown
//! subcommand, 66 unreadable input, 73 unwritable output.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use pwgs::frames::{self, FrameReport, SamplingLambdaBound, StabilityCertificate};
use pwgs::generate::{self, Family};
use pwgs::io::{self as pio, GraphFile};
use pwgs::lambda::{self, LambdaCertificate};
use pwgs::search::{self, SearchConfig, SearchStep, Target};
use pwgs::spectral::{DEFAULT_SIZE_LIMIT, Tolerances, compute_spectrum_with_limit};
use pwgs::verify::{self, VerifyOptions};
use pwgs::{Bandwidth, Error, Graph, Spectrum, VertexSet};
use serde::Serialize;

use report::{Failure, Manifest, emit, read_file, render};

#[derive(Parser)]
#[command(name = "pwgs", version, about = "Sampling and reconstruction of bandlimited graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from a standard family
    Gen(GenArgs),
    /// Eigenvalues of the normalized Laplacian
    Spectrum(SpectrumArgs),
    /// Minimal Poincaré constant of a vertex set
    CertifyLambda(CertifyArgs),
    /// Frame bounds of a sampling set
    Frame(FrameArgs),
    /// Reconstruct a bandlimited signal from samples
    Reconstruct(ReconstructArgs),
    /// Greedily grow a lambda-set with lambda * omega < 1
    SearchLambda(SearchArgs),
    /// Shrink the vertex set while keeping a lower frame bound
    PruneSamples(PruneArgs),
    /// Run the sampling-theorem and lemma checks
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Path,
    Cycle,
    Complete,
    Box,
    Tree,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Vertex count (path, cycle, complete, random)
    #[arg(long)]
    n: Option<usize>,
    /// Side lengths of a lattice box, e.g. 4,5
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    /// Close the lattice box into a torus
    #[arg(long)]
    wrap: bool,
    /// Children per vertex at each level of a radial tree, e.g. 3,2,2
    #[arg(long, value_delimiter = ',')]
    branching: Vec<usize>,
    /// Extra-edge probability for random graphs
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct GraphArg {
    /// Graph JSON file
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    /// Largest vertex count accepted for dense spectral work
    #[arg(long, default_value_t = DEFAULT_SIZE_LIMIT)]
    size_limit: usize,
    /// Relative tolerance for eigenvalues at the band edge
    #[arg(long, default_value_t = 1e-9)]
    tie_tol: f64,
    /// Lower frame bounds at or below this count as rank deficient
    #[arg(long, default_value_t = 1e-10)]
    rank_tol: f64,
    /// Frame condition numbers above this are flagged
    #[arg(long, default_value_t = 1e8)]
    ill_conditioned: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OmegaArg {
    /// Bandwidth
    #[arg(long)]
    omega: Option<f64>,
    /// Bandwidth as the q-th quantile of the spectrum
    #[arg(long)]
    omega_quantile: Option<f64>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct OptOmegaArg {
    /// Also certify stable sampling on the complement at this bandwidth
    #[arg(long)]
    omega: Option<f64>,
    /// Same, with the bandwidth given as a spectrum quantile
    #[arg(long)]
    omega_quantile: Option<f64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SetArg {
    /// Comma-separated vertex ids, e.g. 0,2,5
    #[arg(long, allow_hyphen_values = true)]
    set: Option<String>,
    /// Vertex set JSON file
    #[arg(long)]
    set_file: Option<PathBuf>,
}

#[derive(Args)]
struct OutArg {
    /// Output file (stdout if omitted)
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    set: SetArg,
    /// Check the set against this constant
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    omega: OptOmegaArg,
    /// Random probes of the norm chain
    #[arg(long, default_value_t = frames::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct FrameArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    omega: OmegaArg,
    #[command(flatten)]
    set: SetArg,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    omega: OmegaArg,
    #[command(flatten)]
    set: SetArg,
    /// Sample CSV with rows vertex_id,real,imag on the sampling set
    #[arg(long)]
    samples: PathBuf,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    omega: OmegaArg,
    /// Largest admissible constant (default (1 - 1e-3) / omega)
    #[arg(long)]
    lambda_cap: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = search::DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    /// Random probes of the norm chain in the stability certificate
    #[arg(long, default_value_t = frames::DEFAULT_TRIALS)]
    trials: usize,
    /// Step log, one JSON object per line
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct PruneArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    omega: OmegaArg,
    /// Lower frame bound to keep (default: the floor guaranteed at the lambda cap)
    #[arg(long)]
    a_min: Option<f64>,
    /// Cap used for the default floor (default (1 - 1e-3) / omega)
    #[arg(long)]
    lambda_cap: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step log, one JSON object per line
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[command(flatten)]
    omega: OmegaArg,
    /// Seeded trials per randomized check
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    /// Base seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute slack on inequality checks
    #[arg(long, default_value_t = 1e-9)]
    slack: f64,
    /// Relative slack on inequality checks
    #[arg(long, default_value_t = 1e-9)]
    rel_slack: f64,
    #[command(flatten)]
    out: OutArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => return parse_failure(e),
    };
    if let Err(f) = configure_threads().and_then(|()| run(cli.command)) {
        eprintln!("{}", f.to_json());
        return ExitCode::from(f.exit_code());
    }
    ExitCode::SUCCESS
}

fn parse_failure(e: clap::Error) -> ExitCode {
    let code = match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        ErrorKind::InvalidSubcommand
        | ErrorKind::MissingSubcommand
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => report::EXIT_UNKNOWN_SUBCOMMAND,
        _ => report::EXIT_VALIDATION,
    };
    let kind = if code == report::EXIT_UNKNOWN_SUBCOMMAND {
        "UnknownSubcommand"
    } else {
        "Usage"
    };
    eprintln!("{}", report::error_json(kind, e.to_string().trim_end(), code));
    ExitCode::from(code)
}

/// Sizes the global thread pool from `PWGS_THREADS`.
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("PWGS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("PWGS_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")).into())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(a) => gen_graph(a),
        Command::Spectrum(a) => spectrum(a),
        Command::CertifyLambda(a) => certify_lambda(a),
        Command::Frame(a) => frame(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::SearchLambda(a) => search_lambda(a),
        Command::PruneSamples(a) => prune_samples(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn require<T>(value: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Error::InvalidParameter(format!("{flag} is required for family {family}")).into())
}

fn gen_graph(a: GenArgs) -> Result<(), Failure> {
    let family = match a.family {
        FamilyName::Path => Family::Path { n: require(a.n, "--n", "path")? },
        FamilyName::Cycle => Family::Cycle { n: require(a.n, "--n", "cycle")? },
        FamilyName::Complete => Family::Complete { n: require(a.n, "--n", "complete")? },
        FamilyName::Box => Family::LatticeBox {
            dims: require(Some(a.dims).filter(|d| !d.is_empty()), "--dims", "box")?,
            wraparound: a.wrap,
        },
        FamilyName::Tree => Family::RadialTree {
            branching: require(Some(a.branching).filter(|b| !b.is_empty()), "--branching", "tree")?,
        },
        FamilyName::Random => Family::RandomConnected {
            n: require(a.n, "--n", "random")?,
            p: a.p,
            seed: a.seed,
        },
    };
    let g = generate::generate(&family)?;
    let mut m = Manifest::new("gen");
    m.param("family", &family);
    m.graph_hash = Some(g.hash());
    emit(a.out.output.as_deref(), render(&m, &GraphFile::from(&g))?.as_bytes())
}

/// Graph, its spectrum under the requested tolerances, and a manifest echoing both.
struct Loaded {
    g: Graph,
    spec: Spectrum,
    manifest: Manifest,
}

fn load(command: &'static str, arg: &GraphArg) -> Result<Loaded, Failure> {
    let g = pio::read_graph(&read_file(&arg.graph)?[..])?;
    for (name, value) in [
        ("--tie-tol", arg.tie_tol),
        ("--rank-tol", arg.rank_tol),
        ("--ill-conditioned", arg.ill_conditioned),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")).into());
        }
    }
    let tolerances = Tolerances {
        tie_tol_rel: arg.tie_tol,
        rank_tol: arg.rank_tol,
        ill_conditioned: arg.ill_conditioned,
    };
    let spec = compute_spectrum_with_limit(&g, arg.size_limit)?.with_tolerances(tolerances);
    let mut manifest = Manifest::new(command);
    manifest.input("graph", &arg.graph);
    manifest.param("tolerances", tolerances);
    manifest.param("size_limit", arg.size_limit);
    manifest.graph_hash = Some(g.hash());
    Ok(Loaded { g, spec, manifest })
}

fn resolve_omega(
    spec: &Spectrum,
    omega: Option<f64>,
    quantile: Option<f64>,
    m: &mut Manifest,
) -> Result<Option<Bandwidth>, Failure> {
    let resolved = match (omega, quantile) {
        (Some(w), _) => Some(Bandwidth::new(w)?),
        (None, Some(q)) => Some(spec.quantile(q)?),
        (None, None) => None,
    };
    if let Some(w) = resolved {
        m.param("omega", w);
        m.param("omega_quantile", quantile);
    }
    Ok(resolved)
}

fn required_omega(spec: &Spectrum, arg: &OmegaArg, m: &mut Manifest) -> Result<Bandwidth, Failure> {
    let w = resolve_omega(spec, arg.omega, arg.omega_quantile, m)?;
    Ok(w.expect("clap enforces one of --omega / --omega-quantile"))
}

fn load_set(arg: &SetArg, n: usize, m: &mut Manifest) -> Result<VertexSet, Failure> {
    if let Some(path) = &arg.set_file {
        m.input("set", path);
        return Ok(pio::read_vertex_set(&read_file(path)?[..], n)?);
    }
    let text = arg.set.as_deref().unwrap_or_default();
    let ids = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Format(format!("vertex id {t:?} in --set is not a non-negative integer")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let set = VertexSet::new(n, ids)?;
    m.param("set", &set);
    Ok(set)
}

fn write_log(path: Option<&Path>, log: &[SearchStep], m: &mut Manifest) -> Result<(), Failure> {
    let Some(path) = path else {
        return Ok(());
    };
    let mut text = String::new();
    for step in log {
        text.push_str(&serde_json::to_string(step).map_err(Error::from)?);
        text.push('\n');
    }
    m.param("log", path.display().to_string());
    emit(Some(path), text.as_bytes())
}

fn spectrum(a: SpectrumArgs) -> Result<(), Failure> {
    let l = load("spectrum", &a.graph)?;
    emit(a.out.output.as_deref(), render(&l.manifest, &l.spec.export())?.as_bytes())
}

#[derive(Serialize)]
struct CertifyBody {
    #[serde(flatten)]
    certificate: LambdaCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_claim: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_lambda_set: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability: Option<StabilityCertificate>,
}

fn certify_lambda(a: CertifyArgs) -> Result<(), Failure> {
    let Loaded { g, spec, mut manifest } = load("certify-lambda", &a.graph)?;
    let s = load_set(&a.set, g.n(), &mut manifest)?;
    let omega = resolve_omega(&spec, a.omega.omega, a.omega.omega_quantile, &mut manifest)?;
    let (certificate, is_lambda_set) = match a.lambda {
        Some(claim) => {
            manifest.param("lambda", claim);
            let (ok, cert) = lambda::is_lambda_set(&g, &s, claim)?;
            (cert, Some(ok))
        }
        None => (lambda::minimal_lambda(&g, &s)?, None),
    };
    let stability = match omega {
        Some(w) => {
            manifest.param("trials", a.trials);
            manifest.param("seed", a.seed);
            Some(frames::stability_certificate_with(&g, &spec, w, &s, a.trials, a.seed)?)
        }
        None => None,
    };
    let body = CertifyBody {
        certificate,
        lambda_claim: a.lambda,
        is_lambda_set,
        stability,
    };
    emit(a.out.output.as_deref(), render(&manifest, &body)?.as_bytes())
}

#[derive(Serialize)]
struct FrameBody {
    #[serde(flatten)]
    report: FrameReport,
    /// Bound on the Poincaré constant of the complement, when it applies.
    complement_bound: Option<SamplingLambdaBound>,
}

fn frame(a: FrameArgs) -> Result<(), Failure> {
    let Loaded { g, spec, mut manifest } = load("frame", &a.graph)?;
    let omega = required_omega(&spec, &a.omega, &mut manifest)?;
    let w = load_set(&a.set, g.n(), &mut manifest)?;
    let report = frames::frame_bounds(&spec, omega, &w)?;
    let complement_bound = if omega.value() > 0.0 && w.len() < g.n() && report.is_sampling_set {
        Some(frames::lambda_bound_from_sampling(&g, &spec, omega, &w)?)
    } else {
        None
    };
    let body = FrameBody {
        report,
        complement_bound,
    };
    emit(a.out.output.as_deref(), render(&manifest, &body)?.as_bytes())
}

fn reconstruct(a: ReconstructArgs) -> Result<(), Failure> {
    let Loaded { g, spec, mut manifest } = load("reconstruct", &a.graph)?;
    let omega = required_omega(&spec, &a.omega, &mut manifest)?;
    let w = load_set(&a.set, g.n(), &mut manifest)?;
    manifest.input("samples", &a.samples);
    let samples = pio::read_samples(&read_file(&a.samples)?[..], &w)?;
    let f = frames::reconstruct(&spec, omega, &w, &samples)?;
    // the manifest rides along as a comment line, which the signal reader skips
    let mut out = format!("# {}\n", serde_json::to_string(&manifest).map_err(Error::from)?).into_bytes();
    pio::write_signal(&mut out, &f)?;
    emit(a.out.output.as_deref(), &out)
}

fn search_config(omega: Bandwidth, target: Target, cap: Option<f64>, seed: u64, m: &mut Manifest) -> SearchConfig {
    let mut cfg = SearchConfig::new(omega, target);
    if let Some(cap) = cap {
        cfg.lambda_cap = cap;
    }
    cfg.seed = seed;
    m.param("lambda_cap", cfg.lambda_cap);
    m.param("seed", seed);
    cfg
}

#[derive(Serialize)]
struct SearchBody {
    certificate: LambdaCertificate,
    stability: StabilityCertificate,
}

fn search_lambda(a: SearchArgs) -> Result<(), Failure> {
    let Loaded { g, spec, mut manifest } = load("search-lambda", &a.graph)?;
    let omega = required_omega(&spec, &a.omega, &mut manifest)?;
    let mut cfg = search_config(omega, Target::MaximizeRemoved, a.lambda_cap, a.seed, &mut manifest);
    cfg.max_iterations = a.max_iterations;
    manifest.param("max_iterations", a.max_iterations);
    manifest.param("trials", a.trials);
    let found = search::greedy_lambda_set(&g, &spec, &cfg)?;
    let stability = frames::stability_certificate_with(&g, &spec, omega, &found.certificate.subset, a.trials, a.seed)?;
    write_log(a.log.as_deref(), &found.log, &mut manifest)?;
    let body = SearchBody {
        certificate: found.certificate,
        stability,
    };
    emit(a.out.output.as_deref(), render(&manifest, &body)?.as_bytes())
}

#[derive(Serialize)]
struct PruneBody {
    a_min: f64,
    sampling_set: VertexSet,
    report: FrameReport,
    /// Bound on the Poincaré constant of the removed vertices, when any were removed.
    complement_bound: Option<SamplingLambdaBound>,
}

fn prune_samples(a: PruneArgs) -> Result<(), Failure> {
    let Loaded { g, spec, mut manifest } = load("prune-samples", &a.graph)?;
    let omega = required_omega(&spec, &a.omega, &mut manifest)?;
    let cfg = search_config(omega, Target::MinimizeSamples, a.lambda_cap, a.seed, &mut manifest);
    let a_min = match a.a_min {
        Some(x) => x,
        None => {
            cfg.validate()?;
            cfg.frame_floor(spec.omega_max())
        }
    };
    manifest.param("a_min", a_min);
    let found = search::prune_sampling_set(&spec, omega, a_min, a.seed)?;
    write_log(a.log.as_deref(), &found.log, &mut manifest)?;
    let w = found.sampling_set;
    let complement_bound = if omega.value() > 0.0 && w.len() < g.n() && found.report.is_sampling_set {
        Some(frames::lambda_bound_from_sampling(&g, &spec, omega, &w)?)
    } else {
        None
    };
    let body = PruneBody {
        a_min,
        sampling_set: w,
        report: found.report,
        complement_bound,
    };
    emit(a.out.output.as_deref(), render(&manifest, &body)?.as_bytes())
}

fn verify_cmd(a: VerifyArgs) -> Result<(), Failure> {
    let Loaded { g, spec, mut manifest } = load("verify", &a.graph)?;
    let omega = required_omega(&spec, &a.omega, &mut manifest)?;
    if a.seeds == 0 {
        return Err(Error::InvalidParameter("--seeds must be at least 1".into()).into());
    }
    let opts = VerifyOptions {
        trials: a.seeds,
        seed: a.seed,
        slack: a.slack,
        rel_slack: a.rel_slack,
        ..VerifyOptions::default()
    };
    manifest.param("verify", opts);
    let result = verify::verify(&g, &spec, omega, &opts);
    emit(a.out.output.as_deref(), render(&manifest, &result)?.as_bytes())?;
    let failed = result.checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(Failure::Violations(failed));
    }
    Ok(())
}
