//! `qsim` command line: run circuits, dump fixtures, factor with VQE, serve the API.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. Diagnostics are a
//! single `error:` line on the error stream.

use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qsim_core::circuit::FIXTURE_NAMES;
use qsim_core::vqe::{
    optimize, AnsatzConfig, FactorizationProblem, VqeRunLog, COMMITTED_SEEDS, DEFAULT_CONVERGENCE,
    DEFAULT_LAYERS, DEFAULT_LEARNING_RATE, DEFAULT_MAX_ITERS,
};
use qsim_core::{
    builtin_circuit, max_error_rate, validate_catalog, Circuit, NoiseConfig, NoiseMode,
    SimulationMode,
};
use qsim_export::number::format_real;
use qsim_export::{export_bundle, export_vqe_run, simulate, ExportBundle, Metadata, RunOptions};

/// Environment variable capping the worker threads of the numerical kernels.
pub const THREADS_ENV: &str = "PSITRUM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

type CliResult = Result<(), CliError>;

#[derive(Parser, Debug)]
#[command(name = "qsim", version, about = "Gate-model quantum circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a circuit file (`.pqc` text, or `.json`).
    Run(RunArgs),
    /// Built-in validation circuits.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
    /// Factor an odd integer with the variational eigensolver.
    VqeFactor(VqeArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = qsim_service::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value_t = qsim_service::DEFAULT_BIND)]
        bind: IpAddr,
    },
    /// Check unitarity and algebraic identities of the gate catalog.
    ValidateGates,
}

#[derive(Subcommand, Debug)]
enum FixtureAction {
    List,
    Dump {
        name: String,
        /// Emit circuit JSON instead of the text format.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    circuit_file: PathBuf,
    #[arg(long)]
    noise_p: Option<f64>,
    #[arg(long, requires = "noise_p")]
    noise_mode: Option<NoiseMode>,
    #[arg(long, requires = "noise_p")]
    noise_seed: Option<u64>,
    #[arg(long, default_value = "matrix")]
    mode: SimulationMode,
    /// Print per-stage Bloch vectors.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    export_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VqeArgs {
    target: u64,
    #[arg(long)]
    bits_p: Option<u32>,
    #[arg(long)]
    bits_q: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_LAYERS)]
    layers: usize,
    #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
    lr: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_CONVERGENCE)]
    threshold: f64,
    #[arg(long, default_value_t = COMMITTED_SEEDS[0])]
    seed: u64,
    #[arg(long)]
    export_dir: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with_io(argv, &mut out, &mut err)
}

/// [`cli_main`] with explicit output streams.
pub fn run_with_io<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = configure_threads().and_then(|()| dispatch(cli.command, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message().replace('\n', " "));
            e.exit_code()
        }
    }
}

/// Sizes the global rayon pool from the environment; later calls are no-ops.
fn configure_threads() -> CliResult {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got `{raw}`"
        ))
    })?;
    // an already-built pool (repeated in-process calls) keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Run(args) => run(args, out),
        Command::Fixtures { action } => fixtures(action, out),
        Command::VqeFactor(args) => vqe_factor(args, out),
        Command::Serve { port, bind } => serve(SocketAddr::new(bind, port), out),
        Command::ValidateGates => validate_gates(out),
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
    let parsed = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        Circuit::parse_json(&source)
    } else {
        Circuit::parse_text(&source)
    };
    parsed.map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// Resolved configuration echoed into `metadata.json`.
#[derive(Serialize)]
struct RunConfig<'a> {
    circuit_file: &'a Path,
    qubits: usize,
    stages: usize,
    initial_bits: String,
    measured: &'a [usize],
    #[serde(flatten)]
    options: &'a RunOptions,
    threads: usize,
}

fn run(args: RunArgs, out: &mut dyn Write) -> CliResult {
    let circuit = load_circuit(&args.circuit_file)?;
    let n = circuit.num_qubits();
    let noise = match args.noise_p {
        Some(p) => Some(NoiseConfig {
            p,
            mode: args.noise_mode.unwrap_or_default(),
            seed: args.noise_seed.unwrap_or(0),
        }),
        None => circuit.noise().cloned(),
    };
    if let Some(cfg) = &noise {
        let max = max_error_rate(n);
        if !(0.0..=max).contains(&cfg.p) {
            return Err(CliError::Usage(format!(
                "--noise-p {} out of range: depolarizing rate for {n} qubit(s) must lie in [0, 4^{n}/(4^{n}-1)] = [0, {max}]",
                cfg.p
            )));
        }
    }
    let options = RunOptions {
        mode: args.mode,
        noise,
        include_trace: false,
        include_density: true,
    };
    let report = simulate(&circuit, &options).map_err(runtime)?;

    let io = |e: std::io::Error| runtime(e);
    writeln!(
        out,
        "qubits {n} stages {} mode {}",
        circuit.num_stages(),
        options.mode
    )
    .map_err(io)?;
    if let Some(cfg) = &options.noise {
        writeln!(out, "noise p {} mode {} seed {}", cfg.p, cfg.mode, cfg.seed).map_err(io)?;
    }
    if let Some(rho) = report.density() {
        writeln!(out, "purity {}", format_real(rho.purity())).map_err(io)?;
    }
    writeln!(out, "outcome probability").map_err(io)?;
    for (label, p) in report.probabilities.iter() {
        writeln!(out, "{label} {}", format_real(p)).map_err(io)?;
    }
    if args.trace {
        for (stage, vectors) in report.bloch_trace.iter().enumerate() {
            for (q, b) in vectors.iter().enumerate() {
                writeln!(
                    out,
                    "stage {stage} q{q} bloch {} {} {}",
                    format_real(b.x),
                    format_real(b.y),
                    format_real(b.z)
                )
                .map_err(io)?;
            }
        }
    }

    if let Some(dir) = &args.export_dir {
        let config = RunConfig {
            circuit_file: &args.circuit_file,
            qubits: n,
            stages: circuit.num_stages(),
            initial_bits: circuit
                .initial_bits()
                .iter()
                .rev()
                .map(|&b| if b { '1' } else { '0' })
                .collect(),
            measured: circuit.measured(),
            options: &options,
            threads: rayon::current_num_threads(),
        };
        let mut meta = Metadata::new("run", serde_json::to_value(&config).map_err(runtime)?)
            .with_circuit(&circuit);
        if report.rate_above_unity {
            meta = meta.with_flag("noise rate above 1: channel valid only in its global form");
        }
        let bundle = ExportBundle::from_report(&circuit, &report, meta).map_err(runtime)?;
        let files = export_bundle(&bundle, dir).map_err(runtime)?;
        writeln!(out, "wrote {} files to {}", files.len(), dir.display()).map_err(io)?;
    }
    Ok(())
}

fn fixtures(action: FixtureAction, out: &mut dyn Write) -> CliResult {
    match action {
        FixtureAction::List => {
            for name in FIXTURE_NAMES {
                writeln!(out, "{name}").map_err(runtime)?;
            }
        }
        FixtureAction::Dump { name, json } => {
            let circuit = builtin_circuit(&name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown fixture `{name}` (known: {})",
                    FIXTURE_NAMES.join(", ")
                ))
            })?;
            let text = if json {
                circuit.to_json() + "\n"
            } else {
                circuit.to_text()
            };
            out.write_all(text.as_bytes()).map_err(runtime)?;
        }
    }
    Ok(())
}

/// Default widths split the bit length of `n`, widening `p` until `n` fits.
fn default_widths(n: u64) -> (u32, u32) {
    let len = 64 - n.leading_zeros();
    let bits_q = (len / 2).max(1);
    let mut bits_p = len.div_ceil(2).max(1);
    while bits_p < 32 && ((1u128 << bits_p) - 1) * ((1u128 << bits_q) - 1) < n as u128 {
        bits_p += 1;
    }
    (bits_p, bits_q)
}

fn vqe_factor(args: VqeArgs, out: &mut dyn Write) -> CliResult {
    let (dp, dq) = default_widths(args.target);
    let problem = FactorizationProblem::new(
        args.target,
        args.bits_p.unwrap_or(dp),
        args.bits_q.unwrap_or(dq),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cfg = AnsatzConfig::seeded(args.layers, problem.free_qubits(), args.seed);
    cfg.learning_rate = args.lr;
    cfg.max_iters = args.iters;
    cfg.convergence_amplitude = args.threshold;
    cfg.validate(problem.free_qubits())
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let result = optimize(&problem, &cfg).map_err(runtime)?;
    let io = |e: std::io::Error| runtime(e);
    writeln!(
        out,
        "N {} bits {}/{} qubits {} layers {} seed {}",
        problem.target,
        problem.bits_p,
        problem.bits_q,
        problem.free_qubits(),
        cfg.layers,
        cfg.seed
    )
    .map_err(io)?;
    let first = result.cost_curve.first().copied().unwrap_or(f64::NAN);
    let last = result.cost_curve.last().copied().unwrap_or(f64::NAN);
    writeln!(out, "cost {} -> {}", format_real(first), format_real(last)).map_err(io)?;
    match result.converged_at {
        Some(i) => writeln!(out, "converged at iteration {i}").map_err(io)?,
        None => writeln!(out, "not converged after {} iterations", cfg.max_iters).map_err(io)?,
    }
    let (p, q) = result.recovered_factors;
    writeln!(
        out,
        "best {} -> {p} x {q} = {}",
        result.best_bitstring,
        p * q
    )
    .map_err(io)?;

    if let Some(dir) = &args.export_dir {
        let log = VqeRunLog::new(&problem, &cfg, &result);
        let config = serde_json::json!({
            "problem": problem,
            "ansatz": cfg,
            "threads": rayon::current_num_threads(),
        });
        let files =
            export_vqe_run(&log, &Metadata::new("vqe-factor", config), dir).map_err(runtime)?;
        writeln!(out, "wrote {} files to {}", files.len(), dir.display()).map_err(io)?;
    }
    Ok(())
}

fn serve(addr: SocketAddr, out: &mut dyn Write) -> CliResult {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(runtime)?;
    writeln!(out, "listening on http://{addr}/api/v1").map_err(runtime)?;
    out.flush().map_err(runtime)?;
    rt.block_on(qsim_service::serve(addr)).map_err(runtime)
}

fn validate_gates(out: &mut dyn Write) -> CliResult {
    let report = validate_catalog();
    let io = |e: std::io::Error| runtime(e);
    writeln!(
        out,
        "gates {} matrices {}",
        report.gates, report.matrices_checked
    )
    .map_err(io)?;
    for v in &report.violations {
        writeln!(
            out,
            "FAIL unitarity {} {:?} deviation {:e}",
            v.gate, v.params, v.deviation
        )
        .map_err(io)?;
    }
    for c in &report.identities {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        writeln!(out, "{tag} {} deviation {:e}", c.identity, c.deviation).map_err(io)?;
    }
    if report.passed() {
        writeln!(out, "catalog valid").map_err(io)?;
        Ok(())
    } else {
        Err(CliError::Runtime("gate catalog validation failed".into()))
    }
}
