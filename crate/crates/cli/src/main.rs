//! `wdistill`: run, sweep and sample W-state distillation protocols.

mod coeffs;
mod report;
mod sweep;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wdistill::locc::{self, Sampled, SessionRun};
use wdistill::montecarlo::{self, compare_frequencies, simulate_trials, TrialConfig, DEFAULT_THRESHOLD};
use wdistill::{cavity, CavityParams, Classification, Frame, LoccSession, ProtocolKind, TrialReport, WCoefficients};

use coeffs::{parse_triple, CoefficientInput};
use report::{Analytic, Branch, CavityInfo, MonteCarlo, ReplayOutput, RunOutput, SessionInfo};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wdistill::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use wdistill::Error as E;
        match self {
            CliError::Usage(_) | CliError::Json(_) => 2,
            CliError::Core(E::Solver(_) | E::NotUnitary { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "wdistill", version, about = "Distill |W3> from non-maximally entangled W-class states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every measurement branch of one protocol.
    Run(RunArgs),
    /// Tabulate branch probabilities over a grid of coefficients as CSV.
    Sweep(SweepArgs),
    /// Sample trials and test frequencies against the closed forms.
    Montecarlo(MonteCarloArgs),
    /// Replay an LOCC session log and print the final state.
    LoccReplay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Protocol1,
    Protocol2,
    Cavity,
}

impl From<ProtocolArg> for ProtocolKind {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Protocol1 => ProtocolKind::Protocol1,
            ProtocolArg::Protocol2 => ProtocolKind::Protocol2,
            ProtocolArg::Cavity => ProtocolKind::Cavity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FrameArg {
    Interaction,
    Lab,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args, Clone, Debug)]
#[group(required = true, multiple = false)]
struct CoefficientArgs {
    /// Amplitudes `a,b,c`; fractions such as `1/3` are accepted.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    amp: Option<[f64; 3]>,
    /// Squared amplitudes `a2,b2,c2`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    sq: Option<[f64; 3]>,
}

impl CoefficientArgs {
    fn input(&self) -> CoefficientInput {
        match (self.amp, self.sq) {
            (Some(v), _) => CoefficientInput::Amplitudes(v),
            (None, Some(v)) => CoefficientInput::Squares(v),
            (None, None) => unreachable!("clap requires one of --amp, --sq"),
        }
    }
}

#[derive(Args, Clone, Debug)]
struct CavityArgs {
    #[arg(long, value_enum, default_value_t = FrameArg::Interaction)]
    frame: FrameArg,
    /// Atom-field coupling.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Mode frequency.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Atomic transition frequency; defaults to `--omega`.
    #[arg(long)]
    omega0: Option<f64>,
    /// Fock-space truncation.
    #[arg(long, default_value_t = 1)]
    n_max: usize,
}

impl CavityArgs {
    fn params(&self) -> Result<CavityParams, CliError> {
        let frame = match self.frame {
            FrameArg::Interaction => Frame::Interaction,
            FrameArg::Lab => Frame::Lab,
        };
        Ok(CavityParams::new(
            self.omega,
            self.omega0.unwrap_or(self.omega),
            self.epsilon,
            self.n_max,
            frame,
        )?)
    }
}

#[derive(Args, Clone, Debug)]
struct RunArgs {
    #[command(flatten)]
    coefficients: CoefficientArgs,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Protocol2)]
    protocol: ProtocolArg,
    #[command(flatten)]
    cavity: CavityArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Sort the coefficients into `a >= b >= c` instead of rejecting them.
    #[arg(long)]
    allow_unsorted: bool,
    #[arg(long, env = "WDISTILL_SEED", default_value_t = 0)]
    seed: u64,
    /// Also sample this many trials and attach a frequency test.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Run once inside an LOCC session and write its JSON-lines log here.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::Protocol2)]
    protocol: ProtocolArg,
    /// Grid over b² as `lo:hi:n`.
    #[arg(long, value_parser = sweep::Range::parse, required_unless_present = "equal_ab", conflicts_with = "equal_ab")]
    b2: Option<sweep::Range>,
    /// Grid over c² as `lo:hi:n`.
    #[arg(long, value_parser = sweep::Range::parse)]
    c2: sweep::Range,
    /// Sweep the line `a = b` instead of the (b², c²) plane.
    #[arg(long)]
    equal_ab: bool,
    #[command(flatten)]
    cavity: CavityArgs,
    /// Output file, replaced atomically; stdout if omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
struct MonteCarloArgs {
    #[command(flatten)]
    coefficients: CoefficientArgs,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Protocol2)]
    protocol: ProtocolArg,
    #[command(flatten)]
    cavity: CavityArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    allow_unsorted: bool,
    #[arg(long, env = "WDISTILL_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Independent RNG streams, run in parallel.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Replace sampling with these counts, one per outcome class in the
    /// order W_SUCCESS[,BELL_SUCCESS],FAILURE.
    #[arg(long, value_delimiter = ',')]
    force_counts: Option<Vec<u64>>,
}

#[derive(Args, Clone, Debug)]
struct ReplayArgs {
    /// JSON-lines session log.
    log: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn resolve(c: &CoefficientArgs, allow_unsorted: bool) -> Result<coeffs::Resolved, CliError> {
    let r = coeffs::resolve(c.input(), allow_unsorted)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(r)
}

fn base_output(
    protocol: ProtocolKind,
    w: &WCoefficients,
    params: &CavityParams,
    permutation: Option<[usize; 3]>,
) -> Result<RunOutput, CliError> {
    let branches = protocol.run(w, params)?.iter().map(Branch::from_outcome).collect();
    let cavity = match protocol {
        ProtocolKind::Cavity => {
            let t = cavity::optimal_times(w, params.epsilon)?;
            Some(CavityInfo {
                dt1: t.dt1,
                dt2: t.dt2,
                frame: params.frame,
            })
        }
        _ => None,
    };
    Ok(RunOutput {
        protocol,
        coefficients: w.into(),
        analytic: Analytic::new(protocol, w),
        branches,
        cavity,
        montecarlo: None,
        permutation,
        session: None,
    })
}

fn sampled_report(
    protocol: ProtocolKind,
    w: &WCoefficients,
    params: &CavityParams,
    config: TrialConfig,
    forced: Option<&[u64]>,
) -> Result<TrialReport, CliError> {
    let Some(counts) = forced else {
        return Ok(simulate_trials(protocol, w, &TrialConfig { cavity: *params, ..config })?);
    };
    let classes = protocol.classes();
    if counts.len() != classes.len() {
        return Err(CliError::Usage(format!(
            "--force-counts needs {} values for {protocol}, got {}",
            classes.len(),
            counts.len()
        )));
    }
    let map: BTreeMap<Classification, u64> = classes.iter().copied().zip(counts.iter().copied()).collect();
    Ok(TrialReport::from_counts(protocol, w, &map, config.seed, config.workers)?)
}

fn session_run(protocol: ProtocolKind, w: &WCoefficients, params: &CavityParams, seed: u64) -> wdistill::Result<SessionRun> {
    let mut source = Sampled(montecarlo::worker_rng(seed, 0));
    match protocol {
        ProtocolKind::Protocol1 => locc::run_protocol1_session(w, &mut source),
        ProtocolKind::Protocol2 => locc::run_protocol2_session(w, &mut source),
        ProtocolKind::Cavity => locc::run_cavity_session(w, params, &mut source),
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn write_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(out: &RunOutput, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => write_stdout(&(serde_json::to_string_pretty(out)? + "\n")),
        Format::Csv => write_stdout(&out.to_csv()),
        Format::Human => write_stdout(&out.to_human()),
    }
}

fn cmd_run(args: RunArgs) -> Result<bool, CliError> {
    let r = resolve(&args.coefficients, args.allow_unsorted)?;
    let protocol = args.protocol.into();
    let params = args.cavity.params()?;
    let mut out = base_output(protocol, &r.w, &params, r.permutation)?;
    if let Some(n) = args.trials {
        let report = sampled_report(protocol, &r.w, &params, TrialConfig::new(n, args.seed), None)?;
        let verdict = compare_frequencies(&report, args.threshold);
        out.montecarlo = Some(MonteCarlo { report, verdict });
    }
    if let Some(path) = &args.log {
        let run = session_run(protocol, &r.w, &params, args.seed)?;
        sweep::write_atomic(path, run.session.to_jsonl().as_bytes())?;
        out.session = Some(SessionInfo {
            classification: run.classification,
            outcomes: run.outcomes.clone(),
            events: run.session.log().len(),
            log: path.display().to_string(),
        });
    }
    emit(&out, args.format)?;
    Ok(out.passed())
}

fn cmd_sweep(args: SweepArgs) -> Result<bool, CliError> {
    let grid = match args.b2 {
        Some(b2) => sweep::Grid::Plane { b2, c2: args.c2 },
        None => sweep::Grid::EqualAb { c2: args.c2 },
    };
    let rows = sweep::run(args.protocol.into(), &grid, &args.cavity.params()?)?;
    let bytes = sweep::to_csv(&rows)?;
    match &args.out {
        Some(path) => sweep::write_atomic(path, &bytes)?,
        None => write_stdout(&String::from_utf8_lossy(&bytes))?,
    }
    Ok(true)
}

fn cmd_montecarlo(args: MonteCarloArgs) -> Result<bool, CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let r = resolve(&args.coefficients, args.allow_unsorted)?;
    let protocol = args.protocol.into();
    let params = args.cavity.params()?;
    let config = TrialConfig {
        workers: args.workers.max(1),
        ..TrialConfig::new(args.trials, args.seed)
    };
    let report = sampled_report(protocol, &r.w, &params, config, args.force_counts.as_deref())?;
    let verdict = compare_frequencies(&report, args.threshold);
    let mut out = base_output(protocol, &r.w, &params, r.permutation)?;
    out.montecarlo = Some(MonteCarlo { report, verdict });
    emit(&out, args.format)?;
    Ok(out.passed())
}

fn cmd_replay(args: ReplayArgs) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&args.log)?;
    let session = LoccSession::replay_jsonl(&text)?;
    let out = ReplayOutput {
        events: session.log().len(),
        rejected: session.rejected(),
        owners: session
            .owners()
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        labels: session.state().labels().to_vec(),
        state: session.state().ket_string(1e-12),
    };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&out)? + "\n",
        Format::Csv | Format::Human => {
            let mut text = format!("events  {}\n", out.events);
            for (q, loc) in &out.owners {
                text += &format!("owner   {q} -> {loc}\n");
            }
            text + &format!("labels  {}\nstate   {}\n", out.labels.join(","), out.state)
        }
    };
    write_stdout(&text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Montecarlo(a) => cmd_montecarlo(a),
        Command::LoccReplay(a) => cmd_replay(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("statistical test failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
