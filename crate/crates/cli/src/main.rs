use clap::{Args, Parser, Subcommand};
use pqc_cli::{build, run_experiment, synthesize, write_report, CliError, Experiment, ExperimentConfig, TargetSpec};
use pqc_core::approx::{fnn_compare, FnnComparisonSpec};
use std::process::ExitCode;

/// Explicit parameterized-quantum-circuit approximators: synthesis, circuit
/// construction, simulation and error reports.
#[derive(Parser)]
#[command(name = "pqc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize QSP angles (experiments qsp and localization).
    Synth(ConfigArgs),
    /// Build the experiment's circuit and print its resource counts.
    Build {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write the serialized gate list to this path.
        #[arg(long, value_name = "PATH")]
        emit_circuit: Option<String>,
    },
    /// Evaluate the model and the target at the given points.
    Eval {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated coordinates; repeat for several points.
        #[arg(long = "x", value_name = "X1,X2,...", required = true)]
        points: Vec<String>,
    },
    /// Run the experiment and emit its error report; exits 0 iff every check passes.
    Report(ConfigArgs),
    /// Compare PQC and ReLU network resource formulas at equal error.
    CompareFnn {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda0: f64,
    },
}

/// Experiment configuration: a JSON file, individual flags, or both (flags win).
#[derive(Args)]
struct ConfigArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<String>,
    #[arg(long)]
    experiment: Option<String>,
    /// Builtin name or inline JSON such as '{"coefficients":[0,0,1]}'.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, visible_alias = "K")]
    k: Option<u32>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    points_per_axis: Option<usize>,
    #[arg(long)]
    l2_samples: Option<usize>,
    #[arg(long)]
    per_point: bool,
    #[arg(long, value_name = "PATH")]
    output: Option<String>,
}

impl ConfigArgs {
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match (&self.config, &self.experiment) {
            (Some(path), _) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            (None, Some(e)) => ExperimentConfig::new(e.parse()?),
            (None, None) => return Err(CliError::Config("give --config or --experiment".into())),
        };
        if let Some(e) = &self.experiment {
            cfg.experiment = e.parse::<Experiment>()?;
        }
        if let Some(t) = &self.target {
            cfg.target = Some(TargetSpec::parse(t)?);
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if self.$f.is_some() { cfg.$f = self.$f; } )* };
        }
        set!(
            d,
            n,
            k,
            delta,
            eps,
            s,
            beta,
            lambda0,
            shots,
            seed,
            tol,
            points_per_axis,
            l2_samples
        );
        cfg.per_point |= self.per_point;
        if self.output.is_some() {
            cfg.output_path = self.output;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad coordinate {v:?} in {s:?}")))
        })
        .collect()
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn run(cmd: Command) -> Result<bool, CliError> {
    match cmd {
        Command::Synth(args) => {
            println!("{}", pretty(&synthesize(&args.resolve()?)?));
            Ok(true)
        }
        Command::Build { config, emit_circuit } => {
            let cfg = config.resolve()?;
            let built = build(&cfg)?;
            if let Some(path) = emit_circuit {
                std::fs::write(path, built.circuit_text()?)?;
            }
            println!("{}", pretty(&built.resources()?));
            Ok(true)
        }
        Command::Eval { config, points } => {
            let built = build(&config.resolve()?)?;
            let rows = points
                .iter()
                .map(|p| built.eval_json(&parse_point(p)?))
                .collect::<Result<Vec<_>, _>>()?;
            println!("{}", pretty(&rows));
            Ok(true)
        }
        Command::Report(args) => {
            let cfg = args.resolve()?;
            let report = run_experiment(&cfg)?;
            println!("{}", write_report(&cfg, &report)?);
            Ok(report.pass)
        }
        Command::CompareFnn { d, s, eps, lambda0 } => {
            let c = fnn_compare(&FnnComparisonSpec::new(d, s, eps, lambda0)?)?;
            println!("{}", pretty(&c));
            Ok(true)
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("PQC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("PQC_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli.command)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
