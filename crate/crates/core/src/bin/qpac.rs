use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qpac::harness::{
    birthday_demo, calibrate_constants, default_loop_ceiling, default_targets, gen_class, load_class, run_experiment,
    save_class, verify_block_lemma, verify_bsd, verify_fidelity_laws, verify_partition, verify_pgm_bound,
    verify_sen, ClassSource, ExperimentSpec, Generator, LearnerKind,
};
use qpac::learners::{Calibration, LearnerConfig, SampleKind};
use qpac::qmath::DIM_CAP;
use qpac::Error;

#[derive(Parser)]
#[command(name = "qpac", version, about = "PAC learning of quantum channels: experiments and verification suites")]
struct Cli {
    /// Master seed; every run with the same seed is reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest joint dimension the mixed learner may measure.
    #[arg(long, global = true)]
    dim_cap: Option<usize>,
    /// Trials, instances or repetitions, depending on the verb.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a concept class and write it as JSON.
    GenClass(GenArgs),
    /// Monte-Carlo runs of the pure-output learner.
    RunPure(RunArgs),
    /// Monte-Carlo runs of the mixed-output learner.
    RunMixed(RunArgs),
    /// Monte-Carlo runs of approximate state discrimination (single-input classes).
    RunAsd(RunArgs),
    /// Choose k_pure / k_mixed from the grid {1, 2, 4, 8, 16} and write the defaults file.
    Calibrate(CalibrateArgs),
    /// Numerical checks of the underlying lemmas.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Birthday-bound collision counts for the agnostic hard instance.
    BirthdayDemo {
        #[arg(long, value_delimiter = ',', default_values_t = [100, 400, 1600])]
        dims: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum Suite {
    PgmBound,
    BlockLemma,
    Sen {
        #[arg(long, value_delimiter = ',', default_values_t = [4, 16, 64])]
        dims: Vec<usize>,
    },
    FidelityLaws,
    Partition,
    Bsd {
        #[arg(long, default_value_t = 5000)]
        rounds: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    RandomPure,
    RandomMixed,
    String,
    Clustered,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Kind::RandomPure)]
    kind: Kind,
    /// Number of concepts.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Input dimension.
    #[arg(long, default_value_t = 1)]
    d1: usize,
    /// Output dimension.
    #[arg(long, default_value_t = 2)]
    d2: usize,
    /// Neighbour distance for `string`.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 2)]
    clusters: usize,
    /// Mixing weight of the random component for `clustered`.
    #[arg(long, default_value_t = 0.1)]
    spread: f64,
    /// Wishart rank for `random-mixed` (defaults to d2).
    #[arg(long)]
    rank: Option<usize>,
}

impl GenArgs {
    fn generator(&self) -> Generator {
        let (n, d1, d2) = (self.n, self.d1, self.d2);
        match self.kind {
            Kind::RandomPure => Generator::RandomPure { n, d1, d2 },
            Kind::RandomMixed => Generator::RandomMixed { n, d1, d2, rank: self.rank },
            Kind::String => Generator::String { n, d1, d2, step: self.step },
            Kind::Clustered => Generator::Clustered { n, d1, d2, clusters: self.clusters, spread: self.spread },
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Use this class file for every trial instead of generating one per trial.
    #[arg(long)]
    class: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Calibration file to read multipliers from (the shipped defaults otherwise).
    #[arg(long)]
    calibration: Option<PathBuf>,
    #[arg(long)]
    k_pure: Option<f64>,
    #[arg(long)]
    k_mixed: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    gamma_divisor: f64,
    /// Per-loop sample ceiling for the mixed learner (defaults to the largest the dimension cap
    /// allows for qubit outputs, a 64-dimensional joint state otherwise).
    #[arg(long)]
    max_loop_samples: Option<usize>,
    /// Multiplicative-weights rounds for the mixed learner's measurement.
    #[arg(long)]
    bsd_rounds: Option<usize>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["pure".to_string(), "mixed".to_string()])]
    kinds: Vec<String>,
    /// Upper bound on the total number of trials.
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("qpac: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation { .. } | Error::InternalInvariantViolation(_) | Error::CalibrationFailed(_) => 2,
        _ => 3,
    }
}

/// Runs the verb; `Ok(false)` means a verification failed.
fn run(cli: &Cli) -> qpac::Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    if cli.format == Format::Csv && !matches!(cli.command, Command::RunPure(_) | Command::RunMixed(_) | Command::RunAsd(_)) {
        return Err(Error::InvalidConfig("csv output is only available for the run-* verbs".into()));
    }
    let trials = |default: usize| cli.trials.unwrap_or(default);
    match &cli.command {
        Command::GenClass(args) => {
            let (class, _) = gen_class(&args.generator(), &mut rng)?;
            match &cli.out {
                Some(path) => save_class(path, &class)?,
                None => println!("{}", qpac::channels::class_to_json(&class)),
            }
            Ok(true)
        }
        Command::RunPure(args) => run_learner(cli, args, LearnerKind::Pure),
        Command::RunMixed(args) => run_learner(cli, args, LearnerKind::Mixed),
        Command::RunAsd(args) => run_learner(cli, args, LearnerKind::Asd),
        Command::Calibrate(args) => {
            let mut kinds = Vec::new();
            for k in &args.kinds {
                kinds.push(match k.as_str() {
                    "pure" => SampleKind::Pure,
                    "mixed" => SampleKind::Mixed,
                    other => return Err(Error::InvalidConfig(format!("unknown calibration kind {other:?}"))),
                });
            }
            let targets: Vec<_> =
                default_targets(trials(300)).into_iter().filter(|t| kinds.contains(&t.kind)).collect();
            let base = LearnerConfig { dim_cap: cli.dim_cap.unwrap_or(DIM_CAP), ..LearnerConfig::default() };
            let report = calibrate_constants(&targets, args.budget, &base, &mut rng)?;
            let path = cli.out.clone().unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("calibration.toml"));
            std::fs::write(&path, report.calibration.to_toml())?;
            println!("{}", to_json(&report));
            Ok(true)
        }
        Command::Verify { suite } => match suite {
            Suite::PgmBound => emit(cli, verify_pgm_bound(trials(1000), 8, 6, &mut rng)?, |r| r.passed),
            Suite::BlockLemma => emit(cli, verify_block_lemma(trials(1000), 12, &mut rng)?, |r| r.passed),
            Suite::FidelityLaws => emit(cli, verify_fidelity_laws(trials(10_000), 8, &mut rng)?, |r| r.passed),
            Suite::Partition => {
                emit(cli, verify_partition(trials(10_000), 64, &[0.05, 0.2, 0.5], &mut rng)?, |r| r.passed)
            }
            Suite::Sen { dims } => emit(cli, verify_sen(dims, trials(500), &mut rng)?, |r| r.passed),
            Suite::Bsd { rounds } => emit(cli, verify_bsd(trials(200), 8, 4, *rounds, 0.01, &mut rng)?, |r| r.passed),
        },
        Command::BirthdayDemo { dims } => emit(cli, birthday_demo(dims, trials(500), &mut rng)?, |r| r.passed),
    }
}

fn run_learner(cli: &Cli, args: &RunArgs, learner: LearnerKind) -> qpac::Result<bool> {
    let mut cal = match &args.calibration {
        Some(path) => Calibration::load(path)?,
        None => Calibration::shipped(),
    };
    cal.k_pure = args.k_pure.unwrap_or(cal.k_pure);
    cal.k_mixed = args.k_mixed.unwrap_or(cal.k_mixed);

    let source = match &args.class {
        Some(path) => ClassSource::Fixed { label: path.display().to_string(), class: load_class(path)? },
        None => ClassSource::Generate(args.gen.generator()),
    };
    let d2 = match &source {
        ClassSource::Fixed { class, .. } => class.out_dim(),
        ClassSource::Generate(_) => args.gen.d2,
    };
    let dim_cap = cli.dim_cap.unwrap_or(DIM_CAP);
    let defaults = LearnerConfig::default();
    let config = LearnerConfig {
        epsilon: args.epsilon,
        delta: args.delta,
        gamma_divisor: args.gamma_divisor,
        dim_cap,
        max_loop_samples: Some(args.max_loop_samples.unwrap_or_else(|| default_loop_ceiling(d2, dim_cap))),
        bsd_rounds: args.bsd_rounds.unwrap_or(defaults.bsd_rounds),
        ..defaults
    }
    .with_calibration(cal);
    config.validate()?;

    let spec = ExperimentSpec { source, learner, config, trials: cli.trials.unwrap_or(100), seed: cli.seed, out: None };
    let report = run_experiment(&spec)?;
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    write_out(cli, &text)?;
    Ok(true)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

fn emit<T: Serialize>(cli: &Cli, report: T, passed: impl Fn(&T) -> bool) -> qpac::Result<bool> {
    write_out(cli, &to_json(&report))?;
    Ok(passed(&report))
}

fn write_out(cli: &Cli, text: &str) -> qpac::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None if text.ends_with('\n') => print!("{text}"),
        None => println!("{text}"),
    }
    Ok(())
}
