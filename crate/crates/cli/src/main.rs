//! `fgmopt` command-line interface.
//!
//! Results go to stdout as JSON; progress goes to stderr as one JSON object
//! per stage. Exit status is 0 on success, 1 for invalid input and 2 for
//! runtime failures.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fgmopt::fem::{self, run_thermoelastic, FieldKind, ProblemConfig, StressMeasure};
use fgmopt::neural::{OperatorConfig, StressConfig};
use fgmopt::pipeline::{self, ExperimentConfig, ResultBundle};
use fgmopt::profile::{GradationGenes, Profile2D};
use fgmopt::Error;

#[derive(Parser)]
#[command(name = "fgmopt", about = "Gradation optimization of functionally graded plates", disable_version_flag = true)]
struct Cli {
    /// Worker threads for data generation and fitness evaluation [default: all cores].
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the build fingerprint and exit.
    #[arg(long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample profiles, label them with FEM and write an NDJSON dataset.
    GenData {
        /// Built-in problem id (problem1, problem2) or a problem JSON file.
        #[arg(long)]
        problem: String,
        /// Number of samples.
        #[arg(long)]
        count: usize,
        /// Sample `i` is drawn from a stream derived from `(seed, i)`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for the NDJSON files and manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the peak-stress surrogate on a dataset.
    TrainStress(TrainArgs),
    /// Train the temperature operator network on a dataset.
    TrainTemp(TrainArgs),
    /// Run an optimization experiment and write its result bundle.
    Optimize {
        /// Experiment JSON file.
        #[arg(long)]
        experiment: PathBuf,
        /// Overrides the experiment's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [default: next to the experiment file, named after it].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run FEM on one profile and print its summary.
    EvalProfile {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_enum)]
        stress_measure: Option<MeasureArg>,
    },
    /// Write a nodal field of one profile as an `x,y,value` CSV grid.
    ExportField {
        #[command(flatten)]
        profile: ProfileArgs,
        /// temperature, displacement, effective_stress or ceramic_fraction.
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the FEM verification suite; exits 2 if any check fails.
    Verify,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset directory written by gen-data.
    #[arg(long)]
    data: PathBuf,
    /// Model JSON to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Network and schedule JSON [default: the problem's settings].
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-epoch metrics CSV.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Built-in problem id or a problem JSON file.
    #[arg(long)]
    problem: String,
    /// Ceramic fraction `t^m` along `--axis`.
    #[arg(long, group = "source")]
    power_law: Option<f64>,
    #[arg(long, value_enum, default_value = "y")]
    axis: AxisArg,
    /// Profile2D JSON file.
    #[arg(long, group = "source")]
    profile: Option<PathBuf>,
    /// GradationGenes JSON file, decoded with the problem's scheme.
    #[arg(long, group = "source")]
    genes: Option<PathBuf>,
    /// Result bundle from optimize; uses its optimum.
    #[arg(long, group = "source")]
    result: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
    /// `((x / L) (y / H))^m`
    Xy,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Isothermal,
    Total,
    InPlane,
}

/// Error tagged with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        use fgmopt::fem::FemError;
        use fgmopt::ga::GaError;
        use fgmopt::neural::NeuralError;
        use fgmopt::pipeline::PipelineError;
        use fgmopt::profile::ProfileError;
        let e: Error = e.into();
        let invalid = match &e {
            Error::Profile(_) => true,
            Error::Fem(FemError::InvalidConfig(_) | FemError::PhiOutOfRange(_)) => true,
            Error::Neural(NeuralError::InvalidConfig(_) | NeuralError::DimensionMismatch { .. } | NeuralError::Format(_)) => true,
            Error::Ga(GaError::InvalidConfig(_) | GaError::MissingModel(_) | GaError::Profile(ProfileError::InvalidConfig(_))) => true,
            Error::Pipeline(
                PipelineError::UnknownProblem(_)
                | PipelineError::InvalidConfig(_)
                | PipelineError::MissingModel(_)
                | PipelineError::Json(_)
                | PipelineError::Ga(GaError::InvalidConfig(_)),
            ) => true,
            _ => false,
        };
        Self { code: if invalid { 1 } else { 2 }, message: e.to_string() }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn log_stage(stage: &str, start: Instant, extra: serde_json::Value) {
    let mut line = json!({ "stage": stage, "wall_s": start.elapsed().as_secs_f64() });
    if let (Some(obj), serde_json::Value::Object(more)) = (line.as_object_mut(), extra) {
        obj.extend(more);
    }
    eprintln!("{line}");
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure::invalid(format!("cannot parse {}: {e}", path.display())))
}

fn load_problem(id: &str) -> Outcome<ProblemConfig> {
    if let Some(p) = ProblemConfig::builtin(id) {
        return Ok(p);
    }
    let path = Path::new(id);
    if path.exists() {
        return Ok(ProblemConfig::from_json_file(path)?);
    }
    Err(Failure::invalid(format!("unknown problem '{id}' (expected problem1, problem2 or a JSON file)")))
}

fn print_json(value: &impl serde::Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::runtime(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn build_profile(args: &ProfileArgs, problem: &ProblemConfig) -> Outcome<Profile2D> {
    let (nx, ny, l, h) = (problem.nx, problem.ny, problem.length, problem.height);
    // `from_fn` hands the closure normalized coordinates.
    if let Some(m) = args.power_law {
        if !(m >= 0.0) {
            return Err(Failure::invalid("--power-law must be non-negative"));
        }
        let law = |t: f64| if t <= 0.0 { 0.0 } else { t.powf(m) };
        let axis = args.axis;
        return Ok(Profile2D::from_fn(nx, ny, l, h, move |x, y| match axis {
            AxisArg::X => law(x),
            AxisArg::Y => law(y),
            AxisArg::Xy => law(x * y),
        }));
    }
    let scheme = pipeline::scheme_for(problem);
    if let Some(path) = &args.profile {
        let p: Profile2D = parse_json(path)?;
        return Ok(p);
    }
    if let Some(path) = &args.genes {
        let genes: GradationGenes = parse_json(path)?;
        return Ok(scheme.genes_to_profile_2d(&genes)?);
    }
    if let Some(path) = &args.result {
        let bundle: ResultBundle = parse_json(path)?;
        return Ok(scheme.genes_to_profile_2d(&bundle.record.optimum.genes)?);
    }
    Err(Failure::invalid("one of --power-law, --profile, --genes or --result is required"))
}

fn create(path: &Path) -> Outcome<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    let f = fs::File::create(path).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn gen_data(problem: &str, count: usize, seed: u64, out: &Path) -> Outcome {
    let start = Instant::now();
    let problem = load_problem(problem)?;
    if count == 0 {
        return Err(Failure::invalid("--count must be positive"));
    }
    let manifest = pipeline::generate_dataset(&problem, count, seed, out)?;
    log_stage("gen-data", start, json!({ "count": count, "replaced": manifest.replaced }));
    print_json(&json!({
        "out": out,
        "problem": manifest.problem,
        "count": manifest.count,
        "train": manifest.train.len(),
        "test": manifest.test.len(),
        "files": manifest.files,
    }))
}

fn write_history(path: Option<&PathBuf>, history: &fgmopt::neural::History) -> Outcome {
    if let Some(p) = path {
        let mut w = create(p)?;
        history.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::runtime(e.to_string()))?;
    }
    Ok(())
}

fn train(args: &TrainArgs, operator: bool) -> Outcome {
    let start = Instant::now();
    let ds = pipeline::load_dataset(&args.data)?;
    log_stage("load-dataset", start, json!({ "train": ds.train.len(), "test": ds.test.len() }));
    let start = Instant::now();
    let (history, model_json) = if operator {
        let cfg: OperatorConfig = match &args.config {
            Some(p) => parse_json(p)?,
            None => OperatorConfig::default(),
        };
        let (model, history) = pipeline::train_operator(&ds, &cfg, args.seed)?;
        (history, model.to_json()?)
    } else {
        let cfg: StressConfig = match &args.config {
            Some(p) => parse_json(p)?,
            None if ds.manifest.problem == "problem1" => StressConfig::problem1(),
            None => StressConfig::problem2(),
        };
        let (model, history) = pipeline::train_stress(&ds, &cfg, args.seed)?;
        (history, model.to_json()?)
    };
    let mut w = create(&args.out)?;
    w.write_all(model_json.as_bytes()).and_then(|_| w.flush()).map_err(|e| Failure::runtime(e.to_string()))?;
    write_history(args.history.as_ref(), &history)?;
    let last = history.last().copied();
    let stage = if operator { "train-temp" } else { "train-stress" };
    log_stage(stage, start, json!({ "epochs": history.records.len() }));
    print_json(&json!({ "model": args.out, "final": last }))
}

fn optimize(experiment: &Path, seed: Option<u64>, out: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::load(experiment).map_err(|e| Failure::invalid(format!("{}: {e}", experiment.display())))?;
    let out = match out {
        Some(p) => p.to_path_buf(),
        None => experiment.with_extension("out"),
    };
    let outcome = pipeline::run_experiment(&cfg, seed, &out)?;
    let rec = &outcome.bundle.record;
    let (fem_evals, surrogate_evals) = rec.evaluation_counts();
    log_stage("optimize", start, json!({ "generations": rec.generations.len(), "fem_evaluations": fem_evals, "surrogate_evaluations": surrogate_evals }));
    print_json(&json!({
        "out": out,
        "files": outcome.files,
        "termination": rec.termination,
        "optimum_feasible": rec.optimum_feasible,
        "verified_feasible": rec.verified_feasible,
        "verification": rec.verification,
        "sigma_relative_error": rec.sigma_relative_error,
    }))
}

fn eval_profile(args: &ProfileArgs, measure: Option<MeasureArg>) -> Outcome {
    let start = Instant::now();
    let mut problem = load_problem(&args.problem)?;
    if let Some(m) = measure {
        problem.stress_measure = match m {
            MeasureArg::Isothermal => StressMeasure::Isothermal,
            MeasureArg::Total => StressMeasure::Total,
            MeasureArg::InPlane => StressMeasure::InPlane,
        };
    }
    let profile = build_profile(args, &problem)?;
    let result = run_thermoelastic(&profile, &problem)?;
    log_stage("eval-profile", start, json!({}));
    print_json(&result.summary(&problem.name))
}

fn export_field(args: &ProfileArgs, field: &str, out: &Path) -> Outcome {
    let start = Instant::now();
    let kind = FieldKind::parse(field).ok_or_else(|| Failure::invalid(format!("unknown field '{field}'")))?;
    let problem = load_problem(&args.problem)?;
    let profile = build_profile(args, &problem)?;
    let result = run_thermoelastic(&profile, &problem)?;
    let mut w = create(out)?;
    fem::write_field_csv(&mut w, &result, &profile, kind).and_then(|_| w.flush()).map_err(|e| Failure::runtime(e.to_string()))?;
    log_stage("export-field", start, json!({ "field": field }));
    print_json(&json!({ "out": out, "field": field }))
}

fn verify() -> Outcome {
    let start = Instant::now();
    let checks = fem::verify::run_checks()?;
    for c in &checks {
        println!("{}", serde_json::to_string(c).map_err(|e| Failure::runtime(e.to_string()))?);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    log_stage("verify", start, json!({ "checks": checks.len(), "failed": failed }));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::runtime(format!("verification failed: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Outcome {
    if cli.version {
        println!("{}", fgmopt::BUILD_FINGERPRINT);
        return Ok(());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::runtime(e.to_string()))?;
    }
    match cli.command {
        None => Err(Failure::invalid("no subcommand given; see --help")),
        Some(Command::GenData { problem, count, seed, out }) => gen_data(&problem, count, seed, &out),
        Some(Command::TrainStress(a)) => train(&a, false),
        Some(Command::TrainTemp(a)) => train(&a, true),
        Some(Command::Optimize { experiment, seed, out }) => optimize(&experiment, seed, out.as_deref()),
        Some(Command::EvalProfile { profile, stress_measure }) => eval_profile(&profile, stress_measure),
        Some(Command::ExportField { profile, field, out }) => export_field(&profile, &field, &out),
        Some(Command::Verify) => verify(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({ "error": f.message, "exit_code": f.code }));
            ExitCode::from(f.code)
        }
    }
}
