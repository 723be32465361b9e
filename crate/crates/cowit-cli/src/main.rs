//! Command-line front end for the coherence witness toolkit.
//!
//! Every subcommand reads matrix files (see [`matfile`]), writes a single
//! canonical JSON document to standard output, and keeps diagnostics on
//! standard error. Exit codes are scriptable: 0 for a decided result,
//! 1 when an input breaks its kind's invariants, 2 when a comparison
//! lands in the undecided band, 3 for unreadable or malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cowit::compare::{self, StateComparability, StateVerdict, WitnessVerdict};
use cowit::mat::DensityMatrix;
use cowit::{oracle, robustness, witness, CoherenceWitness};
use cowit_cli::canonical::{render, Value};
use cowit_cli::matfile::{self, Kind};

#[derive(Parser)]
#[command(
    name = "cowit",
    version,
    about = "Coherence witnesses: construction, detection, comparability, robustness",
    after_help = "Outputs are canonical JSON (sorted keys, fixed-precision floats): \
                  identical inputs and seeds give byte-identical output.\n\
                  Exit codes: 0 decided, 1 invariant violation, 2 undecided verdict, \
                  3 unreadable or malformed input."
)]
struct Cli {
    /// Detection threshold: tr(W rho) below -TOL counts as detected.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Seed for random instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cap on solver refinement rounds (compare-witnesses, robustness).
    #[arg(long, global = true)]
    budget: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a matrix file against the invariants of its kind tag.
    Validate { file: PathBuf },

    /// Build a witness from a state file and print it as a witness file.
    Construct {
        /// projector: from a pure state; geometric: unit-norm distance
        /// witness; dephasing: difference from the dephased state.
        #[arg(long)]
        method: Method,
        state: PathBuf,
    },

    /// Evaluate tr(W rho) for a witness file and a state file.
    Detect { witness: PathBuf, state: PathBuf },

    /// Decide whether witnesses share a commonly detected state.
    CompareWitnesses {
        #[arg(num_args = 2.., required = true)]
        files: Vec<PathBuf>,
    },

    /// Decide whether states share a common witness.
    CompareStates {
        #[arg(num_args = 2.., required = true)]
        files: Vec<PathBuf>,
    },

    /// Compute the robustness of coherence of a state.
    Robustness { state: PathBuf },

    /// Generate a random instance as a canonical matrix file.
    Random {
        #[arg(long)]
        kind: RandomKind,
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Projector,
    Geometric,
    Dephasing,
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    State,
    Witness,
    Hermitian,
}

/// A command's successful output: the document and the exit code (0 for
/// decided results, 2 for undecided comparison verdicts).
struct Outcome {
    body: Value,
    code: u8,
}

impl Outcome {
    fn decided(body: Value) -> Self {
        Outcome { body, code: 0 }
    }
}

enum Failure {
    /// Unreadable, malformed, or ill-shaped input: exit code 3.
    Parse(String),
    /// Input parses but breaks the requested invariants: exit code 1.
    Invalid { code: &'static str, detail: String },
}

impl From<cowit::Error> for Failure {
    fn from(e: cowit::Error) -> Self {
        Failure::Invalid { code: error_code(&e), detail: e.to_string() }
    }
}

impl Failure {
    fn into_parts(self) -> (Value, u8, String) {
        match self {
            Failure::Parse(detail) => {
                let body = Value::object([
                    ("detail", Value::string(detail.clone())),
                    ("error", Value::string("parse_error")),
                ]);
                (body, 3, detail)
            }
            Failure::Invalid { code, detail } => {
                let body = Value::object([
                    ("detail", Value::string(detail.clone())),
                    ("error", Value::string(code)),
                ]);
                (body, 1, detail)
            }
        }
    }
}

fn error_code(e: &cowit::Error) -> &'static str {
    use cowit::Error::*;
    match e {
        DimensionTooSmall(_) => "dimension_too_small",
        BadEntryCount { .. } => "bad_entry_count",
        NonHermitianInput(_) => "non_hermitian_input",
        DimensionMismatch(_, _) => "dimension_mismatch",
        NotPositiveSemidefinite(_) => "not_positive_semidefinite",
        TraceNotOne(_) => "trace_not_one",
        NegativeProbability { .. } => "negative_probability",
        ProbabilitySumNotOne(_) => "probability_sum_not_one",
        NonUnitVector(_) => "non_unit_vector",
        NegativeDiagonal { .. } => "negative_diagonal",
        NoNegativeEigenvalue(_) => "no_negative_eigenvalue",
        IncoherentInput => "incoherent_input",
        InputIncoherent(_) => "input_incoherent",
        NotEnoughInputs { .. } => "not_enough_inputs",
        ExtractionFailed => "extraction_failed",
        NotDetected { .. } => "not_detected",
        WeightCountMismatch { .. } => "weight_count_mismatch",
        NonPositiveWeight { .. } => "non_positive_weight",
        TauUndefined(_) => "tau_undefined",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                // Exit 2 is reserved for undecided verdicts, so usage
                // mistakes land with the other input problems.
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", render(&outcome.body));
            ExitCode::from(outcome.code)
        }
        Err(failure) => {
            let (body, code, detail) = failure.into_parts();
            print!("{}", render(&body));
            eprintln!("error: {detail}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if !(cli.tol >= 0.0) {
        return Err(Failure::Parse(format!("tol: must be nonnegative, got {}", cli.tol)));
    }
    match &cli.command {
        Command::Validate { file } => cmd_validate(file),
        Command::Construct { method, state } => cmd_construct(*method, state),
        Command::Detect { witness, state } => cmd_detect(witness, state, cli.tol),
        Command::CompareWitnesses { files } => cmd_compare_witnesses(files, cli.budget),
        Command::CompareStates { files } => cmd_compare_states(files),
        Command::Robustness { state } => cmd_robustness(state, cli.budget),
        Command::Random { kind, dim } => cmd_random(*kind, *dim, cli.seed),
    }
}

/// Loads a file and insists its kind tag matches the argument's role.
fn load_kind(path: &Path, expected: Kind) -> Result<matfile::MatrixFile, Failure> {
    let file = matfile::read(path).map_err(Failure::Parse)?;
    if file.kind != expected {
        return Err(Failure::Parse(format!(
            "{}: kind: expected \"{}\" for this argument, got \"{}\"",
            path.display(),
            expected.label(),
            file.kind.label()
        )));
    }
    Ok(file)
}

fn load_state(path: &Path) -> Result<DensityMatrix, Failure> {
    Ok(DensityMatrix::new(load_kind(path, Kind::State)?.mat)?)
}

fn load_witness(path: &Path) -> Result<CoherenceWitness, Failure> {
    Ok(witness::validate(load_kind(path, Kind::Witness)?.mat)?)
}

fn cmd_validate(path: &Path) -> Result<Outcome, Failure> {
    let file = matfile::read(path).map_err(Failure::Parse)?;
    let body = match file.kind {
        Kind::State => {
            let rho = DensityMatrix::new(file.mat)?;
            Value::object([
                ("coherent", Value::Bool(cowit::is_coherent(&rho))),
                ("dim", Value::Int(rho.dim() as i64)),
                ("kind", Value::string("state")),
                ("valid", Value::Bool(true)),
            ])
        }
        Kind::Witness => {
            let w = witness::validate(file.mat)?;
            Value::object([
                ("dim", Value::Int(w.dim() as i64)),
                ("kind", Value::string("witness")),
                ("min_eigenvalue", Value::Float(w.min_eigenvalue())),
                ("normalized", Value::Bool(w.is_normalized())),
                ("operator_norm", Value::Float(w.operator_norm())),
                ("optimal", Value::Bool(w.is_optimal())),
                ("valid", Value::Bool(true)),
            ])
        }
        Kind::Hermitian => Value::object([
            ("dim", Value::Int(file.mat.dim() as i64)),
            ("frobenius_norm", Value::Float(file.mat.frobenius_norm())),
            ("kind", Value::string("hermitian")),
            ("valid", Value::Bool(true)),
        ]),
    };
    Ok(Outcome::decided(body))
}

fn cmd_construct(method: Method, path: &Path) -> Result<Outcome, Failure> {
    let rho = load_state(path)?;
    let w = match method {
        Method::Projector => {
            let psi = rho.as_pure(1e-8).ok_or(Failure::Invalid {
                code: "not_pure",
                detail: "projector construction needs a pure input state \
                         (largest eigenvalue within 1e-8 of one)"
                    .into(),
            })?;
            witness::projector_witness(&psi)?
        }
        Method::Geometric => witness::geometric_witness(&rho)?,
        Method::Dephasing => witness::dephasing_witness(&rho)?,
    };
    Ok(Outcome::decided(matfile::to_value(Kind::Witness, w.matrix())))
}

fn cmd_detect(witness_path: &Path, state_path: &Path, tol: f64) -> Result<Outcome, Failure> {
    let w = load_witness(witness_path)?;
    let rho = load_state(state_path)?;
    let report = w.detect_with_threshold(&rho, tol)?;
    Ok(Outcome::decided(Value::object([
        ("detected", Value::Bool(report.detected)),
        ("margin", Value::Float(report.margin)),
        ("threshold", Value::Float(tol)),
        ("value", Value::Float(report.value)),
    ])))
}

fn witness_verdict_label(verdict: WitnessVerdict) -> &'static str {
    match verdict {
        WitnessVerdict::Incomparable => "incomparable",
        WitnessVerdict::Comparable => "comparable",
        WitnessVerdict::Marginal => "marginal",
    }
}

fn state_verdict_label(verdict: StateVerdict) -> &'static str {
    match verdict {
        StateVerdict::Incomparable => "incomparable",
        StateVerdict::Comparable => "comparable",
        StateVerdict::Marginal => "marginal",
        StateVerdict::DegenerateBoundary => "degenerate_boundary",
    }
}

fn cmd_compare_witnesses(files: &[PathBuf], budget: Option<usize>) -> Result<Outcome, Failure> {
    let witnesses: Vec<CoherenceWitness> =
        files.iter().map(|p| load_witness(p)).collect::<Result<_, _>>()?;
    let report = match budget {
        Some(rounds) => compare::compare_witnesses_with_budget(&witnesses, rounds)?,
        None => compare::compare_witnesses(&witnesses)?,
    };
    let mut entries = vec![
        ("optimum", Value::Float(report.optimum)),
        ("verdict", Value::string(witness_verdict_label(report.verdict))),
    ];
    if let Some(weights) = &report.psd_certificate {
        entries.push(("weights", Value::floats(weights.weights().iter().copied())));
    }
    if let Some(rho) = &report.common_state {
        entries.push(("common_state", matfile::to_value(Kind::State, rho.matrix())));
    }
    let code = if report.verdict == WitnessVerdict::Marginal { 2 } else { 0 };
    Ok(Outcome { body: Value::object(entries), code })
}

fn cmd_compare_states(files: &[PathBuf]) -> Result<Outcome, Failure> {
    let states: Vec<DensityMatrix> =
        files.iter().map(|p| load_state(p)).collect::<Result<_, _>>()?;
    // The two-state path pins mixture weights entry by entry and resolves
    // boundary cases more finely, so prefer it when it applies.
    let report: StateComparability = if states.len() == 2 {
        compare::compare_two_states(&states[0], &states[1])?
    } else {
        compare::compare_states(&states)?
    };
    let mut entries =
        vec![("verdict", Value::string(state_verdict_label(report.verdict)))];
    if let Some(weights) = &report.mixture_certificate {
        entries.push(("weights", Value::floats(weights.weights().iter().copied())));
    }
    if let Some(w) = &report.common_witness {
        entries.push(("common_witness", matfile::to_value(Kind::Witness, w.matrix())));
    }
    if let Some(subset) = &report.boundary_subset {
        entries.push((
            "boundary_subset",
            Value::Array(subset.iter().map(|&i| Value::Int(i as i64)).collect()),
        ));
    }
    let code = match report.verdict {
        StateVerdict::Marginal | StateVerdict::DegenerateBoundary => 2,
        _ => 0,
    };
    Ok(Outcome { body: Value::object(entries), code })
}

fn cmd_robustness(path: &Path, budget: Option<usize>) -> Result<Outcome, Failure> {
    let rho = load_state(path)?;
    let result = match budget {
        Some(rounds) => robustness::robustness_with_budget(&rho, rounds),
        None => robustness::robustness(&rho),
    };
    let mixture_weight = if result.tau.is_some() {
        Value::Float(1.0 / (1.0 + result.value))
    } else {
        Value::Null
    };
    let tau = match &result.tau {
        Some(t) => matfile::to_value(Kind::State, t.matrix()),
        None => Value::Null,
    };
    Ok(Outcome::decided(Value::object([
        ("converged", Value::Bool(result.converged)),
        ("delta", Value::floats(result.delta.probabilities().iter().copied())),
        ("diagonal", Value::floats(result.diagonal.iter().copied())),
        ("gap", Value::Float(result.gap)),
        ("mixture_weight", mixture_weight),
        ("tau", tau),
        ("value", Value::Float(result.value)),
    ])))
}

fn cmd_random(kind: RandomKind, dim: usize, seed: u64) -> Result<Outcome, Failure> {
    if dim == 0 || dim > matfile::MAX_DIM {
        return Err(Failure::Parse(format!(
            "dim: must be between 1 and {}, got {dim}",
            matfile::MAX_DIM
        )));
    }
    if matches!(kind, RandomKind::Witness) && dim < 2 {
        return Err(Failure::Parse("dim: witnesses need dimension at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = match kind {
        RandomKind::State => {
            matfile::to_value(Kind::State, oracle::random_density(dim, &mut rng).matrix())
        }
        RandomKind::Witness => {
            matfile::to_value(Kind::Witness, oracle::random_witness(dim, &mut rng).matrix())
        }
        RandomKind::Hermitian => {
            matfile::to_value(Kind::Hermitian, &oracle::random_hermitian(dim, &mut rng))
        }
    };
    Ok(Outcome::decided(body))
}
