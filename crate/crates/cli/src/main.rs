//! `ecs-qfi`: QFI and phase-precision bounds of entangled coherent states
//! and NOON states in a lossy interferometer.
//!
//! Exit codes: 0 success/pass, 1 usage error, 2 validation failure,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use ecs_qfi::closed_forms::{ecs_lossy_qfi, ecs_lossy_qfi_approx, noon_qfi};
use ecs_qfi::fock::{
    build_ecs_rho_analytic, build_noon_rho, build_noon_superposition, choose_cutoff,
    ecs_superposition, pure_qfi, BranchBasis, DEFAULT_PHI,
};
use ecs_qfi::model::{ecs_from_alpha_sq, ecs_from_mean_photons, NoonSpec, NoonSuperposition};
use ecs_qfi::qfi::{qfi_spectral, QfiBreakdown, QfiDecomposition};
use ecs_qfi::{EcsSpec, GeneratorKind, LossChannel};

use ecs_qfi_cli::figures::{write_figure, FigureId};
use ecs_qfi_cli::validate::{run_sweep, StateSelection, SweepConfig};
use ecs_qfi_cli::{exit_code, format};

#[derive(Parser)]
#[command(name = "ecs-qfi", version, about = "Phase-estimation precision of entangled coherent states and NOON states under photon loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the QFI and δφ_min of one probe state.
    Qfi(QfiArgs),
    /// Emit one figure's data set as CSV.
    Figure(FigureArgs),
    /// Run the oracle-vs-closed-form validation sweep.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateArg {
    Ecs,
    Noon,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    /// G = n̂₂
    N2,
    /// G = (n̂₂ - n̂₁)/2
    Halfdiff,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Exact closed form.
    Exact,
    /// Large-n̄ approximation 2n̄T + (n̄T)²e^(-2Rn̄).
    Approx,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ValidateStateArg {
    Ecs,
    Noon,
    Superposition,
    All,
}

#[derive(Args)]
struct QfiArgs {
    /// Probe state family.
    #[arg(long, value_enum)]
    state: StateArg,
    /// NOON photon number N (with --state noon).
    #[arg(long)]
    n: Option<u32>,
    /// ECS mean photon number n̄ (with --state ecs; alternative to --alpha-sq).
    #[arg(long, conflicts_with = "alpha_sq")]
    nbar: Option<f64>,
    /// ECS |α|² (with --state ecs; alternative to --nbar).
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<f64>,
    /// Transmission T of the loss channel [default: 1].
    #[arg(long, conflicts_with = "r")]
    t: Option<f64>,
    /// Loss rate R = 1 - T (alternative to --t).
    #[arg(long)]
    r: Option<f64>,
    /// Phase at which the oracle density matrix is evaluated.
    #[arg(long, default_value_t = DEFAULT_PHI)]
    phi: f64,
    /// Phase-shift generator. halfdiff applies to lossless evaluation only.
    #[arg(long, value_enum, default_value_t = GeneratorArg::N2)]
    generator: GeneratorArg,
    /// Cross-check against the Fock-space spectral oracle.
    #[arg(long)]
    oracle: bool,
    /// Poisson tail bound sizing the oracle's Fock cutoff.
    #[arg(long = "tail-tol", default_value_t = 1e-12)]
    tail_tol: f64,
    /// Closed-form flavor for the ECS.
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

#[derive(Args)]
struct FigureArgs {
    /// One of fig1a, fig1b, fig2a, fig2b, fig3.
    figure: FigureId,
    /// Output path [default: <figure>.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Which state families to sweep.
    #[arg(long, value_enum, default_value_t = ValidateStateArg::All)]
    state: ValidateStateArg,
    /// ECS |α|² grid [default: 0.5 1 2 4 9 16 25].
    #[arg(long = "alpha-sq", num_args = 1.., value_delimiter = ',')]
    alpha_sq: Option<Vec<f64>>,
    /// NOON photon numbers [default: 1 2 4 8 16].
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    n: Option<Vec<u32>>,
    /// Transmission grid [default: 0.5 0.8 0.9 0.99 1.0].
    #[arg(long, num_args = 1.., value_delimiter = ',', conflicts_with = "r")]
    t: Option<Vec<f64>>,
    /// Loss-rate grid (alternative to --t).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    r: Option<Vec<f64>>,
    /// Phase at which oracle density matrices are evaluated.
    #[arg(long, default_value_t = DEFAULT_PHI)]
    phi: f64,
    /// Poisson tail bound sizing the oracle's Fock cutoffs.
    #[arg(long = "tail-tol", default_value_t = 1e-12)]
    tail_tol: f64,
    /// Pass/fail threshold on the relative deviation.
    #[arg(long, default_value_t = 1e-8)]
    threshold: f64,
    /// Random superposition draws for the sub-Heisenberg check.
    #[arg(long, default_value_t = 200)]
    draws: usize,
    /// Also write the per-case report as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct CliFailure {
    code: u8,
    message: String,
}

impl CliFailure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit_code::USAGE,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: exit_code::NUMERICAL,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit_code::OK,
                _ => exit_code::USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliFailure> {
    match cli.command {
        Command::Qfi(args) => cmd_qfi(args).map(|()| exit_code::OK),
        Command::Figure(args) => cmd_figure(args).map(|()| exit_code::OK),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn resolve_channel(t: Option<f64>, r: Option<f64>) -> Result<LossChannel, CliFailure> {
    match (t, r) {
        (Some(t), None) => LossChannel::from_transmission(t),
        (None, Some(r)) => LossChannel::from_loss(r),
        (None, None) => Ok(LossChannel::lossless()),
        (Some(_), Some(_)) => unreachable!("clap rejects --t with --r"),
    }
    .map_err(|err| CliFailure::usage(err.to_string()))
}

fn print_value(key: &str, value: f64) {
    println!("{key} = {}", format::float(value));
}

fn print_breakdown(breakdown: &QfiBreakdown) {
    match breakdown.decomposition() {
        QfiDecomposition::ClassicalHeisenberg {
            classical,
            heisenberg,
        } => {
            print_value("F_Q_classical", *classical);
            print_value("F_Q_heisenberg", *heisenberg);
        }
        QfiDecomposition::ThreeTerm {
            classical_fisher,
            weighted_pure,
            coupling,
        } => {
            print_value("F_Q_classical_fisher", *classical_fisher);
            print_value("F_Q_weighted_pure", *weighted_pure);
            print_value("F_Q_coupling", *coupling);
        }
    }
    print_value("F_Q_total", breakdown.total());
    print_value("delta_phi_min", breakdown.delta_phi_min());
}

fn print_oracle(reference: f64, oracle: f64) {
    print_value("F_Q_oracle", oracle);
    let deviation = if reference == 0.0 {
        oracle.abs()
    } else {
        (reference - oracle).abs() / reference.abs()
    };
    print_value("oracle_relative_deviation", deviation);
}

fn cmd_qfi(args: QfiArgs) -> Result<(), CliFailure> {
    let channel = resolve_channel(args.t, args.r)?;
    let generator = match args.generator {
        GeneratorArg::N2 => GeneratorKind::ModeTwoNumber,
        GeneratorArg::Halfdiff => GeneratorKind::HalfDifference,
    };
    if generator == GeneratorKind::HalfDifference {
        if channel.transmission() < 1.0 {
            return Err(CliFailure::usage(
                "--generator halfdiff is defined for pure-state evaluation only; use --t 1",
            ));
        }
        if args.mode == ModeArg::Approx {
            return Err(CliFailure::usage(
                "--generator halfdiff has no large-n̄ approximation; use --mode exact",
            ));
        }
    }
    if !(args.tail_tol > 0.0 && args.tail_tol < 1.0) {
        return Err(CliFailure::usage("--tail-tol must lie in (0, 1)"));
    }
    match args.state {
        StateArg::Ecs => {
            if args.n.is_some() {
                return Err(CliFailure::usage("--n applies to --state noon only"));
            }
            let spec = match (args.alpha_sq, args.nbar) {
                (Some(alpha_sq), None) => ecs_from_alpha_sq(alpha_sq),
                (None, Some(nbar)) => ecs_from_mean_photons(nbar),
                (None, None) => {
                    return Err(CliFailure::usage(
                        "--state ecs needs --alpha-sq or --nbar",
                    ))
                }
                (Some(_), Some(_)) => unreachable!("clap rejects --alpha-sq with --nbar"),
            }
            .map_err(|err| CliFailure::usage(err.to_string()))?;
            qfi_for_ecs(&args, &spec, channel, generator)
        }
        StateArg::Noon => {
            if args.alpha_sq.is_some() || args.nbar.is_some() {
                return Err(CliFailure::usage(
                    "--alpha-sq/--nbar apply to --state ecs only",
                ));
            }
            let photons = args
                .n
                .ok_or_else(|| CliFailure::usage("--state noon needs --n"))?;
            let spec =
                NoonSpec::new(photons).map_err(|err| CliFailure::usage(err.to_string()))?;
            qfi_for_noon(&args, &spec, channel, generator)
        }
    }
}

fn qfi_for_ecs(
    args: &QfiArgs,
    spec: &EcsSpec,
    channel: LossChannel,
    generator: GeneratorKind,
) -> Result<(), CliFailure> {
    println!("state = ecs");
    print_value("alpha_sq", spec.alpha_sq());
    print_value("nbar", spec.mean_photons());
    print_value("transmission", channel.transmission());
    print_value("loss", channel.loss());
    let total = match (generator, args.mode) {
        (GeneratorKind::ModeTwoNumber, ModeArg::Exact) => {
            println!("generator = n2");
            println!("mode = exact");
            let breakdown = ecs_lossy_qfi(spec, channel);
            print_breakdown(&breakdown);
            breakdown.total()
        }
        (GeneratorKind::ModeTwoNumber, ModeArg::Approx) => {
            println!("generator = n2");
            println!("mode = approx");
            let breakdown = ecs_lossy_qfi_approx(spec.mean_photons(), channel);
            print_breakdown(&breakdown);
            breakdown.total()
        }
        (GeneratorKind::HalfDifference, _) => {
            println!("generator = halfdiff");
            println!("mode = exact");
            // pure-state value 4·Var(G) = ⟨n̂²⟩ = n̄(1 + |α|²)
            let total = spec.mean_photons() * (1.0 + spec.alpha_sq());
            print_value("F_Q_total", total);
            print_value("delta_phi_min", 1.0 / total.sqrt());
            total
        }
    };
    if args.oracle {
        let n_max = choose_cutoff(spec.alpha_sq(), args.tail_tol);
        let oracle = match generator {
            GeneratorKind::ModeTwoNumber => {
                build_ecs_rho_analytic(spec, channel, args.phi, n_max)
                    .map_err(|err| CliFailure::numerical(err.to_string()))
                    .and_then(|rho| {
                        qfi_spectral(&rho).map_err(|err| CliFailure::numerical(err.to_string()))
                    })?
            }
            GeneratorKind::HalfDifference => {
                let state = build_noon_superposition(
                    &ecs_superposition(spec, n_max),
                    args.phi,
                    generator,
                    BranchBasis::new(n_max),
                )
                .map_err(|err| CliFailure::numerical(err.to_string()))?;
                pure_qfi(&state, generator)
            }
        };
        print_oracle(total, oracle);
    }
    Ok(())
}

fn qfi_for_noon(
    args: &QfiArgs,
    spec: &NoonSpec,
    channel: LossChannel,
    generator: GeneratorKind,
) -> Result<(), CliFailure> {
    println!("state = noon");
    println!("photon_number = {}", spec.photon_number());
    print_value("transmission", channel.transmission());
    print_value("loss", channel.loss());
    match generator {
        GeneratorKind::ModeTwoNumber => println!("generator = n2"),
        GeneratorKind::HalfDifference => println!("generator = halfdiff"),
    }
    let total = noon_qfi(spec, channel);
    print_value("F_Q_total", total);
    print_value(
        "delta_phi_min",
        if total > 0.0 {
            1.0 / total.sqrt()
        } else {
            f64::INFINITY
        },
    );
    if args.oracle {
        let oracle = match generator {
            GeneratorKind::ModeTwoNumber => {
                let rho = build_noon_rho(spec, channel, args.phi);
                qfi_spectral(&rho).map_err(|err| CliFailure::numerical(err.to_string()))?
            }
            GeneratorKind::HalfDifference => {
                let superposition = NoonSuperposition::single(spec.photon_number() as usize);
                let state = build_noon_superposition(
                    &superposition,
                    args.phi,
                    generator,
                    BranchBasis::new(spec.photon_number() as usize),
                )
                .map_err(|err| CliFailure::numerical(err.to_string()))?;
                pure_qfi(&state, generator)
            }
        };
        print_oracle(total, oracle);
    }
    Ok(())
}

fn cmd_figure(args: FigureArgs) -> Result<(), CliFailure> {
    let output = args
        .out
        .unwrap_or_else(|| PathBuf::from(args.figure.default_output()));
    write_figure(args.figure, &output).map_err(|err| CliFailure::usage(format!("{err:#}")))?;
    println!("wrote {}", output.display());
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<u8, CliFailure> {
    if !(args.tail_tol > 0.0 && args.tail_tol < 1.0) {
        return Err(CliFailure::usage("--tail-tol must lie in (0, 1)"));
    }
    if args.threshold.is_nan() || args.threshold <= 0.0 {
        return Err(CliFailure::usage("--threshold must be positive"));
    }
    let defaults = SweepConfig::default();
    let transmissions = match (args.t, args.r) {
        (Some(t), None) => t,
        (None, Some(r)) => r.into_iter().map(|r| 1.0 - r).collect(),
        (None, None) => defaults.transmissions.clone(),
        (Some(_), Some(_)) => unreachable!("clap rejects --t with --r"),
    };
    for &t in &transmissions {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliFailure::usage(format!(
                "transmission {t} lies outside [0, 1]"
            )));
        }
    }
    for &alpha_sq in args.alpha_sq.iter().flatten() {
        if alpha_sq.is_nan() || alpha_sq < 0.0 {
            return Err(CliFailure::usage(format!("|α|² {alpha_sq} is negative")));
        }
    }
    let config = SweepConfig {
        states: match args.state {
            ValidateStateArg::Ecs => StateSelection::Ecs,
            ValidateStateArg::Noon => StateSelection::Noon,
            ValidateStateArg::Superposition => StateSelection::Superposition,
            ValidateStateArg::All => StateSelection::All,
        },
        alpha_sq: args.alpha_sq.unwrap_or(defaults.alpha_sq),
        noon_photons: args.n.unwrap_or(defaults.noon_photons),
        transmissions,
        phi: args.phi,
        tail_tol: args.tail_tol,
        threshold: args.threshold,
        draws: args.draws,
    };

    let report = run_sweep(&config);
    if report.cases.is_empty() {
        return Err(CliFailure::usage("the configured sweep contains no cases"));
    }
    for case in &report.cases {
        println!("{}", case.line());
    }
    println!("cases = {}", report.cases.len());
    println!("failures = {}", report.failures());
    println!("numerical_failures = {}", report.numerical_failures());
    print_value("max_relative_deviation", report.max_deviation());
    print_value("threshold", report.threshold);
    println!("result = {}", if report.passed() { "PASS" } else { "FAIL" });

    if let Some(path) = args.out {
        std::fs::write(&path, report.to_csv())
            .map_err(|err| CliFailure::usage(format!("writing {}: {err}", path.display())))?;
    }

    if report.numerical_failures() > 0 {
        Ok(exit_code::NUMERICAL)
    } else if report.failures() > 0 {
        Ok(exit_code::VALIDATION)
    } else {
        Ok(exit_code::OK)
    }
}
