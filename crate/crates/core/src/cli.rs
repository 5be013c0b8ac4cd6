//! Command-line front end. Every command prints one JSON [`ReportDocument`].
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 numeric failure or a
//! failed invariant.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cloning::{gm_state, BlochQubit};
use crate::error::{Error, Result};
use crate::mps::{decompose, reconstruct, DECOMPOSE_TOL};
use crate::protocol::{clone, table1_isometries, BranchPolicy, Mode, ProtocolConfig};
use crate::report::{MpsDump, Payload, ReportDocument, TableDump};
use crate::verify::{run_verify, ModeSelection, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "seqclone", version, about = "Sequential 1->M quantum cloning with a single ancilla")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the cloning protocol once on a Bloch-sphere input.
    Clone(CloneArgs),
    /// Check every invariant over a range of clone counts.
    Verify(VerifyArgs),
    /// Dump the closed-form isometry chain.
    Table(TableArgs),
    /// Dump the canonical MPS of the universal cloning state.
    Mps(MpsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Universal,
    PhaseCovariant,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Universal => Mode::Universal,
            ModeArg::PhaseCovariant => Mode::PhaseCovariant,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepModeArg {
    Both,
    Universal,
    PhaseCovariant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Auto,
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
}

#[derive(clap::Args, Debug)]
pub struct CloneArgs {
    #[arg(long, value_enum, default_value = "universal")]
    pub mode: ModeArg,
    /// Number of clones M.
    #[arg(long = "clones")]
    pub clones: usize,
    /// Polar angle in [0, π].
    #[arg(long, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub theta: f64,
    /// Azimuthal angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Measurement outcome: sampled from the seeded generator, or forced.
    #[arg(long, value_enum, default_value = "auto")]
    pub branch: BranchArg,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Rank and decoupling tolerance.
    #[arg(long, default_value_t = crate::DEFAULT_TOL)]
    pub tol: f64,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub m_min: usize,
    #[arg(long, default_value_t = 6)]
    pub m_max: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: SweepModeArg,
    /// Random protocol runs per clone count.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Rank and decoupling tolerance.
    #[arg(long, default_value_t = crate::DEFAULT_TOL)]
    pub tol: f64,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct TableArgs {
    /// Number of clones M.
    #[arg(long)]
    pub clones: usize,
    #[arg(long, value_enum, default_value = "universal")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct MpsArgs {
    /// Number of clones M.
    #[arg(long)]
    pub clones: usize,
    /// Input basis state whose cloning state is decomposed.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub input_state: u8,
    /// Relative truncation tolerance of the decomposition.
    #[arg(long, default_value_t = DECOMPOSE_TOL)]
    pub tol: f64,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Outcome {
    doc: ReportDocument,
    out: Option<PathBuf>,
    passed: bool,
}

fn cmd_clone(a: &CloneArgs) -> Result<Outcome> {
    let q = BlochQubit::new(a.theta, a.phi)?;
    let policy = match a.branch {
        BranchArg::Auto => BranchPolicy::Random,
        BranchArg::Zero => BranchPolicy::Forced0,
        BranchArg::One => BranchPolicy::Forced1,
    };
    let config =
        ProtocolConfig { mode: a.mode.into(), m: a.clones, branch_policy: policy, rng_seed: a.seed, tol: a.tol };
    let report = clone(&config, &q)?;
    let passed = report.all_passed();
    let echo = json!({
        "mode": config.mode,
        "clones": a.clones,
        "theta": a.theta,
        "phi": a.phi,
        "branch": config.branch_policy,
        "seed": a.seed,
        "tol": a.tol,
    });
    Ok(Outcome {
        doc: ReportDocument::new("clone", echo, Payload::Clone(Box::new(report))),
        out: a.out.clone(),
        passed,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let modes = match a.mode {
        SweepModeArg::Both => ModeSelection::Both,
        SweepModeArg::Universal => ModeSelection::Universal,
        SweepModeArg::PhaseCovariant => ModeSelection::PhaseCovariant,
    };
    let cfg = VerifyConfig { m_min: a.m_min, m_max: a.m_max, modes, samples: a.samples, seed: a.seed, tol: a.tol };
    let summary = run_verify(&cfg)?;
    let passed = summary.all_passed;
    let echo = serde_json::to_value(&cfg).expect("config serializes");
    Ok(Outcome { doc: ReportDocument::new("verify", echo, Payload::Verify(summary)), out: a.out.clone(), passed })
}

fn cmd_table(a: &TableArgs) -> Result<Outcome> {
    let config = ProtocolConfig::new(a.mode.into(), a.clones);
    config.validate(None)?;
    let coeffs = config.coefficients()?;
    let steps = table1_isometries(&coeffs)?;
    let dump = TableDump::new(config.mode, a.clones, coeffs.values().to_vec(), &steps);
    let passed = dump.max_isometry_defect < crate::protocol::ISOMETRY_TOL;
    let echo = json!({ "mode": config.mode, "clones": a.clones, "format": "json" });
    Ok(Outcome { doc: ReportDocument::new("table", echo, Payload::Table(dump)), out: a.out.clone(), passed })
}

fn cmd_mps(a: &MpsArgs) -> Result<Outcome> {
    ProtocolConfig::new(Mode::Universal, a.clones).validate(None)?;
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} outside (0, 1)", a.tol)));
    }
    let q = if a.input_state == 0 { BlochQubit::zero() } else { BlochQubit::one() };
    let state = gm_state(&q, a.clones)?;
    let form = decompose(&state, a.tol)?;
    let (_, deviation) = reconstruct(&form)?;
    let lambda_norms: Vec<f64> = form.lambdas.iter().map(|l| l.iter().map(|x| x * x).sum()).collect();
    let passed = deviation < 1e-10 && lambda_norms.iter().all(|s| (s - 1.0).abs() < 1e-10);
    let dump = MpsDump {
        m: a.clones,
        input_state: a.input_state,
        n_qubits: state.n_qubits(),
        chi: form.chi,
        bond_dims: form.bond_dims(),
        lambda_norms,
        reconstruction_norm_deviation: deviation,
        form,
    };
    let echo = json!({ "clones": a.clones, "input_state": a.input_state, "tol": a.tol });
    Ok(Outcome { doc: ReportDocument::new("mps", echo, Payload::Mps(dump)), out: a.out.clone(), passed })
}

fn emit(outcome: &Outcome, stdout: &mut dyn Write) -> std::io::Result<()> {
    let text = outcome.doc.to_json();
    match &outcome.out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => writeln!(stdout, "{text}"),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Clone(a) => cmd_clone(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
        Command::Mps(a) => cmd_mps(a),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = emit(&outcome, stdout) {
                let _ = writeln!(stderr, "error: cannot write report: {e}");
                return EXIT_USAGE;
            }
            if outcome.passed {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "error: one or more invariant checks failed");
                EXIT_NUMERIC
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numeric() {
                EXIT_NUMERIC
            } else {
                EXIT_USAGE
            }
        }
    }
}
