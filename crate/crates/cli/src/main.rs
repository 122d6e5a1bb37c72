use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tdlhf_cli::output::{with_output, Format};
use tdlhf_cli::selftest::{self, Level, CRITERIA};
use tdlhf_cli::sweep::{mux, static_fx, sweep, Quantity, Spacing, StaticRequest, SweepRequest};
use tdlhf_cli::{tdlhf, CliError, CliResult};

/// Exchange kernel of the electron gas from the time-dependent localized
/// Hartree-Fock potential, and a one-dimensional real-time solver.
///
/// Exit status: 0 success, 1 self-test failure, 2 bad arguments, 3 numerical
/// non-convergence, 4 I/O.
#[derive(Parser)]
#[command(name = "tdlhf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    rs: f64,
    /// Wave vector in units of k_F.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Frequencies in units of eps_F.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    omega_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    omega_max: f64,
    #[arg(long, default_value_t = 300)]
    omega_count: usize,
    /// Broadening in units of eps_F.
    #[arg(long, default_value_t = 1e-3)]
    eta: f64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Use the brute-force oracles instead of the fast path (slow).
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    output: Output,
}

impl SweepArgs {
    fn request(&self, quantity: Quantity, kernel: bool) -> SweepRequest {
        SweepRequest {
            r_s: self.rs,
            q_over_kf: self.q,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_count: self.omega_count,
            eta_over_epsf: self.eta,
            quantity,
            rel_tol: self.tol,
            oracle: self.oracle,
            kernel,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exchange kernel f_x(q, omega).
    Fx(SweepArgs),
    /// Dielectric function with and without the exchange kernel.
    Eps {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Drop the exchange kernel (both columns become Lindhard).
        #[arg(long)]
        no_kernel: bool,
    },
    /// Lindhard function chi_s(q, omega).
    Chi(SweepArgs),
    /// Static kernel f_x(q, 0) and its large-q asymptote.
    StaticFx {
        #[arg(long)]
        rs: f64,
        #[arg(long, default_value_t = 0.01)]
        q_min: f64,
        #[arg(long, default_value_t = 10.0)]
        q_max: f64,
        #[arg(long, default_value_t = 200)]
        q_count: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Linear)]
        spacing: Spacing,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Exchange shear modulus.
    Mux {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0, 4.0, 5.0])]
        rs: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// One-dimensional TD-LHF from a JSON run configuration.
    Tdlhf {
        #[command(subcommand)]
        action: TdlhfAction,
    },
    /// Acceptance checks; the report is deterministic, timings go to stderr.
    Selftest {
        #[arg(value_enum)]
        level: Level,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TdlhfAction {
    /// Ground state only.
    Scf(TdlhfArgs),
    /// Ground state and propagation.
    Run(TdlhfArgs),
}

#[derive(Args)]
struct TdlhfArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// A reader closing the pipe early (`tdlhf fx ... | head`) is not an error.
fn io_result(r: std::io::Result<()>, path: Option<&std::path::Path>) -> CliResult<()> {
    match r {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe && path.is_none() => Ok(()),
        Err(e) => Err(CliError::Io(match path {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        })),
        Ok(()) => Ok(()),
    }
}

impl Output {
    fn emit(&self, table: &tdlhf_cli::output::Table) -> CliResult<()> {
        io_result(table.emit(self.out.as_deref(), self.format), self.out.as_deref())
    }
}

fn run_selftest(level: Level, out: Option<PathBuf>) -> CliResult<bool> {
    let mut text = selftest::render_header(level);
    let mut all = true;
    for (id, _) in CRITERIA {
        let start = Instant::now();
        let report = selftest::criterion(id, level);
        eprintln!("timing criterion={id} seconds={:.3}", start.elapsed().as_secs_f64());
        all &= report.passed();
        text.push_str(&selftest::render(&report));
    }
    io_result(with_output(out.as_deref(), |w| w.write_all(text.as_bytes())), out.as_deref())?;
    Ok(all)
}

fn dispatch(command: Command) -> CliResult<bool> {
    match command {
        Command::Fx(a) => a.output.emit(&sweep(&a.request(Quantity::Fx, true))?)?,
        Command::Chi(a) => a.output.emit(&sweep(&a.request(Quantity::Chi, true))?)?,
        Command::Eps { sweep: a, no_kernel } => a.output.emit(&sweep(&a.request(Quantity::Eps, !no_kernel))?)?,
        Command::StaticFx { rs, q_min, q_max, q_count, spacing, tol, output } => {
            let req = StaticRequest { r_s: rs, q_min, q_max, q_count, spacing, rel_tol: tol };
            output.emit(&static_fx(&req)?)?
        }
        Command::Mux { rs, output } => output.emit(&mux(&rs)?)?,
        Command::Tdlhf { action: TdlhfAction::Scf(a) } => {
            let report = tdlhf::scf(&a.config, &a.out, a.format)?;
            let summary = serde_json::to_string(&report).map_err(|e| CliError::Io(e.to_string()))?;
            io_result(with_output(None, |w| writeln!(w, "{summary}")), None)?;
        }
        Command::Tdlhf { action: TdlhfAction::Run(a) } => {
            tdlhf::run(&a.config, &a.out, a.format)?;
        }
        Command::Selftest { level, out } => return run_selftest(level, out),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", CliError::Args(e.kind().to_string()).machine_line());
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
