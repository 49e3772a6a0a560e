//! The `entprod` command-line tool.
//!
//! Exit codes: 0 on success, 2 for invalid input (including density
//! validation failures and usage errors), 3 for numeric or domain failures.

pub mod format;
pub mod io;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::decoherence::{limit_measures, measure_trajectory, EvolutionMode};
use crate::hilbert::{DensityOperator, Partition};
use crate::measure::{entanglement_production, LogBase};
use crate::register::{self, asymptotic_measure, Coupling, GridRange, Regime, RegisterParams};
use crate::spinor::{
    oracle, particle_measure, spin_spatial_asymptotic_spin_half, spin_spatial_measure,
    SpinHalfState, YoungDiagram,
};
use crate::states::{NamedState, Sign};
use crate::{tol, Error, C64};

use format::g12;
use io::{read_json, DecoherenceFile, StateFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Largest particle number accepted by `spinor particle --oracle`.
pub const ORACLE_MAX_N: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "entprod", version, about = "Entanglement production by quantum operators")]
pub struct Cli {
    /// Logarithm base for every reported ε.
    #[arg(long, global = true, default_value = "e", value_parser = LogBase::from_str)]
    pub log_base: LogBase,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ε of the operator stored in a state file.
    Measure(MeasureArgs),
    /// Write a named state and print its closed-form ε.
    States(StatesArgs),
    /// ε(T, h) of the two-qubit Ising register over a grid.
    Gibbs2q(Gibbs2qArgs),
    /// ε(t) of a dephasing bipartite system.
    Decohere(DecohereArgs),
    /// Spinor-system tables.
    #[command(subcommand)]
    Spinor(SpinorCommand),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    pub file: PathBuf,
    /// Blocks separated by `|`, factor indices by `,`, e.g. `0,1|2`.
    #[arg(long)]
    pub partition: Option<String>,
    /// Accept operators that are not density operators.
    #[arg(long)]
    pub general: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Epr,
    Bell,
    Ghz,
    Multicat,
    Multimode,
    Separable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    #[arg(long, value_enum)]
    pub kind: StateKind,
    /// Number of parties.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of modes (multimode); coefficients default to 1/√m.
    #[arg(long)]
    pub m: Option<usize>,
    /// Complex amplitudes such as `0.6,0.8i` or `0.5+0.5i,-0.5i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub coeffs: Vec<C64>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
    #[arg(long, value_enum, default_value = "plus")]
    pub sign: SignArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Gibbs2qArgs {
    #[arg(long, value_parser = Coupling::from_str)]
    pub coupling: Coupling,
    /// `start:end:points`
    #[arg(long, value_parser = parse_range)]
    pub t_range: GridRange,
    /// `start:end:points`
    #[arg(long, value_parser = parse_range)]
    pub h_range: GridRange,
    /// Append one column per asymptotic regime (`nan` outside its domain).
    #[arg(long)]
    pub asymptotics: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Lorentz,
}

#[derive(Debug, Args)]
pub struct DecohereArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub t_max: f64,
    /// Number of time points in `[0, t_max]`.
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SpinorCommand {
    /// `ε̄ = ln f_λ` for every spin-half diagram with `N` boxes.
    SpinSpatial {
        #[arg(long)]
        n: usize,
        /// Append the large-N approximation.
        #[arg(long)]
        asymptotic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Particle-partition ε of two-orbital spin-half bosons.
    Particle(ParticleArgs),
}

#[derive(Debug, Args)]
pub struct ParticleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, requires_all = ["sz", "iz"], conflicts_with = "table")]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "s")]
    pub sz: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "s")]
    pub iz: Option<f64>,
    /// Every valid `(S, S_z, I_z)`.
    #[arg(long)]
    pub table: bool,
    /// Cross-check against brute-force diagonalization.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERIC
            },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::validation(format!("i/o error: {e}"))
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("entprod: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    let base = cli.log_base;
    match &cli.command {
        Command::Measure(a) => cmd_measure(a, base),
        Command::States(a) => cmd_states(a, base),
        Command::Gibbs2q(a) => cmd_gibbs2q(a, base),
        Command::Decohere(a) => cmd_decohere(a, base),
        Command::Spinor(c) => cmd_spinor(c, base),
    }
}

fn output(path: Option<&PathBuf>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::validation(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> CmdResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn cmd_measure(a: &MeasureArgs, base: LogBase) -> CmdResult {
    let file: StateFile = read_json(&a.file)?;
    let op = file.operator()?;
    let partition = match (&a.partition, file.partition()?) {
        (Some(text), _) => Partition::parse(text, op.layout().factor_count())?,
        (None, Some(p)) => p,
        (None, None) => Partition::singletons(op.layout().factor_count()),
    };
    partition.check_layout(op.layout())?;
    let trace = op.trace().norm();
    if trace <= tol::TRACE_ZERO {
        return Err(Error::ZeroTrace(trace).into());
    }
    let validation = DensityOperator::validate(&op);
    if !a.general {
        if let Some(inv) = validation.violation() {
            return Err(Failure::validation(format!(
                "not a density operator: {inv} invariant violated \
                 (hermitian deviation {:.3e}, trace {:.3e}, min eigenvalue {:.3e}); \
                 pass --general to measure it anyway",
                validation.hermitian_deviation, validation.trace_value, validation.min_eigenvalue
            )));
        }
    }
    let report = entanglement_production(&op, &partition, base)?;
    let value = json!({
        "epsilon": report.epsilon,
        "log_base": base,
        "partition": partition.to_string(),
        "norms": {
            "numerator": report.norm_numerator,
            "denominator": report.norm_denominator,
        },
        "per_block_norms": report.per_block_norms,
        "validation": {
            "hermitian": validation.hermitian,
            "trace": validation.trace,
            "psd": validation.psd,
        },
    });
    write_json(&mut *output(None)?, &value)
}

fn named_state(a: &StatesArgs) -> std::result::Result<NamedState, Failure> {
    let sign = match a.sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    };
    let parties = |default: Option<usize>| {
        a.n.or(default)
            .ok_or_else(|| Failure::validation("--n is required for this kind"))
    };
    Ok(match a.kind {
        StateKind::Epr | StateKind::Bell => {
            if a.n.is_some_and(|n| n != 2) {
                return Err(Failure::validation("EPR and Bell states have two parties"));
            }
            if a.kind == StateKind::Epr {
                NamedState::Epr { sign }
            } else {
                NamedState::Bell { sign }
            }
        }
        StateKind::Ghz => NamedState::Ghz {
            parties: parties(None)?,
            sign,
        },
        StateKind::Multicat => match a.coeffs.as_slice() {
            [c1, c2] => NamedState::Multicat {
                parties: parties(None)?,
                c1: *c1,
                c2: *c2,
            },
            _ => return Err(Failure::validation("multicat needs --coeffs c1,c2")),
        },
        StateKind::Multimode => {
            let coeffs = match (a.m, a.coeffs.is_empty()) {
                (Some(m), true) => {
                    if m == 0 {
                        return Err(Failure::validation("--m must be positive"));
                    }
                    vec![C64::new(1.0 / (m as f64).sqrt(), 0.0); m]
                }
                (Some(m), false) if m != a.coeffs.len() => {
                    return Err(Failure::validation(format!(
                        "--m {m} disagrees with {} coefficients",
                        a.coeffs.len()
                    )))
                }
                (_, false) => a.coeffs.clone(),
                (None, true) => return Err(Failure::validation("multimode needs --m or --coeffs")),
            };
            NamedState::Multimode {
                parties: parties(None)?,
                coeffs,
            }
        }
        StateKind::Separable => {
            if a.weights.is_empty() {
                return Err(Failure::validation("separable needs --weights"));
            }
            NamedState::Separable {
                parties: parties(None)?,
                weights: a.weights.clone(),
            }
        }
    })
}

pub fn cmd_states(a: &StatesArgs, base: LogBase) -> CmdResult {
    let state = named_state(a)?;
    let built = state.build()?;
    let epsilon = state.closed_form_measure(base)?;
    let file = StateFile::from_operator(&built.rho, Some(&built.partition));
    let file_json = serde_json::to_value(&file).map_err(std::io::Error::from)?;
    let summary = json!({
        "kind": a.kind.to_possible_value().map(|v| v.get_name().to_string()),
        "epsilon": epsilon,
        "log_base": base,
        "partition": built.partition.to_string(),
    });
    match &a.out {
        Some(path) => {
            write_json(&mut *output(Some(path))?, &file_json)?;
            write_json(&mut *output(None)?, &summary)
        }
        None => {
            write_json(&mut *output(None)?, &file_json)?;
            eprintln!("{summary}");
            Ok(())
        }
    }
}

pub fn cmd_gibbs2q(a: &Gibbs2qArgs, base: LogBase) -> CmdResult {
    let rows = register::sweep(&a.t_range, &a.h_range, a.coupling)?;
    let regimes = Regime::for_coupling(a.coupling);
    let mut out = output(a.out.as_ref())?;
    let mut header = String::from("T,h,epsilon");
    if a.asymptotics {
        for r in regimes {
            header.push_str(",asym_");
            header.push_str(r.name());
        }
    }
    writeln!(out, "{header}")?;
    for row in rows {
        let mut line = format!(
            "{},{},{}",
            g12(row.temperature),
            g12(row.field),
            g12(base.from_nats(row.epsilon))
        );
        if a.asymptotics {
            let p = RegisterParams::new(row.temperature, row.field, a.coupling)?;
            for &r in regimes {
                let v = if r.applies(&p) {
                    asymptotic_measure(r, &p).map_or(f64::NAN, |x| base.from_nats(x))
                } else {
                    f64::NAN
                };
                line.push(',');
                line.push_str(&g12(v));
            }
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn cmd_decohere(a: &DecohereArgs, base: LogBase) -> CmdResult {
    let file: DecoherenceFile = read_json(&a.spec)?;
    let spec = file.spec()?;
    if !(a.t_max >= 0.0) {
        return Err(Failure::validation("--t-max must be nonnegative"));
    }
    let mode = match a.mode {
        ModeArg::Exact => EvolutionMode::Exact,
        ModeArg::Lorentz => EvolutionMode::Lorentz(file.lorentz()?),
    };
    let times = GridRange::new(0.0, a.t_max, a.steps)?.values();
    let points = measure_trajectory(&spec, &times, &mode, base)?;
    let limits = limit_measures(&spec, base);
    let mut out = output(a.out.as_ref())?;
    writeln!(out, "t,epsilon")?;
    for p in points {
        writeln!(out, "{},{}", g12(p.t), g12(p.epsilon))?;
    }
    writeln!(out, "# eps0={},eps_inf={}", g12(limits.eps0), g12(limits.eps_inf))?;
    out.flush()?;
    Ok(())
}

pub fn cmd_spinor(c: &SpinorCommand, base: LogBase) -> CmdResult {
    match c {
        SpinorCommand::SpinSpatial { n, asymptotic, out } => {
            if *n == 0 {
                return Err(Failure::validation("--n must be positive"));
            }
            let mut w = output(out.as_ref())?;
            let mut header = String::from("N,S,epsilon_spin_spatial");
            if *asymptotic {
                header.push_str(",asymptotic");
            }
            writeln!(w, "{header}")?;
            for twice_s in (n % 2..=*n).step_by(2) {
                let d = YoungDiagram::spin_half(*n, twice_s)?;
                let mut line = format!(
                    "{n},{},{}",
                    g12(twice_s as f64 / 2.0),
                    g12(base.from_nats(spin_spatial_measure(&d)))
                );
                if *asymptotic {
                    let x = spin_spatial_asymptotic_spin_half(*n, twice_s);
                    line.push(',');
                    line.push_str(&g12(base.from_nats(x)));
                }
                writeln!(w, "{line}")?;
            }
            w.flush()?;
            Ok(())
        }
        SpinorCommand::Particle(a) => cmd_particle(a, base),
    }
}

fn cmd_particle(a: &ParticleArgs, base: LogBase) -> CmdResult {
    if a.oracle && a.n > ORACLE_MAX_N {
        return Err(Failure::validation(format!(
            "--oracle supports N ≤ {ORACLE_MAX_N}, got {}",
            a.n
        )));
    }
    let states = match (a.table, a.s, a.sz, a.iz) {
        (true, None, None, None) => SpinHalfState::all(a.n),
        (false, Some(s), Some(sz), Some(iz)) => vec![SpinHalfState::from_values(a.n, s, sz, iz)?],
        _ => return Err(Failure::validation("give --s, --sz and --iz, or --table")),
    };
    let mut rows = Vec::with_capacity(states.len());
    for st in &states {
        let eps = base.from_nats(particle_measure(st)?);
        let check = if a.oracle {
            match oracle::brute_force_particle_measure(st) {
                Ok(x) => Some(base.from_nats(x)),
                Err(e) if a.table => {
                    eprintln!(
                        "entprod: skipped oracle for S={} Sz={} Iz={}: {e}",
                        st.s(),
                        st.sz(),
                        st.iz()
                    );
                    Some(f64::NAN)
                }
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        rows.push((st, eps, check));
    }
    let mut w = output(a.out.as_ref())?;
    let mut header = String::from("N,S,Sz,Iz,epsilon_particle");
    if a.oracle {
        header.push_str(",oracle_epsilon");
    }
    writeln!(w, "{header}")?;
    for (st, eps, check) in rows {
        let mut line = format!(
            "{},{},{},{},{}",
            st.n(),
            g12(st.s()),
            g12(st.sz()),
            g12(st.iz()),
            g12(eps)
        );
        if let Some(x) = check {
            line.push(',');
            line.push_str(&g12(x));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// `a`, `bi`, `a+bi`, `a-bi`; a bare `i` means one.
pub fn parse_complex(text: &str) -> std::result::Result<C64, String> {
    let t = text.trim();
    let bad = || format!("invalid complex number {text:?}");
    let num = |s: &str| -> std::result::Result<f64, String> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return t.parse().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            Ok(C64::new(re, num(&body[k..])?))
        }
        None => Ok(C64::new(0.0, num(body)?)),
    }
}

/// `start:end:points`
pub fn parse_range(text: &str) -> std::result::Result<GridRange, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected start:end:points, got {text:?}"));
    };
    let start: f64 = a.parse().map_err(|_| format!("bad range start {a:?}"))?;
    let end: f64 = b.parse().map_err(|_| format!("bad range end {b:?}"))?;
    let steps: usize = n.parse().map_err(|_| format!("bad point count {n:?}"))?;
    GridRange::new(start, end, steps).map_err(|e| e.to_string())
}
