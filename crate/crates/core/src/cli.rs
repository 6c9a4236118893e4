//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or schema
//! error, 3 axiom failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::hopf::{QuantumGroup, DEFAULT_TOL};
use crate::io::{self, round12};
use crate::lattice::IdempotentLattice;
use crate::linalg::{CMat, CVec};
use crate::models;
use crate::search::{search_idempotents, SearchOptions};
use crate::verify::{run_all, run_suite, Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_AXIOMS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "finqg", version, about = "Idempotent states on finite quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Builtin model (fun:Z2, fun:Z3, fun:Z4, fun:Z2xZ2, fun:S3, fun:D4,
    /// grp:S3, grp:D4, grp:Q8, kp8, ...).
    #[arg(long, value_name = "NAME")]
    example: Option<String>,
    /// Quantum group JSON file.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Global numerical tolerance.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Number of random search trials.
    #[arg(long, default_value_t = 16)]
    seeds: usize,
    #[arg(long = "rng-seed", default_value_t = 0)]
    rng_seed: u64,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            seeds: self.seeds,
            rng_seed: self.rng_seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ListFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Bijection,
    Rescaling,
    Order,
    Remark,
    LemmaGb,
    HaarEquivalence,
    Multiplicativity,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the axiom suite.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Write the validated model in canonical JSON form.
        #[arg(long, value_name = "FILE")]
        write: Option<PathBuf>,
    },
    /// Print the Haar state, the Haar element and the antipode.
    Haar {
        #[command(flatten)]
        common: Common,
    },
    /// Search for idempotent states.
    Idempotents {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: ListFormat,
    },
    /// Build and export the lattice of idempotent states.
    Lattice {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run a verification suite over the discovered idempotent states.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum)]
        what: SuiteName,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Axioms(_) => EXIT_AXIOMS,
        Error::Json(_) | Error::Schema(_) | Error::UnknownModel(_) | Error::UnknownFormat(_) | Error::Io(_) => {
            EXIT_USAGE
        }
        _ => EXIT_VERIFY,
    }
}

fn load(common: &Common) -> Result<Arc<QuantumGroup>> {
    let tol = common.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Schema(format!("tolerance must be positive, got {tol}")));
    }
    match (&common.source.example, &common.source.input) {
        (Some(name), _) => {
            let qg = models::builtin(name)?;
            if common.tol.is_none() {
                Ok(qg)
            } else {
                Ok(Arc::new(QuantumGroup::with_tolerance(qg.to_data(), tol)?))
            }
        }
        (None, Some(path)) => Ok(Arc::new(io::parse(path, tol)?)),
        (None, None) => unreachable!("clap enforces a source"),
    }
}

fn num(x: f64) -> String {
    format!("{}", round12(x))
}

fn complex_vec(v: &CVec) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("[{}, {}]", num(z.re), num(z.im))).collect();
    format!("[{}]", parts.join(", "))
}

fn matrix_rows(m: &CMat, labels: &[String], out: &mut String) {
    for (j, label) in labels.iter().enumerate() {
        let col = m.column(j).into_owned();
        let _ = writeln!(out, "  S({label}) = {}", complex_vec(&col));
    }
}

fn validate(common: &Common, write: Option<&PathBuf>, out: &mut String) -> Result<i32> {
    let qg = load(common)?;
    let _ = writeln!(out, "model {} (dim {})", qg.name(), qg.dim());
    let _ = write!(out, "{}", qg.report());
    let _ = writeln!(out, "all axioms pass");
    if let Some(path) = write {
        io::write(&qg, path)?;
    }
    Ok(EXIT_OK)
}

fn haar(common: &Common, out: &mut String) -> Result<i32> {
    let qg = load(common)?;
    let labels = qg.algebra().labels().to_vec();
    let _ = writeln!(out, "model {} (dim {})", qg.name(), qg.dim());
    let _ = writeln!(out, "h(e_i) = {}", complex_vec(qg.haar_values()));
    let _ = writeln!(out, "η = {}", complex_vec(&qg.haar_element().coords));
    let _ = writeln!(out, "antipode:");
    matrix_rows(qg.antipode_matrix(), &labels, out);
    Ok(EXIT_OK)
}

fn lattice_of(common: &Common, search: &SearchArgs) -> Result<(Arc<QuantumGroup>, IdempotentLattice)> {
    let qg = load(common)?;
    let res = search_idempotents(&qg, &search.options());
    let lattice = IdempotentLattice::build(&qg, res.states, res.exhaustive)?;
    Ok((qg, lattice))
}

fn idempotents(common: &Common, search: &SearchArgs, format: ListFormat, out: &mut String) -> Result<i32> {
    let (qg, lattice) = lattice_of(common, search)?;
    let export = lattice.to_export();
    match format {
        ListFormat::Json => out.push_str(&lattice.to_json()),
        ListFormat::Text => {
            let non_haar = export.elements.iter().filter(|e| !e.haar).count();
            let _ = writeln!(
                out,
                "model {}: {} idempotent states, {} non-Haar, exhaustive: {}",
                qg.name(),
                export.elements.len(),
                non_haar,
                export.exhaustive
            );
            for (e, st) in export.elements.iter().zip(lattice.elements()) {
                let _ = writeln!(
                    out,
                    "φ{}  {}  dim C = {}",
                    e.index,
                    if e.haar { "Haar" } else { "non-Haar" },
                    e.coidalgebra_dim
                );
                let _ = writeln!(out, "  φ(e_i) = {}", complex_vec(&st.phi.values));
                let _ = writeln!(out, "  ρ      = {}", complex_vec(&st.rho.coords));
                let _ = writeln!(out, "  f      = {}", complex_vec(&st.f.coords));
                let _ = writeln!(out, "  p      = {}", complex_vec(&st.p.coords));
            }
        }
    }
    Ok(EXIT_OK)
}

fn lattice(
    common: &Common,
    search: &SearchArgs,
    format: GraphFormat,
    path: Option<&PathBuf>,
    out: &mut String,
) -> Result<i32> {
    let (_, lattice) = lattice_of(common, search)?;
    let text = match format {
        GraphFormat::Dot => lattice.export("dot")?,
        GraphFormat::Json => lattice.export("json")?,
    };
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.push_str(&text),
    }
    Ok(EXIT_OK)
}

fn verify(common: &Common, search: &SearchArgs, what: SuiteName, out: &mut String) -> Result<i32> {
    let qg = load(common)?;
    let res = search_idempotents(&qg, &search.options());
    let reports: Vec<SuiteReport> = match what {
        SuiteName::All => run_all(&qg, &res.states),
        one => {
            let name = one.to_possible_value().expect("named suite");
            vec![run_suite(&qg, name.get_name().parse::<Suite>()?, &res.states)]
        }
    };
    let _ = writeln!(out, "{} idempotent states", res.states.len());
    for r in &reports {
        let _ = write!(out, "{r}");
    }
    let ok = reports.iter().all(SuiteReport::passed);
    let _ = writeln!(out, "{}", if ok { "all checks pass" } else { "verification FAILED" });
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut text = String::new();
    let result = match &cli.command {
        Command::Validate { common, write } => validate(common, write.as_ref(), &mut text),
        Command::Haar { common } => haar(common, &mut text),
        Command::Idempotents { common, search, format } => idempotents(common, search, *format, &mut text),
        Command::Lattice {
            common,
            search,
            format,
            out: path,
        } => lattice(common, search, *format, path.as_ref(), &mut text),
        Command::Verify { common, search, what } => verify(common, search, *what, &mut text),
    };
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(code) => code,
        Err(e) => {
            if let Error::Axioms(report) = &e {
                let _ = write!(out, "model {}\n{report}", report.model);
                let _ = writeln!(err, "error: quantum group axioms violated");
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            exit_code(&e)
        }
    }
}
