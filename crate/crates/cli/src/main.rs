mod commands;
mod error;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use error::CliError;

pub const SCHEMA: &str = "weylkit/1";

#[derive(Parser, Debug)]
#[command(name = "weylkit", version, about = "Weyl complexity, Weyl polynomials and recurrence probes")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Largest k tried when computing W(P) [default: 2(rD+1)]
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    /// Probe radius, decimal or p/q
    #[arg(long, global = true, default_value = "0.1")]
    pub epsilon: String,
    /// Largest n searched or generated
    #[arg(long, global = true, default_value_t = 10_000)]
    pub horizon: u64,
    /// Average length
    #[arg(long = "N", global = true, default_value_t = 100_000)]
    pub n: u64,
    /// Bits of precision for named constants
    #[arg(long, global = true, default_value_t = 256)]
    pub precision: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Numeric value for a rotation symbol: sqrt2, golden, e, name@depth, p/q
    #[arg(long = "realize", global = true, value_name = "SYMBOL=SPEC")]
    pub realize: Vec<String>,
    /// Scan probes and averages in this many parallel shards
    #[arg(long, global = true, default_value_t = 1)]
    pub shards: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// System description: file path, or inline lines separated by ';'
    #[arg(long)]
    pub system: Option<String>,
    /// Shorthand for a single factor `factor d=<STEP> alpha=a`
    #[arg(long)]
    pub step: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbeMode {
    Kronecker,
    Topological,
    Cross,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weyl complexity W(P) and the dimension trace
    Complexity { family: String },
    /// Integral basis of WP_k(P), or of WP(P) without --k
    WeylBasis {
        family: String,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Compare the recurrence schemes of P and Q
    Compare { p: String, q: String },
    /// Decide h ∈ WP_k(P) and give a character witness
    Membership {
        family: String,
        h: String,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exact character correlations and their closed form
    Correlate {
        family: String,
        /// Characters v^0, …, v^r, e.g. --char "(0,-1)" --char "(0,1)"
        #[arg(long = "char", required = true, allow_hyphen_values = true)]
        chars: Vec<String>,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
        to: i64,
    },
    /// Polynomial Fourier expansion of a correlation of trigonometric polynomials
    Expand {
        family: String,
        /// Functions f_0, …, f_r as `coeff*(v); coeff*(v)`
        #[arg(long = "f", required = true, allow_hyphen_values = true)]
        functions: Vec<String>,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 20, allow_hyphen_values = true)]
        to: i64,
    },
    /// Search a candidate recurrence set for witnesses
    Probe {
        /// full | list:5,7 | threshold:<poly>:<rotation>:above=<t> | threshold:<poly>:<rotation>:in=<lo>,<hi>
        #[arg(long, default_value = "full")]
        set: String,
        #[arg(long, value_enum, default_value_t = ProbeMode::Kronecker)]
        mode: ProbeMode,
        /// Family P; the Kronecker basis is WP(P) (or WP_k(P) with --k)
        #[arg(long)]
        family: Option<String>,
        /// Explicit Kronecker basis, comma separated
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Kronecker rotations
        #[arg(long = "beta")]
        betas: Vec<String>,
        #[command(flatten)]
        system: SystemArgs,
        /// Report every witness instead of the first
        #[arg(long)]
        all: bool,
        /// Re-run the probe and compare with a saved JSON report
        #[arg(long)]
        validate: Option<std::path::PathBuf>,
    },
    /// Cesàro average of a product of polynomial phases e(q(n)·α)
    Average {
        /// Phase `<poly>@<rotation>`; none means the constant sequence 1
        #[arg(long = "phase", allow_hyphen_values = true)]
        phases: Vec<String>,
    },
}

/// A command result: JSON fields and a text rendering.
pub struct Report {
    pub command: &'static str,
    pub fields: Map<String, Value>,
    pub text: String,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let o = &cli.opts;
    match &cli.command {
        Command::Complexity { family } => commands::complexity(o, family),
        Command::WeylBasis { family, k } => commands::weyl_basis(o, family, *k),
        Command::Compare { p, q } => commands::compare(o, p, q),
        Command::Membership { family, h, k } => commands::membership(o, family, h, *k),
        Command::Correlate { family, chars, system, from, to } => {
            commands::correlate(o, family, chars, system, *from, *to)
        }
        Command::Expand { family, functions, system, from, to } => {
            commands::expand(o, family, functions, system, *from, *to)
        }
        Command::Probe { set, mode, family, basis, k, betas, system, all, validate } => {
            commands::probe(o, &commands::ProbeArgs {
                set,
                mode: *mode,
                family: family.as_deref(),
                basis: basis.as_deref(),
                k: *k,
                betas,
                system,
                all: *all,
                validate: validate.as_deref(),
            })
        }
        Command::Average { phases } => commands::average(o, phases),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.opts.format {
                Format::Json => {
                    let mut out = Map::new();
                    out.insert("schema".into(), json!(SCHEMA));
                    out.insert("command".into(), json!(report.command));
                    out.extend(report.fields);
                    println!("{}", serde_json::to_string_pretty(&Value::Object(out)).expect("serializable"));
                }
                Format::Text => print!("{}", report.text),
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if cli.opts.format == Format::Json {
                let mut out = Map::new();
                out.insert("schema".into(), json!(SCHEMA));
                out.insert("error".into(), json!(err.message));
                out.insert("exit_code".into(), json!(err.code));
                if let Some(detail) = &err.detail {
                    out.insert("detail".into(), detail.clone());
                }
                println!("{}", serde_json::to_string_pretty(&Value::Object(out)).expect("serializable"));
            }
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
