//! `maclane`: cluster pictures, invariant tables and special fibres from the
//! command line.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maclane::arith::{BaseField, KPoly, K};
use maclane::clusters::{BuildOptions, ResidueMode};
use maclane::parse::{parse_coeffs, parse_poly};
use maclane::report::{self, Analysis};
use maclane::selfcheck;
use maclane::Error;

#[derive(Parser)]
#[command(
    name = "maclane",
    version,
    about = "MacLane cluster pictures and special fibres of y^2 = f(x) over unramified p-adic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster tree of f.
    Picture {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = PictureFormat::Ascii)]
        format: PictureFormat,
    },
    /// Special fibre of the regular SNC model.
    Fibre {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = FibreFormat::Ascii)]
        format: FibreFormat,
    },
    /// Per-cluster invariant table, in both normalizations of nu, s, s0.
    Invariants {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
    },
    /// Property suites on the built-in corpus and, if given, on f.
    Selfcheck {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args)]
struct Input {
    /// Odd prime p.
    #[arg(long, short = 'p')]
    prime: Option<u64>,
    /// Degree m of the unramified base field K over Q_p.
    #[arg(long, default_value_t = 1)]
    unramified_degree: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    residue_mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest residue field degree geometric mode may reach.
    #[arg(long, default_value_t = 64)]
    extension_budget: usize,
    /// Coefficients c0,c1,... instead of an expression.
    #[arg(long, conflicts_with = "expr", allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Polynomial in x, e.g. "(x^2-5)^3 - 5^5".
    expr: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Geometric,
}

#[derive(Clone, Copy, ValueEnum)]
enum PictureFormat {
    Json,
    Ascii,
    Tikz,
}

#[derive(Clone, Copy, ValueEnum)]
enum FibreFormat {
    Json,
    Dot,
    Ascii,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

impl Input {
    fn options(&self) -> BuildOptions {
        let mode = match self.residue_mode {
            Mode::Exact => ResidueMode::Exact,
            Mode::Geometric => ResidueMode::Geometric,
        };
        BuildOptions { mode, extension_budget: self.extension_budget, seed: self.seed }
    }

    fn has_poly(&self) -> bool {
        self.expr.is_some() || self.coeffs.is_some()
    }

    fn poly(&self) -> maclane::Result<(K, KPoly)> {
        let p = self.prime.ok_or_else(|| Error::Input("--prime is required".into()))?;
        let k = BaseField::unramified_default(p, self.unramified_degree)?;
        let f = match (&self.expr, &self.coeffs) {
            (Some(e), _) => parse_poly(&k, e)?,
            (None, Some(c)) => parse_coeffs(&k, c)?,
            (None, None) => return Err(Error::Input("no polynomial given".into())),
        };
        if f.len() < 2 {
            return Err(Error::Input("f must have positive degree".into()));
        }
        Ok((k, f))
    }

    fn analyse(&self) -> maclane::Result<Analysis> {
        let (k, f) = self.poly()?;
        report::analyse(&k, &f, &self.options())
    }
}

fn json(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn shift_note(a: &Analysis, comment: &str) -> String {
    format!("{comment} normalization shift c = {} (tree and model of y^2 = f(p^-c x))\n", a.shift)
}

fn run(cli: Cli) -> maclane::Result<(String, bool)> {
    Ok(match cli.command {
        Command::Picture { input, format } => {
            let a = input.analyse()?;
            let out = match format {
                PictureFormat::Json => json(&report::picture_json(&a)),
                PictureFormat::Ascii => shift_note(&a, "#") + &report::picture_ascii(&a),
                PictureFormat::Tikz => shift_note(&a, "%") + &report::picture_tikz(&a),
            };
            (out, true)
        }
        Command::Fibre { input, format } => {
            let a = input.analyse()?;
            let out = match format {
                FibreFormat::Json => json(&report::to_json(&a)),
                FibreFormat::Dot => shift_note(&a, "//") + &report::fibre_dot(&a)?,
                FibreFormat::Ascii => shift_note(&a, "#") + &report::fibre_ascii(&a),
            };
            (out, true)
        }
        Command::Invariants { input, format } => {
            let a = input.analyse()?;
            let out = match format {
                TableFormat::Json => json(&report::invariants_json(&a)),
                TableFormat::Table => shift_note(&a, "#") + &report::invariants_table(&a),
            };
            (out, true)
        }
        Command::Selfcheck { input } => {
            let mut lines = vec![];
            if input.has_poly() {
                let (k, f) = input.poly()?;
                lines.extend(selfcheck::check_polynomial("input", &k, &f, input.seed, input.extension_budget));
            }
            lines.extend(selfcheck::run_corpus(input.seed, input.extension_budget));
            let mut out = String::new();
            for l in &lines {
                let tag = if l.passed { "PASS" } else { "FAIL" };
                out.push_str(&format!("{tag}  {}", l.name));
                if !l.detail.is_empty() {
                    out.push_str(&format!("  ({})", l.detail));
                }
                out.push('\n');
            }
            let failed = lines.iter().filter(|l| !l.passed).count();
            out.push_str(&format!("{} checks, {failed} failed\n", lines.len()));
            (out, failed == 0)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) if e.is_input_error() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            ExitCode::from(2)
        }
    }
}
