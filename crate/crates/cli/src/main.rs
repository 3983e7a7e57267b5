use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Marked elliptic curves, automorphism strata, and Chow presentations.
#[derive(Debug, Parser)]
#[command(name = "ellmod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Full,
    Stabilizer,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify y^2 = x^3 + a x + b as smooth, nodal or cuspidal.
    Classify {
        /// A prime p >= 5, or Q.
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Automorphism group of (C_(a,b), inf, p_2, ..., p_n).
    Aut {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Affine points `x,y`; p_1 = inf is implicit.
        #[arg(long, num_args = 0..)]
        points: Vec<String>,
    },
    /// Automorphism strata of n-pointed curves over F_p.
    Census {
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
        /// Allow primes outside {5, 7, 11, 13}.
        #[arg(long)]
        force: bool,
    },
    /// Degree component of a Chow ring presentation, e.g. `--stack M1,3`.
    Chow {
        #[arg(long)]
        stack: String,
        #[arg(long)]
        degree: u32,
    },
    /// Check the classification of marked automorphism groups over F_p.
    VerifyAppendix {
        #[arg(long)]
        p: String,
    },
}

/// Rewrites `--points 1,0 -1,0` as `--points=1,0 --points=-1,0` so that
/// negative coordinates are not read as flags and later flags still parse.
fn attach_point_values(args: Vec<OsString>) -> Vec<OsString> {
    let mut out = Vec::with_capacity(args.len());
    let mut in_points = false;
    for arg in args {
        let text = arg.to_str().unwrap_or("");
        let is_flag =
            text.starts_with("--") || (text.starts_with('-') && !text[1..].starts_with(|c: char| c.is_ascii_digit()));
        if text == "--points" {
            in_points = true;
            out.push(arg);
            continue;
        }
        if in_points && !is_flag {
            if out.last().is_some_and(|a| a == "--points") {
                out.pop();
            }
            out.push(OsString::from(format!("--points={text}")));
            continue;
        }
        in_points = false;
        out.push(arg);
    }
    out
}

fn configure_threads() {
    if let Some(n) = std::env::var("ELLMOD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            // only fails if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(attach_point_values(std::env::args_os().collect()));
    configure_threads();
    let outcome = match cli.command {
        Command::Classify { field, a, b } => commands::classify(&field, &a, &b),
        Command::Aut { field, a, b, points } => commands::aut(&field, &a, &b, &points),
        Command::Census {
            p,
            n,
            format,
            strategy,
            force,
        } => commands::census(&p, &n, format, strategy, force),
        Command::Chow { stack, degree } => commands::chow(&stack, degree),
        Command::VerifyAppendix { p } => commands::verify_appendix(&p),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.stdout.as_bytes());
    if let Some(msg) = &outcome.stderr {
        eprintln!("ellmod: {msg}");
    }
    ExitCode::from(outcome.code)
}
