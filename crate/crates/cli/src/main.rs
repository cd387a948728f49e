use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use trigonal::report::{self, CommandError, CurveInput, DivisorInput};
use trigonal::survey::SurveyConfig;

#[derive(Parser)]
#[command(name = "trigonal", version, about = "Rational (2,2,2)-isogenies of genus-3 hyperelliptic Jacobians")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Factor pattern, tractable subgroups and rationality flags.
    Analyze {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Full construction for one subgroup.
    Isogeny {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 0)]
        subgroup: usize,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
    },
    /// Image of a divisor on the target curve.
    Map {
        #[arg(long)]
        curve: PathBuf,
        /// JSON file, or an inline JSON object.
        #[arg(long)]
        divisor: String,
        #[arg(long, default_value_t = 0)]
        subgroup: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Zeta function, round-trip consensus and fiber spot checks.
    Verify {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 0)]
        subgroup: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        ext: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo survey over random curves.
    Survey {
        #[arg(long, conflicts_with = "prime_bits")]
        prime: Option<String>,
        #[arg(long)]
        prime_bits: Option<u64>,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "full")]
        depth: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Expected number of rational isogenies for a given success probability.
    Expectation {
        #[arg(long, default_value = "1/4")]
        success_prob: String,
    },
}

fn read_text(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(|e| CommandError::parse("Io", format!("{}: {e}", path.display())))
}

fn read_curve(path: &Path) -> Result<CurveInput, CommandError> {
    CurveInput::from_json(&read_text(path)?)
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn run(cmd: Cmd) -> Result<String, CommandError> {
    match cmd {
        Cmd::Analyze { curve } => Ok(json(&report::analyze(&read_curve(&curve)?)?)),
        Cmd::Isogeny { curve, subgroup, sign } => {
            let sign = report::parse_sign(&sign)?;
            Ok(json(&report::isogeny_report(&read_curve(&curve)?, subgroup, sign)?))
        }
        Cmd::Map { curve, divisor, subgroup, seed } => {
            let text = if divisor.trim_start().starts_with('{') { divisor } else { read_text(Path::new(&divisor))? };
            let d = DivisorInput::from_json(&text)?;
            Ok(json(&report::map_report(&read_curve(&curve)?, &d, subgroup, seed)?))
        }
        Cmd::Verify { curve, subgroup, trials, ext, seed } => {
            if ext == 0 {
                return Err(CommandError::parse("BadExtension", "--ext must be positive"));
            }
            Ok(json(&report::verify_report(&read_curve(&curve)?, subgroup, trials, ext, seed)?))
        }
        Cmd::Survey { prime, prime_bits, samples, seed, depth, csv } => {
            let cfg = SurveyConfig {
                p: report::survey_prime(prime.as_deref(), prime_bits, seed)?,
                samples,
                seed,
                depth: report::parse_depth(&depth)?,
            };
            let rep = match csv {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| CommandError::parse("Io", format!("{}: {e}", path.display())))?;
                    let mut w = BufWriter::new(file);
                    let rep = report::survey_report(&cfg, Some(&mut w))?;
                    w.flush().map_err(|e| CommandError::math("Io", e))?;
                    rep
                }
                None => report::survey_report(&cfg, None)?,
            };
            Ok(json(&rep))
        }
        Cmd::Expectation { success_prob } => {
            let r = report::expectation_report(&report::parse_rational(&success_prob)?);
            eprintln!("{} ≈ {}", r.value, r.decimal);
            Ok(json(&r))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CommandError::parse("BadArguments", e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok(out) => {
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
