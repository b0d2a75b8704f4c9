//! `ecm`: runs the verification suites and the desk-scale comparisons and
//! writes one JSON or CSV report per run.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecm_core::families::FamilySpec;
use report::Report;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "ecm", version, about = "Moment-conjecture workbench for elliptic-curve L-functions")]
struct Cli {
    /// Worker threads; ECM_THREADS takes precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report destination; stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    All,
    PositiveRank,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::All)]
    pub family: FamilyKind,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub t: String,
    #[arg(long, default_value = "1")]
    pub q: String,
    #[arg(long = "X", alias = "x", default_value = "1e4")]
    pub x: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class-number traces vs brute-force sums vs q-expansions.
    VerifyTraces {
        #[arg(long, default_value = "13")]
        pmax: String,
        #[arg(long, default_value = "20")]
        wmax: String,
    },
    /// Closed-form orthogonality sums vs brute force.
    VerifyQstar {
        #[arg(long, default_value = "13")]
        pmax: String,
        #[arg(long, default_value = "12")]
        fmax: String,
        #[arg(long, default_value = "3")]
        kmax: String,
    },
    /// a_k (all curves) or a'_k (positive rank) with tail estimates.
    Afactor {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated list of k.
        #[arg(long, default_value = "0,0.5,1,2,3")]
        k: String,
        #[arg(long, default_value = "10000")]
        pmax: String,
    },
    /// Empirical moments of L(1/2) (or L'(1/2) for positive rank) vs predictions.
    Moments {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, default_value = "2000")]
        pmax: String,
        /// Subsample size (0 keeps every member).
        #[arg(long, default_value = "0")]
        sample: String,
        #[arg(long, default_value = "0")]
        seed: String,
    },
    /// Rank-two frequency ratio between two classes mod q.
    Ratio {
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long, allow_hyphen_values = true)]
        class2: String,
        #[arg(long = "X", alias = "x", default_value = "1e5")]
        x: String,
        #[arg(long, default_value = "-0.5", allow_hyphen_values = true)]
        k: String,
        /// Constant c in the vanishing threshold c/(√N·log N).
        #[arg(long, default_value = "1e-3")]
        zero_c: String,
    },
    /// Möbius averages over F' and the A'/ζ first-moment identity.
    Rh {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "2,3,5,6,7,10")]
        n: String,
        #[arg(long, default_value = "-0.1,-0.05,0,0.05,0.1", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "1000")]
        pmax: String,
    },
}

/// Parses a numeric flag, keeping the raw text for the header echo.
pub fn num<T: std::str::FromStr>(name: &str, raw: &str) -> Result<T, String> {
    raw.trim().parse().map_err(|_| format!("--{name}: cannot parse '{raw}'"))
}

/// Integer flags accept float notation such as 1e5 when the value is integral.
pub fn int(name: &str, raw: &str) -> Result<u64, String> {
    if let Ok(v) = raw.trim().parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = num(name, raw)?;
    if f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(63) {
        Ok(f as u64)
    } else {
        Err(format!("--{name}: '{raw}' is not a nonnegative integer"))
    }
}

impl FamilyArgs {
    pub fn spec(&self) -> Result<FamilySpec, String> {
        let r: i64 = num("r", &self.r)?;
        let t: i64 = num("t", &self.t)?;
        let x: f64 = num("X", &self.x)?;
        let spec = match self.family {
            FamilyKind::All => FamilySpec::all(r, t, int("q", &self.q)?, x),
            FamilyKind::PositiveRank => FamilySpec::positive_rank(r, t, x),
        };
        spec.map_err(|e| e.to_string())
    }

    pub fn echo(&self, h: &mut Vec<(String, String)>) {
        let fam = match self.family {
            FamilyKind::All => "all",
            FamilyKind::PositiveRank => "positive-rank",
        };
        h.push(("family".into(), fam.into()));
        h.push(("r".into(), self.r.clone()));
        h.push(("t".into(), self.t.clone()));
        h.push(("q".into(), self.q.clone()));
        h.push(("X".into(), self.x.clone()));
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    match std::env::var("ECM_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("ECM_THREADS: cannot parse '{v}'")),
        Err(_) => Ok(flag),
    }
}

fn header(cli: &Cli, name: &str, workers: usize) -> Vec<(String, String)> {
    vec![
        ("build".into(), format!("ecm-{}+{}", env!("CARGO_PKG_VERSION"), option_env!("ECM_BUILD_ID").unwrap_or("local"))),
        ("command".into(), name.into()),
        ("format".into(), format!("{:?}", cli.format).to_lowercase()),
        ("threads".into(), workers.to_string()),
    ]
}

fn execute(cli: &Cli) -> Result<Report, String> {
    let workers = threads(cli.threads)?;
    if let Some(n) = workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    let workers = rayon::current_num_threads();
    match &cli.command {
        Command::VerifyTraces { pmax, wmax } => {
            let mut h = header(cli, "verify-traces", workers);
            h.push(("pmax".into(), pmax.clone()));
            h.push(("wmax".into(), wmax.clone()));
            let results = commands::verify_traces(int("pmax", pmax)?, int("wmax", wmax)? as u32)?;
            Ok(Report { header: h, results })
        }
        Command::VerifyQstar { pmax, fmax, kmax } => {
            let mut h = header(cli, "verify-qstar", workers);
            h.push(("pmax".into(), pmax.clone()));
            h.push(("fmax".into(), fmax.clone()));
            h.push(("kmax".into(), kmax.clone()));
            let results = commands::verify_qstar(int("pmax", pmax)?, int("fmax", fmax)? as u32, int("kmax", kmax)? as usize)?;
            Ok(Report { header: h, results })
        }
        Command::Afactor { family, k, pmax } => {
            let mut h = header(cli, "afactor", workers);
            family.echo(&mut h);
            h.push(("k".into(), k.clone()));
            h.push(("pmax".into(), pmax.clone()));
            let ks = k.split(',').map(|s| num::<f64>("k", s)).collect::<Result<Vec<_>, _>>()?;
            let results = commands::afactor(&family.spec()?, &ks, int("pmax", pmax)?)?;
            Ok(Report { header: h, results })
        }
        Command::Moments { family, k, pmax, sample, seed } => {
            let mut h = header(cli, "moments", workers);
            family.echo(&mut h);
            for (key, v) in [("k", k), ("pmax", pmax), ("sample", sample), ("seed", seed)] {
                h.push((key.into(), v.clone()));
            }
            let results = commands::moments(
                &family.spec()?,
                num("k", k)?,
                int("pmax", pmax)?,
                int("sample", sample)? as usize,
                int("seed", seed)?,
            )?;
            Ok(Report { header: h, results })
        }
        Command::Ratio { q, class, class2, x, k, zero_c } => {
            let mut h = header(cli, "ratio", workers);
            for (key, v) in [("q", q), ("class", class), ("class2", class2), ("X", x), ("k", k), ("zero_c", zero_c)] {
                h.push((key.into(), v.clone()));
            }
            let pair = |name: &str, raw: &str| -> Result<(i64, i64), String> {
                let parts: Vec<&str> = raw.split(',').collect();
                if parts.len() != 2 {
                    return Err(format!("--{name}: expected r,t"));
                }
                Ok((num(name, parts[0])?, num(name, parts[1])?))
            };
            let results = commands::ratio(
                int("q", q)?,
                pair("class", class)?,
                pair("class2", class2)?,
                num("X", x)?,
                num("k", k)?,
                num("zero_c", zero_c)?,
            )?;
            Ok(Report { header: h, results })
        }
        Command::Rh { family, n, alpha, pmax } => {
            let mut h = header(cli, "rh", workers);
            family.echo(&mut h);
            h.push(("n".into(), n.clone()));
            h.push(("alpha".into(), alpha.clone()));
            h.push(("pmax".into(), pmax.clone()));
            let ns = n.split(',').map(|s| int("n", s)).collect::<Result<Vec<_>, _>>()?;
            let alphas = alpha.split(',').map(|s| num::<f64>("alpha", s)).collect::<Result<Vec<_>, _>>()?;
            let results = commands::rh(&family.spec()?, &ns, &alphas, int("pmax", pmax)?)?;
            Ok(Report { header: h, results })
        }
    }
}

fn write(cli: &Cli, report: &Report) -> io::Result<()> {
    let sink: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.format {
        Format::Json => report.write_json(sink),
        Format::Csv => report.write_csv(sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write(&cli, &report) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    for row in report.soft_failures() {
        eprintln!("warning: {} outside tolerance", row.name);
    }
    match report.hard_failures() {
        0 => ExitCode::SUCCESS,
        n => {
            eprintln!("{n} verification check(s) failed");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_flags_accept_float_notation() {
        assert_eq!(int("X", "1e5"), Ok(100_000));
        assert_eq!(int("pmax", "13"), Ok(13));
        assert!(int("pmax", "1.5").is_err());
        assert!(int("pmax", "-3").is_err());
    }

    #[test]
    fn family_spec_from_flags() {
        let f = FamilyArgs { family: FamilyKind::PositiveRank, r: "1".into(), t: "1".into(), q: "1".into(), x: "1e5".into() };
        assert_eq!(f.spec().unwrap().x, 1e5);
        let bad = FamilyArgs { q: "6".into(), family: FamilyKind::All, ..f };
        assert!(bad.spec().is_err());
    }
}
