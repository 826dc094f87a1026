mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fibpairs::corpus::{self, Mode};
use fibpairs::expr::GridRanges;
use fibpairs::identities::{
    matrix_identities_for, rank3_trace_identities, trace_identity, EqKind, FactorSpec, TraceForm,
};
use fibpairs::pairs::{certify, certify_family, default_certify_range, make_pair, Params, CATALOG};
use fibpairs::{seq, Error, Identity};

use output::{Format, Printer};

#[derive(Parser)]
#[command(
    name = "fibpairs",
    version,
    about = "Commuting Fibonacci matrix pairs and the identities they generate"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List, inspect or certify catalog pairs.
    Pairs {
        #[command(subcommand)]
        action: PairsAction,
    },
    /// Generate identities from a pair.
    Gen(GenArgs),
    /// Check every entry of an identity file on a grid.
    Verify {
        file: PathBuf,
        /// Grid overrides such as `n=-12..12,m=-12..12,r=1..8`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Prove every entry of an identity file symbolically.
    Prove { file: PathBuf },
    /// The shipped identity corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Print an exact Fibonacci or Lucas number.
    Compute {
        #[arg(value_enum)]
        kind: SeqArg,
        #[arg(allow_negative_numbers = true)]
        k: i64,
    },
}

#[derive(Subcommand)]
enum PairsAction {
    List,
    Show {
        name: String,
        /// Family parameter such as `r=3`; repeatable.
        #[arg(long = "param", value_parser = parse_param, allow_hyphen_values = true)]
        params: Vec<(String, i64)>,
    },
    Certify {
        name: String,
        /// Exponent range `a..b`, inclusive.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        range: Option<(i64, i64)>,
        /// Certify one parameter choice instead of the family samples.
        #[arg(long = "param", value_parser = parse_param, allow_hyphen_values = true)]
        params: Vec<(String, i64)>,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Prove entries with at most four variables, verify the rest.
    Run {
        /// Use this file instead of the shipped corpus.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Print the shipped corpus in file format.
    Print,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqArg {
    Fib,
    Lucas,
}

#[derive(clap::Args)]
struct GenArgs {
    pair: String,
    /// `matrix`, `trace` or `rank3trace`.
    mode: String,
    /// `WW`, `WX` or `XX` for matrix; `fricke`, `sumAB` or `BAB` for trace.
    variant: Option<String>,
    /// First factor, e.g. `w`, `xw:odd`, `w:1`, `w:k:even`.
    #[arg(long = "M", alias = "m")]
    m: Option<String>,
    /// Second factor.
    #[arg(long = "N", alias = "n")]
    n: Option<String>,
    #[arg(long = "param", value_parser = parse_param, allow_hyphen_values = true)]
    params: Vec<(String, i64)>,
}

/// Failure classes mapped onto exit codes.
enum Fail {
    /// A mathematical check failed (exit 1).
    Math,
    /// Bad input (exit 2).
    Usage(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<GridRanges, Fail> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let (var, range) = parse_param_range(part).map_err(Fail::Usage)?;
            Ok((var, range))
        })
        .collect()
}

fn parse_param_range(part: &str) -> Result<(String, (i64, i64)), String> {
    let (var, range) = part
        .split_once('=')
        .ok_or_else(|| format!("expected var=a..b, got `{part}`"))?;
    Ok((var.trim().to_string(), parse_range(range)?))
}

fn params_of(list: &[(String, i64)]) -> Params {
    list.iter().cloned().collect()
}

fn read_corpus(path: &PathBuf) -> Result<Vec<corpus::CorpusEntry>, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    corpus::parse_corpus(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Fail> {
    let out = Printer::new(cli.format);
    match cli.command {
        Command::Pairs { action } => match action {
            PairsAction::List => {
                let specs = CATALOG
                    .iter()
                    .map(|name| make_pair(name, &Params::new()))
                    .collect::<Result<Vec<_>, _>>()?;
                out.pair_list(&specs);
                Ok(())
            }
            PairsAction::Show { name, params } => {
                out.pair_show(&make_pair(&name, &params_of(&params))?);
                Ok(())
            }
            PairsAction::Certify { name, range, params } => {
                let reports = if params.is_empty() {
                    certify_family(&name, range)?
                } else {
                    let spec = make_pair(&name, &params_of(&params))?;
                    vec![certify(&spec, range.unwrap_or_else(|| default_certify_range(&spec)))?]
                };
                out.certify(&reports);
                if reports.iter().all(|r| r.passed()) {
                    Ok(())
                } else {
                    Err(Fail::Math)
                }
            }
        },
        Command::Gen(args) => {
            let ids = generate(&args)?;
            if out.identities(&ids) {
                Ok(())
            } else {
                Err(Fail::Math)
            }
        }
        Command::Verify { file, grid } => {
            let entries = read_corpus(&file)?;
            let grid = grid.as_deref().map(parse_grid).transpose()?.unwrap_or_default();
            finish(&out, &entries, corpus::run(&entries, Mode::Verify, &grid))
        }
        Command::Prove { file } => {
            let entries = read_corpus(&file)?;
            finish(&out, &entries, corpus::run(&entries, Mode::Prove, &GridRanges::new()))
        }
        Command::Corpus { action } => match action {
            CorpusAction::Run { file } => {
                let entries = match file {
                    Some(f) => read_corpus(&f)?,
                    None => corpus::builtin(),
                };
                finish(&out, &entries, corpus::run(&entries, Mode::Auto, &GridRanges::new()))
            }
            CorpusAction::Print => {
                print!("{}", corpus::BUILTIN);
                Ok(())
            }
        },
        Command::Compute { kind, k } => {
            let v = match kind {
                SeqArg::Fib => seq::fib(k),
                SeqArg::Lucas => seq::lucas(k),
            };
            out.value(&v);
            Ok(())
        }
    }
}

fn finish(out: &Printer, entries: &[corpus::CorpusEntry], report: corpus::RunReport) -> Result<(), Fail> {
    out.run_report(entries, &report);
    if report.passed() {
        Ok(())
    } else {
        Err(Fail::Math)
    }
}

fn generate(args: &GenArgs) -> Result<Vec<Identity>, Fail> {
    let pair = make_pair(&args.pair, &params_of(&args.params))?;
    let factor =
        |text: &Option<String>, fallback: &str, var: &str| FactorSpec::parse(text.as_deref().unwrap_or(fallback), var);
    let variant = || {
        args.variant
            .clone()
            .ok_or_else(|| Fail::Usage(format!("`{}` needs a variant", args.mode)))
    };
    match args.mode.as_str() {
        "matrix" => {
            let kind: EqKind = variant()?.parse()?;
            let (dm, dn) = kind.factors();
            let m = match &args.m {
                Some(t) => FactorSpec::parse(t, "n")?,
                None => dm,
            };
            let n = match &args.n {
                Some(t) => FactorSpec::parse(t, "m")?,
                None => dn,
            };
            if (m.uses_x, n.uses_x) != (matches!(kind, EqKind::XX), !matches!(kind, EqKind::WW)) {
                return Err(Fail::Usage(format!("factors {m} and {n} do not match equation {kind}")));
            }
            Ok(matrix_identities_for(&pair, &m, &n)?)
        }
        "trace" => {
            let form: TraceForm = variant()?.parse()?;
            let m = factor(&args.m, "w", "n")?;
            let n = factor(&args.n, "w", "m")?;
            Ok(vec![trace_identity(&pair, form, &m, &n)?])
        }
        "rank3trace" => Ok(rank3_trace_identities(&pair)?),
        other => Err(Fail::Usage(format!(
            "unknown mode `{other}` (expected matrix, trace or rank3trace)"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Math) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
