use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use altrank_core::analyze::DEFAULT_SAMPLES;
use altrank_core::families::FamilySpec;
use altrank_core::spaces::{RankPredicate, DEFAULT_BUDGET};
use altrank_core::FieldCtx;

mod commands;
mod report;

use commands::{CheckKind, Limits, TableRow};
use report::{CliError, CliResult, Report};

#[derive(Parser, Debug)]
#[command(name = "altrank", version, about = "Affine spaces of alternating matrices with rank constraints")]
struct Cli {
    /// Add wall-clock timings to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct LimitArgs {
    /// Largest member count enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seeded samples drawn above the budget.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    sample: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl From<LimitArgs> for Limits {
    fn from(a: LimitArgs) -> Self {
        Limits {
            budget: a.budget,
            sample: a.sample,
            seed: a.seed,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Nt,
    NonsingularAlt,
    MTildeAlt,
    HPlus,
    HBar,
    MTildeRect,
    OperatorBlock,
    CounterexamplePlane,
    StandardSymplectic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a family and verify its dimension and rank contract.
    Construct {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value = "Fp:3")]
        field: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Write the space JSON here instead of embedding it in the report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run checks on a space read from a file or `-` for stdin.
    Verify {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long = "check", value_enum, default_values_t = [CheckKind::RankProfile])]
        checks: Vec<CheckKind>,
        /// Required rank for the rank-profile check (constant unless --at-least).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, requires = "rank")]
        at_least: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Reduce a constant-rank space of critical dimension to canonical form.
    Reduce {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        r: usize,
        /// Write the certificate here instead of embedding it in the report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Closed-form dimensions against constructed families.
    Table {
        /// Sizes, as `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "2..8")]
        n: String,
        #[arg(long, default_value = "2,4", value_delimiter = ',')]
        r: Vec<usize>,
        #[arg(long, default_value = "Fp:3,Fp:5", value_delimiter = ',')]
        fields: Vec<String>,
        #[arg(long, value_enum, default_value_t = TableFormat::Tsv)]
        format: TableFormat,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Largest affine subspace of alternating matrices meeting a rank predicate.
    OptimalSearch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        at_least: bool,
        #[arg(long, default_value = "Fp:3")]
        field: String,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Fail unless the maximum equals this value.
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Rank behaviour of the plane {A(x, y, 1)} over Q, F_3 and F_5.
    Counterexample {
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_field(text: &str) -> CliResult<FieldCtx> {
    text.parse().map_err(|e: altrank_core::Error| CliError::Usage(e.to_string()))
}

fn need(v: Option<usize>, name: &str, family: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required for {family}")))
}

fn family_spec(family: Family, n: Option<usize>, s: Option<usize>, r: Option<usize>, p: Option<usize>) -> CliResult<FamilySpec> {
    let name = family.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string());
    Ok(match family {
        Family::Nt => FamilySpec::Nt { n: need(n, "n", &name)? },
        Family::NonsingularAlt => FamilySpec::NonsingularAlt { s: need(s, "s", &name)? },
        Family::MTildeAlt => {
            let (n, s) = (need(n, "n", &name)?, need(s, "s", &name)?);
            if s == 0 || n < 2 * s {
                return Err(CliError::Usage(format!("m-tilde-alt needs 1 <= s and 2s <= n, got n = {n}, s = {s}")));
            }
            FamilySpec::MTildeAlt { n, s }
        }
        Family::HPlus => FamilySpec::HPlus { r: need(r, "r", &name)? },
        Family::HBar => {
            let (n, r) = (need(n, "n", &name)?, need(r, "r", &name)?);
            if r > n {
                return Err(CliError::Usage(format!("h-bar needs r <= n, got n = {n}, r = {r}")));
            }
            FamilySpec::HBar { n, r }
        }
        Family::MTildeRect => {
            let (p, s) = (need(p, "p", &name)?, need(s, "s", &name)?);
            if s == 0 || p < s {
                return Err(CliError::Usage(format!("m-tilde-rect needs 1 <= s <= p, got p = {p}, s = {s}")));
            }
            FamilySpec::MTildeRect { p, s }
        }
        Family::OperatorBlock => FamilySpec::OperatorBlock { n: need(n, "n", &name)? },
        Family::CounterexamplePlane => FamilySpec::CounterexamplePlane,
        Family::StandardSymplectic => FamilySpec::StandardSymplectic { s: need(s, "s", &name)? },
    })
}

fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("cannot parse sizes {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        return if a <= b { Ok((a..=b).collect()) } else { Err(bad()) };
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("ALTRANK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("ALTRANK_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

/// Writes a line to stdout; a closed reader is not an error.
fn say(line: &str) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{line}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(report: Report) -> CliResult<ExitCode> {
    say(&serde_json::to_string_pretty(&report)?)?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    configure_threads()?;
    let started = cli.timings.then(Instant::now);
    let echo = command_echo();
    let finish = |mut report: Report, (passed, results): commands::Outcome| {
        report.passed = passed;
        report.results = results;
        emit(report.with_timing(started))
    };
    match cli.command {
        Command::Construct { family, field, n, s, r, p, out, limits } => {
            let ctx = parse_field(&field)?;
            let spec = family_spec(family, n, s, r, p)?;
            let limits = Limits::from(limits);
            let report = Report::new(echo, Some(ctx.to_string()), json!({ "family": spec, "limits": limits }), Some(limits.seed));
            let outcome = commands::construct(ctx, &spec, &limits, out.as_deref())?;
            finish(report, outcome)
        }
        Command::Verify { input, checks, rank, at_least, limits } => {
            let space = commands::read_space(&input)?;
            let limits = Limits::from(limits);
            let params = json!({ "input": input, "checks": checks, "rank": rank, "at_least": at_least, "limits": limits });
            let report = Report::new(echo, Some(space.field.clone()), params, Some(limits.seed));
            let outcome = commands::verify(&space, &checks, rank.map(|r| (r, !at_least)), &limits)?;
            finish(report, outcome)
        }
        Command::Reduce { input, r, out, limits } => {
            let space = commands::read_space(&input)?;
            let limits = Limits::from(limits);
            let params = json!({ "input": input, "r": r, "limits": limits });
            let report = Report::new(echo, Some(space.field.clone()), params, Some(limits.seed));
            let outcome = commands::reduce(&space, r, &limits, out.as_deref())?;
            finish(report, outcome)
        }
        Command::Table { n, r, fields, format, limits } => {
            let ns = parse_sizes(&n)?;
            let ctxs = fields.iter().map(|f| parse_field(f)).collect::<CliResult<Vec<_>>>()?;
            let limits = Limits::from(limits);
            let rows = commands::table(&ns, &r, &ctxs, &limits)?;
            let passed = rows.iter().all(TableRow::agrees);
            match format {
                TableFormat::Tsv => {
                    say(&format!("# {} {} seed={}", report::TOOL, report::VERSION, limits.seed))?;
                    say(TableRow::tsv_header())?;
                    for row in &rows {
                        say(&row.tsv())?;
                    }
                    if let Some(t) = started {
                        say(&format!("# total_ms={}", t.elapsed().as_millis()))?;
                    }
                    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
                TableFormat::Json => {
                    let params = json!({ "n": ns, "r": r, "fields": fields, "limits": limits });
                    let report = Report::new(echo, None, params, Some(limits.seed));
                    finish(report, (passed, json!({ "rows": rows })))
                }
            }
        }
        Command::OptimalSearch { n, rank, at_least, field, budget, expect } => {
            let ctx = parse_field(&field)?;
            let FieldCtx::Prime(fp) = ctx else {
                return Err(CliError::Usage("optimal-search needs a prime field".into()));
            };
            let predicate = if at_least { RankPredicate::RankAtLeast(rank) } else { RankPredicate::ConstantRank(rank) };
            let params = json!({ "n": n, "predicate": predicate, "budget": budget, "expect": expect });
            let report = Report::new(echo, Some(ctx.to_string()), params, None);
            let outcome = commands::optimal_search(n, predicate, &fp, budget, expect)?;
            finish(report, outcome)
        }
        Command::Counterexample { samples, seed } => {
            if samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
            let params = json!({ "samples": samples });
            let report = Report::new(echo, Some("Q,Fp:3,Fp:5".into()), params, Some(seed));
            let outcome = commands::counterexample(samples, seed)?;
            finish(report, outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("altrank: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
