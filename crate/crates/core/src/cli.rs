//! `fairshare` command line: `gen`, `shares`, `solve` and `verify`.
//!
//! Exit codes: 0 success or guarantee met, 1 guarantee violated, 2 input,
//! usage or valuation-class error, 3 oracle cap exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aps_half::{solve_half_aps, solve_half_mms, HalfApsResult};
use crate::error::{Error, Result};
use crate::generate::{gen_random, Family, GeneratorSpec};
use crate::io::{self, AchievedValues, PartitionFile, RationalText, SolveResultFile};
use crate::model::{Instance, Notion, ShareValue};
use crate::rational::{self, Rational};
use crate::shares::{all_shares, share_of, OracleLimits};
use crate::verify::{render_table, verify, Guarantee};
use crate::wmms::{oracle_partitions, supplied_partitions, wmms_allocate_binadd, wmms_round_robin};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fairshare", version, about = "Fair allocation of indivisible goods with exact share oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Compute exact APS, MMS or WMMS values.
    Shares(SharesArgs),
    /// Run an allocation algorithm.
    Solve(SolveArgs),
    /// Check an allocation against a share guarantee.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Thm43,
    Prop41,
    #[value(alias = "random-binary-xos")]
    RandomBxos,
    #[value(alias = "random-binary-additive")]
    RandomBinadd,
    RandomXos,
    RandomAdditive,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Thm43 => Family::Thm43,
            FamilyArg::Prop41 => Family::Prop41,
            FamilyArg::RandomBxos => Family::RandomBinaryXos,
            FamilyArg::RandomBinadd => Family::RandomBinaryAdditive,
            FamilyArg::RandomXos => Family::RandomXos,
            FamilyArg::RandomAdditive => Family::RandomAdditive,
        }
    }
}

fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    rational::parse(text).ok_or_else(|| format!("invalid rational {text:?}"))
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Number of goods (random families; fixed by the tight families).
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Gap parameter of the prop41 family.
    #[arg(long, value_parser = parse_rational)]
    epsilon: Option<Rational>,
    /// Target APS/WMMS ratio for prop41; picks ε automatically.
    #[arg(long, value_parser = parse_rational)]
    delta: Option<Rational>,
    /// Maximum clauses per XOS valuation.
    #[arg(long, default_value_t = 4)]
    clauses: usize,
    /// Maximum goods per clause (default: m).
    #[arg(long)]
    clause_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest entitlement denominator.
    #[arg(long, default_value_t = 1000)]
    max_denominator: u64,
    /// Draw random-additive weights from {0, 1}.
    #[arg(long)]
    zero_one: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NotionArg {
    Aps,
    Mms,
    Wmms,
}

#[derive(Debug, Args)]
struct SharesArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    notion: NotionArg,
    /// Restrict the report to one agent.
    #[arg(long)]
    agent: Option<usize>,
    /// Include partitions or blocking prices.
    #[arg(long)]
    witness: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algorithm {
    ApsHalf,
    MmsHalf,
    WmmsRr,
    WmmsBinadd,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GuaranteeArg {
    ApsHalf,
    MmsHalf,
    WmmsOverN,
    WmmsExact,
}

impl From<GuaranteeArg> for Guarantee {
    fn from(g: GuaranteeArg) -> Self {
        match g {
            GuaranteeArg::ApsHalf => Guarantee::ApsHalf,
            GuaranteeArg::MmsHalf => Guarantee::MmsHalf,
            GuaranteeArg::WmmsOverN => Guarantee::WmmsOverN,
            GuaranteeArg::WmmsExact => Guarantee::WmmsExact,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    instance: PathBuf,
    /// Allocation file, or a `solve` result.
    allocation: PathBuf,
    #[arg(long, value_enum)]
    guarantee: GuaranteeArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    table: bool,
}

/// Exit code for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::FirstPickUnavailable { .. } => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let limits = OracleLimits::from_env();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Shares(args) => cmd_shares(args, &limits),
        Command::Solve(args) => cmd_solve(args, &limits),
        Command::Verify(args) => cmd_verify(args, &limits),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Writes JSON to the output file or stdout, and the table (if any) to
/// stdout when JSON went to a file, stderr otherwise.
fn emit(json: &str, output: Option<&Path>, table: Option<String>) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, json)?;
            if let Some(table) = table {
                print!("{table}");
            }
        }
        None => {
            print!("{json}");
            if let Some(table) = table {
                eprint!("{table}");
            }
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let mut spec = GeneratorSpec::new(args.family.into(), args.n, args.m, args.seed);
    spec.epsilon = args.epsilon;
    spec.delta = args.delta;
    spec.clause_count = args.clauses;
    if let Some(size) = args.clause_size {
        spec.clause_size = size;
    }
    spec.max_denominator = args.max_denominator;
    spec.zero_one_weights = args.zero_one;
    let instance = gen_random(&spec)?;
    emit(&io::instance_to_json(&instance), args.output.as_deref(), None)?;
    Ok(EXIT_OK)
}

fn shares_table(shares: &[ShareValue]) -> String {
    let mut out = String::from("agent  notion  value\n");
    for s in shares {
        let _ = writeln!(out, "{:>5}  {:>6}  {}", s.agent, s.notion.as_str(), rational::format(&s.value));
    }
    out
}

fn cmd_shares(args: SharesArgs, limits: &OracleLimits) -> Result<i32> {
    let instance = io::load_instance(&args.instance)?;
    let notion = match args.notion {
        NotionArg::Aps => Notion::Aps,
        NotionArg::Mms => Notion::Mms,
        NotionArg::Wmms => Notion::Wmms,
    };
    let mut shares = match args.agent {
        Some(agent) => vec![share_of(&instance, notion, agent, limits)?],
        None => all_shares(&instance, notion, limits)?,
    };
    if !args.witness {
        for s in &mut shares {
            s.witness = None;
        }
    }
    let table = args.table.then(|| shares_table(&shares));
    emit(&io::shares_to_json(&shares), args.output.as_deref(), table)?;
    Ok(EXIT_OK)
}

fn half_result(result: HalfApsResult) -> SolveResultFile {
    SolveResultFile {
        allocation: (&result.allocation).into(),
        achieved: AchievedValues::Integers(result.achieved),
        final_guesses: result.final_guesses.0,
        passes: result.passes as u64,
        oracle_calls: result.oracle_calls,
        wmms_partitions_used: None,
    }
}

/// Runs one algorithm and packages its result file.
pub fn solve_to_file(instance: &Instance, algorithm: &str, limits: &OracleLimits) -> Result<SolveResultFile> {
    Ok(match algorithm {
        "aps-half" => half_result(solve_half_aps(instance)?),
        "mms-half" => half_result(solve_half_mms(instance)?),
        "wmms-rr" => {
            let (partitions, used, oracle_calls) = match supplied_partitions(instance) {
                Some(supplied) => {
                    let supplied = supplied?;
                    let used = supplied
                        .iter()
                        .map(|w| PartitionFile {
                            bundles: w.partition.iter().map(|b| b.to_vec()).collect(),
                            value: Some(RationalText(w.value.clone())),
                        })
                        .collect();
                    (supplied, Some(used), 0)
                }
                None => (oracle_partitions(instance, limits)?, None, instance.n() as u64),
            };
            let result = wmms_round_robin(instance, &partitions)?;
            SolveResultFile {
                allocation: (&result.allocation).into(),
                achieved: AchievedValues::Rationals(result.achieved.into_iter().map(RationalText).collect()),
                final_guesses: Vec::new(),
                passes: result.rounds as u64,
                oracle_calls,
                wmms_partitions_used: used,
            }
        }
        "wmms-binadd" => {
            let result = wmms_allocate_binadd(instance)?;
            SolveResultFile {
                allocation: (&result.allocation).into(),
                achieved: AchievedValues::Integers(result.achieved),
                final_guesses: Vec::new(),
                passes: 1,
                oracle_calls: 0,
                wmms_partitions_used: None,
            }
        }
        other => {
            return Err(Error::Schema { path: "algorithm".into(), message: format!("unknown algorithm {other:?}") })
        }
    })
}

fn solve_table(result: &SolveResultFile) -> String {
    let achieved = result.achieved.to_rationals();
    let mut out = String::from("agent  achieved  bundle\n");
    for (i, bundle) in result.allocation.bundles.iter().enumerate() {
        let goods: Vec<String> = bundle.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{:>5}  {:>8}  {{{}}}", i, rational::format(&achieved[i]), goods.join(","));
    }
    let _ = writeln!(out, "passes: {}  oracle calls: {}", result.passes, result.oracle_calls);
    out
}

fn cmd_solve(args: SolveArgs, limits: &OracleLimits) -> Result<i32> {
    let instance = io::load_instance(&args.instance)?;
    let name = args.algorithm.to_possible_value().expect("no skipped variants").get_name().to_string();
    let result = solve_to_file(&instance, &name, limits)?;
    let table = args.table.then(|| solve_table(&result));
    emit(&io::to_json(&result), args.output.as_deref(), table)?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs, limits: &OracleLimits) -> Result<i32> {
    let instance = io::load_instance(&args.instance)?;
    let allocation = io::parse_allocation(&std::fs::read_to_string(&args.allocation)?)?;
    let report = verify(&instance, &allocation, args.guarantee.into(), limits)?;
    let table = args.table.then(|| render_table(&report));
    emit(&io::to_json(&report), args.output.as_deref(), table)?;
    Ok(if report.overall { EXIT_OK } else { EXIT_VIOLATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        run(std::iter::once("fairshare").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(code(&["gen", "--family", "thm43"]), EXIT_INPUT);
        assert_eq!(code(&["solve", "x.json", "--algorithm", "nope"]), EXIT_INPUT);
        assert_eq!(code(&[]), EXIT_INPUT);
    }

    #[test]
    fn error_codes() {
        let cap = Error::CapExceeded { what: "x", needed: "1".into(), cap: 0 };
        assert_eq!(exit_code(&cap), EXIT_CAP);
        assert_eq!(exit_code(&Error::UnknownAgent(3)), EXIT_INPUT);
        assert_eq!(exit_code(&Error::FirstPickUnavailable { agent: 0 }), EXIT_VIOLATION);
    }

    #[test]
    fn unknown_algorithm_name() {
        let inst = crate::generate::gen_thm43(2).unwrap();
        assert!(solve_to_file(&inst, "bogus", &OracleLimits::default()).is_err());
    }
}
