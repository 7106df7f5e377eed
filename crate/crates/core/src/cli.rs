//! Command-line front end. Exit codes: 0 success, 2 usage or domain error,
//! 3 verification mismatch, 4 enumeration cap exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::verify::{self, LemmaReport};
use crate::classify::{census_pq2, census_r3a, CensusOptions, CensusReport, Mode};
use crate::error::{Error, Result};
use crate::finab::{FinAbGroup, GroupHom};
use crate::formsolve::{classify_gamma, decompose};
use crate::oracle::{enumerate_orthogonal_group, Caps};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "fusion-census",
    version,
    about = "Census of Z/p-graded fusion categories and their extension data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Grading,
    General,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LemmaName {
    Uniqueskew,
    Uniquegamma,
    Qgp,
    Commutes,
    Claim2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Non-group-theoretical categories of dimension p·q².
    #[command(name = "census-pq2")]
    CensusPq2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value = "general")]
        mode: ModeArg,
        /// Re-derive every count by brute force.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Categorifications of R_{3,A}.
    #[command(name = "census-r3a")]
    CensusR3a {
        /// Group descriptor such as "2^1:2+2^2:2".
        #[arg(long)]
        group: FinAbGroup,
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        timing: bool,
    },
    /// Exhaustive check of one structural lemma.
    #[command(name = "verify-lemma")]
    VerifyLemma {
        #[arg(long, value_enum)]
        name: LemmaName,
        #[command(flatten)]
        params: LemmaParams,
    },
    /// Split a valid γ into skew and special blocks.
    #[command(name = "decompose-form")]
    DecomposeForm {
        #[arg(long)]
        group: FinAbGroup,
        /// Matrix as JSON, e.g. "[[0,1],[1,0]]".
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Enumerate O(A ⊕ A*) by brute force.
    #[command(name = "enumerate-orth")]
    EnumerateOrth {
        #[arg(long)]
        group: FinAbGroup,
        /// Print every element, not just the order.
        #[arg(long)]
        list: bool,
    },
    /// The standard table of counts and lemma verdicts.
    Report {
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
}

#[derive(clap::Args, Debug)]
struct LemmaParams {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<i64>,
    #[arg(long)]
    qn: Option<u64>,
    #[arg(long)]
    group: Option<FinAbGroup>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => return report_error(err, &e),
    };
    match dispatch(cli.command, &caps, out) {
        Ok(code) => code,
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse(_) | Error::Unsupported(_) | Error::Singularity(_) => {
            EXIT_USAGE
        }
        Error::Resource(_) => EXIT_CAP,
        _ => EXIT_MISMATCH,
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Resource(format!("write failed: {e}"))
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{s}").map_err(io)
}

fn print_census(out: &mut dyn Write, report: &CensusReport, format: Format) -> Result<()> {
    match format {
        Format::Json => print_json(out, report),
        Format::Tsv => {
            writeln!(out, "{}\n{}", CensusReport::tsv_header(), report.tsv_row()).map_err(io)
        }
    }
}

fn census_exit(report: &CensusReport, oracle: bool) -> i32 {
    if oracle && !report.oracle_checked {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    }
}

fn required<T>(v: Option<T>, flag: &str, lemma: &str) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("verify-lemma --name {lemma} requires --{flag}")))
}

fn run_lemma(name: LemmaName, params: LemmaParams, caps: &Caps) -> Result<LemmaReport> {
    let LemmaParams {
        p,
        q,
        n,
        a,
        qn,
        group,
    } = params;
    match name {
        LemmaName::Uniqueskew => {
            verify::unique_skew(required(q, "q", "uniqueskew")?, n.unwrap_or(1), caps)
        }
        LemmaName::Uniquegamma => verify::unique_gamma(
            required(q, "q", "uniquegamma")?,
            n.unwrap_or(1),
            a.unwrap_or(1),
            caps,
        ),
        LemmaName::Qgp => verify::qgp(&required(group, "group", "qgp")?, caps),
        LemmaName::Commutes => verify::commutes(required(qn, "qn", "commutes")?, caps),
        LemmaName::Claim2 => verify::claim2(
            required(p, "p", "claim2")?,
            required(q, "q", "claim2")?,
            caps,
        ),
    }
}

fn dispatch(cmd: Command, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::CensusPq2 {
            p,
            q,
            mode,
            oracle,
            format,
            timing,
        } => {
            let mode = match mode {
                ModeArg::Grading => Mode::Grading,
                ModeArg::General => Mode::General,
            };
            let start = Instant::now();
            let mut report = census_pq2(
                p,
                q,
                &CensusOptions {
                    mode,
                    oracle,
                    caps: *caps,
                },
            )?;
            if timing {
                report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            print_census(out, &report, format)?;
            Ok(census_exit(&report, oracle))
        }
        Command::CensusR3a {
            group,
            oracle,
            format,
            timing,
        } => {
            let start = Instant::now();
            let mut report = census_r3a(
                &group,
                &CensusOptions {
                    mode: Mode::General,
                    oracle,
                    caps: *caps,
                },
            )?;
            if timing {
                report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            }
            print_census(out, &report, format)?;
            Ok(census_exit(&report, oracle))
        }
        Command::VerifyLemma { name, params } => {
            let report = run_lemma(name, params, caps)?;
            print_json(out, &report)?;
            Ok(if report.passed {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            })
        }
        Command::DecomposeForm { group, gamma } => {
            let entries: Vec<Vec<i64>> = serde_json::from_str(&gamma)
                .map_err(|e| Error::Parse(format!("--gamma is not a JSON matrix: {e}")))?;
            let gamma = GroupHom::from_signed(group.clone(), group.clone(), entries)?;
            let d = decompose(&gamma)?;
            let class = classify_gamma(&gamma)?;
            #[derive(Serialize)]
            struct Out {
                group: String,
                class: String,
                #[serde(flatten)]
                decomposition: crate::formsolve::DecompositionReport,
            }
            print_json(
                out,
                &Out {
                    group: group.descriptor(),
                    class: class.to_string(),
                    decomposition: d.report(),
                },
            )?;
            Ok(EXIT_OK)
        }
        Command::EnumerateOrth { group, list } => {
            let els = enumerate_orthogonal_group(&group, caps)?;
            #[derive(Serialize)]
            struct Out<'a> {
                group: String,
                order: usize,
                #[serde(skip_serializing_if = "Option::is_none")]
                elements: Option<&'a [crate::orthogroup::OrthElem]>,
            }
            print_json(
                out,
                &Out {
                    group: group.descriptor(),
                    order: els.len(),
                    elements: list.then_some(&els[..]),
                },
            )?;
            Ok(EXIT_OK)
        }
        Command::Report { oracle, format } => standard_report(oracle, format, caps, out),
    }
}

const REPORT_PQ2: [(u64, u64); 7] = [(3, 2), (5, 19), (7, 13), (3, 5), (3, 7), (5, 2), (2, 3)];
const REPORT_R3A: [&str; 6] = ["1", "5^1:1", "2^1:2", "2^2:2", "2^1:2+2^2:2", "2^1:2+7^1:4"];

/// Oracles are only requested where they fit the default caps.
fn oracle_fits(p: u64, q: u64) -> bool {
    p == 2 || q.pow(4) <= Caps::default().pair_space
}

fn standard_report(oracle: bool, format: Format, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    let mut censuses = Vec::new();
    for (p, q) in REPORT_PQ2 {
        let opts = CensusOptions {
            mode: Mode::General,
            oracle: oracle && oracle_fits(p, q),
            caps: *caps,
        };
        censuses.push(census_pq2(p, q, &opts)?);
    }
    for g in REPORT_R3A {
        let a = FinAbGroup::parse(g)?;
        let opts = CensusOptions {
            mode: Mode::General,
            oracle: oracle && a.order() <= 16,
            caps: *caps,
        };
        censuses.push(census_r3a(&a, &opts)?);
    }
    let lemmas = vec![
        verify::unique_skew(2, 1, caps)?,
        verify::unique_skew(5, 1, caps)?,
        verify::unique_gamma(2, 1, 1, caps)?,
        verify::unique_gamma(5, 1, 1, caps)?,
        verify::commutes(4, caps)?,
        verify::qgp(&FinAbGroup::parse("2^1:2")?, caps)?,
        verify::claim2(3, 2, caps)?,
        verify::claim2(3, 7, caps)?,
    ];
    let ok = lemmas.iter().all(|l| l.passed)
        && censuses
            .iter()
            .all(|c| c.oracle.is_none() || c.oracle_checked);
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                censuses: &'a [CensusReport],
                lemmas: &'a [LemmaReport],
            }
            print_json(
                out,
                &Out {
                    censuses: &censuses,
                    lemmas: &lemmas,
                },
            )?;
        }
        Format::Tsv => {
            writeln!(out, "{}", CensusReport::tsv_header()).map_err(io)?;
            for c in &censuses {
                writeln!(out, "{}", c.tsv_row()).map_err(io)?;
            }
            writeln!(out, "\nlemma\tparams\tpassed").map_err(io)?;
            for l in &lemmas {
                let params: Vec<String> =
                    l.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(out, "{}\t{}\t{}", l.name, params.join(","), l.passed).map_err(io)?;
            }
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("fusion-census").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn census_pq2_json() {
        let (code, out, _) = call(&["census-pq2", "--p", "3", "--q", "2", "--oracle"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count_general"], 3);
        assert_eq!(v["oracle_checked"], true);
    }

    #[test]
    fn usage_and_domain_errors() {
        assert_eq!(call(&["census-pq2", "--p", "3"]).0, 2);
        assert_eq!(call(&["census-pq2", "--p", "3", "--q", "3"]).0, 2);
        assert_eq!(call(&["census-r3a", "--group", "3^1:2"]).0, 2);
        assert_eq!(call(&["census-r3a", "--group", "nonsense"]).0, 2);
        assert_eq!(call(&["verify-lemma", "--name", "claim2", "--p", "3"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn tsv_and_timing() {
        let (code, out, _) = call(&["census-r3a", "--group", "2^1:2", "--format", "tsv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "p\tq_or_A\tbranch\tcount_grading\tcount_general\toracle_checked\n3\t2^1:2\tgamma-classes\t6\t6\tfalse\n");
        let (_, out, _) = call(&["census-pq2", "--p", "3", "--q", "2", "--timing"]);
        assert!(out.contains("wall_time_ms"));
    }

    #[test]
    fn lemma_exit_codes() {
        assert_eq!(
            call(&["verify-lemma", "--name", "commutes", "--qn", "4"]).0,
            0
        );
        assert_eq!(
            call(&[
                "verify-lemma",
                "--name",
                "uniquegamma",
                "--q",
                "5",
                "--n",
                "1",
                "--a",
                "1"
            ])
            .0,
            0
        );
        assert_eq!(
            call(&["verify-lemma", "--name", "claim2", "--p", "3", "--q", "2"]).0,
            0
        );
        assert_eq!(call(&["enumerate-orth", "--group", "2^1:7"]).0, 4);
    }

    #[test]
    fn decompose_form_output() {
        let (code, out, err) = call(&[
            "decompose-form",
            "--group",
            "2^1:2",
            "--gamma",
            "[[1,0],[1,1]]",
        ]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["blocks"][0]["tag"], "special(1)");
        assert_eq!(
            call(&["decompose-form", "--group", "2^1:2", "--gamma", "[[1,0]"]).0,
            2
        );
    }
}
