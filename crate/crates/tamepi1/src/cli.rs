//! Command-line interface: every computation of the crate behind one
//! binary with JSON output for scripting and golden tests.
//!
//! Exit codes: 0 on success, 1 for domain errors (message on stderr and,
//! in json mode, `{"error": ...}` on stdout), 2 for usage errors.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::action::{delta_action, presentation, scaled_action};
use crate::arith::format_rational;
use crate::groups::{parse_permutation, GroupTuple, PermGroup, DEFAULT_ENUM_CAP};
use crate::moduli::{global_report, ramification_index, vertical_inertia, RamificationReport};
use crate::synthesis::{synthesize_multi, synthesize_unramified};
use crate::tree::{build_tree, parse_point, LocalData, MarkedTree, PPoint};
use crate::words::ConjugatorAction;
use crate::{Error, Result};

/// Environment variable overriding the group enumeration cap.
pub const ENUM_CAP_ENV: &str = "TAMEPI1_GROUP_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "tamepi1",
    about = "Tame Galois actions on punctured projective lines",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct PointsArgs {
    /// Residue characteristic.
    #[arg(long)]
    prime: u64,
    /// Comma-separated marks: rationals n/d or inf.
    #[arg(long)]
    points: String,
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// Semicolon-separated permutation generators in cycle notation.
    #[arg(long)]
    group: String,
    /// Comma-separated branch cycle description in cycle notation.
    #[arg(long)]
    tuple: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stable marked reduction tree of a configuration.
    Tree(PointsArgs),
    /// The action of the tame generator on the bouquet.
    Action {
        #[command(flatten)]
        points: PointsArgs,
        /// Multiply every thickness by this factor first.
        #[arg(long)]
        scale: Option<u64>,
    },
    /// Presentation of the prime-to-p fundamental group over the base
    /// field.
    Presentation(PointsArgs),
    /// Field-of-moduli ramification index of one cover at one prime.
    Ramification {
        #[command(flatten)]
        points: PointsArgs,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Vertical inertia coset of one cover at one prime.
    Inertia {
        #[command(flatten)]
        points: PointsArgs,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Ramification report over several primes.
    Report {
        /// Comma-separated primes.
        #[arg(long)]
        primes: String,
        /// Comma-separated marks: rationals n/d or inf.
        #[arg(long)]
        points: String,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Rational points realizing the local data in a spec file.
    Synthesize {
        /// JSON file: {"primes": {"5": <tree>, ...}}.
        #[arg(long)]
        spec: String,
    },
    /// Rational branch points with unramified field of moduli at the
    /// given primes.
    SynthesizeUnramified {
        /// Semicolon-separated permutation generators in cycle notation.
        #[arg(long)]
        group: String,
        /// Number of marks.
        #[arg(long)]
        r: usize,
        /// Comma-separated primes.
        #[arg(long)]
        primes: String,
    },
}

/// The outcome of one invocation.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run the CLI on the given arguments (without the program name).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut argv: Vec<String> = vec!["tamepi1".into()];
    argv.extend(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: err.to_string(),
                    stderr: String::new(),
                },
                _ => Outcome { code: 2, stdout: String::new(), stderr: err.to_string() },
            };
        }
    };
    let format = cli.format;
    match dispatch(cli) {
        Ok(rendered) => Outcome { code: 0, stdout: rendered, stderr: String::new() },
        Err(err) => {
            let stdout = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({ "error": err.to_string() })
                ),
                Format::Text => String::new(),
            };
            Outcome { code: 1, stdout, stderr: format!("error: {err}\n") }
        }
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let format = cli.format;
    match cli.command {
        Command::Tree(args) => {
            let points = parse_points(&args.points)?;
            let tree = build_tree(&points, args.prime)?;
            Ok(match format {
                Format::Json => json_line(&tree.to_json_value()),
                Format::Text => render_tree_text(&tree),
            })
        }
        Command::Action { points, scale } => {
            let marks = parse_points(&points.points)?;
            let tree = build_tree(&marks, points.prime)?;
            let action = match scale {
                Some(n) if n >= 1 => scaled_action(&tree, n),
                Some(_) => return Err(Error::Usage("--scale must be positive".into())),
                None => delta_action(&tree),
            };
            Ok(match format {
                Format::Json => json_line(&action_json(&action, &tree)),
                Format::Text => render_action_text(&action, &tree),
            })
        }
        Command::Presentation(args) => {
            let points = parse_points(&args.points)?;
            let tree = build_tree(&points, args.prime)?;
            let pres = presentation(&tree, args.prime);
            Ok(match format {
                Format::Json => json_line(&pres.to_json_value()),
                Format::Text => pres.to_text(),
            })
        }
        Command::Ramification { points, group } => {
            let marks = parse_points(&points.points)?;
            let tuple = parse_group_tuple(&group)?;
            let reports =
                global_report(&marks, &tuple, &BTreeSet::from([points.prime]))?;
            let report = &reports[&points.prime];
            Ok(match format {
                Format::Json => json_line(&report.to_json_value()),
                Format::Text => render_report_text(report),
            })
        }
        Command::Inertia { points, group } => {
            let marks = parse_points(&points.points)?;
            let tuple = parse_group_tuple(&group)?;
            let tree = build_tree(&marks, points.prime)?;
            let coset = vertical_inertia(&tree, &tuple)?;
            let mut names: Vec<String> = coset.iter().map(|h| h.to_string()).collect();
            names.sort();
            Ok(match format {
                Format::Json => json_line(&serde_json::json!({
                    "coset": names,
                    "size": names.len(),
                })),
                Format::Text => format!("inertia coset: {}\n", names.join(", ")),
            })
        }
        Command::Report { primes, points, group } => {
            let marks = parse_points(&points)?;
            let tuple = parse_group_tuple(&group)?;
            let primes = parse_primes(&primes)?;
            let reports = global_report(&marks, &tuple, &primes)?;
            Ok(match format {
                Format::Json => {
                    let map: serde_json::Map<String, serde_json::Value> = reports
                        .iter()
                        .map(|(p, r)| (p.to_string(), r.to_json_value()))
                        .collect();
                    json_line(&serde_json::Value::Object(map))
                }
                Format::Text => {
                    let mut out = String::new();
                    for report in reports.values() {
                        out.push_str(&render_report_text(report));
                    }
                    out
                }
            })
        }
        Command::Synthesize { spec } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Error::Io(format!("{spec}: {e}")))?;
            let specs = parse_spec_file(&text)?;
            let points = synthesize_multi(&specs)?;
            render_points(format, &points)
        }
        Command::SynthesizeUnramified { group, r, primes } => {
            let group = parse_group(&group)?;
            let primes = parse_primes(&primes)?;
            let points = synthesize_unramified(&group, r, &primes)?;
            render_points(format, &points)
        }
    }
}

fn json_line(value: &serde_json::Value) -> String {
    format!("{value}\n")
}

fn enum_cap() -> usize {
    std::env::var(ENUM_CAP_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

pub fn parse_points(s: &str) -> Result<Vec<PPoint>> {
    s.split(',')
        .map(|token| parse_point(token))
        .collect::<Result<Vec<_>>>()
}

fn parse_primes(s: &str) -> Result<BTreeSet<u64>> {
    s.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("invalid prime {token:?}")))
        })
        .collect()
}

pub fn parse_group(s: &str) -> Result<Arc<PermGroup>> {
    let generators = s
        .split(';')
        .map(|token| parse_permutation(token, 0))
        .collect::<Result<Vec<_>>>()?;
    PermGroup::with_cap(generators, enum_cap())
}

fn parse_group_tuple(args: &GroupArgs) -> Result<GroupTuple> {
    let group = parse_group(&args.group)?;
    let entries = args
        .tuple
        .split(',')
        .map(|token| parse_permutation(token, group.degree()))
        .collect::<Result<Vec<_>>>()?;
    GroupTuple::new(group, entries)
}

/// Parse the spec-file schema {"primes": {"5": <tree json>, ...}}.
pub fn parse_spec_file(text: &str) -> Result<BTreeMap<u64, LocalData>> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("invalid spec json: {e}")))?;
    let primes = value
        .get("primes")
        .and_then(|v| v.as_object())
        .ok_or_else(|| Error::Parse("spec file needs a \"primes\" object".into()))?;
    let mut out = BTreeMap::new();
    for (key, tree_value) in primes {
        let p: u64 = key
            .parse()
            .map_err(|_| Error::Parse(format!("invalid prime key {key:?}")))?;
        let tree = MarkedTree::from_json_value(tree_value)?;
        out.insert(p, LocalData { tree, prime: p });
    }
    Ok(out)
}

fn render_points(format: Format, points: &[num_rational::BigRational]) -> Result<String> {
    let strings: Vec<String> = points.iter().map(format_rational).collect();
    Ok(match format {
        Format::Json => json_line(&serde_json::json!({
            "points": strings,
            "verified": true,
        })),
        Format::Text => format!("points: {}\n", strings.join(", ")),
    })
}

fn action_json(action: &ConjugatorAction, tree: &MarkedTree) -> serde_json::Value {
    serde_json::json!({
        "rank": action.rank(),
        "order": tree.order(),
        "conjugators": action
            .conjugators()
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>(),
    })
}

fn render_action_text(action: &ConjugatorAction, tree: &MarkedTree) -> String {
    let mut out = String::new();
    out.push_str(&format!("niceorder: {:?}\n", tree.order()));
    for i in 1..=action.rank() {
        out.push_str(&format!("q{i} = {}\n", action.conjugator(i)));
    }
    out
}

fn render_tree_text(tree: &MarkedTree) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "vertices: {} (root 0), marks: {}\n",
        tree.vertex_count(),
        tree.rank()
    ));
    for (child, parent, theta) in tree.edges() {
        out.push_str(&format!("edge {child} -> {parent} thickness {theta}\n"));
    }
    for v in 0..tree.vertex_count() {
        let marks = tree.marks_at(v);
        if !marks.is_empty() {
            out.push_str(&format!("marks at {v}: {marks:?}\n"));
        }
    }
    out.push_str(&format!("niceorder: {:?}\n", tree.order()));
    out
}

fn render_report_text(report: &RamificationReport) -> String {
    format!(
        "p = {}: ramification index {} (divides exp(Inn(G)) = {}){}{}\n",
        report.prime,
        report.index,
        report.bound,
        if report.flags.non_coalescing { ", non-coalescing" } else { "" },
        if report.flags.p_divides_group_order {
            ", warning: p divides |G|, exploratory only"
        } else {
            ""
        },
    )
}

/// Convenience used by tests: the ramification index straight from CLI
/// style string inputs.
pub fn ramification_from_strings(
    prime: u64,
    points: &str,
    group: &str,
    tuple: &str,
) -> Result<u64> {
    let marks = parse_points(points)?;
    let tuple = parse_group_tuple(&GroupArgs { group: group.into(), tuple: tuple.into() })?;
    let tree = build_tree(&marks, prime)?;
    ramification_index(&tree, &tuple)
}
