use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use negaq::codec;
use negaq::cylinders::{self, AdjacencyReport, Orientation, Placement};
use negaq::rational::{format_rational, parse_rational};
use negaq::series::{self, SystemKind};
use negaq::{classic, DigitStream, DigitWord, Error, Interval, QMatrix, Rational};
use serde_json::{json, Value};

const DEFAULT_MAX_ENUM: u128 = 100_000;
const MAX_COVERAGE_RANK: usize = 6;

#[derive(Parser)]
#[command(name = "negaq", version, about = "Exact Q-tilde and nega-Q-tilde expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Matrix JSON file, or "-" for standard input. Defaults to base 2.
    #[arg(long)]
    matrix: Option<String>,
    /// Print a JSON report instead of plain lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SystemArg {
    #[arg(long, default_value = "nega-analytic", value_parser = parse_system)]
    system: SystemKind,
}

#[derive(Subcommand)]
enum Command {
    /// Check a matrix and report its shape.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Endpoints t0' and t0'' of the analytic nega-range.
    Range {
        #[command(flatten)]
        common: Common,
    },
    /// Digits of x to the given depth.
    Encode {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        system: SystemArg,
        /// Point as "p/q".
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Value of a stream "head;tail", or the cylinder of a finite word.
    Decode {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        digits: String,
    },
    /// Reflects even-position digits, mapping positive and nega-geometric digits into each other.
    Convert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
    },
    /// Drops the first k digits.
    Shift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
        #[arg(long)]
        k: usize,
    },
    /// Extent and diameter of a cylinder.
    Cylinder {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        system: SystemArg,
        #[arg(long, default_value = "")]
        digits: String,
    },
    /// Placement of the analytic cylinders base c and base (c+1).
    Adjacency {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "")]
        digits: String,
        #[arg(long)]
        c: usize,
    },
    /// Covering condition for every adjacent digit pair.
    CheckTheorem1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        max_rank: usize,
    },
    /// Whether base followed by m,0,m,0,... equals the decremented base followed by 0,m,0,m,...
    CheckLemma2 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        digits: String,
    },
    /// Exhaustive check that the rank-n analytic cylinders cover the range.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=MAX_COVERAGE_RANK as i64))]
        rank: u8,
    },
    /// Writes the matrix of a classical system.
    Classic {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        s: Option<u64>,
        /// Comma-separated Cantor bases.
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
        /// Repeat the whole list instead of only its last base.
        #[arg(long)]
        cycle: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    S,
    NegaS,
    Cantor,
    NegaCantor,
}

fn parse_system(s: &str) -> Result<SystemKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Domain(e)
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn load_matrix(common: &Common) -> CliResult<QMatrix> {
    let Some(path) = &common.matrix else {
        return Ok(classic::from_base_s(2)?);
    };
    let text = if path == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Usage(format!("cannot read standard input: {e}")))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?
    };
    Ok(QMatrix::from_json(&text)?)
}

fn max_enum() -> CliResult<u128> {
    match std::env::var("NEGAQ_MAX_ENUM") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("NEGAQ_MAX_ENUM must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_ENUM),
    }
}

fn r(x: &Rational) -> String {
    format_rational(x)
}

fn interval_json(iv: &Interval) -> Value {
    json!({ "lo": r(iv.lo()), "hi": r(iv.hi()) })
}

fn emit(json_mode: bool, report: Value, plain: impl FnOnce() -> Vec<String>) {
    if json_mode {
        println!("{report}");
    } else {
        for line in plain() {
            println!("{line}");
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Validate { common } => {
            let m = load_matrix(&common)?;
            let warnings = m.warnings();
            let report = json!({
                "valid": true,
                "prefix_len": m.prefix_len(),
                "cycle_len": m.declared_cycle_len(),
                "single_digit_prefix_columns": warnings,
            });
            emit(common.json, report, || {
                let mut lines =
                    vec![format!("valid: {} prefix column(s), cycle of {}", m.prefix_len(), m.declared_cycle_len())];
                lines.extend(warnings.iter().map(|c| format!("warning: prefix column {c} has a single digit")));
                lines
            });
        }
        Command::Range { common } => {
            let m = load_matrix(&common)?;
            let (lo, hi) = cylinders::range_endpoints(&m);
            let range = cylinders::value_range(&m);
            let extremal = m.analytic_extremes().alternating_tails_extremal();
            let report = json!({
                "t0_lo": r(&lo),
                "t0_hi": r(&hi),
                "range": interval_json(&range),
                "alternating_tails_extremal": extremal,
            });
            emit(common.json, report, || {
                let mut lines = vec![format!("t0' = {}, t0'' = {}", r(&lo), r(&hi))];
                if !extremal {
                    lines.push(format!("range = {range} (the alternating tails are not extremal)"));
                }
                lines
            });
        }
        Command::Encode { common, system: SystemArg { system }, x, depth } => {
            let m = load_matrix(&common)?;
            let x = parse_rational(&x)?;
            let (word, alternatives) = if system == SystemKind::NegaAnalytic {
                let e = codec::encode_nega_analytic(&m, &x, depth)?;
                (e.word, Some(e.alternatives))
            } else {
                (codec::encode(&m, system, &x, depth)?, None)
            };
            let extent = series::eval(&m, system, &word)?;
            let mut report = json!({
                "system": system.name(),
                "x": r(&x),
                "digits": word.to_string(),
                "cylinder": interval_json(&extent),
            });
            if let Some(a) = alternatives {
                report["canonical"] = json!(true);
                report["alternatives"] = json!(a);
            }
            emit(common.json, report, || vec![word.to_string()]);
        }
        Command::Decode { common, system: SystemArg { system }, digits } => {
            let m = load_matrix(&common)?;
            if digits.contains(';') {
                let stream: DigitStream = digits.parse()?;
                let v = series::eval_stream(&m, system, &stream)?;
                emit(common.json, json!({ "system": system.name(), "value": r(&v) }), || vec![r(&v)]);
            } else {
                let word: DigitWord = digits.parse()?;
                let iv = series::eval(&m, system, &word)?;
                emit(common.json, json!({ "system": system.name(), "cylinder": interval_json(&iv) }), || {
                    vec![iv.to_string()]
                });
            }
        }
        Command::Convert { common, digits } => {
            let m = load_matrix(&common)?;
            let out = if digits.contains(';') {
                codec::flip_stream(&m, &digits.parse()?)?.to_string()
            } else {
                codec::flip(&m, &digits.parse()?)?.to_string()
            };
            emit(common.json, json!({ "digits": out }), || vec![out.clone()]);
        }
        Command::Shift { common, digits, k } => {
            let out = if digits.contains(';') {
                codec::shift_stream(&digits.parse()?, k).to_string()
            } else {
                codec::shift(&digits.parse()?, k)?.to_string()
            };
            emit(common.json, json!({ "digits": out }), || vec![out.clone()]);
        }
        Command::Cylinder { common, system: SystemArg { system }, digits } => {
            let m = load_matrix(&common)?;
            let cyl = cylinders::Cylinder::new(&m, system, digits.parse()?)?;
            let d = cyl.diameter();
            let report = json!({
                "system": system.name(),
                "base": cyl.base.to_string(),
                "rank": cyl.rank,
                "extent": interval_json(&cyl.extent),
                "diameter": r(&d),
            });
            emit(common.json, report, || vec![format!("{} diameter = {}", cyl.extent, r(&d))]);
        }
        Command::Adjacency { common, digits, c } => {
            let m = load_matrix(&common)?;
            let report = cylinders::adjacency(&m, &digits.parse()?, c)?;
            emit(common.json, adjacency_json(&report), || adjacency_lines(&report));
        }
        Command::CheckTheorem1 { common, max_rank } => {
            let m = load_matrix(&common)?;
            let report = cylinders::check_theorem1(&m, max_rank);
            let value = serde_json::to_value(&report).expect("report serializes");
            emit(common.json, value, || {
                let mut lines = vec![format!(
                    "{} (columns 1..={})",
                    if report.holds { "holds" } else { "fails" },
                    report.ranks_checked
                )];
                lines.extend(report.failures().map(|e| format!("rank {} c {}: slack {}", e.rank, e.c, r(&e.slack))));
                lines
            });
        }
        Command::CheckLemma2 { common, digits } => {
            let m = load_matrix(&common)?;
            let rep = cylinders::check_lemma2(&m, &digits.parse()?)?;
            let opt = |v: Option<Rational>| v.map(|x| r(&x));
            let report = json!({
                "rank": rep.rank,
                "lhs": { "numerator": r(&rep.lhs_numerator), "denominator": r(&rep.lhs_denominator), "value": opt(rep.lhs()) },
                "rhs": { "numerator": r(&rep.rhs_numerator), "denominator": r(&rep.rhs_denominator), "value": opt(rep.rhs()) },
                "condition_holds": rep.condition_holds,
                "x1": r(&rep.x1),
                "x2": r(&rep.x2),
                "values_equal": rep.values_equal,
            });
            emit(common.json, report, || {
                vec![
                    format!("x1 = {}, x2 = {}, equal: {}", r(&rep.x1), r(&rep.x2), rep.values_equal),
                    format!("condition holds: {}", rep.condition_holds),
                ]
            });
        }
        Command::Coverage { common, rank } => {
            let m = load_matrix(&common)?;
            let rep = cylinders::coverage(&m, rank as usize, max_enum()?)?;
            let report = json!({
                "rank": rep.rank,
                "range": interval_json(&rep.range),
                "cylinders": rep.cylinders,
                "covered": rep.covered(),
                "gaps": rep.gaps.iter().map(|g| json!({ "lo": r(g.lo()), "hi": r(g.hi()), "width": r(&g.width()) })).collect::<Vec<_>>(),
            });
            emit(common.json, report, || {
                let mut lines = vec![format!(
                    "{} rank-{} cylinders {} {}",
                    rep.cylinders,
                    rep.rank,
                    if rep.covered() { "cover" } else { "do not cover" },
                    rep.range
                )];
                lines.extend(rep.gaps.iter().map(|g| format!("gap {g} width {}", r(&g.width()))));
                lines
            });
        }
        Command::Classic { preset, s, d, cycle } => {
            let m = match preset {
                Preset::S | Preset::NegaS => {
                    let s = s.ok_or_else(|| Failure::Usage("--s is required for this preset".into()))?;
                    classic::from_base_s(s)?
                }
                Preset::Cantor | Preset::NegaCantor => {
                    if d.is_empty() {
                        return Err(Failure::Usage("--d is required for this preset".into()));
                    }
                    classic::from_cantor(&d, cycle)?
                }
            };
            println!("{}", m.to_json());
        }
    }
    Ok(())
}

fn adjacency_json(a: &AdjacencyReport) -> Value {
    json!({
        "rank": a.rank,
        "c": a.c,
        "kappa1": r(&a.kappa1),
        "kappa2": r(&a.kappa2),
        "nu1": r(&a.nu1),
        "nu2": r(&a.nu2),
        "omega1": r(&a.omega1),
        "omega2": r(&a.omega2),
        "slack": r(&a.slack),
        "classification": placement_name(a.placement),
        "orientation": orientation_name(a.orientation),
    })
}

fn adjacency_lines(a: &AdjacencyReport) -> Vec<String> {
    vec![
        format!("kappa1 = {}, kappa2 = {}", r(&a.kappa1), r(&a.kappa2)),
        format!("nu1 = {}, nu2 = {}", r(&a.nu1), r(&a.nu2)),
        format!("omega1 = {}, omega2 = {}, slack = {}", r(&a.omega1), r(&a.omega2), r(&a.slack)),
        format!("{} {}", placement_name(a.placement), orientation_name(a.orientation)),
    ]
}

fn placement_name(p: Placement) -> &'static str {
    match p {
        Placement::Overlap => "overlap",
        Placement::Touch => "touch",
        Placement::Gap => "gap",
    }
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::LeftToRight => "left-to-right",
        Orientation::RightToLeft => "right-to-left",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
