mod json;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hl7dt::bench::{self, BenchConfig, Representation};
use hl7dt::interval::{demotion, promotion, IntervalElement};
use hl7dt::logic::{all_values, format_table, truth_table, BinaryOp};
use hl7dt::numeric::DEFAULT_FRAC_DIGITS;
use hl7dt::quantity::Comparison;
use hl7dt::{AnyValue, Bl, ConceptRegistry, Cv, Error, Ivl, IvlTs, LogicMode, Pq, Ts, TypeTag, UnitRegistry};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hl7dt", version, about = "HL7 v3 data types from the command line")]
struct Cli {
    /// UCUM registry TSV replacing the built-in one.
    #[arg(long, global = true, env = "HL7_REGISTRY")]
    registry: Option<PathBuf>,

    /// Terminology file replacing the built-in toy registry.
    #[arg(long, global = true, env = "HL7_TERMINOLOGY")]
    terminology: Option<PathBuf>,

    /// Treatment of `na` in the connectives.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Hl7)]
    mode: Mode,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hl7,
    Altered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogicOp {
    And,
    Or,
    Xor,
    Implies,
    Not,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareOp {
    Equal,
    Identical,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelateOp {
    Contains,
    Overlaps,
}

#[derive(Clone, Copy, ValueEnum)]
enum IvlKind {
    #[value(name = "ivl-pq", alias = "pq")]
    IvlPq,
    #[value(name = "ivl-ts", alias = "ts")]
    IvlTs,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepChoice {
    Packed,
    Decomposed,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a literal and print it back.
    Parse {
        /// Type name, e.g. pq, ts, ivl-ts, cv, ii, bl.
        #[arg(long = "type", short = 't')]
        tag: String,
        /// Concept domain for short CV literals.
        #[arg(long)]
        domain: Option<String>,
        #[arg(allow_hyphen_values = true)]
        literal: String,
    },
    /// Canonical value of a quantity in base units.
    Canonical {
        #[arg(allow_hyphen_values = true)]
        quantity: String,
    },
    /// Convert a quantity to another unit.
    Convert {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Compare two values of one type.
    Compare {
        #[arg(long, value_enum)]
        op: CompareOp,
        #[arg(long = "type", short = 't', default_value = "pq")]
        tag: String,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Evaluate a connective, or print its truth table.
    Logic {
        #[arg(long, value_enum)]
        op: LogicOp,
        #[arg(long, conflicts_with = "operands")]
        table: bool,
        #[arg(num_args = 1..=2, required_unless_present = "table")]
        operands: Vec<String>,
    },
    /// Timestamp to the interval it denotes.
    Promote { ts: String },
    /// Interval back to the timestamp that promotes to it.
    Demote { interval: String },
    /// Interval relations; `b` may be an interval or a single element.
    Relate {
        #[arg(long, value_enum)]
        op: RelateOp,
        #[arg(long = "type", short = 't', value_enum, default_value_t = IvlKind::IvlPq)]
        kind: IvlKind,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Whether concept `a` is `b` or a specialization of it.
    Implies {
        #[arg(long)]
        domain: Option<String>,
        a: String,
        b: String,
    },
    /// Packed versus decomposed storage benchmark; writes CSV.
    Bench {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, value_enum, default_value_t = RepChoice::Both)]
        rep: RepChoice,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Ctx {
    units: &'static UnitRegistry,
    terms: &'static ConceptRegistry,
    mode: LogicMode,
    format: Format,
}

impl Ctx {
    fn emit(&self, text: &str, value: Value) -> String {
        match self.format {
            Format::Text => text.to_string(),
            Format::Json => value.to_string(),
        }
    }

    fn emit_value(&self, v: &AnyValue) -> String {
        self.emit(&v.to_string(), json::value(v, self.terms))
    }

    fn emit_bl(&self, b: Bl) -> String {
        self.emit_value(&AnyValue::Bl(b))
    }

    fn pq(&self, s: &str) -> Result<Pq, Error> {
        Pq::parse(s, self.units)
    }
}

fn ordering_bl(op: CompareOp, ord: std::cmp::Ordering) -> Bl {
    use std::cmp::Ordering::*;
    Bl::from(match op {
        CompareOp::Lt => ord == Less,
        CompareOp::Le => ord != Greater,
        CompareOp::Gt => ord == Greater,
        CompareOp::Ge => ord != Less,
        CompareOp::Equal | CompareOp::Identical => ord == Equal,
    })
}

fn compare(ctx: &Ctx, op: CompareOp, tag: TypeTag, a: &str, b: &str) -> Result<Bl, Error> {
    let parse = |s: &str| AnyValue::parse(tag, s, ctx.units, ctx.terms, None);
    let (x, y) = (parse(a)?, parse(b)?);
    let unsupported = || Error::Cast {
        from: tag.name(),
        to: "ordered type",
    };
    Ok(match (&x, &y, op) {
        (AnyValue::Pq(p), AnyValue::Pq(q), CompareOp::Equal) => p.equal(q),
        (AnyValue::Pq(p), AnyValue::Pq(q), CompareOp::Identical) => p.identical(q),
        (AnyValue::Pq(p), AnyValue::Pq(q), op) => p.compare(
            match op {
                CompareOp::Lt => Comparison::Lt,
                CompareOp::Le => Comparison::Le,
                CompareOp::Gt => Comparison::Gt,
                _ => Comparison::Ge,
            },
            q,
        ),
        (AnyValue::Ts(s), AnyValue::Ts(t), CompareOp::Equal) => s.equal(t),
        (AnyValue::Ts(s), AnyValue::Ts(t), CompareOp::Identical) => s.identical(t),
        (AnyValue::Ts(s), AnyValue::Ts(t), op) => match s.cmp_offset(t) {
            Some(ord) => ordering_bl(op, ord),
            None => s.equal(t),
        },
        (AnyValue::IvlPq(i), AnyValue::IvlPq(j), CompareOp::Equal) => i.equal(j),
        (AnyValue::IvlPq(i), AnyValue::IvlPq(j), CompareOp::Identical) => i.identical(j),
        (AnyValue::IvlTs(i), AnyValue::IvlTs(j), CompareOp::Equal) => i.equal(j),
        (AnyValue::IvlTs(i), AnyValue::IvlTs(j), CompareOp::Identical) => i.identical(j),
        (AnyValue::Bl(p), AnyValue::Bl(q), CompareOp::Equal | CompareOp::Identical) => p.equal(*q),
        (AnyValue::Bn(p), AnyValue::Bn(q), CompareOp::Equal | CompareOp::Identical) => Bl::from(p == q),
        (AnyValue::Cv(c), AnyValue::Cv(d), CompareOp::Equal) => c.equal(d),
        (AnyValue::Cv(c), AnyValue::Cv(d), CompareOp::Identical) => c.identical(d),
        (AnyValue::Ii(i), AnyValue::Ii(j), CompareOp::Equal | CompareOp::Identical) => i.equal(j),
        (AnyValue::In(i), AnyValue::In(j), CompareOp::Equal | CompareOp::Identical) => i.as_ii().equal(j.as_ii()),
        (AnyValue::Real(r), AnyValue::Real(s), op) => match (r.value(), s.value()) {
            (Some(p), Some(q)) => ordering_bl(op, p.cmp(q)),
            _ => {
                let flavor = |x: &hl7dt::Real| match x {
                    hl7dt::Real::Null(nf) => Some(*nf),
                    _ => None,
                };
                let nf = match (flavor(r), flavor(s)) {
                    (Some(a), Some(b)) => a.lca(b),
                    (a, b) => a.or(b).expect("one side is null"),
                };
                Bl::null_lossy(nf)
            }
        },
        _ => return Err(unsupported()),
    })
}

/// Either side of `relate`: an interval, or an element taken as a point.
fn relate<T>(ctx: &Ctx, op: RelateOp, a: &str, b: &str) -> Result<Bl, Error>
where
    T: IntervalElement,
{
    let outer: Ivl<T> = Ivl::parse(a, ctx.units)?;
    match T::parse_element(b, ctx.units) {
        Ok(e) => match op {
            RelateOp::Contains => outer.contains_element(&e),
            RelateOp::Overlaps => outer.overlaps(&Ivl::point(e)),
        },
        Err(_) => {
            let inner: Ivl<T> = Ivl::parse(b, ctx.units)?;
            match op {
                RelateOp::Contains => outer.contains(&inner),
                RelateOp::Overlaps => outer.overlaps(&inner),
            }
        }
    }
}

fn logic(ctx: &Ctx, op: LogicOp, table: bool, operands: &[String]) -> Result<String, Error> {
    let binary = match op {
        LogicOp::And => Some(BinaryOp::And),
        LogicOp::Or => Some(BinaryOp::Or),
        LogicOp::Xor => Some(BinaryOp::Xor),
        LogicOp::Implies => Some(BinaryOp::Implies),
        LogicOp::Not => None,
    };
    if table {
        return Ok(match binary {
            Some(b) => {
                let grid = truth_table(b, ctx.mode);
                let rows: Vec<Vec<String>> = grid
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect();
                let axis: Vec<String> = all_values().iter().map(ToString::to_string).collect();
                let text = format_table(b, &grid);
                ctx.emit(
                    text.trim_end(),
                    json!({ "tag": "TABLE", "op": b.to_string(), "axis": axis, "rows": rows }),
                )
            }
            None => {
                let rows: Vec<(String, String)> = all_values()
                    .iter()
                    .map(|x| (x.to_string(), x.not().to_string()))
                    .collect();
                let text: Vec<String> = rows.iter().map(|(x, y)| format!("{x}\t{y}")).collect();
                ctx.emit(
                    &format!("NOT\n{}", text.join("\n")),
                    json!({ "tag": "TABLE", "op": "NOT", "rows": rows }),
                )
            }
        });
    }
    let x = Bl::parse(&operands[0])?;
    let result = match (binary, operands.get(1)) {
        (None, None) => x.not(),
        (Some(b), Some(y)) => x.binary(b, Bl::parse(y)?, ctx.mode),
        (None, Some(_)) => {
            return Err(Error::Parse {
                what: "logic operands",
                literal: operands.join(" "),
                reason: "not takes one operand".into(),
            })
        }
        (Some(_), None) => {
            return Err(Error::Parse {
                what: "logic operands",
                literal: operands.join(" "),
                reason: "binary connective takes two operands".into(),
            })
        }
    };
    Ok(ctx.emit_bl(result))
}

fn bench_cmd(ctx: &Ctx, n: usize, seed: u64, runs: u64, rep: RepChoice, out: Option<PathBuf>) -> Result<String, Error> {
    let cfg = BenchConfig {
        n,
        seed,
        runs: runs as usize,
        ..BenchConfig::default()
    };
    let reps: &[Representation] = match rep {
        RepChoice::Packed => &[Representation::Packed],
        RepChoice::Decomposed => &[Representation::Decomposed],
        RepChoice::Both => &[Representation::Packed, Representation::Decomposed],
    };
    let report = bench::run(&cfg, reps, ctx.units)?;
    if !report.results_agree() {
        return Err(Error::Parse {
            what: "benchmark",
            literal: format!("n={n} seed={seed}"),
            reason: "representations returned different result sets".into(),
        });
    }
    let io_err = |path: &std::path::Path, e: io::Error| Error::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut csv = Vec::new();
    report.write_csv(&mut csv).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("ascii");
    let summary = json!({
        "tag": "BENCH",
        "seed": seed,
        "n": n,
        "units": report.units,
        "measurements": report.measurements.iter().map(|m| json!({
            "representation": m.representation.name(),
            "operation": m.operation,
            "median_ns": m.median_ns.to_string(),
            "mean_ns": m.mean_ns.to_string(),
            "index_bytes": m.index_bytes,
        })).collect::<Vec<_>>(),
    });
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?);
            w.write_all(csv.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| io_err(&path, e))?;
            Ok(ctx.emit(&format!("wrote {}", path.display()), summary))
        }
        None => Ok(ctx.emit(csv.trim_end(), summary)),
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    let units: &'static UnitRegistry = match &cli.registry {
        Some(p) => Box::leak(Box::new(UnitRegistry::load(p)?)),
        None => UnitRegistry::standard(),
    };
    let terms: &'static ConceptRegistry = match &cli.terminology {
        Some(p) => Box::leak(Box::new(ConceptRegistry::load(p)?)),
        None => ConceptRegistry::standard(),
    };
    let ctx = Ctx {
        units,
        terms,
        mode: match cli.mode {
            Mode::Hl7 => LogicMode::Hl7,
            Mode::Altered => LogicMode::Altered,
        },
        format: cli.format,
    };
    match cli.command {
        Command::Parse { tag, domain, literal } => {
            let tag: TypeTag = tag.parse()?;
            let v = AnyValue::parse(tag, &literal, ctx.units, ctx.terms, domain.as_deref())?;
            Ok(ctx.emit_value(&v))
        }
        Command::Canonical { quantity } => {
            let p = ctx.pq(&quantity)?;
            let (Some(v), Some(u)) = (p.canonical_value(), p.unit()) else {
                return Err(Error::NullOperand(p.to_string()));
            };
            let base = u.canonical().base_expression();
            let value = v.to_decimal_string(DEFAULT_FRAC_DIGITS);
            let text = if base.is_empty() || base == "1" {
                value.clone()
            } else {
                format!("{value} {base}")
            };
            Ok(ctx.emit(
                &text,
                json!({ "tag": "PQ", "literal": text, "value": value, "unit": base, "exact": v.to_string() }),
            ))
        }
        Command::Convert { from, to } => {
            let p = ctx.pq(&from)?;
            let target = ctx.units.parse(&to)?;
            Ok(ctx.emit_value(&AnyValue::Pq(p.convert(&target)?)))
        }
        Command::Compare { op, tag, a, b } => {
            let tag: TypeTag = tag.parse()?;
            Ok(ctx.emit_bl(compare(&ctx, op, tag, &a, &b)?))
        }
        Command::Logic { op, table, operands } => logic(&ctx, op, table, &operands),
        Command::Promote { ts } => {
            let t = Ts::parse(&ts)?;
            Ok(ctx.emit_value(&AnyValue::IvlTs(promotion(&t)?)))
        }
        Command::Demote { interval } => {
            let i = IvlTs::parse(&interval, ctx.units)?;
            Ok(ctx.emit_value(&AnyValue::Ts(demotion(&i))))
        }
        Command::Relate { op, kind, a, b } => {
            let r = match kind {
                IvlKind::IvlPq => relate::<Pq>(&ctx, op, &a, &b)?,
                IvlKind::IvlTs => relate::<Ts>(&ctx, op, &a, &b)?,
            };
            Ok(ctx.emit_bl(r))
        }
        Command::Implies { domain, a, b } => {
            let x = Cv::parse(&a, domain.as_deref(), ctx.terms)?;
            let y = Cv::parse(&b, domain.as_deref(), ctx.terms)?;
            Ok(ctx.emit_value(&AnyValue::Bn(x.implies(&y, ctx.terms)?)))
        }
        Command::Bench {
            n,
            seed,
            runs,
            rep,
            out,
        } => bench_cmd(&ctx, n, seed, runs, rep, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = writeln!(stdout, "{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
