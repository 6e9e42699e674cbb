//! The `csrg` command line: construct, verify and evaluate, with JSON, text
//! or CSV output.

pub mod identities;
pub mod selftest;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use csrg::construct::{
    build_shd_family, build_srg_family, build_table1, build_thm13, build_thm14, lift_index_set, HSet, Thm13Variant, Thm14Variant, SCHEMA,
};
use csrg::gauss::{gauss_sum_exact, load_or_build, cache_path, quadratic_gauss_closed, semiprimitive_gauss_closed, CacheStatus};
use csrg::gf::{build_field, checked_field_size, BUILD_LIMIT, VERIFY_LIMIT};
use csrg::relgauss::relative_gauss_limited;
use csrg::residue::{index_of, semiprimitive_exponent, valuation};
use csrg::verify::{verify_paley_pds, verify_skew_hadamard, verify_srg, Verdict, VerifyOptions};
use csrg::{ConnectionSpec, CycInt, Error, Meta};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SIZE: i32 = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "csrg", version, about = "Cyclotomic strongly regular graphs and exact Gauss sums", arg_required_else_help = true)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Directory for cached trace-count tables.
    #[arg(long, env = "CSRG_CACHE_DIR", global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Largest field to enumerate (at most 2^24 without --unsafe-large).
    #[arg(long, global = true)]
    pub limit: Option<u64>,
    #[arg(long, global = true)]
    pub unsafe_large: bool,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall-clock times in reports.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strongly regular Cayley graph test.
    VerifySrg(SpecArgs),
    /// Skew Hadamard difference set test.
    VerifyDds(SpecArgs),
    /// Paley-type partial difference set test.
    VerifyPds(SpecArgs),
    /// Print a connection spec as JSON.
    Construct(ConstructArgs),
    /// Exact Gauss sums G(χ^u) for χ of order k on F_{p^f}.
    Gauss {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: u32,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        u: Option<i64>,
    },
    /// Relative Gauss sum for k' = k·p1 with its predicted sign.
    Relgauss {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p1: u64,
        #[arg(long, default_value_t = 1)]
        u: u64,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(value_enum)]
        level: Option<LevelArg>,
    },
    /// Build or inspect cached trace-count tables.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    Build(TableArgs),
    Show(TableArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    f: u32,
    #[arg(long)]
    k: u64,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Read the spec from a JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["p", "f", "k", "classes"])]
    spec: Option<PathBuf>,
    #[arg(long, required_unless_present = "spec")]
    p: Option<u64>,
    #[arg(long, required_unless_present = "spec")]
    f: Option<u32>,
    #[arg(long, required_unless_present = "spec")]
    k: Option<u64>,
    #[arg(long, value_delimiter = ',', required_unless_present = "spec")]
    classes: Vec<u64>,
    /// Classes are cosets of powers of γ^t.
    #[arg(long)]
    generator: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(subcommand)]
    family: Family,
    /// Apply the index-set lift this many times.
    #[arg(long, default_value_t = 0, global = true)]
    lift: u32,
    /// Prime for --lift (defaults to the family's p1).
    #[arg(long, global = true)]
    lift_prime: Option<u64>,
    #[arg(long, global = true)]
    generator: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    Table1 {
        #[arg(long)]
        no: usize,
    },
    Thm13 {
        #[arg(long, value_enum)]
        variant: V13,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        p2: Option<u64>,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: Option<u32>,
    },
    Thm14 {
        #[arg(long, value_enum)]
        variant: V14,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        s: Option<u64>,
        /// H inside Z_{2·p1^m} (variant i).
        #[arg(long, value_delimiter = ',')]
        h: Vec<u64>,
    },
    SrgFamily {
        #[arg(long)]
        p: u64,
        /// Prime powers of k, e.g. 3^2,5.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<String>,
        #[arg(long)]
        e: u64,
    },
    Shd {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        e1: u32,
        #[arg(long)]
        e: Option<u64>,
        /// Element added to Q ∪ 2Q (defaults to p1).
        #[arg(long)]
        extra: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum V13 {
    I,
    Ii,
    Iii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum V14 {
    I,
    Ii,
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Core(e) if e.is_size_error() => EXIT_SIZE,
            _ => EXIT_ERROR,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Out = std::result::Result<i32, Failure>;

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn limit(cli: &Cli) -> std::result::Result<u64, Failure> {
    match (cli.limit, cli.unsafe_large) {
        (Some(l), false) if l > VERIFY_LIMIT => Err(Failure::Usage(format!("--limit above {VERIFY_LIMIT} needs --unsafe-large"))),
        (Some(l), _) => Ok(l),
        (None, false) => Ok(VERIFY_LIMIT),
        (None, true) => Ok(BUILD_LIMIT),
    }
}

fn options(cli: &Cli) -> std::result::Result<VerifyOptions, Failure> {
    Ok(VerifyOptions { limit: limit(cli)?, cache_dir: cli.cache_dir.clone(), timing: cli.timing, ..VerifyOptions::default() })
}

fn emit_json(out: &mut dyn Write, v: &Value) -> std::result::Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| Failure::Io(e.to_string()))
}

fn emit_text(out: &mut dyn Write, s: &str) -> std::result::Result<(), Failure> {
    writeln!(out, "{s}").map_err(|e| Failure::Io(e.to_string()))
}

fn no_csv(cli: &Cli) -> std::result::Result<(), Failure> {
    if cli.format == Format::Csv {
        return Err(Failure::Usage("csv output is only available for verification profiles".into()));
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Out {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    match &cli.command {
        Command::VerifySrg(a) => cmd_verify(cli, a, "srg", out),
        Command::VerifyDds(a) => cmd_verify(cli, a, "dds", out),
        Command::VerifyPds(a) => cmd_verify(cli, a, "pds", out),
        Command::Construct(a) => cmd_construct(cli, a, out),
        Command::Gauss { p, f, k, u } => cmd_gauss(cli, *p, *f, *k, *u, out),
        Command::Relgauss { p, k, p1, u } => cmd_relgauss(cli, *p, *k, *p1, *u, out),
        Command::Selftest { level } => cmd_selftest(cli, *level, out),
        Command::Cache { action } => cmd_cache(cli, action, out),
    }
}

fn read_spec(a: &SpecArgs) -> std::result::Result<ConnectionSpec, Failure> {
    let spec = match &a.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let spec: ConnectionSpec = serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            spec.validate()?;
            spec
        }
        None => {
            let (Some(p), Some(f), Some(k)) = (a.p, a.f, a.k) else {
                return Err(Failure::Usage("need --p, --f, --k and --classes, or --spec".into()));
            };
            ConnectionSpec::new(p, f, k, a.classes.clone(), Meta::new("cli"))?
        }
    };
    match a.generator {
        Some(t) => Ok(spec.with_generator(t)?),
        None => Ok(spec),
    }
}

fn verdict_text(v: &Verdict) -> String {
    let kind = serde_json::to_value(v.kind).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default();
    let method = serde_json::to_value(v.method).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default();
    let mut s = kind;
    if let Some(p) = &v.params {
        s.push_str(&format!(" ({}, {}, {}, {})", p.v, p.k, p.lambda, p.mu));
        if let (Some(r), Some(t)) = (p.r, p.s) {
            s.push_str(&format!(" r={r} s={t}"));
        }
    }
    s.push_str(&format!(" via {method}"));
    if let Some(r) = &v.reason {
        s.push_str(&format!(": {r}"));
    }
    if let Some(ms) = v.elapsed_ms {
        s.push_str(&format!(" [{ms} ms]"));
    }
    s
}

fn cmd_verify(cli: &Cli, a: &SpecArgs, mode: &str, out: &mut dyn Write) -> Out {
    let spec = read_spec(a)?;
    let opts = options(cli)?;
    let v = match mode {
        "srg" => verify_srg(&spec, &opts)?,
        "dds" => verify_skew_hadamard(&spec, &opts)?,
        _ => verify_paley_pds(&spec, &opts)?,
    };
    match cli.format {
        Format::Json => emit_json(out, &json!({"schema": SCHEMA, "command": format!("verify-{mode}"), "spec": spec, "verdict": v}))?,
        Format::Text => emit_text(out, &verdict_text(&v))?,
        Format::Csv => {
            let mut s = String::from("a,value\n");
            for (i, x) in v.profile.iter().enumerate() {
                s.push_str(&format!("{i},\"{}\"\n", x.format_terms()));
            }
            write!(out, "{s}").map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    Ok(if v.is_positive() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn parse_prime_power(s: &str) -> std::result::Result<(u64, u32), Failure> {
    let bad = || Failure::Usage(format!("bad prime power '{s}', expected p or p^e"));
    match s.split_once('^') {
        Some((b, e)) => Ok((b.trim().parse().map_err(|_| bad())?, e.trim().parse().map_err(|_| bad())?)),
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
    }
}

fn cmd_construct(cli: &Cli, a: &ConstructArgs, out: &mut dyn Write) -> Out {
    no_csv(cli)?;
    let (mut spec, family_prime) = match &a.family {
        Family::Table1 { no } => (build_table1(*no)?, None),
        Family::Thm13 { variant, p, p1, p2, m, n } => {
            let v = match variant {
                V13::I => Thm13Variant::I,
                V13::Ii => Thm13Variant::Ii,
                V13::Iii => Thm13Variant::Iii,
            };
            (build_thm13(v, *p, *p1, *p2, *m, *n)?, Some(*p1))
        }
        Family::Thm14 { variant, p, p1, m, s, h } => {
            let hset = if h.is_empty() { None } else { Some(HSet::new(2 * p1.pow(*m), *p1, h.clone())?) };
            let v = match variant {
                V14::I => Thm14Variant::I,
                V14::Ii => Thm14Variant::Ii,
            };
            (build_thm14(v, *p, *p1, *m, *s, hset.as_ref())?, Some(*p1))
        }
        Family::SrgFamily { p, primes, e } => {
            let pp: Vec<(u64, u32)> = primes.iter().map(|s| parse_prime_power(s)).collect::<std::result::Result<_, _>>()?;
            let first = pp.first().map(|x| x.0);
            (build_srg_family(*p, &pp, *e)?, first)
        }
        Family::Shd { p, p1, e1, e, extra } => {
            let h = HSet::q_2q_union(*p1, extra.unwrap_or(*p1))?;
            let e = match e {
                Some(e) => *e,
                None => index_of(*p, 2 * p1)?,
            };
            (build_shd_family(*p, *p1, *e1, e, &h)?, Some(*p1))
        }
    };
    if a.lift > 0 {
        let p1 = a.lift_prime.or(family_prime).ok_or_else(|| Failure::Usage("--lift needs --lift-prime for this family".into()))?;
        for _ in 0..a.lift {
            spec = lift_index_set(&spec, p1, valuation(spec.k, p1))?;
        }
    }
    if let Some(t) = a.generator {
        spec = spec.with_generator(t)?;
    }
    match cli.format {
        Format::Text => emit_text(out, &format!("({}, {}, {}, {:?})", spec.p, spec.f, spec.k, spec.classes))?,
        _ => emit_json(out, &serde_json::to_value(&spec).map_err(|e| Failure::Io(e.to_string()))?)?,
    }
    Ok(EXIT_OK)
}

/// Closed-form value when one applies to G(χ^u).
fn closed_form(p: u64, f: u32, k: u64, u: u64) -> Result<Option<CycInt>, Error> {
    let order = k / csrg::residue::gcd(u, k);
    if order == 2 && p != 2 {
        return Ok(Some(quadratic_gauss_closed(p, f)?));
    }
    if order > 2 {
        if let Some(s) = semiprimitive_exponent(p, order)? {
            if f as u64 % (2 * s) == 0 {
                return Ok(Some(CycInt::from_int(1, semiprimitive_gauss_closed(p, order, f)?)));
            }
        }
    }
    Ok(None)
}

fn cmd_gauss(cli: &Cli, p: u64, f: u32, k: u64, u: Option<i64>, out: &mut dyn Write) -> Out {
    no_csv(cli)?;
    let lim = limit(cli)?;
    checked_field_size(p, f, lim)?;
    let field = build_field(p, f)?;
    let (table, _) = load_or_build(cli.cache_dir.as_deref(), &field, k, lim)?;
    let us: Vec<i64> = match u {
        Some(u) => vec![u],
        None => (0..k as i64).collect(),
    };
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for u in us {
        let g = gauss_sum_exact(&table, u);
        let closed = closed_form(p, f, k, g.u)?;
        let agree = closed.as_ref().map(|c| *c == g.value);
        if agree == Some(false) {
            return Err(Failure::Core(Error::CrossCheckMismatch(format!("G(chi^{}) differs from its closed form", g.u))));
        }
        lines.push(format!("u={}: {}{}", g.u, g.value, if agree == Some(true) { " [closed form agrees]" } else { "" }));
        let mut row = serde_json::to_value(&g).map_err(|e| Failure::Io(e.to_string()))?;
        row["text"] = json!(g.value.to_string());
        row["closed_form_agrees"] = json!(agree);
        rows.push(row);
    }
    match cli.format {
        Format::Text => emit_text(out, &lines.join("\n"))?,
        _ => emit_json(out, &json!({"schema": SCHEMA, "command": "gauss", "p": p, "f": f, "k": k, "sums": rows}))?,
    }
    Ok(EXIT_OK)
}

fn cmd_relgauss(cli: &Cli, p: u64, k: u64, p1: u64, u: u64, out: &mut dyn Write) -> Out {
    no_csv(cli)?;
    let r = relative_gauss_limited(p, k, p1, u, limit(cli)?)?;
    let matched = r.matches_prediction();
    match cli.format {
        Format::Text => {
            let theta = match r.classification.sign() {
                Some(s) => s.to_string(),
                None => r.theta.to_string(),
            };
            let predicted = r.predicted.epsilon.map(|e| format!("{e:+}")).unwrap_or_else(|| "n/a".into());
            let verdict = match matched {
                Some(true) => "match",
                Some(false) => "mismatch",
                None => "no prediction",
            };
            emit_text(out, &format!("theta={theta}, predicted={predicted}, {verdict}"))?
        }
        _ => {
            let mut v = serde_json::to_value(&r).map_err(|e| Failure::Io(e.to_string()))?;
            v["schema"] = json!(SCHEMA);
            v["command"] = json!("relgauss");
            v["match"] = json!(matched);
            emit_json(out, &v)?
        }
    }
    Ok(if matched == Some(false) { EXIT_NEGATIVE } else { EXIT_OK })
}

fn cmd_selftest(cli: &Cli, level: Option<LevelArg>, out: &mut dyn Write) -> Out {
    no_csv(cli)?;
    let level = match level {
        Some(LevelArg::Quick) => selftest::Level::Quick,
        Some(LevelArg::Full) => selftest::Level::Full,
        None => return Err(Failure::Usage("usage: csrg selftest <quick|full>".into())),
    };
    let ctx = selftest::Context { cache_dir: cli.cache_dir.clone() };
    let mut reports = Vec::new();
    for &id in level.criteria() {
        let r = selftest::run_criterion(id, &ctx);
        if cli.format == Format::Text {
            emit_text(out, &r.line())?;
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    if cli.format == Format::Json {
        let criteria: Vec<Value> = reports
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).unwrap_or_default();
                if cli.timing {
                    v["elapsed_ms"] = json!(r.elapsed.as_millis() as u64);
                }
                v
            })
            .collect();
        emit_json(out, &json!({"schema": SCHEMA, "command": "selftest", "level": level, "passed": passed, "criteria": criteria}))?;
    }
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_cache(cli: &Cli, action: &CacheAction, out: &mut dyn Write) -> Out {
    no_csv(cli)?;
    let dir = cli.cache_dir.as_deref().ok_or_else(|| Failure::Usage("cache commands need --cache-dir or CSRG_CACHE_DIR".into()))?;
    let lim = limit(cli)?;
    let (value, text) = match action {
        CacheAction::Build(t) => {
            checked_field_size(t.p, t.f, lim)?;
            let field = build_field(t.p, t.f)?;
            let (_, status) = load_or_build(Some(dir), &field, t.k, lim)?;
            let status = match status {
                CacheStatus::Hit => "hit",
                CacheStatus::Built => "built",
                CacheStatus::Rebuilt => "rebuilt",
                CacheStatus::Disabled => "disabled",
            };
            let path = cache_path(dir, t.p, t.f, t.k);
            (json!({"p": t.p, "f": t.f, "k": t.k, "status": status, "path": path.display().to_string()}), format!("{status} {}", path.display()))
        }
        CacheAction::Show(t) => {
            let path = cache_path(dir, t.p, t.f, t.k);
            match std::fs::read(&path) {
                Err(_) => (json!({"p": t.p, "f": t.f, "k": t.k, "present": false}), format!("missing {}", path.display())),
                Ok(bytes) => {
                    let table = csrg::TraceCountTable::from_bytes(&bytes);
                    let valid = matches!(&table, Ok(tb) if tb.p == t.p && tb.f == t.f && tb.k == t.k);
                    (
                        json!({"p": t.p, "f": t.f, "k": t.k, "present": true, "valid": valid, "bytes": bytes.len(), "path": path.display().to_string()}),
                        format!("{} {} ({} bytes)", if valid { "valid" } else { "invalid" }, path.display(), bytes.len()),
                    )
                }
            }
        }
    };
    match cli.format {
        Format::Text => emit_text(out, &text)?,
        _ => {
            let mut v = value;
            v["schema"] = json!(SCHEMA);
            v["command"] = json!("cache");
            emit_json(out, &v)?
        }
    }
    Ok(EXIT_OK)
}
