//! `eacq` command-line front end. Every command writes one JSON document
//! (or CSV for slices) and maps failures to exit codes: 1 for domain
//! errors, 2 for failed verifications, 64 for usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eacq_core::channels::{build_block_erasure, BlockErasureSpec, KrausChannel};
use eacq_core::codes::{
    block_erasure_for, code_from_spec, concat, eaq_fixture, fixture_names, load_fixture, search_eaq, simulate, Protocol,
};
use eacq_core::converse::{check_rates, erasure_witness_channel, thm1_bounds, CodeRates};
use eacq_core::hilbert::CQEnsemble;
use eacq_core::lemmas::{run_suite, Suite};
use eacq_core::region::{
    export_slice, parse_rational, slice_csv, Coord, IidParams, RateTriple, RegionParams, SingletonParams,
};
use eacq_core::Error;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "eacq", version, about = "EACQ Singleton regions, converse bounds and exact code simulation")]
struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// H-representation, geometry or a 2-D slice of a rate region.
    Region(RegionCmd),
    /// Membership of a rate triple, with the feasible t′ interval.
    Member(MemberCmd),
    /// Randomized entropy-inequality suites.
    Lemmas(LemmasCmd),
    /// Converse bounds for a witness ensemble through a channel.
    Converse(ConverseCmd),
    /// Exact simulation of a code through a block erasure channel.
    Simulate(SimulateCmd),
    /// List shipped code fixtures or search for a new EAQ encoder.
    Codes(CodesCmd),
}

#[derive(Args, Debug)]
struct RegionArgs {
    /// Block length (block erasure region).
    #[arg(long, requires_all = ["d", "q"], conflicts_with = "delta")]
    n: Option<usize>,
    /// Minimum distance (block erasure region).
    #[arg(long)]
    d: Option<usize>,
    /// Alphabet size.
    #[arg(long, default_value_t = 2)]
    q: usize,
    /// Erasure probability, e.g. 1/4 (i.i.d. erasure region).
    #[arg(long)]
    delta: Option<String>,
    /// Also report numbers in bits.
    #[arg(long, value_enum, default_value_t = Units::Logq)]
    units: Units,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Units {
    Logq,
    Bits,
}

#[derive(Args, Debug)]
struct RegionCmd {
    #[command(flatten)]
    params: RegionArgs,
    /// Emit the H-representation (the default).
    #[arg(long)]
    hrep: bool,
    /// Emit apex endpoints and extremal rays.
    #[arg(long)]
    geometry: bool,
    /// Emit membership on a grid with one coordinate fixed, e.g. C=0.
    #[arg(long)]
    slice: Option<String>,
    /// Grid step of the slice.
    #[arg(long, default_value = "1/4")]
    step: String,
    /// Slice range lower end.
    #[arg(long, default_value = "-3", allow_hyphen_values = true)]
    from: String,
    /// Slice range upper end.
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    to: String,
}

#[derive(Args, Debug)]
struct MemberCmd {
    #[command(flatten)]
    params: RegionArgs,
    /// Rate triple C,Q,E in units of log q, each a rational.
    #[arg(long, allow_hyphen_values = true)]
    triple: String,
}

#[derive(Args, Debug)]
struct LemmasCmd {
    /// fannes, af, avg, crazy, ssa or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Factor dimensions, comma separated.
    #[arg(long)]
    dims: Option<String>,
}

#[derive(Args, Debug)]
struct ConverseCmd {
    /// Witness ensemble JSON: {"items": [{"p": .., "state": {"layout": .., "matrix": ..}}]}.
    #[arg(long)]
    ensemble: PathBuf,
    /// erasure:δ on the last factor, or block:n,w on the last n factors.
    #[arg(long)]
    channel: String,
    /// Code rates JSON (bits); zero rates if omitted.
    #[arg(long)]
    rates: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateCmd {
    /// Fixture name, fixture file, rs:q,n,k, eaq:n,d,q or a protocol name with :q.
    #[arg(long)]
    code: String,
    /// block:n,w; defaults to d − 1 erasures on the code's own length.
    #[arg(long)]
    channel: Option<String>,
    /// Concatenate a protocol first, e.g. teleport:1.
    #[arg(long)]
    concat: Option<String>,
}

#[derive(Args, Debug)]
struct CodesCmd {
    /// Search for an EAQ encoder n,d,q instead of listing fixtures.
    #[arg(long)]
    search: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    attempts: usize,
}

/// Parse `argv` (including the program name), run the command and write its
/// output. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(&cli.command) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => EXIT_OK,
                Err(e) => report(stderr, &Error::Io(e)),
            },
            None => {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            }
        },
        Err(e) => report(stderr, &e),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) => EXIT_VERIFICATION,
        Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn report(stderr: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "eacq: {e}");
    exit_code(e)
}

fn dispatch(cmd: &Command) -> eacq_core::Result<String> {
    match cmd {
        Command::Region(c) => region(c),
        Command::Member(c) => member(c),
        Command::Lemmas(c) => lemmas(c),
        Command::Converse(c) => converse(c),
        Command::Simulate(c) => simulate_cmd(c),
        Command::Codes(c) => codes(c),
    }
}

fn pretty(v: &Value) -> eacq_core::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn region_params(a: &RegionArgs) -> eacq_core::Result<RegionParams> {
    match (a.n, &a.delta) {
        (Some(n), None) => {
            let d = a.d.ok_or_else(|| Error::Parse("--n needs --d".into()))?;
            Ok(RegionParams::Singleton(SingletonParams::new(n, d, a.q)?))
        }
        (None, Some(delta)) => Ok(RegionParams::Iid(IidParams::new(a.q, parse_rational(delta)?)?)),
        _ => Err(Error::Parse("give either --n/--d/--q or --delta".into())),
    }
}

fn with_bits(mut v: Value, units: Units, triple: &RateTriple, q: usize) -> Value {
    if units == Units::Bits {
        v["bits"] = json!(triple.to_bits(q));
    }
    v
}

fn region(c: &RegionCmd) -> eacq_core::Result<String> {
    let p = region_params(&c.params)?;
    if let Some(spec) = &c.slice {
        let (coord, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--slice expects COORD=value, got {spec:?}")))?;
        let fixed: Coord = coord.parse()?;
        let points = export_slice(
            &p,
            fixed,
            &parse_rational(value)?,
            (&parse_rational(&c.from)?, &parse_rational(&c.to)?),
            &parse_rational(&c.step)?,
        )?;
        return Ok(slice_csv(&points));
    }
    if c.geometry {
        let g = p.geometry();
        let mut v = json!({"params": p.to_json(), "geometry": g.to_json()});
        if c.params.units == Units::Bits {
            v["geometry"]["a0"]["bits"] = json!(g.a0.to_bits(p.q()));
            v["geometry"]["a1"]["bits"] = json!(g.a1.to_bits(p.q()));
        }
        return pretty(&v);
    }
    let h = p.hrep();
    let mut v = json!({"params": p.to_json(), "hrep": h.to_json()});
    if c.params.units == Units::Bits {
        v["bits_per_logq"] = json!((p.q() as f64).log2());
    }
    pretty(&v)
}

fn member(c: &MemberCmd) -> eacq_core::Result<String> {
    let p = region_params(&c.params)?;
    let x: RateTriple = c.triple.parse()?;
    let m = p.membership(&x);
    let mut v = m.to_json();
    v["triple"] = json!(x.to_strings());
    v["units"] = json!("logq");
    v["params"] = p.to_json();
    pretty(&with_bits(v, c.params.units, &x, p.q()))
}

fn parse_list(s: &str) -> eacq_core::Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad number {x:?} in {s:?}"))))
        .collect()
}

fn lemmas(c: &LemmasCmd) -> eacq_core::Result<String> {
    let dims = c.dims.as_deref().map(parse_list).transpose()?;
    let mut out = Vec::new();
    let mut failed = Vec::new();
    for suite in Suite::parse(&c.suite)? {
        let s = run_suite(suite, c.trials, c.seed, dims.as_deref())?;
        if !s.pass() {
            failed.push(suite.name());
        }
        out.push(serde_json::to_value(&s)?);
    }
    if !failed.is_empty() {
        return Err(Error::Verification(format!("suites with violations: {}", failed.join(", "))));
    }
    pretty(&json!({"units": "bits", "seed": c.seed, "trials": c.trials, "pass": true, "suites": out}))
}

fn channel_for(spec: &str, ens: &CQEnsemble) -> eacq_core::Result<KrausChannel> {
    let layout = ens.layout();
    let last_dim = layout.dims().last().copied().ok_or_else(|| Error::Domain("empty ensemble layout".into()))?;
    if let Some(delta) = spec.strip_prefix("erasure:") {
        return erasure_witness_channel(last_dim, &parse_rational(delta)?);
    }
    if let Some(rest) = spec.strip_prefix("block:") {
        let nw = parse_list(rest)?;
        let [n, w] = nw[..] else {
            return Err(Error::Parse(format!("block channel needs n,w, got {rest:?}")));
        };
        return build_block_erasure(&BlockErasureSpec::new(last_dim, n, w)?);
    }
    Err(Error::Parse(format!("unknown channel {spec:?} (erasure:δ or block:n,w)")))
}

fn converse(c: &ConverseCmd) -> eacq_core::Result<String> {
    let ens = CQEnsemble::from_json(&std::fs::read_to_string(&c.ensemble)?)?;
    let rates: CodeRates = match &c.rates {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => CodeRates::default(),
    };
    let ch = channel_for(&c.channel, &ens)?;
    let b = thm1_bounds(&ens, &ch, &rates)?;
    pretty(&json!({
        "units": "bits",
        "bounds": {"b1": b.b1, "b2": b.b2, "b3": b.b3},
        "info": b.info,
        "rates": rates,
        "admissible": check_rates(&b, &rates),
    }))
}

fn simulate_cmd(c: &SimulateCmd) -> eacq_core::Result<String> {
    let (mut code, q) = code_from_spec(&c.code)?;
    if let Some(spec) = &c.concat {
        let (name, reps) = spec.split_once(':').unwrap_or((spec, "1"));
        let reps: usize = reps.parse().map_err(|_| Error::Parse(format!("bad repetition count in {spec:?}")))?;
        code = concat(&code, Protocol::parse(name)?, q, reps)?;
    }
    let w = match &c.channel {
        Some(spec) => {
            let rest = spec
                .strip_prefix("block:")
                .ok_or_else(|| Error::Parse(format!("simulate supports block:n,w channels, got {spec:?}")))?;
            let v = parse_list(rest)?;
            let [n, w] = v[..] else {
                return Err(Error::Parse(format!("block channel needs n,w, got {rest:?}")));
            };
            if n != code.a_layout().len() {
                return Err(Error::Domain(format!("code has length {}, channel has {n}", code.a_layout().len())));
            }
            w
        }
        None => code.params().map_or(0, |p| p.d.saturating_sub(1)),
    };
    let r = simulate(&code, &block_erasure_for(&code, w)?)?;
    let mut v = r.report(&code, q)?;
    v["erasures"] = json!(w);
    pretty(&v)
}

fn codes(c: &CodesCmd) -> eacq_core::Result<String> {
    if let Some(spec) = &c.search {
        let v = parse_list(spec)?;
        let [n, d, q] = v[..] else {
            return Err(Error::Parse(format!("--search needs n,d,q, got {spec:?}")));
        };
        let found = search_eaq(n, d, q, c.seed, c.attempts)?;
        return Ok(serde_json::to_string(&found.to_fixture())? + "\n");
    }
    let mut list = Vec::new();
    for name in fixture_names() {
        let code = load_fixture(eaq_fixture(name)?)?;
        let params = code.params().map(|p| p.to_string());
        list.push(json!({"name": name, "code": code.name(), "params": params}));
    }
    pretty(&json!({"fixtures": list}))
}
