use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hurwitz::chambers::chambers_report;
use hurwitz::permutation::{count_hurwitz_permutation, for_each_monodromy_set, MonodromySet};
use hurwitz::ribbon::{count_hurwitz_ribbon, enumerate_hrgs, for_each_skeleton};
use hurwitz::traffic::roundtrip_check;
use hurwitz::tropical::{count_hurwitz_tropical, enumerate_monodromy_graphs, enumerate_tropical_graphs};
use hurwitz::{HurwitzError, HurwitzParams, Partition, Rational};

#[derive(Parser)]
#[command(name = "hurwitz", version, about = "Double Hurwitz numbers by permutations, ribbon graphs and tropical graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute H_g(mu, nu) by one or all methods.
    Compute {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        /// Leave timings out so repeated runs are byte-identical.
        #[arg(long)]
        no_timings: bool,
    },
    /// Stream combinatorial objects, one per line (JSON) or one DOT document each.
    Enumerate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
    },
    /// Check all methods and the roundtrip on every parameter set up to the caps.
    Verify {
        #[arg(long)]
        max_d: u32,
        #[arg(long)]
        max_r: usize,
    },
    /// Fit the chamber polynomials of H_g on m + n parts.
    Chambers {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        dmax: u32,
    },
    /// Compare ribbon-graph classes with monodromy classes for one parameter set.
    Roundtrip {
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    genus: u32,
    /// Comma separated parts, e.g. 2,1
    #[arg(long)]
    mu: String,
    #[arg(long)]
    nu: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Permutation,
    Ribbon,
    Tropical,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    MonodromySets,
    Skeletons,
    Hrgs,
    TropicalGraphs,
    MonodromyGraphs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

enum Failure {
    Invalid(String),
    Mismatch(String),
}

impl From<HurwitzError> for Failure {
    fn from(e: HurwitzError) -> Self {
        match e {
            HurwitzError::FitFailed { .. } | HurwitzError::InconsistentFiber(_) | HurwitzError::InvalidChain(_) => {
                Failure::Mismatch(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(format!("write failed: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn params(genus: u32, mu: &str, nu: &str) -> Result<HurwitzParams, Failure> {
    let mu: Partition = mu.parse()?;
    let nu: Partition = nu.parse()?;
    Ok(hurwitz::hurwitz_params(genus, mu, nu)?)
}

fn print_json(value: &impl Serialize) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Invalid(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct MethodValues {
    permutation: Option<Rational>,
    ribbon: Option<Rational>,
    tropical: Option<Rational>,
}

#[derive(Serialize)]
struct MethodTimings {
    permutation: Option<f64>,
    ribbon: Option<f64>,
    tropical: Option<f64>,
}

#[derive(Serialize)]
struct ComputeReport {
    params: HurwitzParams,
    value: Rational,
    values: MethodValues,
    agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<MethodTimings>,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let value = f();
    let ms = start.elapsed().as_secs_f64() * 1e3;
    (value, (ms * 1e3).round() / 1e3)
}

type Timed = Option<(Rational, f64)>;

fn compute(p: &HurwitzParams, method: Method, no_timings: bool) -> Outcome {
    let want = |m: Method| method == m || method == Method::All;
    let graph = |m: Method| want(m) && (p.r > 0 || method != Method::All);
    let run_perm = || want(Method::Permutation).then(|| timed(|| count_hurwitz_permutation(p)));
    let run_ribbon = || -> Result<Timed, HurwitzError> {
        if !graph(Method::Ribbon) {
            return Ok(None);
        }
        let (v, t) = timed(|| count_hurwitz_ribbon(p));
        Ok(Some((v?, t)))
    };
    let run_trop = || -> Result<Timed, HurwitzError> {
        if !graph(Method::Tropical) {
            return Ok(None);
        }
        let (v, t) = timed(|| count_hurwitz_tropical(p));
        Ok(Some((v?, t)))
    };
    let (perm, (ribbon, trop)) = rayon::join(run_perm, || rayon::join(run_ribbon, run_trop));
    let (ribbon, trop) = (ribbon?, trop?);

    let values: Vec<&Rational> = [&perm, &ribbon, &trop].into_iter().flatten().map(|(v, _)| v).collect();
    let agree = values.windows(2).all(|w| w[0] == w[1]);
    let report = ComputeReport {
        params: p.clone(),
        value: values[0].clone(),
        values: MethodValues {
            permutation: perm.as_ref().map(|x| x.0.clone()),
            ribbon: ribbon.as_ref().map(|x| x.0.clone()),
            tropical: trop.as_ref().map(|x| x.0.clone()),
        },
        agree,
        timings_ms: (!no_timings).then(|| MethodTimings {
            permutation: perm.as_ref().map(|x| x.1),
            ribbon: ribbon.as_ref().map(|x| x.1),
            tropical: trop.as_ref().map(|x| x.1),
        }),
    };
    print_json(&report)?;
    if agree {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("methods disagree for {p}")))
    }
}

fn monodromy_dot(ms: &MonodromySet) -> String {
    let mut s = String::from("graph monodromy {\n");
    for k in 1..=ms.params.d {
        s += &format!("  {k};\n");
    }
    for (i, tau) in ms.taus.iter().enumerate() {
        if let Some((a, b)) = tau.as_transposition() {
            s += &format!("  {} -- {} [label=\"tau{}\"];\n", a + 1, b + 1, i + 1);
        }
    }
    s += &format!("  label=\"sigma0 = {}, sigma_inf = {}\";\n}}\n", ms.sigma0, ms.sigma_inf);
    s
}

fn with_aut(value: impl Serialize, aut: impl Serialize) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable");
    if let Value::Object(map) = &mut v {
        map.insert("aut".into(), json!(aut));
    }
    v
}

struct Sink {
    out: BufWriter<io::StdoutLock<'static>>,
    format: Format,
    error: Option<io::Error>,
}

impl Sink {
    fn emit(&mut self, json: impl FnOnce() -> Value, dot: impl FnOnce() -> String) {
        if self.error.is_some() {
            return;
        }
        let res = match self.format {
            Format::Json => writeln!(self.out, "{}", json()),
            Format::Dot => write!(self.out, "{}", dot()),
        };
        self.error = res.err();
    }

    fn finish(mut self) -> Outcome {
        if let Some(e) = self.error {
            return Err(e.into());
        }
        self.out.flush()?;
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    kind: Kind,
    format: Format,
    genus: Option<u32>,
    mu: Option<String>,
    nu: Option<String>,
    m: Option<usize>,
    n: Option<usize>,
    r: Option<usize>,
) -> Outcome {
    let full = || -> Result<HurwitzParams, Failure> {
        match (genus, &mu, &nu) {
            (Some(g), Some(mu), Some(nu)) => params(g, mu, nu),
            _ => Err(Failure::Invalid("this kind needs --genus, --mu and --nu".into())),
        }
    };
    let shape = || -> Result<(usize, usize, usize), Failure> {
        match (m, n, r) {
            (Some(m), Some(n), Some(r)) => Ok((m, n, r)),
            (None, None, None) => full().map(|p| (p.m, p.n, p.r)),
            _ => Err(Failure::Invalid("give all of --m, --n, --r".into())),
        }
    };
    let mut sink = Sink { out: BufWriter::new(io::stdout().lock()), format, error: None };
    match kind {
        Kind::MonodromySets => {
            let p = full()?;
            for_each_monodromy_set(&p, |ms| {
                sink.emit(|| serde_json::to_value(ms).expect("serializable"), || monodromy_dot(ms))
            });
        }
        Kind::Skeletons => {
            let (m, n, r) = shape()?;
            if r == 0 {
                return Err(HurwitzError::RZero.into());
            }
            for_each_skeleton(m, n, r, |g, aut| sink.emit(|| with_aut(g.to_json(), aut), || g.to_dot()));
        }
        Kind::Hrgs => {
            for (h, aut) in enumerate_hrgs(&full()?)? {
                sink.emit(|| with_aut(h.to_json(), aut), || h.to_dot());
            }
        }
        Kind::TropicalGraphs => {
            let (m, n, r) = shape()?;
            if r == 0 {
                return Err(HurwitzError::RZero.into());
            }
            for (t, aut) in enumerate_tropical_graphs(m, n, r) {
                sink.emit(
                    || json!({"m": t.m, "n": t.n, "r": t.r, "edges": t.edges, "aut": aut}),
                    || t.to_dot(None),
                );
            }
        }
        Kind::MonodromyGraphs => {
            for (mg, aut) in enumerate_monodromy_graphs(&full()?)? {
                let mut v = with_aut(mg.to_json(), aut);
                v["multiplicity"] = json!(mg.multiplicity().to_string());
                sink.emit(|| v, || mg.to_dot());
            }
        }
    }
    sink.finish()
}

#[derive(Serialize)]
struct VerifyEntry {
    params: String,
    permutation: Rational,
    ribbon: Option<Rational>,
    tropical: Option<Rational>,
    roundtrip_classes: Option<usize>,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn verify_one(p: &HurwitzParams) -> VerifyEntry {
    let perm = count_hurwitz_permutation(p);
    let ribbon = count_hurwitz_ribbon(p);
    let trop = count_hurwitz_tropical(p);
    let rt = roundtrip_check(p);
    let mut detail = Vec::new();
    match &ribbon {
        Ok(v) if *v != perm => detail.push(format!("ribbon {v} != permutation {perm}")),
        Err(e) => detail.push(format!("ribbon: {e}")),
        _ => {}
    }
    match &trop {
        Ok(v) if *v != perm => detail.push(format!("tropical {v} != permutation {perm}")),
        Err(e) => detail.push(format!("tropical: {e}")),
        _ => {}
    }
    match &rt {
        Ok(rep) if !rep.passed() => detail.push(format!(
            "roundtrip: {} ribbon classes, {} permutation classes, {} matched, {} aut mismatches {:?}",
            rep.classes_ribbon, rep.classes_permutation, rep.matched, rep.aut_mismatches, rep.failures
        )),
        Err(e) => detail.push(format!("roundtrip: {e}")),
        _ => {}
    }
    VerifyEntry {
        params: p.to_string(),
        permutation: perm,
        ribbon: ribbon.ok(),
        tropical: trop.ok(),
        roundtrip_classes: rt.ok().map(|r| r.classes_ribbon),
        ok: detail.is_empty(),
        detail: (!detail.is_empty()).then(|| detail.join("; ")),
    }
}

fn verify(max_d: u32, max_r: usize) -> Outcome {
    if max_d < 1 || max_r < 1 {
        return Err(Failure::Invalid("--max-d and --max-r must be at least 1".into()));
    }
    let entries: Vec<VerifyEntry> = HurwitzParams::sweep(max_d, 1, max_r).par_iter().map(verify_one).collect();
    let failed = entries.iter().filter(|e| !e.ok).count();
    print_json(&json!({
        "max_d": max_d,
        "max_r": max_r,
        "checked": entries.len(),
        "failed": failed,
        "passed": failed == 0,
        "results": entries,
    }))?;
    match entries.iter().find(|e| !e.ok) {
        Some(e) => Err(Failure::Mismatch(format!("{}: {}", e.params, e.detail.as_deref().unwrap_or("")))),
        None => Ok(()),
    }
}

fn chambers(genus: u32, m: usize, n: usize, dmax: u32) -> Outcome {
    let report = chambers_report(genus, m, n, dmax)?;
    print_json(&report)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch("a chamber fit failed its hold-out check".into()))
    }
}

fn roundtrip(p: &HurwitzParams) -> Outcome {
    let report = roundtrip_check(p)?;
    print_json(&report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("roundtrip failed for {p}")))
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("HURWITZ_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Invalid(format!("HURWITZ_THREADS must be a nonnegative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Compute { params: a, method, no_timings } => compute(&params(a.genus, &a.mu, &a.nu)?, method, no_timings),
        Command::Enumerate { kind, format, genus, mu, nu, m, n, r } => enumerate(kind, format, genus, mu, nu, m, n, r),
        Command::Verify { max_d, max_r } => verify(max_d, max_r),
        Command::Chambers { genus, m, n, dmax } => chambers(genus, m, n, dmax),
        Command::Roundtrip { params: a } => roundtrip(&params(a.genus, &a.mu, &a.nu)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("cross-check failed: {msg}");
            ExitCode::from(2)
        }
    }
}
