//! Command-line front end.
//!
//! Every command writes to `--out` or stdout. Emitted output starts with
//! `#` comment lines recording the version, `q`, seed and caps; CSV readers
//! should skip lines starting with `#`. Exit codes: 0 pass, 1 a check
//! failed, 2 bad usage or input.

pub mod suites;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use crate::analytics::{partition_f, predicted_exponents, ModelParams};
use crate::enumeration::{count_rings, enumerate_balanced_words, finite_fk_partition, ring_candidate, EmptyInner, DEFAULT_WORD_CAP};
use crate::walks::{
    dictionary_histogram_range, hill_slope, log_bins, mc_perimeters_range, ols_slope, wls_slope, Caps, Histogram,
    DEFAULT_LETTER_CAP,
};
use suites::Check;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fkloop", version, about = "FK(q) planar maps, burger words and the fully packed O(n) boundary partition function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Model parameters for a given q, with consistency residuals.
    Params(ParamsArgs),
    /// Table of F_l / gamma_plus^l for l = 0..=lmax.
    Ftable(FtableArgs),
    /// Run verification suites and report PASS/FAIL per check.
    Verify(VerifyArgs),
    /// Monte Carlo histogram of a perimeter or hitting time, with a tail fit.
    Mc(McArgs),
    /// Exhaustive enumeration dumps.
    Enumerate(EnumerateArgs),
    /// Word -> map -> word over every balanced word with at most kmax burgers.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct ParamsArgs {
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FtableArgs {
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 100)]
    lmax: u32,
    /// Relative quadrature tolerance; rows whose error estimate exceeds it are flagged.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Params,
    Resolvent,
    Kernel,
    Wienerhopf,
    Appendix,
    Asymptotics,
    Edge,
    Roundtrip,
    Dictionary,
    Coupling,
    Slopes,
    Xi,
    /// Everything except `slopes` and `xi`, which need long campaigns.
    All,
}

#[derive(Debug, Args)]
struct Sampling {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of runs; accepts forms like `1e6`.
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    samples: u64,
    /// Raw letters read per run before it is censored.
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_LETTER_CAP)]
    cap_letters: u64,
}

impl Sampling {
    fn caps(&self) -> Caps {
        Caps { letters: self.cap_letters, ..Caps::default() }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[command(flatten)]
    sampling: Sampling,
    /// Largest l in the dictionary check.
    #[arg(long, default_value_t = 10)]
    lmax: usize,
    #[arg(long, default_value_t = 4)]
    kmax: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Observable {
    /// Outer boundary length of the root cluster, `tau - 1`.
    Cluster,
    /// Length of the root loop, the lazy hitting time.
    Loop,
    /// Non-lazy hitting time `tau^h`, counted up to `--fit-max`.
    Tau,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, value_enum)]
    kind: Observable,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[command(flatten)]
    sampling: Sampling,
    /// Index of the first run; with `--samples` this selects the run range
    /// `first..first+samples`, so campaigns can be split and resumed.
    #[arg(long, default_value_t = 0)]
    first_run: u64,
    #[arg(long, default_value_t = 10)]
    fit_min: usize,
    #[arg(long, default_value_t = 500)]
    fit_max: usize,
    #[arg(long, default_value_t = 12)]
    bins: usize,
    /// Censored runs, as a fraction of the runs in the fit range, above
    /// which the report carries a warning.
    #[arg(long, default_value_t = 0.05)]
    max_censored: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumKind {
    /// Balanced words with `--size` burgers.
    Words,
    /// Rooted rings with `--k` outer and `--kp` inner edges.
    Rings,
    /// Finite FK(q) partition function over maps with `--size` edges.
    Fk,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long, value_enum)]
    kind: EnumKind,
    #[arg(long, default_value_t = 1)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    kp: usize,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Count rings without inner boundary (`kp = 0`) as well.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    include_empty: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    #[arg(long, default_value_t = 4)]
    kmax: usize,
    #[command(flatten)]
    output: Output,
}

/// Counts written as integers or in floating notation (`1e6`, `2.5e5`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return if n >= 1 { Ok(n) } else { Err("must be at least 1".into()) };
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= 2f64.powi(63)) {
        return Err(format!("not a positive integer: {s}"));
    }
    Ok(x as u64)
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let result = match cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Ftable(a) => cmd_ftable(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Roundtrip(a) => cmd_roundtrip(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

struct Header {
    command: &'static str,
    q: Option<f64>,
    seed: Option<u64>,
    caps: Vec<(&'static str, String)>,
}

impl Header {
    fn new(command: &'static str) -> Self {
        Header { command, q: None, seed: None, caps: Vec::new() }
    }

    fn q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn cap(mut self, name: &'static str, v: impl ToString) -> Self {
        self.caps.push((name, v.to_string()));
        self
    }

    fn render(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_else(|| "none".into());
        let mut s = format!("# fkloop {VERSION} {}\n", self.command);
        let _ = writeln!(s, "# q = {}", opt(self.q.map(|q| q.to_string())));
        let _ = writeln!(s, "# seed = {}", opt(self.seed.map(|x| x.to_string())));
        let caps: Vec<String> = self.caps.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let _ = writeln!(s, "# caps: {}", if caps.is_empty() { "none".into() } else { caps.join(", ") });
        s
    }
}

fn emit(output: &Output, header: &Header, body: &str) -> Result<(), Failure> {
    let text = header.render() + body;
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| usage(e))
        }
    }
}

fn params_of(q: f64) -> Result<ModelParams, Failure> {
    ModelParams::from_q(q).map_err(usage)
}

/// Renders `(name, value)` rows as CSV or aligned text.
fn table(format: Format, columns: &[&str], rows: &[Vec<String>]) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(columns).expect("in-memory write");
            for r in rows {
                w.write_record(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf8")
        }
        Format::Text => {
            let mut width: Vec<usize> = columns.iter().map(|c| c.len()).collect();
            for r in rows {
                for (w, x) in width.iter_mut().zip(r) {
                    *w = (*w).max(x.len());
                }
            }
            let line = |cells: Vec<&str>| -> String {
                let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut s = line(columns.to_vec());
            for r in rows {
                s += &line(r.iter().map(String::as_str).collect());
            }
            s
        }
    }
}

fn cmd_params(a: ParamsArgs) -> Result<i32, Failure> {
    let m = params_of(a.q)?;
    let r = m.residuals();
    let e = predicted_exponents(&m);
    let f = |x: f64| format!("{x:.15e}");
    let rows: Vec<Vec<String>> = [
        ("q", m.q),
        ("n", m.n),
        ("p", m.p),
        ("theta", m.theta),
        ("x_c", m.x_c),
        ("gamma_minus", m.gamma_minus),
        ("gamma_plus", m.gamma_plus),
        ("cut_width", m.width()),
        ("perimeter_exponent", e.perimeter),
        ("tau_exponent", e.tau),
        ("c_F", e.c_f),
        ("residual_gamma_plus_vs_x_c", r.gamma_plus_vs_x_c),
        ("residual_gamma_plus_vs_trig", r.gamma_plus_vs_trig),
        ("residual_n_vs_p", r.n_vs_p),
        ("residual_theta_vs_n", r.theta_vs_n),
        ("residual_c0", r.c0),
        ("residual_c1", r.c1),
    ]
    .into_iter()
    .map(|(k, v)| vec![k.to_string(), f(v)])
    .collect();
    emit(&a.output, &Header::new("params").q(a.q), &table(a.output.format, &["name", "value"], &rows))?;
    Ok(EXIT_PASS)
}

pub const FTABLE_LMAX: u32 = 100_000;

fn cmd_ftable(a: FtableArgs) -> Result<i32, Failure> {
    let m = params_of(a.q)?;
    if a.lmax > FTABLE_LMAX {
        return Err(usage(format!("--lmax must be at most {FTABLE_LMAX}")));
    }
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let tol = a.tol;
    // integrate well inside the tolerance so that flags mark genuine trouble
    let values = crate::par::map((0..=a.lmax).collect(), |l| partition_f(l, &m, 0.1 * tol));
    let mut flagged = 0;
    let rows: Vec<Vec<String>> = values
        .into_iter()
        .enumerate()
        .map(|(l, v)| match v {
            Ok(v) => {
                let ok = v.abs_err <= tol * v.scaled.abs().max(f64::MIN_POSITIVE) && v.scaled.is_finite();
                flagged += usize::from(!ok);
                let flag = if ok { "ok" } else { "tolerance" };
                vec![l.to_string(), format!("{:.15e}", v.scaled), format!("{:.3e}", v.abs_err), format!("{:.15e}", v.log), flag.into()]
            }
            Err(e) => {
                flagged += 1;
                vec![l.to_string(), "nan".into(), "nan".into(), "nan".into(), format!("failed: {e}")]
            }
        })
        .collect();
    let header = Header::new("ftable").q(a.q).cap("lmax", a.lmax).cap("tol", a.tol);
    emit(&a.output, &header, &table(a.output.format, &["l", "f_scaled", "abs_err", "log_f", "flag"], &rows))?;
    if flagged > 0 {
        eprintln!("{flagged} rows missed the tolerance");
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_PASS)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, Failure> {
    if !(a.q > 0.0 && a.q < 4.0) {
        return Err(usage(crate::analytics::DomainError::Q(a.q)));
    }
    let q = a.q;
    let s = &a.sampling;
    let caps = s.caps();
    let mut checks: Vec<Check> = Vec::new();
    let want = |x: Suite| a.suite == x || (a.suite == Suite::All && !matches!(x, Suite::Slopes | Suite::Xi));
    if want(Suite::Params) {
        checks.push(suites::parameter_identities(&[q]));
        checks.push(suites::normalisation(&[q]));
    }
    if want(Suite::Resolvent) {
        checks.push(suites::resolvent(q, 50));
    }
    if want(Suite::Kernel) {
        checks.push(suites::kernel(q, 20));
    }
    if want(Suite::Wienerhopf) {
        checks.push(suites::wiener_hopf_identity(q, 100));
    }
    if want(Suite::Appendix) {
        checks.push(suites::appendix(q, 20));
    }
    if want(Suite::Asymptotics) {
        checks.push(suites::asymptotics(q));
    }
    if want(Suite::Edge) {
        checks.push(suites::edge_resolvent(q));
    }
    if want(Suite::Roundtrip) {
        checks.push(suites::roundtrip(a.kmax));
    }
    if want(Suite::Dictionary) {
        checks.push(suites::dictionary(q, s.samples, s.seed, caps, a.lmax, 0));
    }
    if want(Suite::Coupling) {
        checks.push(suites::coupling(q, s.samples, s.seed, caps));
    }
    if want(Suite::Slopes) {
        checks.push(suites::perimeter_slopes(q, s.samples, s.seed, caps, 10, 500, 0.15));
    }
    if want(Suite::Xi) {
        checks.push(suites::xi_centred(q, s.samples, s.seed, s.cap_letters, &[100, 1000, 10_000], 0.05));
    }
    let body = match a.output.format {
        Format::Text => {
            let mut b = String::new();
            for c in &checks {
                b += &c.line();
                b.push('\n');
                for d in &c.detail {
                    let _ = writeln!(b, "    {d}");
                }
            }
            b
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        if c.passed { "PASS" } else { "FAIL" }.into(),
                        format!("{:.6e}", c.value),
                        format!("{:.6e}", c.threshold),
                        c.detail.join(" | "),
                    ]
                })
                .collect();
            table(Format::Csv, &["check", "status", "value", "threshold", "detail"], &rows)
        }
    };
    let header = Header::new("verify").q(q).seed(s.seed).cap("samples", s.samples).cap("cap_letters", s.cap_letters);
    emit(&a.output, &header, &body)?;
    if a.output.out.is_some() {
        for c in &checks {
            println!("{}", c.line());
        }
    }
    Ok(if checks.iter().all(|c| c.passed) { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_mc(a: McArgs) -> Result<i32, Failure> {
    let m = params_of(a.q)?;
    if !(a.fit_min >= 1 && a.fit_max > a.fit_min) {
        return Err(usage("need 1 <= --fit-min < --fit-max"));
    }
    let s = &a.sampling;
    let runs = a.first_run..a.first_run.checked_add(s.samples).ok_or_else(|| usage("run range overflows"))?;
    let e = predicted_exponents(&m);
    let (hist, predicted): (Histogram, f64) = match a.kind {
        Observable::Cluster | Observable::Loop => {
            let sample = mc_perimeters_range(&m, runs.clone(), s.seed, s.caps()).map_err(usage)?;
            let h = if a.kind == Observable::Cluster { sample.cluster } else { sample.loops };
            (h, -e.perimeter)
        }
        Observable::Tau => (dictionary_histogram_range(&m, runs.clone(), s.seed, s.caps(), a.fit_max).map_err(usage)?, -e.tau),
    };
    let masses: Vec<f64> = hist.counts.iter().map(|&c| c as f64).collect();
    let bins = log_bins(&masses, a.fit_min, a.fit_max, a.bins);
    let ols = ols_slope(&bins);
    let wls = wls_slope(&bins);
    let hill = hill_slope(&hist, a.fit_min);
    let share = hist.censored_share(a.fit_min, a.fit_max);
    let mut summary = String::new();
    let _ = writeln!(summary, "# observable = {:?}, runs {}..{}", a.kind, runs.start, runs.end);
    let _ = writeln!(summary, "# fit range [{}, {}], {} log bins", a.fit_min, a.fit_max, bins.len());
    let _ = writeln!(summary, "# slope (least squares) = {:.4} +- {:.4}", ols.slope, ols.stderr);
    let _ = writeln!(summary, "# slope (weighted) = {:.4} +- {:.4}", wls.slope, wls.stderr);
    let _ = writeln!(summary, "# slope (Hill) = {:.4} +- {:.4}", hill.slope, hill.stderr);
    let _ = writeln!(summary, "# predicted slope = {:.4}", predicted);
    let _ = writeln!(summary, "# censored = {} of {}, share of fit-range mass {:.3e}", hist.n_censored, hist.n_total, share);
    if share > a.max_censored {
        let _ = writeln!(summary, "# WARNING: censored share {share:.3e} exceeds {}", a.max_censored);
    }
    let body = match a.output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            hist.write_csv(&mut buf).map_err(usage)?;
            summary.clone() + &String::from_utf8(buf).expect("utf8")
        }
        Format::Text => {
            let rows: Vec<Vec<String>> = hist
                .counts
                .iter()
                .enumerate()
                .map(|(l, &c)| {
                    let est = hist.estimate(l);
                    vec![l.to_string(), c.to_string(), format!("{:.6e}", est.bracket.0), format!("{:.6e}", est.bracket.1)]
                })
                .collect();
            summary.clone() + &table(Format::Text, &["l", "count", "censored_lo", "censored_hi"], &rows)
        }
    };
    let header = Header::new("mc").q(a.q).seed(s.seed).cap("samples", s.samples).cap("first_run", a.first_run).cap("cap_letters", s.cap_letters);
    emit(&a.output, &header, &body)?;
    if a.output.out.is_some() {
        eprint!("{summary}");
    }
    Ok(EXIT_PASS)
}

fn cmd_enumerate(a: EnumerateArgs) -> Result<i32, Failure> {
    let f = a.output.format;
    let (header, body) = match a.kind {
        EnumKind::Words => {
            let words = enumerate_balanced_words(a.size, DEFAULT_WORD_CAP).map_err(usage)?;
            let rows: Vec<Vec<String>> = words.iter().map(|w| vec![w.to_string(), (w.count(crate::words::Symbol::Flexible) + 1).to_string()]).collect();
            (Header::new("enumerate words").cap("size", a.size).cap("word_cap", DEFAULT_WORD_CAP), table(f, &["word", "loops"], &rows))
        }
        EnumKind::Rings => {
            let conv = if a.include_empty { EmptyInner::Include } else { EmptyInner::Exclude };
            let c = count_rings(a.k, a.kp, conv).map_err(usage)?;
            let rows = vec![vec![a.k.to_string(), a.kp.to_string(), c.to_string(), ring_candidate(a.k, a.kp).to_string()]];
            (
                Header::new("enumerate rings").cap("ring_cap", crate::enumeration::RING_CAP),
                table(f, &["k", "kp", "count", "binomial_candidate"], &rows),
            )
        }
        EnumKind::Fk => {
            let q = BigRational::from_float(a.q).ok_or_else(|| usage(format!("q = {} is not finite", a.q)))?;
            let part = finite_fk_partition(a.size, &q).map_err(usage)?;
            let len = part.map_loop_counts.len().max(part.word_loop_counts.len());
            let mut rows: Vec<Vec<String>> = (0..len)
                .map(|l| {
                    let g = |v: &Vec<u64>| v.get(l).copied().unwrap_or(0).to_string();
                    vec![format!("loops={l}"), g(&part.map_loop_counts), g(&part.word_loop_counts)]
                })
                .collect();
            let exact = |x: &Option<BigRational>| x.as_ref().map_or("irrational".to_string(), |r| r.to_string());
            rows.push(vec!["total".into(), exact(&part.map_total), exact(&part.word_total)]);
            rows.push(vec!["total_f64".into(), format!("{:.15e}", part.map_total_f64), format!("{:.15e}", part.word_total_f64)]);
            if let Some(t) = &part.word_table {
                for (w, x) in &t.entries {
                    rows.push(vec![format!("word={w}"), String::new(), x.to_string()]);
                }
            }
            (
                Header::new("enumerate fk").q(a.q).cap("size", a.size).cap("map_cap", crate::enumeration::MAP_CAP),
                table(f, &["entry", "maps", "words"], &rows),
            )
        }
    };
    emit(&a.output, &header, &body)?;
    Ok(EXIT_PASS)
}

fn cmd_roundtrip(a: RoundtripArgs) -> Result<i32, Failure> {
    if a.kmax > DEFAULT_WORD_CAP {
        return Err(usage(format!("--kmax must be at most {DEFAULT_WORD_CAP}")));
    }
    let c = suites::roundtrip(a.kmax);
    let mut body = c.line() + "\n";
    for d in &c.detail {
        let _ = writeln!(body, "    {d}");
    }
    emit(&a.output, &Header::new("roundtrip").cap("kmax", a.kmax), &body)?;
    Ok(if c.passed { EXIT_PASS } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_in_float_notation() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert_eq!(parse_count("2.5e3"), Ok(2500));
        assert!(parse_count("0").is_err());
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("x").is_err());
    }

    #[test]
    fn header_names_every_field() {
        let h = Header::new("mc").q(2.0).seed(7).cap("cap_letters", 10).render();
        assert!(h.lines().all(|l| l.starts_with('#')));
        for key in ["fkloop", "q = 2", "seed = 7", "cap_letters = 10"] {
            assert!(h.contains(key), "{h}");
        }
    }
}
