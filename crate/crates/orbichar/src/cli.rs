//! Command-line front end: spec parsing, pipelines and output encodings.
//!
//! Every command prints deterministic output. Exit status is 0 on success,
//! 1 when a verification (or fusion integrality) check fails, and 2 on
//! malformed input.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::builtin;
use crate::characters::*;
use crate::error::{OrbiError, Result};
use crate::isometry::{new_isometry, Isometry};
use crate::lattice::{new_lattice, Lattice};
use crate::modular::{ModularPoint, SeriesTolerance};
use crate::qseries::{Cyc, QSeries};
use crate::transforms::*;

pub const PRECISION_ENV: &str = "ORBICHAR_PRECISION_BITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Classify,
    Chars,
    Smatrix,
    Tmatrix,
    Qdims,
    Fusion,
    Verify,
    Example,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "orbichar", version, about = "Modules, characters and modular data of prime-order lattice orbifolds")]
pub struct Cli {
    pub command: Command,
    /// `example NAME` for the pipeline commands, or `NAME` after `example`
    pub source: Vec<String>,
    /// JSON job spec {name, gram, isometry, options}
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Order of the permutation example
    #[arg(long, default_value_t = 3)]
    pub p: u32,
    /// Q₀ = Zα with |α|² = 2t for the permutation example
    #[arg(long, default_value_t = 1)]
    pub t: i64,
    /// Sample points RE,IM (repeatable)
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    pub tau: Vec<String>,
    /// Verification tolerance (absolute)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of q-expansion terms
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Print exact q-expansions instead of numeric values
    #[arg(long)]
    pub exact: bool,
    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub classify: bool,
    #[arg(long)]
    pub chars: bool,
    #[arg(long)]
    pub smatrix: bool,
    #[arg(long)]
    pub tmatrix: bool,
    #[arg(long)]
    pub qdims: bool,
    #[arg(long)]
    pub fusion: bool,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for JsonComplex {
    fn from(z: Complex64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    pub tol: Option<f64>,
    pub terms: Option<usize>,
    pub taus: Option<Vec<JsonComplex>>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub name: String,
    pub gram: Vec<Vec<i64>>,
    pub isometry: Vec<Vec<i64>>,
    #[serde(default)]
    pub options: SpecOptions,
}

impl JobSpec {
    pub fn build(&self) -> Result<(Lattice, Isometry)> {
        let l = new_lattice(self.gram.clone())?;
        let s = new_isometry(&l, self.isometry.clone())?;
        Ok((l, s))
    }
}

pub fn parse_spec(text: &str) -> Result<JobSpec> {
    serde_json::from_str(text).map_err(|e| OrbiError::Parse {
        position: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// Errors caused by the input rather than by a failed computation.
pub fn is_input_error(e: &OrbiError) -> bool {
    matches!(
        e,
        OrbiError::Parse { .. }
            | OrbiError::Validation(_)
            | OrbiError::NotSymmetric(..)
            | OrbiError::NotEven { .. }
            | OrbiError::NotPositiveDefinite(_)
            | OrbiError::DimensionMismatch { .. }
            | OrbiError::NotIsometry
            | OrbiError::InfiniteOrder(_)
            | OrbiError::UnsupportedOrder(_)
            | OrbiError::NotPrime(_)
            | OrbiError::NotUpperHalfPlane(_)
            | OrbiError::QbarMismatch
    )
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub name: String,
    pub tol: f64,
    pub series_tol: f64,
    pub terms: usize,
    pub taus: Vec<Complex64>,
    pub format: Format,
    pub exact: bool,
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    /// False when a verification check failed.
    pub pass: bool,
}

fn parse_tau(s: &str) -> Result<Complex64> {
    let bad = || OrbiError::Parse { position: format!("--tau {s}"), message: "expected RE,IM".into() };
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let z = Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?);
    if z.im <= 0.0 {
        return Err(OrbiError::NotUpperHalfPlane(s.to_string()));
    }
    Ok(z)
}

/// Validate the high-precision environment variable. Values above 53 bits
/// are accepted; the exact q-series then serve as the high-precision oracle.
pub fn precision_bits() -> Result<Option<u32>> {
    match std::env::var(PRECISION_ENV) {
        Err(_) => Ok(None),
        Ok(v) => {
            let bits: u32 = v.trim().parse().map_err(|_| OrbiError::Parse {
                position: PRECISION_ENV.into(),
                message: format!("expected a bit count, got '{v}'"),
            })?;
            if !(53..=4096).contains(&bits) {
                return Err(OrbiError::Validation(format!("{PRECISION_ENV} must lie in 53..=4096, got {bits}")));
            }
            Ok(Some(bits))
        }
    }
}

fn resolve(cli: &Cli) -> Result<(Lattice, Isometry, Settings)> {
    let example_name = match cli.command {
        Command::Example => Some(cli.source.first().cloned().ok_or_else(|| OrbiError::Parse {
            position: "arguments".into(),
            message: format!("missing example name (one of {})", builtin::NAMES.join(", ")),
        })?),
        _ => match cli.source.as_slice() {
            [] => None,
            [kw, name] if kw == "example" => Some(name.clone()),
            other => {
                return Err(OrbiError::Parse {
                    position: "arguments".into(),
                    message: format!("unexpected arguments {other:?}; use --spec FILE or example NAME"),
                })
            }
        },
    };
    let (l, s, spec_opts, name) = match (&cli.spec, example_name) {
        (Some(_), Some(_)) => {
            return Err(OrbiError::Parse { position: "arguments".into(), message: "give either --spec or example, not both".into() })
        }
        (None, None) => {
            return Err(OrbiError::Parse { position: "arguments".into(), message: "missing input: use --spec FILE or example NAME".into() })
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| OrbiError::Validation(format!("cannot read {}: {e}", path.display())))?;
            let spec = parse_spec(&text)?;
            let (l, s) = spec.build()?;
            (l, s, spec.options, spec.name)
        }
        (None, Some(name)) => {
            let (l, s) = builtin::by_name(&name, cli.p, cli.t)?;
            let label = if name == "perm" { format!("perm(p={}, t={})", cli.p, cli.t) } else { name };
            (l, s, SpecOptions::default(), label)
        }
    };
    let tol = cli.tol.or(spec_opts.tol).unwrap_or(1e-8);
    if tol.is_nan() || tol <= 0.0 {
        return Err(OrbiError::Validation(format!("tolerance must be positive, got {tol}")));
    }
    let taus = if !cli.tau.is_empty() {
        cli.tau.iter().map(|t| parse_tau(t)).collect::<Result<Vec<_>>>()?
    } else if let Some(ts) = &spec_opts.taus {
        ts.iter().map(|z| Complex64::new(z.re, z.im)).collect()
    } else {
        default_taus()
    };
    let settings = Settings {
        name,
        tol,
        series_tol: (tol * 1e-4).min(1e-12),
        terms: cli.terms.or(spec_opts.terms).unwrap_or(10),
        taus,
        format: cli.format.or(spec_opts.format).unwrap_or_default(),
        exact: cli.exact,
    };
    Ok((l, s, settings))
}

// ---------------------------------------------------------------------------
// Number formatting

/// Twelve significant digits, tiny values flushed to zero, no trailing zeros.
pub fn fmt_real(x: f64) -> String {
    if x.abs() < 1e-13 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    let re = fmt_real(z.re);
    let im = fmt_real(z.im);
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", _) => format!("{im}i"),
        _ if im.starts_with('-') => format!("{re}{im}i"),
        _ => format!("{re}+{im}i"),
    }
}

fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact coefficient in ℚ(ω): a rational, or a sum over the power basis.
fn cyc_string(c: &Cyc) -> String {
    if let Some(r) = c.as_rational() {
        return rational_string(&r);
    }
    let parts: Vec<String> = c
        .coords()
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| match k {
            0 => rational_string(x),
            1 => format!("{}·w", rational_string(x)),
            _ => format!("{}·w^{k}", rational_string(x)),
        })
        .collect();
    format!("({})", parts.join(" + "))
}

fn series_string(s: &QSeries<Cyc>) -> String {
    let terms: Vec<String> =
        s.terms.iter().map(|(e, c)| format!("{} q^{}", cyc_string(c), rational_string(e))).collect();
    format!("{} + O(q^{})", terms.join(" + "), rational_string(&s.truncation))
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let n = header.len();
    let mut w = vec![0usize; n];
    for r in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        let cells: Vec<String> =
            r.iter().enumerate().map(|(i, c)| format!("{c}{}", " ".repeat(w[i] - c.chars().count()))).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

fn json_matrix(m: &[Vec<Complex64>]) -> Value {
    json!(m.iter().map(|r| r.iter().map(|z| JsonComplex::from(*z)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_only_for_matrices(st: &Settings) -> Result<()> {
    if st.format == Format::Csv {
        return Err(OrbiError::Validation("CSV output is only available for smatrix and tmatrix".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pipelines

fn labels_of(c: &Classification) -> Vec<String> {
    c.labels.iter().map(|l| l.to_string()).collect()
}

pub fn cmd_classify(c: &Classification, st: &Settings) -> Result<Outcome> {
    csv_only_for_matrices(st)?;
    let weights: Vec<BigRational> =
        c.labels.par_iter().map(|l| conformal_weight(c, l)).collect::<Result<Vec<_>>>()?;
    let text = match st.format {
        Format::Json => to_json_string(&json!({
            "name": st.name,
            "total": c.len(),
            "counts": {"type1": c.counts[0], "type2": c.counts[1], "type3": c.counts[2]},
            "labels": c.labels.iter().zip(&weights).enumerate().map(|(i, (l, w))| json!({
                "index": i,
                "label": l.to_string(),
                "type": l.kind(),
                "conformal_weight": rational_string(w),
            })).collect::<Vec<_>>(),
        })),
        _ => {
            let rows: Vec<Vec<String>> = c
                .labels
                .iter()
                .zip(&weights)
                .enumerate()
                .map(|(i, (l, w))| vec![i.to_string(), l.to_string(), format!("Type{}", l.kind()), rational_string(w)])
                .collect();
            let head = ["#", "label", "type", "weight"].map(String::from);
            format!("{}\n{}", c.summary(), table(&head, &rows))
        }
    };
    Ok(Outcome { text, pass: true })
}

pub fn cmd_chars(c: &Classification, st: &Settings) -> Result<Outcome> {
    csv_only_for_matrices(st)?;
    if st.exact {
        let series: Vec<QSeries<Cyc>> = c
            .labels
            .par_iter()
            .map(|l| char_orbifold_qexpansion(c, l, st.terms))
            .collect::<Result<Vec<_>>>()?;
        let text = match st.format {
            Format::Json => to_json_string(&json!({
                "name": st.name,
                "root_of_unity_order": c.data.p,
                "characters": c.labels.iter().zip(&series).map(|(l, s)| json!({
                    "label": l.to_string(),
                    "truncation": rational_string(&s.truncation),
                    "terms": s.terms.iter().map(|(e, x)| json!({
                        "exponent": rational_string(e),
                        "coefficient": x.coords().iter().map(rational_string).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })),
            _ => {
                let mut out = format!("# coefficients in Q(w), w = exp(2 pi i/{})\n", c.data.p);
                for (l, s) in c.labels.iter().zip(&series) {
                    let _ = writeln!(out, "{l}: {}", series_string(s));
                }
                out
            }
        };
        return Ok(Outcome { text, pass: true });
    }
    let tol = SeriesTolerance::new(st.series_tol);
    let values: Vec<Vec<Complex64>> =
        st.taus.iter().map(|t| char_all(c, &ModularPoint::new(*t), &tol)).collect::<Result<_>>()?;
    let text = match st.format {
        Format::Json => to_json_string(&json!({
            "name": st.name,
            "taus": st.taus.iter().map(|t| JsonComplex::from(*t)).collect::<Vec<_>>(),
            "labels": labels_of(c),
            "values": values.iter().map(|r| r.iter().map(|z| JsonComplex::from(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        _ => {
            let mut head = vec!["label".to_string()];
            head.extend(st.taus.iter().map(|t| format!("tau={}", fmt_complex(*t))));
            let rows: Vec<Vec<String>> = c
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let mut r = vec![l.to_string()];
                    r.extend(values.iter().map(|v| fmt_complex(v[i])));
                    r
                })
                .collect();
            table(&head, &rows)
        }
    };
    Ok(Outcome { text, pass: true })
}

fn matrix_output(c: &Classification, m: &TransformMatrix, st: &Settings) -> String {
    let labels = labels_of(c);
    match st.format {
        Format::Json => to_json_string(&json!({
            "name": st.name,
            "kind": m.kind,
            "degenerate": m.degenerate,
            "labels": labels,
            "entries": json_matrix(&m.entries),
        })),
        Format::Csv => {
            let mut out = format!("label,{}\n", labels.join(","));
            for (l, row) in labels.iter().zip(&m.entries) {
                let cells: Vec<String> = row.iter().map(|z| fmt_complex(*z)).collect();
                let _ = writeln!(out, "{l},{}", cells.join(","));
            }
            out
        }
        Format::Table => {
            let mut out = String::new();
            if m.degenerate {
                out.push_str("# characters are linearly dependent: this is one valid coefficient matrix, not a canonical S-matrix\n");
            }
            let mut head = vec![String::new()];
            head.extend(labels.iter().cloned());
            let rows: Vec<Vec<String>> = labels
                .iter()
                .zip(&m.entries)
                .map(|(l, row)| std::iter::once(l.clone()).chain(row.iter().map(|z| fmt_complex(*z))).collect())
                .collect();
            out.push_str(&table(&head, &rows));
            out
        }
    }
}

pub fn cmd_smatrix(c: &Classification, st: &Settings) -> Result<Outcome> {
    let s = s_coefficients(c)?;
    Ok(Outcome { text: matrix_output(c, &s, st), pass: true })
}

pub fn cmd_tmatrix(c: &Classification, st: &Settings) -> Result<Outcome> {
    Ok(Outcome { text: matrix_output(c, &t_matrix(c), st), pass: true })
}

pub fn cmd_qdims(c: &Classification, st: &Settings) -> Result<Outcome> {
    csv_only_for_matrices(st)?;
    let d = dimensions(c);
    let text = match st.format {
        Format::Json => to_json_string(&json!({
            "name": st.name,
            "labels": labels_of(c),
            "asymptotic": d.asymptotic,
            "quantum": d.quantum,
        })),
        _ => {
            let rows: Vec<Vec<String>> = c
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| vec![l.to_string(), fmt_real(d.asymptotic[i]), fmt_real(d.quantum[i])])
                .collect();
            table(&["label", "asymptotic", "quantum"].map(String::from), &rows)
        }
    };
    Ok(Outcome { text, pass: true })
}

pub fn cmd_fusion(c: &Classification, st: &Settings) -> Result<Outcome> {
    csv_only_for_matrices(st)?;
    let s = s_coefficients(c)?;
    let f = verlinde_fusion(&s, c.vacuum())?;
    let labels = labels_of(c);
    let n = labels.len();
    let product = |i: usize, j: usize| -> Vec<(String, i64)> {
        f.product(i, j).into_iter().map(|(k, m)| (labels[k].clone(), m)).collect()
    };
    let text = match st.format {
        Format::Json => to_json_string(&json!({
            "name": st.name,
            "labels": labels,
            "n": f.n,
        })),
        _ => {
            let mut out = String::new();
            for i in 0..n {
                for j in i..n {
                    let terms: Vec<String> = product(i, j)
                        .into_iter()
                        .map(|(l, m)| if m == 1 { l } else { format!("{m}·{l}") })
                        .collect();
                    let _ = writeln!(out, "{} x {} = {}", labels[i], labels[j], terms.join(" + "));
                }
            }
            out
        }
    };
    Ok(Outcome { text, pass: true })
}

pub fn cmd_verify(c: &Classification, st: &Settings) -> Result<Outcome> {
    csv_only_for_matrices(st)?;
    let s = s_coefficients(c)?;
    let t = t_matrix(c);
    let rep = verify_transforms(c, &s, &t, &st.taus, st.series_tol, st.tol)?;
    let text = match st.format {
        Format::Json => to_json_string(&json!({
            "name": st.name,
            "taus": st.taus.iter().map(|t| JsonComplex::from(*t)).collect::<Vec<_>>(),
            "report": rep,
            "degenerate": s.degenerate,
        })),
        _ => {
            let rows: Vec<Vec<String>> = rep
                .rows
                .iter()
                .map(|r| vec![r.label.clone(), format!("{:.3e}", r.s_residual), format!("{:.3e}", r.t_residual)])
                .collect();
            let mut out = table(&["label", "S residual", "T residual"].map(String::from), &rows);
            let _ = writeln!(
                out,
                "sum rule residual {:.3e}; max S residual {:.3e}; max T residual {:.3e}; tolerance {:e}: {}",
                rep.sum_rule_residual,
                rep.max_s_residual,
                rep.max_t_residual,
                rep.tolerance,
                if rep.pass { "PASS" } else { "FAIL" }
            );
            out
        }
    };
    Ok(Outcome { text, pass: rep.pass })
}

/// Run one parsed invocation.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let bits = precision_bits()?;
    let (l, s, st) = resolve(cli)?;
    let _ = l;
    let c = classify(s.lattice(), &s)?;
    let mut steps: Vec<Command> = match cli.command {
        Command::Example => {
            let flags = [
                (cli.classify, Command::Classify),
                (cli.chars, Command::Chars),
                (cli.smatrix, Command::Smatrix),
                (cli.tmatrix, Command::Tmatrix),
                (cli.qdims, Command::Qdims),
                (cli.fusion, Command::Fusion),
                (cli.verify, Command::Verify),
            ];
            flags.iter().filter(|(on, _)| *on).map(|(_, c)| *c).collect()
        }
        other => vec![other],
    };
    if steps.is_empty() {
        steps.push(Command::Classify);
    }
    if steps.len() > 1 && st.format != Format::Table {
        return Err(OrbiError::Validation("JSON and CSV output take a single command".into()));
    }
    let mut text = String::new();
    if let Some(b) = bits {
        if b > 53 && st.format == Format::Table {
            let _ = writeln!(text, "# {PRECISION_ENV}={b}: exact q-series act as the high-precision reference");
        }
    }
    let mut pass = true;
    for step in steps {
        let o = match step {
            Command::Classify => {
                // `--classify` on an example prints just the count line.
                if cli.command == Command::Example && st.format == Format::Table {
                    Outcome { text: format!("{}\n", c.summary()), pass: true }
                } else {
                    cmd_classify(&c, &st)?
                }
            }
            Command::Chars => cmd_chars(&c, &st)?,
            Command::Smatrix => cmd_smatrix(&c, &st)?,
            Command::Tmatrix => cmd_tmatrix(&c, &st)?,
            Command::Qdims => cmd_qdims(&c, &st)?,
            Command::Fusion => cmd_fusion(&c, &st)?,
            Command::Verify => cmd_verify(&c, &st)?,
            Command::Example => unreachable!("example expands to pipeline steps"),
        };
        text.push_str(&o.text);
        pass &= o.pass;
    }
    Ok(Outcome { text, pass })
}

/// Parse arguments, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.jobs {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(OrbiError::Validation(format!("cannot start {n} workers: {e}"))),
        },
        Some(_) => Err(OrbiError::Validation("--jobs must be positive".into())),
        None => run(&cli),
    };
    match outcome {
        Ok(o) => {
            print!("{}", o.text);
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if is_input_error(&e) {
                2
            } else {
                1
            }
        }
    }
}
