//! Command-line driver.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the report
//! is still written), 2 on usage or configuration errors.
//!
//! Syntax:
//! - partition/spin words: `alpha:i[:k],...` (e.g. `1:1,2:1,2:1,1:1`)
//! - spin elements: `coef@alpha:i:k,...;coef@...` (`coef` alone is a scalar term)
//! - group elements: `coef[l1,l2,...];...` with signed letters (`[]` is the identity)
//! - coefficients: a real number or `(re,im)`

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::clt::{key_lemma_study, mc_moment_study, norm_convergence_study, sample_sign_function, SignModel};
use crate::gns::{lp_norm_moments_capped, lp_norm_spectral, spin_moments};
use crate::group::{Flavor, GroupAlgebraElement, GroupWord};
use crate::hyperbench::{
    group_norm, hc_margin, random_group_element, random_spin_element, rng_for, BenchError, HCQuery, Handle, Route,
    TimeRule, DEFAULT_NODES,
};
use crate::partition::{weighted_pair_moment, weighted_pair_moment_exact, Letter, WeightFunction, WordSpec};
use crate::report::{emit_report, Format, Record};
use crate::spin::{self, Dims, GenIndex, SignFunction, SpinElement};
use crate::suites::{run_suite, ACCEPTANCE_SUITES, EXTRA_SUITES};

pub const THREADS_ENV: &str = "FREEHYPER_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Report(#[from] crate::report::ReportError),
}

impl From<crate::clt::CltError> for CliError {
    fn from(e: crate::clt::CltError) -> Self {
        CliError::Bench(e.into())
    }
}

impl From<crate::spin::SpinError> for CliError {
    fn from(e: crate::spin::SpinError) -> Self {
        CliError::Bench(e.into())
    }
}

impl From<crate::group::GroupError> for CliError {
    fn from(e: crate::group::GroupError) -> Self {
        CliError::Bench(e.into())
    }
}

impl From<crate::partition::PartitionError> for CliError {
    fn from(e: crate::partition::PartitionError) -> Self {
        CliError::Bench(e.into())
    }
}

impl From<crate::gns::GnsError> for CliError {
    fn from(e: crate::gns::GnsError) -> Self {
        CliError::Bench(e.into())
    }
}

impl From<crate::gns::QuadratureError> for CliError {
    fn from(e: crate::gns::QuadratureError) -> Self {
        CliError::Bench(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "freehyper", version, about = "Moment formulas and hypercontractivity checks for spin and free group algebras")]
pub struct Cli {
    /// Worker threads (default: FREEHYPER_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Report path (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Limit moment of a mixed word from the weighted pair-partition formula.
    Moments(MomentsArgs),
    /// Trace of a spin word under a sign function.
    Trace(TraceArgs),
    /// L_p norm of an element.
    Norm(NormArgs),
    /// Monte Carlo studies over random sign functions.
    Clt(CltArgs),
    /// One hypercontractivity margin.
    Hc(HcArgs),
    /// Named check suite, or `all` for the acceptance suites.
    Suite(SuiteArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long)]
    pub word: String,
    /// free-clifford | constant:q | mixed:q1,q2 | matrix:f11,f12;f21,f22
    #[arg(long, default_value = "free-clifford")]
    pub weight: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Signs {
    /// All pairs anticommute.
    Car,
    /// Anticommute within a factor, commute across.
    Blockwise,
    /// Anticommute within a factor, fair coin across (needs --seed).
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct SpinShape {
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, value_enum, default_value = "random")]
    pub signs: Signs,
}

#[derive(Args, Debug, Serialize)]
pub struct TraceArgs {
    #[command(flatten)]
    pub shape: SpinShape,
    #[arg(long)]
    pub word: String,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Spin,
    Group,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Spectral,
    Moments,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FlavorArg {
    Free,
    Freez2,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Free => Flavor::Free,
            FlavorArg::Freez2 => Flavor::FreeZ2,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[command(flatten)]
    pub shape: SpinShape,
    #[arg(long, value_enum, default_value = "free")]
    pub flavor: FlavorArg,
    #[arg(long)]
    pub element: String,
    /// Exponent; `inf` allowed on the spectral route.
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum)]
    pub route: Option<RouteArg>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    Moments,
    KeyLemma,
    Norm,
}

#[derive(Args, Debug, Serialize)]
pub struct CltArgs {
    #[arg(long, value_enum)]
    pub study: Study,
    /// Word for the moments and key-lemma studies.
    #[arg(long)]
    pub word: Option<String>,
    /// `𝔾_n` element for the norm study.
    #[arg(long)]
    pub element: Option<String>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub m_list: Vec<u32>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value = "free-clifford")]
    pub weight: String,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct HcArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[command(flatten)]
    pub shape: SpinShape,
    #[arg(long, value_enum, default_value = "free")]
    pub flavor: FlavorArg,
    /// Element; a random one (seeded) when absent.
    #[arg(long)]
    pub element: Option<String>,
    /// Word length of random group elements.
    #[arg(long, default_value_t = 2)]
    pub max_len: usize,
    #[arg(long)]
    pub self_adjoint: bool,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    /// optimal | doubled | improvement | explicit time
    #[arg(long, default_value = "optimal")]
    pub time: String,
    #[arg(long, value_enum)]
    pub route: Option<RouteArg>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SuiteArgs {
    /// Suite name or `all`.
    pub name: String,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parsed output of one command.
struct Outcome {
    records: Vec<Record>,
    /// Plain value printed to stdout (scalar commands).
    value: Option<String>,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(t) = flag {
        return if t == 0 { Err(usage("--threads must be positive")) } else { Ok(Some(t)) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// The resolved configuration echoed into every record.
pub fn run_config(cli: &Cli) -> Value {
    let mut v = serde_json::to_value(&cli.command).expect("serialisable");
    v["format"] = json!(cli.format);
    v["out"] = json!(cli.out.as_ref().map(|p| p.display().to_string()));
    v
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let outcome = match &cli.command {
        Command::Moments(a) => moments(a)?,
        Command::Trace(a) => trace_cmd(a)?,
        Command::Norm(a) => norm_cmd(a)?,
        Command::Clt(a) => clt_cmd(a)?,
        Command::Hc(a) => hc_cmd(a)?,
        Command::Suite(a) => suite_cmd(a)?,
    };
    let config = run_config(cli);
    let records: Vec<Record> =
        outcome.records.into_iter().map(|r| r.with_param("config", config.clone())).collect();
    let all_pass = records.iter().all(|r| r.pass);
    match &outcome.value {
        Some(v) => {
            println!("{v}");
            if cli.out.is_some() {
                emit_report(&records, cli.out.as_deref(), cli.format)?;
            }
        }
        None => emit_report(&records, cli.out.as_deref(), cli.format)?,
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| usage(format!("--seed is required for {what}")))
}

pub fn parse_coefficient(s: &str) -> Result<Complex64, CliError> {
    let s = s.trim();
    let bad = || usage(format!("bad coefficient `{s}`"));
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner.split_once(',').ok_or_else(bad)?;
        return Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?));
    }
    Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0))
}

fn parse_u32(s: &str, what: &str) -> Result<u32, CliError> {
    s.trim().parse().map_err(|_| usage(format!("bad {what} `{s}`")))
}

/// `alpha:i[:k]` letters; `i` and `k` default to 1.
pub fn parse_gens(s: &str) -> Result<Vec<GenIndex>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|tok| {
            let parts: Vec<&str> = tok.split(':').collect();
            if parts.len() > 3 {
                return Err(usage(format!("bad letter `{tok}`")));
            }
            let get = |j: usize| parts.get(j).map_or(Ok(1), |x| parse_u32(x, "letter index"));
            Ok(GenIndex::new(get(0)?, get(1)?, get(2)?))
        })
        .collect()
}

pub fn parse_word(s: &str) -> Result<WordSpec, CliError> {
    Ok(WordSpec::new(parse_gens(s)?.into_iter().map(|g| Letter::new(g.alpha, g.i)).collect()))
}

pub fn parse_weight(s: &str, n: usize) -> Result<WeightFunction, CliError> {
    let n = n.max(1);
    let bad = || usage(format!("bad weight `{s}`"));
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let w = match s.split_once(':') {
        None if s == "free-clifford" => WeightFunction::free_clifford(n),
        Some(("constant", q)) => WeightFunction::constant(n, num(q)?)?,
        Some(("mixed", qs)) => {
            let (a, b) = qs.split_once(',').ok_or_else(bad)?;
            WeightFunction::mixed_q(num(a)?, num(b)?)?
        }
        Some(("matrix", rows)) => {
            let rows: Vec<Vec<f64>> =
                rows.split(';').map(|r| r.split(',').map(num).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
            WeightFunction::from_matrix(&rows)?
        }
        _ => return Err(bad()),
    };
    Ok(w)
}

pub fn parse_spin_element(s: &str, sf: &SignFunction) -> Result<SpinElement<Complex64>, CliError> {
    let mut acc = SpinElement::zero(sf.dims());
    for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (coef, gens) = term.split_once('@').unwrap_or((term, ""));
        let c = parse_coefficient(coef)?;
        acc = acc.add(&SpinElement::monomial(sf, &parse_gens(gens)?, c)?);
    }
    Ok(acc)
}

pub fn parse_group_element(s: &str, flavor: Flavor) -> Result<GroupAlgebraElement<Complex64>, CliError> {
    let mut terms = Vec::new();
    for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let open = term.find('[').ok_or_else(|| usage(format!("bad group term `{term}`")))?;
        let body = term[open..]
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| usage(format!("bad group term `{term}`")))?;
        let coef = term[..open].trim();
        let c = if coef.is_empty() { Complex64::new(1.0, 0.0) } else { parse_coefficient(coef)? };
        let letters: Vec<i32> = body
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| usage(format!("bad letter `{x}`"))))
            .collect::<Result<_, _>>()?;
        terms.push((GroupWord::reduce(flavor, &letters)?, c));
    }
    // from_terms merges repeated words
    let mut acc = GroupAlgebraElement::zero(flavor);
    for (w, c) in terms {
        acc = acc.add(&GroupAlgebraElement::from_terms(flavor, [(w, c)]))?;
    }
    Ok(acc)
}

fn sign_function(shape: &SpinShape, seed: Option<u64>) -> Result<SignFunction, CliError> {
    let dims = Dims::new(shape.n, shape.d, shape.m);
    if dims.n == 0 || dims.d == 0 || dims.m == 0 {
        return Err(usage("n, d and m must be positive"));
    }
    if dims.count() > spin::MAX_GENERATORS {
        return Err(usage(format!("n·d·m = {} exceeds {}", dims.count(), spin::MAX_GENERATORS)));
    }
    Ok(match shape.signs {
        Signs::Car => SignFunction::car(dims),
        Signs::Blockwise => SignFunction::blockwise(dims),
        Signs::Random => {
            if dims.n == 1 {
                SignFunction::car(dims)
            } else {
                sample_sign_function(&SignModel::theorem_b(dims, require_seed(seed, "random signs")?), 0)?
            }
        }
    })
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("({},{})", z.re, z.im)
    }
}

fn moments(a: &MomentsArgs) -> Result<Outcome, CliError> {
    let word = parse_word(&a.word)?;
    let f = parse_weight(&a.weight, word.max_alpha() as usize)?;
    let value = match weighted_pair_moment_exact(&word, &f)? {
        Some(v) => v.to_string(),
        None => weighted_pair_moment(&word, &f)?.to_string(),
    };
    let v: f64 = value.parse().expect("numeric");
    let rec = Record::new("moments", json!({"word": a.word, "weight": a.weight}), v, v, 0.0, 0);
    Ok(Outcome { records: vec![rec], value: Some(value) })
}

fn trace_cmd(a: &TraceArgs) -> Result<Outcome, CliError> {
    let sf = sign_function(&a.shape, a.seed)?;
    let gens = parse_gens(&a.word)?;
    let x = SpinElement::monomial(&sf, &gens, Complex64::new(1.0, 0.0))?;
    let tr = spin::trace(&x);
    let rec = Record::new("trace", json!({"word": a.word, "im": tr.im}), tr.re, tr.re, 0.0, a.seed.unwrap_or(0));
    Ok(Outcome { records: vec![rec], value: Some(fmt_complex(tr)) })
}

fn default_route(model: Model, route: Option<RouteArg>, nodes: usize) -> Route {
    match (model, route) {
        (_, Some(RouteArg::Spectral)) => Route::Spectral,
        (_, Some(RouteArg::Moments)) | (Model::Group, None) => Route::Moments { nodes },
        (Model::Spin, None) => Route::Spectral,
    }
}

fn norm_cmd(a: &NormArgs) -> Result<Outcome, CliError> {
    let route = default_route(a.model, a.route, a.nodes);
    let (value, stab) = match (a.model, route) {
        (Model::Spin, Route::Spectral) => {
            let sf = sign_function(&a.shape, a.seed)?;
            (lp_norm_spectral(&parse_spin_element(&a.element, &sf)?, &sf, a.p)?, 0.0)
        }
        (Model::Spin, Route::Moments { nodes }) => {
            let sf = sign_function(&a.shape, a.seed)?;
            let x = parse_spin_element(&a.element, &sf)?;
            let mu: Vec<f64> = spin_moments(&x, &sf, 2 * nodes + 1)?.into_iter().map(|z| z.re).collect();
            let n = lp_norm_moments_capped(&mu, a.p, nodes)?;
            (n.value, n.stabilization)
        }
        (Model::Group, Route::Moments { nodes }) => {
            let n = group_norm(&parse_group_element(&a.element, a.flavor.into())?, a.p, nodes)?;
            (n.value, n.stabilization)
        }
        (Model::Group, Route::Spectral) => return Err(BenchError::SpectralGroup.into()),
    };
    let params = json!({"element": a.element, "p": a.p, "stabilization": if stab.is_finite() { json!(stab) } else { json!("inf") }});
    let rec = Record::new("norm", params, value, value, 0.0, a.seed.unwrap_or(0));
    Ok(Outcome { records: vec![rec], value: Some(value.to_string()) })
}

fn clt_cmd(a: &CltArgs) -> Result<Outcome, CliError> {
    let seed = require_seed(a.seed, "clt studies")?;
    let mut records = Vec::new();
    match a.study {
        Study::Moments | Study::KeyLemma => {
            let word = parse_word(a.word.as_deref().ok_or_else(|| usage("--word is required"))?)?;
            let n = a.n.unwrap_or(word.max_alpha().max(1));
            let d = a.d.unwrap_or(word.max_i().max(1));
            let bias = parse_weight(&a.weight, n as usize)?;
            if a.study == Study::Moments {
                let model = SignModel::new(Dims::new(n, d, 1), bias, seed)?;
                for rep in mc_moment_study(&word, &model, &a.m_list, a.trials)? {
                    let params = json!({"study": "moments", "report": rep});
                    records.push(Record::new(
                        format!("clt/moments/m={}", rep.m),
                        params,
                        rep.abs_error,
                        3.0 * rep.stderr,
                        0.0,
                        seed,
                    ));
                }
            } else {
                for &m in &a.m_list {
                    let model = SignModel::new(Dims::new(n, 1, m), bias.clone(), seed)?;
                    let rep = key_lemma_study(&word, &model, a.trials)?;
                    let params = json!({"study": "key-lemma", "report": rep});
                    records.push(
                        Record::new(format!("clt/key-lemma/m={m}/orthogonal"), params.clone(), rep.max_abs_inner, 0.0, 0.0, seed)
                            .with_pass(rep.inner_exactly_zero),
                    );
                    records.push(Record::new(
                        format!("clt/key-lemma/m={m}/no-repeat-mass"),
                        params,
                        rep.norm1.abs_error,
                        3.0 * rep.norm1.stderr,
                        0.0,
                        seed,
                    ));
                }
            }
        }
        Study::Norm => {
            let x = parse_group_element(a.element.as_deref().ok_or_else(|| usage("--element is required"))?, Flavor::FreeZ2)?;
            let p = a.p.ok_or_else(|| usage("--p is required"))?;
            let n = a.n.unwrap_or_else(|| x.terms().keys().flat_map(|w| w.letters()).map(|l| l.unsigned_abs()).max().unwrap_or(1));
            let model = SignModel::theorem_b(Dims::new(n, 1, 1), seed);
            for rep in norm_convergence_study(&x, p, &model, &a.m_list, a.trials, a.t, a.nodes)? {
                // informational: the limit is reached only as m → ∞
                let params = json!({"study": "norm", "informational": true, "report": rep});
                records.push(Record::new(format!("clt/norm/m={}", rep.m), params, rep.mean, rep.target, 0.0, seed).with_pass(true));
            }
        }
    }
    Ok(Outcome { records, value: None })
}

fn hc_cmd(a: &HcArgs) -> Result<Outcome, CliError> {
    let rule: TimeRule = a.time.parse().map_err(usage)?;
    let t = rule.resolve(a.p, a.q)?;
    let route = default_route(a.model, a.route, a.nodes);
    let (element, json_element) = match a.model {
        Model::Spin => {
            let sf = sign_function(&a.shape, a.seed)?;
            let x = match &a.element {
                Some(s) => parse_spin_element(s, &sf)?,
                None => random_spin_element(&sf, &mut rng_for(require_seed(a.seed, "random elements")?, 1), a.self_adjoint)?,
            };
            let j = x.to_json();
            (Handle::Spin { element: x, sf }, j)
        }
        Model::Group => {
            let flavor: Flavor = a.flavor.into();
            let x = match &a.element {
                Some(s) => parse_group_element(s, flavor)?,
                None => {
                    let seed = require_seed(a.seed, "random elements")?;
                    random_group_element(flavor, a.shape.n.max(1), a.max_len, &mut rng_for(seed, 1), a.self_adjoint)
                }
            };
            let j = x.to_json();
            (Handle::Group(x), j)
        }
    };
    let m = hc_margin(&HCQuery { p: a.p, q: a.q, t, element, route })?;
    let params = json!({
        "t": t,
        "stabilization": if m.stabilization.is_finite() { json!(m.stabilization) } else { json!("inf") },
        "conclusive": m.conclusive,
        "element": json_element,
    });
    let rec = Record::new(format!("hc/{}", serde_json::to_value(a.model).unwrap().as_str().unwrap()), params, m.lhs, m.rhs, m.tol, a.seed.unwrap_or(0))
        .with_pass(m.pass);
    Ok(Outcome { records: vec![rec], value: None })
}

fn suite_cmd(a: &SuiteArgs) -> Result<Outcome, CliError> {
    let seed = require_seed(a.seed, "suites")?;
    let names: Vec<&str> = if a.name == "all" {
        ACCEPTANCE_SUITES.to_vec()
    } else if ACCEPTANCE_SUITES.contains(&a.name.as_str()) || EXTRA_SUITES.contains(&a.name.as_str()) {
        vec![a.name.as_str()]
    } else {
        return Err(usage(format!(
            "unknown suite `{}`; expected all, {} or {}",
            a.name,
            ACCEPTANCE_SUITES.join(", "),
            EXTRA_SUITES.join(", ")
        )));
    };
    let mut records = Vec::new();
    for name in names {
        let recs = run_suite(name, seed)?;
        let pass = recs.iter().all(|r| r.pass);
        eprintln!("{name}: {}", if pass { "PASS" } else { "FAIL" });
        records.extend(recs.into_iter().map(|r| r.with_param("suite", json!(name))));
    }
    Ok(Outcome { records, value: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_and_word_syntax() {
        assert_eq!(parse_coefficient("2.5").unwrap(), Complex64::new(2.5, 0.0));
        assert_eq!(parse_coefficient("(1,-0.5)").unwrap(), Complex64::new(1.0, -0.5));
        assert!(parse_coefficient("x").is_err());
        assert_eq!(parse_gens("1:2:3,2").unwrap(), vec![GenIndex::new(1, 2, 3), GenIndex::new(2, 1, 1)]);
        assert!(parse_gens("1:1:1:1").is_err());
        let w = parse_word("1:1,2:1,2:1,1:1").unwrap();
        assert_eq!(w.alphas(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn element_syntax() {
        let sf = SignFunction::car(Dims::new(1, 2, 1));
        let x = parse_spin_element("1; 2@1:1:1; (0,1)@1:2,1:1", &sf).unwrap();
        assert_eq!(x.len(), 3);
        let g = parse_group_element("[]; 2[1,-1]; (0,1)[1,2]", Flavor::Free).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.coeff(&GroupWord::identity()), Complex64::new(3.0, 0.0));
        assert!(parse_group_element("1[3]", Flavor::FreeZ2).is_ok());
        assert!(parse_group_element("1[x]", Flavor::Free).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(parse_weight("free-clifford", 2).unwrap(), WeightFunction::free_clifford(2));
        assert!(parse_weight("mixed:0.5,-0.5", 2).is_ok());
        assert!(parse_weight("matrix:-1,0;0,-1", 2).is_ok());
        assert!(parse_weight("bogus", 2).is_err());
    }
}
