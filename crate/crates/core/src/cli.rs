//! Command-line front end: deformation pairs, jobs, reports and the
//! verification suites.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::complex::KnotComplex;
use crate::disk::{DiskElement, SpunContext};
use crate::error::{CoreError, Result};
use crate::invariants::{self, SearchConfig};
use crate::maps::{self, ChainMap, SwapVariant};
use crate::poly::Monomial;
use crate::{io, library};

/// Automorphisms of `K` (or of `K # K` for the swaps) used to spin disks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deformation {
    Id,
    Roll(u32),
    Swap,
    SwapVariant,
}

impl Deformation {
    pub fn needs_square(self) -> bool {
        matches!(self, Deformation::Swap | Deformation::SwapVariant)
    }
}

impl FromStr for Deformation {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "id" => Deformation::Id,
            "roll" => Deformation::Roll(1),
            "swap" => Deformation::Swap,
            "swap_variant" => Deformation::SwapVariant,
            _ => match s.strip_prefix("roll^").map(str::parse::<u32>) {
                Some(Ok(l)) => Deformation::Roll(l),
                _ => return Err(CoreError::UnknownName(s.to_string())),
            },
        })
    }
}

impl std::fmt::Display for Deformation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Deformation::Id => write!(f, "id"),
            Deformation::Roll(1) => write!(f, "roll"),
            Deformation::Roll(l) => write!(f, "roll^{l}"),
            Deformation::Swap => write!(f, "swap"),
            Deformation::SwapVariant => write!(f, "swap_variant"),
        }
    }
}

pub fn parse_pair(s: &str) -> Result<(Deformation, Deformation)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CoreError::InvalidParameter(format!("a pair is `a,b`, got `{s}`")));
    }
    Ok((parts[0].parse()?, parts[1].parse()?))
}

/// Spun disks of `-K' # K'` for a list of deformations, where `K' = K # K`
/// as soon as a swap is involved and `K' = K` otherwise.
pub struct DiskFamily {
    pub knot: Arc<KnotComplex>,
    pub base: Arc<KnotComplex>,
    pub context: SpunContext,
}

impl DiskFamily {
    pub fn new(knot: Arc<KnotComplex>, square: bool) -> Result<DiskFamily> {
        let base = if square { Arc::new(knot.tensor(&knot)?) } else { knot.clone() };
        let context = SpunContext::new(base.clone())?;
        Ok(DiskFamily { knot, base, context })
    }

    pub fn map(&self, d: Deformation) -> Result<ChainMap> {
        match d {
            Deformation::Id => Ok(ChainMap::identity(&self.base)),
            Deformation::Roll(l) => maps::roll_map(&self.base, l),
            Deformation::Swap | Deformation::SwapVariant => {
                if Arc::ptr_eq(&self.base, &self.knot) {
                    return Err(CoreError::InvalidParameter("swap needs the K # K presentation".into()));
                }
                let v = if d == Deformation::Swap { SwapVariant::IdPhiPsiPsiPhi } else { SwapVariant::PhiPsiIdPhiPsi };
                maps::summand_swap_on(&self.knot, &self.base, v)
            }
        }
    }

    pub fn disk(&self, d: Deformation) -> Result<DiskElement> {
        self.context.disk(&self.map(d)?)
    }
}

pub fn build_pair(knot: Arc<KnotComplex>, a: Deformation, b: Deformation) -> Result<(DiskElement, DiskElement)> {
    let fam = DiskFamily::new(knot, a.needs_square() || b.needs_square())?;
    Ok((fam.disk(a)?, fam.disk(b)?))
}

/// `p/q` in lowest terms, also for integers.
pub fn render_rational(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A batch job, also accepted as JSON by `cflkit run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub knot: Option<String>,
    #[serde(default)]
    pub file: Option<PathBuf>,
    pub pair: [String; 2],
    pub invariants: Vec<String>,
    /// Inclusive range for `vk`.
    #[serde(default)]
    pub k: Option<[i64; 2]>,
    /// Grid denominator for the Υ curve.
    #[serde(default)]
    pub grid: Option<i64>,
    /// Single Υ parameter `p/q`.
    #[serde(default)]
    pub t: Option<String>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub slack: Option<i64>,
    #[serde(default)]
    pub tau_prime_cap: Option<i64>,
    /// Genus of the w-side stabilization used by `kappa` and `kappa0`.
    #[serde(default)]
    pub w_genus: Option<u32>,
}

pub fn load_complex(knot: Option<&str>, file: Option<&Path>) -> Result<KnotComplex> {
    match (knot, file) {
        (Some(name), None) => library::builtin(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CoreError::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
            io::parse(&text)
        }
        _ => Err(CoreError::InvalidParameter("give exactly one of --knot and --file".into())),
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || CoreError::InvalidParameter(format!("expected a rational `p/q`, got `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<i64>().map_err(|_| bad())?, q.trim().parse::<i64>().map_err(|_| bad())?);
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => s.trim().parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

pub fn parse_k_range(s: &str) -> Result<[i64; 2]> {
    let bad = || CoreError::InvalidParameter(format!("expected `a..b` or `k`, got `{s}`"));
    match s.split_once("..") {
        Some((a, b)) => Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?]),
        None => {
            let k = s.trim().parse().map_err(|_| bad())?;
            Ok([k, k])
        }
    }
}

/// Result of a job: the JSON report and, when requested, the Υ CSV text.
pub struct JobOutput {
    pub report: Value,
    pub csv: Option<String>,
}

pub fn upsilon_csv(samples: &[(Rational64, Rational64)]) -> String {
    let mut s = String::from("t,upsilon\r\n");
    for (t, v) in samples {
        write!(s, "{},{}\r\n", render_rational(*t), render_rational(*v)).unwrap();
    }
    s
}

pub fn run_job(job: &JobSpec, env: &SearchConfig) -> Result<JobOutput> {
    let knot = Arc::new(load_complex(job.knot.as_deref(), job.file.as_deref())?);
    let a: Deformation = job.pair[0].parse()?;
    let b: Deformation = job.pair[1].parse()?;
    let (e1, e2) = build_pair(knot.clone(), a, b)?;
    let cfg = SearchConfig {
        slack: job.slack.or(env.slack),
        tau_prime_cap: job.tau_prime_cap.or(env.tau_prime_cap),
    };
    let mut report = Map::new();
    report.insert("complex".into(), json!(knot.name()));
    report.insert("pair".into(), json!([a.to_string(), b.to_string()]));
    let mut csv = None;
    for inv in &job.invariants {
        let value = match inv.as_str() {
            "tau" => json!(invariants::tau_with(&e1, &e2, &cfg)?),
            "tau_prime" => match invariants::tau_prime_with(&e1, &e2, &cfg)? {
                Some(v) => json!(v),
                None => json!("-inf"),
            },
            "nu" => json!(invariants::nu_with(&e1, &e2, &cfg)?),
            "vk" => {
                let [lo, hi] = job.k.unwrap_or([0, 0]);
                let mut m = Map::new();
                for k in lo..=hi {
                    m.insert(k.to_string(), json!(invariants::v_k_with(&e1, &e2, k, &cfg)?));
                }
                Value::Object(m)
            }
            "upsilon" => match (&job.t, job.grid) {
                (Some(t), None) => {
                    let t = parse_rational(t)?;
                    json!({ "t": render_rational(t), "upsilon": render_rational(invariants::upsilon(&e1, &e2, t)?) })
                }
                (None, Some(q)) => {
                    let curve = invariants::upsilon_curve(&e1, &e2, q)?;
                    if job.csv.is_some() {
                        csv = Some(upsilon_csv(&curve.samples));
                    }
                    json!({
                        "grid": q,
                        "samples": curve.samples.iter().map(|(t, v)| json!({ "t": render_rational(*t), "upsilon": render_rational(*v) })).collect::<Vec<_>>(),
                        "breakpoints": curve.breakpoints.iter().map(|t| render_rational(*t)).collect::<Vec<_>>(),
                        "endpoints": { "0": render_rational(curve.at_zero), "2": "not computed" },
                    })
                }
                _ => return Err(CoreError::InvalidParameter("upsilon needs exactly one of t and grid".into())),
            },
            "kappa" | "kappa0" => {
                let g = job.w_genus.unwrap_or(1);
                let (w1, w2) = (e1.stabilize(g, 0)?, e2.stabilize(g, 0)?);
                if inv == "kappa" {
                    json!(invariants::kappa_with(&w1, &w2, &cfg)?)
                } else {
                    json!([invariants::kappa0_with(&w1, &cfg)?, invariants::kappa0_with(&w2, &cfg)?])
                }
            }
            other => return Err(CoreError::UnknownName(other.to_string())),
        };
        report.insert(inv.clone(), value);
    }
    Ok(JobOutput { report: Value::Object(report), csv })
}

#[derive(Parser, Debug)]
#[command(name = "cflkit", version, about = "Knot Floer complexes and secondary invariants of slice disk pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Built-in complex name
    #[arg(long)]
    pub knot: Option<String>,
    /// Complex file in the text format
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Two deformations: id, roll, roll^l, swap, swap_variant
    #[arg(long, default_value = "id,roll")]
    pub pair: String,
    /// Search slack added to the maximal genus
    #[arg(long)]
    pub slack: Option<i64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// τ of a disk pair
    Tau(PairArgs),
    /// τ' of a disk pair (`-inf` when unbounded)
    TauPrime(PairArgs),
    /// ν of a disk pair
    Nu(PairArgs),
    /// V_k over a range of k
    Vk {
        #[command(flatten)]
        pair: PairArgs,
        /// `a..b` (inclusive) or a single k
        #[arg(long, default_value = "0..3")]
        k: String,
    },
    /// Υ at one t, or sampled on a grid
    Upsilon {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        grid: Option<i64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// κ of the genus-g w-side stabilizations of a disk pair
    Kappa {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1)]
        w_genus: u32,
    },
    /// κ₀ of the genus-g w-side stabilizations of both disks
    Kappa0 {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1)]
        w_genus: u32,
    },
    /// Run a JSON job file
    Run { job: PathBuf },
    /// Run the property suites on built-ins or a file
    Verify {
        /// `all` or a built-in name
        #[arg(default_value = "all")]
        scope: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Print a built-in complex in the text format
    Export { name: String },
    /// Parse and validate a complex file
    Validate { file: PathBuf },
    /// List built-in complexes
    List,
}

fn job_from(p: &PairArgs, invariants: &[&str]) -> Result<JobSpec> {
    let (a, b) = parse_pair(&p.pair)?;
    Ok(JobSpec {
        knot: p.knot.clone(),
        file: p.file.clone(),
        pair: [a.to_string(), b.to_string()],
        invariants: invariants.iter().map(|s| s.to_string()).collect(),
        slack: p.slack,
        ..Default::default()
    })
}

/// Output of one CLI invocation: stdout text, optional CSV to write, and
/// whether the command succeeded.
pub struct Outcome {
    pub stdout: String,
    pub csv: Option<(PathBuf, String)>,
    pub ok: bool,
}

fn to_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

/// Renders a report with the job's invariant keys only.
fn invariant_view(report: &Value, keys: &[&str]) -> Value {
    let mut m = Map::new();
    for k in keys {
        if let Some(v) = report.get(*k) {
            m.insert((*k).to_string(), v.clone());
        }
    }
    Value::Object(m)
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    let env = SearchConfig::from_env()?;
    let simple = |p: &PairArgs, key: &str| -> Result<Outcome> {
        let out = run_job(&job_from(p, &[key])?, &env)?;
        Ok(Outcome { stdout: to_json(&invariant_view(&out.report, &[key])), csv: None, ok: true })
    };
    match cmd {
        Command::Tau(p) => simple(p, "tau"),
        Command::TauPrime(p) => simple(p, "tau_prime"),
        Command::Nu(p) => simple(p, "nu"),
        Command::Vk { pair, k } => {
            let mut job = job_from(pair, &["vk"])?;
            job.k = Some(parse_k_range(k)?);
            let out = run_job(&job, &env)?;
            Ok(Outcome { stdout: to_json(&out.report["vk"]), csv: None, ok: true })
        }
        Command::Upsilon { pair, t, grid, csv } => {
            let mut job = job_from(pair, &["upsilon"])?;
            job.t = t.clone();
            job.grid = *grid;
            job.csv = csv.clone();
            if t.is_none() && grid.is_none() {
                job.grid = Some(32);
            }
            let out = run_job(&job, &env)?;
            Ok(Outcome {
                stdout: to_json(&out.report["upsilon"]),
                csv: csv.clone().zip(out.csv),
                ok: true,
            })
        }
        Command::Kappa { pair, w_genus } | Command::Kappa0 { pair, w_genus } => {
            let key = if matches!(cmd, Command::Kappa { .. }) { "kappa" } else { "kappa0" };
            let mut job = job_from(pair, &[key])?;
            job.w_genus = Some(*w_genus);
            let out = run_job(&job, &env)?;
            Ok(Outcome { stdout: to_json(&invariant_view(&out.report, &[key])), csv: None, ok: true })
        }
        Command::Run { job } => {
            let text = std::fs::read_to_string(job)
                .map_err(|e| CoreError::InvalidParameter(format!("cannot read {}: {e}", job.display())))?;
            let parsed: JobSpec = serde_json::from_str(&text)
                .map_err(|e| CoreError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;
            let out = run_job(&parsed, &env)?;
            Ok(Outcome { stdout: to_json(&out.report), csv: parsed.csv.clone().zip(out.csv), ok: true })
        }
        Command::Verify { scope, file } => {
            let report = match file {
                Some(path) => verify_file(path),
                None => verify_scope(scope)?,
            };
            Ok(Outcome { stdout: report.render(), csv: None, ok: report.all_passed() })
        }
        Command::Export { name } => Ok(Outcome { stdout: io::serialize(&library::builtin(name)?), csv: None, ok: true }),
        Command::Validate { file } => {
            let c = load_complex(None, Some(file))?;
            Ok(Outcome {
                stdout: to_json(&json!({ "name": c.name(), "generators": c.len(), "valid": true })),
                csv: None,
                ok: true,
            })
        }
        Command::List => {
            let mut s = String::new();
            for e in library::LIBRARY {
                writeln!(s, "{}\t{}", e.name, e.provenance).unwrap();
            }
            Ok(Outcome { stdout: s, csv: None, ok: true })
        }
    }
}

pub fn error_json(e: &CoreError) -> String {
    to_json(&json!({ "error": { "code": e.code(), "message": e.to_string() } }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub subject: String,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    fn record(&mut self, subject: &str, check: &'static str, outcome: Result<bool>) {
        let (passed, detail) = match outcome {
            Ok(true) => (true, String::new()),
            Ok(false) => (false, "check returned false".into()),
            Err(e) => (false, e.to_string()),
        };
        self.results.push(CheckResult { subject: subject.to_string(), check, passed, detail });
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            if r.detail.is_empty() {
                writeln!(s, "{status} {} {}", r.subject, r.check).unwrap();
            } else {
                writeln!(s, "{status} {} {}: {}", r.subject, r.check, r.detail.trim_end()).unwrap();
            }
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        writeln!(s, "{} checks, {} failed", self.results.len(), failed).unwrap();
        s
    }
}

fn verify_file(path: &Path) -> VerifyReport {
    let mut report = VerifyReport::default();
    let subject = path.display().to_string();
    match load_complex(None, Some(path)) {
        Ok(c) => verify_complex(&mut report, &subject, Arc::new(c), true),
        Err(e) => report.record(&subject, "validate", Err(e)),
    }
    report
}

pub fn verify_scope(scope: &str) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let entries: Vec<&library::LibraryEntry> = if scope == "all" {
        library::LIBRARY.iter().collect()
    } else {
        vec![library::entry(scope)?]
    };
    for e in entries {
        verify_complex(&mut report, e.name, Arc::new(e.complex()), e.is_knot);
    }
    Ok(report)
}

fn verify_complex(report: &mut VerifyReport, name: &str, c: Arc<KnotComplex>, is_knot: bool) {
    report.record(name, "d^2 = 0 and grading law", c.validate().map(|_| true).map_err(CoreError::Validation));
    let phi = maps::phi(&c);
    let psi = maps::psi(&c);
    let (phi, psi) = match (phi, psi) {
        (Ok(f), Ok(p)) => (f, p),
        (Err(e), _) | (_, Err(e)) => {
            report.record(name, "phi and psi are homogeneous", Err(e));
            return;
        }
    };
    report.record(name, "Leibniz: phi d + d phi = 0", Ok(phi.is_chain_map()));
    report.record(name, "Leibniz: psi d + d psi = 0", Ok(psi.is_chain_map()));
    report.record(name, "phi^2 null-homotopic", phi.compose(&phi).and_then(|m| maps::is_null_homotopic(&m)));
    report.record(name, "psi^2 null-homotopic", psi.compose(&psi).and_then(|m| maps::is_null_homotopic(&m)));
    let fp = phi.compose(&psi);
    report.record(
        name,
        "roll map is a filtered chain map",
        maps::roll_map(&c, 1).map(|r| r.is_chain_map() && r.is_filtered()),
    );
    if !is_knot {
        report.record(name, "phi psi = 0", fp.map(|m| m.is_zero()));
        return;
    }
    report.record(
        name,
        "U V phi psi null-homotopic",
        fp.and_then(|m| maps::is_null_homotopic(&m.mul_monomial(Monomial::uhat(1)))),
    );
    let pair = build_pair(c.clone(), Deformation::Id, Deformation::Roll(1));
    let Ok((id, roll)) = pair else {
        report.record(name, "spun disks", pair.map(|_| true));
        return;
    };
    let tau = invariants::tau(&id, &roll);
    report.record(name, "tau(id, roll) <= 1", tau.clone().map(|t| t <= 1));
    let Ok(tau) = tau else { return };
    report.record(name, "tau symmetric", invariants::tau(&roll, &id).map(|t| t == tau));
    report.record(name, "tau <= nu <= tau + 1", invariants::nu(&id, &roll).map(|n| tau <= n && n <= tau + 1));
    report.record(
        name,
        "upsilon(1/32) = tau/32",
        invariants::upsilon(&id, &roll, Rational64::new(1, 32)).map(|u| u == Rational64::new(tau, 32)),
    );
    let vks: Result<Vec<i64>> = (0..=6).map(|k| invariants::v_k(&id, &roll, k)).collect();
    report.record(
        name,
        "V_k >= V_k+1 >= V_k - 1",
        vks.map(|v| v.windows(2).all(|w| w[0] >= w[1] && w[1] >= w[0] - 1)),
    );
    let triple = [&id, &roll, &id];
    report.record(
        name,
        "ultrametric tau",
        (|| {
            let t = |a: &DiskElement, b: &DiskElement| invariants::tau(a, b);
            Ok(t(triple[0], triple[2])? <= t(triple[0], triple[1])?.max(t(triple[1], triple[2])?))
        })(),
    );
}
