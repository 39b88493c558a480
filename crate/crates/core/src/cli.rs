//! Command-line front end: argument parsing, run configuration, versioned
//! JSON documents and dispatch to the library.

use crate::algebra::rat_to_f64;
use crate::classify::{
    classify_triple, match_quadruple_family, pure_braid_split, seed_triple, stored_orbits, trig_quadruple_search,
    OrbitTag, DEFAULT_DEGREE_CAP, DEFAULT_MAX_DEN,
};
use crate::connection::{connect_all, triple_from_asymptotics, AsymptoticDatum, Convention, CriticalPoint};
use crate::exactnum::{elem_from_cos, field_new, parse_rational, Ctx, FieldElement};
use crate::monodromy::{canonical_matrices, exact_to_complex, m_infinity_check, trace_identities_hold};
use crate::pvi::{fit_asymptotics, integrate, IntegrateOptions};
use crate::reflect::{coxeter_relations, coxeter_type, gram, group_closure, is_positive_definite, reflections};
use crate::solutions::{
    continuation_check, h3pp_branch, h3pp_predictions, real_arcs, solution, verify_seeded, SolutionId,
};
use crate::triples::{mu_from_exact_triple, orbit_enumerate, GroupKind, Triple, DEFAULT_ORBIT_BUDGET};
use crate::VERSION;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use thiserror::Error;

/// Schema tag of every JSON document written by the tool.
pub const SCHEMA: &str = "pvi-mu/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Library(String),
}

macro_rules! lib_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Library(e.to_string())
            }
        }
    )*};
}
lib_err!(
    crate::triples::TripleError,
    crate::classify::ClassifyError,
    crate::reflect::ReflectError,
    crate::monodromy::MonodromyError,
    crate::connection::ConnectionError,
    crate::solutions::SolutionError,
    crate::solutions::ContinuationError,
    crate::pvi::PviError,
    crate::exactnum::ExactError
);

/// Environment variable holding the default working precision in digits.
pub const DIGITS_ENV: &str = "PVI_DIGITS";

#[derive(Parser, Debug)]
#[command(name = "pvi", version = VERSION, about = "Monodromy data and algebraic solutions of PVIμ")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by all subcommands; embedded in every output document.
#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    /// Working precision in decimal digits for high-precision reporting.
    #[arg(long, global = true, env = DIGITS_ENV, default_value_t = 50)]
    pub digits: u32,
    /// Local error tolerance of the integrator.
    #[arg(long = "tol", global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Relative residual above which an asymptotic fit is rejected.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub fit_tol: f64,
    /// Tolerance of trace and eigenvalue checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub trace_tol: f64,
    /// Maximum number of classes explored by orbit enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_ORBIT_BUDGET)]
    pub budget: usize,
    /// Maximum order of a generated reflection group.
    #[arg(long, global = true, default_value_t = crate::reflect::DEFAULT_CLOSURE_CAP)]
    pub closure_cap: usize,
    /// Seed for the residual sample grid.
    #[arg(id = "sample_seed", long = "sample-seed", global = true, default_value_t = 0)]
    pub seed: u64,
    /// Accepted for compatibility: output is always JSON.
    #[arg(long, global = true, default_value_t = false)]
    #[serde(skip)]
    pub json: bool,
    /// Emit plain data tables in addition to the summary where available.
    #[arg(long, global = true, default_value_t = false)]
    pub dump_plot_data: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let pos = [("tol", self.tol), ("fit-tol", self.fit_tol), ("trace-tol", self.trace_tol)];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("--{name} must be positive")));
            }
        }
        if self.budget == 0 || self.closure_cap == 0 || self.digits == 0 {
            return Err(CliError::Usage("budgets and digits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum SeedName {
    Tetrahedron,
    Cube,
    Icosahedron,
    GreatIcosahedron,
    GreatDodecahedron,
}

impl SeedName {
    fn tag(self) -> OrbitTag {
        match self {
            SeedName::Tetrahedron => OrbitTag::Tetrahedron,
            SeedName::Cube => OrbitTag::Cube,
            SeedName::Icosahedron => OrbitTag::Icosahedron,
            SeedName::GreatIcosahedron => OrbitTag::GreatIcosahedron,
            SeedName::GreatDodecahedron => OrbitTag::GreatDodecahedron,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum GroupArg {
    Full,
    Pure,
}

#[derive(Args, Debug, Clone)]
pub struct TripleArg {
    /// Triple as JSON, e.g. '{"coords":[0,1,1]}'; coordinates may be
    /// integers, rationals "p/q", "2cos(pi*p/q)" forms or exact field objects.
    #[arg(long, conflicts_with = "seed")]
    pub triple: Option<String>,
    /// One of the five stored orbit seeds.
    #[arg(long, value_enum)]
    pub seed: Option<SeedName>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the braid orbit of a triple.
    Orbit {
        #[command(flatten)]
        t: TripleArg,
        #[arg(long, value_enum, default_value_t = GroupArg::Full)]
        group: GroupArg,
    },
    /// Identify the orbit of a triple.
    Classify {
        #[command(flatten)]
        t: TripleArg,
    },
    /// Exhaustive search of rational-cosine quadruples summing to zero.
    Trigsearch {
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u64,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: usize,
    },
    /// Reflection group generated by the triple.
    Group {
        #[command(flatten)]
        t: TripleArg,
    },
    /// Canonical monodromy matrices and their checks.
    Mats {
        #[command(flatten)]
        t: TripleArg,
        /// μ for the M∞ check; defaults to the μ of the triple.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
    },
    /// Leading asymptotic data at 0, 1, ∞ and the inverse map.
    Connect {
        #[command(flatten)]
        t: TripleArg,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Also report the leading coefficients in the printed normalisation.
        #[arg(long)]
        printed: bool,
    },
    /// Substitute a parametric solution into PVIμ.
    Verify {
        /// a3, b3, h3, h3p, a3-amended or all.
        #[arg(long)]
        solution: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Integrate PVIμ from leading data at 0, or along a real arc of a solution.
    Integrate {
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long)]
        sigma0: Option<f64>,
        /// Leading coefficient at 0 as "re,im".
        #[arg(long, allow_hyphen_values = true)]
        a0: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        from: f64,
        #[arg(long, default_value_t = 0.999)]
        to: f64,
        /// Seed from the real arc with this index instead (see `report`).
        #[arg(long, conflicts_with_all = ["sigma0", "a0"])]
        arc: Option<usize>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Summary of the five finite orbits.
    Report {
        #[arg(long)]
        all: bool,
    },
    /// Leading Puiseux data of the 18-branch solution.
    H3pp {
        #[arg(long)]
        branch: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Orbit { .. } => "orbit",
            Command::Classify { .. } => "classify",
            Command::Trigsearch { .. } => "trigsearch",
            Command::Group { .. } => "group",
            Command::Mats { .. } => "mats",
            Command::Connect { .. } => "connect",
            Command::Verify { .. } => "verify",
            Command::Integrate { .. } => "integrate",
            Command::Report { .. } => "report",
            Command::H3pp { .. } => "h3pp",
        }
    }
}

/// One exact coordinate in a triple document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Text(String),
    Exact(FieldElement),
    Float(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TripleDoc {
    pub coords: Vec<Coord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<[f64; 3]>,
}

enum Parsed {
    Rational(BigRational),
    Cos(i64, u64),
    Exact(FieldElement),
}

/// `±2cos(pi*p/q)` or `±2cos(πp/q)`, spaces ignored.
fn parse_cos(s: &str) -> Option<(i64, u64)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, rest) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(&t)),
    };
    let inner = rest.strip_prefix("2cos(")?.strip_suffix(')')?;
    let inner = inner.strip_prefix("pi").or_else(|| inner.strip_prefix('π'))?;
    let inner = inner.strip_prefix('*').unwrap_or(inner);
    let r = match inner.strip_prefix('/') {
        Some(q) => parse_rational(&format!("1/{q}")).ok()?,
        None if inner.is_empty() => parse_rational("1").ok()?,
        None => parse_rational(inner).ok()?,
    };
    let (p, q) = crate::exactnum::rat_parts(&r)?;
    // 2cos(πr) = −2cos(π(1 − r))
    let (p, q) = if neg { (p, q) } else { (q - p, q) };
    Some((p, q as u64))
}

fn parse_coord(c: &Coord) -> Result<Parsed, CliError> {
    match c {
        Coord::Int(v) => Ok(Parsed::Rational(BigRational::from_integer((*v).into()))),
        Coord::Exact(e) => Ok(Parsed::Exact(e.clone())),
        Coord::Text(s) => {
            if let Some((p, q)) = parse_cos(s) {
                return Ok(Parsed::Cos(p, q));
            }
            parse_rational(s).map(Parsed::Rational).map_err(|_| CliError::Usage(format!("bad coordinate {s:?}")))
        }
        Coord::Float(v) => {
            // accept floats that are −2cos of a rational angle with small denominator
            let r = (-v / 2.0).clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
            for q in 1..=60u64 {
                let p = (r * q as f64).round() as i64;
                if ((-2.0 * (std::f64::consts::PI * p as f64 / q as f64).cos()) - v).abs() < 1e-12 && v.abs() <= 2.0 {
                    return Ok(Parsed::Cos(p, q));
                }
            }
            Err(CliError::Usage(format!("coordinate {v} is not recognised as exact; use a string form")))
        }
    }
}

impl TripleDoc {
    pub fn from_exact(t: &Triple<FieldElement>) -> Self {
        TripleDoc { coords: t.x.iter().map(|e| Coord::Exact(e.clone())).collect(), approx: Some(t.to_f64()) }
    }

    pub fn to_exact(&self) -> Result<Triple<FieldElement>, CliError> {
        if self.coords.len() != 3 {
            return Err(CliError::Usage("a triple needs exactly three coordinates".into()));
        }
        let parsed: Vec<Parsed> = self.coords.iter().map(parse_coord).collect::<Result<_, _>>()?;
        let n = parsed.iter().fold(1u64, |n, p| match p {
            Parsed::Rational(_) => n,
            Parsed::Cos(_, q) => n.lcm(q),
            Parsed::Exact(e) => n.lcm(&e.context().n()),
        });
        let ctx: Ctx = field_new(n);
        let xs: Vec<FieldElement> = parsed
            .into_iter()
            .map(|p| match p {
                Parsed::Rational(r) => Ok(FieldElement::from_rational(&ctx, r)),
                Parsed::Cos(p, q) => elem_from_cos(p, q, &ctx).map_err(CliError::from),
                Parsed::Exact(e) => e.lift(&ctx).map_err(CliError::from),
            })
            .collect::<Result<_, _>>()?;
        Ok(Triple::new(xs[0].clone(), xs[1].clone(), xs[2].clone()))
    }
}

fn triple_of(arg: &TripleArg) -> Result<Triple<FieldElement>, CliError> {
    match (&arg.triple, arg.seed) {
        (Some(s), _) => serde_json::from_str::<TripleDoc>(s)
            .map_err(|e| CliError::Usage(format!("triple JSON: {e}")))?
            .to_exact(),
        (None, Some(seed)) => Ok(seed_triple(seed.tag())),
        (None, None) => Err(CliError::Usage("give --triple or --seed".into())),
    }
}

fn parse_mu(s: &str) -> Result<f64, CliError> {
    parse_rational(s).map(|r| rat_to_f64(&r)).or_else(|_| s.parse::<f64>().map_err(|_| CliError::Usage(format!("bad mu {s:?}"))))
}

/// μ used with a triple: explicit, else the stored value of its orbit, else
/// the representative of its μ class.
fn mu_for(t: &Triple<FieldElement>, mu: &Option<String>, cfg: &RunConfig) -> Result<f64, CliError> {
    if let Some(m) = mu {
        return parse_mu(m);
    }
    if let Ok(c) = classify_triple(t, cfg.budget) {
        if let Some(m) = c.tag.solution_mu() {
            return Ok(rat_to_f64(&m));
        }
    }
    let m = mu_from_exact_triple(t)?;
    m.representative_mu.ok_or_else(|| CliError::Usage("μ is not real for this triple; pass --mu".into()))
}

/// A versioned output document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Document {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub status: String,
    pub result: Value,
}

impl Document {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(s)?;
        let found = v.get("schema").and_then(|x| x.as_str()).unwrap_or("").to_string();
        if found != SCHEMA {
            return Err(CliError::SchemaMismatch { expected: SCHEMA.into(), found });
        }
        Ok(serde_json::from_value(v)?)
    }
}

pub struct Outcome {
    pub status: &'static str,
    pub exit: i32,
    pub result: Value,
}

fn ok(result: Value) -> Outcome {
    Outcome { status: "ok", exit: 0, result }
}

fn orbit_json(o: &crate::triples::Orbit) -> Value {
    let classes: Vec<Value> = o
        .classes
        .iter()
        .zip(&o.words)
        .map(|(c, w)| {
            json!({
                "triple": TripleDoc::from_exact(&c.representative),
                "word": w.to_string(),
            })
        })
        .collect();
    json!({ "group": format!("{:?}", o.group), "size": o.len(), "classes": classes })
}

fn run_command(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Orbit { t, group } => {
            let t = triple_of(t)?;
            let g = match group {
                GroupArg::Full => GroupKind::FullB3,
                GroupArg::Pure => GroupKind::PureP3,
            };
            let o = orbit_enumerate(&t, g, cfg.budget)?;
            Ok(ok(orbit_json(&o)))
        }
        Command::Classify { t } => {
            let t = triple_of(t)?;
            let c = classify_triple(&t, cfg.budget)?;
            let mu = mu_from_exact_triple(&t).ok();
            Ok(ok(json!({
                "triple": TripleDoc::from_exact(&t),
                "orbit": c.tag.name(),
                "size": c.orbit.as_ref().map(|o| o.len()),
                "pure_braid_split": c.orbit.as_ref().map(pure_braid_split),
                "explored_before_budget": c.partial,
                "sin_sq_pi_mu": mu.as_ref().map(|m| m.sin_sq_pi_mu.to_f64()),
                "mu_representative": mu.as_ref().and_then(|m| m.representative_rational.as_ref().map(|r| r.to_string())),
            })))
        }
        Command::Trigsearch { max_den, degree_cap } => {
            let found = trig_quadruple_search(*max_den, *degree_cap)?;
            let mut rows = Vec::new();
            let (mut literal, mut up_to_negation) = (Vec::new(), Vec::new());
            for q in &found {
                let m = match_quadruple_family(q)?;
                rows.push(json!({ "phi": q.to_string(), "family": m.family.tag(), "negated": m.negated }));
                if m.negated || m.family.is_sporadic() {
                    literal.push(q.to_string());
                }
                if m.family.is_sporadic() && !m.negated {
                    up_to_negation.push(q.to_string());
                }
            }
            Ok(ok(json!({
                "count": found.len(),
                "outside_families": literal,
                "outside_families_up_to_negation": up_to_negation,
                "quadruples": rows,
            })))
        }
        Command::Group { t } => {
            let t = triple_of(t)?;
            let rs = reflections(&t);
            let g = gram(&t);
            let order = group_closure(&rs, cfg.closure_cap)?;
            Ok(ok(json!({
                "triple": TripleDoc::from_exact(&t),
                "order": order,
                "coxeter": coxeter_type(order),
                "pair_orders": coxeter_relations(&rs),
                "gram_positive_definite": is_positive_definite(&g),
                "gram_det": g.det,
            })))
        }
        Command::Mats { t, mu } => {
            let t = triple_of(t)?;
            let mu = mu_for(&t, mu, cfg)?;
            let c = canonical_matrices(&t, true)?;
            let cm = [0, 1, 2].map(|i| exact_to_complex(&c.m[i]));
            let inf = m_infinity_check(&cm, mu);
            let traces = trace_identities_hold(&c.triple)?;
            let status_ok = traces && inf.ok;
            Ok(Outcome {
                status: if status_ok { "ok" } else { "check-failed" },
                exit: if status_ok { 0 } else { 1 },
                result: json!({
                    "triple": TripleDoc::from_exact(&t),
                    "shift": c.shift,
                    "matrices": c.m,
                    "trace_identities": traces,
                    "mu": mu,
                    "m_infinity": inf,
                }),
            })
        }
        Command::Connect { t, mu, printed } => {
            let t = triple_of(t)?;
            let mu = mu_for(&t, mu, cfg)?;
            let tf = t.to_float();
            let data = connect_all(&tf, mu)?;
            let back = triple_from_asymptotics(data[0].a, data[0].sigma, mu)?;
            let same = back.representative.same_class_approx(&tf, 1e-8);
            let mut result = json!({
                "triple": TripleDoc::from_exact(&t),
                "mu": mu,
                "data": data,
                "round_trip": back.representative.x,
                "round_trip_ok": same,
            });
            if *printed {
                let p: Vec<AsymptoticDatum> = [CriticalPoint::Zero, CriticalPoint::One, CriticalPoint::Infinity]
                    .iter()
                    .map(|&pt| crate::connection::coefficient_at_with(pt, &tf, mu, Convention::Printed))
                    .collect::<Result<_, _>>()?;
                result["printed_normalisation"] = serde_json::to_value(p)?;
            }
            Ok(Outcome { status: if same { "ok" } else { "check-failed" }, exit: if same { 0 } else { 1 }, result })
        }
        Command::Verify { solution: which, samples } => {
            let ids: Vec<SolutionId> = if which == "all" {
                SolutionId::ALL.to_vec()
            } else {
                vec![which.parse().map_err(|e: crate::solutions::SolutionError| CliError::Usage(e.to_string()))?]
            };
            if *samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
            let reports: Vec<_> = ids
                .iter()
                .map(|&id| {
                    let sol = solution(id);
                    verify_seeded(&sol, *samples, &sol.mu, cfg.seed)
                })
                .collect();
            let all = reports.iter().all(|r| r.passed);
            Ok(Outcome {
                status: if all { "PASS" } else { "ERRATUM" },
                exit: if all { 0 } else { 1 },
                result: json!({ "reports": reports }),
            })
        }
        Command::Integrate { mu, sigma0, a0, from, to, arc, out } => {
            let opts = IntegrateOptions { tol: cfg.tol, ..IntegrateOptions::default() };
            if let Some(k) = arc {
                let arcs = real_arcs();
                let a = arcs.get(*k).ok_or_else(|| CliError::Usage(format!("arc index {k} out of range 0..{}", arcs.len())))?;
                let r = continuation_check(a, *from, *to, &opts)?;
                return Ok(ok(serde_json::to_value(r)?));
            }
            let (Some(mu), Some(sigma0), Some(a0)) = (mu, sigma0, a0) else {
                return Err(CliError::Usage("integrate needs --mu, --sigma0 and --a0 (or --arc)".into()));
            };
            let mu = parse_mu(mu)?;
            let parts: Vec<f64> = a0
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad --a0 {a0:?}")))?;
            let a = match parts.as_slice() {
                [re] => Complex64::new(*re, 0.0),
                [re, im] => Complex64::new(*re, *im),
                _ => return Err(CliError::Usage("--a0 takes re or re,im".into())),
            };
            let seed = AsymptoticDatum { point: CriticalPoint::Zero, sigma: *sigma0, l: 1.0 - sigma0, a };
            let traj = integrate(&seed, mu, *from, *to, &opts)?;
            if let Some(path) = out {
                traj.write_csv(std::fs::File::create(path)?)?;
            }
            let end = traj.last();
            let fit = if (1.0 - to).abs() <= 1e-2 { fit_asymptotics(&traj, CriticalPoint::One).ok() } else { None };
            let mut result = json!({
                "seed": seed,
                "samples": traj.samples.len(),
                "accepted": traj.accepted,
                "rejected": traj.rejected,
                "pole_events": traj.pole_events,
                "detours": traj.detours,
                "end": end,
                "fit_at_1": fit,
                "out": out.as_ref().map(|p| p.display().to_string()),
            });
            if cfg.dump_plot_data && out.is_none() {
                result["table"] = serde_json::to_value(&traj.samples)?;
            }
            Ok(ok(result))
        }
        Command::Report { all: _ } => {
            let mut rows = Vec::new();
            for (tag, o) in stored_orbits() {
                let seed = seed_triple(*tag);
                let mu = mu_from_exact_triple(&seed)?;
                let order = group_closure(&reflections(&seed), cfg.closure_cap)?;
                rows.push(json!({
                    "orbit": tag.name(),
                    "size": o.len(),
                    "pure_braid_split": pure_braid_split(o),
                    "mu": tag.solution_mu().map(|m| m.to_string()),
                    "mu_class_representative": mu.representative_rational.map(|r| r.to_string()),
                    "group_order": order,
                    "coxeter": coxeter_type(order),
                    "seed": TripleDoc::from_exact(&seed),
                }));
            }
            Ok(ok(json!({ "orbits": rows })))
        }
        Command::H3pp { branch } => {
            let ks: Vec<usize> = match branch {
                Some(k) => vec![*k],
                None => (1..=18).collect(),
            };
            let rows: Vec<_> = ks.iter().map(|&k| h3pp_branch(k)).collect::<Result<_, _>>()?;
            let mut result = json!({ "branches": rows });
            if branch.is_none() {
                result["predictions"] = serde_json::to_value(h3pp_predictions(Convention::Corrected))?;
            }
            Ok(ok(result))
        }
    }
}

/// Runs the tool on `args` (including the program name), writing the JSON
/// document to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    if let Err(e) = cli.config.validate() {
        let _ = writeln!(err, "{e}");
        return 2;
    }
    match run_command(&cli.command, &cli.config) {
        Ok(o) => {
            let doc = Document {
                schema: SCHEMA.into(),
                version: VERSION.into(),
                command: cli.command.name().into(),
                config: cli.config.clone(),
                status: o.status.into(),
                result: o.result,
            };
            match serde_json::to_string_pretty(&doc) {
                Ok(s) => {
                    let _ = writeln!(out, "{s}");
                    o.exit
                }
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    1
                }
            }
        }
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "usage: {m}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
