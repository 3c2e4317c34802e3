//! Batch pipeline behind the command-line tool: problem files in, JSON out.
//!
//! Every command returns an [`Outcome`] holding the exit code, the JSON
//! document and a plain-text rendering for `--pretty`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{self, BoundCertificate, BoundOptions, Theorem};
use crate::ideals::{self, Budget, Tristate};
use crate::lattice::IVec;
use crate::poly::{self, parse_rational, PolyError, SparsePoly};
use crate::polytope::{LatticePolytope, PolytopeError};
use crate::solver::{self, MembershipSolution, SolveOutcome, SolverError};
use crate::toric::{self, Fan};

pub const SCHEMA: &str = "v1";

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    False = 1,
    Unknown = 2,
    InputError = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{what}: {source}")]
    Poly { what: String, source: PolyError },
    #[error("polytope: {0}")]
    Polytope(#[from] PolytopeError),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Bound(#[from] bounds::BoundError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Ideal(#[from] ideals::IdealError),
    #[error(transparent)]
    Toric(#[from] toric::ToricError),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    #[serde(default)]
    pub theorem: Vec<String>,
    pub e: Option<String>,
    pub r: Option<String>,
    pub c: Option<i64>,
    pub nu: Option<u32>,
    pub budget: Option<usize>,
    pub force: Option<bool>,
    pub sharpen: Option<bool>,
    pub permutation: Option<Vec<usize>>,
}

/// The JSON problem file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub vars: Vec<String>,
    #[serde(rename = "F")]
    pub f: Vec<String>,
    #[serde(rename = "Phi", default = "one")]
    pub phi: String,
    /// Vertices (or any generating points) of P.
    #[serde(rename = "P")]
    pub p: Option<Vec<IVec>>,
    /// `supp F_j ⊆ d_j P`.
    pub d: Option<Vec<i64>>,
    #[serde(default)]
    pub options: FileOptions,
}

fn one() -> String {
    "1".into()
}

/// A parsed and validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub vars: Vec<String>,
    pub fs: Vec<SparsePoly>,
    pub phi: SparsePoly,
    pub p: LatticePolytope,
    pub p_given: bool,
    pub ds: Option<Vec<i64>>,
    pub options: FileOptions,
}

impl Problem {
    pub fn from_json_str(text: &str) -> Result<Problem, CliError> {
        let file: ProblemFile = serde_json::from_str(text)?;
        Problem::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Problem, CliError> {
        let vars = file.vars;
        let unique: BTreeSet<&String> = vars.iter().collect();
        if vars.is_empty() || unique.len() != vars.len() {
            return Err(CliError::Invalid("vars must be a nonempty list of distinct names".into()));
        }
        let n = vars.len();
        if file.f.is_empty() {
            return Err(CliError::Invalid("F must contain at least one polynomial".into()));
        }
        let fs = file
            .f
            .iter()
            .enumerate()
            .map(|(j, s)| {
                poly::parse(s, &vars).map_err(|source| CliError::Poly {
                    what: format!("F[{j}]"),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let phi = poly::parse(&file.phi, &vars).map_err(|source| CliError::Poly {
            what: "Phi".into(),
            source,
        })?;
        let (p, p_given) = match &file.p {
            Some(pts) => {
                if pts.iter().any(|v| v.len() != n) {
                    return Err(CliError::Invalid(format!("P points must have {n} coordinates")));
                }
                (LatticePolytope::hull(pts)?, true)
            }
            None => (poly::newton_polytope(&fs, &poly::unit_simplex_points(n))?, false),
        };
        if !p.is_full_dimensional() {
            return Err(CliError::Invalid(format!("P has dimension {} < {n}", p.dim())));
        }
        if let Some(ds) = &file.d {
            if ds.len() != fs.len() {
                return Err(CliError::Invalid(format!("{} degrees for {} polynomials", ds.len(), fs.len())));
            }
            for (j, (f, &d)) in fs.iter().zip(ds).enumerate() {
                if d < 0 {
                    return Err(CliError::Invalid(format!("d[{j}] is negative")));
                }
                let dp = p.scale_int(d);
                if let Some((e, _)) = f.terms().find(|(e, _)| !dp.contains(&e.to_ivec())) {
                    return Err(CliError::Invalid(format!(
                        "F[{j}] has exponent {:?} outside {d}·P",
                        e.to_ivec()
                    )));
                }
            }
        } else {
            for (j, f) in fs.iter().enumerate() {
                let supp: Vec<IVec> = f.terms().map(|(e, _)| e.to_ivec()).collect();
                p.min_scaling(&supp).map_err(|e| CliError::Invalid(format!("F[{j}]: {e}")))?;
            }
        }
        Ok(Problem {
            vars,
            fs,
            phi,
            p,
            p_given,
            ds: file.d,
            options: file.options,
        })
    }

    pub fn from_path(path: &str) -> Result<Problem, CliError> {
        Problem::from_json_str(&read(path)?)
    }

    /// The `d_j`, explicit or minimal.
    pub fn degrees(&self) -> Vec<i64> {
        self.ds.clone().unwrap_or_else(|| {
            self.fs
                .iter()
                .map(|f| {
                    let supp: Vec<IVec> = f.terms().map(|(e, _)| e.to_ivec()).collect();
                    let s = self.p.min_scaling(&supp).expect("validated on load");
                    bounds::ceil_i64(&s.e_min).max(1)
                })
                .collect()
        })
    }
}

pub fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

/// Command-line flags; each overrides the matching file option.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub theorem: Vec<String>,
    pub e: Option<String>,
    pub r: Option<String>,
    pub c: Option<i64>,
    pub nu: Option<u32>,
    pub budget: Option<usize>,
    pub force: bool,
    pub sharpen: bool,
    pub seed: Option<u64>,
}

/// Flags merged with the problem file's options.
#[derive(Debug, Clone)]
pub struct Settings {
    pub theorems: Vec<Theorem>,
    pub e: Option<BigRational>,
    pub r: Option<BigRational>,
    pub c: Option<i64>,
    pub nu: Option<u32>,
    pub budget: Budget,
    pub force: bool,
    pub sharpen: bool,
    pub permutation: Option<Vec<usize>>,
    pub seed: u64,
}

impl Settings {
    pub fn resolve(flags: &Flags, file: &FileOptions) -> Result<Settings, CliError> {
        let names = if flags.theorem.is_empty() { &file.theorem } else { &flags.theorem };
        let theorems = if names.is_empty() {
            Theorem::ALL.to_vec()
        } else {
            names.iter().map(|s| s.parse()).collect::<Result<Vec<Theorem>, _>>()?
        };
        let rational = |what: &str, s: Option<&String>| -> Result<Option<BigRational>, CliError> {
            s.map(|t| parse_rational(t).map_err(|source| CliError::Poly { what: what.into(), source }))
                .transpose()
        };
        Ok(Settings {
            theorems,
            e: rational("e", flags.e.as_ref().or(file.e.as_ref()))?,
            r: rational("r", flags.r.as_ref().or(file.r.as_ref()))?,
            c: flags.c.or(file.c),
            nu: flags.nu.or(file.nu),
            budget: flags.budget.or(file.budget).map(Budget).unwrap_or_default(),
            force: flags.force || file.force.unwrap_or(false),
            sharpen: flags.sharpen || file.sharpen.unwrap_or(false),
            permutation: file.permutation.clone(),
            seed: flags.seed.unwrap_or(0x5eed),
        })
    }

    pub fn bound_options(&self, problem: &Problem) -> BoundOptions {
        BoundOptions {
            e: self.e.clone(),
            r: self.r.clone(),
            ds: problem.ds.clone(),
            permutation: self.permutation.clone(),
            budget: self.budget,
            force: self.force,
            sharpen: self.sharpen,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: ExitCode,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            self.text.clone()
        } else {
            serde_json::to_string(&self.json).expect("JSON values serialize")
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use bounds::BoundError as B;
        match self {
            CliError::Bound(B::HypothesisUnknown { .. }) | CliError::Ideal(ideals::IdealError::BudgetExceeded(_)) => {
                ExitCode::Unknown
            }
            CliError::Bound(B::HypothesisFailed { .. }) => ExitCode::False,
            _ => ExitCode::InputError,
        }
    }

    pub fn outcome(&self) -> Outcome {
        Outcome {
            code: self.exit_code(),
            json: json!({"schema": SCHEMA, "error": self.to_string()}),
            text: format!("error: {self}\n"),
        }
    }
}

fn supp(f: &SparsePoly) -> Vec<IVec> {
    f.terms().map(|(e, _)| e.to_ivec()).collect()
}

pub fn analyze(problem: &Problem, settings: &Settings) -> Result<Outcome, CliError> {
    let p = &problem.p;
    let n = p.nvars();
    let newton = match poly::newton_polytope(&problem.fs, &[]) {
        Ok(np) => {
            let diagnostic = (np.dim() < n).then(|| {
                format!("degenerate: the Newton polytope of F has dimension {} in {n}-space", np.dim())
            });
            json!({"vertices": np.vertices(), "dim": np.dim(), "vol": np.normalized_volume(), "diagnostic": diagnostic})
        }
        Err(PolytopeError::Empty) => json!({"vertices": [], "dim": null, "diagnostic": "every F_j is zero"}),
        Err(e) => return Err(e.into()),
    };
    let smooth = p.is_smooth()?;
    let fan = Fan::normal(p)?;
    let large = if smooth.smooth { Some(toric::is_large(p)?) } else { None };
    let a = p.minimal_side_length()?;
    let a_inf = bounds::a_infinity(p);
    let scaling = p.min_scaling(&supp(&problem.phi))?;
    let ds = problem.degrees();
    let product = p.as_simplex_product();
    let json = json!({
        "schema": SCHEMA,
        "vars": problem.vars,
        "P": p.to_json(),
        "P_source": if problem.p_given { "given" } else { "newton_polytope_with_origin_and_units" },
        "newton_polytope": newton,
        "vol": p.normalized_volume(),
        "a": a,
        "a_inf": a_inf,
        "deg_P": p.degree(),
        "is_smooth": smooth.smooth,
        "smoothness": smooth.vertices,
        "is_large": large,
        "simplex_product": product,
        "d": ds,
        "phi_scaling": {"e_min": scaling.e_min.to_string(), "e": scaling.e.to_string()},
        "fan": {
            "rays": fan.rays(),
            "max_cones": fan.max_cones(),
            "regular": fan.is_regular(),
            "complete": fan.is_complete_seeded(settings.seed),
            "contains_first_orthant": fan.contains_first_orthant(),
        },
    });
    let mut text = String::new();
    let _ = writeln!(text, "P vertices     {:?}", p.vertices());
    let _ = writeln!(text, "Vol(P)         {}", p.normalized_volume());
    let _ = writeln!(text, "side length a  {a}");
    let _ = writeln!(text, "a_inf          {}", a_inf.map_or("-".into(), |x| x.to_string()));
    let _ = writeln!(text, "deg(P)         {}", p.degree());
    let _ = writeln!(text, "smooth         {}", smooth.smooth);
    let _ = writeln!(text, "large          {}", large.map_or("-".into(), |x| x.to_string()));
    let _ = writeln!(text, "d_j            {ds:?}");
    let _ = writeln!(text, "Phi in eP, e = {} (e_min = {})", scaling.e, scaling.e_min);
    let _ = writeln!(text, "fan rays       {:?}", fan.rays());
    if let Some(d) = json["newton_polytope"]["diagnostic"].as_str() {
        let _ = writeln!(text, "note: {d}");
    }
    Ok(Outcome {
        code: ExitCode::Ok,
        json,
        text,
    })
}

fn rejection_code(rejected: &[bounds::Rejection]) -> ExitCode {
    if rejected.iter().any(|r| r.unknown) {
        ExitCode::Unknown
    } else {
        ExitCode::False
    }
}

fn certificate_line(c: &BoundCertificate) -> String {
    let shape = match &c.shape {
        bounds::Shape::Scaled { c, .. } => format!("{c}·P"),
        bounds::Shape::Product { cs, .. } => format!("∏ c_k Σ, c = {cs:?}"),
    };
    format!(
        "{:<11} Q = {:<22} nu = {:<4} Vol(Q) = {:<8} deg(Q) = {}",
        c.theorem.as_str(),
        shape,
        c.nu,
        c.q.normalized_volume(),
        c.q.degree()
    )
}

pub fn bounds(problem: &Problem, settings: &Settings) -> Result<Outcome, CliError> {
    let opts = settings.bound_options(problem);
    let (certs, rejected) = bounds::certify_all(&settings.theorems, &problem.fs, &problem.phi, &problem.p, &opts);
    let code = if certs.is_empty() {
        rejection_code(&rejected)
    } else {
        ExitCode::Ok
    };
    let mut text = String::new();
    for c in &certs {
        let _ = writeln!(text, "{}", certificate_line(c));
        for h in &c.hypotheses {
            let _ = writeln!(text, "    {:<28} {:<9} {}", h.name, format!("{:?}", h.verdict).to_lowercase(), h.detail);
        }
    }
    for r in &rejected {
        let _ = writeln!(text, "{:<11} rejected: {}", r.theorem.as_str(), r.reason);
    }
    Ok(Outcome {
        code,
        json: json!({
            "schema": SCHEMA,
            "certificates": certs.iter().map(BoundCertificate::to_json).collect::<Vec<_>>(),
            "rejected": rejected,
        }),
        text,
    })
}

/// Reads `Q` from a certificate or solution document.
fn polytope_from(v: &Value) -> Result<LatticePolytope, CliError> {
    let verts: Vec<IVec> = serde_json::from_value(v["Q"]["vertices"].clone())
        .map_err(|_| CliError::Invalid("expected Q.vertices".into()))?;
    Ok(LatticePolytope::hull(&verts)?)
}

fn nu_from(v: &Value) -> Result<u32, CliError> {
    v["nu"]
        .as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| CliError::Invalid("expected a positive integer nu".into()))
}

/// Picks the polytope and exponent to solve at.
fn target(problem: &Problem, settings: &Settings, certificate: Option<&Value>) -> Result<Result<(String, u32, LatticePolytope), Outcome>, CliError> {
    if let Some(doc) = certificate {
        let cert = match doc.get("certificates") {
            Some(list) => list
                .get(0)
                .ok_or_else(|| CliError::Invalid("the certificate list is empty".into()))?,
            None => doc,
        };
        let label = cert["theorem"].as_str().unwrap_or("certificate").to_string();
        return Ok(Ok((label, nu_from(cert)?, polytope_from(cert)?)));
    }
    if let Some(c) = settings.c {
        if c < 0 {
            return Err(CliError::Invalid("c must be nonnegative".into()));
        }
        return Ok(Ok((format!("explicit c = {c}"), settings.nu.unwrap_or(1), problem.p.scale_int(c))));
    }
    let opts = settings.bound_options(problem);
    let (certs, rejected) = bounds::certify_all(&settings.theorems, &problem.fs, &problem.phi, &problem.p, &opts);
    match certs.into_iter().next() {
        Some(cert) => {
            let q = match (&cert.lattice_refined, settings.sharpen) {
                (Some(r), true) => r.clone(),
                _ => cert.q.clone(),
            };
            Ok(Ok((cert.theorem.as_str().to_string(), cert.nu, q)))
        }
        None => Ok(Err(Outcome {
            code: rejection_code(&rejected),
            json: json!({"schema": SCHEMA, "error": "no certificate could be issued", "rejected": rejected}),
            text: rejected
                .iter()
                .map(|r| format!("{:<11} rejected: {}\n", r.theorem.as_str(), r.reason))
                .collect(),
        })),
    }
}

pub fn solve(problem: &Problem, settings: &Settings, certificate: Option<&Value>) -> Result<Outcome, CliError> {
    let (label, nu, q) = match target(problem, settings, certificate)? {
        Ok(t) => t,
        Err(out) => return Ok(out),
    };
    match solver::solve_membership(&problem.fs, &problem.phi, nu, &q)? {
        SolveOutcome::Feasible(sol) => {
            let report = solver::verify(&sol, &problem.fs, &problem.phi);
            let mut json = sol.to_json(&problem.vars);
            json["schema"] = json!(SCHEMA);
            json["source"] = json!(label);
            json["verified"] = json!(report.ok);
            let mut text = format!("feasible at {label}: nu = {nu}, Vol(Q) = {}\n", q.normalized_volume());
            for (j, g) in sol.gs.iter().enumerate() {
                let _ = writeln!(text, "G_{} = {}", j + 1, g.format_with(&problem.vars));
            }
            let _ = writeln!(text, "verified {}", report.ok);
            Ok(Outcome {
                code: if report.ok { ExitCode::Ok } else { ExitCode::False },
                json,
                text,
            })
        }
        SolveOutcome::Infeasible(stats) => Ok(Outcome {
            code: ExitCode::False,
            json: json!({"schema": SCHEMA, "source": label, "feasible": false, "nu": nu, "Q": q.to_json(), "stats": stats}),
            text: format!(
                "infeasible at {label}: {} unknowns, {} equations, rank {}\n",
                stats.unknowns, stats.equations, stats.rank
            ),
        }),
    }
}

pub fn verify(problem: &Problem, solution: &Value) -> Result<Outcome, CliError> {
    let gs: Vec<String> = serde_json::from_value(solution["G"].clone())
        .map_err(|_| CliError::Invalid("expected G as a list of polynomial strings".into()))?;
    let gs = gs
        .iter()
        .enumerate()
        .map(|(j, s)| {
            poly::parse(s, &problem.vars).map_err(|source| CliError::Poly {
                what: format!("G[{j}]"),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sol = MembershipSolution {
        gs,
        nu: nu_from(solution)?,
        q: polytope_from(solution)?,
        stats: solver::SolveStats {
            unknowns: 0,
            equations: 0,
            rank: 0,
        },
    };
    let report = solver::verify(&sol, &problem.fs, &problem.phi);
    let mut text = format!("verified {}\n", report.ok);
    for (x, c) in &report.residual {
        let _ = writeln!(text, "  residual {c} at {x:?}");
    }
    for v in &report.support_violations {
        let _ = writeln!(text, "  F_{} G_{} has exponent {:?} outside Q", v.poly + 1, v.poly + 1, v.exponent);
    }
    if let Some(e) = &report.shape_error {
        let _ = writeln!(text, "  {e}");
    }
    let mut json = serde_json::to_value(&report)?;
    json["schema"] = json!(SCHEMA);
    Ok(Outcome {
        code: if report.ok { ExitCode::Ok } else { ExitCode::False },
        json,
        text,
    })
}

pub fn check_infinity(problem: &Problem, settings: &Settings) -> Result<Outcome, CliError> {
    let ds = problem.degrees();
    let offsets = ideals::scaled_offsets(&problem.p, &ds);
    let rep = ideals::no_common_zeros_at_infinity(&problem.fs, &problem.p, &offsets, settings.budget)?;
    let code = match rep.verdict {
        Tristate::True => ExitCode::Ok,
        Tristate::False => ExitCode::False,
        Tristate::Unknown => ExitCode::Unknown,
    };
    let mut text = format!("no common zeros at infinity: {:?}\n", rep.verdict);
    for f in &rep.faces {
        let _ = writeln!(
            text,
            "  dim {} facets {:<10} {:<8} {:?}  [{}]",
            f.dim,
            format!("{:?}", f.facets),
            format!("{:?}", f.verdict),
            f.vertices,
            f.system_text.join(", ")
        );
    }
    let mut json = serde_json::to_value(&rep)?;
    json["schema"] = json!(SCHEMA);
    json["d"] = json!(ds);
    Ok(Outcome { code, json, text })
}

/// The smallest admissible rational scaling of `supp Φ`, or zero for `Φ = 0`.
pub fn phi_scaling(problem: &Problem) -> Result<BigRational, CliError> {
    if problem.phi.is_zero() {
        return Ok(BigRational::zero());
    }
    Ok(problem.p.min_scaling(&supp(&problem.phi))?.e)
}
