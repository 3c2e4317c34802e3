//! Support bounds for `Σ F_j G_j = Φ^ν` and the certificates that carry them.
//!
//! Each bound is a pure formula in a handful of polytope invariants (see
//! [`formula`]); a [`BoundCertificate`] pairs the resulting polytope `Q`
//! with the outcome of every hypothesis check that licenses it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ideals::{self, Budget, IdealError, Tristate};
use crate::lattice::IVec;
use crate::poly::{Exponent, SparsePoly};
use crate::polytope::{LatticePolytope, PolytopeError, SimplexProduct};
use crate::toric::{self, ArkeMode, ToricError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Zero-free systems on a scaled polytope.
    Mac,
    /// Zero-free systems on a product of simplices, per-factor degrees.
    Macproduct,
    /// Membership with no component at infinity: `Q = eP`.
    Noether,
    /// Membership in a complete intersection.
    Ag,
    /// Integral closure, `ν = min(m, n)`.
    Hickel,
    /// Radical membership, `ν = min(m, n)·Vol(P)`.
    Kollar,
    Agprod,
    Hickelprod,
    Kollarprod,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::Mac,
        Theorem::Macproduct,
        Theorem::Noether,
        Theorem::Ag,
        Theorem::Hickel,
        Theorem::Kollar,
        Theorem::Agprod,
        Theorem::Hickelprod,
        Theorem::Kollarprod,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::Mac => "mac",
            Theorem::Macproduct => "macproduct",
            Theorem::Noether => "noether",
            Theorem::Ag => "ag",
            Theorem::Hickel => "hickel",
            Theorem::Kollar => "kollar",
            Theorem::Agprod => "agprod",
            Theorem::Hickelprod => "hickelprod",
            Theorem::Kollarprod => "kollarprod",
        }
    }

    fn is_product(self) -> bool {
        matches!(self, Theorem::Macproduct | Theorem::Agprod | Theorem::Hickelprod | Theorem::Kollarprod)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = BoundError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| BoundError::UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Asserted,
    Unknown,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("unknown theorem '{0}'")]
    UnknownTheorem(String),
    #[error("{theorem}: {reason}")]
    NotApplicable { theorem: Theorem, reason: String },
    #[error("{theorem}: hypothesis {name} failed ({detail})")]
    HypothesisFailed {
        theorem: Theorem,
        name: &'static str,
        detail: String,
    },
    #[error("{theorem}: hypothesis {name} could not be decided ({detail})")]
    HypothesisUnknown {
        theorem: Theorem,
        name: &'static str,
        detail: String,
    },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

impl BoundError {
    /// True when a `--force` run would have emitted the certificate anyway.
    pub fn is_unknown(&self) -> bool {
        matches!(self, BoundError::HypothesisUnknown { .. })
    }
}

/// The certified support polytope and how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Scaled { c_exact: BigRational, c: i64 },
    Product { blocks: Vec<Vec<usize>>, cs: Vec<i64> },
}

/// Alternative bound with `a` replaced by `a_∞` and `Vol(P)` by `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sharpened {
    pub a_inf: i64,
    pub r: BigRational,
    pub nu: u32,
    pub shape: Shape,
    pub q: LatticePolytope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub q: LatticePolytope,
    pub shape: Shape,
    pub nu: u32,
    pub mu: usize,
    /// Scaling of `supp Φ`; per factor for product theorems.
    pub e: Vec<BigRational>,
    pub a: i64,
    pub vol: u64,
    pub r_used: BigRational,
    pub hypotheses: Vec<Hypothesis>,
    pub sharpened: Option<Sharpened>,
    /// Smallest lattice polytope around the unrounded dilate, when sharpening.
    pub lattice_refined: Option<LatticePolytope>,
}

impl BoundCertificate {
    pub fn all_verified(&self) -> bool {
        self.hypotheses.iter().all(|h| h.verdict == Verdict::Verified)
    }

    /// Scale factor for scaled certificates.
    pub fn c(&self) -> Option<i64> {
        match self.shape {
            Shape::Scaled { c, .. } => Some(c),
            Shape::Product { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "theorem": self.theorem,
            "shape": shape_json(&self.shape),
            "Q": self.q.to_json(),
            "vol_Q": self.q.normalized_volume(),
            "deg_Q": self.q.degree(),
            "nu": self.nu,
            "mu": self.mu,
            "e": self.e.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "a": self.a,
            "vol": self.vol,
            "r_used": self.r_used.to_string(),
            "hypotheses": self.hypotheses,
            "sharpened": self.sharpened.as_ref().map(|s| serde_json::json!({
                "a_inf": s.a_inf,
                "r": s.r.to_string(),
                "nu": s.nu,
                "shape": shape_json(&s.shape),
                "Q": s.q.to_json(),
            })),
            "lattice_refined": self.lattice_refined.as_ref().map(LatticePolytope::to_json),
        })
    }
}

fn shape_json(s: &Shape) -> serde_json::Value {
    match s {
        Shape::Scaled { c_exact, c } => serde_json::json!({"kind": "scaled", "c": c, "c_exact": c_exact.to_string()}),
        Shape::Product { blocks, cs } => serde_json::json!({"kind": "product", "blocks": blocks, "c": cs}),
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundOptions {
    /// Scaling of `supp Φ`; defaults to the smallest admissible value.
    pub e: Option<BigRational>,
    /// Order of vanishing at infinity; defaults to `Vol(P)`.
    pub r: Option<BigRational>,
    /// `supp F_j ⊆ d_j P`; defaults to the smallest natural numbers that work.
    pub ds: Option<Vec<i64>>,
    /// Block order for the product Macaulay bound; all orders are tried otherwise.
    pub permutation: Option<Vec<usize>>,
    pub budget: Budget,
    /// Emit certificates whose hypotheses could not be decided.
    pub force: bool,
    /// Also compute the lattice-refined polytope.
    pub sharpen: bool,
}

/// Closed-form bound formulas.
pub mod formula {
    use super::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    pub fn mu(m: usize, n: usize) -> usize {
        m.min(n)
    }

    /// `max(d₁ + ⋯ + d_{n+1}, e)` with the `d_j` sorted decreasingly.
    pub fn macaulay(ds: &[i64], n: usize, e: &BigRational) -> BigRational {
        let mut sorted = ds.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let s: i64 = sorted.iter().take(n + 1).sum();
        q(s).max(e.clone())
    }

    /// Per-block degrees for one block order: `dmat[j][k]` is the degree of
    /// `F_j` in block `k`, `ns[k]` the block size.
    pub fn macproduct(ns: &[usize], dmat: &[Vec<i64>], order: &[usize]) -> Vec<i64> {
        let mut cs = vec![0; ns.len()];
        for (l, &k) in order.iter().enumerate() {
            let tail: usize = order[l..].iter().map(|&i| ns[i]).sum();
            let mut col: Vec<i64> = dmat.iter().map(|row| row[k]).collect();
            col.sort_unstable_by(|a, b| b.cmp(a));
            cs[k] = col.iter().take(tail + 1).sum::<i64>() - ns[k] as i64;
        }
        cs
    }

    /// `e + m·vol/a`.
    pub fn ag(m: usize, e: &BigRational, vol: &BigRational, a: i64) -> BigRational {
        e + q(m as i64) * vol / q(a)
    }

    /// `max(μ(e + vol/a), min(m, n+1))`.
    pub fn hickel(m: usize, n: usize, e: &BigRational, vol: &BigRational, a: i64) -> BigRational {
        let main = q(mu(m, n) as i64) * (e + vol / q(a));
        main.max(q(m.min(n + 1) as i64))
    }

    /// `max(μ(1/a + e)·vol, min(m, n+1))`.
    pub fn kollar(m: usize, n: usize, e: &BigRational, vol: &BigRational, a: i64) -> BigRational {
        let main = q(mu(m, n) as i64) * (BigRational::one() / q(a) + e) * vol;
        main.max(q(m.min(n + 1) as i64))
    }

    /// `e_k + m·vol` per block.
    pub fn agprod(m: usize, es: &[i64], vol: &BigRational) -> Vec<BigRational> {
        es.iter().map(|&e| q(e) + q(m as i64) * vol).collect()
    }

    /// `max(μ(e_k + vol), min(m, n+1)·d_k − n_k)` per block.
    pub fn hickelprod(m: usize, ns: &[usize], ds: &[i64], es: &[i64], vol: &BigRational) -> Vec<BigRational> {
        let n: usize = ns.iter().sum();
        (0..ns.len())
            .map(|k| {
                let main = q(mu(m, n) as i64) * (q(es[k]) + vol);
                main.max(q(m.min(n + 1) as i64 * ds[k] - ns[k] as i64))
            })
            .collect()
    }

    /// `max(μ(1 + e_k)·vol, min(m, n+1)·d_k − n_k)` per block.
    pub fn kollarprod(m: usize, ns: &[usize], ds: &[i64], es: &[i64], vol: &BigRational) -> Vec<BigRational> {
        let n: usize = ns.iter().sum();
        (0..ns.len())
            .map(|k| {
                let main = q(mu(m, n) as i64) * (q(1 + es[k])) * vol;
                main.max(q(m.min(n + 1) as i64 * ds[k] - ns[k] as i64))
            })
            .collect()
    }

    /// `n!/(n₁!⋯n_r!)·∏ d_k^{n_k}`.
    pub fn product_volume(ns: &[usize], ds: &[i64]) -> u64 {
        fn fact(k: usize) -> u64 {
            (1..=k as u64).product()
        }
        let n: usize = ns.iter().sum();
        let multinomial = fact(n) / ns.iter().map(|&k| fact(k)).product::<u64>();
        ns.iter()
            .zip(ds)
            .fold(multinomial, |acc, (&k, &d)| acc * (d as u64).pow(k as u32))
    }
}

pub(crate) fn ceil_i64(x: &BigRational) -> i64 {
    x.ceil().to_integer().to_i64().expect("scale factor fits in i64")
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `∏ c_k Σ` over the given blocks of variables.
pub fn block_product(nvars: usize, blocks: &[Vec<usize>], cs: &[i64]) -> LatticePolytope {
    let mut pts: Vec<IVec> = vec![vec![0; nvars]];
    for (block, &c) in blocks.iter().zip(cs) {
        let mut next = Vec::new();
        for p in &pts {
            next.push(p.clone());
            if c > 0 {
                for &i in block {
                    let mut q = p.clone();
                    q[i] = c;
                    next.push(q);
                }
            }
        }
        pts = next;
    }
    LatticePolytope::hull(&pts).expect("nonempty product")
}

/// Degree of a polynomial in each block of variables.
fn block_degrees(f: &SparsePoly, blocks: &[Vec<usize>]) -> Vec<i64> {
    blocks
        .iter()
        .map(|b| {
            f.terms()
                .map(|(e, _)| b.iter().map(|&i| e.0[i] as i64).sum::<i64>())
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Smallest facet offset among the facets at infinity.
pub fn a_infinity(p: &LatticePolytope) -> Option<i64> {
    p.facets()
        .iter()
        .filter(|f| !(f.a == 0 && f.rho.iter().filter(|&&x| x != 0).count() == 1))
        .map(|f| f.a)
        .min()
}

/// Bound on `deg(F_j G_j)` implied by `supp(F_j G_j) ⊆ Q`.
pub fn degree_translation(q: &LatticePolytope) -> i64 {
    q.degree()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenseVerdict {
    SparseBetter,
    DenseBetter,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenseComparison {
    pub verdict: DenseVerdict,
    pub vol: u64,
    /// `(1+deg Φ)·a·d^{μ−1}/(μ(1+ae)) − a/(μ(1+ae))`.
    pub threshold: String,
    /// `a·d^{μ−1}/μ`.
    pub simple_threshold: String,
    pub simple_condition_holds: bool,
    /// `⌈μ(1/a+e)Vol(P)⌉·deg(P)`.
    pub sparse_degree: i64,
    /// `(1 + deg Φ)·d^μ`.
    pub dense_degree: i64,
}

/// Compares the sparse radical-membership degree bound with the dense one
/// for systems of degree at most `d = deg(P)`.
pub fn compare_with_dense(p: &LatticePolytope, m: usize, deg_phi: u64, e: &BigRational) -> Result<DenseComparison, BoundError> {
    let n = p.nvars();
    let mu = formula::mu(m, n) as u32;
    let d = p.degree();
    let a = p.minimal_side_length()?;
    let vol = p.normalized_volume();
    let ra = rat(a);
    let one = BigRational::one();
    let denom = rat(mu as i64) * (&one + &ra * e);
    let dpow = rat(d.pow(mu.saturating_sub(1)));
    let threshold = (rat(1 + deg_phi as i64) * &ra * &dpow - &ra) / &denom;
    let simple = &ra * &dpow / rat(mu as i64);
    let volr = rat(vol as i64);
    let verdict = if !threshold.is_positive() {
        DenseVerdict::Incomparable
    } else if volr <= threshold {
        DenseVerdict::SparseBetter
    } else {
        DenseVerdict::DenseBetter
    };
    let sparse_c = ceil_i64(&(rat(mu as i64) * (&one / &ra + e) * &volr));
    Ok(DenseComparison {
        verdict,
        vol,
        threshold: threshold.to_string(),
        simple_threshold: simple.to_string(),
        simple_condition_holds: volr <= simple,
        sparse_degree: sparse_c * d,
        dense_degree: (1 + deg_phi as i64) * d.pow(mu),
    })
}

struct Checks {
    theorem: Theorem,
    list: Vec<Hypothesis>,
}

impl Checks {
    fn new(theorem: Theorem) -> Self {
        Checks { theorem, list: Vec::new() }
    }

    fn push(&mut self, name: &'static str, verdict: Verdict, detail: impl Into<String>) {
        self.list.push(Hypothesis {
            name,
            verdict,
            detail: detail.into(),
        });
    }

    fn boolean(&mut self, name: &'static str, ok: bool, yes: &str, no: &str) {
        if ok {
            self.push(name, Verdict::Verified, yes);
        } else {
            self.push(name, Verdict::Failed, no);
        }
    }

    /// Records a computed check; budget exhaustion becomes `unknown`.
    fn computed(&mut self, name: &'static str, r: Result<bool, IdealError>, yes: &str, no: &str) -> Result<(), BoundError> {
        match r {
            Ok(b) => self.boolean(name, b, yes, no),
            Err(IdealError::BudgetExceeded(k)) => {
                self.push(name, Verdict::Unknown, format!("Gröbner budget of {k} exceeded"))
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    fn tristate(&mut self, name: &'static str, t: Tristate, yes: &str, no: &str) {
        match t {
            Tristate::True => self.push(name, Verdict::Verified, yes),
            Tristate::False => self.push(name, Verdict::Failed, no),
            Tristate::Unknown => self.push(name, Verdict::Unknown, "undecided within budget"),
        }
    }

    /// Refuses the certificate on any failure, and on unknowns unless forced.
    fn finish(self, force: bool) -> Result<Vec<Hypothesis>, BoundError> {
        if let Some(h) = self.list.iter().find(|h| h.verdict == Verdict::Failed) {
            return Err(BoundError::HypothesisFailed {
                theorem: self.theorem,
                name: h.name,
                detail: h.detail.clone(),
            });
        }
        if !force {
            if let Some(h) = self.list.iter().find(|h| h.verdict == Verdict::Unknown) {
                return Err(BoundError::HypothesisUnknown {
                    theorem: self.theorem,
                    name: h.name,
                    detail: h.detail.clone(),
                });
            }
        }
        Ok(self.list)
    }
}

fn ivec_support(f: &SparsePoly) -> Vec<IVec> {
    f.terms().map(|(e, _)| e.to_ivec()).collect()
}

/// Common data extracted from the inputs.
struct Setup<'a> {
    theorem: Theorem,
    fs: &'a [SparsePoly],
    phi: &'a SparsePoly,
    p: &'a LatticePolytope,
    n: usize,
    m: usize,
    a: i64,
    vol: u64,
}

impl<'a> Setup<'a> {
    fn new(theorem: Theorem, fs: &'a [SparsePoly], phi: &'a SparsePoly, p: &'a LatticePolytope) -> Result<Self, BoundError> {
        let not = |reason: String| BoundError::NotApplicable { theorem, reason };
        if fs.is_empty() {
            return Err(not("no generators".into()));
        }
        let n = p.nvars();
        if let Some(f) = fs.iter().chain(std::iter::once(phi)).find(|f| f.nvars() != n) {
            return Err(not(format!("polynomial in {} variables, polytope in {n}", f.nvars())));
        }
        if !p.is_full_dimensional() {
            return Err(not(format!("P has dimension {} < {n}", p.dim())));
        }
        if !p.contains(&vec![0; n]) {
            return Err(not("P does not contain the origin".into()));
        }
        Ok(Setup {
            theorem,
            fs,
            phi,
            p,
            n,
            m: fs.len(),
            a: p.minimal_side_length()?,
            vol: p.normalized_volume(),
        })
    }

    fn not(&self, reason: impl Into<String>) -> BoundError {
        BoundError::NotApplicable {
            theorem: self.theorem,
            reason: reason.into(),
        }
    }

    fn mu(&self) -> usize {
        formula::mu(self.m, self.n)
    }

    /// Checks `supp F_j ⊆ P` together with `0, e_i ∈ P`.
    fn containment(&self, checks: &mut Checks) {
        let bad = self
            .fs
            .iter()
            .enumerate()
            .find_map(|(j, f)| ivec_support(f).into_iter().find(|x| !self.p.contains(x)).map(|x| (j, x)));
        match bad {
            None => checks.push("supports_in_polytope", Verdict::Verified, "every supp F_j lies in P"),
            Some((j, x)) => checks.push("supports_in_polytope", Verdict::Failed, format!("F_{} has exponent {x:?} outside P", j + 1)),
        }
        let units_ok = (0..self.n).all(|i| self.p.contains(&Exponent::unit(self.n, i).to_ivec()));
        checks.boolean("contains_origin_and_units", units_ok, "0 and e_1..e_n lie in P", "some e_i is not in P");
    }

    fn smooth(&self, checks: &mut Checks) -> Result<bool, BoundError> {
        let rep = self.p.is_smooth()?;
        let bad = rep.vertices.iter().find(|v| v.det != Some(1)).map(|v| v.vertex.clone());
        checks.boolean(
            "smooth",
            rep.smooth,
            "tight facet normals form a lattice basis at every vertex",
            &format!("not smooth at vertex {:?}", bad.unwrap_or_default()),
        );
        Ok(rep.smooth)
    }

    /// `e` with `supp Φ ⊆ eP` and `eP` a lattice polytope.
    fn scaling(&self, opts: &BoundOptions, checks: &mut Checks) -> Result<BigRational, BoundError> {
        let supp = ivec_support(self.phi);
        let e = match &opts.e {
            Some(e) => e.clone(),
            None => self.p.min_scaling(&supp)?.e,
        };
        if e.is_negative() {
            return Err(self.not(format!("e = {e} is negative")));
        }
        self.check_phi_in(&e, checks)?;
        Ok(e)
    }

    fn check_phi_in(&self, e: &BigRational, checks: &mut Checks) -> Result<(), BoundError> {
        let ep = match self.p.scale(e) {
            Ok(q) => q,
            Err(PolytopeError::NonLatticeVertex { .. }) => {
                checks.push("phi_support_in_eP", Verdict::Failed, format!("{e}·P is not a lattice polytope"));
                return Ok(());
            }
            Err(err) => return Err(err.into()),
        };
        match ivec_support(self.phi).into_iter().find(|x| !ep.contains(x)) {
            None => checks.push("phi_support_in_eP", Verdict::Verified, format!("supp Φ ⊆ {e}·P")),
            Some(x) => checks.push("phi_support_in_eP", Verdict::Failed, format!("exponent {x:?} of Φ is outside {e}·P")),
        }
        Ok(())
    }

    fn codimension(&self, checks: &mut Checks, budget: Budget) -> Result<(), BoundError> {
        let want = self.n as i64 - self.m as i64;
        match ideals::dimension(self.fs, self.n, budget) {
            Ok(d) => checks.boolean(
                "codimension_m",
                d >= 0 && d == want,
                &format!("zero set has dimension {d} = n − m"),
                &if d < 0 {
                    "the zero set is empty".to_string()
                } else {
                    format!("zero set has dimension {d}, expected {want}")
                },
            ),
            Err(IdealError::BudgetExceeded(k)) => {
                checks.push("codimension_m", Verdict::Unknown, format!("Gröbner budget of {k} exceeded"))
            }
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    fn membership(&self, checks: &mut Checks, budget: Budget) -> Result<bool, BoundError> {
        let r = ideals::is_member(self.phi, self.fs, budget);
        let member = matches!(r, Ok(true));
        checks.computed("phi_in_ideal", r, "normal form of Φ is zero", "Φ has a nonzero normal form")?;
        Ok(member)
    }

    /// `Φ ∈ (F)` implies integral dependence; otherwise the claim is taken on trust.
    fn integral_closure(&self, checks: &mut Checks, budget: Budget) -> Result<(), BoundError> {
        match ideals::is_member(self.phi, self.fs, budget) {
            Ok(true) => checks.push("phi_in_integral_closure", Verdict::Verified, "Φ ∈ (F) ⊆ integral closure"),
            Ok(false) | Err(IdealError::BudgetExceeded(_)) => checks.push(
                "phi_in_integral_closure",
                Verdict::Asserted,
                "integral dependence is not checked; taken as given",
            ),
            Err(e) => return Err(e.into()),
        }
        Ok(())
    }

    /// `Φ` vanishes on `V(F)` iff `1 ∈ (F, 1 − yΦ)`.
    fn radical(&self, checks: &mut Checks, budget: Budget) -> Result<(), BoundError> {
        let n = self.n;
        let map: Vec<usize> = (0..n).collect();
        let mut ext: Vec<SparsePoly> = self.fs.iter().map(|f| f.embed(n + 1, &map)).collect();
        let y = SparsePoly::var(n + 1, n);
        ext.push(&SparsePoly::one(n + 1) - &(&y * &self.phi.embed(n + 1, &map)));
        checks.computed(
            "phi_vanishes_on_zero_set",
            ideals::contains_one(&ext, budget),
            "1 ∈ (F, 1 − yΦ)",
            "Φ does not vanish on the common zero set",
        )
    }

    fn r_used(&self, opts: &BoundOptions, checks: &mut Checks) -> Result<BigRational, BoundError> {
        let vol = rat(self.vol as i64);
        match &opts.r {
            None => {
                checks.push("order_at_infinity", Verdict::Verified, "r = Vol(P)");
                Ok(vol)
            }
            Some(r) if r.is_positive() && *r <= vol => {
                checks.push("order_at_infinity", Verdict::Asserted, format!("r = {r} supplied by the caller"));
                Ok(r.clone())
            }
            Some(r) => Err(self.not(format!("r = {r} must lie in (0, Vol(P)]"))),
        }
    }

    fn default_ds(&self, opts: &BoundOptions) -> Result<Vec<i64>, BoundError> {
        if let Some(ds) = &opts.ds {
            if ds.len() != self.m {
                return Err(self.not(format!("{} degrees for {} generators", ds.len(), self.m)));
            }
            return Ok(ds.clone());
        }
        self.fs
            .iter()
            .map(|f| {
                let s = self.p.min_scaling(&ivec_support(f))?;
                Ok(ceil_i64(&s.e_min).max(1))
            })
            .collect()
    }

    fn check_ds(&self, ds: &[i64], checks: &mut Checks) {
        let bad = self.fs.iter().zip(ds).enumerate().find_map(|(j, (f, &d))| {
            let dp = self.p.scale_int(d.max(0));
            ivec_support(f).into_iter().find(|x| d < 0 || !dp.contains(x)).map(|x| (j, x, d))
        });
        match bad {
            None => checks.push("supports_in_polytope", Verdict::Verified, format!("supp F_j ⊆ d_j·P with d = {ds:?}")),
            Some((j, x, d)) => checks.push(
                "supports_in_polytope",
                Verdict::Failed,
                format!("exponent {x:?} of F_{} is outside {d}·P", j + 1),
            ),
        }
    }

    fn simplex_product(&self) -> Result<SimplexProduct, BoundError> {
        self.p
            .as_simplex_product()
            .ok_or_else(|| self.not("P is not a product of dilated simplices"))
    }
}

#[allow(clippy::too_many_arguments)]
fn scaled_certificate(
    s: &Setup,
    theorem: Theorem,
    c_exact: BigRational,
    nu: u32,
    e: BigRational,
    r_used: BigRational,
    hypotheses: Vec<Hypothesis>,
    sharpened: Option<Sharpened>,
    opts: &BoundOptions,
) -> BoundCertificate {
    let c = ceil_i64(&c_exact);
    let refined = opts
        .sharpen
        .then(|| s.p.lattice_cover(&c_exact).unwrap_or_else(|| s.p.scale_int(c)));
    BoundCertificate {
        theorem,
        q: s.p.scale_int(c),
        shape: Shape::Scaled { c_exact, c },
        nu,
        mu: s.mu(),
        e: vec![e],
        a: s.a,
        vol: s.vol,
        r_used,
        hypotheses,
        sharpened,
        lattice_refined: refined,
    }
}

fn sharpened_scaled(s: &Setup, r: &BigRational, nu: u32, c_exact: BigRational) -> Sharpened {
    let c = ceil_i64(&c_exact);
    Sharpened {
        a_inf: a_infinity(s.p).unwrap_or(s.a),
        r: r.clone(),
        nu,
        q: s.p.scale_int(c),
        shape: Shape::Scaled { c_exact, c },
    }
}

/// Zero-free systems: `Q = max(Σ_{j≤n+1} d_j, e)·P`, `ν = 1`.
pub fn bound_macaulay(fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(Theorem::Mac, fs, phi, p)?;
    let mut checks = Checks::new(Theorem::Mac);
    checks.boolean(
        "m_at_least_n_plus_1",
        s.m > s.n,
        "m ≥ n + 1",
        "with m ≤ n the sections of an ample class always share a zero",
    );
    let ds = s.default_ds(opts)?;
    s.check_ds(&ds, &mut checks);
    let e = s.scaling(opts, &mut checks)?;
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        checks.computed(
            "no_zeros_in_affine_space",
            ideals::contains_one(fs, opts.budget),
            "1 ∈ (F)",
            "the F_j have a common zero in affine space",
        )?;
        let inf = ideals::no_common_zeros_at_infinity(fs, p, &ideals::scaled_offsets(p, &ds), opts.budget)?;
        checks.tristate(
            "no_zeros_at_infinity",
            inf.verdict,
            "every face system at infinity is zero-free",
            "some face system at infinity has a common zero",
        );
    }
    let hyps = checks.finish(opts.force)?;
    let c_exact = formula::macaulay(&ds, s.n, &e);
    let r = rat(s.vol as i64);
    Ok(scaled_certificate(&s, Theorem::Mac, c_exact, 1, e, r, hyps, None, opts))
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..r {
        for rest in permutations(r - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// Block order minimising `Vol(∏ c_k Σ^{n_k})`, first in lexicographic order on ties.
pub fn best_block_order(ns: &[usize], dmat: &[Vec<i64>]) -> (Vec<usize>, Vec<i64>) {
    permutations(ns.len())
        .into_iter()
        .map(|perm| {
            let cs = formula::macproduct(ns, dmat, &perm);
            let vol = if cs.iter().any(|&c| c <= 0) {
                0
            } else {
                formula::product_volume(ns, &cs)
            };
            (vol, perm, cs)
        })
        .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
        .map(|(_, perm, cs)| (perm, cs))
        .expect("at least one order")
}

/// Zero-free systems on a product of simplices with per-factor degrees; `Φ = 1`.
pub fn bound_macproduct(fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(Theorem::Macproduct, fs, phi, p)?;
    if *phi != SparsePoly::one(s.n) {
        return Err(s.not("only Φ = 1 is covered"));
    }
    let sp = s.simplex_product()?;
    let ns = sp.dims();
    let dmat: Vec<Vec<i64>> = fs.iter().map(|f| block_degrees(f, &sp.blocks)).collect();
    let mut checks = Checks::new(Theorem::Macproduct);
    checks.boolean("m_at_least_n_plus_1", s.m > s.n, "m ≥ n + 1", "m ≤ n");
    s.containment(&mut checks);
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        checks.computed(
            "no_zeros_in_affine_space",
            ideals::contains_one(fs, opts.budget),
            "1 ∈ (F)",
            "the F_j have a common zero in affine space",
        )?;
        // offsets of ∏ d_{jk} Σ^{n_k}: the block facet of block k sits at d_{jk}
        let offsets: Vec<Vec<i64>> = dmat
            .iter()
            .map(|row| {
                p.facets()
                    .iter()
                    .map(|f| {
                        if f.a == 0 {
                            0
                        } else {
                            let k = sp.blocks.iter().position(|b| f.rho[b[0]] != 0).expect("block facet");
                            row[k]
                        }
                    })
                    .collect()
            })
            .collect();
        let inf = ideals::no_common_zeros_at_infinity(fs, p, &offsets, opts.budget)?;
        checks.tristate(
            "no_zeros_at_infinity",
            inf.verdict,
            "zero-free at infinity in the product of projective spaces",
            "common zero at infinity in the product of projective spaces",
        );
    }
    let (perm, cs) = match &opts.permutation {
        Some(perm) => {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..ns.len()).collect::<Vec<_>>() {
                return Err(s.not(format!("{perm:?} is not a permutation of the blocks")));
            }
            (perm.clone(), formula::macproduct(&ns, &dmat, perm))
        }
        None => best_block_order(&ns, &dmat),
    };
    if cs.iter().any(|&c| c < 0) {
        return Err(s.not(format!("block degrees {cs:?} are negative for order {perm:?}")));
    }
    let vanishing = toric::arke_product(&ns, &dmat, &cs)?;
    checks.boolean(
        "vanishing_condition",
        vanishing.holds,
        &format!("Künneth vanishing holds for block order {perm:?}"),
        "a twisted cohomology group is nonzero",
    );
    let hyps = checks.finish(opts.force)?;
    Ok(BoundCertificate {
        theorem: Theorem::Macproduct,
        q: block_product(s.n, &sp.blocks, &cs),
        shape: Shape::Product {
            blocks: sp.blocks.clone(),
            cs,
        },
        nu: 1,
        mu: s.mu(),
        e: vec![BigRational::zero(); ns.len()],
        a: s.a,
        vol: s.vol,
        r_used: rat(s.vol as i64),
        hypotheses: hyps,
        sharpened: None,
        lattice_refined: None,
    })
}

/// Membership when the zero set has the expected codimension and no
/// component at infinity: `Q = eP` with `e ∈ ℕ`.
pub fn bound_noether(fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(Theorem::Noether, fs, phi, p)?;
    let mut checks = Checks::new(Theorem::Noether);
    let smooth = s.smooth(&mut checks)?;
    s.containment(&mut checks);
    let ds = s.default_ds(opts)?;
    if ds.iter().any(|&d| d < 1) {
        return Err(s.not("the degrees d_j must be positive"));
    }
    let e_raw = match &opts.e {
        Some(e) => e.clone(),
        None => p.min_scaling(&ivec_support(phi))?.e_min,
    };
    let e = ceil_i64(&e_raw).max(1);
    s.check_phi_in(&rat(e), &mut checks)?;
    checks.boolean("codimension_at_most_n", s.m <= s.n, "m ≤ n", "codimension m > n is impossible");
    if smooth {
        let product = p.as_simplex_product();
        let large = toric::is_large(p)?;
        if large {
            checks.push("vanishing_condition", Verdict::Verified, "D_P + K is generated by sections");
        } else if product.is_some() {
            let rep = toric::arke_condition(p, &ds, e, ArkeMode::Product)?;
            checks.boolean(
                "vanishing_condition",
                rep.holds,
                "product of simplices: Künneth vanishing holds",
                "a twisted cohomology group is nonzero",
            );
        } else {
            let rep = toric::arke_condition(p, &ds, e, ArkeMode::Scaled)?;
            checks.boolean(
                "vanishing_condition",
                rep.holds,
                "P is not large, but every required twist is a nonnegative multiple of P",
                "P is not large and some required twist is negative",
            );
        }
    }
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        s.codimension(&mut checks, opts.budget)?;
        let comp = ideals::no_component_at_infinity(fs, p, &ds, opts.budget)?;
        checks.tristate(
            "no_component_at_infinity",
            comp.verdict,
            "every divisor at infinity meets the zero set in lower dimension",
            "the zero set has a component at infinity",
        );
        s.membership(&mut checks, opts.budget)?;
    }
    let hyps = checks.finish(opts.force)?;
    let r = rat(s.vol as i64);
    Ok(scaled_certificate(&s, Theorem::Noether, rat(e), 1, rat(e), r, hyps, None, opts))
}

fn scaled_common(s: &Setup, opts: &BoundOptions, checks: &mut Checks) -> Result<(BigRational, BigRational), BoundError> {
    s.smooth(checks)?;
    s.containment(checks);
    let e = s.scaling(opts, checks)?;
    let r = s.r_used(opts, checks)?;
    Ok((e, r))
}

/// Complete intersections: `Q = ⌈e + m·Vol(P)/a⌉·P`, `ν = 1`.
pub fn bound_ag(fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(Theorem::Ag, fs, phi, p)?;
    let mut checks = Checks::new(Theorem::Ag);
    let (e, r) = scaled_common(&s, opts, &mut checks)?;
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        s.codimension(&mut checks, opts.budget)?;
        s.membership(&mut checks, opts.budget)?;
    }
    let hyps = checks.finish(opts.force)?;
    let vol = rat(s.vol as i64);
    let c_exact = formula::ag(s.m, &e, &vol, s.a);
    let a_inf = a_infinity(p).unwrap_or(s.a);
    let sharp = sharpened_scaled(&s, &r, 1, formula::ag(s.m, &e, &r, a_inf));
    Ok(scaled_certificate(&s, Theorem::Ag, c_exact, 1, e, r, hyps, Some(sharp), opts))
}

/// Integral closure: `ν = μ`, `Q = max(⌈μ(e + Vol/a)⌉, min(m, n+1))·P`.
pub fn bound_hickel(fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(Theorem::Hickel, fs, phi, p)?;
    let mut checks = Checks::new(Theorem::Hickel);
    let (e, r) = scaled_common(&s, opts, &mut checks)?;
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        s.integral_closure(&mut checks, opts.budget)?;
    }
    let hyps = checks.finish(opts.force)?;
    let nu = s.mu() as u32;
    let vol = rat(s.vol as i64);
    let c_exact = formula::hickel(s.m, s.n, &e, &vol, s.a);
    let a_inf = a_infinity(p).unwrap_or(s.a);
    let sharp = sharpened_scaled(&s, &r, nu, formula::hickel(s.m, s.n, &e, &r, a_inf));
    Ok(scaled_certificate(&s, Theorem::Hickel, c_exact, nu, e, r, hyps, Some(sharp), opts))
}

/// Radical membership: `ν = μ·Vol(P)`, `Q = max(⌈μ(1/a + e)Vol⌉, min(m, n+1))·P`.
pub fn bound_kollar(fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(Theorem::Kollar, fs, phi, p)?;
    let mut checks = Checks::new(Theorem::Kollar);
    let (e, r) = scaled_common(&s, opts, &mut checks)?;
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        s.radical(&mut checks, opts.budget)?;
    }
    let hyps = checks.finish(opts.force)?;
    let nu = (s.mu() as u64 * s.vol) as u32;
    let vol = rat(s.vol as i64);
    let c_exact = formula::kollar(s.m, s.n, &e, &vol, s.a);
    let a_inf = a_infinity(p).unwrap_or(s.a);
    let nu_sharp = ceil_i64(&(rat(s.mu() as i64) * &r)) as u32;
    let sharp = sharpened_scaled(&s, &r, nu_sharp, formula::kollar(s.m, s.n, &e, &r, a_inf));
    Ok(scaled_certificate(&s, Theorem::Kollar, c_exact, nu, e, r, hyps, Some(sharp), opts))
}

/// Product-of-simplices versions of the three membership bounds.
pub fn bound_products(
    which: Theorem,
    fs: &[SparsePoly],
    phi: &SparsePoly,
    p: &LatticePolytope,
    opts: &BoundOptions,
) -> Result<BoundCertificate, BoundError> {
    let s = Setup::new(which, fs, phi, p)?;
    if !matches!(which, Theorem::Agprod | Theorem::Hickelprod | Theorem::Kollarprod) {
        return Err(s.not("not a product-of-simplices membership bound"));
    }
    let sp = s.simplex_product()?;
    let ns = sp.dims();
    let es = block_degrees(phi, &sp.blocks);
    let vol = formula::product_volume(&ns, &sp.degrees);
    let mut checks = Checks::new(which);
    s.containment(&mut checks);
    checks.push("phi_support_in_eP", Verdict::Verified, format!("supp Φ ⊆ ∏ e_k Σ with e = {es:?}"));
    let r = s.r_used(opts, &mut checks)?;
    if checks.list.iter().all(|h| h.verdict != Verdict::Failed) {
        match which {
            Theorem::Agprod => {
                s.codimension(&mut checks, opts.budget)?;
                s.membership(&mut checks, opts.budget)?;
            }
            Theorem::Hickelprod => s.integral_closure(&mut checks, opts.budget)?,
            _ => s.radical(&mut checks, opts.budget)?,
        }
    }
    let hyps = checks.finish(opts.force)?;
    let mu = s.mu();
    let evaluate = |v: &BigRational| -> (Vec<i64>, u32) {
        let (cs, nu) = match which {
            Theorem::Agprod => (formula::agprod(s.m, &es, v), BigRational::one()),
            Theorem::Hickelprod => (formula::hickelprod(s.m, &ns, &sp.degrees, &es, v), rat(mu as i64)),
            _ => (formula::kollarprod(s.m, &ns, &sp.degrees, &es, v), rat(mu as i64) * v),
        };
        (cs.iter().map(ceil_i64).collect(), ceil_i64(&nu) as u32)
    };
    let (cs, nu) = evaluate(&rat(vol as i64));
    let (cs_sharp, nu_sharp) = evaluate(&r);
    Ok(BoundCertificate {
        theorem: which,
        q: block_product(s.n, &sp.blocks, &cs),
        shape: Shape::Product {
            blocks: sp.blocks.clone(),
            cs,
        },
        nu,
        mu,
        e: es.iter().map(|&x| rat(x)).collect(),
        a: s.a,
        vol,
        r_used: r.clone(),
        hypotheses: hyps,
        sharpened: Some(Sharpened {
            a_inf: a_infinity(p).unwrap_or(s.a),
            r,
            nu: nu_sharp,
            q: block_product(s.n, &sp.blocks, &cs_sharp),
            shape: Shape::Product {
                blocks: sp.blocks.clone(),
                cs: cs_sharp,
            },
        }),
        lattice_refined: None,
    })
}

pub fn certify(theorem: Theorem, fs: &[SparsePoly], phi: &SparsePoly, p: &LatticePolytope, opts: &BoundOptions) -> Result<BoundCertificate, BoundError> {
    match theorem {
        Theorem::Mac => bound_macaulay(fs, phi, p, opts),
        Theorem::Macproduct => bound_macproduct(fs, phi, p, opts),
        Theorem::Noether => bound_noether(fs, phi, p, opts),
        Theorem::Ag => bound_ag(fs, phi, p, opts),
        Theorem::Hickel => bound_hickel(fs, phi, p, opts),
        Theorem::Kollar => bound_kollar(fs, phi, p, opts),
        t => bound_products(t, fs, phi, p, opts),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub theorem: Theorem,
    pub unknown: bool,
    pub reason: String,
}

/// Tries every requested theorem; certificates come back sorted by `Vol(Q)`.
pub fn certify_all(
    theorems: &[Theorem],
    fs: &[SparsePoly],
    phi: &SparsePoly,
    p: &LatticePolytope,
    opts: &BoundOptions,
) -> (Vec<BoundCertificate>, Vec<Rejection>) {
    let mut certs = Vec::new();
    let mut rejected = Vec::new();
    for &t in theorems {
        if t.is_product() && p.as_simplex_product().is_none() {
            rejected.push(Rejection {
                theorem: t,
                unknown: false,
                reason: "P is not a product of dilated simplices".into(),
            });
            continue;
        }
        match certify(t, fs, phi, p, opts) {
            Ok(c) => certs.push(c),
            Err(e) => rejected.push(Rejection {
                theorem: t,
                unknown: e.is_unknown(),
                reason: e.to_string(),
            }),
        }
    }
    certs.sort_by(|a, b| {
        a.q.normalized_volume()
            .cmp(&b.q.normalized_volume())
            .then(a.theorem.cmp(&b.theorem))
    });
    (certs, rejected)
}
