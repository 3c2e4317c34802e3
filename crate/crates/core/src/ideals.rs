//! Gröbner bases over ℚ and the algebraic hypothesis checks built on them.
//!
//! Buchberger's algorithm with both classical criteria and the normal
//! selection strategy. Every basis computation runs under a budget of S-pair
//! reductions so that hard instances end in [`IdealError::BudgetExceeded`]
//! instead of running forever.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cox;
use crate::lattice::{self, IVec};
use crate::poly::{Exponent, SparsePoly};
use crate::polytope::LatticePolytope;
use crate::toric::{Fan, ToricError};

pub const DEFAULT_BUDGET: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("Gröbner budget of {0} S-pair reductions exceeded")]
    BudgetExceeded(usize),
    #[error("polynomials live in different rings ({0} vs {1} variables)")]
    NvarsMismatch(usize, usize),
    #[error("offsets given for {found} polynomials, expected {expected}")]
    OffsetsMismatch { expected: usize, found: usize },
    #[error("polynomial {index} has support outside its polytope")]
    SupportOutside { index: usize },
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Cox(#[from] cox::CoxError),
}

/// Maximum number of S-pair reductions per basis computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub usize);

impl Default for Budget {
    /// Reads `MEMBERSHIP_BUDGET` from the environment, falling back to 50,000.
    fn default() -> Self {
        Budget(
            std::env::var("MEMBERSHIP_BUDGET")
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(DEFAULT_BUDGET),
        )
    }
}

/// Three-valued outcome for checks that may run out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tristate {
    True,
    False,
    Unknown,
}

impl From<bool> for Tristate {
    fn from(b: bool) -> Self {
        if b {
            Tristate::True
        } else {
            Tristate::False
        }
    }
}

/// Graded reverse lexicographic order after permuting the variables:
/// position `i` of the order refers to variable `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    perm: Vec<usize>,
}

impl MonomialOrder {
    pub fn grevlex(n: usize) -> Self {
        MonomialOrder {
            perm: (0..n).collect(),
        }
    }

    pub fn permuted(perm: Vec<usize>) -> Self {
        let mut check = perm.clone();
        check.sort();
        assert!(check.iter().copied().eq(0..perm.len()), "not a permutation");
        MonomialOrder { perm }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let da: u64 = a.iter().map(|&x| x as u64).sum();
        let db: u64 = b.iter().map(|&x| x as u64).sum();
        da.cmp(&db).then_with(|| {
            for &i in self.perm.iter().rev() {
                if a[i] != b[i] {
                    return b[i].cmp(&a[i]);
                }
            }
            Ordering::Equal
        })
    }
}

type Term = (Vec<u32>, BigRational);

/// Terms in strictly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Dense(Vec<Term>);

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn exp_sub(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn exp_add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

struct Engine<'a> {
    order: &'a MonomialOrder,
}

impl Engine<'_> {
    fn densify(&self, f: &SparsePoly) -> Dense {
        let mut t: Vec<Term> = f.terms().map(|(e, c)| (e.0.clone(), c.clone())).collect();
        t.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
        Dense(t)
    }

    /// `p − c·x^m·g`.
    fn sub_mul(&self, p: &[Term], c: &BigRational, m: &[u32], g: &[Term]) -> Vec<Term> {
        let mut out = Vec::with_capacity(p.len() + g.len());
        let mut i = 0;
        let mut j = 0;
        let shifted = |j: usize| exp_add(&g[j].0, m);
        while i < p.len() || j < g.len() {
            if j == g.len() {
                out.extend_from_slice(&p[i..]);
                break;
            }
            let gj = shifted(j);
            if i == p.len() {
                out.push((gj, -(c * &g[j].1)));
                j += 1;
                continue;
            }
            match self.order.cmp(&p[i].0, &gj) {
                Ordering::Greater => {
                    out.push(p[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((gj, -(c * &g[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = &p[i].1 - c * &g[j].1;
                    if !v.is_zero() {
                        out.push((gj, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Full reduction of `p` modulo the basis.
    fn reduce(&self, p: Vec<Term>, basis: &[Dense]) -> Vec<Term> {
        let mut p = p;
        let mut r: Vec<Term> = Vec::new();
        while let Some((lm, lc)) = p.first().cloned() {
            match basis.iter().find(|g| divides(&g.0[0].0, &lm)) {
                Some(g) => {
                    let m = exp_sub(&lm, &g.0[0].0);
                    let c = &lc / &g.0[0].1;
                    p = self.sub_mul(&p, &c, &m, &g.0);
                }
                None => {
                    r.push(p.remove(0));
                }
            }
        }
        r
    }

    fn monic(&self, mut p: Vec<Term>) -> Dense {
        let lc = p[0].1.clone();
        for t in &mut p {
            t.1 = &t.1 / &lc;
        }
        Dense(p)
    }

    fn spoly(&self, f: &Dense, g: &Dense) -> Vec<Term> {
        let l = lcm(&f.0[0].0, &g.0[0].0);
        let mf = exp_sub(&l, &f.0[0].0);
        let mg = exp_sub(&l, &g.0[0].0);
        let zero: Vec<Term> = Vec::new();
        let a = self.sub_mul(&zero, &-BigRational::one(), &mf, &f.0);
        self.sub_mul(&a, &BigRational::one(), &mg, &g.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    nvars: usize,
    order: MonomialOrder,
    gens: Vec<Dense>,
}

/// Reduced Gröbner basis in grevlex order.
pub fn buchberger(gens: &[SparsePoly], budget: Budget) -> Result<GroebnerBasis, IdealError> {
    let n = gens.first().map(|g| g.nvars()).unwrap_or(0);
    buchberger_with_order(gens, n, &MonomialOrder::grevlex(n), budget)
}

pub fn buchberger_with_order(
    gens: &[SparsePoly],
    nvars: usize,
    order: &MonomialOrder,
    budget: Budget,
) -> Result<GroebnerBasis, IdealError> {
    for g in gens {
        if g.nvars() != nvars {
            return Err(IdealError::NvarsMismatch(nvars, g.nvars()));
        }
    }
    let eng = Engine { order };
    let unit = || GroebnerBasis {
        nvars,
        order: order.clone(),
        gens: vec![Dense(vec![(vec![0; nvars], BigRational::one())])],
    };
    let mut basis: Vec<Dense> = Vec::new();
    for g in gens {
        let d = eng.densify(g);
        let r = eng.reduce(d.0, &basis);
        if r.is_empty() {
            continue;
        }
        let r = eng.monic(r);
        if r.0[0].0.iter().all(|&e| e == 0) {
            return Ok(unit());
        }
        basis.push(r);
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }
    let mut reductions = 0usize;
    while !pairs.is_empty() {
        // normal selection: smallest lcm of leading monomials
        let &(i, j) = pairs
            .iter()
            .min_by(|a, b| {
                let la = lcm(&basis[a.0].0[0].0, &basis[a.1].0[0].0);
                let lb = lcm(&basis[b.0].0[0].0, &basis[b.1].0[0].0);
                order.cmp(&la, &lb).then(a.cmp(b))
            })
            .unwrap();
        pairs.remove(&(i, j));
        let (li, lj) = (&basis[i].0[0].0, &basis[j].0[0].0);
        if li.iter().zip(lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = lcm(li, lj);
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(&basis[k].0[0].0, &l)
                && !pairs.contains(&key(i, k))
                && !pairs.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        reductions += 1;
        if reductions > budget.0 {
            return Err(IdealError::BudgetExceeded(budget.0));
        }
        let s = eng.spoly(&basis[i], &basis[j]);
        let h = eng.reduce(s, &basis);
        if h.is_empty() {
            continue;
        }
        let h = eng.monic(h);
        if h.0[0].0.iter().all(|&e| e == 0) {
            return Ok(unit());
        }
        let k = basis.len();
        basis.push(h);
        for i in 0..k {
            pairs.insert((i, k));
        }
    }

    // minimise, then inter-reduce
    let mut keep: Vec<Dense> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let lm = &g.0[0].0;
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            k != i && divides(&h.0[0].0, lm) && (h.0[0].0 != *lm || k < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<Dense> = keep
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, g)| g.clone())
            .collect();
        let head = keep[i].0[0].clone();
        let tail = eng.reduce(keep[i].0[1..].to_vec(), &others);
        let mut t = vec![head];
        t.extend(tail);
        reduced.push(eng.monic(t));
    }
    reduced.sort_by(|a, b| order.cmp(&a.0[0].0, &b.0[0].0));
    Ok(GroebnerBasis {
        nvars,
        order: order.clone(),
        gens: reduced,
    })
}

impl GroebnerBasis {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn generators(&self) -> Vec<SparsePoly> {
        self.gens
            .iter()
            .map(|g| {
                SparsePoly::from_terms(self.nvars, g.0.iter().map(|(e, c)| (Exponent(e.clone()), c.clone())))
                    .expect("basis exponents have the ring's length")
            })
            .collect()
    }

    pub fn leading_monomials(&self) -> Vec<Vec<u32>> {
        self.gens.iter().map(|g| g.0[0].0.clone()).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].0.len() == 1 && self.gens[0].0[0].0.iter().all(|&e| e == 0)
    }

    /// The unique remainder of `f` modulo the ideal.
    pub fn normal_form(&self, f: &SparsePoly) -> SparsePoly {
        let eng = Engine { order: &self.order };
        let r = eng.reduce(eng.densify(f).0, &self.gens);
        SparsePoly::from_terms(self.nvars, r.into_iter().map(|(e, c)| (Exponent(e), c)))
            .expect("remainder exponents have the ring's length")
    }

    pub fn contains(&self, f: &SparsePoly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Krull dimension of the ideal: `−1` for the unit ideal, otherwise the
    /// largest set of variables containing no leading monomial's support.
    pub fn dimension(&self) -> i64 {
        if self.is_unit() {
            return -1;
        }
        let n = self.nvars;
        let lms = self.leading_monomials();
        let mut best = 0;
        for mask in 0u64..(1u64 << n) {
            let size = mask.count_ones() as i64;
            if size <= best {
                continue;
            }
            let free = lms.iter().all(|lm| {
                lm.iter()
                    .enumerate()
                    .any(|(i, &e)| e > 0 && mask >> i & 1 == 0)
            });
            if free {
                best = size;
            }
        }
        best
    }
}

pub fn contains_one(gens: &[SparsePoly], budget: Budget) -> Result<bool, IdealError> {
    if gens.is_empty() {
        return Ok(false);
    }
    Ok(buchberger(gens, budget)?.is_unit())
}

pub fn dimension(gens: &[SparsePoly], nvars: usize, budget: Budget) -> Result<i64, IdealError> {
    if gens.iter().all(SparsePoly::is_zero) {
        return Ok(nvars as i64);
    }
    Ok(buchberger_with_order(gens, nvars, &MonomialOrder::grevlex(nvars), budget)?.dimension())
}

pub fn is_member(f: &SparsePoly, gens: &[SparsePoly], budget: Budget) -> Result<bool, IdealError> {
    if gens.is_empty() {
        return Ok(f.is_zero());
    }
    Ok(buchberger(gens, budget)?.contains(f))
}

/// Whether the system has a common zero with every active variable nonzero.
pub fn has_torus_zero(gens: &[SparsePoly], nvars: usize, active: &[usize], budget: Budget) -> Result<bool, IdealError> {
    let map: Vec<usize> = (0..nvars).collect();
    let mut ext: Vec<SparsePoly> = gens.iter().map(|g| g.embed(nvars + 1, &map)).collect();
    let mut e = vec![0u32; nvars + 1];
    e[nvars] = 1;
    for &i in active {
        e[i] += 1;
    }
    let rab = &SparsePoly::monomial(Exponent(e), BigRational::one()) - &SparsePoly::one(nvars + 1);
    ext.push(rab);
    Ok(!contains_one(&ext, budget)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceVerdict {
    /// The face system has no common zero on the orbit.
    NoZero,
    /// The face system has a common zero on the orbit.
    Zero,
    /// Every polynomial restricts to zero on the face.
    AllZero,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceReport {
    pub vertices: Vec<IVec>,
    pub facets: Vec<usize>,
    pub dim: usize,
    /// The restricted system in the face's own lattice coordinates.
    #[serde(skip)]
    pub system: Vec<SparsePoly>,
    pub system_text: Vec<String>,
    pub verdict: FaceVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfinityReport {
    pub verdict: Tristate,
    pub faces: Vec<FaceReport>,
}

/// Facet offsets of `d·P` for each polynomial.
pub fn scaled_offsets(p: &LatticePolytope, ds: &[i64]) -> Vec<Vec<i64>> {
    ds.iter()
        .map(|d| p.facets().iter().map(|f| f.a * d).collect())
        .collect()
}

fn is_unit_vector(r: &[i64]) -> bool {
    r.iter().filter(|&&x| x != 0).count() == 1 && r.contains(&1)
}

/// Checks the face systems of every face of `P` that lies at infinity, i.e.
/// inside some facet whose normal is not a coordinate vector.
///
/// `offsets[j][i]` is the offset of facet `i` for the polytope carrying
/// `fs[j]`; all those polytopes share the facet normals of `P`.
pub fn no_common_zeros_at_infinity(
    fs: &[SparsePoly],
    p: &LatticePolytope,
    offsets: &[Vec<i64>],
    budget: Budget,
) -> Result<InfinityReport, IdealError> {
    if offsets.len() != fs.len() {
        return Err(IdealError::OffsetsMismatch {
            expected: fs.len(),
            found: offsets.len(),
        });
    }
    let n = p.nvars();
    for (j, f) in fs.iter().enumerate() {
        if f.nvars() != n {
            return Err(IdealError::NvarsMismatch(n, f.nvars()));
        }
        for (e, _) in f.terms() {
            let x = e.to_ivec();
            if p.facets().iter().zip(&offsets[j]).any(|(fc, a)| lattice::dot(&x, &fc.rho) + a < 0) {
                return Err(IdealError::SupportOutside { index: j });
            }
        }
    }
    let infinity: BTreeSet<usize> = (0..p.facets().len())
        .filter(|&i| !is_unit_vector(&p.facets()[i].rho))
        .collect();
    let mut faces = Vec::new();
    for face in p.faces() {
        if face.dim == p.dim() || !face.facets.iter().any(|i| infinity.contains(i)) {
            continue;
        }
        faces.push(face_report(fs, p, offsets, &face, budget));
    }
    let verdict = if faces.iter().any(|f| matches!(f.verdict, FaceVerdict::Zero | FaceVerdict::AllZero)) {
        Tristate::False
    } else if faces.iter().any(|f| f.verdict == FaceVerdict::Unknown) {
        Tristate::Unknown
    } else {
        Tristate::True
    };
    Ok(InfinityReport { verdict, faces })
}

fn face_report(
    fs: &[SparsePoly],
    p: &LatticePolytope,
    offsets: &[Vec<i64>],
    face: &crate::polytope::Face,
    budget: Budget,
) -> FaceReport {
    let n = p.nvars();
    let normals: Vec<IVec> = face.facets.iter().map(|&i| p.facets()[i].rho.clone()).collect();
    // lattice of directions along the face
    let basis = lattice::integer_kernel(&normals, n);
    let k = basis.len();
    let mut system = Vec::new();
    for (j, f) in fs.iter().enumerate() {
        let on: Vec<(IVec, BigRational)> = f
            .terms()
            .map(|(e, c)| (e.to_ivec(), c.clone()))
            .filter(|(x, _)| {
                face.facets
                    .iter()
                    .all(|&i| lattice::dot(x, &p.facets()[i].rho) + offsets[j][i] == 0)
            })
            .collect();
        if on.is_empty() {
            continue;
        }
        let base = on[0].0.clone();
        let coords: Vec<IVec> = on
            .iter()
            .map(|(x, _)| lattice::integer_coordinates(&basis, &lattice::sub(x, &base)))
            .collect();
        let mins: IVec = (0..k).map(|i| coords.iter().map(|c| c[i]).min().unwrap()).collect();
        let g = SparsePoly::from_terms(
            k,
            coords.iter().zip(&on).map(|(c, (_, coef))| {
                let e: Vec<u32> = c.iter().zip(&mins).map(|(x, m)| (x - m) as u32).collect();
                (Exponent(e), coef.clone())
            }),
        )
        .expect("face coordinates have the face dimension");
        system.push(g);
    }
    let verdict = if system.is_empty() {
        FaceVerdict::AllZero
    } else {
        let active: Vec<usize> = (0..k).collect();
        match has_torus_zero(&system, k, &active, budget) {
            Ok(true) => FaceVerdict::Zero,
            Ok(false) => FaceVerdict::NoZero,
            Err(_) => FaceVerdict::Unknown,
        }
    };
    let names: Vec<String> = (1..=k).map(|i| format!("t{i}")).collect();
    FaceReport {
        vertices: face.vertices.iter().map(|&i| p.vertices()[i].clone()).collect(),
        facets: face.facets.clone(),
        dim: face.dim,
        system_text: system.iter().map(|g| g.format_with(&names)).collect(),
        system,
        verdict,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartDimensions {
    pub cone: Vec<usize>,
    pub dim: i64,
    /// `(ray, dim of the zero set intersected with that divisor)` for infinity rays in the cone.
    pub at_infinity: Vec<(usize, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub verdict: Tristate,
    pub charts: Vec<ChartDimensions>,
}

/// Whether the zero set of the homogenized system has no irreducible
/// component inside the divisors at infinity.
///
/// Every component has dimension at least `max(n − m, 0)`, so a divisor
/// meeting the zero set in lower dimension contains no component. A chart in
/// which the divisor meets the zero set in its full dimension certifies a
/// component at infinity. Anything in between is reported as unknown.
pub fn no_component_at_infinity(
    fs: &[SparsePoly],
    p: &LatticePolytope,
    ds: &[i64],
    budget: Budget,
) -> Result<ComponentReport, IdealError> {
    let fan = Fan::normal(p)?;
    if !fan.is_regular() {
        return Err(ToricError::NotSmooth.into());
    }
    let dp = fan.divisor_of(p)?;
    let n = p.nvars();
    let floor = (n as i64 - fs.len() as i64).max(0);
    let homs: Vec<cox::CoxPoly> = fs
        .iter()
        .zip(ds)
        .map(|(f, &d)| cox::homogenize_in_class(f, &dp.scale(d), &fan))
        .collect::<Result<_, _>>()?;
    let mut charts = Vec::new();
    let mut verdict = Tristate::True;
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let local: Vec<SparsePoly> = homs
            .iter()
            .map(|h| h.localize(&fan, ci))
            .collect::<Result<_, _>>()?;
        let dim = match dimension(&local, n, budget) {
            Ok(d) => d,
            Err(IdealError::BudgetExceeded(_)) => {
                verdict = Tristate::Unknown;
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut at_inf = Vec::new();
        for (pos, &ray) in cone.iter().enumerate() {
            if ray < n {
                continue;
            }
            let mut ext = local.clone();
            ext.push(SparsePoly::var(n, pos));
            match dimension(&ext, n, budget) {
                Ok(di) => {
                    at_inf.push((ray, di));
                    if di >= 0 && di == dim {
                        verdict = Tristate::False;
                    } else if di >= floor && verdict == Tristate::True {
                        verdict = Tristate::Unknown;
                    }
                }
                Err(IdealError::BudgetExceeded(_)) => {
                    if verdict == Tristate::True {
                        verdict = Tristate::Unknown;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        charts.push(ChartDimensions {
            cone: cone.clone(),
            dim,
            at_infinity: at_inf,
        });
    }
    Ok(ComponentReport { verdict, charts })
}
