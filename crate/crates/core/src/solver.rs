//! Bounded-support solutions of `Σ F_j G_j = Φ^ν` by exact linear algebra.
//!
//! The unknowns are the coefficients of `G_j` on the shifts `b` with
//! `b + supp F_j ⊆ Q`; there is one equation per lattice point of `Q`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::IVec;
use crate::poly::{Exponent, SparsePoly};
use crate::polytope::{graded_cmp, LatticePolytope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("exponent {0:?} of the right-hand side lies outside Q")]
    RhsOutside(IVec),
    #[error("polynomials live in different rings ({0} vs {1} variables)")]
    NvarsMismatch(usize, usize),
    #[error("nu must be at least 1")]
    ZeroNu,
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("scale {0} is negative")]
    NegativeScale(i64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipSolution {
    pub gs: Vec<SparsePoly>,
    pub nu: u32,
    pub q: LatticePolytope,
    pub stats: SolveStats,
}

impl MembershipSolution {
    pub fn to_json(&self, vars: &[String]) -> serde_json::Value {
        serde_json::json!({
            "G": self.gs.iter().map(|g| g.format_with(vars)).collect::<Vec<_>>(),
            "G_terms": self.gs.iter().map(|g| g.to_json(vars)).collect::<Vec<_>>(),
            "nu": self.nu,
            "Q": self.q.to_json(),
            "stats": self.stats,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Feasible(MembershipSolution),
    Infeasible(SolveStats),
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    pub fn solution(self) -> Option<MembershipSolution> {
        match self {
            SolveOutcome::Feasible(s) => Some(s),
            SolveOutcome::Infeasible(_) => None,
        }
    }
}

/// One unknown: coefficient of `x^shift` in `G_poly`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub poly: usize,
    pub shift: IVec,
}

/// The coefficient-matching system with rational entries.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub unknowns: Vec<Unknown>,
    pub points: Vec<IVec>,
    /// `rows[i]` maps unknown index to coefficient.
    pub rows: Vec<BTreeMap<usize, BigRational>>,
    pub rhs: Vec<BigRational>,
}

fn check_rings(fs: &[SparsePoly], phi: &SparsePoly, q: &LatticePolytope) -> Result<usize, SolverError> {
    if fs.is_empty() {
        return Err(SolverError::NoGenerators);
    }
    let n = q.nvars();
    for f in fs.iter().chain(std::iter::once(phi)) {
        if f.nvars() != n {
            return Err(SolverError::NvarsMismatch(n, f.nvars()));
        }
    }
    Ok(n)
}

/// Builds the system for `Σ F_j G_j = rhs` with `supp(F_j G_j) ⊆ Q`.
pub fn build_system(fs: &[SparsePoly], rhs: &SparsePoly, q: &LatticePolytope) -> Result<LinearSystem, SolverError> {
    check_rings(fs, rhs, q)?;
    for (e, _) in rhs.terms() {
        if !q.contains(&e.to_ivec()) {
            return Err(SolverError::RhsOutside(e.to_ivec()));
        }
    }
    let points = q.lattice_points();
    let index: HashMap<IVec, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

    let mut unknowns = Vec::new();
    let mut order: Vec<usize> = (0..fs.len()).collect();
    order.sort_by_key(|&j| (fs[j].len(), j));
    for j in order {
        let supp: Vec<IVec> = fs[j].terms().map(|(e, _)| e.to_ivec()).collect();
        let mut shifts = q.shift_set(&supp);
        shifts.sort_by(|a, b| graded_cmp(a, b));
        unknowns.extend(shifts.into_iter().map(|shift| Unknown { poly: j, shift }));
    }

    let mut rows = vec![BTreeMap::new(); points.len()];
    for (u, unk) in unknowns.iter().enumerate() {
        for (e, c) in fs[unk.poly].terms() {
            let x: IVec = e.to_ivec().iter().zip(&unk.shift).map(|(a, b)| a + b).collect();
            let i = index[&x];
            rows[i].insert(u, c.clone());
        }
    }
    let mut rhs_vec = vec![BigRational::zero(); points.len()];
    for (e, c) in rhs.terms() {
        rhs_vec[index[&e.to_ivec()]] = c.clone();
    }
    Ok(LinearSystem {
        unknowns,
        points,
        rows,
        rhs: rhs_vec,
    })
}

type IntRow = BTreeMap<usize, BigInt>;

/// Clears denominators row by row; the rhs sits in column `ncols`.
fn integer_rows(sys: &LinearSystem) -> Vec<IntRow> {
    let ncols = sys.unknowns.len();
    sys.rows
        .iter()
        .zip(&sys.rhs)
        .map(|(row, b)| {
            let l = row
                .values()
                .chain(std::iter::once(b))
                .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
            let scale = |c: &BigRational| (c * BigRational::from_integer(l.clone())).to_integer();
            let mut r: IntRow = row.iter().map(|(&k, c)| (k, scale(c))).collect();
            if !b.is_zero() {
                r.insert(ncols, scale(b));
            }
            r
        })
        .filter(|r| !r.is_empty())
        .collect()
}

/// Fraction-free elimination. Returns the pivot rows (with their pivot
/// column) and whether the system is consistent.
fn bareiss(mut active: Vec<IntRow>, ncols: usize) -> (Vec<(usize, IntRow)>, bool) {
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let Some(pi) = active
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains_key(&col))
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i)
        else {
            continue;
        };
        let prow = active.swap_remove(pi);
        let akk = prow[&col].clone();
        for row in active.iter_mut() {
            let aik = row.remove(&col);
            let mut next = IntRow::new();
            let keys: Vec<usize> = match &aik {
                Some(_) => {
                    let mut k: Vec<usize> = row.keys().chain(prow.keys()).copied().filter(|&k| k != col).collect();
                    k.sort_unstable();
                    k.dedup();
                    k
                }
                None => row.keys().copied().collect(),
            };
            for k in keys {
                let mut v = row.get(&k).map_or_else(BigInt::zero, |x| &akk * x);
                if let (Some(aik), Some(pk)) = (&aik, prow.get(&k)) {
                    v -= aik * pk;
                }
                if v.is_zero() {
                    continue;
                }
                let (qt, rm) = v.div_rem(&prev);
                debug_assert!(rm.is_zero(), "Bareiss division must be exact");
                next.insert(k, qt);
            }
            *row = next;
        }
        active.retain(|r| !r.is_empty());
        prev = akk;
        pivots.push((col, prow));
    }
    let consistent = active.iter().all(|r| !r.contains_key(&ncols));
    (pivots, consistent)
}

/// Solves the system; free unknowns are set to zero.
pub fn solve_system(sys: &LinearSystem) -> (Option<Vec<BigRational>>, SolveStats) {
    let ncols = sys.unknowns.len();
    let (pivots, consistent) = bareiss(integer_rows(sys), ncols);
    let stats = SolveStats {
        unknowns: ncols,
        equations: sys.points.len(),
        rank: pivots.len(),
    };
    if !consistent {
        return (None, stats);
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (col, row) in pivots.iter().rev() {
        let mut acc = row
            .get(&ncols)
            .map_or_else(BigRational::zero, |b| BigRational::from_integer(b.clone()));
        for (&k, a) in row.range(col + 1..ncols) {
            if !x[k].is_zero() {
                acc -= BigRational::from_integer(a.clone()) * &x[k];
            }
        }
        x[*col] = acc / BigRational::from_integer(row[col].clone());
    }
    (Some(x), stats)
}

/// Finds `G_j` with `Σ F_j G_j = Φ^ν` and `supp(F_j G_j) ⊆ Q`, or proves none exist.
pub fn solve_membership(
    fs: &[SparsePoly],
    phi: &SparsePoly,
    nu: u32,
    q: &LatticePolytope,
) -> Result<SolveOutcome, SolverError> {
    if nu == 0 {
        return Err(SolverError::ZeroNu);
    }
    let n = check_rings(fs, phi, q)?;
    let rhs = phi.pow(nu);
    let sys = build_system(fs, &rhs, q)?;
    let (x, stats) = solve_system(&sys);
    let Some(x) = x else {
        return Ok(SolveOutcome::Infeasible(stats));
    };
    let mut gs = vec![SparsePoly::zero(n); fs.len()];
    for (unk, c) in sys.unknowns.iter().zip(x) {
        if !c.is_zero() {
            let e = Exponent::from_ivec(&unk.shift).expect("shifts are nonnegative");
            gs[unk.poly] = &gs[unk.poly] + &SparsePoly::monomial(e, c);
        }
    }
    Ok(SolveOutcome::Feasible(MembershipSolution {
        gs,
        nu,
        q: q.clone(),
        stats,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportViolation {
    pub poly: usize,
    pub exponent: IVec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    /// Nonzero coefficients of `Σ F_j G_j − Φ^ν`, as `(exponent, "p/q")`.
    pub residual: Vec<(IVec, String)>,
    pub support_violations: Vec<SupportViolation>,
    /// Set when the inputs cannot even be compared.
    pub shape_error: Option<String>,
}

/// Recomputes the identity and the support containment from scratch.
pub fn verify(sol: &MembershipSolution, fs: &[SparsePoly], phi: &SparsePoly) -> VerifyReport {
    let fail = |msg: String| VerifyReport {
        ok: false,
        residual: Vec::new(),
        support_violations: Vec::new(),
        shape_error: Some(msg),
    };
    if sol.gs.len() != fs.len() {
        return fail(format!("{} multipliers for {} generators", sol.gs.len(), fs.len()));
    }
    let n = sol.q.nvars();
    if let Some(p) = fs.iter().chain(&sol.gs).chain(std::iter::once(phi)).find(|p| p.nvars() != n) {
        return fail(format!("polynomial in {} variables, expected {n}", p.nvars()));
    }
    let mut total = SparsePoly::zero(n);
    let mut support_violations = Vec::new();
    for (j, (f, g)) in fs.iter().zip(&sol.gs).enumerate() {
        let prod = f * g;
        for (e, _) in prod.terms() {
            let x = e.to_ivec();
            if !sol.q.contains(&x) {
                support_violations.push(SupportViolation { poly: j, exponent: x });
            }
        }
        total = &total + &prod;
    }
    let diff = &total - &phi.pow(sol.nu);
    let residual: Vec<(IVec, String)> = diff.terms().map(|(e, c)| (e.to_ivec(), c.to_string())).collect();
    VerifyReport {
        ok: residual.is_empty() && support_violations.is_empty() && sol.nu >= 1,
        residual,
        support_violations,
        shape_error: None,
    }
}

/// Smallest `c ≤ c_max` such that the problem is feasible at `Q = cP`.
///
/// Scans upward from the first `c` whose dilate contains `supp Φ^ν`;
/// above eight candidates it bisects, which is valid because feasibility
/// is monotone in `c` once `0 ∈ P`.
pub fn minimal_feasible_c(
    fs: &[SparsePoly],
    phi: &SparsePoly,
    nu: u32,
    p: &LatticePolytope,
    c_max: i64,
) -> Result<Option<(i64, MembershipSolution)>, SolverError> {
    if c_max < 0 {
        return Err(SolverError::NegativeScale(c_max));
    }
    if nu == 0 {
        return Err(SolverError::ZeroNu);
    }
    check_rings(fs, phi, p)?;
    let rhs = phi.pow(nu);
    let fits = |c: i64| {
        let q = p.scale_int(c);
        rhs.terms().all(|(e, _)| q.contains(&e.to_ivec()))
    };
    let Some(lo) = (0..=c_max).find(|&c| fits(c)) else {
        return Ok(None);
    };
    let attempt = |c: i64| solve_membership(fs, phi, nu, &p.scale_int(c)).map(SolveOutcome::solution);
    if c_max - lo < 8 {
        for c in lo..=c_max {
            if let Some(s) = attempt(c)? {
                return Ok(Some((c, s)));
            }
        }
        return Ok(None);
    }
    let Some(top) = attempt(c_max)? else {
        return Ok(None);
    };
    let (mut lo, mut hi, mut best) = (lo, c_max, top);
    // invariant: feasible at hi, and every c < lo already ruled out
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Some(s) => {
                hi = mid;
                best = s;
            }
            None => lo = mid + 1,
        }
    }
    Ok(Some((hi, best)))
}

/// Rational coefficient with a positive denominator, as used in the wire format.
pub fn coeff_text(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else if c.denom().is_negative() {
        format!("{}/{}", -c.numer(), -c.denom())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}
