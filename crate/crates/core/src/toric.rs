//! Normal fans, torus-invariant divisors and the cohomology-vanishing rules
//! used to decide when a support polytope is positive enough.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{self, IVec};
use crate::polytope::{LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("the fan is not regular")]
    NotRegular,
    #[error("the polytope is not smooth")]
    NotSmooth,
    #[error("fan is incompatible with the polytope: {0}")]
    Incompatible(String),
    #[error("divisor has {found} coefficients but the fan has {expected} rays")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cohomological degree {q} out of range 0..={n}")]
    DegreeOutOfRange { q: i64, n: usize },
    #[error("factor dimensions sum to {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the polytope is not a product of simplices")]
    NotSimplexProduct,
    #[error("the origin is not in the polytope")]
    OriginNotContained,
    #[error("desingularization is only implemented in dimension 2")]
    UnsupportedDimension,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fan {
    nvars: usize,
    rays: Vec<IVec>,
    max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TDivisor {
    pub coeffs: Vec<i64>,
}

impl TDivisor {
    pub fn add(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: i64) -> TDivisor {
        TDivisor {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// The canonical divisor `−Σ D_j`.
    pub fn canonical(nrays: usize) -> TDivisor {
        TDivisor {
            coeffs: vec![-1; nrays],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Concavity {
    StrictlyConcave,
    Concave,
    NotConcave,
}

impl Concavity {
    pub fn is_concave(self) -> bool {
        self != Concavity::NotConcave
    }
}

/// The support function of a divisor: one linear functional per max cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PLFunction {
    pub functionals: Vec<IVec>,
    pub concavity: Concavity,
}

fn solve_rational(rows: &[IVec], rhs: &[i64]) -> Option<Vec<Ratio<i128>>> {
    // rows are the equations ⟨m, row⟩ = rhs; square and nonsingular
    let n = rows.len();
    let mut a: Vec<Vec<Ratio<i128>>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            r.iter()
                .map(|&x| Ratio::from(x as i128))
                .chain(std::iter::once(Ratio::from(b as i128)))
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| a[i][c] != Ratio::from(0))?;
        a.swap(c, p);
        let inv = Ratio::from(1) / a[c][c];
        for j in c..=n {
            a[c][j] *= inv;
        }
        for i in 0..n {
            if i != c && a[i][c] != Ratio::from(0) {
                let f = a[i][c];
                for j in c..=n {
                    let t = a[c][j] * f;
                    a[i][j] -= t;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n]).collect())
}

impl Fan {
    pub fn new(nvars: usize, rays: Vec<IVec>, max_cones: Vec<Vec<usize>>) -> Self {
        Fan {
            nvars,
            rays,
            max_cones,
        }
    }

    /// Normal fan: rays are the facet normals in facet order, one max cone per vertex.
    pub fn normal(p: &LatticePolytope) -> Result<Fan, ToricError> {
        if !p.is_full_dimensional() {
            return Err(PolytopeError::NotFullDimensional {
                dim: p.dim(),
                nvars: p.nvars(),
            }
            .into());
        }
        let rays: Vec<IVec> = p.facets().iter().map(|f| f.rho.clone()).collect();
        let max_cones = p
            .vertices()
            .iter()
            .map(|v| {
                (0..rays.len())
                    .filter(|&j| p.facets()[j].slack(v) == 0)
                    .collect()
            })
            .collect();
        Ok(Fan {
            nvars: p.nvars(),
            rays,
            max_cones,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    fn cone_rays(&self, cone: &[usize]) -> Vec<IVec> {
        cone.iter().map(|&j| self.rays[j].clone()).collect()
    }

    pub fn is_regular(&self) -> bool {
        self.max_cones
            .iter()
            .all(|c| c.len() == self.nvars && lattice::det(&self.cone_rays(c)).abs() == 1)
    }

    /// Whether `{e₁, …, eₙ}` are the first rays and form a max cone.
    pub fn contains_first_orthant(&self) -> bool {
        let n = self.nvars;
        self.rays.len() >= n
            && (0..n).all(|i| self.rays[i].iter().enumerate().all(|(k, &x)| x == i64::from(k == i)))
            && self.max_cones.iter().any(|c| c.iter().copied().eq(0..n))
    }

    /// The index of the first-orthant cone.
    pub fn first_orthant_cone(&self) -> Option<usize> {
        if !self.contains_first_orthant() {
            return None;
        }
        self.max_cones
            .iter()
            .position(|c| c.iter().copied().eq(0..self.nvars))
    }

    /// Indices of the rays outside the first orthant.
    pub fn infinity_rays(&self) -> std::ops::Range<usize> {
        self.nvars..self.rays.len()
    }

    fn cone_contains_strictly(&self, cone: &[usize], u: &[i64]) -> Option<bool> {
        // u lies in the cone iff it is a nonnegative combination of n independent rays
        let rays = self.cone_rays(cone);
        let n = self.nvars;
        let mut boundary = false;
        for subset in lattice::combinations(rays.len(), n) {
            let sub: Vec<IVec> = subset.iter().map(|&i| rays[i].clone()).collect();
            if lattice::rank(&sub) < n {
                continue;
            }
            // columns are the rays: solve Σ λ_i r_i = u, i.e. transpose system
            let t: Vec<IVec> = (0..n).map(|r| sub.iter().map(|v| v[r]).collect()).collect();
            let lam = solve_rational(&t, u)?;
            if lam.iter().all(|l| *l >= Ratio::from(0)) {
                if lam.iter().any(|l| *l == Ratio::from(0)) {
                    boundary = true;
                } else {
                    return Some(true);
                }
            }
        }
        if boundary {
            None
        } else {
            Some(false)
        }
    }

    /// Sampled completeness check: generic directions in every sign orthant
    /// lie in exactly one max cone.
    pub fn is_complete(&self) -> bool {
        self.is_complete_seeded(0x5eed)
    }

    pub fn is_complete_seeded(&self, seed: u64) -> bool {
        let n = self.nvars;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for orthant in 0..(1u32 << n) {
            for _ in 0..8 {
                let u: IVec = (0..n)
                    .map(|i| {
                        let x: i64 = rng.gen_range(1..=997);
                        if orthant >> i & 1 == 1 {
                            -x
                        } else {
                            x
                        }
                    })
                    .collect();
                let mut hits = 0;
                for c in &self.max_cones {
                    match self.cone_contains_strictly(c, &u) {
                        Some(true) => hits += 1,
                        Some(false) => {}
                        None => {
                            hits = 1;
                            break;
                        }
                    }
                }
                if hits != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// `b_j = −min_v ⟨v, ρ_j⟩`; every cone must have a vertex minimising all its rays.
    pub fn divisor_of(&self, p: &LatticePolytope) -> Result<TDivisor, ToricError> {
        if p.nvars() != self.nvars {
            return Err(ToricError::Incompatible("ambient dimensions differ".into()));
        }
        for f in p.facets() {
            if !self.rays.contains(&f.rho) {
                return Err(ToricError::Incompatible(format!(
                    "facet normal {:?} is not a ray",
                    f.rho
                )));
            }
        }
        let coeffs: Vec<i64> = self
            .rays
            .iter()
            .map(|r| -p.vertices().iter().map(|v| lattice::dot(v, r)).min().unwrap())
            .collect();
        for c in &self.max_cones {
            let ok = p
                .vertices()
                .iter()
                .any(|v| c.iter().all(|&j| lattice::dot(v, &self.rays[j]) == -coeffs[j]));
            if !ok {
                return Err(ToricError::Incompatible(format!(
                    "support function is not linear on cone {c:?}"
                )));
            }
        }
        Ok(TDivisor { coeffs })
    }

    /// Vertex functionals `m_σ` with `⟨m_σ, ρ_j⟩ = −b_j` on each cone and the
    /// concavity verdict.
    pub fn support_function(&self, d: &TDivisor) -> Result<PLFunction, ToricError> {
        if d.coeffs.len() != self.rays.len() {
            return Err(ToricError::LengthMismatch {
                expected: self.rays.len(),
                found: d.coeffs.len(),
            });
        }
        if !self.is_regular() {
            return Err(ToricError::NotRegular);
        }
        let mut functionals = Vec::with_capacity(self.max_cones.len());
        let mut concave = true;
        let mut strict = true;
        for c in &self.max_cones {
            let rows = self.cone_rays(c);
            let rhs: Vec<i64> = c.iter().map(|&j| -d.coeffs[j]).collect();
            let m = solve_rational(&rows, &rhs).ok_or(ToricError::NotRegular)?;
            let m: IVec = m
                .into_iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    x.to_integer() as i64
                })
                .collect();
            for (k, r) in self.rays.iter().enumerate() {
                let lhs = lattice::dot(&m, r);
                if lhs < -d.coeffs[k] {
                    concave = false;
                }
                if !c.contains(&k) && lhs == -d.coeffs[k] {
                    strict = false;
                }
            }
            functionals.push(m);
        }
        let distinct = functionals.iter().collect::<BTreeSet<_>>().len() == functionals.len();
        let concavity = if !concave {
            Concavity::NotConcave
        } else if strict && distinct {
            Concavity::StrictlyConcave
        } else {
            Concavity::Concave
        };
        Ok(PLFunction {
            functionals,
            concavity,
        })
    }

    /// Regular refinement of a complete two-dimensional fan by repeated cone splitting.
    pub fn desingularize_2d(&self) -> Result<Fan, ToricError> {
        if self.nvars != 2 {
            return Err(ToricError::UnsupportedDimension);
        }
        let mut rays = self.rays.clone();
        let mut todo: Vec<Vec<usize>> = self.max_cones.clone();
        let mut done = Vec::new();
        while let Some(c) = todo.pop() {
            let (u, v) = (rays[c[0]].clone(), rays[c[1]].clone());
            let det = lattice::det(&[u.clone(), v.clone()]);
            if det.abs() == 1 {
                done.push(c);
                continue;
            }
            let w = parallelogram_point(&u, &v, det);
            let idx = match rays.iter().position(|r| *r == w) {
                Some(i) => i,
                None => {
                    rays.push(w);
                    rays.len() - 1
                }
            };
            todo.push(vec![c[0], idx]);
            todo.push(vec![idx, c[1]]);
        }
        done.sort();
        Ok(Fan {
            nvars: 2,
            rays,
            max_cones: done,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rays": self.rays,
            "max_cones": self.max_cones,
            "regular": self.is_regular(),
            "first_orthant": self.contains_first_orthant(),
        })
    }
}

/// A primitive lattice point `λu + μv` with `0 < λ, μ < 1`.
fn parallelogram_point(u: &[i64], v: &[i64], det: i64) -> IVec {
    let corners = [vec![0, 0], u.to_vec(), v.to_vec(), vec![u[0] + v[0], u[1] + v[1]]];
    let lo: IVec = (0..2).map(|i| corners.iter().map(|c| c[i]).min().unwrap()).collect();
    let hi: IVec = (0..2).map(|i| corners.iter().map(|c| c[i]).max().unwrap()).collect();
    for x in lo[0]..=hi[0] {
        for y in lo[1]..=hi[1] {
            // λ·det = det(x,v), μ·det = det(u,x)
            let l = x * v[1] - y * v[0];
            let m = u[0] * y - u[1] * x;
            let inside = |t: i64| {
                if det > 0 {
                    t > 0 && t < det
                } else {
                    t < 0 && t > det
                }
            };
            if inside(l) && inside(m) {
                return lattice::primitive(&[x, y]);
            }
        }
    }
    unreachable!("a non-unimodular cone has an interior parallelogram point")
}

/// `D_P + K` is globally generated.
pub fn is_large(p: &LatticePolytope) -> Result<bool, ToricError> {
    if !p.is_smooth()?.smooth {
        return Err(ToricError::NotSmooth);
    }
    let fan = Fan::normal(p)?;
    let d = fan.divisor_of(p)?.add(&TDivisor::canonical(fan.rays().len()));
    Ok(fan.support_function(&d)?.concavity.is_concave())
}

/// Vanishing of `H^{0,q}(ℙⁿ, O(a))`.
pub fn hq_vanishes_pn(n: usize, a: i64, q: i64) -> Result<bool, ToricError> {
    if q < 0 || q > n as i64 {
        return Err(ToricError::DegreeOutOfRange { q, n });
    }
    let n = n as i64;
    Ok((q == 0 && a < 0) || (1 <= q && q < n) || (q == n && a >= -n))
}

/// Vanishing of `H^{0,q}` of `O(a₁)⊠⋯⊠O(a_r)` on `ℙ^{n₁}×⋯×ℙ^{n_r}` via Künneth.
pub fn hq_vanishes_product(ns: &[usize], as_: &[i64], q: i64) -> Result<bool, ToricError> {
    if ns.len() != as_.len() {
        return Err(ToricError::DimensionMismatch {
            expected: ns.len(),
            found: as_.len(),
        });
    }
    let n: usize = ns.iter().sum();
    if q < 0 || q > n as i64 {
        return Err(ToricError::DegreeOutOfRange { q, n });
    }
    // every decomposition q = Σ q_i must contain a vanishing factor
    fn rec(ns: &[usize], as_: &[i64], q: i64) -> bool {
        match ns.split_first() {
            None => q != 0,
            Some((&n0, rest)) => (0..=(n0 as i64).min(q)).all(|q0| {
                hq_vanishes_pn(n0, as_[0], q0).unwrap() || rec(rest, &as_[1..], q - q0)
            }),
        }
    }
    Ok(rec(ns, as_, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArkeMode {
    Scaled,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArkeClause {
    /// Nonnegative multiple of a globally generated class.
    NonnegativeMultiple,
    /// Negative multiple of a large polytope in middle degree.
    LargeNegativeMultiple,
    /// Künneth decomposition on a product of projective spaces.
    Kunneth,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArkeStep {
    pub q: usize,
    /// Worst index set for this `q` (0-based polynomial indices).
    pub j: Vec<usize>,
    /// The twist: a multiple of P in scaled mode, per-factor degrees in product mode.
    pub twist: Vec<i64>,
    pub clause: Option<ArkeClause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArkeReport {
    pub holds: bool,
    pub steps: Vec<ArkeStep>,
}

/// Decides the vanishing condition for `Q = cP`, `P_j = d_j P`, over all
/// `1 ≤ q ≤ min(m−1, n)` and index sets of size `q+1`.
pub fn arke_condition(
    p: &LatticePolytope,
    ds: &[i64],
    c: i64,
    mode: ArkeMode,
) -> Result<ArkeReport, ToricError> {
    match mode {
        ArkeMode::Scaled => arke_scaled(p, ds, c),
        ArkeMode::Product => {
            let sp = p.as_simplex_product().ok_or(ToricError::NotSimplexProduct)?;
            let dmat: Vec<Vec<i64>> = ds
                .iter()
                .map(|d| sp.degrees.iter().map(|dk| d * dk).collect())
                .collect();
            let cs: Vec<i64> = sp.degrees.iter().map(|dk| c * dk).collect();
            arke_product(&sp.dims(), &dmat, &cs)
        }
    }
}

fn arke_scaled(p: &LatticePolytope, ds: &[i64], c: i64) -> Result<ArkeReport, ToricError> {
    let n = p.nvars();
    if !p.contains(&vec![0; n]) {
        return Err(ToricError::OriginNotContained);
    }
    let large = is_large(p)?;
    let m = ds.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| ds[b].cmp(&ds[a]).then(a.cmp(&b)));
    let mut steps = Vec::new();
    for q in 1..=(m.saturating_sub(1)).min(n) {
        let mut j: Vec<usize> = order[..q + 1].to_vec();
        j.sort();
        let s = c - j.iter().map(|&i| ds[i]).sum::<i64>();
        let clause = if s >= 0 {
            Some(ArkeClause::NonnegativeMultiple)
        } else if large && q < n {
            Some(ArkeClause::LargeNegativeMultiple)
        } else {
            None
        };
        steps.push(ArkeStep {
            q,
            j,
            twist: vec![s],
            clause,
        });
    }
    Ok(ArkeReport {
        holds: steps.iter().all(|s| s.clause.is_some()),
        steps,
    })
}

/// Product-of-simplices version: `dmat[j][k]` is the degree of `P_j` in
/// factor `k` and `cs[k]` the degree of `Q`. Enumerates every index set.
pub fn arke_product(ns: &[usize], dmat: &[Vec<i64>], cs: &[i64]) -> Result<ArkeReport, ToricError> {
    let n: usize = ns.iter().sum();
    let m = dmat.len();
    let mut steps = Vec::new();
    for q in 1..=(m.saturating_sub(1)).min(n) {
        let mut failing = None;
        let mut worst = None;
        for j in lattice::combinations(m, q + 1) {
            let twist: Vec<i64> = (0..ns.len())
                .map(|k| cs[k] - j.iter().map(|&i| dmat[i][k]).sum::<i64>())
                .collect();
            if !hq_vanishes_product(ns, &twist, q as i64)? {
                failing = Some((j, twist));
                break;
            }
            if worst.is_none() {
                worst = Some((j, twist));
            }
        }
        let (clause, (j, twist)) = match failing {
            Some(f) => (None, f),
            None => (Some(ArkeClause::Kunneth), worst.expect("at least one index set")),
        };
        steps.push(ArkeStep { q, j, twist, clause });
    }
    Ok(ArkeReport {
        holds: steps.iter().all(|s| s.clause.is_some()),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex62() -> LatticePolytope {
        LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 2]]).unwrap()
    }

    #[test]
    fn fans_of_standard_polytopes() {
        let f = Fan::normal(&LatticePolytope::simplex(2, 1)).unwrap();
        assert_eq!(f.rays(), &[vec![1, 0], vec![0, 1], vec![-1, -1]]);
        assert!(f.is_regular() && f.is_complete() && f.contains_first_orthant());

        let f = Fan::normal(&ex62()).unwrap();
        assert_eq!(f.rays(), &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![-1, -1]]);
        assert_eq!(f.max_cones().len(), 4);
        assert!(f.is_regular() && f.is_complete());
        assert_eq!(f.divisor_of(&ex62()).unwrap().coeffs, vec![0, 0, 1, 2]);
        assert_eq!(f.divisor_of(&ex62().scale_int(2)).unwrap().coeffs, vec![0, 0, 2, 4]);

        let sq = LatticePolytope::simplex_product(&[1, 1], &[2, 3]);
        let f = Fan::normal(&sq).unwrap();
        assert_eq!(f.rays(), &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]]);
        assert!(f.is_regular());
    }

    #[test]
    fn non_regular_fan() {
        let p = LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![0, 2]]).unwrap();
        let f = Fan::normal(&p).unwrap();
        assert!(!f.is_regular());
        assert!(f.support_function(&f.divisor_of(&p).unwrap()).is_err());
        let g = f.desingularize_2d().unwrap();
        assert!(g.is_regular() && g.is_complete());
        let d = g.divisor_of(&p).unwrap();
        assert!(g.support_function(&d).unwrap().concavity.is_concave());
    }

    #[test]
    fn concavity_cases() {
        let p = ex62();
        let f = Fan::normal(&p).unwrap();
        let psi = f.support_function(&f.divisor_of(&p).unwrap()).unwrap();
        assert_eq!(psi.concavity, Concavity::StrictlyConcave);
        let verts: BTreeSet<IVec> = p.vertices().iter().cloned().collect();
        assert_eq!(psi.functionals.into_iter().collect::<BTreeSet<_>>(), verts);
        let zero = TDivisor { coeffs: vec![0; 4] };
        assert_eq!(f.support_function(&zero).unwrap().concavity, Concavity::Concave);

        let sq = Fan::normal(&LatticePolytope::simplex_product(&[1, 1], &[1, 1])).unwrap();
        let d = TDivisor {
            coeffs: vec![0, 0, 1, -1],
        };
        assert_eq!(sq.support_function(&d).unwrap().concavity, Concavity::NotConcave);
    }

    #[test]
    fn largeness() {
        assert!(!is_large(&LatticePolytope::simplex(2, 1)).unwrap());
        assert!(is_large(&LatticePolytope::simplex(2, 3)).unwrap());
        assert!(is_large(&LatticePolytope::simplex(3, 4)).unwrap());
        assert!(!is_large(&ex62()).unwrap());
        assert!(is_large(&ex62().scale_int(2)).unwrap());
    }

    #[test]
    fn projective_space_vanishing() {
        assert!(hq_vanishes_pn(2, -1, 1).unwrap());
        assert!(!hq_vanishes_pn(2, -3, 2).unwrap());
        assert!(!hq_vanishes_pn(1, 5, 0).unwrap());
        assert!(hq_vanishes_pn(2, 0, 3).is_err());
        assert!(hq_vanishes_product(&[1, 1], &[2, 3], 1).unwrap());
        assert!(hq_vanishes_product(&[1, 1], &[-1, -2], 1).unwrap());
        // O(−2)⊠O(0) on ℙ¹×ℙ¹ has H¹ = H¹(O(−2))⊗H⁰(O(0)) ≠ 0
        assert!(!hq_vanishes_product(&[1, 1], &[-2, 0], 1).unwrap());
    }

    #[test]
    fn arke_examples() {
        let r = arke_condition(&ex62(), &[1, 1], 2, ArkeMode::Scaled).unwrap();
        assert!(r.holds);
        assert_eq!(r.steps[0].clause, Some(ArkeClause::NonnegativeMultiple));
        let r = arke_condition(&ex62(), &[1, 1], 1, ArkeMode::Scaled).unwrap();
        assert!(!r.holds);

        for n in 1..=3usize {
            for d in 1..=3i64 {
                let s = LatticePolytope::simplex(n, 1);
                let ds = vec![d; n + 1];
                let c = (n as i64 + 1) * d - n as i64;
                assert!(arke_condition(&s, &ds, c, ArkeMode::Product).unwrap().holds);
                assert!(!arke_condition(&s, &ds, c - 1, ArkeMode::Product).unwrap().holds);
            }
        }
    }
}
