//! Lattice polytopes in the nonnegative orthant.
//!
//! A [`LatticePolytope`] keeps both descriptions: its vertices and its facet
//! inequalities `⟨x, ρ⟩ ≥ −a` with primitive inward normals. Polytopes that
//! are not full-dimensional also carry the integer equations of their
//! affine hull.

mod hull;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{self, IVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("empty point set")]
    Empty,
    #[error("point {point:?} has length {found}, expected {expected}")]
    DimensionMismatch {
        point: IVec,
        expected: usize,
        found: usize,
    },
    #[error("point {0:?} has a negative coordinate")]
    NegativeCoordinate(IVec),
    #[error("scaling by {factor} sends vertex {vertex:?} off the lattice")]
    NonLatticeVertex { vertex: IVec, factor: String },
    #[error("scale factor must be nonnegative, got {0}")]
    NegativeScale(String),
    #[error("polytope has dimension {dim} in an ambient space of dimension {nvars}")]
    NotFullDimensional { dim: usize, nvars: usize },
    #[error("polytope is a single point")]
    ZeroDimensional,
    #[error("the origin is not in the polytope")]
    OriginNotContained,
    #[error("point {point:?} violates the facet through the origin with normal {rho:?}; no dilate contains it")]
    NoScaling { point: IVec, rho: IVec },
}

/// Facet inequality `⟨x, rho⟩ ≥ −a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub rho: IVec,
    pub a: i64,
}

impl Facet {
    /// `⟨x, ρ⟩ + a`, zero on the facet and positive inside.
    pub fn slack(&self, x: &[i64]) -> i64 {
        lattice::dot(x, &self.rho) + self.a
    }
}

/// Affine-hull equation `⟨x, eta⟩ = h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub eta: IVec,
    pub h: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    nvars: usize,
    dim: usize,
    vertices: Vec<IVec>,
    facets: Vec<Facet>,
    equations: Vec<Equation>,
}

/// A face of a polytope, given by indices into its vertex and facet lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub facets: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexSmoothness {
    pub vertex: IVec,
    pub tight_facets: usize,
    pub det: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    pub vertices: Vec<VertexSmoothness>,
}

/// Smallest dilate of a polytope that contains a point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scaling {
    /// Smallest real factor.
    pub e_min: BigRational,
    /// Smallest factor at least `e_min` for which the dilate is a lattice polytope.
    pub e: BigRational,
    pub e_min_admissible: bool,
}

/// `d₁Σ^{n₁} × ⋯ × d_rΣ^{n_r}` over a partition of the variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplexProduct {
    pub blocks: Vec<Vec<usize>>,
    pub degrees: Vec<i64>,
}

impl SimplexProduct {
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Degree ascending, then lexicographically descending.
pub fn graded_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| b.cmp(a))
}

fn facet_key(rho: &[i64]) -> (usize, usize, std::cmp::Reverse<IVec>) {
    let is_unit = rho.iter().filter(|&&x| x != 0).count() == 1 && rho.contains(&1);
    let first = rho.iter().position(|&x| x != 0).unwrap_or(rho.len());
    (usize::from(!is_unit), first, std::cmp::Reverse(rho.to_vec()))
}

fn unit(n: usize, i: usize) -> IVec {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

/// Vertices of a full-dimensional point set in ℤᵏ given its facets.
fn vertex_indices(points: &[IVec], facets: &[(IVec, i64)], k: usize) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            let tight: Vec<IVec> = facets
                .iter()
                .filter(|(r, a)| lattice::dot(&points[i], r) + a == 0)
                .map(|(r, _)| r.clone())
                .collect();
            lattice::rank(&tight) == k
        })
        .collect()
}

/// Normalized volume in the lattice of the affine hull of `points`, by
/// pyramids over the facets missing a fixed vertex; face volumes are
/// memoized by vertex set.
fn volume_of_points(points: &[IVec]) -> u64 {
    let mut memo = BTreeMap::new();
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    face_volume(pts, &mut memo)
}

fn face_volume(points: Vec<IVec>, memo: &mut BTreeMap<Vec<IVec>, u64>) -> u64 {
    if let Some(&v) = memo.get(&points) {
        return v;
    }
    let o = &points[0];
    let n = o.len();
    let diffs: Vec<IVec> = points.iter().map(|p| lattice::sub(p, o)).collect();
    let basis = lattice::saturated_span(&diffs, n);
    let k = basis.len();
    let total = if k == 0 {
        1
    } else {
        let local: Vec<IVec> = diffs
            .iter()
            .map(|d| lattice::integer_coordinates(&basis, d))
            .collect();
        let fs = hull::facets(&local);
        let vi = vertex_indices(&local, &fs, k);
        let apex = &local[vi[0]];
        let mut total = 0u64;
        for (rho, a) in &fs {
            let h = lattice::dot(apex, rho) + a;
            if h == 0 {
                continue;
            }
            let on: Vec<IVec> = vi
                .iter()
                .filter(|&&i| lattice::dot(&local[i], rho) + a == 0)
                .map(|&i| points[i].clone())
                .collect();
            total += h as u64 * face_volume(on, memo);
        }
        total
    };
    memo.insert(points, total);
    total
}

fn to_i128_ratio(c: &BigRational) -> (i128, i128) {
    (
        c.numer().to_i128().expect("scale numerator too large"),
        c.denom().to_i128().expect("scale denominator too large"),
    )
}

impl LatticePolytope {
    /// Convex hull of a finite point set in ℤⁿ≥0.
    pub fn hull(points: &[IVec]) -> Result<Self, PolytopeError> {
        let Some(first) = points.first() else {
            return Err(PolytopeError::Empty);
        };
        let n = first.len();
        for p in points {
            if p.len() != n {
                return Err(PolytopeError::DimensionMismatch {
                    point: p.clone(),
                    expected: n,
                    found: p.len(),
                });
            }
            if p.iter().any(|&x| x < 0) {
                return Err(PolytopeError::NegativeCoordinate(p.clone()));
            }
        }
        let pts: Vec<IVec> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let o = pts[0].clone();
        let diffs: Vec<IVec> = pts.iter().map(|p| lattice::sub(p, &o)).collect();
        let basis = lattice::saturated_span(&diffs, n);
        let k = basis.len();
        let equations: Vec<Equation> = if k == n {
            Vec::new()
        } else {
            let mut eqs: Vec<Equation> = if k == 0 {
                (0..n).map(|i| unit(n, i)).collect::<Vec<_>>()
            } else {
                lattice::integer_kernel(&basis, n)
            }
            .into_iter()
            .map(|eta| {
                let eta = canonical_sign(eta);
                let h = lattice::dot(&eta, &o);
                Equation { eta, h }
            })
            .collect();
            eqs.sort_by_key(|a| facet_key(&a.eta));
            eqs
        };

        if k == 0 {
            return Ok(LatticePolytope {
                nvars: n,
                dim: 0,
                vertices: vec![o],
                facets: Vec::new(),
                equations,
            });
        }

        let local: Vec<IVec> = if k == n {
            pts.clone()
        } else {
            diffs.iter().map(|d| lattice::integer_coordinates(&basis, d)).collect()
        };
        let local_facets = hull::facets(&local);
        let vi = vertex_indices(&local, &local_facets, k);
        let mut vertices: Vec<IVec> = vi.iter().map(|&i| pts[i].clone()).collect();
        vertices.sort_by(|a, b| graded_cmp(a, b));

        let mut facets: Vec<Facet> = if k == n {
            local_facets
                .into_iter()
                .map(|(rho, a)| Facet { rho, a })
                .collect()
        } else {
            local_facets
                .iter()
                .map(|(rk, _)| {
                    let rho = lift_normal(&basis, rk);
                    let a = -vertices.iter().map(|v| lattice::dot(v, &rho)).min().unwrap();
                    Facet { rho, a }
                })
                .collect()
        };
        facets.sort_by_key(|a| facet_key(&a.rho));

        let p = LatticePolytope {
            nvars: n,
            dim: k,
            vertices,
            facets,
            equations,
        };
        p.cross_validate();
        Ok(p)
    }

    fn cross_validate(&self) {
        for v in &self.vertices {
            assert!(self.contains(v), "vertex {v:?} violates its own H-rep");
            let tight = self.tight_rows(v);
            assert_eq!(lattice::rank(&tight), self.nvars, "vertex {v:?} is not cut out by its facets");
        }
        for f in &self.facets {
            assert_eq!(lattice::content(&f.rho), 1);
            let on: Vec<&IVec> = self.vertices.iter().filter(|v| f.slack(v) == 0).collect();
            assert!(on.len() >= self.dim, "facet {f:?} meets too few vertices");
        }
    }

    /// Normals of facets tight at `x` together with the affine-hull equations.
    fn tight_rows(&self, x: &[i64]) -> Vec<IVec> {
        self.facets
            .iter()
            .filter(|f| f.slack(x) == 0)
            .map(|f| f.rho.clone())
            .chain(self.equations.iter().map(|e| e.eta.clone()))
            .collect()
    }

    /// `d·Σⁿ`, the simplex with vertices `0, d·e₁, …, d·eₙ`.
    pub fn simplex(n: usize, d: i64) -> Self {
        let mut pts = vec![vec![0; n]];
        pts.extend((0..n).map(|i| {
            let mut e = unit(n, i);
            e[i] = d;
            e
        }));
        Self::hull(&pts).expect("simplex")
    }

    /// Product of dilated simplices on consecutive variable blocks of the given sizes.
    pub fn simplex_product(dims: &[usize], degrees: &[i64]) -> Self {
        assert_eq!(dims.len(), degrees.len());
        let n: usize = dims.iter().sum();
        let mut pts: Vec<IVec> = vec![vec![0; n]];
        let mut start = 0;
        for (&nk, &dk) in dims.iter().zip(degrees) {
            let mut next = Vec::new();
            for p in &pts {
                next.push(p.clone());
                for i in start..start + nk {
                    let mut q = p.clone();
                    q[i] = dk;
                    next.push(q);
                }
            }
            pts = next;
            start += nk;
        }
        Self::hull(&pts).expect("simplex product")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[IVec] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.nvars
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|f| f.slack(x) >= 0)
            && self.equations.iter().all(|e| lattice::dot(x, &e.eta) == e.h)
    }

    /// Normalized volume measured in the lattice of the affine hull.
    pub fn normalized_volume(&self) -> u64 {
        volume_of_points(&self.vertices)
    }

    /// Vertex index pairs that span edges.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let tight: Vec<BTreeSet<usize>> = self
            .vertices
            .iter()
            .map(|v| (0..self.facets.len()).filter(|&j| self.facets[j].slack(v) == 0).collect())
            .collect();
        let mut out = Vec::new();
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let rows: Vec<IVec> = tight[i]
                    .intersection(&tight[j])
                    .map(|&f| self.facets[f].rho.clone())
                    .chain(self.equations.iter().map(|e| e.eta.clone()))
                    .collect();
                if lattice::rank(&rows) + 1 == self.nvars {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Lattice length of the shortest edge.
    pub fn minimal_side_length(&self) -> Result<i64, PolytopeError> {
        if self.dim == 0 {
            return Err(PolytopeError::ZeroDimensional);
        }
        Ok(self
            .edges()
            .into_iter()
            .map(|(i, j)| lattice::lattice_length(&self.vertices[i], &self.vertices[j]))
            .min()
            .expect("a polytope of positive dimension has an edge"))
    }

    /// All nonempty faces, including the polytope itself.
    pub fn faces(&self) -> Vec<Face> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(all.clone());
        let mut stack = vec![all];
        while let Some(s) = stack.pop() {
            for f in &self.facets {
                let t: Vec<usize> = s
                    .iter()
                    .copied()
                    .filter(|&i| f.slack(&self.vertices[i]) == 0)
                    .collect();
                if !t.is_empty() && seen.insert(t.clone()) {
                    stack.push(t);
                }
            }
        }
        let mut faces: Vec<Face> = seen
            .into_iter()
            .map(|vs| {
                let facets = (0..self.facets.len())
                    .filter(|&j| vs.iter().all(|&i| self.facets[j].slack(&self.vertices[i]) == 0))
                    .collect();
                let o = &self.vertices[vs[0]];
                let diffs: Vec<IVec> = vs.iter().map(|&i| lattice::sub(&self.vertices[i], o)).collect();
                Face {
                    dim: lattice::rank(&diffs),
                    vertices: vs,
                    facets,
                }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
        faces
    }

    /// Dilate by a nonnegative rational; every scaled vertex must be integral.
    pub fn scale(&self, c: &BigRational) -> Result<Self, PolytopeError> {
        if c.is_negative() {
            return Err(PolytopeError::NegativeScale(c.to_string()));
        }
        let mut pts = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let mut w = Vec::with_capacity(v.len());
            for &x in v {
                let y = c * BigRational::from_integer(BigInt::from(x));
                if !y.is_integer() {
                    return Err(PolytopeError::NonLatticeVertex {
                        vertex: v.clone(),
                        factor: c.to_string(),
                    });
                }
                w.push(y.to_integer().to_i64().expect("scaled coordinate overflow"));
            }
            pts.push(w);
        }
        Self::hull(&pts)
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(c.into())).expect("integer dilate")
    }

    fn bounding_box(&self) -> (IVec, IVec) {
        let lo = (0..self.nvars)
            .map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap())
            .collect();
        let hi = (0..self.nvars)
            .map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap())
            .collect();
        (lo, hi)
    }

    /// All lattice points, sorted by degree then reverse lex.
    pub fn lattice_points(&self) -> Vec<IVec> {
        let (lo, hi) = self.bounding_box();
        let mut out: Vec<IVec> = box_points(&lo, &hi).filter(|x| self.contains(x)).collect();
        out.sort_by(|a, b| graded_cmp(a, b));
        out
    }

    /// Lattice points of the rational dilate `c·P`.
    pub fn lattice_points_of_dilate(&self, c: &BigRational) -> Vec<IVec> {
        let (num, den) = to_i128_ratio(c);
        assert!(num >= 0 && den > 0);
        let (lo, hi) = self.bounding_box();
        let lo: IVec = lo.iter().map(|&x| Integer::div_ceil(&(x as i128 * num), &den) as i64).collect();
        let hi: IVec = hi.iter().map(|&x| Integer::div_floor(&(x as i128 * num), &den) as i64).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Vec::new();
        }
        let mut out: Vec<IVec> = box_points(&lo, &hi)
            .filter(|x| {
                self.facets
                    .iter()
                    .all(|f| lattice::dot(x, &f.rho) as i128 * den >= -(f.a as i128) * num)
                    && self
                        .equations
                        .iter()
                        .all(|e| lattice::dot(x, &e.eta) as i128 * den == e.h as i128 * num)
            })
            .collect();
        out.sort_by(|a, b| graded_cmp(a, b));
        out
    }

    /// Smallest lattice polytope with the facet normals of `P` that contains
    /// `c·P`: every facet offset rounded up. `None` if that polytope has a
    /// vertex off the lattice, or `P` is not full-dimensional.
    pub fn lattice_cover(&self, c: &BigRational) -> Option<Self> {
        if !self.is_full_dimensional() {
            return None;
        }
        let (num, den) = to_i128_ratio(c);
        let offsets: Vec<i64> = self
            .facets
            .iter()
            .map(|f| Integer::div_ceil(&(f.a as i128 * num), &den) as i64)
            .collect();
        let n = self.nvars;
        let mut verts = BTreeSet::new();
        for subset in lattice::combinations(self.facets.len(), n) {
            let m: Vec<IVec> = subset.iter().map(|&i| self.facets[i].rho.clone()).collect();
            let d = lattice::det(&m);
            if d == 0 {
                continue;
            }
            // Cramer's rule: the vertex is (d_1, …, d_n)/d
            let nums: IVec = (0..n)
                .map(|k| {
                    let mk: Vec<IVec> = m
                        .iter()
                        .zip(&subset)
                        .map(|(row, &i)| {
                            let mut r = row.clone();
                            r[k] = -offsets[i];
                            r
                        })
                        .collect();
                    lattice::det(&mk)
                })
                .collect();
            let feasible = self.facets.iter().zip(&offsets).all(|(f, &a)| {
                let s = lattice::dot(&nums, &f.rho) as i128 + a as i128 * d as i128;
                s * d.signum() as i128 >= 0
            });
            if !feasible {
                continue;
            }
            if nums.iter().any(|x| x % d != 0) {
                return None;
            }
            verts.insert(nums.iter().map(|x| x / d).collect::<IVec>());
        }
        let verts: Vec<IVec> = verts.into_iter().collect();
        Self::hull(&verts).ok()
    }

    /// Maximum coordinate sum over the polytope.
    pub fn degree(&self) -> i64 {
        self.vertices.iter().map(|v| v.iter().sum::<i64>()).max().unwrap()
    }

    pub fn is_smooth(&self) -> Result<SmoothnessReport, PolytopeError> {
        if !self.is_full_dimensional() {
            return Err(PolytopeError::NotFullDimensional {
                dim: self.dim,
                nvars: self.nvars,
            });
        }
        let n = self.nvars;
        let vertices: Vec<VertexSmoothness> = self
            .vertices
            .iter()
            .map(|v| {
                let rows: Vec<IVec> = self
                    .facets
                    .iter()
                    .filter(|f| f.slack(v) == 0)
                    .map(|f| f.rho.clone())
                    .collect();
                let det = (rows.len() == n).then(|| lattice::det(&rows).abs());
                VertexSmoothness {
                    vertex: v.clone(),
                    tight_facets: rows.len(),
                    det,
                }
            })
            .collect();
        let smooth = vertices.iter().all(|s| s.det == Some(1));
        Ok(SmoothnessReport { smooth, vertices })
    }

    /// `{b ∈ ℤⁿ≥0 : b + s ∈ P for every s ∈ S}`.
    pub fn shift_set(&self, s: &[IVec]) -> Vec<IVec> {
        if s.is_empty() {
            return Vec::new();
        }
        // ⟨b,ρ⟩ ≥ −a − min_s ⟨s,ρ⟩ for each facet; equations need ⟨s,η⟩ constant on S
        let mut shifted_eq = Vec::new();
        for e in &self.equations {
            let vals: BTreeSet<i64> = s.iter().map(|x| lattice::dot(x, &e.eta)).collect();
            if vals.len() > 1 {
                return Vec::new();
            }
            shifted_eq.push((e.eta.clone(), e.h - vals.into_iter().next().unwrap()));
        }
        let shifted: Vec<(IVec, i64)> = self
            .facets
            .iter()
            .map(|f| {
                let m = s.iter().map(|x| lattice::dot(x, &f.rho)).min().unwrap();
                (f.rho.clone(), f.a + m)
            })
            .collect();
        let (_, hi) = self.bounding_box();
        let lo_s: IVec = (0..self.nvars).map(|i| s.iter().map(|x| x[i]).min().unwrap()).collect();
        let hi_b: IVec = hi.iter().zip(&lo_s).map(|(h, l)| h - l).collect();
        if hi_b.iter().any(|&x| x < 0) {
            return Vec::new();
        }
        let lo_b = vec![0; self.nvars];
        let mut out: Vec<IVec> = box_points(&lo_b, &hi_b)
            .filter(|b| {
                shifted.iter().all(|(r, a)| lattice::dot(b, r) + a >= 0)
                    && shifted_eq.iter().all(|(eta, h)| lattice::dot(b, eta) == *h)
            })
            .collect();
        out.sort_by(|a, b| graded_cmp(a, b));
        out
    }

    /// Smallest `e` with `S ⊆ eP`, rounded up so that `eP` is a lattice polytope.
    pub fn min_scaling(&self, s: &[IVec]) -> Result<Scaling, PolytopeError> {
        if !self.is_full_dimensional() {
            return Err(PolytopeError::NotFullDimensional {
                dim: self.dim,
                nvars: self.nvars,
            });
        }
        let origin = vec![0; self.nvars];
        if !self.contains(&origin) {
            return Err(PolytopeError::OriginNotContained);
        }
        let mut e_min = BigRational::zero();
        for f in &self.facets {
            for x in s {
                let v = lattice::dot(x, &f.rho);
                if f.a == 0 {
                    if v < 0 {
                        return Err(PolytopeError::NoScaling {
                            point: x.clone(),
                            rho: f.rho.clone(),
                        });
                    }
                } else {
                    let r = BigRational::new((-v).into(), f.a.into());
                    if r > e_min {
                        e_min = r;
                    }
                }
            }
        }
        // e·v is integral for all vertices iff e ∈ (1/G)ℤ, G the gcd of all coordinates
        let g = self
            .vertices
            .iter()
            .fold(0i64, |g, v| g.gcd(&lattice::content(v)));
        let g = BigInt::from(g.max(1));
        let scaled = &e_min * BigRational::from_integer(g.clone());
        let e = BigRational::new(scaled.ceil().to_integer(), g);
        Ok(Scaling {
            e_min_admissible: e == e_min,
            e_min,
            e,
        })
    }

    /// Recognises `d₁Σ^{n₁} × ⋯ × d_rΣ^{n_r}` on some partition of the variables.
    pub fn as_simplex_product(&self) -> Option<SimplexProduct> {
        if !self.is_full_dimensional() || self.nvars == 0 {
            return None;
        }
        let n = self.nvars;
        let mut coord = vec![false; n];
        let mut blocks: Vec<(Vec<usize>, i64)> = Vec::new();
        for f in &self.facets {
            let nz: Vec<usize> = (0..n).filter(|&i| f.rho[i] != 0).collect();
            if nz.len() == 1 && f.rho[nz[0]] == 1 && f.a == 0 {
                coord[nz[0]] = true;
            } else if nz.iter().all(|&i| f.rho[i] == -1) && f.a > 0 {
                blocks.push((nz, f.a));
            } else {
                return None;
            }
        }
        if !coord.iter().all(|&c| c) {
            return None;
        }
        let mut covered = vec![false; n];
        for (b, _) in &blocks {
            for &i in b {
                if covered[i] {
                    return None;
                }
                covered[i] = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return None;
        }
        blocks.sort();
        Some(SimplexProduct {
            blocks: blocks.iter().map(|(b, _)| b.clone()).collect(),
            degrees: blocks.iter().map(|(_, d)| *d).collect(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nvars": self.nvars,
            "dim": self.dim,
            "vertices": self.vertices,
            "facets": self.facets,
            "equations": self.equations,
            "normalized_volume": self.normalized_volume(),
        })
    }
}

/// Makes the first nonzero entry positive.
fn canonical_sign(v: IVec) -> IVec {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => v.into_iter().map(|y| -y).collect(),
        _ => v,
    }
}

/// Ambient normal `Bᵀt` with `BBᵀt = ρ_k`, scaled to a primitive integer vector.
fn lift_normal(basis: &[IVec], rk: &[i64]) -> IVec {
    let k = basis.len();
    let gram: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| BigRational::from_integer(lattice::dot(&basis[i], &basis[j]).into()))
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = rk.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    let t = solve_square(gram, rhs);
    let n = basis[0].len();
    let amb: Vec<BigRational> = (0..n)
        .map(|c| {
            (0..k).fold(BigRational::zero(), |acc, i| {
                acc + &t[i] * BigRational::from_integer(basis[i][c].into())
            })
        })
        .collect();
    let l = amb.iter().fold(BigInt::from(1), |l, x| l.lcm(x.denom()));
    let ints: IVec = amb
        .iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer().to_i64().unwrap())
        .collect();
    lattice::primitive(&ints)
}

fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let k = b.len();
    for c in 0..k {
        let p = (c..k).find(|&i| !a[i][c].is_zero()).expect("singular Gram matrix");
        a.swap(c, p);
        b.swap(c, p);
        for i in 0..k {
            if i != c && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..k {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[c];
                b[i] -= t;
            }
        }
    }
    (0..k).map(|i| &b[i] / &a[i][i]).collect()
}

/// Iterates the integer box `lo ≤ x ≤ hi` in lexicographic order.
pub(crate) fn box_points(lo: &[i64], hi: &[i64]) -> impl Iterator<Item = IVec> {
    let lo = lo.to_vec();
    let hi = hi.to_vec();
    let mut cur = Some(lo.clone());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < hi[i] {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = lo[i];
        }
        Some(out)
    })
}
