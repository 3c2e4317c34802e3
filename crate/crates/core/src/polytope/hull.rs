//! Exact facet enumeration by the double-description method.
//!
//! Given lattice points that affinely span ℤᵏ, the facets of their convex
//! hull are the extreme rays of the cone `{(b, ρ) : b + ⟨ρ, p⟩ ≥ 0 ∀p}`.
//! The cone is pointed because the homogenised points have full rank.

use crate::lattice::{self, IVec};

#[derive(Clone)]
struct Ray {
    v: Vec<i64>,
    tight: Bits,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn superset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

fn eval(row: &[i64], v: &[i64]) -> i128 {
    row.iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum()
}

fn primitive128(v: Vec<i128>) -> Vec<i64> {
    use num_integer::Integer;
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    v.into_iter()
        .map(|x| i64::try_from(if g > 1 { x / g } else { x }).expect("hull overflow"))
        .collect()
}

/// Adjugate-based inverse columns: returns `r_i` with `A r_i = |det A| eᵢ`.
fn initial_rays(a: &[IVec]) -> Vec<IVec> {
    let d = a.len();
    let det = lattice::det(a);
    assert!(det != 0, "initial rows must be independent");
    let sign = det.signum();
    (0..d)
        .map(|i| {
            // column i of adj(A): cofactor C_{i j} for j in 0..d, i.e. adj[j][i] = C[i][j]
            (0..d)
                .map(|j| {
                    let minor: Vec<IVec> = (0..d)
                        .filter(|&r| r != i)
                        .map(|r| {
                            (0..d)
                                .filter(|&c| c != j)
                                .map(|c| a[r][c])
                                .collect()
                        })
                        .collect();
                    let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                    s * sign * lattice::det(&minor)
                })
                .collect()
        })
        .collect()
}

/// Facets `(ρ, a)` of the hull of `points ⊆ ℤᵏ`, meaning `⟨x, ρ⟩ ≥ −a`,
/// with ρ primitive. The points must affinely span ℝᵏ with `k ≥ 1`.
pub(crate) fn facets(points: &[IVec]) -> Vec<(IVec, i64)> {
    let k = points[0].len();
    let d = k + 1;
    let rows: Vec<IVec> = points
        .iter()
        .map(|p| std::iter::once(1).chain(p.iter().copied()).collect())
        .collect();
    let nrows = rows.len();

    // pick d independent rows greedily
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..nrows {
        let mut trial: Vec<IVec> = chosen.iter().map(|&j| rows[j].clone()).collect();
        trial.push(rows[i].clone());
        if lattice::rank(&trial) == trial.len() {
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), d, "points do not span the ambient space");

    let basis_rows: Vec<IVec> = chosen.iter().map(|&j| rows[j].clone()).collect();
    let mut rays: Vec<Ray> = initial_rays(&basis_rows)
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let mut tight = Bits::new(nrows);
            for (jj, &row) in chosen.iter().enumerate() {
                if jj != i {
                    tight.set(row);
                }
            }
            Ray {
                v: primitive128(v.into_iter().map(|x| x as i128).collect()),
                tight,
            }
        })
        .collect();

    for (ri, row) in rows.iter().enumerate() {
        if chosen.contains(&ri) {
            continue;
        }
        let vals: Vec<i128> = rays.iter().map(|r| eval(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        let zero: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] == 0).collect();

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for &i in &pos {
            next.push(rays[i].clone());
        }
        for &i in &zero {
            let mut r = rays[i].clone();
            r.tight.set(ri);
            next.push(r);
        }
        if !neg.is_empty() {
            for &p in &pos {
                for &q in &neg {
                    let common = rays[p].tight.and(&rays[q].tight);
                    if (common.count() as usize) + 2 < d {
                        continue;
                    }
                    let adjacent = (0..rays.len())
                        .filter(|&r| r != p && r != q)
                        .all(|r| !rays[r].tight.superset_of(&common));
                    if !adjacent {
                        continue;
                    }
                    let (vp, vq) = (vals[p], vals[q]);
                    let v: Vec<i128> = rays[q]
                        .v
                        .iter()
                        .zip(&rays[p].v)
                        .map(|(&x, &y)| vp * x as i128 - vq * y as i128)
                        .collect();
                    let mut tight = common;
                    tight.set(ri);
                    next.push(Ray {
                        v: primitive128(v),
                        tight,
                    });
                }
            }
        }
        rays = next;
    }

    let mut out: Vec<(IVec, i64)> = rays
        .into_iter()
        .map(|r| {
            let b = r.v[0];
            let rho = r.v[1..].to_vec();
            let g = lattice::content(&rho);
            assert!(g > 0, "degenerate facet normal");
            debug_assert_eq!(b % g, 0);
            (rho.iter().map(|x| x / g).collect(), b / g)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_facets() {
        let pts = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        let f = facets(&pts);
        assert_eq!(f.len(), 4);
        assert!(f.contains(&(vec![1, 0], 0)));
        assert!(f.contains(&(vec![-1, 0], 1)));
    }

    #[test]
    fn interior_points_ignored() {
        let pts = vec![vec![0, 0], vec![4, 0], vec![0, 4], vec![1, 1], vec![2, 1], vec![2, 2]];
        let f = facets(&pts);
        assert_eq!(f.len(), 3);
        assert!(f.contains(&(vec![-1, -1], 4)));
    }

    #[test]
    fn cube_and_octahedron() {
        let mut cube = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    cube.push(vec![x, y, z]);
                }
            }
        }
        assert_eq!(facets(&cube).len(), 6);
        let oct = vec![
            vec![1, 0, 0],
            vec![-1, 0, 0],
            vec![0, 1, 0],
            vec![0, -1, 0],
            vec![0, 0, 1],
            vec![0, 0, -1],
        ];
        let f = facets(&oct);
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|(_, a)| *a == 1));
    }

    #[test]
    fn segment_in_one_dimension() {
        let f = facets(&[vec![0], vec![3], vec![1]]);
        assert_eq!(f, vec![(vec![-1], 3), (vec![1], 0)]);
    }
}
