//! Small exact integer linear algebra used by the polytope and toric code.
//!
//! Everything here works on `i64` vectors with `i128` intermediates. Inputs
//! are desk-scale (coordinates in the hundreds, dimension at most a handful),
//! so overflow is treated as a bug and panics with a message.

use num_integer::Integer;
use num_rational::Ratio;

pub type IVec = Vec<i64>;

fn narrow(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow in lattice arithmetic")
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// gcd of all entries (0 for the zero vector).
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides out the content; the zero vector is returned unchanged.
pub fn primitive(v: &[i64]) -> IVec {
    let g = content(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    narrow(a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum())
}

pub fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant of a square integer matrix via Bareiss elimination.
pub fn det(m: &[IVec]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    narrow(sign * a[n - 1][n - 1])
}

/// Rank over the rationals.
pub fn rank(rows: &[IVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] == 0 {
                continue;
            }
            let (x, y) = (a[r][c], a[i][c]);
            for j in c..cols {
                a[i][j] = a[i][j] * x - a[r][j] * y;
            }
            let g = a[i].iter().fold(0i128, |g, &v| g.gcd(&v));
            if g > 1 {
                a[i].iter_mut().for_each(|v| *v /= g);
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// A ℤ-basis of the integer kernel `{x ∈ ℤⁿ : A x = 0}` of an integer
/// matrix with `ncols = n` columns. The kernel lattice is always saturated.
///
/// Works by row-reducing `[Aᵀ | I]` with unimodular row operations; the rows
/// of the transform that meet zero rows of the reduced `Aᵀ` span the kernel.
pub fn integer_kernel(a: &[IVec], ncols: usize) -> Vec<IVec> {
    let m = a.len();
    // rows: (Aᵀ row, transform row)
    let mut rows: Vec<(Vec<i128>, Vec<i128>)> = (0..ncols)
        .map(|i| {
            let left = (0..m).map(|r| a[r][i] as i128).collect();
            let mut right = vec![0i128; ncols];
            right[i] = 1;
            (left, right)
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..m {
        if pivot_row >= ncols {
            break;
        }
        // Euclid on column c among rows pivot_row..
        loop {
            let nz: Vec<usize> = (pivot_row..ncols).filter(|&i| rows[i].0[c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let best = *nz
                .iter()
                .min_by_key(|&&i| rows[i].0[c].unsigned_abs())
                .unwrap();
            rows.swap(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..ncols {
                let q = Integer::div_floor(&rows[i].0[c], &rows[pivot_row].0[c]);
                if q != 0 {
                    let (head, tail) = rows.split_at_mut(i);
                    let p = &head[pivot_row];
                    let r = &mut tail[0];
                    for (x, y) in r.0.iter_mut().zip(&p.0) {
                        *x -= q * y;
                    }
                    for (x, y) in r.1.iter_mut().zip(&p.1) {
                        *x -= q * y;
                    }
                }
                if rows[i].0[c] != 0 {
                    done = false;
                }
            }
            if done {
                pivot_row += 1;
                break;
            }
        }
    }
    rows[pivot_row..]
        .iter()
        .map(|(_, t)| {
            let v: IVec = t.iter().map(|&x| narrow(x)).collect();
            primitive(&v)
        })
        .collect()
}

/// Saturated lattice basis of `span(dirs) ∩ ℤⁿ`.
pub fn saturated_span(dirs: &[IVec], n: usize) -> Vec<IVec> {
    let nonzero: Vec<IVec> = dirs.iter().filter(|d| d.iter().any(|&x| x != 0)).cloned().collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let normals = integer_kernel(&nonzero, n);
    if normals.is_empty() {
        return (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
    }
    let mut basis = integer_kernel(&normals, n);
    basis.sort();
    basis
}

/// Solves `Σ cᵢ basis[i] = x` over ℚ, returning `None` when `x` is outside
/// the span. `basis` must be linearly independent.
pub fn coordinates(basis: &[IVec], x: &[i64]) -> Option<Vec<Ratio<i128>>> {
    let k = basis.len();
    let n = x.len();
    // Augmented system: n equations, k unknowns.
    let mut a: Vec<Vec<Ratio<i128>>> = (0..n)
        .map(|row| {
            let mut r: Vec<Ratio<i128>> = (0..k).map(|j| Ratio::from(basis[j][row] as i128)).collect();
            r.push(Ratio::from(x[row] as i128));
            r
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| a[i][c] != Ratio::from(0)) else {
            continue;
        };
        a.swap(r, p);
        let inv = Ratio::from(1) / a[r][c];
        for j in c..=k {
            a[r][j] *= inv;
        }
        for i in 0..n {
            if i != r && a[i][c] != Ratio::from(0) {
                let f = a[i][c];
                for j in c..=k {
                    let t = a[r][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if (r..n).any(|i| a[i][k] != Ratio::from(0)) {
        return None;
    }
    let mut out = vec![Ratio::from(0); k];
    for (row, &c) in piv_cols.iter().enumerate() {
        out[c] = a[row][k];
    }
    Some(out)
}

/// Integer coordinates in a lattice basis; panics if `x` is not in the lattice.
pub fn integer_coordinates(basis: &[IVec], x: &[i64]) -> IVec {
    coordinates(basis, x)
        .expect("vector outside the span of the lattice basis")
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "vector not in the lattice spanned by the basis");
            narrow(c.to_integer())
        })
        .collect()
}

/// Lattice length of a segment: gcd of the coordinate differences.
pub fn lattice_length(u: &[i64], v: &[i64]) -> i64 {
    content(&sub(u, v)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        assert_eq!(det(&[vec![0, 1], vec![-2, -1]]), 2);
        assert_eq!(det(&[vec![1, 0], vec![0, 1]]), 1);
        assert_eq!(det(&[vec![2, 3, 1], vec![4, 1, 0], vec![1, 1, 1]]), -7);
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn kernel_is_saturated() {
        // x + 2y = 0 has kernel spanned by (2,-1) (or its negative).
        let k = integer_kernel(&[vec![1, 2]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(dot(&k[0], &[1, 2]), 0);
        assert_eq!(content(&k[0]), 1);
        // 2x - 2y = 0: kernel (1,1), not (2,2).
        let k = integer_kernel(&[vec![2, -2]], 2);
        assert_eq!(primitive(&k[0]).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn saturation_of_edge() {
        // The edge from (0,0) to (2,0) has direction lattice ℤ·(1,0).
        let b = saturated_span(&[vec![2, 0]], 2);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 0]);
        let c = integer_coordinates(&b, &[2, 0]);
        assert_eq!(c[0].abs(), 2);
    }

    #[test]
    fn rank_cases() {
        assert_eq!(rank(&[vec![1, 2, 3], vec![2, 4, 6]]), 1);
        assert_eq!(rank(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn coordinates_outside_span() {
        assert!(coordinates(&[vec![1, 1]], &[1, 0]).is_none());
    }
}
