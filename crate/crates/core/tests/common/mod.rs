#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use sparse_membership::lattice::IVec;
use sparse_membership::poly::{parse, Exponent, SparsePoly};
use sparse_membership::polytope::LatticePolytope;

pub fn names(n: usize) -> Vec<String> {
    ["x", "y", "z", "u"][..n].iter().map(|s| s.to_string()).collect()
}

pub fn poly(s: &str, vars: &[&str]) -> SparsePoly {
    let v: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    parse(s, &v).unwrap()
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn example_polytope() -> LatticePolytope {
    LatticePolytope::hull(&[vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 2]]).unwrap()
}

pub fn example_system() -> (Vec<SparsePoly>, SparsePoly) {
    let v = ["z", "w"];
    (
        vec![poly("z + z*w + w^2", &v), poly("z + 2*z*w + 3*w^2", &v)],
        poly("z^2 + 2*z*w", &v),
    )
}

/// Random polynomial supported on a random subset of `pts`, small nonzero integer coefficients.
pub fn random_poly(rng: &mut impl Rng, n: usize, pts: &[IVec], density: f64) -> SparsePoly {
    loop {
        let mut terms: Vec<(Exponent, BigRational)> = Vec::new();
        for x in pts {
            if rng.gen_bool(density) {
                let mut c = 0;
                while c == 0 {
                    c = rng.gen_range(-4..=4);
                }
                terms.push((Exponent::from_ivec(x).unwrap(), int(c)));
            }
        }
        if !terms.is_empty() {
            return SparsePoly::from_terms(n, terms).unwrap();
        }
    }
}

/// Dense polynomial of exact total degree `d` with random coefficients.
pub fn random_dense(rng: &mut impl Rng, n: usize, d: i64) -> SparsePoly {
    let pts = LatticePolytope::simplex(n, d).lattice_points();
    loop {
        let f = random_poly(rng, n, &pts, 0.8);
        if f.total_degree() == Some(d as u64) {
            return f;
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn rank_and_consistency(mut m: Vec<Vec<BigRational>>, ncols: usize) -> (usize, bool) {
    // full pivoting over the coefficient block; the last column is the right-hand side
    let rows = m.len();
    let mut col_used = vec![false; ncols];
    let mut rank = 0;
    loop {
        let mut pivot = None;
        'search: for r in rank..rows {
            for c in 0..ncols {
                if !col_used[c] && !m[r][c].is_zero() {
                    pivot = Some((r, c));
                    break 'search;
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap(rank, pr);
        col_used[pc] = true;
        let inv = m[rank][pc].recip();
        for x in m[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[pc].is_zero() {
                let f = row[pc].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x = &*x - &f * p;
                }
            }
        }
        rank += 1;
    }
    let consistent = m[rank..].iter().all(|row| row[ncols].is_zero());
    (rank, consistent)
}

/// Feasibility of `Σ F_j G_j = rhs` with `supp(F_j G_j) ⊆ Q`, built and
/// eliminated densely without touching the library's solver.
pub fn naive_feasible(fs: &[SparsePoly], rhs: &SparsePoly, q: &LatticePolytope) -> bool {
    let pts = q.lattice_points();
    let index = |x: &IVec| pts.iter().position(|p| p == x);
    let mut columns: Vec<Vec<(usize, BigRational)>> = Vec::new();
    for f in fs {
        let supp: Vec<(IVec, BigRational)> = f.terms().map(|(e, c)| (e.to_ivec(), c.clone())).collect();
        for b in &pts {
            let shifted: Option<Vec<(usize, BigRational)>> = supp
                .iter()
                .map(|(s, c)| {
                    let x: IVec = s.iter().zip(b).map(|(a, b)| a + b).collect();
                    index(&x).map(|i| (i, c.clone()))
                })
                .collect();
            if let Some(col) = shifted {
                columns.push(col);
            }
        }
    }
    let ncols = columns.len();
    let mut m = vec![vec![BigRational::zero(); ncols + 1]; pts.len()];
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col {
            m[*i][j] = &m[*i][j] + c;
        }
    }
    for (e, c) in rhs.terms() {
        match index(&e.to_ivec()) {
            Some(i) => m[i][ncols] = c.clone(),
            None => return false,
        }
    }
    rank_and_consistency(m, ncols).1
}

/// Exact `Σ F_j G_j − Φ^ν == 0` and support containment, recomputed here.
pub fn check_identity(fs: &[SparsePoly], gs: &[SparsePoly], phi: &SparsePoly, nu: u32, q: &LatticePolytope) -> bool {
    let mut sum = SparsePoly::zero(phi.nvars());
    for (f, g) in fs.iter().zip(gs) {
        let fg = f * g;
        if fg.terms().any(|(e, _)| !q.contains(&e.to_ivec())) {
            return false;
        }
        sum = &sum + &fg;
    }
    let mut rhs = SparsePoly::one(phi.nvars());
    for _ in 0..nu {
        rhs = &rhs * phi;
    }
    (&sum - &rhs).is_zero()
}

pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim H^q(ℙⁿ, O(a))` from the monomial count and Serre duality.
pub fn hq_dim_pn(n: i64, a: i64, q: i64) -> i64 {
    if q == 0 && a >= 0 {
        binomial(n + a, n)
    } else if q == n && a < -n {
        binomial(-a - 1, n)
    } else {
        0
    }
}

/// Künneth dimension on a product of projective spaces.
pub fn hq_dim_product(ns: &[i64], as_: &[i64], q: i64) -> i64 {
    match ns.split_first() {
        None => i64::from(q == 0),
        Some((&n0, rest)) => (0..=n0.min(q))
            .map(|q0| hq_dim_pn(n0, as_[0], q0) * hq_dim_product(rest, &as_[1..], q - q0))
            .sum(),
    }
}
