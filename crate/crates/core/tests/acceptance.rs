//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process;
use std::time::{Duration, Instant};

use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_membership::bounds::{self, formula, BoundOptions, Theorem};
use sparse_membership::ideals::{self, Budget, FaceVerdict, Tristate};
use sparse_membership::poly::{newton_polytope, unit_simplex_points, SparsePoly};
use sparse_membership::polytope::LatticePolytope;
use sparse_membership::solver::{self, MembershipSolution, SolveStats};
use sparse_membership::toric::{self, Fan};

const EXAMPLE_TIME_LIMIT: Duration = Duration::from_secs(1);
const CORPUS_TIME_LIMIT: Duration = Duration::from_secs(60);
const CORPUS_MIN_INSTANCES: usize = 50;
const CORPUS_MAX_POINTS: usize = 200;
const MACAULAY_MIN_INSTANCES: usize = 20;
const ORACLE_MAX_POINTS: usize = 40;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&mut Log) -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn budget() -> Budget {
    Budget(ideals::DEFAULT_BUDGET)
}

fn opts() -> BoundOptions {
    BoundOptions {
        budget: budget(),
        ..Default::default()
    }
}

/// A membership problem whose solver verdict is compared against the naive eliminator.
struct Recorded {
    fs: Vec<SparsePoly>,
    rhs: SparsePoly,
    q: LatticePolytope,
}

#[derive(Default)]
struct Log {
    solved: Vec<Recorded>,
}

impl Log {
    fn solve(&mut self, fs: &[SparsePoly], phi: &SparsePoly, nu: u32, q: &LatticePolytope) -> Option<MembershipSolution> {
        let out = solver::solve_membership(fs, phi, nu, q).expect("well-formed system");
        if q.lattice_points().len() <= ORACLE_MAX_POINTS {
            self.solved.push(Recorded {
                fs: fs.to_vec(),
                rhs: phi.pow(nu),
                q: q.clone(),
            });
        }
        out.solution()
    }
}

fn example_end_to_end(_: &mut Log) -> Outcome {
    let start = Instant::now();
    let (fs, phi) = example_system();
    let p = newton_polytope(&fs, &unit_simplex_points(2)).map_err(|e| e.to_string())?;
    let got: BTreeSet<Vec<i64>> = p.vertices().iter().cloned().collect();
    let want: BTreeSet<Vec<i64>> = [vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 2]].into_iter().collect();
    ensure!(got == want, "P has vertices {got:?}");

    let inf = ideals::no_common_zeros_at_infinity(&fs, &p, &ideals::scaled_offsets(&p, &[1, 1]), budget())
        .map_err(|e| e.to_string())?;
    ensure!(inf.verdict == Tristate::True, "check-infinity verdict {:?}", inf.verdict);
    ensure!(
        inf.faces.iter().all(|f| f.verdict == FaceVerdict::NoZero),
        "some face at infinity is not zero-free"
    );

    let cert = bounds::bound_noether(&fs, &phi, &p, &opts()).map_err(|e| e.to_string())?;
    ensure!(cert.q == p.scale_int(2), "noether Q has vertices {:?}", cert.q.vertices());
    ensure!(cert.all_verified(), "noether hypotheses not all verified");

    let sol = solver::solve_membership(&fs, &phi, 1, &cert.q)
        .map_err(|e| e.to_string())?
        .solution()
        .ok_or("infeasible at 2P")?;
    ensure!(solver::verify(&sol, &fs, &phi).ok, "solver output does not verify");

    let v = ["z", "w"];
    let pair = MembershipSolution {
        gs: vec![poly("2*z + 3*w", &v), poly("-z - w", &v)],
        nu: 1,
        q: cert.q.clone(),
        stats: SolveStats::default(),
    };
    ensure!(solver::verify(&pair, &fs, &phi).ok, "the known pair is rejected");
    let elapsed = start.elapsed();
    ensure!(elapsed < EXAMPLE_TIME_LIMIT, "took {elapsed:?}");
    Ok(format!("Q = 2P, solution and known pair verified in {elapsed:.0?}"))
}

fn dense_chart(log: &mut Log) -> Outcome {
    let start = Instant::now();
    let (fs, phi) = example_system();
    let p2 = LatticePolytope::simplex(2, 2);
    let inf = ideals::no_common_zeros_at_infinity(&fs, &p2, &ideals::scaled_offsets(&p2, &[1, 1]), budget())
        .map_err(|e| e.to_string())?;
    ensure!(inf.verdict == Tristate::False, "2Σ² check-infinity verdict {:?}", inf.verdict);
    let zero_faces: Vec<_> = inf
        .faces
        .iter()
        .filter(|f| matches!(f.verdict, FaceVerdict::Zero | FaceVerdict::AllZero))
        .collect();
    ensure!(!zero_faces.is_empty(), "no face reports a common zero");

    let sigma = LatticePolytope::simplex(2, 1);
    ensure!(log.solve(&fs, &phi, 1, &sigma.scale_int(2)).is_none(), "feasible with deg ≤ 2");
    ensure!(log.solve(&fs, &phi, 1, &sigma.scale_int(3)).is_some(), "infeasible with deg ≤ 3");
    let min = solver::minimal_feasible_c(&fs, &phi, 1, &sigma, 6).map_err(|e| e.to_string())?;
    ensure!(min.as_ref().map(|m| m.0) == Some(3), "minimal degree {:?}", min.map(|m| m.0));
    let elapsed = start.elapsed();
    ensure!(elapsed < EXAMPLE_TIME_LIMIT, "took {elapsed:?}");
    Ok(format!(
        "zero at infinity on {} face(s) of 2Σ²; degree 2 infeasible, 3 feasible in {elapsed:.0?}",
        zero_faces.len()
    ))
}

fn x_power(n: usize, k: i64) -> SparsePoly {
    let mut e = vec![0i64; n];
    e[0] = k;
    SparsePoly::monomial(sparse_membership::poly::Exponent::from_ivec(&e).unwrap(), int(1))
}

fn constants(n: usize, m: usize) -> Vec<SparsePoly> {
    (1..=m as i64).map(|c| SparsePoly::constant(n, int(c))).collect()
}

/// Degree of the certified polytope, refined to the smallest lattice polytope around `c·P`.
fn refined_degree(cert: &bounds::BoundCertificate) -> i64 {
    bounds::degree_translation(cert.lattice_refined.as_ref().unwrap_or(&cert.q))
}

fn formula_grid(_: &mut Log) -> Outcome {
    let sharp = BoundOptions {
        sharpen: true,
        ..opts()
    };
    let mut checked = 0;
    let mut formula_only = 0;
    let mut boundary: Vec<String> = Vec::new();
    for n in 1..=3usize {
        for d in 1..=5i64 {
            let p = LatticePolytope::simplex(n, d);
            let dn = d.pow(n as u32);
            for deg_phi in 0..=5i64 {
                let phi = x_power(n, deg_phi);
                for m in 1..=5usize {
                    let mu = m.min(n) as i64;
                    let floor = m.min(n + 1) as i64;

                    // radical membership
                    let cert = bounds::bound_kollar(&constants(n, m), &phi, &p, &sharp)
                        .map_err(|e| format!("kollar n={n} d={d} δ={deg_phi} m={m}: {e}"))?;
                    let main = mu * (1 + deg_phi) * dn;
                    let want = if mu * (1 + deg_phi) * d.pow(n as u32 - 1) < floor {
                        boundary.push(format!("kollar(n={n},d={d},δ={deg_phi},m={m})"));
                        floor * d
                    } else {
                        main
                    };
                    ensure!(
                        refined_degree(&cert) == want,
                        "kollar n={n} d={d} δ={deg_phi} m={m}: degree {} ≠ {want}",
                        refined_degree(&cert)
                    );
                    checked += 1;

                    // integral closure, m ≥ n
                    if m >= n {
                        let cert = bounds::bound_hickel(&constants(n, m), &phi, &p, &sharp)
                            .map_err(|e| format!("hickel n={n} d={d} δ={deg_phi} m={m}: {e}"))?;
                        let main = mu * (deg_phi + dn);
                        let want = if mu * (deg_phi + dn) < floor * d {
                            boundary.push(format!("hickel(n={n},d={d},δ={deg_phi},m={m})"));
                            floor * d
                        } else {
                            main
                        };
                        ensure!(
                            refined_degree(&cert) == want,
                            "hickel n={n} d={d} δ={deg_phi} m={m}: degree {} ≠ {want}",
                            refined_degree(&cert)
                        );
                        checked += 1;
                    }

                    // complete intersections, m = n
                    if m == n {
                        let want = deg_phi + m as i64 * dn;
                        if deg_phi == 0 {
                            // a nonzero constant Φ in a proper ideal is impossible: evaluate the closed form
                            let c = formula::ag(m, &BigRational::zero(), &int(dn), d);
                            ensure!(c * int(d) == int(want), "ag closed form at δ=0, n={n} d={d}");
                            formula_only += 1;
                        } else {
                            let v = names(n);
                            let fs: Vec<SparsePoly> = v
                                .iter()
                                .map(|x| sparse_membership::poly::parse(&format!("{x} - 1"), &v).unwrap())
                                .collect();
                            let phi = &x_power(n, deg_phi) - &SparsePoly::one(n);
                            let cert = bounds::bound_ag(&fs, &phi, &p, &sharp)
                                .map_err(|e| format!("ag n={n} d={d} δ={deg_phi}: {e}"))?;
                            ensure!(
                                refined_degree(&cert) == want,
                                "ag n={n} d={d} δ={deg_phi}: degree {} ≠ {want}",
                                refined_degree(&cert)
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
    }

    // product Macaulay with one block: F_i = x_i^{d_i}, F_{n+1} = 1 + x_1^{d_{n+1}}
    for n in 1..=3usize {
        let v = names(n);
        for ds in sorted_tuples(n + 1, 5) {
            let big = LatticePolytope::simplex(n, ds[0]);
            for m in n + 1..=5 {
                let mut fs: Vec<SparsePoly> = (0..n)
                    .map(|i| sparse_membership::poly::parse(&format!("{}^{}", v[i], ds[i]), &v).unwrap())
                    .collect();
                fs.push(sparse_membership::poly::parse(&format!("1 + {}^{}", v[0], ds[n]), &v).unwrap());
                for _ in n + 1..m {
                    fs.push(sparse_membership::poly::parse(&format!("1 + {}", v[n - 1]), &v).unwrap());
                }
                let cert = bounds::bound_macproduct(&fs, &SparsePoly::one(n), &big, &opts())
                    .map_err(|e| format!("macproduct n={n} d={ds:?} m={m}: {e}"))?;
                let want = ds.iter().sum::<i64>() - n as i64;
                ensure!(
                    bounds::degree_translation(&cert.q) == want,
                    "macproduct n={n} d={ds:?} m={m}: degree {} ≠ {want}",
                    bounds::degree_translation(&cert.q)
                );
                checked += 1;
            }
        }
    }
    let shown: Vec<&str> = boundary.iter().take(4).map(String::as_str).collect();
    Ok(format!(
        "{checked} certificates match, {formula_only} closed-form only (ag, δ = 0); \
         {} points where min(m,n+1) binds, e.g. {}",
        boundary.len(),
        shown.join(", ")
    ))
}

/// Nonincreasing `k`-tuples with entries in `1..=max`.
fn sorted_tuples(k: usize, max: i64) -> Vec<Vec<i64>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max).rev() {
        for rest in sorted_tuples(k - 1, first) {
            let mut t = vec![first];
            t.extend(rest);
            out.push(t);
        }
    }
    out
}

fn corpus_polytopes() -> Vec<LatticePolytope> {
    let h = |pts: &[[i64; 2]]| LatticePolytope::hull(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap();
    vec![
        LatticePolytope::simplex(1, 2),
        LatticePolytope::simplex(1, 3),
        LatticePolytope::simplex(2, 1),
        LatticePolytope::simplex(2, 2),
        LatticePolytope::simplex_product(&[1, 1], &[1, 1]),
        LatticePolytope::simplex_product(&[1, 1], &[2, 1]),
        example_polytope(),
        h(&[[0, 0], [1, 0], [2, 1], [2, 2], [1, 2], [0, 1]]),
        LatticePolytope::simplex(3, 1),
        LatticePolytope::simplex_product(&[1, 1, 1], &[1, 1, 1]),
    ]
}

fn soundness_corpus(log: &mut Log) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let polytopes = corpus_polytopes();
    let mut instances = 0;
    let mut solves = 0;
    let mut by_theorem: std::collections::BTreeMap<Theorem, usize> = Default::default();
    let mut attempts = 0;
    while instances < CORPUS_MIN_INSTANCES && attempts < 2000 {
        attempts += 1;
        let p = &polytopes[rng.gen_range(0..polytopes.len())];
        let n = p.nvars();
        let m = rng.gen_range(1..=(n + 1).min(4));
        let pts = p.lattice_points();
        let fs: Vec<SparsePoly> = (0..m).map(|_| random_poly(&mut rng, n, &pts, 0.6)).collect();
        let phi = if m > n && rng.gen_bool(0.5) {
            SparsePoly::one(n)
        } else {
            let small = LatticePolytope::simplex(n, 1).lattice_points();
            let mut phi = SparsePoly::zero(n);
            for f in &fs {
                phi = &phi + &(f * &random_poly(&mut rng, n, &small, 0.5));
            }
            if phi.is_zero() {
                continue;
            }
            phi
        };
        let (certs, _) = bounds::certify_all(&Theorem::ALL, &fs, &phi, p, &opts());
        let mut used = false;
        for cert in certs.iter().filter(|c| c.all_verified()) {
            if cert.q.lattice_points().len() > CORPUS_MAX_POINTS {
                continue;
            }
            let sol = log.solve(&fs, &phi, cert.nu, &cert.q);
            let Some(sol) = sol else {
                return Err(format!(
                    "{} certificate infeasible: F = {:?}, Φ = {phi}, P = {:?}, Q = {:?}, ν = {}",
                    cert.theorem,
                    fs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    p.vertices(),
                    cert.q.vertices(),
                    cert.nu
                ));
            };
            ensure!(
                check_identity(&fs, &sol.gs, &phi, cert.nu, &cert.q),
                "{} solution fails the independent identity check",
                cert.theorem
            );
            *by_theorem.entry(cert.theorem).or_default() += 1;
            solves += 1;
            used = true;
        }
        instances += usize::from(used);
    }
    let elapsed = start.elapsed();
    ensure!(
        instances >= CORPUS_MIN_INSTANCES,
        "only {instances} usable instances in {attempts} attempts"
    );
    ensure!(elapsed < CORPUS_TIME_LIMIT, "took {elapsed:?}");
    let mix: Vec<String> = by_theorem.iter().map(|(t, k)| format!("{t}:{k}")).collect();
    Ok(format!(
        "{instances} instances, {solves}/{solves} certified Q feasible ({}) in {elapsed:.1?}",
        mix.join(" ")
    ))
}

fn macaulay_type(log: &mut Log) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut instances = 0;
    let mut solves = 0;
    let mut attempts = 0;
    while instances < MACAULAY_MIN_INSTANCES && attempts < 200 {
        attempts += 1;
        let d = 1 + (instances % 3) as i64;
        let p = LatticePolytope::simplex(2, d);
        let fs: Vec<SparsePoly> = (0..3).map(|_| random_dense(&mut rng, 2, d)).collect();
        let one = SparsePoly::one(2);
        // zero-freeness is certified inside the bound: 1 ∈ (F) and no zeros at infinity
        let Ok(mac) = bounds::bound_macaulay(&fs, &one, &p, &opts()) else {
            continue;
        };
        ensure!(mac.all_verified(), "macaulay hypotheses not verified");
        let prod = bounds::bound_macproduct(&fs, &one, &p, &opts()).map_err(|e| format!("macproduct: {e}"))?;
        ensure!(
            prod.q == LatticePolytope::simplex(2, 3 * d - 2),
            "macproduct Q {:?} for d = {d}",
            prod.q.vertices()
        );
        for cert in [&mac, &prod] {
            let sol = log.solve(&fs, &one, 1, &cert.q).ok_or_else(|| {
                format!(
                    "{} infeasible at Q = {:?}: F = {:?}",
                    cert.theorem,
                    cert.q.vertices(),
                    fs.iter().map(ToString::to_string).collect::<Vec<_>>()
                )
            })?;
            ensure!(check_identity(&fs, &sol.gs, &one, 1, &cert.q), "identity check failed");
            solves += 1;
        }
        instances += 1;
    }
    ensure!(
        instances >= MACAULAY_MIN_INSTANCES,
        "only {instances} zero-free systems in {attempts} attempts"
    );
    Ok(format!("{instances} zero-free systems, {solves}/{solves} feasible at 3d·Σ² and (3d−2)·Σ²"))
}

fn cohomology(_: &mut Log) -> Outcome {
    let mut cells = 0;
    for n in 1..=4i64 {
        for a in -8..=8 {
            for q in 0..=n {
                let got = toric::hq_vanishes_pn(n as usize, a, q).map_err(|e| e.to_string())?;
                let table = (q == 0 && a < 0) || (1 <= q && q < n) || (q == n && a >= -n);
                ensure!(got == table, "ℙ^{n}, a = {a}, q = {q}: {got} against the vanishing table");
                ensure!(got == (hq_dim_pn(n, a, q) == 0), "ℙ^{n}, a = {a}, q = {q}: dimension count disagrees");
                cells += 1;
            }
        }
    }
    let mut products = 0;
    for r in 1..=3usize {
        for ns in tuples(r, 1, 2) {
            for as_ in tuples(r, -4, 4) {
                let n: i64 = ns.iter().sum();
                let ns_u: Vec<usize> = ns.iter().map(|&x| x as usize).collect();
                let same_sign = as_.iter().all(|&a| a >= 0) || as_.iter().all(|&a| a < 0);
                for q in 0..=n {
                    let got = toric::hq_vanishes_product(&ns_u, &as_, q).map_err(|e| e.to_string())?;
                    ensure!(
                        got == (hq_dim_product(&ns, &as_, q) == 0),
                        "n = {ns:?}, a = {as_:?}, q = {q}: Künneth count disagrees"
                    );
                    if same_sign && 1 <= q && q < n {
                        ensure!(got, "n = {ns:?}, a = {as_:?}, q = {q}: middle group does not vanish");
                    }
                }
                products += 1;
            }
        }
    }
    Ok(format!("{cells} ℙⁿ cells and {products} product bundles agree"))
}

/// All `k`-tuples with entries in `lo..=hi`.
fn tuples(k: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                (lo..=hi).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}

fn factorial(k: i64) -> i64 {
    (1..=k).product()
}

fn polytope_arithmetic(_: &mut Log) -> Outcome {
    for n in 1..=4 {
        let v = LatticePolytope::simplex(n, 1).normalized_volume();
        ensure!(v == 1, "Vol(Σ^{n}) = {v}");
    }
    let mut grid = 0;
    for r in 1..=3 {
        for ns in tuples(r, 1, 3) {
            for ds in tuples(r, 1, 4) {
                let n: i64 = ns.iter().sum();
                let want = factorial(n) / ns.iter().map(|&k| factorial(k)).product::<i64>()
                    * ns.iter().zip(&ds).map(|(&k, &d)| d.pow(k as u32)).product::<i64>();
                let dims: Vec<usize> = ns.iter().map(|&k| k as usize).collect();
                let got = LatticePolytope::simplex_product(&dims, &ds).normalized_volume();
                ensure!(got as i64 == want, "Vol for n = {ns:?}, d = {ds:?}: {got} ≠ {want}");
                grid += 1;
            }
        }
    }
    for n in 1..=3 {
        for d in 1..=5 {
            let a = LatticePolytope::simplex(n, d).minimal_side_length().map_err(|e| e.to_string())?;
            ensure!(a == d, "side length of {d}Σ^{n} is {a}");
        }
    }
    let h = |pts: &[&[i64]]| LatticePolytope::hull(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap();
    let fixtures = vec![
        ("Σ²", LatticePolytope::simplex(2, 1), true),
        ("square", LatticePolytope::simplex_product(&[1, 1], &[1, 1]), true),
        ("example", example_polytope(), true),
        ("hexagon", h(&[&[0, 0], &[1, 0], &[2, 1], &[2, 2], &[1, 2], &[0, 1]]), true),
        ("Σ¹×Σ²", LatticePolytope::simplex_product(&[1, 2], &[1, 2]), true),
        ("weighted triangle", h(&[&[0, 0], &[2, 0], &[0, 1]]), false),
        ("cone over square", h(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[2, 2, 0], &[1, 1, 1]]), false),
    ];
    let mut non_smooth = 0;
    for (name, p, expect) in &fixtures {
        let smooth = p.is_smooth().map_err(|e| e.to_string())?.smooth;
        let regular = Fan::normal(p).map_err(|e| e.to_string())?.is_regular();
        ensure!(smooth == regular, "{name}: is_smooth {smooth}, fan regular {regular}");
        ensure!(smooth == *expect, "{name}: is_smooth {smooth}");
        non_smooth += usize::from(!smooth);
    }
    Ok(format!(
        "{grid} product volumes, side lengths, {} smoothness fixtures ({non_smooth} non-smooth)",
        fixtures.len()
    ))
}

fn oracle_agreement(log: &mut Log) -> Outcome {
    // extra systems at random small Q, feasible or not
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let polytopes = corpus_polytopes();
    for _ in 0..60 {
        let p = &polytopes[rng.gen_range(0..polytopes.len())];
        let n = p.nvars();
        let pts = p.lattice_points();
        let m = rng.gen_range(1..=3);
        let fs: Vec<SparsePoly> = (0..m).map(|_| random_poly(&mut rng, n, &pts, 0.5)).collect();
        let c = rng.gen_range(1..=3);
        let q = p.scale_int(c);
        if q.lattice_points().len() > ORACLE_MAX_POINTS {
            continue;
        }
        let qpts = q.lattice_points();
        let rhs = if rng.gen_bool(0.5) {
            SparsePoly::one(n)
        } else {
            random_poly(&mut rng, n, &qpts, 0.3)
        };
        log.solve(&fs, &rhs, 1, &q);
    }
    let (mut feasible, mut infeasible) = (0, 0);
    for r in &log.solved {
        let fast = solver::solve_membership(&r.fs, &r.rhs, 1, &r.q)
            .map_err(|e| e.to_string())?
            .is_feasible();
        let naive = naive_feasible(&r.fs, &r.rhs, &r.q);
        ensure!(
            fast == naive,
            "verdicts differ (Bareiss {fast}, naive {naive}) for F = {:?}, rhs = {}, Q = {:?}",
            r.fs.iter().map(ToString::to_string).collect::<Vec<_>>(),
            r.rhs,
            r.q.vertices()
        );
        if fast {
            feasible += 1;
        } else {
            infeasible += 1;
        }
    }

    // normal form against bounded-degree linear algebra
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let (mut members, mut non_members) = (0, 0);
    for trial in 0..40 {
        let n = 1 + trial % 3;
        let m = 1 + rng.gen_range(0..n);
        let gens: Vec<SparsePoly> = (0..m)
            .map(|_| {
                let d = rng.gen_range(1..=4 - (n as i64 - 1).min(2));
                random_poly(&mut rng, n, &LatticePolytope::simplex(n, d).lattice_points(), 0.5)
            })
            .collect();
        let f = if trial % 2 == 0 {
            let mut f = SparsePoly::zero(n);
            for g in &gens {
                f = &f + &(g * &random_poly(&mut rng, n, &LatticePolytope::simplex(n, 1).lattice_points(), 0.5));
            }
            f
        } else {
            random_poly(&mut rng, n, &LatticePolytope::simplex(n, 3).lattice_points(), 0.4)
        };
        if f.is_zero() {
            continue;
        }
        let nf = ideals::is_member(&f, &gens, budget()).map_err(|e| e.to_string())?;
        let start = f.total_degree().unwrap() as i64;
        let cap = start + if n == 3 { 3 } else { 5 };
        let la = (start..=cap).any(|c| {
            solver::solve_membership(&gens, &f, 1, &LatticePolytope::simplex(n, c.max(1)))
                .expect("supp f ⊆ cΣ")
                .is_feasible()
        });
        ensure!(
            nf == la,
            "normal form says {nf}, linear algebra up to degree {cap} says {la}: f = {f}, gens = {:?}",
            gens.iter().map(ToString::to_string).collect::<Vec<_>>()
        );
        if nf {
            members += 1;
        } else {
            non_members += 1;
        }
    }
    Ok(format!(
        "{} systems agree ({feasible} feasible, {infeasible} infeasible); \
         membership agrees on {members} members and {non_members} non-members",
        log.solved.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("example end-to-end", example_end_to_end),
        ("dense chart of the example", dense_chart),
        ("formula specializations", formula_grid),
        ("soundness corpus", soundness_corpus),
        ("Macaulay-type certificates", macaulay_type),
        ("cohomology tables", cohomology),
        ("polytope arithmetic", polytope_arithmetic),
        ("brute-force oracle agreement", oracle_agreement),
    ];
    let mut log = Log::default();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(|| run(&mut log)))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>().cloned().unwrap_or_default())));
        match result {
            Ok(detail) => println!("PASS  {}. {name}: {detail} [{:.1?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why} [{:.1?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        process::exit(1);
    }
}
