//! Acceptance suite. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p ellmod --test acceptance -- --nocapture` to see them.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use ellmod_core::census::expected_orders;
use ellmod_core::{
    aut_strata, chow_component, disambiguate, enumerate_smooth, extensions, mass, smith_normal_form, solve_extension,
    stratum_members, theorem_table, verify_appendix, Curve, CurvePoint, ExtensionProblem, Field, FieldElement,
    FinAbGroup, IntMatrix, LiftConstraint, MarkedCurve, StackLabel, Strategy,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const PRIMES: [u64; 4] = [5, 7, 11, 13];

fn criterion(id: u32, title: &str, body: impl FnOnce()) {
    let started = Instant::now();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("PASS [{id}] {title} ({:.2?})", started.elapsed()),
        Err(e) => {
            println!("FAIL [{id}] {title}");
            resume_unwind(e);
        }
    }
}

fn fp(p: u64) -> Field {
    Field::prime(p).unwrap()
}

fn el(f: Field, n: i64) -> FieldElement {
    f.from_i64(n)
}

fn pt(f: Field, x: i64, y: i64) -> CurvePoint {
    CurvePoint::affine(el(f, x), el(f, y))
}

fn residue(e: &FieldElement) -> u64 {
    match e {
        FieldElement::Mod { value, .. } => *value,
        FieldElement::Rational(_) => panic!("expected a residue"),
    }
}

fn orders(list: &[u32]) -> BTreeSet<u32> {
    list.iter().copied().collect()
}

#[test]
fn appendix_reproduction() {
    criterion(1, "automorphism classification holds over F_5, F_7, F_11, F_13", || {
        for p in PRIMES {
            let v = verify_appendix(fp(p)).unwrap();
            assert!(v.all_pass(), "p={p}: {:?}", v.failures());
            for n in 1..=5 {
                assert_eq!(v.per_n[&n].realized, expected_orders(fp(p), n), "p={p} n={n}");
            }
        }
        let started = Instant::now();
        let v = verify_appendix(fp(13)).unwrap();
        let elapsed = started.elapsed();
        let want: [&[u32]; 5] = [&[2, 4, 6], &[2, 3, 4], &[2, 3], &[2], &[]];
        for (n, list) in (1..=5).zip(want) {
            assert_eq!(v.per_n[&n].realized, orders(list), "p=13 n={n}");
            let r = aut_strata(fp(13), n).unwrap();
            assert_eq!(r.strategy, Strategy::Stabilizer);
            assert_eq!(r.nontrivial_orders(), orders(list), "census p=13 n={n}");
        }
        assert!(elapsed < Duration::from_secs(60), "p=13 took {elapsed:?}");
    });
}

#[test]
fn witness_curves() {
    criterion(2, "witness curves have automorphism orders 4, 3, 2 over F_13", || {
        let f = fp(13);
        let cases = [
            ((1, 0), vec![pt(f, 0, 0)], 4),
            ((0, 1), vec![pt(f, 0, 1), pt(f, 0, -1)], 3),
            ((-1, 0), vec![pt(f, 1, 0), pt(f, 0, 0), pt(f, -1, 0)], 2),
        ];
        for ((a, b), points, order) in cases {
            let m = MarkedCurve::new(el(f, a), el(f, b), points).unwrap();
            let aut = m.automorphisms();
            assert_eq!(aut.order, order, "{m}");
            // the generator really is a stabilizer of exact order `order`
            assert_eq!(aut.generator.multiplicative_order(), Some(order as u64));
            assert_eq!(m.scale(&aut.generator).unwrap(), m);
        }
    });
}

#[test]
fn mu4_unique_and_no_mu6() {
    criterion(
        3,
        "one 2-pointed class with order 4, no order 6 for n >= 2 over F_13",
        || {
            let f = fp(13);
            let members = stratum_members(f, 2, 4).unwrap();
            assert!(!members.is_empty());
            let mut reps: Vec<MarkedCurve> = Vec::new();
            for m in &members {
                assert_eq!(m.automorphisms().order, 4);
                if !reps.iter().any(|r| r.is_geometrically_isomorphic(m)) {
                    reps.push(m.clone());
                }
            }
            assert_eq!(reps.len(), 1, "classes: {reps:?}");
            for n in 2..=5 {
                let r = aut_strata(f, n).unwrap();
                assert!(!r.strata.contains_key(&6), "n={n} has an order-6 stratum");
                assert!(stratum_members(f, n, 6).unwrap().is_empty());
            }
        },
    );
}

#[test]
fn collinearity_of_order_two_stratum() {
    criterion(
        4,
        "every 4-pointed order-2 curve over F_13 has collinear 2-torsion marks",
        || {
            let f = fp(13);
            let members = stratum_members(f, 4, 2).unwrap();
            assert!(!members.is_empty());
            let zero = f.zero();
            for m in &members {
                for i in 2..=4 {
                    assert_eq!(m.point(i).y(), Some(&zero), "{m}");
                }
                assert!(
                    m.curve().is_collinear(m.point(2), m.point(3), m.point(4)).unwrap(),
                    "{m}"
                );
            }
            let r = aut_strata(f, 4).unwrap();
            assert_eq!(r.strata[&2], members.len() as u64);
        },
    );
}

#[test]
fn extension_patching() {
    criterion(5, "extension patching and the degree components of M1,3", || {
        let problem = |sub: FinAbGroup, quot: FinAbGroup| ExtensionProblem {
            sub,
            quot,
            exactness_assumed: true,
        };
        let z6 = solve_extension(&problem(FinAbGroup::cyclic(3), FinAbGroup::cyclic(2))).unwrap();
        assert_eq!(z6, vec![FinAbGroup::cyclic(6)]);

        let prob = problem(FinAbGroup::free(1), FinAbGroup::cyclic(2));
        let got: BTreeSet<FinAbGroup> = solve_extension(&prob).unwrap().into_iter().collect();
        let want: BTreeSet<FinAbGroup> = [
            FinAbGroup::free(1),
            FinAbGroup::free(1).direct_sum(&FinAbGroup::cyclic(2)),
        ]
        .into();
        assert_eq!(got, want);
        let classes = extensions(&prob).unwrap();
        assert_eq!(
            disambiguate(&classes, LiftConstraint::NotKilledBy(2)),
            Ok(FinAbGroup::free(1))
        );

        let pres = &theorem_table()[&StackLabel(3)];
        assert_eq!(chow_component(pres, 1), FinAbGroup::cyclic(12));
        for k in 2..=10 {
            assert_eq!(chow_component(pres, k), FinAbGroup::cyclic(6), "degree {k}");
        }
    });
}

#[test]
fn chow_table() {
    criterion(6, "degree components of M1,1..M1,10 in degrees 0..10", || {
        let table = theorem_table();
        assert_eq!(table.len(), 10);
        for n in 1..=10u32 {
            let pres = &table[&StackLabel(n)];
            for k in 0..=10u32 {
                // worked out by hand from Z[l]/(12 l, c l^2)
                let want = match (n, k) {
                    (_, 0) => FinAbGroup::free(1),
                    (_, 1) | (1 | 2, _) => FinAbGroup::cyclic(12),
                    (3, _) => FinAbGroup::cyclic(6),
                    (4, _) => FinAbGroup::cyclic(2),
                    _ => FinAbGroup::trivial(),
                };
                assert_eq!(chow_component(pres, k), want, "M1,{n} degree {k}");
            }
        }
    });
}

#[test]
fn counting_oracles() {
    criterion(7, "p^2 - p smooth curves and mass p over F_5..F_13", || {
        let started = Instant::now();
        for p in PRIMES {
            let f = fp(p);
            let smooth = enumerate_smooth(f).unwrap();
            assert_eq!(smooth.len() as u64, p * p - p, "p={p}");
            // independent count: pairs with 4a^3 + 27b^2 != 0 mod p
            let direct = (0..p)
                .flat_map(|a| (0..p).map(move |b| (a, b)))
                .filter(|&(a, b)| (4 * a * a % p * a + 27 * b % p * b) % p != 0)
                .count() as u64;
            assert_eq!(direct, p * p - p);
            assert_eq!(
                mass(f).unwrap(),
                num_rational::BigRational::from_integer(BigInt::from(p)),
                "p={p}"
            );
        }
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    });
}

fn group_law_random_triples() {
    let f = fp(13);
    let curves: Vec<(Curve, Vec<CurvePoint>)> = enumerate_smooth(f)
        .unwrap()
        .into_iter()
        .map(|c| {
            let pts = c.points().unwrap();
            (c, pts)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let (c, pts) = curves.choose(&mut rng).unwrap();
        let [p, q, r] = [0; 3].map(|_| pts.choose(&mut rng).unwrap().clone());
        let add = |x: &CurvePoint, y: &CurvePoint| c.add(x, y).unwrap();
        assert_eq!(add(&add(&p, &q), &r), add(&p, &add(&q, &r)), "associativity on {c}");
        assert_eq!(add(&p, &q), add(&q, &p), "commutativity on {c}");
        assert_eq!(add(&p, &p.involution()), CurvePoint::Infinity, "inverse on {c}");
        assert_eq!(add(&p, &CurvePoint::Infinity), p, "identity on {c}");
        assert!(c.contains(&add(&p, &q)));
    }
}

fn discriminant_equivariance_f7() {
    let p = 7u64;
    let f = fp(p);
    let disc = |a: u64, b: u64| (4 * a * a % p * a + 27 * b % p * b) % p;
    let pow = |x: u64, e: u64| (0..e).fold(1u64, |acc, _| acc * x % p);
    let mut checked = 0;
    for c in enumerate_smooth(f).unwrap() {
        let (a, b) = (residue(c.a()), residue(c.b()));
        assert_ne!(disc(a, b), 0);
        for t in 1..p {
            let s = c.scale(&el(f, t as i64)).unwrap();
            let t_inv = pow(t, p - 2);
            // t.(a, b) = (t^-4 a, t^-6 b) and D scales by t^-12
            assert_eq!(residue(s.a()), pow(t_inv, 4) * a % p);
            assert_eq!(residue(s.b()), pow(t_inv, 6) * b % p);
            assert_eq!(residue(s.discriminant()), pow(t_inv, 12) * disc(a, b) % p);
            checked += 1;
        }
    }
    assert_eq!(checked, (p * p - p) * (p - 1));
}

fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    // Bareiss elimination; every intermediate is a minor, so it stays exact
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
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
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn det_big(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)].clone()).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of all k x k minors.
fn determinant_divisor(m: &[Vec<i64>], k: usize) -> i128 {
    let (rows, cols) = (m.len(), m[0].len());
    let mut g = 0;
    for rs in combinations(rows, k) {
        for cs in combinations(cols, k) {
            let minor = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| m[i][j] as i128).collect())
                .collect();
            g = gcd(g, det_i128(minor));
        }
    }
    g
}

fn smith_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a9);
    for trial in 0..1_000 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let dense: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(-20..=20)).collect())
            .collect();
        let m = IntMatrix::from_rows(c, &dense);
        let s = smith_normal_form(&m);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d, "trial {trial}: U M V != D");
        assert!(s.d.is_diagonal(), "trial {trial}");
        assert!(det_big(&s.u).abs().is_one(), "trial {trial}: U not unimodular");
        assert!(det_big(&s.v).abs().is_one(), "trial {trial}: V not unimodular");
        let diag = s.d.diagonal();
        let mut running = BigInt::one();
        for (k, d) in diag.iter().enumerate() {
            assert!(!d.is_negative());
            running *= d;
            assert_eq!(
                running,
                BigInt::from(determinant_divisor(&dense, k + 1)),
                "trial {trial} k={}",
                k + 1
            );
        }
    }
}

/// Every marked curve over `F_p` with exactly `n` points.
fn all_marked(f: Field, n: usize) -> Vec<MarkedCurve> {
    let mut out = Vec::new();
    for c in enumerate_smooth(f).unwrap() {
        let affine: Vec<CurvePoint> = c.points().unwrap().into_iter().skip(1).collect();
        let mut stack = vec![Vec::<CurvePoint>::new()];
        while let Some(t) = stack.pop() {
            if t.len() == n - 1 {
                out.push(MarkedCurve::new(c.a().clone(), c.b().clone(), t).unwrap());
                continue;
            }
            for p in affine.iter().filter(|p| !t.contains(p)) {
                let mut next = t.clone();
                next.push(p.clone());
                stack.push(next);
            }
        }
    }
    out
}

fn forget_sections_f5() {
    let f = fp(5);
    for n in 2..=4 {
        let marked = all_marked(f, n);
        let mut domain = 0;
        for m in &marked {
            let ip2 = m.point(2).involution();
            let in_domain = m.points().iter().all(|p| *p != ip2);
            assert_eq!(m.in_u_prime().unwrap(), in_domain, "{m}");
            if in_domain {
                domain += 1;
                assert_eq!(m.sigma().unwrap().forget(3).unwrap(), *m, "{m}");
            }
        }
        assert!(domain > 0);
    }
    for n in 3..=4 {
        let marked = all_marked(f, n);
        let mut domain = 0;
        for m in &marked {
            let s = m.curve().add(m.point(2), m.point(3)).unwrap().involution();
            let in_domain = m.points().iter().all(|p| *p != s);
            assert_eq!(m.in_v_prime().unwrap(), in_domain, "{m}");
            if in_domain {
                domain += 1;
                assert_eq!(m.tau().unwrap().forget(4).unwrap(), *m, "{m}");
            }
        }
        assert!(domain > 0);
    }
}

#[test]
fn property_suites() {
    criterion(
        8,
        "group law, discriminant weight, Smith form and forgetful sections",
        || {
            group_law_random_triples();
            discriminant_equivariance_f7();
            smith_random_matrices();
            forget_sections_f5();
        },
    );
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ellmod(args: &[&str], threads: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ellmod"));
    cmd.args(args).env_remove("ELLMOD_THREADS");
    if let Some(t) = threads {
        cmd.env("ELLMOD_THREADS", t);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

#[test]
fn cli_determinism_and_exit_codes() {
    criterion(9, "byte-identical CLI output and the exit-code contract", || {
        let inputs: &[&[&str]] = &[
            &["classify", "--field", "5", "--a", "1", "--b", "0"],
            &["classify", "--field", "Q", "--a", "-3", "--b", "2"],
            &["aut", "--field", "13", "--a", "1", "--b", "0", "--points", "0,0"],
            &["aut", "--field", "Q", "--a", "0", "--b", "1", "--points", "0,1", "0,-1"],
            &["census", "--p", "13", "--n", "3"],
            &["census", "--p", "11", "--n", "2", "--strategy", "full"],
            &["census", "--p", "13", "--n", "4", "--format", "csv"],
            &["chow", "--stack", "M1,3", "--degree", "2"],
            &["verify-appendix", "--p", "13"],
            &["verify-appendix", "--p", "7"],
        ];
        for args in inputs {
            let first = ellmod(args, None);
            assert_eq!(first.code, 0, "{args:?}: {}", first.stderr);
            for threads in [None, Some("1"), Some("4")] {
                let again = ellmod(args, threads);
                assert_eq!(again.code, 0);
                assert_eq!(again.stdout, first.stdout, "{args:?} with threads {threads:?}");
            }
            if !args.contains(&"csv") {
                let v: Value = serde_json::from_str(&first.stdout).unwrap();
                let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
                assert_eq!(keys, ["command", "inputs", "result", "version"], "{args:?}");
                assert_eq!(v["command"], args[0]);
            }
        }

        let matrix: &[(&[&str], i32, Option<&str>)] = &[
            (
                &["classify", "--field", "3", "--a", "0", "--b", "1"],
                3,
                Some("BadCharacteristic"),
            ),
            (
                &["classify", "--field", "2", "--a", "0", "--b", "1"],
                3,
                Some("BadCharacteristic"),
            ),
            (
                &["classify", "--field", "4", "--a", "0", "--b", "1"],
                2,
                Some("NotPrime"),
            ),
            (
                &["classify", "--field", "x", "--a", "0", "--b", "1"],
                2,
                Some("ParseError"),
            ),
            (
                &["classify", "--field", "7", "--a", "one", "--b", "1"],
                2,
                Some("ParseError"),
            ),
            (
                &["classify", "--field", "7", "--a", "1/7", "--b", "1"],
                2,
                Some("ParseError"),
            ),
            (&["classify", "--field", "7"], 2, None),
            (
                &["aut", "--field", "3", "--a", "0", "--b", "1", "--points", "0,1"],
                3,
                Some("BadCharacteristic"),
            ),
            (
                &["aut", "--field", "7", "--a", "0", "--b", "1", "--points", "0;1"],
                2,
                Some("ParseError"),
            ),
            (
                &["aut", "--field", "7", "--a", "0", "--b", "1", "--points", "inf"],
                2,
                Some("ParseError"),
            ),
            (
                &["aut", "--field", "5", "--a", "0", "--b", "1", "--points", "0,0"],
                4,
                Some("PointNotOnCurve"),
            ),
            (
                &["aut", "--field", "5", "--a", "0", "--b", "0", "--points"],
                4,
                Some("CurveNotSmooth"),
            ),
            (
                &["aut", "--field", "Q", "--a", "-3", "--b", "2", "--points"],
                4,
                Some("CurveNotSmooth"),
            ),
            (
                &["aut", "--field", "7", "--a", "0", "--b", "1", "--points", "0,1", "0,1"],
                4,
                Some("DuplicatePoints"),
            ),
            (&["census", "--p", "13", "--n", "0"], 5, Some("UnsupportedN")),
            (&["census", "--p", "13", "--n", "6"], 5, Some("UnsupportedN")),
            (&["census", "--p", "13", "--n", "three"], 2, Some("ParseError")),
            (&["census", "--p", "4", "--n", "2"], 2, Some("NotPrime")),
            (&["census", "--p", "3", "--n", "2"], 3, Some("BadCharacteristic")),
            (&["census", "--p", "Q", "--n", "2"], 2, Some("InfiniteField")),
            (&["census", "--p", "17", "--n", "2"], 2, Some("PrimeNotAllowed")),
            (&["census", "--p", "13", "--n", "2", "--format", "xml"], 2, None),
            (&["chow", "--stack", "M1,0", "--degree", "1"], 6, Some("UnknownStack")),
            (&["chow", "--stack", "M1,11", "--degree", "1"], 6, Some("UnknownStack")),
            (&["chow", "--stack", "M2,1", "--degree", "1"], 6, Some("UnknownStack")),
            (&["chow", "--stack", "M1,3", "--degree", "-1"], 2, None),
            (&["verify-appendix", "--p", "4"], 2, Some("NotPrime")),
            (&["verify-appendix", "--p", "3"], 3, Some("BadCharacteristic")),
            (&["verify-appendix", "--p", "Q"], 2, Some("InfiniteField")),
            (&["frobnicate"], 2, None),
        ];
        for (args, code, name) in matrix {
            let run = ellmod(args, None);
            assert_eq!(run.code, *code, "{args:?}: {}", run.stderr);
            assert!(!run.stderr.is_empty(), "{args:?}: silent failure");
            if let Some(name) = name {
                let v: Value = serde_json::from_str(&run.stdout).unwrap();
                assert_eq!(v["result"]["error"], *name, "{args:?}");
                assert!(run.stderr.contains(name), "{args:?}");
                assert_eq!(ellmod(args, None).stdout, run.stdout, "{args:?} error record is stable");
            }
        }

        let forced = ellmod(&["census", "--p", "17", "--n", "1", "--force"], None);
        assert_eq!(forced.code, 0, "{}", forced.stderr);
    });
}
