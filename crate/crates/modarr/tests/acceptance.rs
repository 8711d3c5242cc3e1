//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modarr::chi::chi_cross_check;
use modarr::lattice::IntersectionLattice;
use modarr::numtheory::{divisors, gcd};
use modarr::oracle::{self, DEFAULT_BUDGET};
use modarr::{
    build_lattice, char_quasi_poly, characteristic_polynomial, elementary_divisors,
    kernel_cardinality, q0_bound, verify, Arrangement, ColumnSet, IntMatrix, IntPoly, Limits,
};

const SEED: u64 = 0x5eed_2026;
/// Criterion 1 wall-clock limit.
const EXAMPLE_LIMIT: Duration = Duration::from_secs(1);
/// Criterion 4 wall-clock limit.
const CORPUS_LIMIT: Duration = Duration::from_secs(120);
const CORPUS_SIZE: usize = 200;
const KERNEL_INSTANCES: usize = 500;
const VERIFY_MATRICES: usize = 50;
/// Oracle budget for the random verification runs; larger moduli fall back
/// to the lattice checks alone.
const VERIFY_ORACLE_BUDGET: u64 = 250_000;

type Outcome = Result<String, String>;
/// Modulus, expected closures, and covers beyond those out of `V`.
type Panel = (
    u64,
    &'static [&'static str],
    Vec<(&'static str, &'static str)>,
);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn example() -> Arrangement {
    Arrangement::new(IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]])).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, bound: i64) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
        let c = IntMatrix::from_rows(&rows);
        if (0..n).all(|j| !c.is_zero_column(j)) {
            return c;
        }
    }
}

fn random_arrangement(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize, bound: i64) -> Arrangement {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(1..=max_n);
    Arrangement::new(random_matrix(rng, m, n, bound)).unwrap()
}

fn corpus() -> Vec<Arrangement> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..CORPUS_SIZE)
        .map(|_| random_arrangement(&mut rng, 3, 5, 5))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let arr = example();
    let qp = char_quasi_poly(&arr).map_err(|e| e.to_string())?;
    let rho_e = arr.period_rho_e().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [(1, 2), (2, 3), (3, 4), (6, 5)];
    let got: Vec<(u64, String)> = qp
        .classes()
        .map(|d| (d, qp.constituent(d).unwrap().display("q")))
        .collect();
    let want: Vec<(u64, String)> = expected
        .iter()
        .map(|&(d, c)| (d, IntPoly::from_i64(&[c, -3, 1]).display("q")))
        .collect();
    ensure(got == want, || format!("constituents {got:?}"))?;
    ensure(qp.period() == 6, || format!("rho0 = {}", qp.period()))?;
    ensure(rho_e == BigInt::from(6), || format!("rhoE = {rho_e}"))?;
    ensure(qp.minimum_period() == 6, || {
        format!("minimum period {}", qp.minimum_period())
    })?;
    ensure(elapsed < EXAMPLE_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "q^2 - 3q + 2/3/4/5, rho0 = rhoE = minimum period = 6, {elapsed:.2?} < 1 s"
    ))
}

fn criterion_2() -> Outcome {
    let arr = example();
    let chi = characteristic_polynomial(&arr).map_err(|e| e.to_string())?;
    ensure(chi == IntPoly::from_i64(&[2, -3, 1]), || {
        format!("chi = {}", chi.display("t"))
    })?;
    let check = chi_cross_check(&arr, &chi, &[5, 7, 11]).map_err(|e| e.to_string())?;
    ensure(check.agrees, || {
        format!("interpolated {:?}", check.interpolated)
    })?;
    ensure(check.counts == [12, 30, 90], || {
        format!("counts {:?}", check.counts)
    })?;
    Ok(format!(
        "chi(t) = {}, interpolation at q = 5, 7, 11 exact",
        chi.display("t")
    ))
}

fn criterion_3() -> Outcome {
    let arr = example();
    let qp = char_quasi_poly(&arr).map_err(|e| e.to_string())?;
    for (q, want) in [(5u64, 12u64), (1, 0)] {
        let formula = qp.evaluate(q).map_err(|e| e.to_string())?;
        let brute =
            oracle::count_complement(arr.matrix(), q, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure(formula == BigInt::from(want) && brute == want, || {
            format!("q = {q}: formula {formula}, oracle {brute}, expected {want}")
        })?;
    }
    Ok("|M(A_5)| = 12, |M(A_1)| = 0, oracle exact".into())
}

fn criterion_4(corpus: &[Arrangement]) -> Outcome {
    let start = Instant::now();
    let mut comparisons = 0;
    for (i, arr) in corpus.iter().enumerate() {
        let qp = char_quasi_poly(arr).map_err(|e| format!("matrix {i}: {e}"))?;
        for q in 1..=30 {
            let formula = qp.evaluate(q).unwrap();
            let brute = oracle::count_complement(arr.matrix(), q, DEFAULT_BUDGET)
                .map_err(|e| format!("matrix {i}: {e}"))?;
            ensure(formula == BigInt::from(brute), || {
                format!(
                    "matrix {i} {:?}, q = {q}: formula {formula}, oracle {brute}",
                    arr.matrix().entries()
                )
            })?;
            comparisons += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < CORPUS_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} matrices, {comparisons} exact comparisons, {elapsed:.2?} < 120 s",
        corpus.len()
    ))
}

fn kernel_oracle(g: &IntMatrix, q: u64) -> u64 {
    // x G = 0 over Z_q^m is the flat cut out by G's columns
    oracle::count_flat(g, q, DEFAULT_BUDGET).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut periods_checked = 0;
    for i in 0..KERNEL_INSTANCES {
        let m = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..k).map(|_| rng.gen_range(-5..=5)).collect())
            .collect();
        let g = IntMatrix::from_rows(&rows);
        let q = rng.gen_range(1..=20);
        let formula = kernel_cardinality(&g, q).map_err(|e| e.to_string())?;
        let brute = kernel_oracle(&g, q);
        ensure(formula == BigInt::from(brute), || {
            format!("instance {i} {rows:?}, q = {q}: formula {formula}, enumeration {brute}")
        })?;

        if g.is_zero() {
            continue;
        }
        let e = elementary_divisors(&g).map_err(|e| e.to_string())?;
        let last = e.last().unwrap();
        let e_l: u64 = last
            .try_into()
            .map_err(|_| format!("e_l = {last} too large"))?;
        let product = |q: u64| -> BigInt {
            let qb = BigInt::from(q);
            e.iter()
                .map(|d| num_integer::Integer::gcd(d, &qb))
                .product()
        };
        let values: Vec<BigInt> = (1..=2 * e_l).map(product).collect();
        let is_period = |p: u64| (0..e_l as usize).all(|j| values[j] == values[j + p as usize]);
        let minimum = divisors(e_l).into_iter().find(|&p| is_period(p)).unwrap();
        ensure(minimum == e_l, || {
            format!("instance {i}: minimum period {minimum}, e_l = {e_l}")
        })?;
        periods_checked += 1;
    }
    Ok(format!(
        "{KERNEL_INSTANCES} kernel sizes exact; minimum period = e_l on {periods_checked} nonzero matrices"
    ))
}

fn criterion_6(corpus: &[Arrangement]) -> Outcome {
    for (i, arr) in corpus.iter().enumerate() {
        let rho0 = arr.period_rho0().map_err(|e| e.to_string())?;
        let rho_e = arr.period_rho_e().map_err(|e| e.to_string())?;
        ensure(&rho_e % BigInt::from(rho0) == BigInt::from(0), || {
            format!("matrix {i}: rho0 = {rho0}, rhoE = {rho_e}")
        })?;
    }
    Ok(format!("rho0 | rhoE on all {} matrices", corpus.len()))
}

fn closures(l: &IntersectionLattice) -> Vec<String> {
    l.flats.iter().map(|f| f.closure.to_string()).collect()
}

fn cover_labels(l: &IntersectionLattice) -> BTreeSet<(String, String)> {
    l.covers
        .iter()
        .map(|&(a, b)| {
            (
                l.flats[a].closure.to_string(),
                l.flats[b].closure.to_string(),
            )
        })
        .collect()
}

fn pairs(v: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    v.iter()
        .map(|&(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

fn criterion_7() -> Outcome {
    let arr = example();
    let lattice = |q| build_lattice(&arr, q).map_err(|e| e.to_string());
    let base = [("{}", "{1}"), ("{}", "{2}"), ("{}", "{3}")];
    let panels: [Panel; 4] = [
        (
            5,
            &["{}", "{1}", "{2}", "{3}", "{1,2,3}"],
            vec![("{1}", "{1,2,3}"), ("{2}", "{1,2,3}"), ("{3}", "{1,2,3}")],
        ),
        (
            8,
            &["{}", "{1}", "{2}", "{3}", "{1,2}", "{1,2,3}"],
            vec![
                ("{1}", "{1,2}"),
                ("{2}", "{1,2}"),
                ("{1,2}", "{1,2,3}"),
                ("{3}", "{1,2,3}"),
            ],
        ),
        (
            9,
            &["{}", "{1}", "{2}", "{3}", "{2,3}", "{1,2,3}"],
            vec![
                ("{2}", "{2,3}"),
                ("{3}", "{2,3}"),
                ("{2,3}", "{1,2,3}"),
                ("{1}", "{1,2,3}"),
            ],
        ),
        (
            12,
            &["{}", "{1}", "{2}", "{3}", "{1,2}", "{2,3}", "{1,2,3}"],
            vec![
                ("{1}", "{1,2}"),
                ("{2}", "{1,2}"),
                ("{2}", "{2,3}"),
                ("{3}", "{2,3}"),
                ("{1,2}", "{1,2,3}"),
                ("{2,3}", "{1,2,3}"),
            ],
        ),
    ];
    for (q, want, extra) in panels {
        let l = lattice(q)?;
        ensure(closures(&l) == want, || {
            format!("q = {q}: closures {:?}", closures(&l))
        })?;
        let mut covers: Vec<(&str, &str)> = base.to_vec();
        covers.extend(extra);
        ensure(cover_labels(&l) == pairs(&covers), || {
            format!("q = {q}: covers {:?}", cover_labels(&l))
        })?;
    }
    let exceptional: [(u64, &[&str]); 3] = [
        (1, &["{1,2,3}"]),
        (2, &["{}", "{3}", "{1,2}", "{1,2,3}"]),
        (3, &["{}", "{1}", "{2,3}", "{1,2,3}"]),
    ];
    for (q, want) in exceptional {
        let l = lattice(q)?;
        ensure(closures(&l) == want, || {
            format!("q = {q}: closures {:?}", closures(&l))
        })?;
    }
    for q in 4..=16 {
        let (a, b) = (lattice(q)?, lattice(q + 6)?);
        ensure(a.closures() == b.closures(), || {
            format!("L_{q} != L_{}", q + 6)
        })?;
    }
    Ok("panels q = 5, 8, 9, 12 exact; q = 1, 2, 3 collapses; L_q = L_(q+6) for q = 4..16".into())
}

fn criterion_8() -> Outcome {
    let run = |arr: &Arrangement| -> Result<(u64, u64), String> {
        let bound = q0_bound(arr).map_err(|e| e.to_string())?;
        let q_max = verify::default_q_max(arr).map_err(|e| e.to_string())?;
        let qp = char_quasi_poly(arr).map_err(|e| e.to_string())?;
        let report = verify::run(arr, &qp, q_max).map_err(|e| e.to_string())?;
        let periodic = report
            .checks
            .iter()
            .find(|c| c.name == "lattice_periodicity")
            .unwrap();
        ensure(!periodic.skipped, || "periodicity check skipped".into())?;
        match report.checks.iter().find(|c| !c.passed) {
            None => Ok((bound, q_max)),
            Some(c) => Err(format!(
                "{} {:?}: {} {}",
                c.name,
                arr.matrix().entries(),
                c.detail,
                c.counterexample.clone().unwrap_or_default()
            )),
        }
    };
    let (bound, q_max) = run(&example())?;
    let example_range = format!("example over ({bound}, {q_max}]");

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let limits = Limits {
        oracle_budget: VERIFY_ORACLE_BUDGET,
        ..Limits::default()
    };
    let mut widest = 0;
    for _ in 0..VERIFY_MATRICES {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=4);
        let arr = Arrangement::with_limits(random_matrix(&mut rng, m, n, 3), limits).unwrap();
        let (bound, q_max) = run(&arr)?;
        widest = widest.max(q_max - bound);
    }
    Ok(format!(
        "{example_range} and {VERIFY_MATRICES} random matrices (ranges up to {widest} wide) pass"
    ))
}

fn criterion_9() -> Outcome {
    let arr = example();
    let bound = q0_bound(&arr).map_err(|e| e.to_string())?;
    let subsets: Vec<ColumnSet> = (0..8u64).map(ColumnSet::from_bits).collect();
    let flat_sets = |q: u64| -> Vec<oracle::PointSet> {
        subsets
            .iter()
            .map(|&j| oracle::enumerate_flat(&arr.submatrix(j), q, DEFAULT_BUDGET).unwrap())
            .collect()
    };
    let mut identifications = 0;
    let mut moduli = 0;
    for q in [6u64, 12, 18] {
        let fine = flat_sets(q);
        for q2 in (bound + 1..=24).filter(|&q2| [1, 2, 3].contains(&gcd(6, q2))) {
            let coarse = flat_sets(q2);
            moduli += 1;
            for a in 0..subsets.len() {
                for b in a + 1..subsets.len() {
                    if fine[a].points != fine[b].points {
                        continue;
                    }
                    identifications += 1;
                    ensure(coarse[a].points == coarse[b].points, || {
                        format!(
                            "H_{} = H_{} at q = {q} but not at q' = {q2}",
                            subsets[a], subsets[b]
                        )
                    })?;
                }
            }
        }
    }
    ensure(identifications > 0, || "no identifications found".into())?;
    Ok(format!(
        "{identifications} identifications at q = 6, 12, 18 persist across {moduli} moduli q'"
    ))
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("matrices")
}

fn run_cli(args: &[String]) -> (Vec<u8>, Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_modarr"))
        .args(args)
        .output()
        .unwrap();
    (out.stdout, out.stderr, out.status.code())
}

fn criterion_10() -> Outcome {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dot = dir.path().join("lattice.dot");
    let dot_arg = dot.display().to_string();
    let threads = std::thread::available_parallelism()
        .map_or(4, |n| n.get().max(4))
        .to_string();

    let mut invocations = 0;
    for file in &files {
        let path = file.display().to_string();
        let commands: Vec<Vec<&str>> = vec![
            vec!["quasipoly", &path],
            vec!["chi", "--oracle", &path],
            vec!["count", "--q", "6", "--oracle", &path],
            vec!["lattice", "--q", "12", "--dot", &dot_arg, &path],
            vec!["verify", &path],
        ];
        for cmd in commands {
            for json in [false, true] {
                let mut outputs = Vec::new();
                for t in ["1", threads.as_str(), "1"] {
                    let mut args: Vec<String> = vec!["--threads".into(), t.into()];
                    if json {
                        args.push("--json".into());
                    }
                    args.extend(cmd.iter().map(|s| s.to_string()));
                    let _ = std::fs::remove_file(&dot);
                    let result = run_cli(&args);
                    let dot_bytes = std::fs::read(&dot).ok();
                    outputs.push((result, dot_bytes));
                    invocations += 1;
                }
                ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
                    format!(
                        "{} differs across runs ({cmd:?}, json = {json})",
                        short(file)
                    )
                })?;
            }
        }
    }
    Ok(format!(
        "{invocations} runs over {} fixtures, 5 commands, text and JSON, --threads 1 vs {threads}: byte-identical",
        files.len()
    ))
}

fn short(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("1 worked-example quasi-polynomial", Box::new(criterion_1)),
        (
            "2 characteristic polynomial recovery",
            Box::new(criterion_2),
        ),
        ("3 point counts", Box::new(criterion_3)),
        (
            "4 oracle equivalence corpus",
            Box::new(|| criterion_4(&corpus)),
        ),
        ("5 kernel formula", Box::new(criterion_5)),
        ("6 period divisibility", Box::new(|| criterion_6(&corpus))),
        ("7 lattice fixtures", Box::new(criterion_7)),
        ("8 lattice periodicity via verify", Box::new(criterion_8)),
        ("9 coarseness nesting", Box::new(criterion_9)),
        ("10 determinism", Box::new(criterion_10)),
    ];
    let mut failures = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail} ({:.2?})", start.elapsed()),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
