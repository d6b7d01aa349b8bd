//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use peelkit::construction::{build_b, build_s, validate_structure, ConstructionParams};
use peelkit::geometry::is_general_position;
use peelkit::partition::{check_decomposition, Partition};
use peelkit::peeling::{
    count_peelings, estimate_peelings, is_peeling_sequence_with, meets_trivial_lower_bound, PeelIndex,
};
use peelkit::verifier::{
    base_case_check, check_case_conditions, check_exponent_constants, empirical_theorem_check,
    entropy_bound_suite, ratio_lemma_suite, seventh_bound_suite, Family, Verdict,
};
use peelkit::{PointSet, Rational, RationalPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn from_ints(coords: &[(i64, i64)]) -> PointSet {
    PointSet::new(
        coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| RationalPoint::from_ints(i as u32, x, y))
            .collect(),
    )
    .unwrap()
}

fn convex(n: usize) -> PointSet {
    from_ints(&(0..n as i64).map(|i| (i, i * i)).collect::<Vec<_>>())
}

fn triangle_plus_interior() -> PointSet {
    from_ints(&[(0, 0), (6, 0), (0, 6), (1, 1)])
}

fn random_sets(seed: u64, count: usize, max_n: usize) -> Vec<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(3..=max_n);
        let coords: Vec<(i64, i64)> = (0..n)
            .map(|_| (rng.random_range(-50..=50), rng.random_range(-50..=50)))
            .collect();
        if coords.iter().duplicates().next().is_some() {
            continue;
        }
        let s = from_ints(&coords);
        if is_general_position(&s) {
            out.push(s);
        }
    }
    out
}

fn count_u64(s: &PointSet) -> u64 {
    count_peelings(s).unwrap().to_string().parse().unwrap()
}

/// Number of the `n!` orders of `s` that pass the sequence check.
fn permutation_filter(s: &PointSet) -> u64 {
    let index = PeelIndex::new(s);
    s.ids()
        .into_iter()
        .permutations(s.len())
        .filter(|seq| is_peeling_sequence_with(&index, seq))
        .count() as u64
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn c1_oracle_equivalence() -> Outcome {
    let mut sets = random_sets(2024, 20, 8);
    sets.extend((3..=7).map(convex));
    sets.push(triangle_plus_interior());
    for s in &sets {
        let (g, oracle) = (count_u64(s), permutation_filter(s));
        ensure!(g == oracle, "n = {}: count {g} but the permutation filter finds {oracle}", s.len());
    }
    Ok(format!("{} sets, counts equal the n!-permutation filter", sets.len()))
}

fn c2_convex_position() -> Outcome {
    for n in 3..=8 {
        let g = count_u64(&convex(n));
        ensure!(g == factorial(n as u64), "convex {n}-gon: {g} != {n}!");
    }
    let t = count_u64(&triangle_plus_interior());
    ensure!(t == 18, "triangle + interior: {t} != 18");
    Ok("g = n! for n = 3..8; triangle + interior = 18".into())
}

fn c3_lower_bound() -> Outcome {
    let params = ConstructionParams::default();
    let mut sets = random_sets(7, 40, 10);
    sets.extend((3..=8).map(convex));
    sets.push(triangle_plus_interior());
    for n in 3..=14 {
        sets.push(build_s(n, &params).unwrap().0);
    }
    for n in 9..=14 {
        for ray in 1..=3 {
            sets.push(build_b(n, ray, &params).unwrap().0);
        }
    }
    for s in &sets {
        let g = count_peelings(s).unwrap();
        ensure!(meets_trivial_lower_bound(s.len(), &g), "n = {}: g = {g} below 2*3^(n-2)", s.len());
    }
    Ok(format!("{} sets satisfy g >= 2*3^(n-2)", sets.len()))
}

fn c4_construction_certificates() -> Outcome {
    let start = Instant::now();
    let params = ConstructionParams::default();
    for n in 3..=30 {
        let (s, node) = build_s(n, &params).map_err(|e| format!("n = {n}: {e}"))?;
        ensure!(s.len() == n, "n = {n}: built {} points", s.len());
        let r = validate_structure(&s, &node, 200, 1000 + n as u64).unwrap();
        ensure!(r.is_ok(), "n = {n}: {:?}", r.failures);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!("S_3..S_30 validated with 200 random peels each in {:.1}s", elapsed.as_secs_f64()))
}

fn c5_base_cases() -> Outcome {
    let cases = base_case_check();
    ensure!(cases.len() == 96, "{} base cases", cases.len());
    let failing: Vec<_> = cases.iter().filter(|c| !c.holds).map(|c| (c.n, c.family)).collect();
    ensure!(failing.is_empty(), "failing: {failing:?}");
    let s6 = cases.iter().find(|c| c.n == 6 && c.family == Family::S).unwrap();
    ensure!(s6.lhs == "216", "S n=6 left side is {}", s6.lhs);
    Ok("96/96 hold; S n=6 left side = 216".into())
}

fn c6_certificate() -> Outcome {
    let start = Instant::now();
    let report = check_case_conditions(128).unwrap();
    let elapsed = start.elapsed();
    ensure!(report.case_conditions.len() == 13, "{} final inequalities", report.case_conditions.len());
    ensure!(report.coefficient_values.len() == 13, "{} coefficients", report.coefficient_values.len());
    ensure!(report.sums.len() == 2, "{} sums", report.sums.len());
    for c in report.conditions() {
        ensure!(c.verdict == Verdict::Holds, "{}", c.table_row());
    }
    let b1 = &report.case_conditions[0];
    ensure!(b1.id == "B.case1.final", "first condition is {}", b1.id);
    let (lo, hi) = (Rational::new(86.into(), 10.into()), Rational::new(867.into(), 100.into()));
    ensure!(b1.value.lo() > &lo && b1.value.hi() < &hi, "B case 1 value {} outside (8.6, 8.67)", b1.value);
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "28/28 hold at 128 bits; B case 1 = {} in {:.2}s",
        b1.value,
        elapsed.as_secs_f64()
    ))
}

fn c7_exponents() -> Outcome {
    let checks = check_exponent_constants(128).unwrap();
    ensure!(checks.len() == 13, "{} exponent checks", checks.len());
    for c in &checks {
        ensure!(c.verdict == Verdict::Holds, "{}", c.table_row());
    }
    Ok("13/13 entropy exponents certified at 128 bits".into())
}

fn c8_lemmas() -> Outcome {
    let start = Instant::now();
    let suites = [
        entropy_bound_suite(64).unwrap(),
        ratio_lemma_suite(40, 27, 6).unwrap(),
        seventh_bound_suite(64).unwrap(),
    ];
    for s in &suites {
        ensure!(s.holds(), "{}: {:?}", s.name, s.failures);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    let cases: u64 = suites.iter().map(|s| s.cases).sum();
    Ok(format!("{cases} exact cases hold in {:.1}s", elapsed.as_secs_f64()))
}

fn c9_decomposition() -> Outcome {
    let (s9, _) = build_s(9, &ConstructionParams::default()).unwrap();
    let mut checked = 0;
    let mut check = |s: &PointSet, p: &Partition| -> Result<(), String> {
        let d = check_decomposition(s, p).unwrap();
        checked += 1;
        ensure!(d.holds, "{} > {} for parts {:?}", d.lhs, d.rhs, p.parts());
        Ok(())
    };
    check(&s9, &Partition::by_path_prefix(&s9, 1).unwrap())?;
    let t = triangle_plus_interior();
    check(&t, &Partition::new(vec![vec![0, 1, 2], vec![3]]).unwrap())?;
    check(&t, &Partition::new(vec![vec![0, 3], vec![1, 2]]).unwrap())?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for s in random_sets(31, 10, 8) {
        let ids = s.ids();
        let k = rng.random_range(1..=3.min(ids.len()));
        let mut parts = vec![Vec::new(); k];
        for (i, id) in ids.into_iter().enumerate() {
            let slot = if i < k { i } else { rng.random_range(0..k) };
            parts[slot].push(id);
        }
        check(&s, &Partition::new(parts).unwrap())?;
    }
    Ok(format!("{checked} instances satisfy g <= multinomial * prod g_i"))
}

fn c10_theorem() -> Outcome {
    let rows = empirical_theorem_check(12).unwrap();
    ensure!(rows.len() == 7, "{} rows", rows.len());
    for r in &rows {
        ensure!(r.holds, "n = {}: g(S) = {}, g(B) = {:?}", r.n, r.g_s, r.g_b);
    }
    let last = rows.last().unwrap();
    Ok(format!(
        "6 <= n <= 12 hold; g(S_12) = {}, max g(B_12) = {}",
        last.g_s,
        last.g_b.as_deref().unwrap_or("-")
    ))
}

fn c11_estimator() -> Outcome {
    let e = estimate_peelings(&convex(6), 100, 1).unwrap();
    ensure!(e.mean == 720.0 && e.std_error == 0.0, "convex 6-gon: {e:?}");
    let e = estimate_peelings(&triangle_plus_interior(), 100, 1).unwrap();
    ensure!(e.mean == 18.0 && e.std_error == 0.0, "triangle + interior: {e:?}");
    let (s9, _) = build_s(9, &ConstructionParams::default()).unwrap();
    let exact = count_u64(&s9) as f64;
    let mut worst: f64 = 0.0;
    for seed in [11, 22, 33] {
        let e = estimate_peelings(&s9, 10_000, seed).unwrap();
        let z = (e.mean - exact).abs() / e.std_error;
        if z > 3.0 || z.is_nan() {
            return Err(format!("seed {seed}: mean {} vs {exact}, se {}", e.mean, e.std_error));
        }
        worst = worst.max(z);
    }
    Ok(format!("zero-variance fixtures exact; S_9 within {worst:.2} standard errors"))
}

fn run_twice(args: &[&str], files: &[&str]) -> Result<(), String> {
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_peelkit"))
            .args(args)
            .current_dir(dir.path())
            .env_remove("PEELKIT_PRECISION_BITS")
            .output()
            .unwrap();
        ensure!(status.status.success(), "{args:?} exited with {:?}", status.status.code());
        let bytes: Vec<Vec<u8>> = files
            .iter()
            .map(|f| std::fs::read(Path::new(dir.path()).join(f)).unwrap())
            .collect();
        outputs.push((status.stdout, bytes));
    }
    ensure!(outputs[0] == outputs[1], "{args:?} differs between runs");
    Ok(())
}

fn c12_determinism() -> Outcome {
    run_twice(
        &["construct", "s", "--n", "12", "--out", "s.json", "--svg", "s.svg", "--unflattened", "--report", "r.json"],
        &["s.json", "s.svg", "r.json"],
    )?;
    run_twice(
        &["construct", "b", "--n", "18", "--ray", "2", "--out", "b.json", "--svg", "b.svg", "--report", "r.json"],
        &["b.json", "b.svg", "r.json"],
    )?;
    let dir = tempfile::tempdir().unwrap();
    let s9 = dir.path().join("s9.json");
    Command::new(env!("CARGO_BIN_EXE_peelkit"))
        .args(["construct", "s", "--n", "9", "--out"])
        .arg(&s9)
        .output()
        .unwrap();
    let s9 = s9.to_str().unwrap();
    run_twice(
        &["count", "--in", s9, "--estimate", "--samples", "2000", "--seed", "5", "--report", "r.json"],
        &["r.json"],
    )?;
    run_twice(&["render", "--in", s9, "--out", "p.svg", "--report", "r.json"], &["p.svg", "r.json"])?;
    run_twice(
        &["verify", "certificate", "--json", "c.json", "--report", "r.json"],
        &["c.json", "r.json"],
    )?;
    Ok("construct, count --estimate, render and verify reports are byte-identical across runs".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("exact-count oracle equivalence", c1_oracle_equivalence),
        ("convex-position law", c2_convex_position),
        ("trivial lower bound", c3_lower_bound),
        ("construction certificates", c4_construction_certificates),
        ("base cases bit-exact", c5_base_cases),
        ("certificate reproduction", c6_certificate),
        ("exponent constants", c7_exponents),
        ("lemma suites", c8_lemmas),
        ("decomposition lemma", c9_decomposition),
        ("theorem at desk scale", c10_theorem),
        ("estimator soundness", c11_estimator),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
