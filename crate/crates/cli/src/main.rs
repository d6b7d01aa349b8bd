//! `peelkit`: construct point sets, count peeling sequences, and run the
//! certificate checks from the command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error,
//! 3 undecided at the requested precision.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use peelkit::construction::{build_b, build_s, validate_structure, ConstructionParams};
use peelkit::io::{partition_from_json, point_set_from_json, point_set_to_json};
use peelkit::partition::{check_decomposition, count_simplified, Partition};
use peelkit::peeling::{count_peelings, enumerate_peelings, estimate_peelings, is_peeling_sequence};
use peelkit::svg::{render_svg, RenderOptions};
use peelkit::verifier::{
    self, base_case_check, check_case_conditions, check_exponent_constants, empirical_theorem_check,
    entropy_bound_suite, ratio_lemma_suite, seventh_bound_suite, CaseCondition, LemmaSuite, Verdict,
};
use peelkit::{Error, PointSet};

const PRECISION_ENV: &str = "PEELKIT_PRECISION_BITS";

#[derive(Parser)]
#[command(name = "peelkit", version, about = "Convex hull peeling sequences of planar point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write a JSON run report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Include wall-clock timings in the run report (makes it non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
    /// Worker threads (default: all cores for `count`, 1 elsewhere).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build S_n or B_n and write it as a point-set file.
    Construct(ConstructArgs),
    /// Count peeling sequences exactly, enumerate them, or estimate their number.
    Count(CountArgs),
    /// Check whether an id sequence is a peeling sequence.
    CheckSequence(CheckSequenceArgs),
    /// Simplified sequences over a partition and the multinomial bound.
    Simplified(SimplifiedArgs),
    /// Run the lemma, base-case, certificate or theorem checks.
    Verify(VerifyArgs),
    /// Render a point-set file as SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    S,
    B,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Ray whose two smallest subrays are removed (B only).
    #[arg(long, default_value_t = 1)]
    ray: u8,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Render the set before the top-level squash, with ray guide lines.
    #[arg(long)]
    unflattened: bool,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Print peeling sequences in lexicographic order, up to --limit.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 20)]
    limit: usize,
    /// Monte Carlo estimate instead of an exact count.
    #[arg(long)]
    estimate: bool,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CheckSequenceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated point ids.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    seq: Vec<u32>,
}

#[derive(Args)]
struct SimplifiedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, conflicts_with = "by_rays", required_unless_present = "by_rays")]
    partition: Option<PathBuf>,
    /// Partition by top-level ray.
    #[arg(long)]
    by_rays: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Lemmas,
    BaseCases,
    Certificate,
    Theorem,
}

#[derive(Args)]
struct VerifyArgs {
    target: Target,
    /// Largest n (lemmas: default 64; theorem: default 12).
    #[arg(long)]
    nmax: Option<u64>,
    /// Interval precision in bits (default from PEELKIT_PRECISION_BITS, else 128).
    #[arg(long)]
    precision: Option<u32>,
    /// Write the structured check results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    labels: bool,
}

/// A failed run: message plus exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Undecided(_) => 3,
            Error::ValidationFailed { .. } => 1,
            _ => 2,
        };
        let mut message = e.to_string();
        if code == 3 {
            message.push_str("; retry with a higher --precision");
        }
        Failure { code, message }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

type Outcome = std::result::Result<Run, Failure>;

/// What a successful dispatch produced.
struct Run {
    code: u8,
    inputs: Value,
    outputs: Value,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    inputs: &'a Value,
    outputs: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Value>,
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn load_set(path: &Path) -> std::result::Result<PointSet, Failure> {
    Ok(point_set_from_json(&read(path)?)?)
}

fn precision(flag: Option<u32>) -> std::result::Result<u32, Failure> {
    if let Some(bits) = flag {
        return Ok(bits);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure {
            code: 2,
            message: format!("{PRECISION_ENV}={v:?} is not a bit count"),
        }),
        Err(_) => Ok(verifier::DEFAULT_PRECISION_BITS),
    }
}

/// Integral values print without a fractional part.
fn fmt_f64(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn construct(a: &ConstructArgs) -> Outcome {
    let params = ConstructionParams::default();
    let built = match a.kind {
        Kind::S => build_s(a.n, &params),
        Kind::B => build_b(a.n, a.ray, &params),
    };
    let (set, node) = built?;
    // B_n is validated through its parent S_n; re-check the static conditions on the result
    let report = validate_structure(&set, &node, 0, 0)?;
    write(&a.out, &point_set_to_json(&set))?;
    if let Some(svg_path) = &a.svg {
        let opts = RenderOptions {
            unflattened: a.unflattened,
            labels: false,
        };
        write(svg_path, &render_svg(&set, Some(&node), &opts)?)?;
    }
    let name = match a.kind {
        Kind::S => format!("S_{}", a.n),
        Kind::B => format!("B_{} (ray {})", a.n, a.ray),
    };
    println!("{name}: {} points written to {}", set.len(), a.out.display());
    for f in &report.failures {
        println!("  validation: {f}");
    }
    let ok = report.is_ok();
    println!("validation {}", if ok { "passed" } else { "FAILED" });
    Ok(Run {
        code: if ok { 0 } else { 1 },
        inputs: json!({
            "kind": match a.kind { Kind::S => "s", Kind::B => "b" },
            "n": a.n,
            "ray": matches!(a.kind, Kind::B).then_some(a.ray),
            "unflattened": a.unflattened,
        }),
        outputs: json!({
            "points": set.len(),
            "general_position": report.general_position,
            "hull_is_ray_tips": report.hull_is_ray_tips,
            "x_order_ok": report.x_order_ok,
        }),
        seed: None,
    })
}

fn count(a: &CountArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let inputs = json!({
        "n": set.len(),
        "enumerate": a.enumerate,
        "limit": a.enumerate.then_some(a.limit),
        "estimate": a.estimate,
        "samples": a.estimate.then_some(a.samples),
    });
    if a.estimate {
        let est = estimate_peelings(&set, a.samples, a.seed)?;
        println!("{} ± {}", fmt_f64(est.mean), fmt_f64(est.std_error));
        return Ok(Run {
            code: 0,
            inputs,
            outputs: json!({ "mean": est.mean, "std_error": est.std_error, "samples": est.samples }),
            seed: Some(a.seed),
        });
    }
    let mut listed = Vec::new();
    if a.enumerate {
        for seq in enumerate_peelings(&set, a.limit)? {
            let line: Vec<String> = seq.iter().map(u32::to_string).collect();
            println!("{}", line.join(" "));
            listed.push(seq);
        }
    }
    let g = count_peelings(&set)?;
    println!("{g}");
    Ok(Run {
        code: 0,
        inputs,
        outputs: json!({ "count": g.to_string(), "sequences": listed }),
        seed: None,
    })
}

fn check_sequence(a: &CheckSequenceArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let ok = is_peeling_sequence(&set, &a.seq)?;
    println!("{}", if ok { "valid peeling sequence" } else { "not a peeling sequence" });
    Ok(Run {
        code: if ok { 0 } else { 1 },
        inputs: json!({ "n": set.len(), "sequence": a.seq }),
        outputs: json!({ "valid": ok }),
        seed: None,
    })
}

fn simplified(a: &SimplifiedArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let partition = match &a.partition {
        Some(path) => partition_from_json(&read(path)?)?,
        None => Partition::by_path_prefix(&set, 1)?,
    };
    let simplified = count_simplified(&set, &partition)?;
    let d = check_decomposition(&set, &partition)?;
    let part_counts: Vec<String> = d.part_counts.iter().map(|c| c.to_string()).collect();
    println!("parts: {:?}", partition.sizes());
    println!("simplified sequences: {simplified}");
    println!("part counts: {}", part_counts.join(", "));
    println!("multinomial bound: {}", d.rhs);
    println!(
        "decomposition lemma {}: g = {} <= {}",
        if d.holds { "holds" } else { "FAILS" },
        d.lhs,
        d.rhs
    );
    Ok(Run {
        code: if d.holds { 0 } else { 1 },
        inputs: json!({ "n": set.len(), "parts": partition.parts(), "by_rays": a.by_rays }),
        outputs: json!({
            "simplified": simplified,
            "part_counts": part_counts,
            "g": d.lhs.to_string(),
            "bound": d.rhs.to_string(),
            "holds": d.holds,
        }),
        seed: None,
    })
}

fn verdict_code(conditions: &[&CaseCondition]) -> u8 {
    if conditions.iter().any(|c| c.verdict == Verdict::Fails) {
        1
    } else if conditions.iter().any(|c| c.verdict == Verdict::UndecidedAtPrecision) {
        3
    } else {
        0
    }
}

fn print_suite(s: &LemmaSuite) {
    println!(
        "{}: {} cases, {} failures ({})",
        s.name,
        s.cases,
        s.failures.len(),
        s.range
    );
    for f in &s.failures {
        println!("  FAIL {f}");
    }
}

fn verify(a: &VerifyArgs) -> Outcome {
    let bits = precision(a.precision)?;
    let (code, outputs) = match a.target {
        Target::Lemmas => {
            let n_max = a.nmax.unwrap_or(64);
            let suites = vec![
                entropy_bound_suite(n_max)?,
                ratio_lemma_suite(n_max.min(40), 27, 6)?,
                seventh_bound_suite(n_max)?,
            ];
            suites.iter().for_each(print_suite);
            let exps = check_exponent_constants(bits)?;
            for c in &exps {
                println!("{}", c.table_row());
            }
            let held = exps.iter().filter(|c| c.verdict == Verdict::Holds).count();
            println!("exponent constants: {held}/{} hold", exps.len());
            let refs: Vec<&CaseCondition> = exps.iter().collect();
            let mut code = verdict_code(&refs);
            if code == 0 && !suites.iter().all(LemmaSuite::holds) {
                code = 1;
            }
            (code, json!({ "suites": suites, "exponent_checks": exps }))
        }
        Target::BaseCases => {
            let cases = base_case_check();
            for c in cases.iter().filter(|c| !c.holds) {
                println!("FAIL n={} {:?}: {} > {}", c.n, c.family, c.lhs, c.rhs);
            }
            let held = cases.iter().filter(|c| c.holds).count();
            println!("base cases: {held}/{} hold", cases.len());
            (u8::from(held != cases.len()), json!({ "base_cases": cases }))
        }
        Target::Certificate => {
            let report = check_case_conditions(bits)?;
            for c in report.conditions() {
                println!("{}", c.table_row());
            }
            for note in &report.notes {
                println!("note: {note}");
            }
            let all: Vec<&CaseCondition> = report.conditions().collect();
            println!(
                "certificate: {}/{} hold ({} conditions + {} coefficients + {} sums) at {bits} bits",
                report.count(Verdict::Holds),
                all.len(),
                report.case_conditions.len(),
                report.coefficient_values.len(),
                report.sums.len()
            );
            let code = verdict_code(&all);
            if code == 3 {
                eprintln!("some checks are undecided; retry with a higher --precision");
            }
            (code, serde_json::to_value(&report).expect("plain data"))
        }
        Target::Theorem => {
            let n_max = a.nmax.unwrap_or(12);
            let rows = empirical_theorem_check(n_max)?;
            for r in &rows {
                println!(
                    "n={:>2}  g(S_n)={:<12} g(B_n)={:<12} {}",
                    r.n,
                    r.g_s,
                    r.g_b.as_deref().unwrap_or("-"),
                    if r.holds { "holds" } else { "FAILS" }
                );
            }
            let held = rows.iter().filter(|r| r.holds).count();
            println!("theorem: {held}/{} rows hold", rows.len());
            (u8::from(held != rows.len()), json!({ "rows": rows }))
        }
    };
    if let Some(path) = &a.json {
        let mut text = serde_json::to_string_pretty(&outputs).expect("plain data");
        text.push('\n');
        write(path, &text)?;
    }
    let target = match a.target {
        Target::Lemmas => "lemmas",
        Target::BaseCases => "base-cases",
        Target::Certificate => "certificate",
        Target::Theorem => "theorem",
    };
    Ok(Run {
        code,
        inputs: json!({ "target": target, "nmax": a.nmax, "precision_bits": bits }),
        outputs,
        seed: None,
    })
}

fn render(a: &RenderArgs) -> Outcome {
    let set = load_set(&a.input)?;
    let opts = RenderOptions {
        unflattened: false,
        labels: a.labels,
    };
    write(&a.out, &render_svg(&set, None, &opts)?)?;
    println!("{} points rendered to {}", set.len(), a.out.display());
    Ok(Run {
        code: 0,
        inputs: json!({ "n": set.len(), "labels": a.labels }),
        outputs: json!({ "svg": a.out.display().to_string() }),
        seed: None,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, default_threads) = match &cli.command {
        Command::Construct(_) => ("construct", 1),
        Command::Count(_) => ("count", 0),
        Command::CheckSequence(_) => ("check-sequence", 1),
        Command::Simplified(_) => ("simplified", 1),
        Command::Verify(_) => ("verify", 1),
        Command::Render(_) => ("render", 1),
    };
    // 0 lets rayon pick one thread per core
    let threads = cli.threads.unwrap_or(default_threads);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(2);
    }

    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Count(a) => count(a),
        Command::CheckSequence(a) => check_sequence(a),
        Command::Simplified(a) => simplified(a),
        Command::Verify(a) => verify(a),
        Command::Render(a) => render(a),
    };
    let elapsed = start.elapsed().as_secs_f64();

    let run = match outcome {
        Ok(run) => run,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    if let Some(path) = &cli.report {
        let report = RunReport {
            command: name,
            inputs: &run.inputs,
            outputs: &run.outputs,
            seed: run.seed,
            exit_code: run.code,
            timings: cli.timings.then(|| json!({ "total_seconds": elapsed })),
        };
        let mut text = serde_json::to_string_pretty(&report).expect("plain data");
        text.push('\n');
        if let Err(f) = write(path, &text) {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    }
    ExitCode::from(run.code)
}
