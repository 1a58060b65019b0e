//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qtm_cli::cell::{build_cell, chain_cells, undirected_qta, ChainOptions, Rule};
use qtm_core::axioms::{
    check_dqt_axioms, check_equivalences, check_int0_laws, check_trace_axioms, instance_seed,
    replay, run_suite, CheckConfig, ConwayCase, LawReport, LawSet, SuiteReport,
};
use qtm_core::linalg::{isometry_defect, random_isometry, unitarity_defect, Operator};
use qtm_core::trace::{kernel_image_trace, schur_feedback, BlockMap};

const TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn report_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../reports/default_suite.txt")
}

/// The 500 block maps shared by criteria 1 and 4: `u, k ≤ 6`, `l ≤ k + 2`.
fn block_maps() -> Vec<BlockMap> {
    let seed = CheckConfig::default().seed;
    (0..500)
        .map(|i| {
            let s = instance_seed(seed, "acceptance-block-map", i);
            let u = (s % 7) as usize;
            let k = ((s >> 8) % 7) as usize;
            let l = k + ((s >> 16) % 3) as usize;
            let op = random_isometry(u + l, u + k, s).expect("rows ≥ cols");
            BlockMap::new(op, u, k, l).expect("consistent blocks")
        })
        .collect()
}

fn worst(reports: &[LawReport]) -> (f64, String) {
    reports
        .iter()
        .fold((0.0, String::from("-")), |acc, r| {
            if r.max_violation > acc.0 || !r.max_violation.is_finite() {
                (r.max_violation, r.law.clone())
            } else {
                acc
            }
        })
}

fn laws_within(reports: &[LawReport], tol: f64) -> bool {
    !reports.is_empty() && reports.iter().all(|r| r.max_violation <= tol)
}

fn criterion_1(maps: &[BlockMap]) -> Outcome {
    let start = Instant::now();
    let mut max = 0.0f64;
    for m in maps {
        let d = match schur_feedback(m, 1e-9) {
            Ok(out) => isometry_defect(&out),
            Err(_) => f64::INFINITY,
        };
        max = max.max(d);
    }
    let took = start.elapsed();
    outcome(
        max <= TOL && took <= Duration::from_secs(10),
        format!("{} maps, max isometry defect {max:.3e}, {:.2} s", maps.len(), took.as_secs_f64()),
    )
}

fn degenerate_witness() -> bool {
    let p = Operator::real(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
    let one = Operator::real(&[[1.0]]);
    let joint = BlockMap::new(p.clone(), 2, 1, 1).and_then(|m| schur_feedback(&m, 1e-9));
    let nested = BlockMap::new(p, 1, 2, 2)
        .and_then(|m| schur_feedback(&m, 1e-9))
        .and_then(|inner| BlockMap::new(inner, 1, 1, 1))
        .and_then(|m| schur_feedback(&m, 1e-9));
    matches!((joint, nested), (Ok(j), Ok(n)) if j == one && n == one)
}

fn criterion_2() -> Outcome {
    let cfg = CheckConfig {
        laws: vec![LawSet::TraceAxioms],
        ..CheckConfig::default()
    };
    let reports = check_trace_axioms(&cfg);
    let kernel = reports
        .iter()
        .find(|r| r.law == "vanishing-kernel")
        .map_or(0, |r| r.instances_run);
    let (w, law) = worst(&reports);
    let witness = degenerate_witness();
    outcome(
        laws_within(&reports, TOL) && kernel >= 50 && witness,
        format!(
            "{} laws, worst {w:.3e} ({law}), {kernel} forced-kernel instances, degenerate witness [[1]]: {witness}",
            reports.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let cfg = CheckConfig {
        laws: vec![LawSet::KleeneEquivalence, LawSet::KitEquivalence],
        ..CheckConfig::default()
    };
    let reports = check_equivalences(&cfg);
    let get = |id: &str| reports.iter().find(|r| r.law == id);
    match (get("kleene-schur"), get("kit-kernel")) {
        (Some(k), Some(kit)) => outcome(
            k.instances_run >= 200 && k.max_violation <= 1e-6 && kit.max_violation <= TOL,
            format!(
                "kleene-schur {} instances max {:.3e}, kit-kernel {} instances max {:.3e}",
                k.instances_run, k.max_violation, kit.instances_run, kit.max_violation
            ),
        ),
        _ => outcome(false, "law reports missing"),
    }
}

fn criterion_4(maps: &[BlockMap]) -> Outcome {
    let mut max = 0.0f64;
    for m in maps {
        let d = match (kernel_image_trace(m, 1e-9), schur_feedback(m, 1e-9)) {
            (Ok(kit), Ok(schur)) => kit.trace.max_diff(&schur),
            _ => f64::INFINITY,
        };
        max = max.max(d);
    }
    outcome(max <= TOL, format!("{} maps, max |kit − schur| {max:.3e}", maps.len()))
}

fn criterion_5() -> Outcome {
    let cfg = CheckConfig {
        instances: 100,
        max_dim: 3,
        ..CheckConfig::default()
    };
    let reports = check_dqt_axioms(&cfg);
    let tensor = reports.iter().any(|r| r.law == "dqt-tensor-compat");
    let (w, law) = worst(&reports);
    outcome(
        laws_within(&reports, TOL) && tensor,
        format!("{} laws at dims ≤ 3, worst {w:.3e} ({law})", reports.len()),
    )
}

fn criterion_6(suite: &SuiteReport, took: Duration) -> Outcome {
    let reports = check_int0_laws(&CheckConfig::default());
    let (w, law) = worst(&reports);
    outcome(
        laws_within(&reports, TOL) && suite.all_pass() && took <= Duration::from_secs(60),
        format!(
            "{} Int₀/functor laws, worst {w:.3e} ({law}); default suite all_pass={} in {:.2} s",
            reports.len(),
            suite.all_pass(),
            took.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let run = || -> Result<(bool, String), Box<dyn std::error::Error>> {
        let wide = build_cell(2, 3, &Rule::identity())?;
        let dims = (wide.t.h(), wide.t.k(), wide.t.l());
        let small = build_cell(2, 1, &Rule::identity())?;
        let (undirected, _) = undirected_qta(&small.t, &small.labels)?;
        let shape = undirected.tau().shape();
        let defect = unitarity_defect(undirected.tau());
        let chain = chain_cells(&wide, 3, ChainOptions::default())?;
        let chained = (chain.t.h(), chain.t.k(), chain.t.l());
        let pass = dims == (8, 4, 4) && shape == (8, 8) && defect <= 1e-9 && chained == (512, 4, 4);
        Ok((
            pass,
            format!(
                "cell (h,k,l)={dims:?}, undirected {}×{} defect {defect:.3e}, chain of 3 (h,k,l)={chained:?}",
                shape.0, shape.1
            ),
        ))
    };
    match run() {
        Ok((pass, detail)) => outcome(pass, detail),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_8(shipped: &str) -> Outcome {
    let one = Complex64::new(1.0, 0.0);
    let case = ConwayCase::at(one, one);
    let exact = case.sum_lhs == Complex64::new(-1.0, 0.0) && case.sum_rhs == Complex64::new(0.0, 0.0);
    let line = shipped
        .lines()
        .find(|l| l.starts_with("# conway a=1 b=1 "))
        .unwrap_or("");
    let shown = line.contains("(a+b)*=-1") && line.contains("(a*b)*a*=0");
    outcome(
        exact && shown,
        format!(
            "(a+b)* = {} vs (a*b)*a* = {} at a=b=1; shipped line present: {shown}",
            case.sum_lhs.re, case.sum_rhs.re
        ),
    )
}

fn criterion_9(shipped: &SuiteReport, rerun: &SuiteReport) -> Outcome {
    let cfg = CheckConfig::default();
    let mut mismatches = Vec::new();
    for r in &shipped.reports {
        match replay(&cfg, &r.law, r.worst_seed) {
            Ok(v) if v.to_bits() == r.max_violation.to_bits() => {}
            _ => mismatches.push(format!("replay {}", r.law)),
        }
    }
    let same = shipped.reports.len() == rerun.reports.len()
        && shipped.reports.iter().zip(&rerun.reports).all(|(a, b)| {
            a.law == b.law
                && a.max_violation.to_bits() == b.max_violation.to_bits()
                && a.worst_seed == b.worst_seed
        });
    if !same {
        mismatches.push("rerun differs from shipped report".into());
    }
    outcome(
        mismatches.is_empty() && !shipped.reports.is_empty(),
        if mismatches.is_empty() {
            format!("{} worst seeds replayed bit-exactly, rerun identical", shipped.reports.len())
        } else {
            mismatches.join(", ")
        },
    )
}

fn main() -> ExitCode {
    let maps = block_maps();
    let shipped_text = std::fs::read_to_string(report_path()).unwrap_or_default();
    let shipped = SuiteReport::parse(&shipped_text).unwrap_or(SuiteReport { reports: Vec::new() });

    let start = Instant::now();
    let suite = run_suite(&CheckConfig::default()).expect("default config is valid");
    let took = start.elapsed();

    let results = [
        criterion_1(&maps),
        criterion_2(),
        criterion_3(),
        criterion_4(&maps),
        criterion_5(),
        criterion_6(&suite, took),
        criterion_7(),
        criterion_8(&shipped_text),
        criterion_9(&shipped, &suite),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag}  {}", i + 1, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
