//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails or overruns its time budget.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::{Duration, Instant};

use qmetric::function_algebra::{strict_fineness_closed_form, strict_fineness_rows};
use qmetric::metrics::suite::{metric_axiom_suite, AxiomTolerances, ViolationKind};
use qmetric::{bures_distance, commutative_density, mk_distance_lp, AlgebraShape, Seminorm, Trace};
use qmetric_cli::checks::{self, CheckSummary};
use qmetric_cli::experiments::{axiom_settings, c2_ratio_failures, c2_ratio_rows, equivalence_trajectories};

const SEED: u64 = 20_240_601;

/// Name, time budget in seconds, and the check.
type Criterion = (&'static str, u64, fn() -> Outcome);

struct Outcome {
    problems: Vec<String>,
    detail: String,
}

fn from_checks(summaries: &[CheckSummary]) -> Outcome {
    let problems = summaries
        .iter()
        .filter(|s| !s.passed())
        .map(|s| format!("{}: {} violations, worst {:e}", s.name, s.violation_count, s.worst))
        .collect();
    let detail = summaries
        .iter()
        .map(|s| format!("{} worst {:.2e}", s.name, s.worst))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { problems, detail }
}

fn c2_closed_form() -> Outcome {
    from_checks(&[checks::c2_quantum_closed_form(1000, SEED, 1e-9)])
}

fn strict_fineness() -> Outcome {
    let table = strict_fineness_rows(1..=100).expect("table");
    let mut problems = Vec::new();
    let mut worst: f64 = 0.0;
    for r in &table.rows {
        let residual = (r.bures - strict_fineness_closed_form(r.n)).abs();
        worst = worst.max(residual);
        if !(residual <= 1e-8) {
            problems.push(format!("n = {}: residual {residual:e}", r.n));
        }
        if r.uniform != 1.0 {
            problems.push(format!("n = {}: uniform distance {}", r.n, r.uniform));
        }
    }
    Outcome {
        problems,
        detail: format!("100 rows, worst residual {worst:.2e}"),
    }
}

fn ratio_divergence() -> Outcome {
    let rows = c2_ratio_rows(20).expect("ratio rows");
    let mut problems = c2_ratio_failures(&rows);
    let tau = Trace::unit(&AlgebraShape::commutative(2));
    let x = commutative_density(&tau, &[1.0, 0.0]).expect("density");
    let y = commutative_density(&tau, &[1.0 - 1e-6, 1e-6]).expect("density");
    let ratio = bures_distance(&tau, &x, &y).expect("bures")
        / mk_distance_lp(&tau, &Seminorm::lip_b(), &x, &y).expect("lp");
    if !((ratio / 707.107 - 1.0).abs() <= 0.01) {
        problems.push(format!("ratio at 1 − y₁ = 1e-6 is {ratio}"));
    }
    let last = rows.last().expect("rows");
    Outcome {
        problems,
        detail: format!("ratio {ratio:.3} at 1e-6, {:.4e} at k = 20 (model {:.4e})", last.ratio, last.model),
    }
}

fn bures_oracles() -> Outcome {
    from_checks(&[
        checks::bures_commutative_oracle(1000, SEED, 1e-9),
        checks::bures_2x2_oracle(1000, SEED, 1e-9),
    ])
}

fn lp_oracle() -> Outcome {
    from_checks(&[
        checks::lp_vs_bruteforce(3, 200, SEED, 1e-9),
        checks::lp_vs_bruteforce(4, 200, SEED, 1e-9),
    ])
}

fn metric_axioms() -> Outcome {
    let mut problems = Vec::new();
    let mut notes = Vec::new();
    for (metric, trace) in axiom_settings(SEED) {
        let r = metric_axiom_suite(&metric, &trace, 10_000, SEED, AxiomTolerances::default())
            .expect("suite");
        let triangle = r
            .failures
            .iter()
            .flat_map(|f| f.violations.iter())
            .filter(|(k, _)| *k == ViolationKind::Triangle)
            .count();
        if triangle > 0 {
            problems.push(format!("{:?} on {:?}: {triangle} triangle violations", r.metric, r.shape));
        }
        if !r.passed() {
            notes.push(format!("{:?} on {:?}: {} other violations", r.metric, r.shape, r.violation_count()));
        }
        notes.push(format!("{:?}{:?} excess {:.1e}", r.metric, r.shape, r.worst_triangle_excess));
    }
    Outcome {
        problems,
        detail: notes.join("; "),
    }
}

fn convergence_transfer() -> Outcome {
    let (traj, problems) = equivalence_trajectories(SEED, 20).expect("probe");
    Outcome {
        problems,
        detail: format!("{} families", traj.len()),
    }
}

fn linalg_kernel() -> Outcome {
    from_checks(&[
        checks::eigen_residuals(1000, SEED, 1e-10),
        checks::sqrt_squares_back(1000, SEED, 1e-10),
    ])
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("c2 quantum metric closed form", 5, c2_closed_form),
        ("strict fineness on C([0,1])", 10, strict_fineness),
        ("Bures / quantum ratio divergence", 1, ratio_divergence),
        ("Bures oracle equivalence", 10, bures_oracles),
        ("LP oracle equivalence", 30, lp_oracle),
        ("metric-axiom property suite", 60, metric_axioms),
        ("convergence transfer", 30, convergence_transfer),
        ("linear-algebra kernel", 20, linalg_kernel),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(*budget) {
            outcome
                .problems
                .push(format!("took {:.2} s, budget {budget} s", elapsed.as_secs_f64()));
        }
        let status = if outcome.problems.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "[{}/8] {status} {name} ({:.2} s / {budget} s): {}",
            i + 1,
            elapsed.as_secs_f64(),
            outcome.detail
        );
        for p in &outcome.problems {
            println!("      {p}");
        }
        if !outcome.problems.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
