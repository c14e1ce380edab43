//! The five named experiments. Each returns an [`Artifact`]: the rendered
//! output plus the list of failed assertions (empty on success).

use qmetric::function_algebra::{make_fn, sample_grid, sig12, strict_fineness_closed_form, strict_fineness_rows};
use qmetric::metrics::probe::{convergence_transfer_probe, geometric_schedule, sample_probe_family, ProbeRow};
use qmetric::metrics::suite::{metric_axiom_suite, trial_rng, AxiomReport, AxiomTolerances};
use qmetric::metrics::Metric;
use qmetric::{bures_distance, commutative_density, cstar_distance, mk_distance_lp, AlgebraShape, Seminorm, Trace};
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{self, CheckSummary};
use crate::config::{ExperimentConfig, ExperimentName, Format, SCHEMA_VERSION};
use crate::error::CliError;

pub const RESIDUAL_TOL: f64 = 1e-8;
pub const MODEL_REL_TOL: f64 = 0.01;
pub const MODEL_REGIME: f64 = 1e-6;
pub const CROSS_THRESHOLD: f64 = 1e-6;
pub const FINAL_BOUND: f64 = 1e-4;
pub const CSTAR_THRESHOLD: f64 = 1e-8;
pub const BURES_TRANSFER_BOUND: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub body: String,
    pub failures: Vec<String>,
}

impl Artifact {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    match cfg.experiment {
        ExperimentName::StrictFineness => strict_fineness(cfg),
        ExperimentName::C2Inequivalence => c2_inequivalence(cfg),
        ExperimentName::Equivalence => equivalence(cfg),
        ExperimentName::Properties => properties(cfg),
        ExperimentName::SequencePlot => sequence_plot(cfg),
    }
}

/// A table with a fixed header, rendered as CSV (provenance in `#` lines)
/// or as JSON objects keyed by column.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => sig12(*v),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

fn config_json(cfg: &ExperimentConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

fn render(cfg: &ExperimentConfig, table: &Table, failures: &[String]) -> String {
    match cfg.format {
        Format::Csv => {
            let mut out = format!("# schema_version: {SCHEMA_VERSION}\n# config: {}\n", config_json(cfg));
            for f in failures {
                out.push_str(&format!("# FAILED: {f}\n"));
            }
            out.push_str(&table.header.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj = table
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect::<serde_json::Map<_, _>>();
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "config": cfg,
                "passed": failures.is_empty(),
                "failures": failures,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    }
}

/// `d_B(f_n, 1)` by quadrature next to its closed form.
pub fn strict_fineness(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let table = strict_fineness_rows(cfg.nmin..=cfg.nmax)?;
    let mut failures = table.check();
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in &table.rows {
        let closed = strict_fineness_closed_form(r.n);
        let residual = (r.bures - closed).abs();
        if !(residual <= RESIDUAL_TOL) {
            failures.push(format!("row n = {}: residual {residual:e} exceeds {RESIDUAL_TOL:e}", r.n));
        }
        rows.push(vec![
            Cell::Int(r.n as u64),
            Cell::Num(r.bures),
            Cell::Num(r.uniform),
            Cell::Num(closed),
            Cell::Num(residual),
        ]);
    }
    let t = Table {
        header: vec!["n", "bures", "uniform", "closed_form", "residual"],
        rows,
    };
    Ok(Artifact {
        body: render(cfg, &t, &failures),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub k: u32,
    pub y1: f64,
    pub gap: f64,
    pub d_bures: f64,
    pub d_quantum: f64,
    pub d_cstar: f64,
    pub ratio: f64,
    pub model: f64,
}

/// `x = (1, 0)`, `y = (1 − 4^{−k}, 4^{−k})` on ℂ² with unit weights and `L^B`.
pub fn c2_ratio_rows(kmax: u32) -> qmetric::Result<Vec<RatioRow>> {
    let tau = Trace::unit(&AlgebraShape::commutative(2));
    let lb = Seminorm::lip_b();
    let x = commutative_density(&tau, &[1.0, 0.0])?;
    (1..=kmax)
        .map(|k| {
            let gap = 4f64.powi(-(k as i32));
            let y1 = 1.0 - gap;
            let y = commutative_density(&tau, &[y1, gap])?;
            let d_bures = bures_distance(&tau, &x, &y)?;
            let d_quantum = mk_distance_lp(&tau, &lb, &x, &y)?;
            Ok(RatioRow {
                k,
                y1,
                gap,
                d_bures,
                d_quantum,
                d_cstar: cstar_distance(x.element(), y.element())?,
                ratio: d_bures / d_quantum,
                model: 1.0 / (2.0 * gap).sqrt(),
            })
        })
        .collect()
}

/// Failed assertions for a ratio sequence.
pub fn c2_ratio_failures(rows: &[RatioRow]) -> Vec<String> {
    let mut failures = Vec::new();
    for w in rows.windows(2) {
        if !(w[1].ratio > w[0].ratio) {
            failures.push(format!(
                "row k = {}: ratio {} does not exceed {} at k = {}",
                w[1].k, w[1].ratio, w[0].ratio, w[0].k
            ));
        }
    }
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        let need = 2f64.powi(rows.len() as i32 - 1) * 0.9;
        let growth = last.ratio / first.ratio;
        if !(growth >= need) {
            failures.push(format!("growth last/first = {growth} is below {need}"));
        }
    }
    for r in rows.iter().filter(|r| r.gap <= MODEL_REGIME) {
        let rel = (r.ratio / r.model - 1.0).abs();
        if !(rel <= MODEL_REL_TOL) {
            failures.push(format!("row k = {}: ratio {} is {rel:e} away from model {}", r.k, r.ratio, r.model));
        }
    }
    failures
}

pub fn c2_inequivalence(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let rows = c2_ratio_rows(cfg.kmax)?;
    let failures = c2_ratio_failures(&rows);
    let t = Table {
        header: vec!["k", "y1", "one_minus_y1", "d_bures", "d_quantum", "d_cstar", "ratio", "model"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(r.k as u64),
                    Cell::Num(r.y1),
                    Cell::Num(r.gap),
                    Cell::Num(r.d_bures),
                    Cell::Num(r.d_quantum),
                    Cell::Num(r.d_cstar),
                    Cell::Num(r.ratio),
                    Cell::Num(r.model),
                ]
            })
            .collect(),
    };
    Ok(Artifact {
        body: render(cfg, &t, &failures),
        failures,
    })
}

/// Shapes probed by the equivalence experiment.
pub struct ProbeSetting {
    pub label: &'static str,
    pub trace: Trace,
    pub seminorm: Option<Seminorm>,
}

pub fn probe_settings(seed: u64) -> Vec<ProbeSetting> {
    let shape = |dims: Vec<usize>| AlgebraShape::new(dims).expect("valid shape");
    let mut rng = trial_rng(seed, u64::MAX);
    vec![
        ProbeSetting {
            label: "1+1",
            trace: Trace::unit(&shape(vec![1, 1])),
            seminorm: Some(Seminorm::lip_b()),
        },
        ProbeSetting {
            label: "1+1+1",
            trace: Trace::new(shape(vec![1, 1, 1]), vec![0.5, 1.0, 2.0]).expect("valid weights"),
            seminorm: Some(Seminorm::random(3, &mut rng)),
        },
        ProbeSetting {
            label: "2",
            trace: Trace::unit(&shape(vec![2])),
            seminorm: None,
        },
        ProbeSetting {
            label: "3",
            trace: Trace::unit(&shape(vec![3])),
            seminorm: None,
        },
    ]
}

/// `k = 1, …, 10^{10}`, four points per decade.
pub fn probe_schedule() -> Vec<u64> {
    geometric_schedule(10, 4)
}

/// One probe family's table.
pub struct Trajectory {
    pub shape: &'static str,
    pub family: u64,
    pub rows: Vec<ProbeRow>,
}

/// Probe trajectories for `families` seeded families per setting, with the
/// failures found.
pub fn equivalence_trajectories(seed: u64, families: u64) -> qmetric::Result<(Vec<Trajectory>, Vec<String>)> {
    let schedule = probe_schedule();
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for (s, setting) in probe_settings(seed).iter().enumerate() {
        for fam in 0..families {
            let mut rng = trial_rng(seed, ((s as u64) << 32) | fam);
            let (x, h) = sample_probe_family(&setting.trace, &mut rng);
            let table = convergence_transfer_probe(&setting.trace, &x, &h, &schedule, setting.seminorm.as_ref())?;
            let bad = table.transfer_violations(CSTAR_THRESHOLD, BURES_TRANSFER_BOUND);
            if !bad.is_empty() {
                failures.push(format!(
                    "shape {} family {fam}: d_bures > {BURES_TRANSFER_BOUND:e} with d_cstar ≤ {CSTAR_THRESHOLD:e} at k = {bad:?}",
                    setting.label
                ));
            }
            if !table.co_vanishes(CROSS_THRESHOLD, FINAL_BOUND) {
                failures.push(format!("shape {} family {fam}: metric columns do not co-vanish", setting.label));
            }
            out.push(Trajectory {
                shape: setting.label,
                family: fam,
                rows: table.rows,
            });
        }
    }
    Ok((out, failures))
}

pub fn equivalence(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let (trajectories, failures) = equivalence_trajectories(cfg.seed, cfg.trials)?;
    let mut rows = Vec::new();
    for t in trajectories {
        for r in t.rows {
            rows.push(vec![
                Cell::Text(t.shape.to_string()),
                Cell::Int(t.family),
                Cell::Int(r.k),
                Cell::Num(r.d_cstar),
                Cell::Num(r.d_bures),
                r.d_quantum.map_or(Cell::Missing, Cell::Num),
            ]);
        }
    }
    let t = Table {
        header: vec!["shape", "family", "k", "d_cstar", "d_bures", "d_quantum"],
        rows,
    };
    Ok(Artifact {
        body: render(cfg, &t, &failures),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    pub axiom_suites: Vec<AxiomReport>,
}

/// Metric/trace pairs covered by the axiom suites.
pub fn axiom_settings(seed: u64) -> Vec<(Metric, Trace)> {
    let mut out = Vec::new();
    for setting in probe_settings(seed) {
        out.push((Metric::Bures, setting.trace.clone()));
        out.push((Metric::CStar, setting.trace.clone()));
        if let Some(l) = setting.seminorm {
            out.push((Metric::Quantum(l), setting.trace));
        }
    }
    out
}

pub fn property_report(cfg: &ExperimentConfig) -> qmetric::Result<PropertyReport> {
    let (seed, n) = (cfg.seed, cfg.trials);
    let tol = |default: f64| cfg.tolerance.unwrap_or(default);
    let checks = vec![
        checks::c2_quantum_closed_form(n, seed, tol(1e-9)),
        checks::bures_commutative_oracle(n, seed, tol(1e-9)),
        checks::bures_2x2_oracle(n, seed, tol(1e-9)),
        checks::lp_vs_bruteforce(3, n, seed, tol(1e-9)),
        checks::lp_vs_bruteforce(4, n, seed, tol(1e-9)),
        checks::eigen_residuals(n, seed, tol(1e-10)),
        checks::sqrt_squares_back(n, seed, tol(1e-10)),
        checks::state_map_reconstruction(n, seed, tol(1e-12)),
    ];
    let axiom_tol = match cfg.tolerance {
        Some(t) => AxiomTolerances {
            triangle_slack: t,
            symmetry: t,
            indiscernible: AxiomTolerances::default().indiscernible,
        },
        None => AxiomTolerances::default(),
    };
    let axiom_suites = axiom_settings(seed)
        .iter()
        .map(|(metric, trace)| metric_axiom_suite(metric, trace, n, seed, axiom_tol))
        .collect::<qmetric::Result<Vec<_>>>()?;
    let passed = checks.iter().all(CheckSummary::passed) && axiom_suites.iter().all(AxiomReport::passed);
    Ok(PropertyReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        passed,
        checks,
        axiom_suites,
    })
}

impl PropertyReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in self.checks.iter().filter(|c| !c.passed()) {
            let trials: Vec<u64> = c.violations.iter().map(|v| v.trial).collect();
            out.push(format!(
                "{}: {} violations above {:e} (seed {}, trials {trials:?})",
                c.name, c.violation_count, c.tolerance, c.seed
            ));
        }
        for r in self.axiom_suites.iter().filter(|r| !r.passed()) {
            let trials: Vec<u64> = r.failures.iter().take(checks::MAX_LISTED).map(|f| f.trial).collect();
            out.push(format!(
                "{:?} axioms on shape {:?}: {} violations (seed {}, trials {trials:?})",
                r.metric,
                r.shape,
                r.violation_count(),
                r.seed
            ));
        }
        out
    }
}

pub fn properties(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let report = property_report(cfg)?;
    let failures = report.failures();
    let body = match cfg.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => {
            let mut rows: Vec<Vec<Cell>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        Cell::Text(c.name.clone()),
                        Cell::Int(c.trials),
                        Cell::Num(c.tolerance),
                        Cell::Num(c.worst),
                        Cell::Int(c.violation_count),
                    ]
                })
                .collect();
            for r in &report.axiom_suites {
                let name = format!("axioms_{:?}_{}", r.metric, shape_label(&r.shape)).to_lowercase();
                rows.push(vec![
                    Cell::Text(name),
                    Cell::Int(r.trials),
                    Cell::Num(r.tolerances.triangle_slack),
                    Cell::Num(r.worst_triangle_excess),
                    Cell::Int(r.violation_count() as u64),
                ]);
            }
            let t = Table {
                header: vec!["check", "trials", "tolerance", "worst", "violations"],
                rows,
            };
            render(cfg, &t, &failures)
        }
    };
    Ok(Artifact { body, failures })
}

fn shape_label(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join("+")
}

/// `f_1, f_2, f_3` on an even grid.
pub fn sequence_plot(cfg: &ExperimentConfig) -> Result<Artifact, CliError> {
    let fs = (1..=3).map(make_fn).collect::<qmetric::Result<Vec<_>>>()?;
    let rows = sample_grid(&fs, cfg.grid)
        .into_iter()
        .map(|(x, vals)| std::iter::once(Cell::Num(x)).chain(vals.into_iter().map(Cell::Num)).collect())
        .collect();
    let t = Table {
        header: vec!["x", "f1", "f2", "f3"],
        rows,
    };
    Ok(Artifact {
        body: render(cfg, &t, &[]),
        failures: Vec::new(),
    })
}
