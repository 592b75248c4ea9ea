//! Experiment orchestration: dispatching algorithm specs to their engines,
//! running seeded batches in parallel, persisting results, and the
//! statistics used to compare algorithms.

mod records;
pub mod stats;

pub use records::{load_solution, read_records, write_records, RunRecord, SolutionRecord};
pub use stats::{
    critical_values, feasibility_summary, friedman_statistic, holm_test, holm_vs_control,
    iman_davenport, rank_algorithms, ranksum_test, FeasibilityCell, HolmLine, RankTable,
};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algspec::{AlgorithmSpec, LsMethod};
use crate::cooperative::{run_cooperative, DEFAULT_CYCLES};
use crate::encoding::random_genotype;
use crate::error::Result;
use crate::evolution::{run_ga, run_ma};
use crate::instance::ProblemInstance;
use crate::localsearch::{compute_budget, hill_climb, tabu_search, DEFAULT_TENURE};
use crate::pressing::PressingPlan;

/// Runs one algorithm on one instance with one seed. Local searches start
/// from a seeded random genotype; cooperative teams use the default cycle
/// count unless overridden.
pub fn run_algorithm(
    inst: &ProblemInstance,
    spec: &AlgorithmSpec,
    budget: u64,
    cycles: u64,
    seed: u64,
) -> Result<RunRecord> {
    let started = std::time::Instant::now();
    match spec {
        AlgorithmSpec::LocalSearch(ls) => {
            let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let start = random_genotype(inst, ls.kind, &mut rng);
            let (g, fit, used) = match ls.method {
                LsMethod::HillClimbing => hill_climb(inst, ls.kind, start, budget, rng)?,
                LsMethod::TabuSearch => {
                    tabu_search(inst, ls.kind, start, budget, DEFAULT_TENURE, rng)?
                }
            };
            Ok(RunRecord::from_best(
                spec.to_string(),
                inst,
                seed,
                used,
                Some((g, fit)),
                started.elapsed().as_secs_f64(),
            ))
        }
        AlgorithmSpec::Genetic(g) => run_ga(inst, g, budget, seed),
        AlgorithmSpec::Memetic(m) => run_ma(inst, m, budget, seed),
        AlgorithmSpec::Cooperative(c) => run_cooperative(inst, c, budget, cycles, seed),
    }
}

/// Experiment configuration for [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Runs per (algorithm, instance) pair; cooperative algorithms get
    /// `n x 10` runs instead.
    pub runs: u64,
    /// Neighbourhood percentage feeding the budget formula.
    pub percent: f64,
    /// Overrides the formula budget when set.
    pub budget_override: Option<u64>,
    /// Synchronisation cycles for cooperative algorithms.
    pub cycles: u64,
    /// Base seed; run `r` uses `seed0 + r`.
    pub seed0: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            runs: 20,
            percent: 0.05,
            budget_override: None,
            cycles: DEFAULT_CYCLES,
            seed0: 1,
        }
    }
}

/// Executes every (spec, instance, seed) combination, in parallel across
/// runs, and returns the records sorted by (algorithm, instance, seed).
/// Cooperative specs are run `n x 10` times per instance regardless of
/// `config.runs`.
pub fn run_experiment(
    instances: &[ProblemInstance],
    specs: &[AlgorithmSpec],
    config: &ExperimentConfig,
) -> Result<Vec<RunRecord>> {
    if instances.is_empty() || specs.is_empty() {
        return Err(crate::error::Error::EmptyInput(
            "experiment needs at least one instance and one algorithm".into(),
        ));
    }
    let mut jobs: Vec<(&AlgorithmSpec, &ProblemInstance, u64)> = Vec::new();
    for spec in specs {
        let runs = match spec {
            AlgorithmSpec::Cooperative(c) => c.n as u64 * 10,
            _ => config.runs,
        };
        for inst in instances {
            for r in 0..runs {
                jobs.push((spec, inst, config.seed0 + r));
            }
        }
    }
    let mut records = jobs
        .into_par_iter()
        .map(|(spec, inst, seed)| {
            let budget = match config.budget_override {
                Some(b) => b,
                None => compute_budget(inst, config.percent)?,
            };
            run_algorithm(inst, spec, budget, config.cycles, seed)
        })
        .collect::<Result<Vec<RunRecord>>>()?;
    records.sort_by(|a, b| {
        (&a.algorithm, &a.instance, a.seed).cmp(&(&b.algorithm, &b.instance, b.seed))
    });
    Ok(records)
}

/// Renders an evaluation report for a plan: waste, the overall deviation as
/// a percentage of total demand, the extreme per-variation deviation
/// percentages, and per-variation production lines.
pub fn evaluation_report(inst: &ProblemInstance, plan: &PressingPlan) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "instance: {} (v={}, t={}, s={})",
        inst.name,
        inst.v,
        plan.pressings.len(),
        inst.s
    );
    for (j, r) in plan.pressings.iter().enumerate() {
        let _ = writeln!(out, "template {}: {} pressings", j + 1, r);
    }
    let _ = writeln!(
        out,
        "{:>4} {:>12} {:>12} {:>10} {:>8}",
        "var", "demand", "production", "deviation", "dev %"
    );
    let (mut min_pct, mut max_pct) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..inst.v {
        let q = inst.demands[i] as i64;
        let p = plan.production[i] as i64;
        let dev = p - q;
        let pct = dev as f64 / q as f64 * 100.0;
        min_pct = min_pct.min(pct);
        max_pct = max_pct.max(pct);
        let _ = writeln!(out, "{:>4} {q:>12} {p:>12} {dev:>10} {pct:>8.2}", i + 1);
    }
    let overall = plan.waste as f64 / inst.total_demand() as f64 * 100.0;
    let _ = writeln!(out, "waste: {}", plan.waste);
    let _ = writeln!(out, "overall deviation: {overall:.2} %");
    let _ = writeln!(out, "extreme deviations: {min_pct:.2} % / {max_pct:.2} %");
    let _ = writeln!(out, "feasible: {}", plan.feasible);
    out
}

/// Overall deviation percentage (waste over total demand).
pub fn overall_deviation_pct(inst: &ProblemInstance, plan: &PressingPlan) -> f64 {
    plan.waste as f64 / inst.total_demand() as f64 * 100.0
}

/// Extreme per-variation deviation percentages (most negative, most
/// positive).
pub fn extreme_deviation_pct(inst: &ProblemInstance, plan: &PressingPlan) -> (f64, f64) {
    let mut min_pct = f64::INFINITY;
    let mut max_pct = f64::NEG_INFINITY;
    for i in 0..inst.v {
        let q = inst.demands[i] as f64;
        let pct = (plan.production[i] as f64 - q) / q * 100.0;
        min_pct = min_pct.min(pct);
        max_pct = max_pct.max(pct);
    }
    (min_pct, max_pct)
}

/// Scientific notation with a two-digit exponent (`5.000e-02`), the format
/// used by the published Holm tables.
pub fn sci3(x: f64) -> String {
    if x == 0.0 {
        return "0.000e+00".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let mantissa = x / 10f64.powi(exp);
    // Guard against 9.9995 rounding up to 10.000.
    let (mantissa, exp) =
        if mantissa.abs() >= 9.9995 { (mantissa / 10.0, exp + 1) } else { (mantissa, exp) };
    format!("{mantissa:.3}e{}{:02}", if exp < 0 { "-" } else { "+" }, exp.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algspec::parse_spec;
    use crate::bestknown;
    use crate::instance::builtin_instance;
    use crate::pressing::evaluate_with_pressings;

    #[test]
    fn feasibility_display_format() {
        let cell = FeasibilityCell {
            algorithm: "Hc.P".into(),
            instance: "catfood".into(),
            feasible: 17,
            runs: 20,
        };
        assert_eq!(cell.display(), "17 (85.00 %)");
        let all = FeasibilityCell { feasible: 20, runs: 20, ..cell.clone() };
        assert_eq!(all.display(), "20 (100.00 %)");
        assert!(feasibility_summary(&[]).is_err());
    }

    #[test]
    fn experiment_cardinality_and_determinism() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = parse_spec("Hc.P*").unwrap();
        let config = ExperimentConfig {
            runs: 4,
            budget_override: Some(60),
            ..ExperimentConfig::default()
        };
        let records = run_experiment(&[inst.clone()], &[spec.clone()], &config).unwrap();
        assert_eq!(records.len(), 4);
        let again = run_experiment(&[inst], &[spec], &config).unwrap();
        for (a, b) in records.iter().zip(&again) {
            assert_eq!(a.algorithm, b.algorithm);
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.best_waste, b.best_waste);
            assert_eq!(a.feasible, b.feasible);
            assert_eq!(a.best_solution, b.best_solution);
        }
    }

    #[test]
    fn cooperative_specs_run_n_times_ten() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = parse_spec("Ri2(Hc.P,Hc.P)RR").unwrap();
        let config = ExperimentConfig {
            runs: 3, // overridden by the n x 10 rule
            budget_override: Some(20),
            cycles: 2,
            ..ExperimentConfig::default()
        };
        let records = run_experiment(&[inst], &[spec], &config).unwrap();
        assert_eq!(records.len(), 20);
    }

    #[test]
    fn records_round_trip_through_disk() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = parse_spec("Hc.P").unwrap();
        let config = ExperimentConfig {
            runs: 3,
            budget_override: Some(40),
            ..ExperimentConfig::default()
        };
        let records = run_experiment(&[inst], &[spec], &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_records(&path, &records).unwrap();
        let loaded = read_records(&path).unwrap();
        assert_eq!(records, loaded);
    }

    #[test]
    fn evaluation_report_shows_published_columns() {
        let inst = builtin_instance("catfood").unwrap();
        let sol = bestknown::catfood_best();
        let plan = evaluate_with_pressings(&inst, &sol.genotype, &sol.pressings).unwrap();
        assert!((overall_deviation_pct(&inst, &plan) - 0.80).abs() < 0.01);
        let (lo, hi) = extreme_deviation_pct(&inst, &plan);
        assert!((lo - -3.85).abs() < 0.01);
        assert!((hi - 1.79).abs() < 0.01);
        let report = evaluation_report(&inst, &plan);
        assert!(report.contains("waste: 29287"));
        assert!(report.contains("feasible: true"));
    }

    #[test]
    fn sci3_matches_table_style() {
        assert_eq!(sci3(0.05), "5.000e-02");
        assert_eq!(sci3(0.05 / 11.0), "4.545e-03");
        assert_eq!(sci3(0.025), "2.500e-02");
        assert_eq!(sci3(1.867332), "1.867e+00");
    }
}
