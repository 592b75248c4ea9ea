use tdp::algspec::parse_spec;
use tdp::harness::{run_algorithm, ExperimentConfig, run_experiment};
use tdp::instance::builtin_instance;
use tdp::localsearch::compute_budget;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let algo = &args[1];
    let inst_name = &args[2];
    let runs: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(20);
    let inst = builtin_instance(inst_name).unwrap();
    let spec = parse_spec(algo).unwrap();
    let budget = compute_budget(&inst, 0.05).unwrap();
    let t0 = std::time::Instant::now();
    let config = ExperimentConfig { runs, budget_override: Some(budget), ..Default::default() };
    let records = run_experiment(&[inst], &[spec], &config).unwrap();
    let feas = records.iter().filter(|r| r.feasible).count();
    let wastes: Vec<_> = records.iter().filter_map(|r| r.best_waste).collect();
    println!(
        "{algo} on {inst_name}: {feas}/{} feasible in {:.1}s (budget {budget}), best waste {:?}",
        records.len(),
        t0.elapsed().as_secs_f64(),
        wastes.iter().min()
    );
    let _ = run_algorithm; // silence
}
