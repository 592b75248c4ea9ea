use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use tdp::encoding::{random_genotype, Genotype, Model, ModelKind};
use tdp::evolution::{greedy_crossover, mutate, tournament_select};
use tdp::instance::builtin_instance;
use tdp::pressing::{Evaluator, Fitness};

fn main() {
    let inst = builtin_instance("catfood").unwrap();
    let kind = ModelKind::new(Model::Classical, false);
    let p_m = 1.0 / 14.0;
    let mut feas_total = 0;
    for seed in 1..=20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ev = Evaluator::new(&inst, 4200);
        let mut pop: Vec<(Genotype, Fitness)> = Vec::new();
        let mut members: HashSet<Genotype> = HashSet::new();
        while pop.len() < 100 {
            let g = random_genotype(&inst, kind, &mut rng);
            if members.contains(&g) { continue; }
            let f = ev.try_fitness(&g).unwrap();
            members.insert(g.clone());
            pop.push((g, f));
        }
        pop.sort_by(|a, b| a.1.cmp(&b.1));
        let (mut offspring_n, mut dups, mut unmutated) = (0u32, 0u32, 0u32);
        let mut best = pop[0].1;
        loop {
            if ev.exhausted() { break; }
            let child_pre = if rng.gen::<f64>() < 0.9 {
                let parents: Vec<&Genotype> = (0..4)
                    .map(|_| &tournament_select(&pop, &mut rng).unwrap().0)
                    .collect();
                match greedy_crossover(&mut ev, &parents, kind).unwrap() {
                    Some(c) => c,
                    None => break,
                }
            } else {
                tournament_select(&pop, &mut rng).unwrap().0.clone()
            };
            let child = mutate(&inst, child_pre.clone(), kind, p_m, &mut rng);
            if child == child_pre { unmutated += 1; }
            let Some(f) = ev.try_fitness(&child) else { break };
            offspring_n += 1;
            if members.contains(&child) {
                dups += 1;
                continue;
            }
            let removed = pop.pop().unwrap();
            members.remove(&removed.0);
            members.insert(child.clone());
            let pos = pop.partition_point(|(_, pf)| *pf <= f);
            pop.insert(pos, (child, f));
            if f < best { best = f; }
        }
        let distinct_cols: HashSet<Vec<u32>> = pop
            .iter()
            .flat_map(|(g, _)| {
                g.as_classical().unwrap().columns().map(|c| c.to_vec()).collect::<Vec<_>>()
            })
            .collect();
        feas_total += u32::from(best.violation == 0);
        println!(
            "seed {seed}: offspring {offspring_n}, dups {dups}, unmutated {unmutated}, distinct cols {}, best ({}, {})",
            distinct_cols.len(), best.violation, best.waste
        );
    }
    println!("feasible: {feas_total}/20 (no restarts in this probe)");
}
