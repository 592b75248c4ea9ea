use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use tdp::encoding::{random_genotype, ClassicalGenotype, Genotype, Model, ModelKind};
use tdp::evolution::{mutate, tournament_select};
use tdp::instance::builtin_instance;
use tdp::pressing::{BoundedFitness, Evaluator, Fitness};

fn cols_of(g: &Genotype) -> Vec<Vec<u32>> {
    g.as_classical().unwrap().columns().map(|c| c.to_vec()).collect()
}

// Greedy with donor-tail completion: candidate column scored by the full
// design [chosen..., candidate, donor parent's remaining columns].
fn greedy_lookahead(
    ev: &mut Evaluator,
    inst: &tdp::instance::ProblemInstance,
    parents: &[&Genotype],
) -> Option<Genotype> {
    let t = parents[0].templates();
    let mut chosen: Vec<Vec<u32>> = Vec::new();
    for j in 0..t {
        let mut best: Option<(Fitness, usize)> = None;
        for (pi, p) in parents.iter().enumerate() {
            let pc = cols_of(p);
            let mut full = chosen.clone();
            full.extend(pc[j..].iter().cloned());
            let g = Genotype::Classical(
                ClassicalGenotype::from_columns(inst.v, inst.s, &full).unwrap(),
            );
            match ev.try_fitness_vs(&g, best.map(|(f, _)| f))? {
                BoundedFitness::Better(f) => best = Some((f, pi)),
                BoundedFitness::NotBetter => {}
            }
        }
        let (_, w) = best.unwrap();
        chosen.push(cols_of(parents[w])[j].clone());
    }
    Some(Genotype::Classical(
        ClassicalGenotype::from_columns(inst.v, inst.s, &chosen).unwrap(),
    ))
}

fn main() {
    let inst = builtin_instance("catfood").unwrap();
    let kind = ModelKind::new(Model::Classical, false);
    let p_m = 1.0 / 14.0;
    let mut feas = 0;
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
        let mut best = pop[0].1;
        let mut since = 0u32;
        loop {
            if ev.exhausted() { break; }
            let child_pre = if rng.gen::<f64>() < 0.9 {
                let parents: Vec<&Genotype> = (0..4)
                    .map(|_| &tournament_select(&pop, &mut rng).unwrap().0)
                    .collect();
                match greedy_lookahead(&mut ev, &inst, &parents) {
                    Some(c) => c,
                    None => break,
                }
            } else {
                tournament_select(&pop, &mut rng).unwrap().0.clone()
            };
            let child = mutate(&inst, child_pre, kind, p_m, &mut rng);
            let Some(f) = ev.try_fitness(&child) else { break };
            since += 1;
            if f < best { best = f; since = 0; }
            if members.contains(&child) { continue; }
            let removed = pop.pop().unwrap();
            members.remove(&removed.0);
            members.insert(child.clone());
            let pos = pop.partition_point(|(_, pf)| *pf <= f);
            pop.insert(pos, (child, f));
            if since >= 420 {
                pop.truncate(10);
                members = pop.iter().map(|(g, _)| g.clone()).collect();
                while pop.len() < 100 && !ev.exhausted() {
                    let g = random_genotype(&inst, kind, &mut rng);
                    if members.contains(&g) { continue; }
                    let Some(f) = ev.try_fitness(&g) else { break };
                    members.insert(g.clone());
                    let pos = pop.partition_point(|(_, pf)| *pf <= f);
                    pop.insert(pos, (g, f));
                }
                since = 0;
            }
        }
        feas += u32::from(best.violation == 0);
    }
    println!("lookahead greedy: {feas}/20 feasible");
}
