use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use tdp::encoding::{random_genotype, ClassicalGenotype, Genotype, Model, ModelKind};
use tdp::evolution::mutate;
use tdp::instance::builtin_instance;
use tdp::pressing::{BoundedFitness, Evaluator, Fitness};

fn key(f: Fitness) -> (u64, u64) {
    (f.waste, f.violation)
}

fn tournament<'p>(
    pop: &'p [(Genotype, Fitness)],
    rng: &mut ChaCha8Rng,
) -> &'p (Genotype, Fitness) {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if key(b.1) < key(a.1) { b } else { a }
}

fn cols_of(g: &Genotype) -> Vec<Vec<u32>> {
    g.as_classical().unwrap().columns().map(|c| c.to_vec()).collect()
}

fn greedy_lookahead(
    ev: &mut Evaluator,
    inst: &tdp::instance::ProblemInstance,
    parents: &[(&Genotype, Fitness)],
) -> Option<Genotype> {
    let t = parents[0].0.templates();
    let parent_cols: Vec<Vec<Vec<u32>>> = parents.iter().map(|(p, _)| cols_of(p)).collect();
    let mut chosen: Vec<Vec<u32>> = Vec::new();
    for j in 0..t {
        let mut best: Option<(Fitness, usize)> = None;
        let mut seen: Vec<&Vec<u32>> = Vec::new();
        for (pi, pc) in parent_cols.iter().enumerate() {
            let cand = &pc[j];
            if seen.iter().any(|c| *c == cand) { continue; }
            seen.push(cand);
            if j == 0 {
                // candidate + donor tail = the donor parent itself
                let f = parents[pi].1;
                if best.map_or(true, |(bf, _)| key(f) < key(bf)) {
                    best = Some((f, pi));
                }
                continue;
            }
            let mut full = chosen.clone();
            full.extend(pc[j..].iter().cloned());
            let g = Genotype::Classical(ClassicalGenotype::from_columns(inst.v, inst.s, &full).unwrap());
            // waste-primary greedy choice needs exact values
            match ev.try_fitness_vs(&g, None)? {
                BoundedFitness::Better(f) => {
                    if best.map_or(true, |(bf, _)| key(f) < key(bf)) {
                        best = Some((f, pi));
                    }
                }
                BoundedFitness::NotBetter => unreachable!(),
            }
        }
        let (_, w) = best.unwrap();
        chosen.push(parent_cols[w][j].clone());
    }
    Some(Genotype::Classical(ClassicalGenotype::from_columns(inst.v, inst.s, &chosen).unwrap()))
}

fn run(label: &str, p_m_mult: f64, stag: u32, keep: usize, distinct_parents: bool) {
    run_seeds(label, p_m_mult, stag, keep, distinct_parents, 1);
}

fn run_seeds(label: &str, p_m_mult: f64, stag: u32, keep: usize, distinct_parents: bool, seed0: u64) {
    let inst = builtin_instance("catfood").unwrap();
    let kind = ModelKind::new(Model::Classical, false);
    let p_m = p_m_mult / 14.0;
    let mut feas = 0;
    for seed in seed0..seed0 + 20 {
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
        pop.sort_by(|a, b| key(a.1).cmp(&key(b.1)));
        let mut best = pop[0].1;
        let mut since = 0u32;
        loop {
            if ev.exhausted() { break; }
            let child_pre = if rng.gen::<f64>() < 0.9 {
                let mut parents: Vec<(Genotype, Fitness)> = Vec::new();
                let mut guard = 0;
                while parents.len() < 4 {
                    let cand = tournament(&pop, &mut rng).clone();
                    guard += 1;
                    if distinct_parents && guard < 40 && parents.iter().any(|p| p.0 == cand.0) { continue; }
                    parents.push(cand);
                }
                let refs: Vec<(&Genotype, Fitness)> = parents.iter().map(|(g, f)| (g, *f)).collect();
                match greedy_lookahead(&mut ev, &inst, &refs) {
                    Some(c) => c,
                    None => break,
                }
            } else {
                tournament(&pop, &mut rng).0.clone()
            };
            let child = mutate(&inst, child_pre, kind, p_m, &mut rng);
            let Some(f) = ev.try_fitness(&child) else { break };
            since += 1;
            if key(f) < key(best) { best = f; since = 0; }
            if !members.contains(&child) {
                let removed = pop.pop().unwrap();
                members.remove(&removed.0);
                members.insert(child.clone());
                let pos = pop.partition_point(|(_, pf)| key(*pf) <= key(f));
                pop.insert(pos, (child, f));
            }
            if since >= stag {
                pop.truncate(keep);
                members = pop.iter().map(|(g, _)| g.clone()).collect();
                while pop.len() < 100 && !ev.exhausted() {
                    let g = random_genotype(&inst, kind, &mut rng);
                    if members.contains(&g) { continue; }
                    let Some(f) = ev.try_fitness(&g) else { break };
                    members.insert(g.clone());
                    let pos = pop.partition_point(|(_, pf)| key(*pf) <= key(f));
                    pop.insert(pos, (g, f));
                }
                since = 0;
            }
        }
        let best_feasible = pop.iter().any(|(_, f)| f.violation == 0) || best.violation == 0;
        feas += u32::from(best_feasible);
    }
    println!("{label}: {feas}/20");
}

fn main() {
    for seed0 in [1u64, 21, 41, 61] {
        run_seeds(&format!("distinct stag420 seeds {seed0}.."), 1.0, 420, 10, true, seed0);
    }
    for seed0 in [1u64, 21, 41, 61] {
        run_seeds(&format!("nondistinct stag420 seeds {seed0}.."), 1.0, 420, 10, false, seed0);
    }
}
