//! Cooperative teams: `n` agents running any mix of the basic and memetic
//! algorithms (possibly on different encodings and symmetry settings),
//! synchronised over a fixed number of cycles.
//!
//! Within a cycle every agent advances its own search for an equal share of
//! the global evaluation budget; at the cycle barrier solutions move along
//! the topology (ring successor, broadcast of the global best, or a random
//! peer), get re-encoded for their receiver, and enter its pool under the
//! acceptance policy. Agents resume from their own state next cycle; the
//! team returns the best individual any agent ever found.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algspec::{
    expand_members, AlgorithmSpec, CooperativeSpec, LsMethod, Policy, Topology,
};
use crate::encoding::{convert_to_kind, hamming_distance, Genotype, ModelKind};
use crate::error::{Error, Result};
use crate::evolution::{EvoParams, SteadyStateGa};
use crate::harness::RunRecord;
use crate::instance::ProblemInstance;
use crate::localsearch::{HillClimber, SearchBudget, TabuSearcher};
use crate::pressing::{Evaluator, Fitness};

/// A solution pool: sorted best-first, duplicates never stored.
pub type Pool = Vec<(Genotype, Fitness)>;

/// Default number of synchronisation cycles.
pub const DEFAULT_CYCLES: u64 = 5;

/// One agent: a resumable engine plus its own budget-capped evaluator.
pub struct Agent<'a> {
    engine: AgentEngine<'a>,
    ev: Evaluator<'a>,
}

enum AgentEngine<'a> {
    Hc(HillClimber<'a>),
    Ts(TabuSearcher<'a>),
    Evo(SteadyStateGa<'a>),
}

impl<'a> Agent<'a> {
    fn build(
        inst: &'a ProblemInstance,
        spec: &AlgorithmSpec,
        total_budget: u64,
        seed: u64,
    ) -> Result<Self> {
        let ev = Evaluator::new(inst, total_budget);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let budget = SearchBudget::new(total_budget);
        let engine = match spec {
            AlgorithmSpec::LocalSearch(ls) => {
                let start = crate::encoding::random_genotype(inst, ls.kind, &mut rng);
                match ls.method {
                    LsMethod::HillClimbing => AgentEngine::Hc(HillClimber::new(
                        inst, ls.kind, start, budget, rng,
                    )),
                    LsMethod::TabuSearch => AgentEngine::Ts(TabuSearcher::new(
                        inst,
                        ls.kind,
                        start,
                        budget,
                        crate::localsearch::DEFAULT_TENURE,
                        rng,
                    )?),
                }
            }
            AlgorithmSpec::Genetic(g) => {
                let params = EvoParams::for_genetic(inst, g, total_budget);
                AgentEngine::Evo(SteadyStateGa::new(inst, g.kind, params, rng))
            }
            AlgorithmSpec::Memetic(m) => {
                let params = EvoParams::for_memetic(inst, m, total_budget);
                AgentEngine::Evo(SteadyStateGa::new(inst, m.kind, params, rng))
            }
            AlgorithmSpec::Cooperative(_) => {
                return Err(Error::Spec(
                    "cooperative members must not themselves be cooperative".into(),
                ))
            }
        };
        Ok(Agent { engine, ev })
    }

    fn advance(&mut self, evals: u64) {
        match &mut self.engine {
            AgentEngine::Hc(e) => {
                e.advance(&mut self.ev, evals);
            }
            AgentEngine::Ts(e) => {
                e.advance(&mut self.ev, evals);
            }
            AgentEngine::Evo(e) => {
                e.advance(&mut self.ev, evals);
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match &self.engine {
            AgentEngine::Hc(e) => e.kind(),
            AgentEngine::Ts(e) => e.kind(),
            AgentEngine::Evo(e) => e.kind(),
        }
    }

    pub fn best(&self) -> Option<&(Genotype, Fitness)> {
        match &self.engine {
            AgentEngine::Hc(e) => e.best(),
            AgentEngine::Ts(e) => e.best(),
            AgentEngine::Evo(e) => e.best(),
        }
    }

    /// Snapshot of the agent's solution pool (population for the
    /// population-based engines, elite archive for local searches).
    pub fn pool(&self) -> Pool {
        match &self.engine {
            AgentEngine::Hc(e) => e.archive().entries().to_vec(),
            AgentEngine::Ts(e) => e.archive().entries().to_vec(),
            AgentEngine::Evo(e) => e.population().to_vec(),
        }
    }

    /// Installs an accepted immigrant, replacing the pool member at
    /// `index`. Local-search agents additionally adopt the immigrant as
    /// their current point when it improves on it. No evaluation is
    /// charged: the fitness travels with the genotype.
    fn install(&mut self, index: usize, immigrant: (Genotype, Fitness)) {
        match &mut self.engine {
            AgentEngine::Hc(e) => {
                e.archive_mut().remove(index);
                e.consider_immigrant(immigrant.0, immigrant.1);
            }
            AgentEngine::Ts(e) => {
                e.archive_mut().remove(index);
                e.consider_immigrant(immigrant.0, immigrant.1);
            }
            AgentEngine::Evo(e) => e.install_member(index, immigrant),
        }
    }

    fn evals_used(&self) -> u64 {
        self.ev.used()
    }
}

/// Picks the emigrant from a sender pool under a migration policy:
/// R draws uniformly, D maximises the minimum genotypic distance to the
/// receiver pool (measured in the receiver's encoding), W takes the worst.
/// Ties go to the earlier pool entry.
pub fn select_emigrant<'p>(
    pool: &'p Pool,
    policy: Policy,
    receiver_pool: &Pool,
    receiver_kind: ModelKind,
    variations: usize,
    rng: &mut ChaCha8Rng,
) -> Result<&'p (Genotype, Fitness)> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    match policy {
        Policy::Random => Ok(&pool[rng.gen_range(0..pool.len())]),
        Policy::Worst => {
            let worst_fit = pool.last().expect("non-empty").1;
            Ok(pool.iter().find(|(_, f)| *f == worst_fit).expect("present"))
        }
        Policy::Diverse => {
            let mut best: Option<(u64, usize)> = None;
            for (idx, (g, _)) in pool.iter().enumerate() {
                let converted = convert_to_kind(g, receiver_kind, variations)?;
                let min_dist = receiver_pool
                    .iter()
                    .map(|(r, _)| {
                        hamming_distance(&converted, r).expect("same encoding and shape")
                    })
                    .min()
                    .unwrap_or(u64::MAX);
                if best.map_or(true, |(d, _)| min_dist > d) {
                    best = Some((min_dist, idx));
                }
            }
            Ok(&pool[best.expect("pool non-empty").1])
        }
    }
}

/// Result of offering an immigrant to a pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// The pool member at this index makes way.
    Replaced(usize),
    Rejected,
}

/// Applies an acceptance policy. Duplicates of existing pool members are
/// rejected under every policy; R replaces a uniformly random member, D
/// accepts only if the candidate's minimum distance to the pool exceeds the
/// pool's own minimum pairwise distance (replacing the worst), W replaces
/// the worst unconditionally. The candidate must already be in the pool's
/// encoding.
pub fn accept_immigrant(
    pool: &Pool,
    candidate: &(Genotype, Fitness),
    policy: Policy,
    rng: &mut ChaCha8Rng,
) -> Acceptance {
    if pool.is_empty() {
        return Acceptance::Rejected;
    }
    if pool.iter().any(|(g, _)| *g == candidate.0) {
        return Acceptance::Rejected;
    }
    match policy {
        Policy::Random => Acceptance::Replaced(rng.gen_range(0..pool.len())),
        Policy::Worst => Acceptance::Replaced(pool.len() - 1),
        Policy::Diverse => {
            let cand_min = pool
                .iter()
                .map(|(g, _)| hamming_distance(&candidate.0, g).expect("same encoding"))
                .min()
                .unwrap_or(u64::MAX);
            let mut pool_min = u64::MAX;
            for i in 0..pool.len() {
                for j in (i + 1)..pool.len() {
                    let d = hamming_distance(&pool[i].0, &pool[j].0).expect("same encoding");
                    pool_min = pool_min.min(d);
                }
            }
            if pool.len() < 2 {
                pool_min = 0;
            }
            if cand_min > pool_min {
                Acceptance::Replaced(pool.len() - 1)
            } else {
                Acceptance::Rejected
            }
        }
    }
}

/// One synchronisation barrier: emigrants are selected from the
/// pre-exchange pools along the topology routes, re-encoded and
/// canonicalized for their receivers, then offered under the acceptance
/// policy in sender order.
pub fn sync_exchange(
    agents: &mut [Agent<'_>],
    topology: Topology,
    migration: Policy,
    acceptance: Policy,
    variations: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let n = agents.len();
    if n < 2 {
        return Ok(());
    }
    let pools: Vec<Pool> = agents.iter().map(|a| a.pool()).collect();

    // (sender, receiver, emigrant) transfers from the barrier snapshot.
    let mut transfers: Vec<(usize, usize, (Genotype, Fitness))> = Vec::new();
    match topology {
        Topology::Ring => {
            for sender in 0..n {
                let receiver = (sender + 1) % n;
                if pools[sender].is_empty() {
                    continue;
                }
                let emigrant = select_emigrant(
                    &pools[sender],
                    migration,
                    &pools[receiver],
                    agents[receiver].kind(),
                    variations,
                    rng,
                )?;
                transfers.push((sender, receiver, emigrant.clone()));
            }
        }
        Topology::Random => {
            for sender in 0..n {
                if pools[sender].is_empty() {
                    continue;
                }
                let mut receiver = rng.gen_range(0..n - 1);
                if receiver >= sender {
                    receiver += 1;
                }
                let emigrant = select_emigrant(
                    &pools[sender],
                    migration,
                    &pools[receiver],
                    agents[receiver].kind(),
                    variations,
                    rng,
                )?;
                transfers.push((sender, receiver, emigrant.clone()));
            }
        }
        Topology::Broadcast => {
            // The globally best pooled solution goes to every other agent.
            let mut owner = None;
            for (idx, pool) in pools.iter().enumerate() {
                if let Some(first) = pool.first() {
                    if owner
                        .map_or(true, |(_, best): (usize, Fitness)| first.1 < best)
                    {
                        owner = Some((idx, first.1));
                    }
                }
            }
            if let Some((owner_idx, _)) = owner {
                let best = pools[owner_idx][0].clone();
                for receiver in 0..n {
                    if receiver != owner_idx {
                        transfers.push((owner_idx, receiver, best.clone()));
                    }
                }
            }
        }
    }

    for (_, receiver, (g, fit)) in transfers {
        let kind = agents[receiver].kind();
        let converted = convert_to_kind(&g, kind, variations)?;
        let candidate = (converted, fit);
        let live_pool = agents[receiver].pool();
        match accept_immigrant(&live_pool, &candidate, acceptance, rng) {
            Acceptance::Replaced(index) => agents[receiver].install(index, candidate),
            Acceptance::Rejected => {}
        }
    }
    Ok(())
}

/// Runs a cooperative spec for `e_max` total evaluations over `cycles`
/// synchronisation cycles, sequentially scheduling the agents in listed
/// order. Deterministic for a fixed seed.
pub fn run_cooperative(
    inst: &ProblemInstance,
    spec: &CooperativeSpec,
    e_max: u64,
    cycles: u64,
    seed: u64,
) -> Result<RunRecord> {
    let started = std::time::Instant::now();
    let members = expand_members(spec)?;
    let n = members.len() as u64;
    if cycles == 0 {
        return Err(Error::InvalidParameter("cycle count must be positive".into()));
    }
    if e_max < cycles * n {
        return Err(Error::Budget(format!(
            "budget {e_max} cannot cover {cycles} cycles of {n} agents"
        )));
    }

    // Equal shares per agent-cycle; the remainder tops up the final cycle,
    // earlier agents first.
    let base = e_max / (cycles * n);
    let remainder = e_max - base * cycles * n;

    let mut agents = Vec::with_capacity(members.len());
    for (i, member) in members.iter().enumerate() {
        let extra = remainder / n + u64::from((i as u64) < remainder % n);
        let total = base * cycles + extra;
        agents.push(Agent::build(inst, member, total, seed + i as u64)?);
    }
    let mut exchange_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);

    for cycle in 0..cycles {
        let last = cycle == cycles - 1;
        for (i, agent) in agents.iter_mut().enumerate() {
            let extra = if last {
                remainder / n + u64::from((i as u64) < remainder % n)
            } else {
                0
            };
            agent.advance(base + extra);
        }
        sync_exchange(
            &mut agents,
            spec.topology,
            spec.migration,
            spec.acceptance,
            inst.v,
            &mut exchange_rng,
        )?;
    }

    let evals_used: u64 = agents.iter().map(|a| a.evals_used()).sum();
    debug_assert!(evals_used <= e_max);
    let best = agents
        .iter()
        .filter_map(|a| a.best())
        .min_by_key(|(_, f)| *f)
        .cloned();
    Ok(RunRecord::from_best(
        AlgorithmSpec::Cooperative(spec.clone()).to_string(),
        inst,
        seed,
        evals_used,
        best,
        started.elapsed().as_secs_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algspec::parse_spec;
    use crate::encoding::{is_canonical, random_genotype, Model};
    use crate::instance::builtin_instance;
    use rand::SeedableRng;

    fn coop(text: &str) -> CooperativeSpec {
        match parse_spec(text).unwrap() {
            AlgorithmSpec::Cooperative(c) => c,
            _ => panic!("not cooperative"),
        }
    }

    #[test]
    fn budget_split_matches_formula() {
        // 4200 evaluations, 5 cycles, 2 agents: 420 per agent per cycle.
        let inst = builtin_instance("catfood").unwrap();
        let spec = coop("Ri2(Hc.P,Hc.P)RR");
        let record = run_cooperative(&inst, &spec, 4200, 5, 1).unwrap();
        assert_eq!(record.evals_used, 4200);
    }

    #[test]
    fn degenerate_single_agent_equals_standalone_run() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = CooperativeSpec {
            topology: Topology::Ring,
            n: 1,
            members: vec![(
                1,
                parse_spec("Ga.P.A2.Ux").unwrap(),
            )],
            migration: Policy::Random,
            acceptance: Policy::Diverse,
        };
        let coop_record = run_cooperative(&inst, &spec, 700, 1, 42).unwrap();

        let ga_spec = match parse_spec("Ga.P.A2.Ux").unwrap() {
            AlgorithmSpec::Genetic(g) => g,
            _ => unreachable!(),
        };
        let solo = crate::evolution::run_ga(&inst, &ga_spec, 700, 42).unwrap();
        assert_eq!(coop_record.evals_used, solo.evals_used);
        assert_eq!(coop_record.best_waste, solo.best_waste);
        assert_eq!(coop_record.feasible, solo.feasible);
        assert_eq!(coop_record.best_solution, solo.best_solution);
    }

    #[test]
    fn budget_too_small_is_rejected() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = coop("Ri2(Hc.P,Hc.P)RR");
        assert!(matches!(
            run_cooperative(&inst, &spec, 5, 5, 1),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn total_evaluations_never_exceed_budget() {
        let inst = builtin_instance("catfood").unwrap();
        for text in ["Ri3(Ts.D,Ma.Hc.P*.A2.Ux)RD", "Bc2(Hc.P,Hc.D*)RW", "Ra2(Ts.P,Hc.D)DD"] {
            let spec = coop(text);
            let record = run_cooperative(&inst, &spec, 1501, 3, 7).unwrap();
            assert!(record.evals_used <= 1501, "{text}: {}", record.evals_used);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = coop("Ri2(Hc.P,Ts.D)RD");
        let a = run_cooperative(&inst, &spec, 900, 3, 5).unwrap();
        let b = run_cooperative(&inst, &spec, 900, 3, 5).unwrap();
        assert_eq!(a.best_waste, b.best_waste);
        assert_eq!(a.best_solution, b.best_solution);
        assert_eq!(a.evals_used, b.evals_used);
    }

    fn toy_pool(
        inst: &ProblemInstance,
        kind: ModelKind,
        fits: &[(u64, u64)],
        seed: u64,
    ) -> Pool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Pool = fits
            .iter()
            .map(|&(violation, waste)| {
                (
                    random_genotype(inst, kind, &mut rng),
                    Fitness { violation, waste },
                )
            })
            .collect();
        pool.sort_by(|a, b| a.1.cmp(&b.1));
        pool
    }

    #[test]
    fn select_emigrant_policies() {
        let inst = builtin_instance("catfood").unwrap();
        let kind = ModelKind::new(Model::Classical, false);
        let pool = toy_pool(&inst, kind, &[(0, 10), (0, 20), (0, 30)], 1);
        let receiver = toy_pool(&inst, kind, &[(0, 5)], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);

        // Singleton pool: forced choice under every policy.
        let single = toy_pool(&inst, kind, &[(0, 7)], 4);
        for policy in [Policy::Random, Policy::Diverse, Policy::Worst] {
            let picked =
                select_emigrant(&single, policy, &receiver, kind, inst.v, &mut rng).unwrap();
            assert_eq!(picked.1.waste, 7);
        }

        // Worst picks the waste-30 member.
        let picked =
            select_emigrant(&pool, Policy::Worst, &receiver, kind, inst.v, &mut rng).unwrap();
        assert_eq!(picked.1.waste, 30);

        // Diverse against the sender's own pool: every member is at
        // distance zero to its copy, ties resolve to the first.
        let picked =
            select_emigrant(&pool, Policy::Diverse, &pool, kind, inst.v, &mut rng).unwrap();
        assert_eq!(picked.1.waste, 10);

        let empty: Pool = vec![];
        assert!(matches!(
            select_emigrant(&empty, Policy::Random, &receiver, kind, inst.v, &mut rng),
            Err(Error::EmptyPool)
        ));
    }

    #[test]
    fn accept_immigrant_policies() {
        let inst = builtin_instance("catfood").unwrap();
        let kind = ModelKind::new(Model::Classical, false);
        let pool = toy_pool(&inst, kind, &[(0, 10), (0, 20), (0, 30)], 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);

        // Worst replaces the last member even when the candidate is worse.
        let candidate =
            (random_genotype(&inst, kind, &mut rng), Fitness { violation: 0, waste: 99 });
        assert_eq!(
            accept_immigrant(&pool, &candidate, Policy::Worst, &mut rng),
            Acceptance::Replaced(2)
        );

        // Duplicates are rejected under every policy.
        let dup = pool[1].clone();
        for policy in [Policy::Random, Policy::Diverse, Policy::Worst] {
            assert_eq!(
                accept_immigrant(&pool, &dup, policy, &mut rng),
                Acceptance::Rejected
            );
        }

        // Random replaces each slot roughly uniformly.
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            let cand = (
                random_genotype(&inst, kind, &mut rng),
                Fitness { violation: 0, waste: 1 },
            );
            if let Acceptance::Replaced(i) =
                accept_immigrant(&pool, &cand, Policy::Random, &mut rng)
            {
                counts[i] += 1;
            }
        }
        for &c in &counts {
            assert!((800..=1200).contains(&c), "uneven replacement: {counts:?}");
        }
    }

    #[test]
    fn broadcast_spreads_global_best_under_worst_acceptance() {
        let inst = builtin_instance("catfood").unwrap();
        let spec = coop("Bc3(Hc.P,Hc.P,Hc.P)RW");
        let members = expand_members(&spec).unwrap();
        let mut agents: Vec<Agent> = members
            .iter()
            .enumerate()
            .map(|(i, m)| Agent::build(&inst, m, 50, 100 + i as u64).unwrap())
            .collect();
        for a in agents.iter_mut() {
            a.advance(50);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        sync_exchange(
            &mut agents,
            Topology::Broadcast,
            Policy::Random,
            Policy::Worst,
            inst.v,
            &mut rng,
        )
        .unwrap();
        let global_best = agents
            .iter()
            .flat_map(|a| a.pool())
            .map(|(_, f)| f)
            .min()
            .unwrap();
        for a in &agents {
            assert!(
                a.pool().iter().any(|(_, f)| *f == global_best),
                "an agent's pool misses the global best"
            );
        }
    }

    #[test]
    fn cross_encoding_migration_arrives_converted_and_canonical() {
        let inst = builtin_instance("catfood").unwrap();
        // Sender searches the alternative space, receiver the classical
        // space with symmetry breaking.
        let spec = coop("Ri2(Ts.D,Ma.Hc.P*.A2.Ux)RW");
        let members = expand_members(&spec).unwrap();
        let mut agents: Vec<Agent> = members
            .iter()
            .enumerate()
            .map(|(i, m)| Agent::build(&inst, m, 260, 40 + i as u64).unwrap())
            .collect();
        for a in agents.iter_mut() {
            a.advance(260);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        sync_exchange(
            &mut agents,
            Topology::Ring,
            Policy::Random,
            Policy::Worst,
            inst.v,
            &mut rng,
        )
        .unwrap();
        let receiver_kind = agents[1].kind();
        assert_eq!(receiver_kind.model, Model::Classical);
        for (g, _) in agents[1].pool() {
            assert_eq!(g.model(), Model::Classical);
            assert!(is_canonical(&g, receiver_kind));
        }
    }
}
