//! Steady-state genetic and memetic engines.
//!
//! One offspring per step: binary-tournament parents, template-level
//! crossover (uniform or greedy), per-gene neighbourhood mutation, an
//! optional embedded local search (the memetic case), then replacement of
//! the population's worst member. Duplicate genotypes never enter the
//! population, and the whole population restarts around its elite when the
//! incumbent stagnates.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algspec::{AlgorithmSpec, Crossover, GeneticSpec, LsMethod, MemeticSpec};
use crate::encoding::{
    canonicalize, random_genotype, AlternativeGenotype, ClassicalGenotype, Genotype, Model,
    ModelKind,
};
use crate::error::{Error, Result};
use crate::harness::RunRecord;
use crate::instance::ProblemInstance;
use crate::localsearch::{
    HillClimber, SearchBudget, TabuSearcher, DEFAULT_TENURE,
};
use crate::pressing::{BoundedFitness, Evaluator, Fitness};

/// Parameters of the population engines.
#[derive(Debug, Clone, Copy)]
pub struct EvoParams {
    pub popsize: usize,
    /// Crossover probability.
    pub p_x: f64,
    /// Per-gene mutation probability (defaults to one over the genotype
    /// length).
    pub p_m: f64,
    /// Parents per recombination.
    pub arity: u32,
    pub crossover: Crossover,
    /// Probability of running the embedded local search on an offspring
    /// (zero for a plain genetic algorithm).
    pub p_ls: f64,
    pub ls_method: Option<LsMethod>,
    /// Evaluation cap per embedded local search invocation.
    pub ls_cap: u64,
    /// Fraction of the population kept through a restart.
    pub restart_keep: f64,
    pub tenure: u64,
}

impl EvoParams {
    /// Standard parameters: population 100, crossover 0.9, mutation `1/l`
    /// with `l` the genotype length, restarts keeping the best 10%, and an
    /// embedded-search cap of a tenth of the run budget.
    pub fn standard(inst: &ProblemInstance, kind: ModelKind, budget: u64) -> Self {
        let genes = match kind.model {
            Model::Classical => inst.v * inst.t,
            Model::Alternative => inst.s * inst.t,
        };
        EvoParams {
            popsize: 100,
            p_x: 0.9,
            p_m: 1.0 / genes as f64,
            arity: 2,
            crossover: Crossover::Uniform,
            p_ls: 0.0,
            ls_method: None,
            ls_cap: budget / 10,
            restart_keep: 0.10,
            tenure: DEFAULT_TENURE,
        }
    }

    pub fn for_genetic(inst: &ProblemInstance, spec: &GeneticSpec, budget: u64) -> Self {
        EvoParams {
            arity: spec.arity,
            crossover: spec.crossover,
            ..EvoParams::standard(inst, spec.kind, budget)
        }
    }

    pub fn for_memetic(inst: &ProblemInstance, spec: &MemeticSpec, budget: u64) -> Self {
        EvoParams {
            arity: spec.arity,
            crossover: spec.crossover,
            p_ls: 0.005,
            ls_method: Some(spec.ls_method),
            ..EvoParams::standard(inst, spec.kind, budget)
        }
    }
}

/// Better of two members drawn uniformly (independently, so both draws may
/// hit the same member); ties go to the first draw.
pub fn tournament_select<'p>(
    pop: &'p [(Genotype, Fitness)],
    rng: &mut ChaCha8Rng,
) -> Result<&'p (Genotype, Fitness)> {
    if pop.len() < 2 {
        return Err(Error::InvalidParameter(
            "tournament selection needs a population of at least 2".into(),
        ));
    }
    let first = &pop[rng.gen_range(0..pop.len())];
    let second = &pop[rng.gen_range(0..pop.len())];
    Ok(if second.1 < first.1 { second } else { first })
}

fn check_parents(parents: &[&Genotype]) -> Result<()> {
    if parents.len() < 2 {
        return Err(Error::InvalidGenotype("recombination needs at least 2 parents".into()));
    }
    let first = parents[0];
    for p in &parents[1..] {
        if p.model() != first.model() || p.len() != first.len() || p.templates() != first.templates()
        {
            return Err(Error::InvalidGenotype(
                "parents disagree on encoding or dimensions".into(),
            ));
        }
    }
    Ok(())
}

fn genotype_from_columns(
    model: Model,
    v: usize,
    s: usize,
    cols: &[Vec<u32>],
) -> Result<Genotype> {
    Ok(match model {
        Model::Classical => Genotype::Classical(ClassicalGenotype::from_columns(v, s, cols)?),
        Model::Alternative => {
            Genotype::Alternative(AlternativeGenotype::from_columns(v, s, cols)?)
        }
    })
}

fn column_of(g: &Genotype, j: usize) -> Vec<u32> {
    match g {
        Genotype::Classical(c) => c.column(j).to_vec(),
        Genotype::Alternative(a) => a.column(j).to_vec(),
    }
}

/// Template-level uniform crossover: every column is copied whole from a
/// uniformly chosen parent.
pub fn uniform_crossover(
    inst: &ProblemInstance,
    parents: &[&Genotype],
    kind: ModelKind,
    rng: &mut ChaCha8Rng,
) -> Result<Genotype> {
    check_parents(parents)?;
    let t = parents[0].templates();
    let cols: Vec<Vec<u32>> = (0..t)
        .map(|j| column_of(parents[rng.gen_range(0..parents.len())], j))
        .collect();
    let child = genotype_from_columns(kind.model, inst.v, inst.s, &cols)?;
    Ok(canonicalize(child, kind))
}

/// Greedy recombination: columns are assembled left to right, keeping at
/// each position the parent column that minimises the fitness of the
/// partial design completed with the donor parent's remaining columns.
/// Ties (and identical candidate columns) go to the lowest parent index.
///
/// Scoring a candidate means evaluating the completed design, which is
/// charged to the budget; duplicate candidate columns are scored once, and
/// the first position needs no evaluation at all when parent fitnesses are
/// supplied (the completed design is then the donor parent itself).
/// Returns `Ok(None)` if the budget runs dry mid-assembly.
pub fn greedy_crossover(
    ev: &mut Evaluator,
    parents: &[(&Genotype, Option<Fitness>)],
    kind: ModelKind,
) -> Result<Option<Genotype>> {
    let genotypes: Vec<&Genotype> = parents.iter().map(|(g, _)| *g).collect();
    check_parents(&genotypes)?;
    let inst = ev.instance();
    let t = genotypes[0].templates();
    let mut chosen: Vec<Vec<u32>> = Vec::with_capacity(t);
    for j in 0..t {
        let mut seen: Vec<Vec<u32>> = Vec::new();
        let mut best: Option<(Fitness, usize)> = None;
        for (pi, (parent, known)) in parents.iter().enumerate() {
            let cand = column_of(parent, j);
            if seen.contains(&cand) {
                continue;
            }
            seen.push(cand);
            if j == 0 {
                if let Some(f) = known {
                    // Completion equals the donor parent; fitness known.
                    if best.map_or(true, |(bf, _)| *f < bf) {
                        best = Some((*f, pi));
                    }
                    continue;
                }
            }
            let mut full = chosen.clone();
            for k in j..t {
                full.push(column_of(parent, k));
            }
            let full_g = genotype_from_columns(kind.model, inst.v, inst.s, &full)?;
            let threshold = best.map(|(f, _)| f);
            match ev.try_fitness_vs(&full_g, threshold) {
                None => return Ok(None),
                Some(BoundedFitness::Better(f)) => best = Some((f, pi)),
                Some(BoundedFitness::NotBetter) => {}
            }
        }
        let (_, winner) = best.expect("first candidate always scored");
        chosen.push(column_of(genotypes[winner], j));
    }
    let child = genotype_from_columns(kind.model, inst.v, inst.s, &chosen)?;
    Ok(Some(canonicalize(child, kind)))
}

/// Per-gene mutation: every position independently triggers one
/// neighbourhood move at that position with probability `p_m`.
///
/// A classical gene `(i, j)` firing adds one slot of variation `i` to
/// template `j`, taking it from a uniformly chosen variation that still
/// holds a slot there; an alternative gene rewrites its slot. The result is
/// canonicalized under symmetry breaking.
pub fn mutate(
    inst: &ProblemInstance,
    g: Genotype,
    kind: ModelKind,
    p_m: f64,
    rng: &mut ChaCha8Rng,
) -> Genotype {
    let mut out = g;
    match &mut out {
        Genotype::Classical(c) => {
            let v = c.variations();
            for j in 0..c.templates() {
                for i in 0..v {
                    if rng.gen::<f64>() >= p_m || v < 2 {
                        continue;
                    }
                    let col = c.column_mut(j);
                    let donors: Vec<usize> =
                        (0..v).filter(|&a| a != i && col[a] > 0).collect();
                    if donors.is_empty() {
                        continue; // variation i already fills the template
                    }
                    let donor = donors[rng.gen_range(0..donors.len())];
                    col[donor] -= 1;
                    col[i] += 1;
                }
            }
        }
        Genotype::Alternative(a) => {
            let v = inst.v;
            for j in 0..a.templates() {
                for h in 0..a.slots_per_template() {
                    if rng.gen::<f64>() >= p_m || v < 2 {
                        continue;
                    }
                    let current = a.slot(h, j);
                    let mut value = rng.gen_range(1..v as u32);
                    if value >= current {
                        value += 1;
                    }
                    a.set_slot(h, j, value);
                }
            }
        }
    }
    canonicalize(out, kind)
}

/// Steady-state population engine covering both the genetic and memetic
/// algorithms (`p_ls = 0` gives the plain GA).
pub struct SteadyStateGa<'a> {
    inst: &'a ProblemInstance,
    kind: ModelKind,
    params: EvoParams,
    rng: ChaCha8Rng,
    /// Sorted best-first; never holds duplicate genotypes.
    population: Vec<(Genotype, Fitness)>,
    members: HashSet<Genotype>,
    best: Option<(Genotype, Fitness)>,
    init_remaining: usize,
    /// Offspring evaluated since the incumbent last improved. Counting
    /// offspring rather than raw evaluations keeps the restart cadence
    /// independent of how many partial scorings a crossover spends.
    offspring_since_improvement: u64,
}

impl<'a> SteadyStateGa<'a> {
    pub fn new(
        inst: &'a ProblemInstance,
        kind: ModelKind,
        params: EvoParams,
        rng: ChaCha8Rng,
    ) -> Self {
        let popsize = params.popsize;
        SteadyStateGa {
            inst,
            kind,
            params,
            rng,
            population: Vec::with_capacity(popsize + 1),
            members: HashSet::with_capacity(popsize + 1),
            best: None,
            init_remaining: popsize,
            offspring_since_improvement: 0,
        }
    }

    pub fn best(&self) -> Option<&(Genotype, Fitness)> {
        self.best.as_ref()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn population(&self) -> &[(Genotype, Fitness)] {
        &self.population
    }

    /// Replaces one population slot with an immigrant (exchange machinery).
    /// The immigrant's fitness travels with it, so no evaluation is charged.
    pub fn install_member(&mut self, index: usize, member: (Genotype, Fitness)) {
        let removed = self.population.remove(index);
        self.members.remove(&removed.0);
        self.insert_sorted(member.0.clone(), member.1);
        if self.best.as_ref().map_or(true, |(_, bf)| member.1 < *bf) {
            self.best = Some(member);
        }
    }

    fn insert_sorted(&mut self, g: Genotype, fit: Fitness) {
        let pos = self.population.partition_point(|(_, f)| *f <= fit);
        self.members.insert(g.clone());
        self.population.insert(pos, (g, fit));
    }

    fn note_best(&mut self, g: &Genotype, fit: Fitness) {
        if self.best.as_ref().map_or(true, |(_, bf)| fit < *bf) {
            self.best = Some((g.clone(), fit));
            self.offspring_since_improvement = 0;
        }
    }

    /// Runs for at most `evals` further evaluations. Returns the number
    /// consumed.
    pub fn advance(&mut self, ev: &mut Evaluator, evals: u64) -> u64 {
        let start_used = ev.used();
        let chunk_end = start_used.saturating_add(evals);
        'outer: while ev.used() < chunk_end && !ev.exhausted() {
            if self.init_remaining > 0 {
                // Fill the population with distinct random genotypes.
                let mut g = random_genotype(self.inst, self.kind, &mut self.rng);
                let mut attempts = 0;
                while self.members.contains(&g) {
                    attempts += 1;
                    if attempts > 200 {
                        // Search space smaller than the population; make do.
                        self.init_remaining = 0;
                        continue 'outer;
                    }
                    g = random_genotype(self.inst, self.kind, &mut self.rng);
                }
                match ev.try_fitness(&g) {
                    None => break,
                    Some(fit) => {
                        self.note_best(&g, fit);
                        self.insert_sorted(g, fit);
                        self.init_remaining -= 1;
                    }
                }
                continue;
            }
            if self.population.len() < 2 {
                break; // degenerate search space
            }

            // Breed one offspring. Parents come from independent binary
            // tournaments, re-drawn a bounded number of times to favour
            // distinct parents (recombining copies of one member would be
            // a no-op).
            let child = if self.rng.gen::<f64>() < self.params.p_x {
                let parents: Vec<(&Genotype, Option<Fitness>)> = {
                    let mut picks: Vec<(&Genotype, Option<Fitness>)> =
                        Vec::with_capacity(self.params.arity as usize);
                    let mut guard = 0;
                    while picks.len() < self.params.arity as usize {
                        let (g, f) = tournament_select(&self.population, &mut self.rng)
                            .expect("population is large enough");
                        guard += 1;
                        if guard < 10 * self.params.arity
                            && picks.iter().any(|(p, _)| *p == g)
                        {
                            continue;
                        }
                        picks.push((g, Some(*f)));
                    }
                    picks
                };
                match self.params.crossover {
                    Crossover::Uniform => {
                        let bare: Vec<&Genotype> = parents.iter().map(|(g, _)| *g).collect();
                        uniform_crossover(self.inst, &bare, self.kind, &mut self.rng)
                            .expect("parents share shape")
                    }
                    Crossover::Greedy => {
                        match greedy_crossover(ev, &parents, self.kind)
                            .expect("parents share shape")
                        {
                            Some(c) => c,
                            None => break, // budget ran dry mid-recombination
                        }
                    }
                }
            } else {
                tournament_select(&self.population, &mut self.rng)
                    .expect("population is large enough")
                    .0
                    .clone()
            };
            let mut child = mutate(self.inst, child, self.kind, self.params.p_m, &mut self.rng);

            // Memetic step: improve the offspring by local search.
            if self.rng.gen::<f64>() < self.params.p_ls {
                let ls_budget = self
                    .params
                    .ls_cap
                    .min(chunk_end.saturating_sub(ev.used()));
                if ls_budget > 0 {
                    let seed = self.rng.gen::<u64>();
                    child = self.run_embedded_ls(ev, child, ls_budget, seed);
                }
            }

            // Evaluate; the offspring replaces the population's worst
            // member unless it duplicates an existing one (the evaluation
            // is charged either way).
            match ev.try_fitness(&child) {
                None => break,
                Some(fit) => {
                    self.offspring_since_improvement += 1;
                    if !self.members.contains(&child) {
                        let removed = self.population.pop().expect("population non-empty");
                        self.members.remove(&removed.0);
                        self.note_best(&child, fit);
                        self.insert_sorted(child, fit);
                    }
                }
            }

            // Restart around the elite when the incumbent stagnates.
            let stagnation_limit = (ev.limit() / 10).max(1);
            if self.offspring_since_improvement >= stagnation_limit {
                self.restart();
            }
        }
        ev.used() - start_used
    }

    fn run_embedded_ls(
        &self,
        ev: &mut Evaluator,
        start: Genotype,
        budget: u64,
        seed: u64,
    ) -> Genotype {
        let rng = rand::SeedableRng::seed_from_u64(seed);
        let sb = SearchBudget::new(budget);
        match self.params.ls_method {
            Some(LsMethod::TabuSearch) => {
                let mut ts = TabuSearcher::new(
                    self.inst,
                    self.kind,
                    start.clone(),
                    sb,
                    self.params.tenure,
                    rng,
                )
                .expect("tenure is positive");
                ts.advance(ev, budget);
                ts.best().map(|(g, _)| g.clone()).unwrap_or(start)
            }
            _ => {
                let mut hc = HillClimber::new(self.inst, self.kind, start.clone(), sb, rng);
                hc.advance(ev, budget);
                hc.best().map(|(g, _)| g.clone()).unwrap_or(start)
            }
        }
    }

    fn restart(&mut self) {
        let keep = ((self.params.popsize as f64 * self.params.restart_keep).round() as usize)
            .clamp(1, self.params.popsize);
        self.population.truncate(keep);
        self.members = self.population.iter().map(|(g, _)| g.clone()).collect();
        self.init_remaining = self.params.popsize - self.population.len();
        self.offspring_since_improvement = 0;
    }
}

/// Runs the genetic algorithm for `budget` evaluations.
pub fn run_ga(
    inst: &ProblemInstance,
    spec: &GeneticSpec,
    budget: u64,
    seed: u64,
) -> Result<RunRecord> {
    let params = EvoParams::for_genetic(inst, spec, budget);
    run_population_engine(
        inst,
        AlgorithmSpec::Genetic(*spec).to_string(),
        spec.kind,
        params,
        budget,
        seed,
    )
}

/// Runs the memetic algorithm (genetic algorithm plus probabilistic
/// embedded local search) for `budget` evaluations.
pub fn run_ma(
    inst: &ProblemInstance,
    spec: &MemeticSpec,
    budget: u64,
    seed: u64,
) -> Result<RunRecord> {
    let params = EvoParams::for_memetic(inst, spec, budget);
    run_population_engine(
        inst,
        AlgorithmSpec::Memetic(*spec).to_string(),
        spec.kind,
        params,
        budget,
        seed,
    )
}

fn run_population_engine(
    inst: &ProblemInstance,
    algorithm: String,
    kind: ModelKind,
    params: EvoParams,
    budget: u64,
    seed: u64,
) -> Result<RunRecord> {
    if budget < params.popsize as u64 {
        return Err(Error::InvalidParameter(format!(
            "budget {budget} is below the population size {}",
            params.popsize
        )));
    }
    let started = std::time::Instant::now();
    let mut ev = Evaluator::new(inst, budget);
    let mut engine =
        SteadyStateGa::new(inst, kind, params, rand::SeedableRng::seed_from_u64(seed));
    engine.advance(&mut ev, budget);
    let best = engine.best.clone();
    Ok(RunRecord::from_best(
        algorithm,
        inst,
        seed,
        ev.used(),
        best,
        started.elapsed().as_secs_f64(),
    ))
}
