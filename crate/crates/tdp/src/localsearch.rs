//! Neighbourhood structure, hill climbing and tabu search.
//!
//! A classical move shifts one slot of a template from a donor variation to
//! a recipient; an alternative move rewrites one slot. Both searches explore
//! a random sample of the neighbourhood per iteration (full enumeration is
//! prohibitively wide on the larger instances), restart from a fresh random
//! genotype after a stagnation window, and never exceed their evaluation
//! budget.
//!
//! Engines are resumable: [`HillClimber::advance`] and
//! [`TabuSearcher::advance`] run for a bounded number of evaluations and
//! keep their state, which is what the cooperative scheduler needs.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::{
    canonicalize, ensure_model_matches, random_genotype, Genotype, Model, ModelKind,
};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::pressing::{BoundedFitness, Evaluator, Fitness};

/// Evaluation budget: `n_v` evaluations total, restart after `n_v / 10`
/// evaluations without improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_evals: u64,
    pub consumed: u64,
    pub stagnation_limit: u64,
}

impl SearchBudget {
    pub fn new(max_evals: u64) -> Self {
        SearchBudget { max_evals, consumed: 0, stagnation_limit: max_evals / 10 }
    }
}

/// Total evaluation budget for an instance at an exploration percentage:
/// `round(1000 * t * v * (v - 1) * percent)`.
pub fn compute_budget(inst: &ProblemInstance, percent: f64) -> Result<u64> {
    if !(percent > 0.0 && percent <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "neighbourhood percentage must lie in (0, 1], got {percent}"
        )));
    }
    let base = 1000.0 * inst.t as f64 * inst.v as f64 * (inst.v as f64 - 1.0);
    Ok((base * percent).round() as u64)
}

/// One neighbourhood move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// Move one slot of `template` from `donor` to `recipient` (0-based
    /// variation indices).
    Classical { template: usize, donor: usize, recipient: usize },
    /// Overwrite `slot` of `template` with variation `value` (1-based).
    Alternative { template: usize, slot: usize, value: u32 },
}

impl Move {
    /// The move that undoes this one on the genotype it was applied to.
    fn reverse(&self, old_value: u32) -> Move {
        match *self {
            Move::Classical { template, donor, recipient } => {
                Move::Classical { template, donor: recipient, recipient: donor }
            }
            Move::Alternative { template, slot, .. } => {
                Move::Alternative { template, slot, value: old_value }
            }
        }
    }
}

/// Nominal neighbourhood width used for sampling caps: `t * v * (v-1)` for
/// the classical model, `t * s * (v-1)` for the alternative one.
pub fn neighborhood_width(inst: &ProblemInstance, kind: ModelKind) -> u64 {
    let positions = match kind.model {
        Model::Classical => inst.t * inst.v,
        Model::Alternative => inst.t * inst.s,
    };
    (positions * (inst.v - 1)) as u64
}

/// Applies a move, canonicalizing the result when the kind breaks symmetry.
pub fn apply_move(g: &Genotype, m: &Move, kind: ModelKind) -> Result<Genotype> {
    let mut out = g.clone();
    match (&mut out, *m) {
        (Genotype::Classical(c), Move::Classical { template, donor, recipient }) => {
            if donor == recipient {
                return Err(Error::InvalidMove("donor equals recipient".into()));
            }
            if template >= c.templates() || donor >= c.variations() || recipient >= c.variations()
            {
                return Err(Error::InvalidMove("move indices out of range".into()));
            }
            let col = c.column_mut(template);
            if col[donor] == 0 {
                return Err(Error::InvalidMove(format!(
                    "variation {donor} has no slot in template {template}"
                )));
            }
            col[donor] -= 1;
            col[recipient] += 1;
        }
        (Genotype::Alternative(a), Move::Alternative { template, slot, value }) => {
            if template >= a.templates() || slot >= a.slots_per_template() {
                return Err(Error::InvalidMove("move indices out of range".into()));
            }
            if a.slot(slot, template) == value {
                return Err(Error::InvalidMove("move does not change the slot".into()));
            }
            a.set_slot(slot, template, value);
        }
        _ => return Err(Error::InvalidMove("move kind does not match genotype".into())),
    }
    Ok(canonicalize(out, kind))
}

fn random_move(
    inst: &ProblemInstance,
    g: &Genotype,
    rng: &mut ChaCha8Rng,
) -> Option<Move> {
    if inst.v < 2 {
        return None;
    }
    match g {
        Genotype::Classical(c) => {
            let template = rng.gen_range(0..c.templates());
            let col = c.column(template);
            let nonzero: Vec<usize> =
                (0..c.variations()).filter(|&i| col[i] > 0).collect();
            let donor = nonzero[rng.gen_range(0..nonzero.len())];
            let mut recipient = rng.gen_range(0..c.variations() - 1);
            if recipient >= donor {
                recipient += 1;
            }
            Some(Move::Classical { template, donor, recipient })
        }
        Genotype::Alternative(a) => {
            let template = rng.gen_range(0..a.templates());
            let slot = rng.gen_range(0..a.slots_per_template());
            let current = a.slot(slot, template);
            let mut value = rng.gen_range(1..inst.v as u32);
            if value >= current {
                value += 1;
            }
            Some(Move::Alternative { template, slot, value })
        }
    }
}

fn enumerate_moves(g: &Genotype, v: usize) -> Vec<Move> {
    let mut moves = Vec::new();
    match g {
        Genotype::Classical(c) => {
            for template in 0..c.templates() {
                let col = c.column(template);
                for donor in 0..c.variations() {
                    if col[donor] == 0 {
                        continue;
                    }
                    for recipient in 0..c.variations() {
                        if recipient != donor {
                            moves.push(Move::Classical { template, donor, recipient });
                        }
                    }
                }
            }
        }
        Genotype::Alternative(a) => {
            for template in 0..a.templates() {
                for slot in 0..a.slots_per_template() {
                    let current = a.slot(slot, template);
                    for value in 1..=v as u32 {
                        if value != current {
                            moves.push(Move::Alternative { template, slot, value });
                        }
                    }
                }
            }
        }
    }
    moves
}

/// Up to `k` distinct neighbours (distinct after canonicalization) in
/// seeded-random order, each one move away from `g`.
pub fn sample_neighbors(
    inst: &ProblemInstance,
    g: &Genotype,
    kind: ModelKind,
    rng: &mut ChaCha8Rng,
    k: usize,
) -> Vec<Genotype> {
    sample_moves(inst, g, kind, rng, k).into_iter().map(|(_, n)| n).collect()
}

/// Like [`sample_neighbors`], but keeps the generating move alongside each
/// neighbour (tabu search needs the move attribute).
fn sample_moves(
    inst: &ProblemInstance,
    g: &Genotype,
    kind: ModelKind,
    rng: &mut ChaCha8Rng,
    k: usize,
) -> Vec<(Move, Genotype)> {
    let mut out = Vec::with_capacity(k);
    let mut seen: HashSet<Genotype> = HashSet::with_capacity(k + 1);
    seen.insert(g.clone());
    let width = neighborhood_width(inst, kind);
    if (k as u64).saturating_mul(3) >= width {
        // Small neighbourhood: enumerate and shuffle for exhaustiveness.
        let mut moves = enumerate_moves(g, inst.v);
        // Fisher-Yates, seeded.
        for i in (1..moves.len()).rev() {
            let j = rng.gen_range(0..=i);
            moves.swap(i, j);
        }
        for m in moves {
            if out.len() == k {
                break;
            }
            if let Ok(n) = apply_move(g, &m, kind) {
                if seen.insert(n.clone()) {
                    out.push((m, n));
                }
            }
        }
    } else {
        let mut attempts = 0usize;
        let max_attempts = 8 * k + 32;
        while out.len() < k && attempts < max_attempts {
            attempts += 1;
            let Some(m) = random_move(inst, g, rng) else { break };
            if let Ok(n) = apply_move(g, &m, kind) {
                if seen.insert(n.clone()) {
                    out.push((m, n));
                }
            }
        }
    }
    out
}

/// Bounded elite archive: the best distinct solutions seen by a local
/// search, used as its exchange pool in cooperative runs.
#[derive(Debug, Clone, Default)]
pub struct EliteArchive {
    entries: Vec<(Genotype, Fitness)>,
}

pub const ELITE_ARCHIVE_SIZE: usize = 10;

impl EliteArchive {
    pub fn insert(&mut self, g: Genotype, fit: Fitness) {
        if self.entries.iter().any(|(e, _)| *e == g) {
            return;
        }
        let pos = self.entries.partition_point(|(_, f)| *f <= fit);
        self.entries.insert(pos, (g, fit));
        self.entries.truncate(ELITE_ARCHIVE_SIZE);
    }

    pub fn entries(&self) -> &[(Genotype, Fitness)] {
        &self.entries
    }

    /// Drops the entry at `index` (exchange machinery).
    pub fn remove(&mut self, index: usize) {
        if index < self.entries.len() {
            self.entries.remove(index);
        }
    }
}

/// First-improvement hill climbing over sampled neighbours.
///
/// While the search sits at one point, candidate moves are drawn without
/// replacement from a seeded random order, so no evaluation repeats until
/// the point changes; exhausting the whole neighbourhood proves a local
/// optimum and triggers a restart.
pub struct HillClimber<'a> {
    inst: &'a ProblemInstance,
    kind: ModelKind,
    rng: ChaCha8Rng,
    current: Genotype,
    current_fit: Option<Fitness>,
    best: Option<(Genotype, Fitness)>,
    archive: EliteArchive,
    stagnation_limit: u64,
    since_improvement: u64,
    sample_cap: usize,
    /// Unexplored moves at the current point, in randomised order
    /// (consumed from the back).
    pending: Option<Vec<Move>>,
}

impl<'a> HillClimber<'a> {
    pub fn new(
        inst: &'a ProblemInstance,
        kind: ModelKind,
        start: Genotype,
        budget: SearchBudget,
        rng: ChaCha8Rng,
    ) -> Self {
        let width = neighborhood_width(inst, kind);
        HillClimber {
            inst,
            kind,
            rng,
            current: start,
            current_fit: None,
            best: None,
            archive: EliteArchive::default(),
            stagnation_limit: budget.stagnation_limit.max(1),
            since_improvement: 0,
            sample_cap: ((width / 100) as usize).max(1),
            pending: None,
        }
    }

    pub fn best(&self) -> Option<&(Genotype, Fitness)> {
        self.best.as_ref()
    }

    pub fn archive(&self) -> &EliteArchive {
        &self.archive
    }

    pub fn archive_mut(&mut self) -> &mut EliteArchive {
        &mut self.archive
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Installs an immigrant as the current point when it improves on it.
    pub fn consider_immigrant(&mut self, g: Genotype, fit: Fitness) {
        self.archive.insert(g.clone(), fit);
        if self.current_fit.map_or(true, |cf| fit < cf) {
            self.current = g.clone();
            self.current_fit = Some(fit);
        }
        if self.best.as_ref().map_or(true, |(_, bf)| fit < *bf) {
            self.best = Some((g, fit));
        }
    }

    fn record(&mut self, g: &Genotype, fit: Fitness) {
        self.archive.insert(g.clone(), fit);
        if self.best.as_ref().map_or(true, |(_, bf)| fit < *bf) {
            self.best = Some((g.clone(), fit));
            self.since_improvement = 0;
        }
    }

    /// Runs for at most `evals` further evaluations (also bounded by the
    /// evaluator's own limit). Returns the number actually consumed.
    pub fn advance(&mut self, ev: &mut Evaluator, evals: u64) -> u64 {
        let start_used = ev.used();
        let chunk_end = start_used.saturating_add(evals);
        'outer: while ev.used() < chunk_end && !ev.exhausted() {
            let Some(current_fit) = self.current_fit else {
                // (Re)entry point: evaluate the current genotype exactly.
                match ev.try_fitness(&self.current) {
                    None => break,
                    Some(fit) => {
                        self.current_fit = Some(fit);
                        let g = self.current.clone();
                        self.record(&g, fit);
                    }
                }
                continue;
            };

            if self.pending.is_none() {
                let mut moves = enumerate_moves(&self.current, self.inst.v);
                for i in (1..moves.len()).rev() {
                    let j = self.rng.gen_range(0..=i);
                    moves.swap(i, j);
                }
                self.pending = Some(moves);
            }

            // One iteration: up to `sample_cap` untried neighbours,
            // first improvement wins.
            for _ in 0..self.sample_cap {
                if ev.used() >= chunk_end {
                    break 'outer;
                }
                let Some(mv) = self.pending.as_mut().and_then(Vec::pop) else {
                    // Whole neighbourhood checked: local optimum.
                    self.restart();
                    continue 'outer;
                };
                let Ok(neighbor) = apply_move(&self.current, &mv, self.kind) else {
                    continue;
                };
                if neighbor == self.current {
                    continue; // symmetric twin under canonicalization
                }
                match ev.try_fitness_vs(&neighbor, Some(current_fit)) {
                    None => break 'outer,
                    Some(BoundedFitness::Better(fit)) => {
                        self.current = neighbor;
                        self.current_fit = Some(fit);
                        self.pending = None;
                        let g = self.current.clone();
                        self.record(&g, fit);
                        self.since_improvement = 0;
                        break;
                    }
                    Some(BoundedFitness::NotBetter) => {
                        self.since_improvement += 1;
                        if self.since_improvement >= self.stagnation_limit {
                            self.restart();
                            break;
                        }
                    }
                }
            }
        }
        ev.used() - start_used
    }

    fn restart(&mut self) {
        self.current = random_genotype(self.inst, self.kind, &mut self.rng);
        self.current_fit = None;
        self.since_improvement = 0;
        self.pending = None;
    }
}

/// Steepest-of-sample tabu search with reverse-move tabu attributes and
/// incumbent aspiration.
pub struct TabuSearcher<'a> {
    inst: &'a ProblemInstance,
    kind: ModelKind,
    rng: ChaCha8Rng,
    current: Genotype,
    current_fit: Option<Fitness>,
    best: Option<(Genotype, Fitness)>,
    archive: EliteArchive,
    tenure: u64,
    tabu: HashMap<Move, u64>,
    iteration: u64,
    stagnation_limit: u64,
    since_improvement: u64,
    sample_cap: usize,
}

impl<'a> TabuSearcher<'a> {
    pub fn new(
        inst: &'a ProblemInstance,
        kind: ModelKind,
        start: Genotype,
        budget: SearchBudget,
        tenure: u64,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if tenure == 0 {
            return Err(Error::InvalidParameter("tabu tenure must be at least 1".into()));
        }
        let width = neighborhood_width(inst, kind);
        Ok(TabuSearcher {
            inst,
            kind,
            rng,
            current: start,
            current_fit: None,
            best: None,
            archive: EliteArchive::default(),
            tenure,
            tabu: HashMap::new(),
            iteration: 0,
            stagnation_limit: budget.stagnation_limit.max(1),
            since_improvement: 0,
            // Twice the hill-climbing cap, floored so that the steepest-of-
            // sample choice stays meaningful on narrow neighbourhoods.
            sample_cap: (((width / 100) as usize).max(1) * 2).max(16).min(width as usize),
        })
    }

    pub fn best(&self) -> Option<&(Genotype, Fitness)> {
        self.best.as_ref()
    }

    pub fn archive(&self) -> &EliteArchive {
        &self.archive
    }

    pub fn archive_mut(&mut self) -> &mut EliteArchive {
        &mut self.archive
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn consider_immigrant(&mut self, g: Genotype, fit: Fitness) {
        self.archive.insert(g.clone(), fit);
        if self.current_fit.map_or(true, |cf| fit < cf) {
            self.current = g.clone();
            self.current_fit = Some(fit);
        }
        if self.best.as_ref().map_or(true, |(_, bf)| fit < *bf) {
            self.best = Some((g, fit));
        }
    }

    fn record(&mut self, g: &Genotype, fit: Fitness) {
        self.archive.insert(g.clone(), fit);
        if self.best.as_ref().map_or(true, |(_, bf)| fit < *bf) {
            self.best = Some((g.clone(), fit));
            self.since_improvement = 0;
        }
    }

    pub fn advance(&mut self, ev: &mut Evaluator, evals: u64) -> u64 {
        let start_used = ev.used();
        let chunk_end = start_used.saturating_add(evals);
        'outer: while ev.used() < chunk_end && !ev.exhausted() {
            if self.current_fit.is_none() {
                match ev.try_fitness(&self.current) {
                    None => break,
                    Some(fit) => {
                        self.current_fit = Some(fit);
                        let g = self.current.clone();
                        self.record(&g, fit);
                    }
                }
                continue;
            }

            let moves =
                sample_moves(self.inst, &self.current, self.kind, &mut self.rng, self.sample_cap);
            if moves.is_empty() {
                break;
            }
            let incumbent = self.best.as_ref().map(|(_, f)| *f);
            let mut chosen: Option<(Move, u32, Genotype, Fitness)> = None;
            let mut stagnated = false;
            for (mv, neighbor) in moves {
                if ev.used() >= chunk_end {
                    break 'outer;
                }
                let is_tabu =
                    self.tabu.get(&mv).is_some_and(|&expiry| expiry > self.iteration);
                // Non-tabu moves compete on the sample; tabu moves must
                // additionally beat the incumbent (aspiration).
                let sample_best = chosen.as_ref().map(|(_, _, _, f)| *f);
                let threshold = if is_tabu {
                    match (incumbent, sample_best) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (x, None) => x,
                        (None, x) => x,
                    }
                } else {
                    sample_best
                };
                match ev.try_fitness_vs(&neighbor, threshold) {
                    None => break 'outer,
                    Some(BoundedFitness::Better(fit)) => {
                        let old_value = old_slot_value(&self.current, &mv);
                        chosen = Some((mv, old_value, neighbor, fit));
                    }
                    Some(BoundedFitness::NotBetter) => {}
                }
                self.since_improvement += 1;
                if self.since_improvement >= self.stagnation_limit {
                    stagnated = true;
                    break;
                }
            }
            if stagnated {
                self.restart();
                continue;
            }
            self.iteration += 1;
            if let Some((mv, old_value, neighbor, fit)) = chosen {
                self.tabu.insert(mv.reverse(old_value), self.iteration + self.tenure);
                self.current = neighbor;
                self.current_fit = Some(fit);
                let g = self.current.clone();
                self.record(&g, fit);
            }
            if self.iteration % 1024 == 0 {
                let now = self.iteration;
                self.tabu.retain(|_, &mut expiry| expiry > now);
            }
        }
        ev.used() - start_used
    }

    fn restart(&mut self) {
        self.current = random_genotype(self.inst, self.kind, &mut self.rng);
        self.current_fit = None;
        self.since_improvement = 0;
        self.tabu.clear();
        self.iteration = 0;
    }
}

fn old_slot_value(g: &Genotype, mv: &Move) -> u32 {
    match (g, mv) {
        (Genotype::Alternative(a), Move::Alternative { template, slot, .. }) => {
            a.slot(*slot, *template)
        }
        _ => 0,
    }
}

/// Runs hill climbing from `start` for at most `budget` evaluations.
/// Returns the best genotype found, its fitness and the evaluations used.
pub fn hill_climb(
    inst: &ProblemInstance,
    kind: ModelKind,
    start: Genotype,
    budget: u64,
    rng: ChaCha8Rng,
) -> Result<(Genotype, Fitness, u64)> {
    start.validate(inst)?;
    ensure_model_matches(&start, kind)?;
    let mut ev = Evaluator::new(inst, budget);
    let mut hc = HillClimber::new(inst, kind, start, SearchBudget::new(budget), rng);
    hc.advance(&mut ev, budget);
    let (g, fit) = hc.best.expect("at least the start point is evaluated");
    Ok((g, fit, ev.used()))
}

/// Runs tabu search from `start` for at most `budget` evaluations.
pub fn tabu_search(
    inst: &ProblemInstance,
    kind: ModelKind,
    start: Genotype,
    budget: u64,
    tenure: u64,
    rng: ChaCha8Rng,
) -> Result<(Genotype, Fitness, u64)> {
    start.validate(inst)?;
    ensure_model_matches(&start, kind)?;
    let mut ev = Evaluator::new(inst, budget);
    let mut ts = TabuSearcher::new(inst, kind, start, SearchBudget::new(budget), tenure, rng)?;
    ts.advance(&mut ev, budget);
    let (g, fit) = ts.best.expect("at least the start point is evaluated");
    Ok((g, fit, ev.used()))
}

/// Default tabu tenure.
pub const DEFAULT_TENURE: u64 = 10;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{is_canonical, ClassicalGenotype};
    use crate::instance::builtin_instance;
    use rand::SeedableRng;

    const CP: ModelKind = ModelKind::new(Model::Classical, false);
    const CP_SB: ModelKind = ModelKind::new(Model::Classical, true);
    const AD: ModelKind = ModelKind::new(Model::Alternative, false);
    const AD_SB: ModelKind = ModelKind::new(Model::Alternative, true);

    #[test]
    fn budget_formula_examples() {
        let magazine = builtin_instance("magazine").unwrap();
        assert_eq!(compute_budget(&magazine, 0.05).unwrap(), 367_500);
        let catfood = builtin_instance("catfood").unwrap();
        assert_eq!(compute_budget(&catfood, 0.05).unwrap(), 4_200);
        // Hypothetical wider instance.
        let wide = crate::instance::ProblemInstance::with_uniform_tolerance(
            "wide",
            4,
            40,
            vec![1000; 50],
            0.10,
        )
        .unwrap();
        assert_eq!(compute_budget(&wide, 0.05).unwrap(), 490_000);
        assert!(compute_budget(&catfood, 0.0).is_err());
        assert!(compute_budget(&catfood, 1.5).is_err());
    }

    fn catfood_column() -> Genotype {
        Genotype::Classical(
            ClassicalGenotype::from_columns(
                7,
                9,
                &[vec![1, 1, 1, 2, 2, 2, 0], vec![0, 0, 0, 0, 0, 2, 7]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn apply_move_examples() {
        let g = catfood_column();
        let moved = apply_move(
            &g,
            &Move::Classical { template: 0, donor: 3, recipient: 6 },
            CP,
        )
        .unwrap();
        assert_eq!(moved.as_classical().unwrap().column(0), &[1, 1, 1, 1, 2, 2, 1]);

        // Empty donor is invalid.
        assert!(matches!(
            apply_move(&g, &Move::Classical { template: 1, donor: 0, recipient: 1 }, CP),
            Err(Error::InvalidMove(_))
        ));

        // Alternative move, with and without symmetry breaking.
        let alt = Genotype::Alternative(
            crate::encoding::AlternativeGenotype::from_columns(7, 3, &[vec![1, 2, 3]]).unwrap(),
        );
        let out = apply_move(&alt, &Move::Alternative { template: 0, slot: 0, value: 5 }, AD)
            .unwrap();
        assert_eq!(out.as_alternative().unwrap().column(0), &[5, 2, 3]);
        let out =
            apply_move(&alt, &Move::Alternative { template: 0, slot: 0, value: 5 }, AD_SB)
                .unwrap();
        assert_eq!(out.as_alternative().unwrap().column(0), &[2, 3, 5]);
    }

    #[test]
    fn moves_preserve_structure() {
        let inst = builtin_instance("catfood").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [CP, AD] {
            let g = random_genotype(&inst, kind, &mut rng);
            for n in sample_neighbors(&inst, &g, kind, &mut rng, 10) {
                n.validate(&inst).unwrap();
            }
        }
    }

    #[test]
    fn classical_moves_are_reversible() {
        let inst = builtin_instance("catfood").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_genotype(&inst, CP, &mut rng);
        for _ in 0..20 {
            let Some(mv) = random_move(&inst, &g, &mut rng) else { break };
            if let Ok(fwd) = apply_move(&g, &mv, CP) {
                let back = apply_move(&fwd, &mv.reverse(0), CP).unwrap();
                assert_eq!(back, g);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_exhaustive_when_small() {
        let inst =
            crate::instance::ProblemInstance::with_uniform_tolerance("t", 1, 2, vec![10, 10], 0.1)
                .unwrap();
        let g = Genotype::Classical(
            ClassicalGenotype::from_columns(2, 2, &[vec![1, 1]]).unwrap(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let neighbors = sample_neighbors(&inst, &g, CP, &mut rng, 10);
        let mut cols: Vec<Vec<u32>> = neighbors
            .iter()
            .map(|n| n.as_classical().unwrap().column(0).to_vec())
            .collect();
        cols.sort();
        assert_eq!(cols, vec![vec![0, 2], vec![2, 0]]);

        let catfood = builtin_instance("catfood").unwrap();
        let g = random_genotype(&catfood, CP, &mut ChaCha8Rng::seed_from_u64(1));
        let a = sample_neighbors(&catfood, &g, CP, &mut ChaCha8Rng::seed_from_u64(7), 5);
        let b = sample_neighbors(&catfood, &g, CP, &mut ChaCha8Rng::seed_from_u64(7), 5);
        assert_eq!(a, b);
        assert_eq!(
            sample_neighbors(&catfood, &g, CP, &mut ChaCha8Rng::seed_from_u64(7), 1).len(),
            1
        );
    }

    #[test]
    fn hill_climb_respects_budget_and_improves_monotonically() {
        let inst = builtin_instance("catfood").unwrap();
        let start = random_genotype(&inst, CP_SB, &mut ChaCha8Rng::seed_from_u64(5));

        let (_, fit1, used1) = hill_climb(
            &inst,
            CP_SB,
            start.clone(),
            1,
            ChaCha8Rng::seed_from_u64(11),
        )
        .unwrap();
        assert_eq!(used1, 1);

        let (_, fit_small, _) = hill_climb(
            &inst,
            CP_SB,
            start.clone(),
            200,
            ChaCha8Rng::seed_from_u64(11),
        )
        .unwrap();
        let (_, fit_large, used_large) =
            hill_climb(&inst, CP_SB, start, 800, ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert!(used_large <= 800);
        assert!(fit_small <= fit1);
        assert!(fit_large <= fit_small);
    }

    #[test]
    fn tabu_search_guards_and_improves() {
        let inst = builtin_instance("catfood").unwrap();
        let start = random_genotype(&inst, CP, &mut ChaCha8Rng::seed_from_u64(6));
        assert!(matches!(
            tabu_search(&inst, CP, start.clone(), 100, 0, ChaCha8Rng::seed_from_u64(1)),
            Err(Error::InvalidParameter(_))
        ));
        let (_, fit_small, _) = tabu_search(
            &inst,
            CP,
            start.clone(),
            200,
            DEFAULT_TENURE,
            ChaCha8Rng::seed_from_u64(12),
        )
        .unwrap();
        let (_, fit_large, used) = tabu_search(
            &inst,
            CP,
            start,
            800,
            DEFAULT_TENURE,
            ChaCha8Rng::seed_from_u64(12),
        )
        .unwrap();
        assert!(used <= 800);
        assert!(fit_large <= fit_small);
    }

    #[test]
    fn searches_stay_canonical_under_symmetry_breaking() {
        let inst = builtin_instance("catfood").unwrap();
        for kind in [CP_SB, AD_SB] {
            let start = random_genotype(&inst, kind, &mut ChaCha8Rng::seed_from_u64(2));
            let (best, _, _) =
                hill_climb(&inst, kind, start, 300, ChaCha8Rng::seed_from_u64(3)).unwrap();
            assert!(is_canonical(&best, kind));
        }
    }

    #[test]
    fn evaluation_accounting_is_exact() {
        let inst = builtin_instance("catfood").unwrap();
        let start = random_genotype(&inst, CP, &mut ChaCha8Rng::seed_from_u64(8));
        let mut ev = Evaluator::new(&inst, 157);
        let mut hc = HillClimber::new(
            &inst,
            CP,
            start,
            SearchBudget::new(157),
            ChaCha8Rng::seed_from_u64(9),
        );
        let consumed = hc.advance(&mut ev, 157);
        assert_eq!(consumed, 157);
        assert_eq!(ev.used(), 157);
    }
}
