//! The pressing-count subproblem: given a fixed template design, choose
//! non-negative integer pressing counts minimising (violation, waste).
//!
//! For a classical genotype with counts `s_ij` and pressings `R_j`, variation
//! `i` is produced `p_i = sum_j s_ij * R_j` times. Waste is
//! `sum_i |p_i - Q_i|`; violation is the total number of units outside the
//! tolerance bands. Candidates compare lexicographically by
//! (violation, waste), so any feasible plan beats every infeasible one.
//!
//! With the design fixed, both objectives are piecewise-linear and convex in
//! the pressings, and a continuous optimum sits where `t` breakpoint
//! hyperplanes (`p_i = Q_i`, a band edge, or a coordinate plane `R_j = 0`)
//! intersect. [`optimize_pressings`] enumerates those intersections for up to
//! three templates, solves each small system in exact integer arithmetic,
//! searches the floor/ceil lattice cube around every surviving vertex, and
//! finishes with a lattice coordinate descent. Tiny search boxes are scanned
//! outright, which makes the solver exhaustive on desk-size instances.
//!
//! [`brute_force_pressings`] is the independent oracle: a plain grid scan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{alternative_to_classical, ClassicalGenotype, Genotype};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

/// Search-ordering fitness: total units outside the tolerance bands, then
/// waste. Smaller is better; the derived `Ord` compares lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fitness {
    pub violation: u64,
    pub waste: u64,
}

impl Fitness {
    pub fn feasible(&self) -> bool {
        self.violation == 0
    }
}

/// Outcome of pressing a design a fixed number of times per template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PressingPlan {
    /// Pressings per template.
    pub pressings: Vec<u64>,
    /// Units produced per variation.
    pub production: Vec<u64>,
    /// Underproduction slack per variation.
    pub under: Vec<u64>,
    /// Overproduction slack per variation.
    pub over: Vec<u64>,
    /// Total under- plus overproduction.
    pub waste: u64,
    /// Total units outside the tolerance bands (zero iff feasible).
    pub violation: u64,
    pub feasible: bool,
}

impl PressingPlan {
    pub fn fitness(&self) -> Fitness {
        Fitness { violation: self.violation, waste: self.waste }
    }
}

/// Grid guard for the brute-force oracle.
const BRUTE_FORCE_CAP: u128 = 1_000_000_000;
/// Boxes up to this many lattice points are scanned exhaustively. Larger
/// boxes rely on the vertex enumeration plus descent (already exact for a
/// single template, where the line search solves the 1-D convex problem).
const EXHAUSTIVE_CAP: u128 = 60_000;
/// Band-edge level combinations are enumerated at an arity only while the
/// resulting system count stays below this.
const LEVEL_SYSTEM_CAP: u64 = 20_000;

fn check_genotype(inst: &ProblemInstance, g: &ClassicalGenotype) -> Result<()> {
    if g.variations() != inst.v {
        return Err(Error::InvalidGenotype(format!(
            "genotype has {} variations, instance {}",
            g.variations(),
            inst.v
        )));
    }
    g.check_column_sums(inst.s)
}

/// Evaluates a design under the given pressings. Exact integer arithmetic.
pub fn evaluate_with_pressings(
    inst: &ProblemInstance,
    g: &ClassicalGenotype,
    pressings: &[u64],
) -> Result<PressingPlan> {
    check_genotype(inst, g)?;
    if pressings.len() != g.templates() {
        return Err(Error::InvalidPressings(format!(
            "{} pressing counts for {} templates",
            pressings.len(),
            g.templates()
        )));
    }
    Ok(build_plan(inst, g, pressings))
}

fn build_plan(inst: &ProblemInstance, g: &ClassicalGenotype, pressings: &[u64]) -> PressingPlan {
    let t = g.templates();
    let mut production = vec![0u64; inst.v];
    for j in 0..t {
        let col = g.column(j);
        let r = pressings[j];
        for i in 0..inst.v {
            production[i] += col[i] as u64 * r;
        }
    }
    let mut under = vec![0u64; inst.v];
    let mut over = vec![0u64; inst.v];
    let mut waste = 0u64;
    let mut violation = 0u64;
    for i in 0..inst.v {
        let q = inst.demands[i];
        let p = production[i];
        if p < q {
            under[i] = q - p;
        } else {
            over[i] = p - q;
        }
        waste += under[i] + over[i];
        let (lo, hi) = inst.tolerance_band(i).expect("index in range");
        if p < lo {
            violation += lo - p;
        } else if p > hi {
            violation += p - hi;
        }
    }
    PressingPlan {
        pressings: pressings.to_vec(),
        production,
        under,
        over,
        waste,
        violation,
        feasible: violation == 0,
    }
}

/// Finds pressings minimising (violation, waste) for the design.
///
/// Deterministic, and never worse than the breakpoint vertex enumeration
/// with its rounding neighbourhood; exhaustive whenever the relevant box of
/// pressing vectors is small.
pub fn optimize_pressings(inst: &ProblemInstance, g: &ClassicalGenotype) -> Result<PressingPlan> {
    check_genotype(inst, g)?;
    let mut solver = Solver::new(inst);
    let cols: Vec<&[u32]> = g.columns().collect();
    let (_, r) = solver.solve(&cols);
    Ok(build_plan(inst, g, &r))
}

/// Fitness of a genotype of either kind: the (violation, waste) of its
/// optimal pressing plan. Alternative genotypes are collapsed to counts
/// first, so the value is invariant under all encoding symmetries.
pub fn fitness(inst: &ProblemInstance, g: &Genotype) -> Result<Fitness> {
    g.validate(inst)?;
    let plan = match g {
        Genotype::Classical(c) => optimize_pressings(inst, c)?,
        Genotype::Alternative(a) => {
            optimize_pressings(inst, &alternative_to_classical(a, inst.v)?)?
        }
    };
    Ok(plan.fitness())
}

/// Exhaustive grid oracle: scans every pressing vector inside the inclusive
/// per-template `bounds` and returns the lexicographic (violation, waste)
/// minimum, ties broken by the smallest pressing vector.
pub fn brute_force_pressings(
    inst: &ProblemInstance,
    g: &ClassicalGenotype,
    bounds: &[(u64, u64)],
) -> Result<PressingPlan> {
    check_genotype(inst, g)?;
    if bounds.len() != g.templates() {
        return Err(Error::InvalidPressings(format!(
            "{} bounds for {} templates",
            bounds.len(),
            g.templates()
        )));
    }
    let mut size: u128 = 1;
    for &(lo, hi) in bounds {
        if hi < lo {
            return Err(Error::Budget(format!("empty pressing range {lo}..={hi}")));
        }
        size *= (hi - lo + 1) as u128;
    }
    if size > BRUTE_FORCE_CAP {
        return Err(Error::Budget(format!(
            "grid of {size} points exceeds the {BRUTE_FORCE_CAP}-point guard"
        )));
    }

    let v = inst.v;
    let t = g.templates();
    let rows: Vec<Vec<i64>> =
        (0..v).map(|i| (0..t).map(|j| g.count(i, j) as i64).collect()).collect();
    let demands: Vec<i64> = inst.demands.iter().map(|&q| q as i64).collect();
    let bands: Vec<(i64, i64)> =
        inst.tolerance_bands().iter().map(|&(lo, hi)| (lo as i64, hi as i64)).collect();

    // Split on the first axis; each chunk scans in ascending lexicographic
    // order so its local optimum carries the smallest pressing vector, and
    // the reduction keeps that property globally.
    let (lo0, hi0) = bounds[0];
    let best = (lo0..=hi0)
        .into_par_iter()
        .map(|r0| {
            let mut best: Option<(i64, i64, Vec<u64>)> = None;
            let mut r = vec![0u64; t];
            r[0] = r0;
            scan_axis(1, bounds, &mut r, &rows, &demands, &bands, &mut best);
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(x), Some(y)) => {
                    if (x.0, x.1, &x.2) <= (y.0, y.1, &y.2) {
                        Some(x)
                    } else {
                        Some(y)
                    }
                }
            },
        )
        .expect("grid is non-empty");

    Ok(build_plan(inst, g, &best.2))
}

fn scan_axis(
    axis: usize,
    bounds: &[(u64, u64)],
    r: &mut Vec<u64>,
    rows: &[Vec<i64>],
    demands: &[i64],
    bands: &[(i64, i64)],
    best: &mut Option<(i64, i64, Vec<u64>)>,
) {
    if axis == bounds.len() {
        let limit = best.as_ref().map(|b| (b.0, b.1)).unwrap_or((i64::MAX, i64::MAX));
        let mut viol = 0i64;
        let mut waste = 0i64;
        for (i, row) in rows.iter().enumerate() {
            let p: i64 = row.iter().zip(r.iter()).map(|(&a, &x)| a * x as i64).sum();
            waste += (p - demands[i]).abs();
            let (lo, hi) = bands[i];
            viol += (lo - p).max(0) + (p - hi).max(0);
            if viol > limit.0 || (viol == limit.0 && waste >= limit.1) {
                return;
            }
        }
        *best = Some((viol, waste, r.clone()));
        return;
    }
    let (lo, hi) = bounds[axis];
    for x in lo..=hi {
        r[axis] = x;
        scan_axis(axis + 1, bounds, r, rows, demands, bands, best);
    }
}

/// Budget-counted fitness evaluator shared by all search engines.
///
/// Every call to [`Evaluator::try_fitness`] or
/// [`Evaluator::try_fitness_partial`] consumes exactly one evaluation; once
/// the limit is reached both return `None`. Scratch buffers are reused
/// across calls, so one evaluator should live per run.
pub struct Evaluator<'a> {
    inst: &'a ProblemInstance,
    solver: Solver,
    counts_scratch: Vec<u32>,
    /// Budget ledger in template-fractions: a full evaluation costs `t`
    /// units, a `p`-template partial evaluation costs `p` units, so greedy
    /// recombination's partial scorings add up to equivalent full
    /// evaluations.
    limit_scaled: u64,
    used_scaled: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a ProblemInstance, limit: u64) -> Self {
        Evaluator {
            inst,
            solver: Solver::new(inst),
            counts_scratch: Vec::new(),
            limit_scaled: limit.saturating_mul(inst.t as u64),
            used_scaled: 0,
        }
    }

    pub fn instance(&self) -> &'a ProblemInstance {
        self.inst
    }

    /// Full evaluations consumed, rounded down when partial evaluations
    /// leave a fraction outstanding.
    pub fn used(&self) -> u64 {
        self.used_scaled / self.inst.t as u64
    }

    pub fn limit(&self) -> u64 {
        self.limit_scaled / self.inst.t as u64
    }

    pub fn remaining(&self) -> u64 {
        self.limit_scaled.saturating_sub(self.used_scaled) / self.inst.t as u64
    }

    pub fn exhausted(&self) -> bool {
        self.used_scaled >= self.limit_scaled
    }

    /// Grants additional budget (used by cycle-based schedulers).
    pub fn extend_limit(&mut self, extra: u64) {
        self.limit_scaled += extra.saturating_mul(self.inst.t as u64);
    }

    /// Evaluates a full genotype, charging one evaluation. `None` once the
    /// budget is spent.
    pub fn try_fitness(&mut self, g: &Genotype) -> Option<Fitness> {
        if self.exhausted() {
            return None;
        }
        self.used_scaled += self.inst.t as u64;
        Some(self.fitness_uncounted(g, g.templates(), None).expect("unbounded"))
    }

    /// Is-it-better evaluation: returns the exact fitness when it is
    /// strictly better than `threshold`, or `NotBetter` otherwise. Charges
    /// one evaluation either way. With `threshold = None` this is a plain
    /// exact evaluation.
    ///
    /// The threshold only prunes work inside the pressing solver; every
    /// accept/reject decision and every reported fitness is identical to
    /// what exact evaluation would produce.
    pub fn try_fitness_vs(
        &mut self,
        g: &Genotype,
        threshold: Option<Fitness>,
    ) -> Option<BoundedFitness> {
        if self.exhausted() {
            return None;
        }
        self.used_scaled += self.inst.t as u64;
        Some(match self.fitness_uncounted(g, g.templates(), threshold) {
            Some(fit) => BoundedFitness::Better(fit),
            None => BoundedFitness::NotBetter,
        })
    }

    /// Evaluates the design formed by the first `cols` templates of `g`
    /// against a threshold, treating the remaining templates as never
    /// pressed. Charges `cols` of the instance's `t` template-fractions,
    /// i.e. the equivalent share of a full evaluation. Used by greedy
    /// recombination.
    pub fn try_fitness_partial_vs(
        &mut self,
        g: &Genotype,
        cols: usize,
        threshold: Option<Fitness>,
    ) -> Option<BoundedFitness> {
        if self.exhausted() {
            return None;
        }
        self.used_scaled += (cols as u64).min(self.inst.t as u64);
        Some(match self.fitness_uncounted(g, cols, threshold) {
            Some(fit) => BoundedFitness::Better(fit),
            None => BoundedFitness::NotBetter,
        })
    }

    /// Fitness without budget accounting (reporting paths only).
    pub fn fitness_free(&mut self, g: &Genotype) -> Fitness {
        self.fitness_uncounted(g, g.templates(), None).expect("unbounded")
    }

    /// Optimal plan for reporting; not charged to the budget.
    pub fn plan_free(&mut self, g: &Genotype) -> PressingPlan {
        let classical = match g {
            Genotype::Classical(c) => c.clone(),
            Genotype::Alternative(a) => {
                alternative_to_classical(a, self.inst.v).expect("valid genotype")
            }
        };
        let cols: Vec<&[u32]> = classical.columns().collect();
        let (_, r) = self.solver.solve(&cols);
        build_plan(self.inst, &classical, &r)
    }

    fn fitness_uncounted(
        &mut self,
        g: &Genotype,
        cols: usize,
        threshold: Option<Fitness>,
    ) -> Option<Fitness> {
        let v = self.inst.v;
        let th = threshold.map(|f| (f.violation as i64, f.waste as i64));
        match g {
            Genotype::Classical(c) => {
                debug_assert_eq!(c.variations(), v);
                let col_slices: Vec<&[u32]> = c.columns().take(cols).collect();
                self.solver.solve_bounded(&col_slices, th).map(|(fit, _)| fit)
            }
            Genotype::Alternative(a) => {
                self.counts_scratch.clear();
                self.counts_scratch.resize(v * cols, 0);
                for (j, col) in a.columns().take(cols).enumerate() {
                    for &x in col {
                        self.counts_scratch[j * v + (x as usize - 1)] += 1;
                    }
                }
                let col_slices: Vec<&[u32]> = self.counts_scratch.chunks_exact(v).collect();
                self.solver.solve_bounded(&col_slices, th).map(|(fit, _)| fit)
            }
        }
    }
}

/// Result of a threshold evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedFitness {
    /// Strictly better than the threshold; exact value attached.
    Better(Fitness),
    /// Not strictly better than the threshold (exact value withheld).
    NotBetter,
}

impl BoundedFitness {
    pub fn better(self) -> Option<Fitness> {
        match self {
            BoundedFitness::Better(f) => Some(f),
            BoundedFitness::NotBetter => None,
        }
    }
}

/// One deduplicated variation class: identical count rows with identical
/// demand and band collapse, weighted by multiplicity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Group {
    a: [i64; 3],
    q: i64,
    lo: i64,
    hi: i64,
    mult: i64,
}

/// A group restricted to a search line: production `base + x * step`.
#[derive(Clone, Copy)]
struct LineGroup {
    base: i64,
    step: i64,
    q: i64,
    lo: i64,
    hi: i64,
    mult: i64,
}

/// Pressing solver working state, reused across evaluations.
struct Solver {
    v: usize,
    demands: Vec<i64>,
    bands: Vec<(i64, i64)>,
    groups: Vec<Group>,
    const_viol: i64,
    const_waste: i64,
    caps: [i64; 3],
    gain: i64,
    agg_a: [i64; 3],
    agg_q: i64,
    agg_lo: i64,
    agg_hi: i64,
    // Per-dominant-template partition aggregates for entry screening.
    bkt_a: [[i64; 3]; 3],
    bkt_q: [i64; 3],
    bkt_lo: [i64; 3],
    bkt_hi: [i64; 3],
    // suf_*[k] aggregates groups k.. for mid-scan remainder bounds.
    suf_a: Vec<[i64; 3]>,
    suf_q: Vec<i64>,
    suf_lo: Vec<i64>,
    suf_hi: Vec<i64>,
    best_viol: i64,
    best_waste: i64,
    best_r: [i64; 3],
    line_scratch: Vec<LineGroup>,
    general_r: Vec<i64>,
}

/// Violation dominates waste in a single convex objective, which makes
/// coordinate line minimisation possible. The weight exceeds any reachable
/// waste value for supported demand magnitudes.
const LEX_WEIGHT: i128 = 1 << 60;

impl Solver {
    fn new(inst: &ProblemInstance) -> Self {
        Solver {
            v: inst.v,
            demands: inst.demands.iter().map(|&q| q as i64).collect(),
            bands: inst
                .tolerance_bands()
                .iter()
                .map(|&(lo, hi)| (lo as i64, hi as i64))
                .collect(),
            groups: Vec::new(),
            const_viol: 0,
            const_waste: 0,
            caps: [0; 3],
            gain: 0,
            agg_a: [0; 3],
            agg_q: 0,
            agg_lo: 0,
            agg_hi: 0,
            bkt_a: [[0; 3]; 3],
            bkt_q: [0; 3],
            bkt_lo: [0; 3],
            bkt_hi: [0; 3],
            suf_a: Vec::new(),
            suf_q: Vec::new(),
            suf_lo: Vec::new(),
            suf_hi: Vec::new(),
            best_viol: i64::MAX,
            best_waste: i64::MAX,
            best_r: [0; 3],
            line_scratch: Vec::new(),
            general_r: Vec::new(),
        }
    }

    /// Optimal pressings for the design given as template columns, with the
    /// best (violation, waste) reached.
    fn solve(&mut self, cols: &[&[u32]]) -> (Fitness, Vec<u64>) {
        let (fit, r) = self.solve_bounded(cols, None).expect("unbounded solve always yields");
        (fit, r)
    }

    /// Like [`Solver::solve`], but prunes against `threshold`: returns
    /// `None` unless a plan strictly better than the threshold exists, in
    /// which case the exact optimum is returned. Search engines use this
    /// for is-it-better queries; the pruning cannot change their decisions.
    fn solve_bounded(
        &mut self,
        cols: &[&[u32]],
        threshold: Option<(i64, i64)>,
    ) -> Option<(Fitness, Vec<u64>)> {
        let t = cols.len();
        if t <= 3 {
            self.prepare_groups(cols);
            if let Some((tv, tw)) = threshold {
                self.best_viol = tv;
                self.best_waste = tw;
            }
            self.run_fast(t);
            if threshold.is_some()
                && (self.best_viol, self.best_waste) >= threshold.unwrap()
            {
                return None;
            }
            let fit = Fitness {
                violation: self.best_viol as u64,
                waste: self.best_waste as u64,
            };
            Some((fit, self.best_r[..t].iter().map(|&x| x as u64).collect()))
        } else {
            self.run_general(cols);
            if let Some(th) = threshold {
                if (self.best_viol, self.best_waste) >= th {
                    return None;
                }
            }
            let fit = Fitness {
                violation: self.best_viol as u64,
                waste: self.best_waste as u64,
            };
            Some((fit, self.general_r.iter().map(|&x| x as u64).collect()))
        }
    }

    fn prepare_groups(&mut self, cols: &[&[u32]]) {
        let t = cols.len();
        self.groups.clear();
        self.const_viol = 0;
        self.const_waste = 0;
        for i in 0..self.v {
            let mut a = [0i64; 3];
            for (j, col) in cols.iter().enumerate() {
                a[j] = col[i] as i64;
            }
            let (lo, hi) = self.bands[i];
            if a == [0, 0, 0] {
                // Never produced: fixed waste and violation.
                self.const_waste += self.demands[i];
                self.const_viol += lo;
            } else {
                self.groups.push(Group { a, q: self.demands[i], lo, hi, mult: 1 });
            }
        }
        self.groups.sort_unstable();
        let mut merged: Vec<Group> = Vec::with_capacity(self.groups.len());
        for g in self.groups.drain(..) {
            match merged.last_mut() {
                Some(last)
                    if last.a == g.a && last.q == g.q && last.lo == g.lo && last.hi == g.hi =>
                {
                    last.mult += 1;
                }
                _ => merged.push(g),
            }
        }
        self.groups = merged;
        // Largest contributors first so losing candidates abort early.
        self.groups.sort_unstable_by_key(|g| std::cmp::Reverse(g.mult * g.q));

        self.caps = [0; 3];
        let mut sens = 0i64;
        self.agg_a = [0; 3];
        self.agg_q = 0;
        self.agg_lo = 0;
        self.agg_hi = 0;
        self.bkt_a = [[0; 3]; 3];
        self.bkt_q = [0; 3];
        self.bkt_lo = [0; 3];
        self.bkt_hi = [0; 3];
        for g in &self.groups {
            sens += g.mult * (g.a[0] + g.a[1] + g.a[2]);
            let mut dominant = 0;
            for j in 0..t {
                self.agg_a[j] += g.mult * g.a[j];
                if g.a[j] > g.a[dominant] {
                    dominant = j;
                }
                if g.a[j] > 0 {
                    self.caps[j] = self.caps[j].max((g.hi + g.a[j] - 1) / g.a[j]);
                }
            }
            self.agg_q += g.mult * g.q;
            self.agg_lo += g.mult * g.lo;
            self.agg_hi += g.mult * g.hi;
            for j in 0..t {
                self.bkt_a[dominant][j] += g.mult * g.a[j];
            }
            self.bkt_q[dominant] += g.mult * g.q;
            self.bkt_lo[dominant] += g.mult * g.lo;
            self.bkt_hi[dominant] += g.mult * g.hi;
        }
        let m = self.groups.len();
        self.suf_a.clear();
        self.suf_q.clear();
        self.suf_lo.clear();
        self.suf_hi.clear();
        self.suf_a.resize(m + 1, [0; 3]);
        self.suf_q.resize(m + 1, 0);
        self.suf_lo.resize(m + 1, 0);
        self.suf_hi.resize(m + 1, 0);
        for k in (0..m).rev() {
            let g = &self.groups[k];
            let nxt = self.suf_a[k + 1];
            self.suf_a[k] =
                [nxt[0] + g.mult * g.a[0], nxt[1] + g.mult * g.a[1], nxt[2] + g.mult * g.a[2]];
            self.suf_q[k] = self.suf_q[k + 1] + g.mult * g.q;
            self.suf_lo[k] = self.suf_lo[k + 1] + g.mult * g.lo;
            self.suf_hi[k] = self.suf_hi[k + 1] + g.mult * g.hi;
        }
        // A lattice-cube point strays at most two steps per axis from the
        // rounded vertex, shifting violation and waste by at most this much.
        self.gain = 2 * sens;
        self.best_viol = i64::MAX;
        self.best_waste = i64::MAX;
        self.best_r = [0; 3];
    }

    /// Evaluates `r`, aborting as soon as the partial score can no longer
    /// beat `limit` (both components accumulate monotonically). Returns the
    /// score only when strictly better than `limit`.
    #[inline]
    fn eval(&self, r: &[i64; 3], limit: (i64, i64)) -> Option<(i64, i64)> {
        let mut viol_lb = self.const_viol;
        let mut waste_lb = self.const_waste;
        for b in 0..3 {
            let ba = &self.bkt_a[b];
            if ba[0] == 0 && ba[1] == 0 && ba[2] == 0 && self.bkt_q[b] == 0 {
                continue;
            }
            let p = ba[0] * r[0] + ba[1] * r[1] + ba[2] * r[2];
            viol_lb += (self.bkt_lo[b] - p).max(0).max(p - self.bkt_hi[b]);
            waste_lb += (p - self.bkt_q[b]).abs();
        }
        if viol_lb > limit.0 || (viol_lb == limit.0 && waste_lb >= limit.1) {
            return None;
        }
        let mut viol = self.const_viol;
        let mut waste = self.const_waste;
        for (k, g) in self.groups.iter().enumerate() {
            let p = g.a[0] * r[0] + g.a[1] * r[1] + g.a[2] * r[2];
            waste += g.mult * (p - g.q).abs();
            viol += g.mult * ((g.lo - p).max(0) + (p - g.hi).max(0));
            let sa = &self.suf_a[k + 1];
            let rem_p = sa[0] * r[0] + sa[1] * r[1] + sa[2] * r[2];
            let rem_viol = (self.suf_lo[k + 1] - rem_p).max(0).max(rem_p - self.suf_hi[k + 1]);
            let rem_waste = (rem_p - self.suf_q[k + 1]).abs();
            let v = viol + rem_viol;
            let w = waste + rem_waste;
            if v > limit.0 || (v == limit.0 && w >= limit.1) {
                return None;
            }
        }
        Some((viol, waste))
    }

    #[inline]
    fn visit(&mut self, r: [i64; 3]) {
        if r[0] < 0 || r[1] < 0 || r[2] < 0 {
            return;
        }
        if let Some((viol, waste)) = self.eval(&r, (self.best_viol, self.best_waste)) {
            self.best_viol = viol;
            self.best_waste = waste;
            self.best_r = r;
        }
    }

    fn run_fast(&mut self, t: usize) {
        self.visit([0, 0, 0]);

        // Tiny boxes: scan outright. The optimum provably lies within the
        // caps, so this is exhaustive and ascending order keeps the
        // smallest optimal pressing vector.
        let box_size: u128 = (0..t).map(|j| (self.caps[j] + 1) as u128).product();
        if box_size <= EXHAUSTIVE_CAP {
            let caps = self.caps;
            let mut r = [0i64; 3];
            self.scan_box(0, t, &caps, &mut r);
            return;
        }

        self.axis_probes(t);
        // An early descent sharpens the incumbent so vertex candidates can
        // be rejected after a couple of groups.
        self.coordinate_descent(t);
        let descended = (self.best_viol, self.best_waste, self.best_r);
        match t {
            2 => self.vertices_t2(),
            3 => self.vertices_t3(),
            _ => {} // t == 1 is covered by the probes and descent
        }
        if (self.best_viol, self.best_waste, self.best_r) != descended {
            self.coordinate_descent(t);
        }
    }

    fn scan_box(&mut self, axis: usize, t: usize, caps: &[i64; 3], r: &mut [i64; 3]) {
        if axis == t {
            let rr = *r;
            self.visit(rr);
            return;
        }
        for x in 0..=caps[axis] {
            r[axis] = x;
            self.scan_box(axis + 1, t, caps, r);
        }
    }

    /// Single-template probes: for every group, axis and level, the rounded
    /// axis-aligned candidate and its lattice neighbours.
    fn axis_probes(&mut self, t: usize) {
        for gi in 0..self.groups.len() {
            let g = self.groups[gi];
            for j in 0..t {
                if g.a[j] <= 0 {
                    continue;
                }
                for theta in [g.q, g.lo, g.hi] {
                    let mut r = [0i64; 3];
                    r[j] = div_round_half_up(theta, g.a[j]).min(self.caps[j]);
                    self.visit(r);
                }
            }
        }
    }

    fn levels_enabled(&self, arity: u32, systems: u64) -> bool {
        systems.saturating_mul(3u64.pow(arity)) <= LEVEL_SYSTEM_CAP
    }

    fn vertices_t2(&mut self) {
        let m = self.groups.len();
        let levels = self.levels_enabled(2, (m * m.saturating_sub(1) / 2) as u64);
        for i in 0..m {
            for k in (i + 1)..m {
                let (g1, g2) = (self.groups[i], self.groups[k]);
                let det = g1.a[0] * g2.a[1] - g1.a[1] * g2.a[0];
                if det == 0 {
                    continue;
                }
                let visit_combo = |s: &mut Self, t1: i64, t2: i64| {
                    let mut n0 = t1 * g2.a[1] - g1.a[1] * t2;
                    let mut n1 = g1.a[0] * t2 - t1 * g2.a[0];
                    let mut d = det;
                    if d < 0 {
                        d = -d;
                        n0 = -n0;
                        n1 = -n1;
                    }
                    s.process_vertex([n0, n1, 0], d, 2);
                };
                visit_combo(self, g1.q, g2.q);
                if levels {
                    for t1 in [g1.q, g1.lo, g1.hi] {
                        for t2 in [g2.q, g2.lo, g2.hi] {
                            if (t1, t2) != (g1.q, g2.q) {
                                visit_combo(self, t1, t2);
                            }
                        }
                    }
                }
            }
        }
    }

    fn vertices_t3(&mut self) {
        let m = self.groups.len();

        // Pairs restricted to one coordinate plane. These only matter for
        // degenerate designs where a whole template goes unpressed, so they
        // run at the cheap-instance tier; probes and descent cover the rest.
        let pair_systems = (m * m.saturating_sub(1) / 2) as u64 * 3;
        let pair_levels = self.levels_enabled(2, pair_systems);
        for i in 0..if pair_levels { m } else { 0 } {
            for k in (i + 1)..m {
                let (g1, g2) = (self.groups[i], self.groups[k]);
                for zero_axis in 0..3usize {
                    let (x, y) = match zero_axis {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    let det = g1.a[x] * g2.a[y] - g1.a[y] * g2.a[x];
                    if det == 0 {
                        continue;
                    }
                    let visit_combo = |s: &mut Self, t1: i64, t2: i64| {
                        let mut nx = t1 * g2.a[y] - g1.a[y] * t2;
                        let mut ny = g1.a[x] * t2 - t1 * g2.a[x];
                        let mut d = det;
                        if d < 0 {
                            d = -d;
                            nx = -nx;
                            ny = -ny;
                        }
                        let mut nums = [0i64; 3];
                        nums[x] = nx;
                        nums[y] = ny;
                        s.process_vertex(nums, d, 3);
                    };
                    visit_combo(self, g1.q, g2.q);
                    if pair_levels {
                        for t1 in [g1.q, g1.lo, g1.hi] {
                            for t2 in [g2.q, g2.lo, g2.hi] {
                                if (t1, t2) != (g1.q, g2.q) {
                                    visit_combo(self, t1, t2);
                                }
                            }
                        }
                    }
                }
            }
        }

        // Full triples. Flat arrays keep the innermost loop at a handful of
        // loads and multiplies; this loop dominates evaluation cost on the
        // largest instances.
        let triple_systems = (m * m.saturating_sub(1) * m.saturating_sub(2) / 6) as u64;
        let triple_levels = self.levels_enabled(3, triple_systems);
        let a0: Vec<i64> = self.groups.iter().map(|g| g.a[0]).collect();
        let a1: Vec<i64> = self.groups.iter().map(|g| g.a[1]).collect();
        let a2: Vec<i64> = self.groups.iter().map(|g| g.a[2]).collect();
        let qs: Vec<i64> = self.groups.iter().map(|g| g.q).collect();
        let (cap0, cap1, cap2) = (self.caps[0], self.caps[1], self.caps[2]);
        for i in 0..m {
            for k in (i + 1)..m {
                let d_bc = a1[i] * a2[k] - a2[i] * a1[k];
                let d_ac = a0[i] * a2[k] - a2[i] * a0[k];
                let d_ab = a0[i] * a1[k] - a1[i] * a0[k];
                if d_bc == 0 && d_ac == 0 && d_ab == 0 {
                    continue; // parallel rows: every triple is singular
                }
                let (g1, g2) = (self.groups[i], self.groups[k]);
                let pair_level_list: &[(i64, i64)] = if triple_levels {
                    &[
                        (g1.q, g2.q),
                        (g1.q, g2.lo),
                        (g1.q, g2.hi),
                        (g1.lo, g2.q),
                        (g1.lo, g2.lo),
                        (g1.lo, g2.hi),
                        (g1.hi, g2.q),
                        (g1.hi, g2.lo),
                        (g1.hi, g2.hi),
                    ]
                } else {
                    &[(g1.q, g2.q)]
                };
                for &(t1, t2) in pair_level_list {
                    let e_c = t1 * a2[k] - a2[i] * t2;
                    let e_b = t1 * a1[k] - a1[i] * t2;
                    let e_a = t1 * a0[k] - a0[i] * t2;
                    for gi3 in (k + 1)..m {
                        let (x0, x1, x2) = (a0[gi3], a1[gi3], a2[gi3]);
                        let det = x0 * d_bc - x1 * d_ac + x2 * d_ab;
                        if det == 0 {
                            continue;
                        }
                        let theta3: [i64; 3] = if triple_levels {
                            let g3 = &self.groups[gi3];
                            [g3.q, g3.lo, g3.hi]
                        } else {
                            [qs[gi3], 0, 0]
                        };
                        let theta_count = if triple_levels { 3 } else { 1 };
                        for &t3 in &theta3[..theta_count] {
                            let neg = det < 0;
                            let d = det.abs();
                            let mut n0 = t3 * d_bc - x1 * e_c + x2 * e_b;
                            if neg {
                                n0 = -n0;
                            }
                            if n0 < 0 || n0 > cap0 * d {
                                continue;
                            }
                            let mut n1 = x0 * e_c - t3 * d_ac - x2 * e_a;
                            if neg {
                                n1 = -n1;
                            }
                            if n1 < 0 || n1 > cap1 * d {
                                continue;
                            }
                            let mut n2 = -x0 * e_b + x1 * e_a + t3 * d_ab;
                            if neg {
                                n2 = -n2;
                            }
                            if n2 < 0 || n2 > cap2 * d {
                                continue;
                            }
                            self.process_vertex([n0, n1, n2], d, 3);
                        }
                    }
                }
            }
        }
    }

    /// Rational screening of a vertex `nums / den` against a score limit,
    /// done entirely in products with `den` so no divisions are needed for
    /// the many losing candidates. Both components accumulate monotonically,
    /// allowing an early abort.
    #[inline]
    fn rational_survives(&self, nums: &[i64; 3], den: i64, limit: (i64, i64)) -> bool {
        let lim_v = limit.0.saturating_mul(den);
        let lim_w = limit.1.saturating_mul(den);
        // O(1) lower bounds: partition the groups by dominant template and
        // apply the triangle inequality per bucket. The summed residual can
        // never fall below the aggregate residual of any partition.
        let mut viol_lb = self.const_viol * den;
        let mut waste_lb = self.const_waste * den;
        for b in 0..3 {
            let ba = &self.bkt_a[b];
            if ba[0] == 0 && ba[1] == 0 && ba[2] == 0 && self.bkt_q[b] == 0 {
                continue;
            }
            let p = ba[0] * nums[0] + ba[1] * nums[1] + ba[2] * nums[2];
            viol_lb += (self.bkt_lo[b] * den - p).max(0).max(p - self.bkt_hi[b] * den);
            waste_lb += (p - self.bkt_q[b] * den).abs();
        }
        if viol_lb > lim_v || (viol_lb == lim_v && waste_lb >= lim_w) {
            return false;
        }
        let mut viol = self.const_viol * den;
        let mut waste = self.const_waste * den;
        if viol > lim_v || (viol == lim_v && waste >= lim_w) {
            return false;
        }
        for (k, g) in self.groups.iter().enumerate() {
            let p = g.a[0] * nums[0] + g.a[1] * nums[1] + g.a[2] * nums[2];
            waste += g.mult * (p - g.q * den).abs();
            viol += g.mult * ((g.lo * den - p).max(0) + (p - g.hi * den).max(0));
            // Remaining groups contribute at least their aggregate residual.
            let sa = &self.suf_a[k + 1];
            let rem_p = sa[0] * nums[0] + sa[1] * nums[1] + sa[2] * nums[2];
            let rem_viol =
                (self.suf_lo[k + 1] * den - rem_p).max(0).max(rem_p - self.suf_hi[k + 1] * den);
            let rem_waste = (rem_p - self.suf_q[k + 1] * den).abs();
            let v = viol + rem_viol;
            let w = waste + rem_waste;
            if v > lim_v || (v == lim_v && w >= lim_w) {
                return false;
            }
        }
        true
    }

    /// Handles one rational vertex `nums / den`: rejects out-of-range
    /// points, scores the nearest rounding, and expands the surrounding
    /// lattice cube whenever it could still beat the incumbent.
    fn process_vertex(&mut self, nums: [i64; 3], den: i64, t: usize) {
        debug_assert!(den > 0);
        for j in 0..t {
            if nums[j] < 0 || nums[j] > self.caps[j] * den {
                return;
            }
        }
        // Sound pruning: any point of the rounding cube improves on the
        // exact vertex score by at most `gain` per component.
        let limit = (
            self.best_viol.saturating_add(self.gain),
            self.best_waste.saturating_add(self.gain),
        );
        if !self.rational_survives(&nums, den, limit) {
            return;
        }
        let mut nearest = [0i64; 3];
        for j in 0..t {
            nearest[j] = (2 * nums[j] + den) / (2 * den);
        }
        self.visit(nearest);

        let mut axis_vals = [[0i64; 4]; 3];
        let mut axis_len = [1usize; 3];
        for j in 0..t {
            let floor = nums[j] / den;
            let rem = nums[j] % den;
            let upper = if rem == 0 { floor + 1 } else { floor + 2 };
            let mut vals = [0i64; 4];
            let mut len = 0;
            for c in (floor - 1)..=upper {
                if c >= 0 {
                    vals[len] = c;
                    len += 1;
                }
            }
            axis_vals[j] = vals;
            axis_len[j] = len.max(1);
        }
        for x0 in 0..axis_len[0] {
            for x1 in 0..axis_len[1] {
                for x2 in 0..axis_len[2] {
                    let r = [axis_vals[0][x0], axis_vals[1][x1], axis_vals[2][x2]];
                    if r != nearest {
                        self.visit(r);
                    }
                }
            }
        }
    }

    /// Descent over axis and unit-diagonal directions with exact line
    /// minimisation from the incumbent.
    ///
    /// Along a fixed direction the scalarised score (violation weighted
    /// above waste) is convex, so its integer minimum is the first point
    /// with a non-negative forward slope. A short gallop brackets that
    /// point, then binary search pins it. Diagonal directions clear the
    /// ridges that pure coordinate moves stall on.
    fn coordinate_descent(&mut self, t: usize) {
        if self.best_viol == i64::MAX {
            self.visit([0, 0, 0]);
        }
        const DIRS: [[i64; 3]; 9] = [
            [1, 0, 0],
            [0, 1, 0],
            [0, 0, 1],
            [1, -1, 0],
            [1, 1, 0],
            [1, 0, -1],
            [1, 0, 1],
            [0, 1, -1],
            [0, 1, 1],
        ];
        let dir_count = match t {
            1 => 1,
            2 => 5,
            _ => 9,
        };
        let dir_active = |d: &[i64; 3]| (0..3).all(|j| j < t || d[j] == 0);
        let mut r = self.best_r;
        for _ in 0..24 {
            let mut moved = false;
            for d in DIRS.iter().take(dir_count) {
                if !dir_active(d) {
                    continue;
                }
                if let Some(step) = self.line_minimum(&r, d) {
                    for j in 0..t {
                        r[j] += step * d[j];
                    }
                    self.visit(r);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }

    /// Exact minimiser offset along `r + x * d`, or `None` when `x = 0` is
    /// already minimal. Only strictly improving moves are reported.
    fn line_minimum(&mut self, r: &[i64; 3], d: &[i64; 3]) -> Option<i64> {
        // Feasible offset window keeping every coordinate in [0, cap].
        let mut xlo = i64::MIN;
        let mut xhi = i64::MAX;
        for j in 0..3 {
            match d[j] {
                0 => {}
                1 => {
                    xlo = xlo.max(-r[j]);
                    xhi = xhi.min(self.caps[j].max(r[j]) - r[j]);
                }
                -1 => {
                    xhi = xhi.min(r[j]);
                    xlo = xlo.max(r[j] - self.caps[j].max(r[j]));
                }
                _ => unreachable!(),
            }
        }
        if xlo >= xhi {
            return None; // window degenerate: only the current point
        }

        // Restrict to groups the direction actually moves, with production
        // rebased at x = 0.
        self.line_scratch.clear();
        for g in &self.groups {
            let step = g.a[0] * d[0] + g.a[1] * d[1] + g.a[2] * d[2];
            if step == 0 {
                continue;
            }
            let base = g.a[0] * r[0] + g.a[1] * r[1] + g.a[2] * r[2];
            self.line_scratch.push(LineGroup {
                base,
                step,
                q: g.q,
                lo: g.lo,
                hi: g.hi,
                mult: g.mult,
            });
        }
        if self.line_scratch.is_empty() {
            return None;
        }

        let slope = |s: &Self, x: i64| -> i128 {
            let mut sviol = 0i64;
            let mut swaste = 0i64;
            for g in &s.line_scratch {
                let p1 = g.base + x * g.step;
                let p2 = p1 + g.step;
                swaste += g.mult * ((p2 - g.q).abs() - (p1 - g.q).abs());
                let band1 = (g.lo - p1).max(0) + (p1 - g.hi).max(0);
                let band2 = (g.lo - p2).max(0) + (p2 - g.hi).max(0);
                sviol += g.mult * (band2 - band1);
            }
            sviol as i128 * LEX_WEIGHT + swaste as i128
        };

        // The minimiser is the first offset with non-negative forward
        // slope. Line minima usually sit close to the current point, so
        // gallop outward from zero to bracket the sign change, then binary
        // search inside the bracket.
        let mut lo = xlo;
        let mut hi = xhi;
        let probe0 = 0.clamp(xlo, xhi - 1);
        if slope(self, probe0) < 0 {
            lo = probe0 + 1;
            let mut span = 1i64;
            let mut cur = probe0;
            while cur < xhi - 1 {
                let next = (cur + span).min(xhi - 1);
                if slope(self, next) < 0 {
                    lo = next + 1;
                    cur = next;
                    span *= 2;
                } else {
                    hi = next;
                    break;
                }
            }
        } else {
            hi = probe0;
            let mut span = 1i64;
            let mut cur = probe0;
            while cur > xlo {
                let next = (cur - span).max(xlo);
                if slope(self, next) >= 0 {
                    hi = next;
                    cur = next;
                    span *= 2;
                } else {
                    lo = next + 1;
                    break;
                }
            }
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if slope(self, mid) < 0 {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let x = lo;
        if x == 0 {
            return None;
        }
        // Accept strict improvements only (plateaus would otherwise drift).
        let value = |s: &Self, x: i64| -> i128 {
            let mut viol = 0i64;
            let mut waste = 0i64;
            for g in &s.line_scratch {
                let p = g.base + x * g.step;
                waste += g.mult * (p - g.q).abs();
                viol += g.mult * ((g.lo - p).max(0) + (p - g.hi).max(0));
            }
            viol as i128 * LEX_WEIGHT + waste as i128
        };
        if value(self, x) < value(self, 0) {
            Some(x)
        } else {
            None
        }
    }

    // ------------------------------------------------------------------
    // More than three templates: probes plus lattice descent over raw
    // rows. The benchmark instances never take this branch.
    // ------------------------------------------------------------------

    fn run_general(&mut self, cols: &[&[u32]]) {
        let t = cols.len();
        let v = self.v;
        let rows: Vec<i64> = (0..v)
            .flat_map(|i| cols.iter().map(move |col| col[i] as i64))
            .collect();
        let mut caps = vec![0i64; t];
        for i in 0..v {
            let (_, hi) = self.bands[i];
            for j in 0..t {
                let a = rows[i * t + j];
                if a > 0 {
                    caps[j] = caps[j].max((hi + a - 1) / a);
                }
            }
        }
        let score = |r: &[i64]| -> (i64, i64) {
            let mut viol = 0i64;
            let mut waste = 0i64;
            for i in 0..v {
                let mut p = 0i64;
                for j in 0..t {
                    p += rows[i * t + j] * r[j];
                }
                waste += (p - self.demands[i]).abs();
                let (lo, hi) = self.bands[i];
                viol += (lo - p).max(0) + (p - hi).max(0);
            }
            (viol, waste)
        };

        let mut best_r = vec![0i64; t];
        let mut best = score(&best_r);
        let consider = |r: Vec<i64>, best: &mut (i64, i64), best_r: &mut Vec<i64>| {
            let s = score(&r);
            if s < *best {
                *best = s;
                *best_r = r;
            }
        };
        for i in 0..v {
            for j in 0..t {
                let a = rows[i * t + j];
                if a <= 0 {
                    continue;
                }
                for theta in [self.demands[i], self.bands[i].0, self.bands[i].1] {
                    let mut r = vec![0i64; t];
                    r[j] = div_round_half_up(theta, a).min(caps[j]);
                    consider(r.clone(), &mut best, &mut best_r);
                    r[j] = (r[j] - 1).max(0);
                    consider(r.clone(), &mut best, &mut best_r);
                    r[j] += 2;
                    consider(r, &mut best, &mut best_r);
                }
            }
        }
        // Coordinate descent with exact line minimisation (the scalarised
        // score is convex along every axis).
        let scalar = |r: &[i64]| -> i128 {
            let (viol, waste) = score(r);
            viol as i128 * LEX_WEIGHT + waste as i128
        };
        for _ in 0..16 {
            let mut moved = false;
            for j in 0..t {
                let mut lo = 0i64;
                let mut hi = caps[j].max(best_r[j]);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    let mut p = best_r.clone();
                    p[j] = mid;
                    let f_mid = scalar(&p);
                    p[j] = mid + 1;
                    if scalar(&p) < f_mid {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                if lo != best_r[j] {
                    let mut p = best_r.clone();
                    p[j] = lo;
                    let moved_here = scalar(&p) < scalar(&best_r);
                    consider(p, &mut best, &mut best_r);
                    if moved_here {
                        moved = true;
                    }
                }
            }
            if !moved {
                break;
            }
        }
        self.best_viol = best.0;
        self.best_waste = best.1;
        self.general_r = best_r;
    }
}

#[inline]
fn div_round_half_up(n: i64, d: i64) -> i64 {
    debug_assert!(d > 0);
    (2 * n + d) / (2 * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{canonicalize, ClassicalGenotype, Genotype, Model, ModelKind};
    use crate::instance::builtin_instance;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn catfood_best() -> ClassicalGenotype {
        ClassicalGenotype::from_columns(
            7,
            9,
            &[vec![1, 1, 1, 2, 2, 2, 0], vec![0, 0, 0, 0, 0, 2, 7]],
        )
        .unwrap()
    }

    #[test]
    fn catfood_fixture_evaluates_exactly() {
        let inst = builtin_instance("catfood").unwrap();
        let plan =
            evaluate_with_pressings(&inst, &catfood_best(), &[250_000, 157_143]).unwrap();
        assert_eq!(plan.waste, 29_287);
        assert!(plan.feasible);
        let deviations: Vec<i64> = plan
            .production
            .iter()
            .zip(&inst.demands)
            .map(|(&p, &q)| p as i64 - q as i64)
            .collect();
        assert_eq!(deviations, vec![0, -5000, -10000, 0, 0, 14286, 1]);
    }

    #[test]
    fn zero_pressings_waste_everything() {
        let inst = builtin_instance("catfood").unwrap();
        let plan = evaluate_with_pressings(&inst, &catfood_best(), &[0, 0]).unwrap();
        assert_eq!(plan.production, vec![0; 7]);
        assert_eq!(plan.waste, inst.total_demand());
        assert!(!plan.feasible);
    }

    #[test]
    fn wrong_pressing_count_is_rejected() {
        let inst = builtin_instance("catfood").unwrap();
        assert!(matches!(
            evaluate_with_pressings(&inst, &catfood_best(), &[1, 2, 3]),
            Err(Error::InvalidPressings(_))
        ));
    }

    #[test]
    fn optimize_finds_published_catfood_optimum() {
        let inst = builtin_instance("catfood").unwrap();
        let plan = optimize_pressings(&inst, &catfood_best()).unwrap();
        assert_eq!(plan.waste, 29_287);
        assert_eq!(plan.violation, 0);
        assert_eq!(plan.pressings, vec![250_000, 157_143]);
    }

    #[test]
    fn optimize_exact_cover_cases() {
        let inst = crate::instance::ProblemInstance::with_uniform_tolerance(
            "one",
            1,
            1,
            vec![100],
            0.10,
        )
        .unwrap();
        let g = ClassicalGenotype::from_columns(1, 1, &[vec![1]]).unwrap();
        let plan = optimize_pressings(&inst, &g).unwrap();
        assert_eq!(plan.pressings, vec![100]);
        assert_eq!(plan.waste, 0);

        let inst = crate::instance::ProblemInstance::with_uniform_tolerance(
            "two",
            1,
            2,
            vec![10, 10],
            0.10,
        )
        .unwrap();
        let g = ClassicalGenotype::from_columns(2, 2, &[vec![1, 1]]).unwrap();
        let plan = optimize_pressings(&inst, &g).unwrap();
        assert_eq!(plan.pressings, vec![10]);
        assert_eq!(plan.waste, 0);
        let oracle = brute_force_pressings(&inst, &g, &[(0, 30)]).unwrap();
        assert_eq!(oracle.pressings, vec![10]);
        assert_eq!(oracle.waste, 0);
    }

    #[test]
    fn brute_force_guards() {
        let inst = builtin_instance("catfood").unwrap();
        let g = catfood_best();
        assert!(matches!(
            brute_force_pressings(&inst, &g, &[(0, 2_000_000), (0, 2_000_000)]),
            Err(Error::Budget(_))
        ));
        assert!(matches!(
            brute_force_pressings(&inst, &g, &[(10, 5), (0, 10)]),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn optimize_matches_brute_force_near_catfood_optimum() {
        let inst = builtin_instance("catfood").unwrap();
        let g = catfood_best();
        let oracle =
            brute_force_pressings(&inst, &g, &[(249_000, 251_000), (156_000, 158_000)])
                .unwrap();
        let solved = optimize_pressings(&inst, &g).unwrap();
        assert_eq!(oracle.waste, 29_287);
        assert_eq!(solved.fitness(), oracle.fitness());
    }

    fn random_small_case(
        rng: &mut ChaCha8Rng,
    ) -> (crate::instance::ProblemInstance, ClassicalGenotype) {
        let v = rng.gen_range(1..=4);
        let t = rng.gen_range(1..=2);
        let s = rng.gen_range(1..=5);
        let demands: Vec<u64> = (0..v).map(|_| rng.gen_range(5..=120)).collect();
        let tol = rng.gen_range(0.0..=0.25);
        let inst = crate::instance::ProblemInstance::with_uniform_tolerance(
            "small", t, s, demands, tol,
        )
        .unwrap();
        let kind = ModelKind::new(Model::Classical, false);
        let g = crate::encoding::random_genotype(&inst, kind, rng);
        (inst, g.as_classical().unwrap().clone())
    }

    #[test]
    fn solver_matches_oracle_on_random_small_designs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let (inst, g) = random_small_case(&mut rng);
            let solved = optimize_pressings(&inst, &g).unwrap();
            let caps: Vec<(u64, u64)> = (0..g.templates())
                .map(|j| {
                    let cap = (0..inst.v)
                        .filter(|&i| g.count(i, j) > 0)
                        .map(|i| {
                            let (_, hi) = inst.tolerance_band(i).unwrap();
                            hi.div_ceil(g.count(i, j) as u64)
                        })
                        .max()
                        .unwrap_or(0);
                    (0, cap)
                })
                .collect();
            let oracle = brute_force_pressings(&inst, &g, &caps).unwrap();
            assert_eq!(
                solved.fitness(),
                oracle.fitness(),
                "instance {:?} genotype {:?}",
                inst.demands,
                g
            );
        }
    }

    #[test]
    fn waste_recomputes_from_production() {
        let inst = builtin_instance("catfood").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let kind = ModelKind::new(Model::Classical, false);
        for _ in 0..50 {
            let g = crate::encoding::random_genotype(&inst, kind, &mut rng);
            let g = g.as_classical().unwrap();
            let r: Vec<u64> = (0..2).map(|_| rng.gen_range(0..400_000)).collect();
            let plan = evaluate_with_pressings(&inst, g, &r).unwrap();
            let direct: u64 = plan
                .production
                .iter()
                .zip(&inst.demands)
                .map(|(&p, &q)| p.abs_diff(q))
                .sum();
            assert_eq!(plan.waste, direct);
            for i in 0..inst.v {
                assert_eq!(
                    plan.production[i] + plan.under[i] - plan.over[i],
                    inst.demands[i]
                );
                assert!(plan.under[i] == 0 || plan.over[i] == 0);
            }
        }
    }

    #[test]
    fn fitness_is_invariant_under_symmetries() {
        let inst = builtin_instance("catfood").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let g = crate::encoding::random_genotype(
                &inst,
                ModelKind::new(Model::Classical, false),
                &mut rng,
            );
            let base = fitness(&inst, &g).unwrap();
            let canon = canonicalize(g.clone(), ModelKind::new(Model::Classical, true));
            assert_eq!(fitness(&inst, &canon).unwrap(), base);

            // Arbitrary column permutation.
            let c = g.as_classical().unwrap();
            let mut cols: Vec<Vec<u32>> = c.columns().map(|x| x.to_vec()).collect();
            cols.shuffle(&mut rng);
            let permuted = ClassicalGenotype::from_columns(inst.v, inst.s, &cols).unwrap();
            assert_eq!(fitness(&inst, &Genotype::Classical(permuted)).unwrap(), base);
        }
    }

    #[test]
    fn structurally_infeasible_design_has_violation() {
        let inst = builtin_instance("catfood").unwrap();
        let g = ClassicalGenotype::from_columns(
            7,
            9,
            &[vec![9, 0, 0, 0, 0, 0, 0], vec![9, 0, 0, 0, 0, 0, 0]],
        )
        .unwrap();
        let fit = fitness(&inst, &Genotype::Classical(g)).unwrap();
        assert!(fit.violation > 0);
    }

    #[test]
    fn scaled_instances_never_waste_more_than_scale() {
        // Scaling demands and bands by k lets any base plan scale along, so
        // the optimum of the scaled instance is at most k times the base
        // optimum (strictly less is possible when rounding tension vanishes).
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..40 {
            let (inst, g) = random_small_case(&mut rng);
            let k = rng.gen_range(2..=5) as u64;
            let scaled = crate::instance::ProblemInstance::with_uniform_tolerance(
                "scaled",
                inst.t,
                inst.s,
                inst.demands.iter().map(|&q| q * k).collect(),
                inst.lower_tol[0],
            )
            .unwrap();
            let base = optimize_pressings(&inst, &g).unwrap();
            let big = optimize_pressings(&scaled, &g).unwrap();
            if base.violation == 0 {
                assert_eq!(big.violation, 0);
                assert!(big.waste <= k * base.waste);
            }
        }
    }

    #[test]
    fn exact_scaling_when_base_optimum_is_tension_free() {
        let inst =
            crate::instance::ProblemInstance::with_uniform_tolerance("b", 1, 1, vec![7], 0.0)
                .unwrap();
        let g = ClassicalGenotype::from_columns(1, 1, &[vec![1]]).unwrap();
        let base = optimize_pressings(&inst, &g).unwrap();
        assert_eq!((base.waste, base.pressings[0]), (0, 7));
        let scaled =
            crate::instance::ProblemInstance::with_uniform_tolerance("b3", 1, 1, vec![21], 0.0)
                .unwrap();
        let big = optimize_pressings(&scaled, &g).unwrap();
        assert_eq!((big.waste, big.pressings[0]), (0, 21));
    }

    #[test]
    fn evaluator_counts_and_stops() {
        let inst = builtin_instance("catfood").unwrap();
        let mut ev = Evaluator::new(&inst, 3);
        let g = Genotype::Classical(catfood_best());
        assert!(ev.try_fitness(&g).is_some());
        assert!(ev.try_fitness(&g).is_some());
        assert_eq!(ev.used(), 2);
        assert!(ev.try_fitness(&g).is_some());
        assert!(ev.try_fitness(&g).is_none());
        assert_eq!(ev.used(), 3);
        assert!(ev.exhausted());
        ev.extend_limit(1);
        assert!(ev.try_fitness(&g).is_some());
        assert_eq!(ev.used(), 4);
    }
}
