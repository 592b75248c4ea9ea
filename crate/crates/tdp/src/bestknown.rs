//! Best solutions reported in the literature for the three built-in
//! instances, with their pressing counts. Useful as regression fixtures and
//! for the `eval` examples.

use crate::encoding::ClassicalGenotype;

/// A published reference solution: design plus pressing counts.
pub struct ReferenceSolution {
    pub instance: &'static str,
    pub genotype: ClassicalGenotype,
    pub pressings: Vec<u64>,
    /// Waste reported for this solution.
    pub waste: u64,
}

fn build(instance: &'static str, v: usize, s: usize, cols: &[Vec<u32>], pressings: Vec<u64>, waste: u64) -> ReferenceSolution {
    ReferenceSolution {
        instance,
        genotype: ClassicalGenotype::from_columns(v, s, cols).expect("reference design valid"),
        pressings,
        waste,
    }
}

/// Best known catfood solution (waste 29287).
pub fn catfood_best() -> ReferenceSolution {
    build(
        "catfood",
        7,
        9,
        &[vec![1, 1, 1, 2, 2, 2, 0], vec![0, 0, 0, 0, 0, 2, 7]],
        vec![250_000, 157_143],
        29_287,
    )
}

/// Best herbs solution found by a single memetic run (waste 104548).
pub fn herbs_memetic() -> ReferenceSolution {
    build(
        "herbs",
        30,
        42,
        &[
            vec![
                1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2,
                3, 3, 4, 4,
            ],
            vec![
                0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 6, 1, 1, 1, 2, 2, 2, 2, 1, 6, 6,
                2, 2, 1, 1,
            ],
        ],
        vec![65_911, 16_363],
        104_548,
    )
}

/// Best herbs solution found by the cooperative teams (waste 104000).
pub fn herbs_cooperative() -> ReferenceSolution {
    build(
        "herbs",
        30,
        42,
        &[
            vec![
                1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 2, 3, 3,
                3, 2, 4, 4,
            ],
            vec![
                0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 5, 1, 1, 1, 1, 1, 1, 1, 6, 2, 2, 2, 2, 1, 2, 2,
                2, 6, 1, 1,
            ],
        ],
        vec![66_000, 16_000],
        104_000,
    )
}

/// Best magazine solution found by a single memetic run (waste 277500).
pub fn magazine_memetic() -> ReferenceSolution {
    build(
        "magazine",
        50,
        40,
        &[
            vec![
                1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1,
                1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 0, 0, 0, 0, 1, 0, 0, 0,
            ],
            vec![
                0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 0,
                0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 3, 3, 3, 3, 2, 2, 2, 12,
            ],
            vec![
                0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
                1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 0,
            ],
        ],
        vec![54_000, 33_750, 146_000],
        277_500,
    )
}

/// Best magazine solution found by the cooperative teams (waste 246000).
pub fn magazine_cooperative() -> ReferenceSolution {
    build(
        "magazine",
        50,
        40,
        &[
            vec![
                0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
                1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 0,
            ],
            vec![
                1, 1, 1, 0, 1, 1, 2, 2, 2, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1,
                1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 1, 0, 0, 0, 1, 0, 0, 0,
            ],
            vec![
                0, 0, 0, 2, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 0,
                0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 3, 3, 3, 2, 2, 2, 12,
            ],
        ],
        vec![150_000, 50_000, 33_000],
        246_000,
    )
}

/// All reference solutions, in presentation order.
pub fn all() -> Vec<ReferenceSolution> {
    vec![
        catfood_best(),
        herbs_memetic(),
        herbs_cooperative(),
        magazine_memetic(),
        magazine_cooperative(),
    ]
}
