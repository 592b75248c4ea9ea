//! Genotype representations, conversions and symmetry-breaking canonical forms.
//!
//! Two search encodings coexist. The classical model (`P`) stores, for every
//! variation and template, how many slots of that template carry the
//! variation: a `v x t` count matrix whose columns each sum to `s`. The
//! alternative model (`D`) stores, for every slot of every template, which
//! variation sits there: an `s x t` matrix of 1-based variation indices.
//!
//! Both encodings are highly symmetrical: permuting whole templates (and, in
//! the alternative model, permuting slots within a template) yields an
//! equivalent design. Symmetry breaking collapses these orbits to a canonical
//! representative: templates in lexicographic order, and alternative columns
//! additionally sorted ascending.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

/// Which of the two search encodings a genotype uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Per-variation slot counts (`P`).
    Classical,
    /// Per-slot variation assignments (`D`).
    Alternative,
}

/// Encoding plus the symmetry-breaking flag (the `*` marker in the notation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelKind {
    pub model: Model,
    pub symmetry_breaking: bool,
}

impl ModelKind {
    pub const fn new(model: Model, symmetry_breaking: bool) -> Self {
        ModelKind { model, symmetry_breaking }
    }
}

/// Classical genotype: column-major `v x t` matrix, entry `(i, j)` is the
/// number of slots of template `j` carrying variation `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassicalGenotype {
    v: usize,
    t: usize,
    counts: Vec<u32>,
}

/// Alternative genotype: column-major `s x t` matrix, entry `(h, j)` is the
/// 1-based variation placed in slot `h` of template `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlternativeGenotype {
    s: usize,
    t: usize,
    slots: Vec<u32>,
}

impl ClassicalGenotype {
    /// Builds from template columns, checking that every column has `v`
    /// non-negative entries summing exactly to `s`.
    pub fn from_columns(v: usize, s: usize, columns: &[Vec<u32>]) -> Result<Self> {
        let t = columns.len();
        if t == 0 {
            return Err(Error::InvalidGenotype("no template columns".into()));
        }
        let mut counts = Vec::with_capacity(v * t);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != v {
                return Err(Error::InvalidGenotype(format!(
                    "template {j} has {} entries, expected {v}",
                    col.len()
                )));
            }
            let sum: u64 = col.iter().map(|&c| c as u64).sum();
            if sum != s as u64 {
                return Err(Error::InvalidGenotype(format!(
                    "template {j} assigns {sum} slots, expected {s}"
                )));
            }
            counts.extend_from_slice(col);
        }
        Ok(ClassicalGenotype { v, t, counts })
    }

    pub fn variations(&self) -> usize {
        self.v
    }

    pub fn templates(&self) -> usize {
        self.t
    }

    /// Slot count of variation `i` in template `j`.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[j * self.v + i]
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.counts[j * self.v..(j + 1) * self.v]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [u32] {
        &mut self.counts[j * self.v..(j + 1) * self.v]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks_exact(self.v)
    }

    /// Slots per template (the shared column sum).
    pub fn slots(&self) -> usize {
        self.column(0).iter().map(|&c| c as usize).sum()
    }

    /// Restores the column-sum invariant check after in-place edits.
    pub fn check_column_sums(&self, s: usize) -> Result<()> {
        for j in 0..self.t {
            let sum: u64 = self.column(j).iter().map(|&c| c as u64).sum();
            if sum != s as u64 {
                return Err(Error::InvalidGenotype(format!(
                    "template {j} assigns {sum} slots, expected {s}"
                )));
            }
        }
        Ok(())
    }

    fn sort_columns(&mut self) {
        let v = self.v;
        let mut cols: Vec<Vec<u32>> = self.counts.chunks_exact(v).map(|c| c.to_vec()).collect();
        cols.sort();
        for (j, col) in cols.into_iter().enumerate() {
            self.counts[j * v..(j + 1) * v].copy_from_slice(&col);
        }
    }
}

impl AlternativeGenotype {
    /// Builds from template columns of 1-based variation indices.
    pub fn from_columns(v: usize, s: usize, columns: &[Vec<u32>]) -> Result<Self> {
        let t = columns.len();
        if t == 0 {
            return Err(Error::InvalidGenotype("no template columns".into()));
        }
        let mut slots = Vec::with_capacity(s * t);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != s {
                return Err(Error::InvalidGenotype(format!(
                    "template {j} has {} slots, expected {s}",
                    col.len()
                )));
            }
            if let Some(&bad) = col.iter().find(|&&x| x < 1 || x as usize > v) {
                return Err(Error::InvalidGenotype(format!(
                    "template {j} assigns variation {bad}, valid range is 1..={v}"
                )));
            }
            slots.extend_from_slice(col);
        }
        Ok(AlternativeGenotype { s, t, slots })
    }

    pub fn slots_per_template(&self) -> usize {
        self.s
    }

    pub fn templates(&self) -> usize {
        self.t
    }

    /// Variation (1-based) in slot `h` of template `j`.
    pub fn slot(&self, h: usize, j: usize) -> u32 {
        self.slots[j * self.s + h]
    }

    pub fn set_slot(&mut self, h: usize, j: usize, value: u32) {
        self.slots[j * self.s + h] = value;
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.slots[j * self.s..(j + 1) * self.s]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[u32]> {
        self.slots.chunks_exact(self.s)
    }

    /// Largest variation index referenced by any slot.
    pub fn max_variation(&self) -> u32 {
        self.slots.iter().copied().max().unwrap_or(1)
    }

    fn sort_within_columns(&mut self) {
        for j in 0..self.t {
            self.slots[j * self.s..(j + 1) * self.s].sort_unstable();
        }
    }

    fn sort_columns(&mut self) {
        let s = self.s;
        let mut cols: Vec<Vec<u32>> = self.slots.chunks_exact(s).map(|c| c.to_vec()).collect();
        cols.sort();
        for (j, col) in cols.into_iter().enumerate() {
            self.slots[j * s..(j + 1) * s].copy_from_slice(&col);
        }
    }
}

/// A genotype in either encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Genotype {
    Classical(ClassicalGenotype),
    Alternative(AlternativeGenotype),
}

impl Genotype {
    pub fn model(&self) -> Model {
        match self {
            Genotype::Classical(_) => Model::Classical,
            Genotype::Alternative(_) => Model::Alternative,
        }
    }

    pub fn templates(&self) -> usize {
        match self {
            Genotype::Classical(g) => g.templates(),
            Genotype::Alternative(g) => g.templates(),
        }
    }

    /// Number of gene positions: `v * t` for classical, `s * t` for
    /// alternative genotypes.
    pub fn len(&self) -> usize {
        match self {
            Genotype::Classical(g) => g.v * g.t,
            Genotype::Alternative(g) => g.s * g.t,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_classical(&self) -> Option<&ClassicalGenotype> {
        match self {
            Genotype::Classical(g) => Some(g),
            Genotype::Alternative(_) => None,
        }
    }

    pub fn as_alternative(&self) -> Option<&AlternativeGenotype> {
        match self {
            Genotype::Alternative(g) => Some(g),
            Genotype::Classical(_) => None,
        }
    }

    /// Checks dimensions and value ranges against an instance.
    pub fn validate(&self, inst: &ProblemInstance) -> Result<()> {
        match self {
            Genotype::Classical(g) => {
                if g.v != inst.v || g.t != inst.t {
                    return Err(Error::InvalidGenotype(format!(
                        "classical genotype is {}x{}, instance needs {}x{}",
                        g.v, g.t, inst.v, inst.t
                    )));
                }
                g.check_column_sums(inst.s)
            }
            Genotype::Alternative(g) => {
                if g.s != inst.s || g.t != inst.t {
                    return Err(Error::InvalidGenotype(format!(
                        "alternative genotype is {}x{}, instance needs {}x{}",
                        g.s, g.t, inst.s, inst.t
                    )));
                }
                if g.max_variation() as usize > inst.v {
                    return Err(Error::InvalidGenotype(format!(
                        "slot references variation {}, instance has {}",
                        g.max_variation(),
                        inst.v
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Expands a classical genotype into the slot-based encoding. Each template
/// column lists variation `i` exactly `count(i, j)` times, ascending, so the
/// image already satisfies the within-column ordering constraint.
pub fn classical_to_alternative(g: &ClassicalGenotype) -> AlternativeGenotype {
    let s = g.slots();
    let mut slots = Vec::with_capacity(s * g.t);
    for col in g.columns() {
        for (i, &c) in col.iter().enumerate() {
            for _ in 0..c {
                slots.push(i as u32 + 1);
            }
        }
    }
    AlternativeGenotype { s, t: g.t, slots }
}

/// Collapses a slot-based genotype into per-variation occurrence counts.
pub fn alternative_to_classical(g: &AlternativeGenotype, v: usize) -> Result<ClassicalGenotype> {
    let mut counts = vec![0u32; v * g.t];
    for (j, col) in g.columns().enumerate() {
        for &x in col {
            if x < 1 || x as usize > v {
                return Err(Error::InvalidGenotype(format!(
                    "slot value {x} outside 1..={v}"
                )));
            }
            counts[j * v + (x as usize - 1)] += 1;
        }
    }
    Ok(ClassicalGenotype { v, t: g.t, counts })
}

/// Standard lexicographic comparison: true iff `a` precedes or equals `b`.
pub fn lex_leq(a: &[u32], b: &[u32]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Index { index: a.len(), len: b.len() });
    }
    Ok(a <= b)
}

/// Canonical form under the kind's symmetry-breaking constraints.
///
/// Classical genotypes get their template columns permuted into lexicographic
/// order. Alternative genotypes first sort each column ascending, then order
/// the columns the same way. Without symmetry breaking the genotype is
/// returned unchanged. Idempotent.
pub fn canonicalize(g: Genotype, kind: ModelKind) -> Genotype {
    if !kind.symmetry_breaking {
        return g;
    }
    match g {
        Genotype::Classical(mut c) => {
            c.sort_columns();
            Genotype::Classical(c)
        }
        Genotype::Alternative(mut a) => {
            a.sort_within_columns();
            a.sort_columns();
            Genotype::Alternative(a)
        }
    }
}

/// True iff `canonicalize(g, kind)` would return `g` unchanged.
pub fn is_canonical(g: &Genotype, kind: ModelKind) -> bool {
    if !kind.symmetry_breaking {
        return true;
    }
    match g {
        Genotype::Classical(c) => c.columns().zip(c.columns().skip(1)).all(|(a, b)| a <= b),
        Genotype::Alternative(a) => {
            a.columns().all(|col| col.windows(2).all(|w| w[0] <= w[1]))
                && a.columns().zip(a.columns().skip(1)).all(|(x, y)| x <= y)
        }
    }
}

/// Draws a uniformly random valid genotype for the model: uniform over
/// column compositions (classical) or over slot assignments (alternative),
/// canonicalized when symmetry breaking is on.
pub fn random_genotype(
    inst: &ProblemInstance,
    kind: ModelKind,
    rng: &mut impl Rng,
) -> Genotype {
    let g = match kind.model {
        Model::Classical => {
            let mut counts = Vec::with_capacity(inst.v * inst.t);
            for _ in 0..inst.t {
                counts.extend(random_composition(inst.s, inst.v, rng));
            }
            Genotype::Classical(ClassicalGenotype { v: inst.v, t: inst.t, counts })
        }
        Model::Alternative => {
            let slots =
                (0..inst.s * inst.t).map(|_| rng.gen_range(1..=inst.v as u32)).collect();
            Genotype::Alternative(AlternativeGenotype { s: inst.s, t: inst.t, slots })
        }
    };
    canonicalize(g, kind)
}

/// Uniformly random composition of `s` into `v` non-negative parts, via the
/// stars-and-bars bijection.
fn random_composition(s: usize, v: usize, rng: &mut impl Rng) -> Vec<u32> {
    if v == 1 {
        return vec![s as u32];
    }
    let mut bars: Vec<usize> = sample(rng, s + v - 1, v - 1).into_iter().collect();
    bars.sort_unstable();
    let mut parts = Vec::with_capacity(v);
    let mut prev = 0usize;
    for (k, &p) in bars.iter().enumerate() {
        let gap = if k == 0 { p } else { p - prev - 1 };
        parts.push(gap as u32);
        prev = p;
    }
    parts.push((s + v - 2 - prev) as u32);
    parts
}

/// Number of matrix positions at which two same-kind genotypes differ.
pub fn hamming_distance(a: &Genotype, b: &Genotype) -> Result<u64> {
    let (xs, ys) = match (a, b) {
        (Genotype::Classical(x), Genotype::Classical(y)) if x.v == y.v && x.t == y.t => {
            (&x.counts, &y.counts)
        }
        (Genotype::Alternative(x), Genotype::Alternative(y)) if x.s == y.s && x.t == y.t => {
            (&x.slots, &y.slots)
        }
        _ => return Err(Error::Index { index: a.len(), len: b.len() }),
    };
    Ok(xs.iter().zip(ys).filter(|(x, y)| x != y).count() as u64)
}

/// Checks that a genotype's representation matches the kind's model.
pub fn ensure_model_matches(g: &Genotype, kind: ModelKind) -> Result<()> {
    if g.model() != kind.model {
        return Err(Error::InvalidGenotype(format!(
            "{:?} genotype used with a {:?}-model search",
            g.model(),
            kind.model
        )));
    }
    Ok(())
}

/// Re-encodes a genotype for a receiving kind (used by cross-encoding
/// migration): classical genotypes are expanded slot-wise, alternative ones
/// collapsed to counts, and the result is canonicalized per the target kind.
pub fn convert_to_kind(g: &Genotype, kind: ModelKind, v: usize) -> Result<Genotype> {
    let converted = match (g, kind.model) {
        (Genotype::Classical(c), Model::Classical) => Genotype::Classical(c.clone()),
        (Genotype::Alternative(a), Model::Alternative) => Genotype::Alternative(a.clone()),
        (Genotype::Classical(c), Model::Alternative) => {
            Genotype::Alternative(classical_to_alternative(c))
        }
        (Genotype::Alternative(a), Model::Classical) => {
            Genotype::Classical(alternative_to_classical(a, v)?)
        }
    };
    Ok(canonicalize(converted, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::builtin_instance;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn fig3a() -> ClassicalGenotype {
        ClassicalGenotype::from_columns(
            7,
            9,
            &[vec![1, 1, 1, 2, 2, 2, 0], vec![0, 0, 0, 0, 0, 2, 7]],
        )
        .unwrap()
    }

    pub(crate) fn fig3b() -> ClassicalGenotype {
        ClassicalGenotype::from_columns(
            7,
            9,
            &[vec![0, 0, 0, 0, 0, 2, 7], vec![1, 1, 1, 2, 2, 2, 0]],
        )
        .unwrap()
    }

    const SB_CLASSICAL: ModelKind = ModelKind::new(Model::Classical, true);
    const SB_ALTERNATIVE: ModelKind = ModelKind::new(Model::Alternative, true);

    #[test]
    fn classical_to_alternative_lists_ascending() {
        let g = fig3a();
        let alt = classical_to_alternative(&g);
        assert_eq!(alt.column(0), &[1, 2, 3, 4, 4, 5, 5, 6, 6]);
        assert_eq!(alt.column(1), &[6, 6, 7, 7, 7, 7, 7, 7, 7]);

        let single = ClassicalGenotype::from_columns(1, 3, &[vec![3]]).unwrap();
        assert_eq!(classical_to_alternative(&single).column(0), &[1, 1, 1]);
    }

    #[test]
    fn alternative_to_classical_counts_occurrences() {
        let alt = AlternativeGenotype::from_columns(7, 9, &[vec![1, 2, 3, 4, 4, 5, 5, 6, 6]])
            .unwrap();
        let c = alternative_to_classical(&alt, 7).unwrap();
        assert_eq!(c.column(0), &[1, 1, 1, 2, 2, 2, 0]);

        let alt = AlternativeGenotype::from_columns(7, 9, &[vec![7, 7, 7, 7, 7, 7, 7, 6, 6]])
            .unwrap();
        let c = alternative_to_classical(&alt, 7).unwrap();
        assert_eq!(c.column(0), &[0, 0, 0, 0, 0, 2, 7]);
    }

    #[test]
    fn conversion_round_trips() {
        let g = fig3a();
        let back = alternative_to_classical(&classical_to_alternative(&g), 7).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn lex_leq_examples() {
        let a = [1, 1, 1, 2, 2, 2, 0];
        let b = [0, 0, 0, 0, 0, 2, 7];
        assert!(!lex_leq(&a, &b).unwrap());
        assert!(lex_leq(&b, &a).unwrap());
        assert!(lex_leq(&a, &a).unwrap());
        assert!(matches!(lex_leq(&a[..2], &b), Err(Error::Index { .. })));
    }

    #[test]
    fn canonicalize_reorders_fig3() {
        let canon = canonicalize(Genotype::Classical(fig3a()), SB_CLASSICAL);
        assert_eq!(canon, Genotype::Classical(fig3b()));
        // Idempotent.
        assert_eq!(canonicalize(canon.clone(), SB_CLASSICAL), canon);
    }

    #[test]
    fn canonicalize_sorts_alternative_columns() {
        let alt = AlternativeGenotype::from_columns(4, 3, &[vec![4, 2, 1]]).unwrap();
        let canon = canonicalize(Genotype::Alternative(alt), SB_ALTERNATIVE);
        assert_eq!(canon.as_alternative().unwrap().column(0), &[1, 2, 4]);
    }

    #[test]
    fn is_canonical_examples() {
        assert!(is_canonical(&Genotype::Classical(fig3b()), SB_CLASSICAL));
        assert!(!is_canonical(&Genotype::Classical(fig3a()), SB_CLASSICAL));
        let no_sb = ModelKind::new(Model::Classical, false);
        assert!(is_canonical(&Genotype::Classical(fig3a()), no_sb));
    }

    #[test]
    fn random_genotypes_are_deterministic_and_valid() {
        let inst = builtin_instance("catfood").unwrap();
        for kind in [
            ModelKind::new(Model::Classical, false),
            ModelKind::new(Model::Classical, true),
            ModelKind::new(Model::Alternative, false),
            ModelKind::new(Model::Alternative, true),
        ] {
            let mut r1 = ChaCha8Rng::seed_from_u64(7);
            let mut r2 = ChaCha8Rng::seed_from_u64(7);
            let a = random_genotype(&inst, kind, &mut r1);
            let b = random_genotype(&inst, kind, &mut r2);
            assert_eq!(a, b);
            a.validate(&inst).unwrap();
            if kind.symmetry_breaking {
                assert!(is_canonical(&a, kind));
            }
        }
    }

    #[test]
    fn alternative_samples_stay_in_range() {
        let inst = builtin_instance("catfood").unwrap();
        let kind = ModelKind::new(Model::Alternative, false);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = random_genotype(&inst, kind, &mut rng);
            let alt = g.as_alternative().unwrap();
            assert!(alt.columns().flatten().all(|&x| (1..=7).contains(&x)));
        }
    }

    #[test]
    fn hamming_examples() {
        let a = Genotype::Classical(fig3a());
        let b = Genotype::Classical(fig3b());
        assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
        assert_eq!(hamming_distance(&a, &b).unwrap(), 12);

        let x = Genotype::Classical(
            ClassicalGenotype::from_columns(2, 2, &[vec![1, 1]]).unwrap(),
        );
        let y = Genotype::Classical(
            ClassicalGenotype::from_columns(2, 2, &[vec![0, 2]]).unwrap(),
        );
        assert_eq!(hamming_distance(&x, &y).unwrap(), 2);
        let alt = Genotype::Alternative(
            AlternativeGenotype::from_columns(2, 2, &[vec![1, 1]]).unwrap(),
        );
        assert!(matches!(hamming_distance(&x, &alt), Err(Error::Index { .. })));
    }

    #[test]
    fn convert_to_kind_canonicalizes() {
        let g = Genotype::Classical(fig3a());
        let out = convert_to_kind(&g, SB_ALTERNATIVE, 7).unwrap();
        assert!(is_canonical(&out, SB_ALTERNATIVE));
        let back = convert_to_kind(&out, SB_CLASSICAL, 7).unwrap();
        assert_eq!(back, Genotype::Classical(fig3b()));
    }

    /// Builds an arbitrary valid classical genotype without going through the
    /// library's sampling code.
    fn classical_strategy() -> impl Strategy<Value = (usize, ClassicalGenotype)> {
        (1usize..=5, 1usize..=3, 1usize..=6).prop_flat_map(|(v, t, s)| {
            proptest::collection::vec(proptest::collection::vec(0..v, s), t).prop_map(
                move |hits| {
                    let mut counts = vec![0u32; v * t];
                    for (j, col_hits) in hits.iter().enumerate() {
                        for &i in col_hits {
                            counts[j * v + i] += 1;
                        }
                    }
                    (s, ClassicalGenotype { v, t, counts })
                },
            )
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_identity((_s, g) in classical_strategy()) {
            let alt = classical_to_alternative(&g);
            let back = alternative_to_classical(&alt, g.v).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn counting_ignores_slot_order((_s, g) in classical_strategy(), seed in 0u64..1000) {
            // Occurrence counting collapses within-column permutations.
            let mut alt = classical_to_alternative(&g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for j in 0..alt.t {
                let s = alt.s;
                for h in (1..s).rev() {
                    let k = rand::Rng::gen_range(&mut rng, 0..=h);
                    alt.slots.swap(j * s + h, j * s + k);
                }
            }
            let back = alternative_to_classical(&alt, g.v).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn canonicalize_idempotent_and_preserves_columns((_s, g) in classical_strategy()) {
            let kind = ModelKind::new(Model::Classical, true);
            let once = canonicalize(Genotype::Classical(g.clone()), kind);
            let twice = canonicalize(once.clone(), kind);
            prop_assert_eq!(&once, &twice);
            // Same multiset of columns.
            let mut before: Vec<Vec<u32>> = g.columns().map(|c| c.to_vec()).collect();
            let mut after: Vec<Vec<u32>> =
                once.as_classical().unwrap().columns().map(|c| c.to_vec()).collect();
            before.sort();
            after.sort();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn hamming_is_a_metric(
            (_s, a) in classical_strategy(),
            swaps in proptest::collection::vec((0usize..64, 0usize..64), 0..4)
        ) {
            // Derive b and c from a by perturbation so shapes match.
            let mut b = a.clone();
            let mut c = a.clone();
            for (x, y) in swaps {
                let n = b.counts.len();
                b.counts.swap(x % n, y % n);
                c.counts.swap((x / 2) % n, (y / 3 + 1) % n);
            }
            let (ga, gb, gc) =
                (Genotype::Classical(a), Genotype::Classical(b), Genotype::Classical(c));
            let dab = hamming_distance(&ga, &gb).unwrap();
            let dba = hamming_distance(&gb, &ga).unwrap();
            let dac = hamming_distance(&ga, &gc).unwrap();
            let dcb = hamming_distance(&gc, &gb).unwrap();
            prop_assert_eq!(dab, dba);
            prop_assert_eq!(dab == 0, ga == gb);
            prop_assert!(dab <= dac + dcb);
        }
    }
}
