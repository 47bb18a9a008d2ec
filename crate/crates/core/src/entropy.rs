//! Shannon entropy, block entropy and mutual information over symbol
//! arrays; the statistical baselines the decomposition estimators are
//! measured against. All probabilities are empirical (the natural
//! distribution of the object itself), all logarithms base 2.

use crate::block::Block;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// An empirical probability distribution over blocks (or single symbols as
/// length-1 blocks).
#[derive(Clone, Debug)]
pub struct SymbolDistribution {
    probs: BTreeMap<Block, f64>,
}

impl SymbolDistribution {
    pub fn from_probabilities(pairs: impl IntoIterator<Item = (Block, f64)>) -> Result<Self> {
        let probs: BTreeMap<Block, f64> = pairs.into_iter().collect();
        if probs.is_empty() {
            return Err(Error::Range("distribution has empty support".into()));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Range(format!("probabilities sum to {total}, not 1")));
        }
        if probs.values().any(|&p| p <= 0.0) {
            return Err(Error::Range("probabilities must be positive".into()));
        }
        Ok(SymbolDistribution { probs })
    }

    pub fn from_counts(pairs: impl IntoIterator<Item = (Block, u64)>) -> Result<Self> {
        let counts: BTreeMap<Block, u64> = pairs.into_iter().filter(|(_, c)| *c > 0).collect();
        if counts.is_empty() {
            return Err(Error::Range("distribution has empty support".into()));
        }
        let total: u64 = counts.values().sum();
        Ok(SymbolDistribution {
            probs: counts
                .into_iter()
                .map(|(b, c)| (b, c as f64 / total as f64))
                .collect(),
        })
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &BTreeMap<Block, f64> {
        &self.probs
    }
}

/// `H = -sum p log2 p`. Zero-probability summands never occur because the
/// support is restricted to observed outcomes.
pub fn entropy(dist: &SymbolDistribution) -> f64 {
    let h = -dist.probs.values().map(|&p| p * p.log2()).sum::<f64>();
    if h == 0.0 {
        0.0
    } else {
        h
    }
}

fn entropy_of_counts<K: Ord>(counts: &BTreeMap<K, u64>) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let h = -counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>();
    if h == 0.0 {
        0.0
    } else {
        h
    }
}

/// Entropy of the symbol (cell) frequencies of a block.
pub fn shannon_entropy(block: &Block) -> f64 {
    let mut counts: BTreeMap<u8, u64> = BTreeMap::new();
    for &s in block.data() {
        *counts.entry(s).or_insert(0) += 1;
    }
    entropy_of_counts(&counts)
}

/// Decomposes a string into its length-`l` blocks: adjacent blocks with a
/// dropped remainder when non-overlapping, all `|s|-l+1` windows otherwise.
fn block_counts(s: &Block, l: usize, overlapping: bool) -> Result<BTreeMap<Block, u64>> {
    if !s.is_string() {
        return Err(Error::ShapeMismatch(
            "block entropy is defined on strings".into(),
        ));
    }
    let n = s.cells();
    if l < 1 || l > n {
        return Err(Error::Range(format!(
            "block size {l} out of range for a string of length {n}"
        )));
    }
    let mut counts = BTreeMap::new();
    let step = if overlapping { 1 } else { l };
    let mut start = 0;
    while start + l <= n {
        *counts.entry(s.sub_block(&[start], &[l])).or_insert(0) += 1;
        start += step;
    }
    Ok(counts)
}

/// Shannon entropy of the empirical distribution of length-`l` blocks.
pub fn block_entropy(s: &Block, l: usize, overlapping: bool) -> Result<f64> {
    Ok(entropy_of_counts(&block_counts(s, l, overlapping)?))
}

/// Denominator used by the normalized block-entropy variant.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockNormalization {
    /// Raw block entropy.
    None,
    /// Divide by `log2` of the number of distinct possible blocks of the
    /// size that are realizable in the string: `min(k^l, floor(n/l))`.
    DistinctBlocks,
    /// Divide by `log2` of the number of block positions, `floor(n/l)`.
    Positions,
}

/// Minimizes (normalized) block entropy over block sizes `1..=n/2`,
/// breaking ties toward the smallest size. Returns `(l*, value)`.
pub fn best_block_entropy(s: &Block, norm: BlockNormalization) -> Result<(usize, f64)> {
    let n = s.cells();
    if !s.is_string() || n < 2 {
        return Err(Error::Range(
            "best block entropy needs a string of length at least 2".into(),
        ));
    }
    let k = s.min_alphabet().max(2) as f64;
    let mut best: Option<(usize, f64)> = None;
    for l in 1..=n / 2 {
        let h = block_entropy(s, l, false)?;
        let positions = (n / l) as f64;
        let value = match norm {
            BlockNormalization::None => h,
            BlockNormalization::DistinctBlocks => {
                let distinct = k.powi(l as i32).min(positions);
                h / distinct.log2()
            }
            BlockNormalization::Positions => h / positions.log2(),
        };
        match best {
            Some((_, v)) if value >= v => {}
            _ => best = Some((l, value)),
        }
    }
    Ok(best.expect("at least one block size"))
}

fn joint_counts(a: &Block, b: &Block) -> Result<BTreeMap<(u8, u8), u64>> {
    if a.dims() != b.dims() {
        return Err(Error::ShapeMismatch(format!(
            "mutual information needs equal shapes, got {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let mut joint = BTreeMap::new();
    for (&x, &y) in a.data().iter().zip(b.data()) {
        *joint.entry((x, y)).or_insert(0) += 1;
    }
    Ok(joint)
}

/// `MI(a,b) = H(a) + H(b) - H(a,b)` over aligned cell pairs; symmetric and
/// non-negative up to rounding.
pub fn mutual_information(a: &Block, b: &Block) -> Result<f64> {
    let joint = joint_counts(a, b)?;
    Ok(shannon_entropy(a) + shannon_entropy(b) - entropy_of_counts(&joint))
}

/// Conditional entropy `H(a | b) = H(a,b) - H(b)`.
pub fn conditional_entropy(a: &Block, b: &Block) -> Result<f64> {
    let joint = joint_counts(a, b)?;
    Ok(entropy_of_counts(&joint) - shannon_entropy(b))
}

/// Mutual information scaled into `[0,1]` by `max(H(a), H(b))`; two
/// constant blocks (0/0) are taken as fully informative, 1.
pub fn normalized_mutual_information(a: &Block, b: &Block) -> Result<f64> {
    let denom = shannon_entropy(a).max(shannon_entropy(b));
    if denom == 0.0 {
        return Ok(1.0);
    }
    let mi = mutual_information(a, b)?;
    Ok((mi / denom).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(digits: &str) -> Block {
        Block::from_digits(digits).unwrap()
    }

    #[test]
    fn entropy_basics() {
        let fair = SymbolDistribution::from_probabilities([(s("0"), 0.5), (s("1"), 0.5)]).unwrap();
        assert_eq!(entropy(&fair), 1.0);

        let degenerate = SymbolDistribution::from_probabilities([(s("0"), 1.0)]).unwrap();
        assert_eq!(entropy(&degenerate), 0.0);

        let uniform4 = SymbolDistribution::from_counts([
            (s("00"), 1),
            (s("01"), 1),
            (s("10"), 1),
            (s("11"), 1),
        ])
        .unwrap();
        assert_eq!(entropy(&uniform4), 2.0);
    }

    #[test]
    fn invalid_distributions() {
        assert!(SymbolDistribution::from_probabilities([]).is_err());
        assert!(SymbolDistribution::from_probabilities([(s("0"), 0.4), (s("1"), 0.4)]).is_err());
    }

    #[test]
    fn block_entropy_examples() {
        let alt = s("010101010101");
        assert_eq!(block_entropy(&alt, 2, false).unwrap(), 0.0);
        assert_eq!(block_entropy(&alt, 1, false).unwrap(), 1.0);
        let per4 = s("001100110011");
        assert_eq!(block_entropy(&per4, 4, false).unwrap(), 0.0);
        assert!(block_entropy(&alt, 13, false).is_err());
        assert!(block_entropy(&alt, 0, false).is_err());
    }

    #[test]
    fn overlapping_blocks() {
        let alt = s("0101");
        // windows: 01, 10, 01 -> H = entropy of {2/3, 1/3}
        let h = block_entropy(&alt, 2, true).unwrap();
        let expect = -(2.0 / 3.0f64) * (2.0 / 3.0f64).log2() - (1.0 / 3.0) * (1.0 / 3.0f64).log2();
        assert!((h - expect).abs() < 1e-12);
    }

    #[test]
    fn best_block_finds_period() {
        let per3 = s("001001001001");
        let (l, h) = best_block_entropy(&per3, BlockNormalization::None).unwrap();
        assert_eq!(l, 3);
        assert_eq!(h, 0.0);

        let zeros = s("00000000");
        let (l, h) = best_block_entropy(&zeros, BlockNormalization::None).unwrap();
        assert_eq!(l, 1);
        assert_eq!(h, 0.0);
    }

    #[test]
    fn best_block_tie_breaks_small() {
        // Exhaustive check of the tie rule: recompute the sweep directly.
        let x = s("0110100110010110");
        let (l, v) = best_block_entropy(&x, BlockNormalization::None).unwrap();
        for cand in 1..l {
            assert!(block_entropy(&x, cand, false).unwrap() > v);
        }
    }

    #[test]
    fn best_block_not_above_h1() {
        for digits in ["0101010101", "0010011000", "1111011111", "0110100110"] {
            let x = s(digits);
            let (_, v) = best_block_entropy(&x, BlockNormalization::None).unwrap();
            assert!(v <= block_entropy(&x, 1, false).unwrap() + 1e-12);
        }
    }

    #[test]
    fn entropy_is_relabeling_invariant() {
        for digits in ["0101010101", "0010011000", "1110111101"] {
            let x = s(digits);
            let c = x.complement(2);
            assert_eq!(shannon_entropy(&x), shannon_entropy(&c));
        }
    }

    #[test]
    fn concatenation_has_zero_entropy_at_full_period() {
        let x = s("01101001");
        let double = Block::string([x.data(), x.data()].concat()).unwrap();
        assert_eq!(block_entropy(&double, x.cells(), false).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_basics() {
        let a = Block::matrix_from_rows(&["0110", "1001"]).unwrap();
        assert_eq!(mutual_information(&a, &a).unwrap(), shannon_entropy(&a));

        let constant = Block::matrix(2, 4, vec![0; 8]).unwrap();
        assert_eq!(mutual_information(&constant, &a).unwrap(), 0.0);

        let mismatched = Block::matrix(4, 2, vec![0; 8]).unwrap();
        assert!(mutual_information(&a, &mismatched).is_err());
    }

    #[test]
    fn mutual_information_symmetry_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let a = Block::matrix(4, 4, (0..16).map(|_| rng.gen_range(0..2)).collect()).unwrap();
            let b = Block::matrix(4, 4, (0..16).map(|_| rng.gen_range(0..2)).collect()).unwrap();
            let ab = mutual_information(&a, &b).unwrap();
            let ba = mutual_information(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!(ab > -1e-12);
        }
    }

    #[test]
    fn normalized_mi_extremes() {
        let a = Block::matrix_from_rows(&["0110", "1001"]).unwrap();
        assert_eq!(normalized_mutual_information(&a, &a).unwrap(), 1.0);
        let z = Block::matrix(2, 4, vec![0; 8]).unwrap();
        let o = Block::matrix(2, 4, vec![1; 8]).unwrap();
        assert_eq!(normalized_mutual_information(&z, &o).unwrap(), 1.0);
        assert_eq!(normalized_mutual_information(&z, &a).unwrap(), 0.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn block_entropy_bounds(data in proptest::collection::vec(0u8..2, 2..40), l in 1usize..8) {
                let s = Block::string(data).unwrap();
                prop_assume!(l <= s.cells());
                let h = block_entropy(&s, l, false).unwrap();
                let positions = (s.cells() / l) as f64;
                let ceiling = (2.0f64.powi(l as i32)).min(positions).log2();
                prop_assert!(h >= 0.0);
                prop_assert!(h <= ceiling + 1e-12);
            }

            #[test]
            fn entropy_invariant_under_complement(data in proptest::collection::vec(0u8..2, 1..40)) {
                let s = Block::string(data).unwrap();
                prop_assert_eq!(shannon_entropy(&s), shannon_entropy(&s.complement(2)));
            }

            #[test]
            fn best_block_never_exceeds_h1(data in proptest::collection::vec(0u8..2, 2..40)) {
                let s = Block::string(data).unwrap();
                let (_, best) = best_block_entropy(&s, BlockNormalization::None).unwrap();
                prop_assert!(best <= block_entropy(&s, 1, false).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn conditional_entropy_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = Block::matrix(3, 3, (0..9).map(|_| rng.gen_range(0..2)).collect()).unwrap();
            let b = Block::matrix(3, 3, (0..9).map(|_| rng.gen_range(0..2)).collect()).unwrap();
            let mi = mutual_information(&a, &b).unwrap();
            let via_conditional = shannon_entropy(&a) - conditional_entropy(&a, &b).unwrap();
            assert!((mi - via_conditional).abs() < 1e-12);
        }
    }
}
