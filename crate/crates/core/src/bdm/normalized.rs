//! Size-normalized BDM for square matrices: rescales a value into `[0,1]`
//! between the minimum attainable at that size (a constant matrix) and the
//! maximum (a mosaic of the highest-valued base blocks).

use super::{bdm, BdmConfig};
use crate::block::Block;
use crate::ctm::CtmTable;
use crate::error::{Error, Result};

/// The `d x d` table blocks ranked by descending value (ties broken by
/// block order, so the ranking is total and deterministic).
fn ranked_square_blocks(table: &CtmTable, d: usize) -> Result<Vec<(Block, f64)>> {
    let shape = [d, d];
    let mut blocks: Vec<(Block, f64)> = table
        .entries()
        .iter()
        .filter(|(b, _)| b.dims() == shape)
        .map(|(b, e)| (b.clone(), e.bits))
        .collect();
    if blocks.is_empty() {
        return Err(Error::ShapeExceedsBase {
            shape: format!("{d}x{d}"),
            base: table
                .base_shape()
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("x"),
        });
    }
    blocks.sort_by(|(ba, va), (bb, vb)| {
        vb.partial_cmp(va)
            .expect("table values are finite")
            .then_with(|| ba.cmp(bb))
    });
    Ok(blocks)
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if d == 0 || n < d {
        return Err(Error::Range(format!(
            "matrix size {n} must be at least the block size {d}"
        )));
    }
    Ok(())
}

/// Minimum BDM value for an `n x n` matrix decomposed into `d x d` blocks:
/// `floor(n/d) + min block value` (attained by a constant matrix).
pub fn min_bdm(n: usize, d: usize, table: &CtmTable) -> Result<f64> {
    check_size(n, d)?;
    let blocks = ranked_square_blocks(table, d)?;
    let min = blocks.last().expect("non-empty").1;
    Ok((n / d) as f64 + min)
}

/// Occupancy of each ranked block in the maximal mosaic: the `floor(n/d)^2`
/// tile slots are assigned to the highest-valued blocks, repetitions kept
/// within one of each other and biased toward higher values.
fn occupancy(n: usize, d: usize, ranked: usize) -> Vec<u64> {
    let slots = ((n / d) * (n / d)) as u64;
    let ranked = ranked as u64;
    if slots <= ranked {
        let mut f = vec![0u64; ranked as usize];
        for x in f.iter_mut().take(slots as usize) {
            *x = 1;
        }
        f
    } else {
        let q = slots / ranked;
        let extra = (slots % ranked) as usize;
        let mut f = vec![q; ranked as usize];
        for x in f.iter_mut().take(extra) {
            *x += 1;
        }
        f
    }
}

/// Maximum BDM value for an `n x n` matrix built from `d x d` base blocks.
pub fn max_bdm(n: usize, d: usize, table: &CtmTable) -> Result<f64> {
    check_size(n, d)?;
    let blocks = ranked_square_blocks(table, d)?;
    let f = occupancy(n, d, blocks.len());
    // Sum in canonical block order so the value is bit-identical to the
    // plain BDM of the mosaic built by `max_matrix`.
    let mut chosen: Vec<(&Block, f64, u64)> = blocks
        .iter()
        .zip(&f)
        .filter(|(_, &m)| m > 0)
        .map(|((b, v), &m)| (b, *v, m))
        .collect();
    chosen.sort_by_key(|(a, _, _)| *a);
    Ok(chosen.iter().map(|(_, v, m)| v + (*m as f64).log2()).sum())
}

/// Builds the maximal mosaic itself: an `n x n` matrix whose `d x d` tiles
/// realize the occupancy of [`max_bdm`] (cells beyond the tile grid are
/// zero and ignored by the non-overlapping decomposition).
pub fn max_matrix(n: usize, d: usize, table: &CtmTable) -> Result<Block> {
    check_size(n, d)?;
    let blocks = ranked_square_blocks(table, d)?;
    let f = occupancy(n, d, blocks.len());
    let tiles = n / d;
    let mut data = vec![0u8; n * n];
    let mut slot = 0usize;
    for ((block, _), &mult) in blocks.iter().zip(&f) {
        for _ in 0..mult {
            let (tr, tc) = (slot / tiles, slot % tiles);
            for r in 0..d {
                for c in 0..d {
                    data[(tr * d + r) * n + tc * d + c] = block.data()[r * d + c];
                }
            }
            slot += 1;
        }
    }
    Block::matrix(n, n, data)
}

/// Normalized BDM of a square matrix: `(BDM(X) - Min) / (Max - Min)`,
/// clamped into `[0,1]`. The numerator uses the plain non-overlapping
/// decomposition with `d x d` blocks.
pub fn normalized_bdm(x: &Block, table: &CtmTable, d: usize) -> Result<f64> {
    if x.ndim() != 2 || x.dims()[0] != x.dims()[1] {
        return Err(Error::ShapeMismatch(
            "normalized BDM is defined for square matrices".into(),
        ));
    }
    let n = x.dims()[0];
    check_size(n, d)?;
    let min = min_bdm(n, d, table)?;
    let max = max_bdm(n, d, table)?;
    if max <= min {
        return Err(Error::NoComplexitySpread);
    }
    let value = bdm(x, table, &BdmConfig::non_overlapping(d))?.value;
    Ok(((value - min) / (max - min)).clamp(0.0, 1.0))
}
