//! Block decomposition: complexity estimates for objects larger than any
//! table's base shape, obtained by summing table values of the object's
//! blocks plus `log2` of each block's multiplicity.
//!
//! Boundary strategies control what happens when the object is not an
//! exact multiple of the block size: trim the remainder, wrap the object
//! on a torus, partition recursively with shrinking block sizes, or pad
//! with a low-complexity border and subtract the added information.
//! Variants reweight the block values: `Smooth` by production frequency,
//! `MutualInfo` by statistical similarity between blocks.

mod decompose;
mod normalized;

pub use decompose::{cyclic_embed, decompose, recursive_partition, Quadrant};
pub use normalized::{max_bdm, max_matrix, min_bdm, normalized_bdm};

use crate::block::Block;
use crate::ctm::CtmTable;
use crate::entropy;
use crate::error::{Error, Result};

/// Strategy for cells not covered by whole blocks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Boundary {
    /// Ignore leftover cells.
    Trim,
    /// Embed the object in a torus; no leftover exists.
    Cyclic,
    /// Partition leftovers recursively with blocks of size `d-1, d-2, ...`.
    Recursive,
    /// Extend each axis with constant cells to the next block multiple and
    /// subtract the added information.
    AddBorder,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trim" => Ok(Boundary::Trim),
            "cyclic" => Ok(Boundary::Cyclic),
            "recursive" => Ok(Boundary::Recursive),
            "add-border" | "addborder" | "addcol" => Ok(Boundary::AddBorder),
            other => Err(Error::Config(format!(
                "unknown boundary strategy `{other}`"
            ))),
        }
    }
}

/// Value-combination variant.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Plain,
    Smooth,
    MutualInfo,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(Variant::Plain),
            "smooth" => Ok(Variant::Smooth),
            "mi" | "mutual-info" | "mibdm" => Ok(Variant::MutualInfo),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// Fully determines a decomposition: per-dimension block size, window step
/// (`offset == block_size` means a non-overlapping partition), boundary
/// strategy and variant. `quadrants` select the anchor corners of the
/// recursive strategy, cycled per level.
#[derive(Clone, PartialEq, Debug)]
pub struct BdmConfig {
    pub block_size: usize,
    pub offset: usize,
    pub boundary: Boundary,
    pub variant: Variant,
    pub quadrants: Vec<Quadrant>,
}

impl BdmConfig {
    pub fn non_overlapping(block_size: usize) -> Self {
        BdmConfig {
            block_size,
            offset: block_size,
            boundary: Boundary::Trim,
            variant: Variant::Plain,
            quadrants: vec![Quadrant::TopLeft],
        }
    }

    pub fn overlapping(block_size: usize, offset: usize) -> Self {
        BdmConfig {
            offset,
            ..BdmConfig::non_overlapping(block_size)
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_quadrants(mut self, quadrants: Vec<Quadrant>) -> Self {
        self.quadrants = quadrants;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::Config("block size must be positive".into()));
        }
        if self.offset == 0 || self.offset > self.block_size {
            return Err(Error::Config(format!(
                "offset {} must satisfy 1 <= offset <= block size {}",
                self.offset, self.block_size
            )));
        }
        if self.quadrants.is_empty() {
            return Err(Error::Config("quadrant sequence must be non-empty".into()));
        }
        Ok(())
    }

    /// Fig-8 style label, `b<block>o<overlap>` with `overlap = block - offset`.
    pub fn label(&self) -> String {
        format!("b{}o{}", self.block_size, self.block_size - self.offset)
    }
}

/// One decomposition entry: a block and how many times it occurred.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultisetEntry {
    pub block: Block,
    pub multiplicity: u64,
}

/// Cells not covered by whole blocks (Trim) or artificially added
/// (AddBorder), plus the correction owed for added borders.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Leftover {
    pub ignored_cells: usize,
    pub added_cells: usize,
    /// Cells appended per axis by AddBorder.
    pub added_per_axis: Vec<usize>,
    /// Fill symbol of the added border.
    pub border_fill: Option<u8>,
}

/// Result of decomposing an object: distinct blocks with multiplicities,
/// in canonical block order, plus the leftover record.
#[derive(Clone, PartialEq, Debug)]
pub struct BlockMultiset {
    pub entries: Vec<MultisetEntry>,
    pub leftover: Leftover,
}

impl BlockMultiset {
    pub(crate) fn from_blocks(blocks: impl IntoIterator<Item = Block>, leftover: Leftover) -> Self {
        let mut counts: std::collections::BTreeMap<Block, u64> = std::collections::BTreeMap::new();
        for b in blocks {
            *counts.entry(b).or_insert(0) += 1;
        }
        BlockMultiset {
            entries: counts
                .into_iter()
                .map(|(block, multiplicity)| MultisetEntry {
                    block,
                    multiplicity,
                })
                .collect(),
            leftover,
        }
    }

    /// Total block occurrences, `sum of multiplicities`.
    pub fn total_blocks(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn distinct_blocks(&self) -> usize {
        self.entries.len()
    }

    /// Cell coverage, `sum multiplicity * cells(block)`.
    pub fn covered_cells(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| e.multiplicity * e.block.cells() as u64)
            .sum()
    }
}

/// A computed BDM value together with everything needed to reproduce it:
/// `value = sum(lookup(block) + log2(multiplicity)) - correction`.
#[derive(Clone, Debug)]
pub struct BdmResult {
    pub value: f64,
    pub multiset: BlockMultiset,
    pub config: BdmConfig,
    /// Bits subtracted for an added border.
    pub correction: f64,
}

fn check_object(object: &Block, table: &CtmTable, config: &BdmConfig) -> Result<()> {
    config.validate()?;
    if object.ndim() != table.base_shape().len() {
        return Err(Error::Config(format!(
            "object dimensionality {} does not match table blocks of dimensionality {}",
            object.ndim(),
            table.base_shape().len()
        )));
    }
    if object.min_alphabet() > table.alphabet() {
        return Err(Error::Config(format!(
            "object alphabet {} exceeds table alphabet {}",
            object.min_alphabet(),
            table.alphabet()
        )));
    }
    if let Some(&min_base) = table.base_shape().iter().min() {
        if config.block_size > min_base {
            return Err(Error::ShapeExceedsBase {
                shape: config.block_size.to_string(),
                base: table
                    .base_shape()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("x"),
            });
        }
    }
    Ok(())
}

/// Plain sum over a multiset: `sum(lookup + log2 n)`, accumulated in
/// canonical entry order so equal multisets give bit-identical values.
fn plain_value(multiset: &BlockMultiset, table: &CtmTable) -> Result<f64> {
    let mut value = 0.0;
    for entry in &multiset.entries {
        value += table.lookup(&entry.block)? + (entry.multiplicity as f64).log2();
    }
    Ok(value)
}

fn weighted_value(multiset: &BlockMultiset, table: &CtmTable) -> Result<f64> {
    let mut value = 0.0;
    for entry in &multiset.entries {
        let w = table.weight(&entry.block)?;
        value += table.lookup(&entry.block)? * w + (entry.multiplicity as f64).log2();
    }
    Ok(value)
}

/// Weight of each distinct block by its best statistical match among the
/// other blocks of the decomposition: the value charged for block `i` is
/// the cheaper of the two mixing orders of `CTM(r_i)` and `CTM(r_j)` under
/// the normalized mutual information `MI(r_i, r_j)` of the most similar
/// partner `r_j`. A lone distinct block is its own partner (MI 1).
fn mutual_info_value(multiset: &BlockMultiset, table: &CtmTable) -> Result<f64> {
    let entries = &multiset.entries;
    let mut value = 0.0;
    for (i, entry) in entries.iter().enumerate() {
        let vi = table.lookup(&entry.block)?;
        let mut partner: Option<(f64, usize)> = None;
        for (j, other) in entries.iter().enumerate() {
            if i == j && entries.len() > 1 {
                continue;
            }
            let nmi = entropy::normalized_mutual_information(&entry.block, &other.block)?;
            let better = match partner {
                None => true,
                Some((best, at)) => nmi > best || (nmi == best && j < at),
            };
            if better {
                partner = Some((nmi, j));
            }
        }
        let (nmi, j) = partner.expect("non-empty multiset");
        let vj = table.lookup(&entries[j].block)?;
        let mixed = (nmi * vi + (1.0 - nmi) * vj).min(nmi * vj + (1.0 - nmi) * vi);
        value += mixed + (entry.multiplicity as f64).log2();
    }
    Ok(value)
}

fn value_of(multiset: &BlockMultiset, table: &CtmTable, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Plain => plain_value(multiset, table),
        Variant::Smooth => weighted_value(multiset, table),
        Variant::MutualInfo => mutual_info_value(multiset, table),
    }
}

/// Correction owed for an added border: `log2` of the number of cells
/// appended per axis (rows, columns, ...), zero for untouched axes.
fn border_correction(added_per_axis: &[usize]) -> f64 {
    added_per_axis
        .iter()
        .filter(|&&a| a > 0)
        .map(|&a| (a as f64).log2())
        .sum()
}

/// Estimates the complexity of `object` from `table` under `config`.
///
/// With the `AddBorder` boundary (and for `Smooth`/`MutualInfo` on objects
/// that are not block multiples) both the all-0 and all-`k-1` border fills
/// are evaluated and the smaller corrected value wins.
pub fn bdm(object: &Block, table: &CtmTable, config: &BdmConfig) -> Result<BdmResult> {
    check_object(object, table, config)?;
    let variant = config.variant;
    if matches!(variant, Variant::Smooth | Variant::MutualInfo) {
        return weighted_family(object, table, config);
    }
    match config.boundary {
        Boundary::AddBorder => {
            let (multiset, value, correction) = best_bordered(object, table, config, variant)?;
            Ok(BdmResult {
                value,
                multiset,
                config: config.clone(),
                correction,
            })
        }
        _ => {
            let multiset = decompose(object, config)?;
            let value = plain_value(&multiset, table)?;
            Ok(BdmResult {
                value,
                multiset,
                config: config.clone(),
                correction: 0.0,
            })
        }
    }
}

/// Evaluates both border fills and returns the cheaper corrected result.
fn best_bordered(
    object: &Block,
    table: &CtmTable,
    config: &BdmConfig,
    variant: Variant,
) -> Result<(BlockMultiset, f64, f64)> {
    let k = table.alphabet();
    let mut best: Option<(BlockMultiset, f64, f64)> = None;
    for fill in [0u8, (k - 1) as u8] {
        let multiset = decompose::bordered(object, config, fill)?;
        let correction = border_correction(&multiset.leftover.added_per_axis);
        let value = value_of(&multiset, table, variant)? - correction;
        let replace = match &best {
            None => true,
            Some((_, v, _)) => value < *v,
        };
        if replace {
            best = Some((multiset, value, correction));
        }
        if k == 1 {
            break;
        }
    }
    Ok(best.expect("at least one fill evaluated"))
}

/// Shared path of the smooth and mutual-information variants: 2-dimensional
/// objects, non-overlapping partition; objects that are not multiples of
/// the block size are completed with the cheaper constant border and the
/// added information is subtracted.
fn weighted_family(object: &Block, table: &CtmTable, config: &BdmConfig) -> Result<BdmResult> {
    if object.ndim() != 2 {
        return Err(Error::Config(format!(
            "{:?} variant is defined for 2-dimensional objects",
            config.variant
        )));
    }
    if config.offset != config.block_size {
        return Err(Error::Config(format!(
            "{:?} variant uses a non-overlapping partition; set offset = block size",
            config.variant
        )));
    }
    let d = config.block_size;
    let divisible = object.dims().iter().all(|&len| len % d == 0);
    if divisible {
        let multiset = decompose(object, &BdmConfig::non_overlapping(d))?;
        let value = value_of(&multiset, table, config.variant)?;
        Ok(BdmResult {
            value,
            multiset,
            config: config.clone(),
            correction: 0.0,
        })
    } else {
        let (multiset, value, correction) = best_bordered(object, table, config, config.variant)?;
        Ok(BdmResult {
            value,
            multiset,
            config: config.clone(),
            correction,
        })
    }
}

/// Frequency-weighted BDM: block values are scaled by their production
/// weight in `(0,1]` before summing.
pub fn smooth_bdm(object: &Block, table: &CtmTable, config: &BdmConfig) -> Result<BdmResult> {
    let cfg = config.clone().with_variant(Variant::Smooth);
    bdm(object, table, &cfg)
}

/// Mutual-information-weighted BDM.
pub fn mi_bdm(object: &Block, table: &CtmTable, config: &BdmConfig) -> Result<BdmResult> {
    let cfg = config.clone().with_variant(Variant::MutualInfo);
    bdm(object, table, &cfg)
}

/// Shannon entropy of the partition itself: block frequencies
/// `n_j / total` treated as symbol probabilities.
pub fn partition_entropy(multiset: &BlockMultiset) -> f64 {
    let total = multiset.total_blocks() as f64;
    if total == 0.0 {
        return 0.0;
    }
    let h = -multiset
        .entries
        .iter()
        .map(|e| {
            let p = e.multiplicity as f64 / total;
            p * p.log2()
        })
        .sum::<f64>();
    if h == 0.0 {
        0.0
    } else {
        h
    }
}

/// Analytic worst-case bound, in bits, on the error a boundary strategy
/// introduces for an object of `shape` decomposed with blocks of size `d`.
/// `max_block_bits` is the largest table value (it scales the cyclic and
/// recursive bounds).
pub fn boundary_error_bound(
    shape: &[usize],
    d: usize,
    strategy: Boundary,
    max_block_bits: f64,
) -> Result<f64> {
    if shape.is_empty() || shape.contains(&0) || d == 0 {
        return Err(Error::Config(
            "shape and block size must be positive".into(),
        ));
    }
    match strategy {
        Boundary::Trim => {
            if shape.iter().all(|&len| len % d == 0) {
                Ok(0.0)
            } else {
                let k = *shape.iter().max().expect("non-empty shape") as f64;
                Ok(k * k / k.exp())
            }
        }
        Boundary::Cyclic => Ok((d as f64 - 1.0) * max_block_bits),
        Boundary::Recursive => Ok((d as f64 - 1.0).powi(2) * max_block_bits),
        Boundary::AddBorder => {
            let added: Vec<usize> = shape.iter().map(|&len| (d - len % d) % d).collect();
            Ok(border_correction(&added))
        }
    }
}
