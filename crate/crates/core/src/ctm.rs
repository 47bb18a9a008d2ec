//! Empirical output distributions of machine rule spaces and the complexity
//! lookup tables derived from them.
//!
//! A distribution records, for every machine of a space that halts within
//! the cutoff, the block it produced. Machines are counted under both
//! constant initial-tape conventions (all-0 and all-`k-1`): each halting
//! run contributes its output and the symbol-wise complement of its output.
//! On a full enumeration this equals running every machine on both blank
//! symbols, and it makes the distribution exactly closed under
//! complementation, matching the symmetry the published tables exhibit.
//!
//! Tables assign `-log2(count/total_halting)` bits to every observed block
//! and complete each unobserved block of a shape with the maximum observed
//! value of that shape plus a configurable offset `r`, so lookups are total
//! over every shape up to the base shape.

use crate::block::Block;
use crate::error::{Error, Result};
use crate::turing::{RuleSpace, Simulator};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// Deterministic index-stride sampler parameters.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SampleSpec {
    pub stride: u64,
    pub offset: u64,
}

/// Empirical frequency of produced blocks over a rule space.
#[derive(Clone, Debug)]
pub struct OutputDistribution {
    space: RuleSpace,
    cutoff: u64,
    sample: Option<SampleSpec>,
    total_halting: u64,
    counts: HashMap<Block, u64>,
}

impl OutputDistribution {
    pub fn space(&self) -> RuleSpace {
        self.space
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn sample(&self) -> Option<SampleSpec> {
        self.sample
    }

    /// Denominator of the frequency estimates: halting runs over both
    /// initial-tape conventions (two per halting machine).
    pub fn total_halting(&self) -> u64 {
        self.total_halting
    }

    /// Halting machines of the enumerated (or sampled) set.
    pub fn halting_machines(&self) -> u64 {
        self.total_halting / 2
    }

    pub fn counts(&self) -> &HashMap<Block, u64> {
        &self.counts
    }

    pub fn count_of(&self, block: &Block) -> u64 {
        self.counts.get(block).copied().unwrap_or(0)
    }

    pub fn frequency(&self, block: &Block) -> f64 {
        self.count_of(block) as f64 / self.total_halting as f64
    }

    /// Canonical text form; identical inputs produce identical text
    /// regardless of how the build was partitioned.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        out.push_str("#ctm-dist v1\n");
        out.push_str(&metadata_line(
            self.space,
            self.cutoff,
            self.total_halting,
            None,
            self.sample,
        ));
        let mut rows: Vec<(String, u64)> = self.counts.iter().map(|(b, c)| (b.key(), *c)).collect();
        rows.sort();
        for (key, count) in rows {
            let _ = writeln!(out, "{key},{count}");
        }
        out
    }

    /// Builds a distribution from explicit counts (externally computed or
    /// synthetic); the total is the sum of the counts.
    pub fn from_counts(space: RuleSpace, cutoff: u64, counts: HashMap<Block, u64>) -> Result<Self> {
        if counts.values().any(|&c| c == 0) {
            return Err(Error::DegenerateDistribution(
                "counts must be positive".into(),
            ));
        }
        let total_halting: u64 = counts.values().sum();
        if total_halting == 0 {
            return Err(Error::NoHaltingMachines);
        }
        if counts.len() < 2 {
            return Err(Error::DegenerateDistribution(
                "a single distinct output leaves no complexity spread".into(),
            ));
        }
        Ok(OutputDistribution {
            space,
            cutoff,
            sample: None,
            total_halting,
            counts,
        })
    }
}

fn metadata_line(
    space: RuleSpace,
    cutoff: u64,
    total_halting: u64,
    completion_r: Option<f64>,
    sample: Option<SampleSpec>,
) -> String {
    let mut line = format!(
        "space={},{},{} cutoff={} total_halting={}",
        space.states(),
        space.symbols(),
        space.dimension(),
        cutoff,
        total_halting
    );
    if let Some(r) = completion_r {
        let _ = write!(line, " completion_r={r:.12}");
    }
    if let Some(s) = sample {
        let _ = write!(line, " sample={},{}", s.stride, s.offset);
    }
    line.push('\n');
    line
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Splits `0..count` into `partitions` contiguous chunks.
fn partition_ranges(count: u64, partitions: u64) -> Vec<(u64, u64)> {
    let parts = partitions.max(1).min(count.max(1));
    let chunk = count / parts;
    let extra = count % parts;
    let mut ranges = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for p in 0..parts {
        let len = chunk + if p < extra { 1 } else { 0 };
        ranges.push((start, start + len));
        start += len;
    }
    ranges
}

/// Builds the output distribution of the full rule space. The work is split
/// into `partitions` disjoint index ranges (which rayon may run in
/// parallel); the merged result does not depend on `partitions`.
pub fn build_distribution(
    space: RuleSpace,
    cutoff: u64,
    partitions: u64,
) -> Result<OutputDistribution> {
    build_inner(
        space,
        cutoff,
        partitions,
        SampleSpec {
            stride: 1,
            offset: 0,
        },
    )
}

/// Builds a sampled distribution over machine indices
/// `offset, offset+stride, offset+2*stride, ...`. The stride must be
/// coprime to the per-cell radix of the space, otherwise some transition
/// rules can never occur in the sample and the estimate is badly biased.
pub fn build_distribution_sampled(
    space: RuleSpace,
    cutoff: u64,
    partitions: u64,
    sample: SampleSpec,
) -> Result<OutputDistribution> {
    if sample.stride == 0 {
        return Err(Error::Config("sample stride must be positive".into()));
    }
    if sample.offset >= sample.stride {
        return Err(Error::Config(format!(
            "sample offset {} must be below stride {}",
            sample.offset, sample.stride
        )));
    }
    if gcd(sample.stride, space.rules_per_cell()) != 1 {
        return Err(Error::Config(format!(
            "sample stride {} shares a factor with the per-cell radix {} of {space}; \
             choose a coprime stride",
            sample.stride,
            space.rules_per_cell()
        )));
    }
    build_inner(space, cutoff, partitions, sample)
}

fn build_inner(
    space: RuleSpace,
    cutoff: u64,
    partitions: u64,
    sample: SampleSpec,
) -> Result<OutputDistribution> {
    if cutoff == 0 {
        return Err(Error::Config("cutoff must be at least 1".into()));
    }
    let total = space.machine_count()?;
    let sampled_count = if sample.offset >= total {
        0
    } else {
        (total - sample.offset - 1) / sample.stride + 1
    };
    let ranges = partition_ranges(sampled_count, partitions.max(1));
    let partials: Vec<(HashMap<Block, u64>, u64)> = ranges
        .into_par_iter()
        .map(|(start, end)| {
            let mut sim = Simulator::new(space, cutoff);
            let mut counts: HashMap<Block, u64> = HashMap::new();
            let mut halting_runs = 0u64;
            for j in start..end {
                let idx = sample.offset + j * sample.stride;
                if let Some(output) = sim.run_index(idx) {
                    halting_runs += 2;
                    let complement = output.complement(space.symbols() as usize);
                    *counts.entry(output).or_insert(0) += 1;
                    *counts.entry(complement).or_insert(0) += 1;
                }
            }
            (counts, halting_runs)
        })
        .collect();

    let mut counts: HashMap<Block, u64> = HashMap::new();
    let mut total_halting = 0u64;
    for (partial, halting) in partials {
        total_halting += halting;
        for (block, n) in partial {
            *counts.entry(block).or_insert(0) += n;
        }
    }
    if total_halting == 0 {
        return Err(Error::NoHaltingMachines);
    }
    if counts.len() < 2 {
        return Err(Error::DegenerateDistribution(
            "a single distinct output leaves no complexity spread".into(),
        ));
    }
    Ok(OutputDistribution {
        space,
        cutoff,
        sample: if sample.stride == 1 {
            None
        } else {
            Some(sample)
        },
        total_halting,
        counts,
    })
}

/// One table row: the observed production count (`None` for completed
/// blocks) and the complexity value in bits.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TableEntry {
    pub count: Option<u64>,
    pub bits: f64,
}

/// Block-to-bits lookup table, exhaustive over every shape up to its base
/// shape. This is the persisted artifact all decomposition methods consume.
#[derive(Clone, Debug)]
pub struct CtmTable {
    space: RuleSpace,
    cutoff: u64,
    sample: Option<SampleSpec>,
    total_halting: u64,
    completion_r: f64,
    base_shape: Vec<usize>,
    entries: HashMap<Block, TableEntry>,
    /// Per-shape maximum observed bits (the base of the completion rule).
    shape_max_bits: HashMap<Vec<usize>, f64>,
    /// Per-shape maximum observed count (used as weight normalizer).
    shape_max_count: HashMap<Vec<usize>, u64>,
}

/// Enumerates every shape vector `s` with `1 <= s[i] <= base[i]`.
fn shapes_up_to(base: &[usize]) -> Vec<Vec<usize>> {
    let mut shapes = vec![vec![]];
    for &b in base {
        let mut next = Vec::with_capacity(shapes.len() * b);
        for shape in &shapes {
            for d in 1..=b {
                let mut s = shape.clone();
                s.push(d);
                next.push(s);
            }
        }
        shapes = next;
    }
    shapes
}

/// Enumerates all `k^cells` blocks of a shape in lexicographic data order.
fn blocks_of_shape(shape: &[usize], k: usize) -> impl Iterator<Item = Block> + '_ {
    let cells: usize = shape.iter().product();
    let mut data = vec![0u8; cells];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let block = Block::new(shape.to_vec(), data.clone()).expect("valid shape");
        let mut i = cells;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            data[i] += 1;
            if (data[i] as usize) < k {
                break;
            }
            data[i] = 0;
        }
        Some(block)
    })
}

/// Hard cap on tabulated rows; larger bases cannot be made exhaustive.
pub const MAX_TABLE_ROWS: u64 = 1 << 24;

/// Number of rows an exhaustive table with this base shape would hold
/// (saturating).
pub fn tabulation_rows(base_shape: &[usize], k: usize) -> u64 {
    shapes_up_to(base_shape)
        .iter()
        .fold(0u64, |acc, shape| {
            let cells: usize = shape.iter().product();
            acc.saturating_add((k as u64).saturating_pow(cells as u32))
        })
}

/// Converts a distribution into an exhaustive lookup table for all shapes
/// up to `base_shape`. Observed blocks get `-log2(frequency)`; unobserved
/// blocks of a shape get that shape's maximum observed value plus `r`.
pub fn ctm_table(dist: &OutputDistribution, base_shape: &[usize], r: f64) -> Result<CtmTable> {
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::Config(format!(
            "completion offset r must be positive, got {r}"
        )));
    }
    let dim = dist.space().dimension() as usize;
    if base_shape.len() != dim || base_shape.contains(&0) {
        return Err(Error::Config(format!(
            "base shape {base_shape:?} invalid for dimension {dim}"
        )));
    }
    let k = dist.space().symbols() as usize;
    let shapes = shapes_up_to(base_shape);
    let table_cells = tabulation_rows(base_shape, k);
    if table_cells > MAX_TABLE_ROWS {
        return Err(Error::Config(format!(
            "base shape {base_shape:?} over alphabet {k} needs more than 2^24 table rows"
        )));
    }

    let total = dist.total_halting();
    let mut entries = HashMap::with_capacity(table_cells as usize);
    let mut shape_max_bits = HashMap::new();
    let mut shape_max_count = HashMap::new();
    for shape in &shapes {
        let mut max_bits = f64::NEG_INFINITY;
        let mut max_count = 0u64;
        for (block, &count) in dist.counts() {
            if block.dims() == shape.as_slice() {
                if count >= total {
                    return Err(Error::DegenerateDistribution(format!(
                        "block {block} saturates the distribution"
                    )));
                }
                let bits = -((count as f64 / total as f64).log2());
                if bits > max_bits {
                    max_bits = bits;
                }
                max_count = max_count.max(count);
            }
        }
        if max_count == 0 {
            return Err(Error::MissingShapeClass {
                shape: shape
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("x"),
            });
        }
        let completed = max_bits + r;
        for block in blocks_of_shape(shape, k) {
            let entry = match dist.counts().get(&block) {
                Some(&count) => TableEntry {
                    count: Some(count),
                    bits: -((count as f64 / total as f64).log2()),
                },
                None => TableEntry {
                    count: None,
                    bits: completed,
                },
            };
            entries.insert(block, entry);
        }
        shape_max_bits.insert(shape.clone(), max_bits);
        shape_max_count.insert(shape.clone(), max_count);
    }

    Ok(CtmTable {
        space: dist.space(),
        cutoff: dist.cutoff(),
        sample: dist.sample(),
        total_halting: total,
        completion_r: r,
        base_shape: base_shape.to_vec(),
        entries,
        shape_max_bits,
        shape_max_count,
    })
}

impl CtmTable {
    pub fn space(&self) -> RuleSpace {
        self.space
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn total_halting(&self) -> u64 {
        self.total_halting
    }

    pub fn completion_r(&self) -> f64 {
        self.completion_r
    }

    pub fn sample(&self) -> Option<SampleSpec> {
        self.sample
    }

    /// Per-axis maxima of tabulated block shapes.
    pub fn base_shape(&self) -> &[usize] {
        &self.base_shape
    }

    pub fn alphabet(&self) -> usize {
        self.space.symbols() as usize
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &HashMap<Block, TableEntry> {
        &self.entries
    }

    fn shape_in_base(&self, dims: &[usize]) -> bool {
        dims.len() == self.base_shape.len()
            && dims.iter().zip(&self.base_shape).all(|(d, b)| d <= b)
    }

    /// Exact stored value for a block. Fails with a shape error for blocks
    /// larger than the base shape (decompose those instead); for tables
    /// built by [`ctm_table`] completion guarantees every in-shape block is
    /// present.
    pub fn lookup(&self, block: &Block) -> Result<f64> {
        if !self.shape_in_base(block.dims()) {
            return Err(Error::ShapeExceedsBase {
                shape: block
                    .dims()
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("x"),
                base: self
                    .base_shape
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("x"),
            });
        }
        match self.entries.get(block) {
            Some(e) => Ok(e.bits),
            None => Err(Error::BlockNotInTable { key: block.key() }),
        }
    }

    pub fn entry(&self, block: &Block) -> Option<&TableEntry> {
        self.entries.get(block)
    }

    /// Largest value in the table (completed entries included).
    pub fn max_bits(&self) -> f64 {
        self.entries
            .values()
            .map(|e| e.bits)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_bits(&self) -> f64 {
        self.entries
            .values()
            .map(|e| e.bits)
            .fold(f64::INFINITY, f64::min)
    }

    /// Statistical weight of a block among blocks of its shape: its
    /// production count (1 for completed blocks) normalized by the largest
    /// count of the shape, in `(0, 1]`.
    pub fn weight(&self, block: &Block) -> Result<f64> {
        let entry = self
            .entries
            .get(block)
            .ok_or_else(|| Error::BlockNotInTable { key: block.key() })?;
        let max = self
            .shape_max_count
            .get(block.dims())
            .copied()
            .unwrap_or(1)
            .max(1);
        Ok(entry.count.unwrap_or(1) as f64 / max as f64)
    }

    /// Errors unless the table was built from the given space parameters.
    pub fn expect_space(&self, states: u8, symbols: u8, dimension: u8) -> Result<()> {
        if self.space.states() != states
            || self.space.symbols() != symbols
            || self.space.dimension() != dimension
        {
            return Err(Error::MetadataMismatch {
                expected: format!("space=({states},{symbols}) dim {dimension}"),
                found: format!(
                    "space=({},{}) dim {}",
                    self.space.states(),
                    self.space.symbols(),
                    self.space.dimension()
                ),
            });
        }
        Ok(())
    }

    /// Canonical file form. Line 1 names the format, line 2 the metadata,
    /// line 3 a sha256 over all following bytes; then one row per block,
    /// sorted by serialized key: `<key>,<count|->,<bits to 12 places>`.
    pub fn to_file_string(&self) -> String {
        let mut rows: Vec<String> = self
            .entries
            .iter()
            .map(|(block, entry)| {
                let count = entry
                    .count
                    .map_or_else(|| "-".to_string(), |c| c.to_string());
                format!("{},{},{:.12}\n", block.key(), count, entry.bits)
            })
            .collect();
        rows.sort();
        let body: String = rows.concat();
        let mut digest = Sha256::new();
        digest.update(body.as_bytes());
        let mut out = String::with_capacity(body.len() + 128);
        out.push_str("#ctm-table v1\n");
        out.push_str(&metadata_line(
            self.space,
            self.cutoff,
            self.total_halting,
            Some(self.completion_r),
            self.sample,
        ));
        let _ = writeln!(out, "sha256={}", hex::encode(digest.finalize()));
        out.push_str(&body);
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    /// Parses the [`CtmTable::to_file_string`] form, verifying version,
    /// metadata and checksum. Loaded tables may be partial (hand-written
    /// injections); base shape is inferred as the per-axis maximum over the
    /// rows present.
    pub fn from_file_string(text: &str, origin: &str) -> Result<CtmTable> {
        let err = |line: usize, msg: String| Error::ParseError {
            path: origin.to_string(),
            line,
            msg,
        };
        let mut lines = text.split_inclusive('\n');
        let header = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        if header.trim_end() != "#ctm-table v1" {
            return Err(err(
                1,
                format!("unsupported header `{}`", header.trim_end()),
            ));
        }
        let meta = lines
            .next()
            .ok_or_else(|| err(2, "missing metadata line".into()))?
            .trim_end()
            .to_string();
        let sha_line = lines
            .next()
            .ok_or_else(|| err(3, "missing checksum line".into()))?
            .trim_end()
            .to_string();

        let mut space = None;
        let mut cutoff = None;
        let mut total_halting = None;
        let mut completion_r = None;
        let mut sample = None;
        for field in meta.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(2, format!("bad metadata field `{field}`")))?;
            match key {
                "space" => {
                    let parts: Vec<&str> = value.split(',').collect();
                    if parts.len() != 3 {
                        return Err(err(2, format!("bad space `{value}`")));
                    }
                    let t: u8 = parts[0].parse().map_err(|_| err(2, "bad states".into()))?;
                    let k: u8 = parts[1].parse().map_err(|_| err(2, "bad symbols".into()))?;
                    let d: u8 = parts[2]
                        .parse()
                        .map_err(|_| err(2, "bad dimension".into()))?;
                    space = Some(RuleSpace::new(t, k, d).map_err(|e| err(2, e.to_string()))?);
                }
                "cutoff" => {
                    cutoff = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| err(2, "bad cutoff".into()))?,
                    );
                }
                "total_halting" => {
                    total_halting = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| err(2, "bad total_halting".into()))?,
                    );
                }
                "completion_r" => {
                    completion_r = Some(
                        value
                            .parse::<f64>()
                            .map_err(|_| err(2, "bad completion_r".into()))?,
                    );
                }
                "sample" => {
                    let (s, o) = value
                        .split_once(',')
                        .ok_or_else(|| err(2, format!("bad sample `{value}`")))?;
                    sample = Some(SampleSpec {
                        stride: s.parse().map_err(|_| err(2, "bad stride".into()))?,
                        offset: o.parse().map_err(|_| err(2, "bad offset".into()))?,
                    });
                }
                other => return Err(err(2, format!("unknown metadata key `{other}`"))),
            }
        }
        let space = space.ok_or_else(|| err(2, "missing space".into()))?;
        let cutoff = cutoff.ok_or_else(|| err(2, "missing cutoff".into()))?;
        let total_halting = total_halting.ok_or_else(|| err(2, "missing total_halting".into()))?;
        let completion_r = completion_r.ok_or_else(|| err(2, "missing completion_r".into()))?;

        let expected_sha = sha_line
            .strip_prefix("sha256=")
            .ok_or_else(|| err(3, "missing sha256 prefix".into()))?
            .to_string();
        let body: String = lines.collect();
        let mut digest = Sha256::new();
        digest.update(body.as_bytes());
        let computed = hex::encode(digest.finalize());
        if computed != expected_sha {
            return Err(Error::ChecksumMismatch {
                expected: expected_sha,
                computed,
            });
        }

        let mut entries = HashMap::new();
        let mut shape_max_bits: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut shape_max_count: HashMap<Vec<usize>, u64> = HashMap::new();
        let mut base_shape: Vec<usize> = Vec::new();
        for (i, row) in body.lines().enumerate() {
            let lineno = i + 4;
            let mut parts = row.splitn(3, ',');
            let key = parts
                .next()
                .ok_or_else(|| err(lineno, "missing block key".into()))?;
            let count = parts
                .next()
                .ok_or_else(|| err(lineno, "missing count field".into()))?;
            let bits = parts
                .next()
                .ok_or_else(|| err(lineno, "missing bits field".into()))?;
            let block = Block::from_key(key).map_err(|e| err(lineno, e.to_string()))?;
            if block.min_alphabet() > space.symbols() as usize {
                return Err(err(
                    lineno,
                    format!("block `{key}` outside alphabet of {space}"),
                ));
            }
            let count = if count == "-" {
                None
            } else {
                Some(
                    count
                        .parse::<u64>()
                        .map_err(|_| err(lineno, format!("bad count `{count}`")))?,
                )
            };
            let bits: f64 = bits
                .parse()
                .map_err(|_| err(lineno, format!("bad bits `{bits}`")))?;
            if base_shape.is_empty() {
                base_shape = block.dims().to_vec();
            } else if base_shape.len() != block.ndim() {
                return Err(err(lineno, "mixed block dimensionality".into()));
            } else {
                for (b, d) in base_shape.iter_mut().zip(block.dims()) {
                    *b = (*b).max(*d);
                }
            }
            if let Some(c) = count {
                let e = shape_max_bits.entry(block.dims().to_vec()).or_insert(bits);
                *e = e.max(bits);
                let mc = shape_max_count.entry(block.dims().to_vec()).or_insert(0);
                *mc = (*mc).max(c);
            }
            if entries.insert(block, TableEntry { count, bits }).is_some() {
                return Err(err(lineno, format!("duplicate block `{key}`")));
            }
        }
        if entries.is_empty() {
            return Err(err(4, "table has no rows".into()));
        }
        Ok(CtmTable {
            space,
            cutoff,
            sample,
            total_halting,
            completion_r,
            base_shape,
            entries,
            shape_max_bits,
            shape_max_count,
        })
    }

    pub fn load(path: &Path) -> Result<CtmTable> {
        let text = std::fs::read_to_string(path)?;
        CtmTable::from_file_string(&text, &path.display().to_string())
    }

    /// Builds an ad-hoc table from explicit rows; used to inject published
    /// values that no enumeration in this artifact reproduces.
    pub fn from_rows(
        space: RuleSpace,
        cutoff: u64,
        total_halting: u64,
        completion_r: f64,
        rows: Vec<(Block, TableEntry)>,
    ) -> Result<CtmTable> {
        if rows.is_empty() {
            return Err(Error::Config("table needs at least one row".into()));
        }
        let mut entries = HashMap::new();
        let mut shape_max_bits: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut shape_max_count: HashMap<Vec<usize>, u64> = HashMap::new();
        let mut base_shape: Vec<usize> = rows[0].0.dims().to_vec();
        for (block, entry) in rows {
            if block.ndim() != base_shape.len() {
                return Err(Error::Config("mixed block dimensionality".into()));
            }
            for (b, d) in base_shape.iter_mut().zip(block.dims()) {
                *b = (*b).max(*d);
            }
            if let Some(c) = entry.count {
                let e = shape_max_bits
                    .entry(block.dims().to_vec())
                    .or_insert(entry.bits);
                *e = e.max(entry.bits);
                let mc = shape_max_count.entry(block.dims().to_vec()).or_insert(0);
                *mc = (*mc).max(c);
            }
            entries.insert(block, entry);
        }
        Ok(CtmTable {
            space,
            cutoff,
            sample: None,
            total_halting,
            completion_r,
            base_shape,
            entries,
            shape_max_bits,
            shape_max_count,
        })
    }

    /// Maximum observed bits of a shape (completion base), when any block
    /// of the shape was observed.
    pub fn shape_max_bits(&self, shape: &[usize]) -> Option<f64> {
        self.shape_max_bits.get(shape).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing;

    fn dist_2_2() -> OutputDistribution {
        build_distribution(RuleSpace::new(2, 2, 1).unwrap(), 6, 4).unwrap()
    }

    #[test]
    fn zero_and_one_counts_match() {
        let d = dist_2_2();
        let zero = Block::from_digits("0").unwrap();
        let one = Block::from_digits("1").unwrap();
        assert_eq!(d.count_of(&zero), d.count_of(&one));
        assert!(d.count_of(&zero) > 0);
    }

    #[test]
    fn frequencies_normalize() {
        let d = dist_2_2();
        let sum: u64 = d.counts().values().sum();
        assert_eq!(sum, d.total_halting());
        for &c in d.counts().values() {
            assert!(c > 0 && c < d.total_halting());
        }
    }

    #[test]
    fn partitioning_does_not_change_result() {
        let space = RuleSpace::new(2, 2, 1).unwrap();
        let one = build_distribution(space, 6, 1).unwrap();
        let eight = build_distribution(space, 6, 8).unwrap();
        assert_eq!(one.to_canonical_string(), eight.to_canonical_string());
    }

    #[test]
    fn distribution_is_complement_and_reversal_closed() {
        let d = dist_2_2();
        for (block, &count) in d.counts() {
            assert_eq!(d.count_of(&block.complement(2)), count);
            assert_eq!(d.count_of(&block.reversed()), count);
        }
    }

    #[test]
    fn cutoff_stability_on_2_2() {
        let space = RuleSpace::new(2, 2, 1).unwrap();
        let short = build_distribution(space, 6, 4).unwrap();
        let long = build_distribution(space, 107, 4).unwrap();
        assert_eq!(short.total_halting(), long.total_halting());
        assert_eq!(short.counts(), long.counts());
    }

    #[test]
    fn table_values_and_completion() {
        let d = dist_2_2();
        let t = ctm_table(&d, &[4], 1.0).unwrap();
        // 2 + 4 + 8 + 16 blocks, all present.
        assert_eq!(t.len(), 30);
        for (block, entry) in t.entries() {
            match entry.count {
                Some(c) => {
                    let expect = -((c as f64 / d.total_halting() as f64).log2());
                    assert!((entry.bits - expect).abs() < 1e-12);
                }
                None => {
                    let max = t.shape_max_bits(block.dims()).unwrap();
                    assert!((entry.bits - (max + 1.0)).abs() < 1e-12);
                }
            }
        }
        // More frequent blocks have strictly lower values.
        let zero = Block::from_digits("0").unwrap();
        let z00 = Block::from_digits("00").unwrap();
        assert!(d.count_of(&zero) > d.count_of(&z00));
        assert!(t.lookup(&zero).unwrap() < t.lookup(&z00).unwrap());
    }

    #[test]
    fn tabulation_size_accounting() {
        assert_eq!(tabulation_rows(&[4], 2), 30);
        assert_eq!(tabulation_rows(&[4, 4], 2), 74954);
        assert!(tabulation_rows(&[5, 5], 2) > MAX_TABLE_ROWS);
    }

    #[test]
    fn half_frequency_is_one_bit() {
        let counts: HashMap<Block, u64> = [
            (Block::from_digits("0").unwrap(), 2),
            (Block::from_digits("1").unwrap(), 2),
        ]
        .into_iter()
        .collect();
        let d =
            OutputDistribution::from_counts(RuleSpace::new(2, 2, 1).unwrap(), 6, counts).unwrap();
        let t = ctm_table(&d, &[1], 1.0).unwrap();
        assert_eq!(t.lookup(&Block::from_digits("0").unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn lookup_symmetries_on_2_2_table() {
        let d = dist_2_2();
        let t = ctm_table(&d, &[4], 1.0).unwrap();
        for block in t.entries().keys() {
            let v = t.lookup(block).unwrap();
            assert_eq!(v, t.lookup(&block.complement(2)).unwrap());
            assert_eq!(v, t.lookup(&block.reversed()).unwrap());
        }
    }

    #[test]
    fn lookup_shape_errors() {
        let d = dist_2_2();
        let t = ctm_table(&d, &[4], 1.0).unwrap();
        let long = Block::from_digits("00000").unwrap();
        assert!(matches!(
            t.lookup(&long),
            Err(Error::ShapeExceedsBase { .. })
        ));
    }

    #[test]
    fn missing_shape_class_is_an_error() {
        let d = dist_2_2();
        // (2,2) outputs reach length 4 only; length 5 has no observed block.
        let err = ctm_table(&d, &[8], 1.0).unwrap_err();
        assert!(matches!(err, Error::MissingShapeClass { .. }));
        assert!(err.to_string().contains('5'), "{err}");
    }

    #[test]
    fn file_round_trip_is_byte_identical() {
        let d = dist_2_2();
        let t = ctm_table(&d, &[4], 1.0).unwrap();
        let text = t.to_file_string();
        let reloaded = CtmTable::from_file_string(&text, "mem").unwrap();
        assert_eq!(reloaded.to_file_string(), text);
        assert_eq!(reloaded.total_halting(), t.total_halting());
        assert_eq!(reloaded.base_shape(), t.base_shape());
    }

    #[test]
    fn corrupted_and_truncated_files_fail() {
        let d = dist_2_2();
        let t = ctm_table(&d, &[3], 1.0).unwrap();
        let text = t.to_file_string();
        // Flip one body byte: checksum must catch it.
        let mut tampered = text.clone().into_bytes();
        let pos = text.find("\n0,").unwrap() + 1;
        tampered[pos] = b'1';
        let tampered = String::from_utf8(tampered).unwrap();
        assert!(matches!(
            CtmTable::from_file_string(&tampered, "mem"),
            Err(Error::ChecksumMismatch { .. })
        ));
        // Truncation: drop the last row.
        let truncated: String = {
            let mut lines: Vec<&str> = text.lines().collect();
            lines.pop();
            lines.join("\n") + "\n"
        };
        assert!(CtmTable::from_file_string(&truncated, "mem").is_err());
        // Bad version header.
        assert!(CtmTable::from_file_string("#ctm-table v9\n", "mem").is_err());
    }

    #[test]
    fn metadata_expectations() {
        let d = dist_2_2();
        let t = ctm_table(&d, &[4], 1.0).unwrap();
        assert!(t.expect_space(2, 2, 1).is_ok());
        assert!(matches!(
            t.expect_space(3, 2, 1),
            Err(Error::MetadataMismatch { .. })
        ));
    }

    #[test]
    fn bad_sample_strides_rejected() {
        let space = RuleSpace::new(2, 2, 1).unwrap();
        // rules_per_cell = 12; stride 6 shares a factor.
        let err = build_distribution_sampled(
            space,
            6,
            2,
            SampleSpec {
                stride: 6,
                offset: 0,
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("coprime"), "{err}");
        let ok = build_distribution_sampled(
            space,
            6,
            2,
            SampleSpec {
                stride: 7,
                offset: 3,
            },
        )
        .unwrap();
        assert_eq!(ok.sample().unwrap().stride, 7);
    }

    #[test]
    fn halting_count_matches_direct_simulation() {
        let space = RuleSpace::new(2, 2, 1).unwrap();
        let d = build_distribution(space, 6, 3).unwrap();
        let mut halting = 0u64;
        for idx in 0..space.machine_count().unwrap() {
            let m = turing::machine_from_index(space, idx).unwrap();
            if turing::run(&m, 6).halted {
                halting += 1;
            }
        }
        assert_eq!(d.halting_machines(), halting);
    }
}
