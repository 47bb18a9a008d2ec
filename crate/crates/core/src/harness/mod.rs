//! Evaluation harness: rank correlations between complexity estimators,
//! sweep and measure reports, reference sequences, and graph corpora for
//! the spectral consistency experiments.

mod graph;

pub use graph::{char_poly, is_cospectral, line_graph, random_graph, Graph};

use crate::bdm::{self, BdmConfig};
use crate::block::Block;
use crate::ctm::CtmTable;
use crate::entropy::{self, BlockNormalization};
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

/// Average ranks (1-based) with ties sharing their mean rank.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. Identical (or
/// exactly mirrored) rank vectors return +-1 exactly.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Range(format!(
            "rank correlation needs at least 3 points, got {n}"
        )));
    }
    if xs.iter().any(|v| !v.is_finite()) || ys.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range("rank correlation needs finite values".into()));
    }
    if xs.iter().all(|&v| v == xs[0]) {
        return Err(Error::ConstantInput("first sequence".into()));
    }
    if ys.iter().all(|&v| v == ys[0]) {
        return Err(Error::ConstantInput("second sequence".into()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    if rx == ry {
        return Ok(1.0);
    }
    let mirror = (n + 1) as f64;
    if rx.iter().zip(&ry).all(|(a, b)| a + b == mirror) {
        return Ok(-1.0);
    }
    let mean = (n as f64 + 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx2 = 0.0;
    let mut dy2 = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        num += da * db;
        dx2 += da * da;
        dy2 += db * db;
    }
    Ok((num / (dx2 * dy2).sqrt()).clamp(-1.0, 1.0))
}

/// The cube-free sequence from iterating `0 -> 01`, `1 -> 10` starting at
/// 0, truncated to `len` symbols.
pub fn thue_morse(len: usize) -> Block {
    let mut seq = vec![0u8];
    while seq.len() < len {
        let extend: Vec<u8> = seq.iter().map(|&b| 1 - b).collect();
        seq.extend(extend);
    }
    seq.truncate(len);
    Block::string(seq).expect("non-empty sequence")
}

/// All `2^bits` binary strings in ascending numeric order.
pub fn all_binary_strings(bits: usize) -> Vec<Block> {
    assert!(
        (1..=24).contains(&bits),
        "string space must stay enumerable"
    );
    (0..1u64 << bits)
        .map(|v| {
            Block::string(
                (0..bits)
                    .rev()
                    .map(|i| ((v >> i) & 1) as u8)
                    .collect::<Vec<_>>(),
            )
            .expect("non-empty string")
        })
        .collect()
}

/// One row of a correlation sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub label: String,
    pub rho: Option<f64>,
    pub note: String,
}

/// Spearman correlations of estimator columns against whole-object table
/// values, one row per configuration plus entropy baselines.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Comma-delimited report: header row, `.` decimal separator, six
    /// fractional digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config,rho,note\n");
        for row in &self.rows {
            match row.rho {
                Some(r) => {
                    let _ = writeln!(out, "{},{:.6},{}", row.label, r, row.note);
                }
                None => {
                    let _ = writeln!(out, "{},,{}", row.label, row.note);
                }
            }
        }
        out
    }
}

/// Sweeps `(block, overlap)` configurations over a fixed-length string set,
/// reporting the Spearman correlation of each BDM column against the
/// strings' own table values, plus block-entropy baseline rows. Configs a
/// string cannot hold are reported as skipped rows, not dropped.
pub fn correlation_sweep(
    strings: &[Block],
    table: &CtmTable,
    configs: &[(usize, usize)],
) -> Result<SweepReport> {
    if strings.is_empty() {
        return Err(Error::Range("sweep needs at least one string".into()));
    }
    let len = strings[0].cells();
    if strings.iter().any(|s| s.cells() != len || !s.is_string()) {
        return Err(Error::Range(
            "sweep strings must share a single length".into(),
        ));
    }
    let reference: Vec<f64> = strings
        .iter()
        .map(|s| table.lookup(s))
        .collect::<Result<_>>()?;
    let n_note = format!("n={}", strings.len());

    let mut rows = Vec::new();
    for &(block, overlap) in configs {
        let label = format!("b{block}o{overlap}");
        if block > len {
            rows.push(SweepRow {
                label,
                rho: None,
                note: "skipped: block exceeds string length".into(),
            });
            continue;
        }
        if overlap >= block {
            rows.push(SweepRow {
                label,
                rho: None,
                note: "skipped: overlap must be below block size".into(),
            });
            continue;
        }
        let config = BdmConfig::overlapping(block, block - overlap);
        let mut column = Vec::with_capacity(strings.len());
        for s in strings {
            column.push(bdm::bdm(s, table, &config)?.value);
        }
        match spearman(&column, &reference) {
            Ok(rho) => rows.push(SweepRow {
                label,
                rho: Some(rho),
                note: n_note.clone(),
            }),
            Err(e) => rows.push(SweepRow {
                label,
                rho: None,
                note: format!("undefined: {e}"),
            }),
        }
    }

    for (label, values) in [
        (
            "H1".to_string(),
            strings
                .iter()
                .map(|s| entropy::block_entropy(s, 1, false))
                .collect::<Result<Vec<_>>>()?,
        ),
        (
            "best_Hl".to_string(),
            strings
                .iter()
                .map(|s| entropy::best_block_entropy(s, BlockNormalization::None).map(|(_, h)| h))
                .collect::<Result<Vec<_>>>()?,
        ),
    ] {
        match spearman(&values, &reference) {
            Ok(rho) => rows.push(SweepRow {
                label,
                rho: Some(rho),
                note: n_note.clone(),
            }),
            Err(e) => rows.push(SweepRow {
                label,
                rho: None,
                note: format!("undefined: {e}"),
            }),
        }
    }

    Ok(SweepReport { rows })
}

fn csv_cell(value: Result<f64>, notes: &mut Vec<String>, id: &str, what: &str) -> String {
    match value {
        Ok(v) => format!("{v:.6}"),
        Err(e) => {
            notes.push(format!("{id}: {what}: {e}"));
            "-".to_string()
        }
    }
}

/// Per-object measure comparison: H1, best block entropy, BDM per config,
/// and normalized BDM for square matrices. Component failures annotate the
/// row rather than dropping it. Returns CSV with a trailing note column.
pub fn measure_report(
    objects: &[(String, Block)],
    table: &CtmTable,
    configs: &[BdmConfig],
) -> String {
    let mut out = String::from("id,h1,best_l,best_hl");
    for c in configs {
        let _ = write!(out, ",bdm_{}", c.label());
    }
    out.push_str(",nbdm,notes\n");
    for (id, object) in objects {
        let mut notes: Vec<String> = Vec::new();
        let h1 = if object.is_string() {
            csv_cell(
                entropy::block_entropy(object, 1, false),
                &mut notes,
                id,
                "H1",
            )
        } else {
            format!("{:.6}", entropy::shannon_entropy(object))
        };
        let (best_l, best_h) = if object.is_string() {
            match entropy::best_block_entropy(object, BlockNormalization::None) {
                Ok((l, h)) => (l.to_string(), format!("{h:.6}")),
                Err(e) => {
                    notes.push(format!("{id}: best_Hl: {e}"));
                    ("-".into(), "-".into())
                }
            }
        } else {
            ("-".into(), "-".into())
        };
        let _ = write!(out, "{id},{h1},{best_l},{best_h}");
        for config in configs {
            let cell = csv_cell(
                bdm::bdm(object, table, config).map(|r| r.value),
                &mut notes,
                id,
                &config.label(),
            );
            let _ = write!(out, ",{cell}");
        }
        let nbdm = if object.ndim() == 2 && object.dims()[0] == object.dims()[1] {
            csv_cell(
                bdm::normalized_bdm(object, table, configs.first().map_or(2, |c| c.block_size)),
                &mut notes,
                id,
                "nbdm",
            )
        } else {
            "-".to_string()
        };
        let _ = writeln!(out, ",{nbdm},{}", notes.join("; "));
    }
    out
}

/// Deterministic corpus of `(G, line_graph(G))` pairs with 8..=16 vertices,
/// reproducible from the seed.
pub fn line_graph_pair_corpus(seed: u64, pairs: usize) -> Vec<(Graph, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::with_capacity(pairs);
    while corpus.len() < pairs {
        let n = 8 + (corpus.len() % 9);
        let g = random_graph(n, 0.25, &mut rng);
        if g.edge_count() == 0 {
            continue;
        }
        let lg = line_graph(&g).expect("graph has edges");
        corpus.push((g, lg));
    }
    corpus
}

/// BDM columns for a pair corpus plus their Spearman correlation:
/// `(csv, rho)`. Both graphs of a pair are evaluated as adjacency matrices
/// with a plain non-overlapping decomposition.
pub fn pair_report(
    pairs: &[(Graph, Graph)],
    table: &CtmTable,
    block_size: usize,
) -> Result<(String, f64)> {
    let config = BdmConfig::non_overlapping(block_size);
    let mut left = Vec::with_capacity(pairs.len());
    let mut right = Vec::with_capacity(pairs.len());
    let mut csv = String::from("pair,n,bdm_graph,bdm_line_graph\n");
    for (i, (g, lg)) in pairs.iter().enumerate() {
        let a = bdm::bdm(&g.adjacency(), table, &config)?.value;
        let b = bdm::bdm(&lg.adjacency(), table, &config)?.value;
        let _ = writeln!(csv, "{i},{},{a:.6},{b:.6}", g.n());
        left.push(a);
        right.push(b);
    }
    let rho = spearman(&left, &right)?;
    let _ = writeln!(csv, "spearman,,{rho:.6},");
    Ok((csv, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctm::TableEntry;
    use crate::turing::RuleSpace;

    #[test]
    fn spearman_basics() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&xs, &xs).unwrap(), 1.0);
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(spearman(&xs, &rev).unwrap(), -1.0);
        let ys = [1.0, 3.0, 2.0, 4.0];
        assert!((spearman(&xs, &ys).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn spearman_monotone_transform_invariance() {
        let xs = [0.4f64, 1.9, 0.1, 7.5, 3.3];
        let ys: Vec<f64> = xs.iter().map(|&v| v.exp() + 2.0).collect();
        assert_eq!(spearman(&xs, &ys).unwrap(), 1.0);
    }

    #[test]
    fn spearman_errors() {
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(matches!(
            spearman(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]),
            Err(Error::ConstantInput(_))
        ));
    }

    #[test]
    fn spearman_handles_ties() {
        // xs has a tie; textbook average-rank computation.
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ys = [10.0, 20.0, 30.0, 40.0];
        let rho = spearman(&xs, &ys).unwrap();
        // ranks x: 1, 2.5, 2.5, 4 vs y: 1,2,3,4 -> 0.9486...
        assert!((rho - 0.948_683_298_050_513_8).abs() < 1e-12);
    }

    #[test]
    fn thue_morse_prefix() {
        assert_eq!(thue_morse(16).key(), "0110100110010110");
        let tm = thue_morse(64);
        let ones = tm.data().iter().filter(|&&b| b == 1).count();
        assert_eq!(ones, 32);
    }

    #[test]
    fn binary_string_enumeration() {
        let strings = all_binary_strings(3);
        assert_eq!(strings.len(), 8);
        assert_eq!(strings[0].key(), "000");
        assert_eq!(strings[5].key(), "101");
    }

    fn tiny_table(len: usize) -> CtmTable {
        // Injected 1D table covering all strings up to `len` with values
        // that grow with length and ones-balance.
        let space = RuleSpace::new(5, 2, 1).unwrap();
        let mut rows = Vec::new();
        for l in 1..=len {
            for v in 0..(1u32 << l) {
                let data: Vec<u8> = (0..l).rev().map(|i| ((v >> i) & 1) as u8).collect();
                let ones = data.iter().filter(|&&b| b == 1).count();
                let bits = 2.0 * l as f64 + ones.min(l - ones) as f64 + 0.01 * v as f64;
                rows.push((
                    Block::string(data).unwrap(),
                    TableEntry {
                        count: Some(7),
                        bits,
                    },
                ));
            }
        }
        CtmTable::from_rows(space, 100, 1 << 16, 1.0, rows).unwrap()
    }

    #[test]
    fn sweep_identity_config_is_perfectly_correlated() {
        let table = tiny_table(6);
        let strings = all_binary_strings(6);
        let report =
            correlation_sweep(&strings, &table, &[(6, 0), (3, 0), (9, 0), (3, 3)]).unwrap();
        assert_eq!(report.rows[0].label, "b6o0");
        assert_eq!(report.rows[0].rho, Some(1.0));
        assert!(report.rows[2].rho.is_none()); // block 9 > length 6
        assert!(report.rows[2].note.contains("skipped"));
        assert!(report.rows[3].rho.is_none()); // overlap = block
                                               // Baseline rows are present.
        assert_eq!(report.rows[report.rows.len() - 2].label, "H1");
        assert_eq!(report.rows[report.rows.len() - 1].label, "best_Hl");
    }

    #[test]
    fn sweep_is_deterministic() {
        let table = tiny_table(5);
        let strings = all_binary_strings(5);
        let configs = [(5, 0), (4, 2), (2, 1), (1, 0)];
        let a = correlation_sweep(&strings, &table, &configs).unwrap();
        let b = correlation_sweep(&strings, &table, &configs).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn measure_report_shapes() {
        let table = tiny_table(4);
        let empty = measure_report(&[], &table, &[BdmConfig::non_overlapping(4)]);
        assert_eq!(empty.lines().count(), 1); // header only
        let objects = vec![
            ("a".to_string(), Block::from_digits("01010101").unwrap()),
            ("b".to_string(), Block::from_digits("00000000").unwrap()),
        ];
        let csv = measure_report(&objects, &table, &[BdmConfig::non_overlapping(4)]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("id,h1,best_l,best_hl,bdm_b4o0,nbdm,notes\n"));
    }

    #[test]
    fn measure_report_annotates_errors() {
        let table = tiny_table(4);
        // String shorter than the block: the BDM cell fails, row survives.
        let objects = vec![("tiny".to_string(), Block::from_digits("01").unwrap())];
        let csv = measure_report(&objects, &table, &[BdmConfig::non_overlapping(4)]);
        let row = csv.lines().nth(1).unwrap();
        assert!(row.contains(",-,"), "{row}");
        assert!(row.contains("below block size"), "{row}");
    }

    #[test]
    fn corpus_is_deterministic_and_in_range() {
        let a = line_graph_pair_corpus(99, 30);
        let b = line_graph_pair_corpus(99, 30);
        assert_eq!(a, b);
        assert_eq!(a.len(), 30);
        for (g, lg) in &a {
            assert!((8..=16).contains(&g.n()));
            assert_eq!(lg.n(), g.edge_count());
        }
    }
}
