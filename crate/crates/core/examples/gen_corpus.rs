//! Regenerates the graph corpus shipped under `data/graphs/`.
//!
//! Usage: `cargo run -p bdmkit --example gen_corpus -- data/graphs`
//!
//! Everything is derived from fixed seeds; rerunning reproduces the shipped
//! files byte for byte (a test asserts this).

use bdmkit::harness::{line_graph_pair_corpus, Graph};
use std::path::PathBuf;

/// Seed of the line-graph pair corpus.
pub const PAIR_CORPUS_SEED: u64 = 20240917;
pub const PAIR_CORPUS_SIZE: usize = 30;

fn main() -> std::io::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/graphs".to_string())
        .into();
    std::fs::create_dir_all(dir.join("pairs"))?;

    // The classical smallest cospectral pair and a non-cospectral pair.
    let named = [
        ("star_k14", Graph::star(4)),
        (
            "c4_k1",
            Graph::cycle(4).disjoint_union(&Graph::new(1, []).unwrap()),
        ),
        ("k3", Graph::complete(3)),
        ("p3", Graph::path(3)),
    ];
    for (name, g) in named {
        std::fs::write(dir.join(format!("{name}.graph")), g.to_text())?;
    }

    for (i, (g, lg)) in line_graph_pair_corpus(PAIR_CORPUS_SEED, PAIR_CORPUS_SIZE)
        .iter()
        .enumerate()
    {
        std::fs::write(dir.join(format!("pairs/pair_{i:02}_g.graph")), g.to_text())?;
        std::fs::write(
            dir.join(format!("pairs/pair_{i:02}_line.graph")),
            lg.to_text(),
        )?;
    }
    println!("corpus written to {}", dir.display());
    Ok(())
}
