//! The shipped graph corpus is fully derived from fixed seeds; these tests
//! pin the files to their generators so regeneration is always byte-exact.

use bdmkit::block::Block;
use bdmkit::harness::{line_graph_pair_corpus, Graph};
use std::path::Path;

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

#[test]
fn named_graphs_match_constructors() {
    let cases = [
        ("star_k14.graph", Graph::star(4)),
        (
            "c4_k1.graph",
            Graph::cycle(4).disjoint_union(&Graph::new(1, []).unwrap()),
        ),
        ("k3.graph", Graph::complete(3)),
        ("p3.graph", Graph::path(3)),
    ];
    for (name, expect) in cases {
        let shipped = std::fs::read_to_string(data_dir().join("graphs").join(name)).unwrap();
        assert_eq!(shipped, expect.to_text(), "{name}");
    }
}

#[test]
fn pair_corpus_regenerates_identically() {
    let pairs = line_graph_pair_corpus(20240917, 30);
    for (i, (g, lg)) in pairs.iter().enumerate() {
        let g_file = data_dir().join(format!("graphs/pairs/pair_{i:02}_g.graph"));
        let l_file = data_dir().join(format!("graphs/pairs/pair_{i:02}_line.graph"));
        assert_eq!(std::fs::read_to_string(g_file).unwrap(), g.to_text());
        assert_eq!(std::fs::read_to_string(l_file).unwrap(), lg.to_text());
    }
}

#[test]
fn string_corpus_is_well_formed() {
    let text =
        std::fs::read_to_string(data_dir().join("corpus/high_entropy_strings.txt")).unwrap();
    let mut count = 0;
    for line in text.lines() {
        let block = Block::from_digits(line).unwrap();
        assert_eq!(block.cells(), 12);
        assert!(block.min_alphabet() <= 2);
        count += 1;
    }
    assert_eq!(count, 116);
}
