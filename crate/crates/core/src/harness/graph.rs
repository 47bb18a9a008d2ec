//! Simple undirected graphs with exact integer spectra.
//!
//! Characteristic polynomials are computed over the integers (no floating
//! point), so cospectrality is decidable with no tolerance.

use crate::block::Block;
use crate::error::{Error, Result};
use rand::Rng;
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// Simple undirected graph: `n` vertices, edges as ordered pairs `u < v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::ShapeMismatch(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::ShapeMismatch(format!(
                    "edge ({a},{b}) outside vertex range 0..{n}"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Adjacency matrix as a binary block (the object BDM evaluates).
    pub fn adjacency(&self) -> Block {
        let mut data = vec![0u8; self.n * self.n];
        for &(a, b) in &self.edges {
            data[a * self.n + b] = 1;
            data[b * self.n + a] = 1;
        }
        Block::matrix(self.n, self.n, data).expect("square adjacency")
    }

    /// Applies a vertex relabeling; `perm[v]` is the new name of `v`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Graph::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }

    /// Parses the graph file format: first line `n m`, then `m` lines
    /// `u v` with 0-based endpoints `u < v`.
    pub fn from_text(text: &str, origin: &str) -> Result<Graph> {
        let err = |line: usize, msg: String| Error::ParseError {
            path: origin.to_string(),
            line,
            msg,
        };
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let mut it = head.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(1, "expected `n m`".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(1, "expected `n m`".into()))?;
        if it.next().is_some() {
            return Err(err(1, "trailing tokens after `n m`".into()));
        }
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let lineno = i + 2;
            let row = lines
                .next()
                .ok_or_else(|| err(lineno, "missing edge line".into()))?;
            let mut it = row.split_whitespace();
            let u: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(lineno, "expected `u v`".into()))?;
            let v: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(lineno, "expected `u v`".into()))?;
            if u >= v {
                return Err(err(lineno, format!("edge must satisfy u < v, got {u} {v}")));
            }
            edges.push((u, v));
        }
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(err(m + 2, format!("unexpected trailing line `{extra}`")));
        }
        Graph::new(n, edges).map_err(|e| err(1, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
            .expect("valid complete graph")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid cycle")
    }

    /// The star `K_{1,k}`: center 0 joined to `k` leaves.
    pub fn star(k: usize) -> Graph {
        Graph::new(k + 1, (1..=k).map(|v| (0, v))).expect("valid star")
    }

    /// Disjoint union, vertices of `other` shifted past `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        Graph::new(
            self.n + other.n,
            self.edges()
                .chain(other.edges().map(|(a, b)| (a + shift, b + shift))),
        )
        .expect("valid union")
    }
}

/// Exact integer characteristic polynomial of the adjacency matrix,
/// `det(lambda I - A)`, coefficients in descending degree order with
/// leading coefficient 1. Computed by trace iteration with exact integer
/// divisions; i128 arithmetic covers graphs up to a few dozen vertices.
pub fn char_poly(g: &Graph) -> Vec<i128> {
    let n = g.n();
    let mut a = vec![vec![0i128; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = 1;
        a[v][u] = 1;
    }
    let mut coeffs = vec![0i128; n + 1];
    coeffs[0] = 1;
    let mut m: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    for k in 1..=n as i128 {
        // m <- a * m
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for (j, row) in m.iter().enumerate() {
                if a[i][j] != 0 {
                    for (cell, &mv) in next[i].iter_mut().zip(row) {
                        *cell = cell
                            .checked_add(a[i][j].checked_mul(mv).expect("coefficient overflow"))
                            .expect("coefficient overflow");
                    }
                }
            }
        }
        m = next;
        let trace: i128 = (0..n).map(|i| m[i][i]).sum();
        debug_assert_eq!(trace % k, 0, "trace iteration divides exactly");
        let c = -trace / k;
        coeffs[k as usize] = c;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    coeffs
}

/// Two graphs are cospectral when their characteristic polynomials agree
/// exactly.
pub fn is_cospectral(a: &Graph, b: &Graph) -> bool {
    char_poly(a) == char_poly(b)
}

/// The line graph: one vertex per edge of `g`, adjacent when the edges
/// share an endpoint.
pub fn line_graph(g: &Graph) -> Result<Graph> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() {
        return Err(Error::EdgelessGraph);
    }
    let mut new_edges = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if a == c || a == d || b == c || b == d {
                new_edges.push((i, j));
            }
        }
    }
    Graph::new(edges.len(), new_edges)
}

/// Erdos-Renyi style random graph with edge probability `p`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, edges).expect("valid random graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn char_poly_small_cases() {
        // Single vertex: lambda.
        assert_eq!(char_poly(&Graph::new(1, []).unwrap()), vec![1, 0]);
        // Triangle: lambda^3 - 3 lambda - 2.
        assert_eq!(char_poly(&Graph::complete(3)), vec![1, 0, -3, -2]);
        // Path on 3: lambda^3 - 2 lambda.
        assert_eq!(char_poly(&Graph::path(3)), vec![1, 0, -2, 0]);
    }

    #[test]
    fn smallest_cospectral_pair() {
        let star = Graph::star(4);
        let c4_k1 = Graph::cycle(4).disjoint_union(&Graph::new(1, []).unwrap());
        assert_eq!(char_poly(&star), char_poly(&c4_k1));
        assert!(is_cospectral(&star, &c4_k1));
        assert!(!is_cospectral(&Graph::complete(3), &Graph::path(3)));
        assert!(is_cospectral(&star, &star));
    }

    #[test]
    fn char_poly_invariant_under_relabeling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let g = random_graph(9, 0.4, &mut rng);
            let reference = char_poly(&g);
            for _ in 0..10 {
                let mut perm: Vec<usize> = (0..9).collect();
                perm.shuffle(&mut rng);
                assert_eq!(char_poly(&g.relabeled(&perm).unwrap()), reference);
            }
        }
    }

    #[test]
    fn line_graph_cases() {
        // Two edges sharing a vertex contract to K2.
        assert_eq!(line_graph(&Graph::path(3)).unwrap(), Graph::complete(2));
        // The triangle is self-dual under the line transform.
        assert_eq!(line_graph(&Graph::complete(3)).unwrap(), Graph::complete(3));
        // The claw maps to the triangle.
        assert_eq!(line_graph(&Graph::star(3)).unwrap(), Graph::complete(3));
        assert!(matches!(
            line_graph(&Graph::new(3, []).unwrap()),
            Err(Error::EdgelessGraph)
        ));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let g = Graph::cycle(5);
        let text = g.to_text();
        assert_eq!(Graph::from_text(&text, "mem").unwrap(), g);
        assert!(Graph::from_text("3 1\n2 1\n", "mem").is_err()); // u >= v
        assert!(Graph::from_text("3 2\n0 1\n", "mem").is_err()); // missing edge
        assert!(Graph::from_text("3 1\n0 7\n", "mem").is_err()); // out of range
    }

    #[test]
    fn adjacency_is_symmetric_zero_diagonal() {
        let g = Graph::cycle(6);
        let a = g.adjacency();
        for i in 0..6 {
            assert_eq!(a.at(i, i), 0);
            for j in 0..6 {
                assert_eq!(a.at(i, j), a.at(j, i));
            }
        }
    }
}
