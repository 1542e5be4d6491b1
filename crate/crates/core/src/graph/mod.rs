//! Finite simple undirected graphs over element indices.

mod canon;

pub use canon::{automorphisms, canonical_labeling, CanonicalLabeling};

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Vertex set over `0..n`.
pub type VertexSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
    labels: Vec<String>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![FixedBitSet::with_capacity(n); n], labels: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        Graph { adj: vec![FixedBitSet::with_capacity(n); n], labels }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.len());
        self.labels = labels;
    }

    /// Self-loops are ignored: closed neighborhoods add the vertex itself.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn closed_neighborhood(&self, v: usize) -> FixedBitSet {
        let mut s = self.adj[v].clone();
        s.insert(v);
        s
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Subgraph induced by `keep` (in that order).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::with_labels(keep.iter().map(|&v| self.labels[v].clone()).collect());
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// `G \ {v}` together with the map from new indices to old ones.
    pub fn remove_vertex(&self, v: usize) -> (Graph, Vec<usize>) {
        let keep: Vec<usize> = (0..self.len()).filter(|&u| u != v).collect();
        (self.induced(&keep), keep)
    }

    /// New vertex `k` is old vertex `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        self.induced(perm)
    }

    /// Adds a vertex with closed neighborhood equal to `N[v]`; returns its index.
    pub fn add_twin(&mut self, v: usize, label: String) -> usize {
        let n = self.len();
        for a in &mut self.adj {
            a.grow(n + 1);
        }
        let mut nb = self.adj[v].clone();
        nb.grow(n + 1);
        self.adj.push(FixedBitSet::with_capacity(n + 1));
        self.labels.push(label);
        for u in nb.ones() {
            self.add_edge(n, u);
        }
        self.add_edge(n, v);
        n
    }

    /// Bitmask form of a neighborhood; only valid for graphs with ≤ 64 vertices.
    pub(crate) fn neighbor_mask(&self, v: usize) -> u64 {
        debug_assert!(self.len() <= 64);
        self.adj[v].ones().fold(0u64, |m, u| m | (1 << u))
    }

    /// Text form: a `labels` header, then one `u v` index pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::from("labels");
        for l in &self.labels {
            s.push(' ');
            s.push_str(l);
        }
        s.push('\n');
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses the edge-list format. Endpoints may be given as labels or indices.
    /// A header `n <count>` may replace the label list.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::Schema("empty edge list".into()))?;
        let mut tokens = header.split_whitespace();
        let mut g = match tokens.next() {
            Some("labels") => {
                let labels: Vec<String> = tokens.map(str::to_string).collect();
                let mut seen = std::collections::HashSet::new();
                for l in &labels {
                    if !seen.insert(l) {
                        return Err(Error::Schema(format!("duplicate label `{l}`")));
                    }
                }
                Graph::with_labels(labels)
            }
            Some("n") => {
                let n: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Schema("header `n` needs a vertex count".into()))?;
                Graph::new(n)
            }
            _ => return Err(Error::Schema("edge list must start with `labels …` or `n <count>`".into())),
        };
        for (lineno, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Schema(format!("line {}: expected `u v`", lineno + 1)));
            }
            let u = g.resolve(parts[0])?;
            let v = g.resolve(parts[1])?;
            if u == v {
                return Err(Error::Schema(format!("line {}: self-loop on `{}`", lineno + 1, parts[0])));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn resolve(&self, token: &str) -> Result<usize> {
        if let Some(i) = self.labels.iter().position(|l| l == token) {
            return Ok(i);
        }
        match token.parse::<usize>() {
            Ok(i) if i < self.len() => Ok(i),
            _ => Err(Error::UnknownElement(token.to_string())),
        }
    }
}

/// Maps each vertex set to sorted index lists.
pub fn set_to_vec(s: &FixedBitSet) -> Vec<usize> {
    s.ones().collect()
}

/// Small named graphs used by probes, audits and tests.
pub mod examples {
    use super::Graph;

    /// A triangle b, c, d with a pendant a; vertices a, b, c, d = 0..4.
    pub fn paw() -> Graph {
        let mut g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (2, 3)]);
        g.set_labels(vec!["a".into(), "b".into(), "c".into(), "d".into()]);
        g
    }

    /// Eight vertices in five classes: a triangle joined to a hub, two twins
    /// below it, and two leaves hanging off the twins.
    pub fn chain8() -> Graph {
        Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5), (4, 6), (5, 6), (4, 7), (5, 7)],
        )
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }
}
