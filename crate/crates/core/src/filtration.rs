//! Neighborhood graphs `G_r`, closed-neighborhood classes, quotients and the
//! threshold sweep shared by the metric evaluators.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::MetricInstance;

/// Edge `{x, y}` iff `d(x, y) ≤ r`.
pub fn neighborhood_graph(inst: &MetricInstance, r: f64) -> Graph {
    let n = inst.len();
    let mut g = Graph::with_labels(inst.labels().to_vec());
    for i in 0..n {
        for j in i + 1..n {
            if inst.d(i, j) <= r {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Distinct distances in `(0, alpha]`, ascending.
pub fn threshold_radii(inst: &MetricInstance, alpha: f64) -> Vec<f64> {
    let mut radii: Vec<f64> = inst.distance_set().distinct().into_iter().filter(|&d| d > 0.0 && d <= alpha).collect();
    radii.dedup();
    radii
}

/// Partition of the vertices by equality of closed neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    /// Classes ordered by smallest member, members ascending.
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl ClassPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_size(&self, v: usize) -> usize {
        self.classes[self.class_of[v]].len()
    }
}

pub fn equivalence_classes(g: &Graph) -> ClassPartition {
    let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(g.len());
    for v in 0..g.len() {
        let c = *index.entry(g.closed_neighborhood(v)).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(v);
        class_of.push(c);
    }
    ClassPartition { classes, class_of }
}

/// `G/≡` with the vertex-to-class map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    pub graph: Graph,
    pub partition: ClassPartition,
}

pub fn quotient(g: &Graph) -> QuotientGraph {
    let partition = equivalence_classes(g);
    let labels = partition
        .classes
        .iter()
        .map(|c| c.iter().map(|&v| g.labels()[v].as_str()).collect::<Vec<_>>().join("+"))
        .collect();
    let mut q = Graph::with_labels(labels);
    for (a, ca) in partition.classes.iter().enumerate() {
        for (b, cb) in partition.classes.iter().enumerate().skip(a + 1) {
            let adjacent = g.has_edge(ca[0], cb[0]);
            debug_assert!(
                ca.iter().all(|&u| cb.iter().all(|&v| g.has_edge(u, v) == adjacent)),
                "cross adjacency between classes must be constant"
            );
            if adjacent {
                q.add_edge(a, b);
            }
        }
    }
    QuotientGraph { graph: q, partition }
}

/// `∪_z [d(x,z) − d(x,y), d(x,z) + d(x,y)] ∩ [0, ∞)` over every `z ≠ y`,
/// merged into disjoint closed intervals in ascending order.
pub fn forbidden_intervals(inst: &MetricInstance, x: usize, y: usize) -> Result<Vec<(f64, f64)>> {
    let n = inst.len();
    if x >= n || y >= n {
        return Err(Error::UnknownElement(x.max(y).to_string()));
    }
    if x == y {
        return Err(Error::InvalidParameter("forbidden intervals need x ≠ y".into()));
    }
    let h = inst.d(x, y);
    let mut iv: Vec<(f64, f64)> = (0..n)
        .filter(|&z| z != y)
        .map(|z| ((inst.d(x, z) - h).max(0.0), inst.d(x, z) + h))
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    Ok(merged)
}

pub fn interval_measure(iv: &[(f64, f64)]) -> f64 {
    iv.iter().map(|(a, b)| b - a).sum()
}

/// One constant piece of the filtration: on `[lo, hi)` the graph is `graph`.
#[derive(Debug, Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub graph: Graph,
}

/// Graphs on `[0, t₁), [t₁, t₂), …, [t_ℓ, α]` where `t_j` are the threshold
/// radii. Zero-distance pairs are present from `r = 0`; the edges at each
/// threshold are added before the interval that starts there.
pub fn sweep(inst: &MetricInstance, alpha: f64) -> Vec<Piece> {
    let n = inst.len();
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (inst.d(i, j), i, j)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut g = Graph::with_labels(inst.labels().to_vec());
    let mut next = 0;
    let add_up_to = |g: &mut Graph, r: f64, next: &mut usize| {
        while *next < pairs.len() && pairs[*next].0 <= r {
            g.add_edge(pairs[*next].1, pairs[*next].2);
            *next += 1;
        }
    };
    add_up_to(&mut g, 0.0, &mut next);
    let radii = threshold_radii(inst, alpha);
    let mut bounds = vec![0.0];
    bounds.extend(radii.iter().copied());
    bounds.push(alpha);
    let mut pieces = Vec::with_capacity(bounds.len() - 1);
    for j in 0..bounds.len() - 1 {
        if j > 0 {
            add_up_to(&mut g, bounds[j], &mut next);
        }
        pieces.push(Piece { lo: bounds[j], hi: bounds[j + 1], graph: g.clone() });
    }
    pieces
}
