//! Clique partitions and the entropies built on them.

use crate::error::{Error, Result};
use crate::filtration::equivalence_classes;
use crate::graph::Graph;
use crate::numeric::shannon_bits;
use crate::weights::WeightVector;

use super::Caps;

/// A partition of `V` into cliques; blocks ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CliquePartition {
    pub blocks: Vec<Vec<usize>>,
}

impl CliquePartition {
    pub(crate) fn from_masks(masks: &[u64]) -> Self {
        CliquePartition { blocks: masks.iter().map(|&m| bits(m).collect()).collect() }
    }
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Streams every clique partition exactly once. Vertex `i` is placed into
/// the lowest-indexed compatible block first, then into a new block.
pub struct CliquePartitions {
    nbr: Vec<u64>,
    blocks: Vec<u64>,
    choice: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn clique_partitions(g: &Graph, caps: &Caps) -> Result<CliquePartitions> {
    if g.len() > caps.max_partition_vertices.min(super::PARTITION_VERTEX_CEILING) {
        return Err(Error::CapExceeded {
            what: "clique-partition vertex",
            limit: caps.max_partition_vertices,
            flag: "partitions",
        });
    }
    Ok(CliquePartitions {
        nbr: (0..g.len()).map(|v| g.neighbor_mask(v)).collect(),
        blocks: Vec::new(),
        choice: Vec::new(),
        started: false,
        done: g.is_empty(),
    })
}

impl CliquePartitions {
    fn fits(&self, v: usize, c: usize) -> bool {
        c == self.blocks.len() || self.blocks[c] & !self.nbr[v] == 0
    }

    fn place(&mut self, v: usize, c: usize) {
        if c == self.blocks.len() {
            self.blocks.push(1 << v);
        } else {
            self.blocks[c] |= 1 << v;
        }
        self.choice.push(c);
    }

    fn unplace(&mut self, v: usize) -> usize {
        let c = self.choice.pop().expect("a placed vertex");
        self.blocks[c] &= !(1u64 << v);
        if self.blocks[c] == 0 {
            self.blocks.pop();
        }
        c
    }

    fn fill_from(&mut self, start: usize) {
        for v in start..self.nbr.len() {
            let c = (0..=self.blocks.len()).find(|&c| self.fits(v, c)).expect("a new block always fits");
            self.place(v, c);
        }
    }

    /// Moves to the next partition; the current one is then `blocks()`.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            return true;
        }
        let n = self.nbr.len();
        let mut v = n;
        while v > 0 {
            v -= 1;
            let old = self.unplace(v);
            if let Some(c) = (old + 1..=self.blocks.len()).find(|&c| self.fits(v, c)) {
                self.place(v, c);
                self.fill_from(v + 1);
                return true;
            }
        }
        self.done = true;
        false
    }

    /// Blocks of the current partition as vertex bitmasks.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

impl Iterator for CliquePartitions {
    type Item = CliquePartition;

    fn next(&mut self) -> Option<CliquePartition> {
        if self.advance() {
            Some(CliquePartition::from_masks(&self.blocks))
        } else {
            None
        }
    }
}

fn masses(pi: &WeightVector, n: usize) -> Result<Vec<f64>> {
    if pi.len() != n {
        return Err(Error::InvalidParameter(format!("distribution has {} entries for {n} vertices", pi.len())));
    }
    Ok(pi.to_f64_vec())
}

/// Minimum over clique partitions of the Shannon entropy (bits) of block masses.
pub fn graph_entropy(g: &Graph, pi: &WeightVector, caps: &Caps) -> Result<f64> {
    let p = masses(pi, g.len())?;
    let mut parts = clique_partitions(g, caps)?;
    let mut best = f64::INFINITY;
    while parts.advance() {
        let h = shannon_bits(parts.blocks().iter().map(|&m| bits(m).map(|v| p[v]).sum::<f64>()));
        best = best.min(h);
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

/// Shannon entropy (bits) of the masses of the closed-neighborhood classes.
pub fn class_entropy(g: &Graph, pi: &WeightVector) -> Result<f64> {
    let p = masses(pi, g.len())?;
    let classes = equivalence_classes(g);
    Ok(shannon_bits(classes.classes.iter().map(|c| c.iter().map(|&v| p[v]).sum::<f64>())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples::*;
    use crate::numeric::q;
    use crate::rules::w_cu;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn caps() -> Caps {
        Caps::default()
    }

    /// All set partitions (restricted growth strings), filtered by the clique test.
    fn bell_filter(g: &Graph) -> Vec<CliquePartition> {
        fn rec(g: &Graph, v: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<CliquePartition>) {
            if v == g.len() {
                if blocks.iter().all(|b| g.is_clique(b)) {
                    out.push(CliquePartition { blocks: blocks.clone() });
                }
                return;
            }
            for c in 0..=blocks.len() {
                if c == blocks.len() {
                    blocks.push(vec![v]);
                } else {
                    blocks[c].push(v);
                }
                rec(g, v + 1, blocks, out);
                if blocks[c].len() == 1 {
                    blocks.pop();
                } else {
                    blocks[c].pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(g, 0, &mut Vec::new(), &mut out);
        out
    }

    fn fv(xs: &[f64]) -> WeightVector {
        WeightVector::Float(xs.to_vec())
    }

    #[test]
    fn small_counts() {
        assert_eq!(clique_partitions(&Graph::complete(2), &caps()).unwrap().count(), 2);
        assert_eq!(clique_partitions(&Graph::new(3), &caps()).unwrap().count(), 1);
        let paw_parts: Vec<_> = clique_partitions(&paw(), &caps()).unwrap().collect();
        assert_eq!(paw_parts, bell_filter(&paw()));
        assert_eq!(paw_parts.len(), 7);
        assert_eq!(paw_parts[0].blocks, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(clique_partitions(&Graph::new(0), &caps()).unwrap().count(), 0);
    }

    #[test]
    fn partition_cap() {
        let e = clique_partitions(&Graph::new(13), &caps()).err().unwrap();
        assert!(matches!(e, Error::CapExceeded { flag: "partitions", .. }));
    }

    #[test]
    fn entropy_examples() {
        let g = paw();
        assert_eq!(graph_entropy(&g, &fv(&[0.5, 0.0, 0.25, 0.25]), &caps()).unwrap(), 1.0);
        let h = graph_entropy(&g, &WeightVector::uniform(4), &caps()).unwrap();
        assert!((h - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert_eq!(graph_entropy(&g, &fv(&[0.0, 1.0, 0.0, 0.0]), &caps()).unwrap(), 0.0);
        assert_eq!(class_entropy(&Graph::complete(4), &fv(&[0.1, 0.2, 0.3, 0.4])).unwrap(), 0.0);
        assert_eq!(class_entropy(&Graph::new(2), &WeightVector::uniform(2)).unwrap(), 1.0);
        let f2 = chain8();
        let h = class_entropy(&f2, &w_cu(&f2).unwrap()).unwrap();
        assert!((h - 5f64.log2()).abs() < 1e-12);
        let bad = WeightVector::Exact(vec![q(1, 1)]);
        assert!(graph_entropy(&g, &bad, &caps()).is_err());
    }

    fn random_graph(seed: u64, n: usize, p: f64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    fn random_simplex(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    proptest! {
        #[test]
        fn enumeration_matches_bell_filter(seed in 0u64..5_000, n in 1usize..8, p in 0.0f64..1.0) {
            let g = random_graph(seed, n, p);
            let ours: Vec<_> = clique_partitions(&g, &caps()).unwrap().collect();
            let mut sorted = ours.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), ours.len());
            prop_assert_eq!(ours, bell_filter(&g));
        }

        #[test]
        fn graph_entropy_is_concave(seed in 0u64..5_000, n in 1usize..8, p in 0.0f64..1.0, lambda in 0.0f64..1.0) {
            let g = random_graph(seed, n, p);
            let a = random_simplex(seed ^ 1, n);
            let b = random_simplex(seed ^ 2, n);
            let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
            let h = |v: &[f64]| graph_entropy(&g, &fv(v), &caps()).unwrap();
            prop_assert!(h(&mix) >= lambda * h(&a) + (1.0 - lambda) * h(&b) - 1e-12);
        }

        #[test]
        fn moving_mass_inside_a_class_keeps_graph_entropy(seed in 0u64..5_000, n in 2usize..8, p in 0.0f64..1.0, t in 0.0f64..1.0) {
            let mut g = random_graph(seed, n - 1, p);
            g.add_twin(0, "twin".into());
            let mut a = random_simplex(seed, n);
            let h0 = graph_entropy(&g, &fv(&a), &caps()).unwrap();
            let pair = a[0] + a[n - 1];
            a[0] = t * pair;
            a[n - 1] = pair - a[0];
            let h1 = graph_entropy(&g, &fv(&a), &caps()).unwrap();
            prop_assert!((h0 - h1).abs() < 1e-12);
        }
    }
}
