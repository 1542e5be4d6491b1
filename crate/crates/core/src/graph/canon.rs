//! Automorphism enumeration and canonical labeling for small graphs.

use super::Graph;

/// Every automorphism of `g`, by backtracking; `perm[v]` is the image of `v`.
/// Exponential in the worst case; intended for graphs of at most ~10 vertices.
pub fn automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.len();
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(g, &degrees, 0, &mut image, &mut used, &mut out);
    out
}

fn extend(g: &Graph, deg: &[usize], v: usize, image: &mut [usize], used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let n = g.len();
    if v == n {
        out.push(image.to_vec());
        return;
    }
    for u in 0..n {
        if used[u] || deg[u] != deg[v] {
            continue;
        }
        if (0..v).all(|w| g.has_edge(v, w) == g.has_edge(u, image[w])) {
            image[v] = u;
            used[u] = true;
            extend(g, deg, v + 1, image, used, out);
            used[u] = false;
        }
    }
    image[v] = usize::MAX;
}

/// Result of canonical labeling.
#[derive(Debug, Clone)]
pub struct CanonicalLabeling {
    /// Canonical position `k` holds original vertex `order[k]`.
    pub order: Vec<usize>,
    /// `g.permuted(&order)`; isomorphic inputs give identical graphs.
    pub graph: Graph,
    /// Smallest member of each vertex's automorphism orbit.
    pub orbit_of: Vec<usize>,
    /// Automorphisms found during the search; they generate the full group.
    pub generators: Vec<Vec<usize>>,
}

/// Individualization-refinement search with automorphism pruning.
pub fn canonical_labeling(g: &Graph) -> CanonicalLabeling {
    let n = g.len();
    let mut s = Search { g, first: None, best: None, generators: Vec::new() };
    let mut prefix = Vec::new();
    s.visit(vec![0; n], &mut prefix);
    let (_, order) = s.best.expect("search reaches at least one leaf");
    let mut parent: Vec<usize> = (0..n).collect();
    for p in &s.generators {
        for (v, &u) in p.iter().enumerate() {
            union(&mut parent, v, u);
        }
    }
    let orbit_of = (0..n).map(|v| find(&mut parent, v)).collect();
    CanonicalLabeling { graph: g.permuted(&order), order, orbit_of, generators: s.generators }
}

type Leaf = (Vec<bool>, Vec<usize>);

struct Search<'a> {
    g: &'a Graph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn visit(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>) {
        let colors = refine(self.g, colors);
        let n = colors.len();
        let mut count = vec![0usize; n];
        for &c in &colors {
            count[c] += 1;
        }
        let Some(cell) = (0..n).find(|&c| count[c] > 1) else {
            self.leaf(&colors);
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == cell).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &members {
            if !explored.is_empty() {
                let mut parent: Vec<usize> = (0..n).collect();
                for p in self.generators.iter().filter(|p| prefix.iter().all(|&w| p[w] == w)) {
                    for (a, &b) in p.iter().enumerate() {
                        union(&mut parent, a, b);
                    }
                }
                let rv = find(&mut parent, v);
                if explored.iter().any(|&w| find(&mut parent, w) == rv) {
                    continue;
                }
            }
            explored.push(v);
            let next = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| if u == v { cell } else if c >= cell { c + 1 } else { c })
                .collect();
            prefix.push(v);
            self.visit(next, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, colors: &[usize]) {
        let n = colors.len();
        let mut order = vec![0; n];
        for (v, &c) in colors.iter().enumerate() {
            order[c] = v;
        }
        let mut key = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                key.push(self.g.has_edge(order[i], order[j]));
            }
        }
        let Some((first_key, first_order)) = &self.first else {
            self.first = Some((key.clone(), order.clone()));
            self.best = Some((key, order));
            return;
        };
        if &key == first_key {
            self.generators.push(mapping(first_order, &order));
        }
        let (best_key, best_order) = self.best.as_ref().expect("set with first");
        if &key == best_key && best_key != first_key {
            self.generators.push(mapping(best_order, &order));
        } else if &key < best_key {
            self.best = Some((key, order));
        }
    }
}

/// The automorphism sending `from[k]` to `to[k]`.
fn mapping(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut p = vec![0; from.len()];
    for (a, b) in from.iter().zip(to) {
        p[*a] = *b;
    }
    p
}

/// Colour refinement to the coarsest equitable partition finer than `colors`.
/// Colours stay ranks, and the ordering of cells depends only on structure.
fn refine(g: &Graph, mut colors: Vec<usize>) -> Vec<usize> {
    let n = colors.len();
    loop {
        let cells = colors.iter().copied().max().map_or(0, |m| m + 1);
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).ones().map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() == cells {
            return colors;
        }
        colors = sigs.iter().map(|s| distinct.binary_search(&s).expect("present")).collect();
    }
}

fn find(parent: &mut [usize], v: usize) -> usize {
    let mut r = v;
    while parent[r] != r {
        r = parent[r];
    }
    let mut v = v;
    while parent[v] != r {
        let next = parent[v];
        parent[v] = r;
        v = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // Keep the smaller index as representative.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi] = lo;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn group_orders() {
        assert_eq!(automorphisms(&Graph::new(5)).len(), factorial(5));
        assert_eq!(automorphisms(&cycle(6)).len(), 12);
        assert_eq!(automorphisms(&path(4)).len(), 2);
        assert_eq!(automorphisms(&paw()).len(), 2);
        assert_eq!(automorphisms(&Graph::new(0)).len(), 1);
    }

    #[test]
    fn orbits_match_brute_force() {
        for g in [chain8(), paw(), cycle(7), path(5), Graph::new(6), Graph::complete(4)] {
            let c = canonical_labeling(&g);
            let autos = automorphisms(&g);
            for v in 0..g.len() {
                let min = autos.iter().map(|p| p[v]).min().unwrap();
                assert_eq!(c.orbit_of[v], min);
            }
        }
    }

    #[test]
    fn edgeless_twelve_is_fast() {
        let c = canonical_labeling(&Graph::new(12));
        assert!(c.orbit_of.iter().all(|&o| o == 0));
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
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

    proptest! {
        #[test]
        fn canonical_form_is_isomorphism_invariant(seed in 0u64..5_000, n in 1usize..9, p in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, n, p);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = g.permuted(&perm);
            let (cg, ch) = (canonical_labeling(&g), canonical_labeling(&h));
            prop_assert_eq!(&cg.graph.permuted(&(0..n).collect::<Vec<_>>()).edges().collect::<Vec<_>>(),
                            &ch.graph.edges().collect::<Vec<_>>());
            for gen in &cg.generators {
                for (u, v) in g.edges() {
                    prop_assert!(g.has_edge(gen[u], gen[v]));
                }
            }
            let autos = automorphisms(&g);
            for v in 0..n {
                let min = autos.iter().map(|p| p[v]).min().unwrap();
                prop_assert_eq!(cg.orbit_of[v], min);
            }
        }
    }
}
