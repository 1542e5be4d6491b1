//! Symmetry and locality of graph rules on random graphs with planted twins.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::equivalence_classes;
use crate::graph::automorphisms;
use crate::graph::Graph;
use crate::numeric::{q_int, Q};
use crate::rules::{maximal_cliques, Caps, GraphWeighting};
use crate::weights::WeightVector;

/// Witnesses kept per report.
pub const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSuiteConfig {
    pub graphs: usize,
    pub max_vertices: usize,
    pub seed: u64,
    /// Allowed deviation for floating rules; exact rules must match exactly.
    pub float_tol: f64,
}

impl Default for GraphSuiteConfig {
    fn default() -> Self {
        GraphSuiteConfig { graphs: 500, max_vertices: 8, seed: 0, float_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphProperty {
    Symmetry,
    Locality,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphViolation {
    pub graph_index: usize,
    pub property: GraphProperty,
    pub edges: String,
    pub detail: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GraphCheck {
    pub symmetry_checks: usize,
    pub locality_checks: usize,
    pub violations: Vec<GraphViolation>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSuiteReport {
    pub rule: String,
    pub graphs: usize,
    pub seed: u64,
    pub symmetry_checks: usize,
    pub locality_checks: usize,
    pub symmetry_violations: usize,
    pub locality_violations: usize,
    /// Largest deviation seen by any comparison, violating or not.
    pub max_deviation: f64,
    pub witnesses: Vec<GraphViolation>,
}

impl GraphSuiteReport {
    pub fn violations(&self) -> usize {
        self.symmetry_violations + self.locality_violations
    }
}

/// Graph `index` of the suite: `G(m, p)` on a random `m ≤ n`, then twins of
/// random vertices until there are `n` vertices.
pub fn suite_graph(seed: u64, index: usize, max_vertices: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = rng.gen_range(2..=max_vertices.max(2));
    let base = rng.gen_range(n.div_ceil(2)..=n);
    let p = rng.gen_range(0.15..0.85);
    let mut g = Graph::new(base);
    for u in 0..base {
        for v in u + 1..base {
            if rng.gen::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    while g.len() < n {
        let v = rng.gen_range(0..g.len());
        let label = g.len().to_string();
        g.add_twin(v, label);
    }
    g
}

fn deviation(a: &WeightVector, i: usize, b: &WeightVector, j: usize) -> (bool, f64) {
    match (a, b) {
        (WeightVector::Exact(x), WeightVector::Exact(y)) => {
            let d = (crate::numeric::to_f64(&x[i]) - crate::numeric::to_f64(&y[j])).abs();
            (x[i] == y[j], d)
        }
        _ => {
            let d = (a.get_f64(i) - b.get_f64(j)).abs();
            (false, d)
        }
    }
}

/// Symmetry under every automorphism and locality under every clone removal.
pub fn check_graph(g: &Graph, rule: &dyn GraphWeighting, float_tol: f64) -> Result<GraphCheck> {
    let mut out = GraphCheck::default();
    if g.is_empty() {
        return Ok(out);
    }
    let w = rule.weigh(g)?;
    let note = |out: &mut GraphCheck, property, equal: bool, dev: f64, detail: String| {
        out.max_deviation = out.max_deviation.max(dev);
        if !equal && dev > float_tol {
            out.violations.push(GraphViolation { graph_index: 0, property, edges: g.to_edge_list(), detail, deviation: dev });
        }
    };
    for perm in automorphisms(g) {
        for v in 0..g.len() {
            if perm[v] == v {
                continue;
            }
            out.symmetry_checks += 1;
            let (equal, dev) = deviation(&w, v, &w, perm[v]);
            note(&mut out, GraphProperty::Symmetry, equal, dev, format!("w({v}) ≠ w({}) under automorphism {perm:?}", perm[v]));
        }
    }
    let classes = equivalence_classes(g);
    for class in classes.classes.iter().filter(|c| c.len() >= 2) {
        let closed = g.closed_neighborhood(class[0]);
        for &z in class {
            let (h, keep) = g.remove_vertex(z);
            let wh = rule.weigh(&h)?;
            for (k, &y) in keep.iter().enumerate() {
                if closed.contains(y) {
                    continue;
                }
                out.locality_checks += 1;
                let (equal, dev) = deviation(&w, y, &wh, k);
                note(&mut out, GraphProperty::Locality, equal, dev, format!("removing clone {z} moves far vertex {y}"));
            }
        }
    }
    Ok(out)
}

pub fn run_graph_suite(rule: &dyn GraphWeighting, cfg: &GraphSuiteConfig) -> Result<GraphSuiteReport> {
    if cfg.max_vertices > 10 {
        return Err(Error::InvalidParameter("graph suite is limited to 10 vertices (exhaustive automorphisms)".into()));
    }
    let checks: Vec<GraphCheck> = (0..cfg.graphs)
        .into_par_iter()
        .map(|i| {
            let mut c = check_graph(&suite_graph(cfg.seed, i, cfg.max_vertices), rule, cfg.float_tol)?;
            for v in &mut c.violations {
                v.graph_index = i;
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let mut report = GraphSuiteReport {
        rule: rule.name(),
        graphs: cfg.graphs,
        seed: cfg.seed,
        symmetry_checks: 0,
        locality_checks: 0,
        symmetry_violations: 0,
        locality_violations: 0,
        max_deviation: 0.0,
        witnesses: Vec::new(),
    };
    for c in checks {
        report.symmetry_checks += c.symmetry_checks;
        report.locality_checks += c.locality_checks;
        report.max_deviation = report.max_deviation.max(c.max_deviation);
        for v in c.violations {
            match v.property {
                GraphProperty::Symmetry => report.symmetry_violations += 1,
                GraphProperty::Locality => report.locality_violations += 1,
            }
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(v);
            }
        }
    }
    Ok(report)
}

/// Self-test rule: `w ∝ 1 + deg`. Symmetric, but removing a clone changes
/// the degrees of its neighbors and so the normalizer seen by far vertices.
#[derive(Debug, Clone, Copy)]
pub struct DegreeProportional;

impl GraphWeighting for DegreeProportional {
    fn name(&self) -> String {
        "degree-proportional".into()
    }

    fn weigh(&self, g: &Graph) -> Result<WeightVector> {
        if g.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let raw: Vec<Q> = (0..g.len()).map(|v| q_int(1 + g.degree(v))).collect();
        let total: Q = raw.iter().sum();
        Ok(WeightVector::Exact(raw.into_iter().map(|w| w / &total).collect()))
    }
}

/// Self-test rule: uniform, except vertex 0 counts twice.
#[derive(Debug, Clone, Copy)]
pub struct PlantedAsymmetry;

impl GraphWeighting for PlantedAsymmetry {
    fn name(&self) -> String {
        "planted-asymmetry".into()
    }

    fn weigh(&self, g: &Graph) -> Result<WeightVector> {
        if g.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = g.len();
        let total = q_int(n + 1);
        Ok(WeightVector::Exact((0..n).map(|v| q_int(if v == 0 { 2 } else { 1 }) / &total).collect()))
    }
}

/// The first clone `x` whose removal changes the clique cover other than by
/// deleting `x` from each clique.
#[derive(Debug, Clone, Serialize)]
pub struct CoverMismatch {
    pub removed: usize,
    pub expected: Vec<Vec<usize>>,
    pub found: Vec<Vec<usize>>,
}

pub fn clique_cover_invariance(g: &Graph, caps: &Caps) -> Result<Option<CoverMismatch>> {
    let cover = maximal_cliques(g, caps)?;
    let classes = equivalence_classes(g);
    for class in classes.classes.iter().filter(|c| c.len() >= 2) {
        for &x in class {
            let (h, keep) = g.remove_vertex(x);
            let mut found: Vec<Vec<usize>> =
                maximal_cliques(&h, caps)?.cliques.into_iter().map(|c| c.into_iter().map(|k| keep[k]).collect()).collect();
            found.sort();
            let mut expected: Vec<Vec<usize>> =
                cover.cliques.iter().map(|c| c.iter().copied().filter(|&v| v != x).collect()).collect();
            expected.sort();
            if found != expected {
                return Ok(Some(CoverMismatch { removed: x, expected, found }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples::*;
    use crate::rules::Rule;

    fn small() -> GraphSuiteConfig {
        GraphSuiteConfig { graphs: 60, max_vertices: 7, seed: 3, float_tol: 1e-7 }
    }

    #[test]
    fn generator_is_deterministic_and_plants_twins() {
        let with_twins = (0..100).filter(|&i| {
            let g = suite_graph(1, i, 8);
            assert_eq!(g, suite_graph(1, i, 8));
            assert!(g.len() >= 2 && g.len() <= 8);
            equivalence_classes(&g).len() < g.len()
        });
        assert!(with_twins.count() > 50);
    }

    #[test]
    fn exact_rules_pass() {
        for r in ["cu", "lift:uniform", "mcca", "mccp"] {
            let rep = run_graph_suite(&Rule::parse(r).unwrap(), &small()).unwrap();
            assert_eq!(rep.violations(), 0, "{r}: {:?}", rep.witnesses.first());
            assert!(rep.symmetry_checks > 0 && rep.locality_checks > 0);
        }
    }

    #[test]
    fn self_test_rules_are_caught() {
        let rep = run_graph_suite(&DegreeProportional, &small()).unwrap();
        assert!(rep.locality_violations > 0);
        assert_eq!(rep.symmetry_violations, 0);
        let rep = run_graph_suite(&PlantedAsymmetry, &small()).unwrap();
        assert!(rep.symmetry_violations > 0);
        // A planted instance: vertex 0 has a twin.
        let mut g = path(3);
        g.add_twin(0, "t".into());
        assert!(!check_graph(&g, &PlantedAsymmetry, 0.0).unwrap().violations.is_empty());
    }

    #[test]
    fn smooth_fails_locality_on_the_paw_plus_twin() {
        // Removing one of the twins c, d lowers b's degree, which moves a.
        let rep = check_graph(&paw(), &Rule::parse("smooth:cu").unwrap(), 0.0).unwrap();
        assert!(rep.violations.iter().any(|v| v.property == GraphProperty::Locality));
    }

    #[test]
    fn clique_covers_shrink_by_the_removed_clone() {
        let caps = Caps::default();
        for i in 0..80 {
            let g = suite_graph(7, i, 8);
            assert!(clique_cover_invariance(&g, &caps).unwrap().is_none());
        }
        assert!(clique_cover_invariance(&chain8(), &caps).unwrap().is_none());
    }

    #[test]
    fn entropy_deviation_is_tiny() {
        let cfg = GraphSuiteConfig { graphs: 25, max_vertices: 6, seed: 5, float_tol: 1e-7 };
        let rep = run_graph_suite(&Rule::parse("entropy").unwrap(), &cfg).unwrap();
        assert_eq!(rep.violations(), 0);
        assert!(rep.max_deviation <= 1e-7);
    }
}
