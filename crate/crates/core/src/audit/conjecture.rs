//! Bounded searches for counterexamples to open questions about the sharing
//! coefficients. A search never proves anything; it reports what it examined.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::examples::{chain8, cycle, path, paw};
use crate::graph::Graph;
use crate::rules::{Rule, RuleKind};
use crate::sharing::{audit_axioms, sharing_table};

/// Witnesses kept per search.
const MAX_WITNESSES: usize = 5;
/// Entropy coefficients below this count as negative.
const ENTROPY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Target {
    /// Non-negative sharing for a clique-cover rule (`mcca` or `mccp`).
    CliqueCoverNonNegative(String),
    /// A coefficient `χ(x,y)`, `x ≠ y`, of the entropy rule below `-1e-6`.
    EntropyNegativeChi,
}

impl Target {
    /// `mcc_axiom2[:rule]` (rule defaults to `mcca`) or `entropy_negative_chi`.
    pub fn parse(s: &str) -> Result<Target> {
        let bad = || Error::InvalidParameter(format!("unknown target `{s}`; expected mcc_axiom2[:rule] or entropy_negative_chi"));
        match s.split_once(':') {
            None if s == "mcc_axiom2" => Ok(Target::CliqueCoverNonNegative("mcca".into())),
            None if s == "entropy_negative_chi" => Ok(Target::EntropyNegativeChi),
            Some(("mcc_axiom2", rule)) => {
                Rule::parse(rule)?;
                Ok(Target::CliqueCoverNonNegative(rule.into()))
            }
            _ => Err(bad()),
        }
    }

    fn sizes(&self) -> (usize, usize) {
        match self {
            Target::CliqueCoverNonNegative(_) => (3, 7),
            // Every entropy evaluation solves a concave program per removal.
            Target::EntropyNegativeChi => (3, 6),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub edges: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Findings {
    pub target: Target,
    pub budget: usize,
    pub seed: u64,
    pub examined: usize,
    pub witnesses: Vec<Witness>,
    pub verdict: String,
}

fn random_graph(seed: u64, index: usize, lo: usize, hi: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = rng.gen_range(lo..=hi);
    let p = rng.gen_range(0.2..0.8);
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

fn probe(target: &Target, g: &Graph) -> Result<Option<String>> {
    match target {
        Target::CliqueCoverNonNegative(rule) => {
            let rep = audit_axioms(g, &Rule::parse(rule)?, &[2])?;
            Ok(rep.result(2).filter(|r| !r.holds).map(|r| r.detail.clone()))
        }
        Target::EntropyNegativeChi => {
            let table = sharing_table(g, &Rule::new(RuleKind::Entropy))?;
            for (x, row) in table.chi.iter().enumerate() {
                let Some(row) = row else { continue };
                if let Some((y, v)) = row.iter().enumerate().find(|&(y, v)| y != x && v.to_f64() < -ENTROPY_TOL) {
                    return Ok(Some(format!("χ({},{}) = {}", table.labels[x], table.labels[y], v.to_f64())));
                }
            }
            Ok(None)
        }
    }
}

/// Examines `budget` graphs: the named examples (paw first), then random ones.
pub fn conjecture_search(target: &Target, budget: usize, seed: u64) -> Result<Findings> {
    let (lo, hi) = target.sizes();
    let named = [paw(), chain8(), path(4), cycle(5), path(5)];
    let graphs: Vec<Graph> = named
        .into_iter()
        .filter(|g| g.len() <= hi.max(8))
        .chain((0..).map(|i| random_graph(seed, i, lo, hi)))
        .take(budget)
        .collect();
    let hits: Vec<Option<Witness>> = graphs
        .par_iter()
        .map(|g| Ok(probe(target, g)?.map(|detail| Witness { edges: g.to_edge_list(), detail })))
        .collect::<Result<_>>()?;
    let witnesses: Vec<Witness> = hits.into_iter().flatten().take(MAX_WITNESSES).collect();
    let verdict = if witnesses.is_empty() {
        format!("no counterexample in budget ({} graphs)", graphs.len())
    } else {
        "counterexample found".to_string()
    };
    Ok(Findings { target: target.clone(), budget, seed, examined: graphs.len(), witnesses, verdict })
}
