//! Property harnesses: metric and graph suites, the locality demo and the
//! open-question search.

pub mod conjecture;
pub mod graph_suite;
pub mod metric_suite;
pub mod spider;

pub use conjecture::{conjecture_search, Findings, Target, Witness};
pub use graph_suite::{
    check_graph, clique_cover_invariance, run_graph_suite, suite_graph, CoverMismatch, GraphCheck, GraphProperty,
    GraphSuiteConfig, GraphSuiteReport, GraphViolation,
};
pub use metric_suite::{run_metric_suite, suite_instance, MetricProperty, MetricSuiteConfig, MetricSuiteReport};
pub use spider::{locality_chain, strict_locality_demo, Addition, DemoReport, StageReport};

use crate::error::{Error, Result};
use crate::graph::examples::{chain8, cycle, path, paw};
use crate::rules::GraphWeighting;

/// Graphs probed before a custom rule is accepted.
const PROBE_SUITE: usize = 40;

/// Symmetry and locality on a handful of graphs with twins; the first
/// violation is returned as an error.
pub fn probe_rule(rule: &dyn GraphWeighting) -> Result<()> {
    let fixed = [paw(), chain8(), path(5), cycle(5)];
    let random = (0..PROBE_SUITE).map(|i| suite_graph(0, i, 7));
    for g in fixed.into_iter().chain(random) {
        let check = check_graph(&g, rule, 1e-7)?;
        if let Some(v) = check.violations.first() {
            return Err(Error::InvalidParameter(format!(
                "rule `{}` fails {:?} on {}: {}",
                rule.name(),
                v.property,
                v.edges,
                v.detail
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::graph_suite::{DegreeProportional, PlantedAsymmetry};
    use super::*;
    use crate::rules::Rule;

    #[test]
    fn probe_accepts_registry_rules_and_refuses_planted_ones() {
        for r in ["cu", "mcca", "lift:uniform"] {
            probe_rule(&Rule::parse(r).unwrap()).unwrap();
        }
        assert!(probe_rule(&Rule::parse("smooth:cu").unwrap()).is_err());
        assert!(probe_rule(&DegreeProportional).is_err());
        assert!(probe_rule(&PlantedAsymmetry).is_err());
    }
}
