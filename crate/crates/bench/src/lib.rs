//! Fixed inputs shared by the benchmarks.

use clonewt::audit::suite_graph;
use clonewt::{random_instance, Graph, InstanceKind, MetricInstance};

/// Seeded points in the unit square.
pub fn square(n: usize, seed: u64) -> MetricInstance {
    random_instance(InstanceKind::Euclidean { dim: 2, n }, seed).expect("valid generator parameters")
}

/// Seeded points on the unit interval.
pub fn line(n: usize, seed: u64) -> MetricInstance {
    random_instance(InstanceKind::Euclidean { dim: 1, n }, seed).expect("valid generator parameters")
}

/// A suite graph with planted twins.
pub fn twin_graph(n: usize, seed: u64) -> Graph {
    suite_graph(seed, 0, n)
}

pub fn points(inst: &MetricInstance) -> Vec<Vec<f64>> {
    inst.points().expect("generated in point form").to_vec()
}
