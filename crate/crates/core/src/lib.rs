//! Clone-robust weighting of finite pseudo-metric spaces.
//!
//! Elements are weighted by integrating a graph rule over the neighborhood
//! graphs `G_r(S)` for `r ∈ [0, α]`. Adding near-duplicates of an element then
//! barely moves the weight of anything far from it.

pub mod attack;
pub mod audit;
pub mod density;
pub mod document;
pub mod error;
pub mod euclid;
pub mod filtration;
pub mod graph;
pub mod metric;
pub mod metric_weighting;
pub mod numeric;
pub mod rules;
pub mod sharing;
pub mod weights;

pub use error::{Error, Result};
pub use density::Density;
pub use document::WeightsDocument;
pub use attack::{attack, AttackConfig, AttackReport};
pub use euclid::{Estimate, Estimator, SharingMatrix};
pub use filtration::{equivalence_classes, neighborhood_graph, quotient, threshold_radii, ClassPartition, QuotientGraph};
pub use graph::Graph;
pub use metric_weighting::MetricWeighting;
pub use metric::{add_clone, load_instance, random_instance, InstanceKind, MetricInstance};
pub use numeric::Q;
pub use rules::{Caps, GraphWeighting, Rule, RuleKind};
pub use sharing::Value;
pub use weights::WeightVector;
