//! Graph weighting rules and the rule registry.
//!
//! A rule maps a finite graph to a probability vector over its vertices.
//! Closed-form rules run in exact rational arithmetic; the entropy rule is
//! floating point.

mod basic;
mod cliques;
mod entropy;
mod partitions;

use std::fmt;

pub use basic::{lift_quotient, smooth, w_cu, w_uniform};
pub use cliques::{maximal_cliques, w_mcca, w_mccp, CliqueCover};
pub use entropy::{w_entropy, w_entropy_report, EntropyOptions, EntropyReport};
pub use partitions::{class_entropy, clique_partitions, graph_entropy, CliquePartition, CliquePartitions};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weights::WeightVector;

/// A graph weighting function.
pub trait GraphWeighting: Send + Sync {
    fn name(&self) -> String;
    fn weigh(&self, g: &Graph) -> Result<WeightVector>;
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximal cliques listed before giving up.
    pub max_cliques: usize,
    /// Largest vertex count for clique-partition enumeration.
    pub max_partition_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_cliques: 1_000_000, max_partition_vertices: 12 }
    }
}

/// Hard ceiling: partitions are stored as 64-bit masks.
pub const PARTITION_VERTEX_CEILING: usize = 64;

impl Caps {
    /// Parses `cliques=N,partitions=M` (either key optional). Caps can only be raised.
    pub fn raised_by(self, spec: &str) -> Result<Caps> {
        let mut caps = self;
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("cap `{item}` is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cap `{item}` needs an integer")))?;
            match key.trim() {
                "cliques" => caps.max_cliques = caps.max_cliques.max(value),
                "partitions" => {
                    caps.max_partition_vertices = caps.max_partition_vertices.max(value).min(PARTITION_VERTEX_CEILING)
                }
                other => return Err(Error::InvalidParameter(format!("unknown cap `{other}`"))),
            }
        }
        Ok(caps)
    }
}

/// Parsed rule specification, following the grammar `name(:base)*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleKind {
    Uniform,
    ClassUniform,
    Lift(Box<RuleKind>),
    Smooth(Box<RuleKind>),
    Mcca,
    Mccp,
    Entropy,
}

pub const REGISTRY: &str = "uniform, cu, lift:<base>, smooth:<base>, mcca, mccp, entropy";

impl RuleKind {
    pub fn parse(spec: &str) -> Result<RuleKind> {
        let tokens: Vec<&str> = spec.trim().split(':').map(str::trim).collect();
        Self::from_tokens(&tokens, spec)
    }

    fn from_tokens(tokens: &[&str], spec: &str) -> Result<RuleKind> {
        let unknown = || Error::UnknownRule { name: spec.to_string(), registry: REGISTRY.to_string() };
        let (head, rest) = tokens.split_first().ok_or_else(unknown)?;
        let leaf = |k: RuleKind| if rest.is_empty() { Ok(k) } else { Err(unknown()) };
        match *head {
            "uniform" => leaf(RuleKind::Uniform),
            "cu" => leaf(RuleKind::ClassUniform),
            "mcca" => leaf(RuleKind::Mcca),
            "mccp" => leaf(RuleKind::Mccp),
            "entropy" => leaf(RuleKind::Entropy),
            "lift" if !rest.is_empty() => Ok(RuleKind::Lift(Box::new(Self::from_tokens(rest, spec)?))),
            "smooth" if !rest.is_empty() => Ok(RuleKind::Smooth(Box::new(Self::from_tokens(rest, spec)?))),
            _ => Err(unknown()),
        }
    }

    /// Whether every output is an exact rational.
    pub fn is_exact(&self) -> bool {
        match self {
            RuleKind::Entropy => false,
            RuleKind::Lift(b) | RuleKind::Smooth(b) => b.is_exact(),
            _ => true,
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKind::Uniform => write!(f, "uniform"),
            RuleKind::ClassUniform => write!(f, "cu"),
            RuleKind::Lift(b) => write!(f, "lift:{b}"),
            RuleKind::Smooth(b) => write!(f, "smooth:{b}"),
            RuleKind::Mcca => write!(f, "mcca"),
            RuleKind::Mccp => write!(f, "mccp"),
            RuleKind::Entropy => write!(f, "entropy"),
        }
    }
}

/// A registry rule with its run options.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub kind: RuleKind,
    pub caps: Caps,
    pub entropy: EntropyOptions,
}

impl Rule {
    pub fn new(kind: RuleKind) -> Self {
        Rule { kind, caps: Caps::default(), entropy: EntropyOptions::default() }
    }

    pub fn parse(spec: &str) -> Result<Rule> {
        Ok(Rule::new(RuleKind::parse(spec)?))
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    fn sub(&self, kind: &RuleKind) -> Rule {
        Rule { kind: kind.clone(), caps: self.caps, entropy: self.entropy }
    }
}

impl GraphWeighting for Rule {
    fn name(&self) -> String {
        self.kind.to_string()
    }

    fn weigh(&self, g: &Graph) -> Result<WeightVector> {
        if g.is_empty() {
            return Err(Error::EmptyGraph);
        }
        match &self.kind {
            RuleKind::Uniform => w_uniform(g),
            RuleKind::ClassUniform => w_cu(g),
            RuleKind::Lift(base) => lift_quotient(&self.sub(base), g),
            RuleKind::Smooth(base) => smooth(&self.sub(base), g),
            RuleKind::Mcca => w_mcca(g, &self.caps),
            RuleKind::Mccp => w_mccp(g, &self.caps),
            RuleKind::Entropy => w_entropy(g, &self.entropy, &self.caps),
        }
    }
}
