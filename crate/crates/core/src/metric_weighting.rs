//! Integrating a graph rule over the neighborhood-graph filtration.
//!
//! `f(S)(x) = ∫₀^α ν(r)·w(G_r(S))(x) dr`. The integrand is constant between
//! consecutive distinct distances, so the integral is a finite sum.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::density::{Density, DensityKind};
use crate::error::{Error, Result};
use crate::filtration::{sweep, threshold_radii};
use crate::metric::MetricInstance;
use crate::numeric::{q_int, Q};
use crate::rules::{GraphWeighting, Rule};
use crate::weights::WeightVector;

/// A graph rule paired with a radius density.
#[derive(Clone)]
pub struct MetricWeighting {
    rule: Arc<dyn GraphWeighting>,
    density: Density,
    exact: bool,
}

impl fmt::Debug for MetricWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricWeighting")
            .field("rule", &self.rule.name())
            .field("density", &self.density)
            .field("exact", &self.exact)
            .finish()
    }
}

impl MetricWeighting {
    pub fn new(rule: Arc<dyn GraphWeighting>, density: Density) -> Self {
        MetricWeighting { rule, density, exact: false }
    }

    pub fn from_rule(rule: Rule, density: Density) -> Self {
        Self::new(Arc::new(rule), density)
    }

    /// Like `new`, but first runs the rule through the graph-level symmetry
    /// and locality probes and refuses it on any violation.
    pub fn certified(rule: Arc<dyn GraphWeighting>, density: Density) -> Result<Self> {
        crate::audit::probe_rule(rule.as_ref())?;
        Ok(Self::new(rule, density))
    }

    /// Sum in exact rationals; fails later if the rule is not exact.
    pub fn exact(mut self, on: bool) -> Self {
        self.exact = on;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn rule(&self) -> &dyn GraphWeighting {
        self.rule.as_ref()
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn alpha(&self) -> f64 {
        self.density.alpha()
    }

    /// `f(S)(x)` for one element.
    pub fn evaluate(&self, inst: &MetricInstance, x: usize) -> Result<f64> {
        if x >= inst.len() {
            return Err(Error::UnknownElement(x.to_string()));
        }
        Ok(self.evaluate_all(inst)?.get_f64(x))
    }

    /// All weights from one sweep.
    pub fn evaluate_all(&self, inst: &MetricInstance) -> Result<WeightVector> {
        if inst.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let pieces = sweep(inst, self.alpha());
        let weighed: Vec<Result<Option<WeightVector>>> = pieces
            .par_iter()
            .map(|p| if self.density.mass(p.lo, p.hi) > 0.0 { self.rule.weigh(&p.graph).map(Some) } else { Ok(None) })
            .collect();
        let n = inst.len();
        if self.exact {
            let mut acc = vec![q_int(0); n];
            for (piece, w) in pieces.iter().zip(weighed) {
                let Some(w) = w? else { continue };
                let exact = w.exact().ok_or_else(|| Error::NotExact(self.rule.name()))?;
                let mass: Q = self.density.cdf_exact(piece.hi)? - self.density.cdf_exact(piece.lo)?;
                for (a, v) in acc.iter_mut().zip(exact) {
                    *a += &mass * v;
                }
            }
            Ok(WeightVector::Exact(acc))
        } else {
            let mut acc = vec![0.0; n];
            for (piece, w) in pieces.iter().zip(weighed) {
                let Some(w) = w? else { continue };
                let mass = self.density.mass(piece.lo, piece.hi);
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += mass * w.get_f64(i);
                }
            }
            Ok(WeightVector::Float(acc))
        }
    }

    /// Midpoint Riemann sum of `ν(r)·w(G_r)(x)` on `steps` equal cells, for every `x`.
    /// Graphs are weighed once per distinct edge set.
    pub fn riemann_oracle_all(&self, inst: &MetricInstance, steps: usize) -> Result<Vec<f64>> {
        if steps == 0 {
            return Err(Error::InvalidParameter("riemann oracle needs steps ≥ 1".into()));
        }
        let n = inst.len();
        let mut sorted: Vec<f64> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| inst.d(i, j)).collect();
        sorted.sort_by(f64::total_cmp);
        let h = self.alpha() / steps as f64;
        let mut cache: HashMap<usize, Vec<f64>> = HashMap::new();
        let mut acc = vec![0.0; n];
        for k in 0..steps {
            let r = (k as f64 + 0.5) * h;
            let nu = self.density.pdf(r);
            if nu == 0.0 {
                continue;
            }
            let edges = sorted.partition_point(|&d| d <= r);
            if !cache.contains_key(&edges) {
                let g = crate::filtration::neighborhood_graph(inst, r);
                cache.insert(edges, self.rule.weigh(&g)?.to_f64_vec());
            }
            for (a, w) in acc.iter_mut().zip(&cache[&edges]) {
                *a += nu * w * h;
            }
        }
        Ok(acc)
    }

    pub fn riemann_oracle(&self, inst: &MetricInstance, x: usize, steps: usize) -> Result<f64> {
        if x >= inst.len() {
            return Err(Error::UnknownElement(x.to_string()));
        }
        Ok(self.riemann_oracle_all(inst, steps)?[x])
    }

    /// Guaranteed gap between `evaluate` and the oracle: each jump of the
    /// integrand (a threshold radius or a kink of the density) costs at most
    /// `ν̄` times one cell width.
    pub fn oracle_bound(&self, inst: &MetricInstance, steps: usize) -> f64 {
        let knots = match self.density.kind() {
            DensityKind::Uniform => 0,
            DensityKind::PiecewiseLinear(k) => k.len() - 2,
        };
        let jumps = threshold_radii(inst, self.alpha()).len() + knots;
        self.density.nu_bar() * jumps as f64 * (self.alpha() / steps as f64) + 1e-9
    }
}

/// Draws `k` labels independently from `weights`.
pub fn sample_labels(labels: &[String], weights: &WeightVector, k: usize, seed: u64) -> Result<Vec<String>> {
    if labels.len() != weights.len() || labels.is_empty() {
        return Err(Error::InvalidParameter("labels and weights must be non-empty and of equal length".into()));
    }
    let dist = WeightedIndex::new(weights.to_f64_vec()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..k).map(|_| labels[dist.sample(&mut rng)].clone()).collect())
}
