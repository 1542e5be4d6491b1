//! The metric-level property suite: positivity, symmetry under self-isometries,
//! Lipschitz clone fairness, α-locality under injected clones and Lipschitz
//! continuity under small perturbations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{add_clone, random_instance, Form, InstanceKind, MetricInstance};
use crate::metric_weighting::MetricWeighting;
use crate::weights::WeightVector;

use super::graph_suite::MAX_WITNESSES;

/// Slack on float comparisons against Lipschitz bounds.
pub const BOUND_SLACK: f64 = 1e-12;
/// Largest instance whose self-isometries are enumerated exhaustively.
pub const ISOMETRY_ENUMERATION_LIMIT: usize = 8;
pub const CLONE_EPS: [f64; 3] = [0.0, 0.01, 0.1];
pub const PERTURBATIONS: [f64; 2] = [1e-3, 1e-2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSuiteConfig {
    pub instances: usize,
    pub max_n: usize,
    pub seed: u64,
}

impl Default for MetricSuiteConfig {
    fn default() -> Self {
        MetricSuiteConfig { instances: 100, max_n: 12, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricProperty {
    Positivity,
    Symmetry,
    CloneFairness,
    AlphaLocality,
    Continuity,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct PropertyTally {
    pub checks: usize,
    pub violations: usize,
    /// Largest observed/bound ratio among checks with a positive bound.
    pub worst_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricViolation {
    pub instance_index: usize,
    pub property: MetricProperty,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricSuiteReport {
    pub rule: String,
    pub density: String,
    pub alpha: f64,
    pub instances: usize,
    pub seed: u64,
    pub exact: bool,
    pub positivity: PropertyTally,
    pub symmetry: PropertyTally,
    pub clone_fairness: PropertyTally,
    pub alpha_locality: PropertyTally,
    pub continuity: PropertyTally,
    pub witnesses: Vec<MetricViolation>,
}

impl MetricSuiteReport {
    pub fn tally(&self, p: MetricProperty) -> &PropertyTally {
        match p {
            MetricProperty::Positivity => &self.positivity,
            MetricProperty::Symmetry => &self.symmetry,
            MetricProperty::CloneFairness => &self.clone_fairness,
            MetricProperty::AlphaLocality => &self.alpha_locality,
            MetricProperty::Continuity => &self.continuity,
        }
    }

    pub fn violations(&self) -> usize {
        [&self.positivity, &self.symmetry, &self.clone_fairness, &self.alpha_locality, &self.continuity]
            .iter()
            .map(|t| t.violations)
            .sum()
    }
}

/// Instance `index` of the suite. Four families rotate: points in a square of
/// side 2.5, points with planted perfect clones, shortest-path matrices, and
/// a denser square of side 1.5.
pub fn suite_instance(seed: u64, index: usize, max_n: usize) -> Result<MetricInstance> {
    if max_n < 3 {
        return Err(Error::InvalidParameter("metric suite needs max_n ≥ 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let sub = rng.gen::<u64>();
    match index % 4 {
        0 => random_instance(InstanceKind::Euclidean { dim: 2, n: rng.gen_range(3..=max_n.min(10)) }, sub)?.scaled(2.5),
        1 => {
            let dim = rng.gen_range(1..=3);
            let base = rng.gen_range(2..=max_n - 1);
            let clones = rng.gen_range(1..=(max_n - base).min(3));
            let mut inst = random_instance(InstanceKind::Euclidean { dim, n: base }, sub)?.scaled(2.0)?;
            for k in 0..clones {
                let x = rng.gen_range(0..inst.len());
                inst = add_clone(&inst, x, 0.0, sub.wrapping_add(k as u64 + 1))?;
            }
            Ok(inst)
        }
        2 => random_instance(InstanceKind::ShortestPath { n: rng.gen_range(3..=max_n.min(10)), density: 0.3 }, sub),
        _ => random_instance(InstanceKind::Euclidean { dim: 2, n: rng.gen_range(3..=max_n) }, sub)?.scaled(1.5),
    }
}

/// Permutations `σ` with `d(σi, σj) = d(i, j)` for all pairs, identity excluded.
/// Exhaustive up to `ISOMETRY_ENUMERATION_LIMIT` elements; beyond that only
/// transpositions of zero-distance pairs.
pub fn self_isometries(inst: &MetricInstance) -> Vec<Vec<usize>> {
    let n = inst.len();
    let mut out = Vec::new();
    if n <= ISOMETRY_ENUMERATION_LIMIT {
        fn extend(inst: &MetricInstance, img: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            let n = inst.len();
            let i = img.len();
            if i == n {
                if img.iter().enumerate().any(|(a, &b)| a != b) {
                    out.push(img.clone());
                }
                return;
            }
            for u in 0..n {
                if !used[u] && (0..i).all(|j| inst.d(i, j) == inst.d(u, img[j])) {
                    used[u] = true;
                    img.push(u);
                    extend(inst, img, used, out);
                    img.pop();
                    used[u] = false;
                }
            }
        }
        extend(inst, &mut Vec::new(), &mut vec![false; n], &mut out);
    } else {
        for i in 0..n {
            for j in i + 1..n {
                if inst.d(i, j) == 0.0 {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.swap(i, j);
                    out.push(p);
                }
            }
        }
    }
    out
}

struct Checker {
    index: usize,
    exact: bool,
    tallies: [PropertyTally; 5],
    witnesses: Vec<MetricViolation>,
}

impl Checker {
    /// `|a_i − b_j| ≤ bound`; a zero bound demands exact equality in exact mode.
    fn bounded(&mut self, p: MetricProperty, a: &WeightVector, i: usize, b: &WeightVector, j: usize, bound: f64, what: impl Fn() -> String) {
        let t = &mut self.tallies[p as usize];
        t.checks += 1;
        let gap = (a.get_f64(i) - b.get_f64(j)).abs();
        let ok = match (a, b) {
            (WeightVector::Exact(x), WeightVector::Exact(y)) if bound == 0.0 => x[i] == y[j],
            _ => gap <= bound + BOUND_SLACK,
        };
        if bound > 0.0 {
            t.worst_slack = t.worst_slack.max(gap / bound);
        }
        if !ok {
            self.fail(p, format!("{}: gap {gap:e} exceeds bound {bound:e}", what()));
        }
    }

    fn fail(&mut self, p: MetricProperty, detail: String) {
        self.tallies[p as usize].violations += 1;
        self.witnesses.push(MetricViolation { instance_index: self.index, property: p, detail });
    }
}

fn audit_instance(mw: &MetricWeighting, inst: &MetricInstance, index: usize, seed: u64) -> Result<Checker> {
    let mut c = Checker { index, exact: mw.is_exact(), tallies: Default::default(), witnesses: Vec::new() };
    let n = inst.len();
    let nu_bar = mw.density().nu_bar();
    let alpha = mw.alpha();
    let lip = 2.0 * nu_bar * n as f64;
    let f = mw.evaluate_all(inst)?;
    let label = |i: usize| inst.labels()[i].clone();

    for x in 0..n {
        c.tallies[MetricProperty::Positivity as usize].checks += 1;
        let positive = match &f {
            WeightVector::Exact(v) => v[x] > crate::numeric::q_int(0),
            WeightVector::Float(v) => v[x] > 0.0,
        };
        if !positive {
            c.fail(MetricProperty::Positivity, format!("f({}) = {}", label(x), f.format_entry(x)));
        }
    }

    for perm in self_isometries(inst) {
        for x in (0..n).filter(|&x| perm[x] != x) {
            c.bounded(MetricProperty::Symmetry, &f, x, &f, perm[x], 0.0, || {
                format!("self-isometry {perm:?} maps {} to {}", label(x), label(perm[x]))
            });
        }
    }

    for x in 0..n {
        for y in x + 1..n {
            c.bounded(MetricProperty::CloneFairness, &f, x, &f, y, lip * inst.d(x, y), || {
                format!("|f({}) − f({})| at distance {}", label(x), label(y), inst.d(x, y))
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + (1 << 32));
    for eps in CLONE_EPS {
        let x = rng.gen_range(0..n);
        let grown = add_clone(inst, x, eps, rng.gen())?;
        let g = mw.evaluate_all(&grown)?;
        let bound = lip * grown.d(x, n);
        for z in (0..n).filter(|&z| inst.d(x, z) >= alpha) {
            c.bounded(MetricProperty::AlphaLocality, &f, z, &g, z, bound, || {
                format!("clone of {} at distance {} (eps {eps}) moves far element {}", label(x), grown.d(x, n), label(z))
            });
        }
    }

    if let Form::Points { dim, points } = inst.form() {
        for delta in PERTURBATIONS {
            let moved: Vec<Vec<f64>> = points
                .iter()
                .map(|p| {
                    let dir: Vec<f64> = (0..*dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                    let step = rng.gen::<f64>() * delta;
                    p.iter().zip(&dir).map(|(a, v)| a + step * v / norm).collect()
                })
                .collect();
            let shift = points
                .iter()
                .zip(&moved)
                .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            let g = mw.evaluate_all(&inst.with_points(moved)?)?;
            let bound = 2.0 * nu_bar * (n * n) as f64 * shift;
            for x in 0..n {
                c.bounded(MetricProperty::Continuity, &f, x, &g, x, bound, || {
                    format!("moving every point by ≤ {shift:e} moves {}", label(x))
                });
            }
        }
    }
    Ok(c)
}

pub fn run_metric_suite(mw: &MetricWeighting, cfg: &MetricSuiteConfig) -> Result<MetricSuiteReport> {
    let checkers: Vec<Checker> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| audit_instance(mw, &suite_instance(cfg.seed, i, cfg.max_n)?, i, cfg.seed))
        .collect::<Result<_>>()?;
    let mut tallies = [PropertyTally::default(); 5];
    let mut witnesses = Vec::new();
    let mut exact = true;
    for c in checkers {
        exact &= c.exact;
        for (t, u) in tallies.iter_mut().zip(c.tallies) {
            t.checks += u.checks;
            t.violations += u.violations;
            t.worst_slack = t.worst_slack.max(u.worst_slack);
        }
        for w in c.witnesses {
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(w);
            }
        }
    }
    let [positivity, symmetry, clone_fairness, alpha_locality, continuity] = tallies;
    Ok(MetricSuiteReport {
        rule: mw.rule().name(),
        density: mw.density().name(),
        alpha: mw.alpha(),
        instances: cfg.instances,
        seed: cfg.seed,
        exact,
        positivity,
        symmetry,
        clone_fairness,
        alpha_locality,
        continuity,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::graph_suite::PlantedAsymmetry;
    use crate::density::Density;
    use crate::rules::Rule;
    use std::sync::Arc;

    fn small() -> MetricSuiteConfig {
        MetricSuiteConfig { instances: 16, max_n: 8, seed: 2 }
    }

    fn mw(rule: &str) -> MetricWeighting {
        MetricWeighting::from_rule(Rule::parse(rule).unwrap(), Density::uniform(1.0).unwrap()).exact(true)
    }

    #[test]
    fn instances_are_reproducible() {
        for i in 0..12 {
            let a = suite_instance(9, i, 12).unwrap();
            assert_eq!(a, suite_instance(9, i, 12).unwrap());
            assert!(a.len() >= 3 && a.len() <= 12);
        }
        assert!(suite_instance(0, 0, 2).is_err());
    }

    #[test]
    fn isometries_of_a_square() {
        let sq = MetricInstance::from_points(None, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(self_isometries(&sq).len(), 7);
        let clones = MetricInstance::from_points(None, vec![vec![0.0]; 10]).unwrap();
        assert_eq!(self_isometries(&clones).len(), 45);
    }

    #[test]
    fn class_uniform_passes() {
        let rep = run_metric_suite(&mw("cu"), &small()).unwrap();
        assert_eq!(rep.violations(), 0, "{:?}", rep.witnesses);
        assert!(rep.exact);
        assert!(rep.symmetry.checks > 0 && rep.alpha_locality.checks > 0 && rep.continuity.checks > 0);
        assert!(rep.clone_fairness.worst_slack <= 1.0);
    }

    #[test]
    fn planted_asymmetry_is_caught() {
        let bad = MetricWeighting::new(Arc::new(PlantedAsymmetry), Density::uniform(1.0).unwrap()).exact(true);
        assert!(run_metric_suite(&bad, &small()).unwrap().violations() > 0);
        // Element 0 and its perfect clone swap under a self-isometry.
        let planted = MetricInstance::from_points(None, vec![vec![0.0], vec![0.0], vec![3.0]]).unwrap();
        let c = audit_instance(&bad, &planted, 0, 0).unwrap();
        assert!(c.tallies[MetricProperty::Symmetry as usize].violations > 0);
        assert!(c.tallies[MetricProperty::CloneFairness as usize].violations > 0);
    }
}
