//! Duplication attacks: inject clones of one element and watch far weights.
//!
//! Each added clone `y_i` of the target `x` may move an element at distance
//! `≥ α` from `x` by at most `2ν̄|S_i|d(x, y_i)`, with `|S_i|` the size before
//! the addition. The uniform rule is run alongside for contrast.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{add_clone, MetricInstance};
use crate::metric_weighting::MetricWeighting;
use crate::numeric::{format_rational, q_int, to_f64, Q};
use crate::rules::{Rule, RuleKind};
use crate::weights::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackConfig {
    pub target: usize,
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub clone: String,
    pub clone_distance: f64,
    /// `Σ_{j ≤ step} 2ν̄|S_j|d(x, y_j)`.
    pub cumulative_bound: f64,
    pub max_far_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftRow {
    pub label: String,
    pub distance: f64,
    pub before: String,
    pub after: String,
    pub drift: f64,
    /// Drift compared in exact arithmetic and found to be zero.
    pub exactly_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMass {
    pub rule: String,
    pub before: String,
    pub after: String,
    pub max_far_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub rule: String,
    pub alpha: f64,
    pub target: String,
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    pub exact: bool,
    pub steps: Vec<StepReport>,
    /// Original elements at distance `≥ α` from the target, after all `k` clones.
    pub far: Vec<DriftRow>,
    pub max_far_drift: f64,
    pub cumulative_bound: f64,
    pub within_bound: bool,
    /// Mass of the target and its clones under the attacked rule.
    pub family: FamilyMass,
    /// The same under the uniform rule.
    pub uniform: FamilyMass,
    /// `(1 + k)/(n + k)`.
    pub uniform_expected: String,
}

fn entry(w: &WeightVector, i: usize) -> String {
    w.format_entry(i)
}

/// `|a_i − b_j|`, plus whether it is exactly zero when both are exact.
fn drift(a: &WeightVector, i: usize, b: &WeightVector, j: usize) -> (f64, bool) {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => {
            let d: Q = (&x[i] - &y[j]).abs();
            (to_f64(&d), d.is_zero())
        }
        _ => ((a.get_f64(i) - b.get_f64(j)).abs(), false),
    }
}

fn family_mass(w: &WeightVector, members: impl Iterator<Item = usize>) -> String {
    match w.exact() {
        Some(x) => format_rational(&members.map(|i| x[i].clone()).sum::<Q>()),
        None => members.map(|i| w.get_f64(i)).sum::<f64>().to_string(),
    }
}

pub fn attack(inst: &MetricInstance, mw: &MetricWeighting, cfg: &AttackConfig) -> Result<AttackReport> {
    let n = inst.len();
    let x = cfg.target;
    if x >= n {
        return Err(Error::UnknownElement(x.to_string()));
    }
    let alpha = mw.alpha();
    let nu_bar = mw.density().nu_bar();
    let far: Vec<usize> = (0..n).filter(|&z| inst.d(x, z) >= alpha).collect();
    let before = mw.evaluate_all(inst)?;

    let mut current = inst.clone();
    let mut steps = Vec::with_capacity(cfg.k);
    let mut bound = 0.0;
    let mut after = before.clone();
    for i in 0..cfg.k {
        let size = current.len();
        current = add_clone(&current, x, cfg.eps, cfg.seed.wrapping_add(i as u64))?;
        let y = current.len() - 1;
        let dxy = current.d(x, y);
        bound += 2.0 * nu_bar * size as f64 * dxy;
        after = mw.evaluate_all(&current)?;
        let max_far_drift = far.iter().map(|&z| drift(&before, z, &after, z).0).fold(0.0, f64::max);
        steps.push(StepReport {
            step: i + 1,
            clone: current.labels()[y].clone(),
            clone_distance: dxy,
            cumulative_bound: bound,
            max_far_drift,
        });
    }

    let rows: Vec<DriftRow> = far
        .iter()
        .map(|&z| {
            let (d, zero) = drift(&before, z, &after, z);
            DriftRow {
                label: inst.labels()[z].clone(),
                distance: inst.d(x, z),
                before: entry(&before, z),
                after: entry(&after, z),
                drift: d,
                exactly_zero: zero,
            }
        })
        .collect();
    let max_far_drift = rows.iter().map(|r| r.drift).fold(0.0, f64::max);
    let members = || std::iter::once(x).chain(n..n + cfg.k);

    let uniform = MetricWeighting::new(Arc::new(Rule::new(RuleKind::Uniform)), mw.density().clone()).exact(mw.is_exact());
    let u_before = uniform.evaluate_all(inst)?;
    let u_after = uniform.evaluate_all(&current)?;
    let u_drift = far.iter().map(|&z| drift(&u_before, z, &u_after, z).0).fold(0.0, f64::max);

    Ok(AttackReport {
        rule: mw.rule().name(),
        alpha,
        target: inst.labels()[x].clone(),
        k: cfg.k,
        eps: cfg.eps,
        seed: cfg.seed,
        exact: mw.is_exact(),
        steps,
        far: rows,
        max_far_drift,
        cumulative_bound: bound,
        // Float rules get a rounding allowance; exact rules do not.
        within_bound: max_far_drift <= bound + if mw.is_exact() { 0.0 } else { 1e-12 },
        family: FamilyMass {
            rule: mw.rule().name(),
            before: family_mass(&before, std::iter::once(x)),
            after: family_mass(&after, members()),
            max_far_drift,
        },
        uniform: FamilyMass {
            rule: "uniform".into(),
            before: family_mass(&u_before, std::iter::once(x)),
            after: family_mass(&u_after, members()),
            max_far_drift: u_drift,
        },
        uniform_expected: format_rational(&(q_int(1 + cfg.k) / q_int(n + cfg.k))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density;
    use crate::metric::{random_instance, InstanceKind};

    fn cu(alpha: f64) -> MetricWeighting {
        MetricWeighting::from_rule(Rule::parse("cu").unwrap(), Density::uniform(alpha).unwrap()).exact(true)
    }

    fn line() -> MetricInstance {
        MetricInstance::from_points(None, vec![vec![0.0], vec![0.4], vec![2.0], vec![3.5]]).unwrap()
    }

    #[test]
    fn no_clones_no_drift() {
        let rep = attack(&line(), &cu(1.0), &AttackConfig { target: 0, k: 0, eps: 0.5, seed: 1 }).unwrap();
        assert!(rep.steps.is_empty());
        assert_eq!(rep.max_far_drift, 0.0);
        assert!(rep.far.iter().all(|r| r.exactly_zero));
        assert_eq!(rep.uniform_expected, "1/4");
    }

    #[test]
    fn perfect_clones_leave_far_elements_alone() {
        let rep = attack(&line(), &cu(1.0), &AttackConfig { target: 0, k: 5, eps: 0.0, seed: 1 }).unwrap();
        assert_eq!(rep.far.len(), 2);
        assert!(rep.far.iter().all(|r| r.exactly_zero));
        assert_eq!(rep.cumulative_bound, 0.0);
        assert!(rep.within_bound);
        assert_eq!(rep.uniform.after, "2/3");
        assert_eq!(rep.uniform.after, rep.uniform_expected);
        assert!(rep.uniform.max_far_drift > 0.0);
    }

    #[test]
    fn approximate_clones_respect_the_cumulative_bound() {
        for seed in 0..10 {
            let inst = random_instance(InstanceKind::Euclidean { dim: 2, n: 7 }, seed).unwrap();
            let rep = attack(&inst, &cu(1.0), &AttackConfig { target: 0, k: 3, eps: 0.05, seed }).unwrap();
            assert!(rep.within_bound, "seed {seed}: {} > {}", rep.max_far_drift, rep.cumulative_bound);
            for w in rep.steps.windows(2) {
                assert!(w[1].cumulative_bound >= w[0].cumulative_bound);
            }
        }
    }

    #[test]
    fn unknown_target_is_rejected() {
        assert!(attack(&line(), &cu(1.0), &AttackConfig { target: 9, k: 1, eps: 0.0, seed: 0 }).is_err());
    }
}
