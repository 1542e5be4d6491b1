//! The entropy-maximizing rule.
//!
//! The partition entropy depends only on class masses, so the search runs on
//! the quotient graph in canonical form. The answer is averaged over quotient
//! automorphism orbits and then split evenly inside each class. Symmetry and
//! locality therefore hold exactly, whatever the solver's accuracy.
//!
//! On the quotient we maximize `t + δ·H(p) + μ·Σ_k ln(H_k(p) − t)` over the
//! simplex with equality-constrained Newton steps. `H_k` runs over the clique
//! partitions in which no two blocks could be merged; merging never raises
//! entropy, so those attain the minimum. Driving `μ` well below `δ`, and both
//! towards zero, follows the lexicographic order: partition entropy first,
//! then Shannon entropy of the class masses.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::filtration::quotient;
use crate::graph::{canonical_labeling, Graph};
use crate::weights::{WeightVector, FLOAT_SUM_TOL};

use super::partitions::{bits, clique_partitions};
use super::{class_entropy, graph_entropy, Caps};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOptions {
    /// Final tie-break weight; the answer is accurate to roughly this.
    pub tol: f64,
    /// Budget of Newton steps across all continuation stages.
    pub max_iter: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { tol: 1e-8, max_iter: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub weights: WeightVector,
    /// Partition entropy at `weights`, by exhaustive enumeration (bits).
    pub value_bits: f64,
    pub class_entropy_bits: f64,
    /// Non-mergeable clique partitions of the quotient.
    pub constraints: usize,
    pub newton_steps: usize,
}

pub fn w_entropy(g: &Graph, opts: &EntropyOptions, caps: &Caps) -> Result<WeightVector> {
    Ok(w_entropy_report(g, opts, caps)?.weights)
}

pub fn w_entropy_report(g: &Graph, opts: &EntropyOptions, caps: &Caps) -> Result<EntropyReport> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(Error::InvalidParameter(format!("entropy tol must lie in (0,1), got {}", opts.tol)));
    }
    let q = quotient(g);
    let canon = canonical_labeling(&q.graph);
    let parts = non_mergeable(&canon.graph, caps)?;

    let (p, newton_steps) = solve_with_support(&canon.graph, &parts, opts, caps)?;

    // Orbit averages, indexed by canonical position.
    let mut orbit_sum = vec![0.0; q.graph.len()];
    let mut orbit_len = vec![0usize; q.graph.len()];
    for (k, &c) in canon.order.iter().enumerate() {
        orbit_sum[canon.orbit_of[c]] += p[k];
        orbit_len[canon.orbit_of[c]] += 1;
    }
    let mut class_mass = vec![0.0; q.graph.len()];
    for &c in &canon.order {
        let o = canon.orbit_of[c];
        class_mass[c] = orbit_sum[o] / orbit_len[o] as f64;
    }
    let total: f64 = class_mass.iter().sum();
    let w: Vec<f64> =
        (0..g.len()).map(|v| class_mass[q.partition.class_of[v]] / total / q.partition.class_size(v) as f64).collect();
    let weights = WeightVector::Float(w);
    debug_assert!((weights.total() - 1.0).abs() <= FLOAT_SUM_TOL);

    Ok(EntropyReport {
        value_bits: graph_entropy(&q.graph, &WeightVector::Float(class_mass), caps)?,
        class_entropy_bits: class_entropy(g, &weights)?,
        weights,
        constraints: parts.len(),
        newton_steps,
    })
}

/// Masses below this are treated as zero candidates by the support polish.
const NEGLIGIBLE: f64 = 1e-5;

/// Solves, then retries on the classes that kept non-negligible mass. A zero
/// class can sit in any block without changing entropies, so the smaller
/// problem is the same objective restricted to a face of the simplex; it is
/// kept when it loses no partition entropy.
fn solve_with_support(g: &Graph, parts: &[Vec<u64>], opts: &EntropyOptions, caps: &Caps) -> Result<(Vec<f64>, usize)> {
    let m = g.len();
    if m == 1 {
        return Ok((vec![1.0], 0));
    }
    let (p, mut steps) = Solver::new(parts, m).run(opts)?;
    let keep: Vec<usize> = (0..m).filter(|&i| p[i] >= NEGLIGIBLE).collect();
    if keep.len() == m || keep.is_empty() {
        return Ok((p, steps));
    }
    let sub = g.induced(&keep);
    let sub_parts = non_mergeable(&sub, caps)?;
    let (q, more) = solve_with_support(&sub, &sub_parts, opts, caps)?;
    steps += more;
    let mut padded = vec![0.0; m];
    for (&i, v) in keep.iter().zip(q) {
        padded[i] = v;
    }
    let value = |x: &[f64]| parts.iter().map(|b| nats(&block_masses(x, b))).fold(f64::INFINITY, f64::min);
    Ok(if value(&padded) >= value(&p) - 1e-12 { (padded, steps) } else { (p, steps) })
}

/// Clique partitions (as block masks) where no two blocks form a clique together.
fn non_mergeable(g: &Graph, caps: &Caps) -> Result<Vec<Vec<u64>>> {
    let nbr: Vec<u64> = (0..g.len()).map(|v| g.neighbor_mask(v)).collect();
    let joinable = |a: u64, b: u64| bits(a).all(|v| b & !nbr[v] == 0);
    let mut out = Vec::new();
    let mut it = clique_partitions(g, caps)?;
    while it.advance() {
        let b = it.blocks();
        if (0..b.len()).all(|i| (i + 1..b.len()).all(|j| !joinable(b[i], b[j]))) {
            out.push(b.to_vec());
        }
    }
    Ok(out)
}

fn block_masses(p: &[f64], blocks: &[u64]) -> Vec<f64> {
    blocks.iter().map(|&b| bits(b).map(|v| p[v]).sum()).collect()
}

fn nats(masses: &[f64]) -> f64 {
    masses.iter().filter(|&&s| s > 0.0).map(|&s| -s * s.ln()).sum()
}

/// A constraint counts as slack once it sits this far (nats) above `t`.
const SLACK_DROP: f64 = 0.05;
const STEPS_PER_STAGE: usize = 500;

struct Solver<'a> {
    parts: &'a [Vec<u64>],
    m: usize,
    live: Vec<bool>,
    delta: f64,
    mu: f64,
    steps: usize,
}

impl<'a> Solver<'a> {
    fn new(parts: &'a [Vec<u64>], m: usize) -> Self {
        Solver { parts, m, live: vec![true; parts.len()], delta: 1.0, mu: 1e-3, steps: 0 }
    }

    fn run(mut self, opts: &EntropyOptions) -> Result<(Vec<f64>, usize)> {
        let mut p = vec![1.0 / self.m as f64; self.m];
        let mut t = self.min_entropy(&p) - 1.0;
        let delta_final = opts.tol;
        loop {
            self.centre(&mut p, &mut t, opts)?;
            if self.delta <= delta_final {
                break;
            }
            self.delta = (self.delta * 0.1).max(delta_final);
            self.mu = (self.delta * 1e-3).max(1e-13);
            if self.mu <= 1e-6 {
                for (k, part) in self.parts.iter().enumerate() {
                    if self.live[k] && nats(&block_masses(&p, part)) - t > SLACK_DROP {
                        self.live[k] = false;
                    }
                }
            }
        }
        // A dropped constraint that became binding is restored and the last stage rerun.
        loop {
            let bad: Vec<usize> = (0..self.parts.len())
                .filter(|&k| !self.live[k] && nats(&block_masses(&p, &self.parts[k])) <= t)
                .collect();
            if bad.is_empty() {
                break;
            }
            for k in bad {
                self.live[k] = true;
            }
            t = self.min_entropy(&p) - self.mu;
            self.centre(&mut p, &mut t, opts)?;
        }
        Ok((p, self.steps))
    }

    fn min_entropy(&self, p: &[f64]) -> f64 {
        self.parts.iter().map(|b| nats(&block_masses(p, b))).fold(f64::INFINITY, f64::min)
    }

    fn value(&self, p: &[f64], t: f64) -> Option<f64> {
        if p.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let mut f = t + self.delta * nats(p);
        for (part, _) in self.parts.iter().zip(&self.live).filter(|(_, &live)| live) {
            let gap = nats(&block_masses(p, part)) - t;
            if !(gap > 0.0) {
                return None;
            }
            f += self.mu * gap.ln();
        }
        Some(f)
    }

    /// Newton iterations at fixed `δ`, `μ`.
    fn centre(&mut self, p: &mut [f64], t: &mut f64, opts: &EntropyOptions) -> Result<()> {
        let m = self.m;
        let n = m + 1;
        for _ in 0..STEPS_PER_STAGE {
            if self.steps >= opts.max_iter {
                return Err(Error::NonConvergence(self.steps));
            }
            self.steps += 1;
            let f0 = self.value(p, *t).expect("iterate stays strictly feasible");
            // Curvature of the barrier rank-one terms enters as `g²/μ` on the
            // diagonal of an augmented system instead of as huge `μ/g²` outer
            // products, which would swamp the `δ/p` terms in floating point.
            let live: Vec<usize> = (0..self.parts.len()).filter(|&k| self.live[k]).collect();
            let size = n + live.len() + 1;
            let mut kkt = DMatrix::<f64>::zeros(size, size);
            let mut grad = DVector::<f64>::zeros(n);
            for i in 0..m {
                grad[i] = self.delta * (-p[i].ln() - 1.0);
                kkt[(i, i)] = self.delta / p[i];
                kkt[(i, size - 1)] = 1.0;
                kkt[(size - 1, i)] = 1.0;
            }
            grad[m] = 1.0;
            for (row, &k) in live.iter().enumerate() {
                let part = &self.parts[k];
                let s = block_masses(p, part);
                let gap = nats(&s) - *t;
                let col = n + row;
                for (b, &mask) in part.iter().enumerate() {
                    let slope = -s[b].ln() - 1.0;
                    for i in bits(mask) {
                        grad[i] += self.mu / gap * slope;
                        kkt[(i, col)] = slope;
                        kkt[(col, i)] = slope;
                        for j in bits(mask) {
                            kkt[(i, j)] += self.mu / (s[b] * gap);
                        }
                    }
                }
                grad[m] -= self.mu / gap;
                kkt[(m, col)] = -1.0;
                kkt[(col, m)] = -1.0;
                kkt[(col, col)] = -gap * gap / self.mu;
            }
            let mut rhs = DVector::<f64>::zeros(size);
            rhs.rows_mut(0, n).copy_from(&grad);
            let Some(sol) = kkt.lu().solve(&rhs) else {
                // Only reachable once rounding dominates; keep the current point.
                return Ok(());
            };
            let dx = sol.rows(0, n).into_owned();
            let dec = grad.dot(&dx);
            if !(dec > 1e-14) {
                return Ok(());
            }
            let mut step = 1.0f64;
            for i in 0..m {
                if dx[i] < 0.0 {
                    step = step.min(0.99 * p[i] / -dx[i]);
                }
            }
            let mut accepted = false;
            while step > 1e-14 {
                let trial: Vec<f64> = (0..m).map(|i| p[i] + step * dx[i]).collect();
                let tt = *t + step * dx[m];
                if let Some(f) = self.value(&trial, tt) {
                    if f >= f0 + 0.01 * step * dec {
                        let sum: f64 = trial.iter().sum();
                        for (pi, v) in p.iter_mut().zip(trial) {
                            *pi = v / sum;
                        }
                        *t = tt;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                // Rounding limits further progress at this stage.
                return Ok(());
            }
        }
        Ok(())
    }
}
