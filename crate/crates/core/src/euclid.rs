//! The ball-sharing rule on point sets in ℝⁿ and its sharing coefficients.
//!
//! `g_r(S)(x)` spreads every point `z` of the union of radius-`r` balls evenly
//! over the centers whose ball contains `z`, normalized by the union volume.
//! In one dimension everything is summed exactly over the arrangement of ball
//! endpoints. Otherwise it is estimated by stratified Monte-Carlo, and every
//! estimate carries a 99% half-width.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::numeric::{decimal_rational, q_int, to_f64, Q};

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// Strata (and random streams) per estimate.
pub const STREAMS: usize = 64;
/// Radius strata for the integrated family.
pub const RADIUS_STRATA: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Exact arrangement sums; one dimension only.
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Estimator {
    /// Exact in one dimension, Monte-Carlo otherwise.
    pub fn auto(dim: usize, samples: usize, seed: u64) -> Estimator {
        if dim == 1 {
            Estimator::Exact
        } else {
            Estimator::MonteCarlo { samples, seed }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// 99% confidence half-width; zero for exact values.
    pub half_width: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, half_width: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorMeta {
    pub method: &'static str,
    pub samples: usize,
    pub seed: Option<u64>,
    pub streams: usize,
}

impl EstimatorMeta {
    fn of(est: Estimator) -> Self {
        match est {
            Estimator::Exact => EstimatorMeta { method: "exact", samples: 0, seed: None, streams: 0 },
            Estimator::MonteCarlo { samples, seed } => {
                EstimatorMeta { method: "monte-carlo", samples, seed: Some(seed), streams: STREAMS }
            }
        }
    }
}

/// Radius-`r` balls around a set of centers.
#[derive(Debug, Clone)]
pub struct BallSystem {
    centers: Vec<Vec<f64>>,
    r: f64,
}

impl BallSystem {
    pub fn new(centers: &[Vec<f64>], r: f64) -> Result<Self> {
        let dim = check_points(centers)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive and finite, got {r}")));
        }
        let _ = dim;
        Ok(BallSystem { centers: centers.to_vec(), r })
    }

    pub fn dim(&self) -> usize {
        self.centers[0].len()
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Indices of the balls containing `z`.
    pub fn members(&self, z: &[f64], out: &mut Vec<usize>) {
        out.clear();
        let r2 = self.r * self.r;
        for (i, c) in self.centers.iter().enumerate() {
            let d2: f64 = c.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= r2 {
                out.push(i);
            }
        }
    }

    /// `|S ∩ B_r(z)|`.
    pub fn count(&self, z: &[f64]) -> usize {
        let mut m = Vec::new();
        self.members(z, &mut m);
        m.len()
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let lo = (0..d).map(|k| self.centers.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min) - self.r).collect();
        let hi = (0..d).map(|k| self.centers.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max) + self.r).collect();
        (lo, hi)
    }
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidParameter("need at least one point".into()));
    };
    let dim = first.len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParameter("points must share one positive dimension".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("coordinates must be finite".into()));
    }
    Ok(dim)
}

fn check_index(points: &[Vec<f64>], i: usize) -> Result<()> {
    if i < points.len() {
        Ok(())
    } else {
        Err(Error::UnknownElement(i.to_string()))
    }
}

/// Exact rational values of the 1-D ball-sharing rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSharing {
    pub weights: Vec<Q>,
    /// `chi[x][y]`; the diagonal holds private weights.
    pub chi: Vec<Vec<Q>>,
    pub union_volume: Q,
}

/// Weights and pairwise sharing coefficients of one rule on one point set.
#[derive(Debug, Clone, Serialize)]
pub struct SharingMatrix {
    pub family: String,
    pub weights: Vec<Estimate>,
    /// `chi[x][y]`; the diagonal holds private weights.
    pub chi: Vec<Vec<Estimate>>,
    /// Largest `|w(x) − Σ_y χ(x,y)|`, diagonal included.
    pub max_row_residual: f64,
    pub meta: EstimatorMeta,
    #[serde(skip)]
    pub exact: Option<ExactSharing>,
}

impl SharingMatrix {
    fn finish(family: String, weights: Vec<Estimate>, chi: Vec<Vec<Estimate>>, est: Estimator) -> Self {
        let max_row_residual = weights
            .iter()
            .zip(&chi)
            .map(|(w, row)| (w.value - row.iter().map(|c| c.value).sum::<f64>()).abs())
            .fold(0.0, f64::max);
        SharingMatrix { family, weights, chi, max_row_residual, meta: EstimatorMeta::of(est), exact: None }
    }

    /// Half-width of the row sum `Σ_y χ(x,y)`, treating entries as fully correlated.
    pub fn row_half_width(&self, x: usize) -> f64 {
        self.chi[x].iter().map(|c| c.half_width).sum()
    }
}

fn exact_gr(centers: &[Q], r: &Q) -> ExactSharing {
    let n = centers.len();
    let mut ends: Vec<Q> = centers.iter().flat_map(|c| [c - r, c + r]).collect();
    ends.sort();
    ends.dedup();
    let zero = Q::zero();
    let mut weights = vec![zero.clone(); n];
    let mut chi = vec![vec![zero.clone(); n]; n];
    let mut vol = zero;
    let two = q_int(2);
    for w in ends.windows(2) {
        let len = &w[1] - &w[0];
        let mid = (&w[0] + &w[1]) / &two;
        let members: Vec<usize> = (0..n).filter(|&i| (&mid - &centers[i]).abs() <= *r).collect();
        let k = members.len();
        if k == 0 {
            continue;
        }
        vol += &len;
        let share = &len / q_int(k);
        for &i in &members {
            weights[i] += &share;
        }
        if k == 1 {
            chi[members[0]][members[0]] += &len;
        } else {
            let pair = &len / q_int(k * (k - 1));
            for &i in &members {
                for &j in &members {
                    if i != j {
                        chi[i][j] += &pair;
                    }
                }
            }
        }
    }
    for w in &mut weights {
        *w /= &vol;
    }
    for c in chi.iter_mut().flatten() {
        *c /= &vol;
    }
    ExactSharing { weights, chi, union_volume: vol }
}

/// Per-stratum sums for every weight and coefficient integrand.
struct Tally {
    samples: usize,
    hits: usize,
    g: Vec<f64>,
    g2: Vec<f64>,
    chi: Vec<f64>,
    chi2: Vec<f64>,
}

fn tally(balls: &BallSystem, lo: &[f64], hi: &[f64], stratum: usize, per: usize, seed: u64, stream: u64) -> Tally {
    let n = balls.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut t = Tally { samples: per, hits: 0, g: vec![0.0; n], g2: vec![0.0; n], chi: vec![0.0; n * n], chi2: vec![0.0; n * n] };
    let width0 = (hi[0] - lo[0]) / STREAMS as f64;
    let mut z = vec![0.0; balls.dim()];
    let mut m = Vec::with_capacity(n);
    for _ in 0..per {
        z[0] = lo[0] + (stratum as f64 + rng.gen::<f64>()) * width0;
        for k in 1..z.len() {
            z[k] = lo[k] + rng.gen::<f64>() * (hi[k] - lo[k]);
        }
        balls.members(&z, &mut m);
        let k = m.len();
        if k == 0 {
            continue;
        }
        t.hits += 1;
        let share = 1.0 / k as f64;
        for &i in &m {
            t.g[i] += share;
            t.g2[i] += share * share;
        }
        if k == 1 {
            t.chi[m[0] * n + m[0]] += 1.0;
            t.chi2[m[0] * n + m[0]] += 1.0;
        } else {
            let pair = 1.0 / (k * (k - 1)) as f64;
            for &i in &m {
                for &j in &m {
                    if i != j {
                        t.chi[i * n + j] += pair;
                        t.chi2[i * n + j] += pair * pair;
                    }
                }
            }
        }
    }
    t
}

/// Ratio `∫h / Vol(∪B)` with a delta-method half-width, for every entry `e`.
fn ratio_estimates(tallies: &[Tally], stratum_vol: f64, sums: impl Fn(&Tally, usize) -> (f64, f64), entries: usize) -> Vec<Estimate> {
    let mut vol = 0.0;
    let mut var_vol = 0.0;
    for t in tallies {
        let n = t.samples as f64;
        let p = t.hits as f64 / n;
        vol += stratum_vol * p;
        var_vol += stratum_vol * stratum_vol * p * (1.0 - p) / (n - 1.0);
    }
    (0..entries)
        .map(|e| {
            let (mut num, mut var_num, mut cov) = (0.0, 0.0, 0.0);
            for t in tallies {
                let n = t.samples as f64;
                let (s, s2) = sums(t, e);
                let mean = s / n;
                let p = t.hits as f64 / n;
                num += stratum_vol * mean;
                let w2 = stratum_vol * stratum_vol / (n - 1.0);
                var_num += w2 * (s2 / n - mean * mean);
                // The integrand vanishes off the union, so E[h·1_union] = E[h].
                cov += w2 * (mean - mean * p);
            }
            let ratio = num / vol;
            let var = (var_num - 2.0 * ratio * cov + ratio * ratio * var_vol) / (vol * vol);
            Estimate { value: ratio, half_width: Z99 * var.max(0.0).sqrt() }
        })
        .collect()
}

/// Weights from streams `[0, S)`, coefficients from the independent streams
/// `[S, 2S)`, so the row identity is a genuine statistical check.
fn monte_carlo_gr(balls: &BallSystem, samples: usize, seed: u64, stream_base: u64) -> Result<(Vec<Estimate>, Vec<Vec<Estimate>>)> {
    if samples < 2 * STREAMS {
        return Err(Error::InvalidParameter(format!("Monte-Carlo needs at least {} samples", 2 * STREAMS)));
    }
    let n = balls.len();
    let (lo, hi) = balls.bounding_box();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let stratum_vol = box_vol / STREAMS as f64;
    let per = samples / (2 * STREAMS);
    let run = |offset: u64| -> Vec<Tally> {
        (0..STREAMS)
            .into_par_iter()
            .map(|k| tally(balls, &lo, &hi, k, per, seed, stream_base + offset + k as u64))
            .collect()
    };
    let for_weights = run(0);
    let for_chi = run(STREAMS as u64);
    let weights = ratio_estimates(&for_weights, stratum_vol, |t, e| (t.g[e], t.g2[e]), n);
    let flat = ratio_estimates(&for_chi, stratum_vol, |t, e| (t.chi[e], t.chi2[e]), n * n);
    Ok((weights, flat.chunks(n).map(|r| r.to_vec()).collect()))
}

fn rationals(points: &[Vec<f64>]) -> Result<Vec<Q>> {
    points.iter().map(|p| decimal_rational(p[0])).collect()
}

/// The full sharing matrix of `g_r`.
pub fn sharing_gr(points: &[Vec<f64>], r: f64, est: Estimator) -> Result<SharingMatrix> {
    let balls = BallSystem::new(points, r)?;
    let family = format!("gr(r={r})");
    match est {
        Estimator::Exact => {
            if balls.dim() != 1 {
                return Err(Error::InvalidParameter("exact sharing is only available in one dimension".into()));
            }
            let ex = exact_gr(&rationals(points)?, &decimal_rational(r)?);
            let weights = ex.weights.iter().map(|w| Estimate::exact(to_f64(w))).collect();
            let chi = ex.chi.iter().map(|row| row.iter().map(|c| Estimate::exact(to_f64(c))).collect()).collect();
            let mut m = SharingMatrix::finish(family, weights, chi, est);
            m.exact = Some(ex);
            Ok(m)
        }
        Estimator::MonteCarlo { samples, seed } => {
            let (weights, chi) = monte_carlo_gr(&balls, samples, seed, 0)?;
            Ok(SharingMatrix::finish(family, weights, chi, est))
        }
    }
}

pub fn g_r(points: &[Vec<f64>], r: f64, x: usize, est: Estimator) -> Result<Estimate> {
    check_index(points, x)?;
    Ok(sharing_gr(points, r, est)?.weights[x])
}

pub fn chi_gr(points: &[Vec<f64>], r: f64, x: usize, y: usize, est: Estimator) -> Result<Estimate> {
    check_index(points, x)?;
    check_index(points, y)?;
    Ok(sharing_gr(points, r, est)?.chi[x][y])
}

/// `Vol(B_r(0) ∩ B_r(η))` on the line.
pub fn intersection_length_1d(r: f64, eta: f64) -> f64 {
    (2.0 * r - eta.abs()).max(0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct RemovalRow {
    pub y: usize,
    pub before: Estimate,
    pub after: Estimate,
    /// `(g(S)(y) + χ(x,y))·(1 + η)`.
    pub predicted: Estimate,
    pub residual: f64,
    pub tolerance: f64,
    /// `g(S∖{x})(y) ≥ g(S)(y)` within tolerance.
    pub increased: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemovalReport {
    pub x: usize,
    /// `V_priv(x) / (Vol(∪B) − V_priv(x))`, with the absolute private volume.
    pub eta: Estimate,
    pub rows: Vec<RemovalRow>,
    pub max_residual: f64,
    pub holds: bool,
}

/// Checks `g_r(S∖{x})(y) = (g_r(S)(y) + χ(x,y))·(1 + η)` for every `y ≠ x`.
pub fn removal_effect_gr(points: &[Vec<f64>], r: f64, x: usize, est: Estimator) -> Result<RemovalReport> {
    check_index(points, x)?;
    if points.len() < 2 {
        return Err(Error::TooFewVertices(points.len()));
    }
    let rest: Vec<Vec<f64>> = points.iter().enumerate().filter(|&(i, _)| i != x).map(|(_, p)| p.clone()).collect();
    let keep: Vec<usize> = (0..points.len()).filter(|&i| i != x).collect();
    let before = sharing_gr(points, r, est)?;
    let after_est = match est {
        Estimator::Exact => Estimator::Exact,
        // Independent streams for the smaller set.
        Estimator::MonteCarlo { samples, seed } => {
            Estimator::MonteCarlo { samples, seed: seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(x as u64 + 1) }
        }
    };
    let after = sharing_gr(&rest, r, after_est)?;
    let mut rows = Vec::new();
    let eta;
    if let (Some(b), Some(a)) = (&before.exact, &after.exact) {
        let private = &b.chi[x][x];
        let one = q_int(1);
        let eta_q = private / (&one - private);
        eta = Estimate::exact(to_f64(&eta_q));
        for (k, &y) in keep.iter().enumerate() {
            let predicted = (&b.weights[y] + &b.chi[x][y]) * (&one + &eta_q);
            let residual = to_f64(&(&a.weights[k] - &predicted).abs());
            rows.push(RemovalRow {
                y,
                before: before.weights[y],
                after: after.weights[k],
                predicted: Estimate::exact(to_f64(&predicted)),
                residual,
                tolerance: 1e-9,
                increased: a.weights[k] >= b.weights[y],
            });
        }
    } else {
        let private = before.chi[x][x];
        let eta_v = private.value / (1.0 - private.value);
        eta = Estimate { value: eta_v, half_width: private.half_width / (1.0 - private.value).powi(2) };
        for (k, &y) in keep.iter().enumerate() {
            let (g, c) = (before.weights[y], before.chi[x][y]);
            let predicted = Estimate {
                value: (g.value + c.value) * (1.0 + eta_v),
                half_width: (1.0 + eta_v) * (g.half_width + c.half_width) + (g.value + c.value) * eta.half_width,
            };
            let got = after.weights[k];
            rows.push(RemovalRow {
                y,
                before: g,
                after: got,
                predicted,
                residual: (got.value - predicted.value).abs(),
                tolerance: 3.0 * (got.half_width + predicted.half_width),
                increased: got.value >= g.value - (got.half_width + g.half_width),
            });
        }
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let holds = rows.iter().all(|r| r.residual <= r.tolerance);
    Ok(RemovalReport { x, eta, rows, max_residual, holds })
}

/// `∫ ν(r)·(a0 + a1 r)/(c0 + c1 r) dr` over `[r0, r1]` with constant `ν`.
fn ratio_integral(nu: f64, (a0, a1): (f64, f64), (c0, c1): (f64, f64), r0: f64, r1: f64) -> f64 {
    if c1 == 0.0 {
        return nu * (a0 * (r1 - r0) + a1 * (r1 * r1 - r0 * r0) / 2.0) / c0;
    }
    let k = a1 / c1;
    let rem = a0 - k * c0;
    let mut v = k * (r1 - r0);
    if rem != 0.0 {
        v += rem / c1 * ((c0 + c1 * r1) / (c0 + c1 * r0)).ln();
    }
    nu * v
}

/// Closed-form 1-D integral over radii. Between the critical radii
/// `|c_i − c_j|/2` and the density knots the endpoint order is fixed, every
/// arrangement interval has length linear in `r`, and so has the union.
fn exact_fnu(centers: &[f64], density: &Density) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = centers.len();
    let alpha = density.alpha();
    let mut cuts = vec![0.0, alpha];
    for i in 0..n {
        for j in i + 1..n {
            let h = (centers[i] - centers[j]).abs() / 2.0;
            if h > 0.0 && h < alpha {
                cuts.push(h);
            }
        }
    }
    cuts.extend(density.breakpoints());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut weights = vec![0.0; n];
    let mut chi = vec![vec![0.0; n]; n];
    let mut ends: Vec<(f64, f64)> = centers.iter().flat_map(|&c| [(c, -1.0), (c, 1.0)]).collect();
    for w in cuts.windows(2) {
        let (r0, r1) = (w[0], w[1]);
        let rm = 0.5 * (r0 + r1);
        let nu = density.pdf(rm);
        if r1 <= r0 || nu == 0.0 {
            continue;
        }
        let at = |e: &(f64, f64)| e.0 + e.1 * rm;
        ends.sort_by(|a, b| at(a).total_cmp(&at(b)));
        let mut vol = (0.0, 0.0);
        let mut pieces = Vec::new();
        for pair in ends.windows(2) {
            let len = (pair[1].0 - pair[0].0, pair[1].1 - pair[0].1);
            if len.0 + len.1 * rm <= 0.0 {
                continue;
            }
            let mid = 0.5 * (at(&pair[0]) + at(&pair[1]));
            let members: Vec<usize> = (0..n).filter(|&i| (mid - centers[i]).abs() <= rm).collect();
            if members.is_empty() {
                continue;
            }
            vol.0 += len.0;
            vol.1 += len.1;
            pieces.push((members, len));
        }
        for (members, len) in pieces {
            let v = ratio_integral(nu, len, vol, r0, r1);
            let k = members.len();
            for &i in &members {
                weights[i] += v / k as f64;
            }
            if k == 1 {
                chi[members[0]][members[0]] += v;
            } else {
                let pair = v / (k * (k - 1)) as f64;
                for &i in &members {
                    for &j in &members {
                        if i != j {
                            chi[i][j] += pair;
                        }
                    }
                }
            }
        }
    }
    (weights, chi)
}

/// Sharing matrix of the integrated family `f_ν = ∫ ν(r)·g_r dr`.
/// Monte-Carlo draws one radius per stratum of `ν`'s quantiles and runs an
/// independent ball estimate at each; the half-width comes from the spread
/// across radii, which is conservative for stratified draws.
pub fn sharing_fnu(points: &[Vec<f64>], density: &Density, est: Estimator) -> Result<SharingMatrix> {
    let dim = check_points(points)?;
    let family = format!("fnu(nu={}, alpha={})", density.name(), density.alpha());
    match est {
        Estimator::Exact => {
            if dim != 1 {
                return Err(Error::InvalidParameter("exact sharing is only available in one dimension".into()));
            }
            let centers: Vec<f64> = points.iter().map(|p| p[0]).collect();
            let (w, chi) = exact_fnu(&centers, density);
            let weights = w.into_iter().map(Estimate::exact).collect();
            let chi = chi.into_iter().map(|row| row.into_iter().map(Estimate::exact).collect()).collect();
            Ok(SharingMatrix::finish(family, weights, chi, est))
        }
        Estimator::MonteCarlo { samples, seed } => {
            let n = points.len();
            let per_radius = samples / RADIUS_STRATA;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let radii: Vec<f64> = (0..RADIUS_STRATA)
                .map(|j| density.quantile((j as f64 + rng.gen::<f64>()) / RADIUS_STRATA as f64).max(f64::MIN_POSITIVE))
                .collect();
            let runs = radii
                .iter()
                .enumerate()
                .map(|(j, &r)| monte_carlo_gr(&BallSystem::new(points, r)?, per_radius, seed, (j as u64 + 1) * 4 * STREAMS as u64))
                .collect::<Result<Vec<_>>>()?;
            let combine = |pick: &dyn Fn(&(Vec<Estimate>, Vec<Vec<Estimate>>)) -> f64| -> Estimate {
                let vals: Vec<f64> = runs.iter().map(pick).collect();
                let m = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / m;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
                Estimate { value: mean, half_width: Z99 * (var / m).sqrt() }
            };
            let weights = (0..n).map(|x| combine(&|run| run.0[x].value)).collect();
            let chi = (0..n).map(|x| (0..n).map(|y| combine(&|run| run.1[x][y].value)).collect()).collect();
            Ok(SharingMatrix::finish(family, weights, chi, est))
        }
    }
}

pub fn chi_fnu(points: &[Vec<f64>], density: &Density, x: usize, y: usize, est: Estimator) -> Result<Estimate> {
    check_index(points, x)?;
    check_index(points, y)?;
    Ok(sharing_fnu(points, density, est)?.chi[x][y])
}

#[derive(Debug, Clone, Serialize)]
pub struct Dominance {
    /// `B_r(x) ∩ B_r(z) ⊆ B_r(x) ∩ B_r(y)`; sampled in dimension ≥ 2.
    pub dominates: bool,
    /// A point of `B_r(x) ∩ B_r(z)` outside `B_r(y)`, when one was found.
    pub witness: Option<Vec<f64>>,
    pub chi_y: Estimate,
    pub chi_z: Estimate,
    /// `χ(x,y) ≥ χ(x,z)` within estimator tolerance, whenever `dominates`.
    pub ordering_holds: bool,
}

pub fn dominance_check(points: &[Vec<f64>], r: f64, x: usize, y: usize, z: usize, est: Estimator) -> Result<Dominance> {
    for i in [x, y, z] {
        check_index(points, i)?;
    }
    let balls = BallSystem::new(points, r)?;
    let m = sharing_gr(points, r, est)?;
    let (chi_y, chi_z) = (m.chi[x][y], m.chi[x][z]);
    let (dominates, witness) = if balls.dim() == 1 {
        let (cx, cy, cz) = (points[x][0], points[y][0], points[z][0]);
        let meet = |a: f64, b: f64| (a.max(b) - r, a.min(b) + r);
        let (zl, zh) = meet(cx, cz);
        let (yl, yh) = meet(cx, cy);
        if zl > zh || (yl <= zl && zh <= yh) {
            (true, None)
        } else {
            let w = if zl < yl || yl > yh { zl } else { zh };
            (false, Some(vec![w]))
        }
    } else {
        let samples = match est {
            Estimator::MonteCarlo { samples, .. } => samples,
            Estimator::Exact => DEFAULT_SAMPLES,
        };
        let seed = match est {
            Estimator::MonteCarlo { seed, .. } => seed,
            Estimator::Exact => 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX - 1);
        let dim = balls.dim();
        let inside = |p: &[f64], c: &[f64]| p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r;
        let mut witness = None;
        let mut p = vec![0.0; dim];
        for _ in 0..samples {
            for k in 0..dim {
                p[k] = points[x][k] + r * (2.0 * rng.gen::<f64>() - 1.0);
            }
            if inside(&p, &points[x]) && inside(&p, &points[z]) && !inside(&p, &points[y]) {
                witness = Some(p.clone());
                break;
            }
        }
        (witness.is_none(), witness)
    };
    let ordering_holds = !dominates
        || match &m.exact {
            Some(ex) => ex.chi[x][y] >= ex.chi[x][z],
            None => chi_y.value >= chi_z.value - (chi_y.half_width + chi_z.half_width),
        };
    Ok(Dominance { dominates, witness, chi_y, chi_z, ordering_holds })
}
