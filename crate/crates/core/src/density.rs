//! Radius densities on `[0, α]`.

use crate::error::{Error, Result};
use crate::numeric::{decimal_rational, Q};

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    Uniform,
    /// CDF knots `(r, Γ(r))`, starting at `(0, 0)` and ending at `(α, 1)`.
    PiecewiseLinear(Vec<(f64, f64)>),
}

/// A bounded density with an exact CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    kind: DensityKind,
    alpha: f64,
    nu_bar: f64,
}

impl Density {
    pub fn uniform(alpha: f64) -> Result<Density> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive and finite, got {alpha}")));
        }
        Ok(Density { kind: DensityKind::Uniform, alpha, nu_bar: 1.0 / alpha })
    }

    /// `nu_bar` may be declared; it must dominate every slope. Omitted, it is the largest slope.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>, nu_bar: Option<f64>) -> Result<Density> {
        let bad = |why: &str| Err(Error::InvalidParameter(format!("CDF knots: {why}")));
        if knots.len() < 2 {
            return bad("need at least two knots");
        }
        if knots.iter().any(|&(r, g)| !r.is_finite() || !g.is_finite()) {
            return bad("non-finite value");
        }
        if knots[0] != (0.0, 0.0) {
            return bad("must start at (0, 0)");
        }
        let (alpha, last) = knots[knots.len() - 1];
        if last != 1.0 || alpha <= 0.0 {
            return bad("must end at (alpha, 1) with alpha > 0");
        }
        let mut slope_max = 0.0f64;
        for w in knots.windows(2) {
            let ((r0, g0), (r1, g1)) = (w[0], w[1]);
            if r1 <= r0 {
                return bad("radii must increase strictly");
            }
            if g1 < g0 {
                return bad("CDF must be nondecreasing");
            }
            slope_max = slope_max.max((g1 - g0) / (r1 - r0));
        }
        let nu_bar = match nu_bar {
            Some(b) if b + 1e-12 < slope_max => {
                return Err(Error::InvalidParameter(format!("declared density bound {b} is below slope {slope_max}")))
            }
            Some(b) => b,
            None => slope_max,
        };
        Ok(Density { kind: DensityKind::PiecewiseLinear(knots), alpha, nu_bar })
    }

    /// `uniform`, or `pl:r:g,r:g,…` listing CDF knots. `alpha` applies to `uniform`
    /// and must match the last knot otherwise.
    pub fn parse(spec: &str, alpha: f64) -> Result<Density> {
        let spec = spec.trim();
        if spec == "uniform" {
            return Density::uniform(alpha);
        }
        let Some(body) = spec.strip_prefix("pl:") else {
            return Err(Error::InvalidParameter(format!("unknown density `{spec}` (expected uniform or pl:r:g,…)")));
        };
        let mut knots = Vec::new();
        for item in body.split(',') {
            let (r, g) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter(format!("knot `{item}` is not r:g")))?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("knot `{item}` is not numeric")))
            };
            knots.push((num(r)?, num(g)?));
        }
        let d = Density::piecewise_linear(knots, None)?;
        if d.alpha != alpha {
            return Err(Error::InvalidParameter(format!("last knot {} disagrees with alpha {alpha}", d.alpha)));
        }
        Ok(d)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Upper bound on the pdf.
    pub fn nu_bar(&self) -> f64 {
        self.nu_bar
    }

    /// Short name for reports.
    pub fn name(&self) -> String {
        match &self.kind {
            DensityKind::Uniform => "uniform".into(),
            DensityKind::PiecewiseLinear(k) => {
                let knots: Vec<String> = k.iter().map(|(r, g)| format!("{r}:{g}")).collect();
                format!("pl:{}", knots.join(","))
            }
        }
    }

    /// Γ(r), clamped outside `[0, α]`.
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.alpha {
            return 1.0;
        }
        match &self.kind {
            DensityKind::Uniform => r / self.alpha,
            DensityKind::PiecewiseLinear(k) => {
                let i = k.partition_point(|&(x, _)| x <= r) - 1;
                let ((r0, g0), (r1, g1)) = (k[i], k[i + 1]);
                g0 + (r - r0) * (g1 - g0) / (r1 - r0)
            }
        }
    }

    /// Γ(r) as an exact rational, reading floats as their shortest decimals.
    pub fn cdf_exact(&self, r: f64) -> Result<Q> {
        if r <= 0.0 {
            return Ok(Q::from_integer(0.into()));
        }
        if r >= self.alpha {
            return Ok(Q::from_integer(1.into()));
        }
        let rq = decimal_rational(r)?;
        match &self.kind {
            DensityKind::Uniform => Ok(rq / decimal_rational(self.alpha)?),
            DensityKind::PiecewiseLinear(k) => {
                let i = k.partition_point(|&(x, _)| x <= r) - 1;
                let [r0, g0, r1, g1] = [k[i].0, k[i].1, k[i + 1].0, k[i + 1].1].map(decimal_rational);
                let (r0, g0, r1, g1) = (r0?, g0?, r1?, g1?);
                Ok(&g0 + (rq - &r0) * (g1 - &g0) / (r1 - r0))
            }
        }
    }

    /// ν(r); right-continuous at knots, zero outside `[0, α)`.
    pub fn pdf(&self, r: f64) -> f64 {
        if !(0.0..self.alpha).contains(&r) {
            return 0.0;
        }
        match &self.kind {
            DensityKind::Uniform => 1.0 / self.alpha,
            DensityKind::PiecewiseLinear(k) => {
                let i = k.partition_point(|&(x, _)| x <= r) - 1;
                let ((r0, g0), (r1, g1)) = (k[i], k[i + 1]);
                (g1 - g0) / (r1 - r0)
            }
        }
    }

    /// Smallest `r` with `Γ(r) ≥ u`, for `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match &self.kind {
            DensityKind::Uniform => u * self.alpha,
            DensityKind::PiecewiseLinear(k) => {
                let i = k.partition_point(|&(_, g)| g < u).clamp(1, k.len() - 1);
                let ((r0, g0), (r1, g1)) = (k[i - 1], k[i]);
                if g1 == g0 {
                    r0
                } else {
                    r0 + (u - g0) * (r1 - r0) / (g1 - g0)
                }
            }
        }
    }

    /// Interior CDF knots; the pdf is constant between them.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            DensityKind::Uniform => Vec::new(),
            DensityKind::PiecewiseLinear(k) => k[1..k.len() - 1].iter().map(|&(r, _)| r).collect(),
        }
    }

    /// Mass of `[lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.cdf(hi) - self.cdf(lo)
    }
}
