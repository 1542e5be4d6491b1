//! Vertex-based sharing coefficients of graph rules and the four sharing axioms.
//!
//! Removing `x` rescales every weight outside `N[x]` by a common factor
//! `1 + η` when the rule behaves multiplicatively (axiom 1). The sharing
//! coefficient `χ(x,y) = w(G∖x)(y)/(1+η) − w(G)(y)` is what `y` gains from
//! `x`'s departure beyond that rescaling, and `χ(x,x) = η/(1+η)` is `x`'s
//! private weight.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{format_rational, to_f64, Q};
use crate::rules::GraphWeighting;
use crate::weights::WeightVector;

/// Comparison slack for floating rules.
pub const FLOAT_TOL: f64 = 1e-6;

/// A number from an exact or a floating rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => to_f64(q),
            Value::Float(f) => *f,
        }
    }

    /// Strictly below zero; floats get `FLOAT_TOL` slack.
    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_negative(),
            Value::Float(f) => *f < -FLOAT_TOL,
        }
    }

    /// `self < other`, floats with slack.
    pub fn below(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a < b,
            _ => self.to_f64() < other.to_f64() - FLOAT_TOL,
        }
    }

    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= FLOAT_TOL,
        }
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Float(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => f.write_str(&format_rational(q)),
            Value::Float(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn entry(w: &WeightVector, i: usize) -> Value {
    match w {
        WeightVector::Exact(v) => Value::Exact(v[i].clone()),
        WeightVector::Float(v) => Value::Float(v[i]),
    }
}

/// Arithmetic on mixed values falls back to floats.
fn combine(a: &Value, b: &Value, exact: impl Fn(&Q, &Q) -> Q, float: impl Fn(f64, f64) -> f64) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(exact(x, y)),
        _ => Value::Float(float(a.to_f64(), b.to_f64())),
    }
}

/// The rescaling factor observed when `x` is removed.
#[derive(Debug, Clone, Serialize)]
pub struct RescaleReport {
    pub x: usize,
    /// `None` when undefined: ratios disagree, or every non-neighbor has zero weight.
    pub eta: Option<Value>,
    pub consistent: bool,
    /// Two non-neighbors of `x` with different ratios.
    pub witness: Option<(usize, usize)>,
}

/// `G ∖ {x}`, the rule on both graphs, and the index map.
struct Removal {
    before: WeightVector,
    after: WeightVector,
    keep: Vec<usize>,
}

impl Removal {
    fn new(g: &Graph, rule: &dyn GraphWeighting, x: usize, before: WeightVector) -> Result<Removal> {
        let (h, keep) = g.remove_vertex(x);
        Ok(Removal { before, after: rule.weigh(&h)?, keep })
    }

    fn after_of(&self, y: usize) -> Value {
        let k = self.keep.binary_search(&y).expect("y survives the removal");
        entry(&self.after, k)
    }
}

fn check_vertex(g: &Graph, x: usize) -> Result<()> {
    if x >= g.len() {
        return Err(Error::UnknownElement(x.to_string()));
    }
    Ok(())
}

fn rescale(g: &Graph, r: &Removal, x: usize) -> RescaleReport {
    let closed = g.closed_neighborhood(x);
    let outside: Vec<usize> = (0..g.len()).filter(|&z| !closed.contains(z)).collect();
    if outside.is_empty() {
        let zero = if r.before.is_exact() { Value::Exact(Q::zero()) } else { Value::Float(0.0) };
        return RescaleReport { x, eta: Some(zero), consistent: true, witness: None };
    }
    let mut first: Option<(usize, Value)> = None;
    for &z in &outside {
        let (b, a) = (entry(&r.before, z), r.after_of(z));
        let zero_before = match &b {
            Value::Exact(q) => q.is_zero(),
            Value::Float(f) => f.abs() <= FLOAT_TOL,
        };
        if zero_before {
            // No ratio; a weight appearing from nothing is not a rescaling.
            let zero_after = match &a {
                Value::Exact(q) => q.is_zero(),
                Value::Float(f) => f.abs() <= FLOAT_TOL,
            };
            if zero_after {
                continue;
            }
            return RescaleReport { x, eta: None, consistent: false, witness: Some((z, z)) };
        }
        let ratio = combine(&a, &b, |p, q| p / q, |p, q| p / q);
        match &first {
            None => first = Some((z, ratio)),
            Some((z0, r0)) => {
                if !r0.same(&ratio) {
                    return RescaleReport { x, eta: None, consistent: false, witness: Some((*z0, z)) };
                }
            }
        }
    }
    match first {
        Some((_, ratio)) => {
            let eta = combine(&ratio, &ratio, |p, _| p - Q::one(), |p, _| p - 1.0);
            RescaleReport { x, eta: Some(eta), consistent: true, witness: None }
        }
        None => RescaleReport { x, eta: None, consistent: true, witness: None },
    }
}

/// `η_{G,x}`; ratios from every non-neighbor must agree.
pub fn eta(g: &Graph, rule: &dyn GraphWeighting, x: usize) -> Result<RescaleReport> {
    check_vertex(g, x)?;
    if g.len() < 2 {
        return Err(Error::TooFewVertices(2));
    }
    let r = Removal::new(g, rule, x, rule.weigh(g)?)?;
    Ok(rescale(g, &r, x))
}

fn defined_eta(rep: &RescaleReport) -> Result<&Value> {
    match (&rep.eta, rep.witness) {
        (Some(e), _) => Ok(e),
        (None, Some((z1, z2))) => Err(Error::InconsistentRescaling { x: rep.x, z1, z2 }),
        (None, None) => Err(Error::InvalidParameter(format!(
            "rescaling for vertex {} is undefined: every non-neighbor has zero weight",
            rep.x
        ))),
    }
}

fn chi_from(r: &Removal, eta: &Value, y: usize) -> Value {
    let before = entry(&r.before, y);
    let scaled = combine(&r.after_of(y), eta, |a, e| a / (Q::one() + e), |a, e| a / (1.0 + e));
    combine(&scaled, &before, |a, b| a - b, |a, b| a - b)
}

fn private_from(eta: &Value) -> Value {
    combine(eta, eta, |e, _| e / (Q::one() + e), |e, _| e / (1.0 + e))
}

/// `χ(x,y)` for `y ≠ x`; refuses when the rescaling is inconsistent.
pub fn chi_graph(g: &Graph, rule: &dyn GraphWeighting, x: usize, y: usize) -> Result<Value> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    if x == y {
        return Err(Error::InvalidParameter("chi_graph needs x ≠ y; use private_graph".into()));
    }
    let r = Removal::new(g, rule, x, rule.weigh(g)?)?;
    let rep = rescale(g, &r, x);
    Ok(chi_from(&r, defined_eta(&rep)?, y))
}

/// `χ(x,x) = η/(1+η)`.
pub fn private_graph(g: &Graph, rule: &dyn GraphWeighting, x: usize) -> Result<Value> {
    Ok(private_from(defined_eta(&eta(g, rule, x)?)?))
}

/// Every coefficient of one rule on one graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphSharing {
    pub rule: String,
    pub labels: Vec<String>,
    pub weights: Vec<Value>,
    pub rescaling: Vec<RescaleReport>,
    /// `chi[x]` is `None` when `x`'s rescaling is undefined; the diagonal is the private weight.
    pub chi: Vec<Option<Vec<Value>>>,
}

impl GraphSharing {
    /// Largest `|w(x) − Σ_y χ(x,y)|` over rows that are defined.
    pub fn max_row_residual(&self) -> f64 {
        self.chi
            .iter()
            .zip(&self.weights)
            .filter_map(|(row, w)| row.as_ref().map(|r| (w.to_f64() - r.iter().map(Value::to_f64).sum::<f64>()).abs()))
            .fold(0.0, f64::max)
    }

    /// Row sums are exact in rational mode.
    pub fn rows_exact(&self) -> bool {
        self.chi.iter().zip(&self.weights).all(|(row, w)| match (row, w) {
            (Some(r), Value::Exact(w)) => r.iter().map(|v| v.exact().cloned().unwrap_or_default()).sum::<Q>() == *w,
            _ => true,
        })
    }
}

pub fn sharing_table(g: &Graph, rule: &dyn GraphWeighting) -> Result<GraphSharing> {
    let n = g.len();
    if n < 2 {
        return Err(Error::TooFewVertices(2));
    }
    let before = rule.weigh(g)?;
    let rows: Vec<(RescaleReport, Option<Vec<Value>>)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let r = Removal::new(g, rule, x, before.clone())?;
            let rep = rescale(g, &r, x);
            let row = rep.eta.clone().map(|e| {
                (0..n).map(|y| if y == x { private_from(&e) } else { chi_from(&r, &e, y) }).collect()
            });
            Ok((rep, row))
        })
        .collect::<Result<_>>()?;
    let (rescaling, chi) = rows.into_iter().unzip();
    Ok(GraphSharing {
        rule: rule.name(),
        labels: g.labels().to_vec(),
        weights: (0..n).map(|i| entry(&before, i)).collect(),
        rescaling,
        chi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomResult {
    pub axiom: u8,
    pub name: &'static str,
    pub holds: bool,
    /// Labels of the first violating vertices.
    pub witness: Option<Vec<String>>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub rule: String,
    pub vertices: usize,
    pub results: Vec<AxiomResult>,
    /// Vertices whose rescaling is undefined; axioms 2–4 skip their rows.
    pub skipped_rows: Vec<String>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.results.iter().all(|r| r.holds)
    }

    pub fn result(&self, axiom: u8) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom == axiom)
    }
}

pub const AXIOM_NAMES: [&str; 4] =
    ["multiplicative rescaling", "non-negative sharing", "sharing symmetry", "sharing domination"];

/// `y ⪰_x z` iff `N[x] ∩ N[z] ⊆ N[x] ∩ N[y]`.
pub fn dominates(g: &Graph, x: usize, y: usize, z: usize) -> bool {
    let nx = g.closed_neighborhood(x);
    let mut xz = nx.clone();
    xz.intersect_with(&g.closed_neighborhood(z));
    let mut xy = nx;
    xy.intersect_with(&g.closed_neighborhood(y));
    xz.is_subset(&xy)
}

/// Checks the requested axioms (numbers 1–4) with exact witnesses in rational mode.
pub fn audit_axioms(g: &Graph, rule: &dyn GraphWeighting, axioms: &[u8]) -> Result<AxiomReport> {
    if let Some(bad) = axioms.iter().find(|&&a| !(1..=4).contains(&a)) {
        return Err(Error::InvalidParameter(format!("unknown axiom {bad}; expected 1–4")));
    }
    let n = g.len();
    let table = if n >= 2 { Some(sharing_table(g, rule)?) } else { None };
    let label = |v: usize| g.labels()[v].clone();
    let mut results = Vec::new();
    let mut skipped_rows = Vec::new();
    if let Some(t) = &table {
        skipped_rows = t.chi.iter().enumerate().filter(|(_, r)| r.is_none()).map(|(x, _)| label(x)).collect();
    }
    let rows = |x: usize| table.as_ref().and_then(|t| t.chi[x].as_ref());
    let mut wanted: Vec<u8> = axioms.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    for a in wanted {
        let mut witness: Option<Vec<usize>> = None;
        let mut detail = String::new();
        match a {
            1 => {
                if let Some(t) = &table {
                    if let Some(rep) = t.rescaling.iter().find(|r| !r.consistent) {
                        let (z1, z2) = rep.witness.expect("inconsistent reports carry a witness");
                        witness = Some(vec![rep.x, z1, z2]);
                        detail = format!("removing {} rescales {} and {} differently", label(rep.x), label(z1), label(z2));
                    } else if let Some(rep) = t.rescaling.iter().find(|r| r.eta.as_ref().is_some_and(Value::is_negative)) {
                        // The factor must be a non-negative η: far weights may not shrink.
                        witness = Some(vec![rep.x]);
                        detail = format!("removing {} gives η = {} < 0", label(rep.x), rep.eta.as_ref().expect("checked"));
                    }
                }
            }
            2 => {
                'search: for x in 0..n {
                    let Some(row) = rows(x) else { continue };
                    // Distinct pairs only; the diagonal is η/(1+η), covered by axiom 1.
                    for y in (0..n).filter(|&y| y != x) {
                        if row[y].is_negative() {
                            witness = Some(vec![x, y]);
                            detail = format!("χ({},{}) = {}", label(x), label(y), row[y]);
                            break 'search;
                        }
                    }
                }
            }
            3 => {
                'search: for x in 0..n {
                    for y in x + 1..n {
                        let (Some(rx), Some(ry)) = (rows(x), rows(y)) else { continue };
                        if !rx[y].same(&ry[x]) {
                            witness = Some(vec![x, y]);
                            detail = format!("χ({0},{1}) = {2} but χ({1},{0}) = {3}", label(x), label(y), rx[y], ry[x]);
                            break 'search;
                        }
                    }
                }
            }
            4 => {
                'search: for x in 0..n {
                    let Some(row) = rows(x) else { continue };
                    for y in (0..n).filter(|&y| y != x) {
                        for z in (0..n).filter(|&z| z != x && z != y) {
                            if dominates(g, x, y, z) && row[y].below(&row[z]) {
                                witness = Some(vec![x, y, z]);
                                detail = format!(
                                    "{} dominates {} around {} but χ = {} < {}",
                                    label(y),
                                    label(z),
                                    label(x),
                                    row[y],
                                    row[z]
                                );
                                break 'search;
                            }
                        }
                    }
                }
            }
            _ => unreachable!("axiom numbers were validated"),
        }
        results.push(AxiomResult {
            axiom: a,
            name: AXIOM_NAMES[a as usize - 1],
            holds: witness.is_none(),
            witness: witness.map(|w| w.into_iter().map(label).collect()),
            detail,
        });
    }
    Ok(AxiomReport { rule: rule.name(), vertices: n, results, skipped_rows })
}
