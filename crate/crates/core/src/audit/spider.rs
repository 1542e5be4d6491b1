//! Symmetry plus strong locality is unsatisfiable: forward constraint
//! propagation along a chain of growing graphs.
//!
//! Strong locality asks that removing any `y` leave `w(z)` unchanged whenever
//! some neighbor `x` of `y` has `z ∉ N[x]`. Each stage of the chain adds one
//! vertex; its weights are solved as affine expressions in two parameters
//! `w1`, `w2` (the weights of the first two base vertices), using locality
//! against the previous stage, every automorphism, normalization and
//! non-negativity. On the three-legged spider this ends in `0 = 1`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{automorphisms, Graph};
use crate::numeric::{format_rational, Q};

const PARAMS: [&str; 2] = ["w1", "w2"];

/// `c + a·w1 + b·w2`, stored as `[c, a, b]`.
type Affine = [Q; 3];

fn constant(c: Q) -> Affine {
    [c, Q::zero(), Q::zero()]
}

fn param(k: usize) -> Affine {
    let mut e = constant(Q::zero());
    e[k + 1] = Q::one();
    e
}

fn axpy(e: &mut Affine, a: &Q, x: &Affine) {
    for (u, v) in e.iter_mut().zip(x) {
        *u += a * v;
    }
}

fn is_constant(e: &Affine) -> bool {
    e[1].is_zero() && e[2].is_zero()
}

fn number(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format_rational(c)
    }
}

/// `e = 0` as `w1 + w2 = 1/2`, leading parameter coefficient one.
fn format_relation(e: &Affine) -> String {
    let mut e = e.clone();
    if let Some(p) = (1..3).find(|&k| !e[k].is_zero()) {
        let lead = e[p].clone();
        for v in e.iter_mut() {
            *v /= &lead;
        }
    }
    let rhs = -e[0].clone();
    e[0] = Q::zero();
    format!("{} = {}", format_affine(&e), number(&rhs))
}

fn format_affine(e: &Affine) -> String {
    let mut out = String::new();
    let mut term = |c: &Q, name: &str| {
        if c.is_zero() {
            return;
        }
        let mag = c.abs();
        let body = match (name.is_empty(), mag.is_one()) {
            (true, _) => number(&mag),
            (false, true) => name.to_string(),
            (false, false) => format!("{}·{name}", number(&mag)),
        };
        if out.is_empty() {
            out = if c.is_negative() { format!("−{body}") } else { body };
        } else {
            out += if c.is_negative() { " − " } else { " + " };
            out += &body;
        }
    };
    term(&e[0], "");
    term(&e[1], PARAMS[0]);
    term(&e[2], PARAMS[1]);
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Affine relations among the parameters, kept in reduced echelon form.
#[derive(Default)]
struct Relations {
    rows: Vec<(usize, Affine)>,
}

impl Relations {
    fn reduce(&self, e: &Affine) -> Affine {
        let mut e = e.clone();
        for (p, row) in &self.rows {
            let c = e[*p].clone();
            if !c.is_zero() {
                axpy(&mut e, &-c, row);
            }
        }
        e
    }

    /// Adds `e = 0`; `Err` when it reduces to a non-zero constant.
    fn add(&mut self, e: &Affine) -> std::result::Result<bool, Q> {
        let mut r = self.reduce(e);
        let Some(p) = (1..3).find(|&k| !r[k].is_zero()) else {
            return if r[0].is_zero() { Ok(false) } else { Err(r[0].clone()) };
        };
        let lead = r[p].clone();
        for v in r.iter_mut() {
            *v /= &lead;
        }
        for (_, row) in &mut self.rows {
            let c = row[p].clone();
            if !c.is_zero() {
                axpy(row, &-c, &r);
            }
        }
        self.rows.push((p, r));
        self.rows.sort_by_key(|(p, _)| *p);
        Ok(true)
    }

    /// Parameter values when both are pinned.
    fn values(&self) -> Option<[Q; 2]> {
        if self.rows.len() == 2 && self.rows.iter().all(|(_, r)| r[1].is_zero() || r[2].is_zero()) {
            let mut v = [Q::zero(), Q::zero()];
            for (p, r) in &self.rows {
                v[p - 1] = -r[0].clone();
            }
            Some(v)
        } else {
            None
        }
    }
}

/// `Σ coef·var = rhs` over one stage's vertices.
#[derive(Clone)]
struct Equation {
    coef: Vec<Q>,
    rhs: Affine,
}

/// Gauss–Jordan over vertex columns; returns pivot rows and parameter-only rows.
fn eliminate(eqs: &[Equation], m: usize) -> (Vec<(usize, Equation)>, Vec<Affine>) {
    let mut rows: Vec<Equation> = eqs.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k].coef[c].is_zero()) else { continue };
        rows.swap(r, k);
        let lead = rows[r].coef[c].clone();
        for v in rows[r].coef.iter_mut() {
            *v /= &lead;
        }
        for v in rows[r].rhs.iter_mut() {
            *v /= &lead;
        }
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            let f = row.coef[c].clone();
            if k != r && !f.is_zero() {
                for (u, v) in row.coef.iter_mut().zip(&pivot.coef) {
                    *u -= &f * v;
                }
                axpy(&mut row.rhs, &-f, &pivot.rhs);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let leftovers = rows[r..].iter().map(|e| e.rhs.clone()).collect();
    (pivots.into_iter().zip(rows).collect(), leftovers)
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub name: String,
    pub added: Option<String>,
    /// `(label, weight)`; weights are affine in `w1`, `w2`, or `free`.
    pub values: Vec<(String, String)>,
    pub forced_zero: Vec<String>,
    pub new_relations: Vec<String>,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub stages: Vec<StageReport>,
    pub contradiction: bool,
    pub contradiction_stage: Option<usize>,
    /// Parameter values pinned by the relations found at the failing stage.
    pub w1: Option<String>,
    pub w2: Option<String>,
    /// Mass of the failing stage's weights at those values.
    pub total_mass: Option<String>,
    pub trace: Vec<String>,
}

/// One vertex added to the previous stage.
#[derive(Debug, Clone)]
pub struct Addition {
    pub label: String,
    pub neighbors: Vec<String>,
    pub stage_name: String,
}

/// Runs the propagation from `base` (at least two vertices) through `additions`.
pub fn locality_chain(base: &Graph, base_name: &str, additions: &[Addition]) -> Result<DemoReport> {
    if base.len() < 2 {
        return Err(Error::TooFewVertices(2));
    }
    let mut graphs = vec![base.clone()];
    for a in additions {
        let prev = graphs.last().expect("base present");
        let n = prev.len();
        let mut labels = prev.labels().to_vec();
        if labels.contains(&a.label) {
            return Err(Error::InvalidParameter(format!("vertex `{}` already present", a.label)));
        }
        labels.push(a.label.clone());
        let mut g = Graph::with_labels(labels);
        for (u, v) in prev.edges() {
            g.add_edge(u, v);
        }
        for nb in &a.neighbors {
            g.add_edge(prev.resolve(nb)?, n);
        }
        graphs.push(g);
    }

    let mut relations = Relations::default();
    let mut report = DemoReport {
        stages: Vec::new(),
        contradiction: false,
        contradiction_stage: None,
        w1: None,
        w2: None,
        total_mass: None,
        trace: Vec::new(),
    };
    let mut previous: Vec<Option<Affine>> = Vec::new();
    for (k, g) in graphs.iter().enumerate() {
        let m = g.len();
        let label = |v: usize| g.labels()[v].clone();
        let name = if k == 0 { base_name.to_string() } else { additions[k - 1].stage_name.clone() };
        let unit = |v: usize| {
            let mut c = vec![Q::zero(); m];
            c[v] = Q::one();
            c
        };
        let mut eqs: Vec<Equation> = Vec::new();
        if k == 0 {
            for (p, v) in [0, 1].into_iter().enumerate() {
                eqs.push(Equation { coef: unit(v), rhs: param(p) });
            }
            report.trace.push(format!("{name}: let {} = w({}) and {} = w({})", PARAMS[0], label(0), PARAMS[1], label(1)));
        } else {
            // The new vertex y is last; z keeps its weight when some x ∈ N(y) misses it.
            let y = m - 1;
            let mut pinned = Vec::new();
            for z in 0..y {
                let far = g.neighbors(y).ones().any(|x| !g.closed_neighborhood(x).contains(z));
                if far {
                    if let Some(e) = &previous[z] {
                        eqs.push(Equation { coef: unit(z), rhs: e.clone() });
                        pinned.push(label(z));
                    }
                }
            }
            report.trace.push(format!("{name}: add {}; locality keeps {}", label(y), pinned.join(", ")));
        }
        // Symmetry joins only after locality and normalization have settled.
        let mut symmetric = Vec::new();
        for perm in automorphisms(g) {
            for v in 0..m {
                if perm[v] > v {
                    let mut c = unit(v);
                    c[perm[v]] = -Q::one();
                    symmetric.push(Equation { coef: c, rhs: constant(Q::zero()) });
                }
            }
        }
        let normalization = Equation { coef: vec![Q::one(); m], rhs: constant(Q::one()) };
        eqs.push(normalization.clone());
        let mut pending = Some(symmetric);

        let mut stage = StageReport {
            name: name.clone(),
            added: (k > 0).then(|| label(m - 1)),
            values: Vec::new(),
            forced_zero: Vec::new(),
            new_relations: Vec::new(),
            consistent: true,
        };
        let mut failure: Option<Q> = None;
        let pivots = loop {
            let (pivots, leftovers) = eliminate(&eqs, m);
            for rel in leftovers {
                let shown = format_relation(&rel);
                match relations.add(&rel) {
                    Ok(true) => {
                        report.trace.push(format!("{name}: relation {shown}"));
                        stage.new_relations.push(shown);
                    }
                    Ok(false) => {}
                    Err(c) => {
                        report.trace.push(format!("{name}: relation {shown} contradicts earlier ones"));
                        failure = Some(c);
                        break;
                    }
                }
            }
            if failure.is_some() {
                break pivots;
            }
            // Non-negativity: a zero sum of non-negative terms.
            let mut zeros = Vec::new();
            for (_, row) in &pivots {
                let rhs = relations.reduce(&row.rhs);
                let nonneg = row.coef.iter().all(|c| !c.is_negative());
                if nonneg && is_constant(&rhs) {
                    if rhs[0].is_zero() {
                        zeros.extend((0..m).filter(|&v| !row.coef[v].is_zero()));
                    } else if rhs[0].is_negative() {
                        failure = Some(rhs[0].clone());
                    }
                }
            }
            zeros.sort_unstable();
            zeros.dedup();
            let fresh: Vec<usize> = zeros
                .into_iter()
                .filter(|&v| !eqs.iter().any(|e| e.coef == unit(v) && e.rhs == constant(Q::zero())))
                .collect();
            if failure.is_some() {
                break pivots;
            }
            if fresh.is_empty() {
                match pending.take() {
                    Some(sym) => {
                        report.trace.push(format!("{name}: apply {} symmetry equations", sym.len()));
                        eqs.extend(sym);
                        continue;
                    }
                    None => break pivots,
                }
            }
            let names: Vec<String> = fresh.iter().map(|&v| label(v)).collect();
            report.trace.push(format!("{name}: non-negativity forces {} to 0", names.join(", ")));
            for v in fresh {
                stage.forced_zero.push(label(v));
                eqs.push(Equation { coef: unit(v), rhs: constant(Q::zero()) });
            }
        };

        let current = solved(&pivots, m);
        for v in 0..m {
            let shown = match &current[v] {
                Some(e) => {
                    // The shorter of the raw and the relation-reduced form.
                    let r = relations.reduce(e);
                    let terms = |x: &Affine| x.iter().filter(|c| !c.is_zero()).count();
                    format_affine(if is_constant(&r) || terms(&r) < terms(e) { &r } else { e })
                }
                None => "free".into(),
            };
            stage.values.push((label(v), shown));
        }
        if failure.is_some() {
            stage.consistent = false;
            report.contradiction = true;
            report.contradiction_stage = Some(k);
            // Without normalization the stage pins the parameters; its mass
            // at those values is what normalization contradicts.
            let rest: Vec<Equation> = eqs.iter().filter(|e| e.coef != normalization.coef).cloned().collect();
            let (pivots, leftovers) = eliminate(&rest, m);
            let mut pinned = Relations::default();
            for rel in &leftovers {
                let _ = pinned.add(rel);
            }
            if let Some([a, b]) = pinned.values() {
                report.w1 = Some(number(&a));
                report.w2 = Some(number(&b));
                let mut mass = Q::zero();
                for e in solved(&pivots, m).iter().flatten() {
                    mass += &e[0] + &a * &e[1] + &b * &e[2];
                }
                report.total_mass = Some(number(&mass));
                report.trace.push(format!(
                    "{name}: w1 = {}, w2 = {}, so the weights sum to {} instead of 1",
                    number(&a),
                    number(&b),
                    number(&mass)
                ));
            }
            report.stages.push(stage);
            break;
        }
        report.stages.push(stage);
        previous = current;
    }
    Ok(report)
}

/// Vertices whose pivot row has no free variables.
fn solved(pivots: &[(usize, Equation)], m: usize) -> Vec<Option<Affine>> {
    let mut out = vec![None; m];
    for (c, row) in pivots {
        if row.coef.iter().enumerate().all(|(j, v)| j == *c || v.is_zero()) {
            out[*c] = Some(row.rhs.clone());
        }
    }
    out
}

/// A center `d` joined to three paths `a_i – b_i – c_i` through `c_i`.
pub fn spider() -> Graph {
    let labels = ["a1", "b1", "c1", "d", "c2", "b2", "a2", "c3", "b3", "a3"];
    let mut g = Graph::with_labels(labels.iter().map(|s| s.to_string()).collect());
    for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7), (7, 8), (8, 9)] {
        g.add_edge(u, v);
    }
    g
}

fn path_graph(labels: &[&str]) -> Graph {
    let mut g = Graph::with_labels(labels.iter().map(|s| s.to_string()).collect());
    for i in 1..labels.len() {
        g.add_edge(i - 1, i);
    }
    g
}

/// The spider chain: start from the leg `a1–b1–c1–d`, then add
/// `c2, b2, a2, c3, b3, a3`.
pub fn strict_locality_demo() -> DemoReport {
    let steps = [
        ("c2", "d", "G∖(P3∪{a2,b2})"),
        ("b2", "c2", "G∖(P3∪{a2})"),
        ("a2", "b2", "G∖P3"),
        ("c3", "d", "G∖(P3∖{c3})"),
        ("b3", "c3", "G∖{a3}"),
        ("a3", "b3", "G"),
    ];
    let adds: Vec<Addition> = steps
        .iter()
        .map(|(l, nb, name)| Addition { label: l.to_string(), neighbors: vec![nb.to_string()], stage_name: name.to_string() })
        .collect();
    locality_chain(&path_graph(&["a1", "b1", "c1", "d"]), "G∖(P2∪P3)", &adds).expect("the spider chain is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value<'a>(s: &'a StageReport, v: &str) -> &'a str {
        &s.values.iter().find(|(l, _)| l == v).unwrap().1
    }

    #[test]
    fn spider_reaches_a_contradiction() {
        let r = strict_locality_demo();
        assert!(r.contradiction);
        assert_eq!(r.contradiction_stage, Some(6));
        assert_eq!(r.w1.as_deref(), Some("0"));
        assert_eq!(r.w2.as_deref(), Some("0"));
        assert_eq!(r.total_mass.as_deref(), Some("0"));
        let base = &r.stages[0];
        assert!(base.consistent);
        assert_eq!(base.new_relations, vec!["w1 + w2 = 1/2".to_string()]);
        assert_eq!(value(base, "d"), "w1");
        assert_eq!(value(base, "c1"), "w2");
        let first = &r.stages[1];
        assert_eq!(value(first, "c1"), "0");
        assert_eq!(value(first, "c2"), "w1");
        let no_p3 = &r.stages[3];
        for (v, want) in [("c1", "0"), ("d", "0"), ("c2", "0"), ("a1", "w1"), ("a2", "w1"), ("b1", "w2"), ("b2", "w2")] {
            assert_eq!(value(no_p3, v), want, "{v}");
        }
        assert!(r.stages[4].forced_zero.contains(&"c3".to_string()));
        assert_eq!(spider().len(), 10);
        assert_eq!(spider().edge_count(), 9);
    }

    #[test]
    fn single_leg_is_consistent() {
        let r = locality_chain(&path_graph(&["a1", "b1", "c1", "d"]), "leg", &[]).unwrap();
        assert!(!r.contradiction);
        assert_eq!(r.stages.len(), 1);
        assert_eq!(r.stages[0].new_relations, vec!["w1 + w2 = 1/2".to_string()]);
    }

    #[test]
    fn bad_chains_are_rejected() {
        let leg = path_graph(&["a", "b"]);
        let dup = Addition { label: "a".into(), neighbors: vec!["b".into()], stage_name: "x".into() };
        assert!(locality_chain(&leg, "leg", &[dup]).is_err());
        let stray = Addition { label: "c".into(), neighbors: vec!["nope".into()], stage_name: "x".into() };
        assert!(locality_chain(&leg, "leg", &[stray]).is_err());
        assert!(locality_chain(&Graph::new(1), "one", &[]).is_err());
    }
}
