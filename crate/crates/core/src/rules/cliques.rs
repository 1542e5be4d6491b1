//! Maximal cliques and the two clique-cover rules.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{q_int, Q};
use crate::weights::WeightVector;

use super::Caps;

/// All maximal cliques with per-vertex membership counts and per-clique
/// participation `P_K = Σ_{u∈K} 1/c_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueCover {
    /// Each clique ascending; cliques in lexicographic order.
    pub cliques: Vec<Vec<usize>>,
    pub membership: Vec<usize>,
    pub participation: Vec<Q>,
}

/// Bron–Kerbosch with pivoting.
pub fn maximal_cliques(g: &Graph, caps: &Caps) -> Result<CliqueCover> {
    let n = g.len();
    let mut cliques = Vec::new();
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    bron_kerbosch(g, &mut Vec::new(), all, FixedBitSet::with_capacity(n), &mut cliques, caps.max_cliques)?;
    for c in &mut cliques {
        c.sort_unstable();
    }
    cliques.sort();
    let mut membership = vec![0; n];
    for c in &cliques {
        for &v in c {
            membership[v] += 1;
        }
    }
    let participation = cliques
        .iter()
        .map(|c| c.iter().map(|&u| Q::new(1.into(), membership[u].into())).sum())
        .collect();
    Ok(CliqueCover { cliques, membership, participation })
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if p.is_clear() {
        if x.is_clear() {
            if out.len() >= cap {
                return Err(Error::CapExceeded { what: "maximal clique", limit: cap, flag: "cliques" });
            }
            out.push(r.clone());
        }
        return Ok(());
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| p.intersection(g.neighbors(u)).count())
        .expect("p is not empty");
    let candidates: Vec<usize> = p.difference(g.neighbors(pivot)).collect();
    for v in candidates {
        let nv = g.neighbors(v);
        let mut p2 = p.clone();
        p2.intersect_with(nv);
        let mut x2 = x.clone();
        x2.intersect_with(nv);
        r.push(v);
        bron_kerbosch(g, r, p2, x2, out, cap)?;
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
    Ok(())
}

/// `(1/|𝒦|) Σ_{K∋v} 1/|K|`.
pub fn w_mcca(g: &Graph, caps: &Caps) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let cover = maximal_cliques(g, caps)?;
    let k = q_int(cover.cliques.len());
    let mut w = vec![q_int(0); g.len()];
    for c in &cover.cliques {
        let share = Q::new(1.into(), c.len().into());
        for &v in c {
            w[v] += &share;
        }
    }
    Ok(WeightVector::Exact(w.into_iter().map(|x| x / &k).collect()))
}

/// `(1/|𝒦|) Σ_{K∋v} 1/(c_v · P_K)`.
pub fn w_mccp(g: &Graph, caps: &Caps) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let cover = maximal_cliques(g, caps)?;
    let k = q_int(cover.cliques.len());
    let mut w = vec![q_int(0); g.len()];
    for (c, p) in cover.cliques.iter().zip(&cover.participation) {
        for &v in c {
            w[v] += Q::from_integer(1.into()) / (q_int(cover.membership[v]) * p);
        }
    }
    Ok(WeightVector::Exact(w.into_iter().map(|x| x / &k).collect()))
}
