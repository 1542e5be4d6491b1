use crate::error::{Error, Result};
use crate::filtration::{equivalence_classes, quotient};
use crate::graph::Graph;
use crate::numeric::Q;
use crate::weights::{Scalar, WeightVector};

use super::GraphWeighting;

pub fn w_uniform(g: &Graph) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(WeightVector::uniform(g.len()))
}

/// `1 / (|V/≡| · |[x]|)`.
pub fn w_cu(g: &Graph) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let p = equivalence_classes(g);
    let k = p.len();
    Ok(WeightVector::Exact((0..g.len()).map(|v| Q::new(1.into(), (k * p.class_size(v)).into())).collect()))
}

/// Runs `base` on the quotient graph and splits each class mass evenly.
pub fn lift_quotient(base: &dyn GraphWeighting, g: &Graph) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let q = quotient(g);
    let on_classes = base.weigh(&q.graph)?;
    let split = |vals: &dyn Fn(usize) -> Q| -> Vec<Q> {
        (0..g.len()).map(|v| vals(q.partition.class_of[v]) / Q::from_count(q.partition.class_size(v))).collect()
    };
    Ok(match on_classes {
        WeightVector::Exact(w) => WeightVector::Exact(split(&|c| w[c].clone())),
        WeightVector::Float(w) => WeightVector::Float(
            (0..g.len()).map(|v| w[q.partition.class_of[v]] / q.partition.class_size(v) as f64).collect(),
        ),
    })
}

/// One step of the lazy random walk `P(y → x) = 1/(1 + deg y)` for `x ∈ N[y]`,
/// applied to `base(G)`.
pub fn smooth(base: &dyn GraphWeighting, g: &Graph) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(match base.weigh(g)? {
        WeightVector::Exact(w) => WeightVector::Exact(walk_step(g, &w)),
        WeightVector::Float(w) => WeightVector::Float(walk_step(g, &w)),
    })
}

fn walk_step<T: Scalar>(g: &Graph, w: &[T]) -> Vec<T> {
    let share: Vec<T> = (0..g.len()).map(|y| w[y].clone() / T::from_count(1 + g.degree(y))).collect();
    (0..g.len())
        .map(|x| g.closed_neighborhood(x).ones().fold(T::zero(), |acc, y| acc + share[y].clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples::*;
    use crate::numeric::q;
    use crate::rules::{Rule, RuleKind};

    fn exact(w: WeightVector) -> Vec<Q> {
        w.exact().unwrap().to_vec()
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(exact(w_uniform(&Graph::complete(3)).unwrap()), vec![q(1, 3); 3]);
        assert_eq!(exact(w_uniform(&paw()).unwrap()), vec![q(1, 4); 4]);
        assert_eq!(exact(w_uniform(&Graph::new(1)).unwrap()), vec![q(1, 1)]);
    }

    #[test]
    fn class_uniform_examples() {
        assert_eq!(
            exact(w_cu(&chain8()).unwrap()),
            vec![q(1, 15), q(1, 15), q(1, 15), q(1, 5), q(1, 10), q(1, 10), q(1, 5), q(1, 5)]
        );
        assert_eq!(exact(w_cu(&paw()).unwrap()), vec![q(1, 3), q(1, 3), q(1, 6), q(1, 6)]);
        assert_eq!(exact(w_cu(&Graph::new(5)).unwrap()), vec![q(1, 5); 5]);
    }

    #[test]
    fn lift_of_uniform_is_class_uniform() {
        let lifted = Rule::new(RuleKind::Lift(Box::new(RuleKind::Uniform)));
        for g in [chain8(), paw(), path(5), cycle(4), Graph::complete(4), Graph::new(3)] {
            assert_eq!(lifted.weigh(&g).unwrap(), w_cu(&g).unwrap());
        }
        // Twin-free graph: lifting changes nothing.
        let mcca = Rule::parse("mcca").unwrap();
        let lifted_mcca = Rule::parse("lift:mcca").unwrap();
        assert_eq!(lifted_mcca.weigh(&path(5)).unwrap(), mcca.weigh(&path(5)).unwrap());
    }

    #[test]
    fn smoothing_examples() {
        let s = Rule::parse("smooth:cu").unwrap();
        assert_eq!(exact(s.weigh(&Graph::complete(2)).unwrap()), vec![q(1, 2), q(1, 2)]);
        assert_eq!(exact(s.weigh(&path(3)).unwrap()), vec![q(5, 18), q(4, 9), q(5, 18)]);
        s.weigh(&chain8()).unwrap().validate().unwrap();
    }

    /// Matrix-product oracle for the kernel step.
    #[test]
    fn smoothing_matches_dense_kernel() {
        let g = chain8();
        let n = g.len();
        let base = exact(w_cu(&g).unwrap());
        let mut kernel = vec![vec![Q::from_count(0); n]; n];
        for (y, row) in kernel.iter_mut().enumerate() {
            for (x, cell) in row.iter_mut().enumerate() {
                if x == y || g.has_edge(x, y) {
                    *cell = q(1, 1 + g.degree(y) as i64);
                }
            }
        }
        let expected: Vec<Q> = (0..n).map(|x| (0..n).map(|y| base[y].clone() * kernel[y][x].clone()).sum()).collect();
        assert_eq!(exact(Rule::parse("smooth:cu").unwrap().weigh(&g).unwrap()), expected);
    }
}
