//! Probability vectors over vertices or elements.

use num_traits::{Num, Signed};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, q_int, to_f64, Q};

/// A distribution, exact or floating.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightVector {
    Exact(Vec<Q>),
    Float(Vec<f64>),
}

/// Float tolerance on the total mass.
pub const FLOAT_SUM_TOL: f64 = 1e-12;

impl WeightVector {
    pub fn uniform(n: usize) -> Self {
        WeightVector::Exact(vec![Q::new(1.into(), n.into()); n])
    }

    pub fn len(&self) -> usize {
        match self {
            WeightVector::Exact(v) => v.len(),
            WeightVector::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, WeightVector::Exact(_))
    }

    pub fn exact(&self) -> Option<&[Q]> {
        match self {
            WeightVector::Exact(v) => Some(v),
            WeightVector::Float(_) => None,
        }
    }

    pub fn get_f64(&self, i: usize) -> f64 {
        match self {
            WeightVector::Exact(v) => to_f64(&v[i]),
            WeightVector::Float(v) => v[i],
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.get_f64(i)).collect()
    }

    /// Same values as floats.
    pub fn to_float(&self) -> WeightVector {
        WeightVector::Float(self.to_f64_vec())
    }

    /// Text of entry `i`: `p/q` in exact mode, shortest round-trip decimal otherwise.
    pub fn format_entry(&self, i: usize) -> String {
        match self {
            WeightVector::Exact(v) => format_rational(&v[i]),
            WeightVector::Float(v) => format!("{}", v[i]),
        }
    }

    /// Non-negative entries summing to one (exactly, or within `FLOAT_SUM_TOL`).
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightVector::Exact(v) => {
                if let Some(i) = v.iter().position(|w| w.is_negative()) {
                    return Err(Error::InvalidParameter(format!("negative weight at {i}")));
                }
                let s: Q = v.iter().sum();
                if s != q_int(1) {
                    return Err(Error::InvalidParameter(format!("weights sum to {s}")));
                }
            }
            WeightVector::Float(v) => {
                if let Some(i) = v.iter().position(|w| !(*w >= 0.0)) {
                    return Err(Error::InvalidParameter(format!("negative or NaN weight at {i}")));
                }
                let s: f64 = v.iter().sum();
                if (s - 1.0).abs() > FLOAT_SUM_TOL {
                    return Err(Error::InvalidParameter(format!("weights sum to {s}")));
                }
            }
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        match self {
            WeightVector::Exact(v) => to_f64(&v.iter().sum()),
            WeightVector::Float(v) => v.iter().sum(),
        }
    }
}

/// Number types the rules can run in.
pub trait Scalar: Clone + Num + PartialOrd + std::fmt::Debug {
    fn from_count(n: usize) -> Self;
    fn as_f64(&self) -> f64;
}

impl Scalar for Q {
    fn from_count(n: usize) -> Self {
        q_int(n)
    }
    fn as_f64(&self) -> f64 {
        to_f64(self)
    }
}

impl Scalar for f64 {
    fn from_count(n: usize) -> Self {
        n as f64
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}
