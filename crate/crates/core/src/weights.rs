//! Non-increasing weight sequences `t = (t_1, t_2, ...)` and the diagonal
//! classes `W^T_q = { (t_k h_k) : ||h||_q <= 1 }` they define.
//!
//! A sequence is an explicit prefix followed by an analytic tail, so that
//! infinite sequences can be evaluated lazily at any index.

use serde::{Deserialize, Serialize};

use crate::error::{exponent, Error, Result};

/// Analytic continuation of a weight sequence beyond its explicit prefix.
///
/// Tail formulas use the absolute index `k`, not the offset from the prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    /// `t_k = 0` beyond the prefix.
    #[default]
    None,
    /// `t_k = k^{-mu}`.
    Power { mu: f64 },
    /// `t_k = scale * rho^k`.
    Geometric { rho: f64, scale: f64 },
}

impl Tail {
    fn eval(&self, k: usize) -> f64 {
        match *self {
            Tail::None => 0.0,
            Tail::Power { mu } => (k as f64).powf(-mu),
            Tail::Geometric { rho, scale } => scale * rho.powf(k as f64),
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            Tail::None => true,
            Tail::Power { .. } => false,
            Tail::Geometric { scale, .. } => scale == 0.0,
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            Tail::None => Ok(()),
            Tail::Power { mu } if mu.is_finite() && mu > 0.0 => Ok(()),
            Tail::Power { .. } => Err(Error::InvalidTail(
                "power-law exponent must be finite and > 0",
            )),
            Tail::Geometric { rho, scale } => {
                if !(rho > 0.0 && rho < 1.0) {
                    Err(Error::InvalidTail("geometric ratio must lie in (0, 1)"))
                } else if !(scale.is_finite() && scale >= 0.0) {
                    Err(Error::InvalidTail(
                        "geometric scale must be finite and >= 0",
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// A non-increasing sequence of nonnegative weights.
///
/// Immutable once built; every constructor validates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct WeightSequence {
    prefix: Vec<f64>,
    #[serde(default)]
    tail: Tail,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    prefix: Vec<f64>,
    #[serde(default)]
    tail: Tail,
}

impl TryFrom<RawWeights> for WeightSequence {
    type Error = Error;

    fn try_from(raw: RawWeights) -> Result<Self> {
        WeightSequence::new(raw.prefix, raw.tail)
    }
}

impl WeightSequence {
    pub fn new(prefix: Vec<f64>, tail: Tail) -> Result<Self> {
        let w = WeightSequence { prefix, tail };
        w.validate()?;
        Ok(w)
    }

    /// Finitely many weights followed by zeros.
    pub fn finite(prefix: Vec<f64>) -> Result<Self> {
        Self::new(prefix, Tail::None)
    }

    /// `t_k = k^{-mu}` for all `k`.
    pub fn power_law(mu: f64) -> Result<Self> {
        Self::new(Vec::new(), Tail::Power { mu })
    }

    /// `t_k = scale * rho^k` for all `k`.
    pub fn geometric(rho: f64, scale: f64) -> Result<Self> {
        Self::new(Vec::new(), Tail::Geometric { rho, scale })
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Weight `t_k` for a 1-based index `k`.
    ///
    /// # Panics
    ///
    /// Panics if `k == 0`.
    pub fn at(&self, k: usize) -> f64 {
        assert!(k >= 1, "weight indices start at 1");
        match self.prefix.get(k - 1) {
            Some(&t) => t,
            None => self.tail.eval(k),
        }
    }

    /// `t_k^q`.
    pub fn pow(&self, k: usize, q: f64) -> f64 {
        self.at(k).powf(q)
    }

    /// Number of leading nonzero weights when the sequence is finitely
    /// supported, `None` when every weight is positive.
    pub fn support_len(&self) -> Option<usize> {
        if let Some(pos) = self.prefix.iter().position(|&t| t == 0.0) {
            return Some(pos);
        }
        if self.tail.is_zero() {
            Some(self.prefix.len())
        } else {
            None
        }
    }

    /// Checks sign, monotonicity and the prefix/tail junction.
    ///
    /// Reports the first offending 1-based index.
    pub fn validate(&self) -> Result<()> {
        self.tail.check()?;
        for (i, &t) in self.prefix.iter().enumerate() {
            let index = i + 1;
            if !t.is_finite() {
                return Err(Error::WeightViolation {
                    index,
                    reason: "weight is not finite",
                });
            }
            if t < 0.0 {
                return Err(Error::WeightViolation {
                    index,
                    reason: "weight is negative",
                });
            }
            if i > 0 && t > self.prefix[i - 1] {
                return Err(Error::WeightViolation {
                    index,
                    reason: "weights increase",
                });
            }
        }
        let n = self.prefix.len();
        if n > 0 && !self.tail.is_zero() && self.tail.eval(n + 1) > self.prefix[n - 1] {
            return Err(Error::WeightViolation {
                index: n + 1,
                reason: "tail exceeds the last prefix weight",
            });
        }
        Ok(())
    }
}

/// `weight_at(w, k)`: free-function form of [`WeightSequence::at`].
pub fn weight_at(w: &WeightSequence, k: usize) -> f64 {
    w.at(k)
}

/// `validate(w)`: free-function form of [`WeightSequence::validate`].
pub fn validate(w: &WeightSequence) -> Result<()> {
    w.validate()
}

/// The class `W^T_q` for `1 <= q < inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub weights: WeightSequence,
    pub q: f64,
}

impl ClassSpec {
    pub fn new(weights: WeightSequence, q: f64) -> Result<Self> {
        check_class_exponent(q)?;
        Ok(ClassSpec { weights, q })
    }

    pub fn validate(&self) -> Result<()> {
        check_class_exponent(self.q)?;
        self.weights.validate()
    }

    /// `t_k^q`.
    pub fn tq(&self, k: usize) -> f64 {
        self.weights.pow(k, self.q)
    }
}

fn check_class_exponent(q: f64) -> Result<()> {
    if q.is_finite() && q >= 1.0 {
        Ok(())
    } else {
        Err(exponent("q", q, "[1, inf)"))
    }
}

/// `a / b` for `b = t_k^q`, reading `1/0` as `+inf` and `0/0` as `0`.
pub(crate) fn over_weight(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// `t_s^q / t_k^q` for `s >= k`, read as 1 when `t_k = 0`.
pub(crate) fn weight_ratio(ts: f64, tk: f64) -> f64 {
    if tk == 0.0 {
        1.0
    } else {
        ts / tk
    }
}
