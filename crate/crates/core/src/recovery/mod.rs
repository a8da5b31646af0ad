//! Optimal recovery of the class `W^T_q` in `l_q` from inexact information.
//!
//! Every solver returns the optimal error together with an optimal linear
//! method: the shrinkage multipliers `mu_k = 1 - t_{m,lambda}^q / t_k^q`
//! applied to the first `m` observed coordinates, zero beyond.

pub(crate) mod large;
mod small;
mod threshold;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::interp::Blend;
use crate::weights::ClassSpec;

pub use large::{
    breakpoint_c, breakpoints_c, lambda_equation, solve_finite_large_p, solve_lambda,
    MAX_SEARCH_INDEX,
};
pub use small::{solve_finite_small_p, solve_full_small_p};
pub use threshold::{solve_coordinatewise, solve_finite_uniform, solve_full_uniform};

/// How the observations are perturbed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfoModel {
    /// `(x_1..x_n) + [-eps_1, eps_1] x ... x [-eps_n, eps_n]`; `n = eps.len()`.
    Coordinatewise { eps: Vec<f64> },
    /// `(x_1..x_n) + B[eps, l_p^n]`.
    FiniteBall {
        n: usize,
        eps: f64,
        #[serde(with = "crate::serde_ext::extended_f64")]
        p: f64,
    },
    /// `x + B[eps, l_p]`.
    FullBall {
        eps: f64,
        #[serde(with = "crate::serde_ext::extended_f64")]
        p: f64,
    },
}

impl InfoModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            InfoModel::Coordinatewise { eps } => {
                if eps.is_empty() {
                    return Err(Error::InvalidInfo("window length n must be >= 1".into()));
                }
                eps.iter().try_for_each(|&e| check_eps(e))
            }
            InfoModel::FiniteBall { n, eps, p } => {
                if *n == 0 {
                    return Err(Error::InvalidInfo("window length n must be >= 1".into()));
                }
                check_eps(*eps)?;
                check_info_exponent(*p)
            }
            InfoModel::FullBall { eps, p } => {
                check_eps(*eps)?;
                check_info_exponent(*p)
            }
        }
    }

    /// Observation window length, `None` for full-sequence information.
    pub fn window(&self) -> Option<usize> {
        match self {
            InfoModel::Coordinatewise { eps } => Some(eps.len()),
            InfoModel::FiniteBall { n, .. } => Some(*n),
            InfoModel::FullBall { .. } => None,
        }
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInfo(format!(
            "error level {eps} must be finite and >= 0"
        )))
    }
}

fn check_info_exponent(p: f64) -> Result<()> {
    if p > 0.0 && !p.is_nan() {
        Ok(())
    } else {
        Err(crate::error::exponent("p", p, "(0, inf]"))
    }
}

/// Which kind of optimal method was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Truncation at an index `m` below the window length.
    Saturated,
    /// Every observed coordinate is used (`m = n`).
    FullWindow,
    /// Interpolated multipliers between two breakpoints.
    Interior,
    /// The zero method; error equals `t_1`.
    Trivial,
    /// The observation itself is returned.
    Identity,
    /// Noise-free full information; error 0.
    ExactInfo,
}

/// Optimal error and an optimal linear method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySolution {
    pub regime: Regime,
    pub m: usize,
    pub lambda: f64,
    pub error: f64,
    pub coefficients: Vec<f64>,
}

impl RecoverySolution {
    pub(crate) fn trivial(t1: f64) -> Self {
        RecoverySolution {
            regime: Regime::Trivial,
            m: 0,
            lambda: 0.0,
            error: t1,
            coefficients: Vec::new(),
        }
    }

    pub(crate) fn passthrough(regime: Regime, error: f64) -> Self {
        RecoverySolution {
            regime,
            m: 0,
            lambda: 0.0,
            error,
            coefficients: Vec::new(),
        }
    }

    /// True when the method returns its input unchanged.
    pub fn is_identity(&self) -> bool {
        matches!(self.regime, Regime::Identity | Regime::ExactInfo)
    }
}

/// Solver output plus what the certificate construction needs to know.
#[derive(Debug, Clone)]
pub(crate) struct Solved {
    pub solution: RecoverySolution,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Branch {
    /// Threshold rule on partial sums; truncation weight `t_{m+1}`.
    Threshold,
    /// Small-exponent ball, window `n`.
    SmallWindow,
    /// Small-exponent full information with `eps <= t_1`.
    Identity,
    /// Large-exponent ball with truncation weight `t_{m+1}`.
    LargeWindow,
    /// Large-exponent ball with interpolated weight.
    LargeInterior { bracket: usize, blend: Blend },
    /// Zero method.
    Trivial,
    /// `eps = 0` on full information.
    ExactInfo,
}

impl Solved {
    pub(crate) fn new(solution: RecoverySolution, branch: Branch) -> Self {
        Solved { solution, branch }
    }
}

pub(crate) fn solve_detailed(cls: &ClassSpec, info: &InfoModel) -> Result<Solved> {
    cls.validate()?;
    info.validate()?;
    match info {
        InfoModel::Coordinatewise { eps } => threshold::coordinatewise(cls, eps),
        InfoModel::FiniteBall { n, eps, p } => {
            let (n, eps, p) = (*n, *eps, *p);
            if p.is_infinite() {
                threshold::coordinatewise(cls, &vec![eps; n])
            } else if p <= cls.q {
                small::finite(cls, n, eps, p)
            } else {
                large::finite(cls, n, eps, p)
            }
        }
        InfoModel::FullBall { eps, p } => {
            let (eps, p) = (*eps, *p);
            if p.is_infinite() {
                threshold::full(cls, eps)
            } else if p <= cls.q {
                small::full(cls, eps, p)
            } else {
                large::full(cls, eps, p)
            }
        }
    }
}

/// Dispatches to the solver matching the information model and exponents.
pub fn solve(cls: &ClassSpec, info: &InfoModel) -> Result<RecoverySolution> {
    solve_detailed(cls, info).map(|s| s.solution)
}

/// Optimal recovery from a perturbed full sequence `x + B[eps, l_p]`.
///
/// `p = inf` uses the threshold rule, `p <= q` the identity or zero method,
/// and `q < p < inf` the breakpoint search.
pub fn solve_full(cls: &ClassSpec, eps: f64, p: f64) -> Result<RecoverySolution> {
    solve(cls, &InfoModel::FullBall { eps, p })
}

/// Applies a recovery method to observed coordinates.
///
/// Coordinate `k <= m` is scaled by its multiplier, later coordinates are
/// zeroed; identity regimes return the observation unchanged. Works for
/// real and complex observations alike.
pub fn apply_method<T>(sol: &RecoverySolution, observed: &[T]) -> Result<Vec<T>>
where
    T: Copy + Zero + Mul<f64, Output = T>,
{
    if sol.is_identity() {
        return Ok(observed.to_vec());
    }
    if observed.len() < sol.m {
        return Err(Error::DimensionMismatch {
            expected: sol.m,
            found: observed.len(),
        });
    }
    Ok(observed
        .iter()
        .enumerate()
        .map(|(k, &a)| match sol.coefficients.get(k) {
            Some(&mu) if k < sol.m => a * mu,
            _ => T::zero(),
        })
        .collect())
}

/// `(sum_k terms_k^q)^(1/q)` helper shared by the solvers.
pub(crate) fn qth_root(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else {
        x.max(0.0).powf(1.0 / q)
    }
}
