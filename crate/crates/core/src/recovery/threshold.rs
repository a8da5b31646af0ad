//! Threshold rule: the truncation index is the longest prefix whose
//! accumulated relative noise `sum eps_k^q / t_k^q` stays at most 1.
//! Covers coordinatewise boxes, the uniform box (`p = inf` window) and the
//! `p = inf` full-sequence ball.

use super::{qth_root, Branch, RecoverySolution, Regime, Solved, MAX_SEARCH_INDEX};
use crate::error::{Error, Result};
use crate::recovery::check_eps;
use crate::weights::{over_weight, weight_ratio, ClassSpec};

/// Optimal recovery from `(x_1..x_n)` observed with per-coordinate errors
/// `eps_k`.
pub fn solve_coordinatewise(cls: &ClassSpec, n: usize, eps: &[f64]) -> Result<RecoverySolution> {
    if eps.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eps.len(),
        });
    }
    cls.validate()?;
    if n == 0 {
        return Err(Error::InvalidInfo("window length n must be >= 1".into()));
    }
    eps.iter().try_for_each(|&e| check_eps(e))?;
    coordinatewise(cls, eps).map(|s| s.solution)
}

/// Same error level `eps` on each of the first `n` coordinates.
pub fn solve_finite_uniform(cls: &ClassSpec, n: usize, eps: f64) -> Result<RecoverySolution> {
    solve_coordinatewise(cls, n, &vec![eps; n])
}

/// Full sequence observed with uniform error `eps` (`p = inf`).
pub fn solve_full_uniform(cls: &ClassSpec, eps: f64) -> Result<RecoverySolution> {
    cls.validate()?;
    check_eps(eps)?;
    full(cls, eps).map(|s| s.solution)
}

pub(super) fn coordinatewise(cls: &ClassSpec, eps: &[f64]) -> Result<Solved> {
    let q = cls.q;
    let n = eps.len();
    let mut partial = 0.0;
    let mut m = 0;
    for (k, e) in (1..=n).zip(eps) {
        let term = over_weight(e.powf(q), cls.tq(k));
        if 1.0 - (partial + term) < 0.0 {
            break;
        }
        partial += term;
        m = k;
    }
    let regime = if m == n {
        Regime::FullWindow
    } else if m == 0 {
        Regime::Trivial
    } else {
        Regime::Saturated
    };
    Ok(truncated(cls, m, regime, |k| eps[k - 1].powf(q)))
}

pub(super) fn full(cls: &ClassSpec, eps: f64) -> Result<Solved> {
    if eps == 0.0 {
        return Ok(Solved::new(
            RecoverySolution::passthrough(Regime::ExactInfo, 0.0),
            Branch::ExactInfo,
        ));
    }
    let q = cls.q;
    let eq = eps.powf(q);
    let mut partial = 0.0;
    let mut m = 0;
    loop {
        let k = m + 1;
        if k > MAX_SEARCH_INDEX {
            return Err(Error::NoTermination {
                cap: MAX_SEARCH_INDEX,
            });
        }
        let term = over_weight(eq, cls.tq(k));
        if 1.0 - (partial + term) < 0.0 {
            break;
        }
        partial += term;
        m = k;
    }
    let regime = if m == 0 {
        Regime::Trivial
    } else {
        Regime::Saturated
    };
    Ok(truncated(cls, m, regime, |_| eq))
}

/// Method `Phi*_m` and its error `(t_{m+1}^q + sum_k (1 - t_{m+1}^q/t_k^q) eps_k^q)^{1/q}`.
fn truncated(cls: &ClassSpec, m: usize, regime: Regime, eps_q: impl Fn(usize) -> f64) -> Solved {
    if m == 0 {
        // exactly t_1, not the rounded (t_1^q)^{1/q}
        return Solved::new(
            RecoverySolution::trivial(cls.weights.at(1)),
            Branch::Threshold,
        );
    }
    let cut = cls.tq(m + 1);
    let mut total = cut;
    let mut coefficients = Vec::with_capacity(m);
    for k in 1..=m {
        let mu = 1.0 - weight_ratio(cut, cls.tq(k));
        total += mu * eps_q(k);
        coefficients.push(mu);
    }
    Solved::new(
        RecoverySolution {
            regime,
            m,
            lambda: 0.0,
            error: qth_root(total, cls.q),
            coefficients,
        },
        Branch::Threshold,
    )
}
