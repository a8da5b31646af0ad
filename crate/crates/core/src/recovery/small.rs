//! Information balls with `0 < p <= q`: all noise may sit on the first
//! coordinate, so only `eps <= t_1` matters.

use super::{check_info_exponent, qth_root, Branch, RecoverySolution, Regime, Solved};
use crate::error::{exponent, Error, Result};
use crate::recovery::check_eps;
use crate::weights::{weight_ratio, ClassSpec};

/// `(x_1..x_n) + B[eps, l_p^n]` with `0 < p <= q`.
pub fn solve_finite_small_p(
    cls: &ClassSpec,
    n: usize,
    eps: f64,
    p: f64,
) -> Result<RecoverySolution> {
    cls.validate()?;
    check(cls, eps, p)?;
    if n == 0 {
        return Err(Error::InvalidInfo("window length n must be >= 1".into()));
    }
    finite(cls, n, eps, p).map(|s| s.solution)
}

/// `x + B[eps, l_p]` with `0 < p <= q`: the identity is optimal for
/// `eps <= t_1`.
pub fn solve_full_small_p(cls: &ClassSpec, eps: f64, p: f64) -> Result<RecoverySolution> {
    cls.validate()?;
    check(cls, eps, p)?;
    full(cls, eps, p).map(|s| s.solution)
}

fn check(cls: &ClassSpec, eps: f64, p: f64) -> Result<()> {
    check_eps(eps)?;
    check_info_exponent(p)?;
    if p > cls.q {
        return Err(exponent("p", p, "(0, q]"));
    }
    Ok(())
}

pub(super) fn finite(cls: &ClassSpec, n: usize, eps: f64, _p: f64) -> Result<Solved> {
    let t1 = cls.weights.at(1);
    if eps > t1 {
        return Ok(Solved::new(RecoverySolution::trivial(t1), Branch::Trivial));
    }
    let q = cls.q;
    let cut = cls.tq(n + 1);
    let coefficients = (1..=n)
        .map(|k| 1.0 - weight_ratio(cut, cls.tq(k)))
        .collect();
    let error = qth_root(cut + eps.powf(q) * (1.0 - weight_ratio(cut, cls.tq(1))), q);
    Ok(Solved::new(
        RecoverySolution {
            regime: Regime::FullWindow,
            m: n,
            lambda: 0.0,
            error,
            coefficients,
        },
        Branch::SmallWindow,
    ))
}

pub(super) fn full(cls: &ClassSpec, eps: f64, _p: f64) -> Result<Solved> {
    let t1 = cls.weights.at(1);
    if eps > t1 {
        Ok(Solved::new(RecoverySolution::trivial(t1), Branch::Trivial))
    } else {
        Ok(Solved::new(
            RecoverySolution::passthrough(Regime::Identity, eps),
            Branch::Identity,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    fn halves(q: f64) -> ClassSpec {
        ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25]).unwrap(), q).unwrap()
    }

    #[test]
    fn worked_small_p() {
        let s = solve_finite_small_p(&halves(2.0), 2, 0.5, 1.0).unwrap();
        assert!((s.error - 0.296875_f64.sqrt()).abs() < 1e-15);
        assert!((s.error - 0.544_862_4).abs() < 1e-7);
        assert_eq!(s.regime, Regime::FullWindow);
        assert_eq!(s.coefficients, vec![0.9375, 0.75]);
    }

    #[test]
    fn exact_and_saturated() {
        assert_eq!(
            solve_finite_small_p(&halves(2.0), 2, 0.0, 1.0)
                .unwrap()
                .error,
            0.25
        );
        let s = solve_finite_small_p(&halves(2.0), 2, 1.5, 1.0).unwrap();
        assert_eq!(s.regime, Regime::Trivial);
        assert_eq!(s.error, 1.0);
    }

    #[test]
    fn rejects_p_above_q() {
        assert!(matches!(
            solve_finite_small_p(&halves(1.0), 2, 0.1, 2.0),
            Err(Error::InvalidExponent { .. })
        ));
    }

    #[test]
    fn quasi_norm_exponent_accepted() {
        let s = solve_finite_small_p(&halves(1.0), 2, 0.5, 0.5).unwrap();
        assert!((s.error - (0.25 + 0.5 * 0.75)).abs() < 1e-15);
    }

    #[test]
    fn full_identity_then_zero() {
        let s = solve_full_small_p(&halves(2.0), 0.3, 1.0).unwrap();
        assert_eq!(s.regime, Regime::Identity);
        assert_eq!(s.error, 0.3);
        let s = solve_full_small_p(&halves(2.0), 1.3, 1.0).unwrap();
        assert_eq!(s.regime, Regime::Trivial);
        assert_eq!(s.error, 1.0);
    }
}
