//! Information balls with `q < p < inf`.
//!
//! The optimal method shrinks the first `m` coordinates towards zero with
//! multipliers `1 - tau / t_k^q`, where the cut level `tau` sits between
//! `t_{m+1}^q` and `t_m^q`. For a cut level `tau`, the noise level at which
//! it is optimal is
//!
//! ```text
//! G(tau) = (sum_j d_j)^{1/p} (sum_j d_j^{q/p} / t_j^q)^{-1/q},
//! d_j = (1 - tau/t_j^q)^{p/(p-q)}, summed over t_j^q > tau,
//! ```
//!
//! which is non-decreasing in `tau`. The breakpoints `c_m = G(t_{m+1}^q)`
//! partition the noise axis: `eps` in `(c_{b+1}, c_b]` moves the cut level
//! between `t_{b+2}^q` and `t_{b+1}^q`, i.e. the method uses `b + 1`
//! coordinates.

use super::{check_eps, qth_root, Branch, RecoverySolution, Regime, Solved};
use crate::error::{exponent, Error, Result};
use crate::interp::{solve_degenerate, solve_monotone, Blend};
use crate::weights::{weight_ratio, ClassSpec};

/// Largest truncation index examined by the full-sequence searches.
pub const MAX_SEARCH_INDEX: usize = 10_000_000;

#[derive(Debug, Clone, Copy)]
struct Exponents {
    p: f64,
    q: f64,
    /// p / (p - q)
    outer: f64,
    /// q / (p - q)
    inner: f64,
}

impl Exponents {
    fn new(cls: &ClassSpec, p: f64) -> Result<Self> {
        let q = cls.q;
        if !(p.is_finite() && p > q) {
            return Err(exponent("p", p, "(q, inf)"));
        }
        Ok(Exponents {
            p,
            q,
            outer: p / (p - q),
            inner: q / (p - q),
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    outer: f64,
    inner: f64,
}

/// Sums over `j = 1..=active` given `gap(t_j^q) = t_j^q - tau`.
fn sums(cls: &ClassSpec, ex: Exponents, active: usize, gap: impl Fn(f64) -> f64) -> Sums {
    let mut acc = Sums::default();
    for j in 1..=active {
        let tq = cls.tq(j);
        if tq <= 0.0 {
            continue;
        }
        let g = gap(tq);
        if g <= 0.0 {
            continue;
        }
        let base = g / tq;
        acc.outer += base.powf(ex.outer);
        acc.inner += base.powf(ex.inner) / tq;
    }
    acc
}

fn level(s: Sums, ex: Exponents) -> Option<f64> {
    (s.inner > 0.0).then(|| s.outer.powf(1.0 / ex.p) * s.inner.powf(-1.0 / ex.q))
}

fn c_unchecked(cls: &ClassSpec, ex: Exponents, m: usize) -> f64 {
    let t1 = cls.weights.at(1);
    if m == 1 {
        return t1;
    }
    let cut = cls.tq(m + 1);
    level(sums(cls, ex, m, |tq| tq - cut), ex).unwrap_or(t1)
}

/// Breakpoint `c_m` (1-based); `c_1 = t_1`.
///
/// When `t_1 = ... = t_{m+1}` every term vanishes and `c_m` is read as
/// `t_1`, continuing the sequence from above.
pub fn breakpoint_c(cls: &ClassSpec, p: f64, m: usize) -> Result<f64> {
    let ex = Exponents::new(cls, p)?;
    if m == 0 {
        return Err(Error::InvalidInfo("breakpoint indices start at 1".into()));
    }
    Ok(c_unchecked(cls, ex, m))
}

/// Breakpoints `c_1..c_n`, non-increasing.
pub fn breakpoints_c(cls: &ClassSpec, p: f64, n: usize) -> Result<Vec<f64>> {
    cls.validate()?;
    let ex = Exponents::new(cls, p)?;
    Ok((1..=n).map(|m| c_unchecked(cls, ex, m)).collect())
}

/// Cut level for bracket `b`: `t_{b+2}^q` at the start, `t_{b+1}^q` at the end.
#[derive(Debug, Clone, Copy)]
struct Cut {
    upper: f64,
    lower: f64,
    blend: Blend,
}

impl Cut {
    fn new(cls: &ClassSpec, bracket: usize, blend: Blend) -> Self {
        Cut {
            upper: cls.tq(bracket + 1),
            lower: cls.tq(bracket + 2),
            blend,
        }
    }

    fn tau(&self) -> f64 {
        self.blend.mix(self.lower, self.upper)
    }

    /// `t_j^q - tau`, accurate even when `tau` is within rounding of `t_j^q`.
    fn gap(&self, tq: f64) -> f64 {
        (tq - self.upper) + self.blend.complement() * (self.upper - self.lower)
    }
}

fn g_unchecked(cls: &ClassSpec, ex: Exponents, bracket: usize, blend: Blend) -> f64 {
    let cut = Cut::new(cls, bracket, blend);
    level(sums(cls, ex, bracket + 1, |tq| cut.gap(tq)), ex).unwrap_or_else(|| cls.weights.at(1))
}

/// Right-hand side `g(lambda)` of the interpolation equation for the
/// bracket `[c_{b+1}, c_b]`.
///
/// `g(0) = c_{b+1}` and `g(1) = c_b`; in between, the cut level is
/// `t_{m,lambda}^q = (1 - lambda) t_{m+1}^q + lambda t_m^q` with `m = b + 1`.
pub fn lambda_equation(cls: &ClassSpec, p: f64, bracket: usize, blend: Blend) -> Result<f64> {
    let ex = Exponents::new(cls, p)?;
    if bracket == 0 {
        return Err(Error::InvalidInfo("bracket indices start at 1".into()));
    }
    Ok(g_unchecked(cls, ex, bracket, blend))
}

/// Finds `lambda` with `g(lambda) = eps` for `eps` in `[c_{b+1}, c_b]`.
///
/// Bisection relies on `g` being non-decreasing; the returned residual is at
/// most `1e-12 * eps`. When `t_1 = ... = t_{b+1}` only `c_{b+1}` and `c_b`
/// are attained and other values give [`Error::DegenerateBracket`].
pub fn solve_lambda(cls: &ClassSpec, p: f64, bracket: usize, eps: f64) -> Result<Blend> {
    let ex = Exponents::new(cls, p)?;
    if bracket == 0 {
        return Err(Error::InvalidInfo("bracket indices start at 1".into()));
    }
    check_eps(eps)?;
    if cls.weights.at(bracket + 1) == cls.weights.at(1) {
        let g = |b| g_unchecked(cls, ex, bracket, b);
        return solve_degenerate(bracket, eps, g(Blend::START), g(Blend::END));
    }
    lambda_unchecked(cls, ex, bracket, eps)
}

fn lambda_unchecked(cls: &ClassSpec, ex: Exponents, bracket: usize, eps: f64) -> Result<Blend> {
    solve_monotone(|b| g_unchecked(cls, ex, bracket, b), eps, ex.inner)
}

/// `(x_1..x_n) + B[eps, l_p^n]` with `q < p < inf`.
pub fn solve_finite_large_p(
    cls: &ClassSpec,
    n: usize,
    eps: f64,
    p: f64,
) -> Result<RecoverySolution> {
    cls.validate()?;
    check_eps(eps)?;
    if n == 0 {
        return Err(Error::InvalidInfo("window length n must be >= 1".into()));
    }
    finite(cls, n, eps, p).map(|s| s.solution)
}

pub(super) fn finite(cls: &ClassSpec, n: usize, eps: f64, p: f64) -> Result<Solved> {
    let ex = Exponents::new(cls, p)?;
    let t1 = cls.weights.at(1);
    if eps > t1 {
        return Ok(Solved::new(RecoverySolution::trivial(t1), Branch::Trivial));
    }
    let c: Vec<f64> = (1..=n).map(|m| c_unchecked(cls, ex, m)).collect();
    if eps <= c[n - 1] {
        return Ok(window(cls, ex, n, eps));
    }
    // largest b with c_b >= eps; c_1 = t_1 >= eps guarantees one exists
    let bracket = (1..n).rev().find(|&b| c[b - 1] >= eps).unwrap_or(1);
    interior(cls, ex, bracket, eps)
}

pub(super) fn full(cls: &ClassSpec, eps: f64, p: f64) -> Result<Solved> {
    let ex = Exponents::new(cls, p)?;
    if eps == 0.0 {
        return Ok(Solved::new(
            RecoverySolution::passthrough(Regime::ExactInfo, 0.0),
            Branch::ExactInfo,
        ));
    }
    let t1 = cls.weights.at(1);
    if eps > t1 {
        return Ok(Solved::new(RecoverySolution::trivial(t1), Branch::Trivial));
    }
    let c = |m: usize| c_unchecked(cls, ex, m);
    let (mut lo, mut hi) = match cls.weights.support_len() {
        Some(support) => {
            if eps <= c(support) {
                return Ok(window(cls, ex, support, eps));
            }
            (1, support)
        }
        None => {
            let (mut lo, mut hi) = (1, 2);
            while c(hi) >= eps {
                lo = hi;
                hi *= 2;
                if hi > MAX_SEARCH_INDEX {
                    return Err(Error::NoTermination {
                        cap: MAX_SEARCH_INDEX,
                    });
                }
            }
            (lo, hi)
        }
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if c(mid) >= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    interior(cls, ex, lo, eps)
}

/// Cut at `t_{n+1}^q`: every coordinate of the window is used.
fn window(cls: &ClassSpec, ex: Exponents, n: usize, eps: f64) -> Solved {
    let cut = cls.tq(n + 1);
    let s = sums(cls, ex, n, |tq| tq - cut);
    let error = qth_root(cut + eps.powf(ex.q) * s.outer.powf(1.0 / ex.outer), ex.q);
    let coefficients = (1..=n)
        .map(|k| 1.0 - weight_ratio(cut, cls.tq(k)))
        .collect();
    Solved::new(
        RecoverySolution {
            regime: Regime::FullWindow,
            m: n,
            lambda: 0.0,
            error,
            coefficients,
        },
        Branch::LargeWindow,
    )
}

fn interior(cls: &ClassSpec, ex: Exponents, bracket: usize, eps: f64) -> Result<Solved> {
    let m = bracket + 1;
    let t1 = cls.weights.at(1);
    if cls.weights.at(m) == t1 {
        // t_1 = ... = t_m: the error is linear in the cut level and the zero
        // method is optimal throughout this bracket
        return Ok(Solved::new(RecoverySolution::trivial(t1), Branch::Trivial));
    }
    let blend = lambda_unchecked(cls, ex, bracket, eps)?;
    let cut = Cut::new(cls, bracket, blend);
    let s = sums(cls, ex, m, |tq| cut.gap(tq));
    let error = qth_root(
        cut.tau() + eps.powf(ex.q) * s.outer.powf(1.0 / ex.outer),
        ex.q,
    );
    // lambda = 1 is the cut t_m^q, which drops coordinate m: report it as
    // the method on m - 1 coordinates so that lambda stays in [0, 1)
    let (m, lambda) = if blend.complement() == 0.0 {
        (bracket, 0.0)
    } else {
        (m, blend.lambda())
    };
    let coefficients = (1..=m)
        .map(|k| {
            let tq = cls.tq(k);
            if tq > 0.0 {
                (cut.gap(tq) / tq).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(Solved::new(
        RecoverySolution {
            regime: Regime::Interior,
            m,
            lambda,
            error,
            coefficients,
        },
        Branch::LargeInterior { bracket, blend },
    ))
}

/// `t_j^q - tau` for the cut level of `bracket` at `blend`.
pub(crate) fn interior_gap(cls: &ClassSpec, bracket: usize, blend: Blend) -> impl Fn(f64) -> f64 {
    let cut = Cut::new(cls, bracket, blend);
    move |tq| cut.gap(tq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    fn halves(q: f64) -> ClassSpec {
        ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25]).unwrap(), q).unwrap()
    }

    #[test]
    fn first_breakpoint_is_t1() {
        let c = breakpoints_c(&halves(1.0), 2.0, 2).unwrap();
        assert_eq!(c[0], 1.0);
    }

    #[test]
    fn second_breakpoint_by_hand() {
        let c = breakpoints_c(&halves(1.0), 2.0, 2).unwrap();
        let expected = 0.8125_f64.sqrt() / 1.75;
        assert!((c[1] - expected).abs() < 1e-15);
        assert!((c[1] - 0.515_079).abs() < 1e-6);
    }

    #[test]
    fn equal_weights_collapse() {
        let cls = ClassSpec::new(WeightSequence::finite(vec![1.0; 4]).unwrap(), 1.0).unwrap();
        let c = breakpoints_c(&cls, 2.0, 4).unwrap();
        assert!((c[3] - 0.5).abs() < 1e-15);
        // fully tied prefixes read as t_1
        assert_eq!(&c[..3], &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_p_not_above_q() {
        assert!(breakpoints_c(&halves(2.0), 2.0, 2).is_err());
        assert!(breakpoints_c(&halves(2.0), f64::INFINITY, 2).is_err());
    }

    #[test]
    fn lambda_endpoints() {
        let cls = halves(1.0);
        let c = breakpoints_c(&cls, 2.0, 3).unwrap();
        assert_eq!(solve_lambda(&cls, 2.0, 2, c[2]).unwrap(), Blend::START);
        assert_eq!(solve_lambda(&cls, 2.0, 2, c[1]).unwrap(), Blend::END);
    }

    #[test]
    fn lambda_midpoint_residual() {
        let cls = halves(1.0);
        let c = breakpoints_c(&cls, 2.0, 3).unwrap();
        let eps = 0.5 * (c[1] + c[2]);
        let b = solve_lambda(&cls, 2.0, 2, eps).unwrap();
        let g = lambda_equation(&cls, 2.0, 2, b).unwrap();
        assert!((g - eps).abs() <= 1e-12 * eps);
        assert!(b.lambda() > 0.0 && b.lambda() < 1.0);
    }

    #[test]
    fn lambda_out_of_bracket() {
        let cls = halves(1.0);
        assert!(matches!(
            solve_lambda(&cls, 2.0, 2, 0.9),
            Err(Error::OutOfBracket { .. })
        ));
    }

    #[test]
    fn worked_large_p() {
        let cls = halves(1.0);
        assert_eq!(solve_finite_large_p(&cls, 2, 0.0, 2.0).unwrap().error, 0.25);
        let s = solve_finite_large_p(&cls, 2, 0.2, 2.0).unwrap();
        assert_eq!(s.regime, Regime::FullWindow);
        assert!((s.error - (0.25 + 0.2 * 0.8125_f64.sqrt())).abs() < 1e-15);
        let s = solve_finite_large_p(&cls, 2, 2.0, 2.0).unwrap();
        assert_eq!(s.regime, Regime::Trivial);
        assert_eq!(s.error, 1.0);
    }

    #[test]
    fn interior_uses_bracket_plus_one_coordinates() {
        let cls = halves(1.0);
        let s = solve_finite_large_p(&cls, 2, 0.7, 2.0).unwrap();
        assert_eq!(s.regime, Regime::Interior);
        assert_eq!(s.m, 2);
        assert_eq!(s.coefficients.len(), 2);
        assert!(s.error < 1.0 && s.error > 0.25);
    }

    #[test]
    fn full_power_law_brackets() {
        let cls = ClassSpec::new(WeightSequence::power_law(1.0).unwrap(), 1.0).unwrap();
        let s = solve_full_large(&cls, 0.05, 2.0);
        assert_eq!(s.regime, Regime::Interior);
        let c_lo = breakpoint_c(&cls, 2.0, s.m).unwrap();
        let c_hi = breakpoint_c(&cls, 2.0, s.m - 1).unwrap();
        assert!(c_lo < 0.05 && 0.05 <= c_hi);
        let t = solve_full_large(&cls, 1.5, 2.0);
        assert_eq!(t.regime, Regime::Trivial);
    }

    fn solve_full_large(cls: &ClassSpec, eps: f64, p: f64) -> RecoverySolution {
        full(cls, eps, p).unwrap().solution
    }
}
