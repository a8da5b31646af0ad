//! Recovery of an element of a Hilbert space from its Fourier coefficients
//! perturbed in `l_p`, `2 < p <= inf`, over the class with power-law
//! weights `t_k = k^{-mu}` and `q = 2`.
//!
//! Through the isometry with `l_2` this is the full-sequence problem of
//! [`crate::recovery`]. As `eps -> 0` the optimal error behaves like
//! `constant * eps^lambda` with `lambda = mu / (mu + 1/2 - 1/p)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::error::{exponent, Error, Result};
use crate::recovery::{breakpoint_c, solve_full, RecoverySolution, MAX_SEARCH_INDEX};
use crate::serde_ext::extended_f64;
use crate::weights::{ClassSpec, WeightSequence};

/// Limit data for `eps^{-lambda} E(eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub mu: f64,
    #[serde(with = "extended_f64")]
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda_exp: f64,
    pub constant: f64,
}

impl AsymptoticConstants {
    /// Limit of `n^{mu/lambda} c_n` along the optimal truncation indices.
    pub fn breakpoint_limit(&self) -> f64 {
        self.alpha.powf(inv(self.p)) / self.beta.sqrt()
    }

    /// Limit of `eps^{-lambda} n^{-mu}`.
    pub fn index_limit(&self) -> f64 {
        self.breakpoint_limit().powf(-self.lambda_exp)
    }
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn check(mu: f64, p: f64) -> Result<()> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(exponent("mu", mu, "(0, inf)"));
    }
    if !(p > 2.0) {
        return Err(exponent("p", p, "(2, inf]"));
    }
    Ok(())
}

fn beta_fn(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// `alpha`, `beta`, the rate exponent and the limit constant.
///
/// With `d_j = (1 - (j/n)^{2 mu})^{p/(p-2)}` one has `sum_{j<=n} d_j ~ n alpha`
/// and `sum_{j<=n} d_j^{2/p} j^{2 mu} ~ n^{2 mu + 1} beta`, which gives
/// `alpha = B(1/(2mu), (2p-2)/(p-2)) / (2mu)` and
/// `beta = B(1 + 1/(2mu), p/(p-2)) / (2mu)`.
pub fn asymptotic_constants(mu: f64, p: f64) -> Result<AsymptoticConstants> {
    check(mu, p)?;
    let a = 1.0 / (2.0 * mu);
    let (alpha, beta) = if p.is_infinite() {
        (a * beta_fn(a, 2.0), 1.0 / (2.0 * mu + 1.0))
    } else {
        (
            a * beta_fn(a, (2.0 * p - 2.0) / (p - 2.0)),
            a * beta_fn(1.0 + a, p / (p - 2.0)),
        )
    };
    let lambda_exp = mu / (mu + 0.5 - inv(p));
    let constant =
        ((alpha + beta) / beta).sqrt() * (beta.sqrt() / alpha.powf(inv(p))).powf(lambda_exp);
    Ok(AsymptoticConstants {
        mu,
        p,
        alpha,
        beta,
        lambda_exp,
        constant,
    })
}

fn class(mu: f64) -> Result<ClassSpec> {
    ClassSpec::new(WeightSequence::power_law(mu)?, 2.0)
}

fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if let Some(e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::InvalidInfo(format!(
            "eps = {e} must be positive and finite"
        )));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInfo(
            "eps list must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Optimal recovery method at noise level `eps`.
///
/// The returned multipliers act on the observed coefficients `x_1..x_m`;
/// synthesis in a concrete basis is left to the caller.
pub fn triangular_method(mu: f64, p: f64, eps: f64) -> Result<RecoverySolution> {
    check(mu, p)?;
    solve_full(&class(mu)?, eps, p)
}

/// `eps^{-lambda} E(eps)` for each `eps`, computed in parallel.
pub fn empirical_limit(mu: f64, p: f64, eps_list: &[f64]) -> Result<Vec<f64>> {
    let lambda_exp = asymptotic_constants(mu, p)?.lambda_exp;
    check_eps_list(eps_list)?;
    let cls = class(mu)?;
    eps_list
        .par_iter()
        .map(|&eps| Ok(solve_full(&cls, eps, p)?.error * eps.powf(-lambda_exp)))
        .collect()
}

/// The sequences whose limits combine into the constant, at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntermediateLimits {
    pub eps: f64,
    /// `n` with `c_{n+1} < eps <= c_n`.
    pub n: usize,
    /// `n^{mu/lambda} c_n`
    pub scaled_c_n: f64,
    /// `n^{mu/lambda} c_{n+1}`
    pub scaled_c_next: f64,
    /// `eps^{-lambda} n^{-mu}`; since `c_n ~ L n^{-mu/lambda}` this is the
    /// scaling under which `n^{-mu}` converges
    pub scaled_index: f64,
}

fn breakpoint(cls: &ClassSpec, p: f64, n: usize) -> Result<f64> {
    if p.is_infinite() {
        // p -> inf limit of the breakpoint formula
        let s: f64 = (1..=n).map(|j| 1.0 / cls.tq(j)).sum();
        Ok(1.0 / s.sqrt())
    } else {
        breakpoint_c(cls, p, n)
    }
}

/// Evaluates the intermediate sequences for each `eps` in `(0, 1]`.
pub fn intermediate_limits(mu: f64, p: f64, eps_list: &[f64]) -> Result<Vec<IntermediateLimits>> {
    let k = asymptotic_constants(mu, p)?;
    check_eps_list(eps_list)?;
    if let Some(e) = eps_list.iter().find(|e| **e > 1.0) {
        return Err(Error::InvalidInfo(format!("eps = {e} exceeds c_1 = 1")));
    }
    let cls = class(mu)?;
    let rate = mu / k.lambda_exp;
    eps_list
        .par_iter()
        .map(|&eps| {
            let c = |n: usize| breakpoint(&cls, p, n);
            let (mut lo, mut hi) = (1, 2);
            while c(hi)? >= eps {
                lo = hi;
                hi *= 2;
                if hi > MAX_SEARCH_INDEX {
                    return Err(Error::NoTermination {
                        cap: MAX_SEARCH_INDEX,
                    });
                }
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if c(mid)? >= eps {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let n = lo;
            let scale = (n as f64).powf(rate);
            Ok(IntermediateLimits {
                eps,
                n,
                scaled_c_n: scale * c(n)?,
                scaled_c_next: scale * c(n + 1)?,
                scaled_index: eps.powf(-k.lambda_exp) * (n as f64).powf(-mu),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::Regime;

    #[test]
    fn half_derivative_sup_norm() {
        let k = asymptotic_constants(0.5, f64::INFINITY).unwrap();
        assert!((k.alpha - 0.5).abs() < 1e-14);
        assert!((k.beta - 0.5).abs() < 1e-14);
        assert_eq!(k.lambda_exp, 0.5);
        assert!((k.constant - 2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_p() {
        assert!(matches!(
            asymptotic_constants(1.0, 2.0),
            Err(Error::InvalidExponent { name: "p", .. })
        ));
        assert!(asymptotic_constants(0.0, 3.0).is_err());
    }

    #[test]
    fn lambda_in_unit_interval() {
        for &(mu, p) in &[(0.1, 2.01), (1.0, 4.0), (5.0, f64::INFINITY)] {
            let k = asymptotic_constants(mu, p).unwrap();
            assert!(k.lambda_exp > 0.0 && k.lambda_exp < 1.0);
        }
    }

    #[test]
    fn trivial_and_exact_ends() {
        let s = triangular_method(1.0, 4.0, 2.0).unwrap();
        assert_eq!((s.regime, s.m, s.error), (Regime::Trivial, 0, 1.0));
        let s = triangular_method(1.0, 4.0, 0.0).unwrap();
        assert_eq!((s.regime, s.error), (Regime::ExactInfo, 0.0));
    }

    #[test]
    fn saturated_ratio_at_t1() {
        let v = empirical_limit(1.0, 4.0, &[1.0]).unwrap();
        assert_eq!(v, vec![1.0]);
    }

    #[test]
    fn rejects_unsorted_eps() {
        assert!(empirical_limit(1.0, 4.0, &[1e-3, 1e-2]).is_err());
        assert!(empirical_limit(1.0, 4.0, &[0.0]).is_err());
    }

    #[test]
    fn intermediate_sequences_approach_limits() {
        let k = asymptotic_constants(1.0, 4.0).unwrap();
        let v = intermediate_limits(1.0, 4.0, &[1e-5]).unwrap()[0];
        assert!((v.scaled_c_n / k.breakpoint_limit() - 1.0).abs() < 0.05);
        assert!((v.scaled_c_next / k.breakpoint_limit() - 1.0).abs() < 0.05);
        assert!((v.scaled_index / k.index_limit() - 1.0).abs() < 0.05);
    }
}
