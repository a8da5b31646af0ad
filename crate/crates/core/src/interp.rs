//! Interpolation inside a breakpoint bracket and the bisection that locates
//! the interpolation parameter.

use crate::error::{Error, Result};

/// Iteration cap for the bisection.
pub const MAX_ITERATIONS: usize = 200;

/// Residual target `|g(lambda) - eps| <= RELATIVE_TOLERANCE * eps`.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

/// A point `lambda` in `[0, 1]` stored together with `1 - lambda`.
///
/// Near `lambda = 1` the optimality equations are steep, and `1 - lambda`
/// has to be resolved far below the spacing of doubles around 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blend {
    lambda: f64,
    complement: f64,
}

impl Blend {
    pub const START: Blend = Blend {
        lambda: 0.0,
        complement: 1.0,
    };
    pub const END: Blend = Blend {
        lambda: 1.0,
        complement: 0.0,
    };

    pub fn from_lambda(lambda: f64) -> Self {
        let lambda = lambda.clamp(0.0, 1.0);
        Blend {
            lambda,
            complement: 1.0 - lambda,
        }
    }

    pub fn from_complement(complement: f64) -> Self {
        let complement = complement.clamp(0.0, 1.0);
        Blend {
            lambda: 1.0 - complement,
            complement,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn complement(&self) -> f64 {
        self.complement
    }

    /// `(1 - lambda) * at_start + lambda * at_end`, expanded around the
    /// nearer endpoint.
    pub fn mix(&self, at_start: f64, at_end: f64) -> f64 {
        if self.lambda <= 0.5 {
            at_start + self.lambda * (at_end - at_start)
        } else {
            at_end - self.complement * (at_end - at_start)
        }
    }
}

/// Solves `g(blend) = target` for `g` non-decreasing in `lambda`.
///
/// `singular_power` is the exponent `a` of the term that vanishes like
/// `(1 - lambda)^a` at `lambda = 1`; the search runs in the variable
/// `w = (1 - lambda)^{min(a, 1)}` so that `g` stays Lipschitz there.
pub(crate) fn solve_monotone<G>(g: G, target: f64, singular_power: f64) -> Result<Blend>
where
    G: Fn(Blend) -> f64,
{
    let tol = RELATIVE_TOLERANCE * target.abs().max(1e-300);
    let low = g(Blend::START);
    let high = g(Blend::END);
    if target < low - tol || target > high + tol {
        return Err(Error::OutOfBracket {
            eps: target,
            lower: low,
            upper: high,
        });
    }
    if (low - target).abs() <= tol {
        return Ok(Blend::START);
    }
    if (high - target).abs() <= tol {
        return Ok(Blend::END);
    }

    let stretch = if singular_power < 1.0 {
        1.0 / singular_power
    } else {
        1.0
    };
    let at = |w: f64| Blend::from_complement(w.powf(stretch));

    // g decreases in w
    let (mut w_high, mut w_low) = (0.0_f64, 1.0_f64);
    let mut best = (Blend::START, (low - target).abs());
    let floor = 4.0 * f64::EPSILON * target.abs();
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (w_high + w_low);
        if mid <= w_high || mid >= w_low {
            break;
        }
        let blend = at(mid);
        let value = g(blend);
        let residual = (value - target).abs();
        if residual < best.1 {
            best = (blend, residual);
        }
        if residual <= floor {
            break;
        }
        if value > target {
            w_high = mid;
        } else {
            w_low = mid;
        }
    }
    if best.1 <= tol {
        Ok(best.0)
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            residual: best.1,
        })
    }
}

/// Root of an equation that equals `low` on `[0, 1)` and jumps to `high`
/// at `lambda = 1`; only the two endpoint values are attained.
pub(crate) fn solve_degenerate(bracket: usize, target: f64, low: f64, high: f64) -> Result<Blend> {
    let tol = RELATIVE_TOLERANCE * target.abs().max(1e-300);
    if target < low - tol || target > high + tol {
        Err(Error::OutOfBracket {
            eps: target,
            lower: low,
            upper: high,
        })
    } else if (target - low).abs() <= tol {
        Ok(Blend::START)
    } else if (target - high).abs() <= tol {
        Ok(Blend::END)
    } else {
        Err(Error::DegenerateBracket { bracket })
    }
}
