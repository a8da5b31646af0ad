//! Optimal recovery of the scalar product `<x, y> = sum_k x_k y_k` on
//! `W^T_p x W^S_q` (`1/p + 1/q = 1`) from the first `n` coordinate products
//! `x_k y_k`, observed with an error.
//!
//! Everything runs on the products `pi_k = t_k s_k`; the optimal methods
//! are `sum_{k<=m} a_k b_k nu_k` with `nu_k = 1 - pi_cut / pi_k`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul};

use crate::error::{exponent, Error, Result};
use crate::interp::{solve_degenerate, solve_monotone, Blend};
use crate::recovery::{check_eps, Regime};
use crate::weights::{over_weight, weight_ratio, WeightSequence};

/// The pair class `W^T_p x W^S_q`; `q` is always derived from `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", deny_unknown_fields)]
pub struct PairClassSpec {
    pub weights_t: WeightSequence,
    pub weights_s: WeightSequence,
    pub p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    weights_t: WeightSequence,
    weights_s: WeightSequence,
    p: f64,
}

impl TryFrom<RawPair> for PairClassSpec {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        PairClassSpec::new(raw.weights_t, raw.weights_s, raw.p)
    }
}

impl PairClassSpec {
    pub fn new(weights_t: WeightSequence, weights_s: WeightSequence, p: f64) -> Result<Self> {
        let pc = PairClassSpec {
            weights_t,
            weights_s,
            p,
        };
        pc.validate()?;
        Ok(pc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(exponent("p", self.p, "(1, inf)"));
        }
        self.weights_t.validate()?;
        self.weights_s.validate()
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `pi_k = t_k s_k`.
    pub fn product(&self, k: usize) -> f64 {
        self.weights_t.at(k) * self.weights_s.at(k)
    }
}

/// How the products `x_k y_k` are observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarInfoModel {
    /// `|x_k y_k - a_k b_k| <= eps_k`, `k = 1..n`.
    Coordinatewise { eps: Vec<f64> },
    /// `||(x_k y_k - a_k b_k)_{k<=n}||_r <= eps`.
    ProductBall {
        n: usize,
        eps: f64,
        #[serde(with = "crate::serde_ext::extended_f64")]
        r: f64,
    },
}

impl ScalarInfoModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarInfoModel::Coordinatewise { eps } => {
                if eps.is_empty() {
                    return Err(Error::InvalidInfo("window length n must be >= 1".into()));
                }
                eps.iter().try_for_each(|&e| check_eps(e))
            }
            ScalarInfoModel::ProductBall { n, eps, r } => {
                if *n == 0 {
                    return Err(Error::InvalidInfo("window length n must be >= 1".into()));
                }
                check_eps(*eps)?;
                if *r > 0.0 {
                    Ok(())
                } else {
                    Err(exponent("r", *r, "(0, inf]"))
                }
            }
        }
    }

    pub fn window(&self) -> usize {
        match self {
            ScalarInfoModel::Coordinatewise { eps } => eps.len(),
            ScalarInfoModel::ProductBall { n, .. } => *n,
        }
    }
}

/// Optimal error and method for the scalar product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSolution {
    pub regime: Regime,
    pub m: usize,
    pub lambda: f64,
    pub error: f64,
    pub coefficients: Vec<f64>,
    /// `t_k s_k` over the observed window.
    pub products: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct ScalarSolved {
    pub solution: ScalarSolution,
    pub branch: ScalarBranch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ScalarBranch {
    Threshold,
    SmallWindow,
    LargeWindow,
    LargeInterior { bracket: usize, blend: Blend },
    Trivial,
}

fn solved(
    pc: &PairClassSpec,
    n: usize,
    regime: Regime,
    m: usize,
    lambda: f64,
    error: f64,
    coefficients: Vec<f64>,
    branch: ScalarBranch,
) -> ScalarSolved {
    ScalarSolved {
        solution: ScalarSolution {
            regime,
            m,
            lambda,
            error,
            coefficients,
            products: (1..=n).map(|k| pc.product(k)).collect(),
        },
        branch,
    }
}

fn trivial(pc: &PairClassSpec, n: usize) -> ScalarSolved {
    solved(
        pc,
        n,
        Regime::Trivial,
        0,
        0.0,
        pc.product(1),
        Vec::new(),
        ScalarBranch::Trivial,
    )
}

/// Threshold rule on `sum_k eps_k / pi_k`.
pub fn sp_solve_coordinatewise(
    pc: &PairClassSpec,
    n: usize,
    eps: &[f64],
) -> Result<ScalarSolution> {
    pc.validate()?;
    if eps.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eps.len(),
        });
    }
    ScalarInfoModel::Coordinatewise { eps: eps.to_vec() }.validate()?;
    Ok(coordinatewise(pc, eps).solution)
}

/// Same error level on each observed product.
pub fn sp_solve_uniform(pc: &PairClassSpec, n: usize, eps: f64) -> Result<ScalarSolution> {
    sp_solve_coordinatewise(pc, n, &vec![eps; n])
}

fn coordinatewise(pc: &PairClassSpec, eps: &[f64]) -> ScalarSolved {
    let n = eps.len();
    let mut partial = 0.0;
    let mut m = 0;
    for (k, &e) in (1..=n).zip(eps) {
        let term = over_weight(e, pc.product(k));
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
    let cut = pc.product(m + 1);
    let mut error = cut;
    let mut coefficients = Vec::with_capacity(m);
    for k in 1..=m {
        let nu = 1.0 - weight_ratio(cut, pc.product(k));
        error += nu * eps[k - 1];
        coefficients.push(nu);
    }
    solved(
        pc,
        n,
        regime,
        m,
        0.0,
        error,
        coefficients,
        ScalarBranch::Threshold,
    )
}

/// Product ball with `0 < r <= 1`: all noise may sit on the first product.
pub fn sp_solve_small_r(pc: &PairClassSpec, n: usize, eps: f64, r: f64) -> Result<ScalarSolution> {
    pc.validate()?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(exponent("r", r, "(0, 1]"));
    }
    ScalarInfoModel::ProductBall { n, eps, r }.validate()?;
    Ok(small(pc, n, eps).solution)
}

fn small(pc: &PairClassSpec, n: usize, eps: f64) -> ScalarSolved {
    let top = pc.product(1);
    if eps > top {
        return trivial(pc, n);
    }
    let cut = pc.product(n + 1);
    let coefficients = (1..=n)
        .map(|k| 1.0 - weight_ratio(cut, pc.product(k)))
        .collect();
    let error = cut + eps * (1.0 - weight_ratio(cut, top));
    solved(
        pc,
        n,
        Regime::FullWindow,
        n,
        0.0,
        error,
        coefficients,
        ScalarBranch::SmallWindow,
    )
}

#[derive(Debug, Clone, Copy)]
struct Exponents {
    r: f64,
    /// r / (r - 1)
    outer: f64,
    /// 1 / (r - 1)
    inner: f64,
}

impl Exponents {
    fn new(r: f64) -> Result<Self> {
        if !(r > 1.0 && r.is_finite()) {
            return Err(exponent("r", r, "(1, inf)"));
        }
        Ok(Exponents {
            r,
            outer: r / (r - 1.0),
            inner: 1.0 / (r - 1.0),
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    /// sum tau_j^r
    outer: f64,
    /// sum tau_j / pi_j
    inner: f64,
}

fn sums(pc: &PairClassSpec, ex: Exponents, active: usize, gap: impl Fn(usize, f64) -> f64) -> Sums {
    let mut acc = Sums::default();
    for j in 1..=active {
        let pi = pc.product(j);
        if pi <= 0.0 {
            continue;
        }
        let g = gap(j, pi);
        if g <= 0.0 {
            continue;
        }
        let base = g / pi;
        acc.outer += base.powf(ex.outer);
        acc.inner += base.powf(ex.inner) / pi;
    }
    acc
}

fn level(s: Sums, ex: Exponents) -> Option<f64> {
    (s.inner > 0.0).then(|| s.outer.powf(1.0 / ex.r) / s.inner)
}

fn d_unchecked(pc: &PairClassSpec, ex: Exponents, m: usize) -> f64 {
    let top = pc.product(1);
    if m == 1 {
        return top;
    }
    let cut = pc.product(m + 1);
    level(sums(pc, ex, m, |_, pi| pi - cut), ex).unwrap_or(top)
}

/// Breakpoints `d_1..d_n`; `d_1 = t_1 s_1`, tied prefixes read as `d_1`.
pub fn breakpoints_d(pc: &PairClassSpec, r: f64, n: usize) -> Result<Vec<f64>> {
    pc.validate()?;
    let ex = Exponents::new(r)?;
    Ok((1..=n).map(|m| d_unchecked(pc, ex, m)).collect())
}

/// Interpolated cut for bracket `b`: `t` and `s` move linearly between
/// indices `b + 2` (start) and `b + 1` (end), and the cut is their product.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ProductCut {
    top: f64,
    /// d(cut)/d(1 - lambda) at the end point
    slope: f64,
    curvature: f64,
    t: (f64, f64),
    s: (f64, f64),
    blend: Blend,
}

impl ProductCut {
    pub(crate) fn new(pc: &PairClassSpec, bracket: usize, blend: Blend) -> Self {
        let m = bracket + 1;
        let (tu, tl) = (pc.weights_t.at(m), pc.weights_t.at(m + 1));
        let (su, sl) = (pc.weights_s.at(m), pc.weights_s.at(m + 1));
        ProductCut {
            top: tu * su,
            slope: tu * (su - sl) + su * (tu - tl),
            curvature: (tu - tl) * (su - sl),
            t: (tl, tu),
            s: (sl, su),
            blend,
        }
    }

    pub(crate) fn cut(&self) -> f64 {
        self.blend.mix(self.t.0, self.t.1) * self.blend.mix(self.s.0, self.s.1)
    }

    /// `pi_j - cut`, expanded around the end point.
    pub(crate) fn gap(&self, pi: f64) -> f64 {
        let k = self.blend.complement();
        (pi - self.top) + k * self.slope - k * k * self.curvature
    }
}

fn g_unchecked(pc: &PairClassSpec, ex: Exponents, bracket: usize, blend: Blend) -> f64 {
    let cut = ProductCut::new(pc, bracket, blend);
    level(sums(pc, ex, bracket + 1, |_, pi| cut.gap(pi)), ex).unwrap_or_else(|| pc.product(1))
}

/// Right-hand side of the scalar interpolation equation for the bracket
/// `[d_{b+1}, d_b]`: `g(0) = d_{b+1}`, `g(1) = d_b`.
pub fn sp_lambda_equation(pc: &PairClassSpec, r: f64, bracket: usize, blend: Blend) -> Result<f64> {
    let ex = Exponents::new(r)?;
    if bracket == 0 {
        return Err(Error::InvalidInfo("bracket indices start at 1".into()));
    }
    Ok(g_unchecked(pc, ex, bracket, blend))
}

/// Solves the scalar interpolation equation for `eps` in `[d_{b+1}, d_b]`.
///
/// Tied top products `pi_1 = ... = pi_{b+1}` make the equation constant
/// below `lambda = 1`; see [`crate::recovery::solve_lambda`].
pub fn sp_solve_lambda(pc: &PairClassSpec, r: f64, bracket: usize, eps: f64) -> Result<Blend> {
    pc.validate()?;
    let ex = Exponents::new(r)?;
    if bracket == 0 {
        return Err(Error::InvalidInfo("bracket indices start at 1".into()));
    }
    check_eps(eps)?;
    if pc.product(bracket + 1) == pc.product(1) {
        let g = |b| g_unchecked(pc, ex, bracket, b);
        return solve_degenerate(bracket, eps, g(Blend::START), g(Blend::END));
    }
    lambda_unchecked(pc, ex, bracket, eps)
}

fn lambda_unchecked(pc: &PairClassSpec, ex: Exponents, bracket: usize, eps: f64) -> Result<Blend> {
    solve_monotone(|b| g_unchecked(pc, ex, bracket, b), eps, ex.inner)
}

/// Product ball with `1 < r < inf`.
pub fn sp_solve_large_r(pc: &PairClassSpec, n: usize, eps: f64, r: f64) -> Result<ScalarSolution> {
    pc.validate()?;
    let ex = Exponents::new(r)?;
    ScalarInfoModel::ProductBall { n, eps, r }.validate()?;
    large(pc, ex, n, eps).map(|s| s.solution)
}

fn large(pc: &PairClassSpec, ex: Exponents, n: usize, eps: f64) -> Result<ScalarSolved> {
    let top = pc.product(1);
    if eps > top {
        return Ok(trivial(pc, n));
    }
    let d: Vec<f64> = (1..=n).map(|m| d_unchecked(pc, ex, m)).collect();
    if eps <= d[n - 1] {
        let cut = pc.product(n + 1);
        let s = sums(pc, ex, n, |_, pi| pi - cut);
        let error = cut + eps * s.outer.powf(1.0 / ex.outer);
        let coefficients = (1..=n)
            .map(|k| 1.0 - weight_ratio(cut, pc.product(k)))
            .collect();
        return Ok(solved(
            pc,
            n,
            Regime::FullWindow,
            n,
            0.0,
            error,
            coefficients,
            ScalarBranch::LargeWindow,
        ));
    }
    let bracket = (1..n).rev().find(|&b| d[b - 1] >= eps).unwrap_or(1);
    let m = bracket + 1;
    if pc.product(m) == top {
        return Ok(trivial(pc, n));
    }
    let blend = lambda_unchecked(pc, ex, bracket, eps)?;
    let cut = ProductCut::new(pc, bracket, blend);
    let s = sums(pc, ex, m, |_, pi| cut.gap(pi));
    let error = cut.cut() + eps * s.outer.powf(1.0 / ex.outer);
    let (m, lambda) = if blend.complement() == 0.0 {
        (bracket, 0.0)
    } else {
        (m, blend.lambda())
    };
    let coefficients = (1..=m)
        .map(|k| {
            let pi = pc.product(k);
            if pi > 0.0 {
                (cut.gap(pi) / pi).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(solved(
        pc,
        n,
        Regime::Interior,
        m,
        lambda,
        error,
        coefficients,
        ScalarBranch::LargeInterior { bracket, blend },
    ))
}

pub(crate) fn sp_solve_detailed(
    pc: &PairClassSpec,
    info: &ScalarInfoModel,
) -> Result<ScalarSolved> {
    pc.validate()?;
    info.validate()?;
    match info {
        ScalarInfoModel::Coordinatewise { eps } => Ok(coordinatewise(pc, eps)),
        &ScalarInfoModel::ProductBall { n, eps, r } => {
            if r.is_infinite() {
                Ok(coordinatewise(pc, &vec![eps; n]))
            } else if r <= 1.0 {
                Ok(small(pc, n, eps))
            } else {
                large(pc, Exponents::new(r)?, n, eps)
            }
        }
    }
}

/// Dispatches on the information model.
pub fn sp_solve(pc: &PairClassSpec, info: &ScalarInfoModel) -> Result<ScalarSolution> {
    sp_solve_detailed(pc, info).map(|s| s.solution)
}

/// `sum_{k<=m} a_k b_k nu_k`; bilinear, no conjugation.
pub fn sp_apply<T>(sol: &ScalarSolution, a: &[T], b: &[T]) -> Result<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<Output = T> + Mul<f64, Output = T>,
{
    for len in [a.len(), b.len()] {
        if len < sol.m {
            return Err(Error::DimensionMismatch {
                expected: sol.m,
                found: len,
            });
        }
    }
    Ok((0..sol.m).fold(T::zero(), |acc, k| acc + a[k] * b[k] * sol.coefficients[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn quarters() -> PairClassSpec {
        let w = WeightSequence::finite(vec![1.0, 0.5, 0.25]).unwrap();
        PairClassSpec::new(w.clone(), w, 2.0).unwrap()
    }

    #[test]
    fn conjugate_exponent() {
        let w = WeightSequence::finite(vec![1.0]).unwrap();
        let pc = PairClassSpec::new(w.clone(), w, 3.0).unwrap();
        assert!((1.0 / pc.p + 1.0 / pc.q() - 1.0).abs() < 1e-15);
        assert!(PairClassSpec::new(pc.weights_t.clone(), pc.weights_s.clone(), 1.0).is_err());
    }

    #[test]
    fn user_supplied_q_rejected() {
        let text = r#"{"weights_t":{"prefix":[1]},"weights_s":{"prefix":[1]},"p":2,"q":2}"#;
        assert!(serde_json::from_str::<PairClassSpec>(text).is_err());
        let text = r#"{"weights_t":{"prefix":[1]},"weights_s":{"prefix":[1]},"p":2}"#;
        assert!(serde_json::from_str::<PairClassSpec>(text).is_ok());
    }

    #[test]
    fn worked_coordinatewise() {
        let pc = quarters();
        assert_eq!(
            sp_solve_coordinatewise(&pc, 2, &[0.0, 0.0]).unwrap().error,
            0.0625
        );
        let s = sp_solve_coordinatewise(&pc, 2, &[0.1, 0.1]).unwrap();
        assert_eq!(s.m, 2);
        assert!((s.error - 0.23125).abs() < 1e-15);
        assert_eq!(s.products, vec![1.0, 0.25]);
    }

    #[test]
    fn coordinatewise_saturates() {
        let w = WeightSequence::finite(vec![1.0]).unwrap();
        let pc = PairClassSpec::new(w.clone(), w, 2.0).unwrap();
        let s = sp_solve_coordinatewise(&pc, 1, &[2.0]).unwrap();
        assert_eq!((s.m, s.error, s.regime), (0, 1.0, Regime::Trivial));
        assert_eq!(sp_solve_uniform(&quarters(), 2, 5.0).unwrap().error, 1.0);
    }

    #[test]
    fn worked_small_r() {
        let pc = quarters();
        assert!((sp_solve_small_r(&pc, 2, 0.5, 1.0).unwrap().error - 0.53125).abs() < 1e-15);
        assert_eq!(sp_solve_small_r(&pc, 2, 0.0, 1.0).unwrap().error, 0.0625);
        let s = sp_solve_small_r(&pc, 2, 2.0, 1.0).unwrap();
        assert_eq!((s.error, s.regime), (1.0, Regime::Trivial));
        assert!(sp_solve_small_r(&pc, 2, 0.5, 1.5).is_err());
    }

    #[test]
    fn worked_breakpoints_d() {
        let d = breakpoints_d(&quarters(), 2.0, 2).unwrap();
        assert_eq!(d[0], 1.0);
        let num = (0.9375_f64.powi(2) + 0.75_f64.powi(2)).sqrt();
        assert!((d[1] - num / 3.9375).abs() < 1e-15);
        assert!((d[1] - 0.304_910_7).abs() < 1e-7);
    }

    #[test]
    fn equal_products_collapse() {
        let w = WeightSequence::finite(vec![1.0; 4]).unwrap();
        let pc = PairClassSpec::new(w.clone(), w, 2.0).unwrap();
        let d = breakpoints_d(&pc, 2.0, 4).unwrap();
        assert!((d[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn worked_large_r() {
        let pc = quarters();
        assert_eq!(sp_solve_large_r(&pc, 2, 0.0, 2.0).unwrap().error, 0.0625);
        let s = sp_solve_large_r(&pc, 2, 0.2, 2.0).unwrap();
        let num = (0.9375_f64.powi(2) + 0.75_f64.powi(2)).sqrt();
        assert!((s.error - (0.0625 + 0.2 * num)).abs() < 1e-15);
        assert!((s.error - 0.302_617_2).abs() < 1e-7);
        assert_eq!(
            sp_solve_large_r(&pc, 2, 2.0, 2.0).unwrap().regime,
            Regime::Trivial
        );
    }

    #[test]
    fn lambda_endpoints_and_midpoint() {
        let pc = quarters();
        let d = breakpoints_d(&pc, 2.0, 3).unwrap();
        assert_eq!(sp_solve_lambda(&pc, 2.0, 2, d[2]).unwrap(), Blend::START);
        assert_eq!(sp_solve_lambda(&pc, 2.0, 2, d[1]).unwrap(), Blend::END);
        let eps = 0.5 * (d[1] + d[2]);
        let b = sp_solve_lambda(&pc, 2.0, 2, eps).unwrap();
        let g = sp_lambda_equation(&pc, 2.0, 2, b).unwrap();
        assert!((g - eps).abs() <= 1e-12 * eps);
    }

    #[test]
    fn interior_branch() {
        let pc = quarters();
        let s = sp_solve_large_r(&pc, 2, 0.6, 2.0).unwrap();
        assert_eq!((s.regime, s.m), (Regime::Interior, 2));
        assert!(s.lambda > 0.0 && s.lambda < 1.0);
        assert!(s.coefficients.iter().all(|&c| (0.0..=1.0).contains(&c)));
    }

    #[test]
    fn product_cut_matches_direct_product() {
        let pc = quarters();
        let b = Blend::from_lambda(0.3);
        let cut = ProductCut::new(&pc, 1, b);
        let direct = (0.7 * 0.25 + 0.3 * 0.5) * (0.7 * 0.25 + 0.3 * 0.5);
        assert!((cut.cut() - direct).abs() < 1e-15);
        assert!((cut.gap(1.0) - (1.0 - direct)).abs() < 1e-15);
    }

    #[test]
    fn apply_examples() {
        let mut s = sp_solve_coordinatewise(&quarters(), 2, &[2.0, 0.0]).unwrap();
        assert_eq!(sp_apply(&s, &[1.0], &[1.0]).unwrap(), 0.0);
        s.m = 2;
        s.coefficients = vec![0.9375, 0.75];
        assert_eq!(
            sp_apply(&s, &[1.0, 1.0, 9.0], &[1.0, 1.0, 9.0]).unwrap(),
            1.6875
        );
        s.m = 1;
        s.coefficients = vec![0.5];
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(
            sp_apply(&s, &[i, z], &[i, z]).unwrap(),
            Complex64::new(-0.5, 0.0)
        );
        assert!(sp_apply(&s, &[], &[i]).is_err());
    }

    #[test]
    fn json_has_products() {
        let s = sp_solve_uniform(&quarters(), 2, 0.1).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains(r#""products":[1.0,0.25]"#));
        assert_eq!(serde_json::from_str::<ScalarSolution>(&text).unwrap(), s);
    }
}
