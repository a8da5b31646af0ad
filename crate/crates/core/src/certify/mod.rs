//! Lower-bound certificates and an independent brute-force check.
//!
//! A certificate is a class element `x*` (or a pair `(x*, y*)`) whose
//! information set contains the zero observation. No method can tell `x*`
//! from `-x*`, so every method errs by at least `||x*||` on one of them;
//! when that norm equals the analytic error, the solver's method is optimal.

mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recovery::{self, large, Branch, InfoModel, RecoverySolution};
use crate::scalar::{self, PairClassSpec, ProductCut, ScalarBranch, ScalarInfoModel};
use crate::weights::{over_weight, ClassSpec};

pub use oracle::{
    brute_force_worst_case, grid_slack, OracleConfig, OracleResult, Witness, GRID_SLACK_CONSTANT,
    MAX_ORACLE_DIMENSION, REFINED_SLACK_CONSTANT,
};

/// Relative tolerance for certificate tightness and feasibility.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-12;

/// Absolute margin by which the oracle may exceed the analytic error.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

/// A recovery or scalar-product problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    Recovery {
        class: ClassSpec,
        info: InfoModel,
    },
    Scalar {
        class: PairClassSpec,
        info: ScalarInfoModel,
    },
}

impl Problem {
    /// Optimal error from the analytic solvers.
    pub fn analytic_error(&self) -> Result<f64> {
        match self {
            Problem::Recovery { class, info } => recovery::solve(class, info).map(|s| s.error),
            Problem::Scalar { class, info } => scalar::sp_solve(class, info).map(|s| s.error),
        }
    }

    /// Multipliers of the optimal method on the observed coordinates.
    pub fn optimal_method(&self) -> Result<Vec<f64>> {
        match self {
            Problem::Recovery { class, info } => {
                let sol = recovery::solve(class, info)?;
                Ok(method_multipliers(&sol, oracle::observed_len(class, info)))
            }
            Problem::Scalar { class, info } => {
                scalar::sp_solve(class, info).map(|s| s.coefficients)
            }
        }
    }
}

/// Multipliers for `dim` observed coordinates; identity regimes become
/// all-ones.
pub fn method_multipliers(sol: &RecoverySolution, dim: usize) -> Vec<f64> {
    if sol.is_identity() {
        vec![1.0; dim]
    } else {
        sol.coefficients.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `x* = T h*` against `-x*`.
    OddOperator,
    /// `(T u*, S v*)` against `(-T u*, S v*)`.
    ScalarPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// `h*` (or `u*`), finitely supported.
    pub extremal_h: Vec<f64>,
    /// `v*` for scalar-product certificates.
    pub extremal_g: Option<Vec<f64>>,
    pub lower_bound: f64,
    /// Whether the zero observation is consistent with the extremal element.
    pub info_feasible: bool,
    /// `||h*||_q`, or `max(||u*||_p, ||v*||_q)`.
    pub class_norm: f64,
    /// A zero weight inside the observed window was read as `1/0 = inf`.
    pub extended_regime: bool,
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        self.info_feasible && self.class_norm <= 1.0 + CERTIFICATE_TOLERANCE
    }
}

/// Builds the extremal element(s) for the regime the solver selects and
/// evaluates the lower bound they induce.
pub fn build_certificate(problem: &Problem) -> Result<Certificate> {
    match problem {
        Problem::Recovery { class, info } => recovery_certificate(class, info),
        Problem::Scalar { class, info } => scalar_certificate(class, info),
    }
}

/// `||ax - ay|| / 2` in `l_q`; the shorter input is padded with zeros.
pub fn pair_lower_bound(ax: &[f64], ay: &[f64], q: f64) -> f64 {
    let len = ax.len().max(ay.len());
    let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let diff = (0..len).map(|k| at(ax, k) - at(ay, k));
    0.5 * lq_norm(diff, q)
}

/// `|ax - ay| / 2` for scalar targets.
pub fn pair_lower_bound_scalar(ax: num_complex::Complex64, ay: num_complex::Complex64) -> f64 {
    0.5 * (ax - ay).norm()
}

fn lq_norm(v: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        v.fold(0.0, |m, x| m.max(x.abs()))
    } else {
        v.map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `(1 - used)^{1/q}`, clamped at zero.
fn rest(used: f64, q: f64) -> f64 {
    (1.0 - used).max(0.0).powf(1.0 / q)
}

fn recovery_certificate(cls: &ClassSpec, info: &InfoModel) -> Result<Certificate> {
    let solved = recovery::solve_detailed(cls, info)?;
    let q = cls.q;
    let sol = &solved.solution;
    let h = match solved.branch {
        Branch::Threshold => {
            let eps_q = |k: usize| match info {
                InfoModel::Coordinatewise { eps } => eps[k - 1].powf(q),
                InfoModel::FiniteBall { eps, .. } | InfoModel::FullBall { eps, .. } => eps.powf(q),
            };
            let mut h = Vec::with_capacity(sol.m + 1);
            let mut used = 0.0;
            for k in 1..=sol.m {
                let v = over_weight(eps_q(k), cls.tq(k));
                used += v;
                h.push(v.powf(1.0 / q));
            }
            h.push(rest(used, q));
            h
        }
        Branch::SmallWindow => {
            let (n, eps) = window_and_eps(info);
            let v = over_weight(eps.powf(q), cls.tq(1)).min(1.0);
            let mut h = vec![0.0; n + 1];
            h[0] = v.powf(1.0 / q);
            h[n] = rest(v, q);
            h
        }
        Branch::Identity => {
            let (_, eps) = window_and_eps(info);
            vec![over_weight(eps, cls.weights.at(1)).min(1.0)]
        }
        Branch::LargeWindow => {
            let (_, eps, p) = ball(info);
            let cut = cls.tq(sol.m + 1);
            let mut h = spread(cls, p, eps, sol.m, |tq| tq - cut);
            let used = h.iter().map(|x| x.powf(q)).sum();
            h.push(rest(used, q));
            h
        }
        Branch::LargeInterior { bracket, blend } => {
            let (_, eps, p) = ball(info);
            spread(
                cls,
                p,
                eps,
                bracket + 1,
                large::interior_gap(cls, bracket, blend),
            )
        }
        Branch::Trivial => {
            let (_, eps) = window_and_eps(info);
            let t1 = cls.weights.at(1);
            let block = if eps >= t1 {
                1
            } else {
                tied_block(|k| cls.weights.at(k))
            };
            vec![(block as f64).powf(-1.0 / q); block]
        }
        Branch::ExactInfo => Vec::new(),
    };

    let image: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(i, &x)| cls.weights.at(i + 1) * x)
        .collect();
    let lower_bound = lq_norm(image.iter().copied(), q);
    let class_norm = lq_norm(h.iter().copied(), q);
    let window = info.window().unwrap_or(h.len());
    let info_feasible = match info {
        InfoModel::Coordinatewise { eps } => image
            .iter()
            .zip(eps)
            .all(|(&x, &e)| x <= e * (1.0 + CERTIFICATE_TOLERANCE)),
        InfoModel::FiniteBall { eps, p, .. } | InfoModel::FullBall { eps, p } => {
            in_ball(image.iter().take(window).copied(), *eps, *p)
        }
    };
    let extended_regime = (1..=window.min(h.len())).any(|k| cls.weights.at(k) == 0.0);
    Ok(Certificate {
        kind: CertificateKind::OddOperator,
        extremal_h: h,
        extremal_g: None,
        lower_bound,
        info_feasible,
        class_norm,
        extended_regime,
    })
}

fn window_and_eps(info: &InfoModel) -> (usize, f64) {
    match info {
        InfoModel::Coordinatewise { eps } => (eps.len(), eps.iter().copied().fold(0.0, f64::max)),
        InfoModel::FiniteBall { n, eps, .. } => (*n, *eps),
        InfoModel::FullBall { eps, .. } => (0, *eps),
    }
}

fn ball(info: &InfoModel) -> (usize, f64, f64) {
    match info {
        InfoModel::FiniteBall { n, eps, p } => (*n, *eps, *p),
        InfoModel::FullBall { eps, p } => (0, *eps, *p),
        InfoModel::Coordinatewise { eps } => (eps.len(), 0.0, f64::INFINITY),
    }
}

/// `h_j = eps (d_j / sum d)^{1/p} / t_j` with `d_j = (gap_j / t_j^q)^{p/(p-q)}`:
/// the noise is spread so that `||(t_j h_j)||_p = eps`.
fn spread(cls: &ClassSpec, p: f64, eps: f64, active: usize, gap: impl Fn(f64) -> f64) -> Vec<f64> {
    let q = cls.q;
    let d: Vec<f64> = (1..=active)
        .map(|j| {
            let tq = cls.tq(j);
            let g = gap(tq);
            if tq > 0.0 && g > 0.0 {
                (g / tq).powf(p / (p - q))
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = d.iter().sum();
    d.iter()
        .enumerate()
        .map(|(i, &dj)| {
            if dj > 0.0 {
                eps * (dj / total).powf(1.0 / p) / cls.weights.at(i + 1)
            } else {
                0.0
            }
        })
        .collect()
}

/// Number of leading entries equal to the first one.
fn tied_block(at: impl Fn(usize) -> f64) -> usize {
    let top = at(1);
    let mut r = 1;
    while r < recovery::MAX_SEARCH_INDEX && at(r + 1) == top {
        r += 1;
    }
    r
}

fn in_ball(values: impl Iterator<Item = f64>, eps: f64, p: f64) -> bool {
    let slack = 1.0 + CERTIFICATE_TOLERANCE;
    if p.is_infinite() {
        values.fold(0.0, |m: f64, x| m.max(x.abs())) <= eps * slack
    } else {
        values.map(|x| x.abs().powf(p)).sum::<f64>() <= eps.powf(p) * slack
    }
}

fn scalar_certificate(pc: &PairClassSpec, info: &ScalarInfoModel) -> Result<Certificate> {
    let solved = scalar::sp_solve_detailed(pc, info)?;
    let (p, q) = (pc.p, pc.q());
    let sol = &solved.solution;
    let n = info.window();
    let pi = |k: usize| pc.product(k);
    // each entry is a share `w_k` of the unit budget: u_k = w_k^{1/p}, v_k = w_k^{1/q}
    let shares: Vec<f64> = match solved.branch {
        ScalarBranch::Threshold => {
            let eps_at = |k: usize| match info {
                ScalarInfoModel::Coordinatewise { eps } => eps[k - 1],
                ScalarInfoModel::ProductBall { eps, .. } => *eps,
            };
            let mut w: Vec<f64> = (1..=sol.m).map(|k| over_weight(eps_at(k), pi(k))).collect();
            let used: f64 = w.iter().sum();
            w.push((1.0 - used).max(0.0));
            w
        }
        ScalarBranch::SmallWindow => {
            let eps = scalar_eps(info);
            let v = over_weight(eps, pi(1)).min(1.0);
            let mut w = vec![0.0; n + 1];
            w[0] = v;
            w[n] = 1.0 - v;
            w
        }
        ScalarBranch::LargeWindow => {
            let (eps, r) = (scalar_eps(info), scalar_r(info));
            let cut = pi(n + 1);
            let mut w = scalar_spread(pc, r, eps, n, |x| x - cut);
            let used: f64 = w.iter().sum();
            w.push((1.0 - used).max(0.0));
            w
        }
        ScalarBranch::LargeInterior { bracket, blend } => {
            let (eps, r) = (scalar_eps(info), scalar_r(info));
            let cut = ProductCut::new(pc, bracket, blend);
            scalar_spread(pc, r, eps, bracket + 1, |x| cut.gap(x))
        }
        ScalarBranch::Trivial => {
            let eps = scalar_eps(info);
            let block = if eps >= pi(1) { 1 } else { tied_block(pi) };
            vec![1.0 / block as f64; block]
        }
    };
    let u: Vec<f64> = shares.iter().map(|w| w.powf(1.0 / p)).collect();
    let v: Vec<f64> = shares.iter().map(|w| w.powf(1.0 / q)).collect();
    let pairing: Vec<f64> = (0..u.len()).map(|i| pi(i + 1) * u[i] * v[i]).collect();
    let lower_bound = pairing.iter().sum();
    let class_norm = lq_norm(u.iter().copied(), p).max(lq_norm(v.iter().copied(), q));
    let observed = pairing.iter().take(n).copied();
    let info_feasible = match info {
        ScalarInfoModel::Coordinatewise { eps } => observed
            .zip(eps)
            .all(|(x, &e)| x <= e * (1.0 + CERTIFICATE_TOLERANCE)),
        ScalarInfoModel::ProductBall { eps, r, .. } => in_ball(observed, *eps, *r),
    };
    let extended_regime = (1..=n.min(u.len())).any(|k| pi(k) == 0.0);
    Ok(Certificate {
        kind: CertificateKind::ScalarPair,
        extremal_h: u,
        extremal_g: Some(v),
        lower_bound,
        info_feasible,
        class_norm,
        extended_regime,
    })
}

fn scalar_eps(info: &ScalarInfoModel) -> f64 {
    match info {
        ScalarInfoModel::Coordinatewise { eps } => eps.iter().copied().fold(0.0, f64::max),
        ScalarInfoModel::ProductBall { eps, .. } => *eps,
    }
}

fn scalar_r(info: &ScalarInfoModel) -> f64 {
    match info {
        ScalarInfoModel::Coordinatewise { .. } => f64::INFINITY,
        ScalarInfoModel::ProductBall { r, .. } => *r,
    }
}

/// Shares `eps tau_j / (pi_j (sum tau^r)^{1/r})` with
/// `tau_j = (gap_j / pi_j)^{1/(r-1)}`, so that `||(pi_j u_j v_j)||_r = eps`.
fn scalar_spread(
    pc: &PairClassSpec,
    r: f64,
    eps: f64,
    active: usize,
    gap: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let tau: Vec<f64> = (1..=active)
        .map(|j| {
            let pi = pc.product(j);
            let g = gap(pi);
            if pi > 0.0 && g > 0.0 {
                (g / pi).powf(1.0 / (r - 1.0))
            } else {
                0.0
            }
        })
        .collect();
    let norm = tau.iter().map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r);
    tau.iter()
        .enumerate()
        .map(|(i, &x)| {
            if x > 0.0 {
                eps * x / (pc.product(i + 1) * norm)
            } else {
                0.0
            }
        })
        .collect()
}

/// Outcome of checking a method against the analytic error, its
/// certificate and the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub analytic_error: f64,
    pub certificate_bound: f64,
    pub oracle_sup: f64,
    pub grid_slack: f64,
    pub certificate_tight: bool,
    pub oracle_within_upper: bool,
    pub oracle_within_lower: bool,
    /// The oracle found a worst case above the optimum by more than the slack.
    pub suboptimal_method: bool,
    pub pass: bool,
    pub certificate: Certificate,
    pub witness: Witness,
}

/// Three-way check of the optimal method.
pub fn verify(problem: &Problem, cfg: &OracleConfig) -> Result<VerifyReport> {
    let method = problem.optimal_method()?;
    verify_method(problem, &method, cfg)
}

/// Three-way check of an arbitrary linear method given by its multipliers.
pub fn verify_method(
    problem: &Problem,
    method: &[f64],
    cfg: &OracleConfig,
) -> Result<VerifyReport> {
    let analytic_error = problem.analytic_error()?;
    let certificate = build_certificate(problem)?;
    let found = brute_force_worst_case(problem, method, cfg)?;
    let slack = grid_slack(problem, cfg);
    let scale = analytic_error.abs().max(f64::MIN_POSITIVE);
    let certificate_tight = certificate.is_valid()
        && (certificate.lower_bound - analytic_error).abs() <= CERTIFICATE_TOLERANCE * scale;
    let oracle_within_upper = found.sup <= analytic_error + ORACLE_TOLERANCE;
    let oracle_within_lower = found.sup >= analytic_error - slack;
    Ok(VerifyReport {
        analytic_error,
        certificate_bound: certificate.lower_bound,
        oracle_sup: found.sup,
        grid_slack: slack,
        certificate_tight,
        oracle_within_upper,
        oracle_within_lower,
        suboptimal_method: found.sup > analytic_error + slack,
        pass: certificate_tight && oracle_within_upper && oracle_within_lower,
        certificate,
        witness: found.witness,
    })
}

/// Rejects problems the oracle cannot enumerate.
pub(crate) fn unsupported(what: &str) -> Error {
    Error::UnsupportedRegime(what.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    fn halves(q: f64) -> ClassSpec {
        ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25]).unwrap(), q).unwrap()
    }

    fn quarters() -> PairClassSpec {
        let w = WeightSequence::finite(vec![1.0, 0.5, 0.25]).unwrap();
        PairClassSpec::new(w.clone(), w, 2.0).unwrap()
    }

    #[test]
    fn coordinatewise_certificate() {
        let problem = Problem::Recovery {
            class: halves(1.0),
            info: InfoModel::Coordinatewise {
                eps: vec![0.1, 0.1],
            },
        };
        let c = build_certificate(&problem).unwrap();
        assert_eq!(c.kind, CertificateKind::OddOperator);
        let expected = [0.1, 0.2, 0.7];
        for (a, b) in c.extremal_h.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((c.lower_bound - 0.375).abs() < 1e-15);
        assert!(c.info_feasible && !c.extended_regime);
    }

    #[test]
    fn small_p_exact_info_is_unit_vector() {
        let problem = Problem::Recovery {
            class: halves(2.0),
            info: InfoModel::FiniteBall {
                n: 2,
                eps: 0.0,
                p: 1.0,
            },
        };
        let c = build_certificate(&problem).unwrap();
        assert_eq!(c.extremal_h, vec![0.0, 0.0, 1.0]);
        assert_eq!(c.lower_bound, 0.25);
    }

    #[test]
    fn scalar_threshold_certificate() {
        let problem = Problem::Scalar {
            class: quarters(),
            info: ScalarInfoModel::Coordinatewise {
                eps: vec![0.1, 0.1],
            },
        };
        let c = build_certificate(&problem).unwrap();
        assert!((c.lower_bound - 0.23125).abs() < 1e-15);
        let u = &c.extremal_h;
        assert!((u[0] - 0.1_f64.sqrt()).abs() < 1e-15);
        assert!((u[1] - 0.4_f64.sqrt()).abs() < 1e-15);
        assert!((u[2] - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!(c.info_feasible);
    }

    #[test]
    fn large_p_interior_certificate_is_tight() {
        let problem = Problem::Recovery {
            class: halves(1.0),
            info: InfoModel::FiniteBall {
                n: 2,
                eps: 0.7,
                p: 2.0,
            },
        };
        let c = build_certificate(&problem).unwrap();
        let e = problem.analytic_error().unwrap();
        assert!((c.lower_bound - e).abs() <= 1e-12 * e);
        assert!(c.is_valid());
    }

    #[test]
    fn zero_weight_flagged() {
        let cls = ClassSpec::new(WeightSequence::finite(vec![1.0, 0.0]).unwrap(), 1.0).unwrap();
        let problem = Problem::Recovery {
            class: cls,
            info: InfoModel::Coordinatewise {
                eps: vec![0.1, 0.1],
            },
        };
        assert!(build_certificate(&problem).unwrap().extended_regime);
    }

    #[test]
    fn pair_lower_bound_examples() {
        assert_eq!(pair_lower_bound(&[1.0, 2.0], &[1.0, 2.0], 2.0), 0.0);
        assert_eq!(pair_lower_bound(&[1.0, 0.0], &[0.0, 1.0], 1.0), 1.0);
        let x = [0.3, 0.4];
        let minus: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pair_lower_bound(&x, &minus, 2.0) - 0.5).abs() < 1e-15);
        let i = num_complex::Complex64::new(0.0, 1.0);
        assert_eq!(pair_lower_bound_scalar(i, -i), 1.0);
    }
}
