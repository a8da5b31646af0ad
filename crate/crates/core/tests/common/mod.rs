//! Random problem generators shared by the integration suites.
#![allow(dead_code)]

use optrec::{ClassSpec, InfoModel, PairClassSpec, Problem, ScalarInfoModel, WeightSequence};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which solver branch a generated problem exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Coordinatewise,
    UniformBall,
    SmallP,
    LargeP,
    FullUniform,
    FullSmallP,
    FullLargeP,
    ScalarCoordinatewise,
    ScalarUniform,
    ScalarSmallR,
    ScalarLargeR,
}

pub const ALL_CASES: [Case; 11] = [
    Case::Coordinatewise,
    Case::UniformBall,
    Case::SmallP,
    Case::LargeP,
    Case::FullUniform,
    Case::FullSmallP,
    Case::FullLargeP,
    Case::ScalarCoordinatewise,
    Case::ScalarUniform,
    Case::ScalarSmallR,
    Case::ScalarLargeR,
];

/// The branches the oracle sandwich has to cover.
pub const ORACLE_CASES: [Case; 6] = [
    Case::Coordinatewise,
    Case::SmallP,
    Case::LargeP,
    Case::ScalarCoordinatewise,
    Case::ScalarSmallR,
    Case::ScalarLargeR,
];

pub const CLASS_EXPONENTS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];

/// Non-increasing prefix of length `1..=max_len`, occasionally with ties.
pub fn prefix(rng: &mut impl Rng, max_len: usize) -> Vec<f64> {
    let len = rng.random_range(1..=max_len);
    let mut t = vec![rng.random_range(0.5..2.0)];
    while t.len() < len {
        let last = *t.last().unwrap();
        let next = if rng.random_bool(0.15) {
            last
        } else {
            last * rng.random_range(0.2..0.95)
        };
        t.push(next);
    }
    t
}

pub fn weights(rng: &mut impl Rng, max_len: usize) -> WeightSequence {
    WeightSequence::finite(prefix(rng, max_len)).unwrap()
}

/// Noise level spread over several decades below `top`, sometimes above it
/// and sometimes zero.
pub fn noise(rng: &mut impl Rng, top: f64) -> f64 {
    if rng.random_bool(0.04) {
        0.0
    } else {
        top * 10f64.powf(rng.random_range(-2.5..0.2))
    }
}

pub fn class(rng: &mut impl Rng, max_len: usize) -> ClassSpec {
    let q = CLASS_EXPONENTS[rng.random_range(0..CLASS_EXPONENTS.len())];
    ClassSpec::new(weights(rng, max_len), q).unwrap()
}

pub fn pair_class(rng: &mut impl Rng, max_len: usize) -> PairClassSpec {
    let p = [1.5, 2.0, 3.0][rng.random_range(0..3)];
    PairClassSpec::new(weights(rng, max_len), weights(rng, max_len), p).unwrap()
}

fn small_p(rng: &mut impl Rng, q: f64) -> f64 {
    if rng.random_bool(0.2) {
        q
    } else {
        rng.random_range(0.3..=q)
    }
}

fn large_p(rng: &mut impl Rng, q: f64) -> f64 {
    q + rng.random_range(0.05..6.0)
}

/// A random problem for `case` with window length at most `max_n`.
pub fn problem(rng: &mut impl Rng, case: Case, max_n: usize) -> Problem {
    let n = rng.random_range(1..=max_n);
    match case {
        Case::ScalarCoordinatewise
        | Case::ScalarUniform
        | Case::ScalarSmallR
        | Case::ScalarLargeR => {
            let class = pair_class(rng, 6);
            let top = class.product(1);
            let info = match case {
                Case::ScalarCoordinatewise => ScalarInfoModel::Coordinatewise {
                    eps: (0..n).map(|_| noise(rng, top)).collect(),
                },
                Case::ScalarUniform => ScalarInfoModel::ProductBall {
                    n,
                    eps: noise(rng, top),
                    r: f64::INFINITY,
                },
                Case::ScalarSmallR => ScalarInfoModel::ProductBall {
                    n,
                    eps: noise(rng, top),
                    r: if rng.random_bool(0.2) {
                        1.0
                    } else {
                        rng.random_range(0.3..1.0)
                    },
                },
                _ => ScalarInfoModel::ProductBall {
                    n,
                    eps: noise(rng, top),
                    r: rng.random_range(1.1..6.0),
                },
            };
            Problem::Scalar { class, info }
        }
        _ => {
            // full-sequence problems with zero tails stay within the oracle
            // dimension when the support is at most `max_n`
            let class = class(rng, if is_full(case) { max_n } else { 6 });
            let (q, top) = (class.q, class.weights.at(1));
            let eps = noise(rng, top);
            let info = match case {
                Case::Coordinatewise => InfoModel::Coordinatewise {
                    eps: (0..n).map(|_| noise(rng, top)).collect(),
                },
                Case::UniformBall => InfoModel::FiniteBall {
                    n,
                    eps,
                    p: f64::INFINITY,
                },
                Case::SmallP => InfoModel::FiniteBall {
                    n,
                    eps,
                    p: small_p(rng, q),
                },
                Case::LargeP => InfoModel::FiniteBall {
                    n,
                    eps,
                    p: large_p(rng, q),
                },
                Case::FullUniform => InfoModel::FullBall {
                    eps,
                    p: f64::INFINITY,
                },
                Case::FullSmallP => InfoModel::FullBall {
                    eps,
                    p: small_p(rng, q),
                },
                _ => InfoModel::FullBall {
                    eps,
                    p: large_p(rng, q),
                },
            };
            Problem::Recovery { class, info }
        }
    }
}

fn is_full(case: Case) -> bool {
    matches!(
        case,
        Case::FullUniform | Case::FullSmallP | Case::FullLargeP
    )
}

/// Copy of `problem` with every noise level replaced by `scale * base_k`.
pub fn rescaled(problem: &Problem, base: &[f64], scale: f64) -> Problem {
    let eps = |k: usize| scale * base[k];
    match problem.clone() {
        Problem::Recovery { class, info } => Problem::Recovery {
            class,
            info: match info {
                InfoModel::Coordinatewise { eps: e } => InfoModel::Coordinatewise {
                    eps: (0..e.len()).map(eps).collect(),
                },
                InfoModel::FiniteBall { n, p, .. } => InfoModel::FiniteBall { n, eps: eps(0), p },
                InfoModel::FullBall { p, .. } => InfoModel::FullBall { eps: eps(0), p },
            },
        },
        Problem::Scalar { class, info } => Problem::Scalar {
            class,
            info: match info {
                ScalarInfoModel::Coordinatewise { eps: e } => ScalarInfoModel::Coordinatewise {
                    eps: (0..e.len()).map(eps).collect(),
                },
                ScalarInfoModel::ProductBall { n, r, .. } => {
                    ScalarInfoModel::ProductBall { n, eps: eps(0), r }
                }
            },
        },
    }
}

/// Noise levels of `problem`, one per observed coordinate for
/// coordinatewise models.
pub fn noise_levels(problem: &Problem) -> Vec<f64> {
    match problem {
        Problem::Recovery { info, .. } => match info {
            InfoModel::Coordinatewise { eps } => eps.clone(),
            InfoModel::FiniteBall { eps, .. } | InfoModel::FullBall { eps, .. } => vec![*eps],
        },
        Problem::Scalar { info, .. } => match info {
            ScalarInfoModel::Coordinatewise { eps } => eps.clone(),
            ScalarInfoModel::ProductBall { eps, .. } => vec![*eps],
        },
    }
}

/// `t_1` or `t_1 s_1`.
pub fn top(problem: &Problem) -> f64 {
    match problem {
        Problem::Recovery { class, .. } => class.weights.at(1),
        Problem::Scalar { class, .. } => class.product(1),
    }
}

/// `(regime, m)` of the analytic solution, the state that changes at a
/// breakpoint.
pub fn state(problem: &Problem) -> (String, usize) {
    match problem {
        Problem::Recovery { class, info } => {
            let s = optrec::solve(class, info).unwrap();
            (format!("{:?}", s.regime), s.m)
        }
        Problem::Scalar { class, info } => {
            let s = optrec::sp_solve(class, info).unwrap();
            (format!("{:?}", s.regime), s.m)
        }
    }
}
