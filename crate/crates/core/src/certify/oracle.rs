//! Brute-force worst case of a given linear method on small instances.
//!
//! The search runs over nonnegative `h` on the unit sphere of the class
//! norm, parametrised by simplex points `v` with `h_k = v_k^{1/q}`, in
//! dimension `n + 1`: the unobserved tail is lumped into coordinate
//! `n + 1`, which carries the largest unobserved weight. Perturbations are
//! sign-aligned so that they add to the error, and their magnitudes run over
//! the boundary of the information set. A local pattern search polishes the
//! best grid point.
//!
//! Every evaluated point is feasible, so the result is a lower bound on the
//! true worst case and converges to it from below as the grids refine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{unsupported, Problem};
use crate::error::{Error, Result};
use crate::recovery::InfoModel;
use crate::scalar::ScalarInfoModel;
use crate::weights::ClassSpec;

/// Hard cap on the oracle dimension `n + 1`.
pub const MAX_ORACLE_DIMENSION: usize = 4;

/// `grid_slack = GRID_SLACK_CONSTANT * scale / grid_points_per_axis` for
/// the bare grid. Calibrated deficits reach about half of this.
pub const GRID_SLACK_CONSTANT: f64 = 0.1;

/// The same constant once the local search polishes the grid maximum;
/// calibrated deficits stay below `4e-10`.
pub const REFINED_SLACK_CONSTANT: f64 = 1e-6;

const REFINE_MIN_STEP: f64 = 1e-13;
const REFINE_MAX_ROUNDS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Simplex subdivisions for the class element.
    pub grid_points_per_axis: usize,
    /// Largest admissible `n + 1`; at most [`MAX_ORACLE_DIMENSION`].
    pub max_dimension: usize,
    /// Simplex subdivisions for the perturbation magnitudes.
    pub perturbation_grid: usize,
    /// Polish the best grid point with a local pattern search.
    pub refine: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid_points_per_axis: 64,
            max_dimension: MAX_ORACLE_DIMENSION,
            perturbation_grid: 32,
            refine: true,
        }
    }
}

impl OracleConfig {
    pub fn with_grid(grid_points_per_axis: usize) -> Self {
        OracleConfig {
            grid_points_per_axis,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_dimension > MAX_ORACLE_DIMENSION {
            return Err(Error::DimensionTooLarge {
                dimension: self.max_dimension,
                max: MAX_ORACLE_DIMENSION,
            });
        }
        if self.grid_points_per_axis == 0 || self.perturbation_grid == 0 {
            return Err(Error::InvalidInfo(
                "oracle grids need at least one subdivision".into(),
            ));
        }
        Ok(())
    }
}

/// Where the oracle attained its supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Class element `h` (or `u`).
    pub h: Vec<f64>,
    /// Second factor `g` for scalar products.
    pub g: Option<Vec<f64>>,
    /// Signed perturbation on the observed coordinates (or products).
    pub perturbation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Best value found, after refinement.
    pub sup: f64,
    /// Best value on the grid alone; non-decreasing under nested refinement.
    pub grid_sup: f64,
    /// Maximum over all sign patterns at the witness magnitudes.
    pub sign_sweep_sup: f64,
    pub evaluations: u64,
    pub witness: Witness,
}

/// Slack allowed below the analytic error for a grid of this resolution.
pub fn grid_slack(problem: &Problem, cfg: &OracleConfig) -> f64 {
    let scale = match problem {
        Problem::Recovery { class, .. } => class.weights.at(1),
        Problem::Scalar { class, .. } => class.product(1),
    };
    let c = if cfg.refine {
        REFINED_SLACK_CONSTANT
    } else {
        GRID_SLACK_CONSTANT
    };
    c * scale / cfg.grid_points_per_axis as f64
}

/// Number of observed coordinates the oracle feeds to a method.
pub(crate) fn observed_len(cls: &ClassSpec, info: &InfoModel) -> usize {
    match info {
        InfoModel::Coordinatewise { eps } => eps.len(),
        InfoModel::FiniteBall { n, .. } => *n,
        InfoModel::FullBall { .. } => cls.weights.support_len().map_or(0, |n| n + 1),
    }
}

/// Grid supremum of the error of the linear method with the given
/// multipliers (zero beyond their length).
pub fn brute_force_worst_case(
    problem: &Problem,
    method: &[f64],
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    cfg.validate()?;
    let landscape = Landscape::new(problem, method)?;
    if landscape.dim > cfg.max_dimension {
        return Err(Error::DimensionTooLarge {
            dimension: landscape.dim,
            max: cfg.max_dimension,
        });
    }
    Ok(landscape.search(cfg))
}

#[derive(Debug, Clone)]
enum Noise {
    /// Fixed magnitudes per observed coordinate.
    Box(Vec<f64>),
    /// Magnitudes on the sphere of radius `eps` in `l_p`.
    Ball { eps: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    /// `||error||_q`
    Sequence { q: f64 },
    /// Scalar product with `u` in the `l_p` ball, `g` optimised exactly.
    Pairing { p: f64 },
}

#[derive(Debug, Clone)]
struct Landscape {
    target: Target,
    dim: usize,
    /// Coefficient of `h_k` after the method: `|1 - mu_k| w_k` (`w_k` the
    /// weight or product).
    keep: Vec<f64>,
    /// `|mu_k|` on the observed coordinates.
    gain: Vec<f64>,
    /// Signed multipliers, for the sign sweep.
    mu: Vec<f64>,
    weight: Vec<f64>,
    noise: Noise,
}

impl Landscape {
    fn new(problem: &Problem, method: &[f64]) -> Result<Self> {
        let (target, dim, observed, weight, noise) = match problem {
            Problem::Recovery { class, info } => {
                class.validate()?;
                let (dim, observed, noise) = match info {
                    InfoModel::Coordinatewise { eps } => {
                        (eps.len() + 1, eps.len(), Noise::Box(eps.clone()))
                    }
                    &InfoModel::FiniteBall { n, eps, p } => (n + 1, n, noise_for(n, eps, p)),
                    &InfoModel::FullBall { eps, p } => {
                        let support = class.weights.support_len().ok_or_else(|| {
                            unsupported(
                                "oracle needs finitely supported weights for full information",
                            )
                        })?;
                        (support + 1, support + 1, noise_for(support + 1, eps, p))
                    }
                };
                let weight: Vec<f64> = (1..=dim).map(|k| class.weights.at(k)).collect();
                (
                    Target::Sequence { q: class.q },
                    dim,
                    observed,
                    weight,
                    noise,
                )
            }
            Problem::Scalar { class, info } => {
                class.validate()?;
                let n = info.window();
                let noise = match info {
                    ScalarInfoModel::Coordinatewise { eps } => Noise::Box(eps.clone()),
                    &ScalarInfoModel::ProductBall { n, eps, r } => noise_for(n, eps, r),
                };
                let weight: Vec<f64> = (1..=n + 1).map(|k| class.product(k)).collect();
                (Target::Pairing { p: class.p }, n + 1, n, weight, noise)
            }
        };
        let mu: Vec<f64> = (0..dim)
            .map(|i| {
                if i < observed {
                    method.get(i).copied().unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        let keep = (0..dim)
            .map(|i| (1.0 - mu[i]).abs() * weight_at(&weight, i))
            .collect();
        let gain = mu.iter().take(observed).map(|m| m.abs()).collect();
        Ok(Landscape {
            target,
            dim,
            keep,
            gain,
            mu,
            weight,
            noise,
        })
    }

    fn observed(&self) -> usize {
        self.gain.len()
    }

    fn class_exponent(&self) -> f64 {
        match self.target {
            Target::Sequence { q } => q,
            Target::Pairing { p } => p,
        }
    }

    fn element(&self, v: &[f64]) -> Vec<f64> {
        let a = self.class_exponent();
        v.iter().map(|&x| root(x, a)).collect()
    }

    fn perturbation(&self, w: &[f64]) -> Vec<f64> {
        match &self.noise {
            Noise::Box(eps) => eps.clone(),
            Noise::Ball { eps, p } => w.iter().map(|&x| eps * root(x, *p)).collect(),
        }
    }

    /// Monotone surrogate of the error that is cheaper to compare; see
    /// [`Landscape::finish`].
    fn score(&self, h: &[f64], e: &[f64]) -> f64 {
        match self.target {
            Target::Sequence { q } => (0..self.dim)
                .map(|k| {
                    let noise = if k < e.len() {
                        self.gain[k] * e[k]
                    } else {
                        0.0
                    };
                    pow(self.keep[k] * h[k] + noise, q)
                })
                .sum(),
            Target::Pairing { .. } => self.signal_part(h) + self.noise_part(e),
        }
    }

    /// `sup_g sum_k c_k g_k = ||c||_p` over the unit ball of `l_q`.
    fn signal_part(&self, h: &[f64]) -> f64 {
        let a = self.class_exponent();
        root((0..self.dim).map(|k| pow(self.keep[k] * h[k], a)).sum(), a)
    }

    fn noise_part(&self, e: &[f64]) -> f64 {
        (0..e.len()).map(|k| self.gain[k] * e[k]).sum()
    }

    fn finish(&self, score: f64) -> f64 {
        match self.target {
            Target::Sequence { q } => root(score, q),
            Target::Pairing { .. } => score,
        }
    }

    fn search(&self, cfg: &OracleConfig) -> OracleResult {
        let h_grid = simplex(self.dim, cfg.grid_points_per_axis);
        let e_grid = match self.noise {
            Noise::Box(_) => vec![Vec::new()],
            Noise::Ball { .. } => simplex(self.observed(), cfg.perturbation_grid),
        };
        let elements: Vec<Vec<f64>> = h_grid.iter().map(|v| self.element(v)).collect();
        let noises: Vec<Vec<f64>> = e_grid.iter().map(|w| self.perturbation(w)).collect();

        // (score, h index, e index); ties go to the smallest indices
        let (best, evaluations) = match self.target {
            Target::Pairing { .. } => {
                // the pairing splits into an element part and a noise part
                let part = |values: &[Vec<f64>], f: &(dyn Fn(&[f64]) -> f64 + Sync)| {
                    values
                        .par_iter()
                        .enumerate()
                        .map(|(i, x)| (f(x), i, 0))
                        .reduce(|| (f64::NEG_INFINITY, usize::MAX, usize::MAX), pick)
                };
                let h_best = part(&elements, &|h| self.signal_part(h));
                let e_best = part(&noises, &|e| self.noise_part(e));
                (
                    (h_best.0 + e_best.0, h_best.1, e_best.1),
                    (elements.len() + noises.len()) as u64,
                )
            }
            Target::Sequence { q } => {
                let obs = self.observed();
                let shifts: Vec<Vec<f64>> = noises
                    .iter()
                    .map(|e| {
                        (0..obs)
                            .map(|k| self.gain[k] * e.get(k).copied().unwrap_or(0.0))
                            .collect()
                    })
                    .collect();
                let best = elements
                    .par_iter()
                    .enumerate()
                    .map(|(i, h)| {
                        let signal: Vec<f64> = (0..self.dim).map(|k| self.keep[k] * h[k]).collect();
                        let unobserved: f64 = signal[obs..].iter().map(|&x| pow(x, q)).sum();
                        let mut local = (f64::NEG_INFINITY, i, 0);
                        for (j, shift) in shifts.iter().enumerate() {
                            let s = unobserved
                                + (0..obs).map(|k| pow(signal[k] + shift[k], q)).sum::<f64>();
                            if s > local.0 {
                                local = (s, i, j);
                            }
                        }
                        local
                    })
                    .reduce(|| (f64::NEG_INFINITY, usize::MAX, usize::MAX), pick);
                (best, (elements.len() * noises.len()) as u64)
            }
        };
        let grid_sup = self.finish(best.0);

        let (mut v, mut w) = (h_grid[best.1].clone(), e_grid[best.2].clone());
        let mut score = best.0;
        if cfg.refine {
            score = self.refine(&mut v, &mut w, score, 1.0 / cfg.grid_points_per_axis as f64);
        }
        let h = self.element(&v);
        let e = self.perturbation(&w);
        let witness = self.witness(&h, &e);
        OracleResult {
            sup: self.finish(score).max(grid_sup),
            grid_sup,
            sign_sweep_sup: self.sign_sweep(&witness),
            evaluations,
            witness,
        }
    }

    /// Pattern search moving simplex mass between pairs of coordinates.
    fn refine(&self, v: &mut [f64], w: &mut [f64], mut score: f64, start: f64) -> f64 {
        let mut step = start;
        let mut rounds = 0;
        let moves_w = matches!(self.noise, Noise::Ball { .. });
        while step >= REFINE_MIN_STEP && rounds < REFINE_MAX_ROUNDS {
            rounds += 1;
            let mut improved = false;
            for on_noise in [false, true] {
                if on_noise && !moves_w {
                    continue;
                }
                let len = if on_noise { w.len() } else { v.len() };
                for from in 0..len {
                    for to in 0..len {
                        if from == to {
                            continue;
                        }
                        let (src, dst) = if on_noise {
                            (w[from], w[to])
                        } else {
                            (v[from], v[to])
                        };
                        let delta = step.min(src);
                        if delta <= 0.0 {
                            continue;
                        }
                        let (a, b) = (src - delta, dst + delta);
                        let candidate = {
                            let mut vv = v.to_vec();
                            let mut ww = w.to_vec();
                            let target = if on_noise { &mut ww } else { &mut vv };
                            target[from] = a;
                            target[to] = b;
                            let s = self.score(&self.element(&vv), &self.perturbation(&ww));
                            (s, vv, ww)
                        };
                        if candidate.0 > score {
                            score = candidate.0;
                            v.copy_from_slice(&candidate.1);
                            w.copy_from_slice(&candidate.2);
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        score
    }

    fn witness(&self, h: &[f64], e: &[f64]) -> Witness {
        // perturbation signs that make every term add to the error
        let perturbation = (0..e.len())
            .map(|k| {
                let s = self.mu[k].signum() * (1.0 - self.mu[k]).signum();
                match self.target {
                    Target::Sequence { .. } => -s * e[k],
                    Target::Pairing { .. } => s * e[k],
                }
            })
            .collect();
        let g = match self.target {
            Target::Sequence { .. } => None,
            Target::Pairing { p } => {
                let q = p / (p - 1.0);
                let c: Vec<f64> = (0..self.dim).map(|k| self.keep[k] * h[k]).collect();
                let norm = root(c.iter().map(|x| pow(*x, p)).sum(), p);
                // equality case of Hoelder: ||g||_q = 1 and <c, g> = ||c||_p
                Some(if norm > 0.0 {
                    c.iter()
                        .map(|x| pow(x / norm, q / (q - 1.0) - 1.0))
                        .collect()
                } else {
                    let mut g = vec![0.0; self.dim];
                    g[0] = 1.0;
                    g
                })
            }
        };
        Witness {
            h: h.to_vec(),
            g,
            perturbation,
        }
    }

    /// Raw error at the witness magnitudes over every sign pattern of the
    /// element and the perturbation.
    fn sign_sweep(&self, wit: &Witness) -> f64 {
        let d = self.dim;
        let n = wit.perturbation.len();
        let mut best = 0.0_f64;
        for mask in 0u32..(1 << (d + n)) {
            let sign = |bit: usize| if mask >> bit & 1 == 1 { -1.0 } else { 1.0 };
            let value = match self.target {
                Target::Sequence { q } => {
                    let total: f64 = (0..d)
                        .map(|k| {
                            let x = sign(k) * weight_at(&self.weight, k) * wit.h[k];
                            let e = if k < n {
                                sign(d + k) * wit.perturbation[k].abs()
                            } else {
                                0.0
                            };
                            pow(((1.0 - self.mu[k]) * x - self.mu[k] * e).abs(), q)
                        })
                        .sum();
                    root(total, q)
                }
                Target::Pairing { .. } => {
                    let g = wit.g.as_deref().unwrap_or(&[]);
                    let signal: f64 = (0..d)
                        .map(|k| {
                            (1.0 - self.mu[k])
                                * weight_at(&self.weight, k)
                                * sign(k)
                                * wit.h[k]
                                * g[k]
                        })
                        .sum();
                    let noise: f64 = (0..n)
                        .map(|k| self.mu[k] * sign(d + k) * wit.perturbation[k].abs())
                        .sum();
                    (signal + noise).abs()
                }
            };
            best = best.max(value);
        }
        best
    }
}

fn noise_for(n: usize, eps: f64, p: f64) -> Noise {
    if p.is_infinite() {
        Noise::Box(vec![eps; n])
    } else {
        Noise::Ball { eps, p }
    }
}

fn weight_at(weight: &[f64], i: usize) -> f64 {
    weight.get(i).copied().unwrap_or(0.0)
}

fn pick(a: (f64, usize, usize), b: (f64, usize, usize)) -> (f64, usize, usize) {
    if a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) <= (b.1, b.2)) {
        a
    } else {
        b
    }
}

fn pow(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        x
    } else if a == 2.0 {
        x * x
    } else if a == 3.0 {
        x * x * x
    } else {
        x.powf(a)
    }
}

fn root(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        x
    } else if a == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / a)
    }
}

/// All points of the simplex in `dim` coordinates with denominator `steps`,
/// in lexicographic order of their numerators.
fn simplex(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    fn fill(
        dim: usize,
        left: usize,
        steps: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.iter().map(|&c| c as f64 / steps as f64).collect());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            fill(dim, left - c, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        out.push(Vec::new());
    } else {
        fill(dim, steps, steps, &mut Vec::with_capacity(dim), &mut out);
    }
    out
}
