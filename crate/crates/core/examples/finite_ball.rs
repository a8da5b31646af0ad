//! Recovery from the first `n` coordinates perturbed in an `l_p` ball, for
//! `p <= q` (truncation or identity) and `p > q` (breakpoint search and
//! interpolated multipliers).

use optrec::recovery::breakpoints_c;
use optrec::{solve, ClassSpec, InfoModel, Result, WeightSequence};

/// `(eps, error, m, lambda)` rows for one exponent pair.
pub fn run_example(q: f64, p: f64, eps: &[f64]) -> Result<Vec<(f64, f64, usize, f64)>> {
    let class = ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25])?, q)?;
    eps.iter()
        .map(|&eps| {
            let sol = solve(&class, &InfoModel::FiniteBall { n: 2, eps, p })?;
            Ok((eps, sol.error, sol.m, sol.lambda))
        })
        .collect()
}

fn main() -> Result<()> {
    let class = ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25])?, 1.0)?;
    println!("c_m for q = 1, p = 2: {:?}", breakpoints_c(&class, 2.0, 2)?);
    for (q, p) in [(2.0, 1.0), (1.0, 2.0), (1.0, f64::INFINITY)] {
        println!("q = {q}, p = {p}");
        for (eps, error, m, lambda) in run_example(q, p, &[0.05, 0.2, 0.5, 0.9, 1.2])? {
            println!("  eps {eps:<5} error {error:.7}  m {m}  lambda {lambda:.4}");
        }
    }
    Ok(())
}
