//! Recovery from coordinates observed with individual error bounds
//! `|y_k - x_k| <= eps_k`. The optimal method keeps a prefix of the
//! coordinates and shrinks each by `1 - t_{m+1}^q / t_k^q`.

use optrec::{apply_method, solve, ClassSpec, InfoModel, RecoverySolution, Result, WeightSequence};

pub fn run_example(eps: Vec<f64>) -> Result<RecoverySolution> {
    let class = ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25])?, 1.0)?;
    solve(&class, &InfoModel::Coordinatewise { eps })
}

fn main() -> Result<()> {
    for eps in [vec![0.1, 0.1], vec![0.1, 0.6], vec![1.5, 0.1]] {
        let sol = run_example(eps.clone())?;
        println!(
            "eps {eps:?}: {:?}, m = {}, error = {}, multipliers {:?}",
            sol.regime, sol.m, sol.error, sol.coefficients
        );
    }
    let sol = run_example(vec![0.1, 0.1])?;
    println!(
        "estimate from y = (0.9, 0.4): {:?}",
        apply_method(&sol, &[0.9, 0.4])?
    );
    Ok(())
}
