//! Recovering `<x, y>` from the products `x_k y_k`, each observed with an
//! error, for `x` and `y` in a pair of weighted classes.

use num_complex::Complex64;
use optrec::scalar::breakpoints_d;
use optrec::{
    sp_apply, sp_solve, PairClassSpec, Result, ScalarInfoModel, ScalarSolution, WeightSequence,
};

pub fn run_example(info: ScalarInfoModel) -> Result<ScalarSolution> {
    let w = WeightSequence::finite(vec![1.0, 0.5, 0.25])?;
    sp_solve(&PairClassSpec::new(w.clone(), w, 2.0)?, &info)
}

fn main() -> Result<()> {
    let w = WeightSequence::finite(vec![1.0, 0.5, 0.25])?;
    let pc = PairClassSpec::new(w.clone(), w, 2.0)?;
    println!("d_m for r = 2: {:?}", breakpoints_d(&pc, 2.0, 2)?);
    let infos = [
        ScalarInfoModel::Coordinatewise {
            eps: vec![0.1, 0.1],
        },
        ScalarInfoModel::ProductBall {
            n: 2,
            eps: 0.5,
            r: 1.0,
        },
        ScalarInfoModel::ProductBall {
            n: 2,
            eps: 0.2,
            r: 2.0,
        },
    ];
    for info in infos {
        let sol = run_example(info.clone())?;
        println!(
            "{info:?}: error {:.8}, multipliers {:?}",
            sol.error, sol.coefficients
        );
    }

    let sol = run_example(ScalarInfoModel::Coordinatewise {
        eps: vec![0.1, 0.1],
    })?;
    let a = [Complex64::new(0.8, 0.1), Complex64::new(0.3, -0.2)];
    let b = [Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.4)];
    println!("estimate of <x, y>: {}", sp_apply(&sol, &a, &b)?);
    Ok(())
}
