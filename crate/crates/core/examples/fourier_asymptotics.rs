//! Rate of recovering an element of `W^mu_2` from Fourier coefficients
//! perturbed in `l_p`: the scaled error `eps^{-lambda} E(eps)` against the
//! limit constant.

use optrec::fourier::{
    asymptotic_constants, empirical_limit, intermediate_limits, triangular_method,
};
use optrec::Result;

pub struct Row {
    pub eps: f64,
    pub ratio: f64,
}

pub fn run_example(mu: f64, p: f64) -> Result<(f64, Vec<Row>)> {
    let k = asymptotic_constants(mu, p)?;
    let eps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let ratios = empirical_limit(mu, p, &eps)?;
    Ok((
        k.constant,
        eps.iter()
            .zip(ratios)
            .map(|(&eps, ratio)| Row { eps, ratio })
            .collect(),
    ))
}

fn main() -> Result<()> {
    for (mu, p) in [(0.5, f64::INFINITY), (1.0, 4.0), (2.0, 3.0)] {
        let (constant, rows) = run_example(mu, p)?;
        println!("mu = {mu}, p = {p}: constant {constant:.6}");
        for r in &rows {
            println!(
                "  eps {:>7.0e}  ratio {:.6}  ({:+.2}%)",
                r.eps,
                r.ratio,
                100.0 * (r.ratio / constant - 1.0)
            );
        }
    }

    let k = asymptotic_constants(1.0, 4.0)?;
    println!(
        "n^(mu/lambda) c_n -> {:.6}, eps^-lambda n^-mu -> {:.6}",
        k.breakpoint_limit(),
        k.index_limit()
    );
    for v in intermediate_limits(1.0, 4.0, &[1e-3, 1e-5])? {
        println!(
            "  eps {:>7.0e}  n {:>6}  {:.6} {:.6} {:.6}",
            v.eps, v.n, v.scaled_c_n, v.scaled_c_next, v.scaled_index
        );
    }

    let sol = triangular_method(1.0, 4.0, 0.1)?;
    println!(
        "eps = 0.1: m = {}, lambda = {:.6}, multipliers {:?}",
        sol.m, sol.lambda, sol.coefficients
    );
    Ok(())
}
