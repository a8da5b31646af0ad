//! Lower-bound certificates and the brute-force oracle: the certificate
//! matches the analytic error from below, the oracle bounds the worst case
//! of the optimal method from above, and a perturbed method is flagged.

use optrec::certify::{brute_force_worst_case, grid_slack};
use optrec::{
    build_certificate, verify, ClassSpec, InfoModel, OracleConfig, Problem, Result, WeightSequence,
};

pub fn problem(eps: f64, p: f64) -> Result<Problem> {
    Ok(Problem::Recovery {
        class: ClassSpec::new(WeightSequence::finite(vec![1.0, 0.5, 0.25])?, 1.0)?,
        info: InfoModel::FiniteBall { n: 2, eps, p },
    })
}

/// `(analytic, certificate bound, oracle sup, perturbed oracle sup)`.
pub fn run_example(eps: f64, p: f64) -> Result<(f64, f64, f64, f64)> {
    let problem = problem(eps, p)?;
    let cfg = OracleConfig::default();
    let cert = build_certificate(&problem)?;
    let report = verify(&problem, &cfg)?;
    let worse: Vec<f64> = problem.optimal_method()?.iter().map(|c| c + 0.05).collect();
    let perturbed = brute_force_worst_case(&problem, &worse, &cfg)?;
    Ok((
        report.analytic_error,
        cert.lower_bound,
        report.oracle_sup,
        perturbed.sup,
    ))
}

fn main() -> Result<()> {
    for (eps, p) in [(0.2, 2.0), (0.1, 1.0), (0.3, f64::INFINITY)] {
        let (analytic, bound, sup, perturbed) = run_example(eps, p)?;
        let slack = grid_slack(&problem(eps, p)?, &OracleConfig::default());
        println!("eps = {eps}, p = {p}");
        println!("  analytic   {analytic:.12}");
        println!("  certificate {bound:.12}");
        println!("  oracle     {sup:.12}  (slack {slack:.1e})");
        println!("  +0.05      {perturbed:.12}");
    }
    Ok(())
}
