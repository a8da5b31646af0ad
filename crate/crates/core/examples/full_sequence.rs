//! Recovery from the whole sequence perturbed in `l_p`, with infinitely
//! supported power-law and geometric weights.

use optrec::{solve_full, ClassSpec, RecoverySolution, Result, Tail, WeightSequence};

pub fn run_example(weights: WeightSequence, q: f64, p: f64, eps: f64) -> Result<RecoverySolution> {
    solve_full(&ClassSpec::new(weights, q)?, eps, p)
}

fn main() -> Result<()> {
    let cases = [
        ("power 1", WeightSequence::power_law(1.0)?, 2.0, 4.0),
        (
            "power 1, p = inf",
            WeightSequence::power_law(1.0)?,
            2.0,
            f64::INFINITY,
        ),
        (
            "geometric 0.8",
            WeightSequence::geometric(0.8, 1.0)?,
            1.0,
            3.0,
        ),
        (
            "mixed",
            WeightSequence::new(vec![1.0, 1.0, 0.6], Tail::Power { mu: 1.5 })?,
            2.0,
            1.5,
        ),
    ];
    for (name, weights, q, p) in cases {
        println!("{name} (q = {q}, p = {p})");
        for eps in [0.3, 0.03, 0.003] {
            let sol = run_example(weights.clone(), q, p, eps)?;
            println!(
                "  eps {eps:<6} {:?} m = {:<4} error {:.6}",
                sol.regime, sol.m, sol.error
            );
        }
    }
    Ok(())
}
