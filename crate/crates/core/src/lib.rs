//! Optimal recovery of diagonal weighted classes in `l_q` and of scalar
//! products on paired classes, from observations perturbed in `l_p`.
//!
//! The [`recovery`] solvers return the optimal error together with an
//! optimal linear method, [`scalar`] does the same for the scalar product
//! `<x, y>`, and [`certify`] builds lower-bound witnesses and checks them
//! against a brute-force oracle. [`fourier`] evaluates the asymptotics of
//! recovering a derivative from a noisy Fourier series.

pub mod certify;
pub mod cli;
pub mod error;
pub mod fourier;
mod interp;
pub mod recovery;
pub mod scalar;
mod serde_ext;
pub mod weights;

pub use certify::{build_certificate, verify, Certificate, OracleConfig, Problem, VerifyReport};
pub use error::{Error, Result};
pub use fourier::{asymptotic_constants, empirical_limit, triangular_method, AsymptoticConstants};
pub use interp::Blend;
pub use recovery::{apply_method, solve, solve_full, InfoModel, RecoverySolution, Regime};
pub use scalar::{sp_apply, sp_solve, PairClassSpec, ScalarInfoModel, ScalarSolution};
pub use weights::{ClassSpec, Tail, WeightSequence};
