//! Gaussian steady states and critical scaling of the two-cavity open
//! Dicke model, with the cavity detuning tunable to place a Liouvillian
//! exceptional point (EP) exactly at the superradiant critical coupling.
//!
//! The crate covers the full pipeline at desk scale (everything is dense
//! 6x6 linear algebra):
//!
//! - [`model`] — validated parameters, mean-field steady states on both
//!   sides of the transition, the critical coupling and EP tuning, and
//!   the linearized drift/diffusion matrices.
//! - [`spectral`] — drift-matrix eigenvalues, the asymptotic decay rate,
//!   a closed-form approximation for the two slow modes near the
//!   EP-tuned critical point, and the Jordan-defect diagnostic.
//! - [`steady`] — steady-state covariances from the Lyapunov equation
//!   with an independent integral-form oracle, number fluctuations,
//!   purity, quadrature moments and the symmetrized noise spectrum.
//! - [`scaling`] — coupling sweeps and critical-exponent extraction by
//!   log-log least squares.
//! - [`cli`] — the `dicke-ep` binary: deterministic CSV/JSON emitters
//!   for all of the above.
//!
//! The `examples/` directory has one runnable program per capability;
//! start with `mean_field` and `critical_exponents`.
//!
//! A minimal end-to-end pass, from parameters to number fluctuations:
//!
//! ```
//! use dicke_ep::model::{
//!     ep_detuning, mean_field_steady_state, Branch, DriftDiffusion, ModelParams,
//! };
//! use dicke_ep::steady::{number_fluctuations, solve_lyapunov};
//!
//! // EP-tuned system slightly below its critical coupling
//! let delta = ep_detuning(1.0, 0.5)?;
//! let base = ModelParams::new(1.0, 1.0, 0.5, delta, 0.0)?;
//! let params = base.with_g(0.95 * base.critical_coupling())?;
//!
//! let state = mean_field_steady_state(&params, Branch::Plus);
//! let system = DriftDiffusion::build(&params, &state)?;
//! let cov = solve_lyapunov(&system.a, &system.d)?;
//!
//! // cavity-1 fluctuations are already two orders of magnitude above vacuum
//! assert!(number_fluctuations(&cov).dn1 > 100.0);
//! # Ok::<(), dicke_ep::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod model;
pub mod scaling;
pub mod spectral;
pub mod steady;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
