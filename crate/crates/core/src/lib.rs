//! Generalized Hamiltonian Monte Carlo.
//!
//! The crate is organised around the decomposition `H(q, p) = T(q, p) + V(q)`:
//!
//! - [`model`] holds target distributions as potentials `V = -log π(q)`,
//!   optional inequality constraints `C_k(q) > 0`, and a small catalog of
//!   analytic test targets.
//! - [`kinetic`] implements the admissible kinetic energies: constant and
//!   position-dependent quadratic forms plus a Student-t form, each with exact
//!   conditional momentum sampling.
//! - [`metric`] implements the metric induced on the graph of the potential,
//!   `Σ̄ = σ + ∇V ∇Vᵀ`, with its rank-one inverse, log-determinant and
//!   Christoffel symbols, all in `O(n²)`.
//! - [`integrator`] integrates Hamilton's equations with the explicit or the
//!   generalized (implicit) leapfrog and handles constraint boundaries by
//!   specular reflection under the local inverse metric.
//! - [`sampler`] assembles the Metropolis-corrected transition kernel and runs
//!   chains with moment and ESS diagnostics.
//! - [`verify`] packages the geometric checks (reversibility, volume, energy
//!   order, rank-one inverse, Christoffels, reflection, stationarity) as a
//!   runnable suite.
//!
//! ```
//! use geohmc::metric::{BackgroundMetric, GraphMetric, MetricField};
//! use geohmc::{model, run_chain, ChainConfig, IntegratorConfig, KineticModel};
//!
//! # fn main() -> geohmc::Result<()> {
//! let target = model::banana(1.0, 5.0);
//! let kinetic = KineticModel::RiemannianQuadratic(MetricField::GraphInduced(
//!     GraphMetric::new(BackgroundMetric::identity(2), target.clone())?,
//! ));
//! let cfg = ChainConfig {
//!     seed: 1,
//!     num_samples: 200,
//!     integrator: IntegratorConfig::new(0.05, 20),
//!     jitter_steps: true,
//!     ..ChainConfig::default()
//! };
//! let result = run_chain(&target, &kinetic, &cfg)?;
//! assert!(result.accept_rate > 0.5);
//! # Ok(())
//! # }
//! ```

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod integrator;
pub mod kinetic;
pub mod linalg;
pub mod metric;
pub mod model;
pub mod sampler;
pub mod verify;

pub use error::{DivergenceKind, Error, Result};
pub use integrator::{Hamiltonian, IntegratorConfig, PhaseState, Trajectory};
pub use kinetic::KineticModel;
pub use metric::{BackgroundMetric, ConstantMetric, GraphMetric, MetricField};
pub use model::{builtin_target, ParamValue, Params, TargetModel};
pub use sampler::{run_chain, ChainConfig, ChainResult};

pub use nalgebra::{DMatrix, DVector};
