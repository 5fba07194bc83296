//! Kinetic energies `T(q, p) = −log π(p | q)`.
//!
//! Every variant is a scalar function of the quadratic form `s = pᵀ Λ(q) p`
//! plus the normalising term `−½ log|Λ(q)|`:
//!
//! | variant               | `τ(s)`                       | `π(p | q)`                 |
//! |-----------------------|------------------------------|----------------------------|
//! | `EuclideanQuadratic`  | `s / 2`, constant `Λ`        | `N(0, Λ⁻¹)`                |
//! | `RiemannianQuadratic` | `s / 2`, `Λ(q)` from a field | `N(0, Λ(q)⁻¹)`             |
//! | `StudentT`            | `(ν+n)/2 · log(1 + s/ν)`     | multivariate t, shape `Λ⁻¹` |
//!
//! All are even in `p`, and the normaliser `∫ exp(−T) dp` does not depend on
//! `q`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::metric::{ConstantMetric, MetricField, MetricPoint};
use crate::model::TargetModel;

pub const DEFAULT_STUDENT_NU: f64 = 5.0;

#[derive(Debug, Clone)]
pub enum KineticModel {
    EuclideanQuadratic(ConstantMetric),
    RiemannianQuadratic(MetricField),
    StudentT { nu: f64, metric: MetricField },
}

impl KineticModel {
    pub fn identity(n: usize) -> Self {
        KineticModel::EuclideanQuadratic(ConstantMetric::identity(n))
    }

    pub fn student_t(nu: f64, metric: MetricField) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Validation(format!("Student-t ν must be positive, got {nu}")));
        }
        Ok(KineticModel::StudentT { nu, metric })
    }

    pub fn dim(&self) -> usize {
        match self {
            KineticModel::EuclideanQuadratic(c) => c.dim(),
            KineticModel::RiemannianQuadratic(f) | KineticModel::StudentT { metric: f, .. } => f.dim(),
        }
    }

    /// True when `T` depends on `q`, which calls for the implicit integrator.
    pub fn is_position_dependent(&self) -> bool {
        match self {
            KineticModel::EuclideanQuadratic(_) => false,
            KineticModel::RiemannianQuadratic(f) | KineticModel::StudentT { metric: f, .. } => {
                f.is_position_dependent()
            }
        }
    }

    /// The same kinetic energy in coordinates `Q = A q`, `P = A⁻ᵀ p`. `model`
    /// must be the target already expressed in the new coordinates.
    pub fn linear_reparam(&self, a: &DMatrix<f64>, model: &TargetModel) -> Result<Self> {
        Ok(match self {
            KineticModel::EuclideanQuadratic(c) => {
                match MetricField::Constant(c.clone()).linear_reparam(a, model)? {
                    MetricField::Constant(c) => KineticModel::EuclideanQuadratic(c),
                    MetricField::GraphInduced(_) => unreachable!("constant stays constant"),
                }
            }
            KineticModel::RiemannianQuadratic(f) => KineticModel::RiemannianQuadratic(f.linear_reparam(a, model)?),
            KineticModel::StudentT { nu, metric } => KineticModel::StudentT {
                nu: *nu,
                metric: metric.linear_reparam(a, model)?,
            },
        })
    }

    /// Inverse metric evaluated at `q`.
    pub fn metric_at(&self, q: &DVector<f64>, with_hessian: bool) -> Result<MetricPoint<'_>> {
        check_dim(self.dim(), q.len())?;
        match self {
            KineticModel::EuclideanQuadratic(c) => Ok(MetricPoint::Constant(c)),
            KineticModel::RiemannianQuadratic(f) | KineticModel::StudentT { metric: f, .. } => {
                f.at(q, with_hessian)
            }
        }
    }

    fn tau(&self, s: f64) -> f64 {
        match self {
            KineticModel::StudentT { nu, .. } => 0.5 * (nu + self.dim() as f64) * (s / nu).ln_1p(),
            _ => 0.5 * s,
        }
    }

    fn tau_prime(&self, s: f64) -> f64 {
        match self {
            KineticModel::StudentT { nu, .. } => 0.5 * (nu + self.dim() as f64) / (nu + s),
            _ => 0.5,
        }
    }

    pub fn eval_at(&self, point: &MetricPoint<'_>, p: &DVector<f64>) -> f64 {
        let s = p.dot(&point.apply(p));
        self.tau(s) - 0.5 * point.logdet_inverse()
    }

    /// `∂T/∂p = 2 τ'(s) Λ p`.
    pub fn grad_p_at(&self, point: &MetricPoint<'_>, p: &DVector<f64>) -> DVector<f64> {
        let lp = point.apply(p);
        let s = p.dot(&lp);
        lp * (2.0 * self.tau_prime(s))
    }

    /// `∂T/∂q_i = τ'(s) pᵀ(∂_iΛ)p − ½ ∂_i log|Λ|`.
    ///
    /// For the graph metric both terms come from the Christoffel symbols:
    /// metric compatibility gives `pᵀ(∂_iΛ̄)p = −2 Σ p_j Γ^j_il (Λ̄p)_l` and
    /// `∂_i log|Σ̄| = 2 Σ_j Γ^j_ji`.
    pub fn grad_q_at(&self, point: &MetricPoint<'_>, p: &DVector<f64>) -> Result<DVector<f64>> {
        match point {
            MetricPoint::Constant(c) => Ok(DVector::zeros(c.dim())),
            MetricPoint::Graph { field, state } => {
                let gamma = state.christoffel()?;
                let lp = state.apply_inverse(field.background(), p);
                let s = p.dot(&lp);
                let mut out = gamma.contract(p, &lp) * (-2.0 * self.tau_prime(s));
                out += gamma.trace();
                Ok(out)
            }
        }
    }

    pub fn kinetic_eval(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), p.len())?;
        Ok(self.eval_at(&self.metric_at(q, false)?, p))
    }

    pub fn kinetic_grad_p(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), p.len())?;
        Ok(self.grad_p_at(&self.metric_at(q, false)?, p))
    }

    pub fn kinetic_grad_q(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), p.len())?;
        let point = self.metric_at(q, self.is_position_dependent())?;
        self.grad_q_at(&point, p)
    }

    /// Exact draw from `π(p | q) ∝ exp(−T(q, p))`.
    pub fn sample_momentum<R: Rng + ?Sized>(&self, q: &DVector<f64>, rng: &mut R) -> Result<DVector<f64>> {
        let point = self.metric_at(q, false)?;
        let mut p = gaussian_momentum(&point, rng)?;
        if let KineticModel::StudentT { nu, .. } = self {
            let chi = ChiSquared::new(*nu)
                .map_err(|e| Error::Validation(format!("invalid ν: {e}")))?;
            let w: f64 = chi.sample(rng);
            p *= (nu / w).sqrt();
        }
        Ok(p)
    }
}

/// `p ~ N(0, Λ⁻¹)`.
fn gaussian_momentum<R: Rng + ?Sized>(point: &MetricPoint<'_>, rng: &mut R) -> Result<DVector<f64>> {
    match point {
        MetricPoint::Constant(c) => {
            let z = standard_normal(c.dim(), rng);
            // Λ = L Lᵀ, so L⁻ᵀ z has covariance Λ⁻¹.
            c.cholesky()
                .l_dirty()
                .tr_solve_lower_triangular(&z)
                .ok_or_else(|| Error::MetricDegenerate("singular Cholesky factor".into()))
        }
        MetricPoint::Graph { field, state } => {
            // Σ̄ = σ + g gᵀ: a draw with covariance σ plus an independent
            // scalar multiple of g.
            let bg = field.background();
            let z = standard_normal(bg.dim(), rng);
            let xi: f64 = rng.sample(StandardNormal);
            let mut p = bg.cholesky().l_dirty().lower_triangle() * z;
            p.axpy(xi, &state.g, 1.0);
            Ok(p)
        }
    }
}

fn standard_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}
