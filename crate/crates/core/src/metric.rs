//! Metrics for quadratic kinetic energies.
//!
//! Two fields are provided. [`ConstantMetric`] is a fixed inverse metric `Λ`.
//! [`GraphMetric`] is the metric induced on the graph of the potential by a
//! homogeneous background metric `σ`:
//!
//! ```text
//! Σ̄_ij = σ_ij + ∂_i V̄ ∂_j V̄,          V̄ = V + ½ log|σ|
//! Λ̄    = λ − (λg)(λg)ᵀ / (1 + gᵀλg),   λ = σ⁻¹, g = ∇V̄
//! Γ^i_jk = (λg)_i ∂_j∂_k V / (1 + gᵀλg)
//! ```
//!
//! Everything at a point costs `O(n²)` once `λ`, the gradient and the Hessian
//! are available; nothing here inverts a dense matrix per position.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, cholesky_logdet, spd_cholesky};
use crate::model::TargetModel;

/// A fixed symmetric positive-definite inverse metric `Λ`.
#[derive(Debug, Clone)]
pub struct ConstantMetric {
    lambda: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    logdet: f64,
}

impl ConstantMetric {
    pub fn new(lambda: DMatrix<f64>) -> Result<Self> {
        let chol = spd_cholesky(&lambda, "inverse metric", 1e-12)?;
        let logdet = cholesky_logdet(&chol);
        Ok(Self { lambda, chol, logdet })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn inverse_metric(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    /// `log |Λ|`.
    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    /// Cholesky factor `L` with `Λ = L Lᵀ`.
    pub fn cholesky(&self) -> &Cholesky<f64, Dyn> {
        &self.chol
    }
}

/// A homogeneous background metric `σ` with its inverse `λ`.
#[derive(Debug, Clone)]
pub struct BackgroundMetric {
    sigma: DMatrix<f64>,
    lambda: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    logdet: f64,
}

impl BackgroundMetric {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        let chol = spd_cholesky(&sigma, "background metric", 1e-12)?;
        let logdet = cholesky_logdet(&chol);
        let mut lambda = chol.inverse();
        lambda = (&lambda + lambda.transpose()) * 0.5;
        Ok(Self { sigma, lambda, chol, logdet })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    /// `log |σ|`.
    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    /// Cholesky factor of `σ`.
    pub fn cholesky(&self) -> &Cholesky<f64, Dyn> {
        &self.chol
    }
}

/// The graph-of-the-potential metric for a given target.
#[derive(Debug, Clone)]
pub struct GraphMetric {
    background: BackgroundMetric,
    model: TargetModel,
}

impl GraphMetric {
    /// Requires a model with an analytic Hessian, since the flow needs the
    /// Christoffel symbols.
    pub fn new(background: BackgroundMetric, model: TargetModel) -> Result<Self> {
        check_dim(model.dim(), background.dim())?;
        if !model.has_hessian() {
            return Err(Error::Capability(format!(
                "graph metric needs the Hessian of target `{}`",
                model.name()
            )));
        }
        Ok(Self { background, model })
    }

    pub fn background(&self) -> &BackgroundMetric {
        &self.background
    }

    pub fn model(&self) -> &TargetModel {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.background.dim()
    }

    /// `∂V̄/∂q`. With homogeneous `σ` the log-determinant term is constant, so
    /// this is the potential gradient.
    pub fn vbar_grad(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        let g = self.model.potential_grad(q)?;
        if !all_finite(&g) {
            return Err(Error::Numeric("non-finite potential gradient".into()));
        }
        Ok(g)
    }

    /// Metric quantities at `q`; the Hessian is only evaluated when asked for.
    pub fn state(&self, q: &DVector<f64>, with_hessian: bool) -> Result<GraphMetricState> {
        let g = self.vbar_grad(q)?;
        let hessian = if with_hessian {
            Some(self.model.potential_hessian(q)?)
        } else {
            None
        };
        GraphMetricState::from_gradient(&self.background, g, hessian)
    }

    /// `(Λ̄, log|Σ̄|)` at `q`.
    pub fn metric_inverse(&self, q: &DVector<f64>) -> Result<(DMatrix<f64>, f64)> {
        let st = self.state(q, false)?;
        Ok((st.inverse_metric(&self.background), st.logdet_metric()))
    }

    pub fn christoffel(&self, q: &DVector<f64>) -> Result<Christoffel> {
        self.state(q, true)?.christoffel()
    }
}

/// Per-position cache of the graph metric.
#[derive(Debug, Clone)]
pub struct GraphMetricState {
    /// `∂V̄`.
    pub g: DVector<f64>,
    /// `λ ∂V̄`.
    pub g_up: DVector<f64>,
    /// `1 + gᵀλg`, always ≥ 1.
    pub denom: f64,
    logdet_sigma: f64,
    pub hessian: Option<DMatrix<f64>>,
}

impl GraphMetricState {
    pub fn from_gradient(
        background: &BackgroundMetric,
        g: DVector<f64>,
        hessian: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        check_dim(background.dim(), g.len())?;
        let g_up = background.lambda() * &g;
        let denom = 1.0 + g.dot(&g_up);
        if !denom.is_finite() {
            return Err(Error::Numeric("graph metric denominator overflowed".into()));
        }
        Ok(Self { g, g_up, denom, logdet_sigma: background.logdet(), hessian })
    }

    /// Dense `Λ̄ = λ − u uᵀ / D` in `O(n²)`.
    pub fn inverse_metric(&self, background: &BackgroundMetric) -> DMatrix<f64> {
        let n = self.g.len();
        let lambda = background.lambda();
        let u = &self.g_up;
        let inv_d = 1.0 / self.denom;
        DMatrix::from_fn(n, n, |i, j| lambda[(i, j)] - u[i] * u[j] * inv_d)
    }

    /// `Λ̄ p` without forming `Λ̄`.
    pub fn apply_inverse(&self, background: &BackgroundMetric, p: &DVector<f64>) -> DVector<f64> {
        let a = self.g_up.dot(p);
        let mut out = background.lambda() * p;
        out.axpy(-a / self.denom, &self.g_up, 1.0);
        out
    }

    /// `log |Σ̄| = log|σ| + log(1 + gᵀλg)` by the matrix determinant lemma.
    pub fn logdet_metric(&self) -> f64 {
        self.logdet_sigma + self.denom.ln()
    }

    pub fn christoffel(&self) -> Result<Christoffel> {
        let hessian = self
            .hessian
            .clone()
            .ok_or_else(|| Error::Capability("Christoffel symbols need the Hessian".into()))?;
        Ok(Christoffel { coeff: &self.g_up / self.denom, hessian })
    }
}

/// `Γ^i_jk = c_i H_jk` with `c = λg / D`, stored as the two factors.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub coeff: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.coeff.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeff[i] * self.hessian[(j, k)]
    }

    /// `out[i]` is the matrix `Γ^i_{··}`; `O(n³)` storage, for checking only.
    pub fn to_dense(&self) -> Vec<DMatrix<f64>> {
        self.coeff.iter().map(|&c| &self.hessian * c).collect()
    }

    /// `Σ_j Γ^j_ji`, which equals `½ ∂_i log|Σ̄|`.
    pub fn trace(&self) -> DVector<f64> {
        &self.hessian * &self.coeff
    }

    /// `Σ_{j,l} a_j Γ^j_il b_l`.
    pub fn contract(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        (&self.hessian * b) * self.coeff.dot(a)
    }
}

/// A metric field over positions: constant or graph-induced.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)] // built once per run; boxing buys nothing
pub enum MetricField {
    Constant(ConstantMetric),
    GraphInduced(GraphMetric),
}

impl MetricField {
    pub fn dim(&self) -> usize {
        match self {
            MetricField::Constant(c) => c.dim(),
            MetricField::GraphInduced(g) => g.dim(),
        }
    }

    pub fn is_position_dependent(&self) -> bool {
        matches!(self, MetricField::GraphInduced(_))
    }

    /// `(Λ(q), log|Σ(q)|)`, where `Σ = Λ⁻¹`.
    pub fn metric_inverse(&self, q: &DVector<f64>) -> Result<(DMatrix<f64>, f64)> {
        check_dim(self.dim(), q.len())?;
        match self {
            MetricField::Constant(c) => Ok((c.inverse_metric().clone(), -c.logdet())),
            MetricField::GraphInduced(g) => g.metric_inverse(q),
        }
    }

    /// The field in coordinates `Q = A q`, attached to `model` (which must
    /// already live in the new coordinates). `Λ` is contravariant and becomes
    /// `A Λ Aᵀ`; the background metric is covariant and becomes `A⁻ᵀ σ A⁻¹`.
    pub fn linear_reparam(&self, a: &DMatrix<f64>, model: &TargetModel) -> Result<MetricField> {
        check_dim(self.dim(), a.nrows())?;
        match self {
            MetricField::Constant(c) => Ok(MetricField::Constant(ConstantMetric::new(congruence(
                a,
                c.inverse_metric(),
            ))?)),
            MetricField::GraphInduced(g) => {
                let a_inv = a
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Validation("reparameterisation matrix is singular".into()))?;
                let sigma = congruence(&a_inv.transpose(), g.background().sigma());
                Ok(MetricField::GraphInduced(GraphMetric::new(
                    BackgroundMetric::new(sigma)?,
                    model.clone(),
                )?))
            }
        }
    }

    /// Evaluates the field at `q` for repeated use.
    pub fn at(&self, q: &DVector<f64>, with_hessian: bool) -> Result<MetricPoint<'_>> {
        check_dim(self.dim(), q.len())?;
        match self {
            MetricField::Constant(c) => Ok(MetricPoint::Constant(c)),
            MetricField::GraphInduced(g) => Ok(MetricPoint::Graph {
                field: g,
                state: g.state(q, with_hessian)?,
            }),
        }
    }
}

/// `B M Bᵀ`, symmetrised.
fn congruence(b: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let out = b * m * b.transpose();
    (&out + out.transpose()) * 0.5
}

/// A metric field evaluated at one position.
#[derive(Debug, Clone)]
pub enum MetricPoint<'a> {
    Constant(&'a ConstantMetric),
    Graph { field: &'a GraphMetric, state: GraphMetricState },
}

impl MetricPoint<'_> {
    /// `Λ p`.
    pub fn apply(&self, p: &DVector<f64>) -> DVector<f64> {
        match self {
            MetricPoint::Constant(c) => c.inverse_metric() * p,
            MetricPoint::Graph { field, state } => state.apply_inverse(field.background(), p),
        }
    }

    /// `log |Λ|`.
    pub fn logdet_inverse(&self) -> f64 {
        match self {
            MetricPoint::Constant(c) => c.logdet(),
            MetricPoint::Graph { state, .. } => -state.logdet_metric(),
        }
    }

    pub fn inverse_metric(&self) -> DMatrix<f64> {
        match self {
            MetricPoint::Constant(c) => c.inverse_metric().clone(),
            MetricPoint::Graph { field, state } => state.inverse_metric(field.background()),
        }
    }
}
