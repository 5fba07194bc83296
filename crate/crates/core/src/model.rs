//! Target distributions expressed as potentials `V(q) = -log π(q) + const`.
//!
//! A [`TargetModel`] bundles a [`Potential`] with optional strict inequality
//! constraints `C_k(q) > 0`. Outside the feasible region the potential is the
//! `+∞` sentinel, while gradients there are an error: the integrator is
//! expected to reflect off the boundary instead of ever asking for one.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{asymmetry, spd_cholesky};

/// A smooth potential with an analytic gradient and, optionally, a Hessian.
pub trait Potential: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, q: &DVector<f64>) -> f64;
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64>;
    /// `None` when the potential has no analytic Hessian.
    fn hessian(&self, _q: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }
    fn has_hessian(&self) -> bool {
        false
    }
}

/// A smooth scalar `C(q)` whose strict positivity defines the feasible set.
pub trait Constraint: Send + Sync + fmt::Debug {
    fn value(&self, q: &DVector<f64>) -> f64;
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64>;
}

/// `C(q) = a·q + b`.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl LinearConstraint {
    pub fn new(normal: DVector<f64>, offset: f64) -> Result<Self> {
        if normal.iter().any(|x| !x.is_finite()) || !offset.is_finite() {
            return Err(Error::Validation("constraint coefficients must be finite".into()));
        }
        if normal.norm() == 0.0 {
            return Err(Error::Validation("constraint normal must be non-zero".into()));
        }
        Ok(Self { normal, offset })
    }
}

impl Constraint for LinearConstraint {
    fn value(&self, q: &DVector<f64>) -> f64 {
        self.normal.dot(q) + self.offset
    }

    fn gradient(&self, _q: &DVector<f64>) -> DVector<f64> {
        self.normal.clone()
    }
}

/// Exact first and second moments of a target.
#[derive(Debug, Clone)]
pub struct Moments {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

#[derive(Clone)]
pub struct TargetModel {
    name: String,
    potential: Arc<dyn Potential>,
    constraints: Vec<Arc<dyn Constraint>>,
    moments: Option<Moments>,
    initial: Option<DVector<f64>>,
}

impl fmt::Debug for TargetModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetModel")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("constraints", &self.constraints.len())
            .field("moments", &self.moments.is_some())
            .finish()
    }
}

/// Default central-difference step for coordinate `x`.
pub fn fd_step(base: f64, x: f64) -> f64 {
    base * (1.0 + x.abs())
}

impl TargetModel {
    pub fn new(name: impl Into<String>, potential: Arc<dyn Potential>) -> Self {
        Self {
            name: name.into(),
            potential,
            constraints: Vec::new(),
            moments: None,
            initial: None,
        }
    }

    pub fn with_constraint(mut self, c: Arc<dyn Constraint>) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_moments(mut self, moments: Moments) -> Self {
        self.moments = Some(moments);
        self
    }

    pub fn with_initial(mut self, q: DVector<f64>) -> Self {
        self.initial = Some(q);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    pub fn moments(&self) -> Option<&Moments> {
        self.moments.as_ref()
    }

    pub fn constraints(&self) -> &[Arc<dyn Constraint>] {
        &self.constraints
    }

    pub fn has_hessian(&self) -> bool {
        self.potential.has_hessian()
    }

    pub fn is_constrained(&self) -> bool {
        !self.constraints.is_empty()
    }

    /// Index and value of the first constraint with `C_k(q) ≤ 0`.
    pub fn first_violation(&self, q: &DVector<f64>) -> Option<(usize, f64)> {
        self.constraints
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.value(q)))
            .find(|&(_, v)| !(v > 0.0))
    }

    pub fn is_feasible(&self, q: &DVector<f64>) -> bool {
        q.iter().all(|x| x.is_finite()) && self.first_violation(q).is_none()
    }

    /// `V(q)`, or `+∞` when any constraint is violated.
    pub fn potential_eval(&self, q: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), q.len())?;
        if self.first_violation(q).is_some() {
            return Ok(f64::INFINITY);
        }
        Ok(self.potential.value(q))
    }

    pub fn potential_grad(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), q.len())?;
        if let Some((index, value)) = self.first_violation(q) {
            return Err(Error::ConstraintViolation { index, value });
        }
        Ok(self.potential.gradient(q))
    }

    pub fn potential_hessian(&self, q: &DVector<f64>) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), q.len())?;
        if let Some((index, value)) = self.first_violation(q) {
            return Err(Error::ConstraintViolation { index, value });
        }
        self.potential
            .hessian(q)
            .ok_or_else(|| Error::Capability(format!("target `{}` has no Hessian", self.name)))
    }

    /// Maximum over coordinates of `|g_i − fd_i| / max(|g_i|, |fd_i|, 1)`,
    /// comparing the analytic gradient with central differences of step
    /// `h·(1+|q_i|)`.
    pub fn grad_check(&self, q: &DVector<f64>, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::Usage("finite-difference step must be positive".into()));
        }
        let grad = self.potential_grad(q)?;
        let mut worst = 0.0_f64;
        let mut probe = q.clone();
        for i in 0..q.len() {
            let step = fd_step(h, q[i]);
            probe[i] = q[i] + step;
            let up = self.potential_eval(&probe)?;
            probe[i] = q[i] - step;
            let down = self.potential_eval(&probe)?;
            probe[i] = q[i];
            let fd = (up - down) / (2.0 * step);
            let scale = grad[i].abs().max(fd.abs()).max(1.0);
            worst = worst.max((grad[i] - fd).abs() / scale);
        }
        Ok(worst)
    }

    /// A strictly feasible starting point: the stored one, else the origin
    /// pushed inside each violated linear constraint.
    pub fn initial_point(&self) -> Result<DVector<f64>> {
        if let Some(q) = &self.initial {
            if self.is_feasible(q) {
                return Ok(q.clone());
            }
            return Err(Error::Usage("initial point is infeasible".into()));
        }
        let mut q = DVector::zeros(self.dim());
        for _ in 0..16 {
            let Some((k, value)) = self.first_violation(&q) else {
                return Ok(q);
            };
            let c = &self.constraints[k];
            let grad = c.gradient(&q);
            let norm2 = grad.norm_squared();
            if norm2 == 0.0 || !value.is_finite() {
                break;
            }
            // Newton step onto C = 0.5, exact for linear constraints.
            q += grad * ((0.5 - value) / norm2);
        }
        if self.is_feasible(&q) {
            Ok(q)
        } else {
            Err(Error::Usage(format!(
                "no feasible initial point found for target `{}`",
                self.name
            )))
        }
    }

    /// Adds a constant to the potential. Used to check that only energy
    /// differences matter.
    pub fn shifted(&self, shift: f64) -> TargetModel {
        let mut out = self.clone();
        out.potential = Arc::new(Shifted { inner: self.potential.clone(), shift });
        out
    }

    /// The same distribution in coordinates `Q = A q`.
    ///
    /// The potential is a density of weight +1 and picks up `+log|det A|`;
    /// constraints are scalars and are simply composed with `A⁻¹`.
    pub fn linear_reparam(&self, a: &DMatrix<f64>) -> Result<TargetModel> {
        check_dim(self.dim(), a.nrows())?;
        let lu = a.clone().lu();
        let a_inv = lu
            .try_inverse()
            .ok_or_else(|| Error::Validation("reparameterisation matrix is singular".into()))?;
        let log_det = a.determinant().abs().ln();
        let map = Arc::new(LinearMap { a_inv });
        let mut out = TargetModel::new(
            format!("{}@reparam", self.name),
            Arc::new(Reparameterized { inner: self.potential.clone(), map: map.clone(), log_det }),
        );
        out.constraints = self
            .constraints
            .iter()
            .map(|c| -> Arc<dyn Constraint> {
                Arc::new(ReparamConstraint { inner: c.clone(), map: map.clone() })
            })
            .collect();
        out.initial = self.initial.as_ref().map(|q| a * q);
        out.moments = self.moments.as_ref().map(|m| Moments {
            mean: a * &m.mean,
            covariance: a * &m.covariance * a.transpose(),
        });
        Ok(out)
    }
}

#[derive(Debug)]
struct Shifted {
    inner: Arc<dyn Potential>,
    shift: f64,
}

impl Potential for Shifted {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, q: &DVector<f64>) -> f64 {
        self.inner.value(q) + self.shift
    }
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.inner.gradient(q)
    }
    fn hessian(&self, q: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.inner.hessian(q)
    }
    fn has_hessian(&self) -> bool {
        self.inner.has_hessian()
    }
}

#[derive(Debug)]
struct LinearMap {
    a_inv: DMatrix<f64>,
}

#[derive(Debug)]
struct Reparameterized {
    inner: Arc<dyn Potential>,
    map: Arc<LinearMap>,
    log_det: f64,
}

impl Potential for Reparameterized {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, q: &DVector<f64>) -> f64 {
        self.inner.value(&(&self.map.a_inv * q)) + self.log_det
    }
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.map.a_inv.tr_mul(&self.inner.gradient(&(&self.map.a_inv * q)))
    }
    fn hessian(&self, q: &DVector<f64>) -> Option<DMatrix<f64>> {
        let h = self.inner.hessian(&(&self.map.a_inv * q))?;
        Some(self.map.a_inv.transpose() * h * &self.map.a_inv)
    }
    fn has_hessian(&self) -> bool {
        self.inner.has_hessian()
    }
}

#[derive(Debug)]
struct ReparamConstraint {
    inner: Arc<dyn Constraint>,
    map: Arc<LinearMap>,
}

impl Constraint for ReparamConstraint {
    fn value(&self, q: &DVector<f64>) -> f64 {
        self.inner.value(&(&self.map.a_inv * q))
    }
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        self.map.a_inv.tr_mul(&self.inner.gradient(&(&self.map.a_inv * q)))
    }
}

// ---------------------------------------------------------------------------
// Built-in potentials

/// `V = ½ (q−μ)ᵀ P (q−μ)` with precision `P`.
#[derive(Debug, Clone)]
pub struct Gaussian {
    mean: DVector<f64>,
    precision: DMatrix<f64>,
}

impl Gaussian {
    pub fn standard(n: usize) -> Self {
        Self { mean: DVector::zeros(n), precision: DMatrix::identity(n, n) }
    }

    pub fn from_covariance(mean: DVector<f64>, covariance: &DMatrix<f64>) -> Result<Self> {
        check_dim(mean.len(), covariance.nrows())?;
        let chol = spd_cholesky(covariance, "covariance", 1e-12)?;
        let mut precision = chol.inverse();
        // symmetrise round-off so the Hessian is exactly symmetric
        precision = (&precision + precision.transpose()) * 0.5;
        Ok(Self { mean, precision })
    }
}

impl Potential for Gaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }
    fn value(&self, q: &DVector<f64>) -> f64 {
        let d = q - &self.mean;
        0.5 * d.dot(&(&self.precision * &d))
    }
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        &self.precision * (q - &self.mean)
    }
    fn hessian(&self, _q: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(self.precision.clone())
    }
    fn has_hessian(&self) -> bool {
        true
    }
}

/// `V = (a − q₁)² + b (q₂ − q₁²)²`.
#[derive(Debug, Clone, Copy)]
pub struct Banana {
    pub a: f64,
    pub b: f64,
}

impl Potential for Banana {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, q: &DVector<f64>) -> f64 {
        let r = q[1] - q[0] * q[0];
        (self.a - q[0]).powi(2) + self.b * r * r
    }
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        let r = q[1] - q[0] * q[0];
        DVector::from_vec(vec![
            -2.0 * (self.a - q[0]) - 4.0 * self.b * q[0] * r,
            2.0 * self.b * r,
        ])
    }
    fn hessian(&self, q: &DVector<f64>) -> Option<DMatrix<f64>> {
        let r = q[1] - q[0] * q[0];
        let off = -4.0 * self.b * q[0];
        Some(DMatrix::from_row_slice(
            2,
            2,
            &[2.0 - 4.0 * self.b * r + 8.0 * self.b * q[0] * q[0], off, off, 2.0 * self.b],
        ))
    }
    fn has_hessian(&self) -> bool {
        true
    }
}

impl Banana {
    /// Under `exp(−V)`, `q₁ ~ N(a, ½)` and `q₂ | q₁ ~ N(q₁², 1/(2b))`.
    pub fn moments(&self) -> Moments {
        let a = self.a;
        let var1 = 0.5;
        let mean = DVector::from_vec(vec![a, a * a + var1]);
        // Var(q₁²) for q₁ ~ N(a, s²) is 4a²s² + 2s⁴.
        let var2 = 4.0 * a * a * var1 + 2.0 * var1 * var1 + 0.5 / self.b;
        let cov12 = 2.0 * a * var1;
        Moments {
            mean,
            covariance: DMatrix::from_row_slice(2, 2, &[var1, cov12, cov12, var2]),
        }
    }
}

/// Neal's funnel: `v ~ N(0, s²)`, `x_i | v ~ N(0, e^v)`, with `q = (v, x…)`.
#[derive(Debug, Clone, Copy)]
pub struct Funnel {
    pub n: usize,
    pub scale: f64,
}

impl Potential for Funnel {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, q: &DVector<f64>) -> f64 {
        let v = q[0];
        let k = (self.n - 1) as f64;
        let ss: f64 = q.iter().skip(1).map(|x| x * x).sum();
        v * v / (2.0 * self.scale * self.scale) + 0.5 * ss * (-v).exp() + 0.5 * k * v
    }
    fn gradient(&self, q: &DVector<f64>) -> DVector<f64> {
        let v = q[0];
        let e = (-v).exp();
        let k = (self.n - 1) as f64;
        let ss: f64 = q.iter().skip(1).map(|x| x * x).sum();
        let mut g = DVector::zeros(self.n);
        g[0] = v / (self.scale * self.scale) - 0.5 * ss * e + 0.5 * k;
        for i in 1..self.n {
            g[i] = q[i] * e;
        }
        g
    }
    fn hessian(&self, q: &DVector<f64>) -> Option<DMatrix<f64>> {
        let v = q[0];
        let e = (-v).exp();
        let ss: f64 = q.iter().skip(1).map(|x| x * x).sum();
        let mut h = DMatrix::zeros(self.n, self.n);
        h[(0, 0)] = 1.0 / (self.scale * self.scale) + 0.5 * ss * e;
        for i in 1..self.n {
            h[(0, i)] = -q[i] * e;
            h[(i, 0)] = -q[i] * e;
            h[(i, i)] = e;
        }
        Some(h)
    }
    fn has_hessian(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Catalog

/// A catalog parameter value: dimension counts and scalars are `Scalar`,
/// mean vectors are `Vector`, covariance and constraint tables are `Matrix`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

pub type Params = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Integer,
    Real,
    Vector,
    Matrix,
}

impl ParamKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamKind::Integer => "integer",
            ParamKind::Real => "real",
            ParamKind::Vector => "vector",
            ParamKind::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: ParamKind,
    /// Rendered default, `None` when the key is required.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub dims: &'static str,
    pub params: &'static [ParamSpec],
    pub analytic_moments: &'static str,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "banana",
        summary: "V = (a - q1)^2 + b (q2 - q1^2)^2",
        dims: "n = 2",
        params: &[
            ParamSpec { key: "a", kind: ParamKind::Real, default: Some("1"), help: "location of the ridge" },
            ParamSpec { key: "b", kind: ParamKind::Real, default: Some("100"), help: "ridge stiffness, > 0" },
        ],
        analytic_moments: "yes",
    },
    CatalogEntry {
        name: "funnel",
        summary: "v ~ N(0, scale^2), x_i | v ~ N(0, exp(v)); q = (v, x_1..x_{n-1})",
        dims: "n >= 2",
        params: &[
            ParamSpec { key: "n", kind: ParamKind::Integer, default: Some("2"), help: "dimension" },
            ParamSpec { key: "scale", kind: ParamKind::Real, default: Some("3"), help: "standard deviation of v, > 0" },
        ],
        analytic_moments: "yes",
    },
    CatalogEntry {
        name: "halfspace_gaussian",
        summary: "standard Gaussian restricted to {a_k . q + b_k > 0}",
        dims: "n >= 1",
        params: &[
            ParamSpec { key: "n", kind: ParamKind::Integer, default: Some("1"), help: "dimension" },
            ParamSpec {
                key: "constraints",
                kind: ParamKind::Matrix,
                default: Some("[[1, 0, ..., 0, 0]] (q1 > 0)"),
                help: "one row per constraint: n normal coefficients then the offset b",
            },
        ],
        analytic_moments: "single constraint only",
    },
    CatalogEntry {
        name: "mvn",
        summary: "multivariate normal N(mean, covariance)",
        dims: "n >= 1",
        params: &[
            ParamSpec { key: "n", kind: ParamKind::Integer, default: Some("len(mean)"), help: "dimension" },
            ParamSpec { key: "mean", kind: ParamKind::Vector, default: Some("zeros"), help: "mean vector" },
            ParamSpec { key: "covariance", kind: ParamKind::Matrix, default: None, help: "symmetric positive-definite covariance" },
        ],
        analytic_moments: "yes",
    },
    CatalogEntry {
        name: "std_gaussian",
        summary: "standard normal N(0, I)",
        dims: "n >= 1",
        params: &[ParamSpec { key: "n", kind: ParamKind::Integer, default: Some("1"), help: "dimension" }],
        analytic_moments: "yes",
    },
];

/// Catalog entries, sorted by name.
pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

struct ParamReader<'a> {
    target: &'static str,
    params: &'a Params,
}

impl<'a> ParamReader<'a> {
    fn new(entry: &CatalogEntry, params: &'a Params) -> Result<Self> {
        for key in params.keys() {
            if !entry.params.iter().any(|p| p.key == key) {
                return Err(Error::Usage(format!(
                    "unknown parameter `{key}` for target `{}`",
                    entry.name
                )));
            }
        }
        Ok(Self { target: entry.name, params })
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(ParamValue::Scalar(x)) if x.is_finite() => Ok(Some(*x)),
            Some(_) => Err(self.bad(key, "a finite real")),
        }
    }

    fn dim(&self, key: &str) -> Result<Option<usize>> {
        match self.real(key)? {
            None => Ok(None),
            Some(x) if x >= 1.0 && x.fract() == 0.0 && x <= 1e6 => Ok(Some(x as usize)),
            Some(_) => Err(self.bad(key, "a positive integer")),
        }
    }

    fn vector(&self, key: &str) -> Result<Option<DVector<f64>>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(ParamValue::Vector(v)) => Ok(Some(DVector::from_vec(v.clone()))),
            Some(ParamValue::Scalar(x)) => Ok(Some(DVector::from_vec(vec![*x]))),
            Some(_) => Err(self.bad(key, "a vector")),
        }
    }

    fn matrix(&self, key: &str) -> Result<Option<DMatrix<f64>>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(ParamValue::Matrix(rows)) => {
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
                    return Err(self.bad(key, "a non-empty rectangular matrix"));
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Ok(Some(DMatrix::from_row_slice(rows.len(), ncols, &flat)))
            }
            Some(ParamValue::Scalar(x)) => Ok(Some(DMatrix::from_element(1, 1, *x))),
            Some(_) => Err(self.bad(key, "a matrix")),
        }
    }

    fn bad(&self, key: &str, what: &str) -> Error {
        Error::Usage(format!("parameter `{key}` of target `{}` must be {what}", self.target))
    }
}

/// Builds a catalog target by name. Unknown names and unknown parameter keys
/// are usage errors; malformed covariances are validation errors.
pub fn builtin_target(name: &str, params: &Params) -> Result<TargetModel> {
    let entry = CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Usage(format!("unknown target `{name}`")))?;
    let r = ParamReader::new(entry, params)?;
    match name {
        "std_gaussian" => {
            let n = r.dim("n")?.unwrap_or(1);
            Ok(std_gaussian(n))
        }
        "mvn" => {
            let cov = r
                .matrix("covariance")?
                .ok_or_else(|| Error::Usage("target `mvn` requires `covariance`".into()))?;
            let n = cov.nrows();
            if let Some(dim) = r.dim("n")? {
                check_dim(dim, n)?;
            }
            let mean = r.vector("mean")?.unwrap_or_else(|| DVector::zeros(n));
            mvn(mean, cov)
        }
        "banana" => {
            let a = r.real("a")?.unwrap_or(1.0);
            let b = r.real("b")?.unwrap_or(100.0);
            if !(b > 0.0) {
                return Err(Error::Validation("banana `b` must be positive".into()));
            }
            Ok(banana(a, b))
        }
        "funnel" => {
            let n = r.dim("n")?.unwrap_or(2);
            let scale = r.real("scale")?.unwrap_or(3.0);
            if n < 2 {
                return Err(Error::Validation("funnel needs n >= 2".into()));
            }
            if !(scale > 0.0) {
                return Err(Error::Validation("funnel `scale` must be positive".into()));
            }
            Ok(funnel(n, scale))
        }
        "halfspace_gaussian" => {
            let table = r.matrix("constraints")?;
            let n = match (r.dim("n")?, &table) {
                (Some(n), _) => n,
                (None, Some(t)) => t.ncols().saturating_sub(1).max(1),
                (None, None) => 1,
            };
            let rows = match table {
                Some(t) => {
                    if t.ncols() != n + 1 {
                        return Err(Error::Usage(format!(
                            "each constraint row needs {} entries (n coefficients and an offset), got {}",
                            n + 1,
                            t.ncols()
                        )));
                    }
                    (0..t.nrows())
                        .map(|i| {
                            let row = t.row(i);
                            LinearConstraint::new(
                                DVector::from_iterator(n, row.iter().take(n).copied()),
                                row[n],
                            )
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                None => {
                    let mut normal = DVector::zeros(n);
                    normal[0] = 1.0;
                    vec![LinearConstraint::new(normal, 0.0)?]
                }
            };
            halfspace_gaussian(n, rows)
        }
        _ => unreachable!("catalog entry without constructor"),
    }
}

pub fn std_gaussian(n: usize) -> TargetModel {
    TargetModel::new("std_gaussian", Arc::new(Gaussian::standard(n))).with_moments(Moments {
        mean: DVector::zeros(n),
        covariance: DMatrix::identity(n, n),
    })
}

pub fn mvn(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<TargetModel> {
    let g = Gaussian::from_covariance(mean.clone(), &covariance)?;
    let init = mean.clone();
    Ok(TargetModel::new("mvn", Arc::new(g))
        .with_moments(Moments { mean, covariance })
        .with_initial(init))
}

pub fn banana(a: f64, b: f64) -> TargetModel {
    let ban = Banana { a, b };
    TargetModel::new("banana", Arc::new(ban))
        .with_moments(ban.moments())
        .with_initial(DVector::from_vec(vec![a, a * a]))
}

pub fn funnel(n: usize, scale: f64) -> TargetModel {
    let mut cov = DMatrix::identity(n, n) * (0.5 * scale * scale).exp();
    cov[(0, 0)] = scale * scale;
    TargetModel::new("funnel", Arc::new(Funnel { n, scale }))
        .with_moments(Moments { mean: DVector::zeros(n), covariance: cov })
}

/// Standard Gaussian truncated to the intersection of half-spaces. Moments
/// are attached when there is exactly one constraint.
pub fn halfspace_gaussian(n: usize, constraints: Vec<LinearConstraint>) -> Result<TargetModel> {
    let mut model = TargetModel::new("halfspace_gaussian", Arc::new(Gaussian::standard(n)));
    for c in &constraints {
        check_dim(n, c.normal.len())?;
    }
    if let [c] = constraints.as_slice() {
        model = model.with_moments(truncated_moments(c));
    }
    for c in constraints {
        model = model.with_constraint(Arc::new(c));
    }
    Ok(model)
}

/// Moments of `N(0, I)` restricted to `a·q + b > 0`. Along the unit normal
/// the law is a standard normal truncated below at `−b/|a|`.
fn truncated_moments(c: &LinearConstraint) -> Moments {
    let n = c.normal.len();
    let norm = c.normal.norm();
    let unit = &c.normal / norm;
    let cut = -c.offset / norm;
    let std = Normal::standard();
    let tail = std.sf(cut);
    let m = std.pdf(cut) / tail;
    let var = 1.0 + cut * m - m * m;
    Moments {
        mean: &unit * m,
        covariance: DMatrix::identity(n, n) + &unit * unit.transpose() * (var - 1.0),
    }
}

/// Largest Hessian asymmetry, `None` without a Hessian.
pub fn hessian_asymmetry(model: &TargetModel, q: &DVector<f64>) -> Option<f64> {
    model.potential_hessian(q).ok().map(|h| asymmetry(&h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_vec(xs.to_vec())
    }

    fn scalar(x: f64) -> ParamValue {
        ParamValue::Scalar(x)
    }

    #[test]
    fn gaussian_potential_values() {
        let m = std_gaussian(1);
        assert_eq!(m.potential_eval(&v(&[0.0])).unwrap(), 0.0);
        assert_eq!(m.potential_eval(&v(&[2.0])).unwrap(), 2.0);
    }

    #[test]
    fn halfspace_is_infinite_outside() {
        let m = builtin_target("halfspace_gaussian", &Params::new()).unwrap();
        assert_eq!(m.potential_eval(&v(&[-0.5])).unwrap(), f64::INFINITY);
        assert_eq!(m.potential_eval(&v(&[0.0])).unwrap(), f64::INFINITY);
        assert!(m.potential_eval(&v(&[1e-12])).unwrap().is_finite());
        assert!(matches!(
            m.potential_grad(&v(&[-0.5])),
            Err(Error::ConstraintViolation { index: 0, .. })
        ));
    }

    #[test]
    fn gradients_at_reference_points() {
        let g = std_gaussian(2).potential_grad(&v(&[1.0, -1.0])).unwrap();
        assert_eq!(g, v(&[1.0, -1.0]));
        let b = banana(1.0, 100.0);
        assert_eq!(b.potential_grad(&v(&[1.0, 1.0])).unwrap(), v(&[0.0, 0.0]));
        // hand derivative: ∂₁ = −2(a−q₁) − 4b q₁ r, ∂₂ = 2b r with r = q₂ − q₁² = 1
        assert_eq!(b.potential_grad(&v(&[0.0, 1.0])).unwrap(), v(&[-2.0, 200.0]));
        assert!(b.grad_check(&v(&[0.0, 1.0]), 1e-6).unwrap() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let m = std_gaussian(2);
        assert!(matches!(
            m.potential_eval(&v(&[1.0])),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn catalog_is_sorted_and_constructible() {
        let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names, ["banana", "funnel", "halfspace_gaussian", "mvn", "std_gaussian"]);
        for e in catalog() {
            let mut p = Params::new();
            if e.name == "mvn" {
                p.insert("covariance".into(), ParamValue::Matrix(vec![vec![2.0]]));
            }
            let m = builtin_target(e.name, &p).unwrap();
            let q0 = m.initial_point().unwrap();
            assert!(m.is_feasible(&q0));
        }
    }

    #[test]
    fn std_gaussian_moments() {
        let mut p = Params::new();
        p.insert("n".into(), scalar(3.0));
        let m = builtin_target("std_gaussian", &p).unwrap();
        let mo = m.moments().unwrap();
        assert_eq!(mo.mean, DVector::zeros(3));
        assert_eq!(mo.covariance, DMatrix::identity(3, 3));
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(builtin_target("nope", &Params::new()), Err(Error::Usage(_))));
        let mut p = Params::new();
        p.insert("stepsize".into(), scalar(1.0));
        let err = builtin_target("std_gaussian", &p).unwrap_err();
        assert!(err.to_string().contains("stepsize"));
        let mut p = Params::new();
        p.insert(
            "covariance".into(),
            ParamValue::Matrix(vec![vec![1.0, 0.5], vec![0.4, 1.0]]),
        );
        assert!(matches!(builtin_target("mvn", &p), Err(Error::Validation(_))));
        let mut p = Params::new();
        p.insert(
            "covariance".into(),
            ParamValue::Matrix(vec![vec![1.0, 2.0], vec![2.0, 1.0]]),
        );
        assert!(matches!(builtin_target("mvn", &p), Err(Error::Validation(_))));
        let mut p = Params::new();
        p.insert("n".into(), scalar(1.5));
        assert!(matches!(builtin_target("std_gaussian", &p), Err(Error::Usage(_))));
    }

    #[test]
    fn initial_point_moves_inside_offset_halfspace() {
        let mut p = Params::new();
        p.insert("n".into(), scalar(2.0));
        p.insert(
            "constraints".into(),
            ParamValue::Matrix(vec![vec![1.0, 1.0, -3.0], vec![0.0, 1.0, 0.0]]),
        );
        let m = builtin_target("halfspace_gaussian", &p).unwrap();
        assert!(m.moments().is_none());
        let q = m.initial_point().unwrap();
        assert!(m.is_feasible(&q));
    }

    #[test]
    fn shifted_potential_keeps_gradient() {
        let m = banana(1.0, 100.0);
        let s = m.shifted(42.0);
        let q = v(&[0.3, -0.2]);
        assert_eq!(s.potential_grad(&q).unwrap(), m.potential_grad(&q).unwrap());
        assert_eq!(
            s.potential_eval(&q).unwrap(),
            m.potential_eval(&q).unwrap() + 42.0
        );
    }

    #[test]
    fn hessians_are_symmetric() {
        let q = v(&[0.3, -1.2]);
        for m in [banana(1.0, 100.0), funnel(2, 3.0), std_gaussian(2)] {
            assert!(hessian_asymmetry(&m, &q).unwrap() <= 1e-12);
        }
    }
}
