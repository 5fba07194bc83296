//! Numerical Hamiltonian flow.
//!
//! Separable Hamiltonians (constant `Λ`) use the explicit leapfrog. When the
//! kinetic energy depends on position the generalized leapfrog is used: an
//! implicit half-kick, an implicit drift and an explicit half-kick. Both are
//! symmetric and symplectic, hence reversible and volume preserving.
//!
//! Drifts watch the constraints. When some `C_k` changes sign over a drift the
//! crossing is located by bisection, the position is advanced to the boundary
//! and the momentum is reflected with [`reflect_momentum`] under the inverse
//! metric at the boundary point. The drift then resumes for the remaining time.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, DivergenceKind, Error, Result};
use crate::kinetic::KineticModel;
use crate::linalg::{all_finite, bilinear};
use crate::model::TargetModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step_size: f64,
    pub num_steps: usize,
    /// Convergence tolerance of the implicit sub-steps, relative to `1 + |x|`.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    /// Boundary points are located to `0 < C ≤ reflection_tol`.
    pub reflection_tol: f64,
    pub reflection_max_events: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            num_steps: 10,
            fp_tol: 1e-10,
            fp_max_iter: 100,
            reflection_tol: 1e-10,
            reflection_max_events: 8,
        }
    }
}

impl IntegratorConfig {
    pub fn new(step_size: f64, num_steps: usize) -> Self {
        Self { step_size, num_steps, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.step_size) {
            return Err(Error::Usage("step_size must be positive".into()));
        }
        if self.num_steps == 0 {
            return Err(Error::Usage("num_steps must be at least 1".into()));
        }
        if !positive(self.fp_tol) || !positive(self.reflection_tol) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        if self.fp_max_iter == 0 {
            return Err(Error::Usage("fp_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// A point `(q, p)` of phase space with an optional cached Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: DVector<f64>,
    pub p: DVector<f64>,
    pub energy: Option<f64>,
}

impl PhaseState {
    pub fn new(q: DVector<f64>, p: DVector<f64>) -> Self {
        Self { q, p, energy: None }
    }

    /// `(q, p) → (q, −p)`; `H` is even in `p`, so the cache survives.
    pub fn flipped(&self) -> Self {
        Self { q: self.q.clone(), p: -&self.p, energy: self.energy }
    }
}

/// Result of [`Hamiltonian::integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub end: PhaseState,
    /// `H` after every full step.
    pub trace: Vec<f64>,
    /// Position after every full step.
    pub path: Vec<DVector<f64>>,
    pub reflections: usize,
    /// Largest `|T(q_b, p') − T(q_b, p)|` over all reflection events.
    pub max_reflection_jump: f64,
}

#[derive(Default)]
struct StepStats {
    reflections: usize,
    max_jump: f64,
}

/// `p' = p − 2 (n̂, p)_Λ n̂` with `n̂ = dC / √(dC, dC)_Λ` and
/// `(a, b)_Λ = aᵀ Λ b`.
///
/// Leaves `pᵀΛp` unchanged, so any kinetic energy of the form
/// `τ(pᵀΛp) + τ₂(q)` is conserved.
pub fn reflect_momentum(p: &DVector<f64>, dc: &DVector<f64>, lambda: &DMatrix<f64>) -> Result<DVector<f64>> {
    check_dim(p.len(), dc.len())?;
    check_dim(p.len(), lambda.nrows())?;
    let nn = bilinear(dc, lambda, dc);
    if !(nn > 0.0) || !nn.is_finite() {
        return Err(Error::Geometry("constraint normal has zero length under Λ".into()));
    }
    let np = bilinear(dc, lambda, p);
    let mut out = p.clone();
    out.axpy(-2.0 * np / nn, dc, 1.0);
    Ok(out)
}

/// Couples a target with a kinetic energy.
#[derive(Debug, Clone, Copy)]
pub struct Hamiltonian<'a> {
    pub model: &'a TargetModel,
    pub kinetic: &'a KineticModel,
}

impl<'a> Hamiltonian<'a> {
    pub fn new(model: &'a TargetModel, kinetic: &'a KineticModel) -> Result<Self> {
        check_dim(model.dim(), kinetic.dim())?;
        Ok(Self { model, kinetic })
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `T(q, p) + V(q)`, or `+∞` outside the feasible region.
    pub fn hamiltonian(&self, state: &PhaseState) -> Result<f64> {
        check_dim(self.dim(), state.q.len())?;
        check_dim(self.dim(), state.p.len())?;
        if !self.model.is_feasible(&state.q) {
            return Ok(f64::INFINITY);
        }
        let v = self.model.potential_eval(&state.q)?;
        let t = self.kinetic.kinetic_eval(&state.q, &state.p)?;
        Ok(t + v)
    }

    /// `(q̇, ṗ) = (∂H/∂p, −∂H/∂q)`.
    pub fn flow_derivatives(&self, state: &PhaseState) -> Result<(DVector<f64>, DVector<f64>)> {
        check_dim(self.dim(), state.p.len())?;
        let point = self.kinetic.metric_at(&state.q, self.kinetic.is_position_dependent())?;
        let qdot = self.kinetic.grad_p_at(&point, &state.p);
        let mut pdot = -self.model.potential_grad(&state.q)?;
        pdot -= self.kinetic.grad_q_at(&point, &state.p)?;
        Ok((qdot, pdot))
    }

    /// One explicit leapfrog step with default reflection settings.
    pub fn leapfrog_step(&self, state: &PhaseState, step_size: f64) -> Result<PhaseState> {
        let cfg = IntegratorConfig { step_size, ..IntegratorConfig::default() };
        self.explicit_step(state, &cfg, &mut StepStats::default())
    }

    /// One generalized leapfrog step.
    pub fn generalized_leapfrog_step(
        &self,
        state: &PhaseState,
        step_size: f64,
        fp_tol: f64,
        fp_max_iter: usize,
    ) -> Result<PhaseState> {
        let cfg = IntegratorConfig { step_size, fp_tol, fp_max_iter, ..IntegratorConfig::default() };
        self.implicit_step(state, &cfg, &mut StepStats::default())
    }

    /// One step of whichever scheme fits the kinetic energy.
    pub fn step(&self, state: &PhaseState, cfg: &IntegratorConfig) -> Result<PhaseState> {
        self.dispatch_step(state, cfg, &mut StepStats::default())
    }

    fn dispatch_step(&self, state: &PhaseState, cfg: &IntegratorConfig, stats: &mut StepStats) -> Result<PhaseState> {
        if self.kinetic.is_position_dependent() {
            self.implicit_step(state, cfg, stats)
        } else {
            self.explicit_step(state, cfg, stats)
        }
    }

    /// `L` steps from `state`. Divergences (non-convergent implicit steps,
    /// reflection storms, non-finite energy) are returned as
    /// [`Error::Divergence`].
    pub fn integrate(&self, state: &PhaseState, cfg: &IntegratorConfig) -> Result<Trajectory> {
        cfg.validate()?;
        let start_energy = match state.energy {
            Some(h) => h,
            None => self.hamiltonian(state)?,
        };
        if !start_energy.is_finite() {
            return Err(Error::Usage("initial state must have finite energy".into()));
        }
        let mut current = state.clone();
        let mut stats = StepStats::default();
        let mut trace = Vec::with_capacity(cfg.num_steps);
        let mut path = Vec::with_capacity(cfg.num_steps);
        for _ in 0..cfg.num_steps {
            current = self.dispatch_step(&current, cfg, &mut stats)?;
            let h = self.hamiltonian(&current).map_err(as_divergence)?;
            if !h.is_finite() {
                return Err(Error::Divergence(DivergenceKind::NonFiniteEnergy));
            }
            current.energy = Some(h);
            trace.push(h);
            path.push(current.q.clone());
        }
        Ok(Trajectory {
            end: current,
            trace,
            path,
            reflections: stats.reflections,
            max_reflection_jump: stats.max_jump,
        })
    }

    /// `|det J − 1|` for the Jacobian of one integrator step at `state`,
    /// built from central differences of size `h`.
    pub fn volume_check(&self, state: &PhaseState, step_size: f64, h: f64) -> Result<f64> {
        let cfg = IntegratorConfig { step_size, fp_tol: 1e-14, fp_max_iter: 500, ..IntegratorConfig::default() };
        jacobian_volume_error(|s| self.step(s, &cfg), state, h)
    }

    fn explicit_step(&self, state: &PhaseState, cfg: &IntegratorConfig, stats: &mut StepStats) -> Result<PhaseState> {
        let half = 0.5 * cfg.step_size;
        let mut p = state.p.clone();
        p.axpy(-half, &self.model.potential_grad(&state.q)?, 1.0);
        let (q, mut p) = self.drift_explicit(&state.q, p, cfg.step_size, cfg, stats)?;
        p.axpy(-half, &self.model.potential_grad(&q)?, 1.0);
        check_finite(&q, &p)?;
        Ok(PhaseState::new(q, p))
    }

    /// Straight-line drift `q + t ∂T/∂p` for a position-independent kinetic
    /// energy, reflecting at constraint boundaries.
    fn drift_explicit(
        &self,
        q: &DVector<f64>,
        mut p: DVector<f64>,
        duration: f64,
        cfg: &IntegratorConfig,
        stats: &mut StepStats,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let mut q = q.clone();
        let mut remaining = duration;
        let mut events = 0;
        loop {
            let point = self.kinetic.metric_at(&q, false)?;
            let velocity = self.kinetic.grad_p_at(&point, &p);
            let segment = |s: f64| {
                let mut out = q.clone();
                out.axpy(s, &velocity, 1.0);
                out
            };
            match self.first_crossing(&segment, remaining, cfg) {
                None => return Ok((segment(remaining), p)),
                Some((k, s)) => {
                    events += 1;
                    if events > cfg.reflection_max_events {
                        return Err(Error::Divergence(DivergenceKind::TooManyReflections));
                    }
                    q = segment(s);
                    p = self.reflect_at(&q, &p, k, stats)?;
                    remaining -= s;
                }
            }
        }
    }

    fn implicit_step(&self, state: &PhaseState, cfg: &IntegratorConfig, stats: &mut StepStats) -> Result<PhaseState> {
        let half = 0.5 * cfg.step_size;
        let kin = self.kinetic;

        // implicit half-kick: p½ = p − ε/2 ∂_qH(q, p½)
        let point = kin.metric_at(&state.q, true)?;
        let grad_v = self.model.potential_grad(&state.q)?;
        let p_half = fixed_point(state.p.clone(), cfg, |x| {
            let mut next = state.p.clone();
            next.axpy(-half, &grad_v, 1.0);
            next.axpy(-half, &kin.grad_q_at(&point, x)?, 1.0);
            Ok(next)
        })?;

        let (q, p_half) = self.drift_implicit(&state.q, p_half, cfg.step_size, cfg, stats, 0)?;

        // explicit half-kick at the new position
        let point = kin.metric_at(&q, true)?;
        let mut p = p_half.clone();
        p.axpy(-half, &self.model.potential_grad(&q)?, 1.0);
        p.axpy(-half, &kin.grad_q_at(&point, &p_half)?, 1.0);
        check_finite(&q, &p)?;
        Ok(PhaseState::new(q, p))
    }

    /// Implicit drift `q' = q + t/2 (∂_pT(q, p) + ∂_pT(q', p))`.
    ///
    /// If an iterate leaves the feasible region, the crossing is located
    /// along the chord from `q` to that iterate, the momentum is reflected
    /// there and the remaining time is drifted from the boundary.
    fn drift_implicit(
        &self,
        q: &DVector<f64>,
        p: DVector<f64>,
        duration: f64,
        cfg: &IntegratorConfig,
        stats: &mut StepStats,
        depth: usize,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let kin = self.kinetic;
        let half = 0.5 * duration;
        let v0 = kin.grad_p_at(&kin.metric_at(q, false)?, &p);
        let mut guess = q.clone();
        guess.axpy(duration, &v0, 1.0);

        let mut escaped: Option<DVector<f64>> = None;
        let solved = fixed_point(guess, cfg, |y| {
            if !self.model.is_feasible(y) {
                escaped = Some(y.clone());
                return Err(Error::Divergence(DivergenceKind::FixedPoint));
            }
            let mut next = q.clone();
            next.axpy(half, &v0, 1.0);
            next.axpy(half, &kin.grad_p_at(&kin.metric_at(y, false)?, &p), 1.0);
            Ok(next)
        });
        let outside = match solved {
            Ok(y) if self.model.is_feasible(&y) => return Ok((y, p)),
            Ok(y) => y,
            Err(e) => escaped.ok_or(e)?,
        };

        if depth >= cfg.reflection_max_events {
            return Err(Error::Divergence(DivergenceKind::TooManyReflections));
        }
        let chord = &outside - q;
        let segment = |s: f64| {
            let mut out = q.clone();
            out.axpy(s, &chord, 1.0);
            out
        };
        let (k, s) = self
            .first_crossing(&segment, 1.0, cfg)
            .ok_or(Error::Divergence(DivergenceKind::FixedPoint))?;
        let boundary = segment(s);
        let reflected = self.reflect_at(&boundary, &p, k, stats)?;
        self.drift_implicit(&boundary, reflected, (1.0 - s) * duration, cfg, stats, depth + 1)
    }

    /// Earliest constraint crossing along `segment(s)`, `s ∈ [0, s_max]`.
    /// Returns the constraint index and the parameter of the last feasible
    /// bisection point. Ties go to the lower index.
    fn first_crossing(
        &self,
        segment: &dyn Fn(f64) -> DVector<f64>,
        s_max: f64,
        cfg: &IntegratorConfig,
    ) -> Option<(usize, f64)> {
        let end = segment(s_max);
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in self.model.constraints().iter().enumerate() {
            if c.value(&end) > 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (0.0, s_max);
            for _ in 0..200 {
                let c_lo = c.value(&segment(lo));
                if c_lo <= cfg.reflection_tol || hi - lo <= f64::EPSILON * s_max {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if c.value(&segment(mid)) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if best.is_none_or(|(_, s)| lo < s) {
                best = Some((k, lo));
            }
        }
        best
    }

    fn reflect_at(&self, q: &DVector<f64>, p: &DVector<f64>, k: usize, stats: &mut StepStats) -> Result<DVector<f64>> {
        let point = self.kinetic.metric_at(q, false)?;
        let dc = self.model.constraints()[k].gradient(q);
        let reflected = reflect_momentum(p, &dc, &point.inverse_metric())?;
        let jump = (self.kinetic.eval_at(&point, &reflected) - self.kinetic.eval_at(&point, p)).abs();
        stats.reflections += 1;
        stats.max_jump = stats.max_jump.max(jump);
        Ok(reflected)
    }
}

fn as_divergence(e: Error) -> Error {
    match e {
        Error::Numeric(_) | Error::ConstraintViolation { .. } => {
            Error::Divergence(DivergenceKind::NonFiniteEnergy)
        }
        other => other,
    }
}

fn check_finite(q: &DVector<f64>, p: &DVector<f64>) -> Result<()> {
    if all_finite(q) && all_finite(p) {
        Ok(())
    } else {
        Err(Error::Divergence(DivergenceKind::NonFiniteEnergy))
    }
}

/// Iterates `x ← f(x)` until `max |Δx_i| / (1 + |x_i|) ≤ fp_tol`.
fn fixed_point<F>(mut x: DVector<f64>, cfg: &IntegratorConfig, mut f: F) -> Result<DVector<f64>>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    for _ in 0..cfg.fp_max_iter {
        let next = f(&x)?;
        if !all_finite(&next) {
            return Err(Error::Divergence(DivergenceKind::FixedPoint));
        }
        let change = next
            .iter()
            .zip(x.iter())
            .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
            .fold(0.0, f64::max);
        x = next;
        if change <= cfg.fp_tol {
            return Ok(x);
        }
    }
    Err(Error::Divergence(DivergenceKind::FixedPoint))
}

/// `|det J − 1|` of a phase-space map, with `J` from central differences.
pub fn jacobian_volume_error<F>(step: F, state: &PhaseState, h: f64) -> Result<f64>
where
    F: Fn(&PhaseState) -> Result<PhaseState>,
{
    let n = state.q.len();
    let pack = |s: &PhaseState| {
        let mut x = DVector::zeros(2 * n);
        x.rows_mut(0, n).copy_from(&s.q);
        x.rows_mut(n, n).copy_from(&s.p);
        x
    };
    let unpack = |x: &DVector<f64>| PhaseState::new(x.rows(0, n).into_owned(), x.rows(n, n).into_owned());
    let x0 = pack(state);
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        let mut up = x0.clone();
        up[j] += h;
        let mut down = x0.clone();
        down[j] -= h;
        let col = (pack(&step(&unpack(&up))?) - pack(&step(&unpack(&down))?)) / (2.0 * h);
        jac.set_column(j, &col);
    }
    Ok((jac.determinant() - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{BackgroundMetric, ConstantMetric, GraphMetric, MetricField};
    use crate::model::{builtin_target, std_gaussian, Params};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_vec(xs.to_vec())
    }

    fn oscillator() -> (TargetModel, KineticModel) {
        (std_gaussian(1), KineticModel::identity(1))
    }

    #[test]
    fn energy_values() {
        let (m, k) = oscillator();
        let h = Hamiltonian::new(&m, &k).unwrap();
        assert_eq!(h.hamiltonian(&PhaseState::new(v(&[0.0]), v(&[0.0]))).unwrap(), 0.0);
        assert_eq!(h.hamiltonian(&PhaseState::new(v(&[1.0]), v(&[1.0]))).unwrap(), 1.0);
        let (qd, pd) = h.flow_derivatives(&PhaseState::new(v(&[1.0]), v(&[0.0]))).unwrap();
        assert_eq!((qd, pd), (v(&[0.0]), v(&[-1.0])));
    }

    #[test]
    fn leapfrog_hand_values() {
        let (m, k) = oscillator();
        let h = Hamiltonian::new(&m, &k).unwrap();
        let s = h.leapfrog_step(&PhaseState::new(v(&[1.0]), v(&[0.0])), 0.1).unwrap();
        // p½ = −0.05, q = 0.995, p = −0.05 − 0.05·0.995
        assert!((s.q[0] - 0.995).abs() < 1e-15);
        assert!((s.p[0] + 0.09975).abs() < 1e-15);
    }

    #[test]
    fn leapfrog_round_trip() {
        let (m, k) = oscillator();
        let h = Hamiltonian::new(&m, &k).unwrap();
        let s0 = PhaseState::new(v(&[0.7]), v(&[-0.3]));
        let s1 = h.leapfrog_step(&s0, 0.1).unwrap();
        let back = h.leapfrog_step(&s1.flipped(), 0.1).unwrap().flipped();
        assert!((back.q[0] - 0.7).abs() < 1e-13 && (back.p[0] + 0.3).abs() < 1e-13);
    }

    #[test]
    fn generalized_reduces_to_leapfrog_for_constant_metric() {
        let m = builtin_target("banana", &Params::new()).unwrap();
        let k = KineticModel::EuclideanQuadratic(ConstantMetric::diagonal(&[0.01, 0.02]).unwrap());
        let h = Hamiltonian::new(&m, &k).unwrap();
        let s0 = PhaseState::new(v(&[0.5, 0.3]), v(&[1.0, -2.0]));
        let a = h.leapfrog_step(&s0, 0.05).unwrap();
        let b = h.generalized_leapfrog_step(&s0, 0.05, 1e-12, 100).unwrap();
        assert!((a.q - b.q).amax() < 1e-12 && (a.p - b.p).amax() < 1e-12);
    }

    #[test]
    fn reflection_examples() {
        let eye = DMatrix::identity(2, 2);
        assert_eq!(reflect_momentum(&v(&[1.0, 1.0]), &v(&[1.0, 0.0]), &eye).unwrap(), v(&[-1.0, 1.0]));
        let d = DMatrix::from_diagonal(&v(&[4.0, 1.0]));
        let p2 = reflect_momentum(&v(&[1.0, 1.0]), &v(&[1.0, 0.0]), &d).unwrap();
        assert_eq!(p2, v(&[-1.0, 1.0]));
        let k = KineticModel::EuclideanQuadratic(ConstantMetric::diagonal(&[4.0, 1.0]).unwrap());
        let q = v(&[0.0, 0.0]);
        assert_eq!(k.kinetic_eval(&q, &p2).unwrap(), k.kinetic_eval(&q, &v(&[1.0, 1.0])).unwrap());
        let p = v(&[0.3, -0.8]);
        let twice = reflect_momentum(&reflect_momentum(&p, &v(&[0.6, 0.2]), &d).unwrap(), &v(&[0.6, 0.2]), &d).unwrap();
        assert!((twice - p).amax() <= 1e-15);
        assert!(matches!(
            reflect_momentum(&v(&[1.0, 1.0]), &v(&[0.0, 0.0]), &eye),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn halfspace_trajectory_reflects() {
        let m = builtin_target("halfspace_gaussian", &Params::new()).unwrap();
        let k = KineticModel::identity(1);
        let h = Hamiltonian::new(&m, &k).unwrap();
        let cfg = IntegratorConfig::new(0.05, 20);
        let t = h.integrate(&PhaseState::new(v(&[0.5]), v(&[-2.0])), &cfg).unwrap();
        assert_eq!(t.reflections, 1);
        assert!(t.path.iter().all(|q| q[0] > -cfg.reflection_tol));
        assert!(t.max_reflection_jump <= 1e-13);
        // after the bounce the particle moves away from the wall
        assert!(t.end.p[0] > 0.0 || t.end.q[0] > 0.5);
    }

    #[test]
    fn unconstrained_oscillator_energy_bound() {
        let (m, k) = oscillator();
        let h = Hamiltonian::new(&m, &k).unwrap();
        let s0 = PhaseState::new(v(&[1.0]), v(&[0.0]));
        let t = h.integrate(&s0, &IntegratorConfig::new(0.1, 20)).unwrap();
        assert_eq!(t.reflections, 0);
        let h0 = h.hamiltonian(&s0).unwrap();
        assert!(t.trace.iter().map(|x| (x - h0).abs()).fold(0.0, f64::max) < 5e-3);
    }

    #[test]
    fn reflection_storm_diverges() {
        // a 1-D slab of width 1e-3 with a fast particle
        let mut p = Params::new();
        p.insert(
            "constraints".into(),
            crate::model::ParamValue::Matrix(vec![vec![1.0, 0.0], vec![-1.0, 1e-3]]),
        );
        let m = builtin_target("halfspace_gaussian", &p).unwrap();
        let k = KineticModel::identity(1);
        let h = Hamiltonian::new(&m, &k).unwrap();
        let r = h.integrate(&PhaseState::new(v(&[5e-4]), v(&[10.0])), &IntegratorConfig::new(0.1, 1));
        assert!(matches!(r, Err(Error::Divergence(DivergenceKind::TooManyReflections))));
    }

    #[test]
    fn graph_metric_reflects_with_implicit_drift() {
        let m = builtin_target("halfspace_gaussian", &Params::new()).unwrap();
        let gm = GraphMetric::new(BackgroundMetric::identity(1), m.clone()).unwrap();
        let k = KineticModel::RiemannianQuadratic(MetricField::GraphInduced(gm));
        let h = Hamiltonian::new(&m, &k).unwrap();
        let t = h.integrate(&PhaseState::new(v(&[0.3]), v(&[-3.0])), &IntegratorConfig::new(0.05, 30)).unwrap();
        assert!(t.reflections >= 1);
        assert!(t.path.iter().all(|q| q[0] > 0.0));
        assert!(t.max_reflection_jump <= 1e-13);
    }

    #[test]
    fn volume_preserved_by_leapfrog_not_by_euler() {
        let (m, k) = oscillator();
        let h = Hamiltonian::new(&m, &k).unwrap();
        let s = PhaseState::new(v(&[1.0]), v(&[0.0]));
        assert!(h.volume_check(&s, 0.1, 1e-6).unwrap() < 1e-6);
        let euler = |st: &PhaseState| -> Result<PhaseState> {
            let (qd, pd) = h.flow_derivatives(st)?;
            Ok(PhaseState::new(&st.q + qd * 0.1, &st.p + pd * 0.1))
        };
        assert!(jacobian_volume_error(euler, &s, 1e-6).unwrap() > 1e-3);
    }
}
