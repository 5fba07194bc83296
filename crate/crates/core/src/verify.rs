//! Geometric verification suite.
//!
//! Each check compares the implementation against an independent route:
//! round trips through the flipped flow, finite-difference Jacobians, dense
//! inversion, finite-difference Christoffel symbols, exact Gaussian draws.
//! The CLI `verify` command runs [`run_suite`] and prints the table.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::integrator::{reflect_momentum, Hamiltonian, IntegratorConfig, PhaseState};
use crate::kinetic::KineticModel;
use crate::metric::{BackgroundMetric, ConstantMetric, GraphMetric, GraphMetricState, MetricField};
use crate::model::{self, TargetModel};
use crate::sampler::hmc_transition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    /// Human-readable acceptance condition, e.g. `< 1e-10`.
    pub bound: String,
    pub detail: String,
}

impl CheckResult {
    fn below(name: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured < bound,
            measured,
            bound: format!("< {bound:e}"),
            detail: String::new(),
        }
    }

    fn within(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            passed: (lo..=hi).contains(&measured),
            measured,
            bound: format!("in [{lo}, {hi}]"),
            detail: String::new(),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn failed(name: &str, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            bound: String::new(),
            detail: format!("error: {err}"),
        }
    }
}

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_vec(xs.to_vec())
}

/// A correlated bivariate normal with unit variances.
pub fn correlated_mvn(rho: f64) -> TargetModel {
    model::mvn(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]))
        .expect("|rho| < 1 gives an SPD covariance")
}

/// Inverse Hessian of the banana potential at its mode, a constant
/// preconditioner that makes the stiff ridge direction tractable.
pub fn banana_mode_inverse_hessian(a: f64, b: f64) -> DMatrix<f64> {
    let m = model::banana(a, b);
    m.potential_hessian(&v(&[a, a * a]))
        .expect("banana has a Hessian")
        .try_inverse()
        .expect("banana Hessian at the mode is non-singular")
}

/// One test problem: a target, a kinetic energy and a starting position.
pub struct Problem {
    pub label: String,
    pub model: TargetModel,
    pub kinetic: KineticModel,
    pub start: DVector<f64>,
}

/// The unconstrained catalog targets paired with a constant-metric kinetic
/// energy (explicit leapfrog) and with the graph metric (generalized leapfrog).
pub fn unconstrained_problems() -> Vec<(Problem, Problem)> {
    let banana_pre = banana_mode_inverse_hessian(1.0, 100.0);
    let banana_sigma = banana_pre.clone().try_inverse().unwrap();
    let rho = 0.9;
    let mvn_cov = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
    let targets = vec![
        (model::std_gaussian(2), DMatrix::identity(2, 2), DMatrix::identity(2, 2), v(&[0.5, -0.3])),
        (correlated_mvn(rho), mvn_cov.clone(), mvn_cov.try_inverse().unwrap(), v(&[0.4, 0.2])),
        (model::banana(1.0, 100.0), banana_pre, banana_sigma, v(&[0.9, 0.85])),
        (model::funnel(2, 3.0), DMatrix::identity(2, 2), DMatrix::identity(2, 2), v(&[0.5, 0.4])),
    ];
    targets
        .into_iter()
        .map(|(m, lambda, sigma, start)| {
            let euclid = KineticModel::EuclideanQuadratic(ConstantMetric::new(lambda).unwrap());
            let gm = GraphMetric::new(BackgroundMetric::new(sigma).unwrap(), m.clone()).unwrap();
            let riemann = KineticModel::RiemannianQuadratic(MetricField::GraphInduced(gm));
            (
                Problem { label: format!("{}/leapfrog", m.name()), model: m.clone(), kinetic: euclid, start: start.clone() },
                Problem { label: format!("{}/generalized", m.name()), model: m, kinetic: riemann, start },
            )
        })
        .collect()
}

/// Integrate, flip, integrate, flip; returns the largest coordinate error
/// against the starting state.
pub fn round_trip_error(ham: &Hamiltonian<'_>, start: &PhaseState, cfg: &IntegratorConfig) -> Result<f64> {
    let forward = ham.integrate(start, cfg)?;
    let back = ham.integrate(&forward.end.flipped(), cfg)?.end.flipped();
    Ok((&back.q - &start.q).amax().max((&back.p - &start.p).amax()))
}

pub fn check_reversibility() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (explicit, implicit) in unconstrained_problems() {
        for (prob, cfg, bound) in [
            (&explicit, IntegratorConfig::new(0.1, 20), 1e-10),
            (&implicit, IntegratorConfig { fp_tol: 1e-12, ..IntegratorConfig::new(0.1, 20) }, 1e-8),
        ] {
            let name = format!("reversibility {}", prob.label);
            let res = (|| {
                let ham = Hamiltonian::new(&prob.model, &prob.kinetic)?;
                let p = prob.kinetic.sample_momentum(&prob.start, &mut rng)?;
                round_trip_error(&ham, &PhaseState::new(prob.start.clone(), p), &cfg)
            })();
            out.push(match res {
                Ok(err) => CheckResult::below(&name, err, bound),
                Err(e) => CheckResult::failed(&name, e),
            });
        }
    }
    out
}

/// `|det J − 1|` at `count` random states around `centre`.
pub fn worst_volume_error(prob: &Problem, step_size: f64, count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ham = Hamiltonian::new(&prob.model, &prob.kinetic)?;
    let mut worst = 0.0_f64;
    for _ in 0..count {
        let q = prob.start.map(|x| x + 0.2 * rng.sample::<f64, _>(StandardNormal));
        let p = prob.kinetic.sample_momentum(&q, &mut rng)?;
        worst = worst.max(ham.volume_check(&PhaseState::new(q, p), step_size, 1e-6)?);
    }
    Ok(worst)
}

pub fn check_volume() -> Vec<CheckResult> {
    let problems = unconstrained_problems();
    let mut out = Vec::new();
    for (idx, step) in [(0usize, 0.1), (2, 0.1)] {
        let prob = &problems[idx].0;
        let name = format!("volume {} eps={step}", prob.label);
        out.push(match worst_volume_error(prob, step, 10, 7 + idx as u64) {
            Ok(e) => CheckResult::below(&name, e, 1e-6),
            Err(e) => CheckResult::failed(&name, e),
        });
    }
    let prob = &problems[2].1;
    let name = format!("volume {} eps=0.01", prob.label);
    out.push(match worst_volume_error(prob, 0.01, 10, 19) {
        Ok(e) => CheckResult::below(&name, e, 1e-6),
        Err(e) => CheckResult::failed(&name, e),
    });
    out
}

/// `max_t |H(t) − H(0)|` over `L = total_time / step` steps.
pub fn max_energy_error(ham: &Hamiltonian<'_>, start: &PhaseState, step: f64, total_time: f64) -> Result<f64> {
    let h0 = ham.hamiltonian(start)?;
    let steps = (total_time / step).round() as usize;
    let cfg = IntegratorConfig { fp_tol: 1e-13, fp_max_iter: 500, ..IntegratorConfig::new(step, steps) };
    let t = ham.integrate(start, &cfg)?;
    Ok(t.trace.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max))
}

/// Ratio `max|ΔH|(ε) / max|ΔH|(ε/2)` over a fixed integration time.
pub fn energy_order_ratio(prob: &Problem, p: DVector<f64>, step: f64, total_time: f64) -> Result<f64> {
    let ham = Hamiltonian::new(&prob.model, &prob.kinetic)?;
    let start = PhaseState::new(prob.start.clone(), p);
    Ok(max_energy_error(&ham, &start, step, total_time)? / max_energy_error(&ham, &start, 0.5 * step, total_time)?)
}

pub fn oscillator_problem() -> Problem {
    Problem {
        label: "oscillator/leapfrog".into(),
        model: model::std_gaussian(1),
        kinetic: KineticModel::identity(1),
        start: v(&[1.0]),
    }
}

pub fn check_energy_order() -> Vec<CheckResult> {
    let problems = unconstrained_problems();
    let cases: Vec<(&Problem, DVector<f64>, f64, f64)> = vec![
        (&problems[2].0, v(&[1.0, 0.5]), 0.005, 1.0),
        (&problems[2].1, v(&[1.0, 0.5]), 0.005, 1.0),
    ];
    let osc = oscillator_problem();
    let mut out = Vec::new();
    let mut run = |prob: &Problem, p: DVector<f64>, step: f64, time: f64| {
        let name = format!("energy order {}", prob.label);
        out.push(match energy_order_ratio(prob, p, step, time) {
            Ok(r) => CheckResult::within(&name, r, 3.5, 4.5),
            Err(e) => CheckResult::failed(&name, e),
        });
    };
    run(&osc, v(&[0.0]), 0.1, 2.0);
    for (prob, p, step, time) in cases {
        run(prob, p, step, time);
    }
    out
}

/// A random SPD matrix with eigenvalues roughly in `[0.5, 1.5 + n/4]`.
pub fn random_spd<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal) * 0.5);
    &a * a.transpose() / (n as f64).sqrt() + DMatrix::identity(n, n) * 0.5
}

/// Worst `(‖Λ̄ − Σ̄⁻¹‖_max, |det_lemma / det − 1|)` over random instances.
pub fn smw_errors(n: usize, instances: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut inv_err, mut det_err) = (0.0_f64, 0.0_f64);
    for _ in 0..instances {
        let bg = BackgroundMetric::new(random_spd(n, &mut rng))?;
        let scale = 0.1 + 2.0 * rng.random::<f64>();
        let g = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
        let dense = bg.sigma() + &g * g.transpose();
        let st = GraphMetricState::from_gradient(&bg, g, None)?;
        let oracle = dense.clone().try_inverse().expect("Σ̄ is SPD");
        inv_err = inv_err.max((st.inverse_metric(&bg) - oracle).amax());
        let det = dense.determinant();
        det_err = det_err.max(((st.logdet_metric() - det.ln()).exp() - 1.0).abs());
    }
    Ok((inv_err, det_err))
}

pub fn check_smw() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (i, n) in [1usize, 2, 5, 20, 50].into_iter().enumerate() {
        match smw_errors(n, 20, 500 + i as u64) {
            Ok((inv, det)) => {
                out.push(CheckResult::below(&format!("rank-one inverse n={n}"), inv, 1e-10));
                out.push(CheckResult::below(&format!("determinant lemma n={n}"), det, 1e-10));
            }
            Err(e) => out.push(CheckResult::failed(&format!("rank-one inverse n={n}"), e)),
        }
    }
    out
}

/// Christoffel symbols of `Σ̄(q) = σ + g gᵀ` from central differences of the
/// metric, `Γ^i_jk = ½ Σ̄^il (∂_j Σ̄_lk + ∂_k Σ̄_lj − ∂_l Σ̄_jk)`.
pub fn finite_difference_christoffel(field: &GraphMetric, q: &DVector<f64>, h: f64) -> Result<Vec<DMatrix<f64>>> {
    let n = q.len();
    let metric = |x: &DVector<f64>| -> Result<DMatrix<f64>> {
        let g = field.model().potential_grad(x)?;
        Ok(field.background().sigma() + &g * g.transpose())
    };
    let mut d_metric = Vec::with_capacity(n);
    for a in 0..n {
        let mut up = q.clone();
        up[a] += h;
        let mut down = q.clone();
        down[a] -= h;
        d_metric.push((metric(&up)? - metric(&down)?) / (2.0 * h));
    }
    let inv = metric(q)?.try_inverse().expect("Σ̄ is SPD");
    let mut gamma = vec![DMatrix::zeros(n, n); n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += inv[(i, l)] * (d_metric[j][(l, k)] + d_metric[k][(l, j)] - d_metric[l][(j, k)]);
                }
                gamma[i][(j, k)] = 0.5 * acc;
            }
        }
    }
    Ok(gamma)
}

/// Worst tensor-relative error `max|Γ − Γ_fd| / max|Γ_fd|` over random banana
/// points, with the Christoffel routine under test passed in.
pub fn christoffel_error<F>(points: usize, seed: u64, christoffel: F) -> Result<f64>
where
    F: Fn(&GraphMetric, &DVector<f64>) -> Result<Vec<DMatrix<f64>>>,
{
    let field = GraphMetric::new(BackgroundMetric::identity(2), model::banana(1.0, 100.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let q = v(&[rng.random_range(-1.5..1.5), rng.random_range(-0.5..2.0)]);
        let got = christoffel(&field, &q)?;
        let oracle = finite_difference_christoffel(&field, &q, 1e-5)?;
        let scale = oracle.iter().map(|m| m.amax()).fold(0.0, f64::max);
        let diff = got.iter().zip(&oracle).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

pub fn check_christoffel() -> CheckResult {
    match christoffel_error(20, 77, |f, q| Ok(f.christoffel(q)?.to_dense())) {
        Ok(e) => CheckResult::below("christoffel vs finite differences (banana)", e, 1e-4),
        Err(e) => CheckResult::failed("christoffel vs finite differences (banana)", e),
    }
}

/// Worst `|T(p') − T(p)|` and worst `|R(R(p)) − p|` over random probes, for
/// the quadratic and Student-t kinetic energies.
pub fn reflection_errors(probes: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut energy, mut involution) = (0.0_f64, 0.0_f64);
    for i in 0..probes {
        let n = 1 + i % 5;
        let lambda = random_spd(n, &mut rng);
        let p = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let dc = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let q = DVector::zeros(n);
        let metric = ConstantMetric::new(lambda.clone())?;
        let p2 = reflect_momentum(&p, &dc, &lambda)?;
        for k in [
            KineticModel::EuclideanQuadratic(metric.clone()),
            KineticModel::student_t(5.0, MetricField::Constant(metric.clone()))?,
        ] {
            energy = energy.max((k.kinetic_eval(&q, &p2)? - k.kinetic_eval(&q, &p)?).abs());
        }
        involution = involution.max((reflect_momentum(&p2, &dc, &lambda)? - &p).amax());
    }
    Ok((energy, involution))
}

pub fn check_reflection() -> Vec<CheckResult> {
    match reflection_errors(1000, 31) {
        Ok((energy, inv)) => vec![
            CheckResult {
                bound: "<= 1e-13".into(),
                passed: energy <= 1e-13,
                ..CheckResult::below("reflection conserves T", energy, 1e-13)
            },
            CheckResult {
                bound: "<= 1e-15".into(),
                passed: inv <= 1e-15,
                ..CheckResult::below("reflection is an involution", inv, 1e-15)
            },
        ],
        Err(e) => vec![CheckResult::failed("reflection", e)],
    }
}

/// Applies one transition to `count` exact draws from a 1-D standard normal
/// and returns the cloud's `(mean, variance)`.
pub fn stationarity_moments(kinetic: &KineticModel, cfg: &IntegratorConfig, count: usize, seed: u64) -> Result<(f64, f64)> {
    let m = model::std_gaussian(1);
    let ham = Hamiltonian::new(&m, kinetic)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(count);
    for _ in 0..count {
        let q0 = v(&[rng.sample(StandardNormal)]);
        xs.push(hmc_transition(&ham, &q0, cfg, true, &mut rng)?.q[0]);
    }
    let n = count as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var))
}

pub fn check_stationarity() -> Vec<CheckResult> {
    let count = 10_000;
    let se_mean = (1.0 / count as f64).sqrt();
    let se_var = (2.0 / count as f64).sqrt();
    let graph = KineticModel::RiemannianQuadratic(MetricField::GraphInduced(
        GraphMetric::new(BackgroundMetric::identity(1), model::std_gaussian(1)).unwrap(),
    ));
    let mut out = Vec::new();
    for (label, k, cfg) in [
        ("euclidean", KineticModel::identity(1), IntegratorConfig::new(0.9, 4)),
        ("graph", graph, IntegratorConfig::new(0.5, 4)),
    ] {
        match stationarity_moments(&k, &cfg, count, 4242) {
            Ok((mean, var)) => {
                out.push(CheckResult::below(&format!("stationarity mean ({label})"), mean.abs() / se_mean, 4.0).with_detail(format!("mean={mean:.4}")));
                out.push(CheckResult::below(&format!("stationarity variance ({label})"), (var - 1.0).abs() / se_var, 4.0).with_detail(format!("var={var:.4}")));
            }
            Err(e) => out.push(CheckResult::failed(&format!("stationarity ({label})"), e)),
        }
    }
    out
}

/// Median wall time, in seconds, of `f` over `reps` runs.
fn time_it<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    let mut times: Vec<f64> = (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[reps / 2]
}

/// Least-squares slope of `log t` against `log n`.
pub fn fit_exponent(ns: &[usize], times: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Fitted cost exponents of the graph-metric inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFit {
    pub rank_one: f64,
    /// Same quantities through a dense Cholesky factorization, for reference.
    pub dense: f64,
    /// `(n, rank-one seconds, dense seconds)` per dimension.
    pub timings: Vec<(usize, f64, f64)>,
}

/// Times the graph-metric inverse with a random background over the given
/// dimensions and fits `time ∝ n^k`.
pub fn cost_exponents(ns: &[usize]) -> Result<CostFit> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut fast = Vec::new();
    let mut dense = Vec::new();
    for &n in ns {
        let target = model::std_gaussian(n);
        let field = GraphMetric::new(BackgroundMetric::new(random_spd(n, &mut rng))?, target)?;
        let q = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        // enough repetitions that each sample takes a measurable time
        let reps_fast = (4_000_000 / (n * n)).max(3);
        let t_fast = time_it(7, || {
            for _ in 0..reps_fast {
                std::hint::black_box(field.metric_inverse(std::hint::black_box(&q)).unwrap());
            }
        }) / reps_fast as f64;
        let reps_dense = (40_000_000 / (n * n * n)).max(1);
        let t_dense = time_it(5, || {
            for _ in 0..reps_dense {
                let g = field.model().potential_grad(&q).unwrap();
                let sigma_bar = field.background().sigma() + &g * g.transpose();
                let chol = sigma_bar.cholesky().unwrap();
                std::hint::black_box((chol.inverse(), chol.determinant()));
            }
        }) / reps_dense as f64;
        fast.push(t_fast);
        dense.push(t_dense);
    }
    let timings = ns.iter().zip(&fast).zip(&dense).map(|((&n, &f), &d)| (n, f, d)).collect();
    Ok(CostFit { rank_one: fit_exponent(ns, &fast), dense: fit_exponent(ns, &dense), timings })
}

pub fn check_scaling() -> Vec<CheckResult> {
    let ns = [64, 128, 256, 512];
    match cost_exponents(&ns) {
        Ok(fit) => vec![
            CheckResult::below("cost exponent, rank-one inverse", fit.rank_one, 2.3),
            CheckResult {
                name: "cost exponent, dense inverse (reference)".into(),
                passed: true,
                measured: fit.dense,
                bound: "reported".into(),
                detail: String::new(),
            },
        ],
        Err(e) => vec![CheckResult::failed("cost exponents", e)],
    }
}

/// Worst `|H'(Aq, A⁻ᵀp) − H(q, p)|` over random invertible maps `A`.
pub fn coordinate_invariance_error(maps: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let models = [model::banana(1.0, 100.0), correlated_mvn(0.6)];
    for i in 0..maps {
        let m = &models[i % models.len()];
        let n = m.dim();
        let a = loop {
            let a: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            if a.determinant().abs() > 0.1 {
                break a;
            }
        };
        let a_inv = a.clone().try_inverse().unwrap();
        let m2 = m.linear_reparam(&a)?;
        let lambda = random_spd(n, &mut rng);
        let kinetics = [
            KineticModel::EuclideanQuadratic(ConstantMetric::new(lambda.clone())?),
            KineticModel::student_t(5.0, MetricField::Constant(ConstantMetric::new(lambda)?))?,
            KineticModel::RiemannianQuadratic(MetricField::GraphInduced(GraphMetric::new(
                BackgroundMetric::new(random_spd(n, &mut rng))?,
                m.clone(),
            )?)),
        ];
        let q = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let p = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let state2 = PhaseState::new(&a * &q, a_inv.transpose() * &p);
        for k in &kinetics {
            let k2 = k.linear_reparam(&a, &m2)?;
            let h = Hamiltonian::new(m, k)?.hamiltonian(&PhaseState::new(q.clone(), p.clone()))?;
            let h2 = Hamiltonian::new(&m2, &k2)?.hamiltonian(&state2)?;
            worst = worst.max((h2 - h).abs());
        }
    }
    Ok(worst)
}

pub fn check_coordinate_invariance() -> CheckResult {
    match coordinate_invariance_error(20, 13) {
        Ok(e) => CheckResult {
            bound: "<= 1e-12".into(),
            passed: e <= 1e-12,
            ..CheckResult::below("coordinate invariance of H", e, 1e-12)
        },
        Err(e) => CheckResult::failed("coordinate invariance of H", e),
    }
}

/// Runs the suite. `Full` adds the timing-based cost-exponent fit.
pub fn run_suite(level: Level) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.extend(check_reversibility());
    out.extend(check_volume());
    out.extend(check_energy_order());
    out.extend(check_smw());
    out.push(check_christoffel());
    out.extend(check_reflection());
    out.push(check_coordinate_invariance());
    out.extend(check_stationarity());
    if level == Level::Full {
        out.extend(check_scaling());
    }
    out
}
