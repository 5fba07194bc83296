use geohmc::metric::{BackgroundMetric, ConstantMetric, GraphMetric, MetricField};
use geohmc::model::{self, LinearConstraint};
use geohmc::sampler::effective_sample_size;
use geohmc::{run_chain, ChainConfig, DMatrix, DVector, Hamiltonian, IntegratorConfig, KineticModel, PhaseState};
use proptest::prelude::*;

fn graph_kinetic(model: geohmc::TargetModel, student_nu: Option<f64>) -> KineticModel {
    let n = model.dim();
    let field = MetricField::GraphInduced(GraphMetric::new(BackgroundMetric::identity(n), model).unwrap());
    match student_nu {
        Some(nu) => KineticModel::student_t(nu, field).unwrap(),
        None => KineticModel::RiemannianQuadratic(field),
    }
}

fn kinetic_variants() -> Vec<KineticModel> {
    let lambda = DMatrix::from_row_slice(2, 2, &[1.5, -0.4, -0.4, 0.8]);
    vec![
        KineticModel::EuclideanQuadratic(ConstantMetric::new(lambda.clone()).unwrap()),
        KineticModel::student_t(4.0, MetricField::Constant(ConstantMetric::new(lambda).unwrap())).unwrap(),
        graph_kinetic(model::banana(0.7, 3.0), None),
        graph_kinetic(model::banana(0.7, 3.0), Some(6.0)),
    ]
}

fn central_diff(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let (mut a, mut b) = (x.clone(), x.clone());
        a[i] += h;
        b[i] -= h;
        (f(&a) - f(&b)) / (2.0 * h)
    })
}

fn trapezoid(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let inner: f64 = (1..n).map(|i| f(lo + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(lo) + f(hi)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kinetic_is_even_in_momentum(q in prop::array::uniform2(-2.0..2.0f64), p in prop::array::uniform2(-4.0..4.0f64)) {
        let (q, p) = (DVector::from_column_slice(&q), DVector::from_column_slice(&p));
        for k in kinetic_variants() {
            let t = k.kinetic_eval(&q, &p).unwrap();
            prop_assert_eq!(t, k.kinetic_eval(&q, &-&p).unwrap());
            let g = k.kinetic_grad_p(&q, &p).unwrap();
            prop_assert_eq!(g, -k.kinetic_grad_p(&q, &-&p).unwrap());
        }
    }

    #[test]
    fn kinetic_gradients_match_finite_differences(q in prop::array::uniform2(-1.5..1.5f64), p in prop::array::uniform2(-2.0..2.0f64)) {
        let (q, p) = (DVector::from_column_slice(&q), DVector::from_column_slice(&p));
        for k in kinetic_variants() {
            let fd_p = central_diff(|x| k.kinetic_eval(&q, x).unwrap(), &p, 1e-5);
            let fd_q = central_diff(|x| k.kinetic_eval(x, &p).unwrap(), &q, 1e-5);
            let gp = k.kinetic_grad_p(&q, &p).unwrap();
            let gq = k.kinetic_grad_q(&q, &p).unwrap();
            prop_assert!((gp - &fd_p).amax() <= 1e-6 * (1.0 + fd_p.amax()));
            prop_assert!((gq - &fd_q).amax() <= 1e-6 * (1.0 + fd_q.amax()));
        }
    }

    #[test]
    fn leapfrog_round_trip(q in prop::array::uniform2(-1.0..1.0f64), p in prop::array::uniform2(-1.0..1.0f64)) {
        let m = model::banana(0.5, 2.0);
        let k = KineticModel::identity(2);
        let ham = Hamiltonian::new(&m, &k).unwrap();
        let start = PhaseState::new(DVector::from_column_slice(&q), DVector::from_column_slice(&p));
        let cfg = IntegratorConfig::new(0.05, 15);
        let out = ham.integrate(&start, &cfg).unwrap().end;
        let back = ham.integrate(&out.flipped(), &cfg).unwrap().end;
        prop_assert!((back.q - start.q).amax() < 1e-10);
    }
}

/// `∫ exp(−T(q, p)) dp` must not depend on `q`; otherwise the `q`-marginal of
/// the joint density is not the target.
#[test]
fn momentum_normalizer_is_position_independent() {
    let cases = [
        (graph_kinetic(model::std_gaussian(1), None), (2.0 * std::f64::consts::PI).sqrt()),
        (graph_kinetic(model::std_gaussian(1), Some(5.0)), {
            // √(νπ) Γ(ν/2) / Γ((ν+1)/2) with ν = 5
            let nu = 5.0_f64;
            (nu * std::f64::consts::PI).sqrt() * statrs::function::gamma::gamma(nu / 2.0)
                / statrs::function::gamma::gamma((nu + 1.0) / 2.0)
        }),
    ];
    for (k, exact) in &cases {
        for q in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let q = DVector::from_element(1, q);
            let z = trapezoid(|p| (-k.kinetic_eval(&q, &DVector::from_element(1, p)).unwrap()).exp(), -400.0, 400.0, 400_000);
            assert!((z / exact - 1.0).abs() < 1e-6, "q={q} z={z} exact={exact}");
        }
    }
}

#[test]
fn catalog_gradients_match_finite_differences() {
    let targets = [
        model::std_gaussian(3),
        model::mvn(DVector::from_column_slice(&[1.0, -1.0]), DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap(),
        model::banana(1.0, 100.0),
        model::funnel(3, 3.0),
        model::halfspace_gaussian(2, vec![LinearConstraint::new(DVector::from_column_slice(&[1.0, 1.0]), 0.5).unwrap()]).unwrap(),
    ];
    for m in &targets {
        let n = m.dim();
        for i in 0..10 {
            let q = DVector::from_fn(n, |j, _| 0.3 + 0.15 * i as f64 - 0.2 * j as f64);
            if !m.is_feasible(&q) {
                continue;
            }
            let err = m.grad_check(&q, 1e-6).unwrap();
            assert!(err < 1e-6, "{} at {q}: {err}", m.name());
        }
    }
    // Deep in the funnel neck the gradient is large; relative error still holds.
    let f = model::funnel(3, 3.0);
    let q = DVector::from_column_slice(&[-3.0, 0.05, -0.02]);
    assert!(f.grad_check(&q, 1e-6).unwrap() < 1e-6);
}

#[test]
fn banana_moments_match_grid_quadrature() {
    let m = model::banana(0.5, 2.0);
    let moments = m.moments().unwrap().clone();
    let (n1, n2) = (800, 1600);
    let (lo1, hi1, lo2, hi2) = (-5.0, 6.0, -6.0, 30.0);
    let (h1, h2) = ((hi1 - lo1) / n1 as f64, (hi2 - lo2) / n2 as f64);
    let mut acc = [0.0_f64; 6];
    for i in 0..=n1 {
        for j in 0..=n2 {
            let q = DVector::from_column_slice(&[lo1 + i as f64 * h1, lo2 + j as f64 * h2]);
            let w = (-m.potential_eval(&q).unwrap()).exp();
            let (x, y) = (q[0], q[1]);
            for (a, v) in acc.iter_mut().zip([1.0, x, y, x * x, x * y, y * y]) {
                *a += w * v;
            }
        }
    }
    let z = acc[0];
    let (mx, my) = (acc[1] / z, acc[2] / z);
    let cov = [acc[3] / z - mx * mx, acc[4] / z - mx * my, acc[5] / z - my * my];
    let c = &moments.covariance;
    for (got, want) in [(mx, moments.mean[0]), (my, moments.mean[1]), (cov[0], c[(0, 0)]), (cov[1], c[(0, 1)]), (cov[2], c[(1, 1)])] {
        assert!((got - want).abs() < 1e-3 * (1.0 + want.abs()), "got {got}, want {want}");
    }
}

#[test]
fn halfspace_moments_match_quadrature() {
    let m = model::halfspace_gaussian(1, vec![LinearConstraint::new(DVector::from_element(1, 1.0), -0.3).unwrap()]).unwrap();
    let moments = m.moments().unwrap();
    let dens = |x: f64| {
        let q = DVector::from_element(1, x);
        if m.is_feasible(&q) { (-m.potential_eval(&q).unwrap()).exp() } else { 0.0 }
    };
    let z = trapezoid(dens, -12.0, 12.0, 2_400_001);
    let mean = trapezoid(|x| x * dens(x), -12.0, 12.0, 2_400_001) / z;
    let second = trapezoid(|x| x * x * dens(x), -12.0, 12.0, 2_400_001) / z;
    assert!((mean - moments.mean[0]).abs() < 1e-4, "{mean} vs {}", moments.mean[0]);
    assert!((second - mean * mean - moments.covariance[(0, 0)]).abs() < 1e-4);
}

/// With `εL = π` every unjittered transition maps `q ↦ −q` exactly; jittering
/// the path length breaks that periodicity.
#[test]
fn jitter_breaks_periodic_trajectories() {
    let n = 5000;
    let steps = 10;
    let cfg = ChainConfig {
        seed: 3,
        num_samples: n,
        warmup: 100,
        integrator: IntegratorConfig::new(std::f64::consts::PI / steps as f64, steps),
        jitter_steps: true,
        init: None,
    };
    let res = run_chain(&model::std_gaussian(1), &KineticModel::identity(1), &cfg).unwrap();
    let xs: Vec<f64> = res.samples.column(0).iter().copied().collect();
    let ess = effective_sample_size(&xs).unwrap();
    assert!(ess > 0.05 * n as f64, "ess {ess}");
}

/// One-dimensional graph metric on the standard Gaussian, integrated by hand:
/// `Σ̄ = 1 + q²`, `T = p²/(2(1+q²)) + ½ ln(1+q²)`.
fn graph_rhs(q: f64, p: f64) -> (f64, f64) {
    let s = 1.0 + q * q;
    (p / s, -q + p * p * q / (s * s) - q / s)
}

fn rk4(mut q: f64, mut p: f64, t: f64, steps: usize) -> (f64, f64) {
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = graph_rhs(q, p);
        let k2 = graph_rhs(q + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
        let k3 = graph_rhs(q + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
        let k4 = graph_rhs(q + h * k3.0, p + h * k3.1);
        q += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (q, p)
}

#[test]
fn generalized_leapfrog_tracks_reference_solution() {
    let m = model::std_gaussian(1);
    let k = graph_kinetic(m.clone(), None);
    let ham = Hamiltonian::new(&m, &k).unwrap();
    let start = PhaseState::new(DVector::from_element(1, 0.8), DVector::from_element(1, 0.6));
    let cfg = IntegratorConfig::new(0.01, 200);
    let traj = ham.integrate(&start, &cfg).unwrap();
    let h0 = ham.hamiltonian(&start).unwrap();
    let drift = traj.trace.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-4, "energy drift {drift}");
    let (q, p) = rk4(0.8, 0.6, 2.0, 20_000);
    assert!((traj.end.q[0] - q).abs() < 1e-4, "{} vs {q}", traj.end.q[0]);
    assert!((traj.end.p[0] - p).abs() < 1e-4, "{} vs {p}", traj.end.p[0]);
}
