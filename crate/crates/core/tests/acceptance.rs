//! End-to-end acceptance checks, run as a plain binary so the report is
//! always shown. Each criterion prints one line with its
//! measured values and its wall time against the time budget; the test fails
//! if any criterion misses its tolerance or its budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use geohmc::metric::{BackgroundMetric, ConstantMetric, GraphMetric, MetricField};
use geohmc::model::{self, LinearConstraint};
use geohmc::verify::{self, CheckResult};
use geohmc::{run_chain, ChainConfig, DMatrix, DVector, IntegratorConfig, KineticModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_checks(checks: Vec<CheckResult>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        let detail = checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "" } else { "!" };
                format!("{mark}{}={:.3e} ({}) {}", c.name, c.measured, c.bound, c.detail).trim_end().to_string()
            })
            .collect::<Vec<_>>()
            .join("; ");
        Self { passed, detail }
    }
}

fn run(id: usize, name: &str, budget_secs: u64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(budget_secs);
    let ok = out.passed && in_time;
    println!(
        "[{}] {id:>2}. {name} | {:.2}s / {budget_secs}s | {}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        out.detail
    );
    ok
}

fn reversibility() -> Outcome {
    Outcome::from_checks(verify::check_reversibility())
}

fn volume() -> Outcome {
    Outcome::from_checks(verify::check_volume())
}

fn energy_order() -> Outcome {
    Outcome::from_checks(verify::check_energy_order())
}

/// Rank-one inverse and determinant against a dense LU inverse built here.
fn rank_one_inverse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut inv_err, mut det_err) = (0.0_f64, 0.0_f64);
    for n in [1, 2, 5, 20, 50] {
        for _ in 0..20 {
            let sigma = verify::random_spd(n, &mut rng);
            let g = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let bg = BackgroundMetric::new(sigma.clone()).unwrap();
            let st = geohmc::metric::GraphMetricState::from_gradient(&bg, g.clone(), None).unwrap();
            let dense = &sigma + &g * g.transpose();
            let oracle = dense.clone().lu().try_inverse().unwrap();
            inv_err = inv_err.max((st.inverse_metric(&bg) - oracle).amax());
            let logdet = dense.lu().determinant().ln();
            det_err = det_err.max((st.logdet_metric() - logdet).abs() / logdet.abs().max(1.0));
        }
    }
    Outcome {
        passed: inv_err < 1e-10 && det_err < 1e-10,
        detail: format!("max inverse err={inv_err:.2e}, logdet rel err={det_err:.2e} (< 1e-10)"),
    }
}

fn scaling() -> Outcome {
    Outcome::from_checks(verify::check_scaling())
}

fn christoffel() -> Outcome {
    Outcome::from_checks(vec![verify::check_christoffel()])
}

fn reflection() -> Outcome {
    Outcome::from_checks(verify::check_reflection())
}

/// Truncated standard normal on `q > 0`: mean `√(2/π)`, second moment 1.
fn constrained_sampling() -> Outcome {
    let m = model::halfspace_gaussian(1, vec![LinearConstraint { normal: DVector::from_element(1, 1.0), offset: 0.0 }]).unwrap();
    let cfg = ChainConfig {
        seed: 8,
        num_samples: 20_000,
        warmup: 500,
        integrator: IntegratorConfig::new(0.5, 6),
        jitter_steps: true,
        init: Some(DVector::from_element(1, 0.5)),
    };
    let res = run_chain(&m, &KineticModel::identity(1), &cfg).unwrap();
    let xs: Vec<f64> = res.samples.column(0).iter().copied().collect();
    let infeasible = xs.iter().filter(|&&x| x.is_nan() || x <= 0.0).count();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let second = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let exact_mean = (2.0 / PI).sqrt();
    Outcome {
        passed: infeasible == 0 && (mean - exact_mean).abs() < 0.02 && (second - 1.0).abs() < 0.05,
        detail: format!(
            "infeasible={infeasible}, mean={mean:.4} (target {exact_mean:.5} ± 0.02), E[q²]={second:.4} (1 ± 0.05), accept={:.2}",
            res.accept_rate
        ),
    }
}

fn unconstrained_sampling() -> Outcome {
    let cfg = ChainConfig {
        seed: 9,
        num_samples: 20_000,
        warmup: 500,
        integrator: IntegratorConfig::new(0.8, 4),
        jitter_steps: true,
        init: None,
    };
    let res = run_chain(&model::std_gaussian(1), &KineticModel::identity(1), &cfg).unwrap();
    let mean = res.diagnostics.mean[0];
    let var = res.diagnostics.covariance[(0, 0)];
    let ess = res.diagnostics.ess[0].unwrap_or(0.0);
    let gauss_ok = ess > 1000.0 && mean.abs() < 0.05 && (0.9..=1.1).contains(&var);

    let rho = 0.9;
    let sigma = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
    let lambda = sigma.clone().try_inverse().unwrap();
    let m = model::mvn(DVector::zeros(2), sigma.clone()).unwrap();
    let k = KineticModel::EuclideanQuadratic(ConstantMetric::new(lambda).unwrap());
    let cfg = ChainConfig {
        seed: 10,
        num_samples: 20_000,
        warmup: 500,
        integrator: IntegratorConfig::new(0.12, 30),
        jitter_steps: true,
        init: None,
    };
    let res2 = run_chain(&m, &k, &cfg).unwrap();
    let cov = &res2.diagnostics.covariance;
    let worst = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| ((cov[(i, j)] - sigma[(i, j)]) / sigma[(i, j)]).abs())
        .fold(0.0, f64::max);
    Outcome {
        passed: gauss_ok && worst < 0.10,
        detail: format!(
            "std: mean={mean:.4}, var={var:.4}, ess={ess:.0}; mvn ρ=0.9: cov=[{:.3} {:.3}; {:.3}], worst rel err={worst:.3} (< 0.10)",
            cov[(0, 0)],
            cov[(0, 1)],
            cov[(1, 1)]
        ),
    }
}

fn coordinate_invariance() -> Outcome {
    Outcome::from_checks(vec![verify::check_coordinate_invariance()])
}

fn stationarity() -> Outcome {
    Outcome::from_checks(verify::check_stationarity())
}

/// Every kinetic variant must be even in `p` with an odd momentum gradient.
fn evenness() -> Outcome {
    let banana = model::banana(1.0, 10.0);
    let graph = || GraphMetric::new(BackgroundMetric::identity(2), banana.clone()).unwrap();
    let lambda = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.7]);
    let variants: Vec<(&str, KineticModel)> = vec![
        ("euclidean", KineticModel::EuclideanQuadratic(ConstantMetric::new(lambda.clone()).unwrap())),
        ("riemannian", KineticModel::RiemannianQuadratic(MetricField::GraphInduced(graph()))),
        ("student-t", KineticModel::student_t(5.0, MetricField::Constant(ConstantMetric::new(lambda).unwrap())).unwrap()),
        ("student-t/graph", KineticModel::student_t(3.0, MetricField::GraphInduced(graph())).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut parts = Vec::new();
    let mut passed = true;
    for (label, k) in &variants {
        let (mut t_err, mut g_err) = (0.0_f64, 0.0_f64);
        for _ in 0..1000 {
            let q = DVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0));
            let p = DVector::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
            let neg = -&p;
            t_err = t_err.max((k.kinetic_eval(&q, &neg).unwrap() - k.kinetic_eval(&q, &p).unwrap()).abs());
            g_err = g_err.max((k.kinetic_grad_p(&q, &neg).unwrap() + k.kinetic_grad_p(&q, &p).unwrap()).amax());
        }
        passed &= t_err <= 1e-12 && g_err <= 1e-12;
        parts.push(format!("{label}: ΔT={t_err:.1e}, odd grad={g_err:.1e}"));
    }
    Outcome { passed, detail: parts.join("; ") + " (≤ 1e-12)" }
}

fn main() {
    let results = [
        run(1, "reversibility", 5, reversibility),
        run(2, "volume preservation", 10, volume),
        run(3, "energy error order", 10, energy_order),
        run(4, "rank-one inverse", 5, rank_one_inverse),
        run(5, "metric inverse cost exponent", 60, scaling),
        run(6, "christoffel symbols", 5, christoffel),
        run(7, "reflection energy and involution", 5, reflection),
        run(8, "constrained sampling", 30, constrained_sampling),
        run(9, "unconstrained sampling", 30, unconstrained_sampling),
        run(10, "coordinate invariance", 5, coordinate_invariance),
        run(11, "stationarity", 30, stationarity),
        run(12, "momentum evenness", 5, evenness),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
