//! Browser demo bindings.
//!
//! Everything the page needs lives in plain Rust functions so it can be tested
//! natively; the `#[wasm_bindgen]` layer only converts errors and shapes.
//! Only two-dimensional targets are offered, since the page draws the plane.

use geohmc::metric::{BackgroundMetric, GraphMetric, MetricField};
use geohmc::model::{self, LinearConstraint};
use geohmc::{run_chain, ChainConfig, DMatrix, DVector, Hamiltonian, IntegratorConfig, KineticModel, PhaseState, TargetModel};
use wasm_bindgen::prelude::*;

pub const TARGETS: &[&str] = &["banana", "funnel", "halfspace", "correlated"];

pub fn target(name: &str) -> geohmc::Result<TargetModel> {
    match name {
        "banana" => Ok(model::banana(1.0, 5.0)),
        "funnel" => Ok(model::funnel(2, 1.5)),
        // q1 > 0 and q1 + q2 < 1.5
        "halfspace" => model::halfspace_gaussian(
            2,
            vec![
                LinearConstraint::new(DVector::from_column_slice(&[1.0, 0.0]), 0.0)?,
                LinearConstraint::new(DVector::from_column_slice(&[-1.0, -1.0]), 1.5)?,
            ],
        ),
        "correlated" => model::mvn(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, 0.9, 0.9, 1.0])),
        other => Err(geohmc::Error::Usage(format!("unknown demo target `{other}`"))),
    }
}

pub fn kinetic(name: &str, model: &TargetModel) -> geohmc::Result<KineticModel> {
    match name {
        "euclidean" => Ok(KineticModel::identity(2)),
        "riemannian" => Ok(KineticModel::RiemannianQuadratic(MetricField::GraphInduced(GraphMetric::new(
            BackgroundMetric::identity(2),
            model.clone(),
        )?))),
        other => Err(geohmc::Error::Usage(format!("unknown kinetic `{other}`"))),
    }
}

/// Potential on a `nx × ny` grid over `[x0, x1] × [y0, y1]`, row-major from
/// the top-left corner; infeasible points are `+∞`.
pub fn potential_grid(model: &TargetModel, bounds: [f64; 4], nx: usize, ny: usize) -> Vec<f64> {
    let [x0, x1, y0, y1] = bounds;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = y1 - (y1 - y0) * j as f64 / (ny.max(2) - 1) as f64;
        for i in 0..nx {
            let x = x0 + (x1 - x0) * i as f64 / (nx.max(2) - 1) as f64;
            out.push(model.potential_eval(&DVector::from_column_slice(&[x, y])).unwrap_or(f64::INFINITY));
        }
    }
    out
}

/// One deterministic trajectory from `(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    /// Interleaved `x, y` positions, starting point included.
    pub points: Vec<f64>,
    /// `H` at the start and after every step.
    pub energy: Vec<f64>,
    pub reflections: usize,
}

pub fn trajectory(model: &TargetModel, kinetic: &KineticModel, q: [f64; 2], p: [f64; 2], step: f64, steps: usize) -> geohmc::Result<Path> {
    let ham = Hamiltonian::new(model, kinetic)?;
    let start = PhaseState::new(DVector::from_column_slice(&q), DVector::from_column_slice(&p));
    let h0 = ham.hamiltonian(&start)?;
    let traj = ham.integrate(&start, &IntegratorConfig::new(step, steps))?;
    let mut points = q.to_vec();
    points.extend(traj.path.iter().flat_map(|x| [x[0], x[1]]));
    let mut energy = vec![h0];
    energy.extend(traj.trace);
    Ok(Path { points, energy, reflections: traj.reflections })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    /// Interleaved `x, y` draws.
    pub points: Vec<f64>,
    pub accept_rate: f64,
    pub divergences: usize,
}

pub fn sample(model: &TargetModel, kinetic: &KineticModel, seed: u64, count: usize, step: f64, steps: usize) -> geohmc::Result<Samples> {
    let cfg = ChainConfig {
        seed,
        num_samples: count,
        warmup: 100,
        integrator: IntegratorConfig::new(step, steps),
        jitter_steps: true,
        init: None,
    };
    let res = run_chain(model, kinetic, &cfg)?;
    Ok(Samples {
        points: res.samples.row_iter().flat_map(|r| [r[0], r[1]]).collect(),
        accept_rate: res.accept_rate,
        divergences: res.divergence_count,
    })
}

fn js(e: geohmc::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A target/kinetic pair selected on the page.
#[wasm_bindgen]
pub struct Demo {
    model: TargetModel,
    kinetic: KineticModel,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(target_name: &str, kinetic_name: &str) -> Result<Demo, JsError> {
        let model = target(target_name).map_err(js)?;
        let kinetic = kinetic(kinetic_name, &model).map_err(js)?;
        Ok(Demo { model, kinetic })
    }

    #[wasm_bindgen(js_name = potentialGrid)]
    pub fn potential_grid(&self, x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Vec<f64> {
        potential_grid(&self.model, [x0, x1, y0, y1], nx, ny)
    }

    /// Returns `[reflections, n_points, x0, y0, x1, y1, …, H0, H1, …]`.
    pub fn trajectory(&self, q1: f64, q2: f64, p1: f64, p2: f64, step: f64, steps: usize) -> Result<Vec<f64>, JsError> {
        let path = trajectory(&self.model, &self.kinetic, [q1, q2], [p1, p2], step, steps).map_err(js)?;
        let mut out = vec![path.reflections as f64, (path.points.len() / 2) as f64];
        out.extend(path.points);
        out.extend(path.energy);
        Ok(out)
    }

    /// Returns `[accept_rate, divergences, x0, y0, x1, y1, …]`.
    pub fn sample(&self, seed: u32, count: usize, step: f64, steps: usize) -> Result<Vec<f64>, JsError> {
        let s = sample(&self.model, &self.kinetic, u64::from(seed), count, step, steps).map_err(js)?;
        let mut out = vec![s.accept_rate, s.divergences as f64];
        out.extend(s.points);
        Ok(out)
    }

    #[wasm_bindgen(js_name = isFeasible)]
    pub fn is_feasible(&self, q1: f64, q2: f64) -> bool {
        self.model.is_feasible(&DVector::from_column_slice(&[q1, q2]))
    }
}
