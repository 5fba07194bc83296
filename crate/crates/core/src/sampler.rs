//! Metropolis-corrected HMC with Gibbs momentum refresh.
//!
//! One transition draws `p ~ π(p | q)`, integrates the flow, flips the final
//! momentum and accepts with probability `min(1, exp(H_start − H_end))`. The
//! momentum is then dropped. Divergent trajectories are rejections.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::integrator::{Hamiltonian, IntegratorConfig, PhaseState};
use crate::kinetic::KineticModel;
use crate::model::TargetModel;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub seed: u64,
    pub num_samples: usize,
    pub warmup: usize,
    pub integrator: IntegratorConfig,
    /// Draw the number of leapfrog steps uniformly from `1..=L` per transition.
    pub jitter_steps: bool,
    pub init: Option<DVector<f64>>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            num_samples: 1000,
            warmup: 100,
            integrator: IntegratorConfig::default(),
            jitter_steps: false,
            init: None,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::Usage("num_samples must be at least 1".into()));
        }
        self.integrator.validate()
    }
}

/// Outcome of one transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub q: DVector<f64>,
    pub accepted: bool,
    /// `H_end − H_start`; `+∞` for divergent trajectories.
    pub delta_h: f64,
    pub divergent: bool,
}

/// Summary statistics of a sample matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// Per coordinate; `None` when the chain is too short to estimate.
    pub ess: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    /// One row per retained sample.
    pub samples: DMatrix<f64>,
    pub accepted: Vec<bool>,
    pub accept_rate: f64,
    pub delta_h: Vec<f64>,
    pub divergence_count: usize,
    pub diagnostics: Diagnostics,
}

/// One Metropolis-corrected transition from `q`.
///
/// The random stream is consumed identically whatever happens along the
/// trajectory: momentum, then path length, then the acceptance uniform.
pub fn hmc_transition<R: Rng + ?Sized>(
    ham: &Hamiltonian<'_>,
    q: &DVector<f64>,
    cfg: &IntegratorConfig,
    jitter_steps: bool,
    rng: &mut R,
) -> Result<Transition> {
    check_dim(ham.dim(), q.len())?;
    if !ham.model.is_feasible(q) {
        return Err(Error::Usage("transition started from an infeasible position".into()));
    }
    let p = ham.kinetic.sample_momentum(q, rng);
    let steps = if jitter_steps { rng.random_range(1..=cfg.num_steps) } else { cfg.num_steps };
    let log_u = rng.random::<f64>().ln();

    let reject = |delta_h: f64, divergent: bool| Transition { q: q.clone(), accepted: false, delta_h, divergent };
    let Ok(p) = p else {
        return Ok(reject(f64::INFINITY, true));
    };
    let start = PhaseState::new(q.clone(), p);
    let h_start = match ham.hamiltonian(&start) {
        Ok(h) if h.is_finite() => h,
        _ => return Ok(reject(f64::INFINITY, true)),
    };
    let run = IntegratorConfig { num_steps: steps, ..*cfg };
    let trajectory = match ham.integrate(&PhaseState { energy: Some(h_start), ..start }, &run) {
        Ok(t) => t,
        Err(_) => return Ok(reject(f64::INFINITY, true)),
    };
    // The flip makes the proposal an involution; H is even in p, so the
    // energy is unchanged by it.
    let proposal = trajectory.end.flipped();
    let h_end = proposal.energy.expect("integrate caches the final energy");
    let delta_h = h_end - h_start;
    if log_u < -delta_h {
        Ok(Transition { q: proposal.q, accepted: true, delta_h, divergent: false })
    } else {
        Ok(reject(delta_h, false))
    }
}

/// Runs one chain on random stream 0 of `cfg.seed`.
pub fn run_chain(model: &TargetModel, kinetic: &KineticModel, cfg: &ChainConfig) -> Result<ChainResult> {
    run_chain_on_stream(model, kinetic, cfg, 0)
}

/// Runs `chains` independent chains in parallel; chain `k` uses random stream
/// `k` of `cfg.seed`.
pub fn run_chains(
    model: &TargetModel,
    kinetic: &KineticModel,
    cfg: &ChainConfig,
    chains: usize,
) -> Result<Vec<ChainResult>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains as u64)
            .map(|k| scope.spawn(move || run_chain_on_stream(model, kinetic, cfg, k)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}

fn run_chain_on_stream(
    model: &TargetModel,
    kinetic: &KineticModel,
    cfg: &ChainConfig,
    stream: u64,
) -> Result<ChainResult> {
    cfg.validate()?;
    let ham = Hamiltonian::new(model, kinetic)?;
    let mut q = match &cfg.init {
        Some(q) => {
            check_dim(model.dim(), q.len())?;
            if !model.is_feasible(q) {
                return Err(Error::Usage("initial point is infeasible".into()));
            }
            q.clone()
        }
        None => model.initial_point()?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    for _ in 0..cfg.warmup {
        q = hmc_transition(&ham, &q, &cfg.integrator, cfg.jitter_steps, &mut rng)?.q;
    }
    let n = model.dim();
    let mut samples = DMatrix::zeros(cfg.num_samples, n);
    let mut accepted = Vec::with_capacity(cfg.num_samples);
    let mut delta_h = Vec::with_capacity(cfg.num_samples);
    let mut divergence_count = 0;
    for i in 0..cfg.num_samples {
        let t = hmc_transition(&ham, &q, &cfg.integrator, cfg.jitter_steps, &mut rng)?;
        divergence_count += usize::from(t.divergent);
        accepted.push(t.accepted);
        delta_h.push(t.delta_h);
        q = t.q;
        samples.row_mut(i).copy_from(&q.transpose());
    }
    let accept_rate = accepted.iter().filter(|&&a| a).count() as f64 / cfg.num_samples as f64;
    let diagnostics = summarize(&samples);
    Ok(ChainResult { samples, accepted, accept_rate, delta_h, divergence_count, diagnostics })
}

/// Sample mean, covariance (divisor `N − 1`) and per-column ESS.
pub fn summarize(samples: &DMatrix<f64>) -> Diagnostics {
    let (rows, cols) = samples.shape();
    let mean = DVector::from_iterator(cols, samples.column_iter().map(|c| c.mean()));
    let mut covariance = DMatrix::zeros(cols, cols);
    if rows > 1 {
        let centered = DMatrix::from_fn(rows, cols, |i, j| samples[(i, j)] - mean[j]);
        covariance = centered.tr_mul(&centered) / (rows as f64 - 1.0);
    }
    let ess = samples
        .column_iter()
        .map(|c| effective_sample_size(c.as_slice()).ok())
        .collect();
    Diagnostics { mean, covariance, ess }
}

/// Effective sample size from the initial positive sequence of paired
/// autocorrelations `Γ_k = ρ_2k + ρ_2k+1`:
/// `τ = −1 + 2 Σ Γ_k` over the leading positive run, `ESS = N / τ`.
///
/// A constant series has no autocorrelation and gets `ESS = N`. The estimate
/// is capped at `N log₁₀ N`, which only matters for strongly antithetic
/// chains.
pub fn effective_sample_size(xs: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 100 {
        return Err(Error::Usage(format!("ESS needs at least 100 samples, got {n}")));
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let var0 = centered.iter().map(|x| x * x).sum::<f64>() / nf;
    if var0 == 0.0 || !var0.is_finite() {
        return Ok(nf);
    }
    let rho = |lag: usize| -> f64 {
        let s: f64 = centered[..n - lag].iter().zip(&centered[lag..]).map(|(a, b)| a * b).sum();
        s / (nf * var0)
    };
    let mut sum = 0.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if k > 0 && pair <= 0.0 {
            break;
        }
        sum += pair;
        k += 1;
    }
    let tau = (-1.0 + 2.0 * sum).max(1.0 / nf.log10());
    Ok(nf / tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::std_gaussian;
    use rand_distr::StandardNormal;

    #[test]
    fn ess_bands() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let iid: Vec<f64> = (0..10_000).map(|_| rng.sample(StandardNormal)).collect();
        let e = effective_sample_size(&iid).unwrap();
        assert!((8000.0..=12000.0).contains(&e), "{e}");

        let phi: f64 = 0.9;
        let mut x = 0.0;
        let ar: Vec<f64> = (0..10_000)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                x = phi * x + (1.0 - phi * phi).sqrt() * z;
                x
            })
            .collect();
        let e = effective_sample_size(&ar).unwrap();
        assert!((350.0..=750.0).contains(&e), "{e}");

        assert_eq!(effective_sample_size(&[3.0; 500]).unwrap(), 500.0);
        assert!(effective_sample_size(&[1.0; 10]).is_err());
    }

    #[test]
    fn tiny_step_accepts_everything() {
        let m = std_gaussian(1);
        let k = KineticModel::identity(1);
        let ham = Hamiltonian::new(&m, &k).unwrap();
        let cfg = IntegratorConfig::new(1e-6, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut q = DVector::from_element(1, 0.3);
        for _ in 0..200 {
            let t = hmc_transition(&ham, &q, &cfg, false, &mut rng).unwrap();
            assert!(t.accepted);
            assert!(t.delta_h.abs() < 1e-10);
            q = t.q;
        }
    }

    #[test]
    fn huge_step_rejects_without_crashing() {
        let m = std_gaussian(1);
        let k = KineticModel::identity(1);
        let cfg = ChainConfig {
            seed: 3,
            num_samples: 500,
            warmup: 0,
            integrator: IntegratorConfig::new(10.0, 20),
            ..ChainConfig::default()
        };
        let r = run_chain(&m, &k, &cfg).unwrap();
        assert!(r.accept_rate < 0.05, "{}", r.accept_rate);
        assert!(r.samples.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn gaussian_accept_rate_is_high() {
        let m = std_gaussian(1);
        let k = KineticModel::identity(1);
        let cfg = ChainConfig {
            seed: 5,
            num_samples: 10_000,
            warmup: 0,
            integrator: IntegratorConfig::new(0.1, 20),
            ..ChainConfig::default()
        };
        let r = run_chain(&m, &k, &cfg).unwrap();
        assert!(r.accept_rate > 0.95, "{}", r.accept_rate);
        let flags = r.accepted.iter().filter(|&&a| a).count() as f64 / 10_000.0;
        assert_eq!(flags, r.accept_rate);
    }

    #[test]
    fn chains_are_deterministic() {
        let m = std_gaussian(2);
        let k = KineticModel::identity(2);
        let cfg = ChainConfig { seed: 9, num_samples: 300, ..ChainConfig::default() };
        let a = run_chain(&m, &k, &cfg).unwrap();
        let b = run_chain(&m, &k, &cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        let many = run_chains(&m, &k, &cfg, 3).unwrap();
        assert_eq!(many[0].samples, a.samples);
        assert_ne!(many[1].samples, a.samples);
    }

    #[test]
    fn potential_shift_changes_nothing() {
        let m = std_gaussian(2);
        let k = KineticModel::identity(2);
        let cfg = ChainConfig { seed: 21, num_samples: 500, integrator: IntegratorConfig::new(0.4, 8), ..ChainConfig::default() };
        let a = run_chain(&m, &k, &cfg).unwrap();
        let b = run_chain(&m.shifted(1234.5), &k, &cfg).unwrap();
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn infeasible_init_is_usage_error() {
        let m = crate::model::builtin_target("halfspace_gaussian", &Default::default()).unwrap();
        let k = KineticModel::identity(1);
        let cfg = ChainConfig { init: Some(DVector::from_element(1, -1.0)), ..ChainConfig::default() };
        assert!(matches!(run_chain(&m, &k, &cfg), Err(Error::Usage(_))));
    }
}
