//! Run specification files.
//!
//! A spec is a small TOML document with `[target]`, `[kinetic]`, `[metric]`,
//! `[chain]` and `[output]` sections. Parsing is strict: every unknown key is
//! an error, and every error carries the line it refers to.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use geohmc::metric::{BackgroundMetric, ConstantMetric, GraphMetric, MetricField};
use geohmc::model::{catalog, ParamValue, Params};
use geohmc::{builtin_target, ChainConfig, DMatrix, DVector, IntegratorConfig, KineticModel, TargetModel};
use serde::Deserialize;
use toml::Spanned;

/// A spec problem anchored to a position in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SpecError {}

fn locate(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

fn at(src: &str, span: Range<usize>, message: impl Into<String>) -> SpecError {
    let (line, column) = locate(src, span.start);
    SpecError { line, column, message: message.into() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    target: Spanned<RawTarget>,
    #[serde(default)]
    kinetic: Option<Spanned<RawKinetic>>,
    #[serde(default)]
    metric: Option<Spanned<RawMetric>>,
    #[serde(default)]
    chain: Option<Spanned<RawChain>>,
    #[serde(default)]
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    name: Spanned<String>,
    #[serde(default)]
    params: std::collections::BTreeMap<String, Spanned<toml::Value>>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum KineticVariant {
    Euclidean,
    Riemannian,
    StudentT,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKinetic {
    variant: KineticVariant,
    nu: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum MetricVariant {
    Identity,
    Diagonal,
    Dense,
    Graph,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    variant: MetricVariant,
    values: Option<Spanned<Vec<f64>>>,
    matrix: Option<Spanned<Vec<Vec<f64>>>>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawChain {
    seed: Option<u64>,
    num_samples: Option<usize>,
    warmup: Option<usize>,
    step_size: Option<f64>,
    num_steps: Option<usize>,
    jitter_steps: Option<bool>,
    chains: Option<usize>,
    init: Option<Spanned<Vec<f64>>>,
    fp_tol: Option<f64>,
    fp_max_iter: Option<usize>,
    reflection_tol: Option<f64>,
    reflection_max_events: Option<usize>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    prefix: Option<String>,
}

/// A fully resolved run.
pub struct RunSpec {
    pub model: TargetModel,
    pub kinetic: KineticModel,
    pub chain: ChainConfig,
    pub chains: usize,
    pub out_dir: Option<PathBuf>,
    pub prefix: String,
    /// Location of the `[chain]` section, for anchoring runtime usage errors.
    pub chain_anchor: (usize, usize),
}

pub const DEFAULT_NUM_SAMPLES: usize = 1000;
pub const DEFAULT_WARMUP: usize = 200;
pub const DEFAULT_STEP_SIZE: f64 = 0.1;
pub const DEFAULT_NUM_STEPS: usize = 10;

fn to_param(src: &str, key: &str, v: &Spanned<toml::Value>) -> Result<ParamValue, SpecError> {
    let bad = || at(src, v.span(), format!("parameter `{key}` must be a number, a list of numbers or a list of lists"));
    let num = |x: &toml::Value| match x {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    };
    match v.get_ref() {
        x @ (toml::Value::Integer(_) | toml::Value::Float(_)) => Ok(ParamValue::Scalar(num(x).unwrap())),
        toml::Value::Array(items) if items.iter().all(|x| matches!(x, toml::Value::Array(_))) && !items.is_empty() => items
            .iter()
            .map(|row| match row {
                toml::Value::Array(r) => r.iter().map(num).collect::<Option<Vec<f64>>>(),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(ParamValue::Matrix)
            .ok_or_else(bad),
        toml::Value::Array(items) => items.iter().map(num).collect::<Option<Vec<f64>>>().map(ParamValue::Vector).ok_or_else(bad),
        _ => Err(bad()),
    }
}

fn build_target(src: &str, raw: &Spanned<RawTarget>) -> Result<TargetModel, SpecError> {
    let t = raw.get_ref();
    let name = t.name.get_ref();
    let Some(entry) = catalog().iter().find(|e| e.name == name) else {
        let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        return Err(at(src, t.name.span(), format!("unknown target `{name}`, expected one of {}", names.join(", "))));
    };
    let mut params = Params::new();
    for (key, value) in &t.params {
        if !entry.params.iter().any(|p| p.key == key) {
            let keys: Vec<_> = entry.params.iter().map(|p| p.key).collect();
            return Err(at(src, value.span(), format!("unknown parameter `{key}` for target `{name}`, expected one of {}", keys.join(", "))));
        }
        params.insert(key.clone(), to_param(src, key, value)?);
    }
    builtin_target(name, &params).map_err(|e| at(src, raw.span(), format!("invalid target: {e}")))
}

fn build_metric(src: &str, raw: Option<&Spanned<RawMetric>>, model: &TargetModel) -> Result<MetricField, SpecError> {
    let n = model.dim();
    let Some(raw) = raw else {
        return Ok(MetricField::Constant(ConstantMetric::identity(n)));
    };
    let m = raw.get_ref();
    let err = |span: Range<usize>, msg: String| at(src, span, msg);
    let matrix = |s: &Spanned<Vec<Vec<f64>>>| -> Result<DMatrix<f64>, SpecError> {
        let rows = s.get_ref();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(err(s.span(), format!("`matrix` must be {n} x {n}")));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    };
    let unused = |present: bool, key: &str| -> Result<(), SpecError> {
        if present {
            Err(err(raw.span(), format!("`{key}` is not used by metric variant {:?}", m.variant).to_lowercase()))
        } else {
            Ok(())
        }
    };
    let invalid = |e: geohmc::Error| err(raw.span(), format!("invalid metric: {e}"));
    match m.variant {
        MetricVariant::Identity => {
            unused(m.values.is_some(), "values")?;
            unused(m.matrix.is_some(), "matrix")?;
            Ok(MetricField::Constant(ConstantMetric::identity(n)))
        }
        MetricVariant::Diagonal => {
            unused(m.matrix.is_some(), "matrix")?;
            let values = m.values.as_ref().ok_or_else(|| err(raw.span(), "metric variant `diagonal` requires `values`".into()))?;
            if values.get_ref().len() != n {
                return Err(err(values.span(), format!("`values` must have {n} entries")));
            }
            ConstantMetric::diagonal(values.get_ref()).map(MetricField::Constant).map_err(invalid)
        }
        MetricVariant::Dense => {
            unused(m.values.is_some(), "values")?;
            let mat = m.matrix.as_ref().ok_or_else(|| err(raw.span(), "metric variant `dense` requires `matrix`".into()))?;
            ConstantMetric::new(matrix(mat)?).map(MetricField::Constant).map_err(invalid)
        }
        MetricVariant::Graph => {
            unused(m.values.is_some(), "values")?;
            let bg = match &m.matrix {
                Some(mat) => BackgroundMetric::new(matrix(mat)?).map_err(invalid)?,
                None => BackgroundMetric::identity(n),
            };
            GraphMetric::new(bg, model.clone()).map(MetricField::GraphInduced).map_err(invalid)
        }
    }
}

fn build_kinetic(src: &str, raw: Option<&Spanned<RawKinetic>>, metric: MetricField) -> Result<KineticModel, SpecError> {
    let (variant, nu, span) = match raw {
        Some(k) => (k.get_ref().variant, k.get_ref().nu.as_ref(), k.span()),
        None => (KineticVariant::Euclidean, None, 0..0),
    };
    if let (Some(nu), false) = (nu, variant == KineticVariant::StudentT) {
        return Err(at(src, nu.span(), "`nu` is only used by kinetic variant `student_t`"));
    }
    match variant {
        KineticVariant::Euclidean => match metric {
            MetricField::Constant(c) => Ok(KineticModel::EuclideanQuadratic(c)),
            MetricField::GraphInduced(_) => Err(at(src, span, "kinetic variant `euclidean` needs a constant metric; use `riemannian` with the graph metric")),
        },
        KineticVariant::Riemannian => Ok(KineticModel::RiemannianQuadratic(metric)),
        KineticVariant::StudentT => {
            let nu_value = nu.map_or(geohmc::kinetic::DEFAULT_STUDENT_NU, |s| *s.get_ref());
            let nu_span = nu.map_or(span, |s| s.span());
            KineticModel::student_t(nu_value, metric).map_err(|e| at(src, nu_span, format!("invalid kinetic: {e}")))
        }
    }
}

/// Parses and resolves a spec against the catalogs.
pub fn parse(src: &str) -> Result<RunSpec, SpecError> {
    let raw: RawSpec = toml::from_str(src).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        at(src, span, e.message().trim().to_string())
    })?;
    let model = build_target(src, &raw.target)?;
    let metric = build_metric(src, raw.metric.as_ref(), &model)?;
    let kinetic = build_kinetic(src, raw.kinetic.as_ref(), metric)?;

    let (chain_span, c) = match raw.chain {
        Some(c) => (c.span(), c.into_inner()),
        None => (0..0, RawChain::default()),
    };
    let defaults = IntegratorConfig::new(DEFAULT_STEP_SIZE, DEFAULT_NUM_STEPS);
    let integrator = IntegratorConfig {
        step_size: c.step_size.unwrap_or(defaults.step_size),
        num_steps: c.num_steps.unwrap_or(defaults.num_steps),
        fp_tol: c.fp_tol.unwrap_or(defaults.fp_tol),
        fp_max_iter: c.fp_max_iter.unwrap_or(defaults.fp_max_iter),
        reflection_tol: c.reflection_tol.unwrap_or(defaults.reflection_tol),
        reflection_max_events: c.reflection_max_events.unwrap_or(defaults.reflection_max_events),
    };
    let chain = ChainConfig {
        seed: c.seed.unwrap_or(0),
        num_samples: c.num_samples.unwrap_or(DEFAULT_NUM_SAMPLES),
        warmup: c.warmup.unwrap_or(DEFAULT_WARMUP),
        integrator,
        jitter_steps: c.jitter_steps.unwrap_or(false),
        init: c.init.as_ref().map(|v| DVector::from_vec(v.get_ref().clone())),
    };
    chain.validate().map_err(|e| at(src, chain_span.clone(), format!("invalid chain: {e}")))?;
    if let (Some(init), Some(raw_init)) = (&chain.init, &c.init) {
        if init.len() != model.dim() {
            return Err(at(src, raw_init.span(), format!("`init` must have {} entries", model.dim())));
        }
        if !model.is_feasible(init) {
            return Err(at(src, raw_init.span(), "`init` violates a constraint of the target"));
        }
    }
    let chains = c.chains.unwrap_or(1);
    if chains == 0 {
        return Err(at(src, chain_span, "`chains` must be at least 1"));
    }
    let output = raw.output.unwrap_or_default();
    let prefix = output.prefix.unwrap_or_else(|| "samples".into());
    if prefix.is_empty() || prefix.contains(['/', '\\']) {
        return Err(SpecError { line: 1, column: 1, message: "`output.prefix` must be a plain file name".into() });
    }
    Ok(RunSpec {
        model,
        kinetic,
        chain,
        chains,
        out_dir: output.dir,
        prefix,
        chain_anchor: locate(src, chain_span.start),
    })
}
