use std::path::Path;

use indexmap::IndexMap;
use qclock::estimators::EstimatorKind;
use qclock::montecarlo::ExperimentConfig;
use qclock::ClockModel;
use serde::{Deserialize, Serialize};

use crate::args::{build_model, parse_grid, ModelArg};
use crate::error::CliError;

/// What a sweep experiment measures at each time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// Sampled spread, bias and bound of the estimator.
    #[default]
    Error,
    /// Expected estimate, enumerated exactly for small probe counts.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Range(String),
    Points(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModelName {
    OneQubit,
    TwoQubit,
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum EstimatorName {
    ClosedForm,
    Numeric,
    Combined,
    Coarse,
}

/// One `[section]` of a sweep file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct Section {
    model: ModelName,
    omega: f64,
    #[serde(rename = "Omega")]
    big_omega: Option<f64>,
    chi: Option<f64>,
    n: Option<usize>,
    probes: u64,
    trials: usize,
    seed: u64,
    estimator: Option<EstimatorName>,
    t_grid: GridSpec,
    #[serde(default)]
    kind: CurveKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepExperiment {
    pub name: String,
    pub kind: CurveKind,
    pub config: ExperimentConfig,
}

/// The estimator used when none is named.
pub fn default_estimator(model: &ClockModel) -> EstimatorKind {
    let candidates = [EstimatorKind::Combined, EstimatorKind::ClosedForm];
    candidates
        .into_iter()
        .find(|&k| qclock::estimators::check_applicable(model, k).is_ok())
        .unwrap_or(EstimatorKind::Numeric)
}

pub fn parse_sweep(text: &str) -> Result<Vec<SweepExperiment>, CliError> {
    let sections: IndexMap<String, Section> =
        toml::from_str(text).map_err(|e| CliError::Usage(format!("sweep config: {e}")))?;
    if sections.is_empty() {
        return Err(CliError::Usage("sweep config defines no experiments".into()));
    }
    sections
        .into_iter()
        .map(|(name, s)| {
            let in_section = |e: CliError| CliError::Usage(format!("sweep config [{name}]: {e}"));
            let kind = match s.model {
                ModelName::OneQubit => ModelArg::OneQubit,
                ModelName::TwoQubit => ModelArg::TwoQubit,
                ModelName::Ghz => ModelArg::Ghz,
            };
            let model = build_model(kind, s.omega, s.big_omega, s.chi, s.n).map_err(in_section)?;
            let t_grid = match &s.t_grid {
                GridSpec::Range(spec) => parse_grid(spec).map_err(in_section)?,
                GridSpec::Points(points) => points.clone(),
            };
            let estimator = match s.estimator {
                None => default_estimator(&model),
                Some(EstimatorName::ClosedForm) => EstimatorKind::ClosedForm,
                Some(EstimatorName::Numeric) => EstimatorKind::Numeric,
                Some(EstimatorName::Combined) => EstimatorKind::Combined,
                Some(EstimatorName::Coarse) => EstimatorKind::Coarse,
            };
            let config = ExperimentConfig {
                model,
                n_probes: s.probes,
                t_grid,
                trials: s.trials,
                seed: s.seed,
                estimator,
            };
            config.validate().map_err(|e| in_section(e.into()))?;
            Ok(SweepExperiment {
                name: name.clone(),
                kind: s.kind,
                config,
            })
        })
        .collect()
}

pub fn load_sweep(path: &Path) -> Result<Vec<SweepExperiment>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_sweep(&text)
}
