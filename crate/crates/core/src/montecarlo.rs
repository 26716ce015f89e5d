//! Seeded sampling and batch estimator experiments.
//!
//! Every trial draws from its own ChaCha8 stream, selected by
//! `(seed, grid index, trial index)`, and per-point statistics are reduced in
//! trial order, so results do not depend on how many worker threads run.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counts::CountVector;
use crate::error::{ClockError, Result};
use crate::estimators::{check_applicable, estimate, estimator_fisher, EstimatorKind};
use crate::fisher::crb;
use crate::model::{ghz_parity_probabilities, ClockModel, ModelKind};

/// Largest probe count for which exact expectations are enumerated.
pub const EXACT_MAX_PROBES: u64 = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ClockModel,
    pub n_probes: u64,
    pub t_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub estimator: EstimatorKind,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate().map_err(|e| ClockError::Config(e.to_string()))?;
        check_applicable(&self.model, self.estimator)?;
        if self.n_probes == 0 {
            return Err(ClockError::Config("n_probes must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(ClockError::Config("trials must be at least 1".into()));
        }
        if self.trials > u32::MAX as usize || self.t_grid.len() > u32::MAX as usize {
            return Err(ClockError::Config("too many trials or grid points".into()));
        }
        if self.t_grid.is_empty() {
            return Err(ClockError::Config("t_grid is empty".into()));
        }
        if self.t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ClockError::Config("t_grid must be strictly increasing".into()));
        }
        let (lo, hi) = estimator_window(&self.model, self.estimator);
        let slack = 1e-9 * hi;
        if self.t_grid.iter().any(|&t| !(t >= lo - slack && t <= hi + slack)) {
            return Err(ClockError::Config(format!(
                "t_grid must lie within the estimator window [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    pub fn window(&self) -> (f64, f64) {
        estimator_window(&self.model, self.estimator)
    }
}

/// Interval on which `kind` can identify the time for `model`.
pub fn estimator_window(model: &ClockModel, kind: EstimatorKind) -> (f64, f64) {
    match (kind, *model) {
        (EstimatorKind::Combined, _) => (0.0, 2.0 * PI),
        (EstimatorKind::Coarse, ClockModel::TwoQubit { omega, .. }) => (0.0, PI / omega),
        _ => model.identifiability_window(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub t: f64,
    pub mean_estimate: f64,
    /// Standard deviation of the estimate over valid trials.
    pub std_error: f64,
    pub bias: f64,
    /// `NaN` where the Fisher information vanishes or is singular.
    pub crb: f64,
    pub n_valid: usize,
    pub n_total: usize,
    /// Window edge or Fisher singularity; excluded from saturation checks.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveMethod {
    MonteCarlo,
    /// Expectation over every possible count vector.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub method: CurveMethod,
    pub rows: Vec<ErrorRow>,
}

/// The random stream for one trial.
pub fn trial_rng(seed: u64, t_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((t_index as u64) << 32) | trial as u64);
    rng
}

fn binomial<R: rand::Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 {
        return 0;
    }
    let p = p.clamp(0.0, 1.0);
    Binomial::new(n, p).map(|b| b.sample(rng)).unwrap_or(0)
}

/// Multinomial draw of `n_probes` readouts at time `t`, as chained binomials.
pub fn sample_counts<R: rand::Rng + ?Sized>(
    model: &ClockModel,
    n_probes: u64,
    t: f64,
    rng: &mut R,
) -> Result<CountVector> {
    model.validate()?;
    Ok(match *model {
        ClockModel::OneQubit { .. } => {
            let p = model.distribution(t)?.values();
            CountVector::OneQubit {
                n: n_probes,
                k: binomial(n_probes, p[1], rng),
            }
        }
        ClockModel::TwoQubit { .. } => {
            let p = model.distribution(t)?.values();
            let mut remaining = n_probes;
            let mut mass = 1.0;
            let mut tallies = [0u64; 4];
            for i in 0..3 {
                let k = if mass > 0.0 { binomial(remaining, p[i] / mass, rng) } else { 0 };
                tallies[i] = k;
                remaining -= k;
                mass -= p[i];
            }
            tallies[3] = remaining;
            CountVector::two_qubit(tallies[0], tallies[1], tallies[2], tallies[3])
        }
        ClockModel::Ghz { omega, n_entangled } => {
            let (_, odd) = ghz_parity_probabilities(omega, n_entangled, t);
            CountVector::Ghz {
                shots: n_probes,
                odd: binomial(n_probes, odd, rng),
            }
        }
    })
}

fn row_metadata(config: &ExperimentConfig, t: f64) -> (f64, bool) {
    let (lo, hi) = config.window();
    let edge = (t - lo).abs() <= 1e-9 * hi || (t - hi).abs() <= 1e-9 * hi;
    match estimator_fisher(&config.model, config.estimator, t).and_then(|f| crb(f, config.n_probes)) {
        Ok(bound) => (bound, edge),
        Err(_) => (f64::NAN, true),
    }
}

/// Mean and population standard deviation, reduced in order.
fn moments(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn simulate_point(config: &ExperimentConfig, t_index: usize, t: f64) -> Vec<Option<f64>> {
    (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.seed, t_index, trial);
            let counts = sample_counts(&config.model, config.n_probes, t, &mut rng).ok()?;
            let report = estimate(&config.model, &counts, config.estimator).ok()?;
            (report.valid && report.t_hat.is_finite()).then_some(report.t_hat)
        })
        .collect()
}

fn monte_carlo_curve(config: &ExperimentConfig) -> ErrorCurve {
    let rows = config
        .t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let estimates: Vec<f64> = simulate_point(config, i, t).into_iter().flatten().collect();
            let (mean, std) = moments(&estimates);
            let (bound, degenerate) = row_metadata(config, t);
            ErrorRow {
                t,
                mean_estimate: mean,
                std_error: std,
                bias: mean - t,
                crb: bound,
                n_valid: estimates.len(),
                n_total: config.trials,
                degenerate,
            }
        })
        .collect();
    ErrorCurve {
        method: CurveMethod::MonteCarlo,
        rows,
    }
}

/// Monte-Carlo error curve: per grid time, mean estimate, spread `Δt`, bias
/// and the Cramér-Rao bound. Invalid estimates are left out of the moments.
pub fn error_curve(config: &ExperimentConfig) -> Result<ErrorCurve> {
    config.validate()?;
    Ok(monte_carlo_curve(config))
}

/// Like [`error_curve`] but allows grid times outside the estimator window,
/// where the estimate aliases back into the window.
pub fn error_curve_unchecked_grid(config: &ExperimentConfig) -> Result<ErrorCurve> {
    let mut probe = config.clone();
    probe.t_grid = vec![0.0];
    probe.validate()?;
    if config.t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ClockError::Config("t_grid must be strictly increasing".into()));
    }
    Ok(monte_carlo_curve(config))
}

fn enumerate_counts(model: &ClockModel, n: u64, t: f64) -> Result<Vec<(CountVector, f64)>> {
    match model.kind() {
        ModelKind::OneQubit | ModelKind::TwoQubit => model.count_distribution(n, t),
        ModelKind::Ghz => {
            let ClockModel::Ghz { omega, n_entangled } = *model else { unreachable!() };
            let (_, p) = ghz_parity_probabilities(omega, n_entangled, t);
            let one = ClockModel::one_qubit(1.0, 1.0)?;
            // parity tallies are binomial with success probability p
            let t_equiv = 2.0 * p.sqrt().asin();
            Ok(one
                .count_distribution(n, t_equiv)?
                .into_iter()
                .map(|(c, w)| {
                    let CountVector::OneQubit { n, k } = c else { unreachable!() };
                    (CountVector::Ghz { shots: n, odd: k }, w)
                })
                .collect())
        }
    }
}

/// Expected estimate and its spread. Summed exactly over all count vectors
/// when `n_probes ≤ 12`, sampled otherwise.
pub fn mean_estimator_curve(config: &ExperimentConfig) -> Result<ErrorCurve> {
    config.validate()?;
    if config.n_probes > EXACT_MAX_PROBES {
        return Ok(monte_carlo_curve(config));
    }
    let rows = config
        .t_grid
        .iter()
        .map(|&t| {
            let outcomes = enumerate_counts(&config.model, config.n_probes, t)?;
            let (mut mass, mut m1, mut n_valid) = (0.0, 0.0, 0);
            let mut valid = Vec::with_capacity(outcomes.len());
            for (counts, p) in &outcomes {
                match estimate(&config.model, counts, config.estimator) {
                    Ok(r) if r.valid && r.t_hat.is_finite() => {
                        n_valid += 1;
                        if *p > 0.0 {
                            mass += p;
                            m1 += p * r.t_hat;
                            valid.push((*p, r.t_hat));
                        }
                    }
                    _ => {}
                }
            }
            let mean = m1 / mass;
            let var = valid.iter().map(|(p, x)| p * (x - mean).powi(2)).sum::<f64>() / mass;
            let (bound, degenerate) = row_metadata(config, t);
            Ok(ErrorRow {
                t,
                mean_estimate: mean,
                std_error: var.max(0.0).sqrt(),
                bias: mean - t,
                crb: bound,
                n_valid,
                n_total: outcomes.len(),
                degenerate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorCurve {
        method: CurveMethod::Exact,
        rows,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
/// The thread count never changes results.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| ClockError::Config(format!("cannot start {n} worker threads: {e}"))),
    }
}

/// One column of a [`ResourceComparison`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub std_error: f64,
    pub bias: f64,
    pub crb: f64,
    pub in_window: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: f64,
    /// `budget` independent one-qubit probes at frequency `omega`.
    pub one_qubit: ColumnStats,
    /// `budget/2` two-qubit probes.
    pub two_qubit: ColumnStats,
    /// `budget/ghz_size` GHZ probes of `ghz_size` qubits.
    pub ghz: ColumnStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceComparison {
    pub budget_qubits: u64,
    pub omega: f64,
    pub big_omega: f64,
    pub ghz_size: usize,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub budget_qubits: u64,
    pub omega: f64,
    pub big_omega: f64,
    pub ghz_size: usize,
    pub t_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

/// Estimator precision of the three designs at an equal total qubit budget.
pub fn compare_resources(cfg: &ComparisonConfig) -> Result<ResourceComparison> {
    let budget = cfg.budget_qubits;
    if budget < 2 || !budget.is_multiple_of(2) {
        return Err(ClockError::Config(format!("qubit budget must be even and at least 2, got {budget}")));
    }
    if cfg.ghz_size < 2 || !budget.is_multiple_of(cfg.ghz_size as u64) {
        return Err(ClockError::Config(format!(
            "GHZ size {} must be at least 2 and divide the budget {budget}",
            cfg.ghz_size
        )));
    }
    let two = ClockModel::two_qubit(cfg.omega, cfg.big_omega).map_err(|e| ClockError::Config(e.to_string()))?;
    let two_estimator = if check_applicable(&two, EstimatorKind::Combined).is_ok() {
        EstimatorKind::Combined
    } else {
        EstimatorKind::Numeric
    };
    let columns = [
        (ClockModel::one_qubit(cfg.omega, 1.0)?, budget, EstimatorKind::ClosedForm),
        (two, budget / 2, two_estimator),
        (ClockModel::ghz(cfg.omega, cfg.ghz_size)?, budget / cfg.ghz_size as u64, EstimatorKind::ClosedForm),
    ];
    let curves = columns
        .iter()
        .enumerate()
        .map(|(c, &(model, n_probes, estimator))| {
            let config = ExperimentConfig {
                model,
                n_probes,
                t_grid: cfg.t_grid.clone(),
                trials: cfg.trials,
                seed: cfg.seed.wrapping_add((c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                estimator,
            };
            let window = config.window();
            error_curve_unchecked_grid(&config).map(|curve| (curve, window))
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = |c: usize, i: usize| {
        let (curve, (lo, hi)) = &curves[c];
        let row = curve.rows[i];
        ColumnStats {
            std_error: row.std_error,
            bias: row.bias,
            crb: row.crb,
            in_window: row.t >= *lo && row.t <= *hi,
        }
    };
    Ok(ResourceComparison {
        budget_qubits: budget,
        omega: cfg.omega,
        big_omega: cfg.big_omega,
        ghz_size: cfg.ghz_size,
        rows: cfg
            .t_grid
            .iter()
            .enumerate()
            .map(|(i, &t)| ComparisonRow {
                t,
                one_qubit: stats(0, i),
                two_qubit: stats(1, i),
                ghz: stats(2, i),
            })
            .collect(),
    })
}
