use qclock::estimators::{estimate, EstimatorKind};
use qclock::fisher::{crb, measurement_fisher, model_fisher, model_quantum_fisher};
use qclock::montecarlo::{compare_resources, error_curve, mean_estimator_curve, ColumnStats, ComparisonConfig, CurveMethod};
use qclock::recurrence::{recurrence_time_with, RecurrenceMetric, RecurrenceScan};
use qclock::{ClockModel, CountVector};
use serde::{Deserialize, Serialize};

use crate::args::{parse_counts, Command};
use crate::config::{default_estimator, load_sweep, CurveKind, SweepExperiment};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// GHZ registers above this size have too many outcomes to list one per column.
pub const MAX_LISTED_GHZ: usize = 12;

/// A fully resolved command: everything needed to reproduce its output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "kebab-case")]
pub enum Job {
    Probs {
        model: ClockModel,
        times: Vec<f64>,
    },
    Fisher {
        model: ClockModel,
        times: Vec<f64>,
        probes: u64,
        single: bool,
    },
    Estimate {
        model: ClockModel,
        counts: CountVector,
        estimator: EstimatorKind,
    },
    Sweep {
        experiments: Vec<SweepExperiment>,
    },
    Compare(ComparisonConfig),
    Recurrence {
        model: ClockModel,
        scan: RecurrenceScan,
        metric: RecurrenceMetric,
    },
}

/// A finished job. `degenerate` carries the reason when the result is
/// written but the run should still exit with the degeneracy status.
pub struct Outcome {
    pub table: Table,
    pub degenerate: Option<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, degenerate: None }
    }
}

fn check_listable(model: &ClockModel) -> Result<(), CliError> {
    match model {
        ClockModel::Ghz { n_entangled, .. } if *n_entangled > MAX_LISTED_GHZ => Err(CliError::Usage(format!(
            "a {n_entangled}-qubit GHZ register has 2^{n_entangled} outcomes; at most {MAX_LISTED_GHZ} qubits are listed"
        ))),
        _ => Ok(()),
    }
}

impl Job {
    pub fn from_command(command: Command) -> Result<Job, CliError> {
        Ok(match command {
            Command::Probs { model, times } => {
                let model = model.resolve()?;
                check_listable(&model)?;
                Job::Probs {
                    model,
                    times: times.resolve()?.0,
                }
            }
            Command::Fisher { model, times, probes } => {
                let model = model.resolve()?;
                check_listable(&model)?;
                if probes == 0 {
                    return Err(CliError::Usage("probes must be at least 1".into()));
                }
                let (times, single) = times.resolve()?;
                Job::Fisher {
                    model,
                    times,
                    probes,
                    single,
                }
            }
            Command::Estimate { model, counts, estimator } => {
                let model = model.resolve()?;
                let counts = parse_counts(&model, &counts)?;
                let estimator = estimator.map_or_else(|| default_estimator(&model), Into::into);
                qclock::estimators::check_applicable(&model, estimator)?;
                Job::Estimate { model, counts, estimator }
            }
            Command::Sweep { config } => Job::Sweep {
                experiments: load_sweep(&config)?,
            },
            Command::Compare {
                budget,
                omega,
                big_omega,
                n,
                times,
                trials,
                seed,
            } => Job::Compare(ComparisonConfig {
                budget_qubits: budget,
                omega,
                big_omega,
                ghz_size: n,
                t_grid: times.resolve()?.0,
                trials,
                seed,
            }),
            Command::Recurrence {
                model,
                epsilon,
                t_max,
                dt,
                metric,
            } => Job::Recurrence {
                model: model.resolve()?,
                scan: RecurrenceScan::new(epsilon, t_max, dt)?,
                metric: metric.into(),
            },
            Command::Replay { .. } => unreachable!("replay is resolved from its manifest"),
        })
    }

    /// Seeds of the random experiments in this job.
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            Job::Sweep { experiments } => experiments.iter().map(|e| e.config.seed).collect(),
            Job::Compare(cfg) => vec![cfg.seed],
            _ => Vec::new(),
        }
    }

    pub fn run(&self) -> Result<Outcome, CliError> {
        match self {
            Job::Probs { model, times } => probs(model, times).map(Into::into),
            Job::Fisher {
                model,
                times,
                probes,
                single,
            } => fisher(model, times, *probes, *single),
            Job::Estimate {
                model,
                counts,
                estimator,
            } => estimate_report(model, counts, *estimator),
            Job::Sweep { experiments } => sweep(experiments).map(Into::into),
            Job::Compare(cfg) => compare(cfg).map(Into::into),
            Job::Recurrence { model, scan, metric } => {
                let t = recurrence_time_with(model, *metric, scan)?;
                Ok(Table::record([("recurrence_time", Cell::Num(t.unwrap_or(f64::NAN)))]).into())
            }
        }
    }
}

fn probs(model: &ClockModel, times: &[f64]) -> Result<Table, CliError> {
    let labels = model.outcome_labels();
    let mut table = Table::new(
        std::iter::once("t".to_string())
            .chain(labels.iter().map(|l| format!("P{l}")))
            .chain(std::iter::once("sum".to_string())),
    );
    for &t in times {
        let d = model.distribution(t)?;
        let mut row = vec![Cell::Num(t)];
        row.extend(d.values().into_iter().map(Cell::Num));
        row.push(Cell::Num(d.total()));
        table.push(row);
    }
    Ok(table)
}

fn fisher(model: &ClockModel, times: &[f64], probes: u64, single: bool) -> Result<Outcome, CliError> {
    let psi0 = model.initial_state()?;
    let h = model.hamiltonian()?;
    let measurement = model.measurement()?;
    let mut table = Table::new(["t", "classical_fisher", "analytic", "qfi", "crb", "degenerate"]);
    let mut degenerate = None;
    for &t in times {
        let classical = measurement_fisher(&psi0, &h, &measurement, t)?;
        let analytic = model_fisher(model, t);
        let qfi = model_quantum_fisher(model, t)?.value;
        let information = analytic.as_ref().map_or(classical.value, |f| *f);
        let bound = crb(information, probes);
        let flagged = classical.degenerate || classical.dropped_terms > 0 || analytic.is_err() || bound.is_err();
        if flagged && degenerate.is_none() {
            let reason = match (&analytic, &bound) {
                (Err(e), _) | (_, Err(e)) => e.to_string(),
                _ => format!("an outcome probability vanishes at t = {t}"),
            };
            degenerate = Some(reason);
        }
        table.push(vec![
            Cell::Num(t),
            Cell::Num(classical.value),
            Cell::Num(analytic.unwrap_or(f64::NAN)),
            Cell::Num(qfi),
            Cell::Num(bound.unwrap_or(f64::NAN)),
            Cell::Bool(flagged),
        ]);
    }
    Ok(Outcome {
        table,
        degenerate: if single { degenerate } else { None },
    })
}

fn estimate_report(model: &ClockModel, counts: &CountVector, kind: EstimatorKind) -> Result<Outcome, CliError> {
    let r = estimate(model, counts, kind)?;
    let estimator = serde_json::to_value(kind).expect("estimator names serialize");
    let branch = serde_json::to_value(r.branch).expect("branch names serialize");
    let table = Table::record([
        ("estimator", Cell::Text(estimator.as_str().unwrap_or_default().into())),
        ("t_hat", Cell::Num(r.t_hat)),
        ("branch", Cell::Text(branch.as_str().unwrap_or_default().into())),
        ("window_lo", Cell::Num(r.window.0)),
        ("window_hi", Cell::Num(r.window.1)),
        ("coarse_t", Cell::Num(r.coarse_t.unwrap_or(f64::NAN))),
        ("valid", Cell::Bool(r.valid)),
        ("total", Cell::Int(counts.total())),
    ]);
    let degenerate = (!r.valid).then(|| format!("the counts {counts:?} do not identify a time"));
    Ok(Outcome { table, degenerate })
}

fn sweep(experiments: &[SweepExperiment]) -> Result<Table, CliError> {
    let mut table = Table::new([
        "experiment",
        "method",
        "t",
        "mean",
        "std_error",
        "bias",
        "crb",
        "n_valid",
        "n_total",
        "degenerate",
    ]);
    for exp in experiments {
        let curve = match exp.kind {
            CurveKind::Error => error_curve(&exp.config)?,
            CurveKind::Mean => mean_estimator_curve(&exp.config)?,
        };
        let method = match curve.method {
            CurveMethod::MonteCarlo => "monte-carlo",
            CurveMethod::Exact => "exact",
        };
        for r in curve.rows {
            table.push(vec![
                Cell::from(exp.name.as_str()),
                Cell::from(method),
                Cell::Num(r.t),
                Cell::Num(r.mean_estimate),
                Cell::Num(r.std_error),
                Cell::Num(r.bias),
                Cell::Num(r.crb),
                Cell::from(r.n_valid),
                Cell::from(r.n_total),
                Cell::Bool(r.degenerate),
            ]);
        }
    }
    Ok(table)
}

fn compare(cfg: &ComparisonConfig) -> Result<Table, CliError> {
    let result = compare_resources(cfg)?;
    let designs = ["one_qubit", "two_qubit", "ghz"];
    let fields = ["std_error", "bias", "crb", "in_window"];
    let mut table = Table::new(
        std::iter::once("t".to_string()).chain(designs.iter().flat_map(|d| fields.iter().map(move |f| format!("{d}_{f}")))),
    );
    for row in result.rows {
        let mut cells = vec![Cell::Num(row.t)];
        for c in [row.one_qubit, row.two_qubit, row.ghz] {
            let ColumnStats {
                std_error,
                bias,
                crb,
                in_window,
            } = c;
            cells.extend([Cell::Num(std_error), Cell::Num(bias), Cell::Num(crb), Cell::Bool(in_window)]);
        }
        table.push(cells);
    }
    Ok(table)
}
