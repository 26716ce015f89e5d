use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qclock::estimators::EstimatorKind;
use qclock::recurrence::RecurrenceMetric;
use qclock::{ClockModel, CountVector};

use crate::error::CliError;
use crate::output::Format;

/// Continuous quantum clocks: outcome probabilities, Fisher information,
/// time estimates and Monte-Carlo error sweeps.
#[derive(Debug, Parser)]
#[command(name = "qclock", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write data here instead of stdout; a run manifest goes next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Run manifest path [default: <out>.manifest.json]
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outcome probabilities over time
    Probs {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        times: TimeArgs,
    },
    /// Classical and quantum Fisher information with Cramér-Rao bounds
    Fisher {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        times: TimeArgs,
        /// Probes per estimate for the bound
        #[arg(long, default_value_t = 1)]
        probes: u64,
    },
    /// Maximum-likelihood time estimate from outcome counts
    Estimate {
        #[command(flatten)]
        model: ModelArgs,
        /// one-qubit "n,k"; two-qubit "n0+,n0-,n1+,n1-"; ghz "shots,odd"
        #[arg(long, allow_hyphen_values = true)]
        counts: String,
        #[arg(long, value_enum)]
        estimator: Option<EstimatorArg>,
    },
    /// Monte-Carlo error curves for every experiment in a config file
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimator precision of the three designs at an equal qubit budget
    Compare {
        /// Total qubits per estimate
        #[arg(long)]
        budget: u64,
        #[arg(long, default_value_t = 0.5)]
        omega: f64,
        #[arg(long = "Omega", default_value_t = 1.0)]
        big_omega: f64,
        /// Qubits per GHZ probe
        #[arg(long = "n", default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        times: TimeArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// First return of the clock to its initial readout statistics
    Recurrence {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = MetricArg::Outcome)]
        metric: MetricArg,
    },
    /// Re-run the command recorded in a run manifest
    Replay { manifest: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    OneQubit,
    TwoQubit,
    Ghz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    ClosedForm,
    Numeric,
    Combined,
    Coarse,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::ClosedForm => EstimatorKind::ClosedForm,
            EstimatorArg::Numeric => EstimatorKind::Numeric,
            EstimatorArg::Combined => EstimatorKind::Combined,
            EstimatorArg::Coarse => EstimatorKind::Coarse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Outcome,
    Ray,
}

impl From<MetricArg> for RecurrenceMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Outcome => RecurrenceMetric::Outcome,
            MetricArg::Ray => RecurrenceMetric::Ray,
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Fast frequency of the two-qubit clock
    #[arg(long = "Omega")]
    pub big_omega: Option<f64>,
    /// Visibility of the one-qubit clock [default: 1]
    #[arg(long)]
    pub chi: Option<f64>,
    /// Entangled qubits of the GHZ clock
    #[arg(long = "n")]
    pub n: Option<usize>,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ClockModel, CliError> {
        build_model(self.model, self.omega, self.big_omega, self.chi, self.n)
    }
}

/// A clock from loose parameters, rejecting ones that do not belong to `kind`.
pub fn build_model(
    kind: ModelArg,
    omega: f64,
    big_omega: Option<f64>,
    chi: Option<f64>,
    n: Option<usize>,
) -> Result<ClockModel, CliError> {
    let stray = |name: &str, given: bool| {
        if given {
            Err(CliError::Usage(format!("{name} does not apply to the {kind:?} model")))
        } else {
            Ok(())
        }
    };
    let model = match kind {
        ModelArg::OneQubit => {
            stray("Omega", big_omega.is_some())?;
            stray("n", n.is_some())?;
            ClockModel::one_qubit(omega, chi.unwrap_or(1.0))?
        }
        ModelArg::TwoQubit => {
            stray("chi", chi.is_some())?;
            stray("n", n.is_some())?;
            let big = big_omega.ok_or_else(|| CliError::Usage("the two-qubit model needs Omega".into()))?;
            ClockModel::two_qubit(omega, big)?
        }
        ModelArg::Ghz => {
            stray("chi", chi.is_some())?;
            stray("Omega", big_omega.is_some())?;
            let n = n.ok_or_else(|| CliError::Usage("the ghz model needs n".into()))?;
            ClockModel::ghz(omega, n)?
        }
    };
    Ok(model)
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    /// A single time
    #[arg(long, conflicts_with = "t_grid", allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Evenly spaced times "start:stop:points", both ends included
    #[arg(long, allow_hyphen_values = true)]
    pub t_grid: Option<String>,
}

impl TimeArgs {
    /// The requested times and whether a single `--t` was given.
    pub fn resolve(&self) -> Result<(Vec<f64>, bool), CliError> {
        match (self.t, &self.t_grid) {
            (Some(t), None) if t.is_finite() => Ok((vec![t], true)),
            (Some(t), None) => Err(CliError::Usage(format!("t must be finite, got {t}"))),
            (None, Some(spec)) => Ok((parse_grid(spec)?, false)),
            _ => Err(CliError::Usage("give one of --t or --t-grid".into())),
        }
    }
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("t-grid must be \"start:stop:points\", got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, stop, points] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let points: usize = points.parse().map_err(|_| bad())?;
    if !(start.is_finite() && stop.is_finite()) || points == 0 {
        return Err(bad());
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    if stop <= start {
        return Err(CliError::Usage(format!("t-grid stop must exceed start, got {spec:?}")));
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { stop } else { start + step * i as f64 })
        .collect())
}

pub fn parse_counts(model: &ClockModel, spec: &str) -> Result<CountVector, CliError> {
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("counts must be comma-separated non-negative integers, got {spec:?}")))?;
    let counts = match (model, &values[..]) {
        (ClockModel::OneQubit { .. }, &[n, k]) => CountVector::one_qubit(n, k)?,
        (ClockModel::TwoQubit { .. }, &[a, b, c, d]) => CountVector::two_qubit(a, b, c, d),
        (ClockModel::Ghz { .. }, &[shots, odd]) => CountVector::ghz(shots, odd)?,
        _ => {
            let form = match model {
                ClockModel::OneQubit { .. } => "n,k",
                ClockModel::TwoQubit { .. } => "n0+,n0-,n1+,n1-",
                ClockModel::Ghz { .. } => "shots,odd",
            };
            return Err(CliError::Usage(format!("counts for this model are \"{form}\", got {spec:?}")));
        }
    };
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        let g = parse_grid("0:1:5").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("2.5:9:1").unwrap(), vec![2.5]);
        for bad in ["0:1", "1:0:3", "0:1:0", "a:1:2", "0:1:2:3", "0:inf:3"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn counts_follow_the_model() {
        let two = ClockModel::two_qubit(0.5, 1.0).unwrap();
        assert_eq!(parse_counts(&two, "1, 2,3,4").unwrap(), CountVector::two_qubit(1, 2, 3, 4));
        assert!(parse_counts(&two, "1,2").is_err());
        let one = ClockModel::one_qubit(1.0, 1.0).unwrap();
        assert!(parse_counts(&one, "2,4").is_err());
        assert!(parse_counts(&one, "4,-1").is_err());
    }

    #[test]
    fn stray_parameters_are_rejected() {
        assert!(build_model(ModelArg::OneQubit, 1.0, Some(2.0), None, None).is_err());
        assert!(build_model(ModelArg::TwoQubit, 0.5, None, None, None).is_err());
        assert!(build_model(ModelArg::Ghz, 1.0, None, None, Some(3)).is_ok());
    }
}
