//! Numeric recurrence-time scans.
//!
//! A clock can only read times up to the first return of its state. The
//! return is measured either on the state ray (`1 − |⟨ψ(0)|ψ(t)⟩|²`) or on the
//! readout statistics (`1 − (Σₓ √(Pₓ(0)Pₓ(t)))²`). The two agree for the
//! one-qubit and GHZ clocks; for the two-qubit clock the readout never sees the
//! relative phase of the control qubit, so its statistics recur at `2π/ω`
//! (when `Ω/ω` is an integer) while the ray needs the control phase too.

use serde::{Deserialize, Serialize};

use crate::error::{ClockError, Result};
use crate::model::{ClockModel, OutcomeDistribution};
use crate::optimize::golden_section_min;
use crate::state::evolve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecurrenceMetric {
    /// Global-phase-invariant state infidelity.
    Ray,
    /// Infidelity of the readout distributions.
    Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceScan {
    pub epsilon: f64,
    pub t_max: f64,
    pub dt: f64,
}

impl RecurrenceScan {
    pub fn new(epsilon: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(epsilon > 0.0 && dt > 0.0 && t_max > dt) {
            return Err(ClockError::Domain(format!(
                "recurrence scan needs epsilon > 0, dt > 0, t_max > dt (got {epsilon}, {dt}, {t_max})"
            )));
        }
        Ok(Self { epsilon, t_max, dt })
    }
}

/// Classical infidelity `1 − (Σ √(pq))²` of two distributions over the same outcomes.
pub fn outcome_infidelity(p: &OutcomeDistribution, q: &OutcomeDistribution) -> f64 {
    let bc: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|((_, a), (_, b))| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    (1.0 - bc * bc).max(0.0)
}

/// Distance of the clock at time `t` from its initial condition.
pub fn return_distance(model: &ClockModel, metric: RecurrenceMetric, t: f64) -> Result<f64> {
    match metric {
        RecurrenceMetric::Ray => {
            let psi0 = model.initial_state()?;
            psi0.ray_infidelity(&evolve(&psi0, &model.hamiltonian()?, t)?)
        }
        RecurrenceMetric::Outcome => Ok(outcome_infidelity(
            &model.distribution(0.0)?,
            &model.distribution(t)?,
        )),
    }
}

/// First return of the readout statistics; see [`recurrence_time_with`].
pub fn recurrence_time(model: &ClockModel, scan: &RecurrenceScan) -> Result<Option<f64>> {
    recurrence_time_with(model, RecurrenceMetric::Outcome, scan)
}

/// Scans `t = dt, 2dt, …, t_max`. After the clock has first moved at least
/// `epsilon` away from its initial condition, each local minimum of the
/// distance on the grid is refined to `dt/100`; the first refined minimum
/// below `epsilon` is the recurrence time. Returns `None` when no return is
/// found, including when the clock never leaves its initial condition.
pub fn recurrence_time_with(
    model: &ClockModel,
    metric: RecurrenceMetric,
    scan: &RecurrenceScan,
) -> Result<Option<f64>> {
    model.validate()?;
    let RecurrenceScan { epsilon, t_max, dt } = RecurrenceScan::new(scan.epsilon, scan.t_max, scan.dt)?;

    let psi0 = model.initial_state()?;
    let h = model.hamiltonian()?;
    let d0 = model.distribution(0.0)?;
    let distance = |t: f64| -> f64 {
        match metric {
            RecurrenceMetric::Ray => evolve(&psi0, &h, t)
                .and_then(|psi| psi0.ray_infidelity(&psi))
                .unwrap_or(f64::INFINITY),
            RecurrenceMetric::Outcome => model
                .distribution(t)
                .map(|d| outcome_infidelity(&d0, &d))
                .unwrap_or(f64::INFINITY),
        }
    };

    let steps = (t_max / dt).floor() as usize;
    let mut departed = false;
    let mut window = [f64::INFINITY; 2];
    for j in 1..=steps {
        let t = j as f64 * dt;
        let v = distance(t);
        if !departed {
            departed = v >= epsilon;
            window = [window[1], v];
            continue;
        }
        let [before, mid] = window;
        if j >= 3 && mid <= before && mid <= v && before.is_finite() {
            let (lo, hi) = (t - 2.0 * dt, t);
            let t_min = golden_section_min(distance, lo, hi, dt / 100.0);
            if distance(t_min) < epsilon {
                return Ok(Some(t_min));
            }
        }
        window = [mid, v];
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scan() -> RecurrenceScan {
        RecurrenceScan::new(1e-6, 40.0, 0.01).unwrap()
    }

    #[test]
    fn one_qubit_returns_after_full_period() {
        let m = ClockModel::one_qubit(1.0, 1.0).unwrap();
        let t = recurrence_time(&m, &scan()).unwrap().unwrap();
        assert!((t - 2.0 * PI).abs() < 1e-4, "{t}");
        let t = recurrence_time_with(&m, RecurrenceMetric::Ray, &scan()).unwrap().unwrap();
        assert!((t - 2.0 * PI).abs() < 1e-4, "{t}");
    }

    #[test]
    fn two_qubit_statistics_return_before_the_ray() {
        let m = ClockModel::two_qubit(0.5, 1.0).unwrap();
        let t = recurrence_time(&m, &scan()).unwrap().unwrap();
        assert!((t - 4.0 * PI).abs() < 1e-4, "{t}");
        let t = recurrence_time_with(&m, RecurrenceMetric::Ray, &scan()).unwrap().unwrap();
        assert!((t - 8.0 * PI).abs() < 1e-4, "{t}");
    }

    #[test]
    fn ghz_pair_returns_in_half_the_time() {
        let m = ClockModel::ghz(1.0, 2).unwrap();
        let t = recurrence_time(&m, &scan()).unwrap().unwrap();
        assert!((t - PI).abs() < 1e-4, "{t}");
    }

    #[test]
    fn none_when_horizon_too_short() {
        let m = ClockModel::one_qubit(1.0, 1.0).unwrap();
        let short = RecurrenceScan::new(1e-6, 5.0, 0.01).unwrap();
        assert_eq!(recurrence_time(&m, &short).unwrap(), None);
    }

    #[test]
    fn stationary_clock_never_departs() {
        let m = ClockModel::one_qubit(1.0, 0.0).unwrap();
        assert_eq!(recurrence_time(&m, &scan()).unwrap(), None);
    }

    #[test]
    fn bad_scan_parameters() {
        assert!(RecurrenceScan::new(0.0, 1.0, 0.1).is_err());
        assert!(RecurrenceScan::new(1e-3, 0.1, 0.1).is_err());
    }
}
