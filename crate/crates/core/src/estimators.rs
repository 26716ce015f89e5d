//! Maximum-likelihood time estimators.
//!
//! Closed forms exist for the one-qubit clock, the GHZ clock (through the
//! parity of its readout) and the two-qubit clock at `ω = 0.5, Ω = 1`. A
//! grid-plus-golden-section maximizer of the exact log-likelihood works for
//! every model and is the reference the closed forms are checked against.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::counts::CountVector;
use crate::error::{ClockError, Result};
use crate::model::{ghz_parity_probabilities, ClockModel};
use crate::optimize::maximize_on_window;

/// Which estimator or root produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// First closed-form root, unbiased on `[0, π]`.
    Root1,
    /// Third closed-form root, unbiased on `[π, 2π]`.
    Root3,
    /// One-qubit arcsine estimator.
    SingleWindow,
    /// Slow-oscillation estimator of the two-qubit clock alone.
    CoarseOnly,
    /// GHZ parity estimator.
    GhzWindow,
    /// Numeric likelihood maximization.
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub t_hat: f64,
    pub branch: Branch,
    /// Interval on which the estimate is identifiable.
    pub window: (f64, f64),
    pub coarse_t: Option<f64>,
    pub valid: bool,
}

/// Estimators selectable for batch experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Arcsine estimator (one-qubit, `chi = 1`) or parity estimator (GHZ).
    ClosedForm,
    Numeric,
    /// Coarse/fine estimator of the two-qubit clock at `ω = 0.5, Ω = 1`.
    Combined,
    Coarse,
}

/// `t̂ = (2/ω) asin(√(k/n))` on `[0, π/ω]`.
pub fn mle_one_qubit(counts: &CountVector, omega: f64) -> Result<EstimateReport> {
    let CountVector::OneQubit { n, k } = counts.reduced() else {
        return Err(ClockError::Domain("one-qubit estimator needs one-qubit counts".into()));
    };
    if n == 0 {
        return Err(ClockError::Domain("no probes recorded".into()));
    }
    ClockModel::one_qubit(omega, 1.0)?;
    let t_hat = 2.0 / omega * (k as f64 / n as f64).sqrt().asin();
    Ok(EstimateReport {
        t_hat,
        branch: Branch::SingleWindow,
        window: (0.0, PI / omega),
        coarse_t: None,
        valid: true,
    })
}

/// GHZ parity estimator `t̂ = (2/(nω)) asin(√(odd/shots))` on `[0, π/(nω)]`.
pub fn mle_ghz(counts: &CountVector, omega: f64, n_entangled: usize) -> Result<EstimateReport> {
    let CountVector::Ghz { shots, odd } = counts.reduced() else {
        return Err(ClockError::Domain("GHZ estimator needs GHZ counts".into()));
    };
    if shots == 0 {
        return Err(ClockError::Domain("no shots recorded".into()));
    }
    ClockModel::ghz(omega, n_entangled)?;
    let rate = n_entangled as f64 * omega;
    Ok(EstimateReport {
        t_hat: 2.0 / rate * (odd as f64 / shots as f64).sqrt().asin(),
        branch: Branch::GhzWindow,
        window: (0.0, PI / rate),
        coarse_t: None,
        valid: true,
    })
}

/// One closed-form root of the two-qubit likelihood equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub t: f64,
    /// `false` when the inner radicand came out negative, or when the root is
    /// the extraneous `x = 1` that solves the quadratic but not the
    /// likelihood equation (possible only when `k₃ = 0` and `k₁ ≠ k₂`).
    pub valid: bool,
}

impl Root {
    fn from_tan_squared(sign: f64, x: f64, scale: f64) -> Self {
        // Rounding can leave an exact-zero root a few ulps negative.
        let x = if x < 0.0 && x > -1e-12 * scale { 0.0 } else { x };
        if x < 0.0 || x.is_nan() {
            Root { t: f64::NAN, valid: false }
        } else {
            Root {
                t: sign * 4.0 * x.sqrt().atan(),
                valid: true,
            }
        }
    }
}

fn two_qubit_counts(counts: &CountVector) -> Result<[f64; 4]> {
    let k = counts
        .reduced()
        .likelihood_order()
        .ok_or_else(|| ClockError::Domain("two-qubit estimator needs two-qubit counts".into()))?;
    if k.iter().sum::<u64>() == 0 {
        return Err(ClockError::Domain("no probes recorded".into()));
    }
    Ok(k.map(|v| v as f64))
}

/// The four stationary points `t̂₁ … t̂₄` of the two-qubit log-likelihood at
/// `ω = 0.5, Ω = 1`, with all integer offsets zero. With `x = tan²(t/4)` the
/// likelihood equation is `(k₁+k₄)x² − (k₁+k₂+4k₃+2k₄)x + (k₂+k₄) = 0`.
pub fn mle_two_qubit_roots(counts: &CountVector) -> Result<[Root; 4]> {
    let [k1, k2, k3, k4] = two_qubit_counts(counts)?;
    let a = k1 + k4;
    if a == 0.0 {
        return Err(ClockError::ZeroDenominator(
            "k1 + k4 = 0: no probes in |0⟩|+⟩ or |1⟩|−⟩".into(),
        ));
    }
    let b = k1 + k2 + 4.0 * k3 + 2.0 * k4;
    let scale = b / a;
    if k3 == 0.0 {
        // The quadratic factors as (1 − x)((k₂+k₄) − (k₁+k₄)x); the (1 − x)
        // factor comes from clearing the tan(t/2) denominator.
        let other = (k2 + k4) / a;
        let spurious = k1 != k2;
        let one = |sign: f64| Root {
            t: sign * PI,
            valid: !spurious,
        };
        let genuine = |sign: f64| Root::from_tan_squared(sign, other, scale);
        return Ok(if other <= 1.0 {
            [genuine(1.0), genuine(-1.0), one(1.0), one(-1.0)]
        } else {
            [one(1.0), one(-1.0), genuine(1.0), genuine(-1.0)]
        });
    }
    let disc = (k1 - k2).powi(2) + 8.0 * (k1 + k2 + 2.0 * k4) * k3 + 16.0 * k3 * k3;
    let sqrt_disc = disc.sqrt();
    let x_minus = (b - sqrt_disc) / (2.0 * a);
    let x_plus = (b + sqrt_disc) / (2.0 * a);
    Ok([
        Root::from_tan_squared(1.0, x_minus, scale),
        Root::from_tan_squared(-1.0, x_minus, scale),
        Root::from_tan_squared(1.0, x_plus, scale),
        Root::from_tan_squared(-1.0, x_plus, scale),
    ])
}

/// `t̂₁` and `t̂₃`, using their limits when `k₁ + k₄ = 0`: the quadratic turns
/// linear, `t̂₁ = 4 atan √((k₂+k₄)/(k₁+k₂+4k₃+2k₄))` and `t̂₃ → 2π`.
fn fine_roots(counts: &CountVector) -> Result<(Root, Root)> {
    match mle_two_qubit_roots(counts) {
        Ok(r) => Ok((r[0], r[2])),
        Err(ClockError::ZeroDenominator(_)) => {
            let [k1, k2, k3, k4] = two_qubit_counts(counts)?;
            let x = (k2 + k4) / (k1 + k2 + 4.0 * k3 + 2.0 * k4);
            let mut root1 = Root::from_tan_squared(1.0, x, 1.0);
            // with k₃ = 0 as well only the extraneous x = 1 is left
            root1.valid &= k3 > 0.0;
            Ok((root1, Root { t: 2.0 * PI, valid: true }))
        }
        Err(e) => Err(e),
    }
}

/// Maximizer `(2/ω) atan √(k₂'/k₁')` of the slow-oscillation likelihood
/// `cos^{2k₁'}(ωt/2) sin^{2k₂'}(ωt/2)`, in `[0, π/ω]`.
pub fn coarse_estimator(counts: &CountVector, omega: f64) -> Result<f64> {
    let (k1, k2) = counts
        .reduced()
        .coarse_pair()
        .ok_or_else(|| ClockError::Domain("coarse estimator needs two-qubit counts".into()))?;
    if !(omega > 0.0) {
        return Err(ClockError::Domain(format!("omega must be positive, got {omega}")));
    }
    if k1 + k2 == 0 {
        return Err(ClockError::Domain("no probes found with the control qubit in |0⟩".into()));
    }
    // k1 = 0 gives atan(∞) = π/2, the top of the window.
    Ok(2.0 / omega * (k2 as f64 / k1 as f64).sqrt().atan())
}

fn is_paper_case(model: &ClockModel) -> bool {
    matches!(*model, ClockModel::TwoQubit { omega, big_omega }
        if (omega - 0.5).abs() < 1e-12 && (big_omega - 1.0).abs() < 1e-12)
}

/// Coarse/fine estimator of the two-qubit clock at `ω = 0.5, Ω = 1`: the
/// coarse estimate picks `t̂₁` on `[0, π]` (boundary included) and `t̂₃` on
/// `(π, 2π]`.
///
/// Without any `|0⟩` probes there is no coarse estimate; the report then
/// carries whichever root has the higher likelihood and is marked invalid.
pub fn combined_estimator(counts: &CountVector) -> Result<EstimateReport> {
    let model = ClockModel::two_qubit(0.5, 1.0)?;
    let (root1, root3) = fine_roots(counts)?;
    let window = (0.0, 2.0 * PI);
    let pick = |branch: Branch, coarse_t: Option<f64>, coarse_ok: bool| {
        let root = if branch == Branch::Root1 { root1 } else { root3 };
        EstimateReport {
            t_hat: root.t,
            branch,
            window,
            coarse_t,
            valid: coarse_ok && root.valid,
        }
    };
    match coarse_estimator(counts, 0.5) {
        Ok(coarse) if (0.0..=2.0 * PI).contains(&coarse) => {
            let branch = if coarse <= PI { Branch::Root1 } else { Branch::Root3 };
            Ok(pick(branch, Some(coarse), true))
        }
        Ok(coarse) => {
            let clamped = coarse.clamp(0.0, 2.0 * PI);
            let branch = if clamped <= PI { Branch::Root1 } else { Branch::Root3 };
            Ok(pick(branch, Some(clamped), false))
        }
        Err(_) => {
            let ll = |r: Root| if r.valid { log_likelihood(&model, counts, r.t) } else { f64::NEG_INFINITY };
            let branch = if ll(root1) >= ll(root3) { Branch::Root1 } else { Branch::Root3 };
            Ok(pick(branch, None, false))
        }
    }
}

/// Outcome probabilities and their time derivatives, in
/// [`CountVector::outcome_tallies`] order.
pub fn probability_rates(model: &ClockModel, t: f64) -> Vec<(f64, f64)> {
    // (cos²(ft/2), sin²(ft/2)) scaled by `weight`, with derivatives.
    let pair = |f: f64, weight: f64| {
        let (s, c) = (0.5 * f * t).sin_cos();
        let rate = weight * f * s * c;
        [(weight * c * c, -rate), (weight * s * s, rate)]
    };
    match *model {
        ClockModel::OneQubit { omega, chi } => {
            let (s, c) = (0.5 * omega * t).sin_cos();
            let (p, dp) = (chi * s * s, chi * omega * s * c);
            vec![(1.0 - p, -dp), (p, dp)]
        }
        ClockModel::TwoQubit { omega, big_omega } => {
            let mut v = pair(omega, 0.5).to_vec();
            v.extend(pair(big_omega, 0.5));
            v
        }
        ClockModel::Ghz { omega, n_entangled } => {
            let [even, odd] = pair(n_entangled as f64 * omega, 1.0);
            debug_assert!({
                let (pe, po) = ghz_parity_probabilities(omega, n_entangled, t);
                (pe - even.0).abs() < 1e-12 && (po - odd.0).abs() < 1e-12
            });
            vec![even, odd]
        }
    }
}

/// `Σₓ kₓ ln Pₓ(t)`, dropping the multinomial constant. Outcomes with zero
/// count contribute nothing; an observed outcome with `P = 0` gives `−∞`.
pub fn log_likelihood(model: &ClockModel, counts: &CountVector, t: f64) -> f64 {
    counts
        .outcome_tallies()
        .into_iter()
        .zip(probability_rates(model, t))
        .filter(|(k, _)| *k > 0)
        .map(|(k, (p, _))| if p > 0.0 { k as f64 * p.ln() } else { f64::NEG_INFINITY })
        .sum()
}

/// `∂ₜ` of [`log_likelihood`].
pub fn score(model: &ClockModel, counts: &CountVector, t: f64) -> f64 {
    counts
        .outcome_tallies()
        .into_iter()
        .zip(probability_rates(model, t))
        .filter(|(k, _)| *k > 0)
        .map(|(k, (p, dp))| if p > 0.0 { k as f64 * dp / p } else { f64::NAN })
        .sum()
}

/// Number of grid points scanned by [`mle_numeric`] before refinement.
pub const NUMERIC_GRID_POINTS: usize = 2001;
/// Relative bracket width at which golden-section refinement stops.
pub const NUMERIC_REL_TOL: f64 = 1e-10;

/// Global maximizer of the exact log-likelihood on `window`. A flat
/// likelihood returns the window midpoint marked invalid.
pub fn mle_numeric(model: &ClockModel, counts: &CountVector, window: (f64, f64)) -> Result<EstimateReport> {
    model.validate()?;
    counts.check_model(model)?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ClockError::Domain(format!("empty window [{lo}, {hi}]")));
    }
    let reduced = counts.reduced();
    let best = maximize_on_window(
        |t| log_likelihood(model, &reduced, t),
        Some(|t| score(model, &reduced, t)),
        lo,
        hi,
        NUMERIC_GRID_POINTS,
        NUMERIC_REL_TOL,
    );
    Ok(EstimateReport {
        t_hat: best.x,
        branch: Branch::Numeric,
        window,
        coarse_t: None,
        valid: best.informative,
    })
}

/// Runs the chosen estimator for `model`, or reports why it does not apply.
pub fn estimate(model: &ClockModel, counts: &CountVector, kind: EstimatorKind) -> Result<EstimateReport> {
    counts.check_model(model)?;
    check_applicable(model, kind)?;
    match (kind, *model) {
        (EstimatorKind::ClosedForm, ClockModel::OneQubit { omega, .. }) => mle_one_qubit(counts, omega),
        (EstimatorKind::ClosedForm, ClockModel::Ghz { omega, n_entangled }) => {
            mle_ghz(counts, omega, n_entangled)
        }
        (EstimatorKind::Numeric, _) => mle_numeric(model, counts, model.identifiability_window()),
        (EstimatorKind::Combined, _) => combined_estimator(counts),
        (EstimatorKind::Coarse, ClockModel::TwoQubit { omega, .. }) => {
            let window = (0.0, PI / omega);
            Ok(match coarse_estimator(counts, omega) {
                Ok(t_hat) => EstimateReport {
                    t_hat,
                    branch: Branch::CoarseOnly,
                    window,
                    coarse_t: Some(t_hat),
                    valid: true,
                },
                Err(_) => EstimateReport {
                    t_hat: 0.5 * window.1,
                    branch: Branch::CoarseOnly,
                    window,
                    coarse_t: None,
                    valid: false,
                },
            })
        }
        _ => unreachable!("checked by check_applicable"),
    }
}

/// Whether `kind` can be run on `model`.
pub fn check_applicable(model: &ClockModel, kind: EstimatorKind) -> Result<()> {
    model.validate()?;
    let ok = match (kind, *model) {
        (EstimatorKind::Numeric, _) => true,
        (EstimatorKind::ClosedForm, ClockModel::OneQubit { chi, .. }) => chi == 1.0,
        (EstimatorKind::ClosedForm, ClockModel::Ghz { .. }) => true,
        (EstimatorKind::Combined, m) => is_paper_case(&m),
        (EstimatorKind::Coarse, ClockModel::TwoQubit { .. }) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(ClockError::Config(format!("estimator {kind:?} does not apply to {model:?}")))
    }
}

/// Fisher information per probe relevant to `kind`: the coarse estimator
/// only sees the slow branch, worth `ω²/2`.
pub fn estimator_fisher(model: &ClockModel, kind: EstimatorKind, t: f64) -> Result<f64> {
    match (kind, *model) {
        (EstimatorKind::Coarse, ClockModel::TwoQubit { omega, .. }) => Ok(0.5 * omega * omega),
        _ => crate::fisher::model_fisher(model, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_examples() {
        let e = |n, k, w| mle_one_qubit(&CountVector::one_qubit(n, k).unwrap(), w).unwrap();
        assert_eq!(e(4, 0, 1.0).t_hat, 0.0);
        assert!((e(4, 4, 1.0).t_hat - PI).abs() < 1e-15);
        assert!((e(4, 2, 2.0).t_hat - PI / 4.0).abs() < 1e-15);
        assert_eq!(e(4, 2, 2.0).branch, Branch::SingleWindow);
        assert!(mle_one_qubit(&CountVector::one_qubit(0, 0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn coarse_examples() {
        let c = |a, b| coarse_estimator(&CountVector::two_qubit(a, b, 0, 0), 0.5).unwrap();
        assert!((c(5, 5) - PI).abs() < 1e-15);
        assert!((c(3, 1) - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((c(0, 7) - 2.0 * PI).abs() < 1e-15);
        assert!(coarse_estimator(&CountVector::two_qubit(0, 0, 3, 3), 0.5).is_err());
    }

    #[test]
    fn roots_zero_denominator() {
        let r = mle_two_qubit_roots(&CountVector::two_qubit(0, 3, 2, 0));
        assert!(matches!(r, Err(ClockError::ZeroDenominator(_))));
    }

    #[test]
    fn roots_when_all_counts_in_first_outcome() {
        // x² − x = 0: roots at t = 0 and t = π, the second extraneous.
        let r = mle_two_qubit_roots(&CountVector::two_qubit(9, 0, 0, 0)).unwrap();
        assert_eq!(r[0].t, 0.0);
        assert!(r[0].valid);
        assert!((r[2].t - PI).abs() < 1e-15);
        assert!(!r[2].valid);
        let even = mle_two_qubit_roots(&CountVector::two_qubit(3, 3, 0, 2)).unwrap();
        assert!(even.iter().all(|r| r.valid && (r.t.abs() - PI).abs() < 1e-15));
    }

    #[test]
    fn combined_tie_goes_to_root1() {
        let e = combined_estimator(&CountVector::two_qubit(4, 4, 3, 5)).unwrap();
        assert_eq!(e.coarse_t, Some(PI));
        assert_eq!(e.branch, Branch::Root1);
        assert!(e.valid);
    }

    #[test]
    fn combined_without_zero_branch_is_invalid() {
        let e = combined_estimator(&CountVector::two_qubit(0, 0, 3, 5)).unwrap();
        assert!(!e.valid);
        assert!(e.coarse_t.is_none());
    }

    #[test]
    fn combined_handles_vanishing_denominator() {
        // k1 = k4 = 0 near t = 2π
        let e = combined_estimator(&CountVector::two_qubit(0, 6, 6, 0)).unwrap();
        assert_eq!(e.branch, Branch::Root3);
        assert_eq!(e.t_hat, 2.0 * PI);
        assert!(e.valid);
    }

    #[test]
    fn numeric_one_qubit_half_counts() {
        let m = ClockModel::one_qubit(1.0, 1.0).unwrap();
        let e = mle_numeric(&m, &CountVector::one_qubit(10, 5).unwrap(), (0.0, PI)).unwrap();
        assert!((e.t_hat - PI / 2.0).abs() < 1e-8, "{}", e.t_hat);
        assert!(e.valid);
    }

    #[test]
    fn numeric_two_qubit_all_zero_plus() {
        let m = ClockModel::two_qubit(0.5, 1.0).unwrap();
        let e = mle_numeric(&m, &CountVector::two_qubit(12, 0, 0, 0), (0.0, PI)).unwrap();
        assert!(e.t_hat.abs() < 1e-9, "{}", e.t_hat);
    }

    #[test]
    fn numeric_flat_likelihood() {
        let m = ClockModel::one_qubit(1.0, 0.0).unwrap();
        let e = mle_numeric(&m, &CountVector::one_qubit(6, 0).unwrap(), (0.0, 2.0)).unwrap();
        assert!(!e.valid);
        assert_eq!(e.t_hat, 1.0);
    }

    #[test]
    fn numeric_rejects_mismatch_and_empty_window() {
        let m = ClockModel::one_qubit(1.0, 1.0).unwrap();
        assert!(mle_numeric(&m, &CountVector::two_qubit(1, 1, 1, 1), (0.0, 1.0)).is_err());
        assert!(mle_numeric(&m, &CountVector::one_qubit(2, 1).unwrap(), (1.0, 1.0)).is_err());
    }

    #[test]
    fn applicability() {
        let two = ClockModel::two_qubit(0.5, 1.0).unwrap();
        assert!(check_applicable(&two, EstimatorKind::Combined).is_ok());
        assert!(check_applicable(&two, EstimatorKind::ClosedForm).is_err());
        let other = ClockModel::two_qubit(0.4, 1.0).unwrap();
        assert!(matches!(check_applicable(&other, EstimatorKind::Combined), Err(ClockError::Config(_))));
        let one = ClockModel::one_qubit(1.0, 0.8).unwrap();
        assert!(check_applicable(&one, EstimatorKind::ClosedForm).is_err());
        assert!(check_applicable(&one, EstimatorKind::Numeric).is_ok());
    }

    #[test]
    fn ghz_parity_estimator() {
        let e = mle_ghz(&CountVector::ghz(8, 4).unwrap(), 1.0, 2).unwrap();
        assert!((e.t_hat - PI / 4.0).abs() < 1e-15);
        assert_eq!(e.window, (0.0, PI / 2.0));
    }

    #[test]
    fn rates_are_derivatives() {
        let models = [
            ClockModel::one_qubit(1.3, 0.7).unwrap(),
            ClockModel::two_qubit(0.5, 1.0).unwrap(),
            ClockModel::ghz(0.9, 3).unwrap(),
        ];
        let h = 1e-6;
        for m in models {
            let t = 0.77;
            let (lo, hi) = (probability_rates(&m, t - h), probability_rates(&m, t + h));
            for (i, (_, dp)) in probability_rates(&m, t).into_iter().enumerate() {
                assert!(((hi[i].0 - lo[i].0) / (2.0 * h) - dp).abs() < 1e-8);
            }
        }
    }
}
