//! The three clock designs and their exact outcome distributions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counts::CountVector;
use crate::error::{ClockError, Result};
use crate::state::{evolve, DiagonalHamiltonian, Outcome, ProjectiveMeasurement, PureState};

/// Outcome probabilities of one probe at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub t: f64,
    pub probs: Vec<(String, f64)>,
}

impl OutcomeDistribution {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.probs.iter().find(|(l, _)| l == label).map(|(_, p)| *p)
    }

    pub fn values(&self) -> Vec<f64> {
        self.probs.iter().map(|(_, p)| *p).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.probs.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().map(|(_, p)| p).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    OneQubit,
    TwoQubit,
    Ghz,
}

/// A clock design. Build through the checked constructors; every operation
/// re-validates its model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClockModel {
    /// `|+⟩` driven by a two-level Hamiltonian with splitting `omega`,
    /// measured in `{|+⟩, |−⟩}`; `chi` is the oscillation visibility.
    OneQubit { omega: f64, chi: f64 },
    /// `|+⟩|+⟩` under `diag(ω/2, −ω/2, Ω/2, −Ω/2)`, measured in
    /// `{|0⟩,|1⟩} ⊗ {|+⟩,|−⟩}`.
    TwoQubit { omega: f64, big_omega: f64 },
    /// `(|0…0⟩ + |1…1⟩)/√2` under `−(ω/2)Σσ_z`, measured in the product
    /// `|±⟩` basis.
    Ghz { omega: f64, n_entangled: usize },
}

fn check_frequency(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(ClockError::Domain(format!(
            "{name} must be a positive finite frequency, got {value}"
        )));
    }
    Ok(())
}

fn check_chi(chi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&chi) {
        return Err(ClockError::Domain(format!("chi must lie in [0, 1], got {chi}")));
    }
    Ok(())
}

impl ClockModel {
    pub fn one_qubit(omega: f64, chi: f64) -> Result<Self> {
        let m = ClockModel::OneQubit { omega, chi };
        m.validate()?;
        Ok(m)
    }

    /// One-qubit clock from the real expansion coefficients of the energy
    /// eigenstates in the `|±⟩` basis:
    /// `|φ₀⟩ = a|+⟩ − b|−⟩`, `|φ₁⟩ = c|+⟩ + d|−⟩`.
    ///
    /// The coefficients must satisfy `a² + b² = 1`, `c² + d² = 1` and
    /// `ac − bd = 0`; the visibility is `4abcd / (ad + bc)²`.
    pub fn one_qubit_from_eigenbasis(omega: f64, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        const TOL: f64 = 1e-9;
        if (a * a + b * b - 1.0).abs() > TOL
            || (c * c + d * d - 1.0).abs() > TOL
            || (a * c - b * d).abs() > TOL
        {
            return Err(ClockError::Model(format!(
                "({a}, {b}, {c}, {d}) is not an orthonormal eigenbasis"
            )));
        }
        let chi = chi_from_eigenbasis(a, b, c, d);
        Self::one_qubit(omega, chi.clamp(0.0, 1.0))
    }

    pub fn two_qubit(omega: f64, big_omega: f64) -> Result<Self> {
        let m = ClockModel::TwoQubit { omega, big_omega };
        m.validate()?;
        Ok(m)
    }

    pub fn ghz(omega: f64, n_entangled: usize) -> Result<Self> {
        let m = ClockModel::Ghz { omega, n_entangled };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ClockModel::OneQubit { omega, chi } => {
                check_frequency("omega", omega)?;
                check_chi(chi)
            }
            ClockModel::TwoQubit { omega, big_omega } => {
                check_frequency("omega", omega)?;
                check_frequency("Omega", big_omega)
            }
            ClockModel::Ghz { omega, n_entangled } => {
                check_frequency("omega", omega)?;
                if n_entangled < 2 {
                    return Err(ClockError::Domain(format!(
                        "a GHZ clock needs at least 2 entangled qubits, got {n_entangled}"
                    )));
                }
                if n_entangled > 62 {
                    return Err(ClockError::Domain(format!(
                        "{n_entangled} entangled qubits exceeds the supported register size"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ClockModel::OneQubit { .. } => ModelKind::OneQubit,
            ClockModel::TwoQubit { .. } => ModelKind::TwoQubit,
            ClockModel::Ghz { .. } => ModelKind::Ghz,
        }
    }

    pub fn omega(&self) -> f64 {
        match *self {
            ClockModel::OneQubit { omega, .. }
            | ClockModel::TwoQubit { omega, .. }
            | ClockModel::Ghz { omega, .. } => omega,
        }
    }

    /// Qubits consumed by one probe.
    pub fn qubits_per_probe(&self) -> usize {
        match *self {
            ClockModel::OneQubit { .. } => 1,
            ClockModel::TwoQubit { .. } => 2,
            ClockModel::Ghz { n_entangled, .. } => n_entangled,
        }
    }

    /// Interval `[0, top]` on which the outcome distribution determines `t`
    /// uniquely: half the period of the slowest oscillation.
    pub fn identifiability_window(&self) -> (f64, f64) {
        let top = match *self {
            ClockModel::OneQubit { omega, .. } => PI / omega,
            ClockModel::TwoQubit { omega, big_omega } => PI / omega.min(big_omega),
            ClockModel::Ghz { omega, n_entangled } => PI / (n_entangled as f64 * omega),
        };
        (0.0, top)
    }

    /// Outcome labels in the order used by [`ClockModel::distribution`].
    pub fn outcome_labels(&self) -> Vec<String> {
        match *self {
            ClockModel::OneQubit { .. } => vec!["+".into(), "-".into()],
            ClockModel::TwoQubit { .. } => TWO_QUBIT_LABELS.iter().map(|s| s.to_string()).collect(),
            ClockModel::Ghz { n_entangled, .. } => {
                (0..1usize << n_entangled).map(|i| sign_label(i, n_entangled)).collect()
            }
        }
    }

    /// Closed-form outcome distribution at time `t`.
    pub fn distribution(&self, t: f64) -> Result<OutcomeDistribution> {
        match *self {
            ClockModel::OneQubit { omega, chi } => one_qubit_distribution(chi, omega, t),
            ClockModel::TwoQubit { omega, big_omega } => two_qubit_distribution(omega, big_omega, t),
            ClockModel::Ghz { omega, n_entangled } => ghz_distribution(omega, n_entangled, t),
        }
    }

    /// Initial state of one probe, in the Hamiltonian's eigenbasis.
    pub fn initial_state(&self) -> Result<PureState> {
        self.validate()?;
        match *self {
            ClockModel::OneQubit { chi, .. } => {
                let (a, c) = one_qubit_eigen_coefficients(chi);
                // |0⟩ ≡ φ₁ (energy +ω/2), |1⟩ ≡ φ₀ (energy −ω/2); |+⟩ = a φ₀ + c φ₁.
                PureState::normalized(&[c, a])
            }
            ClockModel::TwoQubit { .. } => PureState::normalized(&[1.0; 4]),
            ClockModel::Ghz { n_entangled, .. } => {
                let dim = 1usize << n_entangled;
                let mut amps = vec![0.0; dim];
                amps[0] = 1.0;
                amps[dim - 1] = 1.0;
                PureState::normalized(&amps)
            }
        }
    }

    pub fn hamiltonian(&self) -> Result<DiagonalHamiltonian> {
        self.validate()?;
        match *self {
            ClockModel::OneQubit { omega, .. } => {
                DiagonalHamiltonian::new(vec![omega / 2.0, -omega / 2.0])
            }
            ClockModel::TwoQubit { omega, big_omega } => DiagonalHamiltonian::new(vec![
                omega / 2.0,
                -omega / 2.0,
                big_omega / 2.0,
                -big_omega / 2.0,
            ]),
            ClockModel::Ghz { omega, n_entangled } => {
                let n = n_entangled as f64;
                DiagonalHamiltonian::new(
                    (0..1usize << n_entangled)
                        .map(|i| -0.5 * omega * (n - 2.0 * i.count_ones() as f64))
                        .collect(),
                )
            }
        }
    }

    /// The readout measurement, with outcomes in [`ClockModel::outcome_labels`] order.
    pub fn measurement(&self) -> Result<ProjectiveMeasurement> {
        self.validate()?;
        let r = |x: f64| Complex64::new(x, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            ClockModel::OneQubit { chi, .. } => {
                let (a, c) = one_qubit_eigen_coefficients(chi);
                // ⟨φ₀|−⟩ = −b = −c, ⟨φ₁|−⟩ = d = a.
                ProjectiveMeasurement::from_basis(
                    self.outcome_labels(),
                    vec![vec![r(c), r(a)], vec![r(a), r(-c)]],
                )
            }
            ClockModel::TwoQubit { .. } => {
                let z = r(0.0);
                ProjectiveMeasurement::from_basis(
                    self.outcome_labels(),
                    vec![
                        vec![r(s), r(s), z, z],
                        vec![r(s), r(-s), z, z],
                        vec![z, z, r(s), r(s)],
                        vec![z, z, r(s), r(-s)],
                    ],
                )
            }
            ClockModel::Ghz { n_entangled, .. } => {
                let dim = 1usize << n_entangled;
                let amp = (dim as f64).sqrt().recip();
                let outcomes = (0..dim)
                    .map(|signs| Outcome {
                        label: sign_label(signs, n_entangled),
                        vectors: vec![(0..dim)
                            .map(|b| {
                                let sign = if (b & signs).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                                r(sign * amp)
                            })
                            .collect()],
                    })
                    .collect();
                Ok(ProjectiveMeasurement::new_unchecked(dim, outcomes))
            }
        }
    }

    /// Outcome distribution from explicit evolution and the Born rule.
    pub fn pipeline_distribution(&self, t: f64) -> Result<OutcomeDistribution> {
        let psi = evolve(&self.initial_state()?, &self.hamiltonian()?, t)?;
        Ok(OutcomeDistribution {
            t,
            probs: self.measurement()?.probabilities(&psi)?,
        })
    }

    /// Exact distribution of the count vector of `n_probes` independent probes.
    pub fn count_distribution(&self, n_probes: u64, t: f64) -> Result<Vec<(CountVector, f64)>> {
        n_probe_count_distribution(self, n_probes, t)
    }
}

pub(crate) const TWO_QUBIT_LABELS: [&str; 4] = ["0+", "0-", "1+", "1-"];

/// `+`/`-` label for product-basis outcome `signs` (bit set = `-`), most
/// significant qubit first.
fn sign_label(signs: usize, qubits: usize) -> String {
    (0..qubits)
        .rev()
        .map(|q| if (signs >> q) & 1 == 1 { '-' } else { '+' })
        .collect()
}

/// `4abcd / (ad + bc)²`.
pub fn chi_from_eigenbasis(a: f64, b: f64, c: f64, d: f64) -> f64 {
    4.0 * a * b * c * d / (a * d + b * c).powi(2)
}

/// Eigenbasis coefficients `(a, c) = (cos θ, sin θ)` with `sin²2θ = chi`.
fn one_qubit_eigen_coefficients(chi: f64) -> (f64, f64) {
    let theta = 0.5 * chi.sqrt().asin();
    (theta.cos(), theta.sin())
}

/// `P₊ = 1 − χ sin²(ωt/2)`, `P₋ = χ sin²(ωt/2)`.
pub fn one_qubit_distribution(chi: f64, omega: f64, t: f64) -> Result<OutcomeDistribution> {
    check_chi(chi)?;
    check_frequency("omega", omega)?;
    let minus = chi * (0.5 * omega * t).sin().powi(2);
    Ok(OutcomeDistribution {
        t,
        probs: vec![("+".into(), 1.0 - minus), ("-".into(), minus)],
    })
}

/// Outcomes `0+, 0−, 1+, 1−` with `½cos²(ωt/2), ½sin²(ωt/2), ½cos²(Ωt/2), ½sin²(Ωt/2)`.
pub fn two_qubit_distribution(omega: f64, big_omega: f64, t: f64) -> Result<OutcomeDistribution> {
    check_frequency("omega", omega)?;
    check_frequency("Omega", big_omega)?;
    let (s_slow, c_slow) = (0.5 * omega * t).sin_cos();
    let (s_fast, c_fast) = (0.5 * big_omega * t).sin_cos();
    let vals = [
        0.5 * c_slow * c_slow,
        0.5 * s_slow * s_slow,
        0.5 * c_fast * c_fast,
        0.5 * s_fast * s_fast,
    ];
    Ok(OutcomeDistribution {
        t,
        probs: TWO_QUBIT_LABELS
            .iter()
            .zip(vals)
            .map(|(l, p)| (l.to_string(), p))
            .collect(),
    })
}

/// Product-basis outcomes of the GHZ clock: an even number of `-` signs has
/// probability `cos²(nωt/2)/2^(n−1)`, an odd number `sin²(nωt/2)/2^(n−1)`.
pub fn ghz_distribution(omega: f64, n_entangled: usize, t: f64) -> Result<OutcomeDistribution> {
    ClockModel::ghz(omega, n_entangled)?;
    let (p_even, p_odd) = ghz_parity_probabilities(omega, n_entangled, t);
    let scale = 0.5f64.powi(n_entangled as i32 - 1);
    Ok(OutcomeDistribution {
        t,
        probs: (0..1usize << n_entangled)
            .map(|signs| {
                let p = if signs.count_ones() % 2 == 1 { p_odd } else { p_even };
                (sign_label(signs, n_entangled), scale * p)
            })
            .collect(),
    })
}

/// Probabilities of even and odd `-` parity: `(cos²(nωt/2), sin²(nωt/2))`.
pub fn ghz_parity_probabilities(omega: f64, n_entangled: usize, t: f64) -> (f64, f64) {
    let (s, c) = (0.5 * n_entangled as f64 * omega * t).sin_cos();
    (c * c, s * s)
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn multinomial_pmf(counts: &[u64], probs: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut log_coef = ln_factorial(n);
    let mut power = 1.0;
    for (&k, &p) in counts.iter().zip(probs) {
        log_coef -= ln_factorial(k);
        if k > 0 {
            if p <= 0.0 {
                return 0.0;
            }
            power *= p.powi(k as i32);
        }
    }
    log_coef.exp() * power
}

/// Distribution of the tallies of `n_probes` independent one- or two-qubit
/// probes. GHZ probes are tallied by the Monte-Carlo module instead.
pub fn n_probe_count_distribution(
    model: &ClockModel,
    n_probes: u64,
    t: f64,
) -> Result<Vec<(CountVector, f64)>> {
    model.validate()?;
    if n_probes == 0 {
        return Err(ClockError::Domain("n_probes must be at least 1".into()));
    }
    if n_probes > i32::MAX as u64 {
        return Err(ClockError::Domain(format!("{n_probes} probes is too many to enumerate")));
    }
    let probs = model.distribution(t)?.values();
    match model.kind() {
        ModelKind::OneQubit => Ok((0..=n_probes)
            .map(|k| {
                let p = multinomial_pmf(&[n_probes - k, k], &probs);
                (CountVector::OneQubit { n: n_probes, k }, p)
            })
            .collect()),
        ModelKind::TwoQubit => Ok(CountVector::enumerate_two_qubit(n_probes)
            .map(|c| {
                let p = multinomial_pmf(&c.outcome_tallies(), &probs);
                (c, p)
            })
            .collect()),
        ModelKind::Ghz => Err(ClockError::Unsupported(
            "count distributions are not enumerated for GHZ probes".into(),
        )),
    }
}
