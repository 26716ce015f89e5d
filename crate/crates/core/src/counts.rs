//! Observed outcome tallies.

use serde::{Deserialize, Serialize};

use crate::error::{ClockError, Result};
use crate::model::{ClockModel, ModelKind};

/// Tallies from `n` probes, tagged by clock design.
///
/// Two-qubit tallies are stored by outcome. In the likelihood
/// `cos^{2k₁}(ωt/2) sin^{2k₂}(ωt/2) cos^{2k₃}(Ωt/2) sin^{2k₄}(Ωt/2)` the
/// exponents are `(k₁, k₂, k₃, k₄) = (0+, 0−, 1+, 1−)`; see
/// [`CountVector::likelihood_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CountVector {
    /// `k` of `n` probes found in `|−⟩`.
    OneQubit { n: u64, k: u64 },
    TwoQubit {
        zero_plus: u64,
        zero_minus: u64,
        one_plus: u64,
        one_minus: u64,
    },
    /// `odd` of `shots` GHZ readouts had an odd number of `-` signs.
    Ghz { shots: u64, odd: u64 },
}

impl CountVector {
    pub fn one_qubit(n: u64, k: u64) -> Result<Self> {
        if k > n {
            return Err(ClockError::Domain(format!("k = {k} exceeds n = {n}")));
        }
        Ok(CountVector::OneQubit { n, k })
    }

    pub fn two_qubit(zero_plus: u64, zero_minus: u64, one_plus: u64, one_minus: u64) -> Self {
        CountVector::TwoQubit {
            zero_plus,
            zero_minus,
            one_plus,
            one_minus,
        }
    }

    pub fn ghz(shots: u64, odd: u64) -> Result<Self> {
        if odd > shots {
            return Err(ClockError::Domain(format!("odd = {odd} exceeds shots = {shots}")));
        }
        Ok(CountVector::Ghz { shots, odd })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            CountVector::OneQubit { .. } => ModelKind::OneQubit,
            CountVector::TwoQubit { .. } => ModelKind::TwoQubit,
            CountVector::Ghz { .. } => ModelKind::Ghz,
        }
    }

    pub fn total(&self) -> u64 {
        match *self {
            CountVector::OneQubit { n, .. } => n,
            CountVector::Ghz { shots, .. } => shots,
            CountVector::TwoQubit { .. } => self.outcome_tallies().iter().sum(),
        }
    }

    /// Tallies in the order of [`ClockModel::outcome_labels`] for one- and
    /// two-qubit models, and `(even, odd)` for GHZ.
    pub fn outcome_tallies(&self) -> Vec<u64> {
        match *self {
            CountVector::OneQubit { n, k } => vec![n - k, k],
            CountVector::TwoQubit {
                zero_plus,
                zero_minus,
                one_plus,
                one_minus,
            } => vec![zero_plus, zero_minus, one_plus, one_minus],
            CountVector::Ghz { shots, odd } => vec![shots - odd, odd],
        }
    }

    /// `(k₁, k₂, k₃, k₄)` as they enter the two-qubit likelihood.
    pub fn likelihood_order(&self) -> Option<[u64; 4]> {
        match *self {
            CountVector::TwoQubit {
                zero_plus,
                zero_minus,
                one_plus,
                one_minus,
            } => Some([zero_plus, zero_minus, one_plus, one_minus]),
            _ => None,
        }
    }

    /// `(k₁', k₂')`: probes found in `|0⟩|+⟩` and `|0⟩|−⟩`.
    pub fn coarse_pair(&self) -> Option<(u64, u64)> {
        match *self {
            CountVector::TwoQubit {
                zero_plus,
                zero_minus,
                ..
            } => Some((zero_plus, zero_minus)),
            _ => None,
        }
    }

    /// The same tallies divided by their greatest common divisor. Every
    /// estimator depends on counts only through their ratios; reducing first
    /// makes estimates bit-identical under rescaling.
    pub fn reduced(&self) -> Self {
        let g = self.outcome_tallies().into_iter().fold(0, gcd);
        if g <= 1 {
            return *self;
        }
        match *self {
            CountVector::OneQubit { n, k } => CountVector::OneQubit { n: n / g, k: k / g },
            CountVector::Ghz { shots, odd } => CountVector::Ghz {
                shots: shots / g,
                odd: odd / g,
            },
            CountVector::TwoQubit {
                zero_plus,
                zero_minus,
                one_plus,
                one_minus,
            } => CountVector::two_qubit(zero_plus / g, zero_minus / g, one_plus / g, one_minus / g),
        }
    }

    pub fn scaled(&self, factor: u64) -> Self {
        match *self {
            CountVector::OneQubit { n, k } => CountVector::OneQubit {
                n: n * factor,
                k: k * factor,
            },
            CountVector::Ghz { shots, odd } => CountVector::Ghz {
                shots: shots * factor,
                odd: odd * factor,
            },
            CountVector::TwoQubit {
                zero_plus,
                zero_minus,
                one_plus,
                one_minus,
            } => CountVector::two_qubit(
                zero_plus * factor,
                zero_minus * factor,
                one_plus * factor,
                one_minus * factor,
            ),
        }
    }

    pub fn check_model(&self, model: &ClockModel) -> Result<()> {
        if self.kind() != model.kind() {
            return Err(ClockError::Domain(format!(
                "{:?} counts do not match a {:?} model",
                self.kind(),
                model.kind()
            )));
        }
        Ok(())
    }

    /// All two-qubit count vectors with `n` probes in total.
    pub fn enumerate_two_qubit(n: u64) -> impl Iterator<Item = CountVector> {
        (0..=n).flat_map(move |a| {
            (0..=n - a).flat_map(move |b| {
                (0..=n - a - b).map(move |c| CountVector::two_qubit(a, b, c, n - a - b - c))
            })
        })
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
