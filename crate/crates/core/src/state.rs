//! Pure states, diagonal Hamiltonians and projective measurements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ClockError, Result};

const NORM_TOL: f64 = 1e-12;

/// Computational-basis label of index `i` in a register of `qubits` qubits,
/// most significant qubit first.
pub fn basis_label(i: usize, qubits: usize) -> String {
    (0..qubits)
        .rev()
        .map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn default_labels(dim: usize) -> Result<Vec<String>> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(ClockError::Model(format!(
            "dimension {dim} is not a positive power of two"
        )));
    }
    let qubits = dim.trailing_zeros() as usize;
    Ok((0..dim).map(|i| basis_label(i, qubits)).collect())
}

/// A normalized state vector over a labelled computational basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    labels: Vec<String>,
}

impl PureState {
    /// Builds a state and checks that it is normalized and power-of-two sized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let labels = default_labels(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(ClockError::Model(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes, labels })
    }

    /// Builds a state from real amplitudes, rescaling them to unit norm.
    pub fn normalized(amplitudes: &[f64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(ClockError::Model("zero vector".into()));
        }
        Self::new(
            amplitudes
                .iter()
                .map(|&a| Complex64::new(a / norm, 0.0))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(ClockError::DimensionMismatch {
                state: self.dim(),
                operator: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `1 − |⟨self|other⟩|²`.
    pub fn ray_infidelity(&self, other: &PureState) -> Result<f64> {
        Ok((1.0 - self.fidelity(other)?).max(0.0))
    }
}

/// A Hamiltonian that is diagonal in the computational basis (ħ = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalHamiltonian {
    energies: Vec<f64>,
    labels: Vec<String>,
}

impl DiagonalHamiltonian {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        let labels = default_labels(energies.len())?;
        Ok(Self { energies, labels })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `⟨ψ|H|ψ⟩` and `⟨ψ|H²|ψ⟩`.
    pub fn moments(&self, state: &PureState) -> Result<(f64, f64)> {
        self.check(state)?;
        Ok(state
            .amplitudes
            .iter()
            .zip(&self.energies)
            .fold((0.0, 0.0), |(m1, m2), (a, e)| {
                let p = a.norm_sqr();
                (m1 + p * e, m2 + p * e * e)
            }))
    }

    /// Applies `H` to a state vector (no normalization).
    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        amplitudes
            .iter()
            .zip(&self.energies)
            .map(|(a, e)| a * e)
            .collect()
    }

    fn check(&self, state: &PureState) -> Result<()> {
        if state.dim() != self.dim() {
            return Err(ClockError::DimensionMismatch {
                state: state.dim(),
                operator: self.dim(),
            });
        }
        Ok(())
    }
}

/// `|ψ(t)⟩ = exp(−iHt)|ψ⟩`, exact phase multiplication per basis state.
pub fn evolve(state: &PureState, h: &DiagonalHamiltonian, t: f64) -> Result<PureState> {
    h.check(state)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(&h.energies)
        .map(|(a, e)| a * Complex64::from_polar(1.0, -e * t))
        .collect();
    Ok(PureState {
        amplitudes,
        labels: state.labels.clone(),
    })
}

/// One outcome of a projective measurement: a label and an orthonormal basis
/// of the projector's range.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub vectors: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    dim: usize,
    outcomes: Vec<Outcome>,
}

impl ProjectiveMeasurement {
    /// Builds a measurement and verifies that the supplied vectors form an
    /// orthonormal basis of the whole space. The check is O(dim³).
    pub fn new(dim: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        let m = Self::new_unchecked(dim, outcomes);
        m.validate()?;
        Ok(m)
    }

    /// Skips the completeness check; for measurements whose structure is
    /// known to be a basis (e.g. product bases of large registers).
    pub fn new_unchecked(dim: usize, outcomes: Vec<Outcome>) -> Self {
        Self { dim, outcomes }
    }

    /// Rank-one measurement from the columns of a unitary, one outcome per
    /// column.
    pub fn from_basis(labels: Vec<String>, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = basis.len();
        let outcomes = labels
            .into_iter()
            .zip(basis)
            .map(|(label, v)| Outcome {
                label,
                vectors: vec![v],
            })
            .collect();
        Self::new(dim, outcomes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn validate(&self) -> Result<()> {
        let vectors: Vec<&Vec<Complex64>> =
            self.outcomes.iter().flat_map(|o| o.vectors.iter()).collect();
        if vectors.len() != self.dim {
            return Err(ClockError::Model(format!(
                "projectors span {} dimensions, space has {}",
                vectors.len(),
                self.dim
            )));
        }
        for (i, u) in vectors.iter().enumerate() {
            if u.len() != self.dim {
                return Err(ClockError::DimensionMismatch {
                    state: self.dim,
                    operator: u.len(),
                });
            }
            for v in &vectors[i..] {
                let ip: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                let expected = if std::ptr::eq(*u, *v) { 1.0 } else { 0.0 };
                if (ip - expected).norm() > NORM_TOL {
                    return Err(ClockError::Model(
                        "projectors are not orthogonal or do not sum to identity".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Born-rule probabilities `⟨ψ|Π_x|ψ⟩` in outcome order.
    pub fn probabilities(&self, state: &PureState) -> Result<Vec<(String, f64)>> {
        if state.dim() != self.dim {
            return Err(ClockError::DimensionMismatch {
                state: state.dim(),
                operator: self.dim,
            });
        }
        Ok(self
            .outcomes
            .iter()
            .map(|o| {
                let p = o
                    .vectors
                    .iter()
                    .map(|v| {
                        v.iter()
                            .zip(state.amplitudes())
                            .map(|(b, a)| b.conj() * a)
                            .sum::<Complex64>()
                            .norm_sqr()
                    })
                    .sum();
                (o.label.clone(), p)
            })
            .collect())
    }

    /// Born-rule probabilities together with their exact time derivatives
    /// under `H`, using `d|ψ⟩/dt = −iH|ψ⟩`.
    pub fn probabilities_with_rates(
        &self,
        state: &PureState,
        h: &DiagonalHamiltonian,
    ) -> Result<Vec<(f64, f64)>> {
        h.check(state)?;
        if state.dim() != self.dim {
            return Err(ClockError::DimensionMismatch {
                state: state.dim(),
                operator: self.dim,
            });
        }
        let minus_i = Complex64::new(0.0, -1.0);
        let dpsi: Vec<Complex64> = h
            .apply(state.amplitudes())
            .into_iter()
            .map(|a| minus_i * a)
            .collect();
        Ok(self
            .outcomes
            .iter()
            .map(|o| {
                o.vectors.iter().fold((0.0, 0.0), |(p, dp), v| {
                    let amp: Complex64 =
                        v.iter().zip(state.amplitudes()).map(|(b, a)| b.conj() * a).sum();
                    let damp: Complex64 = v.iter().zip(&dpsi).map(|(b, a)| b.conj() * a).sum();
                    (p + amp.norm_sqr(), dp + 2.0 * (amp.conj() * damp).re)
                })
            })
            .collect())
    }
}
