//! Classical and quantum Fisher information and the Cramér-Rao bound.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ClockError, Result};
use crate::model::{ClockModel, OutcomeDistribution};
use crate::state::{evolve, DiagonalHamiltonian, ProjectiveMeasurement, PureState};

/// Probabilities below this are treated as exact zeros.
pub const ZERO_PROB: f64 = 1e-12;
/// A zero-probability outcome whose rate exceeds this makes the point degenerate.
pub const ZERO_RATE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FisherKind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    /// Information per probe, in units of time⁻².
    pub value: f64,
    pub kind: FisherKind,
    /// Outcomes skipped because both `P` and `∂P` vanish.
    pub dropped_terms: usize,
    /// Some outcome has `P = 0` with a nonzero rate, so the log-derivative
    /// diverges and `value` excludes it.
    pub degenerate: bool,
}

impl FisherReport {
    pub fn crb(&self, n: u64) -> Result<f64> {
        crb(self.value, n)
    }
}

/// `Σₓ (∂ₜPₓ)² / Pₓ` given probabilities and their rates.
fn fisher_from_rates(pairs: impl Iterator<Item = (f64, f64)>) -> FisherReport {
    let mut report = FisherReport {
        value: 0.0,
        kind: FisherKind::Classical,
        dropped_terms: 0,
        degenerate: false,
    };
    for (p, dp) in pairs {
        if p < ZERO_PROB {
            if dp.abs() < ZERO_RATE {
                report.dropped_terms += 1;
            } else {
                report.degenerate = true;
            }
            continue;
        }
        report.value += dp * dp / p;
    }
    report
}

/// Classical Fisher information of a time-dependent distribution at `t`,
/// with central finite differences of step `h_step`.
pub fn classical_fisher<F>(dist_fn: F, t: f64, h_step: f64) -> Result<FisherReport>
where
    F: Fn(f64) -> Result<OutcomeDistribution>,
{
    if !(h_step > 0.0) {
        return Err(ClockError::Domain(format!("h_step must be positive, got {h_step}")));
    }
    let (p, lo, hi) = (dist_fn(t)?, dist_fn(t - h_step)?, dist_fn(t + h_step)?);
    if p.probs.len() != lo.probs.len() || p.probs.len() != hi.probs.len() {
        return Err(ClockError::Model("outcome set changes with t".into()));
    }
    Ok(fisher_from_rates(
        p.values()
            .into_iter()
            .zip(lo.values().into_iter().zip(hi.values()))
            .map(|(p, (l, h))| (p, (h - l) / (2.0 * h_step))),
    ))
}

/// Classical Fisher information of `measurement` on `exp(−iHt)|ψ₀⟩`, with
/// exact probability rates.
pub fn measurement_fisher(
    initial: &PureState,
    h: &DiagonalHamiltonian,
    measurement: &ProjectiveMeasurement,
    t: f64,
) -> Result<FisherReport> {
    let psi = evolve(initial, h, t)?;
    Ok(fisher_from_rates(
        measurement.probabilities_with_rates(&psi, h)?.into_iter(),
    ))
}

/// Closed-form Fisher information of the one-qubit clock,
/// `χ²ω² sin²(ωt) / [2χ(1−χ)(1−cos ωt) + χ² sin²(ωt)]`.
pub fn fisher_one_qubit_analytic(chi: f64, omega: f64, t: f64) -> Result<f64> {
    ClockModel::one_qubit(omega, chi)?;
    let (s, c) = (omega * t).sin_cos();
    let denominator = 2.0 * chi * (1.0 - chi) * (1.0 - c) + chi * chi * s * s;
    if denominator.abs() < 1e-14 {
        return Err(ClockError::Singular {
            t,
            what: format!("one-qubit Fisher information with chi = {chi}, omega = {omega}"),
        });
    }
    Ok(chi * chi * omega * omega * s * s / denominator)
}

/// Fisher information per probe of each clock's own readout, from closed forms.
pub fn model_fisher(model: &ClockModel, t: f64) -> Result<f64> {
    model.validate()?;
    match *model {
        ClockModel::OneQubit { omega, chi } => fisher_one_qubit_analytic(chi, omega, t),
        ClockModel::TwoQubit { omega, big_omega } => Ok(0.5 * (omega * omega + big_omega * big_omega)),
        ClockModel::Ghz { omega, n_entangled } => {
            let n = n_entangled as f64;
            Ok(n * n * omega * omega)
        }
    }
}

/// `1 / √(n F)`.
pub fn crb(fisher: f64, n: u64) -> Result<f64> {
    if !(fisher > 0.0) {
        return Err(ClockError::Domain(format!("Fisher information must be positive, got {fisher}")));
    }
    if n == 0 {
        return Err(ClockError::Domain("n must be at least 1".into()));
    }
    Ok(1.0 / (n as f64 * fisher).sqrt())
}

/// A density matrix in spectral form.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors.
    eigenvectors: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_spectrum(eigenvalues: Vec<f64>, eigenvectors: DMatrix<Complex64>) -> Result<Self> {
        let dim = eigenvalues.len();
        if eigenvectors.nrows() != dim || eigenvectors.ncols() != dim {
            return Err(ClockError::DimensionMismatch {
                state: dim,
                operator: eigenvectors.nrows(),
            });
        }
        let trace: f64 = eigenvalues.iter().sum();
        if (trace - 1.0).abs() > 1e-9 {
            return Err(ClockError::Domain(format!("density matrix trace is {trace}, expected 1")));
        }
        if eigenvalues.iter().any(|&l| l < -1e-9) {
            return Err(ClockError::Domain("density matrix has a negative eigenvalue".into()));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let dim = state.dim();
        // Complete |ψ⟩ to an orthonormal basis; the other eigenvalues are 0.
        let mut basis = DMatrix::<Complex64>::zeros(dim, dim);
        basis.set_column(0, &DVector::from_column_slice(state.amplitudes()));
        let mut filled = 1;
        for e in 0..dim {
            if filled == dim {
                break;
            }
            let mut v = DVector::<Complex64>::zeros(dim);
            v[e] = Complex64::new(1.0, 0.0);
            for j in 0..filled {
                let u = basis.column(j).into_owned();
                let proj = u.dotc(&v);
                v -= u * proj;
            }
            let norm = v.norm();
            if norm > 1e-8 {
                basis.set_column(filled, &(v / Complex64::new(norm, 0.0)));
                filled += 1;
            }
        }
        let mut eigenvalues = vec![0.0; dim];
        eigenvalues[0] = 1.0;
        Self {
            eigenvalues,
            eigenvectors: basis,
        }
    }

    /// Diagonalizes a Hermitian, unit-trace matrix.
    pub fn from_matrix(rho: &DMatrix<Complex64>) -> Result<Self> {
        if !rho.is_square() {
            return Err(ClockError::Domain("density matrix is not square".into()));
        }
        if (rho - rho.adjoint()).iter().any(|z| z.norm() > 1e-10) {
            return Err(ClockError::Domain("density matrix is not Hermitian".into()));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(ClockError::Domain(format!("density matrix trace is {trace}, expected 1")));
        }
        let eig = rho.clone().symmetric_eigen();
        Self::from_spectrum(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// `F_Q = 2 Σ_{k,l} (λₖ−λₗ)²/(λₖ+λₗ) |⟨k|A|l⟩|²` for the encoding
/// `ρ(θ) = e^{−iθA} ρ e^{iθA}`; pairs with `λₖ+λₗ < 1e-12` are skipped.
pub fn quantum_fisher(rho: &DensityMatrix, encoder: &DMatrix<Complex64>) -> Result<f64> {
    let dim = rho.dim();
    if encoder.nrows() != dim || encoder.ncols() != dim {
        return Err(ClockError::DimensionMismatch {
            state: dim,
            operator: encoder.nrows(),
        });
    }
    let a_eig = rho.eigenvectors.adjoint() * encoder * &rho.eigenvectors;
    let mut f = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            let (lk, ll) = (rho.eigenvalues[k], rho.eigenvalues[l]);
            if lk + ll < ZERO_PROB {
                continue;
            }
            f += (lk - ll).powi(2) / (lk + ll) * a_eig[(k, l)].norm_sqr();
        }
    }
    Ok(2.0 * f)
}

/// Pure-state shortcut `4 (⟨H²⟩ − ⟨H⟩²)`.
pub fn quantum_fisher_pure(state: &PureState, h: &DiagonalHamiltonian) -> Result<f64> {
    let (m1, m2) = h.moments(state)?;
    Ok((4.0 * (m2 - m1 * m1)).max(0.0))
}

pub fn diagonal_matrix(h: &DiagonalHamiltonian) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        h.dim(),
        h.energies().iter().map(|&e| Complex64::new(e, 0.0)),
    ))
}

/// Quantum Fisher information of a clock's probe state at time `t`, with its
/// Hamiltonian as the encoder.
pub fn model_quantum_fisher(model: &ClockModel, t: f64) -> Result<FisherReport> {
    let h = model.hamiltonian()?;
    let psi = evolve(&model.initial_state()?, &h, t)?;
    Ok(FisherReport {
        value: quantum_fisher_pure(&psi, &h)?,
        kind: FisherKind::Quantum,
        dropped_terms: 0,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn crb_examples() {
        assert!((crb(1.0, 100).unwrap() - 0.1).abs() < 1e-15);
        assert!((crb(0.625, 1).unwrap() - 1.264_911_064_067_351_7).abs() < 1e-12);
        let (omega, n) = (0.8, 600u64);
        let two = crb(4.0 * omega * omega, n / 2).unwrap();
        let three = crb(9.0 * omega * omega, n / 3).unwrap();
        assert!((two - 1.0 / (2.0 * n as f64 * omega * omega).sqrt()).abs() < 1e-14);
        assert!((three - 1.0 / (3.0 * n as f64 * omega * omega).sqrt()).abs() < 1e-14);
        assert!(crb(0.0, 10).is_err());
        assert!(crb(1.0, 0).is_err());
    }

    #[test]
    fn analytic_examples() {
        assert!((fisher_one_qubit_analytic(1.0, 3.0, 0.7).unwrap() - 9.0).abs() < 1e-12);
        assert!(fisher_one_qubit_analytic(0.9, 1.0, PI).unwrap().abs() < 1e-12);
        assert!(matches!(
            fisher_one_qubit_analytic(1.0, 1.0, PI),
            Err(ClockError::Singular { .. })
        ));
        assert!(fisher_one_qubit_analytic(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn finite_difference_examples() {
        let one = |chi: f64, omega: f64| {
            move |t| crate::model::one_qubit_distribution(chi, omega, t)
        };
        let r = classical_fisher(one(1.0, 2.0), 0.4, 1e-4).unwrap();
        assert!((r.value - 4.0).abs() < 1e-6);
        let r = classical_fisher(one(0.0, 2.0), 0.4, 1e-4).unwrap();
        assert_eq!(r.value, 0.0);
        let r = classical_fisher(|t| crate::model::two_qubit_distribution(0.5, 1.0, t), 1.0, 1e-4).unwrap();
        assert!((r.value - 0.625).abs() < 1e-6);

        let analytic = fisher_one_qubit_analytic(0.5, 1.0, PI / 2.0).unwrap();
        let fd = classical_fisher(one(0.5, 1.0), PI / 2.0, 1e-4).unwrap().value;
        assert!((analytic - fd).abs() < 1e-6);
        assert!(classical_fisher(one(1.0, 1.0), 0.1, 0.0).is_err());
    }

    #[test]
    fn degenerate_points_are_flagged() {
        // P₋(0) = 0 and its rate vanishes too: dropped, not degenerate.
        let r = classical_fisher(|t| crate::model::one_qubit_distribution(1.0, 1.0, t), 0.0, 1e-4).unwrap();
        assert_eq!(r.dropped_terms, 1);
        assert!(!r.degenerate);
        let r = fisher_from_rates([(0.0, 0.5), (1.0, -0.5)].into_iter());
        assert!(r.degenerate);
    }

    #[test]
    fn qfi_examples() {
        let omega = 1.7;
        let m = ClockModel::one_qubit(omega, 1.0).unwrap();
        let q = model_quantum_fisher(&m, 0.3).unwrap();
        assert!((q.value - omega * omega).abs() < 1e-12);

        let h = m.hamiltonian().unwrap();
        let eigen = PureState::normalized(&[1.0, 0.0]).unwrap();
        assert!(quantum_fisher_pure(&eigen, &h).unwrap().abs() < 1e-15);

        let g = ClockModel::ghz(omega, 2).unwrap();
        let q = model_quantum_fisher(&g, 0.0).unwrap();
        assert!((q.value - 4.0 * omega * omega).abs() < 1e-12);
    }

    #[test]
    fn spectral_formula_matches_pure_shortcut() {
        let m = ClockModel::two_qubit(0.5, 1.0).unwrap();
        let h = m.hamiltonian().unwrap();
        let psi = evolve(&m.initial_state().unwrap(), &h, 0.8).unwrap();
        let spectral = quantum_fisher(&DensityMatrix::from_pure(&psi), &diagonal_matrix(&h)).unwrap();
        assert!((spectral - 0.625).abs() < 1e-12);
    }

    #[test]
    fn mixed_qubit_qfi_is_transverse_bloch_length() {
        // ρ = (I + p σ_x)/2 rotated by σ_z/2 has F_Q = p².
        let p = 0.6;
        let c = |x: f64| Complex64::new(x, 0.0);
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.5 * p), c(0.5 * p), c(0.5)]);
        let sz = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(-0.5)]);
        let q = quantum_fisher(&DensityMatrix::from_matrix(&rho).unwrap(), &sz).unwrap();
        assert!((q - p * p).abs() < 1e-12);
    }

    #[test]
    fn non_unit_trace_rejected() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.7), c(0.0), c(0.0), c(0.7)]);
        assert!(matches!(DensityMatrix::from_matrix(&rho), Err(ClockError::Domain(_))));
    }
}
