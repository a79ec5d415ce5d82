//! Joint outcome distributions, the Shannon index of correlation, von Neumann
//! entropy and the quantum index of correlation.
//!
//! All logarithms are natural internally; [`LogBase`] converts for display.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, partial_trace, ComplexMatrix};
use crate::pauli_hs::su2_from_axis_angle;
use crate::schmidt::{schmidt, Bipartition, SchmidtDecomposition};
use crate::states::{DensityMatrix, State};

/// Probabilities at or below this are treated as exact zeros in entropy sums.
pub const PROBABILITY_FLOOR: f64 = 1e-15;
/// Eigenvalues below this are skipped in `−Σ λ ln λ`.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a value in nats into this unit.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / LN_2,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.unit())
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(LogBase::Nats),
            "bits" => Ok(LogBase::Bits),
            other => Err(Error::InvalidArgument(format!("unknown unit {other:?}"))),
        }
    }
}

/// One orthonormal basis per party; column `k` of a party's matrix is the
/// state for outcome `k`. Parties occupy consecutive tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    parties: Vec<ComplexMatrix>,
}

impl MeasurementBasis {
    pub fn new(parties: Vec<ComplexMatrix>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidArgument("measurement basis needs at least one party".into()));
        }
        for (k, u) in parties.iter().enumerate() {
            if !u.is_unitary(1e-10) {
                return Err(Error::InvalidArgument(format!(
                    "basis for party {k} is not orthonormal"
                )));
            }
        }
        Ok(Self { parties })
    }

    pub fn computational(dims: &[usize]) -> Self {
        Self {
            parties: dims.iter().map(|&d| ComplexMatrix::identity(d)).collect(),
        }
    }

    /// `σ₃` eigenbasis on every qubit.
    pub fn z(n_qubits: usize) -> Self {
        Self::computational(&vec![2; n_qubits])
    }

    /// Independent random SU(2) rotation of the `z` basis on each qubit:
    /// axis uniform on the sphere, angle uniform in `[0, 2π)`.
    pub fn random_product(n_qubits: usize, rng: &mut impl Rng) -> Self {
        let parties = (0..n_qubits)
            .map(|_| {
                let (axis, angle) = random_axis_angle(rng);
                su2_from_axis_angle(axis, angle).expect("unit axis")
            })
            .collect();
        Self { parties }
    }

    /// Product of the two Schmidt bases; part A must precede part B in tensor order.
    pub fn from_schmidt(dec: &SchmidtDecomposition) -> Result<Self> {
        let bip = &dec.bipartition;
        let contiguous = bip.part_a().iter().enumerate().all(|(k, &q)| k == q);
        if !contiguous {
            return Err(Error::InvalidArgument(format!(
                "Schmidt basis for split {bip} is not a product of consecutive factors"
            )));
        }
        Self::new(vec![
            ComplexMatrix::from_columns(&dec.full_basis_a()),
            ComplexMatrix::from_columns(&dec.full_basis_b()),
        ])
    }

    pub fn parties(&self) -> &[ComplexMatrix] {
        &self.parties
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(ComplexMatrix::rows).collect()
    }

    /// `U₁ ⊗ U₂ ⊗ …`
    pub fn unitary(&self) -> ComplexMatrix {
        self.parties
            .iter()
            .cloned()
            .reduce(|acc, u| kron(&acc, &u))
            .expect("nonempty")
    }
}

pub(crate) fn random_axis_angle(rng: &mut impl Rng) -> ([f64; 3], f64) {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let axis = [rho * phi.cos(), rho * phi.sin(), z];
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    let angle = rng.random_range(0.0..2.0 * PI);
    (axis.map(|x| x / norm), angle)
}

/// The basis diagonalizing the reduced states.
///
/// Two-qubit pure states use their Schmidt bases. Otherwise each qubit is
/// measured in the eigenbasis of its own reduced density matrix; for GHZ
/// states this is the `z` basis.
pub fn canonical_basis(state: &State) -> Result<MeasurementBasis> {
    if let (State::Pure(psi), 2) = (state, state.n_qubits()) {
        let dec = schmidt(psi, &Bipartition::first_vs_rest(2)?)?;
        return MeasurementBasis::from_schmidt(&dec);
    }
    let rho = state.to_density();
    let n = rho.n_qubits();
    let dims = vec![2; n];
    let parties = (0..n)
        .map(|q| {
            let reduced = partial_trace(rho.matrix(), &dims, &[q])?;
            Ok(herm_eig(&reduced)?.eigenvectors)
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementBasis::new(parties)
}

/// Joint outcome distribution over a product of per-party alphabets.
///
/// Entries are row-major with party 0 as the most significant index.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl ProbabilityTable {
    /// Clamps entries in `[−1e-12, 0)` to zero; requires total 1 within `1e-10`.
    pub fn new(dims: Vec<usize>, mut probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("table dimensions must be positive".into()));
        }
        let size: usize = dims.iter().product();
        if probs.len() != size {
            return Err(Error::DimensionMismatch(format!(
                "table of shape {dims:?} needs {size} entries, got {}",
                probs.len()
            )));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::InvalidArgument(format!("invalid probability {p}")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { dims, probs })
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, outcome: &[usize]) -> f64 {
        assert_eq!(outcome.len(), self.dims.len());
        let idx = outcome
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&o, &d)| {
                assert!(o < d, "outcome out of range");
                acc * d + o
            });
        self.probs[idx]
    }

    /// Outcome tuple for a flat index.
    pub fn outcome(&self, index: usize) -> Vec<usize> {
        crate::linalg::digits(index, &self.dims)
    }

    pub fn marginal(&self, party: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[party]];
        for (idx, &p) in self.probs.iter().enumerate() {
            out[self.outcome(idx)[party]] += p;
        }
        out
    }

    pub fn marginals(&self) -> Vec<Vec<f64>> {
        (0..self.n_parties()).map(|k| self.marginal(k)).collect()
    }
}

/// Born-rule table `P_{ij…} = ⟨Π_i ⊗ Π_j ⊗ …⟩` for the basis projectors.
pub fn joint_distribution(state: &State, basis: &MeasurementBasis) -> Result<ProbabilityTable> {
    let dims = basis.dims();
    let total: usize = dims.iter().product();
    if total != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis for parties {dims:?} does not match a {}-dimensional state",
            state.dim()
        )));
    }
    let w = basis.unitary();
    let wd = w.adjoint();
    let probs = match state {
        State::Pure(psi) => wd
            .mul_vec(psi.amplitudes())
            .into_iter()
            .map(|z| z.norm_sqr())
            .collect(),
        State::Density(rho) => {
            let rotated = &(&wd * rho.matrix()) * &w;
            (0..total).map(|k| rotated.get(k, k).re).collect()
        }
    };
    ProbabilityTable::new(dims, probs)
}

/// `Σ P_{ij…} ln(P_{ij…} / (P_i P_j …))`, reported in `base`.
pub fn shannon_index(table: &ProbabilityTable, base: LogBase) -> f64 {
    let marginals = table.marginals();
    let mut acc = 0.0;
    for (idx, &p) in table.probs.iter().enumerate() {
        if p <= PROBABILITY_FLOOR {
            continue;
        }
        let product: f64 = table
            .outcome(idx)
            .iter()
            .zip(&marginals)
            .map(|(&o, m)| m[o])
            .product();
        acc += p * (p / product).ln();
    }
    base.from_nats(acc)
}

/// `−Σ p ln p` in nats, with entries at or below the probability floor skipped.
pub fn shannon_entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > PROBABILITY_FLOOR)
        .map(|p| -p * p.ln())
        .sum()
}

/// `S = −Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.matrix())
}

pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?
        .eigenvalues
        .into_iter()
        .filter(|&l| l >= EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum())
}

/// Entropy of the reduction onto `qubits`.
pub fn reduced_entropy(rho: &DensityMatrix, qubits: &[usize]) -> Result<f64> {
    let dims = vec![2; rho.n_qubits()];
    matrix_entropy(&partial_trace(rho.matrix(), &dims, qubits)?)
}

/// `Σ_k S(ρ_k) − S(ρ)` over the given disjoint groups of qubits, in nats.
pub fn quantum_index(rho: &DensityMatrix, parties: &[Vec<usize>]) -> Result<f64> {
    let n = rho.n_qubits();
    let mut seen = vec![false; n];
    for group in parties {
        if group.is_empty() {
            return Err(Error::InvalidArgument("empty party".into()));
        }
        for &q in group {
            if q >= n || seen[q] {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} is out of range or listed twice"
                )));
            }
            seen[q] = true;
        }
    }
    let mut total = -von_neumann_entropy(rho)?;
    for group in parties {
        total += reduced_entropy(rho, group)?;
    }
    Ok(total)
}

/// [`quantum_index`] with every qubit its own party.
pub fn quantum_index_per_qubit(rho: &DensityMatrix) -> Result<f64> {
    let parties: Vec<Vec<usize>> = (0..rho.n_qubits()).map(|q| vec![q]).collect();
    quantum_index(rho, &parties)
}
