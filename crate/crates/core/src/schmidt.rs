//! Schmidt decomposition of bipartite pure states and relative states.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{svd, vec_norm, ComplexMatrix, C64, ZERO};
use crate::states::PureState;

/// Split of the qubits into `S₁` (part A) and `S₂` (part B), each kept in
/// ascending qubit order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    n_qubits: usize,
    part_a: Vec<usize>,
    part_b: Vec<usize>,
}

impl Bipartition {
    /// Part B is the complement of `part_a`.
    pub fn new(n_qubits: usize, part_a: &[usize]) -> Result<Self> {
        let mut in_a = vec![false; n_qubits];
        for &q in part_a {
            if q >= n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            in_a[q] = true;
        }
        let a: Vec<usize> = (0..n_qubits).filter(|&q| in_a[q]).collect();
        let b: Vec<usize> = (0..n_qubits).filter(|&q| !in_a[q]).collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidArgument(
                "both sides of a bipartition must be nonempty".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            part_a: a,
            part_b: b,
        })
    }

    /// `{a} | {b, c, …}`
    pub fn first_vs_rest(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, &[0])
    }

    /// Parses `"a|bc"`; subsystems are the letters `a, b, c, …`.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let (left, right) = text.split_once('|').ok_or_else(|| {
            Error::InvalidArgument(format!("split {text:?} must look like a|bc"))
        })?;
        let a = parse_letters(left)?;
        let b = parse_letters(right)?;
        let bip = Self::new(n_qubits, &a)?;
        let mut b_sorted = b.clone();
        b_sorted.sort_unstable();
        b_sorted.dedup();
        if b_sorted != bip.part_b || b.len() != b_sorted.len() {
            return Err(Error::InvalidArgument(format!(
                "split {text:?} does not partition {n_qubits} subsystems"
            )));
        }
        Ok(bip)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    pub fn part_b(&self) -> &[usize] {
        &self.part_b
    }

    pub fn dim_a(&self) -> usize {
        1 << self.part_a.len()
    }

    pub fn dim_b(&self) -> usize {
        1 << self.part_b.len()
    }

    /// Full amplitude index for the given part-A and part-B indices.
    pub fn join(&self, ia: usize, ib: usize) -> usize {
        let n = self.n_qubits;
        let mut full = 0;
        for (k, &q) in self.part_a.iter().enumerate() {
            let bit = (ia >> (self.part_a.len() - 1 - k)) & 1;
            full |= bit << (n - 1 - q);
        }
        for (k, &q) in self.part_b.iter().enumerate() {
            let bit = (ib >> (self.part_b.len() - 1 - k)) & 1;
            full |= bit << (n - 1 - q);
        }
        full
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = |qs: &[usize]| -> String { qs.iter().map(|&q| subsystem_letter(q)).collect() };
        write!(f, "{}|{}", letters(&self.part_a), letters(&self.part_b))
    }
}

pub fn subsystem_letter(q: usize) -> char {
    (b'a' + q as u8) as char
}

/// `"bc"` → `[1, 2]`
pub fn parse_letters(s: &str) -> Result<Vec<usize>> {
    s.trim()
        .chars()
        .map(|ch| {
            if ch.is_ascii_lowercase() {
                Ok((ch as u8 - b'a') as usize)
            } else {
                Err(Error::InvalidArgument(format!("unknown subsystem {ch:?}")))
            }
        })
        .collect()
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Infers the qubit count from the largest letter used.
    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .chars()
            .filter(char::is_ascii_lowercase)
            .map(|c| (c as u8 - b'a') as usize + 1)
            .max()
            .unwrap_or(0);
        Self::parse(n, s)
    }
}

/// `M[i, j] = ⟨i|_A ⟨j|_B ψ`
pub fn coefficient_matrix(psi: &PureState, bip: &Bipartition) -> Result<ComplexMatrix> {
    if psi.n_qubits() != bip.n_qubits {
        return Err(Error::DimensionMismatch(format!(
            "{}-qubit state with a {}-qubit bipartition",
            psi.n_qubits(),
            bip.n_qubits
        )));
    }
    let amps = psi.amplitudes();
    Ok(ComplexMatrix::from_fn(bip.dim_a(), bip.dim_b(), |i, j| amps[bip.join(i, j)]))
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Descending, nonnegative; `min(d_A, d_B)` of them.
    pub coefficients: Vec<f64>,
    /// `ζ_i`, orthonormal states of part A.
    pub basis_a: Vec<Vec<C64>>,
    /// `η_i`, orthonormal states of part B.
    pub basis_b: Vec<Vec<C64>>,
    pub bipartition: Bipartition,
}

impl SchmidtDecomposition {
    /// `Σ_i a_i ζ_i ⊗ η_i` in the original qubit order.
    pub fn reconstruct(&self) -> Vec<C64> {
        let bip = &self.bipartition;
        let mut amps = vec![ZERO; 1 << bip.n_qubits];
        for ((a, zeta), eta) in self.coefficients.iter().zip(&self.basis_a).zip(&self.basis_b) {
            for (ia, z) in zeta.iter().enumerate() {
                for (ib, e) in eta.iter().enumerate() {
                    amps[bip.join(ia, ib)] += z * e * *a;
                }
            }
        }
        amps
    }

    /// Entanglement entropy `−Σ a_i² ln a_i²` in nats.
    pub fn entropy(&self) -> f64 {
        crate::correlation::shannon_entropy(self.coefficients.iter().map(|a| a * a))
    }

    /// `ζ_i` completed to a basis of part A.
    pub fn full_basis_a(&self) -> Vec<Vec<C64>> {
        crate::linalg::complete_basis(&self.basis_a, self.bipartition.dim_a())
    }

    /// `η_i` completed to a basis of part B.
    pub fn full_basis_b(&self) -> Vec<Vec<C64>> {
        crate::linalg::complete_basis(&self.basis_b, self.bipartition.dim_b())
    }
}

/// Schmidt form from the SVD of the coefficient matrix: `M = U S V†` gives
/// `ζ_i = U e_i` and `η_i = conj(V e_i)`.
pub fn schmidt(psi: &PureState, bip: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = coefficient_matrix(psi, bip)?;
    let dec = svd(&m)?;
    let k = dec.singular_values.len();
    let basis_a = (0..k).map(|j| dec.u.column(j)).collect();
    let basis_b = (0..k)
        .map(|j| dec.v.column(j).into_iter().map(|z| z.conj()).collect())
        .collect();
    Ok(SchmidtDecomposition {
        coefficients: dec.singular_values,
        basis_a,
        basis_b,
        bipartition: bip.clone(),
    })
}

/// Below this partial-overlap norm the relative state is undefined.
pub const ZERO_OVERLAP: f64 = 1e-12;

/// State of part A relative to `eta` on part B: the normalized partial inner
/// product `⟨η|ψ⟩`.
pub fn relative_state(psi: &PureState, eta: &PureState, bip: &Bipartition) -> Result<PureState> {
    if eta.dim() != bip.dim_b() {
        return Err(Error::DimensionMismatch(format!(
            "eta has dimension {} but part {} has dimension {}",
            eta.dim(),
            bip,
            bip.dim_b()
        )));
    }
    let m = coefficient_matrix(psi, bip)?;
    let eta_conj: Vec<C64> = eta.amplitudes().iter().map(|z| z.conj()).collect();
    let raw = m.mul_vec(&eta_conj);
    let norm = vec_norm(&raw);
    if norm < ZERO_OVERLAP {
        return Err(Error::ZeroOverlap(norm));
    }
    PureState::new(raw.into_iter().map(|z| z / norm).collect())
}
