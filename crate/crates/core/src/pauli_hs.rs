//! Pauli strings and the Hilbert–Schmidt (Pauli-basis) form of density operators.
//!
//! A density operator on `n` qubits is stored as the flat tensor of its `4^n`
//! real Pauli coefficients `c_w = Tr(ρ P_w)`, so that
//! `ρ = 2^{-n} Σ_w c_w P_w`. Zero coefficients are stored like any other.
//!
//! Named views follow the usual letters. For two qubits `r` sits on `a`, `s` on
//! `b` and `T[m][n]` pairs `σ_m` on `a` with `σ_n` on `b`. For three qubits the
//! pair blocks are placed as `t ↔ (b, c)`, `o ↔ (a, c)` and `p ↔ (a, b)`; note
//! that `p` names both the single-site vector on `c` and the `(a, b)` matrix.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, ComplexMatrix, C64, I, ONE, ZERO};
use crate::states::{DensityMatrix, MAX_QUBITS};

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY_3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Word over `{0 = I, 1 = σ₁, 2 = σ₂, 3 = σ₃}`, subsystem `a` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<u8>);

impl PauliString {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if word.is_empty() || word.len() > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "Pauli word length must be 1..={MAX_QUBITS}, got {}",
                word.len()
            )));
        }
        if let Some(bad) = word.iter().find(|&&p| p > 3) {
            return Err(Error::InvalidArgument(format!("Pauli letter {bad} not in 0..=3")));
        }
        Ok(Self(word))
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Word for the base-4 `index` (subsystem `a` most significant).
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut word = vec![0u8; n];
        for slot in word.iter_mut().rev() {
            *slot = (index % 4) as u8;
            index /= 4;
        }
        Self(word)
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &p| acc * 4 + p as usize)
    }

    /// All `4^n` words in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != 0).count()
    }

    /// `IXYZ` spelling.
    pub fn label(&self) -> String {
        self.0.iter().map(|&p| b"IXYZ"[p as usize] as char).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts digits (`"122"`) or letters (`"XYY"`).
    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                '0' | 'I' => Ok(0),
                '1' | 'X' => Ok(1),
                '2' | 'Y' => Ok(2),
                '3' | 'Z' => Ok(3),
                other => Err(Error::InvalidArgument(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(word)
    }
}

/// `I, σ₁, σ₂, σ₃` for `k = 0..=3`.
pub fn single_pauli(k: u8) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        2 => ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        3 => ComplexMatrix::real_diag(&[1.0, -1.0]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

pub fn pauli_matrix(word: &PauliString) -> ComplexMatrix {
    word.0
        .iter()
        .map(|&p| single_pauli(p))
        .reduce(|acc, m| kron(&acc, &m))
        .expect("Pauli words are nonempty")
}

/// `Tr(M P_w)` without materializing `P_w`.
///
/// `P_w` has a single nonzero per row: column `j ^ flip` with a phase
/// collected site by site.
pub fn pauli_trace(m: &ComplexMatrix, word: &PauliString) -> C64 {
    let n = word.n_qubits();
    debug_assert_eq!(m.rows(), 1 << n);
    let mut flip = 0usize;
    for (k, &p) in word.0.iter().enumerate() {
        if p == 1 || p == 2 {
            flip |= 1 << (n - 1 - k);
        }
    }
    let mut acc = ZERO;
    for j in 0..m.rows() {
        let mut phase = ONE;
        for (k, &p) in word.0.iter().enumerate() {
            let bit = (j >> (n - 1 - k)) & 1;
            phase *= match (p, bit) {
                (2, 0) => -I,
                (2, _) => I,
                (3, 1) => -ONE,
                _ => ONE,
            };
        }
        // (M P)_{ii} summed: Σ_j M[j ^ flip][j] · P[j][j ^ flip]
        acc += m.get(j ^ flip, j) * phase;
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct HSTensor {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl HSTensor {
    /// Wraps `4^n` coefficients in word-index order; checks the tensor invariants.
    pub fn from_coeffs(n_qubits: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "HS tensor needs 1..={MAX_QUBITS} qubits, got {n_qubits}"
            )));
        }
        if coeffs.len() != 1 << (2 * n_qubits) {
            return Err(Error::DimensionMismatch(format!(
                "{n_qubits}-qubit HS tensor needs {} coefficients, got {}",
                1usize << (2 * n_qubits),
                coeffs.len()
            )));
        }
        let t = Self { n_qubits, coeffs };
        t.validate()?;
        Ok(t)
    }

    /// Identity coefficient 1 within `1e-10`; every coefficient in `[−1−1e-9, 1+1e-9]`.
    pub fn validate(&self) -> Result<()> {
        if (self.coeffs[0] - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "identity coefficient is {}, expected 1",
                self.coeffs[0]
            )));
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !c.is_finite() || c.abs() > 1.0 + 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {} = {c} outside [-1, 1]",
                    PauliString::from_index(self.n_qubits, i)
                )));
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, word: &PauliString) -> f64 {
        assert_eq!(word.n_qubits(), self.n_qubits, "word length mismatch");
        self.coeffs[word.index()]
    }

    /// Coefficient by letters, e.g. `get(&[1, 2, 2])` for `R₁₂₂`.
    pub fn get(&self, letters: &[u8]) -> f64 {
        self.coeff(&PauliString(letters.to_vec()))
    }

    /// The `4^n − 1` non-identity coefficients in index order.
    pub fn non_identity(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (PauliString::from_index(self.n_qubits, i), c))
    }

    /// `Σ_w c_w²`, equal to `2^n Tr ρ²`.
    pub fn square_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &HSTensor) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `c_w = Tr(ρ P_w)` for all `4^n` words.
pub fn hs_decompose(rho: &DensityMatrix) -> HSTensor {
    let n = rho.n_qubits();
    let coeffs = PauliString::all(n)
        .map(|w| pauli_trace(rho.matrix(), &w).re)
        .collect();
    HSTensor { n_qubits: n, coeffs }
}

/// Result of recomposing a matrix from Pauli coefficients.
///
/// Noisy coefficients can produce a matrix with negative eigenvalues, so the
/// matrix is returned as-is alongside its smallest eigenvalue.
#[derive(Clone, Debug)]
pub struct HsComposition {
    pub matrix: ComplexMatrix,
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue `≥ −1e-9`.
    pub is_psd: bool,
    n_qubits: usize,
}

impl HsComposition {
    /// The composed matrix as a validated [`DensityMatrix`].
    pub fn density(&self) -> Result<DensityMatrix> {
        if !self.is_psd {
            return Err(Error::InvalidState(format!(
                "composed matrix has negative eigenvalue {:e}",
                self.min_eigenvalue
            )));
        }
        Ok(DensityMatrix::from_trusted(self.n_qubits, self.matrix.clone()))
    }
}

/// `ρ = 2^{-n} Σ_w c_w P_w`
pub fn hs_compose(tensor: &HSTensor) -> Result<HsComposition> {
    tensor.validate()?;
    let n = tensor.n_qubits;
    let dim = 1usize << n;
    let mut data = vec![ZERO; dim * dim];
    let scale = 1.0 / dim as f64;
    for (idx, &c) in tensor.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let word = PauliString::from_index(n, idx);
        let p = pauli_matrix(&word);
        for (slot, z) in data.iter_mut().zip(p.as_slice()) {
            *slot += z * (c * scale);
        }
    }
    let matrix = ComplexMatrix::new(dim, dim, data)?;
    let min_eigenvalue = herm_eig(&matrix)?.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(HsComposition {
        matrix,
        min_eigenvalue,
        is_psd: min_eigenvalue >= -crate::states::PSD_TOLERANCE,
        n_qubits: n,
    })
}

/// Structured view of the two- and three-qubit coefficient blocks.
#[derive(Clone, Debug, PartialEq)]
pub enum NamedParams {
    TwoQubit {
        r: [f64; 3],
        s: [f64; 3],
        /// `t[m][n] = Tr(ρ σ_m ⊗ σ_n)`
        t: Mat3,
    },
    ThreeQubit {
        r: [f64; 3],
        s: [f64; 3],
        /// Single-site vector on `c`.
        p: [f64; 3],
        /// Pairs `(b, c)`.
        t: Mat3,
        /// Pairs `(a, c)`.
        o: Mat3,
        /// Pairs `(a, b)`.
        p_ab: Mat3,
        big_r: [[[f64; 3]; 3]; 3],
    },
}

impl NamedParams {
    /// Labelled values in the order r, s, (p), T / t, o, p, R. Indices are 1-based.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        let vec3 = |out: &mut Vec<(String, f64)>, name: &str, v: &[f64; 3]| {
            for (i, x) in v.iter().enumerate() {
                out.push((format!("{name}{}", i + 1), *x));
            }
        };
        let mat3 = |out: &mut Vec<(String, f64)>, name: &str, m: &Mat3| {
            for (i, row) in m.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    out.push((format!("{name}{}{}", i + 1, j + 1), *x));
                }
            }
        };
        match self {
            NamedParams::TwoQubit { r, s, t } => {
                vec3(&mut out, "r", r);
                vec3(&mut out, "s", s);
                mat3(&mut out, "t", t);
            }
            NamedParams::ThreeQubit {
                r,
                s,
                p,
                t,
                o,
                p_ab,
                big_r,
            } => {
                vec3(&mut out, "r", r);
                vec3(&mut out, "s", s);
                vec3(&mut out, "p", p);
                mat3(&mut out, "t", t);
                mat3(&mut out, "o", o);
                mat3(&mut out, "p", p_ab);
                for (a, plane) in big_r.iter().enumerate() {
                    for (b, row) in plane.iter().enumerate() {
                        for (c, x) in row.iter().enumerate() {
                            out.push((format!("R{}{}{}", a + 1, b + 1, c + 1), *x));
                        }
                    }
                }
            }
        }
        out
    }

    /// 15 for two qubits, 63 for three.
    pub fn count(&self) -> usize {
        self.entries().len()
    }
}

pub fn named_params(tensor: &HSTensor) -> Result<NamedParams> {
    let vec3 = |f: &dyn Fn(u8) -> Vec<u8>| -> [f64; 3] {
        [1, 2, 3].map(|i| tensor.get(&f(i)))
    };
    let mat3 = |f: &dyn Fn(u8, u8) -> Vec<u8>| -> Mat3 {
        [1, 2, 3].map(|i| [1, 2, 3].map(|j| tensor.get(&f(i, j))))
    };
    match tensor.n_qubits {
        2 => Ok(NamedParams::TwoQubit {
            r: vec3(&|i| vec![i, 0]),
            s: vec3(&|j| vec![0, j]),
            t: mat3(&|m, n| vec![m, n]),
        }),
        3 => Ok(NamedParams::ThreeQubit {
            r: vec3(&|i| vec![i, 0, 0]),
            s: vec3(&|j| vec![0, j, 0]),
            p: vec3(&|k| vec![0, 0, k]),
            t: mat3(&|m, n| vec![0, m, n]),
            o: mat3(&|k, l| vec![k, 0, l]),
            p_ab: mat3(&|i, j| vec![i, j, 0]),
            big_r: [1, 2, 3].map(|a| [1, 2, 3].map(|b| [1, 2, 3].map(|c| tensor.get(&[a, b, c])))),
        }),
        n => Err(Error::InvalidArgument(format!(
            "named parameters exist for 2 or 3 qubits, got {n}"
        ))),
    }
}

/// One proper rotation per subsystem, acting on that subsystem's Pauli vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalRotation {
    per_site: Vec<Mat3>,
}

impl LocalRotation {
    pub fn new(per_site: Vec<Mat3>) -> Result<Self> {
        for (k, o) in per_site.iter().enumerate() {
            check_rotation(o).map_err(|msg| {
                Error::InvalidRotation(format!("subsystem {k}: {msg}"))
            })?;
        }
        Ok(Self { per_site })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            per_site: vec![IDENTITY_3; n],
        }
    }

    /// The same rotation on every subsystem.
    pub fn common(n: usize, o: Mat3) -> Result<Self> {
        Self::new(vec![o; n])
    }

    pub fn sites(&self) -> &[Mat3] {
        &self.per_site
    }
}

fn check_rotation(o: &Mat3) -> std::result::Result<(), String> {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| o[k][i] * o[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - want).abs());
        }
    }
    if !worst.is_finite() || worst > 1e-10 {
        return Err(format!("not orthogonal (OᵀO deviates by {worst:e})"));
    }
    let det = det3(o);
    if (det - 1.0).abs() > 1e-10 {
        return Err(format!("determinant {det}, reflections are not allowed"));
    }
    Ok(())
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Re-expresses the coefficients in rotated measurement frames.
///
/// Each Pauli index on subsystem `k` transforms with `O_k`, so `r′ = O_a r`,
/// `T′ = O_a T O_bᵀ` and `R′_{αβγ} = Σ (O_a)_{αα′}(O_b)_{ββ′}(O_c)_{γγ′} R_{α′β′γ′}`.
pub fn rotate_frame(tensor: &HSTensor, rot: &LocalRotation) -> Result<HSTensor> {
    let n = tensor.n_qubits;
    if rot.per_site.len() != n {
        return Err(Error::InvalidRotation(format!(
            "{} rotations for {n} subsystems",
            rot.per_site.len()
        )));
    }
    let mut coeffs = tensor.coeffs.clone();
    for (site, o) in rot.per_site.iter().enumerate() {
        // Stride of this site's base-4 digit.
        let stride = 1usize << (2 * (n - 1 - site));
        let mut next = coeffs.clone();
        for (idx, slot) in next.iter_mut().enumerate() {
            let digit = (idx / stride) % 4;
            if digit == 0 {
                continue;
            }
            let base = idx - digit * stride;
            *slot = (1..4).map(|d| o[digit - 1][d - 1] * coeffs[base + d * stride]).sum();
        }
        coeffs = next;
    }
    Ok(HSTensor {
        n_qubits: n,
        coeffs,
    })
}

fn unit_axis(axis: [f64; 3]) -> Result<[f64; 3]> {
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidRotation("rotation axis is zero".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidRotation(format!(
            "rotation axis has norm {norm}, expected 1"
        )));
    }
    Ok(axis)
}

/// Rodrigues rotation by `angle` radians about the unit vector `axis`.
pub fn so3_from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Mat3> {
    let [x, y, z] = unit_axis(axis)?;
    let (s, c) = angle.sin_cos();
    let v = 1.0 - c;
    Ok([
        [c + x * x * v, x * y * v - z * s, x * z * v + y * s],
        [y * x * v + z * s, c + y * y * v, y * z * v - x * s],
        [z * x * v - y * s, z * y * v + x * s, c + z * z * v],
    ])
}

/// `exp(−i angle n·σ / 2)`; conjugation by it rotates Pauli vectors by
/// [`so3_from_axis_angle`] of the same arguments.
pub fn su2_from_axis_angle(axis: [f64; 3], angle: f64) -> Result<ComplexMatrix> {
    let [x, y, z] = unit_axis(axis)?;
    let (s, c) = (angle / 2.0).sin_cos();
    let mis = C64::new(0.0, -s);
    Ok(ComplexMatrix::from_rows(&[
        vec![C64::new(c, 0.0) + mis * z, mis * C64::new(x, -y)],
        vec![mis * C64::new(x, y), C64::new(c, 0.0) - mis * z],
    ]))
}
