//! Local Pauli tomography: exact and simulated measurement data, correlator
//! estimation, linear-inversion reconstruction and PSD repair.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::correlation::{joint_distribution, MeasurementBasis};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix, C64, I, ONE};
use crate::pauli_hs::{hs_compose, hs_decompose, HSTensor, PauliString};
use crate::states::{purity_of_matrix, DensityMatrix, State, MAX_QUBITS};

/// One Pauli axis (`1`, `2` or `3`) per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct MeasurementSetting {
    axes: Vec<u8>,
}

impl TryFrom<Vec<u8>> for MeasurementSetting {
    type Error = Error;

    fn try_from(axes: Vec<u8>) -> Result<Self> {
        Self::new(axes)
    }
}

impl From<MeasurementSetting> for Vec<u8> {
    fn from(s: MeasurementSetting) -> Self {
        s.axes
    }
}

impl MeasurementSetting {
    pub fn new(axes: Vec<u8>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "setting must cover 1..={MAX_QUBITS} qubits, got {}",
                axes.len()
            )));
        }
        if let Some(bad) = axes.iter().find(|a| !(1..=3).contains(*a)) {
            return Err(Error::InvalidArgument(format!("measurement axis {bad} not in 1..=3")));
        }
        Ok(Self { axes })
    }

    /// Setting for the base-3 `index`, qubit `a` most significant.
    pub fn from_index(n_qubits: usize, mut index: usize) -> Self {
        let mut axes = vec![1u8; n_qubits];
        for slot in axes.iter_mut().rev() {
            *slot = (index % 3) as u8 + 1;
            index /= 3;
        }
        Self { axes }
    }

    pub fn index(&self) -> usize {
        self.axes.iter().fold(0, |acc, &a| acc * 3 + (a - 1) as usize)
    }

    pub fn axes(&self) -> &[u8] {
        &self.axes
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    /// Product eigenbasis; outcome bit `0` is the `+1` eigenvector.
    pub fn basis(&self) -> MeasurementBasis {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let parties = self
            .axes
            .iter()
            .map(|&axis| match axis {
                1 => ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]),
                2 => ComplexMatrix::from_rows(&[
                    vec![ONE * h, ONE * h],
                    vec![I * h, -I * h],
                ]),
                _ => ComplexMatrix::identity(2),
            })
            .collect();
        MeasurementBasis::new(parties).expect("Pauli eigenbases are orthonormal")
    }

    /// Whether this setting measures every non-identity letter of `word`.
    pub fn is_compatible(&self, word: &PauliString) -> bool {
        word.letters()
            .iter()
            .zip(&self.axes)
            .all(|(&p, &a)| p == 0 || p == a)
    }
}

/// All `3^n` settings in index order.
pub fn all_settings(n_qubits: usize) -> Vec<MeasurementSetting> {
    (0..3usize.pow(n_qubits as u32))
        .map(|i| MeasurementSetting::from_index(n_qubits, i))
        .collect()
}

/// Non-identity Pauli expectations keyed by word.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectations {
    pub n_qubits: usize,
    pub values: BTreeMap<PauliString, f64>,
}

impl Expectations {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, word: &PauliString) -> Option<f64> {
        self.values.get(word).copied()
    }

    /// Coefficient tensor with `c_I = 1`.
    pub fn to_tensor(&self) -> Result<HSTensor> {
        let n = self.n_qubits;
        let coeffs = PauliString::all(n)
            .map(|w| {
                if w.is_identity() {
                    Ok(1.0)
                } else {
                    self.get(&w)
                        .ok_or_else(|| Error::IncompleteExpectations(w.label()))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        HSTensor::from_coeffs(n, coeffs)
    }
}

/// `Tr(ρ P_w)` for every non-identity word.
pub fn exact_expectations(rho: &DensityMatrix) -> Expectations {
    let tensor = hs_decompose(rho);
    Expectations {
        n_qubits: rho.n_qubits(),
        values: tensor.non_identity().collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingRecord {
    pub axes: MeasurementSetting,
    /// Counts over the `2^n` outcome tuples, qubit `a` most significant.
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographyDataset {
    pub n_qubits: usize,
    pub shots_per_setting: u64,
    /// One record per setting, in setting-index order after validation.
    pub records: Vec<SettingRecord>,
}

impl TomographyDataset {
    /// Validates and sorts the records by setting index.
    pub fn new(n_qubits: usize, shots_per_setting: u64, mut records: Vec<SettingRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.axes.index());
        let data = Self {
            n_qubits,
            shots_per_setting,
            records,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("n_qubits must be 1..={MAX_QUBITS}, got {n}")));
        }
        if self.shots_per_setting == 0 {
            return Err(Error::InvalidArgument("shots_per_setting must be positive".into()));
        }
        let expected = 3usize.pow(n as u32);
        let mut seen = vec![false; expected];
        for (k, rec) in self.records.iter().enumerate() {
            if rec.axes.n_qubits() != n {
                return Err(Error::InvalidArgument(format!(
                    "record {k} has {} axes for {n} qubits",
                    rec.axes.n_qubits()
                )));
            }
            let idx = rec.axes.index();
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::InvalidArgument(format!(
                    "setting {:?} appears more than once",
                    rec.axes.axes()
                )));
            }
            if rec.counts.len() != 1 << n {
                return Err(Error::InvalidArgument(format!(
                    "record {k} has {} outcome counts, expected {}",
                    rec.counts.len(),
                    1 << n
                )));
            }
            let total: u64 = rec.counts.iter().sum();
            if total != self.shots_per_setting {
                return Err(Error::InvalidArgument(format!(
                    "record {k} counts sum to {total}, expected {}",
                    self.shots_per_setting
                )));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "setting {:?} is missing",
                MeasurementSetting::from_index(n, missing).axes()
            )));
        }
        Ok(())
    }

    pub fn record(&self, setting: &MeasurementSetting) -> Option<&SettingRecord> {
        self.records.iter().find(|r| &r.axes == setting)
    }

    /// Relative frequencies per setting, in setting-index order.
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.records.len()];
        let shots = self.shots_per_setting as f64;
        for rec in &self.records {
            out[rec.axes.index()] = rec.counts.iter().map(|&c| c as f64 / shots).collect();
        }
        out
    }
}

/// Born probabilities of the product eigenbasis of `setting`.
pub fn born_probabilities(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<f64>> {
    if setting.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "setting for {} qubits on a {}-qubit state",
            setting.n_qubits(),
            rho.n_qubits()
        )));
    }
    let table = joint_distribution(&State::Density(rho.clone()), &setting.basis())?;
    Ok(table.probs().iter().map(|p| p.clamp(0.0, 1.0)).collect())
}

/// Exact Born probabilities for every setting, in setting-index order.
pub fn born_frequencies(rho: &DensityMatrix) -> Result<Vec<Vec<f64>>> {
    all_settings(rho.n_qubits())
        .iter()
        .map(|s| born_probabilities(rho, s))
        .collect()
}

/// Draws `shots` outcomes per setting. Each setting has its own ChaCha20
/// stream selected by its index, so the result does not depend on the order
/// in which settings are simulated.
pub fn simulate_dataset(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<TomographyDataset> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let n = rho.n_qubits();
    let records = all_settings(n)
        .into_iter()
        .map(|setting| {
            let probs = born_probabilities(rho, &setting)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(setting.index() as u64);
            let counts = sample_multinomial(&mut rng, shots, &probs)?;
            Ok(SettingRecord {
                axes: setting,
                counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TomographyDataset::new(n, shots, records)
}

/// Multinomial draw as a chain of conditional binomials.
fn sample_multinomial(rng: &mut ChaCha20Rng, shots: u64, probs: &[f64]) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum();
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::InvalidArgument(format!("binomial parameters: {e}")))?
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    Ok(counts)
}

/// Correlator estimates from per-setting outcome frequencies (setting-index
/// order). Each word averages `(−1)^{parity on its support}` over every
/// compatible setting with equal weight.
pub fn estimate_from_frequencies(n_qubits: usize, freqs: &[Vec<f64>]) -> Result<Expectations> {
    let settings = all_settings(n_qubits);
    if freqs.len() != settings.len() || freqs.iter().any(|f| f.len() != 1 << n_qubits) {
        return Err(Error::DimensionMismatch(format!(
            "expected {} settings with {} outcomes each",
            settings.len(),
            1 << n_qubits
        )));
    }
    let mut values = BTreeMap::new();
    for word in PauliString::all(n_qubits).filter(|w| !w.is_identity()) {
        let mask = word
            .letters()
            .iter()
            .fold(0usize, |acc, &p| (acc << 1) | usize::from(p != 0));
        let mut sum = 0.0;
        let mut used = 0usize;
        for (setting, f) in settings.iter().zip(freqs) {
            if !setting.is_compatible(&word) {
                continue;
            }
            sum += f
                .iter()
                .enumerate()
                .map(|(o, &p)| if (o & mask).count_ones() % 2 == 0 { p } else { -p })
                .sum::<f64>();
            used += 1;
        }
        values.insert(word, sum / used as f64);
    }
    Ok(Expectations { n_qubits, values })
}

pub fn estimate_expectations(data: &TomographyDataset) -> Result<Expectations> {
    data.validate()?;
    estimate_from_frequencies(data.n_qubits, &data.frequencies())
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Linear-inversion matrix, possibly with negative eigenvalues.
    pub raw: ComplexMatrix,
    pub raw_min_eigenvalue: f64,
    /// Clipped and renormalized matrix, present when repair was requested.
    pub repaired: Option<DensityMatrix>,
    /// `‖ρ̂² − ρ̂‖_F` of the reported matrix.
    pub pure_defect: f64,
    /// Smallest eigenvalue of the reported matrix.
    pub min_eigenvalue: f64,
}

impl Reconstruction {
    /// The repaired matrix when present, otherwise the raw one.
    pub fn matrix(&self) -> &ComplexMatrix {
        self.repaired.as_ref().map_or(&self.raw, DensityMatrix::matrix)
    }
}

/// `ρ̂ = 2^{−n}(I + Σ c_w P_w)`, optionally projected back onto density matrices.
pub fn reconstruct(expectations: &Expectations, repair: bool) -> Result<Reconstruction> {
    let composed = hs_compose(&expectations.to_tensor()?)?;
    let raw = composed.matrix;
    let raw_min_eigenvalue = composed.min_eigenvalue;
    let repaired = if repair {
        Some(repair_psd(&raw, expectations.n_qubits)?)
    } else {
        None
    };
    let (pure_defect, min_eigenvalue) = match &repaired {
        Some(rho) => (
            purity_of_matrix(rho.matrix()).1,
            rho.eigenvalues()?.last().copied().unwrap_or(0.0),
        ),
        None => (purity_of_matrix(&raw).1, raw_min_eigenvalue),
    };
    Ok(Reconstruction {
        raw,
        raw_min_eigenvalue,
        repaired,
        pure_defect,
        min_eigenvalue,
    })
}

/// Clips negative eigenvalues to zero and rescales the trace to one.
pub fn repair_psd(m: &ComplexMatrix, n_qubits: usize) -> Result<DensityMatrix> {
    let eig = herm_eig(m)?;
    if eig.eigenvalues.iter().all(|&v| v >= 0.0) {
        let tr = m.trace().re;
        return Ok(DensityMatrix::from_trusted(n_qubits, m.scale_real(1.0 / tr)));
    }
    let total: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return Err(Error::InvalidState("no positive spectrum left after clipping".into()));
    }
    let clipped = eig.map_spectrum(|v| v.max(0.0) / total);
    let hermitian = &clipped + &clipped.adjoint();
    Ok(DensityMatrix::from_trusted(n_qubits, hermitian.scale_real(0.5)))
}

/// `(⟨σ₁⟩, ⟨σ₂⟩, −⟨σ₃⟩)` of a single qubit.
pub fn dvector(state: &State) -> Result<[f64; 3]> {
    if state.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "D-vector needs one qubit, got {}",
            state.n_qubits()
        )));
    }
    let m = match state {
        State::Pure(psi) => {
            let a = psi.amplitudes();
            ComplexMatrix::outer(a, a)
        }
        State::Density(rho) => rho.matrix().clone(),
    };
    let off: C64 = m.get(1, 0);
    Ok([2.0 * off.re, 2.0 * off.im, m.get(1, 1).re - m.get(0, 0).re])
}
