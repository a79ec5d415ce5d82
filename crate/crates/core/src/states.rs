//! Pure states, density operators and the named states used across the crate.
//!
//! Basis convention: `|1⟩` is index 0 and `|2⟩` is index 1, so that
//! `σ₃|1⟩ = +|1⟩`. Multi-qubit amplitudes are indexed with subsystem `a` as
//! the most significant bit, i.e. tensor order `a ⊗ b ⊗ c`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix, C64, ONE, ZERO};

pub const MAX_QUBITS: usize = 5;

pub const NORM_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = 1e-9;
/// Default `‖ρ²−ρ‖_F` threshold under which a state is reported as pure.
pub const PURE_DEFECT_THRESHOLD: f64 = 1e-6;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two of at least 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Validates length `2^n` and unit norm within `1e-10`.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "amplitudes have squared norm {norm_sqr}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = crate::linalg::vec_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Computational basis state; `index` uses the crate's bit order.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(amps)
    }

    /// `ψ₁ ⊗ ψ₂ ⊗ …`
    pub fn product(factors: &[PureState]) -> Result<Self> {
        let mut amps = vec![ONE];
        for f in factors {
            amps = crate::linalg::kron_vec(&amps, &f.amplitudes);
        }
        Self::new(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> C64 {
        crate::linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn apply(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.cols() != self.dim() || unitary.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a {}-dimensional state",
                unitary.rows(),
                unitary.cols(),
                self.dim()
            )));
        }
        Self::new(unitary.mul_vec(&self.amplitudes))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace within `1e-10`, eigenvalues `≥ −1e-9`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n_qubits = qubits_for_dim(matrix.rows())?;
        let defect = matrix.hermitian_defect();
        if defect > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (deviation {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min = herm_eig(&matrix)?.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        qubits_for_dim(dim)?;
        Self::new(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub(crate) fn from_trusted(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        Self { n_qubits, matrix }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.matrix)?.eigenvalues)
    }
}

/// Either representation, for APIs that accept both.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Density(DensityMatrix),
}

impl State {
    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(p) => p.n_qubits(),
            State::Density(d) => d.n_qubits(),
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => density_from_pure(p),
            State::Density(d) => d.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(p) => Some(p),
            State::Density(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(p: PureState) -> Self {
        State::Pure(p)
    }
}

impl From<DensityMatrix> for State {
    fn from(d: DensityMatrix) -> Self {
        State::Density(d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedState {
    /// `C₁|1⟩_a|2⟩_b + C₂|2⟩_a|1⟩_b`
    SingleExcitation { c1: C64, c2: C64 },
    Singlet,
    TripletM0,
    /// `(|1…1⟩ + |2…2⟩)/√2` on `n` qubits, `2 ≤ n ≤ 5`.
    Ghz(usize),
}

pub fn make_named_state(name: NamedState) -> Result<PureState> {
    let r = FRAC_1_SQRT_2;
    match name {
        NamedState::SingleExcitation { c1, c2 } => {
            let norm_sqr = c1.norm_sqr() + c2.norm_sqr();
            if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "|C1|^2 + |C2|^2 = {norm_sqr}, expected 1"
                )));
            }
            PureState::new(vec![ZERO, c1, c2, ZERO])
        }
        NamedState::Singlet => make_named_state(NamedState::SingleExcitation {
            c1: C64::new(r, 0.0),
            c2: C64::new(-r, 0.0),
        }),
        NamedState::TripletM0 => make_named_state(NamedState::SingleExcitation {
            c1: C64::new(r, 0.0),
            c2: C64::new(r, 0.0),
        }),
        NamedState::Ghz(n) => {
            if !(2..=MAX_QUBITS).contains(&n) {
                return Err(Error::InvalidArgument(format!(
                    "GHZ state needs 2..={MAX_QUBITS} qubits, got {n}"
                )));
            }
            let dim = 1usize << n;
            let mut amps = vec![ZERO; dim];
            amps[0] = C64::new(r, 0.0);
            amps[dim - 1] = C64::new(r, 0.0);
            PureState::new(amps)
        }
    }
}

/// The two-real-parameter form of the `C₁, C₂` family:
/// `C₁ = cos θ`, `C₂ = e^{iφ} sin θ` (global phase and normalization removed).
pub fn single_excitation_from_angles(theta: f64, phi: f64) -> Result<PureState> {
    make_named_state(NamedState::SingleExcitation {
        c1: C64::new(theta.cos(), 0.0),
        c2: C64::from_polar(theta.sin(), phi),
    })
}

/// `ρ = |ψ⟩⟨ψ|`
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let matrix = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
    DensityMatrix::from_trusted(psi.n_qubits(), matrix)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityReport {
    /// `Tr ρ²`
    pub purity: f64,
    /// `‖ρ² − ρ‖_F`
    pub pure_defect: f64,
    pub is_pure: bool,
}

pub fn purity_report(rho: &DensityMatrix) -> PurityReport {
    purity_report_with_threshold(rho, PURE_DEFECT_THRESHOLD)
}

pub fn purity_report_with_threshold(rho: &DensityMatrix, threshold: f64) -> PurityReport {
    let (purity, pure_defect) = purity_of_matrix(rho.matrix());
    PurityReport {
        purity,
        pure_defect,
        is_pure: pure_defect <= threshold,
    }
}

pub(crate) fn purity_of_matrix(m: &ComplexMatrix) -> (f64, f64) {
    let sq = m * m;
    (sq.trace().re, (&sq - m).frobenius_norm())
}

/// `Tr(ρA)`
pub fn expectation(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<C64> {
    if a.rows() != rho.dim() || a.cols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} observable on a {}-dimensional state",
            a.rows(),
            a.cols(),
            rho.dim()
        )));
    }
    Ok(trace_of_product(rho.matrix(), a))
}

/// `Tr(ρA)` for Hermitian `A`; the imaginary residue must stay below `1e-10`.
pub fn expectation_real(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<f64> {
    if !a.is_hermitian(1e-10) {
        return Err(Error::InvalidArgument("observable is not Hermitian".into()));
    }
    let z = expectation(rho, a)?;
    if z.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!(
            "expectation of a Hermitian observable has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `Tr(AB) = Σ_ij A_ij B_ji`
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.rows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// `⟨ψ|ρ|ψ⟩`
pub fn fidelity_with_pure(psi: &PureState, rho: &ComplexMatrix) -> f64 {
    let rho_psi = rho.mul_vec(psi.amplitudes());
    crate::linalg::inner(psi.amplitudes(), &rho_psi).re
}

/// `(Tr √(√ρ σ √ρ))²`; eigenvalues below `1e-13` count as zero so that
/// rounding noise is not amplified by the square roots.
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity of {}x{} and {}x{} matrices",
            rho.rows(),
            rho.cols(),
            sigma.rows(),
            sigma.cols()
        )));
    }
    let root = |l: f64| if l > 1e-13 { l.sqrt() } else { 0.0 };
    let sqrt_rho = herm_eig(rho)?.map_spectrum(root);
    let inner = &(&sqrt_rho * sigma) * &sqrt_rho;
    let root_trace: f64 = herm_eig(&inner)?
        .eigenvalues
        .iter()
        .map(|&l| root(l))
        .sum();
    Ok(root_trace * root_trace)
}

/// Haar-random pure state from normally distributed amplitudes.
pub fn random_pure_state(n_qubits: usize, rng: &mut impl Rng) -> PureState {
    let amps: Vec<C64> = (0..1usize << n_qubits)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(amps).expect("nonzero with probability one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    #[test]
    fn mixed_fidelity_agrees_with_pure_formula() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let psi = random_pure_state(2, &mut rng);
            let phi = random_pure_state(2, &mut rng);
            let sigma = density_from_pure(&phi).into_matrix();
            let pure = density_from_pure(&psi).into_matrix();
            let f = fidelity(&pure, &sigma).unwrap();
            assert!((f - fidelity_with_pure(&psi, &sigma)).abs() < 1e-9);
        }
        let mixed = DensityMatrix::maximally_mixed(1).unwrap().into_matrix();
        assert!((fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
        let up = density_from_pure(&PureState::basis(1, 0).unwrap()).into_matrix();
        assert!((fidelity(&up, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    const R: f64 = FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn pauli(k: usize) -> ComplexMatrix {
        crate::pauli_hs::single_pauli(k as u8)
    }

    #[test]
    fn singlet_amplitudes() {
        let s = make_named_state(NamedState::Singlet).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, c(R), c(-R), ZERO]);
    }

    #[test]
    fn ghz3_amplitudes() {
        let g = make_named_state(NamedState::Ghz(3)).unwrap();
        for (i, a) in g.amplitudes().iter().enumerate() {
            let want = if i == 0 || i == 7 { R } else { 0.0 };
            assert_eq!(*a, c(want));
        }
    }

    #[test]
    fn single_excitation_endpoint_is_product() {
        let s = make_named_state(NamedState::SingleExcitation { c1: ONE, c2: ZERO }).unwrap();
        let one = PureState::basis(1, 0).unwrap();
        let two = PureState::basis(1, 1).unwrap();
        assert_eq!(s, PureState::product(&[one, two]).unwrap());
    }

    #[test]
    fn named_state_errors() {
        assert!(make_named_state(NamedState::SingleExcitation { c1: ONE, c2: ONE }).is_err());
        assert!(make_named_state(NamedState::Ghz(1)).is_err());
        assert!(make_named_state(NamedState::Ghz(6)).is_err());
    }

    #[test]
    fn single_excitation_angle_form_matches_complex_form() {
        let a = single_excitation_from_angles(0.3, 1.1).unwrap();
        let b = make_named_state(NamedState::SingleExcitation {
            c1: c(0.3f64.cos()),
            c2: C64::from_polar(0.3f64.sin(), 1.1),
        })
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn singlet_density_matches_printed_matrix() {
        let rho = density_from_pure(&make_named_state(NamedState::Singlet).unwrap());
        let h = 0.5;
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, h, -h, 0.0],
            &[0.0, -h, h, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        assert!(rho.matrix().max_abs_diff(&expected) <= 1e-15);
        let report = purity_report(&rho);
        assert!((report.purity - 1.0).abs() <= 1e-10);
        assert!(report.pure_defect <= 1e-10);
        assert!(report.is_pure);
    }

    #[test]
    fn ghz3_density_corners() {
        let rho = density_from_pure(&make_named_state(NamedState::Ghz(3)).unwrap());
        for i in 0..8 {
            for j in 0..8 {
                let corner = (i == 0 || i == 7) && (j == 0 || j == 7);
                let want = if corner { 0.5 } else { 0.0 };
                assert!((rho.matrix().get(i, j) - c(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn basis_one_density() {
        let rho = density_from_pure(&PureState::basis(1, 0).unwrap());
        assert_eq!(*rho.matrix(), ComplexMatrix::real_diag(&[1.0, 0.0]));
    }

    #[test]
    fn purity_examples() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let r = purity_report(&mixed);
        assert!((r.purity - 0.25).abs() < 1e-15);
        assert!(!r.is_pure);

        let d = DensityMatrix::new(ComplexMatrix::real_diag(&[0.9, 0.1])).unwrap();
        let r = purity_report(&d);
        assert!((r.purity - 0.82).abs() < 1e-14);

        let loose = purity_report_with_threshold(&d, 1.0);
        assert!(loose.is_pure);
    }

    #[test]
    fn expectation_examples() {
        let rho = density_from_pure(&make_named_state(NamedState::Singlet).unwrap());
        let zz = kron(&pauli(3), &pauli(3));
        assert!((expectation_real(&rho, &zz).unwrap() + 1.0).abs() < 1e-15);
        assert!((expectation_real(&rho, &ComplexMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-15);

        let ghz = density_from_pure(&make_named_state(NamedState::Ghz(3)).unwrap());
        let xyy = kron(&kron(&pauli(1), &pauli(2)), &pauli(2));
        assert!((expectation_real(&ghz, &xyy).unwrap() + 1.0).abs() < 1e-15);

        assert!(matches!(
            expectation(&rho, &pauli(1)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn density_validation() {
        let not_unit = ComplexMatrix::real_diag(&[0.5, 0.4]);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = ComplexMatrix::real_diag(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
    }

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::new(vec![ONE, ZERO, ZERO]).is_err());
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
        let s = PureState::normalized(vec![ONE, ONE]).unwrap();
        assert!((s.amplitudes()[0].re - R).abs() < 1e-15);
    }
}
