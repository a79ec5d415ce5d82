//! Finite hidden-variable models and the refined Shannon index.
//!
//! A model assigns weights `P_λ` to a finite set of hidden values and, for
//! each `λ`, independent outcome distributions `P(i|λ)` and `P(j|λ)` on the
//! two sides. The refined joint is `P_{ijλ} = P_λ P(i|λ) P(j|λ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlation::{shannon_index, LogBase, ProbabilityTable};
use crate::error::{Error, Result};

const STOCHASTIC_TOLERANCE: f64 = 1e-12;
/// Ratio-constancy tolerance of the equality test.
pub const EQUALITY_TOLERANCE: f64 = 1e-9;
/// Hidden values at or below this weight are ignored by the equality test.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HVModel {
    /// `P_λ`
    pub weights: Vec<f64>,
    /// `P(i|λ)`, one row per hidden value.
    pub cond_a: Vec<Vec<f64>>,
    /// `P(j|λ)`, one row per hidden value.
    pub cond_b: Vec<Vec<f64>>,
}

impl HVModel {
    pub fn new(weights: Vec<f64>, cond_a: Vec<Vec<f64>>, cond_b: Vec<Vec<f64>>) -> Result<Self> {
        let model = Self {
            weights,
            cond_a,
            cond_b,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if n == 0 {
            return Err(Error::InvalidArgument("model needs at least one hidden value".into()));
        }
        check_distribution("weights", &self.weights)?;
        for (name, table) in [("cond_a", &self.cond_a), ("cond_b", &self.cond_b)] {
            if table.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{name} has {} rows for {n} hidden values",
                    table.len()
                )));
            }
            let width = table[0].len();
            for (l, row) in table.iter().enumerate() {
                if row.len() != width || width == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "{name}[{l}] has {} outcomes, expected {width}",
                        row.len()
                    )));
                }
                check_distribution(&format!("{name}[{l}]"), row)?;
            }
        }
        Ok(())
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.len()
    }

    pub fn dim_a(&self) -> usize {
        self.cond_a[0].len()
    }

    pub fn dim_b(&self) -> usize {
        self.cond_b[0].len()
    }

    /// `P_{ijλ}`
    pub fn refined(&self, i: usize, j: usize, lambda: usize) -> f64 {
        self.weights[lambda] * self.cond_a[lambda][i] * self.cond_b[lambda][j]
    }

    /// Hidden value `λ` copies itself to both sides: `Λ = {0..d}` uniform,
    /// `P(i|λ) = δ_{iλ}`, `P(j|λ) = δ_{jλ}`.
    pub fn copier(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("copier needs d >= 1".into()));
        }
        let delta: Vec<Vec<f64>> = (0..d)
            .map(|l| (0..d).map(|i| if i == l { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(vec![1.0 / d as f64; d], delta.clone(), delta)
    }
}

fn check_distribution(name: &str, values: &[f64]) -> Result<()> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidArgument(format!("{name} has invalid entry {bad}")));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
        return Err(Error::InvalidArgument(format!("{name} sums to {total}, expected 1")));
    }
    Ok(())
}

/// `P_ij = Σ_λ P_{ijλ}`
pub fn induced_joint(model: &HVModel) -> Result<ProbabilityTable> {
    let (da, db) = (model.dim_a(), model.dim_b());
    let mut probs = vec![0.0; da * db];
    for l in 0..model.n_hidden() {
        for i in 0..da {
            for j in 0..db {
                probs[i * db + j] += model.refined(i, j, l);
            }
        }
    }
    ProbabilityTable::new(vec![da, db], probs)
}

/// `Σ_{ijλ} P_{ijλ} ln(P_{ijλ} / (P_i P_j P_λ))` in nats; zero terms contribute 0.
pub fn hv_shannon_index(model: &HVModel) -> Result<f64> {
    let joint = induced_joint(model)?;
    let (pa, pb) = (joint.marginal(0), joint.marginal(1));
    let mut acc = 0.0;
    for l in 0..model.n_hidden() {
        for (i, &p_i) in pa.iter().enumerate() {
            for (j, &p_j) in pb.iter().enumerate() {
                let p = model.refined(i, j, l);
                if p > 0.0 {
                    acc += p * (p / (p_i * p_j * model.weights[l])).ln();
                }
            }
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementReport {
    pub i_hv: f64,
    pub i_shann: f64,
    /// `i_hv − i_shann`
    pub gap: f64,
    /// `P_{ijλ} = P_λ C_ij` with `C` independent of `λ`.
    pub equality: bool,
}

pub fn check_refinement(model: &HVModel) -> Result<RefinementReport> {
    let i_hv = hv_shannon_index(model)?;
    let i_shann = shannon_index(&induced_joint(model)?, LogBase::Nats);
    Ok(RefinementReport {
        i_hv,
        i_shann,
        gap: i_hv - i_shann,
        equality: equality_holds(model),
    })
}

/// For every `(i, j)`, `P_{ijλ}/P_λ = P(i|λ)P(j|λ)` must not vary over the
/// hidden values with non-negligible weight.
fn equality_holds(model: &HVModel) -> bool {
    let active: Vec<usize> = (0..model.n_hidden())
        .filter(|&l| model.weights[l] > NEGLIGIBLE_WEIGHT)
        .collect();
    for i in 0..model.dim_a() {
        for j in 0..model.dim_b() {
            let ratio = |l: usize| model.cond_a[l][i] * model.cond_b[l][j];
            let Some(&first) = active.first() else {
                return true;
            };
            let c = ratio(first);
            if active.iter().any(|&l| (ratio(l) - c).abs() > EQUALITY_TOLERANCE) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSumCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `Σ x ln(x/a) ≥ (Σx) ln(Σx / Σa)` with `0 ln(0/a) = 0` and `x ln(x/0) = +∞`.
pub fn logsum_check(x: &[f64], a: &[f64]) -> Result<LogSumCheck> {
    if x.len() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values against {} weights",
            x.len(),
            a.len()
        )));
    }
    if let Some(bad) = x.iter().chain(a).find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidArgument(format!("negative or non-finite entry {bad}")));
    }
    let term = |x: f64, a: f64| -> f64 {
        if x == 0.0 {
            0.0
        } else if a == 0.0 {
            f64::INFINITY
        } else {
            x * (x / a).ln()
        }
    };
    let lhs: f64 = x.iter().zip(a).map(|(&x, &a)| term(x, a)).sum();
    let rhs = term(x.iter().sum(), a.iter().sum());
    Ok(LogSumCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12,
    })
}

/// Sizes of a random model: hidden values and the two outcome alphabets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelSizes {
    pub n_hidden: usize,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl std::str::FromStr for ModelSizes {
    type Err = Error;

    /// `"L,di,dj"`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("sizes {s:?}: {e}")))?;
        match parts[..] {
            [n_hidden, dim_a, dim_b] => Ok(Self {
                n_hidden,
                dim_a,
                dim_b,
            }),
            _ => Err(Error::InvalidArgument(format!("sizes {s:?} must be L,di,dj"))),
        }
    }
}

/// Weights and conditional rows drawn as normalized uniform positives,
/// deterministic per seed.
pub fn random_model(seed: u64, sizes: ModelSizes) -> Result<HVModel> {
    if sizes.n_hidden == 0 || sizes.dim_a == 0 || sizes.dim_b == 0 {
        return Err(Error::InvalidArgument("model sizes must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = random_simplex(&mut rng, sizes.n_hidden);
    let cond_a = (0..sizes.n_hidden).map(|_| random_simplex(&mut rng, sizes.dim_a)).collect();
    let cond_b = (0..sizes.n_hidden).map(|_| random_simplex(&mut rng, sizes.dim_b)).collect();
    HVModel::new(weights, cond_a, cond_b)
}

fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}
