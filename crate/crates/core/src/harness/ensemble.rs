//! Random dictionaries, sparse signals and noise vectors.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::rng::rng;
use crate::dictionary::{normalize_columns, Dictionary, SparseVector};
use crate::error::{Error, Result};
use crate::io::read_dictionary;

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleKind {
    /// i.i.d. standard normal entries, columns normalized.
    GaussianNormalized,
    /// Columns `e_j + scale * g_j` for `j < min(n, d)`; the remaining
    /// `d - n` columns (if any) are plain Gaussian. Normalized afterwards.
    PartialIdentityPerturbed,
    FromFile {
        path: PathBuf,
        renormalize: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub d: usize,
    pub perturbation_scale: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn gaussian(n: usize, d: usize, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::GaussianNormalized,
            n,
            d,
            perturbation_scale: 0.0,
            seed,
        }
    }

    pub fn perturbed_identity(n: usize, d: usize, scale: f64, seed: u64) -> Self {
        Self {
            kind: EnsembleKind::PartialIdentityPerturbed,
            n,
            d,
            perturbation_scale: scale,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if matches!(self.kind, EnsembleKind::FromFile { .. }) {
            return Ok(());
        }
        if self.n < 1 || self.d < 2 {
            return Err(Error::InvalidShape {
                n: self.n,
                d: self.d,
            });
        }
        if !(self.perturbation_scale >= 0.0 && self.perturbation_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "perturbation scale must be finite and >= 0, got {}",
                self.perturbation_scale
            )));
        }
        Ok(())
    }
}

/// Entries are drawn in column-major order.
fn gaussian_matrix(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng(seed);
    let data: Vec<f64> = (0..n * d)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    DMatrix::from_vec(n, d, data)
}

pub fn generate_dictionary(spec: &EnsembleSpec) -> Result<Dictionary> {
    spec.validate()?;
    match &spec.kind {
        EnsembleKind::GaussianNormalized => {
            normalize_columns(gaussian_matrix(spec.n, spec.d, spec.seed))
        }
        EnsembleKind::PartialIdentityPerturbed => {
            let (n, d) = (spec.n, spec.d);
            let g = gaussian_matrix(n, d, spec.seed);
            let m = DMatrix::from_fn(n, d, |i, j| {
                if j < n {
                    let e = if i == j { 1.0 } else { 0.0 };
                    e + spec.perturbation_scale * g[(i, j)]
                } else {
                    g[(i, j)]
                }
            });
            normalize_columns(m)
        }
        EnsembleKind::FromFile { path, renormalize } => read_dictionary(path, *renormalize),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueModel {
    /// Random signs, unit magnitude.
    UnitSigns,
    /// Standard normal values.
    GaussianMagnitudes,
    /// Random signs, magnitudes `a_min (1 + |g|)` with the first support
    /// entry pinned to exactly `a_min`.
    MinMagnitude(f64),
}

/// A `k`-sparse vector in dimension `d`, support uniform without replacement.
pub fn generate_sparse_signal(
    d: usize,
    k: usize,
    seed: u64,
    model: ValueModel,
) -> Result<SparseVector> {
    if k > d {
        return Err(Error::InvalidSparsity { k, d });
    }
    if let ValueModel::MinMagnitude(a_min) = model {
        if !(a_min > 0.0 && a_min.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "a_min must be positive, got {a_min}"
            )));
        }
    }
    let mut rng = rng(seed);
    let mut support = index::sample(&mut rng, d, k).into_vec();
    support.sort_unstable();
    let values = (0..k)
        .map(|j| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            match model {
                ValueModel::UnitSigns => sign,
                ValueModel::GaussianMagnitudes => loop {
                    let v: f64 = StandardNormal.sample(&mut rng);
                    if v != 0.0 {
                        break v;
                    }
                },
                ValueModel::MinMagnitude(a_min) => {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    if j == 0 {
                        sign * a_min
                    } else {
                        sign * a_min * (1.0 + g.abs())
                    }
                }
            }
        })
        .collect();
    SparseVector::new(d, support, values)
}

/// Gaussian direction rescaled to Euclidean norm `norm` (zero when `norm == 0`).
pub fn generate_noise(n: usize, norm: f64, seed: u64) -> DVector<f64> {
    if norm == 0.0 {
        return DVector::zeros(n);
    }
    let mut rng = rng(seed);
    let mut w = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let len = w.norm();
    if len > 0.0 {
        w *= norm / len;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::mutual_coherence;

    #[test]
    fn gaussian_is_deterministic() {
        let spec = EnsembleSpec::gaussian(6, 10, 42);
        assert_eq!(
            generate_dictionary(&spec).unwrap(),
            generate_dictionary(&spec).unwrap()
        );
        let other = EnsembleSpec::gaussian(6, 10, 43);
        assert_ne!(
            generate_dictionary(&spec).unwrap(),
            generate_dictionary(&other).unwrap()
        );
    }

    #[test]
    fn zero_scale_perturbation_is_partial_identity() {
        let dict = generate_dictionary(&EnsembleSpec::perturbed_identity(5, 5, 0.0, 9)).unwrap();
        assert_eq!(dict.matrix(), &DMatrix::<f64>::identity(5, 5));
        assert_eq!(mutual_coherence(&dict), 0.0);
    }

    #[test]
    fn gaussian_columns_are_unit() {
        let dict = generate_dictionary(&EnsembleSpec::gaussian(8, 16, 7)).unwrap();
        for c in dict.matrix().column_iter() {
            assert!((c.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate_dictionary(&EnsembleSpec::gaussian(0, 4, 1)).is_err());
        assert!(generate_dictionary(&EnsembleSpec::gaussian(3, 1, 1)).is_err());
        assert!(generate_dictionary(&EnsembleSpec::perturbed_identity(3, 3, -1.0, 1)).is_err());
    }

    #[test]
    fn signal_examples() {
        let a = generate_sparse_signal(5, 5, 3, ValueModel::UnitSigns).unwrap();
        assert_eq!(a.support(), &[0, 1, 2, 3, 4]);
        assert!(a.values().iter().all(|v| v.abs() == 1.0));
        assert_eq!(a.a_min(), Some(1.0));
        assert!((a.norm() - 5f64.sqrt()).abs() < 1e-15);

        let x = generate_sparse_signal(10, 3, 1, ValueModel::GaussianMagnitudes).unwrap();
        let y = generate_sparse_signal(10, 3, 1, ValueModel::GaussianMagnitudes).unwrap();
        assert_eq!(x, y);

        let m = generate_sparse_signal(10, 4, 2, ValueModel::MinMagnitude(0.25)).unwrap();
        assert_eq!(m.a_min(), Some(0.25));

        assert!(matches!(
            generate_sparse_signal(3, 4, 0, ValueModel::UnitSigns),
            Err(Error::InvalidSparsity { .. })
        ));
    }

    #[test]
    fn noise_has_requested_norm() {
        let w = generate_noise(7, 0.3, 5);
        assert!((w.norm() - 0.3).abs() < 1e-15);
        assert_eq!(generate_noise(3, 0.0, 5).norm(), 0.0);
    }
}
