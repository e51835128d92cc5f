//! Dense dictionaries, sparse coefficient vectors and the small amount of
//! linear algebra the pursuit and metric code needs on top of them.
//!
//! Indices are 0-based in this module. Conversion to the 1-based atom
//! numbering used in files and JSON happens at the I/O boundary.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Allowed deviation of a column norm from 1.
pub const NORM_TOL: f64 = 1e-12;
/// Columns with norm at or below this are rejected by [`normalize_columns`].
pub const ZERO_COLUMN_TOL: f64 = 1e-14;
/// Smallest singular value of a sub-dictionary considered full rank.
pub const RANK_TOL: f64 = 1e-10;

/// An `n x d` matrix whose columns (atoms) have unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    matrix: DMatrix<f64>,
}

impl Dictionary {
    /// Wraps `matrix` after checking shape, finiteness and unit column norms.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_shape_and_finite(&matrix)?;
        for (j, col) in matrix.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::NormViolation { index: j + 1, norm });
            }
        }
        Ok(Self { matrix })
    }

    /// Builds a dictionary from row-major data.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows_to_matrix(rows)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn d(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn atom(&self, i: usize) -> nalgebra::DVectorView<'_, f64> {
        self.matrix.column(i)
    }

    /// Full `d x d` Gram matrix `Phi^T Phi`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.matrix.tr_mul(&self.matrix)
    }

    /// Gram matrix restricted to `support`.
    pub fn gram_view(&self, support: &[usize]) -> Result<GramView> {
        let sub = self.columns(support)?;
        GramView::new(support.to_vec(), sub.tr_mul(&sub))
    }

    /// The sub-dictionary `Phi_Lambda` with columns in the order given.
    pub fn columns(&self, support: &[usize]) -> Result<DMatrix<f64>> {
        for &i in support {
            if i >= self.d() {
                return Err(Error::OrderOutOfRange {
                    k: i + 1,
                    max: self.d(),
                });
            }
        }
        Ok(self.matrix.select_columns(support))
    }

    /// Inner products `<r, phi_i>` for every atom, in atom order.
    pub fn correlations(&self, r: &DVector<f64>) -> Result<DVector<f64>> {
        if r.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: r.len(),
            });
        }
        Ok(self.matrix.tr_mul(r))
    }

    /// `Phi a` for a sparse coefficient vector.
    pub fn apply(&self, a: &SparseVector) -> Result<DVector<f64>> {
        if a.dim() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: a.dim(),
            });
        }
        let mut out = DVector::zeros(self.n());
        for (&i, &v) in a.support().iter().zip(a.values()) {
            out.axpy(v, &self.matrix.column(i), 1.0);
        }
        Ok(out)
    }

    /// Builds the measurement `f = Phi a + w`, with `epsilon = ||w||_2`.
    pub fn synthesize(&self, a: &SparseVector, w: Option<&DVector<f64>>) -> Result<Observation> {
        let mut f = self.apply(a)?;
        let epsilon = match w {
            Some(w) => {
                if w.len() != self.n() {
                    return Err(Error::DimensionMismatch {
                        expected: self.n(),
                        got: w.len(),
                    });
                }
                f += w;
                w.norm()
            }
            None => 0.0,
        };
        Observation::new(f, epsilon)
    }

    /// Smallest singular value of `Phi_Lambda`; zero when `|Lambda| > n`.
    pub fn sigma_min(&self, support: &[usize]) -> Result<f64> {
        if support.is_empty() {
            return Ok(f64::INFINITY);
        }
        if support.len() > self.n() {
            return Ok(0.0);
        }
        let sub = self.columns(support)?;
        let sv = sub.singular_values();
        Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Least-squares fit of `f` on the atoms in `support` via Householder QR.
    ///
    /// Fails with `RankDeficient` when `sigma_min(Phi_Lambda) <= RANK_TOL`.
    pub fn least_squares(&self, support: &[usize], f: &DVector<f64>) -> Result<LeastSquares> {
        if f.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: f.len(),
            });
        }
        if support.is_empty() {
            return Ok(LeastSquares {
                coefficients: DVector::zeros(0),
                residual: f.clone(),
            });
        }
        let sigma_min = self.sigma_min(support)?;
        if sigma_min <= RANK_TOL {
            return Err(Error::RankDeficient {
                support: support.iter().map(|i| i + 1).collect(),
                sigma_min,
            });
        }
        let sub = self.columns(support)?;
        let qr = sub.clone().qr();
        let qtf = qr.q().tr_mul(f);
        let coefficients =
            qr.r()
                .solve_upper_triangular(&qtf)
                .ok_or_else(|| Error::RankDeficient {
                    support: support.iter().map(|i| i + 1).collect(),
                    sigma_min,
                })?;
        let residual = f - &sub * &coefficients;
        Ok(LeastSquares {
            coefficients,
            residual,
        })
    }
}

/// Scales every column of `raw` to unit Euclidean norm.
pub fn normalize_columns(raw: DMatrix<f64>) -> Result<Dictionary> {
    check_shape_and_finite(&raw)?;
    let mut m = raw;
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm <= ZERO_COLUMN_TOL {
            return Err(Error::ZeroColumn(j + 1));
        }
        col /= norm;
    }
    Dictionary::new(m)
}

fn check_shape_and_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() < 1 || m.ncols() < 2 {
        return Err(Error::InvalidShape {
            n: m.nrows(),
            d: m.ncols(),
        });
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    for r in rows {
        if r.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
}

/// Result of [`Dictionary::least_squares`]: coefficients on the support
/// (in support order) and the residual `f - Phi_Lambda z`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: DVector<f64>,
    pub residual: DVector<f64>,
}

/// A sparse coefficient vector with explicit, strictly increasing support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new(dim: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::InvalidSparseVector(format!(
                "{} indices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.len() > dim {
            return Err(Error::InvalidSparsity {
                k: support.len(),
                d: dim,
            });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSparseVector(
                "support must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = support.last() {
            if last >= dim {
                return Err(Error::InvalidSparseVector(format!(
                    "index {} outside 1..={dim}",
                    last + 1
                )));
            }
        }
        if let Some(v) = values.iter().find(|v| **v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidSparseVector(format!(
                "stored value {v} must be finite and nonzero"
            )));
        }
        Ok(Self {
            dim,
            support,
            values,
        })
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        let (support, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .unzip();
        Self::new(dense.len(), support, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// Smallest nonzero magnitude; `None` for the zero vector.
    pub fn a_min(&self) -> Option<f64> {
        self.values.iter().map(|v| v.abs()).reduce(f64::min)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for (&i, &v) in self.support.iter().zip(&self.values) {
            out[i] = v;
        }
        out
    }
}

/// A measurement vector together with its declared noise budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    f: DVector<f64>,
    epsilon: f64,
}

impl Observation {
    pub fn new(f: DVector<f64>, epsilon: f64) -> Result<Self> {
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i + 1, col: 1 });
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise budget must be finite and >= 0, got {epsilon}"
            )));
        }
        Ok(Self { f, epsilon })
    }

    pub fn f(&self) -> &DVector<f64> {
        &self.f
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Gram matrix of a column subset, `G = Phi_Lambda^T Phi_Lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramView {
    support: Vec<usize>,
    gram: DMatrix<f64>,
}

impl GramView {
    fn new(support: Vec<usize>, gram: DMatrix<f64>) -> Result<Self> {
        let k = gram.nrows();
        for i in 0..k {
            if (gram[(i, i)] - 1.0).abs() > NORM_TOL {
                return Err(Error::NormViolation {
                    index: support[i] + 1,
                    norm: gram[(i, i)].sqrt(),
                });
            }
        }
        debug_assert!((0..k).all(|i| (0..i).all(|j| (gram[(i, j)] - gram[(j, i)]).abs() <= 1e-12)));
        Ok(Self { support, gram })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Gershgorin radii `R_i = sum_{j != i} |g_ij|`.
    pub fn gershgorin_radii(&self) -> Vec<f64> {
        let k = self.gram.nrows();
        (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != i)
                    .map(|j| self.gram[(i, j)].abs())
                    .sum()
            })
            .collect()
    }
}
