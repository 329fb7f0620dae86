//! Dense complex linear algebra sized for small Hilbert spaces.
//!
//! Everything here is exact-shape, heap-light, and capped at dimension
//! [`MAX_DIM`]; the scenarios this crate verifies live in dimensions 3, 4,
//! and 8, so no sparse or blocked representations are warranted.
//!
//! Conventions:
//! - matrices are square, row-major;
//! - `a.tensor(&b)` is the Kronecker product with the *left* factor selecting
//!   the coarse blocks, so qubit 1 of a register is the leftmost factor;
//! - norms are Frobenius.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Largest Hilbert-space dimension the toolkit accepts (six qubits).
pub const MAX_DIM: usize = 64;

/// Norm floor below which a vector counts as zero and cannot be normalized.
pub const ZERO_NORM_TOL: f64 = 1e-12;

fn check_dim(what: &'static str, dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::ZeroVector { norm: 0.0 });
    }
    if dim > MAX_DIM {
        return Err(Error::TooLarge {
            what,
            size: dim,
            max: MAX_DIM,
        });
    }
    Ok(())
}

fn check_finite(what: &'static str, entries: &[Complex]) -> Result<()> {
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { what });
    }
    Ok(())
}

/// Unit vector in C^d, d <= [`MAX_DIM`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    entries: Vec<Complex>,
}

impl StateVector {
    /// Normalizes `raw` to unit Euclidean norm.
    ///
    /// A vector already unit-length within a few ulps is kept bit-for-bit:
    /// dividing by a norm that far from 1 could only toggle last bits, and
    /// skipping it makes writing out a normalized vector and reading it back
    /// an exact identity.
    pub fn normalize(raw: &[Complex]) -> Result<Self> {
        check_dim("vector dimension", raw.len())?;
        check_finite("state vector", raw)?;
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < ZERO_NORM_TOL {
            return Err(Error::ZeroVector { norm });
        }
        let entries = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            raw.to_vec()
        } else {
            raw.iter().map(|z| z / norm).collect()
        };
        Ok(Self { entries })
    }

    /// Normalizes a vector given by real amplitudes.
    pub fn from_reals(raw: &[f64]) -> Result<Self> {
        let entries: Vec<Complex> = raw.iter().map(|&x| Complex::new(x, 0.0)).collect();
        Self::normalize(&entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Square dense complex matrix, row-major, dimension <= [`MAX_DIM`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Result<Self> {
        check_dim("matrix dimension", dim)?;
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        check_finite("matrix", &entries)?;
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let dim = rows.len();
        check_dim("matrix dimension", dim)?;
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
        }
        Self::from_fn(dim, |r, c| rows[r][c])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |r, c| {
            if r == c {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let d = self.dim;
        Self::from_fn(d, |r, c| {
            (0..d).map(|k| self.get(r, k) * other.get(k, c)).sum()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_fn(self.dim, |r, c| self.get(r, c) + other.get(r, c))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Self::from_fn(self.dim, |r, c| self.get(r, c) - other.get(r, c))
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
            .expect("adjoint preserves dimension")
    }

    /// Kronecker product; `self` selects the coarse blocks of the result.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let d = self
            .dim
            .checked_mul(other.dim)
            .ok_or(Error::TooLarge {
                what: "matrix dimension",
                size: usize::MAX,
                max: MAX_DIM,
            })?;
        Self::from_fn(d, |r, c| {
            self.get(r / other.dim, c / other.dim) * other.get(r % other.dim, c % other.dim)
        })
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to `other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| {
            (r..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol)
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &StateVector) -> Result<Vec<Complex>> {
        if self.dim != v.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        Ok((0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.get(r, c) * v.entries()[c]).sum())
            .collect())
    }
}

/// Rank-one projector `|v><v|`.
pub fn projector(v: &StateVector) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.dim(), |r, c| v.entries()[r] * v.entries()[c].conj())
        .expect("projector of a valid state has a valid dimension")
}

/// Frobenius norm of the commutator `AB - BA`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.mat_mul(b)?.distance(&b.mat_mul(a)?)
}

/// Expectation value `<psi|M|psi>`. The caller decides how much imaginary
/// part to tolerate; Hermitian `M` gives a real value up to rounding.
pub fn expectation(psi: &StateVector, m: &ComplexMatrix) -> Result<Complex> {
    let mv = m.apply(psi)?;
    Ok(psi
        .entries()
        .iter()
        .zip(&mv)
        .map(|(a, b)| a.conj() * b)
        .sum())
}
