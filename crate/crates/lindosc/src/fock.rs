//! Truncated Fock-space operators and density matrices.
//!
//! All operators live on the truncated space spanned by the number states
//! `|0>, ..., |D-1>` and are stored as dense `D x D` complex matrices.
//! Truncation breaks `[a, a_dag] = 1` in the top level only: the commutator
//! equals the identity on rows/columns `0..D-2` and its `(D-1, D-1)` entry is
//! `1 - D`. Algebraic identities are therefore always asserted on an interior
//! block with a guard band, never on the full truncated matrix.

use ndarray::Array2;
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::ComplexFloat;
use num_traits::Zero;

use crate::{Error, ModelParams, Result, C64};

/// Operator kinds constructible directly on the truncated number basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `a`: `a|n> = sqrt(n) |n-1>`.
    Annihilate,
    /// `a_dag`: `a_dag|n> = sqrt(n+1) |n+1>`.
    Create,
    /// `N = a_dag a`.
    Number,
    /// `H = omega * N`.
    Hamiltonian,
    /// The identity.
    Identity,
}

/// Dense complex operator on the truncated Fock space, tagged with its
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    mat: Array2<C64>,
}

impl FockOperator {
    /// Wraps a square matrix, checking dimension and finiteness.
    pub fn from_matrix(mat: Array2<C64>) -> Result<Self> {
        let (rows, cols) = mat.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::DimensionTooSmall { dim: rows });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: Array2<C64>) -> Self {
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: Array2::eye(dim),
        }
    }

    /// Truncated annihilation operator.
    pub fn annihilation(dim: usize) -> Self {
        let mut mat = Array2::zeros((dim, dim));
        for n in 1..dim {
            mat[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self { mat }
    }

    /// Truncated creation operator (conjugate transpose of `annihilation`).
    pub fn creation(dim: usize) -> Self {
        Self::annihilation(dim).adjoint()
    }

    /// Number operator `diag(0, 1, ..., D-1)`.
    pub fn number(dim: usize) -> Self {
        let mut mat = Array2::zeros((dim, dim));
        for n in 0..dim {
            mat[[n, n]] = C64::new(n as f64, 0.0);
        }
        Self { mat }
    }

    /// Diagonal operator with the given complex entries.
    pub fn from_diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        let mut mat = Array2::zeros((dim, dim));
        for (n, z) in diag.iter().enumerate() {
            mat[[n, n]] = *z;
        }
        Self { mat }
    }

    /// Matrix unit `|r><c|`.
    pub fn basis(r: usize, c: usize, dim: usize) -> Self {
        let mut mat = Array2::zeros((dim, dim));
        mat[[r, c]] = C64::new(1.0, 0.0);
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.mat[[r, c]]
    }

    pub fn set(&mut self, r: usize, c: usize, value: C64) {
        self.mat[[r, c]] = value;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.t().mapv(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    /// Frobenius (Hilbert-Schmidt) norm.
    pub fn norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.mat.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    /// `max |(A - A_dag)[i,j]|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.mat[[i, j]] - self.mat[[j, i]].conj()).abs();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            mat: self.mat.dot(&rhs.mat),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            mat: &self.mat + &rhs.mat,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            mat: &self.mat - &rhs.mat,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            mat: self.mat.mapv(|z| z * factor),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Highest level index carrying any entry with magnitude above `cutoff`.
    pub fn support_max_level(&self, cutoff: f64) -> Option<usize> {
        let n = self.dim();
        for level in (0..n).rev() {
            let row = self.mat.row(level).iter().any(|z| z.abs() > cutoff);
            let col = self.mat.column(level).iter().any(|z| z.abs() > cutoff);
            if row || col {
                return Some(level);
            }
        }
        None
    }

    /// Restriction to the leading `size x size` block (used for interior-band
    /// comparisons near the truncation edge).
    pub fn leading_block(&self, size: usize) -> Self {
        let size = size.min(self.dim());
        Self {
            mat: self.mat.slice(ndarray::s![..size, ..size]).to_owned(),
        }
    }

    /// Eigenvalues of the Hermitian part `(A + A_dag)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let herm = self.mat.mapv(|z| z) * C64::new(0.5, 0.0)
            + self.mat.t().mapv(|z| z.conj()) * C64::new(0.5, 0.0);
        let vals = herm.eigvalsh(UPLO::Lower)?;
        Ok(vals.to_vec())
    }
}

pub fn commutator(a: &FockOperator, b: &FockOperator) -> FockOperator {
    a.mul(b).sub(&b.mul(a))
}

/// Trace norm `sum |eigenvalue|` of the Hermitian part of `a`.
///
/// All users in this crate take differences of (near-)Hermitian matrices, so
/// the Hermitian-part eigensolve is exact up to the caller's own defects.
pub fn trace_norm(a: &FockOperator) -> Result<f64> {
    Ok(a.hermitian_eigenvalues()?.iter().map(|v| v.abs()).sum())
}

/// Trace distance `|| a - b ||_1 / 2` (half the trace norm of the
/// difference; the factor-of-two convention is fixed here).
pub fn trace_distance(a: &FockOperator, b: &FockOperator) -> Result<f64> {
    Ok(0.5 * trace_norm(&a.sub(b))?)
}

pub fn anticommutator(a: &FockOperator, b: &FockOperator) -> FockOperator {
    a.mul(b).add(&b.mul(a))
}

/// Builds one of the standard operators at dimension `dim`.
pub fn fock_operator(kind: OperatorKind, params: &ModelParams, dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    Ok(match kind {
        OperatorKind::Annihilate => FockOperator::annihilation(dim),
        OperatorKind::Create => FockOperator::creation(dim),
        OperatorKind::Number => FockOperator::number(dim),
        OperatorKind::Hamiltonian => FockOperator::number(dim).scale_re(params.omega()),
        OperatorKind::Identity => FockOperator::identity(dim),
    })
}

/// Unnormalized thermal kernel `diag(xi^n)`.
pub(crate) fn thermal_kernel(xi: f64, dim: usize) -> FockOperator {
    let diag: Vec<C64> = (0..dim).map(|n| C64::new(xi.powi(n as i32), 0.0)).collect();
    FockOperator::from_diagonal(&diag)
}

/// Density matrix: a Fock operator that is Hermitian, unit-trace and positive
/// semidefinite up to the documented tolerances.
///
/// [`DensityMatrix::new`] enforces the invariants strictly (hermiticity and
/// trace defects below `1e-12`, minimum eigenvalue above `-1e-10`).
/// Propagator outputs are wrapped without re-validation — their guarantees
/// are the propagation theorems themselves and are checked empirically by
/// [`validate_density`] and the acceptance suite, because a truncated mode
/// sum can carry slightly larger (and physically meaningful) defects that
/// must be reported rather than masked.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: FockOperator,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const MIN_EIGENVALUE_TOL: f64 = -1e-10;

    /// Validates and wraps `op`.
    pub fn new(op: FockOperator) -> Result<Self> {
        let report = validate_density(&op)?;
        if report.hermiticity_defect > Self::HERMITICITY_TOL
            || report.trace_defect > Self::TRACE_TOL
            || report.min_eigenvalue < Self::MIN_EIGENVALUE_TOL
        {
            return Err(Error::InvalidDensity {
                hermiticity: report.hermiticity_defect,
                trace_defect: report.trace_defect,
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        Ok(Self { op })
    }

    /// Wraps without validation; reserved for outputs whose invariants are
    /// guaranteed analytically by the producing propagator.
    pub(crate) fn wrap(op: FockOperator) -> Self {
        Self { op }
    }

    pub fn op(&self) -> &FockOperator {
        &self.op
    }

    pub fn into_op(self) -> FockOperator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `1 - Re tr(rho)`; for the truncated Gibbs state this equals `xi^D`.
    pub fn trace_deficit(&self) -> f64 {
        1.0 - self.op.trace().re
    }
}

/// Diagnostic report of the density-matrix invariants.
#[derive(Debug, Clone, Copy)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part `(rho + rho_dag)/2`.
    pub min_eigenvalue: f64,
}

/// Measures how far `rho` is from being a density matrix. Diagnostic only —
/// never fails on defective input.
pub fn validate_density(rho: &FockOperator) -> Result<DensityReport> {
    let hermiticity_defect = rho.hermiticity_defect();
    let trace_defect = (rho.trace() - C64::new(1.0, 0.0)).abs();
    let eigs = rho.hermitian_eigenvalues()?;
    let min_eigenvalue = eigs.first().copied().unwrap_or(f64::NAN);
    Ok(DensityReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
    })
}

/// Truncated Gibbs state `(1 - xi) diag(xi^n)`.
///
/// Deliberately *not* renormalized after truncation: its trace is
/// `1 - xi^D`, and keeping the raw geometric weights means closed-form
/// expressions built from `1/(1-xi)` match the matrix up to the explicitly
/// reported deficit ([`DensityMatrix::trace_deficit`]).
pub fn gibbs_state(params: &ModelParams, dim: usize) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let xi = params.xi();
    let op = thermal_kernel(xi, dim).scale_re(1.0 - xi);
    Ok(DensityMatrix::wrap(op))
}

impl std::ops::Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator::add(self, rhs)
    }
}

impl std::ops::Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator::sub(self, rhs)
    }
}

impl std::ops::Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator::mul(self, rhs)
    }
}

impl std::ops::Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        self.scale_re(-1.0)
    }
}

impl Zero for FockOperator {
    fn zero() -> Self {
        FockOperator::zeros(2)
    }
    fn is_zero(&self) -> bool {
        self.mat.iter().all(|z| z.is_zero())
    }
}

impl std::ops::Add for FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: FockOperator) -> FockOperator {
        FockOperator::add(&self, &rhs)
    }
}
