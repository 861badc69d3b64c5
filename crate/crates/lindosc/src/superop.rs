//! Vectorization and the Liouvillian / auxiliary superoperators.
//!
//! Superoperators act on `D x D` operators; after vectorization they become
//! `D^2 x D^2` matrices. Every superoperator here exists in two forms — a
//! dense matrix and a direct operator-level action — and the two are required
//! to agree to `1e-12`, which the unit tests enforce.
//!
//! # Vectorization convention (normative)
//!
//! Column stacking: `vec(A)[i + D*j] = A[i, j]`. Under this convention the
//! map `rho -> X rho Y_dag` has the matrix `kron(conj(Y), X)`, and the
//! Hilbert-Schmidt adjoint of a superoperator is the conjugate transpose of
//! its matrix. All `D^2 x D^2` matrices produced by this crate are
//! bit-comparable across implementations that fix the same convention.
//!
//! Truncation note: the generator is assembled from the *truncated* products
//! `a_dag a` and `a a_dag` (the latter has a zero, not `D`, in its top
//! diagonal slot). With that convention detailed balance survives truncation
//! and the Gibbs state is stationary to machine precision, not merely to
//! `O(xi^D)`.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};

use crate::fock::anticommutator;
use crate::{Error, FockOperator, ModelParams, Result, C64};

/// Column-stacks `A` into a length-`D^2` vector: `vec(A)[i + D*j] = A[i, j]`.
pub fn vectorize(a: &FockOperator) -> Array1<C64> {
    let d = a.dim();
    let mut v = Array1::zeros(d * d);
    for j in 0..d {
        for i in 0..d {
            v[i + d * j] = a.get(i, j);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &Array1<C64>, dim: usize) -> Result<FockOperator> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            left: v.len(),
            right: dim * dim,
        });
    }
    let mut mat = Array2::zeros((dim, dim));
    for j in 0..dim {
        for i in 0..dim {
            mat[[i, j]] = v[i + dim * j];
        }
    }
    Ok(FockOperator::from_matrix_unchecked(mat))
}

/// Dense `D^2 x D^2` matrix acting on vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    mat: Array2<C64>,
}

impl SuperOperator {
    pub fn from_matrix(dim: usize, mat: Array2<C64>) -> Result<Self> {
        let (rows, cols) = mat.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows != dim * dim {
            return Err(Error::DimensionMismatch {
                left: rows,
                right: dim * dim,
            });
        }
        Ok(Self { dim, mat })
    }

    /// Base (operator) dimension `D`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    /// Matrix of `rho -> X rho Y_dag`.
    pub fn sandwich(x: &FockOperator, y: &FockOperator) -> SuperOperator {
        let y_conj = y.matrix().mapv(|z| z.conj());
        SuperOperator {
            dim: x.dim(),
            mat: kron(&y_conj, x.matrix()),
        }
    }

    /// Matrix of `rho -> M rho`.
    pub fn left_mul(m: &FockOperator) -> SuperOperator {
        let eye = Array2::eye(m.dim());
        SuperOperator {
            dim: m.dim(),
            mat: kron(&eye, m.matrix()),
        }
    }

    /// Matrix of `rho -> rho M`.
    pub fn right_mul(m: &FockOperator) -> SuperOperator {
        let eye = Array2::eye(m.dim());
        SuperOperator {
            dim: m.dim(),
            mat: kron(&m.matrix().t().to_owned(), &eye),
        }
    }

    /// Builds the matrix column by column from an arbitrary action.
    pub fn from_action<F>(dim: usize, action: F) -> SuperOperator
    where
        F: Fn(&FockOperator) -> FockOperator,
    {
        let mut mat = Array2::zeros((dim * dim, dim * dim));
        for j in 0..dim {
            for i in 0..dim {
                let out = action(&FockOperator::basis(i, j, dim));
                let col = vectorize(&out);
                for (row, z) in col.iter().enumerate() {
                    mat[[row, i + dim * j]] = *z;
                }
            }
        }
        SuperOperator { dim, mat }
    }

    /// Applies the matrix to an operator (vectorize, multiply, devectorize).
    pub fn apply(&self, a: &FockOperator) -> Result<FockOperator> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: self.dim,
            });
        }
        let v = self.mat.dot(&vectorize(a));
        devectorize(&v, self.dim)
    }

    /// Hilbert-Schmidt adjoint: the conjugate transpose of the matrix.
    pub fn adjoint(&self) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            mat: self.mat.t().mapv(|z| z.conj()),
        }
    }

    /// Trace dual: the plain transpose of the matrix. Satisfies
    /// `tr((S* W) rho) = tr(W (S rho))` for the unconjugated trace pairing.
    pub fn trace_dual(&self) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            mat: self.mat.t().to_owned(),
        }
    }

    pub fn add(&self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }

    pub fn sub(&self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            mat: &self.mat - &rhs.mat,
        }
    }

    pub fn scale(&self, factor: C64) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            mat: self.mat.mapv(|z| z * factor),
        }
    }

    /// Composition `self . rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SuperOperator) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            mat: self.mat.dot(&rhs.mat),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The three quadratic superoperators closing an sl(2) algebra:
/// `[JumpDown, JumpUp] = NumberWeight`, `[NumberWeight, JumpDown] = -2 JumpDown`,
/// `[NumberWeight, JumpUp] = 2 JumpUp` (on interior-supported inputs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sl2Generator {
    /// `rho -> a rho a_dag` (downward quantum jump).
    JumpDown,
    /// `rho -> a_dag rho a` (upward quantum jump). Loses the top level under
    /// truncation.
    JumpUp,
    /// `rho -> {N + 1/2, rho}`.
    NumberWeight,
}

/// Direct action of an sl(2) generator.
pub fn apply_sl2(which: Sl2Generator, a: &FockOperator) -> FockOperator {
    let dim = a.dim();
    let ann = FockOperator::annihilation(dim);
    match which {
        Sl2Generator::JumpDown => ann.mul(a).mul(&ann.adjoint()),
        Sl2Generator::JumpUp => ann.adjoint().mul(a).mul(&ann),
        Sl2Generator::NumberWeight => {
            let n_half = FockOperator::number(dim).add(&FockOperator::identity(dim).scale_re(0.5));
            anticommutator(&n_half, a)
        }
    }
}

/// Matrix form of an sl(2) generator.
pub fn sl2_matrix(which: Sl2Generator, dim: usize) -> SuperOperator {
    let ann = FockOperator::annihilation(dim);
    match which {
        Sl2Generator::JumpDown => SuperOperator::sandwich(&ann, &ann),
        Sl2Generator::JumpUp => SuperOperator::sandwich(&ann.adjoint(), &ann.adjoint()),
        Sl2Generator::NumberWeight => {
            let n_half = FockOperator::number(dim).add(&FockOperator::identity(dim).scale_re(0.5));
            SuperOperator::left_mul(&n_half).add(&SuperOperator::right_mul(&n_half))
        }
    }
}

/// One-sided multiplication superoperators. The left pair and the right pair
/// are independent ladder algebras: `[AnnihilateLeft, CreateLeft] = 1` and
/// `[AnnihilateRight', ...]` likewise on interior-supported inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    /// `rho -> a_dag rho`.
    CreateLeft,
    /// `rho -> a rho`.
    AnnihilateLeft,
    /// `rho -> rho a`.
    AnnihilateRight,
    /// `rho -> rho a_dag`.
    CreateRight,
}

/// Direct action of a one-sided multiplication.
pub fn apply_elementary(which: Elementary, a: &FockOperator) -> FockOperator {
    let ann = FockOperator::annihilation(a.dim());
    match which {
        Elementary::CreateLeft => ann.adjoint().mul(a),
        Elementary::AnnihilateLeft => ann.mul(a),
        Elementary::AnnihilateRight => a.mul(&ann),
        Elementary::CreateRight => a.mul(&ann.adjoint()),
    }
}

/// Matrix form of a one-sided multiplication.
pub fn elementary_matrix(which: Elementary, dim: usize) -> SuperOperator {
    let ann = FockOperator::annihilation(dim);
    match which {
        Elementary::CreateLeft => SuperOperator::left_mul(&ann.adjoint()),
        Elementary::AnnihilateLeft => SuperOperator::left_mul(&ann),
        Elementary::AnnihilateRight => SuperOperator::right_mul(&ann),
        Elementary::CreateRight => SuperOperator::right_mul(&ann.adjoint()),
    }
}

/// Direct action of the generator:
/// `L rho = -i[H, rho] + gamma (a rho a_dag - {a_dag a, rho}/2)
///  + gamma' (a_dag rho a - {a a_dag, rho}/2)`.
pub fn liouvillian_apply(params: &ModelParams, a: &FockOperator) -> FockOperator {
    let dim = a.dim();
    let ann = FockOperator::annihilation(dim);
    let cre = ann.adjoint();
    let n = cre.mul(&ann);
    let aad = ann.mul(&cre);
    let h = n.scale_re(params.omega());

    let unitary = crate::fock::commutator(&h, a).scale(C64::new(0.0, -1.0));
    let down = ann
        .mul(a)
        .mul(&cre)
        .sub(&anticommutator(&n, a).scale_re(0.5))
        .scale_re(params.gamma());
    let up = cre
        .mul(a)
        .mul(&ann)
        .sub(&anticommutator(&aad, a).scale_re(0.5))
        .scale_re(params.gamma_prime());
    unitary.add(&down).add(&up)
}

/// Direct action of the Hilbert-Schmidt adjoint generator:
/// `L_dag A = i[H, A] + gamma (a_dag A a - {a_dag a, A}/2)
///  + gamma' (a A a_dag - {a a_dag, A}/2)`.
pub fn adjoint_liouvillian_apply(params: &ModelParams, a: &FockOperator) -> FockOperator {
    let dim = a.dim();
    let ann = FockOperator::annihilation(dim);
    let cre = ann.adjoint();
    let n = cre.mul(&ann);
    let aad = ann.mul(&cre);
    let h = n.scale_re(params.omega());

    let unitary = crate::fock::commutator(&h, a).scale(C64::new(0.0, 1.0));
    let down = cre
        .mul(a)
        .mul(&ann)
        .sub(&anticommutator(&n, a).scale_re(0.5))
        .scale_re(params.gamma());
    let up = ann
        .mul(a)
        .mul(&cre)
        .sub(&anticommutator(&aad, a).scale_re(0.5))
        .scale_re(params.gamma_prime());
    unitary.add(&down).add(&up)
}

/// Kronecker assembly of the generator under the fixed vectorization.
pub fn liouvillian_matrix(params: &ModelParams, dim: usize) -> Result<SuperOperator> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let ann = FockOperator::annihilation(dim);
    let cre = ann.adjoint();
    let n = cre.mul(&ann);
    let aad = ann.mul(&cre);
    let h = n.scale_re(params.omega());

    let comm = SuperOperator::left_mul(&h)
        .sub(&SuperOperator::right_mul(&h))
        .scale(C64::new(0.0, -1.0));
    let half = C64::new(0.5, 0.0);
    let down = SuperOperator::sandwich(&ann, &ann).sub(
        &SuperOperator::left_mul(&n)
            .add(&SuperOperator::right_mul(&n))
            .scale(half),
    );
    let up = SuperOperator::sandwich(&cre, &cre).sub(
        &SuperOperator::left_mul(&aad)
            .add(&SuperOperator::right_mul(&aad))
            .scale(half),
    );
    Ok(comm
        .add(&down.scale(C64::new(params.gamma(), 0.0)))
        .add(&up.scale(C64::new(params.gamma_prime(), 0.0))))
}
