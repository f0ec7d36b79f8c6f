//! Dense complex operator algebra.

mod eigen;
mod io;
mod operator;
mod random;

use std::ops::Deref;

pub use eigen::{eig_hermitian, Spectrum};
pub use io::{read_matrix, write_matrix};
pub use operator::Operator;
pub use random::{haar_unitary, random_local_unitary, random_pure_vector, random_state, stream};

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::tolerance::{EPS_RANK, TOL_HERM, TOL_PSD, TOL_TRACE};

/// A validated quantum state: Hermitian, PSD and unit trace within tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<R: Real>(Operator<R>);

impl<R: Real> DensityOperator<R> {
    pub fn new(op: Operator<R>) -> Result<Self> {
        if !op.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = op.hermiticity_defect();
        if defect > R::tol(TOL_HERM) {
            return Err(Error::NotHermitian(defect.as_f64()));
        }
        let tr = op.trace().re;
        if (tr - R::one()).abs() > R::tol(TOL_TRACE) {
            return Err(Error::BadTrace(tr.as_f64()));
        }
        let spec = eig_hermitian(&op)?;
        if spec.min() < -R::tol(TOL_PSD) {
            return Err(Error::NotPsd(spec.min().as_f64()));
        }
        Ok(DensityOperator(op))
    }

    /// Wraps an operator that is a state by construction (partial traces,
    /// convex mixtures and unitary conjugates of states).
    pub(crate) fn assume_valid(op: Operator<R>) -> Self {
        debug_assert!(op.hermiticity_defect() <= R::tol(1e-8));
        DensityOperator(op)
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(factors: &[usize], psi: &[crate::scalar::C<R>]) -> Result<Self> {
        let norm: R = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm == R::zero() {
            return Err(Error::InvalidRank { rank: 0, dim: psi.len() });
        }
        let op = Operator::projector(factors, psi)?.scale(R::one() / norm);
        Ok(DensityOperator(op))
    }

    /// `I/d^n` on `n` qudits.
    pub fn maximally_mixed(n: usize, d: usize) -> Self {
        let factors = Operator::<R>::qudit_factors(n, d);
        let id = Operator::identity(&factors);
        let dim = id.dim();
        DensityOperator(id.scale(R::one() / R::from_usize_lossy(dim)))
    }

    /// Computational basis state `|k_1 … k_n⟩⟨k_1 … k_n|`.
    pub fn basis_state(n: usize, d: usize, digits: &[usize]) -> Result<Self> {
        if digits.len() != n || digits.iter().any(|&k| k >= d) {
            return Err(Error::DimensionMismatch(format!("basis label {digits:?} for n={n}, d={d}")));
        }
        let factors = Operator::<R>::qudit_factors(n, d);
        let idx = digits.iter().fold(0, |acc, &k| acc * d + k);
        let mut op = Operator::zeros(&factors);
        op[(idx, idx)] = c(R::one(), R::zero());
        Ok(DensityOperator(op))
    }

    pub fn as_operator(&self) -> &Operator<R> {
        &self.0
    }

    pub fn into_operator(self) -> Operator<R> {
        self.0
    }

    pub fn kron(&self, other: &Self) -> Self {
        DensityOperator(self.0.kron(&other.0))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(DensityOperator(self.0.partial_trace(keep)?))
    }

    pub fn partial_transpose(&self, part: &[usize]) -> Result<Operator<R>> {
        self.0.partial_transpose(part)
    }

    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        Ok(DensityOperator(self.0.permute_factors(order)?))
    }

    /// `U ρ U†` for unitary `U`.
    pub fn conjugate_by(&self, u: &Operator<R>) -> Result<Self> {
        Ok(DensityOperator(self.0.conjugate_by(u)?))
    }

    /// `λρ + (1−λ)σ`.
    pub fn mix(&self, other: &Self, lambda: R) -> Result<Self> {
        let a = self.0.scale(lambda);
        let b = other.0.scale(R::one() - lambda);
        Ok(DensityOperator(a.try_add(&b)?))
    }

    pub fn purity(&self) -> R {
        self.0.trace_product(&self.0).map(|z| z.re).unwrap_or_else(|_| R::nan())
    }

    /// `‖ρ − σ‖₁`.
    pub fn trace_norm_distance(&self, other: &Self) -> Result<R> {
        trace_norm(&self.0.try_sub(&other.0)?)
    }

    /// `n` when every factor has local dimension `d`.
    pub fn num_qudits(&self) -> usize {
        self.0.factors().len()
    }

    /// Common local dimension of the factors.
    pub fn local_dim(&self) -> Result<usize> {
        let f = self.0.factors();
        match f.first() {
            Some(&d) if f.iter().all(|&x| x == d) => Ok(d),
            _ => Err(Error::DimensionMismatch(format!("non-uniform factors {f:?}"))),
        }
    }
}

impl<R: Real> Deref for DensityOperator<R> {
    type Target = Operator<R>;

    fn deref(&self) -> &Operator<R> {
        &self.0
    }
}

/// Eigenvalue cutoff `EPS_RANK · dim · λ_max`.
pub fn rank_cutoff<R: Real>(spec: &Spectrum<R>) -> R {
    R::tol(EPS_RANK) * R::from_usize_lossy(spec.values.len()) * spec.max().max(R::zero())
}

/// `A^s` for PSD `A`, eigenvalues clamped at zero. For `s ≤ 0` the power is
/// taken on the support only (eigenvalues at or below the rank cutoff map to 0).
pub fn matrix_power<R: Real>(a: &Operator<R>, s: R) -> Result<Operator<R>> {
    let spec = eig_hermitian(a)?;
    power_from_spectrum(&spec, s)
}

pub(crate) fn power_from_spectrum<R: Real>(spec: &Spectrum<R>, s: R) -> Result<Operator<R>> {
    let scale = R::one().max(spec.max().abs());
    if spec.min() < -R::tol(TOL_PSD) * scale {
        return Err(Error::NotPsd(spec.min().as_f64()));
    }
    let cut = rank_cutoff(spec);
    Ok(spec.apply(|l| {
        if s > R::zero() {
            l.max(R::zero()).powf(s)
        } else if l > cut {
            l.powf(s)
        } else {
            R::zero()
        }
    }))
}

/// `Σ |λ_i|` of a Hermitian operator.
pub fn trace_norm<R: Real>(a: &Operator<R>) -> Result<R> {
    Ok(eig_hermitian(a)?.values.iter().map(|l| l.abs()).sum())
}

/// Number of eigenvalues above `EPS_RANK · dim · λ_max`.
pub fn rank_eps<R: Real>(a: &Operator<R>) -> Result<usize> {
    let spec = eig_hermitian(a)?;
    let cut = rank_cutoff(&spec);
    Ok(spec.values.iter().filter(|&&l| l > cut).count())
}
