use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// Dense square complex matrix on a tensor product of qudits, row-major.
///
/// Basis index of `|k_1 … k_m⟩` is `k_1` most significant, matching `kron`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<R: Real> {
    dim: usize,
    factors: Vec<usize>,
    data: Vec<C<R>>,
}

impl<R: Real> Operator<R> {
    pub fn zeros(factors: &[usize]) -> Self {
        let dim = factors.iter().product();
        Operator { dim, factors: factors.to_vec(), data: vec![czero(); dim * dim] }
    }

    pub fn identity(factors: &[usize]) -> Self {
        let mut m = Self::zeros(factors);
        for i in 0..m.dim {
            m[(i, i)] = Complex::new(R::one(), R::zero());
        }
        m
    }

    /// `n` factors of local dimension `d`.
    pub fn qudit_factors(n: usize, d: usize) -> Vec<usize> {
        vec![d; n]
    }

    pub fn from_fn(factors: &[usize], mut f: impl FnMut(usize, usize) -> C<R>) -> Self {
        let mut m = Self::zeros(factors);
        for i in 0..m.dim {
            for j in 0..m.dim {
                m.data[i * m.dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_vec(factors: &[usize], data: Vec<C<R>>) -> Result<Self> {
        let dim: usize = factors.iter().product();
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Operator { dim, factors: factors.to_vec(), data })
    }

    pub fn diagonal(factors: &[usize], diag: &[R]) -> Result<Self> {
        let mut m = Self::zeros(factors);
        if diag.len() != m.dim {
            return Err(Error::DimensionMismatch(format!(
                "diagonal of length {} for dimension {}",
                diag.len(),
                m.dim
            )));
        }
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(v, R::zero());
        }
        Ok(m)
    }

    /// `|ψ⟩⟨ψ|` (no normalisation).
    pub fn projector(factors: &[usize], psi: &[C<R>]) -> Result<Self> {
        let dim: usize = factors.iter().product();
        if psi.len() != dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} for dim {dim}", psi.len())));
        }
        Ok(Self::from_fn(factors, |i, j| psi[i] * psi[j].conj()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    #[inline]
    pub fn data(&self) -> &[C<R>] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C<R>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C<R>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Reinterprets the tensor structure; the dimension must agree.
    pub fn with_factors(mut self, factors: &[usize]) -> Result<Self> {
        if factors.iter().product::<usize>() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "factors {factors:?} do not multiply to {}",
                self.dim
            )));
        }
        self.factors = factors.to_vec();
        Ok(self)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn trace(&self) -> C<R> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).fold(czero(), |a, b| a + b)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(&self.factors);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(&self.factors);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn scale(&self, s: R) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C<R>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C<R>) -> C<R>) -> Self {
        Operator { dim: self.dim, factors: self.factors.clone(), data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Matrix product; tensor structure of `self` is kept.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let n = self.dim;
        let mut out = Self::zeros(&self.factors);
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C<R>, C<R>) -> C<R>) -> Self {
        Operator {
            dim: self.dim,
            factors: self.factors.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `Tr[A† B]`.
    pub fn hs_inner(&self, other: &Self) -> Result<C<R>> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).fold(czero(), |acc, (&a, &b)| acc + a.conj() * b))
    }

    /// `Tr[A B]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C<R>> {
        self.check_same_shape(other)?;
        let n = self.dim;
        let mut acc = czero();
        for i in 0..n {
            for k in 0..n {
                acc = acc + self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).norm()).fold(R::zero(), R::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> R {
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).norm_sqr()).sum::<R>().sqrt()
    }

    /// Max-abs deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> R {
        let n = self.dim;
        let mut worst = R::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = R::lit(0.5);
        let n = self.dim;
        Self::from_fn(&self.factors, |i, j| (self.data[i * n + j] + self.data[j * n + i].conj()) * half)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Tensor product; factors are concatenated.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        let mut data = vec![czero(); dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.data[i * n + j];
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for k in 0..m {
                    let row = (i * m + k) * dim + j * m;
                    for l in 0..m {
                        data[row + l] = a * other.data[k * m + l];
                    }
                }
            }
        }
        Operator { dim, factors, data }
    }

    fn check_subsystems(&self, idx: &[usize]) -> Result<()> {
        for &i in idx {
            if i >= self.factors.len() {
                return Err(Error::IndexOutOfRange { index: i, len: self.factors.len() });
            }
        }
        Ok(())
    }

    /// Reorders tensor factors: output factor `k` is input factor `order[k]`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        let m = self.factors.len();
        let mut seen = vec![false; m];
        if order.len() != m || order.iter().any(|&i| i >= m || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::DimensionMismatch(format!("{order:?} is not a permutation of {m} factors")));
        }
        let new_factors: Vec<usize> = order.iter().map(|&i| self.factors[i]).collect();
        let map = index_permutation(&self.factors, order);
        let n = self.dim;
        let mut out = Self::zeros(&new_factors);
        for i in 0..n {
            for j in 0..n {
                out.data[map[i] * n + map[j]] = self.data[i * n + j];
            }
        }
        Ok(out)
    }

    /// Traces out every factor not listed in `keep` (kept factors stay in order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        self.check_subsystems(keep)?;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let traced: Vec<usize> = (0..self.factors.len()).filter(|i| !keep.contains(i)).collect();
        let kept_factors: Vec<usize> = keep.iter().map(|&i| self.factors[i]).collect();
        let kd: usize = kept_factors.iter().product();
        let td: usize = traced.iter().map(|&i| self.factors[i]).product();
        // full index = combine(kept multi-index, traced multi-index)
        let strides = strides(&self.factors);
        let kept_offsets = offsets(&keep, &self.factors, &strides);
        let traced_offsets = offsets(&traced, &self.factors, &strides);
        let n = self.dim;
        let mut out = Self::zeros(&kept_factors);
        for a in 0..kd {
            for b in 0..kd {
                let mut acc = czero();
                for &t in &traced_offsets {
                    acc = acc + self.data[(kept_offsets[a] + t) * n + kept_offsets[b] + t];
                }
                out.data[a * kd + b] = acc;
            }
        }
        debug_assert_eq!(traced_offsets.len(), td);
        Ok(out)
    }

    /// Transposes the tensor indices of the listed factors.
    pub fn partial_transpose(&self, part: &[usize]) -> Result<Self> {
        self.check_subsystems(part)?;
        let strides = strides(&self.factors);
        let n = self.dim;
        let mut out = Self::zeros(&self.factors);
        for i in 0..n {
            for j in 0..n {
                let (mut ii, mut jj) = (i, j);
                for &f in part {
                    let s = strides[f];
                    let di = (i / s) % self.factors[f];
                    let dj = (j / s) % self.factors[f];
                    ii = ii - di * s + dj * s;
                    jj = jj - dj * s + di * s;
                }
                out.data[ii * n + jj] = self.data[i * n + j];
            }
        }
        Ok(out)
    }
}

/// Row-major strides of a tensor index.
pub(crate) fn strides(factors: &[usize]) -> Vec<usize> {
    let mut s = vec![1; factors.len()];
    for i in (0..factors.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * factors[i + 1];
    }
    s
}

/// Linear offsets of all multi-indices over the listed factors, in the
/// order those factors are listed (first most significant).
fn offsets(which: &[usize], factors: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in which {
        let mut next = Vec::with_capacity(out.len() * factors[f]);
        for &o in &out {
            for k in 0..factors[f] {
                next.push(o + k * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// `map[i]` = index in the permuted tensor of basis index `i`.
fn index_permutation(factors: &[usize], order: &[usize]) -> Vec<usize> {
    let old = strides(factors);
    let new_factors: Vec<usize> = order.iter().map(|&i| factors[i]).collect();
    let new = strides(&new_factors);
    let dim: usize = factors.iter().product();
    (0..dim)
        .map(|i| {
            order
                .iter()
                .enumerate()
                .map(|(k, &f)| ((i / old[f]) % factors[f]) * new[k])
                .sum()
        })
        .collect()
}

impl<R: Real> Index<(usize, usize)> for Operator<R> {
    type Output = C<R>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<R> {
        &self.data[i * self.dim + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for Operator<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<R> {
        &mut self.data[i * self.dim + j]
    }
}

impl<R: Real> Add for &Operator<R> {
    type Output = Operator<R>;

    fn add(self, rhs: &Operator<R>) -> Operator<R> {
        self.try_add(rhs).expect("operator dimensions agree")
    }
}

impl<R: Real> Sub for &Operator<R> {
    type Output = Operator<R>;

    fn sub(self, rhs: &Operator<R>) -> Operator<R> {
        self.try_sub(rhs).expect("operator dimensions agree")
    }
}

impl<R: Real> Mul for &Operator<R> {
    type Output = Operator<R>;

    fn mul(self, rhs: &Operator<R>) -> Operator<R> {
        self.matmul(rhs).expect("operator dimensions agree")
    }
}
