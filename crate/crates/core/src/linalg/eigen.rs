//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex;

use super::Operator;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};
use crate::tolerance::TOL_HERM;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum<R: Real> {
    pub values: Vec<R>,
    pub vectors: Operator<R>,
}

impl<R: Real> Spectrum<R> {
    /// `V f(Λ) V†`.
    pub fn apply(&self, f: impl Fn(R) -> R) -> Operator<R> {
        let n = self.values.len();
        let fl: Vec<R> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = Operator::zeros(v.factors());
        for k in 0..n {
            if fl[k] == R::zero() {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fl[k];
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Operator<R> {
        self.apply(|l| l)
    }

    pub fn max(&self) -> R {
        self.values.first().copied().unwrap_or_else(R::zero)
    }

    pub fn min(&self) -> R {
        self.values.last().copied().unwrap_or_else(R::zero)
    }

    pub fn column(&self, k: usize) -> Vec<C<R>> {
        (0..self.values.len()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Eigendecomposition of a Hermitian operator. The input must be Hermitian
/// within `TOL_HERM · max(1, max|A_ij|)`; its Hermitian part is diagonalised.
pub fn eig_hermitian<R: Real>(a: &Operator<R>) -> Result<Spectrum<R>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = a.hermiticity_defect();
    let scale = R::one().max(a.max_abs());
    if defect > R::tol(TOL_HERM) * scale {
        return Err(Error::NotHermitian(defect.as_f64()));
    }
    let n = a.dim();
    let mut m = a.hermitian_part();
    let mut v = Operator::identity(a.factors());
    let eps = R::epsilon();
    let norm = m.frobenius_norm();
    if norm == R::zero() {
        return Ok(finish(m, v));
    }
    let target = eps * norm;
    for _ in 0..MAX_SWEEPS {
        let off: R = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<R>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q, eps);
            }
        }
    }
    Ok(finish(m, v))
}

/// Zeroes `m[p][q]` with the unitary `G = diag(1, ē)·[[c, s], [−s, c]]`,
/// `e = m_pq/|m_pq|`, applied as `m ← G† m G`, `v ← v G`.
fn rotate<R: Real>(m: &mut Operator<R>, v: &mut Operator<R>, p: usize, q: usize, eps: R) {
    let n = m.dim();
    let apq = m[(p, q)];
    let b = apq.norm();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if b <= eps * eps * (app.abs() + aqq.abs()) || b == R::zero() {
        m[(p, q)] = czero();
        m[(q, p)] = czero();
        return;
    }
    let e = apq / b;
    let ebar = e.conj();
    let two = R::lit(2.0);
    let tau = (aqq - app) / (two * b);
    let t = if tau >= R::zero() {
        R::one() / (tau + (R::one() + tau * tau).sqrt())
    } else {
        -R::one() / (-tau + (R::one() + tau * tau).sqrt())
    };
    let c = R::one() / (R::one() + t * t).sqrt();
    let s = t * c;
    let cs = Complex::new(c, R::zero());
    let ss = Complex::new(s, R::zero());

    // columns: m ← m G
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * cs - mq * ebar * ss;
        m[(i, q)] = mp * ss + mq * ebar * cs;
    }
    // rows: m ← G† m
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = mp * cs - mq * e * ss;
        m[(q, j)] = mp * ss + mq * e * cs;
    }
    for i in 0..n {
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * cs - vq * ebar * ss;
        v[(i, q)] = vp * ss + vq * ebar * cs;
    }
    m[(p, q)] = czero();
    m[(q, p)] = czero();
    m[(p, p)] = Complex::new(app - t * b, R::zero());
    m[(q, q)] = Complex::new(aqq + t * b, R::zero());
}

fn finish<R: Real>(m: Operator<R>, v: Operator<R>) -> Spectrum<R> {
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = Operator::from_fn(v.factors(), |i, k| v[(i, order[k])]);
    Spectrum { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn diagonal_input_is_sorted() {
        let a = Operator::<f64>::diagonal(&[3], &[0.2, 0.7, -0.1]).unwrap();
        let s = eig_hermitian(&a).unwrap();
        assert_eq!(s.values, vec![0.7, 0.2, -0.1]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = Operator::<f64>::from_fn(&[2], |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let s = eig_hermitian(&x).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_two_by_two() {
        // [[1, i],[−i, 1]] has eigenvalues 2 and 0.
        let a = Operator::<f64>::from_vec(
            &[2],
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)],
        )
        .unwrap();
        let s = eig_hermitian(&a).unwrap();
        assert!((s.values[0] - 2.0).abs() < 1e-14);
        assert!(s.values[1].abs() < 1e-14);
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = Operator::<f64>::from_vec(
            &[2],
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(eig_hermitian(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn f32_reconstruction() {
        let a = Operator::<f32>::from_vec(
            &[2],
            vec![c(0.75, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.25, 0.0)],
        )
        .unwrap();
        let s = eig_hermitian(&a).unwrap();
        assert!(s.reconstruct().max_abs_diff(&a) < 1e-5);
    }
}
