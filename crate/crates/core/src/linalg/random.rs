//! Seeded random states and unitaries.
//!
//! Every stream is a ChaCha20 generator keyed by a 64-bit seed with the
//! stream id derived from a text label, so independent consumers never
//! share randomness and results are reproducible from `(seed, label)`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{DensityOperator, Operator};
use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// FNV-1a, used only to turn labels into stream ids.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Independent generator for `(seed, label)`.
pub fn stream(seed: u64, label: &str) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(label_hash(label));
    rng
}

fn gaussian<R: Real>(rng: &mut impl Rng) -> C<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(R::lit(re), R::lit(im))
}

/// Haar-random unit vector of length `dim`.
pub fn random_pure_vector<R: Real>(dim: usize, rng: &mut impl Rng) -> Vec<C<R>> {
    let v: Vec<C<R>> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Rank-`k` state from the Hilbert-Schmidt-induced ensemble: the marginal of a
/// Haar-random pure state on `C^{d^n} ⊗ C^k`, i.e. `G G† / Tr(G G†)` for a
/// complex Gaussian `d^n × k` matrix `G`.
pub fn random_state<R: Real>(n: usize, d: usize, k: usize, rng: &mut impl Rng) -> Result<DensityOperator<R>> {
    let factors = Operator::<R>::qudit_factors(n, d);
    let dim: usize = factors.iter().product();
    if k == 0 || k > dim {
        return Err(Error::InvalidRank { rank: k, dim });
    }
    let g: Vec<C<R>> = (0..dim * k).map(|_| gaussian(rng)).collect();
    let mut rho = Operator::zeros(&factors);
    for i in 0..dim {
        for j in i..dim {
            let mut acc = czero();
            for l in 0..k {
                acc = acc + g[i * k + l] * g[j * k + l].conj();
            }
            rho[(i, j)] = acc;
            rho[(j, i)] = acc.conj();
        }
    }
    let tr = rho.trace().re;
    Ok(DensityOperator::assume_valid(rho.scale(R::one() / tr)))
}

/// Haar-random `d × d` unitary (Gram-Schmidt on a Ginibre matrix).
pub fn haar_unitary<R: Real>(d: usize, rng: &mut impl Rng) -> Operator<R> {
    let mut cols: Vec<Vec<C<R>>> = (0..d).map(|_| (0..d).map(|_| gaussian(rng)).collect()).collect();
    for j in 0..d {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for i in 0..j {
                let proj = (0..d).fold(czero(), |acc, r| acc + cols[i][r].conj() * cols[j][r]);
                for r in 0..d {
                    let v = cols[i][r] * proj;
                    cols[j][r] = cols[j][r] - v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
        for z in cols[j].iter_mut() {
            *z = *z / norm;
        }
    }
    Operator::from_fn(&[d], |i, j| cols[j][i])
}

/// `U_1 ⊗ … ⊗ U_n` with independent Haar factors.
pub fn random_local_unitary<R: Real>(n: usize, d: usize, rng: &mut impl Rng) -> Operator<R> {
    let mut u = haar_unitary(d, rng);
    for _ in 1..n {
        u = u.kron(&haar_unitary(d, rng));
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank_eps, trace_norm};

    #[test]
    fn rank_one_is_pure() {
        let mut rng = stream(7, "pure");
        let rho = random_state::<f64>(2, 3, 1, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_rank_is_reproducible() {
        let a = random_state::<f64>(1, 3, 3, &mut stream(11, "x")).unwrap();
        let b = random_state::<f64>(1, 3, 3, &mut stream(11, "x")).unwrap();
        let c = random_state::<f64>(1, 3, 3, &mut stream(11, "y")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(rank_eps(&a).unwrap(), 3);
        assert!(DensityOperator::new(a.into_operator()).is_ok());
    }

    #[test]
    fn invalid_rank_rejected() {
        let mut rng = stream(1, "r");
        assert!(random_state::<f64>(1, 2, 0, &mut rng).is_err());
        assert!(random_state::<f64>(1, 2, 3, &mut rng).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream(3, "u");
        let u = haar_unitary::<f64>(5, &mut rng);
        let uu = u.matmul(&u.adjoint()).unwrap();
        assert!(uu.max_abs_diff(&Operator::identity(&[5])) < 1e-12);
        let lu = random_local_unitary::<f64>(2, 3, &mut rng);
        assert_eq!(lu.factors(), &[3, 3]);
        let luu = lu.matmul(&lu.adjoint()).unwrap();
        assert!(luu.max_abs_diff(&Operator::identity(&[3, 3])) < 1e-12);
    }

    #[test]
    fn pure_qubit_average_is_maximally_mixed() {
        let mut rng = stream(2024, "mc");
        let mut acc = Operator::<f64>::zeros(&[2]);
        let samples = 10_000;
        for _ in 0..samples {
            let rho = random_state::<f64>(1, 2, 1, &mut rng).unwrap();
            acc = acc.try_add(&rho).unwrap();
        }
        let mean = acc.scale(1.0 / samples as f64);
        let diff = mean.try_sub(&Operator::identity(&[2]).scale(0.5)).unwrap();
        assert!(0.5 * trace_norm(&diff).unwrap() < 0.02);
    }
}
