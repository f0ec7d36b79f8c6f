//! Weyl (generalised Pauli) operators and the characteristic function.
//!
//! Single-qudit operators follow `w(p,q) = ω_d^{−2⁻¹pq} Z^p X^q` for odd `d`
//! and `w(p,q) = i^{−pq} Z^p X^q` for `d = 2`, with `X|k⟩ = |k+1⟩` and
//! `Z|k⟩ = ω_d^k |k⟩`. Every Weyl operator is monomial, so it is stored as a
//! permutation plus exact phase exponents rather than as a dense matrix.

use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, Operator};
use crate::scalar::{czero, roots_of_unity, Real, C};
use crate::tolerance::{EPS_SUPP, PHASE_SPACE_CAP, TABLE_DIM_CAP};
use crate::zd::{PhasePoint, PhaseSpace, PrimeModulus};

/// Order of the root of unity in which all Weyl phases are expressed:
/// `ω_d` for odd `d`, `i` for `d = 2`.
fn phase_order(d: PrimeModulus) -> u32 {
    if d.is_odd() {
        d.get()
    } else {
        4
    }
}

/// Phase exponent (base `phase_order`) of `⟨k+q| w(p,q) |k⟩`.
fn local_exponent(d: PrimeModulus, p: u32, q: u32, k: u32) -> u32 {
    let m = d.get();
    if let Some(half) = d.half() {
        // −2⁻¹pq + p(k+q)  (mod d)
        let a = d.neg(d.mul(half, d.mul(p, q)));
        d.add(a, d.mul(p, (k + q) % m))
    } else {
        // i^{−pq} (−1)^{p(k+q)}  →  −pq + 2p(k+q)  (mod 4)
        let pq = (p * q) % 4;
        ((4 - pq) + 2 * p * ((k + q) % m)) % 4
    }
}

/// `w(x)` as a monomial matrix: column `j` maps to row `target[j]` with phase
/// `root^exponent[j]`.
#[derive(Clone, Debug)]
pub struct WeylOperator<R: Real> {
    point: PhasePoint,
    factors: Vec<usize>,
    target: Vec<usize>,
    exponent: Vec<u32>,
    phase: Vec<C<R>>,
}

/// Shared tables for building Weyl operators on one phase space.
#[derive(Clone, Debug)]
pub struct WeylBasis<R: Real> {
    space: PhaseSpace,
    roots: Vec<C<R>>,
    digits: Vec<Vec<u32>>,
}

impl<R: Real> WeylBasis<R> {
    pub fn new(space: PhaseSpace) -> Self {
        let d = space.modulus().get() as usize;
        let dim = space.hilbert_dim();
        let n = space.n();
        let digits = (0..dim)
            .map(|mut j| {
                let mut v = vec![0u32; n];
                for slot in v.iter_mut().rev() {
                    *slot = (j % d) as u32;
                    j /= d;
                }
                v
            })
            .collect();
        WeylBasis { space, roots: roots_of_unity(phase_order(space.modulus())), digits }
    }

    #[inline]
    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    pub fn operator(&self, x: &PhasePoint) -> Result<WeylOperator<R>> {
        if !self.space.contains(x) {
            return Err(Error::DimensionMismatch(format!(
                "point {x} not in V^{} over Z_{}",
                self.space.n(),
                self.space.modulus()
            )));
        }
        let d = self.space.modulus();
        let m = d.get();
        let order = phase_order(d);
        let dim = self.space.hilbert_dim();
        let mut target = Vec::with_capacity(dim);
        let mut exponent = Vec::with_capacity(dim);
        for digits in &self.digits {
            let mut t = 0usize;
            let mut e = 0u32;
            for (i, &k) in digits.iter().enumerate() {
                let (p, q) = x.local(i);
                t = t * m as usize + ((k + q) % m) as usize;
                e = (e + local_exponent(d, p, q, k)) % order;
            }
            target.push(t);
            exponent.push(e);
        }
        let phase = exponent.iter().map(|&e| self.roots[e as usize]).collect();
        Ok(WeylOperator {
            point: x.clone(),
            factors: vec![m as usize; self.space.n()],
            target,
            exponent,
            phase,
        })
    }
}

impl<R: Real> WeylOperator<R> {
    #[inline]
    pub fn point(&self) -> &PhasePoint {
        &self.point
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.target.len()
    }

    /// Row index hit by column `j`.
    #[inline]
    pub fn target(&self, j: usize) -> usize {
        self.target[j]
    }

    /// Nonzero entry of column `j`.
    #[inline]
    pub fn entry(&self, j: usize) -> C<R> {
        self.phase[j]
    }

    /// Exact phase exponents (base `ω_d`, or `i` when `d = 2`).
    pub fn exponents(&self) -> &[u32] {
        &self.exponent
    }

    pub fn to_operator(&self) -> Operator<R> {
        let mut m = Operator::zeros(&self.factors);
        for (j, (&t, &ph)) in self.target.iter().zip(&self.phase).enumerate() {
            m[(t, j)] = ph;
        }
        m
    }

    /// `w A w†`.
    pub fn conjugate(&self, a: &Operator<R>) -> Result<Operator<R>> {
        self.check_dim(a)?;
        let n = self.dim();
        let mut out = Operator::zeros(a.factors());
        for i in 0..n {
            let (ti, pi) = (self.target[i], self.phase[i]);
            for j in 0..n {
                out[(ti, self.target[j])] = pi * a[(i, j)] * self.phase[j].conj();
            }
        }
        Ok(out)
    }

    /// `w A`.
    pub fn apply_left(&self, a: &Operator<R>) -> Result<Operator<R>> {
        self.check_dim(a)?;
        let n = self.dim();
        let mut out = Operator::zeros(a.factors());
        for i in 0..n {
            let (ti, pi) = (self.target[i], self.phase[i]);
            for j in 0..n {
                out[(ti, j)] = pi * a[(i, j)];
            }
        }
        Ok(out)
    }

    /// `Tr[A w†]`.
    pub fn trace_with_adjoint(&self, a: &Operator<R>) -> Result<C<R>> {
        self.check_dim(a)?;
        Ok(self
            .target
            .iter()
            .zip(&self.phase)
            .enumerate()
            .fold(czero(), |acc, (j, (&t, ph))| acc + a[(t, j)] * ph.conj()))
    }

    fn check_dim(&self, a: &Operator<R>) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), self.dim())));
        }
        Ok(())
    }
}

/// `w(x)` on `V^n` over `Z_d`, `n` and `d` taken from the point.
pub fn weyl<R: Real>(x: &PhasePoint) -> Result<WeylOperator<R>> {
    let space = PhaseSpace::new(x.modulus(), x.n())?;
    WeylBasis::new(space).operator(x)
}

/// Phase space of an operator on `n` qudits of prime dimension `d`.
pub fn space_of<R: Real>(a: &Operator<R>) -> Result<PhaseSpace> {
    let f = a.factors();
    let d = match f.first() {
        Some(&d) if f.iter().all(|&x| x == d) => d,
        _ => return Err(Error::DimensionMismatch(format!("non-uniform factors {f:?}"))),
    };
    let d = u32::try_from(d).map_err(|_| Error::NotPrime(u32::MAX))?;
    PhaseSpace::new(PrimeModulus::new(d)?, f.len())
}

pub(crate) fn check_table_caps(space: PhaseSpace) -> Result<()> {
    if space.hilbert_dim() > TABLE_DIM_CAP {
        return Err(Error::CapExceeded { what: "d^n", size: space.hilbert_dim(), cap: TABLE_DIM_CAP });
    }
    if space.size() > PHASE_SPACE_CAP {
        return Err(Error::CapExceeded { what: "d^2n", size: space.size(), cap: PHASE_SPACE_CAP });
    }
    Ok(())
}

/// `Ξ` over all of `V^n`, indexed lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct CharTable<R: Real> {
    space: PhaseSpace,
    values: Vec<C<R>>,
}

impl<R: Real> CharTable<R> {
    pub fn new(space: PhaseSpace, values: Vec<C<R>>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} phase points",
                values.len(),
                space.size()
            )));
        }
        Ok(CharTable { space, values })
    }

    /// `δ₀`: the table of `I/d^n`.
    pub fn delta0(space: PhaseSpace) -> Self {
        let mut values = vec![czero(); space.size()];
        values[0] = C::new(R::one(), R::zero());
        CharTable { space, values }
    }

    #[inline]
    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    #[inline]
    pub fn values(&self) -> &[C<R>] {
        &self.values
    }

    pub fn get(&self, x: &PhasePoint) -> C<R> {
        self.values[self.space.index_of(x)]
    }

    #[inline]
    pub fn at(&self, index: usize) -> C<R> {
        self.values[index]
    }

    pub fn map_indexed(&self, f: impl Fn(usize, C<R>) -> C<R>) -> Self {
        CharTable { space: self.space, values: self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect() }
    }

    /// Number of points with `|Ξ(x)| > eps`.
    pub fn support_size(&self, eps: R) -> usize {
        self.values.iter().filter(|z| z.norm() > eps).count()
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        self.values.iter().zip(&other.values).map(|(&a, &b)| (a - b).norm()).fold(R::zero(), R::max)
    }

    /// CSV with header `p;q,re,im`, rows in lexicographic order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["p;q", "re", "im"])?;
        for (x, v) in self.space.points().zip(&self.values) {
            out.write_record([x.to_string(), format!("{:.16e}", v.re), format!("{:.16e}", v.im)])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `Ξ_ρ(x) = Tr[ρ w(x)†]` for every `x ∈ V^n`.
pub fn char_function<R: Real>(rho: &DensityOperator<R>) -> Result<CharTable<R>> {
    char_function_of(rho.as_operator())
}

/// Characteristic function of an arbitrary operator.
pub fn char_function_of<R: Real>(a: &Operator<R>) -> Result<CharTable<R>> {
    let space = space_of(a)?;
    check_table_caps(space)?;
    let basis = WeylBasis::new(space);
    let values = space
        .points()
        .map(|x| basis.operator(&x)?.trace_with_adjoint(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharTable { space, values })
}

/// `(1/d^n) Σ_x Ξ(x) w(x)`. The result is not validated as a state.
pub fn inverse_char<R: Real>(table: &CharTable<R>) -> Result<Operator<R>> {
    let space = table.space;
    let basis = WeylBasis::<R>::new(space);
    let dim = space.hilbert_dim();
    let factors = vec![space.modulus().get() as usize; space.n()];
    let mut out = Operator::zeros(&factors);
    let norm = R::one() / R::from_usize_lossy(dim);
    for (x, &v) in space.points().zip(&table.values) {
        if v.re == R::zero() && v.im == R::zero() {
            continue;
        }
        let w = basis.operator(&x)?;
        let vn = v * norm;
        for j in 0..dim {
            let t = w.target(j);
            out[(t, j)] = out[(t, j)] + vn * w.entry(j);
        }
    }
    Ok(out)
}

/// `χ_P(ρ) = |{x : |Ξ_ρ(x)| > ε_supp}|`.
pub fn pauli_rank<R: Real>(rho: &DensityOperator<R>) -> Result<usize> {
    Ok(char_function(rho)?.support_size(R::tol(EPS_SUPP)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn m(d: u32) -> PrimeModulus {
        PrimeModulus::new(d).unwrap()
    }

    fn pt(d: u32, coords: &[u32]) -> PhasePoint {
        PhasePoint::from_coords(m(d), coords).unwrap()
    }

    fn mat(d: usize, entries: &[(usize, usize, C<f64>)]) -> Operator<f64> {
        let mut a = Operator::zeros(&[d]);
        for &(i, j, v) in entries {
            a[(i, j)] = v;
        }
        a
    }

    #[test]
    fn qubit_paulis() {
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let id = weyl::<f64>(&pt(2, &[0, 0])).unwrap().to_operator();
        assert_eq!(id, Operator::identity(&[2]));
        let z = weyl::<f64>(&pt(2, &[1, 0])).unwrap().to_operator();
        assert_eq!(z, mat(2, &[(0, 0, one), (1, 1, c(-1.0, 0.0))]));
        let x = weyl::<f64>(&pt(2, &[0, 1])).unwrap().to_operator();
        assert_eq!(x, mat(2, &[(0, 1, one), (1, 0, one), (0, 0, o)]));
        // i^{-1} Z X = Y
        let zx = z.matmul(&x).unwrap().scale_c(c(0.0, -1.0));
        let y = weyl::<f64>(&pt(2, &[1, 1])).unwrap().to_operator();
        assert!(y.max_abs_diff(&zx) < 1e-15);
        assert!(y.max_abs_diff(&mat(2, &[(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))])) < 1e-15);
        assert!(y.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn qutrit_w11_direct_synthesis() {
        let omega = |k: f64| c((2.0 * std::f64::consts::PI * k / 3.0).cos(), (2.0 * std::f64::consts::PI * k / 3.0).sin());
        let z = Operator::from_fn(&[3], |i, j| if i == j { omega(i as f64) } else { c(0.0, 0.0) });
        let x = Operator::from_fn(&[3], |i, j| if i == (j + 1) % 3 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        // 2⁻¹ = 2 mod 3: phase ω^{−2}
        let expect = z.matmul(&x).unwrap().scale_c(omega(-2.0));
        let w = weyl::<f64>(&pt(3, &[1, 1])).unwrap().to_operator();
        assert!(w.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn weyl_operators_are_unitary() {
        for d in [2u32, 3, 5, 7] {
            let space = PhaseSpace::new(m(d), 1).unwrap();
            let basis = WeylBasis::<f64>::new(space);
            for x in space.points() {
                let w = basis.operator(&x).unwrap().to_operator();
                let ww = w.matmul(&w.adjoint()).unwrap();
                assert!(ww.max_abs_diff(&Operator::identity(&[d as usize])) < 1e-14);
            }
        }
    }

    #[test]
    fn char_function_examples() {
        let space = PhaseSpace::new(m(3), 1).unwrap();
        let mixed = DensityOperator::<f64>::maximally_mixed(1, 3);
        let t = char_function(&mixed).unwrap();
        assert!(t.max_abs_diff(&CharTable::delta0(space)) < 1e-15);
        assert_eq!(pauli_rank(&mixed).unwrap(), 1);

        let zero = DensityOperator::<f64>::basis_state(1, 3, &[0]).unwrap();
        let t = char_function(&zero).unwrap();
        for x in space.points() {
            let expect = if x.q()[0] == 0 { 1.0 } else { 0.0 };
            assert!((t.get(&x) - c(expect, 0.0)).norm() < 1e-15, "{x}");
        }
        assert_eq!(pauli_rank(&zero).unwrap(), 3);
        let back = inverse_char(&t).unwrap();
        assert!(back.max_abs_diff(&zero) < 1e-15);
    }

    #[test]
    fn qubit_magic_like_state() {
        // ρ = (I + (Z + X)/√2)/2
        let s = 0.5f64.sqrt();
        let rho = DensityOperator::new(mat(
            2,
            &[(0, 0, c(0.5 + 0.5 * s, 0.0)), (1, 1, c(0.5 - 0.5 * s, 0.0)), (0, 1, c(0.5 * s, 0.0)), (1, 0, c(0.5 * s, 0.0))],
        ))
        .unwrap();
        let t = char_function(&rho).unwrap();
        // four-trace oracle
        for (coords, expect) in [([0, 0], 1.0), ([1, 0], s), ([0, 1], s), ([1, 1], 0.0)] {
            let w = weyl::<f64>(&pt(2, &coords)).unwrap().to_operator();
            let direct = rho.trace_product(&w.adjoint()).unwrap();
            assert!((direct - c(expect, 0.0)).norm() < 1e-15);
            assert!((t.get(&pt(2, &coords)) - direct).norm() < 1e-15);
        }
        assert_eq!(pauli_rank(&rho).unwrap(), 3);
    }

    #[test]
    fn conjugate_matches_dense_product() {
        let x = pt(3, &[1, 2, 0, 1]);
        let w = weyl::<f64>(&x).unwrap();
        let a = Operator::from_fn(&[3, 3], |i, j| c(i as f64 + 0.5, j as f64 - 0.25 * i as f64));
        let dense = w.to_operator();
        let expect = dense.matmul(&a).unwrap().matmul(&dense.adjoint()).unwrap();
        assert!(w.conjugate(&a).unwrap().max_abs_diff(&expect) < 1e-13);
        assert!(w.apply_left(&a).unwrap().max_abs_diff(&dense.matmul(&a).unwrap()) < 1e-13);
    }

    #[test]
    fn csv_layout() {
        let zero = DensityOperator::<f64>::basis_state(1, 2, &[0]).unwrap();
        let mut buf = Vec::new();
        char_function(&zero).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p;q,re,im");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0;0,1.0000000000000000e0,"));
    }

    #[test]
    fn rejects_composite_dimension() {
        let a = Operator::<f64>::identity(&[4]).scale(0.25);
        assert!(matches!(char_function_of(&a), Err(Error::NotPrime(4))));
    }
}
