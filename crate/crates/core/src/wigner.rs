//! Discrete Wigner function for odd prime local dimension.
//!
//! Phase-point operators are `T(0) = d^{-n} Σ_u w(u)` and
//! `T(x) = w(x) T(0) w(x)†`; the Wigner function is `W(x) = d^{-n} Tr[T(x) ρ]`.

use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, Operator};
use crate::scalar::{c, czero, roots_of_unity, Real, C};
use crate::tolerance::EPS_SUPP;
use crate::weyl::{char_function, check_table_caps, space_of, CharTable, WeylBasis};
use crate::zd::{symplectic_unchecked, PhasePoint, PhaseSpace, PrimeModulus};

fn require_odd(d: PrimeModulus) -> Result<()> {
    if d.is_odd() {
        Ok(())
    } else {
        Err(Error::WignerRequiresOddPrime(d.get()))
    }
}

#[derive(Clone, Debug)]
pub struct PhasePointOperator<R: Real> {
    pub point: PhasePoint,
    pub matrix: Operator<R>,
}

fn origin_operator<R: Real>(basis: &WeylBasis<R>) -> Result<Operator<R>> {
    let space = basis.space();
    let dim = space.hilbert_dim();
    let factors = vec![space.modulus().get() as usize; space.n()];
    let mut t0 = Operator::zeros(&factors);
    for u in space.points() {
        let w = basis.operator(&u)?;
        for j in 0..dim {
            let t = w.target(j);
            t0[(t, j)] = t0[(t, j)] + w.entry(j);
        }
    }
    Ok(t0.scale(R::one() / R::from_usize_lossy(dim)))
}

/// `T(x)`; rejects `d = 2`.
pub fn phase_point_op<R: Real>(x: &PhasePoint) -> Result<PhasePointOperator<R>> {
    require_odd(x.modulus())?;
    let space = PhaseSpace::new(x.modulus(), x.n())?;
    let basis = WeylBasis::<R>::new(space);
    let t0 = origin_operator(&basis)?;
    let matrix = basis.operator(x)?.conjugate(&t0)?;
    Ok(PhasePointOperator { point: x.clone(), matrix })
}

/// Real-valued `W` over all of `V^n`, indexed lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerTable<R: Real> {
    space: PhaseSpace,
    values: Vec<R>,
}

impl<R: Real> WignerTable<R> {
    pub fn new(space: PhaseSpace, values: Vec<R>) -> Result<Self> {
        require_odd(space.modulus())?;
        if values.len() != space.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} phase points",
                values.len(),
                space.size()
            )));
        }
        Ok(WignerTable { space, values })
    }

    #[inline]
    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    #[inline]
    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn get(&self, x: &PhasePoint) -> R {
        self.values[self.space.index_of(x)]
    }

    pub fn sum(&self) -> R {
        self.values.iter().copied().sum()
    }

    pub fn sum_of_squares(&self) -> R {
        self.values.iter().map(|&v| v * v).sum()
    }

    pub fn support_size(&self, eps: R) -> usize {
        self.values.iter().filter(|v| v.abs() > eps).count()
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        self.values.iter().zip(&other.values).map(|(&a, &b)| (a - b).abs()).fold(R::zero(), R::max)
    }

    /// `Σ_x W(x) T(x)`.
    pub fn reconstruct(&self) -> Result<Operator<R>> {
        let basis = WeylBasis::<R>::new(self.space);
        let t0 = origin_operator(&basis)?;
        let factors = vec![self.space.modulus().get() as usize; self.space.n()];
        let mut out = Operator::zeros(&factors);
        for (x, &w) in self.space.points().zip(&self.values) {
            let t = basis.operator(&x)?.conjugate(&t0)?;
            out = out.try_add(&t.scale(w))?;
        }
        Ok(out)
    }

    /// CSV with header `p;q,w`, rows in lexicographic order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["p;q", "w"])?;
        for (x, v) in self.space.points().zip(&self.values) {
            out.write_record([x.to_string(), format!("{v:.16e}")])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `W_ρ(x) = d^{-n} Tr[T(x) ρ]`, evaluated from the definition.
pub fn wigner_function<R: Real>(rho: &DensityOperator<R>) -> Result<WignerTable<R>> {
    wigner_function_of(rho.as_operator())
}

pub fn wigner_function_of<R: Real>(a: &Operator<R>) -> Result<WignerTable<R>> {
    let space = space_of(a)?;
    require_odd(space.modulus())?;
    check_table_caps(space)?;
    let basis = WeylBasis::<R>::new(space);
    let t0 = origin_operator(&basis)?;
    let norm = R::one() / R::from_usize_lossy(space.hilbert_dim());
    let values = space
        .points()
        .map(|x| {
            // Tr[w T0 w† ρ] = Tr[T0 w† ρ w]
            let t = basis.operator(&x)?.conjugate(&t0)?;
            Ok(t.trace_product(a)?.re * norm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WignerTable { space, values })
}

/// `W(u) = d^{-2n} Σ_v ω^{κ[u,v]} Ξ(v)` with both candidate kernels `κ = ±1`.
fn symplectic_ft_with<R: Real>(table: &CharTable<R>, kappa: i8) -> Result<Vec<C<R>>> {
    let space = table.space();
    let d = space.modulus();
    require_odd(d)?;
    let roots = roots_of_unity::<R>(d.get());
    let points: Vec<PhasePoint> = space.points().collect();
    let norm = R::one() / R::from_usize_lossy(space.size());
    Ok(points
        .iter()
        .map(|u| {
            let acc = points.iter().zip(table.values()).fold(czero(), |acc, (v, &xi)| {
                let s = symplectic_unchecked(u, v);
                let e = if kappa > 0 { s } else { d.neg(s) };
                acc + roots[e as usize] * xi
            });
            acc * norm
        })
        .collect())
}

/// Kernel sign `κ` of the symplectic Fourier transform, fixed once by
/// comparing both candidates against the direct Wigner function on a set
/// of qutrit states that distinguish `W(u)` from `W(−u)`.
pub fn symplectic_kernel_sign() -> i8 {
    static KAPPA: OnceLock<i8> = OnceLock::new();
    *KAPPA.get_or_init(|| calibrate_kernel().unwrap_or_else(|msg| panic!("symplectic kernel calibration failed: {msg}")))
}

fn calibrate_kernel() -> std::result::Result<i8, String> {
    let states = calibration_states().map_err(|e| e.to_string())?;
    let mut winners = Vec::new();
    for kappa in [1i8, -1] {
        let ok = states.iter().all(|rho| {
            let direct = wigner_function(rho).expect("qutrit Wigner function");
            let table = char_function(rho).expect("qutrit table");
            let via = symplectic_ft_with(&table, kappa).expect("odd d");
            direct.values.iter().zip(&via).all(|(&w, z)| (z.re - w).abs() < 1e-9 && z.im.abs() < 1e-9)
        });
        if ok {
            winners.push(kappa);
        }
    }
    match winners[..] {
        [k] => Ok(k),
        [] => Err("neither kernel sign reproduces the direct Wigner function".into()),
        _ => Err("calibration states do not distinguish the kernel signs".into()),
    }
}

fn calibration_states() -> Result<Vec<DensityOperator<f64>>> {
    let mut out = Vec::new();
    for k in 0..3 {
        out.push(DensityOperator::basis_state(1, 3, &[k])?);
    }
    let a = 1.0 / 3.0f64.sqrt();
    out.push(DensityOperator::pure(&[3], &[c(a, 0.0), c(0.0, a), c(-a, 0.0)])?);
    let mixed = Operator::from_vec(
        &[3],
        vec![
            c(0.5, 0.0),
            c(0.1, 0.05),
            c(0.0, -0.1),
            c(0.1, -0.05),
            c(0.3, 0.0),
            c(0.05, 0.02),
            c(0.0, 0.1),
            c(0.05, -0.02),
            c(0.2, 0.0),
        ],
    )?;
    out.push(DensityOperator::new(mixed)?);
    Ok(out)
}

/// Wigner function computed from the characteristic table through the
/// calibrated symplectic Fourier transform.
pub fn wigner_via_symplectic_ft<R: Real>(table: &CharTable<R>) -> Result<WignerTable<R>> {
    require_odd(table.space().modulus())?;
    let kappa = symplectic_kernel_sign();
    let values = symplectic_ft_with(table, kappa)?.into_iter().map(|z| z.re).collect();
    Ok(WignerTable { space: table.space(), values })
}

/// `χ_W(ρ) = |{x : |W_ρ(x)| > ε_supp}|`.
pub fn wigner_rank<R: Real>(rho: &DensityOperator<R>) -> Result<usize> {
    Ok(wigner_function(rho)?.support_size(R::tol(EPS_SUPP)))
}
