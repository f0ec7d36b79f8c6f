//! Stabilizer groups, mean states and stabilizer-state synthesis.
//!
//! The mean state `M(ρ)` keeps the characteristic values of unit modulus and
//! zeroes the rest. It is computed two ways: by thresholding the table and by
//! twirling `ρ` over the Weyl operators of the symplectic complement of the
//! stabilizer support. The two must agree.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{random_state, DensityOperator, Operator};
use crate::scalar::{roots_of_unity, Real, C};
use crate::tolerance::{EPS_GRP, PHASE_SPACE_CAP, STAB_FROBENIUS};
use crate::weyl::{char_function, inverse_char, space_of, CharTable, WeylBasis};
use crate::zd::{symplectic_unchecked, PhasePoint, PhaseSpace, PhaseSubgroup, PrimeModulus};

/// Support of `G_ρ` with the characteristic values on its basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerGroup<R: Real> {
    pub support: PhaseSubgroup,
    pub phases: Vec<C<R>>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct GeneratorJson {
    point: String,
    phase_re: f64,
    phase_im: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct GroupJson {
    d: u32,
    n: usize,
    generators: Vec<GeneratorJson>,
}

impl<R: Real> StabilizerGroup<R> {
    #[inline]
    pub fn rank(&self) -> usize {
        self.support.rank()
    }

    pub fn space(&self) -> PhaseSpace {
        self.support.space()
    }

    pub fn to_json(&self) -> String {
        let space = self.space();
        let doc = GroupJson {
            d: space.modulus().get(),
            n: space.n(),
            generators: self
                .support
                .basis()
                .iter()
                .zip(&self.phases)
                .map(|(x, ph)| GeneratorJson { point: x.to_string(), phase_re: ph.re.as_f64(), phase_im: ph.im.as_f64() })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GroupJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let d = PrimeModulus::new(doc.d)?;
        let space = PhaseSpace::new(d, doc.n)?;
        let points = doc
            .generators
            .iter()
            .map(|g| PhasePoint::parse(d, &g.point))
            .collect::<Result<Vec<_>>>()?;
        let support = if points.is_empty() { PhaseSubgroup::trivial(space) } else { PhaseSubgroup::from_points(&points)? };
        if support.basis() != points.as_slice() {
            return Err(Error::Parse("generators are not a canonical subgroup basis".into()));
        }
        let phases = doc.generators.iter().map(|g| Complex::new(R::lit(g.phase_re), R::lit(g.phase_im))).collect();
        Ok(StabilizerGroup { support, phases })
    }
}

#[derive(Clone, Debug)]
pub struct MeanState<R: Real> {
    pub state: DensityOperator<R>,
    pub group: StabilizerGroup<R>,
}

/// `G_ρ` read off a characteristic table: points with `|Ξ| ≥ 1 − ε_grp`.
pub fn stabilizer_group_of_table<R: Real>(table: &CharTable<R>) -> Result<StabilizerGroup<R>> {
    let space = table.space();
    let cut = R::one() - R::tol(EPS_GRP);
    let points: Vec<PhasePoint> =
        space.points().zip(table.values()).filter(|(_, v)| v.norm() >= cut).map(|(x, _)| x).collect();
    let support = PhaseSubgroup::from_points(&points)?;
    if !support.is_isotropic() {
        return Err(Error::GroupStructure(format!("basis of rank {} is not isotropic", support.rank())));
    }
    if support.order() != points.len() {
        return Err(Error::GroupStructure(format!(
            "{} unit-modulus points span a group of order {}",
            points.len(),
            support.order()
        )));
    }
    let phases = support.basis().iter().map(|x| table.get(x)).collect();
    Ok(StabilizerGroup { support, phases })
}

pub fn stabilizer_group<R: Real>(rho: &DensityOperator<R>) -> Result<StabilizerGroup<R>> {
    stabilizer_group_of_table(&char_function(rho)?)
}

fn validate_mean<R: Real>(op: Operator<R>) -> Result<DensityOperator<R>> {
    DensityOperator::new(op).map_err(|e| Error::NumericalTolerance(format!("mean state is not a valid state: {e}")))
}

/// `M(ρ)` by zeroing every characteristic value of modulus below 1.
pub fn mean_state_threshold<R: Real>(rho: &DensityOperator<R>) -> Result<MeanState<R>> {
    let table = char_function(rho)?;
    let group = stabilizer_group_of_table(&table)?;
    let cut = R::one() - R::tol(EPS_GRP);
    let kept = table.map_indexed(|_, v| if v.norm() >= cut { v } else { C::new(R::zero(), R::zero()) });
    let state = validate_mean(inverse_char(&kept)?)?;
    Ok(MeanState { state, group })
}

/// `M(ρ)` as the average of `w(y) ρ w(y)†` over `y ∈ S⊥`, `S` the support of `G_ρ`.
pub fn mean_state_twirl<R: Real>(rho: &DensityOperator<R>) -> Result<MeanState<R>> {
    let space = space_of(rho)?;
    if space.size() > PHASE_SPACE_CAP {
        return Err(Error::CapExceeded { what: "d^2n", size: space.size(), cap: PHASE_SPACE_CAP });
    }
    let group = stabilizer_group(rho)?;
    let complement = group.support.symplectic_complement();
    let basis = WeylBasis::<R>::new(space);
    let mut acc = Operator::zeros(rho.factors());
    for y in complement.elements() {
        acc = acc.try_add(&basis.operator(&y)?.conjugate(rho)?)?;
    }
    let state = validate_mean(acc.scale(R::one() / R::from_usize_lossy(complement.order())))?;
    Ok(MeanState { state, group })
}

/// `ρ = d^{-(n-r)} Π_i E_k g_i^k` with `g_i = ω_d^{c_i} w(x_i)`; for `d = 2`
/// the tag `c_i ∈ {0, 1}` is the sign `(−1)^{c_i}`.
pub fn stabilizer_state_from_generators<R: Real>(
    n: usize,
    d: PrimeModulus,
    gens: &[(PhasePoint, u32)],
) -> Result<DensityOperator<R>> {
    let space = PhaseSpace::new(d, n)?;
    let points: Vec<PhasePoint> = gens.iter().map(|(x, _)| x.clone()).collect();
    for x in &points {
        if !space.contains(x) {
            return Err(Error::DimensionMismatch(format!("generator {x} not in V^{n} over Z_{d}")));
        }
    }
    if !points.is_empty() {
        let span = PhaseSubgroup::from_points(&points)?;
        if span.rank() != points.len() {
            return Err(Error::DependentGenerators);
        }
    }
    for (i, x) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|y| symplectic_unchecked(x, y) != 0) {
            return Err(Error::NonCommutingGenerators);
        }
    }
    let basis = WeylBasis::<R>::new(space);
    let roots = roots_of_unity::<R>(d.get());
    let factors = vec![d.get() as usize; n];
    let inv_d = R::one() / R::from_usize_lossy(d.get() as usize);
    let mut acc = Operator::identity(&factors);
    for (x, tag) in gens {
        // E_k g^k with g^k = ω^{ck} w(kx)
        let mut avg = Operator::zeros(&factors);
        for k in 0..d.get() {
            let w = basis.operator(&x.scale(k))?;
            let ph = roots[d.mul(*tag % d.get(), k) as usize];
            for j in 0..space.hilbert_dim() {
                let t = w.target(j);
                avg[(t, j)] = avg[(t, j)] + ph * w.entry(j);
            }
        }
        acc = acc.matmul(&avg.scale(inv_d))?;
    }
    let r = gens.len();
    let norm = R::one() / R::from_usize_lossy((d.get() as usize).pow((n - r) as u32));
    DensityOperator::new(acc.scale(norm).hermitian_part()).map_err(|e| Error::InvalidPhase(e.to_string()))
}

/// `‖ρ − M(ρ)‖_F ≤ 1e−7`.
pub fn is_stabilizer<R: Real>(rho: &DensityOperator<R>) -> Result<bool> {
    let mean = mean_state_threshold(rho)?;
    Ok(rho.frobenius_distance(&mean.state) <= R::tol(STAB_FROBENIUS))
}

/// `r` random independent, pairwise commuting phase points.
pub fn random_isotropic_points(space: PhaseSpace, r: usize, rng: &mut impl Rng) -> Result<Vec<PhasePoint>> {
    if r > space.n() {
        return Err(Error::InvalidRank { rank: r, dim: space.n() });
    }
    let d = space.modulus();
    let mut points: Vec<PhasePoint> = Vec::with_capacity(r);
    while points.len() < r {
        let current = if points.is_empty() { PhaseSubgroup::trivial(space) } else { PhaseSubgroup::from_points(&points)? };
        let comp = current.symplectic_complement();
        let mut y = PhasePoint::zero(d, space.n());
        for b in comp.basis() {
            y = y.add(&b.scale(rng.random_range(0..d.get())))?;
        }
        if !current.contains(&y) {
            points.push(y);
        }
    }
    Ok(points)
}

/// Random generator list of rank `r` with uniformly random phase tags.
pub fn random_generators(space: PhaseSpace, r: usize, rng: &mut impl Rng) -> Result<Vec<(PhasePoint, u32)>> {
    let d = space.modulus().get();
    Ok(random_isotropic_points(space, r, rng)?.into_iter().map(|x| (x, rng.random_range(0..d))).collect())
}

/// Random stabilizer state with `r` generators (pure when `r = n`).
pub fn random_stabilizer_state<R: Real>(
    n: usize,
    d: PrimeModulus,
    r: usize,
    rng: &mut impl Rng,
) -> Result<DensityOperator<R>> {
    let space = PhaseSpace::new(d, n)?;
    let gens = random_generators(space, r, rng)?;
    stabilizer_state_from_generators(n, d, &gens)
}

/// A state whose stabilizer group is a prescribed random group of rank `r`:
/// a random rank-`k` state compressed into the joint +1 eigenspace,
/// `P σ P / Tr(P σ P)` with `P` the stabilizer projector.
pub fn engineered_partial_stabilizer<R: Real>(
    n: usize,
    d: PrimeModulus,
    r: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<DensityOperator<R>> {
    let space = PhaseSpace::new(d, n)?;
    let gens = random_generators(space, r, rng)?;
    let stab = stabilizer_state_from_generators::<R>(n, d, &gens)?;
    let dim = space.hilbert_dim();
    let proj = stab.scale(R::from_usize_lossy((d.get() as usize).pow((n - r) as u32)));
    let sigma = random_state::<R>(n, d.get() as usize, k.min(dim), rng)?;
    let compressed = proj.matmul(&sigma)?.matmul(&proj)?;
    let tr = compressed.trace().re;
    DensityOperator::new(compressed.scale(R::one() / tr).hermitian_part())
}
