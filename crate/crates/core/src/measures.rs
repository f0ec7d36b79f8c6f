//! Entropies, divergences and entanglement measures. All logarithms are natural.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, power_from_spectrum, rank_cutoff, rank_eps, trace_norm, DensityOperator, Operator, Spectrum,
};
use crate::scalar::{Real, C};
use crate::stab::mean_state_threshold;
use crate::tolerance::{EPS_SUPP, SLACK_EXACT, SLACK_OPTIMIZER};

const OPT_ETA: f64 = 0.5;
const OPT_TOL: f64 = 1e-9;
const OPT_REG: f64 = 1e-12;
pub const OPT_MAX_ITER: usize = 2000;

/// A split of the tensor factors into nonempty complementary parts `A` and `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl Bipartition {
    pub fn new(num_factors: usize, a: &[usize]) -> Result<Self> {
        let mut a = a.to_vec();
        a.sort_unstable();
        a.dedup();
        if let Some(&i) = a.iter().find(|&&i| i >= num_factors) {
            return Err(Error::IndexOutOfRange { index: i, len: num_factors });
        }
        let b: Vec<usize> = (0..num_factors).filter(|i| !a.contains(i)).collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        Ok(Bipartition { a, b })
    }

    /// `A` = the first `k` factors.
    pub fn leading(num_factors: usize, k: usize) -> Result<Self> {
        Self::new(num_factors, &(0..k).collect::<Vec<_>>())
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn num_factors(&self) -> usize {
        self.a.len() + self.b.len()
    }

    fn check<R: Real>(&self, rho: &Operator<R>) -> Result<()> {
        if rho.factors().len() != self.num_factors() {
            return Err(Error::DimensionMismatch(format!(
                "cut over {} factors applied to {} factors",
                self.num_factors(),
                rho.factors().len()
            )));
        }
        Ok(())
    }
}

/// Order `α ≥ 1/2` of a Rényi quantity.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const ONE: RenyiOrder = RenyiOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.5 {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(RenyiOrder(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1.0
    }

    /// `(1 − α)/(2α)`.
    fn gamma<R: Real>(self) -> R {
        R::lit((1.0 - self.0) / (2.0 * self.0))
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn xlogx_sum<R: Real>(spec: &Spectrum<R>) -> R {
    let cut = rank_cutoff(spec);
    spec.values.iter().filter(|&&l| l > cut).map(|&l| l * l.ln()).sum()
}

/// `S(ρ) = −Tr ρ ln ρ`.
pub fn von_neumann_entropy<R: Real>(rho: &DensityOperator<R>) -> Result<R> {
    Ok(-xlogx_sum(&eig_hermitian(rho)?))
}

/// `ln rank(ρ)`.
pub fn max_entropy<R: Real>(rho: &DensityOperator<R>) -> Result<R> {
    Ok(R::from_usize_lossy(rank_eps(rho)?).ln())
}

/// Weight of `ρ` outside the support of `σ`.
fn weight_off_support<R: Real>(rho: &Operator<R>, sigma: &Spectrum<R>) -> R {
    let cut = rank_cutoff(sigma);
    let dim = rho.dim();
    let mut w = R::zero();
    for (k, &l) in sigma.values.iter().enumerate() {
        if l > cut {
            continue;
        }
        let v = sigma.column(k);
        let mut acc = C::new(R::zero(), R::zero());
        for i in 0..dim {
            let mut row = C::new(R::zero(), R::zero());
            for j in 0..dim {
                row = row + rho[(i, j)] * v[j];
            }
            acc = acc + v[i].conj() * row;
        }
        w = w + acc.re;
    }
    w
}

/// Umegaki relative entropy `Tr ρ (ln ρ − ln σ)`, `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy<R: Real>(rho: &DensityOperator<R>, sigma: &DensityOperator<R>) -> Result<R> {
    check_pair(rho, sigma)?;
    let ss = eig_hermitian(sigma)?;
    if weight_off_support(rho, &ss) > R::tol(EPS_SUPP) {
        return Ok(R::infinity());
    }
    let cut = rank_cutoff(&ss);
    let log_sigma = ss.apply(|l| if l > cut { l.ln() } else { R::zero() });
    let cross = rho.trace_product(&log_sigma)?.re;
    Ok(xlogx_sum(&eig_hermitian(rho)?) - cross)
}

fn check_pair<R: Real>(rho: &Operator<R>, sigma: &Operator<R>) -> Result<()> {
    if rho.factors() != sigma.factors() {
        return Err(Error::DimensionMismatch(format!("factors {:?} vs {:?}", rho.factors(), sigma.factors())));
    }
    Ok(())
}

/// `Tr (σ^γ ρ σ^γ)^α` from a precomputed `σ^γ`, keeping at most `rank` eigenvalues of
/// the inner operator (its rank cannot exceed that of `ρ`). Returns the truncated
/// spectrum alongside.
fn sandwiched<R: Real>(rho: &Operator<R>, sg: &Operator<R>, alpha: R, rank: usize) -> Result<(R, Spectrum<R>)> {
    let x = sg.matmul(rho)?.matmul(sg)?.hermitian_part();
    let mut spec = eig_hermitian(&x)?;
    for l in spec.values.iter_mut().skip(rank) {
        *l = R::zero();
    }
    for l in spec.values.iter_mut() {
        *l = l.max(R::zero());
    }
    let q = spec.values.iter().map(|&l| l.powf(alpha)).sum();
    Ok((q, spec))
}

/// Sandwiched Rényi divergence `ln Tr(σ^γ ρ σ^γ)^α / (α − 1)`, `γ = (1−α)/2α`.
/// `α = 1` is the Umegaki relative entropy. Returns `+∞` when `α ≥ 1` and
/// `supp ρ ⊄ supp σ`, or when the trace vanishes.
pub fn renyi_divergence<R: Real>(rho: &DensityOperator<R>, sigma: &DensityOperator<R>, alpha: RenyiOrder) -> Result<R> {
    if alpha.is_one() {
        return relative_entropy(rho, sigma);
    }
    check_pair(rho, sigma)?;
    let ss = eig_hermitian(sigma)?;
    if alpha.get() > 1.0 && weight_off_support(rho, &ss) > R::tol(EPS_SUPP) {
        return Ok(R::infinity());
    }
    let a = R::lit(alpha.get());
    let sg = power_from_spectrum(&ss, alpha.gamma())?;
    let (q, _) = sandwiched(rho, &sg, a, rank_eps(rho)?)?;
    if q <= R::zero() {
        return Ok(R::infinity());
    }
    Ok(q.ln() / (a - R::one()))
}

/// `S(ρ_A)`.
pub fn entanglement_entropy<R: Real>(rho: &DensityOperator<R>, cut: &Bipartition) -> Result<R> {
    cut.check(rho)?;
    von_neumann_entropy(&rho.partial_trace(cut.a())?)
}

/// Result of a conditional-entropy evaluation. `converged` is false when the
/// optimizer hit the iteration cap; `value` is then the best value found.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalEntropy<R: Real> {
    pub value: R,
    pub converged: bool,
    pub iterations: usize,
}

/// `ρ` with the `A` factors moved to the front.
fn a_first<R: Real>(rho: &DensityOperator<R>, cut: &Bipartition) -> Result<DensityOperator<R>> {
    let order: Vec<usize> = cut.a().iter().chain(cut.b()).copied().collect();
    rho.permute_factors(&order)
}

/// `S_α(A|B) = −inf_σ D_α(ρ_AB ‖ I_A ⊗ σ_B)`. `α = 1` uses `S(AB) − S(B)`.
pub fn conditional_entropy<R: Real>(
    rho: &DensityOperator<R>,
    cut: &Bipartition,
    alpha: RenyiOrder,
) -> Result<ConditionalEntropy<R>> {
    cut.check(rho)?;
    if alpha.is_one() {
        let value = von_neumann_entropy(rho)? - von_neumann_entropy(&rho.partial_trace(cut.b())?)?;
        return Ok(ConditionalEntropy { value, converged: true, iterations: 0 });
    }
    let rho = a_first(rho, cut)?;
    let na = cut.a().len();
    let fa = rho.factors()[..na].to_vec();
    let fb = rho.factors()[na..].to_vec();
    let b_idx: Vec<usize> = (na..rho.factors().len()).collect();
    let id_a = Operator::<R>::identity(&fa);
    let id_b = Operator::<R>::identity(&fb);
    let db = R::from_usize_lossy(id_b.dim());
    let a = R::lit(alpha.get());
    let gamma = alpha.gamma::<R>();
    let beta = R::lit((1.0 - alpha.get()) / 2.0);
    let eta = R::lit(OPT_ETA);
    let reg = R::lit(OPT_REG);
    let tol = R::tol(OPT_TOL);
    let floor = reg / db;

    let rank = rank_eps(&rho)?;
    let mut sigma = rho.partial_trace(&b_idx)?.into_operator();
    let mut best_val = R::infinity();
    let mut best_sigma = sigma.clone();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < OPT_MAX_ITER {
        iterations += 1;
        let reg_sigma = sigma.scale(R::one() - reg).try_add(&id_b.scale(reg / db))?;
        let sspec = eig_hermitian(&reg_sigma)?;
        let sg = id_a.kron(&sspec.apply(|l| l.max(floor).powf(gamma)));
        let (q, spec) = sandwiched(&rho, &sg, a, rank)?;
        let val = q.ln() / (a - R::one());
        if val < best_val {
            best_val = val;
            best_sigma = sigma.clone();
        }
        // T = Tr_A (σ^γ ρ σ^γ)^α; stationary points satisfy T ∝ σ
        let t = spec.apply(|l| l.powf(a)).partial_trace(&b_idx)?;
        let pre = sspec.apply(|l| l.max(floor).powf(-beta));
        let z = pre.matmul(&t)?.matmul(&pre)?.hermitian_part();
        let target = power_from_spectrum(&eig_hermitian(&z)?, R::one() / a)?;
        let tr = target.trace().re;
        if !(tr > R::zero()) || !tr.is_finite() {
            return Err(Error::NumericalTolerance("optimizer iterate lost positivity".into()));
        }
        let next = sigma.scale(R::one() - eta).try_add(&target.scale(eta / tr))?.hermitian_part();
        let step = trace_norm(&next.try_sub(&sigma)?)? / R::lit(2.0);
        sigma = next;
        if step < tol {
            converged = true;
            break;
        }
    }
    let sigma_b = DensityOperator::assume_valid(best_sigma);
    let value = -divergence_to_product(&rho, &id_a, &sigma_b, alpha)?.min(best_val);
    Ok(ConditionalEntropy { value, converged, iterations })
}

/// `D_α(ρ_AB ‖ I_A ⊗ σ_B)` for `ρ` with `A` in front.
fn divergence_to_product<R: Real>(
    rho: &DensityOperator<R>,
    id_a: &Operator<R>,
    sigma_b: &DensityOperator<R>,
    alpha: RenyiOrder,
) -> Result<R> {
    // I_A ⊗ σ_B has trace d_A; D(ρ‖cσ) = D(ρ‖σ) − ln c.
    let da = R::from_usize_lossy(id_a.dim());
    let normalized = DensityOperator::assume_valid(id_a.scale(R::one() / da).kron(sigma_b));
    Ok(renyi_divergence(rho, &normalized, alpha)? - da.ln())
}

/// `D_α(ρ_AB ‖ I_A ⊗ σ_B)` for an explicit `σ_B`, used by external oracles.
pub fn conditional_divergence<R: Real>(
    rho: &DensityOperator<R>,
    cut: &Bipartition,
    sigma_b: &DensityOperator<R>,
    alpha: RenyiOrder,
) -> Result<R> {
    cut.check(rho)?;
    let rho = a_first(rho, cut)?;
    let fa = rho.factors()[..cut.a().len()].to_vec();
    if sigma_b.factors() != &rho.factors()[cut.a().len()..] {
        return Err(Error::DimensionMismatch(format!("σ_B factors {:?}", sigma_b.factors())));
    }
    divergence_to_product(&rho, &Operator::identity(&fa), sigma_b, alpha)
}

/// `(‖ρ^{T_B}‖₁ − 1)/2`, clamped at zero.
pub fn negativity<R: Real>(rho: &DensityOperator<R>, cut: &Bipartition) -> Result<R> {
    cut.check(rho)?;
    let pt = rho.partial_transpose(cut.b())?;
    Ok(((trace_norm(&pt)? - R::one()) / R::lit(2.0)).max(R::zero()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalityRow {
    pub measure: String,
    pub value_rho: f64,
    pub value_mean: f64,
    pub gap: f64,
    pub sign_ok: bool,
}

/// Each measure on `ρ` and on `M(ρ)`. `gap` is oriented so the expected sign
/// is nonnegative: `F(M(ρ)) − F(ρ)` for entropies, `N(ρ) − N(M(ρ))` for negativity.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalityReport<R: Real> {
    pub rows: Vec<ExtremalityRow>,
    pub mean: DensityOperator<R>,
}

impl<R: Real> ExtremalityReport<R> {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.sign_ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("plain data serializes")
    }
}

pub fn extremality_report<R: Real>(
    rho: &DensityOperator<R>,
    cut: &Bipartition,
    alphas: &[RenyiOrder],
) -> Result<ExtremalityReport<R>> {
    cut.check(rho)?;
    let mean = mean_state_threshold(rho)?.state;
    let mut rows = Vec::new();
    let mut push = |measure: String, vr: R, vm: R, entropic: bool, slack: f64| {
        let gap = if entropic { vm - vr } else { vr - vm };
        rows.push(ExtremalityRow {
            measure,
            value_rho: vr.as_f64(),
            value_mean: vm.as_f64(),
            gap: gap.as_f64(),
            sign_ok: gap >= -R::tol(slack),
        });
    };
    push("S".into(), von_neumann_entropy(rho)?, von_neumann_entropy(&mean)?, true, SLACK_EXACT);
    push("S(A)".into(), entanglement_entropy(rho, cut)?, entanglement_entropy(&mean, cut)?, true, SLACK_EXACT);
    for &alpha in alphas {
        let slack = if alpha.is_one() { SLACK_EXACT } else { SLACK_OPTIMIZER };
        let vr = conditional_entropy(rho, cut, alpha)?.value;
        let vm = conditional_entropy(&mean, cut, alpha)?.value;
        push(format!("S_{alpha}(A|B)"), vr, vm, true, slack);
    }
    push("N".into(), negativity(rho, cut)?, negativity(&mean, cut)?, false, SLACK_EXACT);
    Ok(ExtremalityReport { rows, mean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_local_unitary, random_state, stream};
    use crate::scalar::c;

    const LN2: f64 = std::f64::consts::LN_2;

    fn bell() -> DensityOperator<f64> {
        let s = 0.5f64.sqrt();
        DensityOperator::pure(&[2, 2], &[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap()
    }

    fn diag(p: &[f64]) -> DensityOperator<f64> {
        DensityOperator::new(Operator::diagonal(&[p.len()], p).unwrap()).unwrap()
    }

    fn cut2() -> Bipartition {
        Bipartition::leading(2, 1).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::<f64>::basis_state(2, 3, &[1, 2]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-14);
        assert_eq!(max_entropy(&pure).unwrap(), 0.0);
        let mixed = DensityOperator::<f64>::maximally_mixed(2, 3);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-14);
        assert!((max_entropy(&mixed).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-14);
        let r = diag(&[0.75, 0.25]);
        let expect = 0.75 * (4.0f64 / 3.0).ln() + 0.25 * 4f64.ln();
        assert!((von_neumann_entropy(&r).unwrap() - expect).abs() < 1e-14);
        assert!((max_entropy(&r).unwrap() - LN2).abs() < 1e-15);
    }

    #[test]
    fn divergence_examples() {
        let mut rng = stream(11, "div");
        let rho = random_state::<f64>(1, 3, 3, &mut rng).unwrap();
        for a in [0.5, 1.0, 2.0] {
            assert!(renyi_divergence(&rho, &rho, RenyiOrder::new(a).unwrap()).unwrap().abs() < 1e-12);
        }
        let d = renyi_divergence(&diag(&[0.7, 0.3]), &diag(&[0.5, 0.5]), RenyiOrder::new(2.0).unwrap()).unwrap();
        let oracle: f64 = (0.49f64 / 0.5 + 0.09 / 0.5).ln();
        assert!((d - oracle).abs() < 1e-14 && (oracle - 1.16f64.ln()).abs() < 1e-14);

        for _ in 0..10 {
            let r = random_state::<f64>(1, 3, 3, &mut rng).unwrap();
            let s = random_state::<f64>(1, 3, 3, &mut rng).unwrap();
            let v: Vec<f64> =
                [0.5, 1.0, 2.0].iter().map(|&a| renyi_divergence(&r, &s, RenyiOrder::new(a).unwrap()).unwrap()).collect();
            assert!(v[0] <= v[1] + 1e-12 && v[1] <= v[2] + 1e-12, "{v:?}");
        }
    }

    #[test]
    fn divergence_support_rule() {
        let zero = DensityOperator::<f64>::basis_state(1, 2, &[0]).unwrap();
        let one = DensityOperator::<f64>::basis_state(1, 2, &[1]).unwrap();
        let mixed = DensityOperator::<f64>::maximally_mixed(1, 2);
        assert!(relative_entropy(&mixed, &zero).unwrap().is_infinite());
        assert!(renyi_divergence(&mixed, &zero, RenyiOrder::new(2.0).unwrap()).unwrap().is_infinite());
        // α < 1 is finite on overlapping supports and infinite only on orthogonal ones
        let half = renyi_divergence(&mixed, &zero, RenyiOrder::new(0.5).unwrap()).unwrap();
        assert!((half - LN2).abs() < 1e-14);
        assert!(renyi_divergence(&one, &zero, RenyiOrder::new(0.5).unwrap()).unwrap().is_infinite());
        assert!(RenyiOrder::new(0.4).is_err());
    }

    #[test]
    fn entanglement_entropy_examples() {
        let prod = DensityOperator::<f64>::basis_state(2, 2, &[0, 1]).unwrap();
        assert!(entanglement_entropy(&prod, &cut2()).unwrap().abs() < 1e-14);
        assert!((entanglement_entropy(&bell(), &cut2()).unwrap() - LN2).abs() < 1e-14);
        let psi = random_state::<f64>(2, 3, 1, &mut stream(12, "ee")).unwrap();
        let sa = entanglement_entropy(&psi, &cut2()).unwrap();
        let sb = entanglement_entropy(&psi, &Bipartition::new(2, &[1]).unwrap()).unwrap();
        assert!((sa - sb).abs() < 1e-8);
    }

    #[test]
    fn conditional_entropy_examples() {
        let one = RenyiOrder::ONE;
        let mixed = DensityOperator::<f64>::maximally_mixed(2, 2);
        assert!((conditional_entropy(&mixed, &cut2(), one).unwrap().value - LN2).abs() < 1e-14);
        assert!((conditional_entropy(&bell(), &cut2(), one).unwrap().value + LN2).abs() < 1e-14);

        let mut rng = stream(13, "ce");
        for _ in 0..5 {
            let rho = random_state::<f64>(2, 2, 4, &mut rng).unwrap();
            let exact = conditional_entropy(&rho, &cut2(), one).unwrap().value;
            let near = conditional_entropy(&rho, &cut2(), RenyiOrder::new(1.0001).unwrap()).unwrap();
            assert!(near.converged);
            assert!((near.value - exact).abs() <= 1e-3, "{} vs {exact}", near.value);
        }
    }

    #[test]
    fn conditional_entropy_classical_oracle() {
        // diagonal ρ_AB: −inf_q D_α = −(α/(α−1)) ln Σ_b (Σ_a p_ab^α)^{1/α}
        let p = [0.4, 0.1, 0.2, 0.3];
        let rho = diag(&p).into_operator().with_factors(&[2, 2]).unwrap();
        let rho = DensityOperator::new(rho).unwrap();
        for a in [0.5, 2.0, 3.0] {
            let inner: f64 = (0..2).map(|b| (0..2).map(|x: usize| p[2 * x + b].powf(a)).sum::<f64>().powf(1.0 / a)).sum();
            let oracle = -(a / (a - 1.0)) * inner.ln();
            let got = conditional_entropy(&rho, &cut2(), RenyiOrder::new(a).unwrap()).unwrap();
            assert!(got.converged);
            assert!((got.value - oracle).abs() < 1e-8, "α={a}: {} vs {oracle}", got.value);
        }
    }

    #[test]
    fn bipartition_validation() {
        assert!(matches!(Bipartition::new(2, &[]), Err(Error::EmptySubsystem)));
        assert!(matches!(Bipartition::new(2, &[0, 1]), Err(Error::EmptySubsystem)));
        assert!(matches!(Bipartition::new(2, &[2]), Err(Error::IndexOutOfRange { .. })));
        let cut = Bipartition::new(3, &[2, 0]).unwrap();
        assert_eq!(cut.a(), &[0, 2]);
        assert_eq!(cut.b(), &[1]);
    }

    #[test]
    fn negativity_examples() {
        let prod = DensityOperator::<f64>::basis_state(2, 2, &[1, 0]).unwrap();
        assert!(negativity(&prod, &cut2()).unwrap().abs() < 1e-14);
        assert!((negativity(&bell(), &cut2()).unwrap() - 0.5).abs() < 1e-14);
        let mut rng = stream(14, "neg");
        for _ in 0..5 {
            let r1 = random_state::<f64>(2, 2, 1, &mut rng).unwrap();
            let r2 = random_state::<f64>(2, 2, 2, &mut rng).unwrap();
            for lam in [0.25, 0.5] {
                let mix = r1.mix(&r2, lam).unwrap();
                let lhs = negativity(&mix, &cut2()).unwrap();
                let rhs = lam * negativity(&r1, &cut2()).unwrap() + (1.0 - lam) * negativity(&r2, &cut2()).unwrap();
                assert!(lhs <= rhs + 1e-12);
            }
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = stream(15, "lu");
        let rho = random_state::<f64>(2, 3, 3, &mut rng).unwrap();
        let u = random_local_unitary::<f64>(2, 3, &mut rng);
        let rot = rho.conjugate_by(&u).unwrap();
        let cut = cut2();
        assert!((entanglement_entropy(&rho, &cut).unwrap() - entanglement_entropy(&rot, &cut).unwrap()).abs() < 1e-8);
        assert!((negativity(&rho, &cut).unwrap() - negativity(&rot, &cut).unwrap()).abs() < 1e-8);
        for a in [0.5, 1.0, 2.0] {
            let o = RenyiOrder::new(a).unwrap();
            let x = conditional_entropy(&rho, &cut, o).unwrap().value;
            let y = conditional_entropy(&rot, &cut, o).unwrap().value;
            assert!((x - y).abs() < 1e-8, "α={a}: {x} vs {y}");
        }
    }

    #[test]
    fn extremality_examples() {
        let alphas: Vec<RenyiOrder> = [0.5, 1.0, 2.0].iter().map(|&a| RenyiOrder::new(a).unwrap()).collect();
        let rep = extremality_report(&bell(), &cut2(), &alphas).unwrap();
        assert!(rep.all_ok());
        assert!(rep.rows.iter().all(|r| r.gap.abs() < 1e-7), "{:?}", rep.rows);

        let s = 0.5f64.sqrt();
        let magic = Operator::from_vec(
            &[2],
            vec![c(0.5 + 0.5 * s, 0.0), c(0.5 * s, 0.0), c(0.5 * s, 0.0), c(0.5 - 0.5 * s, 0.0)],
        )
        .unwrap();
        let magic = DensityOperator::new(magic).unwrap();
        let rho = magic.kron(&DensityOperator::basis_state(1, 2, &[0]).unwrap());
        let rep = extremality_report(&rho, &cut2(), &alphas).unwrap();
        let expect_mean = DensityOperator::<f64>::maximally_mixed(1, 2).kron(&DensityOperator::basis_state(1, 2, &[0]).unwrap());
        assert!(rep.mean.max_abs_diff(&expect_mean) < 1e-14);
        assert!((rep.rows[0].gap - LN2).abs() < 1e-12);
        assert!(rep.all_ok());
        let json = rep.to_json();
        assert!(json.contains("\"value_mean\"") && json.contains("\"sign_ok\""));
    }
}
