//! Quantum convolution `ρ ⊠_{s,t} σ = Tr_B[U_{s,t} (ρ ⊗ σ) U_{s,t}†]` and its iteration.

use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{random_state, stream, trace_norm, DensityOperator, Operator};
use crate::measures::{conditional_entropy, entanglement_entropy, von_neumann_entropy, Bipartition, RenyiOrder};
use crate::scalar::{c, czero, Real};
use crate::stab::mean_state_threshold;
use crate::tolerance::PHASE_SPACE_CAP;
use crate::weyl::{char_function, inverse_char, pauli_rank, space_of, CharTable};
use crate::zd::PrimeModulus;

/// Nontrivial convolution parameters: `s² + t² ≡ 1 (mod d)`, `s, t ∉ {0, 1, d−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConvParams {
    d: PrimeModulus,
    s: u32,
    t: u32,
}

impl ConvParams {
    pub fn new(d: PrimeModulus, s: u32, t: u32) -> Result<Self> {
        let m = d.get();
        let trivial = |x: u32| x == 0 || x == 1 || x == m - 1;
        let ok = s < m && t < m && d.add(d.mul(s, s), d.mul(t, t)) == 1 % m && !trivial(s) && !trivial(t);
        if !ok {
            return Err(Error::InvalidParams { d: m, s, t });
        }
        Ok(ConvParams { d, s, t })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.d
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// `(i, j) → (s i + t j, −t i + s j)` on one qudit.
    #[inline]
    fn forward(&self, i: u32, j: u32) -> (u32, u32) {
        let d = self.d;
        (d.add(d.mul(self.s, i), d.mul(self.t, j)), d.add(d.neg(d.mul(self.t, i)), d.mul(self.s, j)))
    }

    /// Inverse of [`forward`](Self::forward): `(a, b) → (s a − t b, t a + s b)`.
    #[inline]
    fn backward(&self, a: u32, b: u32) -> (u32, u32) {
        let d = self.d;
        (d.sub(d.mul(self.s, a), d.mul(self.t, b)), d.add(d.mul(self.t, a), d.mul(self.s, b)))
    }
}

impl std::fmt::Display for ConvParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(s={}, t={}) mod {}", self.s, self.t, self.d)
    }
}

/// Every admissible `(s, t)` for `d`, in lexicographic order.
pub fn find_params(d: PrimeModulus) -> Vec<ConvParams> {
    let m = d.get();
    (0..m).flat_map(|s| (0..m).map(move |t| (s, t))).filter_map(|(s, t)| ConvParams::new(d, s, t).ok()).collect()
}

/// Default parameters `(2, 2)` at `d = 7`.
pub fn default_params() -> ConvParams {
    ConvParams::new(PrimeModulus::new(7).expect("7 is prime"), 2, 2).expect("2² + 2² ≡ 1 mod 7")
}

fn digits(mut index: usize, d: usize, n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for k in (0..n).rev() {
        out[k] = (index % d) as u32;
        index /= d;
    }
    out
}

fn undigits(ds: &[u32], d: usize) -> usize {
    ds.iter().fold(0, |acc, &k| acc * d + k as usize)
}

fn check_dims(params: &ConvParams, n: usize) -> Result<usize> {
    let d = params.d.get() as usize;
    let size = d.checked_pow(2 * n as u32).unwrap_or(usize::MAX);
    if size > PHASE_SPACE_CAP {
        return Err(Error::CapExceeded { what: "d^2n", size, cap: PHASE_SPACE_CAP });
    }
    Ok(d.pow(n as u32))
}

/// Image of every basis index of `(Z_d^n) ⊗ (Z_d^n)` under `U_{s,t}`.
pub fn coupling_permutation(params: &ConvParams, n: usize) -> Result<Vec<usize>> {
    let dim = check_dims(params, n)?;
    let d = params.d.get() as usize;
    let mut perm = vec![0; dim * dim];
    for (col, slot) in perm.iter_mut().enumerate() {
        let (i, j) = (digits(col / dim, d, n), digits(col % dim, d, n));
        let (a, b): (Vec<u32>, Vec<u32>) = i.iter().zip(&j).map(|(&x, &y)| params.forward(x, y)).unzip();
        *slot = undigits(&a, d) * dim + undigits(&b, d);
    }
    Ok(perm)
}

/// `U_{s,t}` as a dense permutation matrix on `2n` qudits.
pub fn coupling_unitary<R: Real>(params: &ConvParams, n: usize) -> Result<Operator<R>> {
    let perm = coupling_permutation(params, n)?;
    let factors = vec![params.d.get() as usize; 2 * n];
    let mut u = Operator::zeros(&factors);
    for (col, &row) in perm.iter().enumerate() {
        u[(row, col)] = c(R::one(), R::zero());
    }
    Ok(u)
}

/// `ρ ⊠ σ` by contracting indices: `out[a, a'] = Σ_b ρ[i, i'] σ[j, j']` with
/// `(i, j) = U⁻¹(a, b)` and `(i', j') = U⁻¹(a', b)`.
pub fn convolve_dense<R: Real>(
    rho: &DensityOperator<R>,
    sigma: &DensityOperator<R>,
    params: &ConvParams,
) -> Result<DensityOperator<R>> {
    if rho.factors() != sigma.factors() {
        return Err(Error::DimensionMismatch(format!("factors {:?} vs {:?}", rho.factors(), sigma.factors())));
    }
    let space = space_of(rho.as_operator())?;
    if space.modulus() != params.d {
        return Err(Error::DimensionMismatch(format!("state over Z_{} with params mod {}", space.modulus(), params.d)));
    }
    let n = space.n();
    let dim = check_dims(params, n)?;
    let d = params.d.get() as usize;
    // pre[a * dim + b] = (i, j)
    let pre: Vec<(usize, usize)> = (0..dim * dim)
        .map(|ab| {
            let (a, b) = (digits(ab / dim, d, n), digits(ab % dim, d, n));
            let (i, j): (Vec<u32>, Vec<u32>) = a.iter().zip(&b).map(|(&x, &y)| params.backward(x, y)).unzip();
            (undigits(&i, d), undigits(&j, d))
        })
        .collect();
    let mut out = Operator::zeros(rho.factors());
    for a in 0..dim {
        for a2 in 0..dim {
            let mut acc = czero();
            for b in 0..dim {
                let (i, j) = pre[a * dim + b];
                let (i2, j2) = pre[a2 * dim + b];
                acc = acc + rho[(i, i2)] * sigma[(j, j2)];
            }
            out[(a, a2)] = acc;
        }
    }
    Ok(DensityOperator::assume_valid(out))
}

/// Candidate product rule `Ξ_out(x) = Ξ_ρ(s x) · Ξ_σ(κ t x)` for a sign `κ = ±1`.
fn product_rule<R: Real>(xr: &CharTable<R>, xs: &CharTable<R>, params: &ConvParams, sign: i8) -> Result<CharTable<R>> {
    if xr.space() != xs.space() {
        return Err(Error::DimensionMismatch("characteristic tables over different spaces".into()));
    }
    let space = xr.space();
    if space.modulus() != params.d {
        return Err(Error::DimensionMismatch(format!("table over Z_{} with params mod {}", space.modulus(), params.d)));
    }
    let tk = if sign > 0 { params.t } else { params.d.neg(params.t) };
    let values = space.points().map(|x| xr.get(&x.scale(params.s)) * xs.get(&x.scale(tk))).collect();
    CharTable::new(space, values)
}

/// Sign `κ` in the product rule, fixed once by exhaustive comparison with
/// [`convolve_dense`] at `d = 7`, `n = 1`. Panics if neither sign reproduces
/// the dense path.
pub fn product_rule_sign() -> i8 {
    static SIGN: OnceLock<i8> = OnceLock::new();
    *SIGN.get_or_init(|| match calibrate_product_rule() {
        Ok(k) => k,
        Err(msg) => panic!("convolution product rule calibration failed: {msg}"),
    })
}

fn calibrate_product_rule() -> std::result::Result<i8, String> {
    let d = PrimeModulus::new(7).map_err(|e| e.to_string())?;
    let mut states: Vec<DensityOperator<f64>> =
        (0..7).map(|k| DensityOperator::basis_state(1, 7, &[k]).map_err(|e| e.to_string())).collect::<std::result::Result<_, _>>()?;
    let mut rng = stream(0, "product-rule-calibration");
    for _ in 0..4 {
        states.push(random_state(1, 7, 7, &mut rng).map_err(|e| e.to_string())?);
    }
    let tables: Vec<CharTable<f64>> =
        states.iter().map(|s| char_function(s).map_err(|e| e.to_string())).collect::<std::result::Result<_, _>>()?;
    let mut passing = Vec::new();
    for sign in [1i8, -1] {
        let mut worst = 0.0f64;
        for params in find_params(d) {
            for (a, ta) in states.iter().zip(&tables) {
                for (b, tb) in states.iter().zip(&tables) {
                    let dense = char_function(&convolve_dense(a, b, &params).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    let fast = product_rule(ta, tb, &params, sign).map_err(|e| e.to_string())?;
                    worst = worst.max(fast.max_abs_diff(&dense));
                }
            }
        }
        if worst <= 1e-9 {
            passing.push(sign);
        }
    }
    match passing.as_slice() {
        [k] => Ok(*k),
        [] => Err("no sign reproduces the dense path".into()),
        _ => Err("both signs reproduce the dense path; calibration set is degenerate".into()),
    }
}

/// Characteristic table of `ρ ⊠ σ` from those of `ρ` and `σ`.
pub fn convolve_fast<R: Real>(xr: &CharTable<R>, xs: &CharTable<R>, params: &ConvParams) -> Result<CharTable<R>> {
    product_rule(xr, xs, params, product_rule_sign())
}

/// Which evaluation path a trajectory uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvPath {
    /// Product rule for `n = 1`, dense otherwise.
    Auto,
    Fast,
    Dense,
}

#[derive(Clone, Debug)]
pub struct IterateOptions {
    pub cut: Option<Bipartition>,
    pub alpha: RenyiOrder,
    pub path: ConvPath,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions { cut: None, alpha: RenyiOrder::ONE, path: ConvPath::Auto }
    }
}

/// Metrics of `⊠_L ρ`. Bipartite quantities are absent without a cut.
#[derive(Clone, Debug, PartialEq)]
pub struct StepMetrics<R: Real> {
    pub step: usize,
    pub entropy: R,
    pub ent_entropy: Option<R>,
    pub cond_entropy: Option<R>,
    pub cond_converged: bool,
    pub trace_dist_to_mean: R,
    pub pauli_rank: usize,
}

#[derive(Clone, Debug)]
pub struct ConvTrajectory<R: Real> {
    pub states: Vec<DensityOperator<R>>,
    pub metrics: Vec<StepMetrics<R>>,
    pub mean: DensityOperator<R>,
    pub path: ConvPath,
}

pub const TRAJECTORY_HEADER: [&str; 6] =
    ["L", "entropy", "ent_entropy", "cond_entropy_alpha", "trace_dist_to_mean", "pauli_rank"];

impl<R: Real> ConvTrajectory<R> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &DensityOperator<R> {
        self.states.last().expect("trajectory holds the input state")
    }

    /// CSV with one row per step; absent bipartite values are empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(TRAJECTORY_HEADER)?;
        let opt = |v: Option<R>| v.map(|x| format!("{:.12e}", x)).unwrap_or_default();
        for m in &self.metrics {
            out.write_record([
                m.step.to_string(),
                format!("{:.12e}", m.entropy),
                opt(m.ent_entropy),
                opt(m.cond_entropy),
                format!("{:.12e}", m.trace_dist_to_mean),
                m.pauli_rank.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn step_metrics<R: Real>(
    step: usize,
    state: &DensityOperator<R>,
    mean: &DensityOperator<R>,
    opts: &IterateOptions,
) -> Result<StepMetrics<R>> {
    let (ent_entropy, cond, cond_converged) = match &opts.cut {
        Some(cut) => {
            let ce = conditional_entropy(state, cut, opts.alpha)?;
            (Some(entanglement_entropy(state, cut)?), Some(ce.value), ce.converged)
        }
        None => (None, None, true),
    };
    Ok(StepMetrics {
        step,
        entropy: von_neumann_entropy(state)?,
        ent_entropy,
        cond_entropy: cond,
        cond_converged,
        trace_dist_to_mean: trace_norm(&state.try_sub(mean)?)?,
        pauli_rank: pauli_rank(state)?,
    })
}

/// `⊠_0 ρ = ρ`, `⊠_{k+1} ρ = (⊠_k ρ) ⊠_{s_k,t_k} ρ` with `(s_k, t_k) = schedule[k]`.
pub fn iterate_schedule<R: Real>(
    rho: &DensityOperator<R>,
    schedule: &[ConvParams],
    opts: &IterateOptions,
) -> Result<ConvTrajectory<R>> {
    let space = space_of(rho.as_operator())?;
    if let Some(p) = schedule.iter().find(|p| p.d != space.modulus()) {
        return Err(Error::DimensionMismatch(format!("params {p} for a state over Z_{}", space.modulus())));
    }
    if let Some(cut) = &opts.cut {
        if cut.num_factors() != space.n() {
            return Err(Error::DimensionMismatch(format!("cut over {} factors for n = {}", cut.num_factors(), space.n())));
        }
    }
    let path = match opts.path {
        ConvPath::Auto if space.n() == 1 => ConvPath::Fast,
        ConvPath::Auto => ConvPath::Dense,
        p => p,
    };
    let mean = mean_state_threshold(rho)?.state;
    let base_table = if path == ConvPath::Fast { Some(char_function(rho)?) } else { None };
    let mut states = vec![rho.clone()];
    let mut table = base_table.clone();
    for params in schedule {
        let prev = states.last().expect("nonempty");
        let next = match (&mut table, &base_table) {
            (Some(cur), Some(base)) => {
                let t = convolve_fast(cur, base, params)?;
                let st = DensityOperator::new(inverse_char(&t)?.hermitian_part())
                    .map_err(|e| Error::NumericalTolerance(format!("fast-path state invalid: {e}")))?;
                *cur = t;
                st
            }
            _ => convolve_dense(prev, rho, params)?,
        };
        states.push(next);
    }
    let metrics = states
        .iter()
        .enumerate()
        .map(|(k, st)| step_metrics(k, st, &mean, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvTrajectory { states, metrics, mean, path })
}

/// Fixed `(s, t)` for all `L` steps.
pub fn iterate<R: Real>(
    rho: &DensityOperator<R>,
    params: &ConvParams,
    steps: usize,
    opts: &IterateOptions,
) -> Result<ConvTrajectory<R>> {
    iterate_schedule(rho, &vec![*params; steps], opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stab::{is_stabilizer, random_stabilizer_state, stabilizer_state_from_generators};
    use crate::zd::PhasePoint;

    fn m(d: u32) -> PrimeModulus {
        PrimeModulus::new(d).unwrap()
    }

    #[test]
    fn find_params_examples() {
        let got: Vec<(u32, u32)> = find_params(m(7)).iter().map(|p| (p.s(), p.t())).collect();
        assert_eq!(got, vec![(2, 2), (2, 5), (5, 2), (5, 5)]);
        // brute force over all pairs
        let brute: Vec<(u32, u32)> = (0..7u32)
            .flat_map(|s| (0..7u32).map(move |t| (s, t)))
            .filter(|&(s, t)| (s * s + t * t) % 7 == 1 && ![0, 1, 6].contains(&s) && ![0, 1, 6].contains(&t))
            .collect();
        assert_eq!(got, brute);
        for d in [2, 3, 5] {
            assert!(find_params(m(d)).is_empty());
        }
        assert!(ConvParams::new(m(7), 1, 0).is_err());
    }

    #[test]
    fn coupling_unitary_examples() {
        let p = default_params();
        let u = coupling_unitary::<f64>(&p, 1).unwrap();
        assert_eq!(u[(0, 0)], c(1.0, 0.0));
        // |1⟩|0⟩ = index 7 maps to |2⟩|5⟩ = index 19
        assert_eq!(u[(2 * 7 + 5, 7)], c(1.0, 0.0));
        let uu = u.matmul(&u.adjoint()).unwrap();
        assert_eq!(uu, Operator::identity(&[7, 7]));
        let big = ConvParams::new(m(7), 2, 2).unwrap();
        assert!(matches!(coupling_permutation(&big, 3), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn dense_matches_explicit_unitary() {
        let p = ConvParams::new(m(7), 5, 2).unwrap();
        let mut rng = stream(21, "conv-u");
        let a = random_state::<f64>(1, 7, 7, &mut rng).unwrap();
        let b = random_state::<f64>(1, 7, 2, &mut rng).unwrap();
        let u = coupling_unitary::<f64>(&p, 1).unwrap();
        let joint = a.kron(&b).conjugate_by(&u).unwrap();
        let oracle = joint.partial_trace(&[0]).unwrap();
        let got = convolve_dense(&a, &b, &p).unwrap();
        assert!(got.max_abs_diff(&oracle) < 1e-14);
    }

    #[test]
    fn dense_examples() {
        let p = default_params();
        let mixed = DensityOperator::<f64>::maximally_mixed(1, 7);
        assert!(convolve_dense(&mixed, &mixed, &p).unwrap().max_abs_diff(&mixed) < 1e-15);
        let zero = DensityOperator::<f64>::basis_state(2, 7, &[0, 0]).unwrap();
        assert!(convolve_dense(&zero, &zero, &p).unwrap().max_abs_diff(&zero) < 1e-15);
        let mut rng = stream(22, "conv-stab");
        for _ in 0..3 {
            let a = random_stabilizer_state::<f64>(1, m(7), 1, &mut rng).unwrap();
            let b = random_stabilizer_state::<f64>(1, m(7), 1, &mut rng).unwrap();
            assert!(is_stabilizer(&convolve_dense(&a, &b, &p).unwrap()).unwrap());
        }
    }

    #[test]
    fn fast_matches_dense() {
        let sign = product_rule_sign();
        assert!(sign == 1 || sign == -1);
        let space = crate::zd::PhaseSpace::new(m(7), 1).unwrap();
        let delta = CharTable::<f64>::delta0(space);
        for p in find_params(m(7)) {
            assert!(convolve_fast(&delta, &delta, &p).unwrap().max_abs_diff(&delta) < 1e-15);
        }
        let mut rng = stream(23, "conv-fast");
        for n in [1, 2] {
            let a = random_state::<f64>(n, 7, 3, &mut rng).unwrap();
            let b = random_state::<f64>(n, 7, 5, &mut rng).unwrap();
            let (ta, tb) = (char_function(&a).unwrap(), char_function(&b).unwrap());
            for p in find_params(m(7)) {
                let dense = char_function(&convolve_dense(&a, &b, &p).unwrap()).unwrap();
                let fast = convolve_fast(&ta, &tb, &p).unwrap();
                assert!(fast.max_abs_diff(&dense) < 1e-9, "n={n} {p}");
                for (x, v) in space_points(&fast) {
                    let bound = ta.get(&x.scale(p.s())).norm().min(1.0);
                    assert!(v.norm() <= bound + 1e-12);
                }
            }
        }
    }

    fn space_points(t: &CharTable<f64>) -> Vec<(PhasePoint, num_complex::Complex<f64>)> {
        t.space().points().zip(t.values().iter().copied()).collect()
    }

    #[test]
    fn marginal_commutes_with_convolution() {
        let p = default_params();
        let mut rng = stream(24, "conv-marg");
        let a = random_state::<f64>(2, 7, 3, &mut rng).unwrap();
        let b = random_state::<f64>(2, 7, 4, &mut rng).unwrap();
        let lhs = convolve_dense(&a, &b, &p).unwrap().partial_trace(&[0]).unwrap();
        let rhs = convolve_dense(&a.partial_trace(&[0]).unwrap(), &b.partial_trace(&[0]).unwrap(), &p).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-9);
    }

    #[test]
    fn clt_decay_and_mean_invariance() {
        let p = default_params();
        let rho = random_state::<f64>(1, 7, 7, &mut stream(25, "clt")).unwrap();
        let traj = iterate(&rho, &p, 8, &IterateOptions::default()).unwrap();
        assert_eq!(traj.path, ConvPath::Fast);
        assert_eq!(traj.len(), 9);
        let dists: Vec<f64> = traj.metrics.iter().map(|m| m.trace_dist_to_mean).collect();
        assert!(dists.windows(2).all(|w| w[1] < w[0]), "{dists:?}");
        for w in traj.metrics.windows(2) {
            assert!(w[0].entropy <= w[1].entropy + 1e-8);
        }
        for st in &traj.states {
            assert!(mean_state_threshold(st).unwrap().state.max_abs_diff(&traj.mean) < 1e-8);
        }
        let dense = iterate(&rho, &p, 3, &IterateOptions { path: ConvPath::Dense, ..Default::default() }).unwrap();
        for (x, y) in dense.states.iter().zip(&traj.states) {
            assert!(x.max_abs_diff(y) < 1e-9);
        }
    }

    #[test]
    fn zero_phase_stabilizer_is_fixed() {
        let p = default_params();
        let z = PhasePoint::from_coords(m(7), &[1, 0]).unwrap();
        let rho = stabilizer_state_from_generators::<f64>(1, m(7), &[(z, 0)]).unwrap();
        let traj = iterate(&rho, &p, 4, &IterateOptions::default()).unwrap();
        for st in &traj.states {
            assert!(st.max_abs_diff(&rho) < 1e-12);
        }
        assert!(traj.metrics.iter().all(|m| m.trace_dist_to_mean < 1e-12));
    }

    #[test]
    fn trajectory_csv_layout() {
        let p = default_params();
        let rho = DensityOperator::<f64>::maximally_mixed(1, 7);
        let traj = iterate(&rho, &p, 1, &IterateOptions::default()).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("L,entropy,ent_entropy,cond_entropy_alpha,trace_dist_to_mean,pauli_rank"));
        assert_eq!(lines.count(), 2);
    }
}
