//! Exact arithmetic over `Z_d` (d prime): phase points, the symplectic form and
//! subgroups of the phase space `V^n = Z_d^n × Z_d^n`.

use std::fmt;

use crate::error::{Error, Result};

/// A prime local dimension.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 || (2..).take_while(|k: &u32| k * k <= d).any(|k| d % k == 0) {
            return Err(Error::NotPrime(d));
        }
        Ok(PrimeModulus(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_odd(self) -> bool {
        self.0 != 2
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(i64::from(self.0)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b % self.0) % self.0
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a % self.0) % self.0
    }

    pub fn pow(self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.0;
        let mut acc = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        (a != 0).then(|| self.pow(a, self.0 - 2))
    }

    /// `2⁻¹ = (d+1)/2`, defined for odd d only.
    pub fn half(self) -> Option<u32> {
        self.is_odd().then_some((self.0 + 1) / 2)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point `(p, q)` of `V^n`. Ordering is lexicographic in `(p, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    d: PrimeModulus,
    p: Vec<u32>,
    q: Vec<u32>,
}

impl PhasePoint {
    /// Entries are reduced modulo d.
    pub fn new(d: PrimeModulus, p: Vec<u32>, q: Vec<u32>) -> Result<Self> {
        if p.is_empty() || p.len() != q.len() {
            return Err(Error::DimensionMismatch(format!(
                "phase point needs equal nonzero lengths, got {} and {}",
                p.len(),
                q.len()
            )));
        }
        let m = d.get();
        Ok(PhasePoint {
            d,
            p: p.into_iter().map(|x| x % m).collect(),
            q: q.into_iter().map(|x| x % m).collect(),
        })
    }

    pub fn zero(d: PrimeModulus, n: usize) -> Self {
        PhasePoint { d, p: vec![0; n], q: vec![0; n] }
    }

    /// Builds a point from its `2n` coordinates `(p_1..p_n, q_1..q_n)`.
    pub fn from_coords(d: PrimeModulus, coords: &[u32]) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "coordinate vector of odd or zero length {}",
                coords.len()
            )));
        }
        let n = coords.len() / 2;
        PhasePoint::new(d, coords[..n].to_vec(), coords[n..].to_vec())
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.d
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.p.len()
    }

    #[inline]
    pub fn p(&self) -> &[u32] {
        &self.p
    }

    #[inline]
    pub fn q(&self) -> &[u32] {
        &self.q
    }

    pub fn coords(&self) -> Vec<u32> {
        self.p.iter().chain(self.q.iter()).copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().chain(&self.q).all(|&x| x == 0)
    }

    fn check_compatible(&self, other: &PhasePoint) -> Result<()> {
        if self.d != other.d || self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "phase points over (n={}, d={}) and (n={}, d={})",
                self.n(),
                self.d,
                other.n(),
                other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PhasePoint) -> Result<PhasePoint> {
        self.check_compatible(other)?;
        let d = self.d;
        Ok(PhasePoint {
            d,
            p: self.p.iter().zip(&other.p).map(|(&a, &b)| d.add(a, b)).collect(),
            q: self.q.iter().zip(&other.q).map(|(&a, &b)| d.add(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: u32) -> PhasePoint {
        let d = self.d;
        PhasePoint {
            d,
            p: self.p.iter().map(|&a| d.mul(a, c)).collect(),
            q: self.q.iter().map(|&a| d.mul(a, c)).collect(),
        }
    }

    pub fn neg(&self) -> PhasePoint {
        self.scale(self.d.get() - 1)
    }

    /// Single-qudit slice `(p_i, q_i)`.
    #[inline]
    pub fn local(&self, i: usize) -> (u32, u32) {
        (self.p[i], self.q[i])
    }

    /// Parses `"p1,...,pn;q1,...,qn"`.
    pub fn parse(d: PrimeModulus, s: &str) -> Result<Self> {
        let (ps, qs) = s
            .trim()
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("phase point {s:?} lacks ';'")))?;
        let parse_list = |part: &str| -> Result<Vec<u32>> {
            part.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("phase point entry {v:?}: {e}")))
                })
                .collect()
        };
        let (p, q) = (parse_list(ps)?, parse_list(qs)?);
        if p.iter().chain(&q).any(|&x| x >= d.get()) {
            return Err(Error::Parse(format!("phase point {s:?} has entries outside [0, {d})")));
        }
        PhasePoint::new(d, p, q)
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", join(&self.p), join(&self.q))
    }
}

/// `[x, y] = p_x·q_y − q_x·p_y (mod d)`.
pub fn symplectic_form(x: &PhasePoint, y: &PhasePoint) -> Result<u32> {
    x.check_compatible(y)?;
    Ok(symplectic_unchecked(x, y))
}

pub(crate) fn symplectic_unchecked(x: &PhasePoint, y: &PhasePoint) -> u32 {
    let d = x.d;
    let m = i64::from(d.get());
    let mut acc = 0i64;
    for i in 0..x.n() {
        acc += i64::from(x.p[i]) * i64::from(y.q[i]) - i64::from(x.q[i]) * i64::from(y.p[i]);
        acc %= m;
    }
    d.reduce(acc)
}

/// The whole phase space `V^n`, with the lexicographic indexing used by
/// every phase-space table: coordinate `(p_1..p_n, q_1..q_n)` read as a
/// base-d numeral, `p_1` most significant.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseSpace {
    d: PrimeModulus,
    n: usize,
}

impl PhaseSpace {
    pub fn new(d: PrimeModulus, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("n must be at least 1".into()));
        }
        Ok(PhaseSpace { d, n })
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.d
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert-space dimension `d^n`.
    pub fn hilbert_dim(&self) -> usize {
        (self.d.get() as usize).pow(self.n as u32)
    }

    /// Number of phase points `d^{2n}`.
    pub fn size(&self) -> usize {
        (self.d.get() as usize).pow(2 * self.n as u32)
    }

    pub fn index_of(&self, x: &PhasePoint) -> usize {
        let d = self.d.get() as usize;
        x.p.iter().chain(&x.q).fold(0usize, |acc, &c| acc * d + c as usize)
    }

    pub fn point(&self, mut index: usize) -> PhasePoint {
        let d = self.d.get() as usize;
        let mut coords = vec![0u32; 2 * self.n];
        for c in coords.iter_mut().rev() {
            *c = (index % d) as u32;
            index /= d;
        }
        PhasePoint {
            d: self.d,
            p: coords[..self.n].to_vec(),
            q: coords[self.n..].to_vec(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.size()).map(move |i| self.point(i))
    }

    pub fn contains(&self, x: &PhasePoint) -> bool {
        x.d == self.d && x.n() == self.n
    }
}

/// A subgroup (subspace) of `V^n` kept as a reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseSubgroup {
    space: PhaseSpace,
    basis: Vec<PhasePoint>,
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(d: PrimeModulus, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = d.inv(rows[r][col]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = d.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for j in 0..width {
                    let v = d.mul(f, rows[r][j]);
                    rows[i][j] = d.sub(rows[i][j], v);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

impl PhaseSubgroup {
    pub fn trivial(space: PhaseSpace) -> Self {
        PhaseSubgroup { space, basis: Vec::new() }
    }

    pub fn full(space: PhaseSpace) -> Self {
        let basis = (0..2 * space.n)
            .map(|i| {
                let mut coords = vec![0u32; 2 * space.n];
                coords[i] = 1;
                PhasePoint::from_coords(space.d, &coords).expect("valid coords")
            })
            .collect();
        PhaseSubgroup { space, basis }
    }

    /// Subgroup generated by `points` (Gaussian elimination mod d).
    pub fn from_points(points: &[PhasePoint]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::DimensionMismatch("subgroup needs at least one point".into()))?;
        for x in &points[1..] {
            first.check_compatible(x)?;
        }
        let space = PhaseSpace::new(first.d, first.n())?;
        Ok(Self::from_rows(space, points.iter().map(PhasePoint::coords).collect()))
    }

    fn from_rows(space: PhaseSpace, mut rows: Vec<Vec<u32>>) -> Self {
        if rows.is_empty() {
            return Self::trivial(space);
        }
        rref(space.d, &mut rows);
        let basis = rows
            .iter()
            .map(|r| PhasePoint::from_coords(space.d, r).expect("valid coords"))
            .collect();
        PhaseSubgroup { space, basis }
    }

    #[inline]
    pub fn space(&self) -> PhaseSpace {
        self.space
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn basis(&self) -> &[PhasePoint] {
        &self.basis
    }

    /// Number of elements, `d^rank`.
    pub fn order(&self) -> usize {
        (self.space.d.get() as usize).pow(self.rank() as u32)
    }

    pub fn contains(&self, x: &PhasePoint) -> bool {
        if !self.space.contains(x) {
            return false;
        }
        let d = self.space.d;
        let mut v = x.coords();
        for b in &self.basis {
            let bc = b.coords();
            let pivot = bc.iter().position(|&c| c != 0).expect("basis rows are nonzero");
            let f = v[pivot];
            if f != 0 {
                for (vi, &bi) in v.iter_mut().zip(&bc) {
                    *vi = d.sub(*vi, d.mul(f, bi));
                }
            }
        }
        v.iter().all(|&c| c == 0)
    }

    /// All elements, sorted lexicographically.
    pub fn elements(&self) -> Vec<PhasePoint> {
        let d = self.space.d;
        let mut out = Vec::with_capacity(self.order());
        let mut coeffs = vec![0u32; self.rank()];
        loop {
            let mut x = PhasePoint::zero(d, self.space.n);
            for (b, &c) in self.basis.iter().zip(&coeffs) {
                if c != 0 {
                    x = x.add(&b.scale(c)).expect("same space");
                }
            }
            out.push(x);
            // odometer increment
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    out.sort();
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] < d.get() {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    /// `S⊥ = {y : [x, y] = 0 for all x ∈ S}`.
    pub fn symplectic_complement(&self) -> PhaseSubgroup {
        let d = self.space.d;
        let n = self.space.n;
        if self.basis.is_empty() {
            return Self::full(self.space);
        }
        // y ↦ [b, y] has coefficients (−q_b, p_b) on (p_y, q_y).
        let mut rows: Vec<Vec<u32>> = self
            .basis
            .iter()
            .map(|b| b.q.iter().map(|&x| d.neg(x)).chain(b.p.iter().copied()).collect())
            .collect();
        let pivots = rref(d, &mut rows);
        let free: Vec<usize> = (0..2 * n).filter(|c| !pivots.contains(c)).collect();
        let null: Vec<Vec<u32>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![0u32; 2 * n];
                v[f] = 1;
                for (row, &pc) in rows.iter().zip(&pivots) {
                    v[pc] = d.neg(row[f]);
                }
                v
            })
            .collect();
        Self::from_rows(self.space, null)
    }

    pub fn is_isotropic(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, x)| {
            self.basis[i + 1..].iter().all(|y| symplectic_unchecked(x, y) == 0)
        })
    }

    /// Span equality (RREF bases are canonical).
    pub fn same_span(&self, other: &PhaseSubgroup) -> bool {
        self.space == other.space && self.basis == other.basis
    }

    /// Coefficients `c` with `x = Σ c_i basis_i`, if `x` lies in the span.
    pub fn coordinates(&self, x: &PhasePoint) -> Option<Vec<u32>> {
        if !self.contains(x) {
            return None;
        }
        // RREF: the coefficient of row i is x's entry at that row's pivot.
        let coords = x.coords();
        Some(
            self.basis
                .iter()
                .map(|b| {
                    let pivot = b.coords().iter().position(|&c| c != 0).expect("nonzero row");
                    coords[pivot]
                })
                .collect(),
        )
    }
}
