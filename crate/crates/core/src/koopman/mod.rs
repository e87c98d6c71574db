//! Correlations of Koopman powers on odometers and their group extensions.
//!
//! Everything reduces to a [`LagProfile`]: for a lag `k` and a cylinder
//! depth `d`, how many depth-`N` residues in each base cell carry each
//! Birkhoff sum `phi_k`, and how many have an undetermined one. Base cells
//! move rigidly (`a -> a + k mod B_d`), so the profile fixes every
//! correlation, inner product and joining matrix at that depth.
//!
//! An undetermined residue contributes the full range of values its fiber
//! shift could produce; those ranges become interval widths.

mod matrix;
pub mod oracle;

use num_traits::{One, Zero};
use rayon::prelude::*;

pub use matrix::JoiningMatrix;

use crate::cocycles::GroupExtension;
use crate::error::{Error, Result};
use crate::exact::{int, ratio, Interval, Rational};
use crate::systems::{CylinderSet, DigitSystem};

/// A base odometer or a finite-group extension of one.
#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Adic(DigitSystem),
    Extension(GroupExtension),
}

impl System {
    pub fn digits(&self) -> &DigitSystem {
        match self {
            System::Adic(s) => s,
            System::Extension(e) => e.base(),
        }
    }

    /// `m` for an extension, 1 for a bare odometer.
    pub fn fiber_modulus(&self) -> u32 {
        match self {
            System::Adic(_) => 1,
            System::Extension(e) => e.modulus(),
        }
    }

    pub fn depth(&self) -> usize {
        self.digits().depth()
    }

    pub fn truncated(&self, depth: usize) -> Result<System> {
        Ok(match self {
            System::Adic(s) => System::Adic(s.truncated(depth)?),
            System::Extension(e) => System::Extension(e.truncated(depth)?),
        })
    }

    /// Odometers are exact for every lag; an extension needs `k < B_N` for
    /// any orbit to stay determined.
    pub fn lag_usable(&self, k: u64) -> bool {
        match self {
            System::Adic(_) => true,
            System::Extension(e) => k < e.base().modulus() || !e.cocycle().can_be_undetermined(),
        }
    }

    pub fn label(&self) -> String {
        let radices: Vec<String> = self.digits().radices().iter().take(4).map(u32::to_string).collect();
        let base = format!(
            "adic({}{}; N={})",
            radices.join(","),
            if self.depth() > 4 { ",..." } else { "" },
            self.depth()
        );
        match self {
            System::Adic(_) => base,
            System::Extension(e) => format!("{base} x {}", e.cocycle()),
        }
    }
}

impl From<DigitSystem> for System {
    fn from(s: DigitSystem) -> Self {
        System::Adic(s)
    }
}

impl From<GroupExtension> for System {
    fn from(e: GroupExtension) -> Self {
        System::Extension(e)
    }
}

/// `A × F` with `A` a base cylinder set and `F ⊆ Z_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberedCylinder {
    base: CylinderSet,
    fiber: Vec<u32>,
    modulus: u32,
}

impl FiberedCylinder {
    pub fn new(base: CylinderSet, fiber: impl IntoIterator<Item = u32>, modulus: u32) -> Result<Self> {
        let mut fiber: Vec<u32> = fiber.into_iter().collect();
        if let Some(&bad) = fiber.iter().find(|&&y| y >= modulus) {
            return Err(Error::FiberElementOutOfRange { element: bad, modulus });
        }
        fiber.sort_unstable();
        fiber.dedup();
        Ok(FiberedCylinder { base, fiber, modulus })
    }

    /// `A × Z_m`: a set pulled back from the base.
    pub fn base_only(base: CylinderSet, modulus: u32) -> Self {
        FiberedCylinder {
            base,
            fiber: (0..modulus).collect(),
            modulus,
        }
    }

    /// Base cylinder set for a system with the given fiber subset.
    pub fn on(sys: &System, base: CylinderSet, fiber: impl IntoIterator<Item = u32>) -> Result<Self> {
        Self::new(base, fiber, sys.fiber_modulus())
    }

    pub fn base(&self) -> &CylinderSet {
        &self.base
    }

    pub fn fiber(&self) -> &[u32] {
        &self.fiber
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn depth(&self) -> usize {
        self.base.depth()
    }

    pub fn measure(&self) -> Rational {
        self.base.measure() * ratio(self.fiber.len() as u64, self.modulus)
    }
}

/// Shift counts of `phi_k` per depth-`d` base cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagProfile {
    depth: usize,
    lag: u64,
    modulus: u32,
    cells: usize,
    per_cell: u64,
    counts: Vec<u64>,
    undetermined: Vec<u64>,
}

impl LagProfile {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn lag(&self) -> u64 {
        self.lag
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Depth-`N` residues per base cell.
    pub fn per_cell(&self) -> u64 {
        self.per_cell
    }

    /// Cell holding `T_0^k` of cell `a`.
    pub fn image(&self, a: usize) -> usize {
        ((a as u128 + self.lag as u128) % self.cells as u128) as usize
    }

    /// Residues in cell `a` with `phi_k = s`.
    pub fn count(&self, a: usize, s: u32) -> u64 {
        self.counts[a * self.modulus as usize + s as usize]
    }

    pub fn undetermined(&self, a: usize) -> u64 {
        self.undetermined[a]
    }

    pub fn total_undetermined(&self) -> u64 {
        self.undetermined.iter().sum()
    }
}

const PARALLEL_CHUNK: u64 = 1 << 15;

/// Tabulates `phi_k` over every depth-`N` residue, grouped by depth-`d` cell.
pub fn lag_profile(sys: &System, depth: usize, k: u64) -> Result<LagProfile> {
    let digits = sys.digits();
    digits.check_depth(depth)?;
    let cells_u = digits.block_size(depth);
    match sys {
        System::Adic(_) => {
            if cells_u > crate::cocycles::DEFAULT_MAX_POINTS {
                return Err(Error::Resource(format!("{cells_u} cells exceed the enumeration bound")));
            }
            let cells = cells_u as usize;
            Ok(LagProfile {
                depth,
                lag: k,
                modulus: 1,
                cells,
                per_cell: 1,
                counts: vec![1; cells],
                undetermined: vec![0; cells],
            })
        }
        System::Extension(ext) => {
            let pot = ext.potentials()?;
            let n = digits.modulus();
            let m = ext.modulus() as usize;
            let cells = cells_u as usize;
            let tally = |acc: &mut (Vec<u64>, Vec<u64>), range: std::ops::Range<u64>| {
                let mut a = (range.start % cells_u) as usize;
                pot.for_each_sum(range, k, |_, s| {
                    match s {
                        Some(s) => acc.0[a * m + s as usize] += 1,
                        None => acc.1[a] += 1,
                    }
                    a += 1;
                    if a == cells {
                        a = 0;
                    }
                });
            };
            let (counts, undetermined) = if cells * m > 1 << 16 {
                let mut acc = (vec![0u64; cells * m], vec![0u64; cells]);
                tally(&mut acc, 0..n);
                acc
            } else {
                let chunks = n.div_ceil(PARALLEL_CHUNK);
                (0..chunks)
                    .into_par_iter()
                    .fold(
                        || (vec![0u64; cells * m], vec![0u64; cells]),
                        |mut acc, c| {
                            let start = c * PARALLEL_CHUNK;
                            tally(&mut acc, start..(start + PARALLEL_CHUNK).min(n));
                            acc
                        },
                    )
                    .reduce(
                        || (vec![0u64; cells * m], vec![0u64; cells]),
                        |mut a, b| {
                            a.0.iter_mut().zip(b.0).for_each(|(x, y)| *x += y);
                            a.1.iter_mut().zip(b.1).for_each(|(x, y)| *x += y);
                            a
                        },
                    )
            };
            Ok(LagProfile {
                depth,
                lag: k,
                modulus: m as u32,
                cells,
                per_cell: n / cells_u,
                counts,
                undetermined,
            })
        }
    }
}

fn check_operands(sys: &System, sets: &[&FiberedCylinder], k: i64) -> Result<u64> {
    if k < 0 {
        return Err(Error::NegativeLag(k));
    }
    let m = sys.fiber_modulus();
    for s in sets {
        if s.modulus != m {
            return Err(Error::FiberMismatch {
                left: s.modulus,
                right: m,
            });
        }
        sys.digits().check_depth(s.depth())?;
    }
    Ok(k as u64)
}

/// `|{y in F : y + s in G}|` for every shift `s`.
fn fiber_overlaps(f: &[u32], g: &[u32], m: u32) -> Vec<u64> {
    (0..m)
        .map(|s| f.iter().filter(|&&y| g.binary_search(&((y + s) % m)).is_ok()).count() as u64)
        .collect()
}

/// `mu(T^k A ∩ B)`; a point for odometers, an interval when some orbits in
/// an extension leave the working depth.
pub fn correlation(sys: &System, a: &FiberedCylinder, b: &FiberedCylinder, k: i64) -> Result<Interval> {
    let k = check_operands(sys, &[a, b], k)?;
    let digits = sys.digits();
    let d = a.depth().max(b.depth());
    let lifted = a.base.lift(digits, d)?;
    let cells = digits.block_size(d);
    match sys {
        System::Adic(_) => {
            let shift = k % cells;
            let overlap = fiber_overlaps(&a.fiber, &b.fiber, 1)[0];
            let hits = lifted.iter().filter(|&&r| b.base.contains((r + shift) % cells)).count() as u64;
            Ok(Interval::point(ratio(hits * overlap, cells)))
        }
        System::Extension(_) => {
            let profile = lag_profile(sys, d, k)?;
            Ok(correlation_from_profile(&profile, &lifted, a, b))
        }
    }
}

/// Correlation of `A` (already lifted to the profile depth) with `B`.
pub(crate) fn correlation_from_profile(
    profile: &LagProfile,
    lifted_a: &[u64],
    a: &FiberedCylinder,
    b: &FiberedCylinder,
) -> Interval {
    let m = profile.modulus;
    let overlaps = fiber_overlaps(&a.fiber, &b.fiber, m);
    let min_o = *overlaps.iter().min().unwrap_or(&0);
    let max_o = *overlaps.iter().max().unwrap_or(&0);
    let mut lo = 0u128;
    let mut hi = 0u128;
    for &r in lifted_a {
        let cell = r as usize;
        if !b.base.contains(profile.image(cell) as u64) {
            continue;
        }
        let det: u128 = (0..m)
            .map(|s| profile.count(cell, s) as u128 * overlaps[s as usize] as u128)
            .sum();
        let und = profile.undetermined(cell) as u128;
        lo += det + und * min_o as u128;
        hi += det + und * max_o as u128;
    }
    let denom = int(profile.per_cell) * int(profile.cells as u64) * int(m);
    Interval::new(int(lo) / &denom, int(hi) / denom)
}

/// Streams `mu(T^k C ∩ C)` for every basic cell `C = [a] × {y}` at `depth`
/// as integer bounds `(lo, hi)` in units of `mu(C) / per`, where `per` is
/// the returned count of depth-`N` residues per cell. Nothing is allocated
/// per cell, so deep odometer families stay cheap.
pub fn for_each_cell_return(
    sys: &System,
    depth: usize,
    k: u64,
    mut visit: impl FnMut(u64, u32, u64, u64),
) -> Result<u64> {
    let digits = sys.digits();
    digits.check_depth(depth)?;
    match sys {
        System::Adic(_) => {
            let cells = digits.block_size(depth);
            let shift = k % cells;
            for a in 0..cells {
                let back = ((a + shift) % cells == a) as u64;
                visit(a, 0, back, back);
            }
            Ok(1)
        }
        System::Extension(_) => {
            let profile = lag_profile(sys, depth, k)?;
            for a in 0..profile.cells {
                let fixed = profile.image(a) == a;
                for y in 0..profile.modulus {
                    let (lo, hi) = if fixed {
                        let c = profile.count(a, 0);
                        (c, c + profile.undetermined(a))
                    } else {
                        (0, 0)
                    };
                    visit(a as u64, y, lo, hi);
                }
            }
            Ok(profile.per_cell)
        }
    }
}

/// Real function constant on depth-`d` cells `(a, y)`; values are stored
/// with the fiber index varying fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderFunction {
    depth: usize,
    cells: usize,
    modulus: u32,
    values: Vec<Rational>,
}

impl CylinderFunction {
    pub fn new(sys: &DigitSystem, depth: usize, modulus: u32, values: Vec<Rational>) -> Result<Self> {
        sys.check_depth(depth)?;
        let cells = sys.block_size(depth) as usize;
        if values.len() != cells * modulus as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                cells * modulus as usize,
                values.len()
            )));
        }
        Ok(CylinderFunction {
            depth,
            cells,
            modulus,
            values,
        })
    }

    pub fn constant(modulus: u32, c: Rational) -> Self {
        CylinderFunction {
            depth: 0,
            cells: 1,
            modulus,
            values: vec![c; modulus as usize],
        }
    }

    pub fn indicator(sys: &DigitSystem, set: &FiberedCylinder) -> Result<Self> {
        Self::from_terms(sys, set.modulus, &[(Rational::one(), set.clone())])
    }

    /// `sum_i c_i 1_{A_i × F_i}` at the deepest term depth.
    pub fn from_terms(sys: &DigitSystem, modulus: u32, terms: &[(Rational, FiberedCylinder)]) -> Result<Self> {
        let depth = terms.iter().map(|(_, c)| c.depth()).max().unwrap_or(0);
        sys.check_depth(depth)?;
        let cells = sys.block_size(depth) as usize;
        let m = modulus as usize;
        let mut values = vec![Rational::zero(); cells * m];
        for (coef, set) in terms {
            if set.modulus != modulus {
                return Err(Error::FiberMismatch {
                    left: set.modulus,
                    right: modulus,
                });
            }
            for a in set.base.lift(sys, depth)? {
                for &y in &set.fiber {
                    values[a as usize * m + y as usize] += coef;
                }
            }
        }
        Ok(CylinderFunction {
            depth,
            cells,
            modulus,
            values,
        })
    }

    /// `(-1)^y` on an extension with an even fiber modulus.
    pub fn fiber_sign(sys: &System) -> Result<Self> {
        let m = sys.fiber_modulus();
        if !m.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "(-1)^y needs an even fiber modulus, got {m}"
            )));
        }
        let values = (0..m).map(|y| if y % 2 == 0 { int(1) } else { int(-1) }).collect();
        Ok(CylinderFunction {
            depth: 0,
            cells: 1,
            modulus: m,
            values,
        })
    }

    /// `(-1)^{x_1}`.
    pub fn digit_sign(sys: &System) -> Result<Self> {
        let digits = sys.digits();
        let m = sys.fiber_modulus() as usize;
        let cells = digits.block_size(1) as usize;
        let values = (0..cells)
            .flat_map(|a| std::iter::repeat_n(if a % 2 == 0 { int(1) } else { int(-1) }, m))
            .collect();
        CylinderFunction::new(digits, 1, m as u32, values)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn value(&self, cell: usize, y: u32) -> &Rational {
        &self.values[cell * self.modulus as usize + y as usize]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn lift(&self, sys: &DigitSystem, depth: usize) -> Result<Self> {
        sys.check_depth(depth)?;
        if depth < self.depth {
            return Err(Error::InvalidArgument(format!(
                "cannot lift a depth-{} function to depth {depth}",
                self.depth
            )));
        }
        let cells = sys.block_size(depth) as usize;
        let m = self.modulus as usize;
        let values = (0..cells * m)
            .map(|i| self.values[(i / m % self.cells) * m + i % m].clone())
            .collect();
        Ok(CylinderFunction {
            depth,
            cells,
            modulus: self.modulus,
            values,
        })
    }

    pub fn mean(&self) -> Rational {
        let total: Rational = self.values.iter().sum();
        total / int(self.values.len() as u64)
    }

    /// `f - ∫f`.
    pub fn centered(&self) -> Self {
        let mean = self.mean();
        self.map(|v| v - &mean)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        self.map(|v| v * c)
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        CylinderFunction {
            values: self.values.iter().map(f).collect(),
            ..self.clone()
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(CylinderFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// `<f, g>` in `L^2(mu ⊗ nu)`; both functions must share depth and fiber.
    pub fn inner(&self, other: &Self) -> Result<Rational> {
        self.check_same_shape(other)?;
        let total: Rational = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(total / int(self.values.len() as u64))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::FiberMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        if self.depth != other.depth || self.cells != other.cells {
            return Err(Error::InvalidArgument("functions live at different depths".into()));
        }
        Ok(())
    }
}

/// Brings two functions to their common depth.
pub fn align(
    sys: &DigitSystem,
    f: &CylinderFunction,
    g: &CylinderFunction,
) -> Result<(CylinderFunction, CylinderFunction)> {
    let d = f.depth.max(g.depth);
    Ok((f.lift(sys, d)?, g.lift(sys, d)?))
}

/// Fiber average `g(x) = (1/m) sum_y f(x, y)`, the orthogonal projection onto
/// functions of the base coordinate. Returned constant along each fiber.
pub fn project_h0(f: &CylinderFunction) -> CylinderFunction {
    let m = f.modulus as usize;
    let mut values = Vec::with_capacity(f.values.len());
    for cell in f.values.chunks(m) {
        let avg: Rational = cell.iter().sum::<Rational>() / int(m as u64);
        values.extend(std::iter::repeat_n(avg, m));
    }
    CylinderFunction { values, ..f.clone() }
}

pub fn project_h0_perp(f: &CylinderFunction) -> CylinderFunction {
    f.sub(&project_h0(f)).expect("same shape")
}

/// `<T̂^k f, g> = ∫ f(T^k z) g(z) dz` as an interval.
pub fn inner_product_lag(sys: &System, f: &CylinderFunction, g: &CylinderFunction, k: i64) -> Result<Interval> {
    if k < 0 {
        return Err(Error::NegativeLag(k));
    }
    for h in [f, g] {
        if h.modulus != sys.fiber_modulus() {
            return Err(Error::FiberMismatch {
                left: h.modulus,
                right: sys.fiber_modulus(),
            });
        }
    }
    let (f, g) = align(sys.digits(), f, g)?;
    let profile = lag_profile(sys, f.depth, k as u64)?;
    Ok(inner_product_from_profile(&profile, &f, &g))
}

pub(crate) fn inner_product_from_profile(profile: &LagProfile, f: &CylinderFunction, g: &CylinderFunction) -> Interval {
    let m = profile.modulus;
    let mu = m as usize;
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for a in 0..profile.cells {
        let b = profile.image(a);
        let und = profile.undetermined(a);
        let any_det = (0..m).any(|s| profile.count(a, s) > 0);
        if und == 0 && !any_det {
            continue;
        }
        let shifted: Vec<Rational> = (0..mu)
            .map(|s| {
                (0..mu)
                    .map(|y| &f.values[b * mu + (y + s) % mu] * &g.values[a * mu + y])
                    .sum()
            })
            .collect();
        for (s, v) in shifted.iter().enumerate() {
            let c = profile.count(a, s as u32);
            if c > 0 {
                let term = v * int(c);
                lo += &term;
                hi += term;
            }
        }
        if und > 0 {
            let min = shifted.iter().min().cloned().unwrap_or_else(Rational::zero);
            let max = shifted.iter().max().cloned().unwrap_or_else(Rational::zero);
            lo += min * int(und);
            hi += max * int(und);
        }
    }
    let denom = int(profile.per_cell) * int(profile.cells as u64) * int(m);
    Interval::new(lo / &denom, hi / denom)
}

/// Markov matrix of `T̂^k` restricted to depth-`d` cells.
pub fn joining_matrix(sys: &System, d: usize, k: u64) -> Result<JoiningMatrix> {
    let profile = lag_profile(sys, d, k)?;
    Ok(joining_from_profile(&profile))
}

pub(crate) fn joining_from_profile(profile: &LagProfile) -> JoiningMatrix {
    let m = profile.modulus as usize;
    let per = int(profile.per_cell);
    let mut rows: Vec<Vec<(usize, Interval)>> = vec![Vec::new(); profile.cells * m];
    for b in 0..profile.cells {
        let a = profile.image(b);
        let und = profile.undetermined(b);
        for y in 0..m {
            let row = &mut rows[a * m + y];
            for y2 in 0..m {
                let s = ((y + m - y2) % m) as u32;
                let c = profile.count(b, s);
                if c == 0 && und == 0 {
                    continue;
                }
                row.push((b * m + y2, Interval::new(int(c) / &per, int(c + und) / &per)));
            }
        }
    }
    JoiningMatrix::from_rows(profile.depth, profile.lag, profile.modulus, rows).expect("rows built in column order")
}

/// Entrywise limit candidate along a sequence of lags.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakLimit {
    /// Matrix at the last usable lag.
    pub limit: JoiningMatrix,
    /// Up to three trailing iterates, oldest first; the last is `limit`.
    pub tail: Vec<JoiningMatrix>,
    pub tail_lags: Vec<u64>,
    /// Largest midpoint movement between any two tail iterates.
    pub movement: Rational,
    /// Largest entry width over the tail.
    pub slack: Rational,
    pub converged: bool,
}

pub const TAIL_LEN: usize = 3;

/// Default convergence tolerance for tail movement, `2^-10`.
pub fn default_tolerance() -> Rational {
    ratio(1, 1024)
}

pub fn check_sequence(seq: &[u64]) -> Result<()> {
    if seq.first() == Some(&0) || seq.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonIncreasingSequence);
    }
    Ok(())
}

/// The first `i_max` lags of `seq` that the system can evaluate.
pub fn usable_lags(sys: &System, seq: &[u64], i_max: usize) -> Result<Vec<u64>> {
    check_sequence(seq)?;
    Ok(seq.iter().take(i_max).copied().filter(|&k| sys.lag_usable(k)).collect())
}

pub fn tail_of(lags: &[u64]) -> &[u64] {
    &lags[lags.len().saturating_sub(TAIL_LEN)..]
}

pub fn weak_limit(sys: &System, d: usize, seq: &[u64], i_max: usize, tol: &Rational) -> Result<WeakLimit> {
    let lags = usable_lags(sys, seq, i_max)?;
    if lags.len() < 2 {
        return Err(Error::TooFewIterates(lags.len()));
    }
    let tail_lags = tail_of(&lags).to_vec();
    let tail = tail_lags
        .iter()
        .map(|&k| joining_matrix(sys, d, k))
        .collect::<Result<Vec<_>>>()?;
    let mut movement = Rational::zero();
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            let d = tail[i].midpoint_distance(&tail[j])?;
            if d > movement {
                movement = d;
            }
        }
    }
    let slack = tail
        .iter()
        .map(JoiningMatrix::max_width)
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(WeakLimit {
        limit: tail.last().cloned().expect("at least two iterates"),
        converged: &movement <= tol,
        tail,
        tail_lags,
        movement,
        slack,
    })
}

#[cfg(test)]
mod tests;
