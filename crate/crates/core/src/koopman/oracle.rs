//! Brute-force reference: steps every depth-`N` point digit by digit and
//! reads the cocycle off the digit vector. Slow, and shares nothing with the
//! residue arithmetic or prefix potentials of the fast path.

use num_traits::Zero;

use super::{CylinderFunction, FiberedCylinder, System};
use crate::cocycles::{Cocycle, CocycleRule};
use crate::error::{Error, Result};
use crate::exact::{int, Interval, Rational};

struct Walker<'a> {
    radices: &'a [u32],
    cocycle: Option<&'a Cocycle>,
}

impl Walker<'_> {
    /// One step of `T`; `None` for the cocycle increment means it cannot be
    /// read from the digits present.
    fn step(&self, digits: &mut [u32]) -> Option<u32> {
        let n = digits.len();
        let t = (0..n).take_while(|&i| digits[i] + 1 == self.radices[i]).count();
        let phi = self.cocycle.and_then(|c| self.phi(c, digits, t));
        for d in digits.iter_mut().take(t) {
            *d = 0;
        }
        if t < n {
            digits[t] += 1;
        }
        phi
    }

    fn phi(&self, c: &Cocycle, digits: &[u32], t: usize) -> Option<u32> {
        let n = digits.len();
        let above = |count: usize| -> Option<Vec<u32>> {
            if t + 1 + count > n {
                None
            } else {
                Some(digits[t + 1..t + 1 + count].to_vec())
            }
        };
        match c.rule() {
            CocycleRule::Zero => Some(0),
            CocycleRule::Morse => above(0).map(|_| if t.is_multiple_of(2) { 1 } else { 0 }),
            CocycleRule::RudinShapiro => above(1).map(|p| {
                let ones = if t >= 2 { t - 1 } else { 0 };
                (p[0] % 2 + ones as u32) % 2
            }),
            CocycleRule::Table(table) => above(table.lookahead()).and_then(|p| table.lookup(t, &p)),
        }
    }
}

fn digits_of(radices: &[u32], mut r: u64) -> Vec<u32> {
    radices
        .iter()
        .map(|&b| {
            let d = (r % b as u64) as u32;
            r /= b as u64;
            d
        })
        .collect()
}

fn cell_of(radices: &[u32], digits: &[u32], depth: usize) -> u64 {
    digits[..depth]
        .iter()
        .zip(radices)
        .rev()
        .fold(0u64, |acc, (&d, &b)| acc * b as u64 + d as u64)
}

/// Walks every point `k` steps and hands `(x cell, T^k x cell, fiber shift)`
/// to `visit`, with shift `None` when it is undetermined.
fn walk(sys: &System, depth: usize, k: u64, mut visit: impl FnMut(u64, u64, Option<u32>)) -> Result<()> {
    let radices = sys.digits().radices();
    let n = sys.depth();
    if depth > n {
        return Err(Error::DepthExceeded {
            requested: depth,
            available: n,
        });
    }
    let cocycle = match sys {
        System::Adic(_) => None,
        System::Extension(e) => Some(e.cocycle()),
    };
    let m = sys.fiber_modulus();
    let walker = Walker { radices, cocycle };
    let total: u64 = radices.iter().map(|&b| b as u64).product();
    for r in 0..total {
        let mut digits = digits_of(radices, r);
        let start = cell_of(radices, &digits, depth);
        let mut shift = Some(0u32);
        for _ in 0..k {
            let phi = walker.step(&mut digits);
            shift = match (shift, cocycle) {
                (None, _) => None,
                (Some(s), None) => Some(s),
                (Some(s), Some(_)) => phi.map(|p| (s + p) % m),
            };
        }
        visit(start, cell_of(radices, &digits, depth), shift);
    }
    Ok(())
}

/// `mu(T^k A ∩ B)` by exhaustive stepping.
pub fn oracle_correlation(sys: &System, a: &FiberedCylinder, b: &FiberedCylinder, k: u64) -> Result<Interval> {
    let m = sys.fiber_modulus();
    let depth = a.depth().max(b.depth());
    let digits = sys.digits();
    let in_a_cell = |cell: u64| a.base().contains(cell % digits.block_size(a.depth()));
    let in_b_cell = |cell: u64| b.base().contains(cell % digits.block_size(b.depth()));
    let hits = |s: u32| {
        a.fiber()
            .iter()
            .filter(|&&y| b.fiber().contains(&((y + s) % m)))
            .count() as u64
    };
    let (mut lo, mut hi) = (0u64, 0u64);
    walk(sys, depth, k, |x, tx, shift| {
        if !in_a_cell(x) || !in_b_cell(tx) {
            return;
        }
        match shift {
            Some(s) => {
                lo += hits(s);
                hi += hits(s);
            }
            None => {
                lo += (0..m).map(hits).min().unwrap_or(0);
                hi += (0..m).map(hits).max().unwrap_or(0);
            }
        }
    })?;
    let denom = int(digits.modulus()) * int(m);
    Ok(Interval::new(int(lo) / &denom, int(hi) / denom))
}

/// `<T̂^k f, g>` by exhaustive stepping.
pub fn oracle_inner_product(sys: &System, f: &CylinderFunction, g: &CylinderFunction, k: u64) -> Result<Interval> {
    let m = sys.fiber_modulus();
    let depth = f.depth().max(g.depth());
    let digits = sys.digits();
    let fb = digits.block_size(f.depth());
    let gb = digits.block_size(g.depth());
    let paired = |x: u64, tx: u64, s: u32| -> Rational {
        (0..m)
            .map(|y| f.value((tx % fb) as usize, (y + s) % m) * g.value((x % gb) as usize, y))
            .sum()
    };
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    walk(sys, depth, k, |x, tx, shift| match shift {
        Some(s) => {
            let v = paired(x, tx, s);
            lo += &v;
            hi += v;
        }
        None => {
            let all: Vec<Rational> = (0..m).map(|s| paired(x, tx, s)).collect();
            lo += all.iter().min().cloned().unwrap_or_else(Rational::zero);
            hi += all.iter().max().cloned().unwrap_or_else(Rational::zero);
        }
    })?;
    let denom = int(digits.modulus()) * int(m);
    Ok(Interval::new(lo / &denom, hi / denom))
}
