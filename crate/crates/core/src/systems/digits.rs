//! Adic digit systems truncated at a working depth.
//!
//! A point of the odometer is an infinite digit sequence `x_1 x_2 ...` with
//! `0 <= x_i < b_i`. At depth `N` only the first `N` digits are kept, and the
//! first `d` digits are encoded by the residue `x_1 + b_1 x_2 + ... mod B_d`.
//! Adding one with carry is then integer addition, so residue arithmetic
//! modulo `B_N` realizes every power of the odometer exactly on depth-`N`
//! cylinders.

use crate::error::{Error, Result};
use crate::exact::{ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitSystem {
    radices: Vec<u32>,
    // blocks[d] = b_1 * ... * b_d, blocks[0] = 1
    blocks: Vec<u64>,
}

impl DigitSystem {
    pub fn new(radices: Vec<u32>) -> Result<Self> {
        if radices.is_empty() {
            return Err(Error::EmptyDigitSystem);
        }
        let mut blocks = Vec::with_capacity(radices.len() + 1);
        blocks.push(1u64);
        for (i, &b) in radices.iter().enumerate() {
            if b < 2 {
                return Err(Error::RadixTooSmall {
                    position: i + 1,
                    radix: b,
                });
            }
            let next = blocks[i]
                .checked_mul(b as u64)
                .ok_or(Error::BlockOverflow { depth: i + 1 })?;
            blocks.push(next);
        }
        Ok(DigitSystem { radices, blocks })
    }

    /// Repeats `pattern` until `depth` digits are filled, e.g. `(3,2)` gives
    /// the radices `3,2,3,2,...`.
    pub fn periodic(pattern: &[u32], depth: usize) -> Result<Self> {
        if pattern.is_empty() || depth == 0 {
            return Err(Error::EmptyDigitSystem);
        }
        Self::new(pattern.iter().copied().cycle().take(depth).collect())
    }

    pub fn dyadic(depth: usize) -> Result<Self> {
        Self::periodic(&[2], depth)
    }

    pub fn depth(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    /// Radix of digit position `i`, counted from 1.
    pub fn radix(&self, i: usize) -> u32 {
        self.radices[i - 1]
    }

    /// `B_d`; `B_0 = 1`.
    pub fn block_size(&self, d: usize) -> u64 {
        self.blocks[d]
    }

    /// `B_N`, the number of depth-`N` residues.
    pub fn modulus(&self) -> u64 {
        self.blocks[self.depth()]
    }

    pub fn is_dyadic(&self) -> bool {
        self.radices.iter().all(|&b| b == 2)
    }

    /// Same radices cut down to `depth` digits.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        self.check_depth(depth)?;
        Self::new(self.radices[..depth].to_vec())
    }

    pub fn check_depth(&self, depth: usize) -> Result<()> {
        if depth > self.depth() {
            Err(Error::DepthExceeded {
                requested: depth,
                available: self.depth(),
            })
        } else {
            Ok(())
        }
    }

    pub fn point(&self, residue: u64) -> Result<Point> {
        if residue >= self.modulus() {
            return Err(Error::ResidueOutOfRange {
                residue,
                modulus: self.modulus(),
            });
        }
        Ok(Point(residue))
    }

    /// Builds a point from its leading digits; missing trailing digits are 0.
    pub fn point_from_digits(&self, digits: &[u32]) -> Result<Point> {
        Ok(Point(self.residue_of_prefix(digits)?))
    }

    pub fn residue_of_prefix(&self, digits: &[u32]) -> Result<u64> {
        self.check_depth(digits.len())?;
        let mut residue = 0u64;
        for (i, &x) in digits.iter().enumerate() {
            let b = self.radices[i];
            if x >= b {
                return Err(Error::DigitOutOfRange {
                    position: i + 1,
                    digit: x,
                    radix: b,
                });
            }
            residue += x as u64 * self.blocks[i];
        }
        Ok(residue)
    }

    pub fn digits(&self, x: Point) -> Vec<u32> {
        let mut r = x.0;
        self.radices
            .iter()
            .map(|&b| {
                let d = (r % b as u64) as u32;
                r /= b as u64;
                d
            })
            .collect()
    }

    /// Digit at position `i` (from 1) of a residue taken modulo `B_N`.
    pub fn digit_of(&self, residue: u64, i: usize) -> u32 {
        ((residue / self.blocks[i - 1]) % self.radices[i - 1] as u64) as u32
    }

    /// `T_0^k x`: the point with residue `(x + k) mod B_N`.
    pub fn odometer_add(&self, x: Point, k: i64) -> Result<Point> {
        if k < 0 {
            return Err(Error::NegativeLag(k));
        }
        let m = self.modulus() as u128;
        let r = (x.0 as u128 + k as u128) % m;
        Ok(Point(r as u64))
    }

    /// Number of leading digits at their maximal value `b_i - 1`.
    pub fn carry_length(&self, x: Point) -> CarryLength {
        self.carry_length_of(x.0)
    }

    pub(crate) fn carry_length_of(&self, residue: u64) -> CarryLength {
        let mut r = residue;
        for (j, &b) in self.radices.iter().enumerate() {
            let b = b as u64;
            if r % b != b - 1 {
                return CarryLength {
                    len: j,
                    determined: true,
                };
            }
            r /= b;
        }
        CarryLength {
            len: self.depth(),
            determined: false,
        }
    }
}

/// A depth-`N` point, stored as its residue modulo `B_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(u64);

impl Point {
    pub fn residue(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CarryLength {
    pub len: usize,
    /// `false` when every kept digit is maximal, so the true carry may run
    /// past the working depth.
    pub determined: bool,
}

/// Union of depth-`d` basic cylinders, stored as sorted residues mod `B_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    depth: usize,
    block: u64,
    members: Vec<u64>,
}

impl CylinderSet {
    pub fn new(sys: &DigitSystem, depth: usize, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        sys.check_depth(depth)?;
        let block = sys.block_size(depth);
        let mut members: Vec<u64> = residues.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&r| r >= block) {
            return Err(Error::ResidueOutOfRange {
                residue: bad,
                modulus: block,
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(CylinderSet { depth, block, members })
    }

    /// The basic cylinder fixing the leading digits.
    pub fn from_prefix(sys: &DigitSystem, digits: &[u32]) -> Result<Self> {
        let r = sys.residue_of_prefix(digits)?;
        Self::new(sys, digits.len(), [r])
    }

    /// The whole space, as the single depth-0 cylinder.
    pub fn whole() -> Self {
        CylinderSet {
            depth: 0,
            block: 1,
            members: vec![0],
        }
    }

    pub fn empty(sys: &DigitSystem, depth: usize) -> Result<Self> {
        Self::new(sys, depth, [])
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn block(&self) -> u64 {
        self.block
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn measure(&self) -> Rational {
        ratio(self.members.len() as u64, self.block)
    }

    /// Membership of a residue taken at any depth `>= self.depth()`.
    pub fn contains(&self, residue: u64) -> bool {
        self.members.binary_search(&(residue % self.block)).is_ok()
    }

    /// Member residues re-expressed at a deeper level.
    pub fn lift(&self, sys: &DigitSystem, depth: usize) -> Result<Vec<u64>> {
        sys.check_depth(depth)?;
        if depth < self.depth {
            return Err(Error::InvalidArgument(format!(
                "cannot lift a depth-{} cylinder to depth {depth}",
                self.depth
            )));
        }
        let copies = sys.block_size(depth) / self.block;
        let mut out = Vec::with_capacity(self.members.len() * copies as usize);
        for j in 0..copies {
            out.extend(self.members.iter().map(|&r| r + j * self.block));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Image under `T_0^k`, exact at this depth.
    pub fn shifted(&self, k: u64) -> Self {
        let mut members: Vec<u64> = self
            .members
            .iter()
            .map(|&r| ((r as u128 + k as u128) % self.block as u128) as u64)
            .collect();
        members.sort_unstable();
        CylinderSet {
            depth: self.depth,
            block: self.block,
            members,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn odometer_add_examples() {
        let s = DigitSystem::dyadic(3).unwrap();
        let p = |r| s.point(r).unwrap();
        assert_eq!(s.odometer_add(p(3), 1).unwrap(), p(4));
        assert_eq!(s.odometer_add(p(7), 1).unwrap(), p(0));
        let t = DigitSystem::new(vec![3, 2]).unwrap();
        assert_eq!(t.odometer_add(t.point(5).unwrap(), 1).unwrap().residue(), 0);
        assert_eq!(s.odometer_add(p(0), -1), Err(Error::NegativeLag(-1)));
    }

    #[test]
    fn carry_length_examples() {
        let s = DigitSystem::dyadic(8).unwrap();
        let c = s.carry_length(s.point(3).unwrap());
        assert_eq!((c.len, c.determined), (2, true));
        let c = s.carry_length(s.point(255).unwrap());
        assert_eq!((c.len, c.determined), (8, false));
        let t = DigitSystem::new(vec![3, 3]).unwrap();
        let c = t.carry_length(t.point_from_digits(&[2, 1]).unwrap());
        assert_eq!((c.len, c.determined), (1, true));
    }

    #[test]
    fn cylinder_measure_examples() {
        let s = DigitSystem::dyadic(4).unwrap();
        assert_eq!(CylinderSet::from_prefix(&s, &[0, 1]).unwrap().measure(), ratio(1, 4));
        let t = DigitSystem::new(vec![3, 2]).unwrap();
        assert_eq!(CylinderSet::from_prefix(&t, &[2]).unwrap().measure(), ratio(1, 3));
        assert_eq!(CylinderSet::empty(&s, 3).unwrap().measure(), ratio(0, 1));
    }

    #[test]
    fn rejects_bad_radix_and_depth() {
        assert!(matches!(
            DigitSystem::new(vec![2, 1]),
            Err(Error::RadixTooSmall { position: 2, .. })
        ));
        assert!(DigitSystem::new(vec![]).is_err());
        let s = DigitSystem::dyadic(2).unwrap();
        assert!(s.point(4).is_err());
        assert!(CylinderSet::from_prefix(&s, &[0, 0, 0]).is_err());
        assert!(s.point_from_digits(&[2]).is_err());
    }

    #[test]
    fn block_sizes_divide() {
        let s = DigitSystem::periodic(&[3, 2, 5], 9).unwrap();
        for d in 0..9 {
            assert!(s.block_size(d) < s.block_size(d + 1));
            assert_eq!(s.block_size(d + 1) % s.block_size(d), 0);
        }
    }

    #[test]
    fn dyadic_carry_length_distribution() {
        let n = 10;
        let s = DigitSystem::dyadic(n).unwrap();
        let mut counts = vec![0u64; n + 1];
        for r in 0..s.modulus() {
            counts[s.carry_length(s.point(r).unwrap()).len] += 1;
        }
        for (j, &c) in counts.iter().enumerate().take(n) {
            assert_eq!(ratio(c, s.modulus()), ratio(1, 1u64 << (j + 1)));
        }
    }

    fn radices() -> impl Strategy<Value = Vec<u32>> {
        prop::collection::vec(2u32..5, 1..8)
    }

    proptest! {
        #[test]
        fn digit_residue_round_trip(rs in radices(), seed in any::<u64>()) {
            let s = DigitSystem::new(rs).unwrap();
            let x = s.point(seed % s.modulus()).unwrap();
            prop_assert_eq!(s.point_from_digits(&s.digits(x)).unwrap(), x);
        }

        #[test]
        fn residue_homomorphism(rs in radices(), seed in any::<u64>(), k in 0i64..10_000, d_seed in any::<usize>()) {
            let s = DigitSystem::new(rs).unwrap();
            let d = d_seed % (s.depth() + 1);
            let x = s.point(seed % s.modulus()).unwrap();
            let full = s.digits(s.odometer_add(x, k).unwrap());
            let t = if d == 0 { None } else { Some(s.truncated(d).unwrap()) };
            if let Some(t) = t {
                let xd = t.point(x.residue() % t.modulus()).unwrap();
                let kd = k % t.modulus() as i64;
                prop_assert_eq!(&full[..d], &t.digits(t.odometer_add(xd, kd).unwrap())[..]);
            }
        }

        #[test]
        fn block_addition_fixes_cylinders(rs in radices(), seed in any::<u64>(), d_seed in any::<usize>()) {
            let s = DigitSystem::new(rs).unwrap();
            let d = d_seed % (s.depth() + 1);
            let members: Vec<u64> = (0..s.block_size(d)).filter(|r| (r ^ seed) & 1 == 0).collect();
            let a = CylinderSet::new(&s, d, members).unwrap();
            for n in d..=s.depth() {
                prop_assert_eq!(&a.shifted(s.block_size(n)), &a);
            }
        }
    }
}
