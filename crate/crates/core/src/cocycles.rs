//! Finite-group cocycles over adic odometers and the extensions they define.
//!
//! A cocycle here is a function of the carry pattern of one odometer step:
//! the carry length `t` (leading maximal digits), the terminating digit at
//! position `t + 1`, and `lookahead` further digits above it. That covers
//! the Morse and Rudin–Shapiro cocycles exactly and keeps every value
//! computable from finitely many digits.
//!
//! The extension is `T(x, y) = (T_0 x, y + phi(x))` on `X × Z_m`, and powers
//! act through Birkhoff sums, `T^k(x, y) = (T_0^k x, y + phi_k(x))`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exact::ceil_log;
use crate::systems::{DigitSystem, Point};

/// Cap on `B_N` for any path that tabulates every residue.
pub const DEFAULT_MAX_POINTS: u64 = 1 << 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CocycleValue {
    Value(u32),
    /// The carry block plus lookahead runs past the working depth.
    Undetermined,
}

impl CocycleValue {
    pub fn value(self) -> Option<u32> {
        match self {
            CocycleValue::Value(v) => Some(v),
            CocycleValue::Undetermined => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleRule {
    /// `phi = 1 + t mod 2`; Birkhoff sums are the binary digit-sum parity.
    Morse,
    /// `phi = x_{t+2} + max(t - 1, 0) mod 2`; Birkhoff sums are the parity
    /// of the number of `11` blocks.
    RudinShapiro,
    Zero,
    Table(CocycleTable),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum CarryKey {
    Exact(usize),
    // rows below apply for t >= t_max
    Even,
    Odd,
    Any,
}

/// Explicit cocycle: one value per `(t, pattern)`, where `pattern` lists the
/// digits at positions `t + 2 ..= t + 1 + lookahead`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    modulus: u32,
    lookahead: usize,
    rows: BTreeMap<(CarryKey, Vec<u32>), u32>,
    t_max: usize,
}

impl CocycleTable {
    /// Parses the plain-text table format:
    ///
    /// ```text
    /// # comment
    /// modulus 2
    /// lookahead 1
    /// 0 0 -> 0        # t = 0, x_2 = 0
    /// 0 1 -> 1
    /// odd 0,1 -> 1    # t >= t_max and odd; digits comma separated
    /// * - -> 0        # any remaining t, empty pattern
    /// ```
    ///
    /// Carry keys are an integer, `even`, `odd` or `*`; the last three apply
    /// only beyond the largest explicit integer key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut modulus = None;
        let mut lookahead = None;
        let mut rows = BTreeMap::new();
        let err = |line: usize, message: String| Error::CocycleTable { line, message };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["modulus", v] => {
                    modulus = Some(
                        v.parse::<u32>()
                            .map_err(|_| err(line_no, format!("bad modulus `{v}`")))?,
                    )
                }
                ["lookahead", v] => {
                    lookahead = Some(
                        v.parse::<usize>()
                            .map_err(|_| err(line_no, format!("bad lookahead `{v}`")))?,
                    )
                }
                [key, pattern, "->", value] => {
                    let key = match *key {
                        "even" => CarryKey::Even,
                        "odd" => CarryKey::Odd,
                        "*" => CarryKey::Any,
                        t => CarryKey::Exact(t.parse().map_err(|_| err(line_no, format!("bad carry key `{t}`")))?),
                    };
                    let pattern: Vec<u32> = if *pattern == "-" {
                        Vec::new()
                    } else {
                        pattern
                            .split(',')
                            .map(|d| d.parse::<u32>().map_err(|_| err(line_no, format!("bad digit `{d}`"))))
                            .collect::<Result<_>>()?
                    };
                    let value: u32 = value
                        .parse()
                        .map_err(|_| err(line_no, format!("bad value `{value}`")))?;
                    if rows.insert((key, pattern), value).is_some() {
                        return Err(err(line_no, "duplicate row".into()));
                    }
                }
                _ => return Err(err(line_no, format!("unrecognized line `{line}`"))),
            }
        }
        let modulus = modulus.ok_or_else(|| err(0, "missing `modulus` line".into()))?;
        let lookahead = lookahead.unwrap_or(0);
        if modulus < 2 {
            return Err(err(0, format!("modulus {modulus} below 2")));
        }
        for ((_, pattern), value) in &rows {
            if pattern.len() != lookahead {
                return Err(err(0, format!("pattern {pattern:?} does not have {lookahead} digits")));
            }
            if *value >= modulus {
                return Err(err(0, format!("value {value} not in Z_{modulus}")));
            }
        }
        let t_max = rows
            .keys()
            .filter_map(|(k, _)| match k {
                CarryKey::Exact(t) => Some(t + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Ok(CocycleTable {
            modulus,
            lookahead,
            rows,
            t_max,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn lookahead(&self) -> usize {
        self.lookahead
    }

    /// Value for carry length `t` and the digits above the carry block.
    pub fn lookup(&self, t: usize, pattern: &[u32]) -> Option<u32> {
        let get = |key| self.rows.get(&(key, pattern.to_vec())).copied();
        if t < self.t_max {
            return get(CarryKey::Exact(t));
        }
        let parity = if t.is_multiple_of(2) {
            CarryKey::Even
        } else {
            CarryKey::Odd
        };
        get(CarryKey::Exact(t))
            .or_else(|| get(parity))
            .or_else(|| get(CarryKey::Any))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    modulus: u32,
    rule: CocycleRule,
}

impl Cocycle {
    pub fn morse() -> Self {
        Cocycle {
            modulus: 2,
            rule: CocycleRule::Morse,
        }
    }

    pub fn rudin_shapiro() -> Self {
        Cocycle {
            modulus: 2,
            rule: CocycleRule::RudinShapiro,
        }
    }

    pub fn zero(modulus: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Cocycle(format!("fiber modulus {modulus} below 2")));
        }
        Ok(Cocycle {
            modulus,
            rule: CocycleRule::Zero,
        })
    }

    pub fn table(table: CocycleTable) -> Self {
        Cocycle {
            modulus: table.modulus,
            rule: CocycleRule::Table(table),
        }
    }

    /// Resolves a rule tag (`MORSE`, `RUDIN_SHAPIRO`, `ZERO`) for a fiber
    /// modulus.
    pub fn from_tag(tag: &str, modulus: u32) -> Result<Self> {
        let c = match tag.to_ascii_uppercase().as_str() {
            "MORSE" => Cocycle::morse(),
            "RUDIN_SHAPIRO" | "RS" => Cocycle::rudin_shapiro(),
            "ZERO" => return Cocycle::zero(modulus),
            other => return Err(Error::Cocycle(format!("unknown cocycle tag `{other}`"))),
        };
        if c.modulus != modulus {
            return Err(Error::Cocycle(format!(
                "{tag} takes values in Z_2, fiber modulus {modulus} requested"
            )));
        }
        Ok(c)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn rule(&self) -> &CocycleRule {
        &self.rule
    }

    /// Digits read above the terminating digit of the carry block.
    pub fn lookahead(&self) -> usize {
        match &self.rule {
            CocycleRule::Morse | CocycleRule::Zero => 0,
            CocycleRule::RudinShapiro => 1,
            CocycleRule::Table(t) => t.lookahead,
        }
    }

    pub fn can_be_undetermined(&self) -> bool {
        !matches!(self.rule, CocycleRule::Zero)
    }

    /// Residues `r` with `r mod Q = Q - 1` are exactly the points whose
    /// value is undetermined at the working depth; returns `Q`.
    pub fn undetermined_period(&self, sys: &DigitSystem) -> Option<u64> {
        if !self.can_be_undetermined() {
            return None;
        }
        let keep = sys.depth().saturating_sub(self.lookahead());
        Some(sys.block_size(keep))
    }

    pub fn tag(&self) -> String {
        match &self.rule {
            CocycleRule::Morse => "MORSE".into(),
            CocycleRule::RudinShapiro => "RUDIN_SHAPIRO".into(),
            CocycleRule::Zero => "ZERO".into(),
            CocycleRule::Table(_) => "TABLE".into(),
        }
    }
}

impl fmt::Display for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over Z_{}", self.tag(), self.modulus)
    }
}

/// `phi(x)`.
pub fn eval_cocycle(c: &Cocycle, sys: &DigitSystem, x: Point) -> Result<CocycleValue> {
    eval_residue(c, sys, x.residue())
}

fn eval_residue(c: &Cocycle, sys: &DigitSystem, residue: u64) -> Result<CocycleValue> {
    if let CocycleRule::Zero = c.rule {
        return Ok(CocycleValue::Value(0));
    }
    let carry = sys.carry_length_of(residue);
    let t = carry.len;
    let reach = t + 1 + c.lookahead();
    if !carry.determined || reach > sys.depth() {
        return Ok(CocycleValue::Undetermined);
    }
    let v = match &c.rule {
        CocycleRule::Zero => unreachable!(),
        CocycleRule::Morse => ((1 + t) % 2) as u32,
        CocycleRule::RudinShapiro => {
            let above = sys.digit_of(residue, t + 2) % 2;
            ((above as usize + t.saturating_sub(1)) % 2) as u32
        }
        CocycleRule::Table(table) => {
            let pattern: Vec<u32> = (t + 2..=reach).map(|i| sys.digit_of(residue, i)).collect();
            table
                .lookup(t, &pattern)
                .ok_or_else(|| Error::Cocycle(format!("table has no entry for t = {t}, pattern {pattern:?}")))?
        }
    };
    Ok(CocycleValue::Value(v))
}

/// Birkhoff sum `phi_k(x) = sum_{j<k} phi(T_0^j x)` in `Z_m`.
pub fn cocycle_sum(c: &Cocycle, sys: &DigitSystem, x: Point, k: i64) -> Result<CocycleValue> {
    if k < 0 {
        return Err(Error::NegativeLag(k));
    }
    let mut sum = 0u32;
    let mut p = x;
    for _ in 0..k {
        match eval_cocycle(c, sys, p)? {
            CocycleValue::Value(v) => sum = (sum + v) % c.modulus,
            CocycleValue::Undetermined => return Ok(CocycleValue::Undetermined),
        }
        p = sys.odometer_add(p, 1)?;
    }
    Ok(CocycleValue::Value(sum))
}

/// Integer sequences whose increments the closed-form cocycles reproduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceOracle {
    /// Parity of the binary digit sum.
    MorseDigitSum,
    /// Parity of the number of (overlapping) `11` blocks in binary.
    Rs11Count,
}

impl SequenceOracle {
    pub fn value(self, n: u64) -> u32 {
        match self {
            SequenceOracle::MorseDigitSum => n.count_ones() % 2,
            SequenceOracle::Rs11Count => (n & (n >> 1)).count_ones() % 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CocycleCheck {
    Success { checked: u64 },
    Mismatch { k: u64, expected: u32, found: u32 },
    Inconclusive { first_undetermined: u64 },
}

/// Checks `phi_k(0) = oracle(k) - oracle(0)` for every `k < k_max` on the
/// dyadic base. With `depth = None` the base is deep enough to determine
/// every sum.
pub fn verify_cocycle_against_sequence(
    c: &Cocycle,
    oracle: SequenceOracle,
    k_max: u64,
    depth: Option<usize>,
) -> Result<CocycleCheck> {
    if c.modulus != 2 {
        return Err(Error::Cocycle("sequence oracles are parities; need modulus 2".into()));
    }
    let depth = depth.unwrap_or_else(|| ceil_log(2, k_max.max(2)) + c.lookahead() + 1);
    let sys = DigitSystem::dyadic(depth)?;
    let base = oracle.value(0);
    let mut sum = 0u32;
    for k in 0..k_max {
        let expected = (oracle.value(k) + 2 - base) % 2;
        if sum != expected {
            return Ok(CocycleCheck::Mismatch {
                k,
                expected,
                found: sum,
            });
        }
        if k + 1 == k_max {
            break;
        }
        if k >= sys.modulus() {
            return Ok(CocycleCheck::Inconclusive {
                first_undetermined: k + 1,
            });
        }
        match eval_residue(c, &sys, k)? {
            CocycleValue::Value(v) => sum = (sum + v) % 2,
            CocycleValue::Undetermined => {
                return Ok(CocycleCheck::Inconclusive {
                    first_undetermined: k + 1,
                })
            }
        }
    }
    Ok(CocycleCheck::Success { checked: k_max })
}

/// Prefix sums `P[j] = sum_{i<j} phi(i)` over all residues; a determined
/// orbit never wraps, so `phi_k(x) = P[x + k] - P[x]`.
#[derive(Debug)]
pub(crate) struct Potentials {
    values: Vec<u16>,
    period: Option<u64>,
    modulus: u32,
}

impl Potentials {
    #[cfg(test)]
    pub(crate) fn sum(&self, x: u64, k: u64) -> Option<u32> {
        if let Some(q) = self.period {
            if x % q + k >= q {
                return None;
            }
            let hi = self.values[(x + k) as usize] as u32;
            let lo = self.values[x as usize] as u32;
            Some((hi + self.modulus - lo) % self.modulus)
        } else {
            Some(0)
        }
    }
}

impl Potentials {
    /// Calls `visit(x, phi_k(x))` for every `x` in `range`, in order.
    pub(crate) fn for_each_sum(&self, range: std::ops::Range<u64>, k: u64, mut visit: impl FnMut(u64, Option<u32>)) {
        let Some(q) = self.period else {
            range.for_each(|x| visit(x, Some(0)));
            return;
        };
        let m = self.modulus;
        let mut phase = range.start % q;
        for x in range {
            if phase + k < q {
                let hi = self.values[(x + k) as usize] as u32;
                let lo = self.values[x as usize] as u32;
                let d = hi + m - lo;
                visit(x, Some(if d >= m { d - m } else { d }));
            } else {
                visit(x, None);
            }
            phase += 1;
            if phase == q {
                phase = 0;
            }
        }
    }
}

/// The skew product `T(x, y) = (T_0 x, y + phi(x))` over `Z_m`.
pub struct GroupExtension {
    base: DigitSystem,
    cocycle: Cocycle,
    max_points: u64,
    potentials: OnceLock<std::result::Result<Potentials, Error>>,
}

impl GroupExtension {
    pub fn new(base: DigitSystem, cocycle: Cocycle) -> Result<Self> {
        if cocycle.modulus > u16::MAX as u32 {
            return Err(Error::Cocycle(format!("fiber modulus {} too large", cocycle.modulus)));
        }
        Ok(GroupExtension {
            base,
            cocycle,
            max_points: DEFAULT_MAX_POINTS,
            potentials: OnceLock::new(),
        })
    }

    pub fn with_max_points(mut self, max_points: u64) -> Self {
        self.max_points = max_points;
        self.potentials = OnceLock::new();
        self
    }

    pub fn base(&self) -> &DigitSystem {
        &self.base
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn modulus(&self) -> u32 {
        self.cocycle.modulus
    }

    pub fn max_points(&self) -> u64 {
        self.max_points
    }

    /// Same cocycle over the base cut to `depth` digits.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        Ok(GroupExtension::new(self.base.truncated(depth)?, self.cocycle.clone())?.with_max_points(self.max_points))
    }

    pub(crate) fn potentials(&self) -> Result<&Potentials> {
        self.potentials
            .get_or_init(|| self.build_potentials())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_potentials(&self) -> Result<Potentials> {
        let n = self.base.modulus();
        if n > self.max_points {
            return Err(Error::Resource(format!(
                "{n} residues exceed the enumeration bound {}",
                self.max_points
            )));
        }
        let m = self.cocycle.modulus;
        let period = self.cocycle.undetermined_period(&self.base);
        let mut values = Vec::with_capacity(n as usize + 1);
        let mut acc = 0u32;
        values.push(0u16);
        for r in 0..n {
            if let CocycleValue::Value(v) = eval_residue(&self.cocycle, &self.base, r)? {
                acc = (acc + v) % m;
            }
            values.push(acc as u16);
        }
        Ok(Potentials {
            values,
            period,
            modulus: m,
        })
    }
}

impl Clone for GroupExtension {
    fn clone(&self) -> Self {
        GroupExtension {
            base: self.base.clone(),
            cocycle: self.cocycle.clone(),
            max_points: self.max_points,
            potentials: OnceLock::new(),
        }
    }
}

impl PartialEq for GroupExtension {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.cocycle == other.cocycle
    }
}

impl fmt::Debug for GroupExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupExtension")
            .field("base", &self.base)
            .field("cocycle", &self.cocycle)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn dy(n: usize) -> DigitSystem {
        DigitSystem::dyadic(n).unwrap()
    }

    fn val(c: &Cocycle, s: &DigitSystem, r: u64) -> u32 {
        eval_cocycle(c, s, s.point(r).unwrap()).unwrap().value().unwrap()
    }

    // increments of the defining sequences, straight from popcounts
    fn morse_increment(n: u64) -> u32 {
        ((n + 1).count_ones() + 2 - n.count_ones() % 2) % 2
    }

    fn rs_increment(n: u64) -> u32 {
        let r = |v: u64| (v & (v >> 1)).count_ones();
        ((r(n + 1) % 2) + 2 - r(n) % 2) % 2
    }

    #[test]
    fn morse_values_match_digit_sum_increments() {
        let s = dy(8);
        let c = Cocycle::morse();
        assert_eq!((val(&c, &s, 0), val(&c, &s, 1), val(&c, &s, 3)), (1, 0, 1));
        for n in 0..8 {
            assert_eq!(val(&c, &s, n), morse_increment(n), "n = {n}");
        }
    }

    #[test]
    fn rudin_shapiro_values_match_11_count_increments() {
        let s = dy(8);
        let c = Cocycle::rudin_shapiro();
        assert_eq!((val(&c, &s, 0), val(&c, &s, 2), val(&c, &s, 3)), (0, 1, 1));
        for n in 0..8 {
            assert_eq!(val(&c, &s, n), rs_increment(n), "n = {n}");
        }
    }

    #[test]
    fn zero_cocycle_is_zero_everywhere() {
        let s = dy(4);
        let c = Cocycle::zero(3).unwrap();
        for r in 0..16 {
            assert_eq!(val(&c, &s, r), 0);
        }
    }

    #[test]
    fn birkhoff_sum_examples() {
        let s = dy(8);
        let x = s.point(0).unwrap();
        let sum = |c: &Cocycle, k| cocycle_sum(c, &s, x, k).unwrap();
        assert_eq!(sum(&Cocycle::morse(), 4), CocycleValue::Value(1));
        assert_eq!(sum(&Cocycle::rudin_shapiro(), 4), CocycleValue::Value(0));
        assert_eq!(sum(&Cocycle::morse(), 0), CocycleValue::Value(0));
        assert_eq!(sum(&Cocycle::rudin_shapiro(), 0), CocycleValue::Value(0));
        assert!(cocycle_sum(&Cocycle::morse(), &s, x, -2).is_err());
    }

    #[test]
    fn undetermined_at_the_boundary() {
        let s = dy(5);
        let all_max = s.point(31).unwrap();
        assert_eq!(
            eval_cocycle(&Cocycle::morse(), &s, all_max).unwrap(),
            CocycleValue::Undetermined
        );
        // 01111: carry block of 4, terminator at position 5, x_6 unknown
        let p = s.point(15).unwrap();
        assert_eq!(eval_cocycle(&Cocycle::morse(), &s, p).unwrap(), CocycleValue::Value(1));
        assert_eq!(
            eval_cocycle(&Cocycle::rudin_shapiro(), &s, p).unwrap(),
            CocycleValue::Undetermined
        );
        assert_eq!(
            cocycle_sum(&Cocycle::rudin_shapiro(), &s, s.point(10).unwrap(), 8).unwrap(),
            CocycleValue::Undetermined
        );
    }

    #[test]
    fn verify_examples() {
        let k = 1 << 12;
        assert_eq!(
            verify_cocycle_against_sequence(&Cocycle::morse(), SequenceOracle::MorseDigitSum, k, None).unwrap(),
            CocycleCheck::Success { checked: k }
        );
        assert_eq!(
            verify_cocycle_against_sequence(&Cocycle::rudin_shapiro(), SequenceOracle::Rs11Count, k, None).unwrap(),
            CocycleCheck::Success { checked: k }
        );
        assert_eq!(
            verify_cocycle_against_sequence(&Cocycle::zero(2).unwrap(), SequenceOracle::MorseDigitSum, 2, None)
                .unwrap(),
            CocycleCheck::Mismatch {
                k: 1,
                expected: 1,
                found: 0
            }
        );
        assert_eq!(
            verify_cocycle_against_sequence(&Cocycle::morse(), SequenceOracle::MorseDigitSum, 64, Some(4)).unwrap(),
            CocycleCheck::Inconclusive { first_undetermined: 16 }
        );
    }

    const MORSE_TABLE: &str = "modulus 2\nlookahead 0\neven - -> 1\nodd - -> 0\n";
    const RS_TABLE: &str = "\
# Rudin-Shapiro as an explicit table
modulus 2
lookahead 1
0 0 -> 0
0 1 -> 1
odd 0 -> 0
odd 1 -> 1
even 0 -> 1
even 1 -> 0
";

    #[test]
    fn tables_reproduce_closed_forms() {
        let s = dy(10);
        let pairs = [
            (
                Cocycle::table(CocycleTable::parse(MORSE_TABLE).unwrap()),
                Cocycle::morse(),
            ),
            (
                Cocycle::table(CocycleTable::parse(RS_TABLE).unwrap()),
                Cocycle::rudin_shapiro(),
            ),
        ];
        for (table, closed) in &pairs {
            assert_eq!(table.lookahead(), closed.lookahead());
            for r in 0..s.modulus() {
                let p = s.point(r).unwrap();
                assert_eq!(
                    eval_cocycle(table, &s, p).unwrap(),
                    eval_cocycle(closed, &s, p).unwrap()
                );
            }
        }
    }

    #[test]
    fn table_errors() {
        assert!(matches!(
            CocycleTable::parse("modulus 2\n0 - -> 5\n"),
            Err(Error::CocycleTable { .. })
        ));
        assert!(matches!(
            CocycleTable::parse("modulus 2\n0 - => 1\n"),
            Err(Error::CocycleTable { line: 2, .. })
        ));
        assert!(CocycleTable::parse("0 - -> 1\n").is_err());
        let partial = Cocycle::table(CocycleTable::parse("modulus 2\n0 - -> 1\n").unwrap());
        let s = dy(4);
        assert!(eval_cocycle(&partial, &s, s.point(0).unwrap()).is_ok());
        assert!(matches!(
            eval_cocycle(&partial, &s, s.point(1).unwrap()),
            Err(Error::Cocycle(_))
        ));
    }

    #[test]
    fn tags() {
        assert_eq!(Cocycle::from_tag("RUDIN_SHAPIRO", 2).unwrap(), Cocycle::rudin_shapiro());
        assert!(Cocycle::from_tag("MORSE", 3).is_err());
        assert!(Cocycle::from_tag("FOO", 2).is_err());
        assert_eq!(Cocycle::from_tag("zero", 5).unwrap().modulus(), 5);
    }

    #[test]
    fn morse_single_step_mean() {
        for n in [6usize, 9, 12] {
            let s = dy(n);
            let c = Cocycle::morse();
            let mut total = 0i64;
            let mut det = 0i64;
            for r in 0..s.modulus() {
                if let CocycleValue::Value(v) = eval_cocycle(&c, &s, s.point(r).unwrap()).unwrap() {
                    total += if v == 0 { 1 } else { -1 };
                    det += 1;
                }
            }
            let mean = ratio(total, det);
            let err = (mean - ratio(-1, 3)).abs();
            assert!(err <= ratio(2, 1u64 << n), "depth {n}");
        }
    }

    #[test]
    fn determinedness_bound() {
        let n = 9;
        let s = dy(n);
        for c in [Cocycle::morse(), Cocycle::rudin_shapiro()] {
            for k in [1i64, 3, 10, 33] {
                let und = (0..s.modulus())
                    .filter(|&r| cocycle_sum(&c, &s, s.point(r).unwrap(), k).unwrap() == CocycleValue::Undetermined)
                    .count() as u64;
                let bound = ratio(k, 1u64 << (n - c.lookahead()));
                assert!(ratio(und, s.modulus()) <= bound);
            }
        }
    }

    #[test]
    fn potentials_agree_with_stepwise_sums() {
        let s = dy(8);
        for c in [Cocycle::morse(), Cocycle::rudin_shapiro(), Cocycle::zero(2).unwrap()] {
            let ext = GroupExtension::new(s.clone(), c.clone()).unwrap();
            let pot = ext.potentials().unwrap();
            for k in [0u64, 1, 5, 17] {
                let mut fast = Vec::new();
                pot.for_each_sum(3..s.modulus(), k, |_, v| fast.push(v));
                for r in 0..s.modulus() {
                    let slow = cocycle_sum(&c, &s, s.point(r).unwrap(), k as i64).unwrap().value();
                    assert_eq!(pot.sum(r, k), slow, "{c} r={r} k={k}");
                    if r >= 3 {
                        assert_eq!(fast[r as usize - 3], slow);
                    }
                }
            }
        }
    }

    #[test]
    fn potentials_respect_resource_bound() {
        let ext = GroupExtension::new(dy(12), Cocycle::morse())
            .unwrap()
            .with_max_points(1000);
        assert!(matches!(ext.potentials(), Err(Error::Resource(_))));
    }

    proptest! {
        #[test]
        fn cocycle_identity(r in 0u64..1024, k in 0i64..40, l in 0i64..40, which in 0usize..3) {
            let s = dy(10);
            let c = [Cocycle::morse(), Cocycle::rudin_shapiro(), Cocycle::table(CocycleTable::parse(RS_TABLE).unwrap())][which].clone();
            let x = s.point(r).unwrap();
            let kl = cocycle_sum(&c, &s, x, k + l).unwrap();
            let a = cocycle_sum(&c, &s, x, k).unwrap();
            let b = cocycle_sum(&c, &s, s.odometer_add(x, k).unwrap(), l).unwrap();
            if let (Some(kl), Some(a), Some(b)) = (kl.value(), a.value(), b.value()) {
                prop_assert_eq!(kl, (a + b) % 2);
            }
        }
    }
}
