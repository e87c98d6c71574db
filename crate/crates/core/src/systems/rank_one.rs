//! Rank-one maps by cutting and stacking.
//!
//! Stage `n` is a Rokhlin tower of `h_n` levels of common width `w_n`; the
//! map sends each level to the one above it and is undefined on the top
//! level until a later stage. Stage `n + 1` cuts the tower into `r_n`
//! columns, puts `s_{n,c}` spacer levels on top of column `c`, and stacks
//! the columns left to right.
//!
//! Schedules are finite lists of stage rules whose last rule repeats
//! forever, which makes the total mass of the limit space an exact rational.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, ratio, Interval, Rational};

/// Default cap on tower heights; every stage construction checks it.
pub const DEFAULT_MAX_HEIGHT: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRule {
    /// Spacer counts per column; the number of columns is the cut count.
    pub spacers: Vec<u64>,
}

impl StageRule {
    pub fn cuts(&self) -> u64 {
        self.spacers.len() as u64
    }

    pub fn spacer_total(&self) -> u64 {
        self.spacers.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneSchedule {
    initial_height: u64,
    rules: Vec<StageRule>,
}

impl RankOneSchedule {
    pub fn new(initial_height: u64, rules: Vec<StageRule>) -> Result<Self> {
        if initial_height == 0 {
            return Err(Error::InvalidSchedule("initial height must be at least 1".into()));
        }
        if rules.is_empty() {
            return Err(Error::InvalidSchedule("schedule has no stage rules".into()));
        }
        for (i, rule) in rules.iter().enumerate() {
            if rule.cuts() < 2 {
                return Err(Error::InvalidSchedule(format!(
                    "stage rule {} cuts into {} columns, need at least 2",
                    i + 1,
                    rule.cuts()
                )));
            }
        }
        Ok(RankOneSchedule { initial_height, rules })
    }

    /// Constant rule: `cuts` columns with the given spacers, forever.
    pub fn constant(initial_height: u64, spacers: Vec<u64>) -> Result<Self> {
        Self::new(initial_height, vec![StageRule { spacers }])
    }

    /// Chacón's map: three columns, one spacer over the middle one.
    pub fn chacon() -> Self {
        Self::constant(1, vec![0, 1, 0]).expect("static schedule")
    }

    /// Two columns and no spacers: the dyadic odometer as a rank-one map.
    pub fn dyadic() -> Self {
        Self::constant(1, vec![0, 0]).expect("static schedule")
    }

    pub fn initial_height(&self) -> u64 {
        self.initial_height
    }

    pub fn rules(&self) -> &[StageRule] {
        &self.rules
    }

    /// Rule turning stage `n` into stage `n + 1`.
    pub fn rule(&self, n: usize) -> &StageRule {
        let idx = (n.max(1) - 1).min(self.rules.len() - 1);
        &self.rules[idx]
    }

    /// `h_n`, checked against `max_height`.
    pub fn height(&self, n: usize, max_height: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::StageZero { requested: n });
        }
        let mut h = self.initial_height;
        check_height(h, 1, max_height)?;
        for stage in 1..n {
            let rule = self.rule(stage);
            h = h
                .checked_mul(rule.cuts())
                .and_then(|v| v.checked_add(rule.spacer_total()))
                .ok_or_else(|| Error::Resource(format!("height overflows at stage {}", stage + 1)))?;
            check_height(h, stage + 1, max_height)?;
        }
        Ok(h)
    }

    /// `w_n` with `w_1 = 1`.
    pub fn level_width(&self, n: usize) -> Rational {
        let mut w = Rational::one();
        for stage in 1..n {
            w /= int(self.rule(stage).cuts());
        }
        w
    }

    /// Unnormalized mass of the stage-`n` tower, `h_n * w_n`.
    pub fn stage_mass(&self, n: usize, max_height: u64) -> Result<Rational> {
        Ok(int(self.height(n, max_height)?) * self.level_width(n))
    }

    /// Mass of the limit space: the last stage rule repeats, so later spacer
    /// mass is a geometric series.
    pub fn limit_mass(&self) -> Rational {
        let r = self.rules.len();
        let mut mass = int(self.initial_height);
        let mut w = Rational::one();
        for stage in 1..r {
            let rule = self.rule(stage);
            w /= int(rule.cuts());
            mass += int(rule.spacer_total()) * &w;
        }
        let last = self.rule(r);
        mass + int(last.spacer_total()) * w / int(last.cuts() - 1)
    }

    /// No rule from stage `m` on adds spacers, so the top of the stage-`m`
    /// tower maps onto its bottom up to a null set.
    pub fn spacer_free_from(&self, m: usize) -> bool {
        self.rules[(m.max(1) - 1).min(self.rules.len() - 1)..]
            .iter()
            .all(|r| r.spacer_total() == 0)
    }

    /// Offsets of the stage-`n` tower's copies inside stage `m >= n`.
    pub fn offsets(&self, n: usize, m: usize, max_height: u64) -> Result<Vec<u64>> {
        if n == 0 {
            return Err(Error::StageZero { requested: n });
        }
        if m < n {
            return Err(Error::InvalidArgument(format!("stage {m} does not contain stage {n}")));
        }
        self.height(m, max_height)?;
        let mut offsets = vec![0u64];
        let mut h = self.height(n, max_height)?;
        for stage in n..m {
            let rule = self.rule(stage);
            let mut next = Vec::with_capacity(offsets.len() * rule.spacers.len());
            let mut base = 0u64;
            for &s in &rule.spacers {
                next.extend(offsets.iter().map(|&o| base + o));
                base += h + s;
            }
            h = base;
            offsets = next;
        }
        Ok(offsets)
    }
}

fn check_height(h: u64, stage: usize, max_height: u64) -> Result<()> {
    if h > max_height {
        Err(Error::Resource(format!(
            "stage {stage} height {h} exceeds bound {max_height}"
        )))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStage {
    pub stage: usize,
    pub height: u64,
    pub level_width: Rational,
    /// `embeddings[m - 1]` lists where stage `m` sits inside this stage.
    pub embeddings: Vec<Vec<u64>>,
    pub total_mass: Rational,
}

impl TowerStage {
    pub fn embedding(&self, m: usize) -> Option<&[u64]> {
        self.embeddings.get(m.checked_sub(1)?).map(Vec::as_slice)
    }
}

pub fn build_tower(sched: &RankOneSchedule, n: usize) -> Result<TowerStage> {
    build_tower_bounded(sched, n, DEFAULT_MAX_HEIGHT)
}

pub fn build_tower_bounded(sched: &RankOneSchedule, n: usize, max_height: u64) -> Result<TowerStage> {
    let height = sched.height(n, max_height)?;
    let embeddings = (1..n)
        .map(|m| sched.offsets(m, n, max_height))
        .collect::<Result<Vec<_>>>()?;
    let level_width = sched.level_width(n);
    Ok(TowerStage {
        stage: n,
        height,
        total_mass: int(height) * &level_width,
        level_width,
        embeddings,
    })
}

fn check_levels(sched: &RankOneSchedule, n: usize, levels: &[u64], max_height: u64) -> Result<u64> {
    let h_n = sched.height(n, max_height)?;
    if let Some(&bad) = levels.iter().find(|&&l| l >= h_n) {
        return Err(Error::LevelOutOfRange {
            stage: n,
            level: bad,
            height: h_n,
        });
    }
    Ok(h_n)
}

/// Interval for `mu(T^k A ∩ A)` where `A` is a union of stage-`n` levels,
/// resolved at stage `m`.
///
/// Stage-`m` levels within `k` of the top have no determined image; their
/// share of `A` is the interval width. Masses are normalized by the mass of
/// the limit space.
pub fn tower_correlation(sched: &RankOneSchedule, n: usize, levels: &[u64], k: u64, m: usize) -> Result<Interval> {
    tower_correlation_bounded(sched, n, levels, k, m, DEFAULT_MAX_HEIGHT)
}

pub fn tower_correlation_bounded(
    sched: &RankOneSchedule,
    n: usize,
    levels: &[u64],
    k: u64,
    m: usize,
    max_height: u64,
) -> Result<Interval> {
    let h_n = check_levels(sched, n, levels, max_height)?;
    let h_m = sched.height(m, max_height)?;
    let wraps = sched.spacer_free_from(m);
    if k >= h_m && !wraps {
        return Err(Error::LagTooLarge { lag: k, bound: h_m });
    }
    let offsets = sched.offsets(n, m, max_height)?;
    let mut in_a = vec![false; h_n as usize];
    for &l in levels {
        in_a[l as usize] = true;
    }
    let mut member = vec![false; h_m as usize];
    for &o in &offsets {
        for (l, _) in in_a.iter().enumerate().filter(|(_, &b)| b) {
            member[(o + l as u64) as usize] = true;
        }
    }
    let mut hits = 0u64;
    let mut undetermined = 0u64;
    for i in 0..h_m {
        if !member[i as usize] {
            continue;
        }
        let j = if wraps { (i + k) % h_m } else { i + k };
        if j >= h_m {
            undetermined += 1;
        } else if member[j as usize] {
            hits += 1;
        }
    }
    let unit = sched.level_width(m) / sched.limit_mass();
    Ok(Interval::new(int(hits) * &unit, int(hits + undetermined) * unit))
}

/// Brute-force counterpart of [`tower_correlation`]: physically stacks
/// labelled columns up to stage `m` and counts label coincidences.
pub fn oracle_tower_correlation(
    sched: &RankOneSchedule,
    n: usize,
    levels: &[u64],
    k: u64,
    m: usize,
) -> Result<Interval> {
    let h_n = check_levels(sched, n, levels, DEFAULT_MAX_HEIGHT)?;
    if m < n {
        return Err(Error::InvalidArgument(format!("stage {m} precedes stage {n}")));
    }
    // label = Some(stage-n level) or None for later spacers
    let mut column: Vec<Option<u64>> = (0..h_n).map(Some).collect();
    let mut width = ratio(1, 1);
    let mut w1_units = Rational::one();
    for stage in 1..n {
        w1_units /= int(sched.rule(stage).cuts());
    }
    for stage in n..m {
        let rule = sched.rule(stage);
        let mut stacked = Vec::new();
        for &s in &rule.spacers {
            stacked.extend(column.iter().copied());
            stacked.extend(std::iter::repeat_n(None, s as usize));
        }
        if stacked.len() as u64 > DEFAULT_MAX_HEIGHT {
            return Err(Error::Resource(format!("stage {} exceeds height bound", stage + 1)));
        }
        column = stacked;
        width /= int(rule.cuts());
    }
    let h_m = column.len() as u64;
    let wraps = (m..=m.max(sched.rules().len())).all(|stage| sched.rule(stage).spacer_total() == 0);
    if k >= h_m && !wraps {
        return Err(Error::LagTooLarge { lag: k, bound: h_m });
    }
    let in_a = |label: Option<u64>| label.is_some_and(|l| levels.contains(&l));
    let mut lo = Rational::zero();
    let mut slack = Rational::zero();
    let unit = &width * &w1_units / sched.limit_mass();
    for (i, &label) in column.iter().enumerate() {
        if !in_a(label) {
            continue;
        }
        let j = if wraps {
            (i + k as usize) % column.len()
        } else {
            i + k as usize
        };
        match column.get(j) {
            Some(&target) if in_a(target) => lo += &unit,
            Some(_) => {}
            None => slack += &unit,
        }
    }
    let hi = &lo + slack;
    Ok(Interval::new(lo, hi))
}

/// Rank-one map resolved at a fixed expansion stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerModel {
    pub schedule: RankOneSchedule,
    pub expand_to: usize,
    pub max_height: u64,
}

impl TowerModel {
    pub fn new(schedule: RankOneSchedule, expand_to: usize) -> Result<Self> {
        schedule.height(expand_to, DEFAULT_MAX_HEIGHT)?;
        Ok(TowerModel {
            schedule,
            expand_to,
            max_height: DEFAULT_MAX_HEIGHT,
        })
    }

    pub fn expanded_height(&self) -> u64 {
        self.schedule
            .height(self.expand_to, self.max_height)
            .expect("checked at construction")
    }

    /// Level-normalized matrix `mu(C_a ∩ T^k C_b) / mu(C_a)` over the levels
    /// of stage `n`, as row-major intervals.
    pub fn level_matrix(&self, n: usize, k: u64) -> Result<Vec<Interval>> {
        let m = self.expand_to;
        if n > m {
            return Err(Error::DepthExceeded {
                requested: n,
                available: m,
            });
        }
        let h_n = self.schedule.height(n, self.max_height)?;
        let h_m = self.expanded_height();
        let wraps = self.schedule.spacer_free_from(m);
        if k >= h_m && !wraps {
            return Err(Error::LagTooLarge { lag: k, bound: h_m });
        }
        let offsets = self.schedule.offsets(n, m, self.max_height)?;
        let mut label = vec![u64::MAX; h_m as usize];
        for &o in &offsets {
            for l in 0..h_n {
                label[(o + l) as usize] = l;
            }
        }
        let size = h_n as usize;
        let mut hits = vec![0u64; size * size];
        let mut undetermined = vec![0u64; size];
        for i in 0..h_m as usize {
            let b = label[i];
            if b == u64::MAX {
                continue;
            }
            let j = if wraps {
                (i + k as usize) % h_m as usize
            } else {
                i + k as usize
            };
            if j >= h_m as usize {
                undetermined[b as usize] += 1;
            } else if label[j] != u64::MAX {
                hits[label[j] as usize * size + b as usize] += 1;
            }
        }
        let copies = offsets.len() as u64;
        let mut out = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                let h = hits[a * size + b];
                out.push(Interval::new(ratio(h, copies), ratio(h + undetermined[b], copies)));
            }
        }
        Ok(out)
    }
}
