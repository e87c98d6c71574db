//! Rigidity coefficients along candidate sequences.
//!
//! Two routes to the same number. The operator route takes the weak-limit
//! joining matrix at each depth and reads off its smallest diagonal entry,
//! the largest `beta` with `M - beta I >= 0`. The set-based route takes the
//! worst return ratio `mu(T^k A ∩ A) / mu(A)` over basic cylinders. On a
//! common depth they agree exactly.

use std::fmt;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cocycles::GroupExtension;
use crate::error::{Error, Result};
use crate::exact::{decimal, fraction, int, ratio, Interval, Rational};
use crate::koopman::{
    self, check_sequence, correlation, joining_matrix, lag_profile, tail_of, FiberedCylinder, JoiningMatrix, System,
};
use crate::systems::{tower_correlation_bounded, CylinderSet, DigitSystem, RankOneSchedule, TowerModel};

/// Anything whose Koopman powers restrict to finite cylinder algebras.
pub trait Dynamics: Sync {
    fn label(&self) -> String;
    /// Deepest cylinder algebra the model resolves.
    fn max_depth(&self) -> usize;
    fn lag_usable(&self, k: u64) -> bool;
    fn matrix(&self, depth: usize, k: u64) -> Result<JoiningMatrix>;
    /// `mu(T^k C ∩ C) / mu(C)` for each basic cell `C` at `depth`, computed
    /// from set correlations rather than the matrix.
    fn cell_returns(&self, depth: usize, k: u64) -> Result<Vec<Interval>>;
}

impl Dynamics for System {
    fn label(&self) -> String {
        System::label(self)
    }

    fn max_depth(&self) -> usize {
        self.depth()
    }

    fn lag_usable(&self, k: u64) -> bool {
        System::lag_usable(self, k)
    }

    fn matrix(&self, depth: usize, k: u64) -> Result<JoiningMatrix> {
        joining_matrix(self, depth, k)
    }

    fn cell_returns(&self, depth: usize, k: u64) -> Result<Vec<Interval>> {
        let digits = self.digits();
        digits.check_depth(depth)?;
        let m = self.fiber_modulus();
        let cells = digits.block_size(depth);
        let cell = |a: u64, y: u32| -> Result<FiberedCylinder> {
            FiberedCylinder::on(self, CylinderSet::new(digits, depth, [a])?, [y])
        };
        let scale = int(cells) * int(m);
        match self {
            System::Adic(_) => (0..cells)
                .into_par_iter()
                .map(|a| {
                    let c = cell(a, 0)?;
                    Ok(correlation(self, &c, &c, k as i64)?.scale(&scale))
                })
                .collect(),
            System::Extension(_) => {
                let profile = lag_profile(self, depth, k)?;
                let mut out = Vec::with_capacity((cells * m as u64) as usize);
                for a in 0..cells {
                    for y in 0..m {
                        let c = cell(a, y)?;
                        out.push(koopman::correlation_from_profile(&profile, &[a], &c, &c).scale(&scale));
                    }
                }
                Ok(out)
            }
        }
    }
}

impl Dynamics for TowerModel {
    fn label(&self) -> String {
        format!(
            "rank-one(h1={}, {} rules; resolved at stage {})",
            self.schedule.initial_height(),
            self.schedule.rules().len(),
            self.expand_to
        )
    }

    fn max_depth(&self) -> usize {
        self.expand_to
    }

    fn lag_usable(&self, k: u64) -> bool {
        k < self.expanded_height() || self.schedule.spacer_free_from(self.expand_to)
    }

    fn matrix(&self, depth: usize, k: u64) -> Result<JoiningMatrix> {
        let dense = self.level_matrix(depth, k)?;
        let h = (dense.len() as f64).sqrt().round() as usize;
        let rows = dense
            .chunks(h)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, e)| !e.hi().is_zero())
                    .map(|(j, e)| (j, e.clone()))
                    .collect()
            })
            .collect();
        JoiningMatrix::from_rows(depth, k, 1, rows)
    }

    fn cell_returns(&self, depth: usize, k: u64) -> Result<Vec<Interval>> {
        let h = self.schedule.height(depth, self.max_height)?;
        let level_mass = self.schedule.level_width(depth) / self.schedule.limit_mass();
        let inv = Rational::one() / level_mass;
        (0..h)
            .into_par_iter()
            .map(|l| {
                Ok(
                    tower_correlation_bounded(&self.schedule, depth, &[l], k, self.expand_to, self.max_height)?
                        .scale(&inv),
                )
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    TowerHeights,
    ShiftedTowerHeights(u64),
    Explicit,
}

/// Strictly increasing positive lags `k_1 < k_2 < ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSequence {
    label: String,
    kind: SequenceKind,
    values: Vec<u64>,
}

impl CandidateSequence {
    pub fn explicit(label: impl Into<String>, values: impl IntoIterator<Item = u64>) -> Result<Self> {
        let values: Vec<u64> = values.into_iter().collect();
        check_sequence(&values)?;
        if values.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(CandidateSequence {
            label: label.into(),
            kind: SequenceKind::Explicit,
            values,
        })
    }

    /// Block sizes `B_1 < ... < B_N`.
    pub fn adic_heights(sys: &DigitSystem) -> Self {
        CandidateSequence {
            label: "B_n".into(),
            kind: SequenceKind::TowerHeights,
            values: (1..=sys.depth()).map(|n| sys.block_size(n)).collect(),
        }
    }

    /// Stage heights `h_1 < ... < h_count`.
    pub fn rank_one_heights(sched: &RankOneSchedule, count: usize, max_height: u64) -> Result<Self> {
        let values = (1..=count)
            .map(|n| sched.height(n, max_height))
            .collect::<Result<Vec<_>>>()?;
        let mut values = values;
        values.dedup();
        check_sequence(&values)?;
        Ok(CandidateSequence {
            label: "h_n".into(),
            kind: SequenceKind::TowerHeights,
            values,
        })
    }

    pub fn shifted(&self, by: u64) -> Self {
        CandidateSequence {
            label: format!("{}+{by}", self.label),
            kind: match self.kind {
                SequenceKind::TowerHeights => SequenceKind::ShiftedTowerHeights(by),
                SequenceKind::ShiftedTowerHeights(s) => SequenceKind::ShiftedTowerHeights(s + by),
                SequenceKind::Explicit => SequenceKind::Explicit,
            },
            values: self.values.iter().map(|k| k + by).collect(),
        }
    }

    /// Keeps the terms whose index lies in `range` (1-based).
    pub fn terms(&self, range: RangeInclusive<usize>) -> Result<Self> {
        let values: Vec<u64> = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| range.contains(&(i + 1)))
            .map(|(_, &k)| k)
            .collect();
        if values.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(CandidateSequence {
            label: format!("{}[{}..={}]", self.label, range.start(), range.end()),
            kind: self.kind,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// `min_a M[a][a]` as an interval; the largest `beta` with `M - beta I`
/// entrywise nonnegative for every admissible matrix is its lower end.
pub fn alpha_from_matrix(m: &JoiningMatrix) -> Interval {
    (0..m.size())
        .map(|i| m.diagonal(i))
        .reduce(|a, b| a.min(&b))
        .unwrap_or_else(Interval::zero)
}

/// Whether `M - beta I >= 0` entrywise for every matrix the intervals admit.
pub fn admits_decomposition(m: &JoiningMatrix, beta: &Rational) -> bool {
    (0..m.size()).all(|i| m.diagonal(i).lo() >= beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    SetBased,
    Operator,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::SetBased => "SET_BASED",
            Method::Operator => "OPERATOR",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DepthEstimate {
    pub depth: usize,
    /// `beta` at each tail lag.
    pub per_lag: Vec<(u64, Interval)>,
    /// Hull of the tail values.
    pub beta: Interval,
    pub movement: Rational,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityEstimate {
    pub method: Method,
    pub system: String,
    pub sequence: String,
    pub tail_lags: Vec<u64>,
    pub depths: Vec<DepthEstimate>,
    /// `None` when some depth failed to converge.
    pub alpha: Option<Interval>,
    /// Lower ends of `beta_d` never increase with depth.
    pub monotone: bool,
    pub converged: bool,
}

impl RigidityEstimate {
    pub fn status(&self) -> &'static str {
        if self.converged {
            "CONVERGED"
        } else {
            "NON_CONVERGED"
        }
    }

    /// `method,depth,lag,beta_lo,beta_hi,beta_lo_decimal,beta_hi_decimal,movement,converged`
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("method,depth,lag,beta_lo,beta_hi,beta_lo_decimal,beta_hi_decimal,movement,converged\n");
        for d in &self.depths {
            for (k, b) in &d.per_lag {
                let _ = writeln!(
                    out,
                    "{},{},{k},{},{},{},{},{},{}",
                    self.method,
                    d.depth,
                    fraction(b.lo()),
                    fraction(b.hi()),
                    decimal(b.lo()),
                    decimal(b.hi()),
                    fraction(&d.movement),
                    d.converged
                );
            }
        }
        out
    }
}

fn usable_tail<D: Dynamics + ?Sized>(sys: &D, seq: &CandidateSequence, i_max: usize) -> Result<Vec<u64>> {
    let usable: Vec<u64> = seq
        .values
        .iter()
        .take(i_max)
        .copied()
        .filter(|&k| sys.lag_usable(k))
        .collect();
    if usable.len() < 2 {
        return Err(Error::TooFewIterates(usable.len()));
    }
    Ok(tail_of(&usable).to_vec())
}

fn check_depths<D: Dynamics + ?Sized>(sys: &D, depths: &RangeInclusive<usize>) -> Result<()> {
    if depths.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if *depths.end() > sys.max_depth() {
        return Err(Error::DepthExceeded {
            requested: *depths.end(),
            available: sys.max_depth(),
        });
    }
    Ok(())
}

fn assemble(
    method: Method,
    system: String,
    seq: &CandidateSequence,
    tail: Vec<u64>,
    depths: Vec<DepthEstimate>,
) -> RigidityEstimate {
    let monotone = depths.windows(2).all(|w| w[1].beta.lo() <= w[0].beta.lo());
    let converged = depths.iter().all(|d| d.converged);
    let alpha = if converged {
        depths.last().map(|deep| {
            let lo = depths.iter().map(|d| d.beta.lo().clone()).min().expect("nonempty");
            Interval::new(lo, deep.beta.hi().clone())
        })
    } else {
        None
    };
    RigidityEstimate {
        method,
        system,
        sequence: seq.label.clone(),
        tail_lags: tail,
        depths,
        alpha,
        monotone,
        converged,
    }
}

fn hull(values: &[(u64, Interval)]) -> Interval {
    values
        .iter()
        .map(|(_, b)| b.clone())
        .reduce(|a, b| a.hull(&b))
        .unwrap_or_else(Interval::zero)
}

/// Operator route: `beta_d` from the min diagonal of the tail matrices.
pub fn rigidity_along<D: Dynamics + ?Sized>(
    sys: &D,
    seq: &CandidateSequence,
    depths: RangeInclusive<usize>,
    i_max: usize,
    tol: &Rational,
) -> Result<RigidityEstimate> {
    check_depths(sys, &depths)?;
    let tail = usable_tail(sys, seq, i_max)?;
    let per_depth = depths
        .clone()
        .map(|d| {
            let mats = tail.iter().map(|&k| sys.matrix(d, k)).collect::<Result<Vec<_>>>()?;
            let mut movement = Rational::zero();
            for i in 0..mats.len() {
                for j in i + 1..mats.len() {
                    let m = mats[i].midpoint_distance(&mats[j])?;
                    if m > movement {
                        movement = m;
                    }
                }
            }
            let per_lag: Vec<(u64, Interval)> = tail.iter().copied().zip(mats.iter().map(alpha_from_matrix)).collect();
            Ok(DepthEstimate {
                depth: d,
                beta: hull(&per_lag),
                per_lag,
                converged: &movement <= tol,
                movement,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(Method::Operator, sys.label(), seq, tail, per_depth))
}

/// Set route: worst return ratio over basic cylinders at each depth.
pub fn set_based_alpha<D: Dynamics + ?Sized>(
    sys: &D,
    seq: &CandidateSequence,
    depths: RangeInclusive<usize>,
    i_max: usize,
    tol: &Rational,
) -> Result<RigidityEstimate> {
    check_depths(sys, &depths)?;
    let tail = usable_tail(sys, seq, i_max)?;
    let per_depth = depths
        .clone()
        .map(|d| {
            let returns = tail
                .iter()
                .map(|&k| sys.cell_returns(d, k))
                .collect::<Result<Vec<_>>>()?;
            if returns.iter().any(Vec::is_empty) {
                return Err(Error::EmptyFamily);
            }
            let mut movement = Rational::zero();
            for cell in 0..returns[0].len() {
                let mids: Vec<Rational> = returns.iter().map(|r| r[cell].midpoint()).collect();
                let spread = mids.iter().max().expect("nonempty") - mids.iter().min().expect("nonempty");
                if spread > movement {
                    movement = spread;
                }
            }
            let per_lag: Vec<(u64, Interval)> = tail
                .iter()
                .copied()
                .zip(
                    returns
                        .iter()
                        .map(|r| r.iter().cloned().reduce(|a, b| a.min(&b)).expect("nonempty")),
                )
                .collect();
            Ok(DepthEstimate {
                depth: d,
                beta: hull(&per_lag),
                per_lag,
                converged: &movement <= tol,
                movement,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(Method::SetBased, sys.label(), seq, tail, per_depth))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisFail,
    Inconclusive,
    Skipped,
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::HypothesisFail => "HYPOTHESIS_FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Skipped => "SKIPPED",
            Verdict::Info => "INFO",
        })
    }
}

/// `||M_ext(k) - M_base(k) ⊗ Π_m||_∞` along a sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub depth: usize,
    pub lags: Vec<u64>,
    pub residuals: Vec<Interval>,
    pub tol: Rational,
    /// Upper ends strictly decrease from lag to lag.
    pub strictly_decreasing: bool,
    /// No residual is certainly larger than its predecessor.
    pub non_increasing: bool,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn final_residual(&self) -> &Interval {
        self.residuals.last().expect("at least two lags")
    }

    /// `lag,residual_lo,residual_hi,residual_lo_decimal,residual_hi_decimal`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,residual_lo,residual_hi,residual_lo_decimal,residual_hi_decimal\n");
        for (k, r) in self.lags.iter().zip(&self.residuals) {
            let _ = writeln!(
                out,
                "{k},{},{},{},{}",
                fraction(r.lo()),
                fraction(r.hi()),
                decimal(r.lo()),
                decimal(r.hi())
            );
        }
        out
    }
}

/// Residual of the extension's joining matrix against the base matrix with
/// the fiber averaged out. PASS when the residuals never certainly grow and
/// the last one is at most `tol`; HYPOTHESIS_FAIL when the last three settle
/// (midpoints within `tol`) at a level certainly above `tol`.
pub fn theorem_check(
    ext: &GroupExtension,
    seq: &CandidateSequence,
    d: usize,
    i_max: usize,
    tol: &Rational,
) -> Result<TheoremReport> {
    let sys = System::Extension(ext.clone());
    let base = System::Adic(ext.base().clone());
    let lags: Vec<u64> = seq
        .values
        .iter()
        .take(i_max)
        .copied()
        .filter(|&k| sys.lag_usable(k))
        .collect();
    if lags.len() < 2 {
        return Err(Error::TooFewIterates(lags.len()));
    }
    let m = ext.modulus();
    let residuals = lags
        .iter()
        .map(|&k| {
            let target = joining_matrix(&base, d, k)?.kron_uniform(m);
            joining_matrix(&sys, d, k)?.sup_distance(&target)
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = residuals.windows(2).all(|w| w[1].hi() < w[0].hi());
    let non_increasing = residuals.windows(2).all(|w| w[1].lo() <= w[0].hi());
    let last = residuals.last().expect("at least two");
    let tail = &residuals[residuals.len().saturating_sub(3)..];
    let mids: Vec<Rational> = tail.iter().map(Interval::midpoint).collect();
    let settled = mids.iter().max().expect("nonempty") - mids.iter().min().expect("nonempty") <= *tol;
    let verdict = if non_increasing && last.hi() <= tol {
        Verdict::Pass
    } else if settled && last.lo() > tol {
        Verdict::HypothesisFail
    } else {
        Verdict::Inconclusive
    };
    Ok(TheoremReport {
        depth: d,
        lags,
        residuals,
        tol: tol.clone(),
        strictly_decreasing,
        non_increasing,
        verdict,
    })
}

/// PASS iff `|mid(ext) - mid(base)/2| <= tol + (width(base) + width(ext))/2`;
/// SKIPPED when either estimate did not converge.
pub fn halving_check(alpha_base: Option<&Interval>, alpha_ext: Option<&Interval>, tol: &Rational) -> Verdict {
    let (Some(base), Some(ext)) = (alpha_base, alpha_ext) else {
        return Verdict::Skipped;
    };
    let gap = ext.midpoint() - base.midpoint() / int(2);
    let gap = if gap < Rational::zero() { -gap } else { gap };
    let allowance = tol + (base.width() + ext.width()) * ratio(1, 2);
    if gap <= allowance {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}
