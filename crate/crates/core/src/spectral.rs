//! Spectral diagnostics from autocorrelation sequences.
//!
//! The correlations `rho(k) = <T̂^k f, f>` are exact rational intervals. The
//! Fejér sums built from them are evaluated in `f64` at interval midpoints,
//! with the interval radii carried separately as slack and a floating-point
//! rounding allowance kept apart from both.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{decimal, fraction, int, ratio, to_f64, Interval, Rational};
use crate::koopman::{inner_product_from_profile, lag_profile, CylinderFunction, System};

pub const DEFAULT_GRID: usize = 1024;
pub const DEFAULT_MAX_ORDER: usize = 256;

/// `rho(0), ..., rho(K)` for one function.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationSeries {
    pub label: String,
    pub values: Vec<Interval>,
}

impl CorrelationSeries {
    pub fn new(label: impl Into<String>, values: Vec<Interval>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("correlation series needs rho(0)".into()));
        }
        Ok(CorrelationSeries {
            label: label.into(),
            values,
        })
    }

    /// Point series from exact values.
    pub fn exact(label: impl Into<String>, values: impl IntoIterator<Item = Rational>) -> Result<Self> {
        Self::new(label, values.into_iter().map(Interval::point).collect())
    }

    /// Largest lag `K`.
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn rho(&self, k: usize) -> &Interval {
        &self.values[k]
    }

    /// `rho(0)` is a point and every `|rho(k)| <= rho(0)` is admissible.
    pub fn is_consistent(&self) -> bool {
        let r0 = &self.values[0];
        r0.is_point() && self.values.iter().all(|v| v.mignitude() <= *r0.lo())
    }

    /// `lag,lo,hi,lo_decimal,hi_decimal`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,lo,hi,lo_decimal,hi_decimal\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(
                out,
                "{k},{},{},{},{}",
                fraction(v.lo()),
                fraction(v.hi()),
                decimal(v.lo()),
                decimal(v.hi())
            );
        }
        out
    }
}

/// `rho(k) = <T̂^k f, f>` for `k = 0..=k_max`, optionally after subtracting
/// `∫f`.
pub fn autocorrelation_series(
    sys: &System,
    f: &CylinderFunction,
    k_max: usize,
    center: bool,
) -> Result<CorrelationSeries> {
    if f.modulus() != sys.fiber_modulus() {
        return Err(Error::FiberMismatch {
            left: f.modulus(),
            right: sys.fiber_modulus(),
        });
    }
    sys.digits().check_depth(f.depth())?;
    let f = if center { f.centered() } else { f.clone() };
    let values = (0..=k_max as u64)
        .into_par_iter()
        .map(|k| {
            let profile = lag_profile(sys, f.depth(), k)?;
            Ok(inner_product_from_profile(&profile, &f, &f))
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationSeries::new(
        format!("{}{}", sys.label(), if center { ", centered" } else { "" }),
        values,
    )
}

/// Fejér density samples on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub order: usize,
    pub thetas: Vec<f64>,
    pub density: Vec<f64>,
    /// `sum_{|k|<N} (1 - |k|/N) radius(rho(k))`, bounding how far any
    /// admissible density sits from the midpoint one.
    pub slack: f64,
    /// Floating-point allowance for the midpoint evaluation.
    pub rounding: f64,
    pub rho0: f64,
    /// `|mean of samples - rho(0)|`.
    pub normalization_error: f64,
}

impl SpectralEstimate {
    /// No sample is certainly negative.
    pub fn is_positive_within_slack(&self) -> bool {
        self.density.iter().all(|&v| v >= -(self.slack + self.rounding))
    }

    /// `theta,value,slack`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,value,slack\n");
        for (t, v) in self.thetas.iter().zip(&self.density) {
            let _ = writeln!(out, "{t:.12},{v:.12},{:.12}", self.slack);
        }
        out
    }
}

fn fejer_weight(k: usize, order: usize) -> f64 {
    1.0 - k as f64 / order as f64
}

/// `sigma_N(theta) = sum_{|k|<N} (1 - |k|/N) rho(k) e^{ik theta}` with
/// `rho(-k) = rho(k)`. Defaults: order `min(K, 256)`, 1024 angles.
pub fn fejer_density(
    series: &CorrelationSeries,
    order: Option<usize>,
    grid: Option<usize>,
) -> Result<SpectralEstimate> {
    let k_max = series.max_lag();
    let order = order.unwrap_or(k_max.clamp(1, DEFAULT_MAX_ORDER));
    if order == 0 || order > k_max.max(1) {
        return Err(Error::InvalidArgument(format!(
            "Fejér order {order} outside 1..={}",
            k_max.max(1)
        )));
    }
    let grid = grid.unwrap_or(DEFAULT_GRID);
    if grid == 0 {
        return Err(Error::InvalidArgument("empty angle grid".into()));
    }
    let mids: Vec<f64> = series.values[..order].iter().map(|v| to_f64(&v.midpoint())).collect();
    let mut slack_exact = series.values[0].radius();
    for k in 1..order {
        slack_exact += series.values[k].radius() * ratio((order - k) as u64, order as u64) * int(2);
    }
    let thetas: Vec<f64> = (0..grid).map(|j| 2.0 * PI * j as f64 / grid as f64).collect();
    let density: Vec<f64> = thetas
        .par_iter()
        .map(|&t| {
            mids[0]
                + 2.0
                    * (1..order)
                        .map(|k| fejer_weight(k, order) * mids[k] * (k as f64 * t).cos())
                        .sum::<f64>()
        })
        .collect();
    let magnitude: f64 = mids[0].abs() + 2.0 * mids[1..].iter().map(|m| m.abs()).sum::<f64>();
    let rounding = 8.0 * order as f64 * f64::EPSILON * magnitude.max(f64::MIN_POSITIVE);
    let mean = density.iter().sum::<f64>() / grid as f64;
    Ok(SpectralEstimate {
        order,
        thetas,
        slack: to_f64(&slack_exact),
        rounding,
        rho0: mids[0],
        normalization_error: (mean - mids[0]).abs(),
        density,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    /// `max_j |sigma_N(theta_j) - rho(0)|` at midpoints.
    pub deviation: f64,
    pub slack: f64,
    pub rounding: f64,
    /// Part of the deviation no admissible series explains.
    pub excess: f64,
}

impl FlatnessReport {
    pub fn consistent_with_flat(&self) -> bool {
        self.excess <= 0.0
    }
}

pub fn flatness_test(est: &SpectralEstimate) -> FlatnessReport {
    let deviation = est.density.iter().map(|v| (v - est.rho0).abs()).fold(0.0, f64::max);
    FlatnessReport {
        deviation,
        slack: est.slack,
        rounding: est.rounding,
        excess: (deviation - est.slack - est.rounding).max(0.0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecayReport {
    pub tail_start: usize,
    /// `sup |rho(k)|` over admissible values, `k >= tail_start`.
    pub sup: Rational,
    /// Certain part: `sup` of the smallest admissible magnitudes.
    pub sup_certain: Rational,
    /// Largest interval width over the tail.
    pub slack: Rational,
}

impl DecayReport {
    pub fn consistent_with_zero(&self) -> bool {
        self.sup_certain.is_zero() && self.sup <= self.slack
    }
}

pub fn decay_test(series: &CorrelationSeries, tail_start: usize) -> Result<DecayReport> {
    if tail_start > series.max_lag() {
        return Err(Error::InvalidArgument(format!(
            "tail start {tail_start} beyond lag {}",
            series.max_lag()
        )));
    }
    let tail = &series.values[tail_start..];
    let max = |f: &dyn Fn(&Interval) -> Rational| tail.iter().map(f).max().unwrap_or_else(Rational::zero);
    Ok(DecayReport {
        tail_start,
        sup: max(&|v| v.magnitude()),
        sup_certain: max(&|v| v.mignitude()),
        slack: max(&|v| v.width()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WienerReport {
    pub lags: usize,
    /// `(1/K) sum_{k=1}^{K} |rho(k)|^2` over admissible values.
    pub value: Interval,
}

impl WienerReport {
    pub fn slack(&self) -> Rational {
        self.value.width()
    }

    /// Midpoint within the slack of zero.
    pub fn consistent_with_no_atoms(&self) -> bool {
        self.value.midpoint() <= self.slack()
    }
}

/// Cesàro mean of `|rho(k)|^2` over lags `1..=K`.
pub fn wiener_average(series: &CorrelationSeries, k: usize) -> Result<WienerReport> {
    if k == 0 || k > series.max_lag() {
        return Err(Error::InvalidArgument(format!(
            "Wiener average over {k} lags needs 1 <= K <= {}",
            series.max_lag()
        )));
    }
    let total: Interval = series.values[1..=k].iter().map(Interval::square).sum();
    Ok(WienerReport {
        lags: k,
        value: total.scale(&ratio(1, k as u64)),
    })
}

/// Checks `deviation <= 2 sum_{1<=k<s} w_k |rho(k)| + 2 sup_{k>=s}|rho(k)| sum_{s<=k<N} w_k`
/// with `w_k = 1 - k/N`, the arithmetic behind "decay implies flatness".
pub fn consistency_bound(
    series: &CorrelationSeries,
    est: &SpectralEstimate,
    flat: &FlatnessReport,
    tail_start: usize,
) -> Result<bool> {
    let decay = decay_test(series, tail_start.min(series.max_lag()))?;
    let n = est.order;
    let mut bound = 0.0;
    for k in 1..n.min(tail_start) {
        bound += 2.0 * fejer_weight(k, n) * to_f64(&series.values[k].magnitude());
    }
    let tail_weight: f64 = (tail_start.max(1)..n).map(|k| fejer_weight(k, n)).sum();
    bound += 2.0 * to_f64(&decay.sup) * tail_weight;
    Ok(flat.deviation <= bound + est.rounding + bound * 1e-12)
}
