//! Executes a validated manifest and assembles the report.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use num_traits::One;
use rayon::prelude::*;
use rigidlab_core::cocycles::{verify_cocycle_against_sequence, Cocycle, CocycleCheck, CocycleRule, SequenceOracle};
use rigidlab_core::exact::{decimal, fraction, int, Interval, Rational};
use rigidlab_core::koopman::oracle::{oracle_correlation, oracle_inner_product};
use rigidlab_core::koopman::{
    correlation, inner_product_lag, joining_matrix, CylinderFunction, FiberedCylinder, System,
};
use rigidlab_core::rigidity::{
    halving_check, rigidity_along, set_based_alpha, theorem_check, CandidateSequence, Dynamics, RigidityEstimate,
    Verdict,
};
use rigidlab_core::spectral::{
    autocorrelation_series, consistency_bound, decay_test, fejer_density, flatness_test, wiener_average,
};
use rigidlab_core::systems::{oracle_tower_correlation, tower_correlation, CylinderSet, TowerModel};
use rigidlab_core::Error as CoreError;

use crate::manifest::{Analysis, ExperimentManifest, FunctionSpec, SetSpec, Target};

/// Brute-force cross-check coverage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// Every analysis point, at full depth.
    Full,
    /// Points with lag at most [`SAMPLE_MAX_LAG`], on the system truncated
    /// to depth [`SAMPLE_MAX_DEPTH`].
    #[default]
    Sample,
    Off,
}

pub const SAMPLE_MAX_LAG: u64 = 16;
pub const SAMPLE_MAX_DEPTH: usize = 10;

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(OracleMode::Full),
            "sample" => Ok(OracleMode::Sample),
            "off" => Ok(OracleMode::Off),
            other => Err(format!("unknown oracle mode `{other}` (full, sample or off)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Info,
    Fail,
    HypothesisFail,
    Inconclusive,
    Skipped,
    /// A resource bound or runtime precondition stopped the analysis.
    Aborted,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::HypothesisFail => Status::HypothesisFail,
            Verdict::Inconclusive => Status::Inconclusive,
            Verdict::Skipped => Status::Skipped,
            Verdict::Info => Status::Info,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Info => "INFO",
            Status::Fail => "FAIL",
            Status::HypothesisFail => "HYPOTHESIS_FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Skipped => "SKIPPED",
            Status::Aborted => "ABORTED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub file: String,
    pub body: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub index: usize,
    pub analysis: String,
    pub status: Status,
    /// `name = value` lines with exact and decimal renderings.
    pub headlines: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub manifest_echo: String,
    pub system: String,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn has_failure(&self) -> bool {
        self.outcomes.iter().any(|o| o.status == Status::Fail)
    }

    pub fn has_abort(&self) -> bool {
        self.outcomes.iter().any(|o| o.status == Status::Aborted)
    }

    /// 0 clean, 2 on any FAIL, 4 on a resource abort without failures.
    pub fn exit_code(&self) -> i32 {
        if self.has_failure() {
            2
        } else if self.has_abort() {
            4
        } else {
            0
        }
    }

    /// Verdict lines; everything after the first line is deterministic.
    pub fn summary(&self, header: &str) -> String {
        let mut out = format!("# {header}\n");
        let _ = writeln!(out, "system: {}", self.system);
        for o in &self.outcomes {
            let _ = writeln!(out, "[{:02}] {} {}", o.index, o.analysis, o.status);
            for h in &o.headlines {
                let _ = writeln!(out, "     {h}");
            }
        }
        out
    }

    pub fn artifacts(&self) -> impl Iterator<Item = &Artifact> {
        self.outcomes.iter().flat_map(|o| &o.artifacts)
    }

    /// Writes `manifest.txt`, `summary.txt` and every CSV into `dir`.
    pub fn write_to(&self, dir: &Path, header: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("manifest.txt"), &self.manifest_echo)?;
        std::fs::write(dir.join("summary.txt"), self.summary(header))?;
        for a in self.artifacts() {
            std::fs::write(dir.join(&a.file), &a.body)?;
        }
        Ok(())
    }
}

pub fn render(q: &Rational) -> String {
    format!("{} ({})", fraction(q), decimal(q))
}

pub fn render_interval(iv: &Interval) -> String {
    format!(
        "[{}, {}] ([{}, {}])",
        fraction(iv.lo()),
        fraction(iv.hi()),
        decimal(iv.lo()),
        decimal(iv.hi())
    )
}

struct Comparison {
    point: String,
    fast: Interval,
    oracle: Interval,
}

struct Work {
    status: Status,
    headlines: Vec<String>,
    artifacts: Vec<(String, String)>,
    comparisons: Vec<Comparison>,
}

impl Work {
    fn new(status: Status) -> Self {
        Work {
            status,
            headlines: Vec::new(),
            artifacts: Vec::new(),
            comparisons: Vec::new(),
        }
    }

    fn line(&mut self, s: String) {
        self.headlines.push(s);
    }
}

fn comparisons_csv(rows: &[Comparison]) -> String {
    let mut out = String::from("point,fast_lo,fast_hi,oracle_lo,oracle_hi,match\n");
    for c in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.point,
            fraction(c.fast.lo()),
            fraction(c.fast.hi()),
            fraction(c.oracle.lo()),
            fraction(c.oracle.hi()),
            c.fast == c.oracle
        );
    }
    out
}

/// Runs every analysis; analyses are independent and merged in manifest
/// order.
pub fn run_experiment(m: &ExperimentManifest, oracle: OracleMode) -> Report {
    let outcomes = m
        .analyses
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let index = i + 1;
            let stem = format!("{index:02}-{}", a.name());
            let work = match run_one(&m.target, a, oracle) {
                Ok(w) => w,
                Err(e) => {
                    let mut w = Work::new(Status::Aborted);
                    w.line(format!("aborted: {e}"));
                    w
                }
            };
            finish(index, a.name(), &stem, work)
        })
        .collect();
    Report {
        manifest_echo: m.text.clone(),
        system: m.target.label(),
        outcomes,
    }
}

fn finish(index: usize, name: &str, stem: &str, mut work: Work) -> Outcome {
    let mut artifacts: Vec<Artifact> = work
        .artifacts
        .drain(..)
        .map(|(suffix, body)| Artifact {
            file: if suffix.is_empty() {
                format!("{stem}.csv")
            } else {
                format!("{stem}-{suffix}.csv")
            },
            body,
        })
        .collect();
    if !work.comparisons.is_empty() {
        let mismatches = work.comparisons.iter().filter(|c| c.fast != c.oracle).count();
        work.line(format!(
            "oracle: {} points compared, {mismatches} mismatches",
            work.comparisons.len()
        ));
        if mismatches > 0 {
            work.status = Status::Fail;
        }
        artifacts.push(Artifact {
            file: format!("{stem}-oracle.csv"),
            body: comparisons_csv(&work.comparisons),
        });
    }
    Outcome {
        index,
        analysis: name.to_string(),
        status: work.status,
        headlines: work.headlines,
        artifacts,
    }
}

fn run_one(target: &Target, a: &Analysis, oracle: OracleMode) -> Result<Work, CoreError> {
    match (a, target) {
        (Analysis::Correlate { a, b, lags }, Target::Adic(sys)) => {
            let (SetSpec::Cylinder(a), SetSpec::Cylinder(b)) = (a, b) else {
                return Err(CoreError::InvalidArgument("level sets need a rank-one system".into()));
            };
            correlate_adic(sys, a, b, lags, oracle)
        }
        (Analysis::Correlate { a, lags, .. }, Target::RankOne(t)) => {
            let SetSpec::Levels { stage, levels } = a else {
                return Err(CoreError::InvalidArgument("cylinders need an adic system".into()));
            };
            correlate_tower(t, *stage, levels, lags, oracle)
        }
        (Analysis::Joining { depth, lag }, target) => joining(target, *depth, *lag, oracle),
        (
            Analysis::Rigidity {
                sequence,
                depths,
                i_max,
                tol,
                halving,
            },
            target,
        ) => {
            let dynamics: &dyn Dynamics = match target {
                Target::Adic(sys) => sys,
                Target::RankOne(t) => t,
            };
            let mut work = rigidity(dynamics, sequence, depths.clone(), *i_max, tol, oracle)?;
            if let (Some(h_tol), Target::Adic(System::Extension(e))) = (halving, target) {
                let base = System::Adic(e.base().clone());
                let base_est = rigidity_along(&base, sequence, depths.clone(), *i_max, tol)?;
                let ext_alpha = work.alpha.clone();
                let verdict = halving_check(base_est.alpha.as_ref(), ext_alpha.as_ref(), h_tol);
                work.work.line(format!(
                    "base alpha = {}",
                    base_est
                        .alpha
                        .as_ref()
                        .map_or("none (not converged)".into(), render_interval)
                ));
                work.work
                    .line(format!("halving check (tol {}) = {verdict}", render(h_tol)));
                work.work.artifacts.push(("base".into(), base_est.to_csv()));
                work.work.status = verdict.into();
            }
            Ok(work.work)
        }
        (
            Analysis::Spectrum {
                function,
                center,
                k_max,
                order,
                grid,
                tail_start,
                split,
            },
            Target::Adic(sys),
        ) => spectrum(
            sys,
            function,
            *center,
            *k_max,
            *order,
            *grid,
            *tail_start,
            *split,
            oracle,
        ),
        (Analysis::Spectrum { .. }, Target::RankOne(_)) => {
            Err(CoreError::InvalidArgument("spectrum needs an adic system".into()))
        }
        (
            Analysis::VerifyTheorem {
                sequence,
                depth,
                i_max,
                tol,
            },
            Target::Adic(System::Extension(e)),
        ) => {
            let report = theorem_check(e, sequence, *depth, *i_max, tol)?;
            let mut w = Work::new(report.verdict.into());
            w.line(format!("depth = {}, lags = {:?}", report.depth, report.lags));
            w.line(format!("final residual = {}", render_interval(report.final_residual())));
            w.line(format!("tolerance = {}", render(&report.tol)));
            w.line(format!(
                "upper ends strictly decreasing = {}, no certain increase = {}",
                report.strictly_decreasing, report.non_increasing
            ));
            w.artifacts.push((String::new(), report.to_csv()));
            Ok(w)
        }
        (Analysis::VerifyTheorem { .. }, _) => Err(CoreError::InvalidArgument(
            "verify-theorem needs a group extension".into(),
        )),
        (Analysis::VerifyCocycles { k_max }, target) => verify_cocycles(target, *k_max),
    }
}

/// Oracle system and whether a point at `depth`, lag `k` is in coverage.
fn oracle_system(sys: &System, mode: OracleMode) -> Option<System> {
    match mode {
        OracleMode::Off => None,
        OracleMode::Full => Some(sys.clone()),
        OracleMode::Sample => sys.truncated(sys.depth().min(SAMPLE_MAX_DEPTH)).ok(),
    }
}

fn covered(mode: OracleMode, osys: &System, depth: usize, k: u64) -> bool {
    let lag_ok = mode == OracleMode::Full || k <= SAMPLE_MAX_LAG;
    lag_ok && depth <= osys.depth() && osys.lag_usable(k)
}

fn correlate_adic(
    sys: &System,
    a: &FiberedCylinder,
    b: &FiberedCylinder,
    lags: &[u64],
    mode: OracleMode,
) -> Result<Work, CoreError> {
    let values = lags
        .par_iter()
        .map(|&k| correlation(sys, a, b, k as i64))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = Work::new(Status::Info);
    w.artifacts.push((String::new(), lag_table(lags, &values)));
    if let (Some(k), Some(v)) = (lags.last(), values.last()) {
        w.line(format!("mu(T^{k} A ∩ B) = {}", render_interval(v)));
    }
    w.line(format!(
        "mu(A) = {}, mu(B) = {}",
        render(&a.measure()),
        render(&b.measure())
    ));
    if let Some(osys) = oracle_system(sys, mode) {
        let depth = a.depth().max(b.depth());
        for &k in lags.iter().filter(|&&k| covered(mode, &osys, depth, k)) {
            w.comparisons.push(Comparison {
                point: format!("lag={k};depth={}", osys.depth()),
                fast: correlation(&osys, a, b, k as i64)?,
                oracle: oracle_correlation(&osys, a, b, k)?,
            });
        }
    }
    Ok(w)
}

fn lag_table(lags: &[u64], values: &[Interval]) -> String {
    let mut out = String::from("lag,lo,hi,lo_decimal,hi_decimal\n");
    for (k, v) in lags.iter().zip(values) {
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

fn correlate_tower(
    t: &TowerModel,
    stage: usize,
    levels: &[u64],
    lags: &[u64],
    mode: OracleMode,
) -> Result<Work, CoreError> {
    let values = lags
        .par_iter()
        .map(|&k| tower_correlation(&t.schedule, stage, levels, k, t.expand_to))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = Work::new(Status::Info);
    w.artifacts.push((String::new(), lag_table(lags, &values)));
    if let (Some(k), Some(v)) = (lags.last(), values.last()) {
        w.line(format!("mu(T^{k} A ∩ A) = {}", render_interval(v)));
    }
    let resolve = match mode {
        OracleMode::Off => None,
        OracleMode::Full => Some(t.expand_to),
        OracleMode::Sample => Some(t.expand_to.min(SAMPLE_MAX_DEPTH)),
    };
    if let Some(m) = resolve.filter(|&m| m >= stage) {
        let h_m = t.schedule.height(m, t.max_height)?;
        let wraps = t.schedule.spacer_free_from(m);
        let lag_ok = |k: u64| (mode == OracleMode::Full || k <= SAMPLE_MAX_LAG) && (k < h_m || wraps);
        for &k in lags.iter().filter(|&&k| lag_ok(k)) {
            w.comparisons.push(Comparison {
                point: format!("lag={k};stage={m}"),
                fast: tower_correlation(&t.schedule, stage, levels, k, m)?,
                oracle: oracle_tower_correlation(&t.schedule, stage, levels, k, m)?,
            });
        }
    }
    Ok(w)
}

fn joining(target: &Target, depth: usize, k: u64, mode: OracleMode) -> Result<Work, CoreError> {
    match target {
        Target::Adic(sys) => {
            let m = joining_matrix(sys, depth, k)?;
            let bistochastic = m.is_bistochastic();
            let mut w = Work::new(if bistochastic { Status::Pass } else { Status::Fail });
            w.line(format!("size = {}, bistochastic = {bistochastic}", m.size()));
            w.line(format!(
                "min diagonal = {}",
                render_interval(&rigidlab_core::rigidity::alpha_from_matrix(&m))
            ));
            w.line(format!("max entry width = {}", render(&m.max_width())));
            w.artifacts.push((String::new(), m.to_csv()));
            if let Some(osys) = oracle_system(sys, mode).filter(|o| covered(mode, o, depth, k)) {
                let fast = joining_matrix(&osys, depth, k)?;
                let fiber = osys.fiber_modulus() as usize;
                let cell = |i: usize| -> Result<FiberedCylinder, CoreError> {
                    let base = CylinderSet::new(osys.digits(), depth, [(i / fiber) as u64])?;
                    FiberedCylinder::on(&osys, base, [(i % fiber) as u32])
                };
                let scale = int(fast.size() as u64);
                // first row, first column and diagonal
                let mut points: Vec<(usize, usize)> = (0..fast.size()).flat_map(|i| [(0, i), (i, 0), (i, i)]).collect();
                points.sort_unstable();
                points.dedup();
                for (i, j) in points {
                    w.comparisons.push(Comparison {
                        point: format!("row={i};col={j};depth={}", osys.depth()),
                        fast: fast.get(i, j),
                        oracle: oracle_correlation(&osys, &cell(j)?, &cell(i)?, k)?.scale(&scale),
                    });
                }
            }
            Ok(w)
        }
        Target::RankOne(t) => {
            let m = t.matrix(depth, k)?;
            let mut w = Work::new(Status::Info);
            w.line(format!("size = {}", m.size()));
            w.line(format!(
                "min diagonal = {}",
                render_interval(&rigidlab_core::rigidity::alpha_from_matrix(&m))
            ));
            w.artifacts.push((String::new(), m.to_csv()));
            let resolve = match mode {
                OracleMode::Off => None,
                OracleMode::Full => Some(t.expand_to),
                OracleMode::Sample if k <= SAMPLE_MAX_LAG => Some(t.expand_to.min(SAMPLE_MAX_DEPTH)),
                OracleMode::Sample => None,
            };
            if let Some(stage) = resolve.filter(|&s| s >= depth) {
                let model = TowerModel::new(t.schedule.clone(), stage)?;
                if model.lag_usable(k) {
                    let fast = model.matrix(depth, k)?;
                    let inv = Rational::one() / (t.schedule.level_width(depth) / t.schedule.limit_mass());
                    for l in 0..fast.size() {
                        w.comparisons.push(Comparison {
                            point: format!("level={l};stage={stage}"),
                            fast: fast.diagonal(l),
                            oracle: oracle_tower_correlation(&t.schedule, depth, &[l as u64], k, stage)?.scale(&inv),
                        });
                    }
                }
            }
            Ok(w)
        }
    }
}

struct RigidityWork {
    work: Work,
    alpha: Option<Interval>,
}

fn rigidity(
    sys: &dyn Dynamics,
    seq: &CandidateSequence,
    depths: std::ops::RangeInclusive<usize>,
    i_max: usize,
    tol: &Rational,
    mode: OracleMode,
) -> Result<RigidityWork, CoreError> {
    let op = rigidity_along(sys, seq, depths.clone(), i_max, tol)?;
    let mut w = Work::new(if op.converged {
        Status::Info
    } else {
        Status::Inconclusive
    });
    describe(&mut w, &op);
    let mut csv = op.to_csv();
    if mode != OracleMode::Off {
        // the set-based route reads single-cell returns, independent of the matrices
        let set = set_based_alpha(sys, seq, depths, i_max, tol)?;
        describe(&mut w, &set);
        csv.push_str(set.to_csv().split_once('\n').map_or("", |(_, body)| body));
        for (a, b) in op.depths.iter().zip(&set.depths) {
            for ((k, x), (_, y)) in a.per_lag.iter().zip(&b.per_lag) {
                w.comparisons.push(Comparison {
                    point: format!("depth={};lag={k}", a.depth),
                    fast: x.clone(),
                    oracle: y.clone(),
                });
            }
        }
    }
    if !op.monotone {
        w.line("beta lower ends increase with depth".into());
        w.status = Status::Fail;
    }
    w.artifacts.push((String::new(), csv));
    Ok(RigidityWork {
        work: w,
        alpha: op.alpha,
    })
}

fn describe(w: &mut Work, est: &RigidityEstimate) {
    w.line(format!(
        "{} alpha = {} ({}; tail lags {:?})",
        est.method,
        est.alpha.as_ref().map_or("none".into(), render_interval),
        est.status(),
        est.tail_lags
    ));
}

fn build_function(sys: &System, spec: &FunctionSpec) -> Result<CylinderFunction, CoreError> {
    match spec {
        FunctionSpec::FiberSign => CylinderFunction::fiber_sign(sys),
        FunctionSpec::DigitSign => CylinderFunction::digit_sign(sys),
        FunctionSpec::Indicator(set) => CylinderFunction::indicator(sys.digits(), set),
    }
}

#[allow(clippy::too_many_arguments)]
fn spectrum(
    sys: &System,
    spec: &FunctionSpec,
    center: bool,
    k_max: usize,
    order: Option<usize>,
    grid: usize,
    tail_start: usize,
    split: usize,
    mode: OracleMode,
) -> Result<Work, CoreError> {
    let f = build_function(sys, spec)?;
    let series = autocorrelation_series(sys, &f, k_max, center)?;
    let est = fejer_density(&series, order, Some(grid))?;
    let flat = flatness_test(&est);
    let decay = decay_test(&series, tail_start)?;
    let wiener = wiener_average(&series, k_max)?;
    let bound = consistency_bound(&series, &est, &flat, split)?;
    let sound = series.is_consistent() && est.is_positive_within_slack() && bound;
    let mut w = Work::new(if sound { Status::Info } else { Status::Fail });
    w.line(format!("rho(0) = {}", render_interval(series.rho(0))));
    if k_max >= 1 {
        w.line(format!("rho(1) = {}", render_interval(series.rho(1))));
    }
    w.line(format!(
        "Fejer order {}: deviation from flat {:.6}, slack {:.6}, flat = {}",
        est.order,
        flat.deviation,
        flat.slack + flat.rounding,
        flat.consistent_with_flat()
    ));
    w.line(format!(
        "sup |rho(k)|, k >= {tail_start}: {} (certain part {}), consistent with decay = {}",
        render(&decay.sup),
        render(&decay.sup_certain),
        decay.consistent_with_zero()
    ));
    w.line(format!(
        "mean |rho(k)|^2 over 1..={k_max}: {}, consistent with no atoms = {}",
        render_interval(&wiener.value),
        wiener.consistent_with_no_atoms()
    ));
    w.line(format!(
        "series consistent = {}, density nonnegative within slack = {}, deviation within bound = {bound}",
        series.is_consistent(),
        est.is_positive_within_slack()
    ));
    w.artifacts.push(("series".into(), series.to_csv()));
    w.artifacts.push(("density".into(), est.to_csv()));
    if let Some(osys) = oracle_system(sys, mode) {
        let g = build_function(&osys, spec)?;
        let g = if center { g.centered() } else { g };
        if g.depth() <= osys.depth() {
            for k in (0..=k_max as u64).filter(|&k| covered(mode, &osys, g.depth(), k)) {
                w.comparisons.push(Comparison {
                    point: format!("lag={k};depth={}", osys.depth()),
                    fast: inner_product_lag(&osys, &g, &g, k as i64)?,
                    oracle: oracle_inner_product(&osys, &g, &g, k)?,
                });
            }
        }
    }
    Ok(w)
}

fn verify_cocycles(target: &Target, k_max: u64) -> Result<Work, CoreError> {
    let pairs: Vec<(Cocycle, SequenceOracle)> = match target {
        Target::Adic(System::Extension(e)) => match e.cocycle().rule() {
            CocycleRule::Morse => vec![(Cocycle::morse(), SequenceOracle::MorseDigitSum)],
            CocycleRule::RudinShapiro => vec![(Cocycle::rudin_shapiro(), SequenceOracle::Rs11Count)],
            _ => default_pairs(),
        },
        _ => default_pairs(),
    };
    cocycle_work(&pairs, k_max)
}

fn default_pairs() -> Vec<(Cocycle, SequenceOracle)> {
    vec![
        (Cocycle::morse(), SequenceOracle::MorseDigitSum),
        (Cocycle::rudin_shapiro(), SequenceOracle::Rs11Count),
    ]
}

fn cocycle_work(pairs: &[(Cocycle, SequenceOracle)], k_max: u64) -> Result<Work, CoreError> {
    let mut w = Work::new(Status::Pass);
    let mut csv = String::from("cocycle,k_max,result,detail\n");
    for (c, oracle) in pairs {
        let (result, detail) = match verify_cocycle_against_sequence(c, *oracle, k_max, None)? {
            CocycleCheck::Success { checked } => (Status::Pass, format!("{checked} sums agree")),
            CocycleCheck::Mismatch { k, expected, found } => {
                (Status::Fail, format!("k={k} expected {expected} found {found}"))
            }
            CocycleCheck::Inconclusive { first_undetermined } => (
                Status::Inconclusive,
                format!("undetermined from k={first_undetermined}"),
            ),
        };
        if result != Status::Pass && w.status == Status::Pass {
            w.status = result;
        }
        w.line(format!("{}: {result} ({detail})", c.tag()));
        let _ = writeln!(csv, "{},{k_max},{result},{detail}", c.tag());
    }
    w.artifacts.push((String::new(), csv));
    Ok(w)
}

/// Standalone cocycle verification for Morse and Rudin-Shapiro.
pub fn verify_default_cocycles(k_max: u64) -> Result<Outcome, CoreError> {
    let w = cocycle_work(&default_pairs(), k_max)?;
    Ok(finish(1, "verify-cocycles", "01-verify-cocycles", w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::parse_manifest;

    #[test]
    fn exit_codes() {
        let mk = |s| Outcome {
            index: 1,
            analysis: "x".into(),
            status: s,
            headlines: vec![],
            artifacts: vec![],
        };
        let report = |ss: Vec<Status>| Report {
            manifest_echo: String::new(),
            system: String::new(),
            outcomes: ss.into_iter().map(mk).collect(),
        };
        assert_eq!(report(vec![Status::Pass, Status::Info]).exit_code(), 0);
        assert_eq!(report(vec![Status::Aborted, Status::Pass]).exit_code(), 4);
        assert_eq!(report(vec![Status::Aborted, Status::Fail]).exit_code(), 2);
        assert_eq!(report(vec![Status::Inconclusive]).exit_code(), 0);
    }

    #[test]
    fn oracle_mode_parses() {
        assert_eq!("full".parse::<OracleMode>().unwrap(), OracleMode::Full);
        assert_eq!("off".parse::<OracleMode>().unwrap(), OracleMode::Off);
        assert!("most".parse::<OracleMode>().is_err());
    }

    #[test]
    fn joining_runs_with_oracle() {
        let m = parse_manifest("[system]\nkind = adic\ndepth = 8\n[extension]\ncocycle = MORSE\n[analysis]\ntype = joining\nd = 2\nk = 3\n").unwrap();
        let r = run_experiment(&m, OracleMode::Sample);
        let o = &r.outcomes[0];
        assert_eq!(o.status, Status::Pass, "{:?}", o.headlines);
        assert!(o.artifacts.iter().any(|a| a.file == "01-joining-oracle.csv"));
        assert!(!o.artifacts.iter().any(|a| a.body.contains(",false\n")));
    }

    #[test]
    fn correlate_tower_matches_oracle() {
        let m = parse_manifest("[system]\nkind = rank-one\nschedule = chacon\nstage = 5\n[analysis]\ntype = correlate\nstage = 2\nlevels = 0, 2\nlags = 1..6\n").unwrap();
        let r = run_experiment(&m, OracleMode::Sample);
        assert_eq!(r.outcomes[0].status, Status::Info, "{:?}", r.outcomes[0].headlines);
        assert!(r.outcomes[0]
            .headlines
            .iter()
            .any(|h| h.contains("6 points compared, 0 mismatches")));
    }

    #[test]
    fn resource_abort_is_local() {
        // lag beyond the resolved tower height aborts only that analysis
        let m = parse_manifest("[system]\nkind = rank-one\nschedule = chacon\nstage = 2\n[analysis]\ntype = joining\nd = 1\nk = 50\n[analysis]\ntype = joining\nd = 1\nk = 1\n").unwrap();
        let r = run_experiment(&m, OracleMode::Off);
        assert_eq!(r.outcomes[0].status, Status::Aborted);
        assert_eq!(r.outcomes[1].status, Status::Info);
        assert_eq!(r.exit_code(), 4);
    }
}
