//! Line-based experiment manifests.
//!
//! ```text
//! # comment
//! [system]
//! kind = adic
//! radices = 2
//! depth = 20
//!
//! [extension]
//! cocycle = RUDIN_SHAPIRO
//! fiber = 2
//!
//! [sequence]
//! name = pow2
//! kind = explicit
//! values = 256, 512, 1024
//!
//! [analysis]
//! type = verify-theorem
//! sequence = pow2
//! depth = 4
//! ```
//!
//! `[sequence]` and `[analysis]` may repeat; `[system]` and at least one
//! `[analysis]` are required.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rigidlab_core::cocycles::{Cocycle, CocycleTable, GroupExtension, DEFAULT_MAX_POINTS};
use rigidlab_core::exact::Rational;
use rigidlab_core::koopman::{default_tolerance, FiberedCylinder, System};
use rigidlab_core::rigidity::CandidateSequence;
use rigidlab_core::systems::{CylinderSet, DigitSystem, RankOneSchedule, StageRule, TowerModel, DEFAULT_MAX_HEIGHT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestError {
    /// 1-based; 0 when the problem has no single line (a missing section).
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "manifest: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// The dynamical system under study, built and validated.
#[derive(Clone, Debug)]
pub enum Target {
    Adic(System),
    RankOne(TowerModel),
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::Adic(s) => s.label(),
            Target::RankOne(t) => rigidlab_core::rigidity::Dynamics::label(t),
        }
    }
}

#[derive(Clone, Debug)]
pub enum SetSpec {
    Cylinder(FiberedCylinder),
    /// Union of levels of the stage-`stage` tower.
    Levels {
        stage: usize,
        levels: Vec<u64>,
    },
}

#[derive(Clone, Debug)]
pub enum FunctionSpec {
    FiberSign,
    DigitSign,
    Indicator(FiberedCylinder),
}

#[derive(Clone, Debug)]
pub enum Analysis {
    Correlate {
        a: SetSpec,
        b: SetSpec,
        lags: Vec<u64>,
    },
    Joining {
        depth: usize,
        lag: u64,
    },
    Rigidity {
        sequence: CandidateSequence,
        depths: RangeInclusive<usize>,
        i_max: usize,
        tol: Rational,
        halving: Option<Rational>,
    },
    Spectrum {
        function: FunctionSpec,
        center: bool,
        k_max: usize,
        order: Option<usize>,
        grid: usize,
        tail_start: usize,
        split: usize,
    },
    VerifyTheorem {
        sequence: CandidateSequence,
        depth: usize,
        i_max: usize,
        tol: Rational,
    },
    VerifyCocycles {
        k_max: u64,
    },
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Correlate { .. } => "correlate",
            Analysis::Joining { .. } => "joining",
            Analysis::Rigidity { .. } => "rigidity",
            Analysis::Spectrum { .. } => "spectrum",
            Analysis::VerifyTheorem { .. } => "verify-theorem",
            Analysis::VerifyCocycles { .. } => "verify-cocycles",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentManifest {
    /// Verbatim input, echoed into every report.
    pub text: String,
    pub target: Target,
    pub analyses: Vec<Analysis>,
    pub output: Option<PathBuf>,
}

impl ExperimentManifest {
    pub fn extension(&self) -> Option<&GroupExtension> {
        match &self.target {
            Target::Adic(System::Extension(e)) => Some(e),
            _ => None,
        }
    }
}

struct Entry {
    key: String,
    value: String,
    line: usize,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

const SECTIONS: [&str; 5] = ["system", "extension", "sequence", "analysis", "output"];

fn split_sections(text: &str, errs: &mut Vec<ManifestError>) -> Vec<Section> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let name = name.trim().to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                errs.push(ManifestError {
                    line,
                    message: format!("unknown section [{name}]"),
                });
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            errs.push(ManifestError {
                line,
                message: format!("expected `key = value`, found `{body}`"),
            });
            continue;
        };
        let key = key.trim().to_ascii_lowercase();
        let Some(section) = sections.last_mut() else {
            errs.push(ManifestError {
                line,
                message: format!("`{key}` appears before any section header"),
            });
            continue;
        };
        if section.get(&key).is_some() {
            errs.push(ManifestError {
                line,
                message: format!("duplicate key `{key}` in [{}]", section.name),
            });
            continue;
        }
        section.entries.push(Entry {
            key,
            value: value.trim().to_string(),
            line,
        });
    }
    sections
}

/// Typed field access that records every problem instead of stopping.
struct Reader<'a> {
    errs: &'a mut Vec<ManifestError>,
}

impl Reader<'_> {
    fn err(&mut self, line: usize, message: impl Into<String>) {
        self.errs.push(ManifestError {
            line,
            message: message.into(),
        });
    }

    fn allow(&mut self, s: &Section, keys: &[&str]) {
        for e in &s.entries {
            if !keys.contains(&e.key.as_str()) {
                self.err(e.line, format!("unknown key `{}` in [{}]", e.key, s.name));
            }
        }
    }

    fn require<'s>(&mut self, s: &'s Section, key: &str) -> Option<&'s Entry> {
        let e = s.get(key);
        if e.is_none() {
            self.err(s.line, format!("[{}] is missing `{key}`", s.name));
        }
        e
    }

    fn uint(&mut self, e: &Entry, positive: bool) -> Option<u64> {
        match e.value.parse::<u64>() {
            Ok(0) if positive => {
                self.err(e.line, format!("`{}` must be a positive integer, found 0", e.key));
                None
            }
            Ok(v) => Some(v),
            Err(_) => {
                let what = if positive { "a positive" } else { "a non-negative" };
                self.err(
                    e.line,
                    format!("`{}` must be {what} integer, found `{}`", e.key, e.value),
                );
                None
            }
        }
    }

    fn opt_uint(&mut self, s: &Section, key: &str, positive: bool, default: u64) -> Option<u64> {
        match s.get(key) {
            Some(e) => self.uint(e, positive),
            None => Some(default),
        }
    }

    fn req_uint(&mut self, s: &Section, key: &str, positive: bool) -> Option<u64> {
        let e = self.require(s, key)?;
        self.uint(e, positive)
    }

    fn list<T: std::str::FromStr>(&mut self, e: &Entry) -> Option<Vec<T>> {
        if e.value.trim().is_empty() {
            return Some(Vec::new());
        }
        let parsed: Result<Vec<T>, _> = e.value.split(',').map(|v| v.trim().parse::<T>()).collect();
        match parsed {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(
                    e.line,
                    format!("`{}` must be a comma-separated list of non-negative integers", e.key),
                );
                None
            }
        }
    }

    /// `a..b` (inclusive) or a single value.
    fn range(&mut self, e: &Entry) -> Option<RangeInclusive<u64>> {
        let v = e.value.replace("..=", "..");
        let parsed = match v.split_once("..") {
            Some((a, b)) => a.trim().parse::<u64>().ok().zip(b.trim().parse::<u64>().ok()),
            None => v.trim().parse::<u64>().ok().map(|x| (x, x)),
        };
        match parsed {
            Some((a, b)) if a <= b => Some(a..=b),
            _ => {
                self.err(
                    e.line,
                    format!("`{}` must be `a..b` with 0 <= a <= b, found `{}`", e.key, e.value),
                );
                None
            }
        }
    }

    /// A range `a..b` or an explicit list.
    fn lags(&mut self, e: &Entry) -> Option<Vec<u64>> {
        if e.value.contains("..") {
            self.range(e).map(|r| r.collect())
        } else {
            self.list(e)
        }
    }

    fn rational(&mut self, e: &Entry) -> Option<Rational> {
        match parse_rational(&e.value) {
            Some(q) if q > Rational::zero() => Some(q),
            Some(_) => {
                self.err(e.line, format!("`{}` must be positive, found `{}`", e.key, e.value));
                None
            }
            None => {
                self.err(
                    e.line,
                    format!("`{}`: malformed rational `{}` (use p/q or a decimal)", e.key, e.value),
                );
                None
            }
        }
    }

    fn opt_rational(&mut self, s: &Section, key: &str, default: Rational) -> Option<Rational> {
        match s.get(key) {
            Some(e) => self.rational(e),
            None => Some(default),
        }
    }

    fn boolean(&mut self, s: &Section, key: &str, default: bool) -> Option<bool> {
        let Some(e) = s.get(key) else {
            return Some(default);
        };
        match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            _ => {
                self.err(
                    e.line,
                    format!("`{}` must be true or false, found `{}`", e.key, e.value),
                );
                None
            }
        }
    }
}

/// `p/q`, an integer, or a plain decimal such as `0.015`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((int_part, frac)) = s.split_once('.') {
        let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        let unsigned = int_part.strip_prefix('-').unwrap_or(int_part);
        if frac.is_empty() || !digits_ok(frac) || !digits_ok(unsigned) {
            return None;
        }
        let text = format!("{int_part}{frac}/1{}", "0".repeat(frac.len()));
        return text.parse().ok();
    }
    let q: Rational = s.parse().ok()?;
    Some(q)
}

#[derive(Default)]
struct SequenceDecl {
    kind: String,
    shift: u64,
    values: Vec<u64>,
    terms: Option<RangeInclusive<usize>>,
}

/// Parses and validates a manifest. Relative table paths resolve against
/// the current directory.
pub fn parse_manifest(text: &str) -> Result<ExperimentManifest, Vec<ManifestError>> {
    parse_manifest_in(text, Path::new("."))
}

/// As [`parse_manifest`], resolving table paths against `base_dir`.
pub fn parse_manifest_in(text: &str, base_dir: &Path) -> Result<ExperimentManifest, Vec<ManifestError>> {
    let mut errs = Vec::new();
    let sections = split_sections(text, &mut errs);
    let mut r = Reader { errs: &mut errs };

    let of = |name: &'static str| sections.iter().filter(move |s| s.name == name);
    for name in ["system", "extension", "output"] {
        for extra in of(name).skip(1) {
            r.err(extra.line, format!("[{name}] may appear only once"));
        }
    }

    let system = match of("system").next() {
        Some(s) => parse_system(&mut r, s),
        None => {
            r.err(0, "missing [system] section");
            None
        }
    };
    let extension = of("extension").next();
    let target = match (system, extension) {
        (Some(Target::Adic(System::Adic(base))), Some(ext)) => {
            parse_extension(&mut r, ext, base, base_dir).map(|e| Target::Adic(System::Extension(e)))
        }
        (Some(Target::RankOne(_)), Some(ext)) => {
            r.err(ext.line, "[extension] needs an adic base system");
            None
        }
        (sys, _) => sys,
    };

    let mut sequences: BTreeMap<String, (usize, SequenceDecl)> = BTreeMap::new();
    for s in of("sequence") {
        if let Some((name, decl)) = parse_sequence(&mut r, s) {
            match sequences.entry(name) {
                btree_map::Entry::Occupied(e) => r.err(s.line, format!("sequence `{}` defined twice", e.key())),
                btree_map::Entry::Vacant(e) => {
                    e.insert((s.line, decl));
                }
            }
        }
    }

    let mut analyses = Vec::new();
    if of("analysis").next().is_none() {
        r.err(0, "missing [analysis] section");
    }
    for s in of("analysis") {
        if let Some(a) = parse_analysis(&mut r, s, target.as_ref(), &sequences) {
            analyses.push(a);
        }
    }

    let output = of("output").next().and_then(|s| {
        r.allow(s, &["dir"]);
        r.require(s, "dir").map(|e| PathBuf::from(&e.value))
    });

    match target {
        Some(target) if errs.is_empty() => Ok(ExperimentManifest {
            text: text.to_string(),
            target,
            analyses,
            output,
        }),
        _ => {
            errs.sort_by_key(|e| e.line);
            Err(errs)
        }
    }
}

fn parse_system(r: &mut Reader, s: &Section) -> Option<Target> {
    let kind = r.require(s, "kind").map(|e| (e.value.to_ascii_lowercase(), e.line))?;
    match kind.0.as_str() {
        "adic" => {
            r.allow(s, &["kind", "radices", "depth"]);
            let radices: Option<Vec<u32>> = match s.get("radices") {
                Some(e) => r.list(e),
                None => Some(vec![2]),
            };
            let depth = r.req_uint(s, "depth", true);
            let (radices, depth) = (radices?, depth? as usize);
            let line = s.get("depth").map_or(s.line, |e| e.line);
            let digits = match DigitSystem::periodic(&radices, depth) {
                Ok(d) => d,
                Err(e) => {
                    r.err(s.get("radices").map_or(line, |e| e.line), e.to_string());
                    return None;
                }
            };
            if digits.modulus() > DEFAULT_MAX_POINTS {
                r.err(
                    line,
                    format!(
                        "depth {depth} gives {} points, above the resource bound {DEFAULT_MAX_POINTS}",
                        digits.modulus()
                    ),
                );
                return None;
            }
            Some(Target::Adic(System::Adic(digits)))
        }
        "rank-one" => {
            r.allow(s, &["kind", "schedule", "initial_height", "rules", "stage"]);
            let stage = r.req_uint(s, "stage", true);
            let schedule = match s.get("schedule").map(|e| (e.value.to_ascii_lowercase(), e.line)) {
                Some((name, _)) if name == "chacon" => Some(RankOneSchedule::chacon()),
                Some((name, _)) if name == "dyadic" => Some(RankOneSchedule::dyadic()),
                Some((name, line)) if name == "custom" => {
                    let h = r.opt_uint(s, "initial_height", true, 1);
                    let rules = r.require(s, "rules").and_then(|e| {
                        let parsed: Option<Vec<StageRule>> = e
                            .value
                            .split(';')
                            .map(|chunk| {
                                chunk
                                    .split(',')
                                    .map(|v| v.trim().parse::<u64>().ok())
                                    .collect::<Option<Vec<u64>>>()
                                    .map(|spacers| StageRule { spacers })
                            })
                            .collect();
                        if parsed.is_none() {
                            r.err(e.line, "`rules` must be spacer lists like `0,1,0; 0,0`");
                        }
                        parsed
                    });
                    match RankOneSchedule::new(h?, rules?) {
                        Ok(sched) => Some(sched),
                        Err(e) => {
                            r.err(line, e.to_string());
                            None
                        }
                    }
                }
                Some((name, line)) => {
                    r.err(line, format!("unknown schedule `{name}` (chacon, dyadic or custom)"));
                    None
                }
                None => {
                    r.err(s.line, "[system] is missing `schedule`");
                    None
                }
            };
            let (schedule, stage) = (schedule?, stage? as usize);
            match TowerModel::new(schedule, stage) {
                Ok(t) => Some(Target::RankOne(t)),
                Err(e) => {
                    let line = s.get("stage").map_or(s.line, |e| e.line);
                    r.err(line, format!("stage {stage}: {e} (height bound {DEFAULT_MAX_HEIGHT})"));
                    None
                }
            }
        }
        other => {
            r.err(kind.1, format!("unknown system kind `{other}` (adic or rank-one)"));
            None
        }
    }
}

fn parse_extension(r: &mut Reader, s: &Section, base: DigitSystem, base_dir: &Path) -> Option<GroupExtension> {
    r.allow(s, &["cocycle", "fiber", "table"]);
    let tag = r.require(s, "cocycle")?;
    let fiber = r.opt_uint(s, "fiber", true, 2);
    let cocycle = if tag.value.eq_ignore_ascii_case("table") {
        let e = r.require(s, "table")?;
        let path = base_dir.join(&e.value);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(err) => {
                r.err(e.line, format!("cannot read table {}: {err}", path.display()));
                return None;
            }
        };
        let table = match CocycleTable::parse(&text) {
            Ok(t) => t,
            Err(err) => {
                r.err(e.line, format!("table {}: {err}", path.display()));
                return None;
            }
        };
        if let Some(m) = fiber {
            if s.get("fiber").is_some() && m != table.modulus() as u64 {
                r.err(
                    e.line,
                    format!("table modulus {} differs from fiber {m}", table.modulus()),
                );
                return None;
            }
        }
        Cocycle::table(table)
    } else {
        if let Some(e) = s.get("table") {
            r.err(e.line, "`table` is only used with cocycle = TABLE");
        }
        let fiber = fiber? as u32;
        match Cocycle::from_tag(&tag.value, fiber) {
            Ok(c) => c,
            Err(err) => {
                r.err(tag.line, err.to_string());
                return None;
            }
        }
    };
    match GroupExtension::new(base, cocycle) {
        Ok(e) => Some(e),
        Err(err) => {
            r.err(s.line, err.to_string());
            None
        }
    }
}

fn parse_sequence(r: &mut Reader, s: &Section) -> Option<(String, SequenceDecl)> {
    r.allow(s, &["name", "kind", "shift", "values", "terms"]);
    let name = r.require(s, "name").map(|e| e.value.clone());
    let mut decl = SequenceDecl {
        kind: s
            .get("kind")
            .map_or("explicit".into(), |e| e.value.to_ascii_lowercase()),
        ..Default::default()
    };
    let mut ok = true;
    match decl.kind.as_str() {
        "heights" => {}
        "shifted" => match r.req_uint(s, "shift", false) {
            Some(v) => decl.shift = v,
            None => ok = false,
        },
        "explicit" => match r.require(s, "values").and_then(|e| r.list::<u64>(e)) {
            Some(v) if !v.is_empty() && v.windows(2).all(|w| w[0] < w[1]) && v[0] > 0 => decl.values = v,
            Some(_) => {
                let line = s.get("values").map_or(s.line, |e| e.line);
                r.err(line, "`values` must be positive and strictly increasing");
                ok = false;
            }
            None => ok = false,
        },
        other => {
            let line = s.get("kind").map_or(s.line, |e| e.line);
            r.err(
                line,
                format!("unknown sequence kind `{other}` (heights, shifted or explicit)"),
            );
            ok = false;
        }
    }
    if let Some(e) = s.get("terms") {
        match r.range(e) {
            Some(t) if *t.start() >= 1 => decl.terms = Some(*t.start() as usize..=*t.end() as usize),
            Some(_) => {
                r.err(e.line, "`terms` indices start at 1");
                ok = false;
            }
            None => ok = false,
        }
    }
    if ok {
        name.map(|n| (n, decl))
    } else {
        None
    }
}

fn resolve_sequence(
    r: &mut Reader,
    e: &Entry,
    target: &Target,
    sequences: &BTreeMap<String, (usize, SequenceDecl)>,
) -> Option<CandidateSequence> {
    let Some((decl_line, decl)) = sequences.get(&e.value) else {
        r.err(e.line, format!("unknown sequence `{}`", e.value));
        return None;
    };
    let heights = || match target {
        Target::Adic(sys) => Ok(CandidateSequence::adic_heights(sys.digits())),
        Target::RankOne(t) => CandidateSequence::rank_one_heights(&t.schedule, t.expand_to, t.max_height),
    };
    let built = match decl.kind.as_str() {
        "heights" => heights(),
        "shifted" => heights().map(|h| h.shifted(decl.shift)),
        _ => CandidateSequence::explicit(e.value.clone(), decl.values.iter().copied()),
    };
    let built = built.and_then(|seq| match &decl.terms {
        Some(t) => seq.terms(t.clone()),
        None => Ok(seq),
    });
    match built {
        Ok(seq) => Some(seq),
        Err(err) => {
            r.err(*decl_line, format!("sequence `{}`: {err}", e.value));
            None
        }
    }
}

fn parse_cylinder(
    r: &mut Reader,
    s: &Section,
    sys: &System,
    prefix_key: &str,
    fiber_key: &str,
) -> Option<FiberedCylinder> {
    let prefix: Vec<u32> = match s.get(prefix_key) {
        Some(e) => r.list(e)?,
        None => Vec::new(),
    };
    let m = sys.fiber_modulus();
    let fiber: Vec<u32> = match s.get(fiber_key) {
        Some(e) => r.list(e)?,
        None => (0..m).collect(),
    };
    let line = s.get(prefix_key).or(s.get(fiber_key)).map_or(s.line, |e| e.line);
    let base = if prefix.is_empty() {
        Ok(CylinderSet::whole())
    } else {
        CylinderSet::from_prefix(sys.digits(), &prefix)
    };
    match base.and_then(|b| FiberedCylinder::on(sys, b, fiber)) {
        Ok(c) => Some(c),
        Err(err) => {
            r.err(line, format!("`{prefix_key}`: {err}"));
            None
        }
    }
}

fn parse_levels(r: &mut Reader, s: &Section, tower: &TowerModel) -> Option<SetSpec> {
    let stage = r.req_uint(s, "stage", true)? as usize;
    let levels: Vec<u64> = r.require(s, "levels").and_then(|e| r.list(e))?;
    let line = s.get("levels").map_or(s.line, |e| e.line);
    if stage > tower.expand_to {
        r.err(
            line,
            format!("stage {stage} is beyond the resolved stage {}", tower.expand_to),
        );
        return None;
    }
    let h = tower.schedule.height(stage, tower.max_height).ok()?;
    if levels.is_empty() || levels.iter().any(|&l| l >= h) {
        r.err(
            line,
            format!("`levels` must be nonempty and below the stage-{stage} height {h}"),
        );
        return None;
    }
    Some(SetSpec::Levels { stage, levels })
}

fn parse_analysis(
    r: &mut Reader,
    s: &Section,
    target: Option<&Target>,
    sequences: &BTreeMap<String, (usize, SequenceDecl)>,
) -> Option<Analysis> {
    let kind = r.require(s, "type")?;
    let kind_line = kind.line;
    let kind = kind.value.to_ascii_lowercase();
    match kind.as_str() {
        "correlate" => {
            let target = target?;
            match target {
                Target::Adic(sys) => {
                    r.allow(s, &["type", "a", "a_fiber", "b", "b_fiber", "lags"]);
                    let a = parse_cylinder(r, s, sys, "a", "a_fiber");
                    let b = parse_cylinder(r, s, sys, "b", "b_fiber");
                    let lags = r.require(s, "lags").and_then(|e| r.lags(e));
                    Some(Analysis::Correlate {
                        a: SetSpec::Cylinder(a?),
                        b: SetSpec::Cylinder(b?),
                        lags: lags?,
                    })
                }
                Target::RankOne(t) => {
                    r.allow(s, &["type", "stage", "levels", "lags"]);
                    let set = parse_levels(r, s, t);
                    let lags = r.require(s, "lags").and_then(|e| r.lags(e));
                    let set = set?;
                    Some(Analysis::Correlate {
                        a: set.clone(),
                        b: set,
                        lags: lags?,
                    })
                }
            }
        }
        "joining" => {
            r.allow(s, &["type", "d", "k"]);
            let d = r.req_uint(s, "d", true);
            let k = r.req_uint(s, "k", false);
            let (d, k) = (d? as usize, k?);
            let max = match target? {
                Target::Adic(sys) => sys.depth(),
                Target::RankOne(t) => t.expand_to,
            };
            if d > max {
                r.err(
                    s.get("d").map_or(s.line, |e| e.line),
                    format!("d = {d} exceeds the system depth {max}"),
                );
                return None;
            }
            Some(Analysis::Joining { depth: d, lag: k })
        }
        "rigidity" => {
            r.allow(s, &["type", "sequence", "depths", "i_max", "tol", "halving_tol"]);
            let seq = r.require(s, "sequence");
            let depths = r.require(s, "depths").and_then(|e| r.range(e));
            let i_max = r.opt_uint(s, "i_max", true, u64::MAX);
            let tol = r.opt_rational(s, "tol", default_tolerance());
            let halving = s.get("halving_tol").map(|e| r.rational(e));
            let target = target?;
            let seq = resolve_sequence(r, seq?, target, sequences);
            let depths = depths?;
            if *depths.start() == 0 {
                r.err(s.get("depths").map_or(s.line, |e| e.line), "`depths` start at 1");
                return None;
            }
            let halving = match halving {
                Some(Some(q)) if matches!(target, Target::Adic(System::Extension(_))) => Some(q),
                Some(Some(_)) => {
                    r.err(
                        s.get("halving_tol").map_or(s.line, |e| e.line),
                        "`halving_tol` needs an [extension]",
                    );
                    return None;
                }
                Some(None) => return None,
                None => None,
            };
            Some(Analysis::Rigidity {
                sequence: seq?,
                depths: *depths.start() as usize..=*depths.end() as usize,
                i_max: i_max?.min(usize::MAX as u64) as usize,
                tol: tol?,
                halving,
            })
        }
        "spectrum" => {
            r.allow(
                s,
                &[
                    "type",
                    "function",
                    "set",
                    "set_fiber",
                    "center",
                    "k_max",
                    "order",
                    "grid",
                    "tail_start",
                    "split",
                ],
            );
            let sys = match target? {
                Target::Adic(sys) => sys,
                Target::RankOne(_) => {
                    r.err(s.line, "spectrum needs an adic system or extension");
                    return None;
                }
            };
            let function = match s.get("function").map(|e| (e.value.to_ascii_lowercase(), e.line)) {
                None => Some(FunctionSpec::FiberSign),
                Some((f, _)) if f == "fiber-sign" => Some(FunctionSpec::FiberSign),
                Some((f, _)) if f == "digit-sign" => Some(FunctionSpec::DigitSign),
                Some((f, _)) if f == "indicator" => {
                    parse_cylinder(r, s, sys, "set", "set_fiber").map(FunctionSpec::Indicator)
                }
                Some((f, line)) => {
                    r.err(
                        line,
                        format!("unknown function `{f}` (fiber-sign, digit-sign or indicator)"),
                    );
                    None
                }
            };
            if matches!(function, Some(FunctionSpec::FiberSign)) && sys.fiber_modulus() != 2 {
                r.err(s.line, "fiber-sign needs a fiber of size 2");
                return None;
            }
            let center = r.boolean(s, "center", false);
            let k_max = r.opt_uint(s, "k_max", true, 64);
            let order = s.get("order").map(|e| r.uint(e, true));
            let grid = r.opt_uint(s, "grid", true, rigidlab_core::spectral::DEFAULT_GRID as u64);
            let tail_start = r.opt_uint(s, "tail_start", false, 1);
            let split = r.opt_uint(s, "split", false, 16);
            let k_max = k_max? as usize;
            let order = match order {
                Some(Some(o)) if o as usize > k_max => {
                    r.err(
                        s.get("order").map_or(s.line, |e| e.line),
                        format!("order {o} exceeds k_max {k_max}"),
                    );
                    return None;
                }
                Some(Some(o)) => Some(o as usize),
                Some(None) => return None,
                None => None,
            };
            let (tail_start, split) = (tail_start? as usize, split? as usize);
            if tail_start > k_max || split > k_max {
                r.err(s.line, "`tail_start` and `split` must not exceed k_max");
                return None;
            }
            Some(Analysis::Spectrum {
                function: function?,
                center: center?,
                k_max,
                order,
                grid: grid? as usize,
                tail_start,
                split,
            })
        }
        "verify-theorem" => {
            r.allow(s, &["type", "sequence", "depth", "i_max", "tol"]);
            let seq = r.require(s, "sequence");
            let depth = r.req_uint(s, "depth", true);
            let i_max = r.opt_uint(s, "i_max", true, u64::MAX);
            let tol = r.opt_rational(s, "tol", rigidlab_core::exact::ratio(1, 50));
            let target = target?;
            let Target::Adic(System::Extension(e)) = target else {
                r.err(s.line, "verify-theorem needs an [extension]");
                return None;
            };
            let depth = depth? as usize;
            if depth > e.base().depth() {
                r.err(
                    s.get("depth").map_or(s.line, |e| e.line),
                    format!("depth {depth} exceeds the system depth {}", e.base().depth()),
                );
                return None;
            }
            let seq = resolve_sequence(r, seq?, target, sequences);
            Some(Analysis::VerifyTheorem {
                sequence: seq?,
                depth,
                i_max: i_max?.min(usize::MAX as u64) as usize,
                tol: tol?,
            })
        }
        "verify-cocycles" => {
            r.allow(s, &["type", "k_max"]);
            let k_max = r.opt_uint(s, "k_max", true, 1 << 16)?;
            Some(Analysis::VerifyCocycles { k_max })
        }
        other => {
            r.err(
                kind_line,
                format!(
                    "unknown analysis type `{other}` (correlate, rigidity, spectrum, joining, verify-theorem, verify-cocycles)"
                ),
            );
            None
        }
    }
}
