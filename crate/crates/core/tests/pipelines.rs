use proptest::prelude::*;
use rigidlab_core::cocycles::{Cocycle, CocycleTable, GroupExtension};
use rigidlab_core::exact::{ratio, Interval};
use rigidlab_core::koopman::oracle::oracle_correlation;
use rigidlab_core::koopman::{
    correlation, default_tolerance, joining_matrix, CylinderFunction, FiberedCylinder, System,
};
use rigidlab_core::rigidity::{
    halving_check, rigidity_along, set_based_alpha, theorem_check, CandidateSequence, Verdict,
};
use rigidlab_core::spectral::{autocorrelation_series, fejer_density, flatness_test};
use rigidlab_core::systems::{
    oracle_tower_correlation, tower_correlation, CylinderSet, DigitSystem, RankOneSchedule, TowerModel,
};

fn rs(depth: usize) -> GroupExtension {
    GroupExtension::new(DigitSystem::dyadic(depth).unwrap(), Cocycle::rudin_shapiro()).unwrap()
}

#[test]
fn mixed_radix_odometer_is_rigid_along_block_sizes() {
    let digits = DigitSystem::periodic(&[3, 2], 12).unwrap();
    let seq = CandidateSequence::adic_heights(&digits);
    let sys = System::Adic(digits);
    let tol = default_tolerance();
    let op = rigidity_along(&sys, &seq, 1..=5, usize::MAX, &tol).unwrap();
    let set = set_based_alpha(&sys, &seq, 1..=5, usize::MAX, &tol).unwrap();
    assert_eq!(op.alpha, Some(Interval::point(ratio(1, 1))));
    assert_eq!(op.alpha, set.alpha);
    // shifting every lag by one destroys rigidity on the first cells
    let shifted = rigidity_along(&sys, &seq.shifted(1), 1..=2, usize::MAX, &tol).unwrap();
    assert_eq!(shifted.alpha, Some(Interval::point(ratio(0, 1))));
}

#[test]
fn extension_pipeline_halves_alpha() {
    let ext = rs(18);
    let pow2 = CandidateSequence::explicit("2^n", (1..=14).map(|n| 1u64 << n)).unwrap();
    let tol = ratio(1, 50);
    let base = rigidity_along(&System::Adic(ext.base().clone()), &pow2, 1..=2, usize::MAX, &tol).unwrap();
    let lifted = rigidity_along(&System::Extension(ext.clone()), &pow2, 1..=2, usize::MAX, &tol).unwrap();
    assert_eq!(
        halving_check(base.alpha.as_ref(), lifted.alpha.as_ref(), &ratio(1, 50)),
        Verdict::Pass
    );
    let late = CandidateSequence::explicit("2^n", (6..=10).map(|n| 1u64 << n)).unwrap();
    let report = theorem_check(&ext, &late, 2, usize::MAX, &tol).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    assert!(report.residuals.iter().all(|r| r.lo() == &ratio(0, 1)));
}

#[test]
fn rs_spectrum_is_flat_morse_is_not() {
    for (c, flat) in [(Cocycle::rudin_shapiro(), true), (Cocycle::morse(), false)] {
        let sys = System::Extension(GroupExtension::new(DigitSystem::dyadic(16).unwrap(), c).unwrap());
        let f = CylinderFunction::fiber_sign(&sys).unwrap();
        let series = autocorrelation_series(&sys, &f, 32, false).unwrap();
        let est = fejer_density(&series, None, Some(256)).unwrap();
        assert_eq!(flatness_test(&est).consistent_with_flat(), flat);
    }
}

#[test]
fn table_cocycle_matches_builtin() {
    // the Rudin-Shapiro rule written out as a table
    let text = "modulus 2\nlookahead 1\n0 0 -> 0\n0 1 -> 1\n1 0 -> 0\n1 1 -> 1\nodd 0 -> 0\nodd 1 -> 1\neven 0 -> 1\neven 1 -> 0\n";
    let table = Cocycle::table(CocycleTable::parse(text).unwrap());
    let a = System::Extension(GroupExtension::new(DigitSystem::dyadic(10).unwrap(), table).unwrap());
    let b = System::Extension(rs(10));
    for k in [1u64, 3, 7, 100, 513] {
        assert_eq!(joining_matrix(&a, 2, k).unwrap(), joining_matrix(&b, 2, k).unwrap());
    }
}

#[test]
fn csv_output_is_deterministic() {
    let sys = System::Extension(rs(12));
    let seq = CandidateSequence::explicit("s", [64, 128, 256, 512]).unwrap();
    let once = || {
        let r = rigidity_along(&sys, &seq, 1..=2, usize::MAX, &default_tolerance()).unwrap();
        (r.to_csv(), joining_matrix(&sys, 2, 77).unwrap().to_csv())
    };
    assert_eq!(once(), once());
}

#[test]
fn chacon_tower_model_rigidity() {
    let model = TowerModel::new(RankOneSchedule::chacon(), 9).unwrap();
    let seq = CandidateSequence::rank_one_heights(&model.schedule, 7, model.max_height).unwrap();
    let est = rigidity_along(&model, &seq, 1..=2, usize::MAX, &ratio(1, 10)).unwrap();
    let set = set_based_alpha(&model, &seq, 1..=2, usize::MAX, &ratio(1, 10)).unwrap();
    for (a, b) in est.depths.iter().zip(&set.depths) {
        assert_eq!(a.per_lag, b.per_lag);
    }
    assert!(est.monotone);
}

fn schedule_strategy() -> impl Strategy<Value = RankOneSchedule> {
    (1u64..3, prop::collection::vec(0u64..3, 2..4))
        .prop_map(|(h, spacers)| RankOneSchedule::constant(h, spacers).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tower_counts_match_stacking(sched in schedule_strategy(), level_seed: u64, k in 0u64..12, extra in 1usize..3) {
        let n = 2;
        let m = n + extra;
        let h_n = sched.height(n, 1 << 20).unwrap();
        let h_m = sched.height(m, 1 << 20).unwrap();
        prop_assume!(k < h_m);
        let levels: Vec<u64> = (0..h_n).filter(|l| (level_seed >> (l % 64)) & 1 == 1).collect();
        prop_assume!(!levels.is_empty());
        prop_assert_eq!(
            tower_correlation(&sched, n, &levels, k, m).unwrap(),
            oracle_tower_correlation(&sched, n, &levels, k, m).unwrap()
        );
    }

    #[test]
    fn lifted_cylinders_match_oracle(depth in 3usize..8, seed: u64, k in 0u64..30, morse: bool) {
        let c = if morse { Cocycle::morse() } else { Cocycle::rudin_shapiro() };
        let sys = System::Extension(GroupExtension::new(DigitSystem::periodic(&[2, 3], depth).unwrap(), c).unwrap());
        let d = 2.min(depth);
        let cells = sys.digits().block_size(d);
        let members: Vec<u64> = (0..cells).filter(|a| (seed >> a) & 1 == 1).collect();
        let base = CylinderSet::new(sys.digits(), d, members).unwrap();
        let a = FiberedCylinder::on(&sys, base.clone(), [(seed % 2) as u32]).unwrap();
        let b = FiberedCylinder::on(&sys, base.shifted(1), [0, 1]).unwrap();
        prop_assert_eq!(
            correlation(&sys, &a, &b, k as i64).unwrap(),
            oracle_correlation(&sys, &a, &b, k).unwrap()
        );
    }
}
