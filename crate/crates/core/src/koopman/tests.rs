use super::oracle::{oracle_correlation, oracle_inner_product};
use super::*;
use crate::cocycles::Cocycle;
use proptest::prelude::*;

fn dyadic(n: usize) -> System {
    DigitSystem::dyadic(n).unwrap().into()
}

fn ext(n: usize, c: Cocycle) -> System {
    GroupExtension::new(DigitSystem::dyadic(n).unwrap(), c).unwrap().into()
}

fn prefix(sys: &System, digits: &[u32], fiber: &[u32]) -> FiberedCylinder {
    let base = CylinderSet::from_prefix(sys.digits(), digits).unwrap();
    FiberedCylinder::on(sys, base, fiber.iter().copied()).unwrap()
}

fn dense(m: &JoiningMatrix) -> Vec<Vec<Rational>> {
    (0..m.size())
        .map(|i| (0..m.size()).map(|j| m.get(i, j).midpoint()).collect())
        .collect()
}

fn permutation(n: usize, shift: usize) -> Vec<Vec<Rational>> {
    let mut d = vec![vec![int(0); n]; n];
    for b in 0..n {
        d[(b + shift) % n][b] = int(1);
    }
    d
}

#[test]
fn dyadic_correlation_examples() {
    let s = dyadic(8);
    let a = prefix(&s, &[0], &[0]);
    assert_eq!(correlation(&s, &a, &a, 1).unwrap(), Interval::zero());
    assert_eq!(correlation(&s, &a, &a, 2).unwrap(), Interval::point(ratio(1, 2)));
    let b = prefix(&s, &[0, 0], &[0]);
    assert_eq!(correlation(&s, &b, &b, 4).unwrap(), Interval::point(ratio(1, 4)));
    assert!(matches!(correlation(&s, &a, &a, -1), Err(Error::NegativeLag(-1))));
}

#[test]
fn rs_correlation_near_half_measure() {
    let s = ext(14, Cocycle::rudin_shapiro());
    let a = prefix(&s, &[0], &[0]);
    for n in 2..8 {
        let c = correlation(&s, &a, &a, 1 << n).unwrap();
        assert!(c.contains(&ratio(1, 8)), "k = 2^{n}: {c}");
        assert!(c.width() <= ratio(1 << n, 1u64 << 13));
    }
}

#[test]
fn oracle_examples_match() {
    let s = dyadic(6);
    let a = prefix(&s, &[0], &[0]);
    for k in [1u64, 2] {
        assert_eq!(
            oracle_correlation(&s, &a, &a, k).unwrap(),
            correlation(&s, &a, &a, k as i64).unwrap()
        );
    }
    let m = ext(8, Cocycle::morse());
    let a = prefix(&m, &[0], &[0]);
    assert_eq!(
        oracle_correlation(&m, &a, &a, 1).unwrap(),
        correlation(&m, &a, &a, 1).unwrap()
    );
}

#[test]
fn mismatched_fibers_rejected() {
    let s = ext(6, Cocycle::morse());
    let base = CylinderSet::from_prefix(s.digits(), &[0]).unwrap();
    let a = FiberedCylinder::new(base, [0], 3).unwrap();
    assert!(matches!(correlation(&s, &a, &a, 1), Err(Error::FiberMismatch { .. })));
    assert!(FiberedCylinder::new(CylinderSet::whole(), [2], 2).is_err());
}

#[test]
fn fibered_measure() {
    let s = ext(6, Cocycle::morse());
    assert_eq!(prefix(&s, &[0, 1], &[1]).measure(), ratio(1, 8));
    assert_eq!(prefix(&s, &[0, 1], &[0, 1]).measure(), ratio(1, 4));
}

#[test]
fn joining_matrix_examples() {
    let s = dyadic(6);
    assert_eq!(dense(&joining_matrix(&s, 1, 1).unwrap()), permutation(2, 1));
    assert_eq!(dense(&joining_matrix(&s, 1, 2).unwrap()), permutation(2, 0));
    let t: System = DigitSystem::new(vec![3, 3]).unwrap().into();
    let m = joining_matrix(&t, 1, 1).unwrap();
    assert_eq!(dense(&m), permutation(3, 1));
    assert!(m.is_exactly_bistochastic());
}

#[test]
fn weak_limit_examples() {
    let s = dyadic(12);
    let tol = default_tolerance();
    let pow: Vec<u64> = (1..=12).map(|n| 1 << n).collect();
    let w = weak_limit(&s, 2, &pow, 12, &tol).unwrap();
    assert!(w.converged);
    assert!(w.movement.is_zero());
    assert_eq!(dense(&w.limit), permutation(4, 0));
    let shifted: Vec<u64> = pow.iter().map(|k| k + 1).collect();
    let w = weak_limit(&s, 2, &shifted, 12, &tol).unwrap();
    assert_eq!(dense(&w.limit), permutation(4, 1));
}

#[test]
fn rs_weak_limit_is_fiber_average() {
    let s = ext(16, Cocycle::rudin_shapiro());
    let pow: Vec<u64> = (1..=12).map(|n| 1 << n).collect();
    let w = weak_limit(&s, 2, &pow, 12, &ratio(1, 100)).unwrap();
    let target = JoiningMatrix::identity(4).kron_uniform(2);
    let dist = w.limit.midpoint_distance(&target).unwrap();
    assert!(dist <= ratio(1, 100), "distance {dist}");
    assert!(w.limit.is_bistochastic());
}

#[test]
fn weak_limit_errors() {
    let s = dyadic(4);
    let tol = default_tolerance();
    assert!(matches!(
        weak_limit(&s, 1, &[4], 5, &tol),
        Err(Error::TooFewIterates(1))
    ));
    assert!(matches!(
        weak_limit(&s, 1, &[4, 2], 5, &tol),
        Err(Error::NonIncreasingSequence)
    ));
    let e = ext(4, Cocycle::morse());
    assert!(matches!(
        weak_limit(&e, 1, &[8, 16, 32], 5, &tol),
        Err(Error::TooFewIterates(1))
    ));
}

#[test]
fn projection_examples() {
    let s = ext(6, Cocycle::morse());
    let sign = CylinderFunction::fiber_sign(&s).unwrap();
    assert!(project_h0(&sign).values().iter().all(Zero::is_zero));
    let g = CylinderFunction::digit_sign(&s).unwrap();
    assert_eq!(project_h0(&g), g);
    let a = prefix(&s, &[0], &[0]);
    let ind = CylinderFunction::indicator(s.digits(), &a).unwrap();
    let half = CylinderFunction::indicator(s.digits(), &FiberedCylinder::base_only(a.base().clone(), 2))
        .unwrap()
        .scaled(&ratio(1, 2));
    assert_eq!(project_h0(&ind), half);
    let perp = project_h0_perp(&ind);
    assert!(project_h0(&perp).values().iter().all(Zero::is_zero));
    assert!(project_h0(&ind).inner(&perp).unwrap().is_zero());
}

#[test]
fn inner_product_examples() {
    let s = dyadic(10);
    let f = CylinderFunction::digit_sign(&s).unwrap();
    for k in 0..6 {
        let expect = if k % 2 == 0 { int(1) } else { int(-1) };
        assert_eq!(inner_product_lag(&s, &f, &f, k).unwrap(), Interval::point(expect));
    }
    let r = ext(12, Cocycle::rudin_shapiro());
    let f = CylinderFunction::fiber_sign(&r).unwrap();
    assert!(inner_product_lag(&r, &f, &f, 1).unwrap().contains(&int(0)));
    let m = ext(12, Cocycle::morse());
    let f = CylinderFunction::fiber_sign(&m).unwrap();
    let rho = inner_product_lag(&m, &f, &f, 1).unwrap();
    assert!(rho.contains(&ratio(-1, 3)));
    assert!(rho.width() <= ratio(1, 1 << 10));
}

#[test]
fn refinement_consistency() {
    for sys in [dyadic(8), ext(8, Cocycle::rudin_shapiro()), ext(8, Cocycle::morse())] {
        for k in [1u64, 3, 8, 13] {
            let fine = joining_matrix(&sys, 3, k).unwrap();
            let coarse = joining_matrix(&sys, 2, k).unwrap();
            assert_eq!(fine.coarsen(2, 4).unwrap(), coarse, "{} k={k}", sys.label());
        }
    }
}

#[test]
fn entries_are_cell_correlations() {
    // M[i][j] = mu(C_i ∩ T^k C_j) / mu(C_i), and the transpose reads T^{-k}
    let sys = ext(8, Cocycle::rudin_shapiro());
    let k = 5;
    let m = joining_matrix(&sys, 2, k).unwrap();
    let t = m.transpose();
    let cell = |i: usize| {
        let base = CylinderSet::new(sys.digits(), 2, [(i / 2) as u64]).unwrap();
        FiberedCylinder::on(&sys, base, [(i % 2) as u32]).unwrap()
    };
    let scale = int(8);
    for i in 0..m.size() {
        for j in 0..m.size() {
            let c = correlation(&sys, &cell(j), &cell(i), k as i64).unwrap();
            assert_eq!(m.get(i, j), c.scale(&scale));
            assert_eq!(t.get(j, i), c.scale(&scale));
        }
    }
}

#[test]
fn cell_returns_match_correlations() {
    for sys in [dyadic(7), ext(7, Cocycle::rudin_shapiro()), ext(7, Cocycle::morse())] {
        for k in [1u64, 4, 8, 12] {
            let mut seen = Vec::new();
            let per = for_each_cell_return(&sys, 2, k, |a, y, lo, hi| seen.push((a, y, lo, hi))).unwrap();
            assert_eq!(seen.len(), 4 * sys.fiber_modulus() as usize);
            for (a, y, lo, hi) in seen {
                let base = CylinderSet::new(sys.digits(), 2, [a]).unwrap();
                let c = FiberedCylinder::on(&sys, base, [y]).unwrap();
                let expect = correlation(&sys, &c, &c, k as i64)
                    .unwrap()
                    .scale(&(Rational::one() / c.measure()));
                assert_eq!(Interval::new(ratio(lo, per), ratio(hi, per)), expect);
            }
        }
    }
}

#[test]
fn resource_bound_surfaces() {
    let e = GroupExtension::new(DigitSystem::dyadic(12).unwrap(), Cocycle::morse())
        .unwrap()
        .with_max_points(1 << 10);
    let s: System = e.into();
    let a = prefix(&s, &[0], &[0]);
    assert!(matches!(correlation(&s, &a, &a, 1), Err(Error::Resource(_))));
}

fn system_strategy() -> impl Strategy<Value = System> {
    (prop::collection::vec(2u32..4, 2..7), 0usize..3).prop_map(|(radices, kind)| {
        let base = DigitSystem::new(radices).unwrap();
        match kind {
            0 => System::Adic(base),
            1 => System::Extension(GroupExtension::new(base, Cocycle::morse()).unwrap()),
            _ => System::Extension(GroupExtension::new(base, Cocycle::rudin_shapiro()).unwrap()),
        }
    })
}

fn random_set(sys: &System, depth: usize, seed: u64) -> FiberedCylinder {
    let digits = sys.digits();
    let cells = digits.block_size(depth);
    let members = (0..cells).filter(|r| (seed >> (r % 61)) & 1 == 1);
    let base = CylinderSet::new(digits, depth, members).unwrap();
    let m = sys.fiber_modulus();
    let fiber = (0..m).filter(|y| (seed >> (y + 3)) & 1 == 1 || m == 1);
    FiberedCylinder::on(sys, base, fiber).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fast_path_matches_oracle(sys in system_strategy(), da in 0usize..3, db in 0usize..3, sa: u64, sb: u64, k in 0u64..40) {
        let a = random_set(&sys, da.min(sys.depth()), sa);
        let b = random_set(&sys, db.min(sys.depth()), sb);
        prop_assert_eq!(
            correlation(&sys, &a, &b, k as i64).unwrap(),
            oracle_correlation(&sys, &a, &b, k).unwrap()
        );
    }

    #[test]
    fn inner_products_match_oracle(sys in system_strategy(), sa: u64, sb: u64, k in 0u64..24) {
        let d = sys.depth().min(2);
        let terms = |seed: u64| vec![
            (ratio((seed % 7) as i64 - 3, 2), random_set(&sys, d, seed)),
            (int(1), random_set(&sys, 1, seed.rotate_left(17))),
        ];
        let f = CylinderFunction::from_terms(sys.digits(), sys.fiber_modulus(), &terms(sa)).unwrap();
        let g = CylinderFunction::from_terms(sys.digits(), sys.fiber_modulus(), &terms(sb)).unwrap();
        prop_assert_eq!(
            inner_product_lag(&sys, &f, &g, k as i64).unwrap(),
            oracle_inner_product(&sys, &f, &g, k).unwrap()
        );
    }

    #[test]
    fn matrices_are_bistochastic(sys in system_strategy(), d in 0usize..3, k in 0u64..50) {
        let m = joining_matrix(&sys, d.min(sys.depth()), k).unwrap();
        prop_assert!(m.is_bistochastic());
        if !m.rows().iter().flatten().any(|(_, e)| !e.is_point()) {
            prop_assert!(m.is_exactly_bistochastic());
        }
    }

    #[test]
    fn projection_is_idempotent(sa: u64) {
        let sys = ext(4, Cocycle::morse());
        let f = CylinderFunction::from_terms(sys.digits(), 2, &[(int(2), random_set(&sys, 2, sa))]).unwrap();
        let p = project_h0(&f);
        prop_assert_eq!(project_h0(&p), p.clone());
        prop_assert!(p.inner(&f.sub(&p).unwrap()).unwrap().is_zero());
    }
}
