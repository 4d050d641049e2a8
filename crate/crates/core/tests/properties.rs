use num_traits::Zero;
use proptest::prelude::*;

use fracmat_core::certify::brute_force_optimum;
use fracmat_core::instance::{InstanceFile, ResultFile};
use fracmat_core::matroid::{ElementSet, DEFAULT_FLAT_BUDGET};
use fracmat_core::polytope::{uncross, FormalSum, MatchingPolytope};
use fracmat_core::rational::{from_usize, int, ratio};
use fracmat_core::sweep::SweepConfig;
use fracmat_core::weighted::{solve_max_weight, solve_max_weight_perfect};
use fracmat_core::Error;

fn small() -> SweepConfig {
    SweepConfig {
        max_elements: 7,
        max_rank: 4,
        max_lines: 6,
        ..SweepConfig::default()
    }
}

fn instance() -> impl Strategy<Value = InstanceFile> {
    (any::<u64>(), 0usize..64)
        .prop_map(|(seed, index)| SweepConfig { seed, ..small() }.generate(index))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_axioms(file in instance(), a in any::<u64>(), b in any::<u64>()) {
        let m = file.build().unwrap().matroid;
        let ground = m.ground();
        let x = ElementSet::from_bits(a).intersection(ground);
        let y = ElementSet::from_bits(b).intersection(ground);
        let r = |s| m.rank(s).unwrap();
        prop_assert_eq!(r(ElementSet::EMPTY), 0);
        prop_assert!(r(x) <= x.len());
        prop_assert!(r(x.intersection(y)) <= r(x));
        prop_assert!(r(x.union(y)) + r(x.intersection(y)) <= r(x) + r(y));
        let closed = m.closure(x).unwrap();
        prop_assert_eq!(closed.rank, r(x));
        prop_assert_eq!(m.closure(closed.elements).unwrap(), closed);
    }

    #[test]
    fn weighted_matches_oracle(file in instance()) {
        let inst = file.build().unwrap();
        let (m, lines, w) = (&inst.matroid, &inst.lines, &inst.weights);
        let solution = solve_max_weight(m, lines, w, DEFAULT_FLAT_BUDGET).unwrap();
        let oracle = brute_force_optimum(m, lines, w, false, DEFAULT_FLAT_BUDGET).unwrap();
        prop_assert_eq!(Some(solution.objective(w)), oracle);
    }

    #[test]
    fn perfect_matches_oracle(file in instance()) {
        let inst = file.build().unwrap();
        let (m, lines, w) = (&inst.matroid, &inst.lines, &inst.weights);
        let oracle = brute_force_optimum(m, lines, w, true, DEFAULT_FLAT_BUDGET).unwrap();
        match solve_max_weight_perfect(m, lines, w, DEFAULT_FLAT_BUDGET) {
            Ok(solution) => {
                prop_assert_eq!(Some(solution.objective(w)), oracle);
                prop_assert_eq!(solution.matching.size() * int(2), from_usize(m.full_rank()));
            }
            Err(Error::NoPerfectMatching) => prop_assert!(oracle.is_none()),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn uncrossing_keeps_degrees_and_rank(file in instance(), picks in prop::collection::vec((any::<u64>(), 1i64..4), 1..6)) {
        let inst = file.build().unwrap();
        let m = &inst.matroid;
        let mut y = FormalSum::new();
        for (bits, c) in picks {
            let flat = m.closure(ElementSet::from_bits(bits).intersection(m.ground())).unwrap();
            y.add(flat, ratio(c, 2));
        }
        let out = uncross(m, &y).unwrap();
        prop_assert!(out.is_chain());
        prop_assert!(out.rank() <= y.rank());
        for (after, before) in out.degrees(&inst.lines).iter().zip(y.degrees(&inst.lines)) {
            prop_assert!(*after >= before);
        }
        prop_assert!(out.iter().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn instance_json_round_trips(file in instance()) {
        let back = InstanceFile::parse(&file.to_json()).unwrap();
        prop_assert_eq!(back, file);
    }
}

#[test]
fn max_size_dual_is_half_integral_chain() {
    let config = small();
    for i in 0..40 {
        let inst = config.generate(i).build().unwrap();
        let p = MatchingPolytope::new(&inst.matroid, &inst.lines, DEFAULT_FLAT_BUDGET).unwrap();
        let (_, nu) = p.max_size_matching().unwrap();
        let y = p
            .half_integer_dual(&vec![int(1); inst.lines.len()])
            .unwrap();
        assert!(y.is_chain() && y.is_half_integral(), "instance {i}");
        assert_eq!(y.rank(), nu, "instance {i}");
    }
}

#[test]
fn solved_results_reverify() {
    let config = small();
    for i in 0..24 {
        let inst = config.generate(i).build().unwrap();
        let problem = fracmat_core::instance::Problem::MaxWeight;
        let result = fracmat_core::instance::solve(&inst, problem, DEFAULT_FLAT_BUDGET).unwrap();
        let back = ResultFile::parse(&result.to_json()).unwrap();
        let certs = back.verify(&inst, DEFAULT_FLAT_BUDGET).unwrap();
        assert!(certs.iter().all(|c| c.passed()), "instance {i}: {certs:?}");
    }
}
