use proptest::prelude::*;

use paraknap::dp::{best_profit_at, dp_min_weight_at, ProfitGrid};
use paraknap::fptas::{assemble, fptas_with, Variant};
use paraknap::greedy::greedy_at;
use paraknap::oracle::exact_opt_at;
use paraknap::{ClosedInterval, ExecMode, Item, ParametricInstance, Rational, SolutionPartition};

fn instance(max_n: usize) -> impl Strategy<Value = ParametricInstance> {
    let item = (1i64..=20, -10i64..=10, -10i64..=10).prop_map(|(p, a, b)| Item::new(p, a, b));
    (prop::collection::vec(item, 0..=max_n), 0i64..=50)
        .prop_map(|(items, w)| ParametricInstance::new(items, w).expect("valid"))
}

fn lambda() -> impl Strategy<Value = Rational> {
    (-240i64..=240, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d))
}

fn epsilon() -> impl Strategy<Value = Rational> {
    (1i64..=9).prop_map(|k| Rational::new(k, 10))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unscaled_dp_is_exact(inst in instance(7), l in lambda()) {
        let grid = ProfitGrid::unscaled(&inst);
        let (p, sol) = best_profit_at(&dp_min_weight_at(&inst, &grid, &l), &inst);
        prop_assert_eq!(p, exact_opt_at(&inst, &l).unwrap().0);
        prop_assert!(sol.is_feasible_at(&l, &inst.capacity_q()));
    }

    #[test]
    fn greedy_never_beats_the_optimum(inst in instance(7), l in lambda()) {
        let (pa, sol) = greedy_at(&inst, &l);
        prop_assert!(sol.is_feasible_at(&l, &inst.capacity_q()));
        prop_assert!(pa <= exact_opt_at(&inst, &l).unwrap().0);
    }

    #[test]
    fn partitions_are_valid_and_schedule_independent(inst in instance(6), eps in epsilon(), explicit in any::<bool>()) {
        let variant = if explicit { Variant::Explicit } else { Variant::Implicit };
        let seq = fptas_with(&inst, &eps, variant, ExecMode::Sequential).unwrap();
        let par = fptas_with(&inst, &eps, variant, ExecMode::Parallel).unwrap();
        seq.partition.validate(&inst).unwrap();
        prop_assert_eq!(&seq.partition, &par.partition);
        prop_assert!(seq.partition.cells.len() <= seq.cell_cap(variant));
        let back = SolutionPartition::from_json(&seq.partition.to_json(), &inst).unwrap();
        prop_assert_eq!(back, seq.partition);
    }

    #[test]
    fn instance_json_round_trips(inst in instance(8)) {
        prop_assert_eq!(ParametricInstance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn assemble_takes_the_best_cover(
        inst in instance(5),
        raw in prop::collection::vec((any::<u8>(), -20i64..=20, 0i64..=20, 0u8..3), 0..8),
    ) {
        let n = inst.len();
        let cands: Vec<_> = raw
            .iter()
            .map(|&(mask, lo, len, shape)| {
                let chosen: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let s = inst.solution(chosen).unwrap();
                let lo = Rational::from_integer(lo);
                let hi = &lo + &Rational::from_integer(len);
                let iv = match shape {
                    0 => ClosedInterval::new(lo.into(), hi.into()).unwrap(),
                    1 => ClosedInterval::left_ray(hi),
                    _ => ClosedInterval::right_ray(lo),
                };
                (iv, s)
            })
            .collect();
        let part = assemble(&inst, cands.clone());
        let mut cuts: Vec<Rational> = cands
            .iter()
            .flat_map(|(iv, _)| [iv.lo.finite().cloned(), iv.hi.finite().cloned()])
            .flatten()
            .collect();
        cuts.sort();
        cuts.dedup();
        let one = Rational::from_integer(1);
        let mut probes: Vec<Rational> = cuts.windows(2).map(|w| (&w[0] + &w[1]) / Rational::from_integer(2)).collect();
        if let (Some(f), Some(l)) = (cuts.first(), cuts.last()) {
            probes.push(f - &one);
            probes.push(l + &one);
        }
        for x in &probes {
            let best = cands
                .iter()
                .filter(|(iv, _)| iv.contains(x))
                .map(|(_, s)| s.profit)
                .max()
                .unwrap_or(0);
            prop_assert_eq!(part.profit_at(x), best);
        }
        for w in part.cells.windows(2) {
            prop_assert_ne!(&w[0], &w[1]);
        }
    }
}
