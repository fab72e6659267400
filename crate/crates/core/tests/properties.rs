mod common;

use common::oracle;
use metriclat_core::analysis::{is_d_irreducible, mli, r_base_check};
use metriclat_core::corpus::Corpus;
use metriclat_core::exact::int;
use metriclat_core::function_lattices::{hypograph, hypograph_set_lattice, lambda_cones, sup_metric};
use metriclat_core::generators::{divisor_lattice, powerset_lattice, subspace_lattice, Atom};
use metriclat_core::intervaluation::{check_intervaluation, CombineOp, Intervaluation};
use metriclat_core::ultravaluation::{check_ultravaluation, from_kappa, metric_from_ultravaluation};
use metriclat_core::valuation::{
    check_modular_law, difference_valuation, metric_from_valuation, valuation_from_difference,
};
use metriclat_core::ElementSet;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kappa_ultravaluations_are_max_intervaluations(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let s = c.set_lattice(5, 16);
        let w = from_kappa(&s, &c.kappa(s.ground().len())).unwrap();
        prop_assert!(check_ultravaluation(s.lattice(), w.table()).is_empty());
        let iv = Intervaluation::new(w.table(), CombineOp::Max);
        prop_assert!(check_intervaluation(s.lattice(), &iv).is_empty());
    }

    #[test]
    fn positivity_matches_metric_flag(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let s = c.set_lattice(4, 16);
        let w = from_kappa(&s, &c.kappa(s.ground().len())).unwrap();
        let d = metric_from_ultravaluation(s.lattice(), &w).unwrap();
        prop_assert_eq!(w.is_positive(s.lattice()), d.is_metric());
        prop_assert!(oracle::strong_triangle(&d));
    }

    #[test]
    fn mli_matches_oracle_and_ignores_scaling(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let s = c.set_lattice(5, 12);
        let l = s.lattice();
        let v = c.positive_valuation(l);
        let d = metric_from_valuation(l, &v).unwrap();
        let d2 = metric_from_valuation(l, &v.scaled(&int(2))).unwrap();
        let m = mli(l, &d);
        let expected: ElementSet = l.elements().filter(|&p| oracle::d_irreducible(l, &d, p)).collect();
        prop_assert_eq!(&m, &expected);
        prop_assert_eq!(m, mli(l, &d2));
    }

    #[test]
    fn difference_valuation_round_trips(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let s = c.set_lattice(5, 12);
        let l = s.lattice();
        let v = c.positive_valuation(l);
        prop_assert!(check_modular_law(l, &v).is_empty());
        let w = difference_valuation(l, &v).unwrap();
        let back = valuation_from_difference(l, w.table(), v.get(l.bottom()).clone()).unwrap();
        prop_assert_eq!(back.values(), v.values());
    }

    #[test]
    fn whole_lattice_is_a_zero_base(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let s = c.set_lattice(4, 12);
        let l = s.lattice();
        let d = metric_from_valuation(l, &c.positive_valuation(l)).unwrap();
        let all: ElementSet = l.elements().collect();
        let report = r_base_check(l, &d, &all, &int(0));
        prop_assert!(report.covered);
        let base: Vec<_> = all.iter().copied().collect();
        prop_assert!(oracle::is_zero_base(l, &d, &base));
    }
}

#[test]
fn lambda_cones_are_minimal_and_span() {
    for lat in common::desk_lipschitz_lattices().iter().filter(|lat| lat.space().basepoint() == Some(0)) {
        let l = lat.lattice();
        let cones = lambda_cones(lat);
        for x in 0..lat.space().len() {
            for r in 0..=lat.max_level() {
                let with_value: Vec<_> = l.elements().filter(|&f| lat.level(f, x) == r).collect();
                let least = with_value.iter().copied().find(|&f| with_value.iter().all(|&g| l.leq(f, g))).unwrap();
                assert!(cones.contains(&least));
            }
        }
        let base: Vec<_> = cones.iter().copied().collect();
        assert!(oracle::is_zero_base(l, &sup_metric(lat), &base));
    }
}

#[test]
fn hypographs_turn_joins_into_unions() {
    for lat in common::desk_lipschitz_lattices().iter().filter(|lat| lat.lattice().size() <= 40) {
        let l = lat.lattice();
        for f in l.elements() {
            for g in l.elements() {
                let (hf, hg) = (hypograph(lat, f), hypograph(lat, g));
                let mut union = hf.clone();
                union.union_with(&hg);
                let mut meet = hf;
                meet.intersect_with(&hg);
                assert_eq!(hypograph(lat, l.join(f, g)), union);
                assert_eq!(hypograph(lat, l.meet(f, g)), meet);
            }
        }
        assert_eq!(hypograph_set_lattice(lat).unwrap().lattice().size(), l.size());
    }
}

#[test]
fn generator_counts() {
    assert_eq!(divisor_lattice(360).unwrap().lattice().size(), 24);
    assert_eq!(powerset_lattice((0..4).map(Atom::Int).collect()).unwrap().lattice().size(), 16);
    // 0, three lines and the plane over GF(2)
    let v = subspace_lattice(2, 2).unwrap();
    assert_eq!(v.lattice().size(), 5);
    assert!(!v.lattice().is_distributive());
    // each line is 2 away from the other lines but only 1 away from their join
    let d = metric_from_valuation(v.lattice(), &v.dimension()).unwrap();
    let ji = v.lattice().join_irreducibles_nonzero();
    assert_eq!(ji.len(), 3);
    assert!(ji.iter().all(|&p| !is_d_irreducible(v.lattice(), &d, p)));
    assert!(ji.iter().all(|&p| !oracle::d_irreducible(v.lattice(), &d, p)));
}
