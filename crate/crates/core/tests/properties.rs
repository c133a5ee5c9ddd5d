use proptest::prelude::*;
use unimeas::harness::{replay, Oracle, OracleOptions};
use unimeas::rational::{q, qf};
use unimeas::{
    decide, parse_instance, CSet, CodomainDescriptor, Error, ExtRational, Func, Instance, Point, Property,
    SpaceDescriptor, Tail, Verdict, Q,
};

fn weight() -> impl Strategy<Value = Q> {
    prop::sample::select(vec![q(0), qf(1, 2), q(1), q(3)])
}

fn real() -> impl Strategy<Value = Point> {
    prop::sample::select(vec![q(-2), qf(-1, 2), q(0), q(1), qf(5, 2)]).prop_map(Point::Real)
}

fn label() -> impl Strategy<Value = Point> {
    (0usize..3).prop_map(Point::Label)
}

fn metric3() -> CodomainDescriptor {
    CodomainDescriptor::FiniteMetric {
        points: vec!["p".into(), "q".into(), "r".into()],
        distances: vec![vec![q(0), q(1), q(2)], vec![q(1), q(0), q(1)], vec![q(2), q(1), q(0)]],
    }
}

fn weak3() -> impl Strategy<Value = CodomainDescriptor> {
    let table = prop::collection::vec(prop::sample::select(vec![q(0), q(1), q(3)]), 3);
    prop::collection::vec(table, 1..=2).prop_map(|tables| CodomainDescriptor::WeakFamily {
        points: vec!["p".into(), "q".into(), "r".into()],
        tables,
    })
}

fn finite_instance() -> impl Strategy<Value = Instance> {
    (1usize..=4).prop_flat_map(|n| {
        let space = (
            prop::collection::vec(weight(), n),
            prop::collection::vec(1u32..(1 << n), 0..=2),
        )
            .prop_map(move |(weights, gens)| SpaceDescriptor::Finite {
                points: (0..n).map(|i| format!("x{i}")).collect(),
                generators: gens
                    .into_iter()
                    .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
                    .collect(),
                weights,
            });
        let target = prop_oneof![
            prop::collection::vec(real(), n).prop_map(|v| (CodomainDescriptor::RationalLine, v)),
            prop::collection::vec(label(), n).prop_map(|v| (metric3(), v)),
            (weak3(), prop::collection::vec(label(), n)),
        ];
        (space, target).prop_map(|(s, (c, v))| Instance::new(s, c, Func::Table(v)).unwrap())
    })
}

fn fincof_instance() -> impl Strategy<Value = Instance> {
    let minf = prop::sample::select(vec![ExtRational::from_int(0), ExtRational::from_int(1), ExtRational::INF]);
    let space = (prop::collection::vec(weight(), 0..=2), prop::sample::select(vec![q(0), q(1)]), minf)
        .prop_map(|(prefix, w_inf, m_inf)| SpaceDescriptor::FinCofNat { prefix, w_inf, m_inf });
    let tail = prop_oneof![
        real().prop_map(Tail::Constant),
        prop::collection::vec(real(), 2..=3).prop_map(Tail::Periodic),
        (
            prop::sample::select(vec![q(-1), qf(1, 2), q(2)]),
            prop::sample::select(vec![q(0), qf(1, 2)])
        )
            .prop_map(|(a, b)| Tail::Affine { a, b }),
    ];
    (space, prop::collection::vec(real(), 0..=2), tail).prop_map(|(s, prefix, tail)| {
        Instance::new(s, CodomainDescriptor::RationalLine, Func::sequence(prefix, tail).unwrap()).unwrap()
    })
}

fn any_instance() -> impl Strategy<Value = Instance> {
    prop_oneof![3 => finite_instance(), 1 => fincof_instance()]
}

fn holds(p: Property, inst: &Instance) -> Option<bool> {
    decide(p, inst).ok().map(|v| v.holds)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn text_format_round_trips(inst in any_instance()) {
        prop_assert_eq!(parse_instance(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn deciders_agree_with_the_oracle_and_replay(inst in any_instance()) {
        for cutoff in [16, 64] {
            let oracle = Oracle::new(&inst, OracleOptions { cutoff, ..Default::default() }).unwrap();
            for p in Property::ALL {
                match (decide(p, &inst), oracle.decide(p)) {
                    (Ok(d), Ok(o)) => {
                        prop_assert_eq!(d.holds, o.holds, "{} at cutoff {}\n{}", p, cutoff, inst.to_text());
                        let r = replay(&oracle, &d);
                        prop_assert!(r.is_ok(), "{}: {:?}\n{}", p, r, inst.to_text());
                    }
                    (Err(_), Err(_)) | (Ok(_), Err(Error::ResourceCap(_))) => {}
                    (d, o) => prop_assert!(false, "{}: {:?} vs {:?}", p, d.map(|v| v.holds), o.map(|v| v.holds)),
                }
            }
        }
    }

    #[test]
    fn verdicts_serialize_losslessly(inst in any_instance()) {
        for p in Property::ALL {
            if let Ok(v) = decide(p, &inst) {
                let json = serde_json::to_string(&v).unwrap();
                prop_assert_eq!(serde_json::from_str::<Verdict>(&json).unwrap(), v);
            }
        }
    }

    #[test]
    fn implications_between_notions(inst in any_instance()) {
        prop_assert_eq!(holds(Property::T1, &inst), holds(Property::T2, &inst));
        if holds(Property::T2, &inst) == Some(true) {
            prop_assert_eq!(holds(Property::Smooth, &inst), Some(true));
            prop_assert_eq!(holds(Property::Ubm, &inst), Some(true));
        }
        if holds(Property::Ubm, &inst) == Some(true) {
            prop_assert_eq!(holds(Property::Base, &inst), Some(true));
        }
    }

    #[test]
    fn inner_and_outer_charges(inst in finite_instance(), mask in 0u32..16) {
        let s = &inst.space;
        let n = s.ground_len().unwrap();
        let a = CSet::finite((0..n).filter(|i| mask & (1 << i) != 0));
        let (outer, inner) = (s.outer(&a), s.inner(&a));
        prop_assert!(inner <= outer);
        prop_assert_eq!(inner + s.outer(&s.complement(&a)), s.total_mass());
        let (member, sw) = s.pj_membership(&a);
        prop_assert_eq!(member, outer == inner);
        prop_assert!(sw.lower.is_subset(&a) && a.is_subset(&sw.upper));
        if s.field_membership(&a) {
            prop_assert!(member);
            prop_assert_eq!(s.charge(&a).unwrap(), outer);
        }
    }
}
