use proptest::prelude::*;

use cpsagree::agreement::{generate_trial, GeneratorConfig};
use cpsagree::assumptions::{check_one_closed, check_reflection_atoms, local_consistency_all};
use cpsagree::augmentation::{augment_family, extend};
use cpsagree::cli::{Instance, Query};
use cpsagree::corpus::ranked_cps;
use cpsagree::cps::Cps;
use cpsagree::epistemic::common_certainty;
use cpsagree::foundations::{int, Event, SetFamily, StateSpace};
use cpsagree::renyi::{regenerate, represent, verify};

fn family(max_states: usize) -> impl Strategy<Value = SetFamily> {
    (1..=max_states).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        prop::collection::vec(1..=full, 0..6).prop_map(move |bits| {
            SetFamily::new(
                n,
                bits.into_iter()
                    .map(Event::from_bits)
                    .chain([Event::full(n)]),
            )
            .unwrap()
        })
    })
}

fn cps(max_states: usize) -> impl Strategy<Value = Cps> {
    family(max_states)
        .prop_flat_map(|f| {
            let n = f.size();
            (
                Just(f.close()),
                prop::collection::vec(0..n, n),
                prop::collection::vec(0u32..4, n),
            )
        })
        .prop_filter_map("no valid ranked CPS", |(f, rank, weight)| {
            ranked_cps(&f, &rank, &weight)
        })
}

fn event_in(n: usize) -> impl Strategy<Value = Event> {
    (0..1u64 << n).prop_map(Event::from_bits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closure_is_idempotent_and_monotone(f in family(6), extra in 1u64..64) {
        let c = f.close();
        prop_assert!(c.is_closed());
        prop_assert_eq!(&c.close(), &c);
        prop_assert!(f.is_subfamily(&c));
        let bigger = SetFamily::new(
            f.size(),
            f.iter().chain([Event::from_bits(extra & f.full().bits())].into_iter().filter(|e| !e.is_empty())),
        ).unwrap();
        prop_assert!(c.is_subfamily(&bigger.close()));
    }

    #[test]
    fn algebra_atoms_partition_the_space(f in family(6)) {
        let atoms = f.close().algebra_atoms();
        let mut union = Event::EMPTY;
        for (i, &x) in atoms.iter().enumerate() {
            prop_assert!(!x.is_empty());
            for &y in &atoms[i + 1..] {
                prop_assert!(!x.meets(y));
            }
            union = union.union(x);
        }
        prop_assert_eq!(union, f.full());
    }

    #[test]
    fn atoms_are_smallest_members(c in cps(6)) {
        for w in 0..c.size() {
            let m = c.atom(w);
            prop_assert!(m.contains(w));
            prop_assert!(c.family().contains(m));
            for g in c.family().iter().filter(|g| g.contains(w)) {
                prop_assert!(m.is_subset(g));
            }
        }
    }

    #[test]
    fn knowledge_implies_certainty(c in cps(6), e in event_in(6), f in event_in(6)) {
        let full = Event::full(c.size());
        let (e, f) = (e.intersection(full), f.intersection(full));
        prop_assert!(c.knowledge_event(e).is_subset(c.certainty_event(e)));
        let ef = e.union(f);
        prop_assert!(c.certainty_event(e).is_subset(c.certainty_event(ef)));
        prop_assert!(c.knowledge_event(e).is_subset(c.knowledge_event(ef)));
    }

    #[test]
    fn common_certainty_limit_is_a_fixed_point(a in cps(5), b in cps(5), e in event_in(5)) {
        prop_assume!(a.size() == b.size());
        let e = e.intersection(Event::full(a.size()));
        let one = int(1);
        let t = common_certainty(&a, &b, e, &one, &one).unwrap();
        let (x, y) = *t.levels.last().unwrap();
        prop_assert_eq!(x.intersection(a.certainty_event(y)), x);
        prop_assert_eq!(y.intersection(b.certainty_event(x)), y);
        prop_assert_eq!(t.limit, x.intersection(y));
        prop_assert!(t.limit.is_subset(t.levels[0].0.intersection(t.levels[0].1)));
    }

    #[test]
    fn extension_is_a_one_closed_superset(c in cps(6)) {
        let r = extend(&c).unwrap();
        let hat = &r.extended_cps;
        prop_assert!(hat.validate().is_valid());
        prop_assert!(check_one_closed(hat).holds);
        prop_assert_eq!(&hat.restrict(c.family()).unwrap(), &c);
        prop_assert_eq!(&augment_family(hat).unwrap(), hat.family());
    }

    #[test]
    fn representation_round_trips(c in cps(6)) {
        let dof = represent(&c).unwrap();
        prop_assert!(verify(&dof, c.family()).holds);
        prop_assert_eq!(regenerate(&dof, c.family()).unwrap(), c);
    }

    #[test]
    fn instances_survive_serialization(
        a in cps(5),
        b in cps(5),
        e in event_in(5),
        omega in 0usize..5,
    ) {
        prop_assume!(a.size() == b.size());
        let n = a.size();
        let space = StateSpace::new((0..n).map(|i| format!("s{i}"))).unwrap();
        let relabel = |c: &Cps| Cps::new(space.clone(), c.family().clone(), c.measures().clone()).unwrap();
        let mut inst = Instance::new(relabel(&a), relabel(&b));
        inst.comment = Some("generated".into());
        inst.query = Some(Query {
            event: e.intersection(Event::full(n)),
            qa: a.belief_at(omega % n, e),
            qb: b.belief_at(omega % n, e),
            omega: omega % n,
        });
        let text = inst.to_json();
        let back = Instance::parse(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_json(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_satisfy_every_hypothesis(
        n in 1usize..=6,
        seed in any::<u64>(),
        trial in 0usize..1000,
    ) {
        let config = GeneratorConfig::new(n, seed, trial + 1);
        let (a, b) = generate_trial(&config, trial).unwrap();
        for c in [&a, &b] {
            prop_assert!(c.validate().is_valid());
            prop_assert!(check_one_closed(c).holds);
            prop_assert!(check_reflection_atoms(c).unwrap().holds);
        }
        prop_assert!(local_consistency_all(&a, &b).unwrap().iter().all(|x| x.holds));
        prop_assert_eq!(generate_trial(&config, trial).unwrap(), (a, b));
    }
}
