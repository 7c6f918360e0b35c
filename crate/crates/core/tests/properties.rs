use std::collections::{BTreeSet, HashSet, VecDeque};

use desmod_core::checkers::{check, Engine, Property, PropertyQuery};
use desmod_core::compose::compose_system;
use desmod_core::observation::{build_observer, Estimator};
use desmod_core::project::{project, Dfa};
use desmod_core::{parallel_compose, CompositeState, ModularSystem, Nfa, NfaBuilder};
use proptest::prelude::*;

const EVENTS: [&str; 5] = ["a", "b", "c", "u", "v"];

/// `(src, event, dst)` triples over at most `n` states plus initial and marked sets.
fn module_strategy(name: &'static str, n: u32) -> impl Strategy<Value = Nfa> {
    (
        prop::collection::vec((0..n, 0..EVENTS.len(), 0..n), 1..10),
        prop::collection::btree_set(0..n, 1..3),
        prop::collection::btree_set(0..n, 0..3),
        prop::collection::btree_set(0..EVENTS.len(), 1..4),
    )
        .prop_map(move |(trans, init, marked, extra)| {
            let mut b = NfaBuilder::new(name);
            for s in 0..n {
                b.state(s.to_string());
            }
            for e in extra {
                b.event(EVENTS[e]);
            }
            for (s, e, t) in trans {
                b.transition(s.to_string(), EVENTS[e], t.to_string());
            }
            for s in init {
                b.initial(s.to_string());
            }
            b.no_marked();
            for s in marked {
                b.marked(s.to_string());
            }
            b.build().unwrap()
        })
}

fn unobs() -> BTreeSet<String> {
    ["u", "v"].iter().map(|s| s.to_string()).collect()
}

fn system_strategy() -> impl Strategy<Value = ModularSystem> {
    prop::collection::vec(
        prop_oneof![module_strategy("A", 3), module_strategy("B", 4)],
        1..3,
    )
    .prop_map(|mut ms| {
        if ms.len() == 2 {
            ms[1] = ms[1].clone().renamed("C");
        }
        let used: BTreeSet<String> = ms
            .iter()
            .flat_map(|m| m.alphabet().names().iter().cloned())
            .collect();
        let u: BTreeSet<String> = unobs().intersection(&used).cloned().collect();
        ModularSystem::new(ms, &u).unwrap()
    })
}

/// Language equality of two DFAs over the same event names.
fn equivalent(x: &Dfa, y: &Dfa) -> bool {
    let names: BTreeSet<&String> = x.events.iter().chain(&y.events).collect();
    let id = |d: &Dfa, n: &str| d.events.iter().position(|e| e == n).map(|i| i as u32);
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(Some(0u32), Some(0u32))]);
    if x.num_states() == 0 || y.num_states() == 0 {
        return x.num_states() == y.num_states();
    }
    while let Some((p, q)) = queue.pop_front() {
        if !seen.insert((p, q)) {
            continue;
        }
        let mp = p.is_some_and(|p| x.marked[p as usize]);
        let mq = q.is_some_and(|q| y.marked[q as usize]);
        if mp != mq {
            return false;
        }
        for n in &names {
            let p2 = p.and_then(|p| id(x, n).and_then(|e| x.step(p, e)));
            let q2 = q.and_then(|q| id(y, n).and_then(|e| y.step(q, e)));
            if p2.is_some() || q2.is_some() {
                queue.push_back((p2, q2));
            }
        }
    }
    true
}

fn all_events(m: &Nfa) -> BTreeSet<String> {
    m.alphabet().names().iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(
        a in module_strategy("A", 3),
        b in module_strategy("B", 3),
        c in module_strategy("C", 3),
    ) {
        let flat = parallel_compose(&[a.clone(), b.clone(), c.clone()], 10_000).unwrap();
        let left = parallel_compose(&[parallel_compose(&[a.clone(), b.clone()], 10_000).unwrap(), c.clone()], 10_000).unwrap();
        let right = parallel_compose(&[a, parallel_compose(&[b, c], 10_000).unwrap()], 10_000).unwrap();
        prop_assert_eq!(flat.num_states(), left.num_states());
        prop_assert_eq!(flat.num_states(), right.num_states());
        let keep = all_events(&flat);
        let d = project(&flat, &keep).determinize();
        prop_assert!(equivalent(&d, &project(&left, &keep).determinize()));
        prop_assert!(equivalent(&d, &project(&right, &keep).determinize()));
    }

    #[test]
    fn compose_step_matches_explicit_product(sys in system_strategy()) {
        let (prod, tuples) = compose_system(&sys, 10_000).unwrap();
        for (s, tuple) in tuples.iter().enumerate() {
            for e in sys.events() {
                let step = sys.compose_step(&CompositeState(tuple.clone()), e).unwrap();
                let explicit: BTreeSet<CompositeState> = match prod.alphabet().id(e) {
                    Some(le) => prod
                        .successors(s as u32, le)
                        .map(|t| CompositeState(tuples[t as usize].clone()))
                        .collect(),
                    None => BTreeSet::new(),
                };
                prop_assert_eq!(step, explicit);
            }
        }
    }

    #[test]
    fn observer_agrees_with_projected_determinisation(sys in system_strategy()) {
        let (prod, _) = compose_system(&sys, 10_000).unwrap();
        let observable: BTreeSet<String> = sys
            .events()
            .iter()
            .filter(|e| !sys.unobservable_names().contains(*e))
            .cloned()
            .collect();
        let dfa = project(&prod, &observable).determinize();
        let mut est = Estimator::new(&sys, 10_000);
        let obs = build_observer(&mut est).unwrap();
        prop_assert_eq!(obs.len(), dfa.num_states());
    }

    #[test]
    fn detectability_implications(sys in system_strategy()) {
        let run = |p: Property| check(&sys, &PropertyQuery::new(p, Engine::OnTheFly).with_budget(10_000));
        let Ok(strong) = run(Property::StrongDetect) else {
            // Systems violating the standing assumptions are refused by every variant.
            prop_assert!(run(Property::WeakDetect).is_err());
            return Ok(());
        };
        let strong = strong.verdict.holds();
        let strong_p = run(Property::StrongPeriodicDetect).unwrap().verdict.holds();
        let weak = run(Property::WeakDetect).unwrap().verdict.holds();
        let weak_p = run(Property::WeakPeriodicDetect).unwrap().verdict.holds();
        prop_assert!(!strong || strong_p);
        prop_assert!(!strong || weak);
        prop_assert!(!weak || weak_p);
        prop_assert!(!strong_p || weak_p);
    }

    #[test]
    fn engines_agree(sys in system_strategy()) {
        for p in [Property::StrongDetect, Property::WeakPeriodicDetect, Property::Opacity, Property::ADiag] {
            let a = check(&sys, &PropertyQuery::new(p, Engine::OnTheFly).with_budget(10_000));
            let b = check(&sys, &PropertyQuery::new(p, Engine::Explicit).with_budget(10_000));
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.verdict, b.verdict),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }
}
