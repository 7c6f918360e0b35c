use std::collections::BTreeSet;

use super::*;
use crate::automaton::NfaBuilder;
use crate::system::ModularSystem;

const ENGINES: [Engine; 2] = [Engine::Explicit, Engine::OnTheFly];

fn set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn module(name: &str, trans: &[(&str, &str, &str)], init: &[&str]) -> crate::Nfa {
    let mut b = NfaBuilder::new(name);
    for &(s, e, t) in trans {
        b.transition(s, e, t);
    }
    for i in init {
        b.initial(*i);
    }
    b.build().unwrap()
}

fn mono(trans: &[(&str, &str, &str)], init: &[&str], unobs: &[&str]) -> ModularSystem {
    ModularSystem::new(vec![module("g", trans, init)], &set(unobs)).unwrap()
}

fn run(sys: &ModularSystem, p: Property, e: Engine) -> PropertyResult {
    let r = check(sys, &PropertyQuery::new(p, e).with_budget(10_000)).unwrap();
    if let Some(w) = &r.witness {
        assert!(
            replay(sys, w, 10_000).unwrap(),
            "witness does not replay: {w:?}"
        );
    }
    r
}

fn verdict(sys: &ModularSystem, p: Property) -> Verdict {
    let v = run(sys, p, Engine::OnTheFly).verdict;
    for e in ENGINES {
        assert_eq!(run(sys, p, e).verdict, v, "engines disagree on {p:?}");
    }
    v
}

fn deterministic() -> ModularSystem {
    mono(
        &[("1", "a", "2"), ("2", "b", "1"), ("2", "a", "2")],
        &["1"],
        &[],
    )
}

fn branching() -> ModularSystem {
    mono(
        &[("1", "a", "1"), ("1", "a", "2"), ("2", "a", "1")],
        &["1"],
        &[],
    )
}

fn merging() -> ModularSystem {
    mono(&[("1", "a", "1"), ("2", "a", "1")], &["1", "2"], &[])
}

#[test]
fn deterministic_system_is_detectable() {
    let sys = deterministic();
    for p in [
        Property::StrongDetect,
        Property::StrongPeriodicDetect,
        Property::WeakDetect,
        Property::WeakPeriodicDetect,
    ] {
        assert_eq!(verdict(&sys, p), Verdict::Holds, "{p:?}");
    }
}

#[test]
fn branching_system_is_not_detectable() {
    let sys = branching();
    assert_eq!(verdict(&sys, Property::StrongDetect), Verdict::Violated);
    assert_eq!(
        verdict(&sys, Property::StrongPeriodicDetect),
        Verdict::Violated
    );
    assert_eq!(verdict(&sys, Property::WeakDetect), Verdict::Violated);
}

#[test]
fn merging_system_is_weakly_detectable_after_one_step() {
    let sys = merging();
    let r = run(&sys, Property::WeakDetect, Engine::OnTheFly);
    assert_eq!(r.verdict, Verdict::Holds);
    match r.witness.unwrap() {
        Witness::Lasso {
            prefix,
            cycle,
            states,
            ..
        } => {
            assert_eq!(prefix, ["a"]);
            assert_eq!(cycle, ["a"]);
            assert_eq!(states, vec![vec!["1", "2"], vec!["1"], vec!["1"]]);
        }
        w => panic!("unexpected witness {w:?}"),
    }
    assert_eq!(r.bound, Some(2));
}

#[test]
fn strong_violation_witness_shape() {
    let r = run(&branching(), Property::StrongDetect, Engine::OnTheFly);
    match r.witness.unwrap() {
        Witness::Lasso { states, exact, .. } => {
            assert!(!exact);
            assert_eq!(states.last().unwrap().len(), 2);
        }
        w => panic!("unexpected witness {w:?}"),
    }
}

#[test]
fn invalid_system_is_refused_by_detectability() {
    let sys = mono(&[("1", "a", "2")], &["1"], &[]);
    let q = PropertyQuery::new(Property::WeakDetect, Engine::OnTheFly);
    assert!(matches!(check(&sys, &q), Err(Error::Assumption(_))));
    let sys = mono(&[("1", "u", "1"), ("1", "a", "1")], &["1"], &["u"]);
    assert!(matches!(check(&sys, &q), Err(Error::Assumption(_))));
}

fn fork() -> ModularSystem {
    mono(
        &[
            ("0", "u", "2"),
            ("0", "a", "1"),
            ("2", "a", "3"),
            ("1", "a", "1"),
            ("3", "a", "3"),
        ],
        &["0"],
        &["u"],
    )
}

fn with_secret_names(sys: ModularSystem, names: &[&str]) -> ModularSystem {
    let rect = sys.rectangle(&[Some(names.to_vec())]).unwrap();
    sys.with_secret(SecretSpec::new(vec![rect])).unwrap()
}

#[test]
fn opacity_examples() {
    let sys = fork();
    assert_eq!(verdict(&sys, Property::Opacity), Verdict::Holds);

    let all = with_secret_names(fork(), &["0", "1", "2", "3"]);
    let r = run(&all, Property::Opacity, Engine::OnTheFly);
    assert_eq!(r.verdict, Verdict::Violated);
    assert_eq!(
        r.witness,
        Some(Witness::Revealing {
            word: vec![],
            estimate: vec!["0".into(), "2".into()]
        })
    );

    let one = with_secret_names(fork(), &["1"]);
    assert_eq!(verdict(&one, Property::Opacity), Verdict::Holds);

    let both = with_secret_names(fork(), &["1", "3"]);
    assert_eq!(verdict(&both, Property::Opacity), Verdict::Violated);
    match run(&both, Property::Opacity, Engine::Explicit)
        .witness
        .unwrap()
    {
        Witness::Revealing { word, .. } => assert_eq!(word, ["a"]),
        w => panic!("unexpected witness {w:?}"),
    }
}

fn bypass(extra: &[(&str, &str, &str)]) -> ModularSystem {
    let mut t = vec![
        ("0", "f", "1"),
        ("0", "u", "2"),
        ("1", "a", "1"),
        ("2", "a", "2"),
    ];
    t.extend_from_slice(extra);
    mono(&t, &["0"], &["f", "u"])
        .with_faults(&set(&["f"]))
        .unwrap()
}

#[test]
fn fault_labelling() {
    let sys = mono(&[("0", "f", "1"), ("1", "a", "1")], &["0"], &[])
        .with_faults(&set(&["f"]))
        .unwrap();
    let l = fault_label_product(&sys).unwrap();
    let names: Vec<&str> = l
        .system
        .module(0)
        .state_names()
        .iter()
        .map(String::as_str)
        .collect();
    assert_eq!(names, ["(0,N)", "(1,F)"]);
    assert_eq!(l.fault[0], vec![false, true]);

    let none = fault_label_product(&deterministic()).unwrap();
    assert_eq!(none.system.module(0).num_states(), 2);
    assert!(none.fault[0].iter().all(|f| !f));
}

#[test]
fn fault_bypass_is_not_adiagnosable() {
    let sys = bypass(&[]);
    assert_eq!(verdict(&sys, Property::ADiag), Verdict::Violated);
    match run(&sys, Property::ADiag, Engine::OnTheFly)
        .witness
        .unwrap()
    {
        Witness::FaultPair {
            string,
            observation,
            actual,
            estimate,
            region,
        } => {
            assert_eq!(string, ["f"]);
            assert!(observation.is_empty());
            assert_eq!(actual, ["(1,F)"]);
            assert_eq!(estimate, ["(0,N)", "(1,F)", "(2,N)"]);
            assert!(region >= 2);
        }
        w => panic!("unexpected witness {w:?}"),
    }
}

#[test]
fn observable_branch_restores_adiagnosability() {
    let sys = bypass(&[("1", "b", "4"), ("4", "b", "4")]);
    assert_eq!(verdict(&sys, Property::ADiag), Verdict::Holds);
}

#[test]
fn observable_faults_are_adiagnosable() {
    let sys = mono(
        &[
            ("0", "f", "1"),
            ("0", "u", "2"),
            ("1", "a", "1"),
            ("2", "a", "2"),
        ],
        &["0"],
        &["u"],
    )
    .with_faults(&set(&["f"]))
    .unwrap();
    assert_eq!(verdict(&sys, Property::ADiag), Verdict::Holds);
}

#[test]
fn no_faults_means_adiagnosable() {
    assert_eq!(verdict(&branching(), Property::ADiag), Verdict::Holds);
}

fn private_pair() -> ModularSystem {
    let a = module(
        "A",
        &[("0", "u1", "1"), ("1", "s", "0"), ("0", "a", "0")],
        &["0"],
    );
    let b = module(
        "B",
        &[("0", "s", "1"), ("1", "u2", "0"), ("1", "b", "1")],
        &["0"],
    );
    ModularSystem::new(vec![a, b], &set(&["u1", "u2"])).unwrap()
}

#[test]
fn special_case_matches_general_engines() {
    let sys = private_pair();
    for p in [
        Property::WeakDetect,
        Property::WeakPeriodicDetect,
        Property::Opacity,
    ] {
        let v = verdict(&sys, p);
        assert_eq!(run(&sys, p, Engine::SpecialCase).verdict, v, "{p:?}");
    }
    let rect = sys.rectangle(&[Some(vec!["1"]), None]).unwrap();
    let secret = sys
        .clone()
        .with_secret(SecretSpec::new(vec![rect]))
        .unwrap();
    let v = verdict(&secret, Property::Opacity);
    assert_eq!(
        run(&secret, Property::Opacity, Engine::SpecialCase).verdict,
        v
    );
}

#[test]
fn special_case_refuses_shared_unobservables() {
    let a = module("A", &[("0", "u", "1"), ("1", "a", "0")], &["0"]);
    let b = module("B", &[("0", "u", "1"), ("1", "b", "0")], &["0"]);
    let sys = ModularSystem::new(vec![a, b], &set(&["u"])).unwrap();
    let q = PropertyQuery::new(Property::WeakDetect, Engine::SpecialCase);
    assert!(matches!(check(&sys, &q), Err(Error::SharedUnobservable(_))));
    assert!(compose_local_observers(&sys, 100).is_err());
}

#[test]
fn special_case_strong_is_unsupported() {
    let q = PropertyQuery::new(Property::StrongDetect, Engine::SpecialCase);
    assert!(matches!(
        check(&deterministic(), &q),
        Err(Error::Unsupported { .. })
    ));
}

#[test]
fn local_observers_of_observable_system_mirror_modules() {
    let a = module("A", &[("0", "s", "1"), ("1", "a", "0")], &["0"]);
    let sys = ModularSystem::new(vec![a], &set(&[])).unwrap();
    let lo = compose_local_observers(&sys, 100).unwrap();
    assert_eq!(lo.system.module(0).num_states(), 2);
    assert_eq!(lo.system.module(0).transitions().len(), 2);
}

#[test]
fn budget_exceeded_is_reported() {
    let q = PropertyQuery::new(Property::WeakDetect, Engine::OnTheFly).with_budget(1);
    assert!(matches!(
        check(&deterministic(), &q),
        Err(Error::BudgetExceeded { budget: 1 })
    ));
}
