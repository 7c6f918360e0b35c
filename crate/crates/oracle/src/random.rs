//! Seeded random instances. Every generator is a pure function of its seed so that
//! failing cases can be reproduced from the printed seed alone.

use std::collections::BTreeSet;

use desmod_core::{ModularSystem, Nfa, NfaBuilder};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::explicit::explicit_product;

const OBSERVABLE: [&str; 3] = ["a", "b", "c"];

fn names(v: &[String]) -> BTreeSet<String> {
    v.iter().cloned().collect()
}

/// A module over `obs` and `unobs` with `n` states. Unobservable moves only go to
/// higher-numbered states, so they never loop; every state gets at least one move.
fn random_module(
    rng: &mut StdRng,
    name: &str,
    n: u32,
    obs: &[String],
    unobs: &[String],
    density: u32,
) -> Nfa {
    let mut b = NfaBuilder::new(name);
    for s in 0..n {
        b.state(s.to_string());
    }
    for e in obs {
        b.event(e.clone());
    }
    for e in unobs {
        b.unobservable_event(e.clone());
    }
    for s in 0..n {
        let k = rng.random_range(1..=density);
        for _ in 0..k {
            let use_unobs = !unobs.is_empty() && s + 1 < n && rng.random_bool(0.3);
            if use_unobs {
                let e = &unobs[rng.random_range(0..unobs.len())];
                let t = rng.random_range(s + 1..n);
                b.transition(s.to_string(), e.clone(), t.to_string());
            } else {
                let e = &obs[rng.random_range(0..obs.len())];
                let t = rng.random_range(0..n);
                b.transition(s.to_string(), e.clone(), t.to_string());
            }
        }
    }
    b.initial(rng.random_range(0..n).to_string());
    if rng.random_bool(0.3) {
        b.initial(rng.random_range(0..n).to_string());
    }
    b.build().expect("generated module is well formed")
}

fn pick(rng: &mut StdRng, pool: &[&str], lo: usize, hi: usize) -> Vec<String> {
    let k = rng.random_range(lo..=hi);
    pool[..k].iter().map(|s| s.to_string()).collect()
}

/// A monolithic DES with ≤ 6 states, 1–3 observable and 0–2 unobservable events,
/// satisfying both standing assumptions by construction. Edge density cycles with the
/// seed.
pub fn random_monolithic(seed: u64) -> ModularSystem {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(1..=6);
    let obs = pick(&mut rng, &OBSERVABLE, 1, 3);
    let unobs = pick(&mut rng, &["u", "v"], 0, 2);
    let density = 1 + (seed % 3) as u32;
    let m = random_module(&mut rng, "G", n, &obs, &unobs, density);
    ModularSystem::new(vec![m], &names(&unobs)).expect("single module")
}

/// Retries derived seeds until the explicit product satisfies the assumptions.
fn valid(mut build: impl FnMut(u64) -> ModularSystem, seed: u64) -> ModularSystem {
    for attempt in 0.. {
        let sys = build(seed.wrapping_mul(1_000_003).wrapping_add(attempt));
        if let Ok(g) = explicit_product(&sys, 100_000) {
            if g.assumptions_hold() {
                return sys;
            }
        }
    }
    unreachable!()
}

/// 1–3 modules with ≤ 4 states each over shared observable events and unobservable
/// events that may be shared; the reachable product satisfies the assumptions.
pub fn random_modular(seed: u64) -> ModularSystem {
    valid(
        |s| {
            let mut rng = StdRng::seed_from_u64(s);
            let k = rng.random_range(1..=3);
            let mut modules = Vec::new();
            let mut all_unobs = Vec::new();
            for i in 0..k {
                let n = rng.random_range(1..=4);
                let obs = pick(&mut rng, &OBSERVABLE, 1, 3);
                let unobs = pick(&mut rng, &["u", "v"], 0, 2);
                all_unobs.extend(unobs.iter().cloned());
                let density = rng.random_range(1..=3);
                modules.push(random_module(
                    &mut rng,
                    &format!("M{i}"),
                    n,
                    &obs,
                    &unobs,
                    density,
                ));
            }
            ModularSystem::new(modules, &names(&all_unobs)).expect("distinct module names")
        },
        seed,
    )
}

/// Like [`random_modular`], but module `i` only uses its private unobservable events
/// `u{i}` and `v{i}`.
pub fn random_private(seed: u64) -> ModularSystem {
    valid(
        |s| {
            let mut rng = StdRng::seed_from_u64(s);
            let k = rng.random_range(1..=3);
            let mut modules = Vec::new();
            let mut all_unobs = Vec::new();
            for i in 0..k {
                let n = rng.random_range(1..=4);
                let obs = pick(&mut rng, &OBSERVABLE, 1, 3);
                let own = [format!("u{i}"), format!("v{i}")];
                let unobs: Vec<String> = own[..rng.random_range(0..=2)].to_vec();
                all_unobs.extend(unobs.iter().cloned());
                let density = rng.random_range(1..=3);
                modules.push(random_module(
                    &mut rng,
                    &format!("M{i}"),
                    n,
                    &obs,
                    &unobs,
                    density,
                ));
            }
            ModularSystem::new(modules, &names(&all_unobs)).expect("distinct module names")
        },
        seed,
    )
}

/// A small system (1–2 modules) with fault event `f`, unobservable unless
/// `observable_fault`. The standing assumptions are not enforced.
pub fn random_fault_system(seed: u64, observable_fault: bool) -> ModularSystem {
    let mut rng = StdRng::seed_from_u64(seed);
    let k = rng.random_range(1..=2);
    let mut modules = Vec::new();
    let mut all_unobs: Vec<String> = Vec::new();
    for i in 0..k {
        let n = rng.random_range(2..=5);
        let mut obs = pick(&mut rng, &OBSERVABLE, 1, 2);
        let mut unobs = pick(&mut rng, &["u"], 0, 1);
        if i == 0 || rng.random_bool(0.5) {
            if observable_fault {
                obs.push("f".into());
            } else {
                unobs.push("f".into());
            }
        }
        all_unobs.extend(unobs.iter().cloned());
        let density = rng.random_range(1..=3);
        modules.push(random_module(
            &mut rng,
            &format!("M{i}"),
            n,
            &obs,
            &unobs,
            density,
        ));
    }
    ModularSystem::new(modules, &names(&all_unobs))
        .and_then(|s| s.with_faults(&BTreeSet::from(["f".to_string()])))
        .expect("fault event exists")
}

/// `modules` modules of `states` states (at least 3) for performance runs. Each module
/// is a ring of `states - 1` states driven by the shared observable events: `a` advances
/// every ring by one and `b` by a per-module offset, so the rings stay in lockstep. The
/// private unobservable event `u{i}` branches from one ring state into a twin state that
/// rejoins the ring, and the private observable `p{i}` is a self-loop on either the
/// twin or its original, chosen at random. The full product has `states^modules`
/// tuples, of which only a tiny fraction is reachable.
pub fn random_large_private(seed: u64, modules: usize, states: u32) -> ModularSystem {
    assert!(
        states >= 3,
        "need a ring of at least two states plus a twin"
    );
    let mut rng = StdRng::seed_from_u64(seed);
    let ring = states - 1;
    let twin = ring;
    let mut out = Vec::with_capacity(modules);
    let mut unobs = BTreeSet::new();
    for i in 0..modules {
        let mut b = NfaBuilder::new(format!("M{i}"));
        let (p, u) = (format!("p{i}"), format!("u{i}"));
        unobs.insert(u.clone());
        for s in 0..states {
            b.state(s.to_string());
        }
        let shift = rng.random_range(0..ring);
        let branch = rng.random_range(0..ring);
        for s in 0..ring {
            b.transition(s.to_string(), "a", ((s + 1) % ring).to_string());
            b.transition(s.to_string(), "b", ((s + shift) % ring).to_string());
        }
        b.transition(twin.to_string(), "a", ((branch + 1) % ring).to_string());
        b.transition(twin.to_string(), "b", ((branch + shift) % ring).to_string());
        b.transition(branch.to_string(), u.clone(), twin.to_string());
        let marker = if rng.random_bool(0.5) { twin } else { branch };
        b.transition(marker.to_string(), p.clone(), marker.to_string());
        b.initial("0");
        if rng.random_bool(0.3) {
            b.initial(rng.random_range(1..ring).to_string());
        }
        out.push(b.build().expect("generated module is well formed"));
    }
    ModularSystem::new(out, &unobs).expect("distinct module names")
}
