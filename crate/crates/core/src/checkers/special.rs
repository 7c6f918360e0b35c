//! Engines for systems whose shared events are all observable. The estimate of the
//! composition is then the product `X1 × … × Xn` of local estimates, so the observer
//! of the composition is the composition of the local observers.

use std::collections::{BTreeSet, VecDeque};

use crate::automaton::{find_cycle, EventId, NfaBuilder, StateId};
use crate::compose::LazyProduct;
use crate::error::{Error, Result};
use crate::graph::{backward_reach, cycle_through, on_cycle, shortest_path, Path};
use crate::observation::{build_observer, Estimator};
use crate::system::ModularSystem;

use super::adiag::LabeledSystem;
use super::{
    event_names, require_private, Engine, Property, PropertyQuery, PropertyResult, Stats, Verdict,
    Witness,
};

/// The composition of the local observers of a system.
#[derive(Debug, Clone)]
pub struct LocalObservers {
    /// One deterministic, fully observable module per original module.
    pub system: ModularSystem,
    /// `estimates[m][o]`: the local states of module `m` that observer state `o` stands for.
    pub estimates: Vec<Vec<Vec<StateId>>>,
}

impl LocalObservers {
    fn choices(&self, tuple: &[StateId]) -> Vec<&[StateId]> {
        tuple
            .iter()
            .enumerate()
            .map(|(m, &o)| self.estimates[m][o as usize].as_slice())
            .collect()
    }

    /// Whether every local estimate in the composed-observer state is a singleton.
    fn all_singletons(&self, tuple: &[StateId]) -> bool {
        self.choices(tuple).iter().all(|c| c.len() == 1)
    }
}

/// Replaces each module by its observer with respect to the (globally) observable
/// events of its alphabet. Requires every shared event to be observable.
pub fn compose_local_observers(sys: &ModularSystem, budget: usize) -> Result<LocalObservers> {
    require_private(sys)?;
    let mut modules = Vec::with_capacity(sys.len());
    let mut estimates = Vec::with_capacity(sys.len());
    for m in sys.modules() {
        let local = ModularSystem::monolithic(m.clone());
        let mut est = Estimator::new(&local, budget);
        let obs = build_observer(&mut est)?;
        let mut b = NfaBuilder::new(m.name());
        for e in m.alphabet().observable() {
            b.event(m.alphabet().name(e).to_string());
        }
        let sets: Vec<Vec<StateId>> = obs
            .nodes
            .iter()
            .map(|n| {
                n.states()
                    .iter()
                    .map(|&x| est.product().tuple(x)[0])
                    .collect()
            })
            .collect();
        let names: Vec<String> = sets
            .iter()
            .map(|set| {
                let parts: Vec<&str> = set.iter().map(|&s| m.state_name(s)).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        for n in &names {
            b.state(n);
        }
        b.no_marked();
        for (i, set) in sets.iter().enumerate() {
            if set.iter().any(|&s| m.is_marked(s)) {
                b.marked(&names[i]);
            }
            for &(e, t) in &obs.edges[i] {
                b.transition(&names[i], est.event_name(e).to_string(), &names[t as usize]);
            }
        }
        b.initial(&names[0]);
        modules.push(b.build()?);
        estimates.push(sets);
    }
    let system = ModularSystem::new(modules, &BTreeSet::new())?;
    Ok(LocalObservers { system, estimates })
}

/// Enumerates the cartesian product of `choices`; stops early when `f` returns false.
/// Returns false iff it was stopped.
fn all_tuples(choices: &[&[StateId]], mut f: impl FnMut(&[StateId]) -> bool) -> bool {
    let mut idx = vec![0usize; choices.len()];
    let mut tuple: Vec<StateId> = choices.iter().map(|c| c[0]).collect();
    loop {
        if !f(&tuple) {
            return false;
        }
        let mut k = choices.len();
        loop {
            if k == 0 {
                return true;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                tuple[k] = choices[k][idx[k]];
                break;
            }
            idx[k] = 0;
            tuple[k] = choices[k][0];
        }
    }
}

/// Composite-state labels of `X1 × … × Xn`, sorted.
fn expand(sys: &ModularSystem, lo: &LocalObservers, tuple: &[StateId]) -> Vec<String> {
    let mut out = Vec::new();
    all_tuples(&lo.choices(tuple), |t| {
        out.push(sys.tuple_label(t));
        true
    });
    out.sort();
    out
}

struct Explored<'a> {
    prod: LazyProduct<'a>,
    init: Vec<StateId>,
    adj: Vec<Vec<(EventId, u32)>>,
}

fn explore<'a>(lo: &'a LocalObservers, budget: usize) -> Result<Explored<'a>> {
    let mut prod = LazyProduct::new(&lo.system, budget);
    let init = prod.explore_all()?;
    let adj = (0..prod.len() as StateId)
        .map(|s| prod.outgoing(s).map(|e| e.to_vec()))
        .collect::<Result<_>>()?;
    Ok(Explored { prod, init, adj })
}

/// Checks the standing assumptions using only local information: reachable composite
/// states are exactly the members of the reachable products `X1 × … × Xn`, and with
/// private unobservable events a loop of unobservable events exists iff some module
/// has one through a reachable local state.
fn validate(sys: &ModularSystem, lo: &LocalObservers, ex: &Explored<'_>) -> Result<()> {
    let mut reach: Vec<BTreeSet<StateId>> = vec![BTreeSet::new(); sys.len()];
    for v in 0..ex.prod.len() as StateId {
        for (m, c) in lo.choices(ex.prod.tuple(v)).iter().enumerate() {
            reach[m].extend(c.iter().copied());
        }
    }
    for (m, module) in sys.modules().iter().enumerate() {
        let roots: Vec<StateId> = reach[m].iter().copied().collect();
        let cycle = find_cycle(module.num_states(), &roots, |s, out| {
            out.extend(
                module
                    .outgoing(s)
                    .iter()
                    .filter(|&&(_, e, _)| !module.alphabet().is_observable(e))
                    .map(|&(_, e, t)| (e, t)),
            )
        });
        if let Some(c) = cycle {
            return Err(Error::Assumption(format!(
                "state `{}` of module `{}` lies on a loop of unobservable events",
                module.state_name(c[0].0),
                module.name()
            )));
        }
    }
    let enabled = |t: &[StateId]| {
        sys.modules().iter().enumerate().any(|(m, module)| {
            module.outgoing(t[m]).iter().any(|&(_, le, _)| {
                let e = sys
                    .event_id(module.alphabet().name(le))
                    .expect("module event is global");
                sys.participants(e).iter().all(|&p| {
                    let p = p as usize;
                    let lp = sys.local_event(p, e).expect("participant has event");
                    sys.module(p).has_successor(t[p], lp)
                })
            })
        })
    };
    for v in 0..ex.prod.len() as StateId {
        let mut dead = None;
        all_tuples(&lo.choices(ex.prod.tuple(v)), |t| {
            if enabled(t) {
                true
            } else {
                dead = Some(sys.tuple_label(t));
                false
            }
        });
        if let Some(d) = dead {
            return Err(Error::Assumption(format!("state `{d}` is a deadlock")));
        }
    }
    Ok(())
}

fn lasso(
    sys: &ModularSystem,
    lo: &LocalObservers,
    ex: &Explored<'_>,
    prefix: &Path,
    cycle: &Path,
) -> Witness {
    let mut nodes = prefix.nodes.clone();
    nodes.extend(&cycle.nodes[1..]);
    Witness::Lasso {
        prefix: event_names(&lo.system, &prefix.events),
        cycle: event_names(&lo.system, &cycle.events),
        tail: Vec::new(),
        states: nodes
            .iter()
            .map(|&v| expand(sys, lo, ex.prod.tuple(v)))
            .collect(),
        exact: true,
    }
}

fn stats(n: usize) -> Stats {
    Stats {
        engine: Engine::SpecialCase,
        explored: n,
        composite_states: n,
    }
}

pub(crate) fn weak_detectability(
    sys: &ModularSystem,
    property: Property,
    q: &PropertyQuery,
) -> Result<PropertyResult> {
    let lo = compose_local_observers(sys, q.budget)?;
    let ex = explore(&lo, q.budget)?;
    validate(sys, &lo, &ex)?;
    let single = |v: u32| lo.all_singletons(ex.prod.tuple(v));
    let strict = property == Property::WeakDetect;
    let cyc = if strict {
        on_cycle(&ex.adj, single)
    } else {
        on_cycle(&ex.adj, |_| true)
    };
    let witness = shortest_path(
        &ex.adj,
        &ex.init,
        |_| true,
        |v| single(v) && cyc[v as usize],
    )
    .map(|prefix| {
        let c = *prefix.nodes.last().expect("nonempty path");
        let cycle = if strict {
            cycle_through(&ex.adj, c, single)
        } else {
            cycle_through(&ex.adj, c, |_| true)
        }
        .expect("node lies on a cycle");
        lasso(sys, &lo, &ex, &prefix, &cycle)
    });
    let bound = match &witness {
        Some(Witness::Lasso { prefix, cycle, .. }) => Some(prefix.len() + cycle.len()),
        _ => None,
    };
    Ok(PropertyResult {
        property,
        verdict: Verdict::from_bool(witness.is_some()),
        witness,
        bound,
        stats: stats(ex.prod.len()),
    })
}

pub(crate) fn opacity(sys: &ModularSystem, q: &PropertyQuery) -> Result<PropertyResult> {
    let lo = compose_local_observers(sys, q.budget)?;
    let mut prod = LazyProduct::new(&lo.system, q.budget);
    let init = prod.initial_states()?;
    let mut parent: Vec<Option<(u32, EventId)>> = vec![None; prod.len()];
    let mut queue: VecDeque<u32> = init.iter().copied().collect();
    let mut seen: BTreeSet<u32> = init.iter().copied().collect();
    let mut witness = None;
    if !sys.secret().is_empty() {
        while let Some(v) = queue.pop_front() {
            let revealed = all_tuples(&lo.choices(prod.tuple(v)), |t| sys.secret().contains(t));
            if revealed {
                let mut word = Vec::new();
                let mut at = v;
                while let Some((p, e)) = parent[at as usize] {
                    word.push(e);
                    at = p;
                }
                word.reverse();
                witness = Some(Witness::Revealing {
                    word: event_names(&lo.system, &word),
                    estimate: expand(sys, &lo, prod.tuple(v)),
                });
                break;
            }
            for &(e, t) in prod.outgoing(v)?.iter() {
                if seen.insert(t) {
                    parent.resize(prod.len(), None);
                    parent[t as usize] = Some((v, e));
                    queue.push_back(t);
                }
            }
        }
    }
    Ok(PropertyResult {
        property: Property::Opacity,
        verdict: Verdict::from_bool(witness.is_none()),
        witness,
        bound: None,
        stats: stats(prod.len()),
    })
}

/// The composed-observer condition: every reachable `(X1, …, Xn)` with some
/// `Xi ∩ Q_Fi ≠ ∅` can reach some `(Y1, …, Yn)` with some `Yj ⊆ Q_Fj`. This engine
/// produces no witness; it does not track the executed string.
pub(crate) fn adiagnosability(
    labeled: &LabeledSystem,
    q: &PropertyQuery,
) -> Result<PropertyResult> {
    let lo = compose_local_observers(&labeled.system, q.budget)?;
    let ex = explore(&lo, q.budget)?;
    let n = ex.prod.len();
    let mut touches = vec![false; n];
    let mut good = vec![false; n];
    for v in 0..n {
        for (m, c) in lo.choices(ex.prod.tuple(v as StateId)).iter().enumerate() {
            let f = &labeled.fault[m];
            touches[v] |= c.iter().any(|&s| f[s as usize]);
            good[v] |= c.iter().all(|&s| f[s as usize]);
        }
    }
    let can = backward_reach(&ex.adj, &good);
    let holds = (0..n).all(|v| !touches[v] || can[v]);
    Ok(PropertyResult {
        property: Property::ADiag,
        verdict: Verdict::from_bool(holds),
        witness: None,
        bound: None,
        stats: stats(n),
    })
}
