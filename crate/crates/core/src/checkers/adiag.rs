//! A-diagnosability through the pair graph over `(D, X)`: `D` is the exact set of
//! states reached by the executed string, `X` the estimate of its observation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::automaton::{EventId, Nfa, NfaBuilder, StateId};
use crate::compose::compose_system;
use crate::error::{Error, Result};
use crate::graph::{backward_reach, forward_reach, shortest_path};
use crate::observation::{Estimate, Estimator};
use crate::system::ModularSystem;

use super::{
    event_names, sorted, sorted_labels, special, working_system_is_explicit, Engine, Property,
    PropertyQuery, PropertyResult, Stats, Verdict, Witness,
};

/// A system whose modules have been multiplied with the two-state fault recogniser.
/// `fault[m][s]` tells whether state `s` of module `m` lies in the fault part.
#[derive(Debug, Clone)]
pub struct LabeledSystem {
    pub system: ModularSystem,
    pub fault: Vec<Vec<bool>>,
}

impl LabeledSystem {
    /// A composite state is a fault state iff some component is.
    pub fn is_fault(&self, tuple: &[StateId]) -> bool {
        tuple.iter().zip(&self.fault).any(|(&s, f)| f[s as usize])
    }

    /// The labelled product materialised as a single module.
    pub fn materialize(&self, budget: usize) -> Result<LabeledSystem> {
        let (nfa, tuples) = compose_system(&self.system, budget)?;
        let fault = tuples.iter().map(|t| self.is_fault(t)).collect();
        let system = ModularSystem::monolithic(nfa).with_faults(&self.system.fault_names())?;
        Ok(LabeledSystem {
            system,
            fault: vec![fault],
        })
    }
}

fn label_module(m: &Nfa, is_fault: impl Fn(&str) -> bool) -> Result<(Nfa, Vec<bool>)> {
    let alphabet = m.alphabet();
    if !alphabet.names().iter().any(|e| is_fault(e)) {
        return Ok((m.clone(), vec![false; m.num_states()]));
    }
    let name = |s: StateId, f: bool| format!("({},{})", m.state_name(s), if f { "F" } else { "N" });
    let mut b = NfaBuilder::new(m.name());
    for (e, ev) in alphabet.names().iter().enumerate() {
        if alphabet.is_observable(e as EventId) {
            b.event(ev.clone());
        } else {
            b.unobservable_event(ev.clone());
        }
    }
    let mut fault = Vec::new();
    let mut seen: HashMap<(StateId, bool), ()> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in m.initial() {
        if seen.insert((s, false), ()).is_none() {
            b.state(name(s, false));
            fault.push(false);
            queue.push_back((s, false));
        }
        b.initial(name(s, false));
    }
    if !m.all_marked() {
        b.no_marked();
    }
    while let Some((s, f)) = queue.pop_front() {
        if m.is_marked(s) && !m.all_marked() {
            b.marked(name(s, f));
        }
        for &(_, e, t) in m.outgoing(s) {
            let g = f || is_fault(alphabet.name(e));
            if seen.insert((t, g), ()).is_none() {
                b.state(name(t, g));
                fault.push(g);
                queue.push_back((t, g));
            }
            b.transition(name(s, f), alphabet.name(e).to_string(), name(t, g));
        }
    }
    Ok((b.build()?, fault))
}

/// Multiplies every module that has a local fault event with the recogniser of
/// `Σ* Σ_F Σ*`, keeping only reachable `(state, label)` pairs. Modules without fault
/// events are left unchanged and count as normal.
pub fn fault_label_product(sys: &ModularSystem) -> Result<LabeledSystem> {
    let faults = sys.fault_names();
    let mut modules = Vec::with_capacity(sys.len());
    let mut fault = Vec::with_capacity(sys.len());
    for m in sys.modules() {
        let (nfa, f) = label_module(m, |e| faults.contains(e))?;
        modules.push(nfa);
        fault.push(f);
    }
    let system = ModularSystem::new(modules, &sys.unobservable_names())?.with_faults(&faults)?;
    Ok(LabeledSystem { system, fault })
}

/// Holds iff from every reachable pair whose `D` is all-fault, some pair whose
/// estimate `X` is all-fault is reachable. Fault events are given explicitly and
/// replace any declared on `sys`.
pub fn check_adiagnosability(
    sys: &ModularSystem,
    faults: &std::collections::BTreeSet<String>,
    q: &PropertyQuery,
) -> Result<PropertyResult> {
    let sys = sys.clone().with_faults(faults)?;
    let labeled = fault_label_product(&sys)?;
    if q.engine == Engine::SpecialCase {
        return special::adiagnosability(&labeled, q);
    }
    let labeled = if working_system_is_explicit(q) {
        labeled.materialize(q.budget)?
    } else {
        labeled
    };
    let lsys = &labeled.system;
    let mut est = Estimator::new(lsys, q.budget);

    let mut index: HashMap<(Estimate, Estimate), u32> = HashMap::new();
    let mut nodes: Vec<(Estimate, Estimate)> = Vec::new();
    let mut edges: Vec<Vec<(EventId, u32)>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |pair: (Estimate, Estimate),
                      nodes: &mut Vec<(Estimate, Estimate)>,
                      edges: &mut Vec<Vec<(EventId, u32)>>,
                      queue: &mut VecDeque<u32>|
     -> Result<u32> {
        if let Some(&id) = index.get(&pair) {
            return Ok(id);
        }
        if nodes.len() >= q.budget {
            return Err(Error::BudgetExceeded { budget: q.budget });
        }
        let id = nodes.len() as u32;
        index.insert(pair.clone(), id);
        nodes.push(pair);
        edges.push(Vec::new());
        queue.push_back(id);
        Ok(id)
    };
    let init_d = Estimate::new(est.product_mut().initial_states()?);
    let init_x = est.initial_estimate()?;
    intern((init_d, init_x), &mut nodes, &mut edges, &mut queue)?;
    while let Some(cur) = queue.pop_front() {
        let (d, x) = nodes[cur as usize].clone();
        let mut by_event: BTreeMap<EventId, Vec<StateId>> = BTreeMap::new();
        for &s in d.states() {
            for &(e, t) in est.product_mut().outgoing(s)?.iter() {
                by_event.entry(e).or_default().push(t);
            }
        }
        for (e, targets) in by_event {
            let d2 = Estimate::new(targets);
            let x2 = if lsys.is_observable(e) {
                est.observer_step(&x, e)?
                    .expect("actual successors are in the estimate")
            } else {
                x.clone()
            };
            let id = intern((d2, x2), &mut nodes, &mut edges, &mut queue)?;
            edges[cur as usize].push((e, id));
        }
    }

    let all_fault = |e: &Estimate, est: &Estimator<'_>| {
        e.states()
            .iter()
            .all(|&s| labeled.is_fault(est.product().tuple(s)))
    };
    let d_fault: Vec<bool> = nodes.iter().map(|(d, _)| all_fault(d, &est)).collect();
    let x_fault: Vec<bool> = nodes.iter().map(|(_, x)| all_fault(x, &est)).collect();
    let can_clear = backward_reach(&edges, &x_fault);
    let stuck = |v: u32| d_fault[v as usize] && !can_clear[v as usize];
    let witness = shortest_path(&edges, &[0], |_| true, stuck).map(|path| {
        let v = *path.nodes.last().expect("nonempty path");
        let (d, x) = &nodes[v as usize];
        let observation: Vec<EventId> = path
            .events
            .iter()
            .copied()
            .filter(|&e| lsys.is_observable(e))
            .collect();
        let region = forward_reach(&edges, &[v], |_| true)
            .iter()
            .filter(|&&b| b)
            .count();
        Witness::FaultPair {
            string: event_names(lsys, &path.events),
            observation: event_names(lsys, &observation),
            actual: sorted_labels(&est, d),
            estimate: sorted_labels(&est, x),
            region,
        }
    });
    Ok(PropertyResult {
        property: Property::ADiag,
        verdict: Verdict::from_bool(witness.is_none()),
        witness,
        bound: None,
        stats: Stats {
            engine: q.engine,
            explored: nodes.len(),
            composite_states: est.product().len(),
        },
    })
}

/// Re-executes `string` on the labelled system and checks the claimed `D` and `X`.
pub(crate) fn replay_pair(
    labeled: &LabeledSystem,
    string: &[String],
    observation: &[String],
    actual: &[String],
    estimate: &[String],
    budget: usize,
) -> Result<bool> {
    let lsys = &labeled.system;
    let mut est = Estimator::new(lsys, budget);
    let mut d = Estimate::new(est.product_mut().initial_states()?);
    let mut x = est.initial_estimate()?;
    let mut seen_obs = Vec::new();
    for name in string {
        let e = lsys
            .event_id(name)
            .ok_or_else(|| Error::UnknownEvent(name.clone()))?;
        let mut targets = Vec::new();
        for &s in d.states() {
            est.product_mut().successors(s, e, &mut targets)?;
        }
        if targets.is_empty() {
            return Ok(false);
        }
        d = Estimate::new(targets);
        if lsys.is_observable(e) {
            seen_obs.push(name.clone());
            x = est.observer_step(&x, e)?.expect("nonempty");
        }
    }
    let d_fault = d
        .states()
        .iter()
        .all(|&s| labeled.is_fault(est.product().tuple(s)));
    Ok(d_fault
        && seen_obs == observation
        && sorted_labels(&est, &d) == sorted(actual)
        && sorted_labels(&est, &x) == sorted(estimate))
}
