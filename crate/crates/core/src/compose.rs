//! Parallel composition, either materialised up front or explored on demand.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::automaton::{find_cycle, Alphabet, EventId, Nfa, StateId, ValidationReport};
use crate::error::{Error, Result};
use crate::system::{ModularSystem, SecretSpec};

/// Default cap on the number of composite states an engine may create.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Outgoing edges of one composite state, sorted by event then target.
pub type Edges = Arc<[(EventId, StateId)]>;

/// On-demand exploration of `G1 ‖ … ‖ Gn`: composite states are interned as they are
/// first reached and their outgoing edges are computed once and cached.
#[derive(Debug)]
pub struct LazyProduct<'a> {
    sys: &'a ModularSystem,
    index: HashMap<Arc<[StateId]>, StateId>,
    tuples: Vec<Arc<[StateId]>>,
    edges: Vec<Option<Edges>>,
    budget: usize,
}

impl<'a> LazyProduct<'a> {
    pub fn new(sys: &'a ModularSystem, budget: usize) -> Self {
        LazyProduct {
            sys,
            index: HashMap::new(),
            tuples: Vec::new(),
            edges: Vec::new(),
            budget,
        }
    }

    pub fn system(&self) -> &'a ModularSystem {
        self.sys
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Number of composite states interned so far.
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    fn intern(&mut self, tuple: &[StateId]) -> Result<StateId> {
        if let Some(&id) = self.index.get(tuple) {
            return Ok(id);
        }
        if self.tuples.len() >= self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let id = self.tuples.len() as StateId;
        let key: Arc<[StateId]> = Arc::from(tuple);
        self.index.insert(key.clone(), id);
        self.tuples.push(key);
        self.edges.push(None);
        Ok(id)
    }

    /// Interns an arbitrary well-formed tuple, reachable or not.
    pub fn intern_tuple(&mut self, tuple: &[StateId]) -> Result<StateId> {
        self.sys.check_tuple(tuple)?;
        self.intern(tuple)
    }

    /// Interns and returns the initial composite states.
    pub fn initial_states(&mut self) -> Result<Vec<StateId>> {
        if self.sys.initial_count() > self.budget as u128 {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let mut tuples = Vec::new();
        self.sys.for_each_initial(|t| tuples.push(t.to_vec()));
        tuples.iter().map(|t| self.intern(t)).collect()
    }

    /// All outgoing edges of an interned state.
    pub fn outgoing(&mut self, s: StateId) -> Result<Edges> {
        if let Some(e) = &self.edges[s as usize] {
            return Ok(e.clone());
        }
        let sys = self.sys;
        let tuple = self.tuples[s as usize].clone();
        // Candidate events: those some module can perform locally right now.
        let mut candidates: BTreeSet<EventId> = BTreeSet::new();
        for (m, &x) in tuple.iter().enumerate() {
            let module = sys.module(m);
            for &(_, le, _) in module.outgoing(x) {
                let name = module.alphabet().name(le);
                candidates.insert(sys.event_id(name).expect("module event is global"));
            }
        }
        let mut targets: Vec<Vec<StateId>> = Vec::new();
        let mut out: Vec<(EventId, StateId)> = Vec::new();
        for e in candidates {
            targets.clear();
            sys.for_each_successor(&tuple, e, |t| targets.push(t.to_vec()));
            for t in &targets {
                let id = self.intern(t)?;
                out.push((e, id));
            }
        }
        out.sort_unstable();
        out.dedup();
        let edges: Edges = out.into();
        self.edges[s as usize] = Some(edges.clone());
        Ok(edges)
    }

    /// `e`-successors of an interned state, appended to `out`.
    pub fn successors(&mut self, s: StateId, e: EventId, out: &mut Vec<StateId>) -> Result<()> {
        let edges = self.outgoing(s)?;
        let lo = edges.partition_point(|&(x, _)| x < e);
        out.extend(
            edges[lo..]
                .iter()
                .take_while(|&&(x, _)| x == e)
                .map(|&(_, t)| t),
        );
        Ok(())
    }

    pub fn tuple(&self, s: StateId) -> &[StateId] {
        &self.tuples[s as usize]
    }

    pub fn lookup(&self, tuple: &[StateId]) -> Option<StateId> {
        self.index.get(tuple).copied()
    }

    pub fn label(&self, s: StateId) -> String {
        self.sys.tuple_label(self.tuple(s))
    }

    pub fn is_secret(&self, s: StateId) -> bool {
        self.sys.secret().contains(self.tuple(s))
    }

    pub fn is_marked(&self, s: StateId) -> bool {
        self.sys.is_marked(self.tuple(s))
    }

    /// Explores everything reachable from the initial states; returns them.
    pub fn explore_all(&mut self) -> Result<Vec<StateId>> {
        let init = self.initial_states()?;
        let mut next = 0usize;
        while next < self.tuples.len() {
            self.outgoing(next as StateId)?;
            next += 1;
        }
        Ok(init)
    }
}

/// Materialises the reachable part of `G1 ‖ … ‖ Gn` as one automaton whose states are
/// named after their tuples. An event is unobservable in the result iff it is
/// unobservable in some component. Fails with [`Error::BudgetExceeded`] as soon as more
/// than `budget` composite states would be needed.
pub fn parallel_compose(modules: &[Nfa], budget: usize) -> Result<Nfa> {
    let unobservable: BTreeSet<String> = modules
        .iter()
        .flat_map(|m| m.alphabet().unobservable_names())
        .collect();
    let sys = ModularSystem::new(modules.to_vec(), &unobservable)?;
    Ok(compose_system(&sys, budget)?.0)
}

/// Materialises the reachable product of `sys`. Returns the product automaton together
/// with the component tuple of each product state.
pub fn compose_system(sys: &ModularSystem, budget: usize) -> Result<(Nfa, Vec<Vec<StateId>>)> {
    let mut lazy = LazyProduct::new(sys, budget);
    let init = lazy.explore_all()?;
    let n = lazy.len();
    let mut transitions = Vec::new();
    for s in 0..n as StateId {
        for &(e, t) in lazy.outgoing(s)?.iter() {
            transitions.push((s, e, t));
        }
    }
    let states: Vec<String> = (0..n as StateId).map(|s| lazy.label(s)).collect();
    let marked: Vec<bool> = (0..n as StateId).map(|s| lazy.is_marked(s)).collect();
    let alphabet = Alphabet::new(sys.events().iter().cloned(), &sys.unobservable_names());
    let name = sys
        .modules()
        .iter()
        .map(|m| m.name())
        .collect::<Vec<_>>()
        .join("||");
    let tuples = (0..n as StateId).map(|s| lazy.tuple(s).to_vec()).collect();
    Ok((
        Nfa::from_parts(name, states, alphabet, transitions, init, marked),
        tuples,
    ))
}

/// The explicit counterpart of `sys`: a one-module system over the materialised
/// product, carrying the same observation, fault and secret annotations.
pub fn materialize(sys: &ModularSystem, budget: usize) -> Result<ModularSystem> {
    let (nfa, tuples) = compose_system(sys, budget)?;
    let secret_states: Vec<StateId> = tuples
        .iter()
        .enumerate()
        .filter(|(_, t)| sys.secret().contains(t))
        .map(|(i, _)| i as StateId)
        .collect();
    let secret = if sys.secret().is_empty() {
        SecretSpec::empty()
    } else {
        SecretSpec::new(vec![vec![Some(secret_states)]])
    };
    ModularSystem::monolithic(nfa)
        .with_faults(&sys.fault_names())?
        .with_secret(secret)
}

/// Checks the two standing assumptions on the reachable part of `sys`.
pub fn validate_system(sys: &ModularSystem, budget: usize) -> Result<ValidationReport> {
    let mut lazy = LazyProduct::new(sys, budget);
    let roots = lazy.explore_all()?;
    let n = lazy.len();
    let mut deadlock = None;
    for s in 0..n as StateId {
        if lazy.outgoing(s)?.is_empty() {
            deadlock = Some(lazy.label(s));
            break;
        }
    }
    let edges: Vec<Edges> = (0..n as StateId)
        .map(|s| lazy.outgoing(s))
        .collect::<Result<_>>()?;
    let cycle = find_cycle(n, &roots, |s, out| {
        out.extend(
            edges[s as usize]
                .iter()
                .filter(|&&(e, _)| !sys.is_observable(e))
                .copied(),
        )
    });
    let unobservable_cycle = cycle.map(|c| {
        c.into_iter()
            .map(|(s, e, t)| {
                (
                    lazy.label(s),
                    sys.events()[e as usize].clone(),
                    lazy.label(t),
                )
            })
            .collect()
    });
    Ok(ValidationReport {
        deadlock,
        unobservable_cycle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::NfaBuilder;

    fn module(name: &str, trans: &[(&str, &str, &str)], init: &[&str]) -> Nfa {
        let mut b = NfaBuilder::new(name);
        for &(s, e, t) in trans {
            b.transition(s, e, t);
        }
        for i in init {
            b.initial(*i);
        }
        b.build().unwrap()
    }

    #[test]
    fn shared_events_synchronise() {
        let a = module("A", &[("0", "s", "1"), ("1", "a", "0")], &["0"]);
        let b = module("B", &[("0", "s", "1"), ("1", "b", "0")], &["0"]);
        let p = parallel_compose(&[a, b], DEFAULT_BUDGET).unwrap();
        // (0,0) -s-> (1,1) -a-> (0,1) -b-> (0,0); (1,1) -b-> (1,0) -a-> (0,0)
        assert_eq!(p.num_states(), 4);
        assert_eq!(p.transitions().len(), 5);
        assert_eq!(p.state_name(p.initial()[0]), "(0,0)");
    }

    #[test]
    fn budget_is_enforced() {
        let a = module(
            "A",
            &[("0", "a", "1"), ("1", "a", "2"), ("2", "a", "0")],
            &["0"],
        );
        assert!(parallel_compose(std::slice::from_ref(&a), 3).is_ok());
        assert_eq!(
            parallel_compose(&[a], 2).unwrap_err(),
            Error::BudgetExceeded { budget: 2 }
        );
    }

    #[test]
    fn initial_product_precheck() {
        let many: Vec<Nfa> = (0..40)
            .map(|i| {
                module(
                    &format!("M{i}"),
                    &[("0", "x", "0"), ("1", "x", "1")],
                    &["0", "1"],
                )
            })
            .collect();
        assert!(matches!(
            parallel_compose(&many, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn validation_only_looks_at_reachable_part() {
        // Module B alone has a deadlock at state 9, but it is never reached.
        let a = module("A", &[("0", "a", "0")], &["0"]);
        let b = module("B", &[("0", "a", "0"), ("9", "b", "8")], &["0"]);
        let sys = ModularSystem::new(vec![a, b], &BTreeSet::new()).unwrap();
        assert!(validate_system(&sys, 100).unwrap().is_valid());
    }

    #[test]
    fn validation_reports_composite_deadlock() {
        let a = module("A", &[("0", "x", "1"), ("1", "y", "0")], &["0"]);
        let b = module("B", &[("0", "y", "1"), ("1", "x", "0")], &["0"]);
        let sys = ModularSystem::new(vec![a, b], &BTreeSet::new()).unwrap();
        let r = validate_system(&sys, 100).unwrap();
        assert_eq!(r.deadlock.as_deref(), Some("(0,0)"));
    }

    #[test]
    fn validation_reports_unobservable_cycle() {
        let a = module("A", &[("0", "u", "1"), ("1", "u", "0")], &["0"]);
        let unobs: BTreeSet<String> = ["u".to_string()].into();
        let sys = ModularSystem::new(vec![a], &unobs).unwrap();
        let r = validate_system(&sys, 100).unwrap();
        assert!(r.deadlock_free());
        assert_eq!(r.unobservable_cycle.unwrap().len(), 2);
    }

    #[test]
    fn materialize_carries_secret_and_faults() {
        let a = module(
            "A",
            &[("0", "f", "1"), ("1", "a", "1"), ("0", "a", "0")],
            &["0"],
        );
        let unobs: BTreeSet<String> = ["f".to_string()].into();
        let sys = ModularSystem::new(vec![a], &unobs)
            .unwrap()
            .with_faults(&unobs)
            .unwrap();
        let rect = sys.rectangle(&[Some(vec!["1"])]).unwrap();
        let sys = sys.with_secret(SecretSpec::new(vec![rect])).unwrap();
        let m = materialize(&sys, 100).unwrap();
        assert_eq!(m.fault_names(), unobs);
        let one = m.module(0).state_id("1").unwrap();
        assert!(m.secret().contains(&[one]));
        assert!(!m.is_observable(m.event_id("f").unwrap()));
    }
}
