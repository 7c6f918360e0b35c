//! Current-state estimation: unobservable reach, the observer (subset construction)
//! and the Shu–Lin detector whose states are estimates of cardinality one or two.
//!
//! Everything runs over a [`LazyProduct`], so estimates of a modular system are sets
//! of interned composite-state ids and the product is only explored as far as the
//! estimates require. A monolithic automaton is the one-module special case.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use crate::automaton::{EventId, StateId};
use crate::compose::LazyProduct;
use crate::error::{Error, Result};
use crate::system::{CompositeState, ModularSystem};

/// A nonempty set of composite-state ids in canonical (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Estimate(Arc<[StateId]>);

impl Estimate {
    /// Builds an estimate from arbitrary ids; duplicates are removed.
    pub fn new(states: impl IntoIterator<Item = StateId>) -> Self {
        let mut v: Vec<StateId> = states.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Estimate(v.into())
    }

    pub fn states(&self) -> &[StateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn is_subset_of(&self, other: &Estimate) -> bool {
        self.0.iter().all(|&s| other.contains(s))
    }

    /// All 2-element subsets in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = Estimate> + '_ {
        let v = &self.0;
        (0..v.len()).flat_map(move |i| {
            (i + 1..v.len()).map(move |j| Estimate(Arc::from(&[v[i], v[j]][..])))
        })
    }
}

/// Observation machinery over one system: a lazy product plus a cache of the
/// unobservable closure of every composite state seen so far.
#[derive(Debug)]
pub struct Estimator<'a> {
    prod: LazyProduct<'a>,
    closure: Vec<Option<Arc<[StateId]>>>,
}

impl<'a> Estimator<'a> {
    pub fn new(sys: &'a ModularSystem, budget: usize) -> Self {
        Estimator {
            prod: LazyProduct::new(sys, budget),
            closure: Vec::new(),
        }
    }

    pub fn system(&self) -> &'a ModularSystem {
        self.prod.system()
    }

    pub fn product(&self) -> &LazyProduct<'a> {
        &self.prod
    }

    pub fn product_mut(&mut self) -> &mut LazyProduct<'a> {
        &mut self.prod
    }

    pub fn budget(&self) -> usize {
        self.prod.budget()
    }

    fn closure_of(&mut self, s: StateId) -> Result<Arc<[StateId]>> {
        if let Some(Some(c)) = self.closure.get(s as usize) {
            return Ok(c.clone());
        }
        let sys = self.prod.system();
        let mut seen = vec![s];
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            let edges = self.prod.outgoing(x)?;
            for &(e, t) in edges.iter() {
                if !sys.is_observable(e) && !seen.contains(&t) {
                    seen.push(t);
                    stack.push(t);
                }
            }
        }
        seen.sort_unstable();
        let c: Arc<[StateId]> = seen.into();
        if self.closure.len() <= s as usize {
            self.closure.resize(s as usize + 1, None);
        }
        self.closure[s as usize] = Some(c.clone());
        Ok(c)
    }

    /// Least superset of `seed` closed under unobservable transitions.
    pub fn unobservable_reach(
        &mut self,
        seed: impl IntoIterator<Item = StateId>,
    ) -> Result<Estimate> {
        let mut all = Vec::new();
        for s in seed {
            all.extend_from_slice(&self.closure_of(s)?);
        }
        Ok(Estimate::new(all))
    }

    /// `UR(I)`: the estimate before any observation.
    pub fn initial_estimate(&mut self) -> Result<Estimate> {
        let init = self.prod.initial_states()?;
        self.unobservable_reach(init)
    }

    /// Closure of the `e`-successors of `s`; `None` when no member can do `e`.
    pub fn observer_step(&mut self, s: &Estimate, e: EventId) -> Result<Option<Estimate>> {
        let mut targets = Vec::new();
        for &x in s.states() {
            self.prod.successors(x, e, &mut targets)?;
        }
        if targets.is_empty() {
            return Ok(None);
        }
        self.unobservable_reach(targets).map(Some)
    }

    /// All defined observer steps out of `s`, ordered by event id.
    pub fn observer_successors(&mut self, s: &Estimate) -> Result<Vec<(EventId, Estimate)>> {
        let sys = self.prod.system();
        let mut by_event: BTreeMap<EventId, Vec<StateId>> = BTreeMap::new();
        for &x in s.states() {
            for &(e, t) in self.prod.outgoing(x)?.iter() {
                if sys.is_observable(e) {
                    by_event.entry(e).or_default().push(t);
                }
            }
        }
        by_event
            .into_iter()
            .map(|(e, targets)| Ok((e, self.unobservable_reach(targets)?)))
            .collect()
    }

    /// Composite-state labels of the members of `s`.
    pub fn labels(&self, s: &Estimate) -> Vec<String> {
        s.states().iter().map(|&x| self.prod.label(x)).collect()
    }

    pub fn event_name(&self, e: EventId) -> &'a str {
        &self.prod.system().events()[e as usize]
    }
}

/// A reachable graph whose nodes are estimates, with edges labelled by events.
#[derive(Debug, Clone, Default)]
pub struct EstimateGraph {
    pub nodes: Vec<Estimate>,
    pub index: HashMap<Estimate, u32>,
    /// Outgoing edges per node, sorted by event then target.
    pub edges: Vec<Vec<(EventId, u32)>>,
    pub initial: Vec<u32>,
}

impl EstimateGraph {
    fn intern(&mut self, e: Estimate, budget: usize, queue: &mut VecDeque<u32>) -> Result<u32> {
        if let Some(&id) = self.index.get(&e) {
            return Ok(id);
        }
        if self.nodes.len() >= budget {
            return Err(Error::BudgetExceeded { budget });
        }
        let id = self.nodes.len() as u32;
        self.index.insert(e.clone(), id);
        self.nodes.push(e);
        self.edges.push(Vec::new());
        queue.push_back(id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<(EventId, u32)>] {
        &self.edges
    }
}

/// Deterministic observer: one initial estimate, at most one successor per event.
pub type ObserverAutomaton = EstimateGraph;

/// Detector: estimates of cardinality one or two, nondeterministic transitions.
pub type DetectorAutomaton = EstimateGraph;

/// Builds the reachable observer. Node 0 is `UR(I)`.
pub fn build_observer(est: &mut Estimator<'_>) -> Result<ObserverAutomaton> {
    let budget = est.budget();
    let mut g = EstimateGraph::default();
    let mut queue = VecDeque::new();
    let init = est.initial_estimate()?;
    let id = g.intern(init, budget, &mut queue)?;
    g.initial.push(id);
    while let Some(cur) = queue.pop_front() {
        let node = g.nodes[cur as usize].clone();
        for (e, next) in est.observer_successors(&node)? {
            let t = g.intern(next, budget, &mut queue)?;
            g.edges[cur as usize].push((e, t));
        }
    }
    Ok(g)
}

/// Splits an estimate per the detector rule: itself if a singleton, else its 2-subsets.
fn decompose(t: Estimate) -> Vec<Estimate> {
    if t.is_singleton() {
        vec![t]
    } else {
        t.pairs().collect()
    }
}

/// Builds the reachable detector.
pub fn build_detector(est: &mut Estimator<'_>) -> Result<DetectorAutomaton> {
    let budget = est.budget();
    let mut g = EstimateGraph::default();
    let mut queue = VecDeque::new();
    let init = est.initial_estimate()?;
    for s in decompose(init) {
        let id = g.intern(s, budget, &mut queue)?;
        g.initial.push(id);
    }
    while let Some(cur) = queue.pop_front() {
        let node = g.nodes[cur as usize].clone();
        let mut out = Vec::new();
        for (e, next) in est.observer_successors(&node)? {
            for s in decompose(next) {
                out.push((e, g.intern(s, budget, &mut queue)?));
            }
        }
        out.sort_unstable();
        out.dedup();
        g.edges[cur as usize] = out;
    }
    Ok(g)
}

/// Convenience wrapper for callers that hold a system rather than an estimator:
/// the unobservable reach of a set of composite states, as sorted tuples.
pub fn unobservable_reach(
    sys: &ModularSystem,
    seed: &[CompositeState],
    budget: usize,
) -> Result<Vec<CompositeState>> {
    let mut est = Estimator::new(sys, budget);
    let ids = seed
        .iter()
        .map(|s| est.product_mut().intern_tuple(&s.0))
        .collect::<Result<Vec<_>>>()?;
    let r = est.unobservable_reach(ids)?;
    let mut out: Vec<CompositeState> = r
        .states()
        .iter()
        .map(|&x| CompositeState(est.product().tuple(x).to_vec()))
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Nfa, NfaBuilder};
    use std::collections::BTreeSet;

    fn mono(trans: &[(&str, &str, &str)], init: &[&str], unobs: &[&str]) -> ModularSystem {
        let mut b = NfaBuilder::new("g");
        for &(s, e, t) in trans {
            b.transition(s, e, t);
        }
        for i in init {
            b.initial(*i);
        }
        for u in unobs {
            b.unobservable_event(*u);
        }
        let g: Nfa = b.build().unwrap();
        ModularSystem::monolithic(g)
    }

    fn names(est: &Estimator<'_>, e: &Estimate) -> Vec<String> {
        let mut v = est.labels(e);
        v.sort();
        v
    }

    #[test]
    fn closure_without_unobservables_is_identity() {
        let sys = mono(&[("1", "a", "2"), ("2", "a", "1")], &["1"], &[]);
        let mut est = Estimator::new(&sys, 100);
        let init = est.initial_estimate().unwrap();
        assert_eq!(names(&est, &init), ["1"]);
    }

    #[test]
    fn closure_is_transitive() {
        let sys = mono(
            &[("1", "u", "2"), ("2", "u", "3"), ("3", "a", "3")],
            &["1"],
            &["u"],
        );
        let mut est = Estimator::new(&sys, 100);
        let init = est.initial_estimate().unwrap();
        assert_eq!(names(&est, &init), ["1", "2", "3"]);
    }

    fn fork() -> ModularSystem {
        mono(
            &[("0", "u", "2"), ("0", "a", "1"), ("2", "a", "3")],
            &["0"],
            &["u"],
        )
    }

    #[test]
    fn observer_step_on_fork() {
        let sys = fork();
        let mut est = Estimator::new(&sys, 100);
        let init = est.initial_estimate().unwrap();
        assert_eq!(names(&est, &init), ["0", "2"]);
        let a = sys.event_id("a").unwrap();
        let next = est.observer_step(&init, a).unwrap().unwrap();
        assert_eq!(names(&est, &next), ["1", "3"]);
        assert!(est.observer_step(&next, a).unwrap().is_none());
    }

    #[test]
    fn observer_of_fork() {
        let sys = fork();
        let mut est = Estimator::new(&sys, 100);
        let obs = build_observer(&mut est).unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs.edges[0].len(), 1);
        assert!(obs.edges[1].is_empty());
    }

    #[test]
    fn observer_of_deterministic_system_has_singletons() {
        let sys = mono(
            &[("1", "a", "2"), ("2", "b", "1"), ("2", "a", "2")],
            &["1"],
            &[],
        );
        let mut est = Estimator::new(&sys, 100);
        let obs = build_observer(&mut est).unwrap();
        assert_eq!(obs.len(), 2);
        assert!(obs.nodes.iter().all(Estimate::is_singleton));
    }

    #[test]
    fn detector_of_two_initial_states() {
        let sys = mono(&[("1", "a", "1"), ("2", "a", "1")], &["1", "2"], &[]);
        let mut est = Estimator::new(&sys, 100);
        let det = build_detector(&mut est).unwrap();
        assert_eq!(det.initial.len(), 1);
        assert_eq!(det.nodes[det.initial[0] as usize].len(), 2);
        let one = det.edges[0][0].1;
        assert!(det.nodes[one as usize].is_singleton());
        assert_eq!(det.edges[one as usize], vec![(0, one)]);
    }

    #[test]
    fn detector_branching_example() {
        let sys = mono(
            &[("1", "a", "1"), ("1", "a", "2"), ("2", "a", "1")],
            &["1"],
            &[],
        );
        let mut est = Estimator::new(&sys, 100);
        let det = build_detector(&mut est).unwrap();
        let sizes: BTreeSet<usize> = det.nodes.iter().map(Estimate::len).collect();
        assert_eq!(det.len(), 2);
        assert_eq!(sizes, [1, 2].into());
        let pair = det.index[&Estimate::new([0, 1])];
        assert!(det.edges[pair as usize].contains(&(0, pair)));
    }

    #[test]
    fn pairs_are_lexicographic() {
        let e = Estimate::new([3, 1, 2]);
        let p: Vec<Vec<StateId>> = e.pairs().map(|p| p.states().to_vec()).collect();
        assert_eq!(p, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn observer_budget_is_enforced() {
        let sys = mono(
            &[("1", "a", "2"), ("2", "a", "3"), ("3", "a", "1")],
            &["1"],
            &[],
        );
        let mut est = Estimator::new(&sys, 2);
        assert!(matches!(
            build_observer(&mut est),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn reach_wrapper_on_tuples() {
        let sys = mono(&[("1", "u", "2"), ("2", "a", "1")], &["1"], &["u"]);
        let r = unobservable_reach(&sys, &[CompositeState(vec![0])], 10).unwrap();
        assert_eq!(r, vec![CompositeState(vec![0]), CompositeState(vec![1])]);
    }
}
