//! Finite automata over named events.
//!
//! States and events are addressed by dense ids. Event ids index the sorted
//! event list of the automaton's [`Alphabet`]; state ids follow insertion
//! order of the builder.

use std::collections::{BTreeSet, HashMap};

use crate::error::{malformed, Error, Result};

pub type StateId = u32;
pub type EventId = u32;

/// Event names plus the observable subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    events: Vec<String>,
    observable: Vec<bool>,
}

impl Alphabet {
    /// Builds an alphabet; every event not listed in `unobservable` is observable.
    pub fn new<I, S>(events: I, unobservable: &BTreeSet<String>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let events: BTreeSet<String> = events.into_iter().map(Into::into).collect();
        let events: Vec<String> = events.into_iter().collect();
        let observable = events.iter().map(|e| !unobservable.contains(e)).collect();
        Alphabet { events, observable }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.events
    }

    pub fn name(&self, e: EventId) -> &str {
        &self.events[e as usize]
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.events
            .binary_search_by(|probe| probe.as_str().cmp(name))
            .ok()
            .map(|i| i as EventId)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.id(name).is_some()
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.observable[e as usize]
    }

    pub fn observable(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len() as EventId).filter(|&e| self.observable[e as usize])
    }

    pub fn unobservable(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len() as EventId).filter(|&e| !self.observable[e as usize])
    }

    pub fn unobservable_names(&self) -> BTreeSet<String> {
        self.unobservable()
            .map(|e| self.name(e).to_string())
            .collect()
    }

    pub(crate) fn reflag(&mut self, observable: impl Fn(&str) -> bool) {
        for (flag, name) in self.observable.iter_mut().zip(&self.events) {
            *flag = observable(name);
        }
    }
}

/// A nondeterministic finite automaton `(Q, Σ, δ, I, F)`.
#[derive(Debug, Clone)]
pub struct Nfa {
    name: String,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    alphabet: Alphabet,
    /// Sorted, deduplicated `(source, event, target)` triples.
    transitions: Vec<(StateId, EventId, StateId)>,
    /// `transitions[out[s]..out[s + 1]]` leave state `s`.
    out: Vec<usize>,
    initial: Vec<StateId>,
    marked: Vec<bool>,
}

impl Nfa {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s as usize]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_marked(&self, s: StateId) -> bool {
        self.marked[s as usize]
    }

    pub fn marked(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len() as StateId).filter(|&s| self.marked[s as usize])
    }

    pub fn all_marked(&self) -> bool {
        self.marked.iter().all(|&m| m)
    }

    pub fn transitions(&self) -> &[(StateId, EventId, StateId)] {
        &self.transitions
    }

    /// Transitions leaving `s`, sorted by event then target.
    pub fn outgoing(&self, s: StateId) -> &[(StateId, EventId, StateId)] {
        &self.transitions[self.out[s as usize]..self.out[s as usize + 1]]
    }

    /// Targets of `s` under `e`, sorted.
    pub fn successors(&self, s: StateId, e: EventId) -> impl Iterator<Item = StateId> + '_ {
        let out = self.outgoing(s);
        let lo = out.partition_point(|&(_, ev, _)| ev < e);
        let hi = out.partition_point(|&(_, ev, _)| ev <= e);
        out[lo..hi].iter().map(|&(_, _, t)| t)
    }

    pub fn has_successor(&self, s: StateId, e: EventId) -> bool {
        self.successors(s, e).next().is_some()
    }

    /// Returns a copy whose observable flags follow `observable`.
    pub fn with_observability(&self, observable: impl Fn(&str) -> bool) -> Nfa {
        let mut copy = self.clone();
        copy.alphabet.reflag(observable);
        copy
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Nfa {
        self.name = name.into();
        self
    }

    /// Assembles an automaton from already-resolved ids. Transitions must refer to
    /// events of `alphabet` and to indices of `states`.
    pub(crate) fn from_parts(
        name: String,
        states: Vec<String>,
        alphabet: Alphabet,
        mut transitions: Vec<(StateId, EventId, StateId)>,
        mut initial: Vec<StateId>,
        marked: Vec<bool>,
    ) -> Nfa {
        transitions.sort_unstable();
        transitions.dedup();
        initial.sort_unstable();
        initial.dedup();
        let n = states.len();
        let mut out = vec![0usize; n + 1];
        for &(s, _, _) in &transitions {
            out[s as usize + 1] += 1;
        }
        for i in 0..n {
            out[i + 1] += out[i];
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as StateId))
            .collect();
        Nfa {
            name,
            states,
            index,
            alphabet,
            transitions,
            out,
            initial,
            marked,
        }
    }

    /// Reinterprets the automaton as a discrete event system (all states marked).
    pub fn into_des(mut self) -> Des {
        self.marked.iter_mut().for_each(|m| *m = true);
        Des(self)
    }
}

/// Name-based builder for [`Nfa`].
#[derive(Debug, Clone, Default)]
pub struct NfaBuilder {
    name: String,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    events: BTreeSet<String>,
    unobservable: BTreeSet<String>,
    transitions: Vec<(StateId, String, StateId)>,
    initial: BTreeSet<StateId>,
    marked: Option<BTreeSet<StateId>>,
}

impl NfaBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NfaBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Declares a state (idempotent) and returns its id.
    pub fn state(&mut self, name: impl AsRef<str>) -> StateId {
        let name = name.as_ref();
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.states.len() as StateId;
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn event(&mut self, name: impl Into<String>) -> &mut Self {
        self.events.insert(name.into());
        self
    }

    pub fn unobservable_event(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        self.events.insert(name.clone());
        self.unobservable.insert(name);
        self
    }

    pub fn transition(
        &mut self,
        src: impl AsRef<str>,
        event: impl Into<String>,
        dst: impl AsRef<str>,
    ) -> &mut Self {
        let s = self.state(src);
        let t = self.state(dst);
        let event = event.into();
        self.events.insert(event.clone());
        self.transitions.push((s, event, t));
        self
    }

    pub fn initial(&mut self, state: impl AsRef<str>) -> &mut Self {
        let s = self.state(state);
        self.initial.insert(s);
        self
    }

    /// Marks a state. Once any state is marked explicitly, unmarked states stay unmarked;
    /// a builder that never marks anything yields an automaton with all states marked.
    pub fn marked(&mut self, state: impl AsRef<str>) -> &mut Self {
        let s = self.state(state);
        self.marked.get_or_insert_with(BTreeSet::new).insert(s);
        self
    }

    /// Declares that no state is marked (as opposed to the all-marked default).
    pub fn no_marked(&mut self) -> &mut Self {
        self.marked.get_or_insert_with(BTreeSet::new);
        self
    }

    pub fn build(&self) -> Result<Nfa> {
        if self.states.is_empty() {
            return Err(malformed(format!(
                "automaton `{}` has no states",
                self.name
            )));
        }
        if self.initial.is_empty() {
            return Err(malformed(format!(
                "automaton `{}` has no initial state",
                self.name
            )));
        }
        let alphabet = Alphabet::new(self.events.iter().cloned(), &self.unobservable);
        let mut transitions: Vec<(StateId, EventId, StateId)> = self
            .transitions
            .iter()
            .map(|(s, e, t)| (*s, alphabet.id(e).expect("event registered"), *t))
            .collect();
        transitions.sort_unstable();
        transitions.dedup();
        let n = self.states.len();
        let mut out = vec![0usize; n + 1];
        for &(s, _, _) in &transitions {
            out[s as usize + 1] += 1;
        }
        for i in 0..n {
            out[i + 1] += out[i];
        }
        let marked = match &self.marked {
            None => vec![true; n],
            Some(set) => (0..n as StateId).map(|s| set.contains(&s)).collect(),
        };
        Ok(Nfa {
            name: self.name.clone(),
            states: self.states.clone(),
            index: self.index.clone(),
            alphabet,
            transitions,
            out,
            initial: self.initial.iter().copied().collect(),
            marked,
        })
    }
}

impl NfaBuilder {
    /// Starts a builder pre-filled with the contents of `nfa`.
    pub fn from_nfa(nfa: &Nfa) -> Self {
        let mut b = NfaBuilder::new(nfa.name());
        for s in nfa.state_names() {
            b.state(s);
        }
        for (e, name) in nfa.alphabet().names().iter().enumerate() {
            if nfa.alphabet().is_observable(e as EventId) {
                b.event(name.clone());
            } else {
                b.unobservable_event(name.clone());
            }
        }
        for &(s, e, t) in nfa.transitions() {
            b.transitions
                .push((s, nfa.alphabet().name(e).to_string(), t));
        }
        for &s in nfa.initial() {
            b.initial.insert(s);
        }
        if !nfa.all_marked() {
            b.no_marked();
            for s in nfa.marked() {
                b.marked(nfa.state_name(s));
            }
        }
        b
    }
}

/// A discrete event system: an [`Nfa`] whose states are all marked.
#[derive(Debug, Clone)]
pub struct Des(Nfa);

impl Des {
    pub fn nfa(&self) -> &Nfa {
        &self.0
    }

    pub fn into_nfa(self) -> Nfa {
        self.0
    }
}

impl std::ops::Deref for Des {
    type Target = Nfa;
    fn deref(&self) -> &Nfa {
        &self.0
    }
}

/// Outcome of checking the two standing assumptions on a system.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// A state without any outgoing transition, if one exists.
    pub deadlock: Option<String>,
    /// A cycle `(source, event, target)*` made only of unobservable transitions.
    pub unobservable_cycle: Option<Vec<(String, String, String)>>,
}

impl ValidationReport {
    pub fn deadlock_free(&self) -> bool {
        self.deadlock.is_none()
    }

    pub fn no_unobservable_loop(&self) -> bool {
        self.unobservable_cycle.is_none()
    }

    pub fn is_valid(&self) -> bool {
        self.deadlock_free() && self.no_unobservable_loop()
    }

    pub fn into_result(self) -> Result<()> {
        if let Some(state) = &self.deadlock {
            return Err(Error::Assumption(format!("state `{state}` is a deadlock")));
        }
        if let Some(cycle) = &self.unobservable_cycle {
            let (s, _, _) = &cycle[0];
            return Err(Error::Assumption(format!(
                "state `{s}` lies on a loop of unobservable events"
            )));
        }
        Ok(())
    }
}

/// Checks deadlock freedom (every state has an outgoing transition) and the absence of
/// loops made solely of unobservable events, over all states of `g`.
pub fn validate_des(g: &Nfa) -> ValidationReport {
    let deadlock = (0..g.num_states() as StateId)
        .find(|&s| g.outgoing(s).is_empty())
        .map(|s| g.state_name(s).to_string());
    let roots: Vec<StateId> = (0..g.num_states() as StateId).collect();
    let cycle = find_cycle(g.num_states(), &roots, |s, out| {
        out.extend(
            g.outgoing(s)
                .iter()
                .filter(|&&(_, e, _)| !g.alphabet().is_observable(e))
                .map(|&(_, e, t)| (e, t)),
        );
    });
    let unobservable_cycle = cycle.map(|edges| {
        edges
            .into_iter()
            .map(|(s, e, t)| {
                (
                    g.state_name(s).to_string(),
                    g.alphabet().name(e).to_string(),
                    g.state_name(t).to_string(),
                )
            })
            .collect()
    });
    ValidationReport {
        deadlock,
        unobservable_cycle,
    }
}

/// Iterative three-colour DFS over the graph given by `edges`, starting from `roots`.
/// Returns the edges of the first cycle found.
pub(crate) fn find_cycle(
    num_nodes: usize,
    roots: &[StateId],
    mut edges: impl FnMut(StateId, &mut Vec<(EventId, StateId)>),
) -> Option<Vec<(StateId, EventId, StateId)>> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;
    let mut colour = vec![WHITE; num_nodes];
    // frame: (node, its successors, next index, event used to enter)
    let mut stack: Vec<(StateId, Vec<(EventId, StateId)>, usize)> = Vec::new();
    for &root in roots {
        if colour[root as usize] != WHITE {
            continue;
        }
        let mut succ = Vec::new();
        edges(root, &mut succ);
        colour[root as usize] = GREY;
        stack.push((root, succ, 0));
        while let Some((node, succ, next)) = stack.last_mut() {
            if *next == succ.len() {
                colour[*node as usize] = BLACK;
                stack.pop();
                continue;
            }
            let (e, t) = succ[*next];
            *next += 1;
            let node = *node;
            match colour[t as usize] {
                WHITE => {
                    let mut succ = Vec::new();
                    edges(t, &mut succ);
                    colour[t as usize] = GREY;
                    stack.push((t, succ, 0));
                }
                GREY => {
                    // back edge node -e-> t closes a cycle through the stack
                    let start = stack.iter().position(|f| f.0 == t).expect("grey on stack");
                    let mut cycle = Vec::new();
                    for w in start..stack.len() - 1 {
                        let (s, ref ss, i) = stack[w];
                        let (ev, nt) = ss[i - 1];
                        cycle.push((s, ev, nt));
                    }
                    cycle.push((node, e, t));
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}

/// States reachable from the initial states under any transitions.
pub fn reachable_states(g: &Nfa) -> BTreeSet<StateId> {
    let mut seen = vec![false; g.num_states()];
    let mut stack: Vec<StateId> = Vec::new();
    for &s in g.initial() {
        if !seen[s as usize] {
            seen[s as usize] = true;
            stack.push(s);
        }
    }
    while let Some(s) = stack.pop() {
        for &(_, _, t) in g.outgoing(s) {
            if !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
    }
    (0..g.num_states() as StateId)
        .filter(|&s| seen[s as usize])
        .collect()
}
