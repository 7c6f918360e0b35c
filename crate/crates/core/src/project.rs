//! Natural projection of automata and determinization of the result.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::automaton::{EventId, Nfa, StateId};

/// Transition label after projection. `Silent` is the erased (ε) label and has no
/// textual form, so it can never collide with a user event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Silent,
    Event(EventId),
}

/// An automaton whose transitions may carry the silent label.
#[derive(Debug, Clone)]
pub struct ProjectedNfa {
    /// Kept events, sorted; `Label::Event(i)` refers to `events[i]`.
    pub events: Vec<String>,
    pub num_states: usize,
    pub transitions: Vec<(StateId, Label, StateId)>,
    pub initial: Vec<StateId>,
    pub marked: Vec<bool>,
}

/// Relabels every transition of `g` whose event is not in `keep` with [`Label::Silent`].
/// The state set, initial and marked states are unchanged.
pub fn project(g: &Nfa, keep: &BTreeSet<String>) -> ProjectedNfa {
    let events: Vec<String> = g
        .alphabet()
        .names()
        .iter()
        .filter(|e| keep.contains(*e))
        .cloned()
        .collect();
    let new_id: HashMap<&str, EventId> = events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_str(), i as EventId))
        .collect();
    let mut transitions: Vec<(StateId, Label, StateId)> = g
        .transitions()
        .iter()
        .map(|&(s, e, t)| {
            let label = match new_id.get(g.alphabet().name(e)) {
                Some(&id) => Label::Event(id),
                None => Label::Silent,
            };
            (s, label, t)
        })
        .collect();
    transitions.sort_unstable();
    transitions.dedup();
    ProjectedNfa {
        events,
        num_states: g.num_states(),
        transitions,
        initial: g.initial().to_vec(),
        marked: (0..g.num_states() as StateId)
            .map(|s| g.is_marked(s))
            .collect(),
    }
}

/// A deterministic automaton over the kept events; state 0 is initial.
#[derive(Debug, Clone)]
pub struct Dfa {
    pub events: Vec<String>,
    /// Each state is the set of projected-automaton states it stands for.
    pub subsets: Vec<Vec<StateId>>,
    pub delta: Vec<BTreeMap<EventId, u32>>,
    pub marked: Vec<bool>,
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.subsets.len()
    }

    pub fn step(&self, state: u32, e: EventId) -> Option<u32> {
        self.delta[state as usize].get(&e).copied()
    }

    pub fn accepts(&self, word: &[EventId]) -> bool {
        let mut s = 0u32;
        for &e in word {
            match self.step(s, e) {
                Some(t) => s = t,
                None => return false,
            }
        }
        self.marked[s as usize]
    }
}

impl ProjectedNfa {
    fn silent_edges(&self) -> Vec<Vec<StateId>> {
        let mut silent: Vec<Vec<StateId>> = vec![Vec::new(); self.num_states];
        for &(s, l, t) in &self.transitions {
            if l == Label::Silent {
                silent[s as usize].push(t);
            }
        }
        silent
    }

    fn silent_closure(
        silent: &[Vec<StateId>],
        seed: impl IntoIterator<Item = StateId>,
    ) -> Vec<StateId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<StateId> = seed.into_iter().collect();
        while let Some(s) = stack.pop() {
            if seen.insert(s) {
                stack.extend(silent[s as usize].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// Subset construction with silent closure. A subset is marked iff it contains a
    /// marked state. Only subsets reachable from the initial closure are built.
    pub fn determinize(&self) -> Dfa {
        let mut by_label: HashMap<(StateId, EventId), Vec<StateId>> = HashMap::new();
        for &(s, l, t) in &self.transitions {
            if let Label::Event(e) = l {
                by_label.entry((s, e)).or_default().push(t);
            }
        }
        let mut index: HashMap<Vec<StateId>, u32> = HashMap::new();
        let mut dfa = Dfa {
            events: self.events.clone(),
            subsets: Vec::new(),
            delta: Vec::new(),
            marked: Vec::new(),
        };
        let silent = self.silent_edges();
        let start = Self::silent_closure(&silent, self.initial.iter().copied());
        index.insert(start.clone(), 0);
        dfa.marked
            .push(start.iter().any(|&s| self.marked[s as usize]));
        dfa.subsets.push(start);
        dfa.delta.push(BTreeMap::new());
        let mut queue = VecDeque::from([0u32]);
        while let Some(cur) = queue.pop_front() {
            for e in 0..self.events.len() as EventId {
                let targets: Vec<StateId> = dfa.subsets[cur as usize]
                    .iter()
                    .filter_map(|&s| by_label.get(&(s, e)))
                    .flatten()
                    .copied()
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                let next = Self::silent_closure(&silent, targets);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = dfa.subsets.len() as u32;
                        index.insert(next.clone(), id);
                        dfa.marked
                            .push(next.iter().any(|&s| self.marked[s as usize]));
                        dfa.subsets.push(next);
                        dfa.delta.push(BTreeMap::new());
                        queue.push_back(id);
                        id
                    }
                };
                dfa.delta[cur as usize].insert(e, id);
            }
        }
        dfa
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::NfaBuilder;

    #[test]
    fn full_projection_is_identity() {
        let mut b = NfaBuilder::new("g");
        b.transition("1", "a", "2")
            .transition("2", "b", "1")
            .initial("1");
        let g = b.build().unwrap();
        let keep: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let p = project(&g, &keep);
        assert!(p.transitions.iter().all(|&(_, l, _)| l != Label::Silent));
        assert_eq!(p.transitions.len(), g.transitions().len());
    }

    #[test]
    fn unkept_events_become_silent() {
        let mut b = NfaBuilder::new("g");
        b.transition("1", "u", "2")
            .transition("2", "a", "3")
            .initial("1");
        let g = b.build().unwrap();
        let keep: BTreeSet<String> = ["a".to_string()].into();
        let p = project(&g, &keep);
        assert_eq!(p.events, vec!["a"]);
        assert_eq!(
            p.transitions,
            vec![(0, Label::Silent, 1), (1, Label::Event(0), 2)]
        );
    }

    #[test]
    fn determinize_merges_silent_branches() {
        let mut b = NfaBuilder::new("g");
        for s in ["0", "1", "2", "3"] {
            b.state(s);
        }
        b.transition("0", "u", "2")
            .transition("0", "a", "1")
            .transition("2", "a", "3")
            .initial("0")
            .marked("3");
        let g = b.build().unwrap();
        let keep: BTreeSet<String> = ["a".to_string()].into();
        let dfa = project(&g, &keep).determinize();
        assert_eq!(dfa.num_states(), 2);
        assert_eq!(dfa.subsets[0], vec![0, 2]);
        assert_eq!(dfa.subsets[1], vec![1, 3]);
        assert!(dfa.accepts(&[0]));
        assert!(!dfa.accepts(&[]));
    }
}
