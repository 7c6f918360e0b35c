//! Membership of tape words in `⋃_k P(L_m(G_k))` for generated reductions.
//!
//! Each fragment is determinised lazily over `Δ`. Composite states with a component
//! that can no longer reach a marked local state (sinks, `q_s`, `q_f`, …) are dropped:
//! the composite can then never become marked, so acceptance is unaffected.

use std::collections::{BTreeSet, HashMap};

use crate::automaton::{EventId, StateId};
use crate::error::{Error, Result};
use crate::system::ModularSystem;

use super::reduction::ReductionOutput;

struct LazyFragment {
    sys: ModularSystem,
    /// `live[m][s]`: local state `s` of module `m` can reach a marked state using tape
    /// symbols and unobservable events.
    live: Vec<Vec<bool>>,
    tape: Vec<bool>,
    tuples: Vec<Box<[StateId]>>,
    tuple_index: HashMap<Box<[StateId]>, u32>,
    sets: Vec<(Box<[u32]>, bool)>,
    set_index: HashMap<Box<[u32]>, u32>,
    step: HashMap<(u32, EventId), u32>,
    initial: u32,
    budget: usize,
}

impl LazyFragment {
    fn new(sys: ModularSystem, tape: &BTreeSet<String>, budget: usize) -> Result<Self> {
        let tape_ev: Vec<bool> = sys.events().iter().map(|e| tape.contains(e)).collect();
        let live = sys
            .modules()
            .iter()
            .map(|m| {
                let usable = |e: EventId| {
                    let name = m.alphabet().name(e);
                    tape.contains(name) || !m.alphabet().is_observable(e)
                };
                let mut live: Vec<bool> = (0..m.num_states() as StateId)
                    .map(|s| m.is_marked(s))
                    .collect();
                loop {
                    let mut changed = false;
                    for &(s, e, t) in m.transitions() {
                        if !live[s as usize] && live[t as usize] && usable(e) {
                            live[s as usize] = true;
                            changed = true;
                        }
                    }
                    if !changed {
                        break live;
                    }
                }
            })
            .collect();
        let mut f = LazyFragment {
            sys,
            live,
            tape: tape_ev,
            tuples: Vec::new(),
            tuple_index: HashMap::new(),
            sets: Vec::new(),
            set_index: HashMap::new(),
            step: HashMap::new(),
            initial: 0,
            budget,
        };
        let mut seed = Vec::new();
        let mut inits = Vec::new();
        f.sys.for_each_initial(|t| inits.push(t.to_vec()));
        for t in inits {
            if let Some(id) = f.intern(&t)? {
                seed.push(id);
            }
        }
        f.initial = f.closure(seed)?;
        Ok(f)
    }

    fn intern(&mut self, t: &[StateId]) -> Result<Option<u32>> {
        if t.iter()
            .enumerate()
            .any(|(m, &s)| !self.live[m][s as usize])
        {
            return Ok(None);
        }
        if let Some(&id) = self.tuple_index.get(t) {
            return Ok(Some(id));
        }
        if self.tuples.len() >= self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let id = self.tuples.len() as u32;
        self.tuples.push(t.into());
        self.tuple_index.insert(t.into(), id);
        Ok(Some(id))
    }

    /// Candidate events at a tuple: those some component can execute locally.
    fn candidates(&self, t: &[StateId]) -> BTreeSet<EventId> {
        let mut out = BTreeSet::new();
        for (m, module) in self.sys.modules().iter().enumerate() {
            for &(_, le, _) in module.outgoing(t[m]) {
                let e = self
                    .sys
                    .event_id(module.alphabet().name(le))
                    .expect("module event is global");
                out.insert(e);
            }
        }
        out
    }

    fn successors(&mut self, id: u32, e: EventId) -> Result<Vec<u32>> {
        let t = self.tuples[id as usize].clone();
        let mut next = Vec::new();
        self.sys
            .for_each_successor(&t, e, |s| next.push(s.to_vec()));
        let mut out = Vec::new();
        for s in next {
            if let Some(x) = self.intern(&s)? {
                out.push(x);
            }
        }
        Ok(out)
    }

    fn closure(&mut self, seed: Vec<u32>) -> Result<u32> {
        let mut seen: BTreeSet<u32> = seed.iter().copied().collect();
        let mut stack = seed;
        while let Some(x) = stack.pop() {
            let t = self.tuples[x as usize].clone();
            for e in self.candidates(&t) {
                if self.sys.is_observable(e) {
                    continue;
                }
                for y in self.successors(x, e)? {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        let key: Box<[u32]> = seen.into_iter().collect();
        if let Some(&id) = self.set_index.get(&key) {
            return Ok(id);
        }
        let accepting = key
            .iter()
            .any(|&x| self.sys.is_marked(&self.tuples[x as usize]));
        let id = self.sets.len() as u32;
        self.sets.push((key.clone(), accepting));
        self.set_index.insert(key, id);
        Ok(id)
    }

    fn advance(&mut self, set: u32, e: EventId) -> Result<u32> {
        if let Some(&n) = self.step.get(&(set, e)) {
            return Ok(n);
        }
        let members = self.sets[set as usize].0.clone();
        let mut seed = Vec::new();
        for &x in members.iter() {
            seed.extend(self.successors(x, e)?);
        }
        let n = self.closure(seed)?;
        self.step.insert((set, e), n);
        Ok(n)
    }

    fn accepts(&mut self, word: &[String]) -> Result<bool> {
        let mut cur = self.initial;
        for w in word {
            let e = self
                .sys
                .event_id(w)
                .filter(|&e| self.tape[e as usize])
                .ok_or_else(|| Error::UnknownEvent(w.clone()))?;
            cur = self.advance(cur, e)?;
            if self.sets[cur as usize].0.is_empty() {
                return Ok(false);
            }
        }
        Ok(self.sets[cur as usize].1)
    }
}

/// Decides `w ∈ ⋃_k P(L_m(G_k))` for words over the tape alphabet of a reduction.
/// Determinisation results are cached across queries.
pub struct FragmentMembership {
    fragments: Vec<LazyFragment>,
}

impl FragmentMembership {
    /// `budget` bounds the composite states interned per fragment.
    pub fn new(out: &ReductionOutput, budget: usize) -> Result<Self> {
        let tape: BTreeSet<String> = out.tape_alphabet.iter().cloned().collect();
        let fragments = (0..out.inventory.len())
            .map(|k| LazyFragment::new(out.fragment_system(k)?, &tape, budget))
            .collect::<Result<_>>()?;
        Ok(FragmentMembership { fragments })
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    /// Whether fragment `k` accepts `word`.
    pub fn fragment_accepts(&mut self, k: usize, word: &[String]) -> Result<bool> {
        self.fragments[k].accepts(word)
    }

    /// Index of the first fragment accepting `word`, if any.
    pub fn first_accepting(&mut self, word: &[String]) -> Result<Option<usize>> {
        for k in 0..self.fragments.len() {
            if self.fragments[k].accepts(word)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn contains(&mut self, word: &[String]) -> Result<bool> {
        Ok(self.first_accepting(word)?.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::reduction::{gen_adiag_reduction, gen_detectability_reduction};
    use crate::gadgets::tm::tests::scanner;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn accepting_run_is_outside_the_union() {
        let tm = scanner(&["1"], 1, true);
        let out = gen_detectability_reduction(&tm).unwrap();
        let mut mem = FragmentMembership::new(&out, 1_000_000).unwrap();
        let run = words("# q0:1 b # 1 q0:b # qa:1 1");
        for cut in 0..=run.len() {
            let w = &run[..cut];
            let has_accept = w.iter().any(|s| s.starts_with("qa:"));
            assert_eq!(mem.contains(w).unwrap(), !has_accept, "prefix {w:?}");
        }
        // A following `#` closes the accepting configuration; anything after it is wrong.
        assert!(!mem
            .contains(&words("# q0:1 b # 1 q0:b # qa:1 1 #"))
            .unwrap());
        assert!(mem
            .contains(&words("# q0:1 b # 1 q0:b # qa:1 1 # 1"))
            .unwrap());
    }

    #[test]
    fn fragments_catch_their_defects() {
        let tm = scanner(&["1"], 1, true);
        let out = gen_adiag_reduction(&tm).unwrap();
        let mut mem = FragmentMembership::new(&out, 1_000_000).unwrap();
        let cases = [
            ("b", "A1"),
            ("# q0:b", "A1"),
            ("# q0:1 1", "A2"),
            ("# q0:1 #", "A3"),
            ("# q0:1 b b", "A4"),
            ("# q0:1 b # 1 q0:1 # qa:1 1", "C(q0:1,b,#)"),
        ];
        for (w, frag) in cases {
            let k = out
                .inventory
                .iter()
                .position(|e| e.fragment.to_string() == frag)
                .unwrap();
            assert!(
                mem.fragment_accepts(k, &words(w)).unwrap(),
                "{frag} misses {w}"
            );
        }
        let first = mem.first_accepting(&words("b")).unwrap();
        assert_eq!(first, Some(0));
    }
}
