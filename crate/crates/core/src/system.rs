//! Modular systems `G1 ‖ … ‖ Gn` with global observation, fault and secret annotations.

use std::collections::{BTreeSet, HashSet};

use crate::automaton::{EventId, Nfa, StateId};
use crate::error::{malformed, Error, Result};

/// A tuple of per-module states, one per module in module order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompositeState(pub Vec<StateId>);

impl CompositeState {
    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

/// Secret states as a union of rectangles. Rectangle entry `None` stands for every
/// state of that module.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SecretSpec {
    rectangles: Vec<Vec<Option<Vec<StateId>>>>,
}

impl SecretSpec {
    pub fn empty() -> Self {
        SecretSpec::default()
    }

    pub fn new(mut rectangles: Vec<Vec<Option<Vec<StateId>>>>) -> Self {
        for rect in &mut rectangles {
            for set in rect.iter_mut().flatten() {
                set.sort_unstable();
                set.dedup();
            }
        }
        SecretSpec { rectangles }
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    pub fn rectangles(&self) -> &[Vec<Option<Vec<StateId>>>] {
        &self.rectangles
    }

    /// Whether the composite state `tuple` is secret.
    pub fn contains(&self, tuple: &[StateId]) -> bool {
        self.rectangles.iter().any(|rect| {
            rect.iter().zip(tuple).all(|(set, s)| match set {
                None => true,
                Some(states) => states.binary_search(s).is_ok(),
            })
        })
    }
}

/// An ordered, nonempty list of component automata synchronised on shared event names.
#[derive(Debug, Clone)]
pub struct ModularSystem {
    modules: Vec<Nfa>,
    events: Vec<String>,
    observable: Vec<bool>,
    faults: Vec<bool>,
    /// `local[m][e]`: id of global event `e` in module `m`, if the module has it.
    local: Vec<Vec<Option<EventId>>>,
    /// Modules whose alphabet contains each global event.
    participants: Vec<Vec<u32>>,
    secret: SecretSpec,
}

impl ModularSystem {
    /// Builds a system in which every event named in `unobservable` is unobservable and
    /// every other event is observable; component alphabets are re-flagged to match.
    pub fn new(modules: Vec<Nfa>, unobservable: &BTreeSet<String>) -> Result<Self> {
        if modules.is_empty() {
            return Err(malformed("a modular system needs at least one module"));
        }
        let mut names = HashSet::new();
        for m in &modules {
            if !names.insert(m.name().to_string()) {
                return Err(malformed(format!("duplicate module name `{}`", m.name())));
            }
        }
        let union: BTreeSet<String> = modules
            .iter()
            .flat_map(|m| m.alphabet().names().iter().cloned())
            .collect();
        if let Some(e) = unobservable.iter().find(|e| !union.contains(*e)) {
            return Err(Error::UnknownEvent(e.clone()));
        }
        let events: Vec<String> = union.into_iter().collect();
        let observable: Vec<bool> = events.iter().map(|e| !unobservable.contains(e)).collect();
        let modules: Vec<Nfa> = modules
            .into_iter()
            .map(|m| m.with_observability(|e| !unobservable.contains(e)))
            .collect();
        let local: Vec<Vec<Option<EventId>>> = modules
            .iter()
            .map(|m| events.iter().map(|e| m.alphabet().id(e)).collect())
            .collect();
        let participants = (0..events.len())
            .map(|e| {
                (0..modules.len() as u32)
                    .filter(|&m| local[m as usize][e].is_some())
                    .collect()
            })
            .collect();
        let faults = vec![false; events.len()];
        Ok(ModularSystem {
            modules,
            events,
            observable,
            faults,
            local,
            participants,
            secret: SecretSpec::empty(),
        })
    }

    /// A one-module system keeping the automaton's own observability flags.
    pub fn monolithic(nfa: Nfa) -> Self {
        let unobservable = nfa.alphabet().unobservable_names();
        ModularSystem::new(vec![nfa], &unobservable).expect("single module is well formed")
    }

    /// Declares the fault events, replacing any previous declaration.
    pub fn with_faults(mut self, faults: &BTreeSet<String>) -> Result<Self> {
        self.faults.iter_mut().for_each(|f| *f = false);
        for f in faults {
            let e = self
                .event_id(f)
                .ok_or_else(|| Error::UnknownEvent(f.clone()))?;
            self.faults[e as usize] = true;
        }
        Ok(self)
    }

    pub fn with_secret(mut self, secret: SecretSpec) -> Result<Self> {
        for rect in secret.rectangles() {
            if rect.len() != self.modules.len() {
                return Err(malformed(format!(
                    "secret rectangle has arity {} but the system has {} modules",
                    rect.len(),
                    self.modules.len()
                )));
            }
            for (m, set) in rect.iter().enumerate() {
                if let Some(states) = set {
                    if let Some(&s) = states
                        .iter()
                        .find(|&&s| s as usize >= self.modules[m].num_states())
                    {
                        return Err(malformed(format!(
                            "secret refers to state #{s} of module `{}`",
                            self.modules[m].name()
                        )));
                    }
                }
            }
        }
        self.secret = secret;
        Ok(self)
    }

    /// Resolves a rectangle given by state names (`None` = all states of the module).
    pub fn rectangle<S: AsRef<str>>(
        &self,
        entries: &[Option<Vec<S>>],
    ) -> Result<Vec<Option<Vec<StateId>>>> {
        if entries.len() != self.modules.len() {
            return Err(malformed(format!(
                "secret rectangle has arity {} but the system has {} modules",
                entries.len(),
                self.modules.len()
            )));
        }
        entries
            .iter()
            .zip(&self.modules)
            .map(|(entry, m)| match entry {
                None => Ok(None),
                Some(names) => names
                    .iter()
                    .map(|n| {
                        m.state_id(n.as_ref())
                            .ok_or_else(|| Error::UnknownState(n.as_ref().to_string()))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
            })
            .collect()
    }

    pub fn modules(&self) -> &[Nfa] {
        &self.modules
    }

    pub fn module(&self, i: usize) -> &Nfa {
        &self.modules[i]
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.events
            .binary_search_by(|e| e.as_str().cmp(name))
            .ok()
            .map(|i| i as EventId)
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.observable[e as usize]
    }

    pub fn is_fault(&self, e: EventId) -> bool {
        self.faults[e as usize]
    }

    pub fn unobservable_names(&self) -> BTreeSet<String> {
        self.names_where(&self.observable, false)
    }

    pub fn fault_names(&self) -> BTreeSet<String> {
        self.names_where(&self.faults, true)
    }

    fn names_where(&self, flags: &[bool], value: bool) -> BTreeSet<String> {
        self.events
            .iter()
            .zip(flags)
            .filter(|(_, &f)| f == value)
            .map(|(e, _)| e.clone())
            .collect()
    }

    pub fn secret(&self) -> &SecretSpec {
        &self.secret
    }

    pub fn participants(&self, e: EventId) -> &[u32] {
        &self.participants[e as usize]
    }

    pub fn local_event(&self, module: usize, e: EventId) -> Option<EventId> {
        self.local[module][e as usize]
    }

    /// Initial composite states: the product of the component initial sets.
    pub fn initial_count(&self) -> u128 {
        self.modules
            .iter()
            .map(|m| m.initial().len() as u128)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }

    pub fn for_each_initial(&self, mut f: impl FnMut(&[StateId])) {
        let choices: Vec<&[StateId]> = self.modules.iter().map(|m| m.initial()).collect();
        odometer(&choices, &mut f);
    }

    /// Calls `f` on every `e`-successor of `tuple` (the synchronous product rule: every
    /// module whose alphabet has `e` must move, the others stay put).
    pub fn for_each_successor(&self, tuple: &[StateId], e: EventId, mut f: impl FnMut(&[StateId])) {
        let parts = &self.participants[e as usize];
        let mut moves: Vec<Vec<StateId>> = Vec::with_capacity(parts.len());
        for &m in parts {
            let m = m as usize;
            let le = self.local[m][e as usize].expect("participant has event");
            let succ: Vec<StateId> = self.modules[m].successors(tuple[m], le).collect();
            if succ.is_empty() {
                return;
            }
            moves.push(succ);
        }
        let mut choices: Vec<&[StateId]> = tuple.iter().map(std::slice::from_ref).collect();
        for (&m, succ) in parts.iter().zip(&moves) {
            choices[m as usize] = succ;
        }
        odometer(&choices, &mut f);
    }

    pub(crate) fn check_tuple(&self, s: &[StateId]) -> Result<()> {
        if s.len() != self.modules.len() {
            return Err(malformed(format!(
                "composite state has arity {} but the system has {} modules",
                s.len(),
                self.modules.len()
            )));
        }
        for (m, &x) in s.iter().enumerate() {
            if x as usize >= self.modules[m].num_states() {
                return Err(malformed(format!(
                    "module `{}` has no state #{x}",
                    self.modules[m].name()
                )));
            }
        }
        Ok(())
    }

    /// The `event`-successors of composite state `s`.
    pub fn compose_step(
        &self,
        s: &CompositeState,
        event: &str,
    ) -> Result<BTreeSet<CompositeState>> {
        self.check_tuple(&s.0)?;
        let e = self
            .event_id(event)
            .ok_or_else(|| Error::UnknownEvent(event.to_string()))?;
        let mut out = BTreeSet::new();
        self.for_each_successor(&s.0, e, |t| {
            out.insert(CompositeState(t.to_vec()));
        });
        Ok(out)
    }

    /// Human-readable name of a composite state: the bare state name for one module,
    /// `(s1,s2,…)` otherwise.
    pub fn tuple_label(&self, tuple: &[StateId]) -> String {
        if self.modules.len() == 1 {
            return self.modules[0].state_name(tuple[0]).to_string();
        }
        let parts: Vec<&str> = tuple
            .iter()
            .zip(&self.modules)
            .map(|(&s, m)| m.state_name(s))
            .collect();
        format!("({})", parts.join(","))
    }

    /// Resolves a composite state from per-module state names.
    pub fn tuple_of<S: AsRef<str>>(&self, names: &[S]) -> Result<CompositeState> {
        if names.len() != self.modules.len() {
            return Err(malformed("composite state arity mismatch"));
        }
        names
            .iter()
            .zip(&self.modules)
            .map(|(n, m)| {
                m.state_id(n.as_ref())
                    .ok_or_else(|| Error::UnknownState(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(CompositeState)
    }

    /// Whether every event that occurs in two or more module alphabets is observable.
    pub fn private_unobservable(&self) -> bool {
        self.shared_unobservable().is_none()
    }

    pub(crate) fn shared_unobservable(&self) -> Option<&str> {
        (0..self.events.len())
            .find(|&e| self.participants[e].len() >= 2 && !self.observable[e])
            .map(|e| self.events[e].as_str())
    }

    pub fn is_marked(&self, tuple: &[StateId]) -> bool {
        tuple
            .iter()
            .zip(&self.modules)
            .all(|(&s, m)| m.is_marked(s))
    }
}

/// Enumerates the cartesian product of `choices` in lexicographic order.
fn odometer(choices: &[&[StateId]], f: &mut impl FnMut(&[StateId])) {
    if choices.iter().any(|c| c.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; choices.len()];
    let mut tuple: Vec<StateId> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&tuple);
        let mut k = choices.len();
        loop {
            if k == 0 {
                return;
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

/// Whether every shared event of `sys` is observable.
pub fn check_private_unobservable(sys: &ModularSystem) -> bool {
    sys.private_unobservable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::NfaBuilder;

    fn module(name: &str, trans: &[(&str, &str, &str)], init: &str) -> Nfa {
        let mut b = NfaBuilder::new(name);
        for &(s, e, t) in trans {
            b.transition(s, e, t);
        }
        b.initial(init);
        b.build().unwrap()
    }

    fn unobs(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn blocked_synchronisation_yields_nothing() {
        let a = module("A", &[("0", "x", "1")], "0");
        let b = module("B", &[("0", "y", "0"), ("1", "x", "0")], "0");
        let sys = ModularSystem::new(vec![a, b], &unobs(&[])).unwrap();
        let s = sys.tuple_of(&["0", "0"]).unwrap();
        assert!(sys.compose_step(&s, "x").unwrap().is_empty());
        let after_y = sys.compose_step(&s, "y").unwrap();
        assert_eq!(after_y.len(), 1);
    }

    #[test]
    fn nondeterministic_moves_multiply() {
        let a = module("A", &[("0", "x", "1"), ("0", "x", "2")], "0");
        let b = module("B", &[("0", "x", "1"), ("0", "x", "0")], "0");
        let sys = ModularSystem::new(vec![a, b], &unobs(&[])).unwrap();
        let s = sys.tuple_of(&["0", "0"]).unwrap();
        assert_eq!(sys.compose_step(&s, "x").unwrap().len(), 4);
    }

    #[test]
    fn malformed_tuple_rejected() {
        let a = module("A", &[("0", "x", "0")], "0");
        let sys = ModularSystem::monolithic(a);
        assert!(sys.compose_step(&CompositeState(vec![0, 0]), "x").is_err());
        assert!(sys.compose_step(&CompositeState(vec![7]), "x").is_err());
        assert!(sys.compose_step(&CompositeState(vec![0]), "nope").is_err());
    }

    #[test]
    fn private_unobservable_cases() {
        let single = module("A", &[("0", "u", "1"), ("1", "a", "0")], "0");
        let sys = ModularSystem::new(vec![single], &unobs(&["u"])).unwrap();
        assert!(check_private_unobservable(&sys));

        let a = module("A", &[("0", "u1", "1"), ("1", "a", "0")], "0");
        let b = module("B", &[("0", "u2", "1"), ("1", "a", "0")], "0");
        let sys = ModularSystem::new(vec![a, b], &unobs(&["u1", "u2"])).unwrap();
        assert!(check_private_unobservable(&sys));

        let a = module("A", &[("0", "u", "1"), ("1", "a", "0")], "0");
        let b = module("B", &[("0", "u", "1"), ("1", "b", "0")], "0");
        let sys = ModularSystem::new(vec![a, b], &unobs(&["u"])).unwrap();
        assert!(!check_private_unobservable(&sys));
    }

    #[test]
    fn secret_rectangles() {
        let a = module("A", &[("0", "x", "1"), ("1", "x", "0")], "0");
        let b = module("B", &[("0", "x", "1"), ("1", "x", "0")], "0");
        let sys = ModularSystem::new(vec![a, b], &unobs(&[])).unwrap();
        let rect = sys.rectangle(&[Some(vec!["1"]), None]).unwrap();
        let sys = sys.with_secret(SecretSpec::new(vec![rect])).unwrap();
        assert!(sys.secret().contains(&[1, 0]));
        assert!(sys.secret().contains(&[1, 1]));
        assert!(!sys.secret().contains(&[0, 1]));
        assert!(sys.rectangle::<&str>(&[None]).is_err());
    }

    #[test]
    fn unknown_unobservable_event_rejected() {
        let a = module("A", &[("0", "x", "0")], "0");
        assert!(matches!(
            ModularSystem::new(vec![a], &unobs(&["zzz"])),
            Err(Error::UnknownEvent(_))
        ));
        assert!(ModularSystem::new(vec![], &unobs(&[])).is_err());
    }
}
