//! Space-bounded Turing machines, the tape alphabet `Δ = {#} ∪ T ∪ (Q × T)` of
//! configuration strings, and the neighbour table `N(c1, c2, c3)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Upper bound on simulated steps when checking that a machine stays on its tape.
const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub next: String,
    pub write: String,
    pub dir: Move,
}

/// A deterministic machine working on `2^tape_exponent` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachineSpec {
    pub states: Vec<String>,
    pub tape: Vec<String>,
    /// `(state, read) → rule`.
    pub rules: BTreeMap<(String, String), Rule>,
    pub blank: String,
    pub initial: String,
    pub accept: String,
    pub input: Vec<String>,
    pub tape_exponent: u32,
}

/// One symbol of a configuration string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Sep,
    Tape(String),
    Head(String, String),
}

impl Symbol {
    /// Event name of the symbol: `#`, the tape symbol, or `state:symbol`.
    pub fn name(&self) -> String {
        match self {
            Symbol::Sep => "#".to_string(),
            Symbol::Tape(t) => t.clone(),
            Symbol::Head(q, t) => format!("{q}:{t}"),
        }
    }
}

/// Outcome of running a machine from its initial configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmRun {
    /// Configurations in order, each `2^tape_exponent` symbols with exactly one head.
    pub configs: Vec<Vec<Symbol>>,
    pub accepted: bool,
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidMachine(msg.into())
}

impl TuringMachineSpec {
    pub fn tape_len(&self) -> usize {
        1usize << self.tape_exponent
    }

    /// Checks names, references and the space bound; the machine is run until it
    /// halts, repeats a configuration or exhausts the step limit.
    pub fn validate(&self) -> Result<()> {
        if self.tape_exponent == 0 || self.tape_exponent > 16 {
            return Err(invalid("tape exponent must lie in 1..=16"));
        }
        for (kind, names) in [("state", &self.states), ("tape symbol", &self.tape)] {
            if names.is_empty() {
                return Err(invalid(format!("no {kind}s declared")));
            }
            let mut seen = HashSet::new();
            for n in names {
                if !is_ident(n) {
                    return Err(invalid(format!(
                        "{kind} name `{n}` must consist of letters, digits and `_`"
                    )));
                }
                if !seen.insert(n) {
                    return Err(invalid(format!("duplicate {kind} `{n}`")));
                }
            }
        }
        let state = |q: &str| self.states.iter().any(|s| s == q);
        let symbol = |t: &str| self.tape.iter().any(|s| s == t);
        if !symbol(&self.blank) {
            return Err(invalid(format!(
                "blank `{}` is not a tape symbol",
                self.blank
            )));
        }
        for q in [&self.initial, &self.accept] {
            if !state(q) {
                return Err(invalid(format!("`{q}` is not a state")));
            }
        }
        if let Some(t) = self.input.iter().find(|t| !symbol(t)) {
            return Err(invalid(format!("input symbol `{t}` is not a tape symbol")));
        }
        if self.input.len() > self.tape_len() {
            return Err(invalid(format!(
                "input of length {} exceeds the {} tape cells",
                self.input.len(),
                self.tape_len()
            )));
        }
        for ((q, t), r) in &self.rules {
            if !state(q) || !state(&r.next) {
                return Err(invalid(format!(
                    "rule for ({q},{t}) names an unknown state"
                )));
            }
            if !symbol(t) || !symbol(&r.write) {
                return Err(invalid(format!(
                    "rule for ({q},{t}) names an unknown symbol"
                )));
            }
        }
        self.run().map(|_| ())
    }

    /// `Δ` in its canonical order: `#`, tape symbols, then heads by state and symbol.
    pub fn delta(&self) -> Vec<Symbol> {
        let mut out = vec![Symbol::Sep];
        out.extend(self.tape.iter().map(|t| Symbol::Tape(t.clone())));
        for q in &self.states {
            for t in &self.tape {
                out.push(Symbol::Head(q.clone(), t.clone()));
            }
        }
        out
    }

    /// Input as written on the tape; an empty input is a single blank.
    pub fn padded_input(&self) -> Vec<String> {
        if self.input.is_empty() {
            vec![self.blank.clone()]
        } else {
            self.input.clone()
        }
    }

    pub fn initial_config(&self) -> Vec<Symbol> {
        let mut cells: Vec<Symbol> = self.padded_input().into_iter().map(Symbol::Tape).collect();
        cells.resize(self.tape_len(), Symbol::Tape(self.blank.clone()));
        if let Symbol::Tape(t) = &cells[0] {
            cells[0] = Symbol::Head(self.initial.clone(), t.clone());
        }
        cells
    }

    /// Runs the machine. It accepts once it enters the accepting state; it rejects by
    /// halting elsewhere or by repeating a configuration. Leaving the tape is an error.
    pub fn run(&self) -> Result<TmRun> {
        let mut cur = self.initial_config();
        let mut seen: HashSet<Vec<Symbol>> = HashSet::new();
        let mut configs = Vec::new();
        for _ in 0..MAX_STEPS {
            let head = cur
                .iter()
                .position(|s| matches!(s, Symbol::Head(..)))
                .expect("configuration has a head");
            let Symbol::Head(q, t) = cur[head].clone() else {
                unreachable!()
            };
            configs.push(cur.clone());
            if q == self.accept {
                return Ok(TmRun {
                    configs,
                    accepted: true,
                });
            }
            if !seen.insert(cur.clone()) {
                configs.pop();
                break;
            }
            let Some(rule) = self.rules.get(&(q.clone(), t)) else {
                break;
            };
            let to = match rule.dir {
                Move::L => head.checked_sub(1),
                Move::R => Some(head + 1).filter(|&h| h < cur.len()),
            };
            let Some(to) = to else {
                return Err(invalid(format!(
                    "the machine moves off the tape from cell {head} in state `{q}`"
                )));
            };
            let mut next = cur.clone();
            next[head] = Symbol::Tape(rule.write.clone());
            let Symbol::Tape(under) = &next[to] else {
                unreachable!()
            };
            next[to] = Symbol::Head(rule.next.clone(), under.clone());
            cur = next;
        }
        Ok(TmRun {
            configs,
            accepted: false,
        })
    }

    /// Whether the machine accepts its input.
    pub fn accepts(&self) -> Result<bool> {
        Ok(self.run()?.accepted)
    }
}

/// `N(c1, c2, c3)`: the symbols that may legally stand below `c2` in the next
/// configuration, given the window `c1 c2 c3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    delta: Vec<Symbol>,
    table: Vec<BTreeSet<usize>>,
}

impl NeighborTable {
    pub fn new(tm: &TuringMachineSpec) -> Self {
        let delta = tm.delta();
        let d = delta.len();
        let mut table = Vec::with_capacity(d * d * d);
        for c1 in &delta {
            for c2 in &delta {
                for c3 in &delta {
                    let set = neighbours(tm, c1, c2, c3)
                        .iter()
                        .map(|s| delta.iter().position(|x| x == s).expect("symbol of Δ"))
                        .collect();
                    table.push(set);
                }
            }
        }
        NeighborTable { delta, table }
    }

    pub fn delta(&self) -> &[Symbol] {
        &self.delta
    }

    /// Indices into [`NeighborTable::delta`] of `N(c1, c2, c3)`.
    pub fn get(&self, c1: usize, c2: usize, c3: usize) -> &BTreeSet<usize> {
        let d = self.delta.len();
        &self.table[(c1 * d + c2) * d + c3]
    }
}

fn neighbours(tm: &TuringMachineSpec, c1: &Symbol, c2: &Symbol, c3: &Symbol) -> Vec<Symbol> {
    let rule = |q: &str, t: &str| tm.rules.get(&(q.to_string(), t.to_string()));
    match c2 {
        Symbol::Sep => vec![Symbol::Sep],
        Symbol::Head(q, t) => rule(q, t)
            .map(|r| vec![Symbol::Tape(r.write.clone())])
            .unwrap_or_default(),
        Symbol::Tape(t) => {
            let mut out = Vec::new();
            if let Symbol::Head(q, s) = c1 {
                if let Some(r) = rule(q, s).filter(|r| r.dir == Move::R) {
                    out.push(Symbol::Head(r.next.clone(), t.clone()));
                }
            }
            if let Symbol::Head(q, s) = c3 {
                if let Some(r) = rule(q, s).filter(|r| r.dir == Move::L) {
                    out.push(Symbol::Head(r.next.clone(), t.clone()));
                }
            }
            if out.is_empty() {
                out.push(Symbol::Tape(t.clone()));
            }
            out
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Writes `1` over the input and moves right until it reads a blank, then accepts.
    pub(crate) fn scanner(input: &[&str], exponent: u32, accepting: bool) -> TuringMachineSpec {
        let mut rules = BTreeMap::new();
        let target = if accepting { "qa" } else { "q0" };
        rules.insert(
            ("q0".to_string(), "1".to_string()),
            Rule {
                next: "q0".into(),
                write: "1".into(),
                dir: Move::R,
            },
        );
        if accepting {
            rules.insert(
                ("q0".to_string(), "b".to_string()),
                Rule {
                    next: target.into(),
                    write: "1".into(),
                    dir: Move::L,
                },
            );
        }
        TuringMachineSpec {
            states: vec!["q0".into(), "qa".into()],
            tape: vec!["b".into(), "1".into()],
            rules,
            blank: "b".into(),
            initial: "q0".into(),
            accept: "qa".into(),
            input: input.iter().map(|s| s.to_string()).collect(),
            tape_exponent: exponent,
        }
    }

    #[test]
    fn delta_order_and_names() {
        let tm = scanner(&["1"], 1, true);
        let names: Vec<String> = tm.delta().iter().map(Symbol::name).collect();
        assert_eq!(names, ["#", "b", "1", "q0:b", "q0:1", "qa:b", "qa:1"]);
    }

    #[test]
    fn run_accepts_and_rejects() {
        let tm = scanner(&["1"], 1, true);
        let run = tm.run().unwrap();
        assert!(run.accepted);
        assert_eq!(run.configs.len(), 3);
        assert_eq!(run.configs[2][0], Symbol::Head("qa".into(), "1".into()));
        assert!(!scanner(&["1"], 1, false).accepts().unwrap());
    }

    #[test]
    fn moving_off_the_tape_is_invalid() {
        let tm = scanner(&["1", "1"], 1, true);
        assert!(matches!(tm.validate(), Err(Error::InvalidMachine(_))));
        let mut long = scanner(&["1", "1", "1"], 1, true);
        long.tape_exponent = 1;
        assert!(long.validate().is_err());
    }

    #[test]
    fn neighbour_table_rules() {
        let tm = scanner(&["1"], 1, true);
        let nt = NeighborTable::new(&tm);
        let idx = |n: &str| nt.delta().iter().position(|s| s.name() == n).unwrap();
        for a in 0..nt.delta().len() {
            for c in 0..nt.delta().len() {
                assert_eq!(nt.get(a, idx("#"), c), &BTreeSet::from([idx("#")]));
            }
        }
        assert_eq!(
            nt.get(idx("1"), idx("b"), idx("1")),
            &BTreeSet::from([idx("b")])
        );
        assert_eq!(
            nt.get(idx("q0:1"), idx("b"), idx("#")),
            &BTreeSet::from([idx("q0:b")])
        );
        assert_eq!(
            nt.get(idx("#"), idx("1"), idx("q0:b")),
            &BTreeSet::from([idx("qa:1")])
        );
        assert_eq!(
            nt.get(idx("#"), idx("q0:1"), idx("b")),
            &BTreeSet::from([idx("1")])
        );
        assert!(nt.get(idx("#"), idx("qa:1"), idx("b")).is_empty());
    }
}
