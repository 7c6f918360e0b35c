use std::collections::BTreeSet;

use desmod_core::{Nfa, NfaBuilder};

use super::{absent, directive, lex, once, ErrorKind, FormatError};

/// One module:
///
/// ```text
/// module G
/// events a b u
/// initial 1
/// marked 2          # optional; absent means every state is marked
/// trans 1 a 2
/// ```
///
/// States are introduced by the lines that mention them. An optional `states` line
/// declares states that appear nowhere else; the serializer emits it only for such
/// states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesFile {
    pub name: String,
    pub events: BTreeSet<String>,
    pub states: BTreeSet<String>,
    pub initial: BTreeSet<String>,
    /// `None` when every state is marked.
    pub marked: Option<BTreeSet<String>>,
    pub transitions: BTreeSet<(String, String, String)>,
}

impl DesFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let lines = lex(text);
        let Some(first) = lines.first() else {
            return Err(absent(text, "module"));
        };
        if first.keyword.text != "module" {
            return Err(first.at(
                first.keyword,
                ErrorKind::Syntax,
                "a module file starts with `module <name>`",
            ));
        }
        first.exactly(1, "a module name")?;
        let name = first.args[0].text.to_string();

        let mut events: Option<BTreeSet<String>> = None;
        let mut declared = BTreeSet::new();
        let mut initial: Option<Vec<_>> = None;
        let mut marked: Option<Vec<_>> = None;
        let mut trans = Vec::new();
        for line in &lines[1..] {
            match line.keyword.text {
                "events" => {
                    once(&events, line)?;
                    events = Some(line.texts().map(str::to_string).collect());
                }
                "states" => declared.extend(line.texts().map(str::to_string)),
                "initial" => {
                    once(&initial, line)?;
                    if line.args.is_empty() {
                        return Err(line.missing("`initial` needs at least one state"));
                    }
                    initial = Some(line.args.clone());
                }
                "marked" => {
                    once(&marked, line)?;
                    marked = Some(line.args.clone());
                }
                "trans" => {
                    line.exactly(3, "`<source> <event> <target>`")?;
                    trans.push(line);
                }
                "module" => {
                    return Err(line.at(line.keyword, ErrorKind::Syntax, "one module per file"))
                }
                other => {
                    return Err(line.at(
                        line.keyword,
                        ErrorKind::Syntax,
                        format!("unknown directive `{other}`"),
                    ))
                }
            }
        }
        let events = events.ok_or_else(|| absent(text, "events"))?;
        let initial = initial.ok_or_else(|| absent(text, "initial"))?;

        let mut states = declared;
        let mut transitions = BTreeSet::new();
        for line in trans {
            let [s, e, t] = [line.args[0], line.args[1], line.args[2]];
            if !events.contains(e.text) {
                return Err(line.at(
                    e,
                    ErrorKind::Semantic,
                    format!("unknown event `{}`", e.text),
                ));
            }
            states.insert(s.text.to_string());
            states.insert(t.text.to_string());
            transitions.insert((s.text.to_string(), e.text.to_string(), t.text.to_string()));
        }
        states.extend(initial.iter().map(|t| t.text.to_string()));
        // Marked states must already be known: a typo here would silently add a state.
        let marked = match marked {
            None => None,
            Some(toks) => {
                let line = lines
                    .iter()
                    .find(|l| l.keyword.text == "marked")
                    .expect("marked line exists");
                let mut set = BTreeSet::new();
                for t in toks {
                    if !states.contains(t.text) {
                        return Err(line.at(
                            t,
                            ErrorKind::Semantic,
                            format!("unknown state `{}`", t.text),
                        ));
                    }
                    set.insert(t.text.to_string());
                }
                Some(set)
            }
        };
        Ok(DesFile {
            name,
            events,
            states,
            initial: initial.iter().map(|t| t.text.to_string()).collect(),
            marked,
            transitions,
        })
    }

    /// Canonical text: fixed directive order, every list sorted.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        directive(&mut out, "module", [self.name.as_str()]);
        directive(&mut out, "events", self.events.iter().map(String::as_str));
        let mentioned: BTreeSet<&str> = self
            .transitions
            .iter()
            .flat_map(|(s, _, t)| [s.as_str(), t.as_str()])
            .chain(self.initial.iter().map(String::as_str))
            .collect();
        let isolated: Vec<&str> = self
            .states
            .iter()
            .map(String::as_str)
            .filter(|s| !mentioned.contains(s))
            .collect();
        if !isolated.is_empty() {
            directive(&mut out, "states", isolated);
        }
        directive(&mut out, "initial", self.initial.iter().map(String::as_str));
        if let Some(m) = &self.marked {
            directive(&mut out, "marked", m.iter().map(String::as_str));
        }
        for (s, e, t) in &self.transitions {
            directive(&mut out, "trans", [s.as_str(), e.as_str(), t.as_str()]);
        }
        out
    }

    pub fn from_nfa(nfa: &Nfa) -> Self {
        let name = |s: u32| nfa.state_name(s).to_string();
        let all_marked = nfa.all_marked();
        DesFile {
            name: nfa.name().to_string(),
            events: nfa.alphabet().names().iter().cloned().collect(),
            states: nfa.state_names().iter().cloned().collect(),
            initial: nfa.initial().iter().map(|&s| name(s)).collect(),
            marked: (!all_marked).then(|| nfa.marked().map(name).collect()),
            transitions: nfa
                .transitions()
                .iter()
                .map(|&(s, e, t)| (name(s), nfa.alphabet().name(e).to_string(), name(t)))
                .collect(),
        }
    }

    /// Builds the automaton with states numbered in sorted-name order. Observability
    /// is assigned later by the enclosing system.
    pub fn to_nfa(&self) -> desmod_core::Result<Nfa> {
        let mut b = NfaBuilder::new(&self.name);
        for s in &self.states {
            b.state(s);
        }
        for e in &self.events {
            b.event(e.clone());
        }
        for (s, e, t) in &self.transitions {
            b.transition(s, e.clone(), t);
        }
        for s in &self.initial {
            b.initial(s);
        }
        if let Some(marked) = &self.marked {
            b.no_marked();
            for s in marked {
                b.marked(s);
            }
        }
        b.build()
    }
}
