use std::collections::{BTreeMap, BTreeSet, HashMap};

use desmod_core::{ModularSystem, Nfa};

use super::{absent, directive, lex, once, ErrorKind, FormatError, Line};

/// One entry of a secret rectangle: `None` stands for all states of the module (`*`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectEntry {
    pub states: Option<BTreeSet<String>>,
    column: usize,
}

impl RectEntry {
    pub fn new(states: Option<BTreeSet<String>>) -> Self {
        RectEntry { states, column: 0 }
    }
}

/// One `secret rect` line, keyed by module name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub entries: BTreeMap<String, RectEntry>,
    line: usize,
}

/// A modular system:
///
/// ```text
/// modules plant.des sensor.des     # paths relative to this file, in module order
/// unobservable u f
/// fault f                          # optional
/// secret rect plant={s1,s2} sensor=*
/// ```
#[derive(Debug, Clone, Default)]
pub struct SystemFile {
    pub modules: Vec<String>,
    pub unobservable: BTreeSet<String>,
    pub fault: BTreeSet<String>,
    /// Secret states as a union of rectangles; empty means no secret.
    pub secret: Vec<Rect>,
    spans: Spans,
}

/// Token positions remembered for errors raised when the modules are resolved.
#[derive(Debug, Clone, Default)]
struct Spans {
    modules: Vec<(usize, usize)>,
    events: HashMap<String, (usize, usize)>,
}

fn parse_entry(line: &Line<'_>, tok: super::Token<'_>) -> Result<(String, RectEntry), FormatError> {
    let bad = |msg: &str| line.at(tok, ErrorKind::Syntax, msg.to_string());
    let (module, rhs) = tok
        .text
        .split_once('=')
        .ok_or_else(|| bad("expected `<module>={s,…}` or `<module>=*`"))?;
    if module.is_empty() {
        return Err(bad("missing module name before `=`"));
    }
    let states = if rhs == "*" {
        None
    } else {
        let inner = rhs
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| bad("state set must be `*` or `{s1,s2,…}`"))?;
        let set: BTreeSet<String> = inner
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        Some(set)
    };
    Ok((
        module.to_string(),
        RectEntry {
            states,
            column: tok.column,
        },
    ))
}

fn entry_text(module: &str, e: &RectEntry) -> String {
    match &e.states {
        None => format!("{module}=*"),
        Some(s) => format!(
            "{module}={{{}}}",
            s.iter().cloned().collect::<Vec<_>>().join(",")
        ),
    }
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut out = SystemFile::default();
        let mut modules: Option<()> = None;
        let mut unobservable: Option<()> = None;
        let mut fault: Option<()> = None;
        for line in lex(text) {
            match line.keyword.text {
                "modules" => {
                    once(&modules, &line)?;
                    modules = Some(());
                    if line.args.is_empty() {
                        return Err(line.at(
                            line.keyword,
                            ErrorKind::Semantic,
                            "a system needs at least one module",
                        ));
                    }
                    out.modules = line.texts().map(str::to_string).collect();
                    out.spans.modules = line.args.iter().map(|t| (line.number, t.column)).collect();
                }
                "unobservable" | "fault" => {
                    let (slot, set) = if line.keyword.text == "fault" {
                        (&mut fault, &mut out.fault)
                    } else {
                        (&mut unobservable, &mut out.unobservable)
                    };
                    once(slot, &line)?;
                    *slot = Some(());
                    for t in &line.args {
                        set.insert(t.text.to_string());
                        out.spans
                            .events
                            .entry(t.text.to_string())
                            .or_insert((line.number, t.column));
                    }
                }
                "secret" => {
                    if line.args.first().map(|t| t.text) != Some("rect") {
                        return Err(line.missing("expected `secret rect <module>=… …`"));
                    }
                    let mut entries = BTreeMap::new();
                    for &tok in &line.args[1..] {
                        let (module, entry) = parse_entry(&line, tok)?;
                        if entries.insert(module.clone(), entry).is_some() {
                            return Err(line.at(
                                tok,
                                ErrorKind::Semantic,
                                format!("module `{module}` listed twice in one rectangle"),
                            ));
                        }
                    }
                    out.secret.push(Rect {
                        entries,
                        line: line.number,
                    });
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
        if modules.is_none() {
            return Err(absent(text, "modules"));
        }
        Ok(out)
    }

    /// Canonical text. Module order is significant and kept; event sets, rectangle
    /// entries and the rectangles themselves are sorted.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        directive(&mut out, "modules", self.modules.iter().map(String::as_str));
        if !self.unobservable.is_empty() {
            directive(
                &mut out,
                "unobservable",
                self.unobservable.iter().map(String::as_str),
            );
        }
        if !self.fault.is_empty() {
            directive(&mut out, "fault", self.fault.iter().map(String::as_str));
        }
        let rects: BTreeSet<String> = self
            .secret
            .iter()
            .map(|r| {
                let mut line = String::new();
                let items: Vec<String> = r.entries.iter().map(|(m, e)| entry_text(m, e)).collect();
                directive(&mut line, "secret rect", items.iter().map(String::as_str));
                line
            })
            .collect();
        rects.into_iter().for_each(|r| out.push_str(&r));
        out
    }

    /// The system file describing `sys`, with module `i` stored at `paths[i]`.
    pub fn from_system(sys: &ModularSystem, paths: Vec<String>) -> Self {
        let secret = sys
            .secret()
            .rectangles()
            .iter()
            .map(|rect| Rect {
                entries: rect
                    .iter()
                    .enumerate()
                    .map(|(m, set)| {
                        let module = sys.module(m);
                        let states = set.as_ref().map(|ids| {
                            ids.iter()
                                .map(|&s| module.state_name(s).to_string())
                                .collect()
                        });
                        (module.name().to_string(), RectEntry::new(states))
                    })
                    .collect(),
                line: 0,
            })
            .collect();
        SystemFile {
            modules: paths,
            unobservable: sys.unobservable_names(),
            fault: sys.fault_names(),
            secret,
            spans: Spans::default(),
        }
    }

    fn error_at(
        &self,
        (line, column): (usize, usize),
        kind: ErrorKind,
        message: String,
    ) -> FormatError {
        FormatError {
            kind,
            line,
            column,
            message,
        }
    }

    fn event_error(&self, event: &str, message: String) -> FormatError {
        let at = self.spans.events.get(event).copied().unwrap_or((1, 1));
        self.error_at(at, ErrorKind::Semantic, message)
    }

    /// Assembles the system from the already-loaded modules (in `modules` order),
    /// checking every event, module and state the file refers to.
    pub fn resolve(&self, modules: Vec<Nfa>) -> Result<ModularSystem, FormatError> {
        assert_eq!(
            modules.len(),
            self.modules.len(),
            "one automaton per module path"
        );
        let mut index = HashMap::new();
        for (i, m) in modules.iter().enumerate() {
            if index.insert(m.name().to_string(), i).is_some() {
                let at = self.spans.modules.get(i).copied().unwrap_or((1, 1));
                return Err(self.error_at(
                    at,
                    ErrorKind::Semantic,
                    format!("duplicate module name `{}`", m.name()),
                ));
            }
        }
        let events: BTreeSet<&str> = modules
            .iter()
            .flat_map(|m| m.alphabet().names().iter().map(String::as_str))
            .collect();
        for e in self.unobservable.iter().chain(&self.fault) {
            if !events.contains(e.as_str()) {
                return Err(self.event_error(e, format!("unknown event `{e}`")));
            }
        }
        let sys = ModularSystem::new(modules, &self.unobservable)
            .and_then(|s| s.with_faults(&self.fault))
            .map_err(|e| self.error_at((1, 1), ErrorKind::Semantic, e.to_string()))?;

        let mut rects = Vec::with_capacity(self.secret.len());
        for rect in &self.secret {
            let mut resolved: Vec<Option<Vec<&str>>> = vec![None; sys.len()];
            let mut seen = vec![false; sys.len()];
            for (name, entry) in &rect.entries {
                let at = (rect.line, entry.column);
                let &m = index.get(name).ok_or_else(|| {
                    self.error_at(at, ErrorKind::Semantic, format!("unknown module `{name}`"))
                })?;
                seen[m] = true;
                if let Some(states) = &entry.states {
                    let module = sys.module(m);
                    if let Some(s) = states.iter().find(|s| module.state_id(s).is_none()) {
                        return Err(self.error_at(
                            at,
                            ErrorKind::Semantic,
                            format!("unknown state `{s}` of module `{name}`"),
                        ));
                    }
                    resolved[m] = Some(states.iter().map(String::as_str).collect());
                }
            }
            if let Some(m) = seen.iter().position(|s| !s) {
                return Err(self.error_at(
                    (rect.line, 1),
                    ErrorKind::Arity,
                    format!(
                        "rectangle lists {} of {} modules; `{}` is missing",
                        rect.entries.len(),
                        sys.len(),
                        sys.module(m).name()
                    ),
                ));
            }
            rects.push(
                sys.rectangle(&resolved).map_err(|e| {
                    self.error_at((rect.line, 1), ErrorKind::Semantic, e.to_string())
                })?,
            );
        }
        sys.with_secret(desmod_core::SecretSpec::new(rects))
            .map_err(|e| self.error_at((1, 1), ErrorKind::Semantic, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::DesFile;

    fn module(text: &str) -> Nfa {
        DesFile::parse(text).unwrap().to_nfa().unwrap()
    }

    fn pair() -> Vec<Nfa> {
        vec![
            module("module A\nevents a u\ninitial 0\ntrans 0 u 1\ntrans 1 a 0\n"),
            module("module B\nevents a\ninitial x\ntrans x a x\n"),
        ]
    }

    #[test]
    fn canonical_form_sorts_sets_but_keeps_module_order() {
        let f = SystemFile::parse(
            "modules b.des a.des\nunobservable v u\nsecret rect B=* A={1,0}\nsecret rect A={} B={x}\n",
        )
        .unwrap();
        assert_eq!(
            f.serialize(),
            "modules b.des a.des\nunobservable u v\nsecret rect A={0,1} B=*\nsecret rect A={} B={x}\n"
        );
    }

    #[test]
    fn resolves_secret_rectangles() {
        let f = SystemFile::parse("modules a b\nunobservable u\nsecret rect A={1} B=*\n").unwrap();
        let sys = f.resolve(pair()).unwrap();
        assert!(sys.secret().contains(&[1, 0]));
        assert!(!sys.secret().contains(&[0, 0]));
        let back = SystemFile::from_system(&sys, f.modules.clone());
        assert_eq!(back.serialize(), f.serialize());
    }

    #[test]
    fn reports_errors_at_their_tokens() {
        let e = SystemFile::parse("unobservable u\n").unwrap_err();
        assert!(e.message.contains("modules"));
        let e = SystemFile::parse("modules\n").unwrap_err();
        assert_eq!((e.kind, e.line), (ErrorKind::Semantic, 1));

        let f = SystemFile::parse("modules a b\nunobservable u zz\n").unwrap();
        let e = f.resolve(pair()).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Semantic, 2, 16));

        let f = SystemFile::parse("modules a b\nsecret rect A={1}\n").unwrap();
        let e = f.resolve(pair()).unwrap_err();
        assert_eq!((e.kind, e.line), (ErrorKind::Arity, 2));

        let f = SystemFile::parse("modules a b\nsecret rect A={9} B=*\n").unwrap();
        let e = f.resolve(pair()).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Semantic, 2, 13));

        let e = SystemFile::parse("modules a\nsecret rect A\n").unwrap_err();
        assert_eq!((e.kind, e.column), (ErrorKind::Syntax, 13));
    }
}
