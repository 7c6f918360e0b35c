use std::collections::{BTreeMap, BTreeSet};

use desmod_core::gadgets::{Move, Rule, TuringMachineSpec};

use super::{absent, directive, lex, once, ErrorKind, FormatError, Line};

/// A Turing machine:
///
/// ```text
/// states q0 qa
/// tape b 1
/// blank b
/// initial q0
/// accept qa
/// input 1 1
/// tape-exponent 2
/// rule q0 1 -> q0 1 R
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmFile {
    pub states: BTreeSet<String>,
    pub tape: BTreeSet<String>,
    pub blank: String,
    pub initial: String,
    pub accept: String,
    pub input: Vec<String>,
    pub tape_exponent: u32,
    pub rules: BTreeMap<(String, String), (String, String, Move)>,
}

fn single(line: &Line<'_>, slot: &mut Option<String>) -> Result<(), FormatError> {
    once(slot, line)?;
    line.exactly(1, "exactly one name")?;
    *slot = Some(line.args[0].text.to_string());
    Ok(())
}

impl TmFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut states: Option<BTreeSet<String>> = None;
        let mut tape: Option<BTreeSet<String>> = None;
        let (mut blank, mut initial, mut accept) = (None, None, None);
        let mut input: Option<Vec<String>> = None;
        let mut exponent: Option<u32> = None;
        let mut rule_lines = Vec::new();
        let lines = lex(text);
        for line in &lines {
            match line.keyword.text {
                "states" | "tape" => {
                    let slot = if line.keyword.text == "states" {
                        &mut states
                    } else {
                        &mut tape
                    };
                    once(slot, line)?;
                    *slot = Some(line.texts().map(str::to_string).collect());
                }
                "blank" => single(line, &mut blank)?,
                "initial" => single(line, &mut initial)?,
                "accept" => single(line, &mut accept)?,
                "input" => {
                    once(&input, line)?;
                    input = Some(line.texts().map(str::to_string).collect());
                }
                "tape-exponent" => {
                    once(&exponent, line)?;
                    line.exactly(1, "a positive integer")?;
                    let tok = line.args[0];
                    exponent = Some(tok.text.parse().map_err(|_| {
                        line.at(tok, ErrorKind::Syntax, "expected a positive integer")
                    })?);
                }
                "rule" => {
                    line.exactly(6, "`<state> <read> -> <state> <write> <L|R>`")?;
                    if line.args[2].text != "->" {
                        return Err(line.at(line.args[2], ErrorKind::Syntax, "expected `->`"));
                    }
                    rule_lines.push(line);
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
        let states = states.ok_or_else(|| absent(text, "states"))?;
        let tape = tape.ok_or_else(|| absent(text, "tape"))?;
        let mut rules = BTreeMap::new();
        for line in rule_lines {
            let a = &line.args;
            for (tok, set, what) in [
                (a[0], &states, "state"),
                (a[1], &tape, "tape symbol"),
                (a[3], &states, "state"),
                (a[4], &tape, "tape symbol"),
            ] {
                if !set.contains(tok.text) {
                    return Err(line.at(
                        tok,
                        ErrorKind::Semantic,
                        format!("unknown {what} `{}`", tok.text),
                    ));
                }
            }
            let dir = match a[5].text {
                "L" => Move::L,
                "R" => Move::R,
                _ => return Err(line.at(a[5], ErrorKind::Syntax, "direction must be `L` or `R`")),
            };
            let key = (a[0].text.to_string(), a[1].text.to_string());
            let value = (a[3].text.to_string(), a[4].text.to_string(), dir);
            if rules.insert(key, value).is_some() {
                return Err(line.at(
                    line.keyword,
                    ErrorKind::Semantic,
                    format!(
                        "second rule for state `{}` reading `{}`",
                        a[0].text, a[1].text
                    ),
                ));
            }
        }
        Ok(TmFile {
            states,
            tape,
            blank: blank.ok_or_else(|| absent(text, "blank"))?,
            initial: initial.ok_or_else(|| absent(text, "initial"))?,
            accept: accept.ok_or_else(|| absent(text, "accept"))?,
            input: input.unwrap_or_default(),
            tape_exponent: exponent.ok_or_else(|| absent(text, "tape-exponent"))?,
            rules,
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        directive(&mut out, "states", self.states.iter().map(String::as_str));
        directive(&mut out, "tape", self.tape.iter().map(String::as_str));
        directive(&mut out, "blank", [self.blank.as_str()]);
        directive(&mut out, "initial", [self.initial.as_str()]);
        directive(&mut out, "accept", [self.accept.as_str()]);
        directive(&mut out, "input", self.input.iter().map(String::as_str));
        directive(
            &mut out,
            "tape-exponent",
            [self.tape_exponent.to_string().as_str()],
        );
        for ((q, a), (q2, w, d)) in &self.rules {
            let d = if *d == Move::L { "L" } else { "R" };
            directive(
                &mut out,
                "rule",
                [q.as_str(), a.as_str(), "->", q2.as_str(), w.as_str(), d],
            );
        }
        out
    }

    /// The machine, checked against the machine invariants (names, blank, exponent).
    pub fn to_spec(&self) -> desmod_core::Result<TuringMachineSpec> {
        let tm = TuringMachineSpec {
            states: self.states.iter().cloned().collect(),
            tape: self.tape.iter().cloned().collect(),
            rules: self
                .rules
                .iter()
                .map(|(k, (next, write, dir))| {
                    (
                        k.clone(),
                        Rule {
                            next: next.clone(),
                            write: write.clone(),
                            dir: *dir,
                        },
                    )
                })
                .collect(),
            blank: self.blank.clone(),
            initial: self.initial.clone(),
            accept: self.accept.clone(),
            input: self.input.clone(),
            tape_exponent: self.tape_exponent,
        };
        tm.validate()?;
        Ok(tm)
    }

    pub fn from_spec(tm: &TuringMachineSpec) -> Self {
        TmFile {
            states: tm.states.iter().cloned().collect(),
            tape: tm.tape.iter().cloned().collect(),
            blank: tm.blank.clone(),
            initial: tm.initial.clone(),
            accept: tm.accept.clone(),
            input: tm.input.clone(),
            tape_exponent: tm.tape_exponent,
            rules: tm
                .rules
                .iter()
                .map(|(k, r)| (k.clone(), (r.next.clone(), r.write.clone(), r.dir)))
                .collect(),
        }
    }
}
