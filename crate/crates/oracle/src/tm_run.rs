//! Accepting-run encodings written directly from `#w_1#w_2#⋯#w_m#`.

use desmod_core::gadgets::{Move, TuringMachineSpec};

/// The unique candidate encoding: configurations separated by `#`, followed (if the
/// machine halts) by the part of the halted configuration left of the head, which is
/// all that can legally follow. Generation stops once `max_len` symbols exist.
pub fn run_string(tm: &TuringMachineSpec, max_len: usize) -> Vec<String> {
    let cells_n = 1usize << tm.tape_exponent;
    let mut cells: Vec<String> = vec![tm.blank.clone(); cells_n];
    for (i, x) in tm.input.iter().enumerate() {
        cells[i] = x.clone();
    }
    let (mut state, mut head) = (tm.initial.clone(), 0usize);
    let mut out = vec!["#".to_string()];
    while out.len() < max_len {
        for (i, c) in cells.iter().enumerate() {
            out.push(if i == head {
                format!("{state}:{c}")
            } else {
                c.clone()
            });
        }
        out.push("#".to_string());
        match tm.rules.get(&(state.clone(), cells[head].clone())) {
            None => {
                out.extend(cells[..head].iter().cloned());
                break;
            }
            Some(rule) => {
                cells[head] = rule.write.clone();
                state = rule.next.clone();
                head = match rule.dir {
                    Move::L => head - 1,
                    Move::R => head + 1,
                };
            }
        }
    }
    out
}

/// Whether `word` is (a prefix of) an encoding of an accepting run: it follows the run
/// string and already shows the accepting state.
pub fn encodes_accepting_run(tm: &TuringMachineSpec, word: &[String]) -> bool {
    let run = run_string(tm, word.len() + 1);
    word.len() <= run.len()
        && run[..word.len()] == *word
        && word
            .iter()
            .any(|s| s.split_once(':').is_some_and(|(q, _)| q == tm.accept))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use desmod_core::gadgets::Rule;

    use super::*;

    fn tm(accepting: bool) -> TuringMachineSpec {
        let mut rules = BTreeMap::new();
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
                    next: "qa".into(),
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
            input: vec!["1".into()],
            tape_exponent: 1,
        }
    }

    fn w(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn run_string_of_accepting_machine() {
        assert_eq!(
            run_string(&tm(true), 100),
            w("# q0:1 b # 1 q0:b # qa:1 1 #")
        );
        assert!(encodes_accepting_run(
            &tm(true),
            &w("# q0:1 b # 1 q0:b # qa:1")
        ));
        assert!(!encodes_accepting_run(&tm(true), &w("# q0:1 b # 1 q0:b #")));
        assert!(!encodes_accepting_run(
            &tm(true),
            &w("# q0:1 b # 1 q0:b # qa:1 1 # 1")
        ));
    }

    #[test]
    fn rejecting_machine_has_no_accepting_prefix() {
        let run = run_string(&tm(false), 100);
        assert_eq!(run, w("# q0:1 b # 1 q0:b # 1"));
        for k in 0..=run.len() {
            assert!(!encodes_accepting_run(&tm(false), &run[..k]));
        }
    }
}
