//! Direct check that estimating the composition equals composing local estimates when
//! unobservable events are private.

use std::collections::BTreeSet;

use desmod_core::{check_private_unobservable, ModularSystem};

use crate::error::{OracleError, Result};
use crate::explicit::explicit_product;
use crate::verdicts::Answer;

/// Local estimate bookkeeping for one module.
struct Local {
    /// `(src, event name, dst, observable)`
    trans: Vec<(u32, String, u32, bool)>,
    alphabet: BTreeSet<String>,
}

impl Local {
    fn closure(&self, seed: BTreeSet<u32>) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<u32> = seed.into_iter().collect();
        while let Some(s) = stack.pop() {
            if out.insert(s) {
                for (a, _, b, obs) in &self.trans {
                    if *a == s && !obs {
                        stack.push(*b);
                    }
                }
            }
        }
        out
    }

    fn step(&self, x: &BTreeSet<u32>, e: &str) -> BTreeSet<u32> {
        if !self.alphabet.contains(e) {
            return x.clone();
        }
        let next = self
            .trans
            .iter()
            .filter(|(a, name, _, _)| x.contains(a) && name == e)
            .map(|&(_, _, b, _)| b)
            .collect();
        self.closure(next)
    }
}

fn product(sets: &[BTreeSet<u32>]) -> BTreeSet<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for s in sets {
        out = out
            .iter()
            .flat_map(|p| {
                s.iter().map(move |&x| {
                    let mut p = p.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out.into_iter().collect()
}

/// For every observable word of length at most `max_len`, compares the estimate of the
/// explicit product with the product of the modules' own estimates. Exact up to the
/// length bound.
pub fn oracle_commutation(sys: &ModularSystem, max_len: usize, budget: usize) -> Result<Answer> {
    if !check_private_unobservable(sys) {
        return Err(OracleError::Precondition(
            "an unobservable event is shared between modules".into(),
        ));
    }
    let g = explicit_product(sys, budget)?;
    let locals: Vec<Local> = sys
        .modules()
        .iter()
        .map(|m| Local {
            trans: m
                .transitions()
                .iter()
                .map(|&(s, e, t)| {
                    (
                        s,
                        m.alphabet().name(e).to_string(),
                        t,
                        m.alphabet().is_observable(e),
                    )
                })
                .collect(),
            alphabet: m.alphabet().names().iter().cloned().collect(),
        })
        .collect();
    let global_closure = |seed: Vec<usize>| {
        let mut out = BTreeSet::new();
        let mut stack = seed;
        while let Some(v) = stack.pop() {
            if out.insert(v) {
                stack.extend(
                    g.succ[v]
                        .iter()
                        .filter(|&&(e, _)| !g.observable[e])
                        .map(|&(_, t)| t),
                );
            }
        }
        out
    };
    let as_tuples = |x: &BTreeSet<usize>| -> BTreeSet<Vec<u32>> {
        x.iter().map(|&v| g.tuples[v].clone()).collect()
    };
    let observable: Vec<usize> = (0..g.events.len()).filter(|&e| g.observable[e]).collect();

    let x0 = global_closure(g.initial.clone());
    let l0: Vec<BTreeSet<u32>> = sys
        .modules()
        .iter()
        .zip(&locals)
        .map(|(m, l)| l.closure(m.initial().iter().copied().collect()))
        .collect();
    let mut stack = vec![(x0, l0, 0usize)];
    while let Some((x, l, depth)) = stack.pop() {
        if as_tuples(&x) != product(&l) {
            return Ok(Answer {
                holds: false,
                exact: true,
            });
        }
        if depth == max_len || x.is_empty() {
            continue;
        }
        for &e in &observable {
            let step: Vec<usize> = x
                .iter()
                .flat_map(|&v| g.succ[v].iter().filter(|&&(f, _)| f == e).map(|&(_, t)| t))
                .collect();
            let x2 = global_closure(step);
            let l2: Vec<BTreeSet<u32>> = locals
                .iter()
                .zip(&l)
                .map(|(loc, s)| loc.step(s, &g.events[e]))
                .collect();
            stack.push((x2, l2, depth + 1));
        }
    }
    Ok(Answer {
        holds: true,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use desmod_core::NfaBuilder;

    use super::*;

    fn module(name: &str, trans: &[(&str, &str, &str)]) -> desmod_core::Nfa {
        let mut b = NfaBuilder::new(name);
        for &(s, e, t) in trans {
            b.transition(s, e, t);
        }
        b.initial("0");
        b.build().unwrap()
    }

    fn set(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn observable_and_private_systems_commute() {
        let a = module("A", &[("0", "s", "1"), ("1", "a", "0")]);
        let b = module("B", &[("0", "s", "1"), ("1", "b", "0"), ("1", "s", "0")]);
        let sys = ModularSystem::new(vec![a, b], &set(&[])).unwrap();
        assert!(oracle_commutation(&sys, 6, 1000).unwrap().holds);

        let a = module("A", &[("0", "u1", "1"), ("1", "s", "0"), ("0", "a", "0")]);
        let b = module("B", &[("0", "s", "1"), ("1", "u2", "0"), ("1", "b", "1")]);
        let sys = ModularSystem::new(vec![a, b], &set(&["u1", "u2"])).unwrap();
        assert!(oracle_commutation(&sys, 8, 1000).unwrap().holds);
    }

    #[test]
    fn shared_unobservable_is_rejected() {
        let a = module("A", &[("0", "u", "1"), ("1", "a", "0")]);
        let b = module("B", &[("0", "u", "1"), ("1", "b", "0")]);
        let sys = ModularSystem::new(vec![a, b], &set(&["u"])).unwrap();
        assert!(matches!(
            oracle_commutation(&sys, 3, 1000),
            Err(OracleError::Precondition(_))
        ));
    }
}
