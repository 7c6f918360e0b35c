//! Reference verdicts computed from explicit observers and pair graphs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{OracleError, Result};
use crate::explicit::Explicit;

/// A reference answer, tagged with whether it is exact or only valid up to a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Answer {
    pub holds: bool,
    pub exact: bool,
}

impl Answer {
    fn exact(holds: bool) -> Self {
        Answer { holds, exact: true }
    }
}

/// Bounds for enumeration-based oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedSemantics {
    pub max_observation_length: usize,
    pub state_budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectVariant {
    Strong,
    StrongPeriodic,
    Weak,
    WeakPeriodic,
}

/// The full observer: one node per reachable estimate.
#[derive(Debug, Clone)]
pub struct ObserverGraph {
    pub sets: Vec<BTreeSet<usize>>,
    pub succ: Vec<Vec<(usize, usize)>>,
}

fn silent_closure(g: &Explicit, seed: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<usize> = seed.into_iter().collect();
    while let Some(v) = stack.pop() {
        if out.insert(v) {
            for &(e, t) in &g.succ[v] {
                if !g.observable[e] {
                    stack.push(t);
                }
            }
        }
    }
    out
}

pub fn explicit_observer(g: &Explicit, budget: usize) -> Result<ObserverGraph> {
    let mut obs = ObserverGraph {
        sets: Vec::new(),
        succ: Vec::new(),
    };
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let start = silent_closure(g, g.initial.iter().copied());
    index.insert(start.clone(), 0);
    obs.sets.push(start);
    obs.succ.push(Vec::new());
    let mut i = 0;
    while i < obs.sets.len() {
        for e in (0..g.events.len()).filter(|&e| g.observable[e]) {
            let step: Vec<usize> = obs.sets[i]
                .iter()
                .flat_map(|&v| g.succ[v].iter().filter(|&&(f, _)| f == e).map(|&(_, t)| t))
                .collect();
            if step.is_empty() {
                continue;
            }
            let next = silent_closure(g, step);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if obs.sets.len() >= budget {
                        return Err(OracleError::Budget { budget });
                    }
                    index.insert(next.clone(), obs.sets.len());
                    obs.sets.push(next);
                    obs.succ.push(Vec::new());
                    obs.sets.len() - 1
                }
            };
            obs.succ[i].push((e, j));
        }
        i += 1;
    }
    Ok(obs)
}

/// Nodes reachable from `from` (inclusive) staying inside `keep`.
fn reach(succ: &[Vec<(usize, usize)>], from: &[usize], keep: &dyn Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut queue: VecDeque<usize> = from.iter().copied().filter(|&v| keep(v)).collect();
    for &v in &queue {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &(_, t) in &succ[v] {
            if keep(t) && !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Whether `v` can return to itself through nodes inside `keep`; quadratic on purpose.
fn on_cycle(succ: &[Vec<(usize, usize)>], v: usize, keep: &dyn Fn(usize) -> bool) -> bool {
    if !keep(v) {
        return false;
    }
    let next: Vec<usize> = succ[v].iter().map(|&(_, t)| t).collect();
    reach(succ, &next, keep)[v]
}

/// Detectability straight from the definitions on the explicit observer.
pub fn oracle_detectability(g: &Explicit, variant: DetectVariant, budget: usize) -> Result<Answer> {
    if !g.assumptions_hold() {
        return Err(OracleError::Precondition(
            "deadlock or unobservable loop in the reachable part".into(),
        ));
    }
    let obs = explicit_observer(g, budget)?;
    let n = obs.sets.len();
    let single = |v: usize| obs.sets[v].len() == 1;
    let all = |_: usize| true;
    let holds = match variant {
        DetectVariant::Strong => {
            let cyc: Vec<usize> = (0..n).filter(|&v| on_cycle(&obs.succ, v, &all)).collect();
            let r = reach(&obs.succ, &cyc, &all);
            (0..n).all(|v| !r[v] || single(v))
        }
        DetectVariant::StrongPeriodic => {
            let multi = |v: usize| !single(v);
            (0..n).all(|v| !on_cycle(&obs.succ, v, &multi))
        }
        DetectVariant::Weak => (0..n).any(|v| on_cycle(&obs.succ, v, &single)),
        DetectVariant::WeakPeriodic => (0..n).any(|v| single(v) && on_cycle(&obs.succ, v, &all)),
    };
    Ok(Answer::exact(holds))
}

/// Current-state opacity: no reachable estimate lies inside the secret.
pub fn oracle_opacity(g: &Explicit, budget: usize) -> Result<Answer> {
    let obs = explicit_observer(g, budget)?;
    let revealed = obs
        .sets
        .iter()
        .any(|s| !s.is_empty() && s.iter().all(|&v| g.secret[v]));
    Ok(Answer::exact(!revealed))
}

type Labelled = BTreeSet<(usize, bool)>;

fn labelled_closure(g: &Explicit, seed: impl IntoIterator<Item = (usize, bool)>) -> Labelled {
    let mut out = BTreeSet::new();
    let mut stack: Vec<(usize, bool)> = seed.into_iter().collect();
    while let Some((v, f)) = stack.pop() {
        if out.insert((v, f)) {
            for &(e, t) in &g.succ[v] {
                if !g.observable[e] {
                    stack.push((t, f || g.fault[e]));
                }
            }
        }
    }
    out
}

/// A-diagnosability on the explicit pair graph of (exact state set, estimate), both
/// carrying fault flags: every pair whose exact set is all-fault must be able to
/// reach a pair whose estimate is all-fault.
pub fn oracle_adiag(g: &Explicit, budget: usize) -> Result<Answer> {
    let d0: Labelled = g.initial.iter().map(|&v| (v, false)).collect();
    let x0 = labelled_closure(g, d0.iter().copied());
    let mut nodes: Vec<(Labelled, Labelled)> = vec![(d0, x0)];
    let mut index: HashMap<(Labelled, Labelled), usize> = HashMap::new();
    index.insert(nodes[0].clone(), 0);
    let mut succ: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut i = 0;
    while i < nodes.len() {
        let (d, x) = nodes[i].clone();
        for e in 0..g.events.len() {
            let d2: Labelled = d
                .iter()
                .flat_map(|&(v, f)| {
                    g.succ[v]
                        .iter()
                        .filter(move |&&(h, _)| h == e)
                        .map(move |&(_, t)| (t, f || g.fault[e]))
                })
                .collect();
            if d2.is_empty() {
                continue;
            }
            let x2 = if g.observable[e] {
                let step: Vec<(usize, bool)> = x
                    .iter()
                    .flat_map(|&(v, f)| {
                        g.succ[v]
                            .iter()
                            .filter(move |&&(h, _)| h == e)
                            .map(move |&(_, t)| (t, f || g.fault[e]))
                    })
                    .collect();
                labelled_closure(g, step)
            } else {
                x.clone()
            };
            let key = (d2, x2);
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= budget {
                        return Err(OracleError::Budget { budget });
                    }
                    index.insert(key.clone(), nodes.len());
                    nodes.push(key);
                    succ.push(Vec::new());
                    nodes.len() - 1
                }
            };
            succ[i].push((e, j));
        }
        i += 1;
    }
    let all_fault = |s: &Labelled| s.iter().all(|&(_, f)| f);
    let all = |_: usize| true;
    let holds = (0..nodes.len()).all(|v| {
        if !all_fault(&nodes[v].0) {
            return true;
        }
        let r = reach(&succ, &[v], &all);
        (0..nodes.len()).any(|u| r[u] && all_fault(&nodes[u].1))
    });
    Ok(Answer::exact(holds))
}

/// `R(w)`: every state reached by some string `t'` with `P(t') = w`. Strings are
/// enumerated depth-first; a state is revisited at the same word position only once.
pub fn oracle_estimate(g: &Explicit, word: &[&str]) -> Result<BTreeSet<usize>> {
    let ids: Vec<usize> = word
        .iter()
        .map(|w| {
            g.event(w).filter(|&e| g.observable[e]).ok_or_else(|| {
                OracleError::Precondition(format!("`{w}` is not an observable event"))
            })
        })
        .collect::<Result<_>>()?;
    let mut out = BTreeSet::new();
    let mut visited = BTreeSet::new();
    let mut stack: Vec<(usize, usize)> = g.initial.iter().map(|&v| (v, 0)).collect();
    while let Some((v, pos)) = stack.pop() {
        if !visited.insert((v, pos)) {
            continue;
        }
        if pos == ids.len() {
            out.insert(v);
        }
        for &(e, t) in &g.succ[v] {
            if !g.observable[e] {
                stack.push((t, pos));
            } else if pos < ids.len() && e == ids[pos] {
                stack.push((t, pos + 1));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use desmod_core::{ModularSystem, NfaBuilder};

    use super::*;
    use crate::explicit::explicit_product;

    fn mono(trans: &[(&str, &str, &str)], init: &[&str], unobs: &[&str]) -> Explicit {
        let mut b = NfaBuilder::new("g");
        for &(s, e, t) in trans {
            b.transition(s, e, t);
        }
        for i in init {
            b.initial(*i);
        }
        let u: BTreeSet<String> = unobs.iter().map(|s| s.to_string()).collect();
        let sys = ModularSystem::new(vec![b.build().unwrap()], &u).unwrap();
        explicit_product(&sys, 1000).unwrap()
    }

    fn names(g: &Explicit, set: &BTreeSet<usize>) -> Vec<u32> {
        set.iter().map(|&v| g.tuples[v][0]).collect()
    }

    #[test]
    fn estimate_examples() {
        let g = mono(
            &[("0", "a", "1"), ("0", "u", "2"), ("2", "a", "3")],
            &["0"],
            &["u"],
        );
        assert_eq!(names(&g, &oracle_estimate(&g, &[]).unwrap()), [0, 2]);
        assert_eq!(names(&g, &oracle_estimate(&g, &["a"]).unwrap()), [1, 3]);
        assert!(oracle_estimate(&g, &["u"]).is_err());
    }

    #[test]
    fn detectability_examples() {
        let det = mono(
            &[("1", "a", "2"), ("2", "b", "1"), ("2", "a", "2")],
            &["1"],
            &[],
        );
        let branch = mono(
            &[("1", "a", "1"), ("1", "a", "2"), ("2", "a", "1")],
            &["1"],
            &[],
        );
        let merge = mono(&[("1", "a", "1"), ("2", "a", "1")], &["1", "2"], &[]);
        for v in [DetectVariant::Strong, DetectVariant::StrongPeriodic] {
            assert!(oracle_detectability(&det, v, 100).unwrap().holds);
            assert!(!oracle_detectability(&branch, v, 100).unwrap().holds);
        }
        assert!(
            oracle_detectability(&merge, DetectVariant::Weak, 100)
                .unwrap()
                .holds
        );
        assert!(
            !oracle_detectability(&branch, DetectVariant::Weak, 100)
                .unwrap()
                .holds
        );
        let dead = mono(&[("1", "a", "2")], &["1"], &[]);
        assert!(oracle_detectability(&dead, DetectVariant::Weak, 100).is_err());
    }

    #[test]
    fn opacity_and_adiag_examples() {
        let g = mono(&[("0", "a", "1"), ("1", "a", "1")], &["0"], &[]);
        assert!(oracle_opacity(&g, 100).unwrap().holds);

        let mut b = NfaBuilder::new("g");
        for (s, e, t) in [
            ("0", "f", "1"),
            ("0", "u", "2"),
            ("1", "a", "1"),
            ("2", "a", "2"),
        ] {
            b.transition(s, e, t);
        }
        b.initial("0");
        let u: BTreeSet<String> = ["f", "u"].iter().map(|s| s.to_string()).collect();
        let sys = ModularSystem::new(vec![b.build().unwrap()], &u)
            .unwrap()
            .with_faults(&BTreeSet::from(["f".to_string()]))
            .unwrap();
        let g = explicit_product(&sys, 100).unwrap();
        assert!(!oracle_adiag(&g, 100).unwrap().holds);
    }
}
