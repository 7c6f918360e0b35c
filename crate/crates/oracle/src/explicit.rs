//! A deliberately naive explicit product, built from module transition lists only.

use std::collections::{HashMap, VecDeque};

use desmod_core::ModularSystem;

use crate::error::{OracleError, Result};

/// The reachable part of a composition as a plain transition graph over event indices.
#[derive(Debug, Clone)]
pub struct Explicit {
    pub events: Vec<String>,
    pub observable: Vec<bool>,
    pub fault: Vec<bool>,
    /// Component tuple of each state.
    pub tuples: Vec<Vec<u32>>,
    pub succ: Vec<Vec<(usize, usize)>>,
    pub initial: Vec<usize>,
    pub marked: Vec<bool>,
    pub secret: Vec<bool>,
}

impl Explicit {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn event(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e == name)
    }

    /// Whether every state has a successor and unobservable moves never loop.
    pub fn assumptions_hold(&self) -> bool {
        if self.succ.iter().any(Vec::is_empty) {
            return false;
        }
        // Repeatedly peel states without unobservable successors; a loop survives.
        let n = self.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v]
                    && !self.succ[v]
                        .iter()
                        .any(|&(e, t)| !self.observable[e] && alive[t])
                {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive.iter().all(|a| !a);
            }
        }
    }
}

/// Successor lists of one module keyed by `(state, event name)`.
fn local_moves(sys: &ModularSystem, m: usize) -> HashMap<(u32, &str), Vec<u32>> {
    let module = sys.module(m);
    let mut out: HashMap<(u32, &str), Vec<u32>> = HashMap::new();
    for &(s, e, t) in module.transitions() {
        out.entry((s, module.alphabet().name(e)))
            .or_default()
            .push(t);
    }
    out
}

/// Breadth-first product construction. Fails once `budget` states are exceeded.
pub fn explicit_product(sys: &ModularSystem, budget: usize) -> Result<Explicit> {
    let events: Vec<String> = sys.events().to_vec();
    let unobs = sys.unobservable_names();
    let faults = sys.fault_names();
    let moves: Vec<_> = (0..sys.len()).map(|m| local_moves(sys, m)).collect();
    let has: Vec<Vec<bool>> = sys
        .modules()
        .iter()
        .map(|m| events.iter().map(|e| m.alphabet().contains(e)).collect())
        .collect();

    let mut starts: Vec<Vec<u32>> = vec![Vec::new()];
    for m in sys.modules() {
        let mut next = Vec::new();
        for prefix in &starts {
            for &i in m.initial() {
                let mut t = prefix.clone();
                t.push(i);
                next.push(t);
            }
        }
        if next.len() > budget {
            return Err(OracleError::Budget { budget });
        }
        starts = next;
    }

    let mut g = Explicit {
        observable: events.iter().map(|e| !unobs.contains(e)).collect(),
        fault: events.iter().map(|e| faults.contains(e)).collect(),
        events,
        tuples: Vec::new(),
        succ: Vec::new(),
        initial: Vec::new(),
        marked: Vec::new(),
        secret: Vec::new(),
    };
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut add = |t: Vec<u32>, g: &mut Explicit, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = index.get(&t) {
            return Ok(i);
        }
        if g.tuples.len() >= budget {
            return Err(OracleError::Budget { budget });
        }
        let i = g.tuples.len();
        g.marked.push(
            t.iter()
                .enumerate()
                .all(|(m, &s)| sys.module(m).is_marked(s)),
        );
        g.secret.push(sys.secret().contains(&t));
        index.insert(t.clone(), i);
        g.tuples.push(t);
        g.succ.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    };
    for t in starts {
        let i = add(t, &mut g, &mut queue)?;
        if !g.initial.contains(&i) {
            g.initial.push(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        let tuple = g.tuples[v].clone();
        for e in 0..g.events.len() {
            let name = g.events[e].clone();
            let mut options: Vec<Vec<u32>> = Vec::with_capacity(tuple.len());
            let mut blocked = false;
            for (m, &s) in tuple.iter().enumerate() {
                if has[m][e] {
                    match moves[m].get(&(s, name.as_str())) {
                        Some(ts) => options.push(ts.clone()),
                        None => {
                            blocked = true;
                            break;
                        }
                    }
                } else {
                    options.push(vec![s]);
                }
            }
            if blocked {
                continue;
            }
            let mut combos: Vec<Vec<u32>> = vec![Vec::new()];
            for opt in &options {
                combos = combos
                    .iter()
                    .flat_map(|c| {
                        opt.iter().map(move |&x| {
                            let mut c = c.clone();
                            c.push(x);
                            c
                        })
                    })
                    .collect();
            }
            for c in combos {
                let t = add(c, &mut g, &mut queue)?;
                if !g.succ[v].contains(&(e, t)) {
                    g.succ[v].push((e, t));
                }
            }
        }
    }
    Ok(g)
}
