//! Current-state opacity: no reachable estimate lies entirely inside the secret.

use std::collections::{HashMap, VecDeque};

use crate::error::Result;
use crate::observation::{Estimate, Estimator};
use crate::system::{ModularSystem, SecretSpec};

use super::{
    event_names, sorted_labels, special, with_secret, working_system, Engine, Property,
    PropertyQuery, PropertyResult, Stats, Verdict, Witness,
};

/// Explores the observer breadth-first and stops at the first estimate contained in
/// `secret`; the shortest revealing observable word is returned as the witness.
pub fn check_opacity(
    sys: &ModularSystem,
    secret: &SecretSpec,
    q: &PropertyQuery,
) -> Result<PropertyResult> {
    let sys = with_secret(sys, secret)?;
    if q.engine == Engine::SpecialCase {
        return special::opacity(&sys, q);
    }
    let work = working_system(&sys, q)?;
    let mut est = Estimator::new(&work, q.budget);
    let mut explored = 0usize;
    let mut witness = None;
    if !secret.is_empty() {
        let mut index: HashMap<Estimate, u32> = HashMap::new();
        let mut parent: Vec<Option<(u32, u32)>> = Vec::new();
        let mut nodes: Vec<Estimate> = Vec::new();
        let mut queue = VecDeque::new();
        let init = est.initial_estimate()?;
        index.insert(init.clone(), 0);
        nodes.push(init);
        parent.push(None);
        queue.push_back(0u32);
        while let Some(cur) = queue.pop_front() {
            let node = nodes[cur as usize].clone();
            let revealed = node.states().iter().all(|&x| est.product().is_secret(x));
            if revealed {
                let mut word = Vec::new();
                let mut at = cur;
                while let Some((p, e)) = parent[at as usize] {
                    word.push(e);
                    at = p;
                }
                word.reverse();
                witness = Some(Witness::Revealing {
                    word: event_names(&work, &word),
                    estimate: sorted_labels(&est, &node),
                });
                break;
            }
            for (e, next) in est.observer_successors(&node)? {
                if index.contains_key(&next) {
                    continue;
                }
                if nodes.len() >= q.budget {
                    return Err(crate::error::Error::BudgetExceeded { budget: q.budget });
                }
                let id = nodes.len() as u32;
                index.insert(next.clone(), id);
                nodes.push(next);
                parent.push(Some((cur, e)));
                queue.push_back(id);
            }
        }
        explored = nodes.len();
    }
    Ok(PropertyResult {
        property: Property::Opacity,
        verdict: Verdict::from_bool(witness.is_none()),
        witness,
        bound: None,
        stats: Stats {
            engine: q.engine,
            explored,
            composite_states: est.product().len(),
        },
    })
}
