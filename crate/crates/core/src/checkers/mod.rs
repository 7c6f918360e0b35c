//! Decision procedures for detectability, opacity and A-diagnosability.
//!
//! Three engines are available:
//! * `explicit` materialises the reachable product first and then works on the
//!   resulting monolithic automaton;
//! * `onthefly` explores composite states only as estimates require them;
//! * `special-case` composes local observers and is only applicable when every event
//!   shared between modules is observable.

mod adiag;
mod detect;
mod opacity;
mod special;

use std::borrow::Cow;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::compose::{materialize, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::Path;
use crate::observation::{Estimate, EstimateGraph, Estimator};
use crate::system::{ModularSystem, SecretSpec};

pub use adiag::{check_adiagnosability, fault_label_product, LabeledSystem};
pub use detect::{check_strong_detectability, check_weak_detectability};
pub use opacity::check_opacity;
pub use special::{compose_local_observers, LocalObservers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "strong-detect")]
    StrongDetect,
    #[serde(rename = "strong-periodic-detect")]
    StrongPeriodicDetect,
    #[serde(rename = "weak-detect")]
    WeakDetect,
    #[serde(rename = "weak-periodic-detect")]
    WeakPeriodicDetect,
    #[serde(rename = "opacity")]
    Opacity,
    #[serde(rename = "a-diag")]
    ADiag,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::StrongDetect => "strong-detect",
            Property::StrongPeriodicDetect => "strong-periodic-detect",
            Property::WeakDetect => "weak-detect",
            Property::WeakPeriodicDetect => "weak-periodic-detect",
            Property::Opacity => "opacity",
            Property::ADiag => "a-diag",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    #[serde(rename = "explicit")]
    Explicit,
    #[serde(rename = "onthefly")]
    OnTheFly,
    #[serde(rename = "special-case")]
    SpecialCase,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Explicit => "explicit",
            Engine::OnTheFly => "onthefly",
            Engine::SpecialCase => "special-case",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropertyQuery {
    pub property: Property,
    pub engine: Engine,
    pub budget: usize,
}

impl PropertyQuery {
    pub fn new(property: Property, engine: Engine) -> Self {
        PropertyQuery {
            property,
            engine,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub engine: Engine,
    /// Nodes of the verification structure (observer, detector or pair graph).
    pub explored: usize,
    /// Composite (or composed-observer) states materialised.
    pub composite_states: usize,
}

/// Replayable evidence for a verdict. State sets are lists of composite-state labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// An observable word `prefix · cycle · tail` through the observer (`exact`) or the
    /// detector (each listed set is then contained in the observer estimate). The
    /// estimate after `prefix` is reached again after `prefix · cycle`.
    Lasso {
        prefix: Vec<String>,
        cycle: Vec<String>,
        tail: Vec<String>,
        states: Vec<Vec<String>>,
        exact: bool,
    },
    /// An observable word after which the estimate lies inside the secret.
    Revealing {
        word: Vec<String>,
        estimate: Vec<String>,
    },
    /// A string after which the actual state set `actual` is all-fault but no
    /// continuation ever yields an all-fault estimate. `region` is the number of pair
    /// states reachable from there, none of which has an all-fault estimate.
    FaultPair {
        string: Vec<String>,
        observation: Vec<String>,
        actual: Vec<String>,
        estimate: Vec<String>,
        region: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Observation bound realised by a detectability witness (prefix + cycle length).
    pub bound: Option<usize>,
    pub stats: Stats,
}

/// Runs `q` on `sys`, taking the secret and fault events from the system itself.
pub fn check(sys: &ModularSystem, q: &PropertyQuery) -> Result<PropertyResult> {
    match q.property {
        Property::StrongDetect | Property::StrongPeriodicDetect => {
            check_strong_detectability(sys, q.property, q)
        }
        Property::WeakDetect | Property::WeakPeriodicDetect => {
            check_weak_detectability(sys, q.property, q)
        }
        Property::Opacity => check_opacity(sys, sys.secret(), q),
        Property::ADiag => check_adiagnosability(sys, &sys.fault_names(), q),
    }
}

/// The system an engine works on: the product for `explicit`, `sys` otherwise.
pub(crate) fn working_system<'s>(
    sys: &'s ModularSystem,
    q: &PropertyQuery,
) -> Result<Cow<'s, ModularSystem>> {
    match q.engine {
        Engine::Explicit => Ok(Cow::Owned(materialize(sys, q.budget)?)),
        _ => Ok(Cow::Borrowed(sys)),
    }
}

pub(crate) fn working_system_is_explicit(q: &PropertyQuery) -> bool {
    q.engine == Engine::Explicit
}

pub(crate) fn require_private(sys: &ModularSystem) -> Result<()> {
    match sys.shared_unobservable() {
        Some(e) => Err(Error::SharedUnobservable(e.to_string())),
        None => Ok(()),
    }
}

pub(crate) fn event_names(sys: &ModularSystem, events: &[u32]) -> Vec<String> {
    events
        .iter()
        .map(|&e| sys.events()[e as usize].clone())
        .collect()
}

/// Assembles a lasso witness from paths in an estimate graph.
pub(crate) fn lasso(
    est: &Estimator<'_>,
    g: &EstimateGraph,
    prefix: &Path,
    cycle: &Path,
    tail: Option<&Path>,
    exact: bool,
) -> Witness {
    let sys = est.system();
    let mut nodes: Vec<u32> = prefix.nodes.clone();
    nodes.extend(&cycle.nodes[1..]);
    let mut tail_events = Vec::new();
    if let Some(t) = tail {
        nodes.extend(&t.nodes[1..]);
        tail_events = t.events.clone();
    }
    let states = nodes
        .iter()
        .map(|&n| sorted_labels(est, &g.nodes[n as usize]))
        .collect();
    Witness::Lasso {
        prefix: event_names(sys, &prefix.events),
        cycle: event_names(sys, &cycle.events),
        tail: event_names(sys, &tail_events),
        states,
        exact,
    }
}

pub(crate) fn sorted_labels(est: &Estimator<'_>, e: &Estimate) -> Vec<String> {
    let mut v = est.labels(e);
    v.sort();
    v
}

fn observable_word(sys: &ModularSystem, word: &[String]) -> Result<Vec<u32>> {
    word.iter()
        .map(|w| {
            let e = sys
                .event_id(w)
                .ok_or_else(|| Error::UnknownEvent(w.clone()))?;
            if sys.is_observable(e) {
                Ok(e)
            } else {
                Err(Error::Malformed(format!(
                    "witness event `{w}` is unobservable"
                )))
            }
        })
        .collect()
}

/// Estimates along `word` starting from `UR(I)`; `None` once the word leaves `P(L)`.
fn estimates_along(est: &mut Estimator<'_>, word: &[u32]) -> Result<Option<Vec<Estimate>>> {
    let mut cur = est.initial_estimate()?;
    let mut out = vec![cur.clone()];
    for &e in word {
        match est.observer_step(&cur, e)? {
            Some(next) => {
                cur = next;
                out.push(cur.clone());
            }
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Replays `witness` against `sys` with the plain observer (and, for fault pairs, the
/// fault-labelled system). Returns whether every claim in the witness is reproduced.
pub fn replay(sys: &ModularSystem, witness: &Witness, budget: usize) -> Result<bool> {
    match witness {
        Witness::Lasso {
            prefix,
            cycle,
            tail,
            states,
            exact,
        } => {
            let mut word = observable_word(sys, prefix)?;
            word.extend(observable_word(sys, cycle)?);
            word.extend(observable_word(sys, tail)?);
            if states.len() != word.len() + 1 || cycle.is_empty() {
                return Ok(false);
            }
            let mut est = Estimator::new(sys, budget);
            let Some(path) = estimates_along(&mut est, &word)? else {
                return Ok(false);
            };
            let fits = path.iter().zip(states).all(|(e, claimed)| {
                let actual: BTreeSet<String> = est.labels(e).into_iter().collect();
                let claimed: BTreeSet<String> = claimed.iter().cloned().collect();
                if *exact {
                    actual == claimed
                } else {
                    !claimed.is_empty() && claimed.is_subset(&actual)
                }
            });
            let (p, c) = (prefix.len(), cycle.len());
            let closes = if *exact {
                path[p] == path[p + c]
            } else {
                states[p] == states[p + c]
            };
            Ok(fits && closes)
        }
        Witness::Revealing { word, estimate } => {
            let word = observable_word(sys, word)?;
            let mut est = Estimator::new(sys, budget);
            let Some(path) = estimates_along(&mut est, &word)? else {
                return Ok(false);
            };
            let last = path.last().expect("nonempty");
            let secret = last
                .states()
                .iter()
                .all(|&x| sys.secret().contains(est.product().tuple(x)));
            Ok(secret && sorted_labels(&est, last) == sorted(estimate))
        }
        Witness::FaultPair {
            string,
            observation,
            actual,
            estimate,
            ..
        } => {
            let labeled = fault_label_product(sys)?;
            adiag::replay_pair(&labeled, string, observation, actual, estimate, budget)
        }
    }
}

fn sorted(v: &[String]) -> Vec<String> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Copy of `sys` with a different secret.
pub(crate) fn with_secret(sys: &ModularSystem, secret: &SecretSpec) -> Result<ModularSystem> {
    sys.clone().with_secret(secret.clone())
}

#[cfg(test)]
mod tests;
