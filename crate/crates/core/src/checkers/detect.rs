//! Strong (periodic) detectability via the detector, weak (periodic) via the observer.

use crate::compose::validate_system;
use crate::error::{Error, Result};
use crate::graph::{backward_reach, cycle_through, on_cycle, shortest_path};
use crate::observation::{build_detector, build_observer, Estimator};
use crate::system::ModularSystem;

use super::special;
use super::{
    lasso, working_system, Engine, Property, PropertyQuery, PropertyResult, Stats, Verdict,
};

/// Strong detectability (`property = StrongDetect`): every detector state reachable
/// from a cycle is a singleton. Strong periodic detectability
/// (`property = StrongPeriodicDetect`): the 2-element detector states induce an
/// acyclic subgraph. Violations carry the offending lasso.
pub fn check_strong_detectability(
    sys: &ModularSystem,
    property: Property,
    q: &PropertyQuery,
) -> Result<PropertyResult> {
    if !matches!(
        property,
        Property::StrongDetect | Property::StrongPeriodicDetect
    ) {
        return Err(Error::Malformed(format!(
            "`{}` is not a strong detectability variant",
            property.name()
        )));
    }
    if q.engine == Engine::SpecialCase {
        return Err(Error::Unsupported {
            engine: Engine::SpecialCase.name(),
            property: property.name(),
        });
    }
    let work = working_system(sys, q)?;
    validate_system(&work, q.budget)?.into_result()?;
    let mut est = Estimator::new(&work, q.budget);
    let det = build_detector(&mut est)?;
    let adj = det.adjacency();
    let pair = |v: u32| !det.nodes[v as usize].is_singleton();

    let witness = if property == Property::StrongDetect {
        let cyc = on_cycle(adj, |_| true);
        let bad: Vec<bool> = (0..det.len() as u32).map(pair).collect();
        let reaches_bad = backward_reach(adj, &bad);
        // A cycle node that can reach a 2-element state.
        shortest_path(
            adj,
            &det.initial,
            |_| true,
            |v| cyc[v as usize] && reaches_bad[v as usize],
        )
        .map(|prefix| {
            let c = *prefix.nodes.last().expect("nonempty path");
            let cycle = cycle_through(adj, c, |_| true).expect("node lies on a cycle");
            let tail = shortest_path(adj, &[c], |_| true, pair).expect("bad state reachable");
            lasso(&est, &det, &prefix, &cycle, Some(&tail), false)
        })
    } else {
        let cyc = on_cycle(adj, pair);
        shortest_path(adj, &det.initial, |_| true, |v| cyc[v as usize]).map(|prefix| {
            let c = *prefix.nodes.last().expect("nonempty path");
            let cycle = cycle_through(adj, c, pair).expect("node lies on a cycle");
            lasso(&est, &det, &prefix, &cycle, None, false)
        })
    };
    Ok(PropertyResult {
        property,
        verdict: Verdict::from_bool(witness.is_none()),
        witness,
        bound: None,
        stats: Stats {
            engine: q.engine,
            explored: det.len(),
            composite_states: est.product().len(),
        },
    })
}

/// Weak detectability (`WeakDetect`): some reachable singleton estimate lies on a cycle
/// of singleton estimates. Weak periodic detectability (`WeakPeriodicDetect`): some
/// reachable singleton estimate lies on any cycle. A positive verdict carries the
/// prefix and cycle.
pub fn check_weak_detectability(
    sys: &ModularSystem,
    property: Property,
    q: &PropertyQuery,
) -> Result<PropertyResult> {
    if !matches!(
        property,
        Property::WeakDetect | Property::WeakPeriodicDetect
    ) {
        return Err(Error::Malformed(format!(
            "`{}` is not a weak detectability variant",
            property.name()
        )));
    }
    if q.engine == Engine::SpecialCase {
        return special::weak_detectability(sys, property, q);
    }
    let work = working_system(sys, q)?;
    validate_system(&work, q.budget)?.into_result()?;
    let mut est = Estimator::new(&work, q.budget);
    let obs = build_observer(&mut est)?;
    let adj = obs.adjacency();
    let single = |v: u32| obs.nodes[v as usize].is_singleton();
    let strict = property == Property::WeakDetect;
    let cyc = if strict {
        on_cycle(adj, single)
    } else {
        on_cycle(adj, |_| true)
    };
    let witness = shortest_path(
        adj,
        &obs.initial,
        |_| true,
        |v| single(v) && cyc[v as usize],
    )
    .map(|prefix| {
        let c = *prefix.nodes.last().expect("nonempty path");
        let cycle = if strict {
            cycle_through(adj, c, single)
        } else {
            cycle_through(adj, c, |_| true)
        }
        .expect("node lies on a cycle");
        lasso(&est, &obs, &prefix, &cycle, None, true)
    });
    let bound = witness.as_ref().map(|w| match w {
        super::Witness::Lasso { prefix, cycle, .. } => prefix.len() + cycle.len(),
        _ => unreachable!(),
    });
    Ok(PropertyResult {
        property,
        verdict: Verdict::from_bool(witness.is_some()),
        witness,
        bound,
        stats: Stats {
            engine: q.engine,
            explored: obs.len(),
            composite_states: est.product().len(),
        },
    })
}
