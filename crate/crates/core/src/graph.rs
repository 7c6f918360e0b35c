//! Small graph queries over adjacency lists `adj[node] = [(event, target)]`.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::automaton::EventId;

pub type Adjacency = [Vec<(EventId, u32)>];

/// Marks the nodes that lie on a cycle (nontrivial SCC or self-loop) of the subgraph
/// induced by `keep`.
pub fn on_cycle(adj: &Adjacency, keep: impl Fn(u32) -> bool) -> Vec<bool> {
    let n = adj.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    let mut result = vec![false; n];
    for (s, out) in adj.iter().enumerate() {
        if !keep(s as u32) {
            continue;
        }
        for &(_, t) in out {
            if keep(t) {
                if t as usize == s {
                    result[s] = true;
                }
                g.add_edge(NodeIndex::new(s), NodeIndex::new(t as usize), ());
            }
        }
    }
    for comp in tarjan_scc(&g) {
        if comp.len() > 1 {
            for v in comp {
                result[v.index()] = true;
            }
        }
    }
    result
}

/// Nodes reachable (including the sources) from `sources` inside the subgraph `keep`.
pub fn forward_reach(adj: &Adjacency, sources: &[u32], keep: impl Fn(u32) -> bool) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = Vec::new();
    for &s in sources {
        if keep(s) && !seen[s as usize] {
            seen[s as usize] = true;
            stack.push(s);
        }
    }
    while let Some(s) = stack.pop() {
        for &(_, t) in &adj[s as usize] {
            if keep(t) && !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Nodes from which some target can be reached (targets included).
pub fn backward_reach(adj: &Adjacency, targets: &[bool]) -> Vec<bool> {
    let n = adj.len();
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (s, out) in adj.iter().enumerate() {
        for &(_, t) in out {
            rev[t as usize].push(s as u32);
        }
    }
    let mut seen = targets.to_vec();
    let mut stack: Vec<u32> = (0..n as u32).filter(|&v| targets[v as usize]).collect();
    while let Some(t) = stack.pop() {
        for &s in &rev[t as usize] {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// A path as its node sequence (length k+1) and edge labels (length k).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Path {
    pub nodes: Vec<u32>,
    pub events: Vec<EventId>,
}

/// Shortest path (in edges) from any of `sources` to a node satisfying `goal`, moving
/// only through nodes satisfying `keep`. Ties break by source order and by the sorted
/// order of adjacency lists, so results are deterministic.
pub fn shortest_path(
    adj: &Adjacency,
    sources: &[u32],
    keep: impl Fn(u32) -> bool,
    goal: impl Fn(u32) -> bool,
) -> Option<Path> {
    let n = adj.len();
    let mut parent: Vec<Option<(u32, EventId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if keep(s) && !seen[s as usize] {
            seen[s as usize] = true;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        if goal(s) {
            let mut path = Path {
                nodes: vec![s],
                events: Vec::new(),
            };
            let mut cur = s;
            while let Some((p, e)) = parent[cur as usize] {
                path.nodes.push(p);
                path.events.push(e);
                cur = p;
            }
            path.nodes.reverse();
            path.events.reverse();
            return Some(path);
        }
        for &(e, t) in &adj[s as usize] {
            if keep(t) && !seen[t as usize] {
                seen[t as usize] = true;
                parent[t as usize] = Some((s, e));
                queue.push_back(t);
            }
        }
    }
    None
}

/// A shortest nonempty cycle from `node` back to itself inside `keep`.
pub fn cycle_through(adj: &Adjacency, node: u32, keep: impl Fn(u32) -> bool) -> Option<Path> {
    if let Some(&(e, _)) = adj[node as usize].iter().find(|&&(_, t)| t == node) {
        return Some(Path {
            nodes: vec![node, node],
            events: vec![e],
        });
    }
    // Search from each successor back to node; keep the overall shortest.
    let mut best: Option<Path> = None;
    for &(e, t) in &adj[node as usize] {
        if !keep(t) {
            continue;
        }
        if let Some(p) = shortest_path(adj, &[t], &keep, |v| v == node) {
            if best
                .as_ref()
                .is_none_or(|b| p.events.len() + 1 < b.events.len())
            {
                let mut nodes = vec![node];
                nodes.extend(p.nodes);
                let mut events = vec![e];
                events.extend(p.events);
                best = Some(Path { nodes, events });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Vec<Vec<(EventId, u32)>> {
        // 0 -> 1 -> 2 -> 1, 2 -> 3, 3 -> 3
        vec![
            vec![(0, 1)],
            vec![(0, 2)],
            vec![(0, 1), (1, 3)],
            vec![(0, 3)],
        ]
    }

    #[test]
    fn cycles_include_self_loops() {
        assert_eq!(on_cycle(&g(), |_| true), vec![false, true, true, true]);
        assert_eq!(on_cycle(&g(), |v| v != 2), vec![false, false, false, true]);
    }

    #[test]
    fn reachability() {
        assert_eq!(
            forward_reach(&g(), &[2], |_| true),
            vec![false, true, true, true]
        );
        let back = backward_reach(&g(), &[true, false, false, false]);
        assert_eq!(back, vec![true, false, false, false]);
        let back = backward_reach(&g(), &[false, false, false, true]);
        assert_eq!(back, vec![true; 4]);
    }

    #[test]
    fn paths_and_cycles() {
        let p = shortest_path(&g(), &[0], |_| true, |v| v == 3).unwrap();
        assert_eq!(p.nodes, vec![0, 1, 2, 3]);
        assert_eq!(p.events, vec![0, 0, 1]);
        let c = cycle_through(&g(), 1, |_| true).unwrap();
        assert_eq!(c.nodes, vec![1, 2, 1]);
        assert!(cycle_through(&g(), 0, |_| true).is_none());
        assert_eq!(cycle_through(&g(), 3, |_| true).unwrap().nodes, vec![3, 3]);
    }
}
