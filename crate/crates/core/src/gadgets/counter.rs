//! The exponential counter: `n` six-state automata whose composition, projected onto
//! the payload alphabet Σ, accepts exactly `Σ^(2^n − k)`.
//!
//! Module `A_i` stores bit `i − 1` of a binary counter. Event `a_j` increments the
//! counter from a value whose lowest `j − 1` bits are one and whose bit `j − 1` is
//! zero; every increment must be followed by one payload symbol.

use std::collections::BTreeSet;

use crate::automaton::NfaBuilder;
use crate::error::{malformed, Result};
use crate::system::ModularSystem;

/// Parameters of the counter gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterParams {
    /// Number of modules, at least 1.
    pub n: u32,
    /// Payload alphabet Σ, nonempty.
    pub sigma: Vec<String>,
    /// Start offset `0 < k ≤ 2^n`; the counter starts at `k − 1`.
    pub k: u64,
}

impl CounterParams {
    pub fn new(n: u32, sigma: &[&str]) -> Self {
        CounterParams {
            n,
            sigma: sigma.iter().map(|s| s.to_string()).collect(),
            k: 1,
        }
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 62 {
            return Err(malformed("counter needs 1 ≤ n ≤ 62 modules"));
        }
        if self.sigma.is_empty() {
            return Err(malformed("counter payload alphabet is empty"));
        }
        if self.k == 0 || self.k > 1u64 << self.n {
            return Err(malformed(format!(
                "counter offset k = {} outside 1..=2^{}",
                self.k, self.n
            )));
        }
        Ok(())
    }
}

/// Transitions of counter module `i` (1-based) among `n`, over payload `sigma` and
/// counting events `gamma(j)`. States are named via `st` from the six base names
/// `0 1 p q r s`.
pub(crate) fn counter_edges(
    i: u32,
    n: u32,
    sigma: &[String],
    gamma: &dyn Fn(u32) -> String,
    st: &dyn Fn(&str) -> String,
) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    let mut pair = |from: &str, a: String, mid: &str, to: &str| {
        out.push((st(from), a, st(mid)));
        for b in sigma {
            out.push((st(mid), b.clone(), st(to)));
        }
    };
    for j in 1..=n {
        let a = gamma(j);
        if j < i {
            pair("0", a.clone(), "p", "0");
            pair("1", a, "q", "1");
        } else if j == i {
            pair("0", a, "r", "1");
        } else {
            pair("1", a, "s", "0");
        }
    }
    out
}

/// Names `a1 … an` for the counting events, prefixed with underscores until they are
/// disjoint from Σ.
fn fresh_gamma(p: &CounterParams) -> String {
    let sigma: BTreeSet<&str> = p.sigma.iter().map(String::as_str).collect();
    let mut prefix = String::new();
    while (1..=p.n).any(|j| sigma.contains(format!("{prefix}a{j}").as_str())) {
        prefix.push('_');
    }
    prefix
}

/// Builds `A_n ‖ … ‖ A_1` (module order `A_n` first). Counting events are
/// unobservable, payload events observable; state `1` is the only marked state of each
/// module and module `A_i` starts in bit `i − 1` of `k − 1`.
pub fn gen_counter(p: &CounterParams) -> Result<ModularSystem> {
    p.validate()?;
    let prefix = fresh_gamma(p);
    let gamma = |j: u32| format!("{prefix}a{j}");
    let start = p.k - 1;
    let mut modules = Vec::with_capacity(p.n as usize);
    for i in (1..=p.n).rev() {
        let mut b = NfaBuilder::new(format!("A{i}"));
        for s in ["0", "1", "p", "q", "r", "s"] {
            b.state(s);
        }
        for e in &p.sigma {
            b.event(e.clone());
        }
        for j in 1..=p.n {
            b.event(gamma(j));
        }
        for (s, e, t) in counter_edges(i, p.n, &p.sigma, &gamma, &|s| s.to_string()) {
            b.transition(s, e, t);
        }
        let bit = (start >> (i - 1)) & 1;
        b.initial(if bit == 1 { "1" } else { "0" });
        b.no_marked().marked("1");
        modules.push(b.build()?);
    }
    let unobservable: BTreeSet<String> = (1..=p.n).map(gamma).collect();
    ModularSystem::new(modules, &unobservable)
}
