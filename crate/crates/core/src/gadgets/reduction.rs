//! Reductions from space-bounded Turing machine acceptance to weak detectability,
//! opacity and A-diagnosability of modular systems.
//!
//! Every fragment `G_k` recognises (after projection onto `Δ`) a set of words that
//! are *not* encodings `#c1#c2#…#` of an accepting run; their union is exactly the set
//! of such words. Fragments whose language needs a length-`2^n` window are
//! compositions of `n` counter sub-automata sharing a fresh alphabet. The modules are
//! then made total and connected through the fresh observable event `⋄`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Range;

use crate::automaton::{Nfa, NfaBuilder};
use crate::error::Result;
use crate::system::{ModularSystem, SecretSpec};

use super::counter::counter_edges;
use super::tm::{NeighborTable, Symbol, TuringMachineSpec};

/// Observable event linking all modules.
pub const DIAMOND: &str = "@diamond";
/// Observable event of the A-diagnosability variant.
pub const BOX: &str = "@box";
/// Unobservable fault event of the A-diagnosability variant.
pub const FAULT: &str = "@f";

/// Which property the generated system encodes acceptance into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Detectability,
    Opacity,
    ADiagnosability,
}

/// The language fragment a module group realises.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fragment {
    A1,
    A2,
    A3,
    A4,
    B,
    C(String, String, String),
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::A1 => f.write_str("A1"),
            Fragment::A2 => f.write_str("A2"),
            Fragment::A3 => f.write_str("A3"),
            Fragment::A4 => f.write_str("A4"),
            Fragment::B => f.write_str("B"),
            Fragment::C(a, b, c) => write!(f, "C({a},{b},{c})"),
        }
    }
}

/// One fragment and the contiguous range of system modules composing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventoryEntry {
    pub fragment: Fragment,
    pub modules: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub kind: ReductionKind,
    /// The generated system, carrying the secret (opacity) or fault events (A-diag).
    pub system: ModularSystem,
    pub unobservable: BTreeSet<String>,
    /// Fragments `G_1 … G_m` in module order.
    pub inventory: Vec<InventoryEntry>,
    /// Event names of `Δ` in canonical order.
    pub tape_alphabet: Vec<String>,
}

impl ReductionOutput {
    pub fn secret(&self) -> &SecretSpec {
        self.system.secret()
    }

    pub fn faults(&self) -> BTreeSet<String> {
        self.system.fault_names()
    }

    /// Index into the inventory of the fragment that module `m` belongs to.
    pub fn fragment_of(&self, m: usize) -> Option<usize> {
        self.inventory.iter().position(|e| e.modules.contains(&m))
    }

    /// The modules of fragment `k` as a system of their own, with the global
    /// observability restricted to their alphabet.
    pub fn fragment_system(&self, k: usize) -> Result<ModularSystem> {
        let range = self.inventory[k].modules.clone();
        let modules: Vec<Nfa> = self.system.modules()[range].to_vec();
        let unobs: BTreeSet<String> = modules
            .iter()
            .flat_map(|m| m.alphabet().names().iter())
            .filter(|e| self.unobservable.contains(*e))
            .cloned()
            .collect();
        ModularSystem::new(modules, &unobs)
    }
}

/// A mutable automaton with string events, used while assembling fragments.
#[derive(Debug, Clone, Default)]
pub(crate) struct Raw {
    states: Vec<String>,
    index: HashMap<String, usize>,
    events: BTreeSet<String>,
    trans: BTreeSet<(usize, String, usize)>,
    initial: BTreeSet<usize>,
    marked: BTreeSet<usize>,
}

impl Raw {
    fn new<'e>(events: impl IntoIterator<Item = &'e String>) -> Self {
        Raw {
            events: events.into_iter().cloned().collect(),
            ..Default::default()
        }
    }

    fn state(&mut self, name: &str) -> usize {
        if let Some(&s) = self.index.get(name) {
            return s;
        }
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), self.states.len() - 1);
        self.states.len() - 1
    }

    fn edge(&mut self, s: &str, e: &str, t: &str) {
        let (s, t) = (self.state(s), self.state(t));
        self.events.insert(e.to_string());
        self.trans.insert((s, e.to_string(), t));
    }

    fn edges<'e>(&mut self, s: &str, es: impl IntoIterator<Item = &'e String>, t: &str) {
        for e in es {
            self.edge(s, e, t);
        }
    }

    fn initial(&mut self, s: &str) {
        let s = self.state(s);
        self.initial.insert(s);
    }

    fn mark(&mut self, s: &str) {
        let s = self.state(s);
        self.marked.insert(s);
    }

    pub(crate) fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Whether every state has a transition on every event of the alphabet.
    pub(crate) fn is_total(&self) -> bool {
        let defined: HashSet<(usize, &str)> = self
            .trans
            .iter()
            .map(|(s, e, _)| (*s, e.as_str()))
            .collect();
        (0..self.states.len()).all(|s| {
            self.events
                .iter()
                .all(|e| defined.contains(&(s, e.as_str())))
        })
    }

    /// Sends every undefined move to a fresh non-marked sink looping on everything.
    fn totalize(&mut self) {
        if self.is_total() {
            return;
        }
        let sink = self.state("sink");
        let defined: HashSet<(usize, String)> =
            self.trans.iter().map(|(s, e, _)| (*s, e.clone())).collect();
        let events: Vec<String> = self.events.iter().cloned().collect();
        for s in 0..self.states.len() {
            for e in &events {
                if !defined.contains(&(s, e.clone())) {
                    self.trans.insert((s, e.clone(), sink));
                }
            }
        }
    }

    fn build(&self, name: &str) -> Result<Nfa> {
        let mut b = NfaBuilder::new(name);
        for s in &self.states {
            b.state(s);
        }
        for e in &self.events {
            b.event(e.clone());
        }
        for (s, e, t) in &self.trans {
            b.transition(&self.states[*s], e.clone(), &self.states[*t]);
        }
        for &s in &self.initial {
            b.initial(&self.states[s]);
        }
        b.no_marked();
        for &s in &self.marked {
            b.marked(&self.states[s]);
        }
        b.build()
    }
}

/// Fresh per-fragment event names.
fn gamma(k: usize, j: u32) -> String {
    format!("@g{k}.a{j}")
}

fn padding(k: usize) -> String {
    format!("@g{k}.e")
}

fn local_diamond(k: usize) -> String {
    format!("{DIAMOND}.{k}")
}

fn local_box(k: usize) -> String {
    format!("{BOX}.{k}")
}

struct Ctx {
    delta: Vec<String>,
    n: u32,
}

impl Ctx {
    fn except<'a>(&'a self, skip: &'a [&str]) -> impl Iterator<Item = &'a String> + 'a {
        self.delta
            .iter()
            .filter(move |d| !skip.contains(&d.as_str()))
    }

    /// Adds the counter states `c0 … cs` of sub-automaton `i` of fragment `k`, counting
    /// words over `sigma` of length `2^n − 1` from `c0` to `c1`.
    fn counter(&self, raw: &mut Raw, k: usize, i: u32, sigma: &[String]) {
        let g = |j: u32| gamma(k, j);
        let st = |s: &str| format!("c{s}");
        for (s, e, t) in counter_edges(i, self.n, sigma, &g, &st) {
            raw.edge(&s, &e, &t);
        }
    }

    fn counter_alphabet(&self, k: usize, extra: &[String]) -> Vec<String> {
        let mut ev = self.delta.clone();
        ev.extend((1..=self.n).map(|j| gamma(k, j)));
        ev.extend(extra.iter().cloned());
        ev
    }
}

/// Words that do not start with `#` followed by the initial configuration's first
/// `max(|x|, 1)` symbols.
fn fragment_a1(cx: &Ctx, expected: &[String]) -> Raw {
    let mut r = Raw::new(&cx.delta);
    r.initial("m0");
    for (k, want) in expected.iter().enumerate() {
        let here = format!("m{k}");
        for d in &cx.delta {
            if d == want {
                if k + 1 < expected.len() {
                    r.edge(&here, d, &format!("m{}", k + 1));
                }
            } else {
                r.edge(&here, d, "acc");
            }
        }
    }
    r.edges("acc", &cx.delta, "acc");
    r.mark("acc");
    r
}

/// `Δ^{n+1} · b* · (Δ \ {b, #}) · Δ*`: the initial configuration is not blank-padded.
pub(crate) fn fragment_a2(delta: &[String], n_in: usize, blank: &str) -> Raw {
    let mut r = Raw::new(delta);
    r.initial("0");
    for i in 0..=n_in {
        r.edges(&i.to_string(), delta, &(i + 1).to_string());
    }
    let wait = (n_in + 1).to_string();
    let acc = (n_in + 2).to_string();
    r.edge(&wait, blank, &wait);
    r.edges(
        &wait,
        delta.iter().filter(|d| *d != blank && *d != "#"),
        &acc,
    );
    r.edges(&acc, delta, &acc);
    r.mark(&acc);
    r
}

/// Sub-automaton `i` of `# · (Δ ∪ ε)^{2^n − 1} · # · Δ*` (first configuration too short).
fn fragment_a3(cx: &Ctx, k: usize, i: u32) -> Raw {
    let e = padding(k);
    let mut r = Raw::new(&cx.counter_alphabet(k, std::slice::from_ref(&e)));
    r.initial("st");
    r.edge("st", "#", "c0");
    let mut sigma = cx.delta.clone();
    sigma.push(e);
    cx.counter(&mut r, k, i, &sigma);
    r.edge("c1", "#", "acc");
    r.edges("acc", &cx.delta, "acc");
    r.mark("acc");
    r
}

/// Sub-automaton `i` of `# · Δ^{2^n} · (Δ \ #) · Δ*` (first configuration too long).
fn fragment_a4(cx: &Ctx, k: usize, i: u32) -> Raw {
    let mut r = Raw::new(&cx.counter_alphabet(k, &[]));
    r.initial("st");
    r.edge("st", "#", "m1");
    r.edges("m1", &cx.delta, "c0");
    cx.counter(&mut r, k, i, &cx.delta);
    r.edges("c1", cx.except(&["#"]), "acc");
    r.edges("acc", &cx.delta, "acc");
    r.mark("acc");
    r
}

/// `(Δ \ {(q_a, t)})*`: words that never reach the accepting state.
fn fragment_b(cx: &Ctx, accepting: &[String]) -> Raw {
    let mut r = Raw::new(&cx.delta);
    r.initial("ok");
    r.edges(
        "ok",
        cx.delta.iter().filter(|d| !accepting.contains(d)),
        "ok",
    );
    r.mark("ok");
    r
}

/// Sub-automaton `i` of `Δ* · c1 c2 c3 · Δ^{2^n − 1} · (Δ \ N(c1,c2,c3)) · Δ*`.
fn fragment_c(cx: &Ctx, k: usize, i: u32, window: [&String; 3], allowed: &[String]) -> Raw {
    let mut r = Raw::new(&cx.counter_alphabet(k, &[]));
    r.initial("p0");
    r.edges("p0", &cx.delta, "p0");
    r.edge("p0", window[0], "p1");
    r.edge("p1", window[1], "p2");
    r.edge("p2", window[2], "c0");
    cx.counter(&mut r, k, i, &cx.delta);
    r.edges(
        "c1",
        cx.delta.iter().filter(|d| !allowed.contains(d)),
        "acc",
    );
    r.edges("acc", &cx.delta, "acc");
    r.mark("acc");
    r
}

/// Adds `q_s` (new initial state) and `q_f`, both looping on `Δ ∪ {⋄}`; every old
/// state moves to `q_s` under `⋄`, and every marked one also to `q_f`.
fn diamond_direct(r: &mut Raw, delta: &[String]) {
    let old = r.num_states();
    let marked = r.marked.clone();
    for s in 0..old {
        let name = r.states[s].clone();
        r.edge(&name, DIAMOND, "qs");
        if marked.contains(&s) {
            r.edge(&name, DIAMOND, "qf");
        }
    }
    for q in ["qs", "qf"] {
        r.edges(q, delta, q);
        r.edge(q, DIAMOND, q);
    }
    r.initial("qs");
}

/// Per-sub-automaton variant: marked states reach `q_f` through the module-local event
/// `⋄_k` (synchronised across the group, so only when the whole group is marked)
/// followed by `⋄`.
fn diamond_sub(r: &mut Raw, delta: &[String], k: usize) {
    let old = r.num_states();
    let marked = r.marked.clone();
    let dk = local_diamond(k);
    r.events.insert(dk.clone());
    for s in 0..old {
        let name = r.states[s].clone();
        r.edge(&name, DIAMOND, "qs");
        if marked.contains(&s) {
            let primed = format!("{name}'");
            r.edge(&name, &dk, &primed);
            r.edge(&primed, DIAMOND, "qf");
        }
    }
    for q in ["qs", "qf"] {
        r.edges(q, delta, q);
        r.edge(q, DIAMOND, q);
    }
    r.initial("qs");
}

/// The four A-diagnosability transition families for a module of fragment `k` out of
/// `m`: `(q_s, f, q_s')`, `(q_s', □, I)`, `(q_s, □_j, q_s')` for `j ≠ k`,
/// `(q_f, □_j, q_s')` for all `j`.
fn adiag_families(r: &mut Raw, k: usize, m: usize) {
    let init: Vec<String> = r.initial.iter().map(|&s| r.states[s].clone()).collect();
    r.edge("qs", FAULT, "qs'");
    for s in &init {
        r.edge("qs'", BOX, s);
    }
    for j in 0..m {
        if j != k {
            r.edge("qs", &local_box(j), "qs'");
        }
        r.edge("qf", &local_box(j), "qs'");
    }
}

/// The fragments before modification, each a list of sub-automata (one for the
/// directly built fragments).
pub(crate) fn fragments(tm: &TuringMachineSpec) -> Result<Vec<(Fragment, Vec<Raw>)>> {
    tm.validate()?;
    let symbols = tm.delta();
    let delta: Vec<String> = symbols.iter().map(Symbol::name).collect();
    let cx = Ctx {
        delta,
        n: tm.tape_exponent,
    };
    let input = tm.padded_input();
    let mut expected = vec![
        "#".to_string(),
        Symbol::Head(tm.initial.clone(), input[0].clone()).name(),
    ];
    expected.extend(input[1..].iter().cloned());
    let accepting: Vec<String> = tm
        .tape
        .iter()
        .map(|t| Symbol::Head(tm.accept.clone(), t.clone()).name())
        .collect();
    let group = |f: &dyn Fn(u32) -> Raw| (1..=cx.n).map(f).collect::<Vec<_>>();

    let mut out = vec![
        (Fragment::A1, vec![fragment_a1(&cx, &expected)]),
        (
            Fragment::A2,
            vec![fragment_a2(&cx.delta, input.len(), &tm.blank)],
        ),
        (Fragment::A3, group(&|i| fragment_a3(&cx, 2, i))),
        (Fragment::A4, group(&|i| fragment_a4(&cx, 3, i))),
        (Fragment::B, vec![fragment_b(&cx, &accepting)]),
    ];
    let table = NeighborTable::new(tm);
    let d = cx.delta.len();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let k = out.len();
                let allowed: Vec<String> = table
                    .get(a, b, c)
                    .iter()
                    .map(|&x| cx.delta[x].clone())
                    .collect();
                let window = [&cx.delta[a], &cx.delta[b], &cx.delta[c]];
                let subs = group(&|i| fragment_c(&cx, k, i, window, &allowed));
                out.push((
                    Fragment::C(window[0].clone(), window[1].clone(), window[2].clone()),
                    subs,
                ));
            }
        }
    }
    Ok(out)
}

fn generate(tm: &TuringMachineSpec, kind: ReductionKind) -> Result<ReductionOutput> {
    let frags = fragments(tm)?;
    let tape_alphabet: Vec<String> = tm.delta().iter().map(Symbol::name).collect();
    let m = frags.len();
    let mut modules = Vec::new();
    let mut inventory = Vec::with_capacity(m);
    for (k, (fragment, subs)) in frags.into_iter().enumerate() {
        let start = modules.len();
        let direct = matches!(fragment, Fragment::A1 | Fragment::A2 | Fragment::B);
        for (i, mut raw) in subs.into_iter().enumerate() {
            raw.totalize();
            if direct {
                diamond_direct(&mut raw, &tape_alphabet);
            } else {
                diamond_sub(&mut raw, &tape_alphabet, k);
            }
            if kind == ReductionKind::ADiagnosability {
                adiag_families(&mut raw, k, m);
            }
            let name = if direct {
                format!("G{}", k + 1)
            } else {
                format!("G{}.{}", k + 1, i + 1)
            };
            modules.push(raw.build(&name)?);
        }
        inventory.push(InventoryEntry {
            fragment,
            modules: start..modules.len(),
        });
    }
    let mut observable: BTreeSet<String> = tape_alphabet.iter().cloned().collect();
    observable.insert(DIAMOND.to_string());
    if kind == ReductionKind::ADiagnosability {
        observable.insert(BOX.to_string());
    }
    let unobservable: BTreeSet<String> = modules
        .iter()
        .flat_map(|m| m.alphabet().names().iter())
        .filter(|e| !observable.contains(*e))
        .cloned()
        .collect();
    let mut system = ModularSystem::new(modules, &unobservable)?;
    match kind {
        ReductionKind::Detectability => {}
        ReductionKind::Opacity => {
            let rect = system.rectangle(&vec![Some(vec!["qs"]); system.len()])?;
            system = system.with_secret(SecretSpec::new(vec![rect]))?;
        }
        ReductionKind::ADiagnosability => {
            system = system.with_faults(&BTreeSet::from([FAULT.to_string()]))?;
        }
    }
    Ok(ReductionOutput {
        kind,
        system,
        unobservable,
        inventory,
        tape_alphabet,
    })
}

/// Modules `G_1 … G_m` whose union of projected marked languages is the complement of
/// the accepting-run encodings, modified with `⋄`: the system is weakly detectable iff
/// the machine accepts its input.
pub fn gen_detectability_reduction(tm: &TuringMachineSpec) -> Result<ReductionOutput> {
    generate(tm, ReductionKind::Detectability)
}

/// The detectability system with secret `q̄_s = (q_s, …, q_s)`: it is opaque iff the
/// machine rejects.
pub fn gen_opacity_reduction(tm: &TuringMachineSpec) -> Result<ReductionOutput> {
    generate(tm, ReductionKind::Opacity)
}

/// The detectability system extended with fault `f` and the `□` events: it is
/// A-diagnosable iff the machine accepts.
pub fn gen_adiag_reduction(tm: &TuringMachineSpec) -> Result<ReductionOutput> {
    generate(tm, ReductionKind::ADiagnosability)
}
