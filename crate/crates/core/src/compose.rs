//! Parallel composition of process step functions into one global successor
//! function.
//!
//! Synchronization is by (gate, node) pairs: a label whose pair is claimed
//! by one or more leaves fires only when every claiming leaf offers it with
//! identical offers, and moves exactly those leaves. Labels claimed by
//! nobody (the internal action, TERMINATED) interleave. Hidden gates are
//! relabelled to the internal action after matching.

use std::collections::HashSet;

use crate::appli::{appli_initial, appli_step, AppliProcess, AppliState};
use crate::bus::{bus_initial, bus_step, BusState, FaultConfig};
use crate::label::{Gate, Label};
use crate::link::{link_initial, link_step, LinkState};
use crate::signal::{Domains, NodeId};
use crate::trans::{trans_initial, trans_step, TransState, Variant};

/// State of one component process.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProcState {
    Link(LinkState),
    Trans(TransState),
    Appli(AppliState),
    Bus(BusState),
}

/// One leaf of the composition: a process definition plus the set of
/// (gate, node) pairs it synchronizes on.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub name: String,
    pub kind: LeafKind,
    pub sync: HashSet<(Gate, NodeId)>,
}

#[derive(Debug, Clone)]
pub enum LeafKind {
    Link { id: NodeId, n: u8 },
    Trans { id: NodeId, n: u8, variant: Variant },
    Appli(AppliProcess),
    Bus { n: u8, faults: FaultConfig },
}

impl Leaf {
    pub fn initial(&self) -> ProcState {
        match &self.kind {
            LeafKind::Link { id, n } => ProcState::Link(link_initial(*id, *n)),
            LeafKind::Trans { id, variant, .. } => ProcState::Trans(trans_initial(*id, *variant)),
            LeafKind::Appli(p) => ProcState::Appli(appli_initial(p)),
            LeafKind::Bus { n, .. } => ProcState::Bus(bus_initial(*n)),
        }
    }

    pub fn step(&self, state: &ProcState, domains: &Domains) -> Vec<(Label, ProcState)> {
        match (&self.kind, state) {
            (LeafKind::Link { .. }, ProcState::Link(s)) => link_step(s, domains)
                .into_iter()
                .map(|(l, t)| (l, ProcState::Link(t)))
                .collect(),
            (LeafKind::Trans { n, .. }, ProcState::Trans(s)) => trans_step(s, *n, domains)
                .into_iter()
                .map(|(l, t)| (l, ProcState::Trans(t)))
                .collect(),
            (LeafKind::Appli(p), ProcState::Appli(s)) => appli_step(p, s, domains)
                .into_iter()
                .map(|(l, t)| (l, ProcState::Appli(t)))
                .collect(),
            (LeafKind::Bus { faults, .. }, ProcState::Bus(s)) => bus_step(s, faults, domains)
                .into_iter()
                .map(|(l, t)| (l, ProcState::Bus(t)))
                .collect(),
            _ => panic!("leaf `{}` stepped with a foreign state", self.name),
        }
    }
}

/// Tuple of component states, one per leaf.
pub type GlobalState = Vec<ProcState>;

/// A parallel composition of leaves with a hide set.
#[derive(Debug, Clone)]
pub struct Network {
    pub leaves: Vec<Leaf>,
    pub hide: HashSet<Gate>,
    pub domains: Domains,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("permutation length {got} does not match leaf count {expected}")]
    BadPermutationLength { got: usize, expected: usize },
    #[error("permutation is not a bijection: index {0} repeated or out of range")]
    NotBijective(usize),
}

impl Network {
    pub fn new(leaves: Vec<Leaf>, hide: HashSet<Gate>, domains: Domains) -> Network {
        Network { leaves, hide, domains }
    }

    /// A network consisting of a single unsynchronized process; used to
    /// explore one component in isolation.
    pub fn solo(leaf: Leaf, domains: Domains) -> Network {
        Network { leaves: vec![leaf], hide: HashSet::new(), domains }
    }

    pub fn initial(&self) -> GlobalState {
        self.leaves.iter().map(|l| l.initial()).collect()
    }

    /// Leaves that must synchronize on the label, in ascending index order.
    pub fn participants(&self, label: &Label) -> Vec<usize> {
        let node = match label.node() {
            Some(node) => node,
            None => return Vec::new(),
        };
        self.leaves
            .iter()
            .enumerate()
            .filter(|(_, leaf)| leaf.sync.contains(&(label.gate, node)))
            .map(|(i, _)| i)
            .collect()
    }

    fn hidden(&self, label: &Label) -> Label {
        if self.hide.contains(&label.gate) {
            Label::tau()
        } else {
            label.clone()
        }
    }

    /// Same leaves in a different order; semantics are preserved.
    pub fn permute(&self, order: &[usize]) -> Result<Network, ComposeError> {
        if order.len() != self.leaves.len() {
            return Err(ComposeError::BadPermutationLength {
                got: order.len(),
                expected: self.leaves.len(),
            });
        }
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= order.len() || seen[i] {
                return Err(ComposeError::NotBijective(i));
            }
            seen[i] = true;
        }
        Ok(Network {
            leaves: order.iter().map(|&i| self.leaves[i].clone()).collect(),
            hide: self.hide.clone(),
            domains: self.domains,
        })
    }
}

/// Composed successor set of a global state.
///
/// A synchronized label fires once per combination of matching moves of its
/// participants; unsynchronized labels interleave. The enumeration order is
/// fixed (leaf order, then each leaf's successor order) and the result has
/// set semantics.
pub fn global_step(net: &Network, g: &GlobalState) -> Vec<(Label, GlobalState)> {
    assert_eq!(g.len(), net.leaves.len(), "global state arity mismatch");
    let per_leaf: Vec<Vec<(Label, ProcState)>> = net
        .leaves
        .iter()
        .zip(g.iter())
        .map(|(leaf, state)| leaf.step(state, &net.domains))
        .collect();

    let mut out: Vec<(Label, GlobalState)> = Vec::new();
    let mut seen_sync: HashSet<&Label> = HashSet::new();

    for (li, succs) in per_leaf.iter().enumerate() {
        for (label, target) in succs {
            let parts = net.participants(label);
            if parts.is_empty() {
                let mut next = g.clone();
                next[li] = target.clone();
                out.push((net.hidden(label), next));
                continue;
            }
            // Enumerate each synchronized label once, from its lowest
            // participant.
            if parts[0] != li || !seen_sync.insert(label) {
                continue;
            }
            let choices: Vec<Vec<&ProcState>> = parts
                .iter()
                .map(|&p| {
                    per_leaf[p]
                        .iter()
                        .filter(|(l, _)| l == label)
                        .map(|(_, t)| t)
                        .collect::<Vec<_>>()
                })
                .collect();
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            for combo in cartesian(&choices) {
                let mut next = g.clone();
                for (k, &p) in parts.iter().enumerate() {
                    next[p] = combo[k].clone();
                }
                out.push((net.hidden(label), next));
            }
        }
    }

    // Set semantics, preserving first-occurrence order.
    let mut seen: HashSet<(Label, GlobalState)> = HashSet::new();
    out.retain(|pair| seen.insert(pair.clone()));
    out
}

/// Cartesian product of per-participant move choices.
fn cartesian<'a>(choices: &[Vec<&'a ProcState>]) -> Vec<Vec<&'a ProcState>> {
    let mut result: Vec<Vec<&ProcState>> = vec![Vec::new()];
    for options in choices {
        let mut grown = Vec::with_capacity(result.len() * options.len());
        for partial in &result {
            for &option in options {
                let mut next = partial.clone();
                next.push(option);
                grown.push(next);
            }
        }
        result = grown;
    }
    result
}
