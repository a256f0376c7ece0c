//! Explicit labelled transition systems.
//!
//! States are a dense 0-based index set; labels are interned text. `Lts`
//! values are immutable once built and safe to share across threads.

use indexmap::IndexSet;

/// An explicit LTS: initial state, state count, interned label alphabet, and
/// a duplicate-free transition list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    initial: u32,
    num_states: u32,
    labels: Vec<String>,
    transitions: Vec<(u32, u32, u32)>,
}

impl Lts {
    /// Builds an LTS from a transition list. Transition endpoints must lie
    /// below `num_states` and `initial` must be a valid state. Duplicate
    /// (source, label, target) triples are collapsed.
    pub fn new(
        initial: u32,
        num_states: u32,
        transitions: Vec<(u32, String, u32)>,
    ) -> Result<Lts, LtsError> {
        if initial >= num_states {
            return Err(LtsError::BadInitial { initial, num_states });
        }
        let mut labels: IndexSet<String> = IndexSet::new();
        let mut triples = Vec::with_capacity(transitions.len());
        for (src, label, dst) in transitions {
            if src >= num_states || dst >= num_states {
                return Err(LtsError::BadEndpoint { src, dst, num_states });
            }
            let (li, _) = labels.insert_full(label);
            triples.push((src, li as u32, dst));
        }
        triples.sort_unstable();
        triples.dedup();
        Ok(Lts {
            initial,
            num_states,
            labels: labels.into_iter().collect(),
            transitions: triples,
        })
    }

    /// Internal constructor for callers that already guarantee the
    /// invariants (dense indices, in-range endpoints, no duplicates).
    pub(crate) fn from_parts(
        initial: u32,
        num_states: u32,
        labels: Vec<String>,
        mut transitions: Vec<(u32, u32, u32)>,
    ) -> Lts {
        debug_assert!(initial < num_states);
        transitions.sort_unstable();
        transitions.dedup();
        Lts { initial, num_states, labels, transitions }
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn num_states(&self) -> u32 {
        self.num_states
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Interned label alphabet. Indices in `transitions` point here.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_text(&self, label: u32) -> &str {
        &self.labels[label as usize]
    }

    /// All transitions as (source, label index, target).
    pub fn transitions(&self) -> &[(u32, u32, u32)] {
        &self.transitions
    }

    /// Outgoing transitions grouped per state: for each state, a list of
    /// (label index, target).
    pub fn outgoing(&self) -> Vec<Vec<(u32, u32)>> {
        let mut out = vec![Vec::new(); self.num_states as usize];
        for &(src, label, dst) in &self.transitions {
            out[src as usize].push((label, dst));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LtsError {
    #[error("initial state {initial} out of range for {num_states} states")]
    BadInitial { initial: u32, num_states: u32 },
    #[error("transition endpoint out of range: ({src}, _, {dst}) with {num_states} states")]
    BadEndpoint { src: u32, dst: u32, num_states: u32 },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_bad_initial() {
        assert!(Lts::new(1, 1, vec![]).is_err());
    }

    #[test]
    fn new_rejects_out_of_range_endpoints() {
        assert!(Lts::new(0, 2, vec![(0, "a".into(), 2)]).is_err());
    }

    #[test]
    fn duplicate_triples_collapse() {
        let l = Lts::new(
            0,
            2,
            vec![(0, "a".into(), 1), (0, "a".into(), 1), (0, "b".into(), 1)],
        )
        .unwrap();
        assert_eq!(l.num_transitions(), 2);
    }
}
