//! Aldébaran (.aut) file I/O.
//!
//! Format: a header line `des (I, T, S)` with the initial state index, the
//! transition count and the state count, followed by one line per transition
//! `(src, "LABEL", dst)`. The writer emits transitions in ascending
//! (source, label text, target) order, so output is deterministic and
//! byte-identical across runs.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::lts::Lts;

#[derive(Debug, Error)]
pub enum AutError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed header, expected `des (init, transitions, states)`")]
    BadHeader { line: usize },
    #[error("line {line}: malformed transition, expected `(src, \"label\", dst)`")]
    BadTransition { line: usize },
    #[error("line {line}: state index {index} out of range ({num_states} states)")]
    IndexOutOfRange { line: usize, index: u64, num_states: u32 },
    #[error("line {line}: header announced {expected} transitions but found {found}")]
    CountMismatch { line: usize, expected: u64, found: u64 },
    #[error("line {line}: initial state {initial} out of range ({num_states} states)")]
    BadInitial { line: usize, initial: u64, num_states: u32 },
}

/// Writes `lts` in AUT format. Deterministic: identical LTS values produce
/// byte-identical files.
pub fn aut_write<W: Write>(lts: &Lts, sink: &mut W) -> std::io::Result<()> {
    writeln!(
        sink,
        "des ({}, {}, {})",
        lts.initial(),
        lts.num_transitions(),
        lts.num_states()
    )?;
    let mut lines: Vec<(u32, &str, u32)> = lts
        .transitions()
        .iter()
        .map(|&(src, label, dst)| (src, lts.label_text(label), dst))
        .collect();
    lines.sort_unstable();
    for (src, label, dst) in lines {
        writeln!(sink, "({}, \"{}\", {})", src, label, dst)?;
    }
    Ok(())
}

/// Parses an AUT file. The transition count and every state index are
/// validated against the header; errors name the offending line.
pub fn aut_read<R: BufRead>(source: R) -> Result<Lts, AutError> {
    let mut lines = source.lines();
    let header = lines.next().ok_or(AutError::BadHeader { line: 1 })??;
    let (initial, expected_transitions, num_states) =
        parse_header(header.trim()).ok_or(AutError::BadHeader { line: 1 })?;
    if num_states == 0 || initial >= num_states as u64 {
        return Err(AutError::BadInitial { line: 1, initial, num_states: num_states as u32 });
    }
    let num_states = num_states as u32;

    let mut transitions = Vec::new();
    let mut line_no = 1usize;
    for line in lines {
        let line = line?;
        line_no += 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let (src, label, dst) =
            parse_transition(text).ok_or(AutError::BadTransition { line: line_no })?;
        for index in [src, dst] {
            if index >= num_states as u64 {
                return Err(AutError::IndexOutOfRange { line: line_no, index, num_states });
            }
        }
        transitions.push((src as u32, label, dst as u32));
    }
    if transitions.len() as u64 != expected_transitions {
        return Err(AutError::CountMismatch {
            line: line_no + 1,
            expected: expected_transitions,
            found: transitions.len() as u64,
        });
    }
    Ok(Lts::new(initial as u32, num_states, transitions).expect("indices validated above"))
}

fn parse_header(line: &str) -> Option<(u64, u64, u64)> {
    let rest = line.strip_prefix("des")?.trim();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = inner.splitn(3, ',');
    let initial = parts.next()?.trim().parse().ok()?;
    let transitions = parts.next()?.trim().parse().ok()?;
    let states = parts.next()?.trim().parse().ok()?;
    Some((initial, transitions, states))
}

fn parse_transition(line: &str) -> Option<(u64, String, u64)> {
    let inner = line.strip_prefix('(')?.strip_suffix(')')?;
    let open = inner.find('"')?;
    let close = inner.rfind('"')?;
    if close <= open {
        return None;
    }
    let src = inner[..open].trim().strip_suffix(',')?.trim().parse().ok()?;
    let label = inner[open + 1..close].to_string();
    let dst = inner[close + 1..].trim().strip_prefix(',')?.trim().parse().ok()?;
    Some((src, label, dst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_to_string(lts: &Lts) -> String {
        let mut buf = Vec::new();
        aut_write(lts, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn one_state_no_transitions() {
        let lts = Lts::new(0, 1, vec![]).unwrap();
        assert_eq!(write_to_string(&lts), "des (0, 0, 1)\n");
    }

    #[test]
    fn single_tau_transition() {
        let lts = Lts::new(0, 2, vec![(0, "i".into(), 1)]).unwrap();
        assert_eq!(write_to_string(&lts), "des (0, 1, 2)\n(0, \"i\", 1)\n");
    }

    #[test]
    fn read_minimal() {
        let lts = aut_read("des (0, 0, 1)".as_bytes()).unwrap();
        assert_eq!(lts.num_states(), 1);
        assert_eq!(lts.num_transitions(), 0);
    }

    #[test]
    fn read_preserves_label_text() {
        let lts = aut_read("des (0, 1, 2)\n(0, \"PDIND !1 !START\", 1)\n".as_bytes()).unwrap();
        assert_eq!(lts.label_text(lts.transitions()[0].1), "PDIND !1 !START");
    }

    #[test]
    fn count_mismatch_is_reported_at_end_of_file() {
        let err = aut_read("des (0, 2, 2)\n(0, \"a\", 1)\n".as_bytes()).unwrap_err();
        match err {
            AutError::CountMismatch { expected, found, .. } => {
                assert_eq!((expected, found), (2, 1));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn out_of_range_index_names_the_line() {
        let err = aut_read("des (0, 1, 1)\n(0, \"a\", 3)\n".as_bytes()).unwrap_err();
        match err {
            AutError::IndexOutOfRange { line, index, .. } => {
                assert_eq!((line, index), (2, 3));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn malformed_header_is_an_error() {
        assert!(matches!(
            aut_read("des 0 0 1".as_bytes()),
            Err(AutError::BadHeader { line: 1 })
        ));
    }
}
