//! The bus: the n physical layers and the cable, combined into one process.
//!
//! Covers fair and immediate arbitration with a fairness interval, clocking
//! of the busy node, signal distribution with fault injection (corruption,
//! loss, dummy extension, destination invalidation), conflict resolution
//! when several nodes hold the bus, and subaction / arbitration-reset gaps.
//!
//! Branch points that would otherwise re-enter a phase without any action
//! (dropping a signal, starting a reset gap, deciding to invalidate a
//! destination) are guarded by an internal `i` step.

use crate::label::Label;
use crate::signal::{
    ArbKind, ArbResult, BoolTable, Crc, Dest, Domains, NodeId, Signal,
};

/// Which transmission faults the bus may inject. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaultConfig {
    /// Header, data and acknowledge signals may be delivered corrupted.
    pub corrupt: bool,
    /// Header, data and acknowledge signals may not be delivered at all.
    pub drop: bool,
    /// A packet may be extended by a dummy signal right after the data.
    pub dummy: bool,
    /// Destination signals may be invalidated, spoiling the next header
    /// checksum for the affected recipient.
    pub invalidate_dest: bool,
}

impl FaultConfig {
    pub fn all_on() -> FaultConfig {
        FaultConfig { corrupt: true, drop: true, dummy: true, invalidate_dest: true }
    }

    pub fn all_off() -> FaultConfig {
        FaultConfig { corrupt: false, drop: false, dummy: false, invalidate_dest: false }
    }
}

impl Default for FaultConfig {
    fn default() -> Self {
        FaultConfig::all_on()
    }
}

/// State of the bus process.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BusState {
    pub n: u8,
    pub phase: BusPhase,
    /// Which nodes have had fair access during the running fairness interval.
    pub fairness: BoolTable,
    /// Which nodes have an unanswered immediate arbitration request.
    pub immediate: BoolTable,
    /// Which nodes were handed an invalidated destination for the packet in
    /// flight; their next header arrives with a corrupted checksum.
    pub corrupted_dest: BoolTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BusPhase {
    /// Nothing on the cable. Fair requests enter decision mode; a reset gap
    /// may occur once at least one node has used its fair access.
    Idle,
    /// Decision mode: about to confirm a fair request.
    Decide { requester: NodeId },
    /// A fair request received while the bus was occupied: the pending lost
    /// confirmation, after which the interrupted phase resumes.
    ConfirmLost { requester: NodeId, resume: Box<BusPhase> },
    /// One node controls the bus. `dummy_window` is set right after a data
    /// signal round while the packet may still be extended by a dummy.
    Busy { owner: NodeId, dummy_window: bool },
    /// A clock indication was given; the owner owes a data request.
    AwaitSend { owner: NodeId },
    /// Delivering `signal` to every node but the sender; `cursor` is the
    /// recipient being served.
    Distribute { sender: NodeId, signal: Signal, cursor: u8 },
    /// The bus decided to invalidate the destination signal for the cursor
    /// recipient and now delivers some arbitrary destination value.
    DeliverInvalidDest { sender: NodeId, signal: Signal, cursor: u8 },
    /// After an End: confirming every immediate requester (a won
    /// confirmation, then a clock indication, per node in ascending order).
    ConfirmImm { owners: BoolTable, cursor: u8, pacon_given: bool },
    /// More than one node has control: wait for End signals until only one
    /// remains. `owed` marks owners whose response to a clock indication is
    /// still outstanding; signals from non-final owners are discarded.
    Resolve { owners: BoolTable, owed: BoolTable },
    /// Distributing a gap signal to all nodes; a reset gap also clears the
    /// fairness table when it completes.
    GapBroadcast { reset: bool, cursor: u8 },
}

/// Bus in its idle state with clean tables.
pub fn bus_initial(n: u8) -> BusState {
    assert!(n >= 2, "a bus needs at least two nodes");
    BusState {
        n,
        phase: BusPhase::Idle,
        fairness: BoolTable::new(n, false),
        immediate: BoolTable::new(n, false),
        corrupted_dest: BoolTable::new(n, false),
    }
}

fn with_phase(s: &BusState, phase: BusPhase) -> BusState {
    BusState {
        n: s.n,
        phase,
        fairness: s.fairness.clone(),
        immediate: s.immediate.clone(),
        corrupted_dest: s.corrupted_dest.clone(),
    }
}

fn first_recipient(n: u8, sender: NodeId) -> u8 {
    if sender.0 == 0 {
        1
    } else {
        0
    }
}

fn next_recipient(n: u8, sender: NodeId, after: u8) -> Option<u8> {
    let mut j = after + 1;
    if j == sender.0 {
        j += 1;
    }
    if j < n {
        Some(j)
    } else {
        None
    }
}

/// State after the cursor recipient has been served (or skipped): move to
/// the next recipient, or close the round.
fn advance(s: &BusState, sender: NodeId, signal: Signal, cursor: u8, faults: &FaultConfig) -> BusState {
    match next_recipient(s.n, sender, cursor) {
        Some(next) => with_phase(s, BusPhase::Distribute { sender, signal, cursor: next }),
        None => post_round(s, sender, signal, faults),
    }
}

/// A signal has been distributed to every node: check for End, open the
/// dummy window after a data signal, otherwise return to the busy state.
fn post_round(s: &BusState, sender: NodeId, signal: Signal, faults: &FaultConfig) -> BusState {
    match signal {
        Signal::End => {
            let mut done = with_phase(s, BusPhase::Idle);
            done.corrupted_dest = BoolTable::new(s.n, false);
            if s.immediate.any() {
                let owners = s.immediate.clone();
                done.immediate = BoolTable::new(s.n, false);
                done.phase = confirm_phase(&owners, 0);
                done
            } else {
                done.phase = BusPhase::GapBroadcast { reset: false, cursor: 0 };
                done
            }
        }
        Signal::DataSig(..) if faults.dummy => {
            with_phase(s, BusPhase::Busy { owner: sender, dummy_window: true })
        }
        _ => with_phase(s, BusPhase::Busy { owner: sender, dummy_window: false }),
    }
}

/// Next step of the post-End confirmation sweep: confirm the first owner at
/// or after `from`, or hand the bus over when everyone has been served.
fn confirm_phase(owners: &BoolTable, from: u8) -> BusPhase {
    let next = owners.members().find(|j| j.0 >= from);
    match next {
        Some(j) => BusPhase::ConfirmImm { owners: owners.clone(), cursor: j.0, pacon_given: false },
        None => {
            let mut live = owners.members();
            let single = live.next().expect("confirmation sweep over empty owner set");
            if live.next().is_none() {
                BusPhase::AwaitSend { owner: single }
            } else {
                BusPhase::Resolve { owners: owners.clone(), owed: owners.clone() }
            }
        }
    }
}

/// Arbitration requests the bus accepts while occupied: fair requests are
/// confirmed lost, immediate requests are recorded without confirmation.
fn busy_arbitration(s: &BusState, resume: &BusPhase, out: &mut Vec<(Label, BusState)>) {
    let owner_of = |phase: &BusPhase| -> Option<NodeId> {
        match phase {
            BusPhase::Busy { owner, .. } | BusPhase::AwaitSend { owner } => Some(*owner),
            BusPhase::Distribute { sender, .. } | BusPhase::DeliverInvalidDest { sender, .. } => {
                Some(*sender)
            }
            _ => None,
        }
    };
    let owner = owner_of(resume);
    for j in 0..s.n {
        let j = NodeId(j);
        if Some(j) == owner {
            continue;
        }
        out.push((
            Label::pareq(j, ArbKind::Fair),
            with_phase(
                s,
                BusPhase::ConfirmLost { requester: j, resume: Box::new(resume.clone()) },
            ),
        ));
        if !s.immediate.get(j) {
            let mut t = with_phase(s, resume.clone());
            t.immediate = s.immediate.set(j, true);
            out.push((Label::pareq(j, ArbKind::Immediate), t));
        }
    }
}

/// Complete successor set of a bus state.
pub fn bus_step(s: &BusState, faults: &FaultConfig, domains: &Domains) -> Vec<(Label, BusState)> {
    let mut out = Vec::new();
    match &s.phase {
        BusPhase::Idle => {
            for j in 0..s.n {
                let j = NodeId(j);
                out.push((
                    Label::pareq(j, ArbKind::Fair),
                    with_phase(s, BusPhase::Decide { requester: j }),
                ));
            }
            // An arbitration reset gap may occur once some node has used its
            // fair access; the idle-period timing is abstracted away.
            if s.fairness.any() {
                out.push((
                    Label::tau(),
                    with_phase(s, BusPhase::GapBroadcast { reset: true, cursor: 0 }),
                ));
            }
        }

        BusPhase::Decide { requester } => {
            let j = *requester;
            if !s.fairness.get(j) {
                let mut t = with_phase(s, BusPhase::Busy { owner: j, dummy_window: false });
                t.fairness = s.fairness.set(j, true);
                out.push((Label::pacon(j, ArbResult::Won), t));
            } else {
                out.push((Label::pacon(j, ArbResult::Lost), with_phase(s, BusPhase::Idle)));
            }
        }

        BusPhase::ConfirmLost { requester, resume } => {
            out.push((
                Label::pacon(*requester, ArbResult::Lost),
                with_phase(s, (**resume).clone()),
            ));
        }

        BusPhase::Busy { owner, dummy_window } => {
            let owner = *owner;
            out.push((Label::pcind(owner), with_phase(s, BusPhase::AwaitSend { owner })));
            if *dummy_window {
                // The packet may be extended by one dummy signal immediately
                // after the data signal round.
                let r = first_recipient(s.n, owner);
                out.push((
                    Label::pdind(NodeId(r), Signal::Dummy),
                    advance(s, owner, Signal::Dummy, r, faults),
                ));
            }
            busy_arbitration(s, &s.phase, &mut out);
        }

        BusPhase::AwaitSend { owner } => {
            let owner = *owner;
            for sig in Signal::all(s.n, domains) {
                let cursor = first_recipient(s.n, owner);
                out.push((
                    Label::pdreq(owner, sig),
                    with_phase(s, BusPhase::Distribute { sender: owner, signal: sig, cursor }),
                ));
            }
            busy_arbitration(s, &s.phase, &mut out);
        }

        BusPhase::Distribute { sender, signal, cursor } => {
            let (sender, signal, cursor) = (*sender, *signal, *cursor);
            let r = NodeId(cursor);
            let advanced = || advance(s, sender, signal, cursor, faults);
            match signal {
                Signal::HeaderSig(h, crc) => {
                    // An invalidated destination spoils this recipient's
                    // header checksum: a valid delivery is no longer offered.
                    let effective = if s.corrupted_dest.get(r) { Crc::Corrupted } else { crc };
                    if effective == Crc::Valid {
                        out.push((
                            Label::pdind(r, Signal::HeaderSig(h, Crc::Valid)),
                            advanced(),
                        ));
                        if faults.corrupt {
                            out.push((
                                Label::pdind(r, Signal::HeaderSig(h, Crc::Corrupted)),
                                advanced(),
                            ));
                        }
                    } else {
                        out.push((
                            Label::pdind(r, Signal::HeaderSig(h, Crc::Corrupted)),
                            advanced(),
                        ));
                    }
                    if faults.drop {
                        out.push((Label::tau(), advanced()));
                    }
                }
                Signal::DataSig(d, crc) => {
                    out.push((Label::pdind(r, Signal::DataSig(d, crc)), advanced()));
                    if faults.corrupt && crc == Crc::Valid {
                        out.push((
                            Label::pdind(r, Signal::DataSig(d, Crc::Corrupted)),
                            advanced(),
                        ));
                    }
                    if faults.drop {
                        out.push((Label::tau(), advanced()));
                    }
                }
                Signal::AckSig(a, crc) => {
                    out.push((Label::pdind(r, Signal::AckSig(a, crc)), advanced()));
                    if faults.corrupt && crc == Crc::Valid {
                        out.push((
                            Label::pdind(r, Signal::AckSig(a, Crc::Corrupted)),
                            advanced(),
                        ));
                    }
                    if faults.drop {
                        out.push((Label::tau(), advanced()));
                    }
                }
                Signal::DestSig(d) => {
                    out.push((Label::pdind(r, Signal::DestSig(d)), advanced()));
                    if faults.invalidate_dest {
                        out.push((
                            Label::tau(),
                            with_phase(
                                s,
                                BusPhase::DeliverInvalidDest { sender, signal, cursor },
                            ),
                        ));
                    }
                }
                other => {
                    out.push((Label::pdind(r, other), advanced()));
                }
            }
            busy_arbitration(s, &s.phase, &mut out);
        }

        BusPhase::DeliverInvalidDest { sender, signal, cursor } => {
            let (sender, signal, cursor) = (*sender, *signal, *cursor);
            let r = NodeId(cursor);
            for j in 0..s.n {
                let mut t = advance(s, sender, signal, cursor, faults);
                t.corrupted_dest = t.corrupted_dest.set(r, true);
                out.push((Label::pdind(r, Signal::DestSig(Dest::Node(NodeId(j)))), t));
            }
            let mut t = advance(s, sender, signal, cursor, faults);
            t.corrupted_dest = t.corrupted_dest.set(r, true);
            out.push((Label::pdind(r, Signal::DestSig(Dest::Broadcast)), t));
        }

        BusPhase::ConfirmImm { owners, cursor, pacon_given } => {
            let j = NodeId(*cursor);
            if !pacon_given {
                out.push((
                    Label::pacon(j, ArbResult::Won),
                    with_phase(
                        s,
                        BusPhase::ConfirmImm {
                            owners: owners.clone(),
                            cursor: *cursor,
                            pacon_given: true,
                        },
                    ),
                ));
            } else {
                out.push((Label::pcind(j), with_phase(s, confirm_phase(owners, cursor + 1))));
            }
        }

        BusPhase::Resolve { owners, owed } => {
            for j in owed.members().collect::<Vec<_>>() {
                for sig in Signal::all(s.n, domains) {
                    let target = if sig == Signal::End {
                        let remaining = owners.set(j, false);
                        let still_owed = owed.set(j, false);
                        if remaining.any() {
                            with_phase(
                                s,
                                BusPhase::Resolve { owners: remaining, owed: still_owed },
                            )
                        } else {
                            // No node has control any more.
                            with_phase(s, BusPhase::GapBroadcast { reset: false, cursor: 0 })
                        }
                    } else if owners.count() == 1 {
                        // The conflict is resolved: this node becomes the
                        // busy one and its signal is distributed.
                        with_phase(
                            s,
                            BusPhase::Distribute {
                                sender: j,
                                signal: sig,
                                cursor: first_recipient(s.n, j),
                            },
                        )
                    } else {
                        // Conflicting signals are discarded.
                        with_phase(
                            s,
                            BusPhase::Resolve { owners: owners.clone(), owed: owed.set(j, false) },
                        )
                    };
                    out.push((Label::pdreq(j, sig), target));
                }
            }
            for j in owners.members() {
                if !owed.get(j) {
                    out.push((
                        Label::pcind(j),
                        with_phase(
                            s,
                            BusPhase::Resolve { owners: owners.clone(), owed: owed.set(j, true) },
                        ),
                    ));
                }
            }
            busy_arbitration(s, &s.phase, &mut out);
        }

        BusPhase::GapBroadcast { reset, cursor } => {
            let j = NodeId(*cursor);
            let mut t = if cursor + 1 < s.n {
                with_phase(s, BusPhase::GapBroadcast { reset: *reset, cursor: cursor + 1 })
            } else {
                with_phase(s, BusPhase::Idle)
            };
            if *reset && cursor + 1 >= s.n {
                // Every node may again be granted fair access.
                t.fairness = BoolTable::new(s.n, false);
            }
            out.push((Label::pdind(j, Signal::SubActGap), t));
        }
    }
    out
}
