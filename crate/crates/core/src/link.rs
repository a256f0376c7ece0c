//! The link-layer process: an explicit nondeterministic state machine.
//!
//! `link_step` enumerates, for a given control state, every (label,
//! successor) pair the protocol permits, in a fixed order: transaction-side
//! gates (LD*) before phy-side gates (PA*/PD*/PC*).

use crate::label::{IndicationKind, Label};
use crate::signal::{
    AckCode, ArbKind, ArbResult, Crc, Data, Dest, Domains, Header, HoldRelease, LinkConfirmation,
    NodeId, Packet, Signal,
};

/// Control state of one link layer.
///
/// `buffer` is the single-slot store for a pending request that was
/// interrupted by an incoming packet; it is restored to `AwaitArb` when the
/// link returns to its initial state. While a request sits in `AwaitArb` or
/// `AwaitPacon` it lives in the mode itself, not in the buffer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkState {
    pub id: NodeId,
    pub n: u8,
    pub buffer: Option<Packet>,
    pub mode: LinkMode,
}

/// Link-layer control modes.
///
/// Correspondence with the eight asynchronous states L0..L7 of the
/// standard's link state machine, and with the sub-process names
/// conventional in process-algebraic models of it (best effort):
///
/// | mode                         | state machine      | sub-processes          |
/// |------------------------------|--------------------|------------------------|
/// | `Idle`, `AwaitArb`           | L0, L1             | Link0, Link1           |
/// | `AwaitPacon`                 | L1 (arbitrating)   | Link2req / Link2resp   |
/// | `Emitting`/`EmitReady` (data)| L2 (send)          | Link3, Link3RA/RE      |
/// | `AwaitAck`, `EmitCon`        | L3 (ack wait)      | Link4DH/Link4RH        |
/// | `Receive`, `NeedImmArb`      | L4 (receive)       | Link4RD/RE/BRec/DRec   |
/// | `EmitInd`, `AwaitWon`        | L4 -> L5 handoff   | Link4DRec              |
/// | `SendAck*`, `NeedRearb`      | L5, L6 (send ack)  | Link5, Link6           |
/// | `IgnoreGap`, `WaitGap`       | L7 (gap wait)      | Link7                  |
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LinkMode {
    /// Initial state: accepts a data request or a data indication.
    Idle,
    /// Holds a constructed packet; about to start fair arbitration. An
    /// incoming Start diverts to receive mode, buffering the packet.
    AwaitArb { packet: Packet },
    /// Fair arbitration request issued, waiting for the confirmation.
    AwaitPacon { packet: Packet },
    /// Sending: respond to every clock indication with the head of `queue`.
    Emitting { queue: Vec<Signal>, after: AfterEmit },
    /// A clock indication was consumed; the next data request is owed.
    EmitReady { queue: Vec<Signal>, after: AfterEmit },
    /// Waiting for the acknowledge packet of an addressed send.
    AwaitAck { phase: AckPhase },
    /// A confirmation for the transaction layer is pending.
    EmitCon { conf: LinkConfirmation, next: AfterCon },
    /// Receive mode: collecting the signals of an incoming packet.
    Receive { got: Vec<Signal>, addr: AddrStatus },
    /// The packet is addressed to this node: an immediate arbitration
    /// request must be issued before reception continues.
    NeedImmArb { got: Vec<Signal> },
    /// A data indication for the transaction layer is pending.
    EmitInd { kind: IndicationKind, src: NodeId, data: Data, next: AfterInd },
    /// Addressed packet received and forwarded; waiting to win the bus.
    AwaitWon,
    /// Send-acknowledgement mode: keep the cable busy with Prefix signals
    /// until the transaction layer responds.
    SendAckWait,
    /// A hold response was received: re-request immediate arbitration so the
    /// bus comes back to this node after the acknowledge packet ends.
    NeedRearb { ack: AckCode },
    /// Acknowledge packet sent with hold; waiting for the re-won bus.
    AwaitRewon,
    /// Holding the bus for a concatenated response: Prefix on every clock
    /// indication, and a data request sends immediately.
    SendAckHold,
    /// Ignoring the rest of a packet until the next subaction gap. If an
    /// immediate arbitration request is outstanding, a won confirmation may
    /// still arrive and must be answered by an immediate End.
    IgnoreGap { pending: bool },
    /// Waiting for the subaction gap before returning to the initial state.
    WaitGap,
}

/// What the link does after the last queued signal has been emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AfterEmit {
    /// Addressed packet sent: wait for the acknowledge packet.
    AwaitAck,
    /// Broadcast packet sent: confirm to the transaction layer.
    BroadConf,
    /// Acknowledge packet sent with release: back to the initial state.
    AckRelease,
    /// Acknowledge packet sent with hold: wait to win the bus again.
    AckHold,
    /// Lone End emitted after a spurious win: wait for the gap.
    GapWait,
    /// Prefix emitted while awaiting the transaction layer's response.
    SendAckWait,
    /// Prefix emitted while holding for a concatenated response.
    SendAckHold,
}

/// Where the link goes once a pending confirmation has been delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AfterCon {
    /// The gap already occurred: straight back to the initial state.
    ToIdle,
    /// Wait for the subaction gap first.
    ToWaitGap,
}

/// Where the link goes once a pending indication has been delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AfterInd {
    /// Addressed packet: await the arbitration win, then send the ack.
    AwaitWon,
    /// Broadcast packet: nothing to acknowledge, wait for the gap.
    ToWaitGap,
}

/// Sub-phase of the acknowledge wait.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AckPhase {
    ExpectStart,
    ExpectAck,
    ExpectEnd { ack: AckCode, crc: Crc },
}

/// Addressing status of the packet being received. A packet for some other
/// node is dropped as soon as the destination signal is seen, so that case
/// transitions directly to `IgnoreGap` and is never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AddrStatus {
    Unknown,
    ToMe,
    Broadcast,
}

/// Link state in its initial mode: idle with an empty buffer.
pub fn link_initial(id: NodeId, n: u8) -> LinkState {
    assert!(n >= 2, "a bus needs at least two nodes");
    assert!(id.0 < n, "node id out of range");
    LinkState { id, n, buffer: None, mode: LinkMode::Idle }
}

fn with_mode(s: &LinkState, mode: LinkMode) -> LinkState {
    LinkState { id: s.id, n: s.n, buffer: s.buffer, mode }
}

fn with_buffer(s: &LinkState, buffer: Option<Packet>, mode: LinkMode) -> LinkState {
    LinkState { id: s.id, n: s.n, buffer, mode }
}

/// Initial state, resuming a buffered request if one is pending.
fn to_initial(s: &LinkState) -> LinkState {
    match s.buffer {
        Some(packet) => with_buffer(s, None, LinkMode::AwaitArb { packet }),
        None => with_buffer(s, None, LinkMode::Idle),
    }
}

fn emit_queue_for(packet: &Packet) -> Vec<Signal> {
    let mut queue = vec![Signal::Start];
    queue.extend(packet.signals());
    queue.push(Signal::End);
    queue
}

fn after_for_dest(dest: Dest) -> AfterEmit {
    match dest {
        Dest::Broadcast => AfterEmit::BroadConf,
        Dest::Node(_) => AfterEmit::AwaitAck,
    }
}

fn apply_after(s: &LinkState, after: AfterEmit) -> LinkState {
    match after {
        AfterEmit::AwaitAck => with_mode(s, LinkMode::AwaitAck { phase: AckPhase::ExpectStart }),
        AfterEmit::BroadConf => with_mode(
            s,
            LinkMode::EmitCon { conf: LinkConfirmation::BroadSent, next: AfterCon::ToWaitGap },
        ),
        AfterEmit::AckRelease => to_initial(s),
        AfterEmit::AckHold => with_mode(s, LinkMode::AwaitRewon),
        AfterEmit::GapWait => with_mode(s, LinkMode::WaitGap),
        AfterEmit::SendAckWait => with_mode(s, LinkMode::SendAckWait),
        AfterEmit::SendAckHold => with_mode(s, LinkMode::SendAckHold),
    }
}

/// First signal of a fully received packet, read as the sender's id.
fn src_of(got: &[Signal]) -> Option<NodeId> {
    match got.first() {
        Some(Signal::DestSig(Dest::Node(id))) => Some(*id),
        _ => None,
    }
}

/// Complete successor set of a link state.
pub fn link_step(s: &LinkState, domains: &Domains) -> Vec<(Label, LinkState)> {
    let id = s.id;
    let mut out = Vec::new();
    let all_signals = || Signal::all(s.n, domains);
    let dests = || {
        (0..s.n)
            .map(|j| Dest::Node(NodeId(j)))
            .chain(std::iter::once(Dest::Broadcast))
    };

    match &s.mode {
        LinkMode::Idle => {
            for dest in dests() {
                for d in domains.data_values() {
                    let packet = Packet::new(id, dest, Header(0), d);
                    out.push((
                        Label::ldreq(id, dest, d),
                        with_mode(s, LinkMode::AwaitArb { packet }),
                    ));
                }
            }
            for sig in all_signals() {
                let target = if sig == Signal::Start {
                    with_mode(s, LinkMode::Receive { got: Vec::new(), addr: AddrStatus::Unknown })
                } else {
                    s.clone()
                };
                out.push((Label::pdind(id, sig), target));
            }
        }

        LinkMode::AwaitArb { packet } => {
            out.push((
                Label::pareq(id, ArbKind::Fair),
                with_mode(s, LinkMode::AwaitPacon { packet: *packet }),
            ));
            for sig in all_signals() {
                let target = if sig == Signal::Start {
                    with_buffer(
                        s,
                        Some(*packet),
                        LinkMode::Receive { got: Vec::new(), addr: AddrStatus::Unknown },
                    )
                } else {
                    s.clone()
                };
                out.push((Label::pdind(id, sig), target));
            }
        }

        LinkMode::AwaitPacon { packet } => {
            out.push((
                Label::pacon(id, ArbResult::Won),
                with_mode(
                    s,
                    LinkMode::Emitting {
                        queue: emit_queue_for(packet),
                        after: after_for_dest(packet.dest),
                    },
                ),
            ));
            out.push((
                Label::pacon(id, ArbResult::Lost),
                with_mode(s, LinkMode::AwaitArb { packet: *packet }),
            ));
            for sig in all_signals() {
                let target = if sig == Signal::Start {
                    with_buffer(
                        s,
                        Some(*packet),
                        LinkMode::Receive { got: Vec::new(), addr: AddrStatus::Unknown },
                    )
                } else {
                    s.clone()
                };
                out.push((Label::pdind(id, sig), target));
            }
        }

        LinkMode::Emitting { queue, after } => {
            out.push((
                Label::pcind(id),
                with_mode(s, LinkMode::EmitReady { queue: queue.clone(), after: *after }),
            ));
        }

        LinkMode::EmitReady { queue, after } => {
            let head = queue[0];
            let rest: Vec<Signal> = queue[1..].to_vec();
            let target = if rest.is_empty() {
                apply_after(s, *after)
            } else {
                with_mode(s, LinkMode::Emitting { queue: rest, after: *after })
            };
            out.push((Label::pdreq(id, head), target));
        }

        LinkMode::AwaitAck { phase } => {
            for sig in all_signals() {
                let target = ack_wait_target(s, *phase, sig);
                out.push((Label::pdind(id, sig), target));
            }
        }

        LinkMode::EmitCon { conf, next } => {
            let target = match next {
                AfterCon::ToIdle => to_initial(s),
                AfterCon::ToWaitGap => with_mode(s, LinkMode::WaitGap),
            };
            out.push((Label::ldcon(id, *conf), target));
        }

        LinkMode::Receive { got, addr } => {
            for sig in all_signals() {
                let target = receive_target(s, got, *addr, sig);
                out.push((Label::pdind(id, sig), target));
            }
        }

        LinkMode::NeedImmArb { got } => {
            out.push((
                Label::pareq(id, ArbKind::Immediate),
                with_mode(s, LinkMode::Receive { got: got.clone(), addr: AddrStatus::ToMe }),
            ));
        }

        LinkMode::EmitInd { kind, src, data, next } => {
            let target = match next {
                AfterInd::AwaitWon => with_mode(s, LinkMode::AwaitWon),
                AfterInd::ToWaitGap => with_mode(s, LinkMode::WaitGap),
            };
            out.push((Label::ldind(id, *kind, *src, *data), target));
        }

        LinkMode::AwaitWon => {
            out.push((Label::pacon(id, ArbResult::Won), with_mode(s, LinkMode::SendAckWait)));
            for sig in all_signals() {
                out.push((Label::pdind(id, sig), s.clone()));
            }
        }

        LinkMode::SendAckWait => {
            for ack in domains.ack_values() {
                out.push((
                    Label::ldres(id, ack, HoldRelease::Release),
                    with_mode(
                        s,
                        LinkMode::Emitting {
                            queue: vec![Signal::Start, Signal::AckSig(ack, Crc::Valid), Signal::End],
                            after: AfterEmit::AckRelease,
                        },
                    ),
                ));
                out.push((
                    Label::ldres(id, ack, HoldRelease::Hold),
                    with_mode(s, LinkMode::NeedRearb { ack }),
                ));
            }
            out.push((
                Label::pcind(id),
                with_mode(
                    s,
                    LinkMode::EmitReady { queue: vec![Signal::Prefix], after: AfterEmit::SendAckWait },
                ),
            ));
        }

        LinkMode::NeedRearb { ack } => {
            out.push((
                Label::pareq(id, ArbKind::Immediate),
                with_mode(
                    s,
                    LinkMode::Emitting {
                        queue: vec![Signal::Start, Signal::AckSig(*ack, Crc::Valid), Signal::End],
                        after: AfterEmit::AckHold,
                    },
                ),
            ));
        }

        LinkMode::AwaitRewon => {
            out.push((Label::pacon(id, ArbResult::Won), with_mode(s, LinkMode::SendAckHold)));
            for sig in all_signals() {
                out.push((Label::pdind(id, sig), s.clone()));
            }
        }

        LinkMode::SendAckHold => {
            for dest in dests() {
                for d in domains.data_values() {
                    let packet = Packet::new(id, dest, Header(0), d);
                    out.push((
                        Label::ldreq(id, dest, d),
                        with_mode(
                            s,
                            LinkMode::Emitting {
                                queue: emit_queue_for(&packet),
                                after: after_for_dest(dest),
                            },
                        ),
                    ));
                }
            }
            out.push((
                Label::pcind(id),
                with_mode(
                    s,
                    LinkMode::EmitReady { queue: vec![Signal::Prefix], after: AfterEmit::SendAckHold },
                ),
            ));
        }

        LinkMode::IgnoreGap { pending } => {
            if *pending {
                out.push((
                    Label::pacon(id, ArbResult::Won),
                    with_mode(
                        s,
                        LinkMode::Emitting { queue: vec![Signal::End], after: AfterEmit::GapWait },
                    ),
                ));
            }
            for sig in all_signals() {
                let target = if sig == Signal::SubActGap && !pending {
                    to_initial(s)
                } else {
                    s.clone()
                };
                out.push((Label::pdind(id, sig), target));
            }
        }

        LinkMode::WaitGap => {
            for sig in all_signals() {
                let target = if sig == Signal::SubActGap { to_initial(s) } else { s.clone() };
                out.push((Label::pdind(id, sig), target));
            }
        }
    }

    out
}

fn ack_wait_target(s: &LinkState, phase: AckPhase, sig: Signal) -> LinkState {
    let miss_then_gap = || {
        with_mode(
            s,
            LinkMode::EmitCon { conf: LinkConfirmation::AckMiss, next: AfterCon::ToWaitGap },
        )
    };
    // A subaction gap interfering at any point means the acknowledgement is
    // missing, and the gap has already happened: report and return directly.
    if sig == Signal::SubActGap {
        return with_mode(
            s,
            LinkMode::EmitCon { conf: LinkConfirmation::AckMiss, next: AfterCon::ToIdle },
        );
    }
    match phase {
        AckPhase::ExpectStart => match sig {
            Signal::Start => with_mode(s, LinkMode::AwaitAck { phase: AckPhase::ExpectAck }),
            // The future acknowledger keeps the cable busy with Prefix.
            Signal::Prefix => s.clone(),
            _ => miss_then_gap(),
        },
        AckPhase::ExpectAck => match sig {
            Signal::AckSig(ack, crc) => {
                with_mode(s, LinkMode::AwaitAck { phase: AckPhase::ExpectEnd { ack, crc } })
            }
            _ => miss_then_gap(),
        },
        AckPhase::ExpectEnd { ack, crc } => match sig {
            Signal::End if crc == Crc::Valid => with_mode(
                s,
                LinkMode::EmitCon { conf: LinkConfirmation::AckRec(ack), next: AfterCon::ToWaitGap },
            ),
            _ => miss_then_gap(),
        },
    }
}

fn receive_target(s: &LinkState, got: &[Signal], addr: AddrStatus, sig: Signal) -> LinkState {
    let me = s.id;
    let pending = addr == AddrStatus::ToMe;
    let deviation = || with_mode(s, LinkMode::IgnoreGap { pending });
    let push = |addr: AddrStatus| {
        let mut g = got.to_vec();
        g.push(sig);
        with_mode(s, LinkMode::Receive { got: g, addr })
    };

    match sig {
        Signal::SubActGap => {
            // Unreachable mid-packet; keep the machine total. With an
            // arbitration request outstanding the confirmation must still be
            // consumed, so the state is held.
            if pending {
                s.clone()
            } else {
                to_initial(s)
            }
        }
        Signal::Start => deviation(),
        Signal::End => match got.len() {
            // One signal then End: an acknowledge packet, to be ignored.
            1 => with_mode(s, LinkMode::IgnoreGap { pending: false }),
            4 => forward(s, got, addr),
            _ => deviation(),
        },
        Signal::Prefix => {
            if got.len() == 4 {
                forward(s, got, addr)
            } else {
                deviation()
            }
        }
        _ => match got.len() {
            0 => push(addr),
            1 => match sig {
                Signal::DestSig(Dest::Broadcast) => push(AddrStatus::Broadcast),
                Signal::DestSig(Dest::Node(dest)) if dest == me => {
                    let mut g = got.to_vec();
                    g.push(sig);
                    with_mode(s, LinkMode::NeedImmArb { got: g })
                }
                // A packet for some other node: ignore it completely.
                Signal::DestSig(Dest::Node(_)) => {
                    with_mode(s, LinkMode::IgnoreGap { pending: false })
                }
                _ => deviation(),
            },
            2 => match sig {
                Signal::HeaderSig(_, Crc::Valid) => push(addr),
                _ => deviation(),
            },
            3 => match sig {
                Signal::DataSig(..) => push(addr),
                _ => deviation(),
            },
            // A fifth packet signal (e.g. a dummy extension) is an invalid
            // length.
            _ => deviation(),
        },
    }
}

/// A correctly terminated four-signal packet: forward it upward.
fn forward(s: &LinkState, got: &[Signal], addr: AddrStatus) -> LinkState {
    let (data, data_crc) = match got.get(3) {
        Some(Signal::DataSig(d, c)) => (*d, *c),
        _ => return with_mode(s, LinkMode::IgnoreGap { pending: addr == AddrStatus::ToMe }),
    };
    let src = match src_of(got) {
        Some(src) => src,
        None => return with_mode(s, LinkMode::IgnoreGap { pending: addr == AddrStatus::ToMe }),
    };
    match addr {
        AddrStatus::Broadcast => {
            if data_crc == Crc::Valid {
                with_mode(
                    s,
                    LinkMode::EmitInd {
                        kind: IndicationKind::Broadcast,
                        src,
                        data,
                        next: AfterInd::ToWaitGap,
                    },
                )
            } else {
                // A broadcast packet with an invalid data checksum is ignored.
                with_mode(s, LinkMode::WaitGap)
            }
        }
        AddrStatus::ToMe => with_mode(
            s,
            LinkMode::EmitInd {
                kind: IndicationKind::Addressed,
                src,
                data,
                next: AfterInd::AwaitWon,
            },
        ),
        // The destination check always precedes a complete packet.
        AddrStatus::Unknown => with_mode(s, LinkMode::IgnoreGap { pending: false }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Gate;

    fn domains() -> Domains {
        Domains::default()
    }

    #[test]
    fn initial_is_idle_with_empty_buffer() {
        let s = link_initial(NodeId(0), 2);
        assert_eq!(s.mode, LinkMode::Idle);
        assert_eq!(s.buffer, None);
        assert_eq!(s.id, NodeId(0));
    }

    #[test]
    fn initials_differ_only_in_id() {
        let a = link_initial(NodeId(0), 2);
        let b = link_initial(NodeId(1), 2);
        assert_eq!(a.mode, b.mode);
        assert_eq!(a.buffer, b.buffer);
        assert_ne!(a.id, b.id);
    }

    #[test]
    fn idle_offers_ldreq_and_pdind() {
        let s = link_initial(NodeId(0), 2);
        let succs = link_step(&s, &domains());
        assert!(succs.iter().any(|(l, _)| l.gate == Gate::Ldreq));
        assert!(succs.iter().any(|(l, _)| l.gate == Gate::Pdind));
    }

    /// Independent enumeration over the label alphabet: with n = 2 and
    /// singleton payloads, idle accepts 14 data indications (every signal)
    /// plus 3 data requests (two node destinations and broadcast).
    #[test]
    fn idle_successor_count_matches_alphabet_enumeration() {
        let s = link_initial(NodeId(0), 2);
        let succs = link_step(&s, &domains());
        let pdind = succs.iter().filter(|(l, _)| l.gate == Gate::Pdind).count();
        let ldreq = succs.iter().filter(|(l, _)| l.gate == Gate::Ldreq).count();
        assert_eq!(pdind, Signal::all(2, &domains()).len());
        assert_eq!(ldreq, 3);
        assert_eq!(succs.len(), 14 + 3);
    }

    #[test]
    fn idle_ignores_non_start_signals() {
        let s = link_initial(NodeId(0), 2);
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(0), Signal::Prefix))
            .unwrap();
        assert_eq!(*target, s);
    }

    #[test]
    fn broadcast_send_ends_with_confirmation_then_gap_wait() {
        let s = LinkState {
            id: NodeId(0),
            n: 2,
            buffer: None,
            mode: LinkMode::EmitReady { queue: vec![Signal::End], after: AfterEmit::BroadConf },
        };
        let succs = link_step(&s, &domains());
        assert_eq!(succs.len(), 1);
        let (label, mid) = &succs[0];
        assert_eq!(*label, Label::pdreq(NodeId(0), Signal::End));
        assert_eq!(
            mid.mode,
            LinkMode::EmitCon { conf: LinkConfirmation::BroadSent, next: AfterCon::ToWaitGap }
        );
        let succs = link_step(mid, &domains());
        assert_eq!(succs.len(), 1);
        let (label, end) = &succs[0];
        assert_eq!(*label, Label::ldcon(NodeId(0), LinkConfirmation::BroadSent));
        assert_eq!(end.mode, LinkMode::WaitGap);
    }

    /// Hand-executed: a subaction gap interfering while the acknowledgement
    /// is awaited reports ackmiss and returns to the initial state without a
    /// further gap wait.
    #[test]
    fn gap_during_ack_wait_reports_ackmiss_and_returns_directly() {
        let s = LinkState {
            id: NodeId(0),
            n: 2,
            buffer: None,
            mode: LinkMode::AwaitAck { phase: AckPhase::ExpectStart },
        };
        let succs = link_step(&s, &domains());
        let (_, mid) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(0), Signal::SubActGap))
            .unwrap();
        assert_eq!(
            mid.mode,
            LinkMode::EmitCon { conf: LinkConfirmation::AckMiss, next: AfterCon::ToIdle }
        );
        let succs = link_step(mid, &domains());
        assert_eq!(succs.len(), 1);
        assert_eq!(succs[0].1.mode, LinkMode::Idle);
    }

    /// Driving the machine with a scripted clock: a full addressed send is
    /// exactly six clock indications, each answered by one data request:
    /// Start, the four packet signals, End.
    #[test]
    fn send_mode_emits_six_signals_one_per_clock() {
        let packet = Packet::new(NodeId(0), Dest::Node(NodeId(1)), Header(0), Data(0));
        let mut s = LinkState {
            id: NodeId(0),
            n: 2,
            buffer: None,
            mode: LinkMode::Emitting { queue: emit_queue_for(&packet), after: AfterEmit::AwaitAck },
        };
        let mut emitted = Vec::new();
        loop {
            match &s.mode {
                LinkMode::Emitting { .. } => {
                    let succs = link_step(&s, &domains());
                    assert_eq!(succs.len(), 1);
                    assert_eq!(succs[0].0.gate, Gate::Pcind);
                    s = succs[0].1.clone();
                }
                LinkMode::EmitReady { .. } => {
                    let succs = link_step(&s, &domains());
                    assert_eq!(succs.len(), 1);
                    assert_eq!(succs[0].0.gate, Gate::Pdreq);
                    emitted.push(succs[0].0.clone());
                    s = succs[0].1.clone();
                }
                _ => break,
            }
        }
        assert_eq!(emitted.len(), 6);
        assert_eq!(emitted[0], Label::pdreq(NodeId(0), Signal::Start));
        assert_eq!(emitted[5], Label::pdreq(NodeId(0), Signal::End));
        assert_eq!(s.mode, LinkMode::AwaitAck { phase: AckPhase::ExpectStart });
    }

    #[test]
    fn receive_of_ack_packet_is_ignored() {
        let s = LinkState {
            id: NodeId(0),
            n: 2,
            buffer: None,
            mode: LinkMode::Receive {
                got: vec![Signal::AckSig(AckCode(0), Crc::Valid)],
                addr: AddrStatus::Unknown,
            },
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(0), Signal::End))
            .unwrap();
        assert_eq!(target.mode, LinkMode::IgnoreGap { pending: false });
    }

    #[test]
    fn destination_for_me_requires_immediate_arbitration() {
        let s = LinkState {
            id: NodeId(1),
            n: 2,
            buffer: None,
            mode: LinkMode::Receive {
                got: vec![Signal::DestSig(Dest::Node(NodeId(0)))],
                addr: AddrStatus::Unknown,
            },
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(1), Signal::DestSig(Dest::Node(NodeId(1)))))
            .unwrap();
        assert!(matches!(target.mode, LinkMode::NeedImmArb { .. }));
        let next = link_step(target, &domains());
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].0, Label::pareq(NodeId(1), ArbKind::Immediate));
    }

    #[test]
    fn packet_for_other_node_is_ignored_completely() {
        let s = LinkState {
            id: NodeId(2),
            n: 3,
            buffer: None,
            mode: LinkMode::Receive {
                got: vec![Signal::DestSig(Dest::Node(NodeId(0)))],
                addr: AddrStatus::Unknown,
            },
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(2), Signal::DestSig(Dest::Node(NodeId(1)))))
            .unwrap();
        assert_eq!(target.mode, LinkMode::IgnoreGap { pending: false });
    }

    #[test]
    fn corrupted_header_is_a_deviation() {
        let s = LinkState {
            id: NodeId(1),
            n: 2,
            buffer: None,
            mode: LinkMode::Receive {
                got: vec![
                    Signal::DestSig(Dest::Node(NodeId(0))),
                    Signal::DestSig(Dest::Node(NodeId(1))),
                ],
                addr: AddrStatus::ToMe,
            },
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| {
                *l == Label::pdind(NodeId(1), Signal::HeaderSig(Header(0), Crc::Corrupted))
            })
            .unwrap();
        assert_eq!(target.mode, LinkMode::IgnoreGap { pending: true });
    }

    #[test]
    fn corrupted_broadcast_data_is_dropped_without_indication() {
        let s = LinkState {
            id: NodeId(1),
            n: 2,
            buffer: None,
            mode: LinkMode::Receive {
                got: vec![
                    Signal::DestSig(Dest::Node(NodeId(0))),
                    Signal::DestSig(Dest::Broadcast),
                    Signal::HeaderSig(Header(0), Crc::Valid),
                    Signal::DataSig(Data(0), Crc::Corrupted),
                ],
                addr: AddrStatus::Broadcast,
            },
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(1), Signal::End))
            .unwrap();
        assert_eq!(target.mode, LinkMode::WaitGap);
    }

    #[test]
    fn spurious_win_during_ignore_forces_an_immediate_end() {
        let s = LinkState {
            id: NodeId(1),
            n: 2,
            buffer: None,
            mode: LinkMode::IgnoreGap { pending: true },
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pacon(NodeId(1), ArbResult::Won))
            .unwrap();
        assert_eq!(
            target.mode,
            LinkMode::Emitting { queue: vec![Signal::End], after: AfterEmit::GapWait }
        );
    }

    #[test]
    fn buffered_request_resumes_after_the_gap() {
        let packet = Packet::new(NodeId(0), Dest::Node(NodeId(1)), Header(0), Data(0));
        let s = LinkState {
            id: NodeId(0),
            n: 2,
            buffer: Some(packet),
            mode: LinkMode::WaitGap,
        };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::pdind(NodeId(0), Signal::SubActGap))
            .unwrap();
        assert_eq!(target.mode, LinkMode::AwaitArb { packet });
        assert_eq!(target.buffer, None);
    }

    #[test]
    fn hold_response_rearbitrates_before_the_ack_packet() {
        let s = LinkState { id: NodeId(1), n: 2, buffer: None, mode: LinkMode::SendAckWait };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::ldres(NodeId(1), AckCode(0), HoldRelease::Hold))
            .unwrap();
        assert_eq!(target.mode, LinkMode::NeedRearb { ack: AckCode(0) });
        let next = link_step(target, &domains());
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].0, Label::pareq(NodeId(1), ArbKind::Immediate));
        assert!(matches!(
            &next[0].1.mode,
            LinkMode::Emitting { after: AfterEmit::AckHold, .. }
        ));
    }

    #[test]
    fn hold_accepts_a_data_request_and_sends_immediately() {
        let s = LinkState { id: NodeId(1), n: 2, buffer: None, mode: LinkMode::SendAckHold };
        let succs = link_step(&s, &domains());
        let (_, target) = succs
            .iter()
            .find(|(l, _)| *l == Label::ldreq(NodeId(1), Dest::Node(NodeId(0)), Data(0)))
            .unwrap();
        assert!(matches!(
            &target.mode,
            LinkMode::Emitting { after: AfterEmit::AwaitAck, queue } if queue.len() == 6
        ));
    }

    /// Set semantics: no reachable state offers the same label twice with
    /// the same target, and LDRES is only ever accepted in the
    /// send-acknowledgement wait.
    #[test]
    fn reachable_states_have_set_successors_and_ldres_only_in_send_ack() {
        use std::collections::HashSet;
        let mut seen: HashSet<LinkState> = HashSet::new();
        let mut stack = vec![link_initial(NodeId(0), 2), link_initial(NodeId(1), 2)];
        while let Some(state) = stack.pop() {
            if !seen.insert(state.clone()) {
                continue;
            }
            let succs = link_step(&state, &domains());
            let mut pairs = HashSet::new();
            for (label, target) in &succs {
                assert!(
                    pairs.insert((label.clone(), target.clone())),
                    "duplicate successor from {state:?}"
                );
                if label.gate == Gate::Ldres {
                    assert_eq!(state.mode, LinkMode::SendAckWait);
                }
                stack.push(target.clone());
            }
        }
        assert!(seen.len() > 50, "expected a nontrivial reachable set");
    }
}
