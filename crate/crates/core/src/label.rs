//! Gate vocabulary and transition labels.
//!
//! A label is a gate plus a list of value offers, rendered eagerly to text;
//! label equality is text equality. The canonical rendering is
//! `GATE !offer1 !offer2 ...` with an uppercase gate and single spaces. The
//! internal action renders as `i` and carries no offers. Offers that are
//! structured values (signals) render with their own `!`-separated fields,
//! e.g. `PDIND !0 !HEADER !h0 !VALID`.

use std::fmt;

use crate::signal::{
    AckCode, ArbKind, ArbResult, Data, Dest, HoldRelease, LinkConfirmation, NodeId, Signal,
};

/// The finite gate vocabulary, plus the internal action and the
/// distinguished termination self-loop label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    /// Internal action, rendered `i`.
    Tau,
    /// Self-loop marking intended completion of an application.
    Terminated,
    /// Link data request: transaction layer asks the link to send a packet.
    Ldreq,
    /// Link data confirmation: ackrec / ackmiss / broadsent.
    Ldcon,
    /// Link data indication: an incoming packet is forwarded upward.
    Ldind,
    /// Link data response: acknowledgement code plus hold or release.
    Ldres,
    /// Phy arbitration request (fair or immediate).
    Pareq,
    /// Phy arbitration confirmation (won or lost).
    Pacon,
    /// Phy data request: the link puts a signal on the cable.
    Pdreq,
    /// Phy data indication: a signal from the cable reaches the link.
    Pdind,
    /// Phy clock indication: the link must emit the next signal.
    Pcind,
    /// Transaction data request from the application.
    Tdreq,
    /// Transaction data indication to the application.
    Tdind,
    /// Transaction data response from the application.
    Tdres,
    /// Transaction data confirmation to the application.
    Tdcon,
}

impl Gate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gate::Tau => "i",
            Gate::Terminated => "TERMINATED",
            Gate::Ldreq => "LDREQ",
            Gate::Ldcon => "LDCON",
            Gate::Ldind => "LDIND",
            Gate::Ldres => "LDRES",
            Gate::Pareq => "PAREQ",
            Gate::Pacon => "PACON",
            Gate::Pdreq => "PDREQ",
            Gate::Pdind => "PDIND",
            Gate::Pcind => "PCIND",
            Gate::Tdreq => "TDREQ",
            Gate::Tdind => "TDIND",
            Gate::Tdres => "TDRES",
            Gate::Tdcon => "TDCON",
        }
    }

    /// Gates between a link layer and its transaction layer.
    pub fn is_link_trans(&self) -> bool {
        matches!(self, Gate::Ldreq | Gate::Ldcon | Gate::Ldind | Gate::Ldres)
    }

    /// Gates between a transaction layer and its application.
    pub fn is_trans_appli(&self) -> bool {
        matches!(self, Gate::Tdreq | Gate::Tdind | Gate::Tdres | Gate::Tdcon)
    }

    /// Gates between a link layer and the bus.
    pub fn is_link_bus(&self) -> bool {
        matches!(
            self,
            Gate::Pareq | Gate::Pacon | Gate::Pdreq | Gate::Pdind | Gate::Pcind
        )
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A transition label: gate name plus rendered value offers.
///
/// The node id, when the gate carries one, is always the first offer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub gate: Gate,
    pub offers: Vec<String>,
}

impl Label {
    pub fn tau() -> Label {
        Label { gate: Gate::Tau, offers: Vec::new() }
    }

    pub fn terminated() -> Label {
        Label { gate: Gate::Terminated, offers: Vec::new() }
    }

    pub fn is_tau(&self) -> bool {
        self.gate == Gate::Tau
    }

    pub fn is_terminated(&self) -> bool {
        self.gate == Gate::Terminated
    }

    /// The node the label belongs to: the first offer, when it is a node id.
    pub fn node(&self) -> Option<NodeId> {
        self.offers.first()?.parse::<u8>().ok().map(NodeId)
    }

    pub fn ldreq(node: NodeId, dest: Dest, data: Data) -> Label {
        Label {
            gate: Gate::Ldreq,
            offers: vec![node.to_string(), dest.to_string(), data.to_string()],
        }
    }

    pub fn ldcon(node: NodeId, conf: LinkConfirmation) -> Label {
        Label { gate: Gate::Ldcon, offers: confirmation_offers(node, conf) }
    }

    pub fn ldind(node: NodeId, kind: IndicationKind, src: NodeId, data: Data) -> Label {
        Label {
            gate: Gate::Ldind,
            offers: vec![node.to_string(), kind.to_string(), src.to_string(), data.to_string()],
        }
    }

    pub fn ldres(node: NodeId, ack: AckCode, hr: HoldRelease) -> Label {
        Label {
            gate: Gate::Ldres,
            offers: vec![node.to_string(), ack.to_string(), hr.to_string()],
        }
    }

    pub fn pareq(node: NodeId, kind: ArbKind) -> Label {
        Label { gate: Gate::Pareq, offers: vec![node.to_string(), kind.to_string()] }
    }

    pub fn pacon(node: NodeId, result: ArbResult) -> Label {
        Label { gate: Gate::Pacon, offers: vec![node.to_string(), result.to_string()] }
    }

    pub fn pdreq(node: NodeId, signal: Signal) -> Label {
        Label { gate: Gate::Pdreq, offers: vec![node.to_string(), signal.to_string()] }
    }

    pub fn pdind(node: NodeId, signal: Signal) -> Label {
        Label { gate: Gate::Pdind, offers: vec![node.to_string(), signal.to_string()] }
    }

    pub fn pcind(node: NodeId) -> Label {
        Label { gate: Gate::Pcind, offers: vec![node.to_string()] }
    }

    pub fn tdreq(node: NodeId, dest: Dest, data: Data) -> Label {
        Label {
            gate: Gate::Tdreq,
            offers: vec![node.to_string(), dest.to_string(), data.to_string()],
        }
    }

    pub fn tdcon(node: NodeId, conf: LinkConfirmation) -> Label {
        Label { gate: Gate::Tdcon, offers: confirmation_offers(node, conf) }
    }

    pub fn tdind(node: NodeId, kind: IndicationKind, src: NodeId, data: Data) -> Label {
        Label {
            gate: Gate::Tdind,
            offers: vec![node.to_string(), kind.to_string(), src.to_string(), data.to_string()],
        }
    }

    pub fn tdres(node: NodeId, ack: AckCode, hr: HoldRelease) -> Label {
        Label {
            gate: Gate::Tdres,
            offers: vec![node.to_string(), ack.to_string(), hr.to_string()],
        }
    }
}

fn confirmation_offers(node: NodeId, conf: LinkConfirmation) -> Vec<String> {
    match conf {
        LinkConfirmation::AckRec(a) => {
            vec![node.to_string(), "ACKREC".to_string(), a.to_string()]
        }
        LinkConfirmation::AckMiss => vec![node.to_string(), "ACKMISS".to_string()],
        LinkConfirmation::BroadSent => vec![node.to_string(), "BROADSENT".to_string()],
    }
}

/// Whether an incoming packet was addressed to this node or broadcast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndicationKind {
    Addressed,
    Broadcast,
}

impl fmt::Display for IndicationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndicationKind::Addressed => write!(f, "ADDR"),
            IndicationKind::Broadcast => write!(f, "BCAST"),
        }
    }
}

/// Canonical text of a label: `GATE !offer1 !offer2 ...`, `i` for the
/// internal action. Injective on the label vocabulary: offer arities are
/// fixed per gate.
pub fn render_label(l: &Label) -> String {
    let mut out = String::from(l.gate.as_str());
    for offer in &l.offers {
        out.push_str(" !");
        out.push_str(offer);
    }
    out
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_label(self))
    }
}
