//! The transaction layer: two sub-processes, one for outgoing requests and
//! one for incoming indications, interleaved inside a single process.
//!
//! The `ko` variant reproduces the original behaviour: the responder offers
//! a data response after *every* indication, including broadcasts, which the
//! link never accepts. The `ok` variant removes that link-synchronized
//! transition: broadcast indications are passed upward and the responder
//! returns to idle.

use crate::label::{IndicationKind, Label};
use crate::signal::{AckCode, Data, Dest, Domains, HoldRelease, LinkConfirmation, NodeId};

/// Deadlock-free (`ok`) or original (`ko`) behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Ok,
    Ko,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Ok => "ok",
            Variant::Ko => "ko",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(Variant::Ok),
            "ko" => Ok(Variant::Ko),
            other => Err(format!("unknown variant `{other}` (expected ok or ko)")),
        }
    }
}

/// Requester pipeline: request in, link request out, confirmation back up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReqPhase {
    Idle,
    /// A request was accepted from the application.
    Have { dest: Dest, data: Data },
    /// Passed to the link; waiting for the confirmation.
    Wait,
    /// Confirmation received; owed to the application.
    Got { conf: LinkConfirmation },
}

/// Responder pipeline: indication in, response back down (addressed only in
/// the `ok` variant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RespPhase {
    Idle,
    /// An indication was accepted from the link.
    Have { kind: IndicationKind, src: NodeId, data: Data },
    /// Passed to the application; waiting for its response.
    Await,
    /// Response in hand; owed to the link.
    Got { ack: AckCode, hr: HoldRelease },
}

/// State of one transaction layer: the two sub-processes run in parallel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransState {
    pub id: NodeId,
    pub variant: Variant,
    pub req: ReqPhase,
    pub resp: RespPhase,
}

pub fn trans_initial(id: NodeId, variant: Variant) -> TransState {
    TransState { id, variant, req: ReqPhase::Idle, resp: RespPhase::Idle }
}

/// Complete successor set: the union of requester and responder moves.
pub fn trans_step(s: &TransState, n: u8, domains: &Domains) -> Vec<(Label, TransState)> {
    let id = s.id;
    let mut out = Vec::new();
    let with_req = |req: ReqPhase| TransState { req, ..s.clone() };
    let with_resp = |resp: RespPhase| TransState { resp: resp.clone(), ..s.clone() };

    match &s.req {
        ReqPhase::Idle => {
            for dest in (0..n).map(|j| Dest::Node(NodeId(j))).chain([Dest::Broadcast]) {
                for data in domains.data_values() {
                    out.push((
                        Label::tdreq(id, dest, data),
                        with_req(ReqPhase::Have { dest, data }),
                    ));
                }
            }
        }
        ReqPhase::Have { dest, data } => {
            out.push((Label::ldreq(id, *dest, *data), with_req(ReqPhase::Wait)));
        }
        ReqPhase::Wait => {
            for conf in confirmations(domains) {
                out.push((Label::ldcon(id, conf), with_req(ReqPhase::Got { conf })));
            }
        }
        ReqPhase::Got { conf } => {
            out.push((Label::tdcon(id, *conf), with_req(ReqPhase::Idle)));
        }
    }

    match &s.resp {
        RespPhase::Idle => {
            for kind in [IndicationKind::Addressed, IndicationKind::Broadcast] {
                for src in (0..n).map(NodeId).filter(|src| *src != id) {
                    for data in domains.data_values() {
                        out.push((
                            Label::ldind(id, kind, src, data),
                            with_resp(RespPhase::Have { kind, src, data }),
                        ));
                    }
                }
            }
        }
        RespPhase::Have { kind, src, data } => {
            let next = match (kind, s.variant) {
                (IndicationKind::Addressed, _) => RespPhase::Await,
                // The original behaviour responds even to broadcasts; the
                // link never accepts that response.
                (IndicationKind::Broadcast, Variant::Ko) => {
                    RespPhase::Got { ack: AckCode(0), hr: HoldRelease::Release }
                }
                (IndicationKind::Broadcast, Variant::Ok) => RespPhase::Idle,
            };
            out.push((Label::tdind(id, *kind, *src, *data), with_resp(next)));
        }
        RespPhase::Await => {
            for ack in domains.ack_values() {
                for hr in [HoldRelease::Release, HoldRelease::Hold] {
                    out.push((Label::tdres(id, ack, hr), with_resp(RespPhase::Got { ack, hr })));
                }
            }
        }
        RespPhase::Got { ack, hr } => {
            out.push((Label::ldres(id, *ack, *hr), with_resp(RespPhase::Idle)));
        }
    }

    out
}

fn confirmations(domains: &Domains) -> Vec<LinkConfirmation> {
    let mut out: Vec<LinkConfirmation> =
        domains.ack_values().map(LinkConfirmation::AckRec).collect();
    out.push(LinkConfirmation::AckMiss);
    out.push(LinkConfirmation::BroadSent);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::Gate;

    fn domains() -> Domains {
        Domains::default()
    }

    #[test]
    fn request_pipeline_offers_ldreq_after_tdreq() {
        let s = trans_initial(NodeId(0), Variant::Ok);
        let succs = trans_step(&s, 2, &domains());
        let (_, t) = succs
            .iter()
            .find(|(l, _)| *l == Label::tdreq(NodeId(0), Dest::Node(NodeId(1)), Data(0)))
            .unwrap();
        let next = trans_step(t, 2, &domains());
        assert!(next
            .iter()
            .any(|(l, _)| *l == Label::ldreq(NodeId(0), Dest::Node(NodeId(1)), Data(0))));
    }

    fn after_broadcast_tdind(variant: Variant) -> TransState {
        let s = TransState {
            id: NodeId(1),
            variant,
            req: ReqPhase::Idle,
            resp: RespPhase::Have {
                kind: IndicationKind::Broadcast,
                src: NodeId(0),
                data: Data(0),
            },
        };
        let succs = trans_step(&s, 2, &domains());
        let (_, t) = succs
            .iter()
            .find(|(l, _)| l.gate == Gate::Tdind)
            .expect("broadcast indication must be passed upward");
        t.clone()
    }

    #[test]
    fn ok_responder_returns_to_idle_after_broadcast() {
        let t = after_broadcast_tdind(Variant::Ok);
        assert_eq!(t.resp, RespPhase::Idle);
        let next = trans_step(&t, 2, &domains());
        assert!(next.iter().all(|(l, _)| l.gate != Gate::Ldres));
    }

    #[test]
    fn ko_responder_offers_the_fatal_ldres_after_broadcast() {
        let t = after_broadcast_tdind(Variant::Ko);
        assert!(matches!(t.resp, RespPhase::Got { .. }));
        let next = trans_step(&t, 2, &domains());
        assert!(next
            .iter()
            .any(|(l, _)| *l == Label::ldres(NodeId(1), AckCode(0), HoldRelease::Release)));
    }

    #[test]
    fn addressed_indication_awaits_the_application_in_both_variants() {
        for variant in [Variant::Ok, Variant::Ko] {
            let s = TransState {
                id: NodeId(1),
                variant,
                req: ReqPhase::Idle,
                resp: RespPhase::Have {
                    kind: IndicationKind::Addressed,
                    src: NodeId(0),
                    data: Data(0),
                },
            };
            let succs = trans_step(&s, 2, &domains());
            assert_eq!(succs.iter().filter(|(l, _)| l.gate == Gate::Tdind).count(), 1);
            let (_, t) = succs.iter().find(|(l, _)| l.gate == Gate::Tdind).unwrap();
            assert_eq!(t.resp, RespPhase::Await);
        }
    }
}
