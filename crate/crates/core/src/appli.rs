//! Application processes: the scenario-specific drivers sitting on top of
//! the transaction layer.
//!
//! Three scenario templates are provided:
//!
//! * `S1` — node 0 sends its budget of addressed requests to node 1; the
//!   other nodes only respond (release).
//! * `S2` — every node concurrently sends addressed requests to the next
//!   node modulo n, and responds (release) to incoming requests.
//! * `S3` — node 0 first broadcasts, then sends addressed requests to
//!   node 1; node 1 answers with concatenated responses (hold) while its
//!   response budget lasts.
//!
//! A node's application terminates (offering the TERMINATED self-loop) once
//! its own requests are all sent and confirmed; pure responders stay
//! receptive forever and never terminate.

use crate::label::{IndicationKind, Label};
use crate::signal::{AckCode, Data, Dest, Domains, HoldRelease, LinkConfirmation, NodeId};

/// Scenario template identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    S1,
    S2,
    S3,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::S1 => "S1",
            Scenario::S2 => "S2",
            Scenario::S3 => "S3",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S1" | "s1" => Ok(Scenario::S1),
            "S2" | "s2" => Ok(Scenario::S2),
            "S3" | "s3" => Ok(Scenario::S3),
            other => Err(format!("unknown scenario `{other}` (expected S1, S2 or S3)")),
        }
    }
}

/// Static description of one node's application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppliProcess {
    pub id: NodeId,
    pub n: u8,
    pub scenario: Scenario,
    /// Maximal number of requests this node may send.
    pub budget: u8,
}

impl AppliProcess {
    /// Whether this node actively sends its own requests.
    fn is_requester(&self) -> bool {
        match self.scenario {
            Scenario::S1 | Scenario::S3 => self.id.0 == 0,
            Scenario::S2 => true,
        }
    }

    /// Whether this node accepts indications at all.
    fn is_responder(&self) -> bool {
        match self.scenario {
            // In S1 nothing is ever addressed or broadcast to node 0.
            Scenario::S1 => self.id.0 != 0,
            Scenario::S2 => true,
            Scenario::S3 => true,
        }
    }

    /// How many concatenated (hold) responses this node may send.
    fn hold_budget(&self) -> u8 {
        if self.scenario == Scenario::S3 && self.id.0 == 1 {
            self.budget
        } else {
            0
        }
    }

    /// Destination of the k-th request of a requester node.
    fn target(&self, k: u8) -> Dest {
        match self.scenario {
            Scenario::S1 => Dest::Node(NodeId(1)),
            Scenario::S2 => Dest::Node(NodeId((self.id.0 + 1) % self.n)),
            Scenario::S3 => {
                if k == 0 {
                    Dest::Broadcast
                } else {
                    Dest::Node(NodeId(1))
                }
            }
        }
    }
}

/// Requester half of an application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppliReq {
    /// This node sends no requests of its own.
    Absent,
    /// `sent` requests issued so far; `awaiting` while a confirmation is due.
    Active { sent: u8, awaiting: bool },
    /// All requests sent and confirmed.
    Done,
}

/// Responder half of an application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppliResp {
    /// This node never receives indications.
    Absent,
    /// Ready for the next indication.
    Receptive,
    /// An addressed indication arrived; a response is owed.
    NeedRes { src: NodeId },
    /// Responded with hold; the concatenated response request is owed.
    NeedHoldReq { src: NodeId },
    /// Waiting for the confirmation of a concatenated response.
    AwaitHoldCon,
}

/// State of one application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AppliState {
    pub id: NodeId,
    pub req: AppliReq,
    pub resp: AppliResp,
    /// Remaining concatenated responses (hold path).
    pub resp_budget: u8,
}

pub fn appli_initial(p: &AppliProcess) -> AppliState {
    let req = if p.is_requester() {
        if p.budget == 0 {
            AppliReq::Done
        } else {
            AppliReq::Active { sent: 0, awaiting: false }
        }
    } else {
        AppliReq::Absent
    };
    let resp = if p.is_responder() { AppliResp::Receptive } else { AppliResp::Absent };
    AppliState { id: p.id, req, resp, resp_budget: p.hold_budget() }
}

/// Complete successor set: the union of requester and responder moves.
pub fn appli_step(p: &AppliProcess, s: &AppliState, domains: &Domains) -> Vec<(Label, AppliState)> {
    let id = s.id;
    let mut out = Vec::new();

    match s.req {
        AppliReq::Absent => {}
        AppliReq::Active { sent, awaiting: false } => {
            out.push((
                Label::tdreq(id, p.target(sent), Data(0)),
                AppliState { req: AppliReq::Active { sent: sent + 1, awaiting: true }, ..*s },
            ));
        }
        AppliReq::Active { sent, awaiting: true } => {
            let next = if sent >= p.budget {
                AppliReq::Done
            } else {
                AppliReq::Active { sent, awaiting: false }
            };
            for conf in confirmations(domains) {
                out.push((Label::tdcon(id, conf), AppliState { req: next, ..*s }));
            }
        }
        AppliReq::Done => {
            out.push((Label::terminated(), *s));
        }
    }

    match s.resp {
        AppliResp::Absent => {}
        AppliResp::Receptive => {
            for src in (0..p.n).map(NodeId).filter(|src| *src != id) {
                for data in domains.data_values() {
                    out.push((
                        Label::tdind(id, IndicationKind::Broadcast, src, data),
                        *s,
                    ));
                    out.push((
                        Label::tdind(id, IndicationKind::Addressed, src, data),
                        AppliState { resp: AppliResp::NeedRes { src }, ..*s },
                    ));
                }
            }
        }
        AppliResp::NeedRes { src } => {
            if s.resp_budget > 0 {
                out.push((
                    Label::tdres(id, AckCode(0), HoldRelease::Hold),
                    AppliState {
                        resp: AppliResp::NeedHoldReq { src },
                        resp_budget: s.resp_budget - 1,
                        ..*s
                    },
                ));
            } else {
                out.push((
                    Label::tdres(id, AckCode(0), HoldRelease::Release),
                    AppliState { resp: AppliResp::Receptive, ..*s },
                ));
            }
        }
        AppliResp::NeedHoldReq { src } => {
            out.push((
                Label::tdreq(id, Dest::Node(src), Data(0)),
                AppliState { resp: AppliResp::AwaitHoldCon, ..*s },
            ));
        }
        AppliResp::AwaitHoldCon => {
            for conf in confirmations(domains) {
                out.push((
                    Label::tdcon(id, conf),
                    AppliState { resp: AppliResp::Receptive, ..*s },
                ));
            }
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
