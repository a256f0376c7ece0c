//! Wire-level and service-level data vocabulary: signals, packets, checksums,
//! arbitration values, acknowledgement codes, and the bus's Boolean tables.

use std::fmt;

use thiserror::Error;

/// Identifier of a node on the bus. The value must stay below the node count
/// of the configuration it is used with; configurations validate this at
/// construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u8);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Destination of a packet: a concrete node or the broadcast address.
///
/// Broadcast is a distinguished value rather than a reserved node id, so
/// `NodeId` invariants stay strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dest {
    Node(NodeId),
    Broadcast,
}

impl fmt::Display for Dest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dest::Node(id) => write!(f, "{id}"),
            Dest::Broadcast => write!(f, "BCAST"),
        }
    }
}

/// Checksum status. Corruption is a one-bit status, not a numeric CRC; the
/// bus injects the error value, receivers only test validity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Crc {
    Valid,
    Corrupted,
}

impl fmt::Display for Crc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Crc::Valid => write!(f, "VALID"),
            Crc::Corrupted => write!(f, "CORR"),
        }
    }
}

/// Opaque header payload. Domains are finite; index 0 is the default
/// singleton value `h0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Header(pub u8);

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}", self.0)
    }
}

/// Opaque data payload (`d0` by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Data(pub u8);

impl fmt::Display for Data {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Opaque acknowledgement code (`a0` by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AckCode(pub u8);

impl fmt::Display for AckCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Sizes of the opaque payload domains. All singletons by default, which is
/// the configuration used for exhaustive verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Domains {
    pub headers: u8,
    pub data: u8,
    pub acks: u8,
}

impl Default for Domains {
    fn default() -> Self {
        Domains { headers: 1, data: 1, acks: 1 }
    }
}

impl Domains {
    pub fn header_values(&self) -> impl Iterator<Item = Header> {
        (0..self.headers).map(Header)
    }

    pub fn data_values(&self) -> impl Iterator<Item = Data> {
        (0..self.data).map(Data)
    }

    pub fn ack_values(&self) -> impl Iterator<Item = AckCode> {
        (0..self.acks).map(AckCode)
    }
}

/// Everything a link layer can put on or read from the cable.
///
/// Only header, data and acknowledge signals carry a checksum; those are the
/// three kinds the bus may corrupt or lose. `Dummy` pads a packet to an
/// invalid length. Signal loss is not a value: the bus models it by skipping
/// the delivery rendezvous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Start,
    End,
    Prefix,
    SubActGap,
    Dummy,
    DestSig(Dest),
    HeaderSig(Header, Crc),
    DataSig(Data, Crc),
    AckSig(AckCode, Crc),
}

impl Signal {
    pub fn is_dest(&self) -> bool {
        matches!(self, Signal::DestSig(_))
    }

    pub fn is_header(&self) -> bool {
        matches!(self, Signal::HeaderSig(..))
    }

    pub fn is_data(&self) -> bool {
        matches!(self, Signal::DataSig(..))
    }

    pub fn is_ack(&self) -> bool {
        matches!(self, Signal::AckSig(..))
    }

    /// The checksum carried by the signal, for the three corruptible kinds.
    pub fn crc(&self) -> Option<Crc> {
        match self {
            Signal::HeaderSig(_, c) | Signal::DataSig(_, c) | Signal::AckSig(_, c) => Some(*c),
            _ => None,
        }
    }

    /// All signal values over the given node count and payload domains, in a
    /// fixed order.
    pub fn all(n: u8, domains: &Domains) -> Vec<Signal> {
        let mut out = vec![
            Signal::Start,
            Signal::End,
            Signal::Prefix,
            Signal::SubActGap,
            Signal::Dummy,
        ];
        for id in 0..n {
            out.push(Signal::DestSig(Dest::Node(NodeId(id))));
        }
        out.push(Signal::DestSig(Dest::Broadcast));
        for h in domains.header_values() {
            for crc in [Crc::Valid, Crc::Corrupted] {
                out.push(Signal::HeaderSig(h, crc));
            }
        }
        for d in domains.data_values() {
            for crc in [Crc::Valid, Crc::Corrupted] {
                out.push(Signal::DataSig(d, crc));
            }
        }
        for a in domains.ack_values() {
            for crc in [Crc::Valid, Crc::Corrupted] {
                out.push(Signal::AckSig(a, crc));
            }
        }
        out
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Start => write!(f, "START"),
            Signal::End => write!(f, "END"),
            Signal::Prefix => write!(f, "PREFIX"),
            Signal::SubActGap => write!(f, "SUBACTGAP"),
            Signal::Dummy => write!(f, "DUMMY"),
            Signal::DestSig(d) => write!(f, "DEST !{d}"),
            Signal::HeaderSig(h, c) => write!(f, "HEADER !{h} !{c}"),
            Signal::DataSig(d, c) => write!(f, "DATA !{d} !{c}"),
            Signal::AckSig(a, c) => write!(f, "ACK !{a} !{c}"),
        }
    }
}

/// Error raised by operations that are partial over the signal domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignalError {
    #[error("corrupt is undefined on signal {0:?}: it carries no checksum")]
    NotCorruptible(Signal),
}

/// Returns the same signal with its checksum set to `Corrupted`.
///
/// Defined only on header, data and acknowledge signals; other kinds carry no
/// checksum and yield an error, making the partiality explicit.
pub fn corrupt(s: Signal) -> Result<Signal, SignalError> {
    match s {
        Signal::HeaderSig(h, _) => Ok(Signal::HeaderSig(h, Crc::Corrupted)),
        Signal::DataSig(d, _) => Ok(Signal::DataSig(d, Crc::Corrupted)),
        Signal::AckSig(a, _) => Ok(Signal::AckSig(a, Crc::Corrupted)),
        other => Err(SignalError::NotCorruptible(other)),
    }
}

/// One asynchronous packet: four signals in wire order.
///
/// The first signal is a destination signal carrying the sender's id (a
/// source marker); the second is the destination proper, the third the
/// header, the fourth the data. The constructor enforces the shape, so every
/// `Packet` value is well-formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Packet {
    pub src: NodeId,
    pub dest: Dest,
    pub header: Header,
    pub header_crc: Crc,
    pub data: Data,
    pub data_crc: Crc,
}

impl Packet {
    /// Packet as freshly built by a link layer: both checksums valid.
    pub fn new(src: NodeId, dest: Dest, header: Header, data: Data) -> Packet {
        Packet {
            src,
            dest,
            header,
            header_crc: Crc::Valid,
            data,
            data_crc: Crc::Valid,
        }
    }

    /// The four signals in wire order.
    pub fn signals(&self) -> [Signal; 4] {
        [
            Signal::DestSig(Dest::Node(self.src)),
            Signal::DestSig(self.dest),
            Signal::HeaderSig(self.header, self.header_crc),
            Signal::DataSig(self.data, self.data_crc),
        ]
    }
}

/// Table of `n` Booleans indexed by node id, with functional update.
///
/// Used by the bus for the fairness interval, pending immediate requests and
/// the register of invalidated destinations. Out-of-range indices are
/// programming errors and panic; node ids are validated when configurations
/// are built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolTable(Vec<bool>);

impl BoolTable {
    pub fn new(n: u8, value: bool) -> BoolTable {
        BoolTable(vec![value; n as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: NodeId) -> bool {
        self.0[i.index()]
    }

    /// Functional update: returns a copy with entry `i` set to `value`.
    pub fn set(&self, i: NodeId, value: bool) -> BoolTable {
        let mut t = self.0.clone();
        t[i.index()] = value;
        BoolTable(t)
    }

    pub fn any(&self) -> bool {
        self.0.iter().any(|b| *b)
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// Node ids of the entries that are set, in ascending order.
    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| NodeId(i as u8))
    }
}

/// Kind of arbitration request a link layer can issue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArbKind {
    Fair,
    Immediate,
}

impl fmt::Display for ArbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArbKind::Fair => write!(f, "FAIR"),
            ArbKind::Immediate => write!(f, "IMMEDIATE"),
        }
    }
}

/// Outcome of an arbitration request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArbResult {
    Won,
    Lost,
}

impl fmt::Display for ArbResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArbResult::Won => write!(f, "WON"),
            ArbResult::Lost => write!(f, "LOST"),
        }
    }
}

/// Whether a data response keeps the bus for a concatenated response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HoldRelease {
    Hold,
    Release,
}

impl fmt::Display for HoldRelease {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HoldRelease::Hold => write!(f, "HOLD"),
            HoldRelease::Release => write!(f, "RELEASE"),
        }
    }
}

/// Confirmation a link layer reports back to its transaction layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkConfirmation {
    /// An acknowledge packet with a valid checksum was received.
    AckRec(AckCode),
    /// The acknowledgement is missing (gap, invalid or garbled ack packet).
    AckMiss,
    /// A broadcast packet was sent properly; broadcasts are not acknowledged.
    BroadSent,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_get_of_const_is_the_constant() {
        assert!(!BoolTable::new(2, false).get(NodeId(0)));
        assert!(BoolTable::new(3, true).get(NodeId(2)));
    }

    #[test]
    fn table_any_after_set() {
        let t = BoolTable::new(2, false);
        assert!(!t.any());
        assert!(t.set(NodeId(1), true).any());
    }

    #[test]
    fn table_set_updates_one_entry_and_frames_the_rest() {
        let t = BoolTable::new(2, false).set(NodeId(0), true);
        assert!(t.get(NodeId(0)));
        assert!(!t.get(NodeId(1)));
    }

    #[test]
    fn corrupt_sets_the_checksum_and_nothing_else() {
        assert_eq!(
            corrupt(Signal::AckSig(AckCode(0), Crc::Valid)),
            Ok(Signal::AckSig(AckCode(0), Crc::Corrupted))
        );
        assert_eq!(
            corrupt(Signal::HeaderSig(Header(0), Crc::Valid)),
            Ok(Signal::HeaderSig(Header(0), Crc::Corrupted))
        );
    }

    #[test]
    fn corrupt_is_idempotent() {
        let once = corrupt(Signal::DataSig(Data(0), Crc::Valid)).unwrap();
        assert_eq!(corrupt(once), Ok(once));
    }

    #[test]
    fn corrupt_rejects_signals_without_checksum() {
        assert!(corrupt(Signal::Start).is_err());
        assert!(corrupt(Signal::SubActGap).is_err());
        assert!(corrupt(Signal::DestSig(Dest::Broadcast)).is_err());
    }

    #[test]
    fn packet_signals_are_in_wire_order() {
        let p = Packet::new(NodeId(0), Dest::Node(NodeId(1)), Header(0), Data(0));
        assert_eq!(
            p.signals(),
            [
                Signal::DestSig(Dest::Node(NodeId(0))),
                Signal::DestSig(Dest::Node(NodeId(1))),
                Signal::HeaderSig(Header(0), Crc::Valid),
                Signal::DataSig(Data(0), Crc::Valid),
            ]
        );
    }

    #[test]
    fn broadcast_packet_has_broadcast_second_signal() {
        let p = Packet::new(NodeId(1), Dest::Broadcast, Header(0), Data(0));
        assert_eq!(p.signals()[1], Signal::DestSig(Dest::Broadcast));
        assert_eq!(p.signals().len(), 4);
    }

    #[test]
    fn recognizers_are_mutually_exclusive() {
        let domains = Domains::default();
        for s in Signal::all(2, &domains) {
            let flags = [s.is_dest(), s.is_header(), s.is_data(), s.is_ack()];
            assert!(flags.iter().filter(|b| **b).count() <= 1, "{s:?}");
        }
    }

    /// Brute-force enumeration of the signal alphabet for n = 2 with
    /// singleton payload domains: 5 plain signals, 3 destinations, and three
    /// checksummed kinds with 2 checksum values each.
    #[test]
    fn signal_alphabet_for_two_nodes_has_fourteen_values() {
        let all = Signal::all(2, &Domains::default());
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        assert_eq!(all.len(), 14);
    }

    #[test]
    fn corruptible_signals_differ_from_original_only_in_crc() {
        for s in Signal::all(3, &Domains::default()) {
            if let Ok(c) = corrupt(s) {
                assert_eq!(c.crc(), Some(Crc::Corrupted));
                match (s, c) {
                    (Signal::HeaderSig(a, _), Signal::HeaderSig(b, _)) => assert_eq!(a, b),
                    (Signal::DataSig(a, _), Signal::DataSig(b, _)) => assert_eq!(a, b),
                    (Signal::AckSig(a, _), Signal::AckSig(b, _)) => assert_eq!(a, b),
                    _ => panic!("corrupt changed the constructor"),
                }
            }
        }
    }
}
