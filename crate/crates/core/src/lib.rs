//! Executable model of the IEEE 1394 asynchronous link-layer protocol with
//! an explicit-state verification engine.
//!
//! The model side provides the link layer, the bus (the physical layers and
//! the cable, with fault injection), the transaction layer in its original
//! (`ko`) and repaired (`ok`) variants, scenario-driven applications, and
//! their multiway-rendezvous composition. The verification side provides
//! exhaustive exploration with deadlock detection and counterexample
//! traces, an action-based temporal-logic checker, strong-bisimulation
//! minimization and comparison, and Aldébaran (.aut) file interchange.

pub mod appli;
pub mod aut;
pub mod bus;
pub mod catalog;
pub mod compose;
pub mod label;
pub mod link;
pub mod lts;
pub mod signal;
pub mod trans;

pub use aut::{aut_read, aut_write};
pub use compose::{global_step, GlobalState, Network};
pub use label::{render_label, Gate, Label};
pub use lts::Lts;
