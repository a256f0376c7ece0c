//! The scenario catalog and network construction.
//!
//! A node is the parallel composition of a link layer, a transaction layer
//! and an application, synchronized on their LD* / TD* gates; the main
//! network composes the nodes with one bus, synchronized on the PA* / PD* /
//! PC* gates.

use std::collections::HashSet;

use thiserror::Error;

use crate::appli::{AppliProcess, Scenario};
use crate::bus::FaultConfig;
use crate::compose::{Leaf, LeafKind, Network};
use crate::label::Gate;
use crate::signal::{Domains, NodeId};
use crate::trans::Variant;

/// The built-in catalog: 11 applications in ok and ko variants.
pub const CATALOG_TEXT: &str = include_str!("../data/catalog.txt");

/// One named verification configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub name: String,
    pub scenario: Scenario,
    pub n: u8,
    pub budget: u8,
    pub variant: Variant,
    pub faults: FaultConfig,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog line {line}: expected 6 fields `name scenario nodes budget variant faults`")]
    BadLine { line: usize },
    #[error("catalog line {line}: {message}")]
    BadField { line: usize, message: String },
    #[error("catalog line {line}: duplicate scenario name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

/// Parses a catalog file: one configuration per line, `#` comments.
pub fn parse_catalog(text: &str) -> Result<Vec<ScenarioConfig>, CatalogError> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(CatalogError::BadLine { line });
        }
        let bad = |message: String| CatalogError::BadField { line, message };
        let scenario: Scenario = fields[1].parse().map_err(bad)?;
        let n: u8 = fields[2]
            .parse()
            .map_err(|_| bad(format!("bad node count `{}`", fields[2])))?;
        if n < 2 {
            return Err(bad("node count must be at least 2".to_string()));
        }
        let budget: u8 = fields[3]
            .parse()
            .map_err(|_| bad(format!("bad budget `{}`", fields[3])))?;
        let variant: Variant = fields[4].parse().map_err(bad)?;
        let faults = match fields[5] {
            "on" => FaultConfig::all_on(),
            "off" => FaultConfig::all_off(),
            other => return Err(bad(format!("bad fault flag `{other}` (expected on or off)"))),
        };
        let name = fields[0].to_string();
        if !names.insert(name.clone()) {
            return Err(CatalogError::DuplicateName { line, name });
        }
        out.push(ScenarioConfig { name, scenario, n, budget, variant, faults });
    }
    Ok(out)
}

/// The built-in 22-entry catalog.
pub fn catalog() -> Vec<ScenarioConfig> {
    parse_catalog(CATALOG_TEXT).expect("built-in catalog must parse")
}

/// Looks a configuration up by name in the built-in catalog.
pub fn find_scenario(name: &str) -> Result<ScenarioConfig, CatalogError> {
    catalog()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| CatalogError::UnknownScenario(name.to_string()))
}

const LINK_TRANS_GATES: [Gate; 4] = [Gate::Ldreq, Gate::Ldcon, Gate::Ldind, Gate::Ldres];
const TRANS_APPLI_GATES: [Gate; 4] = [Gate::Tdreq, Gate::Tdind, Gate::Tdres, Gate::Tdcon];
const LINK_BUS_GATES: [Gate; 5] = [Gate::Pareq, Gate::Pacon, Gate::Pdreq, Gate::Pdind, Gate::Pcind];

/// The three leaves of one node: link, transaction layer, application.
pub fn make_node(id: NodeId, config: &ScenarioConfig) -> Vec<Leaf> {
    let mut link_sync = HashSet::new();
    for gate in LINK_TRANS_GATES.iter().chain(LINK_BUS_GATES.iter()) {
        link_sync.insert((*gate, id));
    }
    let mut trans_sync = HashSet::new();
    for gate in LINK_TRANS_GATES.iter().chain(TRANS_APPLI_GATES.iter()) {
        trans_sync.insert((*gate, id));
    }
    let mut appli_sync = HashSet::new();
    for gate in TRANS_APPLI_GATES {
        appli_sync.insert((gate, id));
    }
    vec![
        Leaf {
            name: format!("link{}", id.0),
            kind: LeafKind::Link { id, n: config.n },
            sync: link_sync,
        },
        Leaf {
            name: format!("trans{}", id.0),
            kind: LeafKind::Trans { id, n: config.n, variant: config.variant },
            sync: trans_sync,
        },
        Leaf {
            name: format!("appli{}", id.0),
            kind: LeafKind::Appli(AppliProcess {
                id,
                n: config.n,
                scenario: config.scenario,
                budget: config.budget,
            }),
            sync: appli_sync,
        },
    ]
}

/// The full network: all nodes plus the bus. With `hide_upper` the LD* and
/// TD* gates are relabelled to the internal action in the composed system.
pub fn make_main(config: &ScenarioConfig, hide_upper: bool) -> Network {
    let mut leaves = Vec::new();
    for id in 0..config.n {
        leaves.extend(make_node(NodeId(id), config));
    }
    let mut bus_sync = HashSet::new();
    for gate in LINK_BUS_GATES {
        for id in 0..config.n {
            bus_sync.insert((gate, NodeId(id)));
        }
    }
    leaves.push(Leaf {
        name: "bus".to_string(),
        kind: LeafKind::Bus { n: config.n, faults: config.faults },
        sync: bus_sync,
    });
    let hide: HashSet<Gate> = if hide_upper {
        LINK_TRANS_GATES.iter().chain(TRANS_APPLI_GATES.iter()).copied().collect()
    } else {
        HashSet::new()
    };
    Network::new(leaves, hide, Domains::default())
}
