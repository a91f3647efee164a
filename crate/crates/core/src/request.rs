//! Requests, predictions and problem kinds.

use crate::error::{input, Result};
use crate::graph::{Priority, VertexId, WeightedGraph};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// What a single request asks for.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Demand {
    Terminal(VertexId),
    TerminalPair { s: VertexId, t: VertexId, priority: Priority },
    Client(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DemandKind {
    Terminal,
    TerminalPair,
    Client,
}

impl Demand {
    pub fn kind(&self) -> DemandKind {
        match self {
            Demand::Terminal(_) => DemandKind::Terminal,
            Demand::TerminalPair { .. } => DemandKind::TerminalPair,
            Demand::Client(_) => DemandKind::Client,
        }
    }

    pub fn pair(s: VertexId, t: VertexId) -> Self {
        Demand::TerminalPair { s, t, priority: 1 }
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        match *self {
            Demand::Terminal(v) | Demand::Client(v) => vec![v],
            Demand::TerminalPair { s, t, .. } => vec![s, t],
        }
    }

    pub fn priority(&self) -> Priority {
        match *self {
            Demand::TerminalPair { priority, .. } => priority,
            _ => 1,
        }
    }

    pub fn validate<T: Scalar>(&self, graph: &WeightedGraph<T>) -> Result<()> {
        for v in self.vertices() {
            graph.check_vertex(v)?;
        }
        if let Demand::TerminalPair { priority, .. } = self {
            if *priority == 0 {
                return input("request priority 0; priorities start at 1");
            }
        }
        Ok(())
    }
}

impl fmt::Display for Demand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Demand::Terminal(v) => write!(f, "terminal {v}"),
            Demand::Client(v) => write!(f, "client {v}"),
            Demand::TerminalPair { s, t, priority: 1 } => write!(f, "pair {s}-{t}"),
            Demand::TerminalPair { s, t, priority } => write!(f, "pair {s}-{t} @{priority}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Request {
    pub arrival_index: usize,
    #[serde(flatten)]
    pub demand: Demand,
}

/// Numbers demands in arrival order.
pub fn sequence(demands: impl IntoIterator<Item = Demand>) -> Vec<Request> {
    demands
        .into_iter()
        .enumerate()
        .map(|(arrival_index, demand)| Request { arrival_index, demand })
        .collect()
}

/// Predicted demands; a multiset, order irrelevant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PredictionSet {
    pub items: Vec<Demand>,
}

impl PredictionSet {
    pub fn new(items: Vec<Demand>) -> Self {
        PredictionSet { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn from_requests(requests: &[Request]) -> Self {
        PredictionSet { items: requests.iter().map(|r| r.demand.clone()).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    SteinerTree,
    SteinerForest,
    FacilityLocation,
    CapacitatedFacilityLocation,
    PrioritySteinerForest,
}

impl ProblemKind {
    pub fn demand_kind(self) -> DemandKind {
        match self {
            ProblemKind::SteinerTree => DemandKind::Terminal,
            ProblemKind::SteinerForest | ProblemKind::PrioritySteinerForest => DemandKind::TerminalPair,
            ProblemKind::FacilityLocation | ProblemKind::CapacitatedFacilityLocation => DemandKind::Client,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::SteinerTree => "steiner-tree",
            ProblemKind::SteinerForest => "steiner-forest",
            ProblemKind::FacilityLocation => "facility-location",
            ProblemKind::CapacitatedFacilityLocation => "capacitated-facility-location",
            ProblemKind::PrioritySteinerForest => "priority-steiner-forest",
        }
    }

    pub fn all() -> [ProblemKind; 5] {
        [
            ProblemKind::SteinerTree,
            ProblemKind::SteinerForest,
            ProblemKind::FacilityLocation,
            ProblemKind::CapacitatedFacilityLocation,
            ProblemKind::PrioritySteinerForest,
        ]
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "st" | "steiner-tree" => Ok(ProblemKind::SteinerTree),
            "sf" | "steiner-forest" => Ok(ProblemKind::SteinerForest),
            "fl" | "facility-location" => Ok(ProblemKind::FacilityLocation),
            "cfl" | "capacitated-facility-location" => Ok(ProblemKind::CapacitatedFacilityLocation),
            "psf" | "priority-steiner-forest" => Ok(ProblemKind::PrioritySteinerForest),
            _ => Err(format!("unknown problem '{s}' (expected st, sf, fl, cfl or psf)")),
        }
    }
}

/// Errors unless every demand has kind `kind` and refers to valid vertices.
pub fn check_demands<'a, T: Scalar>(
    graph: &WeightedGraph<T>,
    kind: DemandKind,
    demands: impl IntoIterator<Item = &'a Demand>,
) -> Result<()> {
    for d in demands {
        if d.kind() != kind {
            return input(format!("{d} does not match the problem's demand kind {kind:?}"));
        }
        d.validate(graph)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = Request { arrival_index: 2, demand: Demand::Terminal(5) };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"arrival_index":2,"terminal":5}"#);
        let back: Request = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let p = PredictionSet::new(vec![Demand::pair(1, 2), Demand::Client(0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"terminal_pair":{"s":1,"t":2,"priority":1}},{"client":0}]"#);
    }

    #[test]
    fn problem_names_parse() {
        for p in ProblemKind::all() {
            assert_eq!(p.name().parse::<ProblemKind>().unwrap(), p);
        }
        assert!("nope".parse::<ProblemKind>().is_err());
    }
}
