//! Online engines. Each serves one request at a time and logs what it paid
//! ("actual") and what it charges towards the framework budget ("charged";
//! the amortized cost for facility location).

pub mod berman_coulston;
pub mod fotakis;
pub mod greedy_tree;

pub use berman_coulston::BermanCoulston;
pub use fotakis::Fotakis;
pub use greedy_tree::GreedyTree;

use crate::error::{input, Result};
use crate::graph::{EdgeId, VertexId};
use crate::request::{Demand, DemandKind};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ServeRecord<T> {
    pub actual: T,
    pub charged: T,
    /// Edges bought for this request (not previously owned by the engine).
    pub bought_edges: Vec<EdgeId>,
    pub opened_facilities: Vec<VertexId>,
    /// Facility the client was connected to, for facility location.
    pub connected_to: Option<VertexId>,
    /// Connection part of `actual`, for facility location.
    pub connection_cost: T,
}

impl<T: Scalar> ServeRecord<T> {
    pub(crate) fn free() -> Self {
        ServeRecord {
            actual: T::zero(),
            charged: T::zero(),
            bought_edges: Vec::new(),
            opened_facilities: Vec::new(),
            connected_to: None,
            connection_cost: T::zero(),
        }
    }
}

pub trait OnlineEngine<T: Scalar> {
    fn demand_kind(&self) -> DemandKind;

    /// Serves `demand` and returns its log entry.
    fn serve(&mut self, demand: &Demand) -> Result<ServeRecord<T>>;

    /// One entry per served request, in order.
    fn log(&self) -> &[ServeRecord<T>];

    /// Every edge bought so far.
    fn edges(&self) -> Vec<EdgeId> {
        self.log().iter().flat_map(|r| r.bought_edges.iter().copied()).collect()
    }

    /// Every facility opened so far.
    fn facilities(&self) -> Vec<VertexId> {
        self.log().iter().flat_map(|r| r.opened_facilities.iter().copied()).collect()
    }

    fn total_charged(&self) -> T {
        self.log().iter().fold(T::zero(), |acc, r| acc + r.charged.clone())
    }

    fn total_actual(&self) -> T {
        self.log().iter().fold(T::zero(), |acc, r| acc + r.actual.clone())
    }
}

impl<T: Scalar, E: OnlineEngine<T> + ?Sized> OnlineEngine<T> for Box<E> {
    fn demand_kind(&self) -> DemandKind {
        (**self).demand_kind()
    }

    fn serve(&mut self, demand: &Demand) -> Result<ServeRecord<T>> {
        (**self).serve(demand)
    }

    fn log(&self) -> &[ServeRecord<T>] {
        (**self).log()
    }
}

/// Sum of charged costs over the given request positions.
pub fn engine_total_charged<T: Scalar>(engine: &dyn OnlineEngine<T>, subset: &[usize]) -> Result<T> {
    let log = engine.log();
    let mut total = T::zero();
    for &i in subset {
        match log.get(i) {
            Some(r) => total = total + r.charged.clone(),
            None => return input(format!("request {i} has not been served ({} served)", log.len())),
        }
    }
    Ok(total)
}

pub(crate) fn wrong_kind<T>(engine: &str, d: &Demand) -> Result<T> {
    input(format!("{engine} cannot serve {d}"))
}
