//! Deterministic lower-bound instances. Adaptive adversaries see the
//! algorithm's solution after every request.

pub mod diamond;
pub mod fotakis_lb;
pub mod matching_lb;
pub mod nk_delta;

pub use diamond::{diamond_adversary, DiamondAdversary, DiamondInstance, DiamondRun};
pub use fotakis_lb::{fotakis_lb_run, fotakis_lb_tree, FotakisLbAdversary, FotakisLbRun, FotakisTree};
pub use matching_lb::{matching_lb_run, GreedyMatcher, MatchingLbRun, OnlineMatcher};
pub use nk_delta::{nk_delta_adversary, NkDeltaInstance, NkVariant};

use crate::engines::{BermanCoulston, Fotakis, GreedyTree, OnlineEngine};
use crate::error::Result;
use crate::framework::Framework;
use crate::graph::{EdgeId, VertexId};
use crate::request::{sequence, Demand, Request};
use crate::scalar::Scalar;
use std::collections::VecDeque;

/// Anything that serves requests one at a time and exposes its solution.
pub trait Player<T: Scalar> {
    fn serve(&mut self, demand: &Demand) -> Result<()>;
    /// Total cost paid so far.
    fn cost(&self) -> T;
    fn edges(&self) -> Vec<EdgeId>;
    fn facilities(&self) -> Vec<VertexId>;
}

macro_rules! engine_player {
    ($($ty:ty),*) => {$(
        impl<'g, T: Scalar> Player<T> for $ty {
            fn serve(&mut self, demand: &Demand) -> Result<()> {
                OnlineEngine::serve(self, demand).map(|_| ())
            }

            fn cost(&self) -> T {
                self.total_actual()
            }

            fn edges(&self) -> Vec<EdgeId> {
                OnlineEngine::edges(self)
            }

            fn facilities(&self) -> Vec<VertexId> {
                OnlineEngine::facilities(self)
            }
        }
    )*};
}

engine_player!(GreedyTree<'g, T>, BermanCoulston<'g, T>, Fotakis<'g, T>, Box<dyn OnlineEngine<T> + 'g>);

impl<T: Scalar> Player<T> for Framework<'_, T> {
    fn serve(&mut self, demand: &Demand) -> Result<()> {
        self.step(&Request { arrival_index: 0, demand: demand.clone() }).map(|_| ())
    }

    fn cost(&self) -> T {
        self.total_cost()
    }

    fn edges(&self) -> Vec<EdgeId> {
        self.owned().zeroed_edges().collect()
    }

    fn facilities(&self) -> Vec<VertexId> {
        self.owned().zeroed_facilities().collect()
    }
}

pub trait Adversary {
    /// Next request given the algorithm's current solution; `None` ends
    /// the game.
    fn next(&mut self, edges: &[EdgeId], facilities: &[VertexId]) -> Option<Demand>;
}

/// A fixed list of requests.
pub struct Scripted(pub VecDeque<Demand>);

impl Scripted {
    pub fn new(demands: impl IntoIterator<Item = Demand>) -> Self {
        Scripted(demands.into_iter().collect())
    }
}

impl Adversary for Scripted {
    fn next(&mut self, _: &[EdgeId], _: &[VertexId]) -> Option<Demand> {
        self.0.pop_front()
    }
}

/// `A` until it stops, then `B`.
pub struct Then<A, B>(pub A, pub B);

impl<A: Adversary, B: Adversary> Adversary for Then<A, B> {
    fn next(&mut self, edges: &[EdgeId], facilities: &[VertexId]) -> Option<Demand> {
        self.0.next(edges, facilities).or_else(|| self.1.next(edges, facilities))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step<T> {
    pub step: usize,
    pub request: Demand,
    /// New edges (`e<id>`) and facilities (`f<id>`) bought for it.
    pub action: String,
    pub cumulative_cost: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript<T> {
    pub steps: Vec<Step<T>>,
}

impl<T: Scalar> Transcript<T> {
    pub fn requests(&self) -> Vec<Request> {
        sequence(self.steps.iter().map(|s| s.request.clone()))
    }

    pub fn total(&self) -> T {
        self.steps.last().map_or_else(T::zero, |s| s.cumulative_cost.clone())
    }

    /// `step,request,algorithm_action,cumulative_cost`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,request,algorithm_action,cumulative_cost\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{},{}\n", s.step, s.request, s.action, s.cumulative_cost));
        }
        out
    }
}

/// Alternates adversary and player until the adversary stops.
pub fn play<T: Scalar>(adversary: &mut dyn Adversary, player: &mut dyn Player<T>) -> Result<Transcript<T>> {
    let mut steps = Vec::new();
    let mut edges = player.edges();
    let mut facilities = player.facilities();
    while let Some(d) = adversary.next(&edges, &facilities) {
        player.serve(&d)?;
        let new_edges = player.edges();
        let new_facilities = player.facilities();
        let mut action: Vec<String> = new_edges.iter().filter(|e| !edges.contains(e)).map(|e| format!("e{e}")).collect();
        action.extend(new_facilities.iter().filter(|f| !facilities.contains(f)).map(|f| format!("f{f}")));
        steps.push(Step { step: steps.len(), request: d, action: action.join(" "), cumulative_cost: player.cost() });
        edges = new_edges;
        facilities = new_facilities;
    }
    Ok(Transcript { steps })
}
