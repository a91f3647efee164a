//! Instances with prescribed prediction size `n`, input size `k`, `Δ1`
//! predictions that never arrive and `Δ2` requests nobody predicted.
//! `ℓ = (n + k - Δ1 - Δ2) / 2` requests are predicted exactly.
//!
//! For Steiner tree the padding is root copies joined to the root by
//! zero-cost edges; for facility location it is isolated vertices with a
//! free facility.

use super::diamond::{DiamondAdversary, DiamondInstance};
use super::fotakis_lb::{FotakisLbAdversary, FotakisTree};
use super::{play, Adversary, Player, Scripted, Then, Transcript};
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::request::{Demand, DemandKind, PredictionSet, Request};
use crate::scalar::Scalar;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NkVariant {
    /// Every prediction is free; the `Δ2` unpredicted requests play the
    /// online lower bound on `G_{Δ2}`.
    Unpredicted,
    /// The prediction covers all of `G_m` with `m = min(ℓ, ⌊√Δ1⌋)`; the
    /// lower bound is played on predicted vertices.
    Intersection,
}

#[derive(Clone, Debug)]
enum Core<T> {
    None,
    Diamond(DiamondInstance<T>),
    Tree(FotakisTree<T>),
}

#[derive(Clone, Debug)]
pub struct NkDeltaInstance<T> {
    pub n: usize,
    pub k: usize,
    pub delta1: usize,
    pub delta2: usize,
    pub ell: usize,
    pub variant: NkVariant,
    pub kind: DemandKind,
    /// Size parameter of the embedded lower-bound graph.
    pub m: usize,
    pub graph: WeightedGraph<T>,
    /// Root for Steiner tree.
    pub root: Option<VertexId>,
    pub predictions: PredictionSet,
    /// Padding vertices beyond the embedded graph.
    pub padded_vertices: usize,
    core: Core<T>,
    prefix: Vec<Demand>,
    tail: Vec<Demand>,
}

fn param(msg: String) -> Error {
    Error::Parameter(msg)
}

fn floor_log2(m: usize) -> u32 {
    usize::BITS - 1 - m.leading_zeros()
}

/// Branching `a ≈ log m / log log m` (at least 2) and the largest height
/// whose phases fit in `m` requests.
fn tree_shape(m: usize) -> (u64, u32) {
    let lg = (m as f64).log2();
    let a = if lg > 2.0 { (lg / lg.log2()).round().max(2.0) as u64 } else { 2 };
    let mut height = 0;
    let mut total = 1u64;
    loop {
        let next = total + a.pow(height + 1);
        if next > m as u64 {
            break;
        }
        total = next;
        height += 1;
    }
    (a, height)
}

impl<T: Scalar> NkDeltaInstance<T> {
    /// The adaptive request schedule: fixed prefix, lower-bound game,
    /// padding.
    pub fn adversary(&self) -> Box<dyn Adversary + '_> {
        let prefix = Scripted::new(self.prefix.clone());
        let tail = Scripted::new(self.tail.clone());
        match &self.core {
            Core::None => Box::new(Then(prefix, tail)),
            Core::Diamond(d) => Box::new(Then(prefix, Then(DiamondAdversary::new(d), tail))),
            Core::Tree(t) => Box::new(Then(prefix, Then(FotakisLbAdversary::new(t), tail))),
        }
    }

    pub fn play(&self, player: &mut dyn Player<T>) -> Result<Transcript<T>> {
        play(self.adversary().as_mut(), player)
    }

    /// Vertices of the embedded graph (diamond or tree with copies).
    pub fn core_vertices(&self) -> usize {
        match &self.core {
            Core::None => 0,
            Core::Diamond(d) => d.graph.vertex_count(),
            Core::Tree(t) => t.graph.vertex_count(),
        }
    }
}

/// `(|R^|, |R|, |R^ \ R|, |R \ R^|)` with multiset differences.
pub fn cardinalities(requests: &[Request], predictions: &PredictionSet) -> (usize, usize, usize, usize) {
    let mut count: HashMap<&Demand, i64> = HashMap::new();
    for p in &predictions.items {
        *count.entry(p).or_default() += 1;
    }
    let mut common = 0;
    for r in requests {
        if let Some(c) = count.get_mut(&r.demand) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    (predictions.len(), requests.len(), predictions.len() - common, requests.len() - common)
}

pub fn nk_delta_adversary<T: Scalar>(
    n: usize,
    k: usize,
    delta1: usize,
    delta2: usize,
    kind: DemandKind,
    variant: NkVariant,
) -> Result<NkDeltaInstance<T>> {
    if kind == DemandKind::TerminalPair {
        return Err(param("the (n, k, Δ1, Δ2) adversary is defined for Steiner tree and facility location".into()));
    }
    if (n + k) < delta1 + delta2 {
        return Err(param(format!("ℓ >= 0 violated: n + k = {} < Δ1 + Δ2 = {}", n + k, delta1 + delta2)));
    }
    if (n + k - delta1 - delta2) % 2 != 0 {
        return Err(param(format!("n + k - Δ1 - Δ2 = {} must be even", n + k - delta1 - delta2)));
    }
    let ell = (n + k - delta1 - delta2) / 2;
    if n < delta1 || n - delta1 != ell || k - delta2 != ell {
        return Err(param(format!("n - Δ1 = k - Δ2 violated: n - Δ1 = {}, k - Δ2 = {}", n as i64 - delta1 as i64, k as i64 - delta2 as i64)));
    }
    let m = match variant {
        NkVariant::Unpredicted => delta2,
        NkVariant::Intersection => ell.min((delta1 as f64).sqrt().floor() as usize),
    };
    if variant == NkVariant::Intersection && m * m + m > n {
        return Err(param(format!("m^2 + m <= n violated: m = {m}, n = {n}")));
    }

    // embedded lower-bound graph and how many requests its game releases
    let (core, core_requests) = match (kind, m) {
        (_, 0) => (Core::None, 0),
        (DemandKind::Terminal, _) => {
            let d = DiamondInstance::<T>::new(floor_log2(m));
            let r = d.request_count();
            (Core::Diamond(d), r)
        }
        _ => {
            let (a, height) = tree_shape(m);
            let t = FotakisTree::<T>::new(height, a, a, T::one(), T::zero())?;
            let r = (0..=height).map(|b| a.pow(b) as usize).sum();
            (Core::Tree(t), r)
        }
    };
    let mut graph = match &core {
        Core::None => {
            let mut g = WeightedGraph::new(1);
            if kind == DemandKind::Client {
                g.set_facility_cost(0, Some(T::one()))?;
            }
            g
        }
        Core::Diamond(d) => d.graph.clone(),
        Core::Tree(t) => t.graph.clone(),
    };
    let core_vertices = graph.vertex_count();
    let demand = |v: VertexId| if kind == DemandKind::Terminal { Demand::Terminal(v) } else { Demand::Client(v) };
    let pad = |g: &mut WeightedGraph<T>| -> Result<VertexId> {
        let v = g.add_vertex();
        if kind == DemandKind::Terminal {
            g.add_edge(0, v, T::zero())?;
        } else {
            g.set_facility_cost(v, Some(T::zero()))?;
        }
        Ok(v)
    };
    let core_pad = m - core_requests;

    let (predicted_pads, prefix, tail) = match variant {
        NkVariant::Unpredicted => {
            let predicted: Vec<VertexId> = (0..n).map(|_| pad(&mut graph)).collect::<Result<_>>()?;
            let extra: Vec<VertexId> = (0..core_pad).map(|_| pad(&mut graph)).collect::<Result<_>>()?;
            let prefix = predicted[..ell].iter().map(|&v| demand(v)).collect();
            let tail = extra.iter().map(|&v| demand(v)).collect();
            (predicted, prefix, tail)
        }
        NkVariant::Intersection => {
            let core_predicted = if m == 0 { 0 } else { core_vertices };
            if core_predicted > n {
                return Err(param(format!("|V(G_m)| <= n violated: {core_predicted} > {n}")));
            }
            let copies = n - core_predicted;
            // ℓ - m prefix copies plus padding of the game
            if ell - m + core_pad > copies {
                return Err(param(format!("ℓ - m + padding <= n - |V(G_m)| violated: {} > {copies}", ell - m + core_pad)));
            }
            let predicted: Vec<VertexId> = (0..copies).map(|_| pad(&mut graph)).collect::<Result<_>>()?;
            let unpredicted: Vec<VertexId> = (0..delta2).map(|_| pad(&mut graph)).collect::<Result<_>>()?;
            let mut prefix: Vec<Demand> = unpredicted.iter().map(|&v| demand(v)).collect();
            prefix.extend(predicted[..ell - m].iter().map(|&v| demand(v)));
            let tail = predicted[ell - m..ell - m + core_pad].iter().map(|&v| demand(v)).collect();
            (predicted, prefix, tail)
        }
    };
    let mut items: Vec<Demand> = Vec::with_capacity(n);
    if variant == NkVariant::Intersection && m > 0 {
        items.extend((0..core_vertices).map(demand));
    }
    items.extend(predicted_pads.iter().map(|&v| demand(v)));
    let padded_vertices = graph.vertex_count() - core_vertices;
    Ok(NkDeltaInstance {
        n,
        k,
        delta1,
        delta2,
        ell,
        variant,
        kind,
        m,
        root: (kind == DemandKind::Terminal).then_some(0),
        predictions: PredictionSet::new(items),
        padded_vertices,
        graph,
        core,
        prefix,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::{Fotakis, GreedyTree};
    use crate::graph::ZeroCostOverlay;
    use num_rational::BigRational;

    type Q = BigRational;

    fn counts(inst: &NkDeltaInstance<Q>) -> (usize, usize, usize, usize) {
        let t = match inst.kind {
            DemandKind::Terminal => {
                let mut e = GreedyTree::new(&inst.graph, 0, ZeroCostOverlay::new(&inst.graph)).unwrap();
                inst.play(&mut e).unwrap()
            }
            _ => {
                let mut e = Fotakis::new(&inst.graph, ZeroCostOverlay::new(&inst.graph)).unwrap();
                inst.play(&mut e).unwrap()
            }
        };
        cardinalities(&t.requests(), &inst.predictions)
    }

    #[test]
    fn declared_cardinalities() {
        for kind in [DemandKind::Terminal, DemandKind::Client] {
            for variant in [NkVariant::Unpredicted, NkVariant::Intersection] {
                let inst = nk_delta_adversary::<Q>(8, 6, 4, 2, kind, variant).unwrap();
                assert_eq!(counts(&inst), (8, 6, 4, 2), "{kind:?} {variant:?}");
            }
        }
    }

    #[test]
    fn perfect_prediction_costs_nothing() {
        let inst = nk_delta_adversary::<Q>(3, 3, 0, 0, DemandKind::Terminal, NkVariant::Unpredicted).unwrap();
        let mut e = GreedyTree::new(&inst.graph, 0, ZeroCostOverlay::new(&inst.graph)).unwrap();
        assert_eq!(inst.play(&mut e).unwrap().total(), Q::from_integer(0.into()));
    }

    #[test]
    fn violations_are_named() {
        let e = nk_delta_adversary::<Q>(3, 2, 0, 0, DemandKind::Terminal, NkVariant::Unpredicted).unwrap_err();
        assert!(e.to_string().contains("even"));
        let e = nk_delta_adversary::<Q>(4, 2, 0, 0, DemandKind::Terminal, NkVariant::Unpredicted).unwrap_err();
        assert!(e.to_string().contains("n - Δ1 = k - Δ2"));
    }

    #[test]
    fn tree_shapes() {
        assert_eq!(tree_shape(1), (2, 0));
        assert_eq!(tree_shape(7), (2, 2));
        assert_eq!(tree_shape(16), (2, 3));
    }
}
